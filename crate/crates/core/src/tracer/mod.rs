//! Deterministic multipath search between a transmitter and a receiver.
//!
//! Path families:
//! - line of sight,
//! - specular reflections found with the image method (up to
//!   `max_reflection_order` bounces, each validated for visibility),
//! - single-edge diffraction on the scene's tagged wedges (UTD, or a
//!   knife-edge approximation),
//! - single-bounce Lambertian scattering from surface tiles.
//!
//! A path amplitude is the complex received field for unit transmit power
//! between isotropic, co-polarised antennas scaled by the antenna field gains:
//! `a = lambda / (4 pi) * g_t * g_r * (E . p_r) * exp(-j k L) / spreading`.
//! Free space therefore gives `|a|^2` equal to the Friis path gain.

pub mod diffraction;
mod field;
pub mod fresnel;
mod image;
mod scatter;

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::antenna::AntennaPattern;
use crate::error::{Error, Result};
use crate::geometry::{build_facets, AccelStructure, Facet, Scene, Vec3};
use crate::units::{db_to_linear_amplitude, power_to_db, wavelength, SPEED_OF_LIGHT};

use diffraction::{
    angle_from_face0, diffraction_point, face_coefficients, knife_edge_loss_db, utd_coefficients, WedgeAngles,
};
use field::{vertical_polarization, CVec3, Field};
use fresnel::{fresnel_reflection, reflect_field, FresnelPolarization};
use image::ImageTree;
use scatter::{tessellate, Tile};

/// Diffraction coefficient used for edge paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DiffractionModel {
    #[default]
    Utd,
    /// Single knife-edge loss applied to the unfolded free-space path. Only
    /// shadowed receivers get a diffracted path in this mode.
    KnifeEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceConfig {
    pub carrier_frequency: f64,
    pub bandwidth: f64,
    pub max_reflection_order: usize,
    pub max_diffraction_order: usize,
    pub enable_scattering: bool,
    pub scattering_coefficient: f64,
    /// Longest tile edge used to discretise scattering surfaces, metres.
    pub scatter_tile_size: f64,
    /// Paths weaker than the strongest by more than this many dB are dropped.
    pub path_power_floor_db: f64,
    pub diffraction_model: DiffractionModel,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            carrier_frequency: 2.1e9,
            bandwidth: 10e6,
            max_reflection_order: 3,
            max_diffraction_order: 1,
            enable_scattering: true,
            scattering_coefficient: 0.4,
            scatter_tile_size: 4.0,
            path_power_floor_db: 40.0,
            diffraction_model: DiffractionModel::Utd,
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_frequency.is_finite() && self.carrier_frequency > 0.0) {
            return Err(Error::invalid("trace.carrier_frequency", "must be positive"));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(Error::invalid("trace.bandwidth", "must be positive"));
        }
        if self.max_reflection_order > 8 {
            return Err(Error::invalid("trace.max_reflection_order", "at most 8 supported"));
        }
        if self.max_diffraction_order > 1 {
            return Err(Error::invalid("trace.max_diffraction_order", "only 0 or 1 supported"));
        }
        if !(0.0..=1.0).contains(&self.scattering_coefficient) {
            return Err(Error::invalid("trace.scattering_coefficient", "must lie in [0, 1]"));
        }
        if !(self.scatter_tile_size.is_finite() && self.scatter_tile_size > 0.0) {
            return Err(Error::invalid("trace.scatter_tile_size", "must be positive"));
        }
        if !(self.path_power_floor_db.is_finite() && self.path_power_floor_db >= 0.0) {
            return Err(Error::invalid("trace.path_power_floor_db", "must be non-negative"));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.carrier_frequency)
    }

    fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength()
    }

    fn specular_scale(&self) -> f64 {
        if self.enable_scattering {
            (1.0 - self.scattering_coefficient.powi(2)).sqrt()
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PathKind {
    Los,
    Reflected { order: u8 },
    Diffracted,
    Scattered,
}

impl PathKind {
    /// Short label used in CSV exports: `los`, `r1`..`rN`, `diffracted`,
    /// `scattered`.
    pub fn label(&self) -> String {
        match self {
            PathKind::Los => "los".into(),
            PathKind::Reflected { order } => format!("r{order}"),
            PathKind::Diffracted => "diffracted".into(),
            PathKind::Scattered => "scattered".into(),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            PathKind::Los => 0,
            PathKind::Reflected { order } => *order,
            PathKind::Diffracted => 100,
            PathKind::Scattered => 101,
        }
    }
}

/// One multipath component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationPath {
    pub kind: PathKind,
    /// Interaction points from transmitter to receiver, endpoints excluded.
    pub points: Vec<Vec3>,
    /// Unfolded length in metres.
    pub length: f64,
    /// Propagation delay in seconds.
    pub delay: f64,
    pub amplitude: Complex64,
    pub aod_az: f64,
    pub aod_el: f64,
    pub aoa_az: f64,
    pub aoa_el: f64,
    /// Kinematic Doppler shift; zero until a sweep assigns receiver motion.
    pub doppler_hz: f64,
}

impl PropagationPath {
    pub fn power(&self) -> f64 {
        self.amplitude.norm_sqr()
    }

    /// Unit vector from the receiver toward the last interaction.
    pub fn arrival_direction(&self) -> Vec3 {
        Vec3::from_az_el_deg(self.aoa_az, self.aoa_el)
    }

    /// Unit vector from the transmitter toward the first interaction.
    pub fn departure_direction(&self) -> Vec3 {
        Vec3::from_az_el_deg(self.aod_az, self.aod_el)
    }
}

/// Path power in dB, `-inf` for a zero amplitude.
pub fn path_power(path: &PropagationPath) -> f64 {
    power_to_db(path.power())
}

/// Antenna position and pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Endpoint {
    pub position: Vec3,
    pub pattern: AntennaPattern,
}

impl Endpoint {
    pub fn new(position: Vec3, pattern: AntennaPattern) -> Self {
        Endpoint { position, pattern }
    }

    pub fn omni(position: Vec3) -> Self {
        Endpoint::new(position, AntennaPattern::omni())
    }
}

/// Tile illuminated by the transmitter.
#[derive(Debug, Clone, Copy)]
struct LitTile {
    center: Vec3,
    /// Tile normal oriented toward the transmitter.
    normal: Vec3,
    area: f64,
    cos_i: f64,
    r1: f64,
    departure: Vec3,
    gamma0: f64,
}

/// Transmitter-side precomputation shared by every receiver position.
pub struct Tracer<'a> {
    scene: &'a Scene,
    accel: Option<&'a AccelStructure>,
    cfg: TraceConfig,
    tx: Vec3,
    facets: Vec<Facet>,
    images: ImageTree,
    tiles: Vec<LitTile>,
}

impl<'a> Tracer<'a> {
    /// `accel` must be built from `scene`; it may be `None` only when the
    /// scene has no triangles.
    pub fn new(scene: &'a Scene, accel: Option<&'a AccelStructure>, tx: Vec3, cfg: &TraceConfig) -> Result<Tracer<'a>> {
        cfg.validate()?;
        check_position(scene, tx, "tx.position")?;
        if accel.is_none() && scene.triangle_count() > 0 {
            return Err(Error::invalid("accel", "required for a non-empty scene"));
        }
        let facets = build_facets(scene);
        let images = ImageTree::build(tx, &facets, cfg.max_reflection_order);
        let mut tracer = Tracer {
            scene,
            accel,
            cfg: *cfg,
            tx,
            facets,
            images,
            tiles: Vec::new(),
        };
        if cfg.enable_scattering && cfg.scattering_coefficient > 0.0 {
            tracer.tiles = tracer.light_tiles(tessellate(scene, cfg.scatter_tile_size));
        }
        Ok(tracer)
    }

    pub fn tx_position(&self) -> Vec3 {
        self.tx
    }

    pub fn config(&self) -> &TraceConfig {
        &self.cfg
    }

    /// Number of candidate image-method nodes.
    pub fn image_count(&self) -> usize {
        self.images.len()
    }

    /// Number of scattering tiles lit by the transmitter.
    pub fn lit_tile_count(&self) -> usize {
        self.tiles.len()
    }

    fn occluded(&self, a: Vec3, b: Vec3) -> bool {
        self.accel.is_some_and(|acc| acc.occluded(a, b))
    }

    fn light_tiles(&self, tiles: Vec<Tile>) -> Vec<LitTile> {
        tiles
            .into_iter()
            .filter_map(|t| {
                let to_tx = self.tx - t.center;
                let r1 = to_tx.norm();
                if r1 <= 1e-9 {
                    return None;
                }
                let side = to_tx.dot(t.normal);
                if side.abs() <= 1e-12 || (!t.two_sided && side < 0.0) {
                    return None;
                }
                let normal = if side > 0.0 { t.normal } else { -t.normal };
                if self.occluded(self.tx, t.center) {
                    return None;
                }
                let material = self.scene.surfaces[t.surface].material;
                let gamma0 =
                    fresnel_reflection(&material, 0.0, self.cfg.carrier_frequency, FresnelPolarization::Te).norm();
                Some(LitTile {
                    center: t.center,
                    normal,
                    area: t.area,
                    cos_i: side.abs() / r1,
                    r1,
                    departure: (t.center - self.tx) / r1,
                    gamma0,
                })
            })
            .collect()
    }

    /// All paths to `rx`, strongest-relative floor applied, sorted by delay.
    pub fn trace(&self, tx_pattern: &AntennaPattern, rx: &Endpoint) -> Result<Vec<PropagationPath>> {
        check_position(self.scene, rx.position, "rx.position")?;
        if rx.position.distance(self.tx) <= 1e-9 {
            return Err(Error::invalid("rx.position", "coincides with the transmitter"));
        }
        let ctx = Ctx {
            tracer: self,
            tx_pattern,
            rx,
            lambda: self.cfg.wavelength(),
            k: self.cfg.wavenumber(),
        };
        let mut paths = Vec::new();
        let los_blocked = self.occluded(self.tx, rx.position);
        if !los_blocked {
            paths.push(ctx.los());
        }
        for i in 0..self.images.len() {
            if let Some(p) = ctx.reflection(i) {
                paths.push(p);
            }
        }
        if self.cfg.max_diffraction_order >= 1 {
            for edge in &self.scene.edges {
                if let Some(p) = ctx.diffraction(edge, los_blocked) {
                    paths.push(p);
                }
            }
        }
        let strongest = paths.iter().map(|p| p.power()).fold(0.0, f64::max);
        let floor = db_to_linear_amplitude(-self.cfg.path_power_floor_db).powi(2);
        if !self.tiles.is_empty() {
            let threshold = strongest * floor;
            for tile in &self.tiles {
                if let Some(p) = ctx.scattered(tile, threshold) {
                    paths.push(p);
                }
            }
        }
        let strongest = paths.iter().map(|p| p.power()).fold(0.0, f64::max);
        let threshold = strongest * floor;
        paths.retain(|p| p.power() > 0.0 && p.power() >= threshold);
        paths.sort_by(compare_paths);
        Ok(paths)
    }
}

/// Convenience wrapper building a [`Tracer`] for a single query.
pub fn trace_paths(
    scene: &Scene,
    accel: Option<&AccelStructure>,
    tx: &Endpoint,
    rx: &Endpoint,
    cfg: &TraceConfig,
) -> Result<Vec<PropagationPath>> {
    Tracer::new(scene, accel, tx.position, cfg)?.trace(&tx.pattern, rx)
}

fn check_position(scene: &Scene, p: Vec3, field: &'static str) -> Result<()> {
    if !p.is_finite() {
        return Err(Error::NonFinite(field));
    }
    if !scene.bounds.contains(p) {
        return Err(Error::invalid(
            field,
            format!("({}, {}, {}) outside the scene bounds", p.x, p.y, p.z),
        ));
    }
    Ok(())
}

fn compare_paths(a: &PropagationPath, b: &PropagationPath) -> Ordering {
    a.delay
        .total_cmp(&b.delay)
        .then(a.kind.rank().cmp(&b.kind.rank()))
        .then_with(|| {
            for (p, q) in a.points.iter().zip(&b.points) {
                let o = p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)).then(p.z.total_cmp(&q.z));
                if o != Ordering::Equal {
                    return o;
                }
            }
            a.points.len().cmp(&b.points.len())
        })
}

/// Per-query state.
struct Ctx<'t, 'a> {
    tracer: &'t Tracer<'a>,
    tx_pattern: &'t AntennaPattern,
    rx: &'t Endpoint,
    lambda: f64,
    k: f64,
}

impl Ctx<'_, '_> {
    fn tx_gain(&self, departure: Vec3) -> f64 {
        let (az, el) = departure.to_az_el_deg();
        db_to_linear_amplitude(self.tx_pattern.gain(az, el))
    }

    fn rx_gain(&self, arrival: Vec3) -> f64 {
        let (az, el) = arrival.to_az_el_deg();
        db_to_linear_amplitude(self.rx.pattern.gain(az, el))
    }

    /// Assembles a path from its geometry and the complex factor that
    /// multiplies `lambda / (4 pi) * g_t * g_r * exp(-j k L)`.
    fn finish(
        &self,
        kind: PathKind,
        points: Vec<Vec3>,
        length: f64,
        departure: Vec3,
        arrival: Vec3,
        factor: Complex64,
    ) -> PropagationPath {
        let gain = self.tx_gain(departure) * self.rx_gain(arrival);
        let amplitude = Complex64::from_polar(self.lambda / (4.0 * PI) * gain, -self.k * length) * factor;
        let (aod_az, aod_el) = departure.to_az_el_deg();
        let (aoa_az, aoa_el) = arrival.to_az_el_deg();
        PropagationPath {
            kind,
            points,
            length,
            delay: length / SPEED_OF_LIGHT,
            amplitude,
            aod_az,
            aod_el,
            aoa_az,
            aoa_el,
            doppler_hz: 0.0,
        }
    }

    fn los(&self) -> PropagationPath {
        let tx = self.tracer.tx;
        let d = tx.distance(self.rx.position);
        let k = (self.rx.position - tx) / d;
        let pol = vertical_polarization(k);
        let factor = Complex64::new(pol.dot(pol) / d, 0.0);
        self.finish(PathKind::Los, Vec::new(), d, k, -k, factor)
    }

    fn reflection(&self, node: usize) -> Option<PropagationPath> {
        let t = self.tracer;
        let rx = self.rx.position;
        let points = t.images.reflection_points(node, &t.facets, rx)?;
        let mut prev = t.tx;
        for &p in points.iter().chain(std::iter::once(&rx)) {
            if t.occluded(prev, p) {
                return None;
            }
            prev = p;
        }
        let mut facet_ids = Vec::with_capacity(points.len());
        let mut idx = node as u32;
        while idx != image::ROOT {
            let n = &t.images.nodes[idx as usize];
            facet_ids.push(n.facet as usize);
            idx = n.parent;
        }
        facet_ids.reverse();

        let departure = (points[0] - t.tx).normalized();
        let mut k_dir = departure;
        let mut e: Field = CVec3::from_real(vertical_polarization(departure));
        let mut length = t.tx.distance(points[0]);
        let scale = t.cfg.specular_scale();
        for (i, &p) in points.iter().enumerate() {
            let f = &t.facets[facet_ids[i]];
            let (k_out, e_out) = reflect_field(&e, k_dir, f.normal, &f.material, t.cfg.carrier_frequency, scale);
            e = e_out;
            let next = points.get(i + 1).copied().unwrap_or(rx);
            length += p.distance(next);
            k_dir = (next - p).normalized();
            // Exact specular geometry makes k_out equal the next leg; the
            // recomputed leg avoids drift over several bounces.
            debug_assert!(k_out.distance(k_dir) < 1e-6);
        }
        let arrival = -k_dir;
        let factor = e.dot_real(vertical_polarization(k_dir)) / length;
        let order = points.len() as u8;
        Some(self.finish(
            PathKind::Reflected { order },
            points,
            length,
            departure,
            arrival,
            factor,
        ))
    }

    fn diffraction(&self, edge: &crate::geometry::Edge, los_blocked: bool) -> Option<PropagationPath> {
        let t = self.tracer;
        let tx = t.tx;
        let rx = self.rx.position;
        let (q, _) = diffraction_point(edge, tx, rx)?;
        let n = edge.wedge_index();
        let phi_src = angle_from_face0(edge, q, tx);
        let phi_obs = angle_from_face0(edge, q, rx);
        let exterior = n * PI;
        let margin = 1e-9;
        if !(phi_src > margin && phi_src < exterior - margin && phi_obs > margin && phi_obs < exterior - margin) {
            return None;
        }
        // Visibility is tested against a point nudged off the edge into the
        // exterior so the wedge faces themselves do not block.
        let bisector = (edge.n0 + edge.n1).normalized();
        let probe = q + bisector * 1e-4;
        if t.occluded(tx, probe) || t.occluded(probe, rx) {
            return None;
        }
        let s_in = tx.distance(q);
        let s_out = q.distance(rx);
        let k_in = (q - tx) / s_in;
        let k_out = (rx - q) / s_out;
        let length = s_in + s_out;

        let factor = match t.cfg.diffraction_model {
            DiffractionModel::Utd => {
                let axis = edge.face0_tangent().cross(edge.n0).normalized();
                let cos_b = k_in.dot(axis).clamp(-1.0, 1.0);
                let beta0 = cos_b.acos();
                let sin_b = beta0.sin();
                if sin_b <= 1e-6 {
                    return None;
                }
                let angles = WedgeAngles {
                    n,
                    phi_src,
                    phi_obs,
                    beta0,
                };
                let l = s_in * s_out * sin_b * sin_b / length;
                let (r0, rn) = face_coefficients(edge, &angles, t.cfg.carrier_frequency);
                let (d_soft, d_hard) = utd_coefficients(&angles, l, self.k, r0, rn);
                let phi_hat_in = axis.cross(-k_in).normalized();
                let phi_hat_in = phi_hat_in - k_in * phi_hat_in.dot(k_in);
                let phi_hat_in = phi_hat_in.normalized();
                let beta_hat_in = k_in.cross(phi_hat_in);
                let phi_hat_out = axis.cross(k_out);
                let phi_hat_out = (phi_hat_out - k_out * phi_hat_out.dot(k_out)).normalized();
                let beta_hat_out = k_out.cross(phi_hat_out);
                let e_in = vertical_polarization(k_in);
                let e_out = CVec3::from_real(beta_hat_out) * (-d_soft * e_in.dot(beta_hat_in))
                    + CVec3::from_real(phi_hat_out) * (-d_hard * e_in.dot(phi_hat_in));
                let spread = (s_in / (s_out * length)).sqrt() / s_in;
                e_out.dot_real(vertical_polarization(k_out)) * spread
            }
            DiffractionModel::KnifeEdge => {
                if !los_blocked {
                    return None;
                }
                let dir = (rx - tx).normalized();
                let rel = q - tx;
                let clearance = (rel - dir * rel.dot(dir)).norm();
                let nu = clearance * (2.0 / self.lambda * (1.0 / s_in + 1.0 / s_out)).sqrt();
                let loss = db_to_linear_amplitude(-knife_edge_loss_db(nu));
                let p_t = vertical_polarization(k_in);
                let p_r = vertical_polarization(k_out);
                Complex64::new(p_t.dot(p_r) * loss / length, 0.0)
            }
        };
        if !(factor.re.is_finite() && factor.im.is_finite()) {
            return None;
        }
        Some(self.finish(PathKind::Diffracted, vec![q], length, k_in, -k_out, factor))
    }

    fn scattered(&self, tile: &LitTile, threshold: f64) -> Option<PropagationPath> {
        let t = self.tracer;
        let rx = self.rx.position;
        let to_rx = rx - tile.center;
        let r2 = to_rx.norm();
        if r2 <= 1e-9 {
            return None;
        }
        let cos_s = to_rx.dot(tile.normal) / r2;
        if cos_s <= 0.0 {
            return None;
        }
        let s = t.cfg.scattering_coefficient;
        let magnitude = s * tile.gamma0 * (tile.cos_i * cos_s * tile.area / PI).sqrt() / (tile.r1 * r2);
        // Cheap bound before the visibility test: receive gain at its peak.
        let arrival = -to_rx / r2;
        let bound = (self.lambda / (4.0 * PI) * magnitude * self.tx_gain(tile.departure)).powi(2)
            * db_to_linear_amplitude(self.rx.pattern.peak_gain_dbi).powi(2);
        if bound < threshold {
            return None;
        }
        if t.occluded(tile.center, rx) {
            return None;
        }
        let length = tile.r1 + r2;
        Some(self.finish(
            PathKind::Scattered,
            vec![tile.center],
            length,
            tile.departure,
            arrival,
            Complex64::new(magnitude, 0.0),
        ))
    }
}
