//! Through station: two platforms under a ceiling carried on columns.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::clutter::{building, Placer};
use super::shapes::{add, axis_box, horizontal_rect, vertical_plate, BoxFaces};
use super::{check_extent, positive, TX_KEEPOUT};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Edge, Material, Scene, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationParams {
    pub platform_length: f64,
    /// Total width of the platform area, track gap included.
    pub platform_width: f64,
    /// Ceiling underside above the platform top.
    pub ceiling_height: f64,
    pub platform_height: f64,
    /// Chainage where the platforms start.
    pub platform_start: f64,
    /// Width of the track bed between the platform edges.
    pub track_gap: f64,
    pub ceiling_thickness: f64,
    pub column_rows: usize,
    pub columns_per_row: usize,
    pub column_size: f64,
    /// Station signs per platform.
    pub signs: usize,
    /// Station hall beside the platforms on the TX side, `[x0, x1, y0, y1, height]`.
    pub hall: Option<[f64; 5]>,
    pub extent_x: f64,
    pub extent_y: f64,
    pub buildings: usize,
}

impl Default for StationParams {
    fn default() -> Self {
        StationParams {
            platform_length: 600.0,
            platform_width: 48.0,
            ceiling_height: 20.0,
            platform_height: 1.25,
            platform_start: 50.0,
            track_gap: 10.0,
            ceiling_thickness: 1.0,
            column_rows: 2,
            columns_per_row: 13,
            column_size: 1.0,
            signs: 4,
            hall: Some([400.0, 460.0, 28.0, 40.0, 15.0]),
            extent_x: 700.0,
            extent_y: 300.0,
            buildings: 6,
        }
    }
}

impl StationParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("station.platform_length", self.platform_length),
            ("station.platform_width", self.platform_width),
            ("station.ceiling_height", self.ceiling_height),
            ("station.platform_height", self.platform_height),
            ("station.track_gap", self.track_gap),
            ("station.ceiling_thickness", self.ceiling_thickness),
            ("station.column_size", self.column_size),
        ] {
            positive(name, v)?;
        }
        check_extent("station", self.extent_x, self.extent_y)?;
        if self.platform_start < 0.0 || self.platform_start + self.platform_length > self.extent_x {
            return Err(Error::invalid(
                "station.platform_length",
                "platform does not fit the extent",
            ));
        }
        if self.platform_width / 2.0 >= self.extent_y / 2.0 {
            return Err(Error::invalid(
                "station.platform_width",
                "platform does not fit the extent",
            ));
        }
        if self.track_gap + 2.0 * self.column_size >= self.platform_width {
            return Err(Error::invalid("station.track_gap", "no room for platforms"));
        }
        if self.column_rows % 2 == 1 {
            return Err(Error::invalid(
                "station.column_rows",
                "rows are split evenly between the two platforms",
            ));
        }
        if let Some([x0, x1, y0, y1, h]) = self.hall {
            if !(x1 > x0 && y1 > y0 && h > 0.0 && y0 > self.platform_width / 2.0 && y1 < self.extent_y / 2.0) {
                return Err(Error::invalid(
                    "station.hall",
                    "must be a box beside the platforms inside the extent",
                ));
            }
        }
        Ok(())
    }

    pub fn ceiling_z(&self) -> f64 {
        self.platform_height + self.ceiling_height
    }

    /// Lateral positions of the column rows, half on each platform.
    pub fn column_row_offsets(&self) -> Vec<f64> {
        let per_side = self.column_rows / 2;
        let inner = self.track_gap / 2.0;
        let outer = self.platform_width / 2.0;
        let step = (outer - inner) / (per_side as f64 + 1.0);
        let mut ys: Vec<f64> = (1..=per_side).map(|k| inner + step * k as f64).collect();
        let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
        ys.extend(neg);
        ys.sort_by(f64::total_cmp);
        ys
    }

    pub fn column_chainages(&self) -> Vec<f64> {
        let n = self.columns_per_row;
        let step = self.platform_length / n as f64;
        (0..n).map(|i| self.platform_start + step * (i as f64 + 0.5)).collect()
    }
}

pub fn build_station(p: &StationParams, seed: u64) -> Result<Scene> {
    p.validate()?;
    let (lx, hy) = (p.extent_x, p.extent_y / 2.0);
    let (px0, px1) = (p.platform_start, p.platform_start + p.platform_length);
    let (gap, pw) = (p.track_gap / 2.0, p.platform_width / 2.0);
    let ceil = p.ceiling_z();
    let bounds = Aabb::new(
        Vec3::new(0.0, -hy, -1.0),
        Vec3::new(lx, hy, ceil + p.ceiling_thickness + 40.0),
    );
    let track = vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(lx, 0.0, 0.0)];
    let mut scene = Scene::empty(bounds, track);

    add(
        &mut scene,
        horizontal_rect("ground", Material::SOIL, (0.0, lx), (-hy, hy), 0.0, true)?.scatters(false),
    );

    for side in [1.0, -1.0] {
        let (ya, yb) = if side > 0.0 { (gap, pw) } else { (-pw, -gap) };
        add(
            &mut scene,
            horizontal_rect(
                "platform_floor",
                Material::MARBLE,
                (px0, px1),
                (ya, yb),
                p.platform_height,
                true,
            )?
            .scatters(false),
        );
        add(
            &mut scene,
            axis_box(
                "platform_edge",
                Material::CONCRETE,
                Vec3::new(px0, ya, 0.0),
                Vec3::new(px1, yb, p.platform_height),
                BoxFaces {
                    top: false,
                    bottom: false,
                    ..BoxFaces::ALL
                },
            )?,
        );
        let edge_y = side * gap;
        scene.edges.push(Edge::convex(
            Vec3::new(px0, edge_y, p.platform_height),
            Vec3::new(px1, edge_y, p.platform_height),
            Vec3::Z,
            Vec3::new(0.0, -side, 0.0),
            Material::CONCRETE,
        )?);
    }

    // Ceiling slab.
    let ceil_min = Vec3::new(px0, -pw, ceil);
    let ceil_max = Vec3::new(px1, pw, ceil + p.ceiling_thickness);
    add(
        &mut scene,
        axis_box("ceiling", Material::CONCRETE, ceil_min, ceil_max, BoxFaces::ALL)?,
    );
    for (y, ny) in [(-pw, -Vec3::Y), (pw, Vec3::Y)] {
        scene.edges.push(Edge::convex(
            Vec3::new(px0, y, ceil),
            Vec3::new(px1, y, ceil),
            -Vec3::Z,
            ny,
            Material::CONCRETE,
        )?);
    }
    for (x, nx) in [(px0, -Vec3::X), (px1, Vec3::X)] {
        scene.edges.push(Edge::convex(
            Vec3::new(x, -pw, ceil),
            Vec3::new(x, pw, ceil),
            -Vec3::Z,
            nx,
            Material::CONCRETE,
        )?);
    }

    // Columns between platform top and ceiling.
    let c = p.column_size / 2.0;
    for y in p.column_row_offsets() {
        for x in p.column_chainages() {
            add(
                &mut scene,
                axis_box(
                    "column",
                    Material::CONCRETE,
                    Vec3::new(x - c, y - c, p.platform_height),
                    Vec3::new(x + c, y + c, ceil),
                    BoxFaces {
                        top: false,
                        bottom: false,
                        ..BoxFaces::ALL
                    },
                )?,
            );
        }
    }

    // Hanging station signs facing along the track.
    if p.signs > 0 {
        let step = p.platform_length / p.signs as f64;
        let y_sign = (gap + pw) / 2.0;
        for i in 0..p.signs {
            let x = px0 + step * (i as f64 + 0.25);
            for y in [y_sign, -y_sign] {
                let center = Vec3::new(x, y, ceil - 4.0);
                add(
                    &mut scene,
                    vertical_plate(
                        "station_sign",
                        Material::METAL,
                        center,
                        std::f64::consts::FRAC_PI_2,
                        4.0,
                        1.5,
                    )?,
                );
            }
        }
    }

    if let Some([x0, x1, y0, y1, h]) = p.hall {
        let min = Vec3::new(x0, y0, 0.0);
        let max = Vec3::new(x1, y1, h);
        add(
            &mut scene,
            axis_box("station_hall", Material::CONCRETE, min, max, BoxFaces::STANDING)?,
        );
        scene
            .edges
            .extend(super::shapes::box_edges(min, max, Material::CONCRETE)?);
    }

    let mut placer = Placer::new(seed);
    placer.reserve(0.0, super::DEFAULT_TX_OFFSET, TX_KEEPOUT);
    if let Some([x0, x1, y0, y1, _]) = p.hall {
        placer.reserve((x0 + x1) / 2.0, (y0 + y1) / 2.0, (x1 - x0).hypot(y1 - y0) / 2.0);
    }
    for _ in 0..p.buildings {
        let half: (f64, f64) = (placer.rng().gen_range(8.0..20.0), placer.rng().gen_range(6.0..12.0));
        let height = placer.rng().gen_range(8.0..25.0);
        let r = half.0.hypot(half.1);
        if let Some((x, y)) = placer.place((0.0, lx), (pw + 20.0, hy), r) {
            building(&mut scene, x, y, 0.0, half, height)?;
        }
    }
    scene.validate()?;
    Ok(scene)
}
