//! Fresnel reflection over complex permittivity and polarimetric reflection
//! of a field vector.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{Material, Vec3};
use crate::tracer::field::{CVec3, Field};

/// Polarisation relative to the plane of incidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FresnelPolarization {
    /// E perpendicular to the plane of incidence.
    Te,
    /// E in the plane of incidence, referenced to `e_par = e_perp x k` on
    /// both rays. In this basis normal incidence gives the negative of the
    /// TE coefficient and a perfect conductor gives +1.
    Tm,
}

/// Fresnel reflection coefficient for a wave arriving at `incidence` radians
/// from the surface normal. Angles outside `[0, pi/2]` are clamped.
pub fn fresnel_reflection(
    material: &Material,
    incidence: f64,
    frequency_hz: f64,
    pol: FresnelPolarization,
) -> Complex64 {
    let theta = incidence.clamp(0.0, std::f64::consts::FRAC_PI_2);
    let eps = material.complex_permittivity(frequency_hz);
    let (sin_t, cos_t) = theta.sin_cos();
    let root = (eps - sin_t * sin_t).sqrt();
    match pol {
        FresnelPolarization::Te => (cos_t - root) / (cos_t + root),
        FresnelPolarization::Tm => {
            let ec = eps * cos_t;
            (ec - root) / (ec + root)
        }
    }
}

/// Reflects `field` travelling along `k_in` off a surface with unit normal
/// `normal` (either orientation). Returns the reflected direction and field.
/// `scale` multiplies both polarisation coefficients.
pub fn reflect_field(
    field: &Field,
    k_in: Vec3,
    normal: Vec3,
    material: &Material,
    frequency_hz: f64,
    scale: f64,
) -> (Vec3, Field) {
    let n = if k_in.dot(normal) > 0.0 { -normal } else { normal };
    let cos_i = (-k_in.dot(n)).clamp(0.0, 1.0);
    let theta = cos_i.acos();
    let k_out = k_in - n * (2.0 * k_in.dot(n));
    let e_perp = perpendicular_basis(k_in, n);
    let e_par_in = e_perp.cross(k_in);
    let e_par_out = e_perp.cross(k_out);
    let g_te = fresnel_reflection(material, theta, frequency_hz, FresnelPolarization::Te) * scale;
    let g_tm = fresnel_reflection(material, theta, frequency_hz, FresnelPolarization::Tm) * scale;
    let c_perp = field.dot_real(e_perp);
    let c_par = field.dot_real(e_par_in);
    let out = CVec3::from_real(e_perp) * (c_perp * g_te) + CVec3::from_real(e_par_out) * (c_par * g_tm);
    (k_out, out)
}

/// Unit vector perpendicular to the plane of incidence. At normal incidence
/// the plane is undefined and any vector orthogonal to `k` will do.
fn perpendicular_basis(k: Vec3, n: Vec3) -> Vec3 {
    let m = k.cross(n);
    if m.norm() > 1e-12 {
        return m.normalized();
    }
    let helper = if k.x.abs() < 0.9 { Vec3::X } else { Vec3::Y };
    k.cross(helper).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MaterialKind;
    use std::f64::consts::FRAC_PI_2;

    const F: f64 = 2.1e9;

    #[test]
    fn concrete_normal_incidence() {
        // Independent evaluation: (1 - sqrt(eps)) / (1 + sqrt(eps)) with
        // eps = 5.31 - j 0.5668 gives |G| = 0.3968.
        let g = fresnel_reflection(&Material::CONCRETE, 0.0, F, FresnelPolarization::Te);
        assert!((g.norm() - 0.397).abs() < 0.005, "{}", g.norm());
        let gm = fresnel_reflection(&Material::CONCRETE, 0.0, F, FresnelPolarization::Tm);
        assert!((g + gm).norm() < 1e-12);
    }

    #[test]
    fn metal_is_nearly_perfect() {
        for pol in [FresnelPolarization::Te, FresnelPolarization::Tm] {
            let g = fresnel_reflection(&Material::METAL, 0.0, F, pol);
            assert!(g.norm() >= 0.999);
        }
    }

    #[test]
    fn grazing_limit_and_passivity() {
        for kind in MaterialKind::BUILTIN {
            let m = Material::builtin(kind);
            for pol in [FresnelPolarization::Te, FresnelPolarization::Tm] {
                // A good conductor has its pseudo-Brewster dip within a few
                // thousandths of a degree of grazing, so TM on metal needs a
                // closer approach to show the limit.
                let near: f64 = if kind == MaterialKind::Metal && pol == FresnelPolarization::Tm {
                    89.99999
                } else {
                    89.9
                };
                let g = fresnel_reflection(&m, near.to_radians(), F, pol);
                assert!(g.norm() >= 0.95, "{kind} {pol:?} {}", g.norm());
                for i in 0..=899 {
                    let th = (i as f64 * 0.1).to_radians();
                    assert!(fresnel_reflection(&m, th, F, pol).norm() <= 1.0 + 1e-12);
                }
            }
        }
        let g = fresnel_reflection(&Material::SOIL, FRAC_PI_2, F, FresnelPolarization::Tm);
        assert!((g + 1.0).norm() < 1e-9);
    }

    #[test]
    fn reflected_direction_and_normal_incidence_field() {
        let field = Field::from_real(Vec3::X);
        let (k_out, out) = reflect_field(&field, -Vec3::Z, Vec3::Z, &Material::CONCRETE, F, 1.0);
        assert!(k_out.distance(Vec3::Z) < 1e-12);
        let g = fresnel_reflection(&Material::CONCRETE, 0.0, F, FresnelPolarization::Te);
        let c = out.dot_real(Vec3::X);
        assert!((c - g).norm() < 1e-12);
    }
}
