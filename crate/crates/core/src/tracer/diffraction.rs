//! Single-edge diffraction: wedge geometry, the uniform-theory-of-diffraction
//! coefficients with finite-conductivity face terms, and a knife-edge
//! approximation for cross-checking.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

use super::fresnel::{fresnel_reflection, FresnelPolarization};
use crate::geometry::{Edge, Vec3};

const J: Complex64 = Complex64::new(0.0, 1.0);

/// Fresnel integrals `(C(x), S(x))` with the `pi t^2 / 2` kernel.
/// Power series below |x| = 1.5, continued fraction above.
pub fn fresnel_integrals(x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-15;
    const MAXIT: usize = 200;
    const XMIN: f64 = 1.5;
    let ax = x.abs();
    let (c, s) = if ax < 1e-150 {
        (ax, 0.0)
    } else if ax <= XMIN {
        let fact = 0.5 * PI * ax * ax;
        let (mut sum, mut sums, mut sumc) = (0.0f64, 0.0f64, ax);
        let mut sign = 1.0;
        let mut odd = true;
        let mut term = ax;
        let mut n = 3.0;
        for k in 1..=MAXIT {
            term *= fact / k as f64;
            sum += sign * term / n;
            let test = sum.abs() * EPS;
            if odd {
                sign = -sign;
                sums = sum;
                sum = sumc;
            } else {
                sumc = sum;
                sum = sums;
            }
            if term < test {
                break;
            }
            odd = !odd;
            n += 2.0;
        }
        (sumc, sums)
    } else {
        // Modified Lentz evaluation of the continued fraction for erfc.
        let pix2 = PI * ax * ax;
        let mut b = Complex64::new(1.0, -pix2);
        let mut cc = Complex64::new(1e300, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        let mut n = -1.0;
        for _ in 2..=MAXIT {
            n += 2.0;
            let a = -n * (n + 1.0);
            b += Complex64::new(4.0, 0.0);
            d = Complex64::new(1.0, 0.0) / (d * a + b);
            cc = b + Complex64::new(a, 0.0) / cc;
            let del = cc * d;
            h *= del;
            if (del - 1.0).norm() < EPS {
                break;
            }
        }
        h *= Complex64::new(ax, -ax);
        let cs = Complex64::new(0.5, 0.5) * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 0.5 * pix2) * h);
        (cs.re, cs.im)
    };
    if x < 0.0 {
        (-c, -s)
    } else {
        (c, s)
    }
}

/// UTD transition function `F(X) = 2j sqrt(X) e^{jX} int_{sqrt X}^inf e^{-j t^2} dt`.
pub fn transition_function(x: f64) -> Complex64 {
    if x <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let a = x.sqrt();
    let (c, s) = fresnel_integrals(a * (2.0 / PI).sqrt());
    let tail = Complex64::new(0.5 - c, -(0.5 - s)) * (PI / 2.0).sqrt();
    J * 2.0 * a * Complex64::from_polar(1.0, x) * tail
}

/// Wedge-relative angles of a diffraction configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeAngles {
    /// Exterior angle index (`n pi` is the exterior angle).
    pub n: f64,
    /// Angle of the source measured from face 0, radians.
    pub phi_src: f64,
    /// Angle of the observer measured from face 0, radians.
    pub phi_obs: f64,
    /// Angle between the incident ray and the edge, radians.
    pub beta0: f64,
}

/// Angle in `[0, 2 pi)` of point `p` around the edge through `q`, measured
/// from face 0 toward the exterior.
pub fn angle_from_face0(edge: &Edge, q: Vec3, p: Vec3) -> f64 {
    let e = edge.direction();
    let w = p - q;
    let w = w - e * w.dot(e);
    let t0 = edge.face0_tangent();
    let mut phi = w.dot(edge.n0).atan2(w.dot(t0));
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    phi
}

/// Point on the edge line where the path `src -> Q -> obs` satisfies the
/// diffraction law (equal angles to the edge). Returns the point and its
/// parameter along the edge from `a`, or `None` when it falls outside the
/// finite edge.
pub fn diffraction_point(edge: &Edge, src: Vec3, obs: Vec3) -> Option<(Vec3, f64)> {
    let e = edge.direction();
    let len = edge.length();
    let ts = (src - edge.a).dot(e);
    let to = (obs - edge.a).dot(e);
    let rs = ((src - edge.a) - e * ts).norm();
    let ro = ((obs - edge.a) - e * to).norm();
    if rs + ro <= 1e-12 {
        return None;
    }
    let t = ts + (to - ts) * rs / (rs + ro);
    let margin = 1e-6 * len.max(1.0);
    if t <= margin || t >= len - margin {
        return None;
    }
    Some((edge.a + e * t, t))
}

/// Evaluates one cotangent/transition product of the UTD coefficient,
/// switching to the boundary expansion where the cotangent is singular.
fn cot_term(n: f64, beta: f64, sign: f64, kl: f64) -> Complex64 {
    // N is the integer that most nearly satisfies 2 pi n N - beta = sign * pi;
    // eps vanishes on the matching shadow or reflection boundary.
    let big_n = ((beta + sign * PI) / (2.0 * PI * n)).round();
    let eps = PI + sign * beta - 2.0 * PI * n * big_n * sign;
    let arg = (PI + sign * beta) / (2.0 * n);
    if eps.abs() < 1e-4 {
        let e_pi4 = Complex64::from_polar(1.0, FRAC_PI_4);
        let sgn = if eps >= 0.0 { 1.0 } else { -1.0 };
        return (Complex64::new((2.0 * PI * kl).sqrt() * sgn, 0.0) - e_pi4 * (2.0 * kl * eps)) * e_pi4 * n;
    }
    let a = 2.0 * ((2.0 * PI * n * big_n - beta) / 2.0).cos().powi(2);
    Complex64::new(1.0 / arg.tan(), 0.0) * transition_function(kl * a)
}

/// Soft and hard UTD diffraction coefficients for a wedge with lossy faces.
/// `r0`/`rn` are `(soft, hard)` reflection coefficients of face 0 and face n.
pub fn utd_coefficients(
    angles: &WedgeAngles,
    distance_param: f64,
    wavenumber: f64,
    r0: (Complex64, Complex64),
    rn: (Complex64, Complex64),
) -> (Complex64, Complex64) {
    let n = angles.n;
    let kl = wavenumber * distance_param;
    let minus = angles.phi_obs - angles.phi_src;
    let plus = angles.phi_obs + angles.phi_src;
    let t1 = cot_term(n, minus, 1.0, kl);
    let t2 = cot_term(n, minus, -1.0, kl);
    let t3 = cot_term(n, plus, 1.0, kl);
    let t4 = cot_term(n, plus, -1.0, kl);
    let pref = -Complex64::from_polar(1.0, -FRAC_PI_4)
        / (2.0 * n * (2.0 * PI * wavenumber).sqrt() * angles.beta0.sin().max(1e-6));
    let soft = pref * (t1 + t2 + r0.0 * t4 + rn.0 * t3);
    let hard = pref * (t1 + t2 + r0.1 * t4 + rn.1 * t3);
    (soft, hard)
}

/// Face reflection coefficients `(soft, hard)` for the lossy-wedge terms.
/// Evaluated at the smaller of the two grazing angles to each face so the
/// coefficient stays reciprocal in source and observer.
pub fn face_coefficients(
    edge: &Edge,
    angles: &WedgeAngles,
    frequency_hz: f64,
) -> ((Complex64, Complex64), (Complex64, Complex64)) {
    let graze0 = angles.phi_src.min(angles.phi_obs).clamp(0.0, PI / 2.0);
    let nphi = angles.n * PI;
    let grazen = (nphi - angles.phi_src).min(nphi - angles.phi_obs).clamp(0.0, PI / 2.0);
    let coeffs = |graze: f64| {
        let theta = PI / 2.0 - graze;
        (
            fresnel_reflection(&edge.material, theta, frequency_hz, FresnelPolarization::Te),
            fresnel_reflection(&edge.material, theta, frequency_hz, FresnelPolarization::Tm),
        )
    };
    (coeffs(graze0), coeffs(grazen))
}

/// Knife-edge diffraction loss in dB for the Fresnel-Kirchhoff parameter
/// `nu` (ITU-R P.526 approximation), zero for `nu <= -0.78`.
pub fn knife_edge_loss_db(nu: f64) -> f64 {
    if nu <= -0.78 {
        return 0.0;
    }
    6.9 + 20.0 * (((nu - 0.1).powi(2) + 1.0).sqrt() + nu - 0.1).log10()
}
