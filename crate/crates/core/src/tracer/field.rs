//! Complex field vectors carried along a path.

use num_complex::Complex64;
use std::ops::{Add, Mul};

use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec3 {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

/// Polarisation-carrying field amplitude (spreading and phase are tracked
/// separately by the tracer).
pub type Field = CVec3;

impl CVec3 {
    pub fn from_real(v: Vec3) -> CVec3 {
        CVec3 {
            x: Complex64::new(v.x, 0.0),
            y: Complex64::new(v.y, 0.0),
            z: Complex64::new(v.z, 0.0),
        }
    }

    /// Projection onto a real direction, `sum(c_i v_i)`.
    pub fn dot_real(&self, v: Vec3) -> Complex64 {
        self.x * v.x + self.y * v.y + self.z * v.z
    }

    pub fn norm(&self) -> f64 {
        (self.x.norm_sqr() + self.y.norm_sqr() + self.z.norm_sqr()).sqrt()
    }
}

impl Add for CVec3 {
    type Output = CVec3;
    fn add(self, o: CVec3) -> CVec3 {
        CVec3 {
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z,
        }
    }
}

impl Mul<Complex64> for CVec3 {
    type Output = CVec3;
    fn mul(self, s: Complex64) -> CVec3 {
        CVec3 {
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }
}

/// Unit polarisation vector of a vertically polarised antenna radiating along
/// `k`: the vertical axis projected onto the plane transverse to `k`.
pub fn vertical_polarization(k: Vec3) -> Vec3 {
    let p = Vec3::Z - k * Vec3::Z.dot(k);
    if p.norm() > 1e-9 {
        p.normalized()
    } else {
        // Straight up or down: no transverse vertical component exists.
        let q = Vec3::X - k * Vec3::X.dot(k);
        q.normalized()
    }
}
