use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::units::VACUUM_PERMITTIVITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MaterialKind {
    Concrete,
    Metal,
    Marble,
    Soil,
    Trunk,
    Leaf,
    Custom,
}

impl MaterialKind {
    pub const BUILTIN: [MaterialKind; 6] = [
        MaterialKind::Concrete,
        MaterialKind::Metal,
        MaterialKind::Marble,
        MaterialKind::Soil,
        MaterialKind::Trunk,
        MaterialKind::Leaf,
    ];
}

impl fmt::Display for MaterialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Electromagnetic material description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub kind: MaterialKind,
    pub relative_permittivity: f64,
    /// Conductivity in S/m.
    pub conductivity: f64,
}

impl Material {
    /// Built-in material parameters (relative permittivity, conductivity S/m).
    pub const fn builtin(kind: MaterialKind) -> Material {
        let (eps, sigma) = match kind {
            MaterialKind::Concrete => (5.31, 0.06622),
            MaterialKind::Metal => (1.0, 1e7),
            MaterialKind::Marble => (7.04, 0.93),
            MaterialKind::Soil => (13.74, 0.14),
            MaterialKind::Trunk => (1.99, 0.01201),
            MaterialKind::Leaf => (20.0, 0.39),
            // Custom has no canonical values; treat as free space.
            MaterialKind::Custom => (1.0, 0.0),
        };
        Material {
            kind,
            relative_permittivity: eps,
            conductivity: sigma,
        }
    }

    pub const CONCRETE: Material = Material::builtin(MaterialKind::Concrete);
    pub const METAL: Material = Material::builtin(MaterialKind::Metal);
    pub const MARBLE: Material = Material::builtin(MaterialKind::Marble);
    pub const SOIL: Material = Material::builtin(MaterialKind::Soil);
    pub const TRUNK: Material = Material::builtin(MaterialKind::Trunk);
    pub const LEAF: Material = Material::builtin(MaterialKind::Leaf);

    pub fn custom(relative_permittivity: f64, conductivity: f64) -> Result<Material> {
        if !(relative_permittivity.is_finite() && relative_permittivity > 0.0) {
            return Err(Error::invalid(
                "relative_permittivity",
                format!("must be positive, got {relative_permittivity}"),
            ));
        }
        if !(conductivity.is_finite() && conductivity >= 0.0) {
            return Err(Error::invalid(
                "conductivity",
                format!("must be non-negative, got {conductivity}"),
            ));
        }
        Ok(Material {
            kind: MaterialKind::Custom,
            relative_permittivity,
            conductivity,
        })
    }

    /// Complex relative permittivity `eps_r - j sigma / (2 pi f eps0)`.
    pub fn complex_permittivity(&self, frequency_hz: f64) -> Complex64 {
        let omega = 2.0 * std::f64::consts::PI * frequency_hz;
        Complex64::new(
            self.relative_permittivity,
            -self.conductivity / (omega * VACUUM_PERMITTIVITY),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table_values() {
        let expect = [
            (MaterialKind::Concrete, 5.31, 0.06622),
            (MaterialKind::Metal, 1.0, 1e7),
            (MaterialKind::Marble, 7.04, 0.93),
            (MaterialKind::Soil, 13.74, 0.14),
            (MaterialKind::Trunk, 1.99, 0.01201),
            (MaterialKind::Leaf, 20.0, 0.39),
        ];
        for (kind, eps, sigma) in expect {
            let m = Material::builtin(kind);
            assert_eq!(m.relative_permittivity, eps, "{kind}");
            assert_eq!(m.conductivity, sigma, "{kind}");
        }
    }

    #[test]
    fn custom_validation() {
        assert!(Material::custom(0.0, 1.0).is_err());
        assert!(Material::custom(3.0, -1.0).is_err());
        assert!(Material::custom(3.0, 0.0).is_ok());
    }

    #[test]
    fn concrete_loss_tangent_at_carrier() {
        let eps = Material::CONCRETE.complex_permittivity(2.1e9);
        assert_eq!(eps.re, 5.31);
        assert!((eps.im + 0.5668).abs() < 1e-3);
    }
}
