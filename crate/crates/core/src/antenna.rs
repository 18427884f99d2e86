//! Antenna radiation patterns: the omnidirectional receive antenna and the
//! HPBW-parameterised directional transmit beams.
//!
//! Directional patterns use the parabolic-in-dB family
//! `A(dphi, dtheta) = G - min(12 (dphi/HPBW_h)^2 + 12 (dtheta/HPBW_v)^2, FBR)`,
//! which puts the -3 dB contour exactly at half the beamwidth on each
//! principal axis.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::units::wrap_deg;

/// Solid angle of the sphere in square degrees, rounded as in the usual
/// directivity rule of thumb.
const SPHERE_SQ_DEG: f64 = 41_253.0;

pub const DEFAULT_FRONT_TO_BACK_DB: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BeamType {
    Omni,
    /// 60 x 10 degrees.
    TypeA,
    /// 30 x 10 degrees.
    TypeB,
    /// 12 x 10 degrees.
    TypeC,
    Custom {
        hpbw_h: f64,
        hpbw_v: f64,
    },
}

impl BeamType {
    pub const STANDARD: [BeamType; 4] = [BeamType::Omni, BeamType::TypeA, BeamType::TypeB, BeamType::TypeC];

    /// Horizontal and vertical half-power beamwidths in degrees, `None` for
    /// the omnidirectional antenna.
    pub fn hpbw(&self) -> Option<(f64, f64)> {
        match *self {
            BeamType::Omni => None,
            BeamType::TypeA => Some((60.0, 10.0)),
            BeamType::TypeB => Some((30.0, 10.0)),
            BeamType::TypeC => Some((12.0, 10.0)),
            BeamType::Custom { hpbw_h, hpbw_v } => Some((hpbw_h, hpbw_v)),
        }
    }

    pub fn is_directional(&self) -> bool {
        self.hpbw().is_some()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((h, v)) = self.hpbw() {
            for (name, w) in [("hpbw_h", h), ("hpbw_v", v)] {
                if !(w > 0.0 && w < 360.0) {
                    return Err(Error::invalid(name, format!("{w} outside (0, 360) degrees")));
                }
            }
        }
        Ok(())
    }

    /// Short label used in file names and reports.
    pub fn label(&self) -> String {
        match self {
            BeamType::Omni => "omni".into(),
            BeamType::TypeA => "typeA".into(),
            BeamType::TypeB => "typeB".into(),
            BeamType::TypeC => "typeC".into(),
            BeamType::Custom { hpbw_h, hpbw_v } => format!("custom{hpbw_h}x{hpbw_v}"),
        }
    }
}

impl fmt::Display for BeamType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for BeamType {
    type Err = Error;

    /// Accepts `omni`, `typeA`/`a`, `typeB`/`b`, `typeC`/`c` (any case) and
    /// `custom:<h>x<v>`.
    fn from_str(s: &str) -> Result<BeamType> {
        let lower = s.trim().to_ascii_lowercase();
        let beam = match lower.as_str() {
            "omni" => BeamType::Omni,
            "typea" | "a" => BeamType::TypeA,
            "typeb" | "b" => BeamType::TypeB,
            "typec" | "c" => BeamType::TypeC,
            other => {
                let spec = other
                    .strip_prefix("custom:")
                    .ok_or_else(|| Error::invalid("beam", format!("unknown beam type '{s}'")))?;
                let (h, v) = spec
                    .split_once('x')
                    .ok_or_else(|| Error::invalid("beam", "custom beam must be custom:<h>x<v>"))?;
                let parse = |t: &str| {
                    t.parse::<f64>()
                        .map_err(|_| Error::invalid("beam", format!("bad beamwidth '{t}'")))
                };
                BeamType::Custom {
                    hpbw_h: parse(h)?,
                    hpbw_v: parse(v)?,
                }
            }
        };
        beam.validate()?;
        Ok(beam)
    }
}

/// Default peak gain: 0 dBi for the omni, otherwise the directivity estimate
/// `10 log10(41253 / (HPBW_h HPBW_v))`.
pub fn peak_gain_for(beam: BeamType) -> f64 {
    match beam.hpbw() {
        None => 0.0,
        Some((h, v)) => 10.0 * (SPHERE_SQ_DEG / (h * v)).log10(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPattern {
    pub beam: BeamType,
    /// Boresight azimuth in degrees, `(-180, 180]`.
    pub boresight_az: f64,
    /// Boresight elevation in degrees.
    pub boresight_el: f64,
    pub peak_gain_dbi: f64,
    pub front_to_back_db: f64,
    pub polarization: Polarization,
    /// Mechanical tilt of the whole antenna frame, if any. Boresight angles
    /// are then measured in the tilted frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mount: Option<Mount>,
}

/// Rotation of the antenna frame about a horizontal axis. The side to the
/// right of the axis direction goes down by `tilt_deg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mount {
    pub axis_az: f64,
    pub tilt_deg: f64,
}

impl Mount {
    /// World direction expressed in the mount frame.
    pub fn to_frame(&self, v: Vec3) -> Vec3 {
        let k = Vec3::from_az_el_deg(self.axis_az, 0.0);
        let (s, c) = (-self.tilt_deg).to_radians().sin_cos();
        v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c))
    }
}

impl AntennaPattern {
    pub fn omni() -> Self {
        AntennaPattern::new(BeamType::Omni, 0.0, 0.0)
    }

    /// Pattern with the default peak gain and front-to-back ratio.
    pub fn new(beam: BeamType, boresight_az: f64, boresight_el: f64) -> Self {
        AntennaPattern {
            beam,
            boresight_az: wrap_deg(boresight_az),
            boresight_el,
            peak_gain_dbi: peak_gain_for(beam),
            front_to_back_db: DEFAULT_FRONT_TO_BACK_DB,
            polarization: Polarization::Vertical,
            mount: None,
        }
    }

    pub fn with_mount(mut self, mount: Mount) -> Self {
        self.mount = Some(mount);
        self
    }

    pub fn with_peak_gain(mut self, dbi: f64) -> Self {
        self.peak_gain_dbi = dbi;
        self
    }

    /// Gain in dBi toward azimuth/elevation given in degrees.
    pub fn gain(&self, azimuth: f64, elevation: f64) -> f64 {
        let Some((hpbw_h, hpbw_v)) = self.beam.hpbw() else {
            return self.peak_gain_dbi;
        };
        let (azimuth, elevation) = match &self.mount {
            None => (azimuth, elevation),
            Some(m) => m.to_frame(Vec3::from_az_el_deg(azimuth, elevation)).to_az_el_deg(),
        };
        let d_az = wrap_deg(azimuth - self.boresight_az);
        let d_el = elevation - self.boresight_el;
        let atten = 12.0 * (d_az / hpbw_h).powi(2) + 12.0 * (d_el / hpbw_v).powi(2);
        self.peak_gain_dbi - atten.min(self.front_to_back_db)
    }

    /// Same pattern with its boresight azimuth moved to `azimuth`. Elevation is
    /// untouched: only horizontal steering is supported.
    pub fn steer(&self, azimuth: f64) -> AntennaPattern {
        AntennaPattern {
            boresight_az: wrap_deg(azimuth),
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn omni_is_flat() {
        let p = AntennaPattern::omni();
        for az in [-179.0, -90.0, 0.0, 45.0, 180.0] {
            assert_eq!(p.gain(az, 0.0), 0.0);
        }
    }

    #[test]
    fn half_power_points() {
        let c = AntennaPattern::new(BeamType::TypeC, 0.0, 0.0);
        assert_eq!(c.gain(6.0, 0.0), c.peak_gain_dbi - 3.0);
        let b = AntennaPattern::new(BeamType::TypeB, 0.0, 0.0);
        assert_eq!(b.gain(30.0, 0.0), b.peak_gain_dbi - 12.0);
        for beam in [BeamType::TypeA, BeamType::TypeB, BeamType::TypeC] {
            let p = AntennaPattern::new(beam, 20.0, -5.0);
            let (h, v) = beam.hpbw().unwrap();
            for (daz, del) in [(h / 2.0, 0.0), (-h / 2.0, 0.0), (0.0, v / 2.0), (0.0, -v / 2.0)] {
                let g = p.gain(20.0 + daz, -5.0 + del);
                assert!((g - (p.peak_gain_dbi - 3.0)).abs() < 1e-12, "{beam} {daz} {del}");
            }
        }
    }

    #[test]
    fn default_peak_gains() {
        assert_eq!(peak_gain_for(BeamType::Omni), 0.0);
        assert!((peak_gain_for(BeamType::TypeC) - 25.4).abs() < 0.05);
        assert!((peak_gain_for(BeamType::TypeA) - 18.4).abs() < 0.05);
    }

    #[test]
    fn steering_moves_boresight() {
        let p = AntennaPattern::new(BeamType::TypeC, 0.0, 0.0);
        let s = p.steer(0.0).steer(45.0);
        assert_eq!(s.boresight_az, 45.0);
        assert_eq!(s.boresight_el, 0.0);
        assert_eq!(s.gain(45.0, 0.0), s.peak_gain_dbi);
    }

    #[test]
    fn mount_levels_the_slant_plane() {
        let (h, d) = (22.0f64, 100.0f64);
        let m = Mount {
            axis_az: 0.0,
            tilt_deg: (h / d).atan().to_degrees(),
        };
        let (az, el) = m.to_frame(Vec3::new(0.0, -d, -h)).to_az_el_deg();
        assert!((az + 90.0).abs() < 1e-12 && el.abs() < 1e-12);
        for x in [-500.0, 30.0, 700.0] {
            let (az, el) = m.to_frame(Vec3::new(x, -d, -h)).to_az_el_deg();
            assert!(el.abs() < 1e-12);
            assert!((az - (-h.hypot(d)).atan2(x).to_degrees()).abs() < 1e-12);
        }
        let p = AntennaPattern::new(BeamType::TypeC, -90.0, 0.0).with_mount(m);
        let (az, el) = Vec3::new(0.0, -d, -h).to_az_el_deg();
        assert!((p.gain(az, el) - p.peak_gain_dbi).abs() < 1e-12);
    }

    #[test]
    fn parse_beam_names() {
        assert_eq!("typeC".parse::<BeamType>().unwrap(), BeamType::TypeC);
        assert_eq!("OMNI".parse::<BeamType>().unwrap(), BeamType::Omni);
        assert_eq!(
            "custom:20x8".parse::<BeamType>().unwrap(),
            BeamType::Custom {
                hpbw_h: 20.0,
                hpbw_v: 8.0
            }
        );
        assert!("typeD".parse::<BeamType>().is_err());
        assert!("custom:0x8".parse::<BeamType>().is_err());
    }

    #[test]
    fn narrower_beams_fall_off_faster() {
        let a = AntennaPattern::new(BeamType::TypeA, 0.0, 0.0);
        let b = AntennaPattern::new(BeamType::TypeB, 0.0, 0.0);
        let c = AntennaPattern::new(BeamType::TypeC, 0.0, 0.0);
        for x in [1.0, 3.0, 5.0] {
            let fa = a.peak_gain_dbi - a.gain(x, 0.0);
            let fb = b.peak_gain_dbi - b.gain(x, 0.0);
            let fc = c.peak_gain_dbi - c.gain(x, 0.0);
            assert!(fc >= fb && fb >= fa);
        }
    }

    proptest! {
        #[test]
        fn steering_is_shift_invariant(a in -180.0..180.0f64, x in -180.0..180.0f64, el in -60.0..60.0f64) {
            for beam in BeamType::STANDARD {
                let p = AntennaPattern::new(beam, 0.0, -3.0);
                let s = p.steer(a);
                prop_assert!((s.gain(a + x, el) - p.gain(x, el)).abs() < 1e-9);
            }
        }

        #[test]
        fn gain_is_bounded(az in -360.0..360.0f64, el in -90.0..90.0f64) {
            for beam in BeamType::STANDARD {
                let p = AntennaPattern::new(beam, 17.0, -12.0);
                let g = p.gain(az, el);
                prop_assert!(g <= p.peak_gain_dbi);
                prop_assert!(g >= p.peak_gain_dbi - p.front_to_back_db);
            }
        }
    }
}
