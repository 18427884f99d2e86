//! Beam-tracking geometry: beam direction, coverage distance and the
//! segmented update schedule that steers the transmit beam along the track.
//!
//! The transmitter stands `d` metres from the track centreline on the `+y`
//! side and `h` metres above the rail level, at chainage `tx_chainage`. The
//! horizontal steering angle `phi` is measured from the perpendicular foot of
//! the transmitter on the track, positive toward increasing chainage.

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::antenna::{AntennaPattern, BeamType, Mount};
use crate::error::{Error, Result};

/// Grid the automatic update interval is rounded down to.
pub const AUTO_GRID: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TxGeometry {
    /// Height above the track.
    pub h: f64,
    /// Lateral offset from the track centreline.
    pub d: f64,
    pub tx_chainage: f64,
}

impl Default for TxGeometry {
    fn default() -> Self {
        TxGeometry {
            h: 22.0,
            d: 100.0,
            tx_chainage: 0.0,
        }
    }
}

impl TxGeometry {
    pub fn validate(&self) -> Result<()> {
        check_hd(self.h, self.d)?;
        if !self.tx_chainage.is_finite() {
            return Err(Error::NonFinite("tx_chainage"));
        }
        Ok(())
    }

    /// Slant distance from the transmitter to its perpendicular foot.
    pub fn slant(&self) -> f64 {
        self.h.hypot(self.d)
    }

    /// Horizontal steering angle toward chainage `x`, degrees.
    pub fn phi_at(&self, x: f64) -> f64 {
        ((x - self.tx_chainage) / self.d).atan().to_degrees()
    }

    /// World azimuth from the transmitter toward the track at chainage `x`.
    pub fn azimuth_at(&self, x: f64) -> f64 {
        (-self.d).atan2(x - self.tx_chainage).to_degrees()
    }

    /// Fixed mechanical downtilt that lays the antenna's horizontal plane
    /// through the track.
    pub fn downtilt(&self) -> f64 {
        (self.h / self.d).atan().to_degrees()
    }

    pub fn mount(&self) -> Mount {
        Mount {
            axis_az: 0.0,
            tilt_deg: self.downtilt(),
        }
    }

    /// Boresight azimuth in the tilted frame toward the track at chainage `x`.
    pub fn frame_azimuth_at(&self, x: f64) -> f64 {
        (-self.slant()).atan2(x - self.tx_chainage).to_degrees()
    }

    /// Chainage where a ray at steering angle `phi` meets the track,
    /// infinite once the ray runs parallel to it.
    pub fn chainage_at(&self, phi: f64) -> f64 {
        if phi >= 90.0 {
            f64::INFINITY
        } else if phi <= -90.0 {
            f64::NEG_INFINITY
        } else {
            self.tx_chainage + self.d * phi.to_radians().tan()
        }
    }
}

fn check_hd(h: f64, d: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid("h", format!("must be positive, got {h}")));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::invalid("d", format!("must be positive, got {d}")));
    }
    Ok(())
}

fn check_edges(center: f64, hpbw: f64) -> Result<()> {
    if !(center.is_finite() && hpbw.is_finite()) {
        return Err(Error::NonFinite("coverage distance"));
    }
    if hpbw < 0.0 {
        return Err(Error::invalid("hpbw", format!("must be non-negative, got {hpbw}")));
    }
    if center.abs() + hpbw / 2.0 >= 90.0 {
        return Err(Error::BeamParallelToTrack);
    }
    Ok(())
}

/// Beam direction toward a train `d0` metres along the track from the
/// transmitter's perpendicular foot, in degrees.
pub fn beam_direction(h: f64, d: f64, d0: f64) -> Result<f64> {
    check_hd(h, d)?;
    if !(d0.is_finite() && d0 >= 0.0) {
        return Err(Error::invalid("d0", format!("must be non-negative, got {d0}")));
    }
    Ok((d0 / h.hypot(d)).atan().to_degrees())
}

/// Coverage distance along the track measured in the slant plane through
/// the transmitter and the track.
pub fn coverage_distance_exact(h: f64, d: f64, phi: f64, hpbw: f64) -> Result<f64> {
    check_hd(h, d)?;
    let slant = h.hypot(d);
    let theta = (d * phi.to_radians().tan() / slant).atan().to_degrees();
    check_edges(theta, hpbw)?;
    let half = hpbw / 2.0;
    Ok(slant * ((theta + half).to_radians().tan() - (theta - half).to_radians().tan()))
}

/// Coverage distance with the transmitter height neglected.
pub fn coverage_distance_approx(d: f64, phi: f64, hpbw: f64) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::invalid("d", format!("must be positive, got {d}")));
    }
    check_edges(phi, hpbw)?;
    let half = hpbw / 2.0;
    Ok(d * ((phi + half).to_radians().tan() - (phi - half).to_radians().tan()))
}

/// Smallest coverage distance over all steering angles, reached at `phi = 0`.
pub fn min_coverage(d: f64, hpbw: f64) -> Result<f64> {
    coverage_distance_approx(d, 0.0, hpbw)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum UpdateInterval {
    #[default]
    Auto,
    Fixed(f64),
}

impl fmt::Display for UpdateInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpdateInterval::Auto => f.write_str("auto"),
            UpdateInterval::Fixed(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for UpdateInterval {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(UpdateInterval::Auto);
        }
        s.parse::<f64>()
            .map(UpdateInterval::Fixed)
            .map_err(|_| Error::invalid("update_interval", format!("expected 'auto' or metres, got '{s}'")))
    }
}

impl Serialize for UpdateInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            UpdateInterval::Auto => s.serialize_str("auto"),
            UpdateInterval::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for UpdateInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(UpdateInterval::Fixed(v)),
            Raw::Text(t) => t.parse().map_err(de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSegment {
    pub start: f64,
    pub end: f64,
    /// Chainage the beam is aimed at.
    pub aim: f64,
    /// Steering angle from the perpendicular, degrees.
    pub phi: f64,
    /// World azimuth of the boresight, degrees.
    pub azimuth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamSchedule {
    pub beam: BeamType,
    pub geometry: TxGeometry,
    pub interval: f64,
    pub segments: Vec<BeamSegment>,
}

impl BeamSchedule {
    pub fn start(&self) -> f64 {
        self.segments.first().map_or(0.0, |s| s.start)
    }

    pub fn end(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.end)
    }

    /// Update positions `s0 < s1 < ... < sn`.
    pub fn update_positions(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.segments.iter().map(|s| s.start).collect();
        out.push(self.end());
        out
    }

    /// Segment active at chainage `x`. A train exactly on an update position
    /// already uses the next beam.
    pub fn segment_at(&self, x: f64) -> Result<&BeamSegment> {
        let tol = 1e-9;
        if self.segments.is_empty() || x < self.start() - tol || x > self.end() + tol {
            return Err(Error::ScheduleGap(x));
        }
        let i = self.segments.partition_point(|s| s.start <= x + tol);
        Ok(&self.segments[i.saturating_sub(1)])
    }

    /// Transmit pattern steered for chainage `x`.
    pub fn pattern_at(&self, x: f64) -> Result<AntennaPattern> {
        let seg = self.segment_at(x)?;
        let az = self.geometry.frame_azimuth_at(seg.aim);
        Ok(AntennaPattern::new(self.beam, az, 0.0).with_mount(self.geometry.mount()))
    }

    /// Along-track footprint of a segment's beam, from the height-free
    /// coverage formula centred on its steering angle.
    pub fn footprint(&self, seg: &BeamSegment) -> Option<(f64, f64)> {
        let (hpbw, _) = self.beam.hpbw()?;
        let half = hpbw / 2.0;
        let g = &self.geometry;
        Some((g.chainage_at(seg.phi - half), g.chainage_at(seg.phi + half)))
    }

    /// First chainage not covered by the footprint of its own segment.
    pub fn first_hole(&self) -> Option<f64> {
        let tol = 1e-9;
        self.segments.iter().find_map(|seg| {
            let (lo, hi) = self.footprint(seg)?;
            if seg.start < lo - tol {
                Some(seg.start)
            } else if seg.end > hi + tol {
                Some(hi)
            } else {
                None
            }
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["start_m", "end_m", "aim_m", "phi_deg", "azimuth_deg"])?;
        for s in &self.segments {
            w.write_record([
                format!("{:.3}", s.start),
                format!("{:.3}", s.end),
                format!("{:.3}", s.aim),
                format!("{:.4}", s.phi),
                format!("{:.4}", s.azimuth),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Segments of length `interval` from `start` to `end`, each aimed at its
/// midpoint. The final segment may be shorter.
fn segments(geometry: &TxGeometry, start: f64, end: f64, interval: f64) -> Vec<BeamSegment> {
    let n = ((end - start) / interval - 1e-9).ceil().max(1.0) as usize;
    (0..n)
        .map(|i| {
            let a = start + interval * i as f64;
            let b = (a + interval).min(end);
            let aim = (a + b) / 2.0;
            BeamSegment {
                start: a,
                end: b,
                aim,
                phi: geometry.phi_at(aim),
                azimuth: geometry.azimuth_at(aim),
            }
        })
        .collect()
}

/// Builds the beam update schedule for the track section `[start, end]`.
///
/// The automatic interval is the largest multiple of 5 m not exceeding the
/// minimum coverage distance, reduced further by 5 m steps if a segment would
/// leave its own footprint. The omnidirectional antenna gets one segment.
pub fn make_schedule(
    start: f64,
    end: f64,
    geometry: &TxGeometry,
    beam: BeamType,
    interval: UpdateInterval,
) -> Result<BeamSchedule> {
    geometry.validate()?;
    beam.validate()?;
    if !(start.is_finite() && end.is_finite() && end > start) {
        return Err(Error::invalid(
            "track",
            format!("need start < end, got [{start}, {end}]"),
        ));
    }
    let build = |interval: f64| BeamSchedule {
        beam,
        geometry: *geometry,
        interval,
        segments: segments(geometry, start, end, interval),
    };
    let Some((hpbw, _)) = beam.hpbw() else {
        let interval = match interval {
            UpdateInterval::Fixed(v) if v > 0.0 => v,
            UpdateInterval::Fixed(v) => {
                return Err(Error::invalid("update_interval", format!("must be positive, got {v}")))
            }
            UpdateInterval::Auto => end - start,
        };
        return Ok(build(interval));
    };
    let coverage = min_coverage(geometry.d, hpbw)?;
    match interval {
        UpdateInterval::Fixed(v) => {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid("update_interval", format!("must be positive, got {v}")));
            }
            if v > coverage {
                return Err(Error::CoverageHole { interval: v, coverage });
            }
            let schedule = build(v);
            match schedule.first_hole() {
                None => Ok(schedule),
                Some(_) => Err(Error::CoverageHole { interval: v, coverage }),
            }
        }
        UpdateInterval::Auto => {
            let mut v = (coverage / AUTO_GRID).floor() * AUTO_GRID;
            while v > 0.0 {
                let schedule = build(v);
                if schedule.first_hole().is_none() {
                    return Ok(schedule);
                }
                v -= AUTO_GRID;
            }
            Err(Error::CoverageHole {
                interval: AUTO_GRID,
                coverage,
            })
        }
    }
}
