//! Per-snapshot channel statistics: K-factor, binned spectra and the RMS
//! spreads derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::{ChannelSnapshot, SnapshotSeries};
use crate::units::{compensated_sum, power_to_db, wrap_deg};

/// Square root of the weighted second central moment of `values`.
pub fn rms_spread<I>(pairs: I) -> Result<f64>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let pairs: Vec<(f64, f64)> = pairs.into_iter().filter(|(_, w)| *w > 0.0).collect();
    let total = compensated_sum(pairs.iter().map(|(_, w)| *w));
    if !(total > 0.0) {
        return Err(Error::InsufficientData("spread of zero total power".into()));
    }
    // Offsets from the first value keep a single-valued spread exactly zero.
    let x0 = pairs[0].0;
    let mean = compensated_sum(pairs.iter().map(|(x, w)| (x - x0) * w)) / total;
    let var = compensated_sum(pairs.iter().map(|(x, w)| w * (x - x0 - mean).powi(2))) / total;
    Ok(var.max(0.0).sqrt())
}

/// Ratio of the strongest power to the sum of the others, in dB. `None`
/// with fewer than two nonzero powers.
pub fn k_factor_of(powers: &[f64]) -> Option<f64> {
    let (imax, pmax) = powers
        .iter()
        .copied()
        .enumerate()
        .fold((usize::MAX, 0.0), |best, (i, p)| if p > best.1 { (i, p) } else { best });
    if imax == usize::MAX {
        return None;
    }
    let rest = compensated_sum(powers.iter().enumerate().filter(|(i, _)| *i != imax).map(|(_, p)| *p));
    if rest > 0.0 {
        Some(power_to_db(pmax / rest))
    } else {
        None
    }
}

pub fn k_factor(snapshot: &ChannelSnapshot) -> Option<f64> {
    let powers: Vec<f64> = snapshot.paths.iter().map(|p| p.power()).collect();
    k_factor_of(&powers)
}

/// Power in consecutive bins of width `bin` starting at `first_bin * bin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binned {
    pub bin: f64,
    pub first_bin: i64,
    pub powers: Vec<f64>,
}

impl Binned {
    /// Bins `(value, power)` pairs; a value on a bin edge goes to the upper bin.
    pub fn from_pairs<I>(pairs: I, bin: f64) -> Result<Binned>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        if !(bin.is_finite() && bin > 0.0) {
            return Err(Error::invalid("bin", format!("must be positive, got {bin}")));
        }
        let idx: Vec<(i64, f64)> = pairs.into_iter().map(|(v, p)| ((v / bin).floor() as i64, p)).collect();
        let Some(lo) = idx.iter().map(|(i, _)| *i).min() else {
            return Ok(Binned {
                bin,
                first_bin: 0,
                powers: Vec::new(),
            });
        };
        let hi = idx.iter().map(|(i, _)| *i).max().unwrap_or(lo);
        let mut powers = vec![0.0; (hi - lo + 1) as usize];
        for (i, p) in idx {
            powers[(i - lo) as usize] += p;
        }
        Ok(Binned {
            bin,
            first_bin: lo,
            powers,
        })
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.powers.iter().copied())
    }

    /// Lower edge of bin `k` of the stored vector.
    pub fn edge(&self, k: usize) -> f64 {
        (self.first_bin + k as i64) as f64 * self.bin
    }

    pub fn rms_spread(&self) -> Result<f64> {
        rms_spread(self.powers.iter().enumerate().map(|(k, p)| (self.edge(k), *p)))
    }

    /// Power vector starting at the first nonzero bin, scaled to unit total.
    pub fn aligned_normalized(&self) -> Vec<f64> {
        let start = self.powers.iter().position(|p| *p > 0.0).unwrap_or(self.powers.len());
        let total = self.total();
        if !(total > 0.0) {
            return Vec::new();
        }
        self.powers[start..].iter().map(|p| p / total).collect()
    }
}

/// Power delay profile with delays in nanoseconds.
pub fn pdp(snapshot: &ChannelSnapshot, bin_ns: f64) -> Result<Binned> {
    Binned::from_pairs(snapshot.paths.iter().map(|p| (p.delay * 1e9, p.power())), bin_ns)
}

pub fn rms_delay_spread(pdp: &Binned) -> Result<f64> {
    pdp.rms_spread()
}

/// Doppler power spectral density: one column per snapshot on the bin
/// centres `-f_grid, -f_grid + bin, ..., f_grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dpsd {
    pub bin_hz: f64,
    pub f_grid: f64,
    pub window: usize,
    pub columns: Vec<Vec<f64>>,
}

impl Dpsd {
    pub fn frequencies(&self) -> Vec<f64> {
        let n = (2.0 * self.f_grid / self.bin_hz).round() as usize + 1;
        (0..n).map(|k| -self.f_grid + k as f64 * self.bin_hz).collect()
    }

    pub fn rms_spread(&self, column: usize) -> Result<f64> {
        rms_doppler_spread(&self.frequencies(), &self.columns[column])
    }
}

/// Bins per-path Doppler powers. Column `i` holds snapshots
/// `i .. i + window`, averaged.
pub fn dpsd(series: &SnapshotSeries, window: usize, bin_hz: f64) -> Result<Dpsd> {
    if window == 0 {
        return Err(Error::invalid("dpsd.window", "must be at least 1"));
    }
    if !(bin_hz.is_finite() && bin_hz > 0.0) {
        return Err(Error::invalid("dpsd.bin", format!("must be positive, got {bin_hz}")));
    }
    let f_grid = (series.max_doppler() / bin_hz).ceil() * bin_hz;
    let n = (2.0 * f_grid / bin_hz).round() as usize + 1;
    let per_snapshot: Vec<Vec<f64>> = series
        .snapshots
        .iter()
        .map(|s| {
            let mut col = vec![0.0; n];
            for p in &s.paths {
                let k = ((p.doppler_hz + f_grid) / bin_hz).round().clamp(0.0, (n - 1) as f64) as usize;
                col[k] += p.power();
            }
            col
        })
        .collect();
    let columns = if window == 1 {
        per_snapshot
    } else {
        (0..per_snapshot.len())
            .map(|i| {
                let end = (i + window).min(per_snapshot.len());
                let mut col = vec![0.0; n];
                for c in &per_snapshot[i..end] {
                    for (a, b) in col.iter_mut().zip(c) {
                        *a += b;
                    }
                }
                let m = (end - i) as f64;
                col.iter().map(|v| v / m).collect()
            })
            .collect()
    };
    Ok(Dpsd {
        bin_hz,
        f_grid,
        window,
        columns,
    })
}

pub fn rms_doppler_spread(frequencies: &[f64], powers: &[f64]) -> Result<f64> {
    rms_spread(frequencies.iter().copied().zip(powers.iter().copied()))
}

/// Circular RMS angular spread in degrees: the smallest linear spread over
/// every placement of the ±180° cut.
pub fn circular_angular_spread(angles: &[f64], powers: &[f64]) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> = angles
        .iter()
        .zip(powers)
        .filter(|(_, p)| **p > 0.0)
        .map(|(a, p)| {
            let w = wrap_deg(*a);
            (if w >= 180.0 { w - 360.0 } else { w }, *p)
        })
        .collect();
    let total = compensated_sum(pts.iter().map(|(_, p)| *p));
    if !(total > 0.0) {
        return Err(Error::InsufficientData("angular spread of zero total power".into()));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pts.len();
    // Angles are measured from the lowest one to keep the moments small.
    let base = pts[0].0;
    let x: Vec<f64> = pts.iter().map(|(a, _)| a - base).collect();
    let (s1, s2): (f64, f64) = pts
        .iter()
        .zip(&x)
        .fold((0.0, 0.0), |(s1, s2), ((_, w), x)| (s1 + w * x, s2 + w * x * x));
    // Moving the cut above angle k - 1 adds 360 to angles 0..k.
    let (mut w_pre, mut x_pre) = (0.0, 0.0);
    let (mut best, mut best_k) = (f64::INFINITY, 0);
    for k in 0..n {
        if k > 0 {
            w_pre += pts[k - 1].1;
            x_pre += pts[k - 1].1 * x[k - 1];
        }
        let m1 = (s1 + 360.0 * w_pre) / total;
        let m2 = (s2 + 720.0 * x_pre + 360.0 * 360.0 * w_pre) / total;
        if m2 - m1 * m1 < best {
            best = m2 - m1 * m1;
            best_k = k;
        }
    }
    let shifted = x
        .iter()
        .enumerate()
        .map(|(i, x)| if i < best_k { x + 360.0 } else { *x })
        .zip(pts.iter().map(|(_, p)| *p));
    rms_spread(shifted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleSide {
    Arrival,
    Departure,
}

/// Power angular spectrum: one column per snapshot, bins of `bin_deg` from
/// -180°.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pas {
    pub side: AngleSide,
    pub bin_deg: f64,
    pub columns: Vec<Vec<f64>>,
}

fn side_angle(p: &crate::tracer::PropagationPath, side: AngleSide) -> f64 {
    match side {
        AngleSide::Arrival => p.aoa_az,
        AngleSide::Departure => p.aod_az,
    }
}

/// Angular spread of one snapshot, `None` when it has no power.
pub fn angular_spread(snapshot: &ChannelSnapshot, side: AngleSide) -> Option<f64> {
    let angles: Vec<f64> = snapshot.paths.iter().map(|p| side_angle(p, side)).collect();
    let powers: Vec<f64> = snapshot.paths.iter().map(|p| p.power()).collect();
    circular_angular_spread(&angles, &powers).ok()
}

pub fn pas_and_angular_spread(
    series: &SnapshotSeries,
    side: AngleSide,
    bin_deg: f64,
) -> Result<(Pas, Vec<Option<f64>>)> {
    if !(bin_deg.is_finite() && bin_deg > 0.0 && bin_deg <= 360.0) {
        return Err(Error::invalid("pas.bin", format!("must be in (0, 360], got {bin_deg}")));
    }
    let n = (360.0 / bin_deg).ceil() as usize;
    let mut columns = Vec::with_capacity(series.len());
    let mut spreads = Vec::with_capacity(series.len());
    for s in &series.snapshots {
        let mut col = vec![0.0; n];
        for p in &s.paths {
            let a = wrap_deg(side_angle(p, side));
            let a = if a >= 180.0 { a - 360.0 } else { a };
            let k = (((a + 180.0) / bin_deg).floor() as usize).min(n - 1);
            col[k] += p.power();
        }
        columns.push(col);
        spreads.push(angular_spread(s, side));
    }
    Ok((Pas { side, bin_deg, columns }, spreads))
}
