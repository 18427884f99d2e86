//! Log-distance path-loss fit and shadow-fading spread.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::SnapshotSeries;
use crate::units::{compensated_sum, power_to_db};

pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathLossFit {
    /// Path loss at `d0`, dB.
    pub pl0: f64,
    pub n: f64,
    pub d0: f64,
    /// Shadow-fading standard deviation, dB.
    pub sigma_sf: f64,
    pub distances: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Snapshots left out for carrying no power.
    pub excluded: usize,
}

impl PathLossFit {
    pub fn predict(&self, d: f64) -> f64 {
        self.pl0 + 10.0 * self.n * (d / self.d0).log10()
    }
}

/// Least-squares fit of `PL(d) = PL0 + 10 n log10(d / d0)`.
pub fn fit_log_distance(distances: &[f64], pl: &[f64], d0: f64) -> Result<PathLossFit> {
    if !(d0.is_finite() && d0 > 0.0) {
        return Err(Error::invalid("d0", format!("must be positive, got {d0}")));
    }
    if distances.len() != pl.len() {
        return Err(Error::invalid("path loss", "distance and loss lengths differ"));
    }
    if distances.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "path-loss fit needs {MIN_FIT_SAMPLES} samples, got {}",
            distances.len()
        )));
    }
    if let Some(d) = distances.iter().find(|d| !(**d > d0)) {
        return Err(Error::invalid("d0", format!("distance {d} not beyond d0 = {d0}")));
    }
    let x: Vec<f64> = distances.iter().map(|d| 10.0 * (d / d0).log10()).collect();
    let m = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / m;
    let my = compensated_sum(pl.iter().copied()) / m;
    let sxx = compensated_sum(x.iter().map(|x| (x - mx).powi(2)));
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("path-loss fit needs distinct distances".into()));
    }
    let sxy = compensated_sum(x.iter().zip(pl).map(|(x, y)| (x - mx) * (y - my)));
    let n = sxy / sxx;
    let pl0 = my - n * mx;
    let residuals: Vec<f64> = x.iter().zip(pl).map(|(x, y)| y - (pl0 + n * x)).collect();
    let sigma_sf = (compensated_sum(residuals.iter().map(|r| r * r)) / m).sqrt();
    Ok(PathLossFit {
        pl0,
        n,
        d0,
        sigma_sf,
        distances: distances.to_vec(),
        residuals,
        excluded: 0,
    })
}

/// Fits the path loss of every snapshot, taken as the inverse of the total
/// received power for a unit transmit power.
pub fn fit_path_loss(series: &SnapshotSeries, d0: f64) -> Result<PathLossFit> {
    let mut d = Vec::with_capacity(series.len());
    let mut pl = Vec::with_capacity(series.len());
    for s in &series.snapshots {
        let p = s.total_power();
        if p > 0.0 {
            d.push(s.distance);
            pl.push(-power_to_db(p));
        }
    }
    if d.is_empty() {
        return Err(Error::InsufficientData("every snapshot is empty".into()));
    }
    let mut fit = fit_log_distance(&d, &pl, d0)?;
    fit.excluded = series.len() - d.len();
    Ok(fit)
}
