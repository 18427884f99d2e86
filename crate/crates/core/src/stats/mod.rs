//! Channel statistics over a snapshot series: path-loss fit, K-factor, delay,
//! Doppler and angular spreads, and the stationarity interval, plus the
//! beamwidth trend checks across several runs.

mod kernels;
mod lrs;
mod pathloss;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use kernels::{
    angular_spread, circular_angular_spread, dpsd, k_factor, k_factor_of, pas_and_angular_spread, pdp,
    rms_delay_spread, rms_doppler_spread, rms_spread, AngleSide, Binned, Dpsd, Pas,
};
pub use lrs::{ccdf, pdp_correlation, stationarity_interval, SiReport};
pub use pathloss::{fit_log_distance, fit_path_loss, PathLossFit, MIN_FIT_SAMPLES};

use crate::antenna::BeamType;
use crate::error::{Error, Result};
use crate::sweep::SnapshotSeries;
use crate::units::compensated_sum;

pub const STATS_SCHEMA: &str = "railbeam.stats/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsOptions {
    /// Path-loss reference distance.
    pub d0: f64,
    pub delay_bin_ns: f64,
    pub doppler_bin_hz: f64,
    pub az_bin_deg: f64,
    /// Snapshots averaged per Doppler spectrum column.
    pub dpsd_window: usize,
    /// Correlation thresholds for the stationarity interval.
    pub c_th: Vec<f64>,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions {
            d0: 1.0,
            delay_bin_ns: 10.0,
            doppler_bin_hz: 5.0,
            az_bin_deg: 1.0,
            dpsd_window: 1,
            c_th: vec![0.8, 0.9],
        }
    }
}

impl StatsOptions {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("stats.d0", self.d0),
            ("stats.delay_bin_ns", self.delay_bin_ns),
            ("stats.doppler_bin_hz", self.doppler_bin_hz),
            ("stats.az_bin_deg", self.az_bin_deg),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.dpsd_window == 0 {
            return Err(Error::invalid("stats.dpsd_window", "must be at least 1"));
        }
        if self.c_th.is_empty() {
            return Err(Error::invalid("stats.c_th", "needs at least one threshold"));
        }
        if let Some(c) = self.c_th.iter().find(|c| !(**c > 0.0 && **c < 1.0)) {
            return Err(Error::invalid("stats.c_th", format!("{c} outside (0, 1)")));
        }
        Ok(())
    }
}

/// Mean and population standard deviation over the defined entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
    pub excluded: usize,
}

pub fn summarize(values: &[Option<f64>]) -> Result<Summary> {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    if defined.is_empty() {
        return Err(Error::InsufficientData("no defined values to summarize".into()));
    }
    let n = defined.len() as f64;
    let mean = compensated_sum(defined.iter().copied()) / n;
    let var = compensated_sum(defined.iter().map(|v| (v - mean).powi(2))) / n;
    Ok(Summary {
        mean,
        std: var.sqrt(),
        count: defined.len(),
        excluded: values.len() - defined.len(),
    })
}

/// Per-snapshot small-scale metrics; `None` where a metric is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallScaleSeries {
    pub kf_db: Vec<Option<f64>>,
    pub ds_ns: Vec<Option<f64>>,
    pub dps_hz: Vec<Option<f64>>,
    pub aas_deg: Vec<Option<f64>>,
    pub das_deg: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallScaleSummary {
    pub k: Option<Summary>,
    pub ds: Option<Summary>,
    pub dps: Option<Summary>,
    pub aas: Option<Summary>,
    pub das: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub schema: String,
    pub label: String,
    pub beam: BeamType,
    pub snapshots: usize,
    pub options: StatsOptions,
    pub path_loss: PathLossFit,
    pub small_scale: SmallScaleSeries,
    pub summary: SmallScaleSummary,
    pub stationarity: Vec<SiReport>,
}

impl StatsReport {
    pub fn si(&self, c_th: f64) -> Option<&SiReport> {
        self.stationarity.iter().find(|r| r.c_th == c_th)
    }
}

/// Small-scale metrics of every snapshot, computed in parallel.
pub fn small_scale(series: &SnapshotSeries, options: &StatsOptions) -> Result<SmallScaleSeries> {
    let doppler = dpsd(series, 1, options.doppler_bin_hz)?;
    let freqs = doppler.frequencies();
    let rows: Vec<[Option<f64>; 5]> = series
        .snapshots
        .par_iter()
        .zip(doppler.columns.par_iter())
        .map(|(s, col)| {
            let ds = pdp(s, options.delay_bin_ns).ok().and_then(|p| p.rms_spread().ok());
            [
                k_factor(s),
                ds,
                rms_doppler_spread(&freqs, col).ok(),
                angular_spread(s, AngleSide::Arrival),
                angular_spread(s, AngleSide::Departure),
            ]
        })
        .collect();
    let column = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<_>>();
    Ok(SmallScaleSeries {
        kf_db: column(0),
        ds_ns: column(1),
        dps_hz: column(2),
        aas_deg: column(3),
        das_deg: column(4),
    })
}

pub fn compute_report(series: &SnapshotSeries, options: &StatsOptions, label: &str) -> Result<StatsReport> {
    options.validate()?;
    let path_loss = fit_path_loss(series, options.d0)?;
    let small = small_scale(series, options)?;
    let summary = SmallScaleSummary {
        k: summarize(&small.kf_db).ok(),
        ds: summarize(&small.ds_ns).ok(),
        dps: summarize(&small.dps_hz).ok(),
        aas: summarize(&small.aas_deg).ok(),
        das: summarize(&small.das_deg).ok(),
    };
    let pdps = series
        .snapshots
        .iter()
        .map(|s| pdp(s, options.delay_bin_ns))
        .collect::<Result<Vec<_>>>()?;
    let stationarity = options
        .c_th
        .iter()
        .map(|c| stationarity_interval(&pdps, series.dd, *c))
        .collect::<Result<Vec<_>>>()?;
    Ok(StatsReport {
        schema: STATS_SCHEMA.to_string(),
        label: label.to_string(),
        beam: series.sweep.beam,
        snapshots: series.len(),
        options: options.clone(),
        path_loss,
        small_scale: small,
        summary,
        stationarity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    NonDecreasing,
    NonIncreasing,
}

impl Direction {
    pub fn holds(&self, values: &[f64]) -> bool {
        values.windows(2).all(|w| match self {
            Direction::NonDecreasing => w[1] >= w[0],
            Direction::NonIncreasing => w[1] <= w[0],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendVerdict {
    pub metric: String,
    pub direction: Direction,
    /// Run labels, widest beam first.
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    pub pass: bool,
}

impl TrendVerdict {
    pub fn line(&self) -> String {
        let values: Vec<String> = self
            .labels
            .iter()
            .zip(&self.values)
            .map(|(l, v)| format!("{l}={v:.3}"))
            .collect();
        let dir = match self.direction {
            Direction::NonDecreasing => "non-decreasing",
            Direction::NonIncreasing => "non-increasing",
        };
        format!(
            "{} {} {dir}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.metric,
            values.join(" ")
        )
    }
}

fn beam_width(beam: &BeamType) -> f64 {
    beam.hpbw().map_or(360.0, |(h, _)| h)
}

/// Trend checks across runs of the same scene with different beams, ordered
/// from the widest to the narrowest beam. Also checks, per run, that a lower
/// correlation threshold never gives a shorter stationarity interval.
pub fn trend_verdicts(reports: &[StatsReport]) -> Vec<TrendVerdict> {
    let mut order: Vec<&StatsReport> = reports.iter().collect();
    order.sort_by(|a, b| beam_width(&b.beam).total_cmp(&beam_width(&a.beam)));
    let labels: Vec<String> = order.iter().map(|r| r.label.clone()).collect();
    let mut out = Vec::new();
    let mut push = |metric: String, direction: Direction, values: Vec<f64>| {
        let pass = values.iter().all(|v| v.is_finite()) && direction.holds(&values);
        out.push(TrendVerdict {
            metric,
            direction,
            labels: labels.clone(),
            values,
            pass,
        });
    };
    let mean = |s: Option<Summary>| s.map_or(f64::NAN, |s| s.mean);
    if order.len() >= 2 {
        push(
            "n_PL".into(),
            Direction::NonDecreasing,
            order.iter().map(|r| r.path_loss.n).collect(),
        );
        push(
            "mu_DS".into(),
            Direction::NonIncreasing,
            order.iter().map(|r| mean(r.summary.ds)).collect(),
        );
        push(
            "mu_DPS".into(),
            Direction::NonIncreasing,
            order.iter().map(|r| mean(r.summary.dps)).collect(),
        );
        push(
            "mu_K".into(),
            Direction::NonDecreasing,
            order.iter().map(|r| mean(r.summary.k)).collect(),
        );
        let thresholds: Vec<f64> = order[0].stationarity.iter().map(|s| s.c_th).collect();
        for c in thresholds {
            let values = order.iter().map(|r| r.si(c).map_or(f64::NAN, |s| s.mean)).collect();
            push(format!("mean_SI(c_th={c})"), Direction::NonDecreasing, values);
        }
    }
    for r in &order {
        let mut si: Vec<&SiReport> = r.stationarity.iter().collect();
        si.sort_by(|a, b| a.c_th.total_cmp(&b.c_th));
        for pair in si.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let pass = lo.samples.len() == hi.samples.len() && lo.samples.iter().zip(&hi.samples).all(|(a, b)| a >= b);
            out.push(TrendVerdict {
                metric: format!("{}: SI(c_th={}) >= SI(c_th={}) elementwise", r.label, lo.c_th, hi.c_th),
                direction: Direction::NonIncreasing,
                labels: vec![format!("c_th={}", lo.c_th), format!("c_th={}", hi.c_th)],
                values: vec![lo.mean, hi.mean],
                pass,
            });
        }
    }
    out
}
