//! Moving-train sweep: one traced snapshot per receiver position along the
//! track, with the transmit beam steered by the schedule and a kinematic
//! Doppler shift on every path.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antenna::BeamType;
use crate::beam::{make_schedule, BeamSchedule, TxGeometry, UpdateInterval};
use crate::error::{Error, Result};
use crate::geometry::{AccelStructure, Scene, Vec3};
use crate::tracer::{Endpoint, PropagationPath, TraceConfig, Tracer};
use crate::units::{kmh_to_ms, SPEED_OF_LIGHT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub rx_height: f64,
    pub rx_step: f64,
    /// Train speed in km/h.
    pub train_speed: f64,
    pub start: f64,
    /// Last chainage; `None` runs to the end of the track.
    pub end: Option<f64>,
    pub tx: TxGeometry,
    pub beam: BeamType,
    pub update_interval: UpdateInterval,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            rx_height: 3.1,
            rx_step: 1.0,
            train_speed: 300.0,
            start: 0.0,
            end: None,
            tx: TxGeometry::default(),
            beam: BeamType::Omni,
            update_interval: UpdateInterval::Auto,
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sweep.rx_height", self.rx_height),
            ("sweep.rx_step", self.rx_step),
            ("sweep.train_speed", self.train_speed),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.start.is_finite() && self.start >= 0.0) {
            return Err(Error::invalid("sweep.start", "must be a non-negative chainage"));
        }
        if let Some(end) = self.end {
            if !(end.is_finite() && end > self.start) {
                return Err(Error::invalid("sweep.end", format!("must exceed start {}", self.start)));
            }
        }
        self.tx.validate()?;
        self.beam.validate()
    }

    /// Last chainage of the run on `scene`.
    pub fn end_on(&self, scene: &Scene) -> f64 {
        self.end.unwrap_or_else(|| scene.track_length())
    }

    /// Train speed in m/s.
    pub fn speed_ms(&self) -> f64 {
        kmh_to_ms(self.train_speed)
    }

    /// Number of receiver positions between `start` and `end`.
    pub fn snapshot_count(&self, end: f64) -> usize {
        ((end - self.start) / self.rx_step + 1e-9).floor() as usize + 1
    }

    /// Maximum Doppler shift `v f_c / c`.
    pub fn max_doppler(&self, carrier_frequency: f64) -> f64 {
        self.speed_ms() * carrier_frequency / SPEED_OF_LIGHT
    }

    /// Beam schedule covering the run on `scene`.
    pub fn schedule(&self, scene: &Scene) -> Result<BeamSchedule> {
        self.validate()?;
        make_schedule(
            self.start,
            self.end_on(scene),
            &self.tx,
            self.beam,
            self.update_interval,
        )
    }
}

/// Transmitter position for a track whose chainage origin is `scene.track[0]`.
pub fn tx_position(scene: &Scene, tx: &TxGeometry) -> Vec3 {
    let (foot, dir) = scene.track_at(tx.tx_chainage);
    let lateral = Vec3::Z.cross(dir).normalized();
    foot + lateral * tx.d + Vec3::Z * tx.h
}

/// Receiver position at `chainage`.
pub fn rx_position(scene: &Scene, chainage: f64, rx_height: f64) -> (Vec3, Vec3) {
    let (p, dir) = scene.track_at(chainage);
    (p + Vec3::Z * rx_height, dir)
}

/// Doppler shift of a path seen by a receiver moving with `velocity`,
/// positive when the receiver approaches the last interaction point.
pub fn path_doppler(path: &PropagationPath, velocity: Vec3, carrier_frequency: f64) -> f64 {
    carrier_frequency / SPEED_OF_LIGHT * velocity.dot(path.arrival_direction())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSnapshot {
    pub index: usize,
    pub chainage: f64,
    /// Seconds since the first snapshot.
    pub time: f64,
    pub rx: Vec3,
    /// Transmitter to receiver distance.
    pub distance: f64,
    pub beam_azimuth: f64,
    pub paths: Vec<PropagationPath>,
}

impl ChannelSnapshot {
    pub fn total_power(&self) -> f64 {
        crate::units::compensated_sum(self.paths.iter().map(|p| p.power()))
    }

    /// Strongest path, first in sort order on ties.
    pub fn strongest(&self) -> Option<&PropagationPath> {
        self.paths
            .iter()
            .reduce(|best, p| if p.power() > best.power() { p } else { best })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSeries {
    pub sweep: SweepConfig,
    pub trace: TraceConfig,
    pub schedule: BeamSchedule,
    pub tx: Vec3,
    /// Time between snapshots, seconds.
    pub dt: f64,
    /// Distance between snapshots, metres.
    pub dd: f64,
    pub snapshots: Vec<ChannelSnapshot>,
}

impl SnapshotSeries {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn max_doppler(&self) -> f64 {
        self.sweep.max_doppler(self.trace.carrier_frequency)
    }
}

/// Traces every receiver position of the sweep. Snapshots are computed in
/// parallel on the current rayon pool and returned in chainage order.
pub fn run_sweep(
    scene: &Scene,
    accel: Option<&AccelStructure>,
    sweep: &SweepConfig,
    schedule: &BeamSchedule,
    trace: &TraceConfig,
) -> Result<SnapshotSeries> {
    sweep.validate()?;
    let end = sweep.end_on(scene);
    if end <= sweep.start {
        return Err(Error::invalid("sweep.end", "run is empty"));
    }
    let tol = 1e-9;
    if schedule.start() > sweep.start + tol {
        return Err(Error::ScheduleGap(sweep.start));
    }
    if schedule.end() < end - tol {
        return Err(Error::ScheduleGap(schedule.end()));
    }
    let tx = tx_position(scene, &sweep.tx);
    let tracer = Tracer::new(scene, accel, tx, trace)?;
    let speed = sweep.speed_ms();
    let fc = trace.carrier_frequency;
    let count = sweep.snapshot_count(end);

    let snapshots = (0..count)
        .into_par_iter()
        .map(|index| {
            let chainage = sweep.start + index as f64 * sweep.rx_step;
            let (rx, dir) = rx_position(scene, chainage, sweep.rx_height);
            let segment = schedule.segment_at(chainage)?;
            let pattern = schedule.pattern_at(chainage)?;
            let mut paths = tracer.trace(&pattern, &Endpoint::omni(rx))?;
            let velocity = dir * speed;
            for p in &mut paths {
                p.doppler_hz = path_doppler(p, velocity, fc);
            }
            Ok(ChannelSnapshot {
                index,
                chainage,
                time: (chainage - sweep.start) / speed,
                rx,
                distance: tx.distance(rx),
                beam_azimuth: segment.azimuth,
                paths,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SnapshotSeries {
        sweep: sweep.clone(),
        trace: *trace,
        schedule: schedule.clone(),
        tx,
        dt: sweep.rx_step / speed,
        dd: sweep.rx_step,
        snapshots,
    })
}

/// Builds the schedule from the sweep configuration and runs the sweep.
pub fn run(
    scene: &Scene,
    accel: Option<&AccelStructure>,
    sweep: &SweepConfig,
    trace: &TraceConfig,
) -> Result<SnapshotSeries> {
    let schedule = sweep.schedule(scene)?;
    run_sweep(scene, accel, sweep, &schedule, trace)
}

/// Number of sign changes of the strongest path's Doppler shift along the
/// series, ignoring snapshots where it is within `eps` of zero.
pub fn doppler_sign_flips(series: &SnapshotSeries, eps: f64) -> usize {
    let signs: Vec<f64> = series
        .snapshots
        .iter()
        .filter_map(|s| s.strongest())
        .map(|p| p.doppler_hz)
        .filter(|f| f.abs() > eps)
        .map(f64::signum)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}
