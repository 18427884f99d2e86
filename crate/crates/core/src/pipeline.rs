//! Run configuration and on-disk run directories.
//!
//! A sweep run directory holds:
//!
//! | file | content |
//! |------|---------|
//! | `config.toml` | normalised echo of the run configuration |
//! | `scene.json` | exported scene |
//! | `schedule.csv` | beam segments |
//! | `series.json` | sweep metadata without the snapshots |
//! | `snapshots.jsonl` | one snapshot per line, all paths included |
//! | `paths.csv` | flat path table |
//! | `manifest.json` | config echo, tool version, seed and file checksums |
//! | `checksums.sha256` | `sha256sum`-compatible list of every file above |
//!
//! Every file is written to a temporary name and renamed into place. Nothing
//! depends on wall-clock time, so equal configs give byte-identical outputs.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::beam::BeamSchedule;
use crate::error::{Error, Result};
use crate::geometry::{AccelStructure, Scene, Vec3};
use crate::kpi::{CellEdgeReport, Deployment, KpiTrace};
use crate::scene::{Census, Scenario, SceneExport, ViaductParams};
use crate::stats::{dpsd, pas_and_angular_spread, pdp, AngleSide, StatsOptions, StatsReport, TrendVerdict};
use crate::sweep::{run_sweep, ChannelSnapshot, SnapshotSeries, SweepConfig};
use crate::tracer::TraceConfig;
use crate::units::power_to_db;

pub const TOOL: &str = "railbeam";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_SCHEMA: &str = "railbeam.manifest/1";
pub const SERIES_SCHEMA: &str = "railbeam.series/1";
pub const TRENDS_SCHEMA: &str = "railbeam.trends/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seeds scene clutter; copied into the sweep.
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub scenario: Scenario,
    pub trace: TraceConfig,
    pub sweep: SweepConfig,
    pub stats: StatsOptions,
    pub kpi: Deployment,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            output: None,
            scenario: Scenario::Viaduct(ViaductParams::default()),
            trace: TraceConfig::default(),
            sweep: SweepConfig::default(),
            stats: StatsOptions::default(),
            kpi: Deployment::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let mut cfg: RunConfig = toml::from_str(text)?;
        cfg.normalize();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_toml(&text)
    }

    /// Copies the run seed into the sweep so both always agree.
    pub fn normalize(&mut self) {
        self.sweep.seed = self.seed;
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config always serialises")
    }

    /// Checks every section, and that the beam schedule covers the run.
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.trace.validate()?;
        self.sweep.validate()?;
        self.stats.validate()?;
        self.kpi.validate()?;
        let scene = self.build_scene()?;
        self.sweep.schedule(&scene)?;
        Ok(())
    }

    pub fn build_scene(&self) -> Result<Scene> {
        self.scenario.build(self.seed)
    }

    pub fn label(&self) -> String {
        format!("{}-{}", self.scenario.kind(), self.sweep.beam.label())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid("path", format!("{} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_slice(&text)?)
}

/// Tool, version and configuration fingerprint stamped on every output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stamp {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
}

impl Stamp {
    pub fn of(config: &RunConfig) -> Stamp {
        Stamp {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            config_sha256: sha256_hex(config.to_toml().as_bytes()),
        }
    }

    /// Leading comment line for CSV outputs.
    pub fn csv_line(&self, schema: &str) -> String {
        format!(
            "# {} {} {} config_sha256={}\n",
            self.tool, self.version, schema, self.config_sha256
        )
    }
}

/// CSV text with a stamp line on top.
fn stamped_csv(stamp: &Stamp, schema: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut out = stamp.csv_line(schema).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush().map_err(|e| Error::io("csv", e))?;
    }
    Ok(out)
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub stamp: Stamp,
    pub seed: u64,
    pub label: String,
    pub config: RunConfig,
    pub census: Census,
    /// Update interval actually used, metres; `None` for a single segment.
    pub update_interval_m: Option<f64>,
    pub segments: usize,
    pub snapshots: usize,
    pub files: Vec<FileEntry>,
}

/// Collects output files, writes them atomically and records checksums.
struct DirWriter {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl DirWriter {
    fn new(dir: &Path) -> Result<DirWriter> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(DirWriter {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    /// Writes `checksums.sha256` over everything put so far.
    fn finish(self) -> Result<Vec<FileEntry>> {
        let mut text = String::new();
        for f in &self.files {
            text.push_str(&format!("{}  {}\n", f.sha256, f.name));
        }
        write_atomic(&self.dir.join("checksums.sha256"), text.as_bytes())?;
        Ok(self.files)
    }
}

/// Sweep metadata stored next to the snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SeriesMeta {
    schema: String,
    stamp: Stamp,
    sweep: SweepConfig,
    trace: TraceConfig,
    schedule: BeamSchedule,
    tx: Vec3,
    dt: f64,
    dd: f64,
    snapshots: usize,
}

fn effective_interval(schedule: &BeamSchedule) -> Option<f64> {
    (schedule.segments.len() > 1).then_some(schedule.interval)
}

/// Validates the config, traces the sweep and writes a run directory.
pub fn run_sweep_to_dir(config: &RunConfig, dir: &Path) -> Result<Manifest> {
    config.validate()?;
    let scene = config.build_scene()?;
    let schedule = config.sweep.schedule(&scene)?;
    let accel = AccelStructure::build(&scene).ok();
    let series = run_sweep(&scene, accel.as_ref(), &config.sweep, &schedule, &config.trace)?;
    write_run_dir(config, &scene, &series, dir)
}

pub fn write_run_dir(config: &RunConfig, scene: &Scene, series: &SnapshotSeries, dir: &Path) -> Result<Manifest> {
    let stamp = Stamp::of(config);
    let mut w = DirWriter::new(dir)?;
    w.put("config.toml", config.to_toml().as_bytes())?;
    w.put(
        "scene.json",
        &serde_json::to_vec(&SceneExport::new(scene, config.scenario.kind(), config.seed))?,
    )?;
    let mut sched = stamp.csv_line("railbeam.schedule/1").into_bytes();
    series.schedule.write_csv(&mut sched)?;
    w.put("schedule.csv", &sched)?;
    let meta = SeriesMeta {
        schema: SERIES_SCHEMA.to_string(),
        stamp: stamp.clone(),
        sweep: series.sweep.clone(),
        trace: series.trace,
        schedule: series.schedule.clone(),
        tx: series.tx,
        dt: series.dt,
        dd: series.dd,
        snapshots: series.len(),
    };
    w.put("series.json", &json_bytes(&meta)?)?;
    let mut lines = Vec::new();
    for s in &series.snapshots {
        serde_json::to_writer(&mut lines, s)?;
        lines.push(b'\n');
    }
    w.put("snapshots.jsonl", &lines)?;
    w.put("paths.csv", &paths_csv(&stamp, series)?)?;

    let mut manifest = Manifest {
        schema: MANIFEST_SCHEMA.to_string(),
        stamp,
        seed: config.seed,
        label: config.label(),
        config: config.clone(),
        census: Census::of(scene),
        update_interval_m: effective_interval(&series.schedule),
        segments: series.schedule.segments.len(),
        snapshots: series.len(),
        files: Vec::new(),
    };
    manifest.files = w.files.clone();
    w.put("manifest.json", &json_bytes(&manifest)?)?;
    w.finish()?;
    Ok(manifest)
}

fn paths_csv(stamp: &Stamp, series: &SnapshotSeries) -> Result<Vec<u8>> {
    let header = [
        "snapshot",
        "chainage_m",
        "kind",
        "delay_ns",
        "power_db",
        "aod_az",
        "aod_el",
        "aoa_az",
        "aoa_el",
        "doppler_hz",
    ];
    let mut rows = Vec::new();
    for s in &series.snapshots {
        for p in &s.paths {
            rows.push(vec![
                s.index.to_string(),
                format!("{:.3}", s.chainage),
                p.kind.label(),
                fmt(p.delay * 1e9),
                fmt(power_to_db(p.power())),
                fmt(p.aod_az),
                fmt(p.aod_el),
                fmt(p.aoa_az),
                fmt(p.aoa_el),
                fmt(p.doppler_hz),
            ]);
        }
    }
    stamped_csv(stamp, "railbeam.paths/1", &header, rows)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    read_json(&dir.join("manifest.json"))
}

/// Reloads the snapshot series of a run directory.
pub fn load_series(dir: &Path) -> Result<SnapshotSeries> {
    let meta: SeriesMeta = read_json(&dir.join("series.json"))?;
    if meta.schema != SERIES_SCHEMA {
        return Err(Error::invalid(
            "schema",
            format!("expected {SERIES_SCHEMA}, found {}", meta.schema),
        ));
    }
    let path = dir.join("snapshots.jsonl");
    let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut snapshots = Vec::with_capacity(meta.snapshots);
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(&path, e))?;
        if !line.is_empty() {
            snapshots.push(serde_json::from_str::<ChannelSnapshot>(&line)?);
        }
    }
    if snapshots.len() != meta.snapshots {
        return Err(Error::InsufficientData(format!(
            "{} lists {} snapshots, found {}",
            path.display(),
            meta.snapshots,
            snapshots.len()
        )));
    }
    Ok(SnapshotSeries {
        sweep: meta.sweep,
        trace: meta.trace,
        schedule: meta.schedule,
        tx: meta.tx,
        dt: meta.dt,
        dd: meta.dd,
        snapshots,
    })
}

/// Checks every file of a run directory against its manifest.
pub fn verify_run_dir(dir: &Path) -> Result<()> {
    let manifest = read_manifest(dir)?;
    for f in &manifest.files {
        let path = dir.join(&f.name);
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        if sha256_hex(&bytes) != f.sha256 {
            return Err(Error::invalid(f.name.clone(), "checksum mismatch"));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct StampedReport<'a> {
    stamp: Stamp,
    #[serde(flatten)]
    report: &'a StatsReport,
}

/// Writes the statistics of one run: the JSON report, per-snapshot metric
/// series, stationarity CCDFs and sparse PDP, Doppler and angular spectra.
pub fn write_stats_dir(config: &RunConfig, series: &SnapshotSeries, report: &StatsReport, dir: &Path) -> Result<()> {
    let stamp = Stamp::of(config);
    let opts = &report.options;
    let mut w = DirWriter::new(dir)?;
    w.put(
        "stats.json",
        &json_bytes(&StampedReport {
            stamp: stamp.clone(),
            report,
        })?,
    )?;

    let small = &report.small_scale;
    let fit = &report.path_loss;
    let mut fit_iter = fit.distances.iter().zip(&fit.residuals);
    let mut rows = Vec::new();
    for (i, s) in series.snapshots.iter().enumerate() {
        let p = s.total_power();
        let residual = if p > 0.0 {
            fit_iter.next().map(|(_, r)| *r)
        } else {
            None
        };
        rows.push(vec![
            s.index.to_string(),
            format!("{:.3}", s.chainage),
            fmt(s.distance),
            fmt_opt((p > 0.0).then(|| -power_to_db(p))),
            fmt_opt(residual),
            fmt_opt(small.kf_db[i]),
            fmt_opt(small.ds_ns[i]),
            fmt_opt(small.dps_hz[i]),
            fmt_opt(small.aas_deg[i]),
            fmt_opt(small.das_deg[i]),
            s.paths.len().to_string(),
        ]);
    }
    let header = [
        "snapshot",
        "chainage_m",
        "distance_m",
        "pl_db",
        "sf_db",
        "kf_db",
        "ds_ns",
        "dps_hz",
        "aas_deg",
        "das_deg",
        "paths",
    ];
    w.put(
        "metrics.csv",
        &stamped_csv(&stamp, "railbeam.metrics/1", &header, rows)?,
    )?;

    for si in &report.stationarity {
        let rows = si.ccdf.iter().map(|(v, p)| vec![fmt(*v), fmt(*p)]).collect();
        let name = format!("si_ccdf_cth{}.csv", si.c_th);
        w.put(&name, &stamped_csv(&stamp, "railbeam.ccdf/1", &["si_m", "ccdf"], rows)?)?;
    }

    let mut rows = Vec::new();
    for s in &series.snapshots {
        let b = pdp(s, opts.delay_bin_ns)?;
        for (k, p) in b.powers.iter().enumerate() {
            if *p > 0.0 {
                rows.push(vec![s.index.to_string(), fmt(b.edge(k)), fmt(power_to_db(*p))]);
            }
        }
    }
    w.put(
        "pdp.csv",
        &stamped_csv(&stamp, "railbeam.pdp/1", &["snapshot", "delay_ns", "power_db"], rows)?,
    )?;

    let d = dpsd(series, opts.dpsd_window, opts.doppler_bin_hz)?;
    let freqs = d.frequencies();
    let mut rows = Vec::new();
    for (i, col) in d.columns.iter().enumerate() {
        for (f, p) in freqs.iter().zip(col) {
            if *p > 0.0 {
                rows.push(vec![i.to_string(), fmt(*f), fmt(power_to_db(*p))]);
            }
        }
    }
    w.put(
        "dpsd.csv",
        &stamped_csv(&stamp, "railbeam.dpsd/1", &["snapshot", "doppler_hz", "power_db"], rows)?,
    )?;

    for (side, name) in [
        (AngleSide::Arrival, "pas_aoa.csv"),
        (AngleSide::Departure, "pas_aod.csv"),
    ] {
        let (pas, _) = pas_and_angular_spread(series, side, opts.az_bin_deg)?;
        let mut rows = Vec::new();
        for (i, col) in pas.columns.iter().enumerate() {
            for (k, p) in col.iter().enumerate() {
                if *p > 0.0 {
                    rows.push(vec![
                        i.to_string(),
                        fmt(-180.0 + k as f64 * pas.bin_deg),
                        fmt(power_to_db(*p)),
                    ]);
                }
            }
        }
        w.put(
            name,
            &stamped_csv(&stamp, "railbeam.pas/1", &["snapshot", "azimuth_deg", "power_db"], rows)?,
        )?;
    }
    w.finish()?;
    Ok(())
}

pub fn read_stats(dir: &Path) -> Result<StatsReport> {
    read_json(&dir.join("stats.json"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendFile {
    pub schema: String,
    pub tool: String,
    pub version: String,
    pub runs: Vec<String>,
    pub verdicts: Vec<TrendVerdict>,
}

pub fn write_trends(path: &Path, runs: Vec<String>, verdicts: &[TrendVerdict]) -> Result<()> {
    let file = TrendFile {
        schema: TRENDS_SCHEMA.to_string(),
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        runs,
        verdicts: verdicts.to_vec(),
    };
    write_atomic(path, &json_bytes(&file)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiSummary {
    pub schema: String,
    pub stamp: Stamp,
    pub deployment: Deployment,
    pub noise_dbm: f64,
    pub traces: Vec<String>,
    pub cell_edges: Vec<CellEdgeReport>,
}

/// Writes one KPI CSV per trace plus a JSON summary of the cell edges.
pub fn write_kpi_dir(config: &RunConfig, traces: &[KpiTrace], edges: Vec<CellEdgeReport>, dir: &Path) -> Result<()> {
    let stamp = Stamp::of(config);
    let mut w = DirWriter::new(dir)?;
    for t in traces {
        let mut buf = stamp.csv_line("railbeam.kpi-trace/1").into_bytes();
        t.write_csv(&mut buf)?;
        w.put(&format!("kpi_{}.csv", t.label), &buf)?;
    }
    let summary = KpiSummary {
        schema: crate::kpi::KPI_SCHEMA.to_string(),
        stamp,
        deployment: config.kpi.clone(),
        noise_dbm: traces.first().map_or(config.kpi.noise_dbm(), |t| t.noise_dbm),
        traces: traces.iter().map(|t| t.label.clone()).collect(),
        cell_edges: edges,
    };
    w.put("kpi.json", &json_bytes(&summary)?)?;
    w.finish()?;
    Ok(())
}
