//! Command-line front end: scene export, beam schedules, sweeps, statistics,
//! KPIs and a run summary.

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use railbeam::antenna::BeamType;
use railbeam::beam::UpdateInterval;
use railbeam::kpi::{cell_edge_report, evaluate_kpis, GainTable};
use railbeam::pipeline::{self, RunConfig};
use railbeam::scene::{Census, Scenario, ScenarioKind, SceneExport};
use railbeam::stats::{compute_report, trend_verdicts, StatsReport};

#[derive(Parser)]
#[command(
    name = "railbeam",
    version,
    about = "Narrow-beam channel simulation for high-speed railway scenes"
)]
struct Cli {
    /// Worker threads for tracing and statistics (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a scene and export it as JSON.
    Scene {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "scene.json")]
        out: PathBuf,
    },
    /// Print and save the beam update schedule.
    Schedule {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "schedule.csv")]
        out: PathBuf,
    },
    /// Trace a moving-train sweep into a run directory.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Run directory (default: the config's `output`, else `runs/<label>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Channel statistics of one or more run directories.
    Stats {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        /// Correlation thresholds for the stationarity interval.
        #[arg(long = "c-th", value_delimiter = ',')]
        c_th: Option<Vec<f64>>,
        /// Where to write trend verdicts when several runs are given.
        #[arg(long, default_value = "trends.json")]
        trends: PathBuf,
    },
    /// Cell-level KPIs over a chain of base stations.
    Kpi {
        /// Run directories whose fitted path loss drives the gains.
        runs: Vec<PathBuf>,
        /// Use free-space gains instead of run directories.
        #[arg(long)]
        free_space: bool,
        /// Inter-site distance, metres.
        #[arg(long)]
        isd: Option<f64>,
        #[arg(long)]
        sites: Option<usize>,
        /// Evaluate without thermal noise.
        #[arg(long)]
        noise_free: bool,
        #[arg(long, default_value = "1")]
        step: f64,
        #[arg(long, default_value = "kpi")]
        out: PathBuf,
    },
    /// Summary table and trend verdicts of analysed run directories.
    Report {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    /// Catenary pole spacing, cutting scenario only.
    #[arg(long)]
    pole_spacing: Option<f64>,
    #[arg(long)]
    beam: Option<BeamType>,
    /// Beam update interval in metres, or `auto`.
    #[arg(long)]
    update: Option<UpdateInterval>,
    #[arg(long)]
    seed: Option<u64>,
}

/// Bad input that is not a library validation error.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<railbeam::Error>() {
            return if e.is_validation() { 2 } else { 1 };
        }
    }
    1
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                if !path.is_file() {
                    return Err(usage(format!("config file {} not found", path.display())));
                }
                RunConfig::load(path).with_context(|| format!("loading {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(kind) = self.scenario {
            if kind != cfg.scenario.kind() {
                cfg.scenario = Scenario::default_for(kind);
            }
        }
        if let Some(spacing) = self.pole_spacing {
            match &mut cfg.scenario {
                Scenario::Cutting(p) => p.pole_spacing = spacing,
                _ => return Err(usage("--pole-spacing applies to the cutting scenario only")),
            }
        }
        if let Some(beam) = self.beam {
            cfg.sweep.beam = beam;
        }
        if let Some(update) = self.update {
            cfg.sweep.update_interval = update;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.normalize();
        cfg.validate()?;
        Ok(cfg)
    }
}

fn require_dirs(runs: &[PathBuf]) -> Result<()> {
    for r in runs {
        if !r.join("manifest.json").is_file() {
            return Err(usage(format!("{} is not a run directory", r.display())));
        }
    }
    Ok(())
}

fn run_config(dir: &Path) -> Result<RunConfig> {
    Ok(RunConfig::load(&dir.join("config.toml"))?)
}

fn cmd_scene(config: &ConfigArgs, out: &Path) -> Result<()> {
    let cfg = config.resolve()?;
    let scene = cfg.build_scene()?;
    let export = SceneExport::new(&scene, cfg.scenario.kind(), cfg.seed);
    pipeline::write_atomic(out, &serde_json::to_vec(&export)?)?;
    let census = Census::of(&scene);
    println!("scenario {} seed {}", cfg.scenario.kind(), cfg.seed);
    println!(
        "surfaces {} triangles {} edges {}",
        census.surfaces, census.triangles, census.edges
    );
    for (m, n) in &census.materials {
        println!("  material {m:?}: {n} triangles");
    }
    for (tag, n) in &census.tags {
        println!("  {tag}: {n}");
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_schedule(config: &ConfigArgs, out: &Path) -> Result<()> {
    let cfg = config.resolve()?;
    let scene = cfg.build_scene()?;
    let schedule = cfg.sweep.schedule(&scene)?;
    let mut buf = Vec::new();
    schedule.write_csv(&mut buf)?;
    pipeline::write_atomic(out, &buf)?;
    println!(
        "{} beam, {} segments, interval {:.1} m",
        schedule.beam,
        schedule.segments.len(),
        schedule.interval
    );
    print!("{}", String::from_utf8_lossy(&buf));
    Ok(())
}

fn cmd_sweep(config: &ConfigArgs, out: Option<&Path>) -> Result<()> {
    let cfg = config.resolve()?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(cfg.label()));
    let m = pipeline::run_sweep_to_dir(&cfg, &dir)?;
    println!("{}: {} snapshots, {} beam segments", m.label, m.snapshots, m.segments);
    if let Some(i) = m.update_interval_m {
        println!("update interval {i} m");
    }
    let digest = m
        .files
        .iter()
        .find(|f| f.name == "snapshots.jsonl")
        .map(|f| f.sha256.as_str());
    println!("snapshots sha256 {}", digest.unwrap_or("-"));
    println!("wrote {}", dir.display());
    Ok(())
}

fn cmd_stats(runs: &[PathBuf], c_th: Option<&[f64]>, trends: &Path) -> Result<()> {
    require_dirs(runs)?;
    let mut reports = Vec::new();
    for dir in runs {
        let mut cfg = run_config(dir)?;
        if let Some(c) = c_th {
            cfg.stats.c_th = c.to_vec();
        }
        cfg.stats.validate()?;
        let series = pipeline::load_series(dir)?;
        let label = pipeline::read_manifest(dir)?.label;
        let report = compute_report(&series, &cfg.stats, &label)?;
        pipeline::write_stats_dir(&cfg, &series, &report, &dir.join("stats"))?;
        print_summary(&report);
        reports.push(report);
    }
    if reports.len() > 1 {
        let verdicts = trend_verdicts(&reports);
        for v in &verdicts {
            println!("{}", v.line());
        }
        let labels = reports.iter().map(|r| r.label.clone()).collect();
        pipeline::write_trends(trends, labels, &verdicts)?;
        println!("wrote {}", trends.display());
    }
    Ok(())
}

fn print_summary(r: &StatsReport) {
    let mean = |s: Option<railbeam::stats::Summary>| s.map_or("-".to_string(), |s| format!("{:.2}", s.mean));
    let si: Vec<String> = r
        .stationarity
        .iter()
        .map(|s| format!("SI(c_th={})={:.1} m", s.c_th, s.mean))
        .collect();
    println!(
        "{}: n_PL={:.3} sigma_SF={:.2} dB K={} dB DS={} ns DPS={} Hz AAS={} deg {}",
        r.label,
        r.path_loss.n,
        r.path_loss.sigma_sf,
        mean(r.summary.k),
        mean(r.summary.ds),
        mean(r.summary.dps),
        mean(r.summary.aas),
        si.join(" ")
    );
}

#[allow(clippy::too_many_arguments)]
fn cmd_kpi(
    runs: &[PathBuf],
    free_space: bool,
    isd: Option<f64>,
    sites: Option<usize>,
    noise_free: bool,
    step: f64,
    out: &Path,
) -> Result<()> {
    if free_space == !runs.is_empty() {
        return Err(usage("give either run directories or --free-space"));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(usage("--step must be positive"));
    }
    require_dirs(runs)?;
    let mut cfg = match runs.first() {
        Some(dir) => run_config(dir)?,
        None => RunConfig::default(),
    };
    if let Some(isd) = isd {
        cfg.kpi.inter_site_distance = isd;
    }
    if let Some(n) = sites {
        cfg.kpi.base_stations = n;
    }
    cfg.kpi.h = cfg.sweep.tx.h;
    cfg.kpi.d = cfg.sweep.tx.d;
    cfg.kpi.validate()?;
    let dep = &cfg.kpi;
    let positions = dep.positions(step);
    let noise = if noise_free { f64::NEG_INFINITY } else { dep.noise_dbm() };

    let mut traces = Vec::new();
    if free_space {
        let gains = GainTable::free_space(dep, &positions, cfg.sweep.rx_height, cfg.trace.carrier_frequency);
        traces.push((360.0, evaluate_kpis(dep, &gains, noise, "free-space")?));
    }
    for dir in runs {
        let run = run_config(dir)?;
        let fit = match pipeline::read_stats(&dir.join("stats")) {
            Ok(r) => r.path_loss,
            Err(_) => railbeam::stats::fit_path_loss(&pipeline::load_series(dir)?, run.stats.d0)?,
        };
        let gains = GainTable::from_fit(dep, &positions, run.sweep.rx_height, &fit);
        let width = run.sweep.beam.hpbw().map_or(360.0, |(h, _)| h);
        traces.push((width, evaluate_kpis(dep, &gains, noise, &run.sweep.beam.label())?));
    }
    traces.sort_by(|a, b| b.0.total_cmp(&a.0));
    let traces: Vec<_> = traces.into_iter().map(|(_, t)| t).collect();

    let mut edges = Vec::new();
    if dep.base_stations >= 2 {
        for t in &traces {
            let reference = (t.label != traces[0].label).then(|| &traces[0]);
            edges.push(cell_edge_report(t, reference)?);
        }
    }
    pipeline::write_kpi_dir(&cfg, &traces, edges.clone(), out)?;
    println!(
        "isd {} m, {} sites, noise {:.1} dBm, {} positions",
        dep.inter_site_distance,
        dep.base_stations,
        noise,
        positions.len()
    );
    for (t, e) in traces.iter().zip(edges.iter().map(Some).chain(std::iter::repeat(None))) {
        let mean_se = t.points.iter().map(|p| p.se_bps_hz).sum::<f64>() / t.points.len() as f64;
        print!("{}: mean SE {:.3} bps/Hz", t.label, mean_se);
        if let Some(e) = e {
            for edge in &e.edges {
                print!(
                    ", edge {}-{} min SINR {:.2} dB at {:.1} m",
                    edge.sites.0, edge.sites.1, edge.min_sinr_db, edge.min_sinr_position
                );
            }
            if !e.crossover.is_empty() {
                print!(", weaker than {} over", e.reference.as_deref().unwrap_or("-"));
                for (a, b) in &e.crossover {
                    print!(" [{a:.0}, {b:.0}] m");
                }
            }
        }
        println!();
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_report(runs: &[PathBuf], out: Option<&Path>) -> Result<()> {
    require_dirs(runs)?;
    let mut reports = Vec::new();
    for dir in runs {
        let stats = dir.join("stats");
        if !stats.join("stats.json").is_file() {
            return Err(usage(format!(
                "{} has no statistics; run `railbeam stats` first",
                dir.display()
            )));
        }
        reports.push(pipeline::read_stats(&stats)?);
    }
    let mut text = String::from("| run | n_PL | sigma_SF dB | mu_K dB | mu_DS ns | mu_DPS Hz | mu_AAS deg |");
    let thresholds: Vec<f64> = reports[0].stationarity.iter().map(|s| s.c_th).collect();
    for c in &thresholds {
        text.push_str(&format!(" SI({c}) m |"));
    }
    text.push('\n');
    text.push_str(&"|---".repeat(7 + thresholds.len()));
    text.push_str("|\n");
    let cell = |s: Option<railbeam::stats::Summary>| s.map_or("-".into(), |s| format!("{:.2}", s.mean));
    for r in &reports {
        text.push_str(&format!(
            "| {} | {:.3} | {:.2} | {} | {} | {} | {} |",
            r.label,
            r.path_loss.n,
            r.path_loss.sigma_sf,
            cell(r.summary.k),
            cell(r.summary.ds),
            cell(r.summary.dps),
            cell(r.summary.aas)
        ));
        for c in &thresholds {
            text.push_str(&format!(
                " {} |",
                r.si(*c).map_or("-".into(), |s| format!("{:.1}", s.mean))
            ));
        }
        text.push('\n');
    }
    if reports.len() > 1 {
        text.push('\n');
        for v in trend_verdicts(&reports) {
            text.push_str(&v.line());
            text.push('\n');
        }
    }
    print!("{text}");
    if let Some(out) = out {
        pipeline::write_atomic(out, text.as_bytes())?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Scene { config, out } => cmd_scene(config, out),
        Command::Schedule { config, out } => cmd_schedule(config, out),
        Command::Sweep { config, out } => cmd_sweep(config, out.as_deref()),
        Command::Stats { runs, c_th, trends } => cmd_stats(runs, c_th.as_deref(), trends),
        Command::Kpi {
            runs,
            free_space,
            isd,
            sites,
            noise_free,
            step,
            out,
        } => cmd_kpi(runs, *free_space, *isd, *sites, *noise_free, *step, out),
        Command::Report { runs, out } => cmd_report(runs, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut msg = String::new();
            for cause in e.chain() {
                let text = cause.to_string();
                if !msg.contains(text.trim()) {
                    if !msg.is_empty() {
                        msg.push_str(": ");
                    }
                    msg.push_str(&text);
                }
            }
            eprintln!("error: {msg}");
            ExitCode::from(exit_code(&e))
        }
    }
}
