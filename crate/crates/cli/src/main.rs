//! Command-line front end for the simulation library: run a single scenario,
//! compare every controller on the same scenario, or inspect the built-in
//! presets. All outputs are batch artifacts (CSV, JSON, optional SVG).

mod artifacts;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use mismatch_smc::{
    compute_metrics, simulate, ControllerKind, EstimateColumn, RunMetrics, ScenarioConfig,
    TrajectoryRecord,
};

use artifacts::ComparisonRow;

/// Output-directory fallback consulted when `--out` is not given.
const OUT_DIR_ENV: &str = "MISMATCH_SMC_OUT";

#[derive(Parser)]
#[command(
    name = "mismatch-smc",
    version,
    about = "Sliding-mode control benchmarks with disturbance observers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its trajectory and metrics
    Run(RunArgs),
    /// Run every controller on the same scenario and write a comparison table
    Compare(CompareArgs),
    /// List the built-in scenario presets with their parameters
    Presets,
}

#[derive(Args)]
struct CommonArgs {
    /// Built-in scenario to start from (see `presets`)
    #[arg(long, value_name = "NAME", conflicts_with = "config")]
    preset: Option<String>,
    /// JSON settings file; omitted fields take the first scenario's values
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (default: $MISMATCH_SMC_OUT, then the working directory)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Integration step override, in seconds
    #[arg(long, value_name = "S")]
    dt: Option<f64>,
    /// Run length override, in seconds
    #[arg(long, value_name = "S")]
    duration: Option<f64>,
    /// Sliding-surface slope override
    #[arg(long, value_name = "GAIN")]
    lambda: Option<f64>,
    /// Switching-gain override
    #[arg(long, value_name = "GAIN")]
    k: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Controller override (smc, ismc, smc-bndo, smc-sldo)
    #[arg(long, value_name = "KIND", value_parser = parse_controller)]
    controller: Option<ControllerKind>,
    /// Also write SVG line plots of the run
    #[arg(long)]
    plot: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
}

fn parse_controller(s: &str) -> Result<ControllerKind, String> {
    s.parse()
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(args),
        Command::Compare(args) => compare(args),
        Command::Presets => {
            presets();
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Builds the scenario from the preset or config file, then layers the
/// command-line overrides on top.
fn resolve_config(common: &CommonArgs) -> Result<ScenarioConfig> {
    let mut cfg = match (&common.preset, &common.config) {
        (Some(name), _) => ScenarioConfig::preset(name).ok_or_else(|| {
            anyhow!(
                "unknown preset '{name}' (available: {})",
                ScenarioConfig::preset_names().join(", ")
            )
        })?,
        (None, Some(path)) => load_config(path)?,
        (None, None) => ScenarioConfig::scenario1(),
    };
    if let Some(dt) = common.dt {
        cfg.dt = dt;
    }
    if let Some(duration) = common.duration {
        cfg.duration = duration;
    }
    if let Some(lambda) = common.lambda {
        cfg.lambda = lambda;
    }
    if let Some(k) = common.k {
        cfg.k = k;
    }
    Ok(cfg)
}

/// Loads a JSON scenario file, reporting parse problems with the path of
/// the offending field.
fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(de)
        .map_err(|e| anyhow!("{e} in config file {}", path.display()))?;
    Ok(cfg)
}

/// Resolves the output directory and makes sure it exists.
fn out_dir(common: &CommonArgs) -> Result<PathBuf> {
    let dir = common
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir)
}

/// Metrics configuration shared by `run` and `compare`: settling is judged
/// around the disturbance events, chattering over the last five seconds,
/// and the estimation error against whichever estimate the controller uses.
fn run_metrics(cfg: &ScenarioConfig, tr: &TrajectoryRecord<f64>) -> RunMetrics<f64> {
    let events = cfg.disturbance.events_within(cfg.duration);
    let window = [f64::max(0.0, cfg.duration - 5.0), cfg.duration];
    let estimate = match cfg.controller {
        ControllerKind::SmcBndo => Some(EstimateColumn::BasicObserver),
        ControllerKind::SmcSldo => Some(EstimateColumn::SelfLearning),
        _ => None,
    };
    compute_metrics(tr, &events, cfg.settle_band, window, estimate)
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let mut cfg = resolve_config(&args.common)?;
    if let Some(controller) = args.controller {
        cfg.controller = controller;
    }
    cfg.validate()
        .map_err(|e| anyhow!("invalid configuration: {e}"))?;
    let dir = out_dir(&args.common)?;

    let tr = simulate::<f64>(&cfg)?;
    let metrics = run_metrics(&cfg, &tr);

    let csv_path = dir.join(format!("{}_trajectory.csv", cfg.name));
    artifacts::write_trajectory_csv(&csv_path, &tr)?;
    let metrics_path = dir.join(format!("{}_metrics.json", cfg.name));
    artifacts::write_metrics_json(&metrics_path, &cfg, tr.diverged, &metrics)?;
    println!(
        "wrote {} ({} rows) and {}",
        csv_path.display(),
        tr.len(),
        metrics_path.display()
    );

    if args.plot {
        for path in plot::write_plots(&dir, &cfg, &tr)? {
            println!("wrote {}", path.display());
        }
    }

    if tr.diverged {
        eprintln!(
            "error: {} diverged under {} after {} of {} samples; partial trajectory retained",
            cfg.name,
            cfg.controller,
            tr.len(),
            (cfg.duration / cfg.dt).round() as usize + 1
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn compare(args: CompareArgs) -> Result<ExitCode> {
    let base = resolve_config(&args.common)?;
    let dir = out_dir(&args.common)?;
    let events = base.disturbance.events_within(base.duration);

    // The four runs are independent, so they go wide; artifact writing
    // stays on this thread, in controller order.
    let mut rows: Vec<ComparisonRow> = Vec::with_capacity(ControllerKind::ALL.len());
    std::thread::scope(|scope| {
        let handles: Vec<_> = ControllerKind::ALL
            .map(|controller| {
                let mut cfg = base.clone();
                cfg.controller = controller;
                scope.spawn(move || match simulate::<f64>(&cfg) {
                    Ok(tr) => ComparisonRow {
                        controller,
                        diverged: tr.diverged,
                        metrics: Some(run_metrics(&cfg, &tr)),
                        error: None,
                    },
                    Err(e) => ComparisonRow {
                        controller,
                        diverged: false,
                        metrics: None,
                        error: Some(e.to_string()),
                    },
                })
            })
            .into_iter()
            .collect();
        for handle in handles {
            rows.push(handle.join().expect("comparison run panicked"));
        }
    });

    let csv_path = dir.join(format!("{}_comparison.csv", base.name));
    artifacts::write_comparison_csv(&csv_path, &rows, &events)?;
    let table = artifacts::comparison_table(&base.name, &rows, &events);
    let txt_path = dir.join(format!("{}_comparison.txt", base.name));
    std::fs::write(&txt_path, &table)
        .with_context(|| format!("cannot write {}", txt_path.display()))?;

    print!("{table}");
    println!("wrote {} and {}", csv_path.display(), txt_path.display());
    Ok(ExitCode::SUCCESS)
}

fn presets() {
    let mut first = true;
    for name in ScenarioConfig::preset_names() {
        if !first {
            println!();
        }
        first = false;
        let cfg = ScenarioConfig::preset(name).expect("listed preset exists");
        print!("{}", artifacts::preset_table(&cfg));
    }
}
