//! File emission: trajectory CSV, metrics JSON, comparison tables, and the
//! preset listing.

use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use mismatch_smc::{
    ControllerKind, DisturbanceProfile, RunMetrics, ScenarioConfig, SegmentKind, TrajectoryRecord,
};
use serde::Serialize;

/// Column schema of every trajectory file this tool writes.
pub const CSV_HEADER: &str = "t,x1,x2,u,s,d_true,d_hat_bn,d_hat_sl,tau_c,tau_n,eta";

pub fn write_trajectory_csv(path: &Path, tr: &TrajectoryRecord<f64>) -> Result<()> {
    let file =
        std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{CSV_HEADER}")?;
    for n in 0..tr.len() {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            tr.t[n],
            tr.x1[n],
            tr.x2[n],
            tr.u[n],
            tr.s[n],
            tr.d_true[n],
            tr.d_hat_bn[n],
            tr.d_hat_sl[n],
            tr.tau_c[n],
            tr.tau_n[n],
            tr.eta[n],
        )?;
    }
    w.flush()?;
    Ok(())
}

/// The metrics file keeps the run identity next to the flattened metrics,
/// so `mean_abs_x1` and friends are top-level fields.
#[derive(Serialize)]
struct MetricsDocument<'a> {
    name: &'a str,
    controller: &'a str,
    diverged: bool,
    #[serde(flatten)]
    metrics: &'a RunMetrics<f64>,
}

pub fn write_metrics_json(
    path: &Path,
    cfg: &ScenarioConfig,
    diverged: bool,
    metrics: &RunMetrics<f64>,
) -> Result<()> {
    let doc = MetricsDocument {
        name: &cfg.name,
        controller: cfg.controller.as_str(),
        diverged,
        metrics,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// One controller's outcome in a comparison run.
pub struct ComparisonRow {
    pub controller: ControllerKind,
    pub diverged: bool,
    pub metrics: Option<RunMetrics<f64>>,
    /// Set when the scenario did not validate for this controller.
    pub error: Option<String>,
}

impl ComparisonRow {
    fn status(&self) -> &'static str {
        if self.error.is_some() {
            "invalid"
        } else if self.diverged {
            "diverged"
        } else {
            "ok"
        }
    }
}

fn settle_cell(metrics: &RunMetrics<f64>, event: f64) -> String {
    match metrics
        .settling_times
        .iter()
        .find(|s| (s.event - event).abs() < 1e-9)
    {
        Some(outcome) => match outcome.settled_at {
            Some(t) => format!("{t:.3}"),
            None => "never".to_owned(),
        },
        None => String::new(),
    }
}

pub fn write_comparison_csv(path: &Path, rows: &[ComparisonRow], events: &[f64]) -> Result<()> {
    let file =
        std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);

    write!(
        w,
        "controller,status,mean_abs_x1,overshoot,chattering_index,rms_estimation_error"
    )?;
    for e in events {
        write!(w, ",settle_at_{e}s")?;
    }
    writeln!(w)?;

    for row in rows {
        write!(w, "{},{}", row.controller, row.status())?;
        match &row.metrics {
            Some(m) => {
                write!(
                    w,
                    ",{:.6},{:.6},{:.6}",
                    m.mean_abs_x1, m.overshoot, m.chattering_index
                )?;
                match m.rms_estimation_error {
                    Some(v) => write!(w, ",{v:.6}")?,
                    None => write!(w, ",")?,
                }
                for e in events {
                    write!(w, ",{}", settle_cell(m, *e))?;
                }
            }
            None => {
                for _ in 0..4 + events.len() {
                    write!(w, ",")?;
                }
            }
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Renders the comparison as an aligned text table; invalid runs keep their
/// row and get an explanatory note underneath.
pub fn comparison_table(name: &str, rows: &[ComparisonRow], events: &[f64]) -> String {
    let mut header: Vec<String> = [
        "controller",
        "status",
        "mean|x1|",
        "overshoot",
        "chattering",
        "rms est err",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    for e in events {
        header.push(format!("settle@{e}s"));
    }

    let mut body: Vec<Vec<String>> = Vec::with_capacity(rows.len());
    for row in rows {
        let mut cells = vec![row.controller.to_string(), row.status().to_owned()];
        match &row.metrics {
            Some(m) => {
                cells.push(format!("{:.4}", m.mean_abs_x1));
                cells.push(format!("{:.4}", m.overshoot));
                cells.push(format!("{:.4}", m.chattering_index));
                cells.push(
                    m.rms_estimation_error
                        .map_or_else(|| "-".to_owned(), |v| format!("{v:.4}")),
                );
                for e in events {
                    let cell = settle_cell(m, *e);
                    cells.push(if cell.is_empty() {
                        "-".to_owned()
                    } else {
                        cell
                    });
                }
            }
            None => cells.extend(std::iter::repeat_n("-".to_owned(), 4 + events.len())),
        }
        body.push(cells);
    }

    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in &body {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let render = |cells: &[String]| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == 0 {
                    format!("{c:<width$}", width = widths[i])
                } else {
                    format!("{c:>width$}", width = widths[i])
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
    };

    let mut out = format!("comparison for {name}\n");
    out.push_str(&render(&header));
    out.push('\n');
    out.push_str(
        &widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("  "),
    );
    out.push('\n');
    for row in &body {
        out.push_str(&render(row));
        out.push('\n');
    }
    for row in rows {
        if let Some(err) = &row.error {
            out.push_str(&format!("note: {} was not run: {err}\n", row.controller));
        }
    }
    out
}

fn describe_profile(profile: &DisturbanceProfile<f64>) -> String {
    profile
        .segments
        .iter()
        .map(|seg| {
            let what = match &seg.kind {
                SegmentKind::Zero => "zero".to_owned(),
                SegmentKind::Step { level } => format!("step to {level}"),
                SegmentKind::Multisine {
                    amplitude,
                    frequencies,
                } => {
                    let tones = frequencies
                        .iter()
                        .map(|f| format!("sin {f}t"))
                        .collect::<Vec<_>>()
                        .join(" + ");
                    format!("{amplitude} * ({tones})")
                }
            };
            format!("{}s: {what}", seg.start)
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Multi-line parameter listing for one preset.
pub fn preset_table(cfg: &ScenarioConfig) -> String {
    let mut pairs: Vec<(&str, String)> = vec![
        ("controller", cfg.controller.to_string()),
        ("lambda", cfg.lambda.to_string()),
        ("k", cfg.k.to_string()),
        (
            "observer_gain",
            format!("[{}, {}]", cfg.observer_gain[0], cfg.observer_gain[1]),
        ),
        ("filter_bandwidth", cfg.filter_bandwidth.to_string()),
        (
            "nfs",
            format!(
                "{}x{} rules, centers in [{}, {}], width {}, rates {} / {}",
                cfg.nfs.rules_in1,
                cfg.nfs.rules_in2,
                cfg.nfs.center_range[0],
                cfg.nfs.center_range[1],
                cfg.nfs.sigma_init,
                cfg.nfs.alpha1,
                cfg.nfs.alpha2
            ),
        ),
        ("disturbance", describe_profile(&cfg.disturbance)),
        ("x0", format!("[{}, {}]", cfg.x0[0], cfg.x0[1])),
        ("dt", cfg.dt.to_string()),
        ("duration", cfg.duration.to_string()),
        ("integrator", cfg.integrator.to_string()),
        ("settle_band", cfg.settle_band.to_string()),
    ];
    if let Some(width) = cfg.boundary_layer {
        pairs.push(("boundary_layer", width.to_string()));
    }

    let mut out = format!("{}\n", cfg.name);
    for (key, value) in pairs {
        out.push_str(&format!("  {key:<18}{value}\n"));
    }
    out
}
