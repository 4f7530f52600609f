//! Static SVG line plots of a recorded run. Hand-rolled on purpose: the
//! panels are simple polylines and pulling in a drawing stack would buy
//! nothing.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mismatch_smc::{ControllerKind, ScenarioConfig, TrajectoryRecord};

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    y: &'a [f64],
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 42.0;
const MARGIN_BOTTOM: f64 = 52.0;

/// Longest polyline worth emitting; denser series are decimated.
const MAX_POINTS: usize = 1600;

/// Writes the four panels of one run: both states, the control signal, and
/// the disturbance next to whichever estimates the controller used.
pub fn write_plots(
    dir: &Path,
    cfg: &ScenarioConfig,
    tr: &TrajectoryRecord<f64>,
) -> Result<Vec<PathBuf>> {
    let panels: [(&str, &str, Vec<Series>); 4] = [
        (
            "x1",
            "state x1",
            vec![Series {
                label: "x1",
                color: "#2a6fb0",
                y: &tr.x1,
            }],
        ),
        (
            "x2",
            "state x2",
            vec![Series {
                label: "x2",
                color: "#2a6fb0",
                y: &tr.x2,
            }],
        ),
        (
            "u",
            "control input",
            vec![Series {
                label: "u",
                color: "#c23b22",
                y: &tr.u,
            }],
        ),
        (
            "disturbance",
            "disturbance and estimates",
            disturbance_series(cfg, tr),
        ),
    ];

    let mut written = Vec::with_capacity(panels.len());
    for (stem, title, series) in panels {
        let path = dir.join(format!("{}_{stem}.svg", cfg.name));
        let svg = line_plot(&format!("{}: {title}", cfg.name), &tr.t, &series);
        std::fs::write(&path, svg).with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

fn disturbance_series<'a>(cfg: &ScenarioConfig, tr: &'a TrajectoryRecord<f64>) -> Vec<Series<'a>> {
    let mut series = vec![Series {
        label: "d",
        color: "#555555",
        y: &tr.d_true,
    }];
    match cfg.controller {
        ControllerKind::SmcBndo => series.push(Series {
            label: "d_hat",
            color: "#c23b22",
            y: &tr.d_hat_bn,
        }),
        ControllerKind::SmcSldo => {
            series.push(Series {
                label: "d_hat basic",
                color: "#c9a227",
                y: &tr.d_hat_bn,
            });
            series.push(Series {
                label: "d_hat learning",
                color: "#c23b22",
                y: &tr.d_hat_sl,
            });
        }
        ControllerKind::Smc | ControllerKind::Ismc => {}
    }
    series
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if min > max {
        return (0.0, 1.0);
    }
    if min == max {
        return (min - 0.5, max + 0.5);
    }
    (min, max)
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    let magnitude = v.abs();
    if !(1e-3..1e4).contains(&magnitude) {
        return format!("{v:.1e}");
    }
    let text = format!("{v:.3}");
    let trimmed = text.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_owned()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn line_plot(title: &str, t: &[f64], series: &[Series]) -> String {
    let (x_min, x_max) = span(t.iter().copied());
    let (y_lo, y_hi) = span(series.iter().flat_map(|s| s.y.iter().copied()));
    let pad = 0.05 * (y_hi - y_lo);
    let (y_min, y_max) = (y_lo - pad, y_hi + pad);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let map_x = |v: f64| MARGIN_LEFT + (v - x_min) / (x_max - x_min) * plot_w;
    let map_y = |v: f64| MARGIN_TOP + plot_h - (v - y_min) / (y_max - y_min) * plot_h;

    let mut svg = String::with_capacity(16 * 1024);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"system-ui, sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" fill=\"#222\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    ));

    // Gridlines and tick labels.
    for i in 0..=5 {
        let v = x_min + (x_max - x_min) * f64::from(i) / 5.0;
        let x = map_x(v);
        svg.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#dddddd\"/>\n",
            MARGIN_TOP,
            MARGIN_TOP + plot_h
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\" fill=\"#444\">{}</text>\n",
            MARGIN_TOP + plot_h + 18.0,
            fmt_tick(v)
        ));
    }
    for i in 0..=4 {
        let v = y_min + (y_max - y_min) * f64::from(i) / 4.0;
        let y = map_y(v);
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>\n",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" fill=\"#444\">{}</text>\n",
            MARGIN_LEFT - 8.0,
            y + 4.0,
            fmt_tick(v)
        ));
    }
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" \
         fill=\"none\" stroke=\"#333333\"/>\n"
    ));

    // One decimated polyline per series, always keeping the final sample.
    let len = t.len();
    let step = len.div_ceil(MAX_POINTS).max(1);
    for s in series {
        let mut points = String::new();
        let mut push_point = |n: usize| {
            points.push_str(&format!("{:.2},{:.2} ", map_x(t[n]), map_y(s.y[n])));
        };
        for n in (0..len).step_by(step) {
            push_point(n);
        }
        if len > 0 && !(len - 1).is_multiple_of(step) {
            push_point(len - 1);
        }
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            points.trim_end(),
            s.color
        ));
    }

    if series.len() > 1 {
        for (i, s) in series.iter().enumerate() {
            let y = MARGIN_TOP + 16.0 + 18.0 * i as f64;
            let x0 = WIDTH - MARGIN_RIGHT - 170.0;
            svg.push_str(&format!(
                "<line x1=\"{x0:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" \
                 stroke=\"{}\" stroke-width=\"2\"/>\n",
                x0 + 24.0,
                s.color
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"#333\">{}</text>\n",
                x0 + 30.0,
                y + 4.0,
                escape(s.label)
            ));
        }
    }

    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" fill=\"#444\">t [s]</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0
    ));
    svg.push_str("</svg>\n");
    svg
}
