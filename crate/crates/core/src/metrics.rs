//! Summary statistics over a recorded trajectory: tracking quality, settling
//! behavior around disturbance events, and control activity.

use serde::{Deserialize, Serialize};

use crate::simulation::TrajectoryRecord;
use crate::Real;

/// Which estimate column an estimation-error statistic refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateColumn {
    BasicObserver,
    SelfLearning,
}

/// Settling result for one disturbance event. `settled_at` is the first
/// sample time from which `|x1|` stays inside the band until the next event
/// (or the end of the data); it equals the event time when the state never
/// leaves the band, and is absent when the state never settles before the
/// window closes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettlingOutcome<T> {
    pub event: T,
    pub settled_at: Option<T>,
}

/// Aggregate statistics of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics<T> {
    /// Mean of `|x1|` over the whole run.
    pub mean_abs_x1: T,
    /// Largest `|x1|` over the whole run.
    pub overshoot: T,
    /// One entry per disturbance event, in the order given.
    pub settling_times: Vec<SettlingOutcome<T>>,
    /// Mean absolute control increment per step inside the chatter window;
    /// zero when the window holds fewer than two samples.
    pub chattering_index: T,
    /// Root-mean-square disturbance estimation error over the whole run,
    /// when an estimate column was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rms_estimation_error: Option<T>,
}

/// Computes all metrics in one pass over the trajectory.
///
/// `events` are the disturbance change times that settling should be judged
/// around; each event's window extends to the next event or the end of the
/// data. `chatter_window` selects the `t` range (half-open) whose control
/// increments are averaged.
pub fn compute_metrics<T: Real>(
    tr: &TrajectoryRecord<T>,
    events: &[T],
    settle_band: T,
    chatter_window: [T; 2],
    estimate: Option<EstimateColumn>,
) -> RunMetrics<T> {
    let n = tr.len();
    let mut mean_abs_x1 = T::zero();
    let mut overshoot = T::zero();
    if n > 0 {
        let mut sum = T::zero();
        for &v in &tr.x1 {
            let a = v.abs();
            sum += a;
            if a > overshoot {
                overshoot = a;
            }
        }
        mean_abs_x1 = sum / T::of(n as f64);
    }

    let settling_times = events
        .iter()
        .enumerate()
        .map(|(i, &event)| {
            let window_end = events.get(i + 1).copied();
            SettlingOutcome {
                event,
                settled_at: settle_within(tr, event, window_end, settle_band),
            }
        })
        .collect();

    let chattering_index = chattering(tr, chatter_window);

    let rms_estimation_error = estimate.map(|col| {
        let column = match col {
            EstimateColumn::BasicObserver => &tr.d_hat_bn,
            EstimateColumn::SelfLearning => &tr.d_hat_sl,
        };
        rms_error(&tr.d_true, column)
    });

    RunMetrics {
        mean_abs_x1,
        overshoot,
        settling_times,
        chattering_index,
        rms_estimation_error,
    }
}

fn settle_within<T: Real>(
    tr: &TrajectoryRecord<T>,
    event: T,
    window_end: Option<T>,
    band: T,
) -> Option<T> {
    let in_window = |t: T| t >= event && window_end.is_none_or(|end| t < end);
    let idx: Vec<usize> = (0..tr.len()).filter(|&i| in_window(tr.t[i])).collect();
    let (&first, &last_idx) = match (idx.first(), idx.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return None,
    };
    let last_outside = idx.iter().rev().find(|&&i| tr.x1[i].abs() > band).copied();
    match last_outside {
        None => Some(tr.t[first]),
        Some(i) if i == last_idx => None,
        Some(i) => Some(tr.t[i + 1]),
    }
}

fn chattering<T: Real>(tr: &TrajectoryRecord<T>, window: [T; 2]) -> T {
    let mut sum = T::zero();
    let mut count = 0usize;
    let mut prev: Option<T> = None;
    for i in 0..tr.len() {
        let t = tr.t[i];
        if t >= window[0] && t < window[1] {
            if let Some(p) = prev {
                sum += (tr.u[i] - p).abs();
                count += 1;
            }
            prev = Some(tr.u[i]);
        }
    }
    if count == 0 {
        T::zero()
    } else {
        sum / T::of(count as f64)
    }
}

fn rms_error<T: Real>(truth: &[T], estimate: &[T]) -> T {
    if truth.is_empty() {
        return T::zero();
    }
    let mut sum = T::zero();
    for (&d, &e) in truth.iter().zip(estimate) {
        let diff = d - e;
        sum += diff * diff;
    }
    (sum / T::of(truth.len() as f64)).sqrt()
}
