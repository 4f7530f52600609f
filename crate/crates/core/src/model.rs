//! Plant definitions and disturbance profiles.
//!
//! The system shape is a second-order plant
//!
//! ```text
//! x1' = x2        + z1 * d(t)
//! x2' = a(x) + b(x) * u + z2 * d(t)
//! ```
//!
//! where `z = [z1, z2]` routes the scalar disturbance into the states. The
//! shipped benchmark uses `z = [1, 0]`: the disturbance enters the first
//! state equation while the control enters the second, so the two never share
//! a channel and plain feedback cannot cancel the disturbance exactly.

use serde::{Deserialize, Serialize};

use crate::Real;

/// Plant state sample: the two states plus the simulation time they belong to.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PlantState<T> {
    pub x1: T,
    pub x2: T,
    /// Time in seconds.
    pub t: T,
}

impl<T: Real> PlantState<T> {
    pub fn new(x1: T, x2: T, t: T) -> Self {
        Self { x1, x2, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.t.is_finite()
    }
}

/// Continuous-time plant description used by controllers and observers.
///
/// `input_gain` must stay nonzero on every reachable state: all four control
/// laws divide by it.
pub trait PlantDynamics<T: Real> {
    /// Drift nonlinearity `a(x)` in the second state equation.
    fn drift(&self, x: &PlantState<T>) -> T;

    /// Control gain `b(x)` in the second state equation.
    fn input_gain(&self, x: &PlantState<T>) -> T;

    /// Disturbance routing vector `z`.
    fn disturbance_gain(&self) -> [T; 2];
}

/// The benchmark plant: `a(x) = -x1 - x2 + x2^2 cos(x1) + e^(x1)`, `b = 1`,
/// `z = [1, 0]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BenchmarkPlant;

impl<T: Real> PlantDynamics<T> for BenchmarkPlant {
    fn drift(&self, x: &PlantState<T>) -> T {
        -x.x1 - x.x2 + x.x2 * x.x2 * x.x1.cos() + x.x1.exp()
    }

    fn input_gain(&self, _x: &PlantState<T>) -> T {
        T::one()
    }

    fn disturbance_gain(&self) -> [T; 2] {
        [T::one(), T::zero()]
    }
}

/// State derivative under control `u` and disturbance `d`.
///
/// Returns `[x2 + z1*d, a(x) + b(x)*u + z2*d]`. The caller is responsible for
/// rejecting non-finite results (the simulation loop flags such steps as
/// diverged).
pub fn plant_derivative<T: Real, P: PlantDynamics<T>>(
    x: &PlantState<T>,
    plant: &P,
    u: T,
    d: T,
) -> [T; 2] {
    let z = plant.disturbance_gain();
    [
        x.x2 + z[0] * d,
        plant.drift(x) + plant.input_gain(x) * u + z[1] * d,
    ]
}

/// One piece of a piecewise disturbance definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SegmentKind<T> {
    /// No disturbance.
    Zero,
    /// Constant disturbance of the given level.
    Step { level: T },
    /// `amplitude * (sin(f1*t) + sin(f2*t) + ...)` evaluated at absolute
    /// simulation time.
    Multisine { amplitude: T, frequencies: Vec<T> },
}

/// A segment becomes active at `start` seconds and stays active until the
/// next segment begins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment<T> {
    pub start: T,
    #[serde(flatten)]
    pub kind: SegmentKind<T>,
}

/// Piecewise disturbance profile. Segments are kept sorted by start time;
/// each segment is active on the left-closed interval from its start to the
/// next start, so the value changes exactly at the segment boundary sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DisturbanceProfile<T> {
    pub segments: Vec<Segment<T>>,
}

impl<T: Real> DisturbanceProfile<T> {
    pub fn new(segments: Vec<Segment<T>>) -> Self {
        Self { segments }
    }

    /// True when segment starts are strictly increasing and the first segment
    /// begins at zero (so the profile is defined on all of `t >= 0`).
    pub fn is_well_formed(&self) -> bool {
        if self.segments.is_empty() {
            return false;
        }
        if self.segments[0].start != T::zero() {
            return false;
        }
        self.segments
            .windows(2)
            .all(|w| w[0].start < w[1].start && w[1].start.is_finite())
    }

    /// Disturbance value at time `t`. Total on `t >= 0`: before the first
    /// segment the value is zero.
    pub fn value_at(&self, t: T) -> T {
        let mut active: Option<&Segment<T>> = None;
        for seg in &self.segments {
            if seg.start <= t {
                active = Some(seg);
            } else {
                break;
            }
        }
        match active.map(|s| &s.kind) {
            None | Some(SegmentKind::Zero) => T::zero(),
            Some(SegmentKind::Step { level }) => *level,
            Some(SegmentKind::Multisine {
                amplitude,
                frequencies,
            }) => {
                let mut sum = T::zero();
                for f in frequencies {
                    sum += (*f * t).sin();
                }
                *amplitude * sum
            }
        }
    }

    /// Segment boundaries after t=0 that fall strictly inside the given
    /// duration: the disturbance "events" metrics are computed around.
    pub fn events_within(&self, duration: T) -> Vec<T> {
        self.segments
            .iter()
            .map(|s| s.start)
            .filter(|s| *s > T::zero() && *s < duration)
            .collect()
    }
}
