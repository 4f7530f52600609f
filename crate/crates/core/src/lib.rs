//! Simulation library for sliding-mode control of second-order plants whose
//! disturbance enters a different state channel than the control input.
//!
//! The crate provides four controllers (plain SMC, integral SMC, and SMC
//! driven by either a basic or a self-learning disturbance observer), the
//! observers themselves, the online-trained fuzzy component of the
//! self-learning observer, a fixed-step closed-loop simulation engine, and
//! the metrics used to compare the controllers.
//!
//! All numeric code is generic over the scalar type through [`Real`];
//! `F64`-suffixed aliases at the crate root cover the common
//! double-precision case.

pub mod config;
pub mod controllers;
pub mod metrics;
pub mod model;
pub mod neurofuzzy;
pub mod observers;
pub mod simulation;

use core::fmt::{Debug, Display};
use core::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Scalar abstraction for the numeric core: any IEEE-style float works
/// (`f32`, `f64`). Constants enter generic code through [`Real::of`].
pub trait Real:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into the scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant must be representable in the scalar type")
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

pub use config::{ControllerKind, IntegratorKind, NfsSettings, ScenarioConfig};
pub use controllers::{ControlOutput, ControllerGains, IsmcState};
pub use metrics::{compute_metrics, EstimateColumn, RunMetrics, SettlingOutcome};
pub use model::{
    BenchmarkPlant, DisturbanceProfile, PlantDynamics, PlantState, Segment, SegmentKind,
};
pub use neurofuzzy::{output_rate_check, NfsForwardResult, NfsParameters, RateSample};
pub use observers::{BndoState, FilteredDifferentiator, SldoOutput, SldoState};
pub use simulation::{simulate, TrajectoryRecord};

/// Double-precision aliases for the generic core types.
pub type PlantStateF64 = model::PlantState<f64>;
pub type DisturbanceProfileF64 = model::DisturbanceProfile<f64>;
pub type ControllerGainsF64 = controllers::ControllerGains<f64>;
pub type ControlOutputF64 = controllers::ControlOutput<f64>;
pub type IsmcStateF64 = controllers::IsmcState<f64>;
pub type BndoStateF64 = observers::BndoState<f64>;
pub type SldoStateF64 = observers::SldoState<f64>;
pub type FilteredDifferentiatorF64 = observers::FilteredDifferentiator<f64>;
pub type NfsParametersF64 = neurofuzzy::NfsParameters<f64>;
pub type TrajectoryRecordF64 = simulation::TrajectoryRecord<f64>;
pub type RunMetricsF64 = metrics::RunMetrics<f64>;

/// Sign function with `sgn(0) = 0`, the convention used by every switching
/// term in the crate. `f64::signum` maps zero to one, which would inject a
/// spurious control action at an exact equilibrium.
pub fn sgn<T: Real>(v: T) -> T {
    if v == T::zero() {
        T::zero()
    } else {
        v.signum()
    }
}
