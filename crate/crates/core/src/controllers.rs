//! The four control laws.
//!
//! Every law builds a scalar sliding surface `s` from the state (and, for the
//! observer-based variants, the disturbance estimate), then applies
//! `u = -b(x)^-1 * (feedback terms + k * sgn(s))`. Driving `s` to zero puts
//! the closed loop on a manifold where `x1` obeys a simple first-order law:
//!
//! * plain SMC leaves a steady offset `d / lambda` under a constant
//!   disturbance,
//! * integral SMC removes that offset but reacts slowly,
//! * the observer-based laws cancel the estimate directly, so their residual
//!   is the estimation error rather than the disturbance itself.

use crate::model::{PlantDynamics, PlantState};
use crate::{sgn, Real};

/// Sliding-surface slope and switching gain shared by all four laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControllerGains<T> {
    /// Slope of the sliding surface; the on-manifold decay rate of `x1`.
    pub lambda: T,
    /// Switching gain multiplying the discontinuous term.
    pub k: T,
    /// Optional boundary-layer half-width: when set, the discontinuous
    /// `sgn(s)` is replaced by the saturation `clamp(s / width, -1, 1)`.
    /// Off (`None`) in every benchmark configuration, since chattering
    /// behavior is itself one of the measured outputs.
    pub boundary_layer: Option<T>,
}

impl<T: Real> ControllerGains<T> {
    pub fn new(lambda: T, k: T) -> Self {
        Self {
            lambda,
            k,
            boundary_layer: None,
        }
    }

    fn switch(&self, s: T) -> T {
        match self.boundary_layer {
            Some(w) if w > T::zero() => (s / w).max(-T::one()).min(T::one()),
            _ => sgn(s),
        }
    }
}

/// Running integral of `x1`, the extra state of the integral controller.
/// Advanced by the simulation loop with the same integrator as the plant.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IsmcState<T> {
    pub integral: T,
}

/// Control value and the surface it was computed from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlOutput<T> {
    pub u: T,
    pub s: T,
}

/// Plain sliding-mode control: `s = x2 + lambda*x1`.
pub fn smc_step<T: Real, P: PlantDynamics<T>>(
    x: &PlantState<T>,
    plant: &P,
    g: &ControllerGains<T>,
) -> ControlOutput<T> {
    let s = x.x2 + g.lambda * x.x1;
    let u = -(plant.drift(x) + g.lambda * x.x2 + g.k * g.switch(s)) / plant.input_gain(x);
    ControlOutput { u, s }
}

/// Integral sliding-mode control: `s = x2 + 2*lambda*x1 + lambda^2 * ∫x1`.
pub fn ismc_step<T: Real, P: PlantDynamics<T>>(
    x: &PlantState<T>,
    ist: &IsmcState<T>,
    plant: &P,
    g: &ControllerGains<T>,
) -> ControlOutput<T> {
    let two = T::of(2.0);
    let s = x.x2 + two * g.lambda * x.x1 + g.lambda * g.lambda * ist.integral;
    let u =
        -(plant.drift(x) + two * g.lambda * x.x2 + g.lambda * g.lambda * x.x1 + g.k * g.switch(s))
            / plant.input_gain(x);
    ControlOutput { u, s }
}

/// SMC with a disturbance estimate folded into the surface:
/// `s = x2 + lambda*x1 + d_hat`. With an exact estimate the surface dynamics
/// see no disturbance at all.
pub fn smc_bndo_step<T: Real, P: PlantDynamics<T>>(
    x: &PlantState<T>,
    d_hat: T,
    plant: &P,
    g: &ControllerGains<T>,
) -> ControlOutput<T> {
    let s = x.x2 + g.lambda * x.x1 + d_hat;
    let u = -(plant.drift(x) + g.lambda * (x.x2 + d_hat) + g.k * g.switch(s)) / plant.input_gain(x);
    ControlOutput { u, s }
}

/// SMC driven by the self-learning observer: same surface as
/// [`smc_bndo_step`] plus a feedforward of the estimated disturbance rate,
/// which keeps the surface derivative equal to
/// `-k*sgn(s) + lambda*(d - d_hat)` even while the estimate is moving.
pub fn smc_sldo_step<T: Real, P: PlantDynamics<T>>(
    x: &PlantState<T>,
    d_hat: T,
    d_hat_rate: T,
    plant: &P,
    g: &ControllerGains<T>,
) -> ControlOutput<T> {
    let s = x.x2 + g.lambda * x.x1 + d_hat;
    let u = -(plant.drift(x) + g.lambda * (x.x2 + d_hat) + d_hat_rate + g.k * g.switch(s))
        / plant.input_gain(x);
    ControlOutput { u, s }
}
