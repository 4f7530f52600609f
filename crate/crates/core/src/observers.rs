//! Disturbance observers: a basic nonlinear observer and a self-learning
//! extension.
//!
//! Both estimate the scalar disturbance `d` acting on the plant through the
//! gain vector `z` returned by [`PlantDynamics::disturbance_gain`]. The basic
//! observer integrates an internal state `p` so that `d_hat = p + l . x`
//! obeys `d_hat' = (l . z) * (d - d_hat)`: a first-order lag toward the true
//! disturbance with rate `l . z`. That leaves a steady tracking lag of
//! `d' / (l . z)` under a drifting disturbance.
//!
//! The self-learning observer runs the same structure but injects a learned
//! correction into the estimate dynamics:
//! `d_hat' = (l . z) * (d - d_hat) + (tau_c - tau_n)`, where `tau_c` is a
//! filtered reconstruction of the estimation-error dynamics and `tau_n` is
//! the output of a fuzzy system trained online to absorb `tau_c`. As the
//! fuzzy system learns, `tau_c` shrinks toward zero and the correction keeps
//! compensating the disturbance rate, which removes the lag of the basic
//! observer.
//!
//! Discretization detail that the tests rely on: each advance consumes the
//! plant sample from the previous step, the same pair the plant integrator
//! consumed, so under explicit Euler the estimate error contracts by exactly
//! `(1 - (l . z) * dt)` per step and stays at machine zero when no
//! disturbance acts.

use crate::config::IntegratorKind;
use crate::model::{PlantDynamics, PlantState};
use crate::neurofuzzy::NfsParameters;
use crate::Real;

/// RK4 growth factor for one step of `y' = lambda * y`, with `h = lambda*dt`.
fn rk4_decay<T: Real>(h: T) -> T {
    let one = T::one();
    one + h * (one + h * (T::of(0.5) + h * (T::of(1.0 / 6.0) + h * T::of(1.0 / 24.0))))
}

/// RK4 companion factor for constant forcing: one step of
/// `y' = lambda * y + q` adds `q * rk4_phi(h, dt)` with `h = lambda*dt`.
fn rk4_phi<T: Real>(h: T, dt: T) -> T {
    dt * (T::one() + h * (T::of(0.5) + h * (T::of(1.0 / 6.0) + h * T::of(1.0 / 24.0))))
}

/// First-order filtered differentiator: `y = n * (v - w)`, `w' = y`. The
/// output approximates `dv/dt` below the bandwidth `n` and rolls off above
/// it, so it stays usable on stepwise inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilteredDifferentiator<T> {
    pub n: T,
    pub w: T,
}

impl<T: Real> FilteredDifferentiator<T> {
    pub fn new(n: T) -> Self {
        Self { n, w: T::zero() }
    }

    /// Emits the rate estimate for input `v`, then advances the internal
    /// tracker one step.
    pub fn update(&mut self, v: T, scheme: IntegratorKind, dt: T) -> T {
        let y = self.n * (v - self.w);
        match scheme {
            IntegratorKind::Euler => self.w += dt * y,
            IntegratorKind::Rk4 => {
                let h = -self.n * dt;
                self.w = self.w * rk4_decay(h) + self.n * v * rk4_phi(h, dt);
            }
        }
        y
    }
}

/// Combines the filtered estimate rate and acceleration into the learning
/// target: `accel + gain * rate`. When the estimation error settles, both
/// inputs settle and the target vanishes.
pub fn conventional_estimation_law<T: Real>(rate: T, accel: T, gain: T) -> T {
    accel + gain * rate
}

/// Basic disturbance observer: internal state `p` plus the previous plant
/// sample it advances from.
#[derive(Clone, Debug, PartialEq)]
pub struct BndoState<T> {
    pub p: T,
    pub l: [T; 2],
    prev: Option<PlantState<T>>,
}

impl<T: Real> BndoState<T> {
    /// Starts the observer at `p = -(l . x0)` so the very first estimate is
    /// exactly zero.
    pub fn new(l: [T; 2], x0: &PlantState<T>) -> Self {
        Self {
            p: -(l[0] * x0.x1 + l[1] * x0.x2),
            l,
            prev: None,
        }
    }

    /// Advances one step and returns the disturbance estimate at the current
    /// sample. `u` is the control that was applied since the previous sample
    /// (ignored on the first call, which performs no advance).
    pub fn update<P: PlantDynamics<T>>(
        &mut self,
        x: &PlantState<T>,
        plant: &P,
        u: T,
        scheme: IntegratorKind,
        dt: T,
    ) -> T {
        self.update_with(x, plant, u, T::zero(), scheme, dt).0
    }

    /// Advance with an additive forcing `extra` on the estimate dynamics.
    /// Returns the estimate and the increment by which `extra` entered it,
    /// which differs between integration schemes.
    fn update_with<P: PlantDynamics<T>>(
        &mut self,
        x: &PlantState<T>,
        plant: &P,
        u: T,
        extra: T,
        scheme: IntegratorKind,
        dt: T,
    ) -> (T, T) {
        let mut injected = T::zero();
        if let Some(prev) = self.prev {
            let z = plant.disturbance_gain();
            let lz = self.l[0] * z[0] + self.l[1] * z[1];
            let lx = self.l[0] * prev.x1 + self.l[1] * prev.x2;
            let lg = self.l[0] * prev.x2
                + self.l[1] * (plant.drift(&prev) + plant.input_gain(&prev) * u);
            let forcing = -(lz * lx + lg) + extra;
            match scheme {
                IntegratorKind::Euler => {
                    self.p += dt * (-lz * self.p + forcing);
                    injected = dt * extra;
                }
                IntegratorKind::Rk4 => {
                    let h = -lz * dt;
                    let phi = rk4_phi(h, dt);
                    self.p = self.p * rk4_decay(h) + forcing * phi;
                    injected = extra * phi;
                }
            }
        }
        let d_hat = self.p + self.l[0] * x.x1 + self.l[1] * x.x2;
        self.prev = Some(*x);
        (d_hat, injected)
    }
}

/// Everything the self-learning observer produces in one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SldoOutput<T> {
    /// Learned disturbance estimate.
    pub d_hat_sl: T,
    /// Backward difference of the estimate over the last step; zero on the
    /// first. Multiplying it by `dt` recovers the per-step increment
    /// exactly.
    pub d_hat_sl_rate: T,
    /// Estimate of the plain observer run alongside on the same samples.
    pub d_hat_bn: T,
    /// Learning target reconstructed from the filtered error dynamics.
    pub tau_c: T,
    /// Fuzzy-system output trained to absorb `tau_c`.
    pub tau_n: T,
    /// Training signal driving the fuzzy adaptation (equal to `tau_c`).
    pub eta: T,
    /// Filtered rate of the estimate's error-driven part.
    pub xi1: T,
    /// Filtered rate of `xi1`.
    pub xi2: T,
}

/// Self-learning disturbance observer. Holds the corrected observer, a plain
/// companion for comparison, the two cascaded differentiators, and the fuzzy
/// system.
#[derive(Clone, Debug, PartialEq)]
pub struct SldoState<T> {
    conventional: BndoState<T>,
    companion: BndoState<T>,
    diff1: FilteredDifferentiator<T>,
    diff2: FilteredDifferentiator<T>,
    pub nfs: NfsParameters<T>,
    /// Correction injected on the next advance: last step's `tau_c - tau_n`.
    correction: T,
    /// Running total of injected correction, tracked exactly as the
    /// integrator applied it. Subtracting it from the estimate before
    /// differentiation strips the injected part, leaving only the
    /// error-driven motion for the filters to see.
    injected: T,
    prev_xi2: Option<T>,
    prev_d_hat: Option<T>,
}

impl<T: Real> SldoState<T> {
    pub fn new(l: [T; 2], x0: &PlantState<T>, filter_bandwidth: T, nfs: NfsParameters<T>) -> Self {
        Self {
            conventional: BndoState::new(l, x0),
            companion: BndoState::new(l, x0),
            diff1: FilteredDifferentiator::new(filter_bandwidth),
            diff2: FilteredDifferentiator::new(filter_bandwidth),
            nfs,
            correction: T::zero(),
            injected: T::zero(),
            prev_xi2: None,
            prev_d_hat: None,
        }
    }

    /// Advances both observers, the filter cascade, and one adaptation step
    /// of the fuzzy system. `u` is the control applied since the previous
    /// sample.
    pub fn update<P: PlantDynamics<T>>(
        &mut self,
        x: &PlantState<T>,
        plant: &P,
        u: T,
        scheme: IntegratorKind,
        dt: T,
    ) -> SldoOutput<T> {
        let (d_hat_bn, _) = self
            .companion
            .update_with(x, plant, u, T::zero(), scheme, dt);
        let (d_hat_sl, injected_inc) =
            self.conventional
                .update_with(x, plant, u, self.correction, scheme, dt);
        self.injected += injected_inc;

        let z = plant.disturbance_gain();
        let lz = self.conventional.l[0] * z[0] + self.conventional.l[1] * z[1];

        let xi1 = self.diff1.update(d_hat_sl - self.injected, scheme, dt);
        let xi2 = self.diff2.update(xi1, scheme, dt);
        let tau_c = conventional_estimation_law(xi1, xi2, lz);
        let eta = tau_c;
        let tau_n = self.nfs.forward(xi1, xi2).tau_n;
        let xi2_rate = match self.prev_xi2 {
            Some(prev) => (xi2 - prev) / dt,
            None => T::zero(),
        };
        self.nfs.adapt(xi1, xi2, xi2, xi2_rate, eta, dt);
        self.correction = tau_c - tau_n;

        let d_hat_sl_rate = match self.prev_d_hat {
            Some(prev) => (d_hat_sl - prev) / dt,
            None => T::zero(),
        };
        self.prev_xi2 = Some(xi2);
        self.prev_d_hat = Some(d_hat_sl);

        SldoOutput {
            d_hat_sl,
            d_hat_sl_rate,
            d_hat_bn,
            tau_c,
            tau_n,
            eta,
            xi1,
            xi2,
        }
    }
}
