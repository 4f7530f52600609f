//! Closed-loop time stepping: plant, disturbance, controller, and observers
//! wired together on a fixed grid.
//!
//! Step order, which several tests pin down: at each sample the observers
//! first advance using the previous plant sample and the control that was
//! applied since then, the controller then computes the new control from the
//! current state and estimates, the row is logged, and finally the plant
//! integrates to the next sample. The disturbance is evaluated at the sample
//! time (and at substage times for the fourth-order scheme).

use crate::config::{ConfigError, ControllerKind, IntegratorKind, ScenarioConfig};
use crate::controllers::{
    ismc_step, smc_bndo_step, smc_sldo_step, smc_step, ControlOutput, ControllerGains, IsmcState,
};
use crate::model::{plant_derivative, BenchmarkPlant, PlantDynamics, PlantState};
use crate::observers::{BndoState, SldoState};
use crate::Real;

/// Column-oriented log of one run. All columns have equal length; a run cut
/// short by divergence keeps the rows recorded up to the failing step and
/// sets [`diverged`](Self::diverged).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectoryRecord<T> {
    pub t: Vec<T>,
    pub x1: Vec<T>,
    pub x2: Vec<T>,
    pub u: Vec<T>,
    pub s: Vec<T>,
    pub d_true: Vec<T>,
    pub d_hat_bn: Vec<T>,
    pub d_hat_sl: Vec<T>,
    pub tau_c: Vec<T>,
    pub tau_n: Vec<T>,
    pub eta: Vec<T>,
    pub diverged: bool,
}

impl<T: Real> TrajectoryRecord<T> {
    fn with_capacity(n: usize) -> Self {
        Self {
            t: Vec::with_capacity(n),
            x1: Vec::with_capacity(n),
            x2: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            s: Vec::with_capacity(n),
            d_true: Vec::with_capacity(n),
            d_hat_bn: Vec::with_capacity(n),
            d_hat_sl: Vec::with_capacity(n),
            tau_c: Vec::with_capacity(n),
            tau_n: Vec::with_capacity(n),
            eta: Vec::with_capacity(n),
            diverged: false,
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        t: T,
        x1: T,
        x2: T,
        u: T,
        s: T,
        d_true: T,
        d_hat_bn: T,
        d_hat_sl: T,
        tau_c: T,
        tau_n: T,
        eta: T,
    ) {
        self.t.push(t);
        self.x1.push(x1);
        self.x2.push(x2);
        self.u.push(u);
        self.s.push(s);
        self.d_true.push(d_true);
        self.d_hat_bn.push(d_hat_bn);
        self.d_hat_sl.push(d_hat_sl);
        self.tau_c.push(tau_c);
        self.tau_n.push(tau_n);
        self.eta.push(eta);
    }
}

/// Runs one closed-loop simulation described by `cfg` at scalar precision
/// `T`. Configuration problems come back as an error; numerical blow-up does
/// not, it truncates the log and sets the `diverged` flag instead, so the
/// partial trajectory stays available for inspection.
pub fn simulate<T: Real>(cfg: &ScenarioConfig) -> Result<TrajectoryRecord<T>, ConfigError> {
    cfg.validate()?;

    let steps = (cfg.duration / cfg.dt).round() as usize;
    let dt = T::of(cfg.dt);
    let plant = BenchmarkPlant;
    let gains = ControllerGains {
        lambda: T::of(cfg.lambda),
        k: T::of(cfg.k),
        boundary_layer: cfg.boundary_layer.map(T::of),
    };
    let l = [T::of(cfg.observer_gain[0]), T::of(cfg.observer_gain[1])];

    let mut x = PlantState::new(T::of(cfg.x0[0]), T::of(cfg.x0[1]), T::zero());
    let mut ismc = IsmcState::default();
    let mut u_prev = T::zero();
    let mut bndo = match cfg.controller {
        ControllerKind::SmcBndo => Some(BndoState::new(l, &x)),
        _ => None,
    };
    let mut sldo = match cfg.controller {
        ControllerKind::SmcSldo => Some(SldoState::new(
            l,
            &x,
            T::of(cfg.filter_bandwidth),
            cfg.nfs.to_parameters(),
        )),
        _ => None,
    };

    let mut tr = TrajectoryRecord::with_capacity(steps + 1);
    let x1_guard = T::of(1e3);
    let x2_guard = T::of(1e6);

    for n in 0..=steps {
        let t_f64 = n as f64 * cfg.dt;
        let t = T::of(t_f64);
        let d = T::of(cfg.disturbance.value_at(t_f64));

        let mut d_hat_bn = T::zero();
        let mut d_hat_sl = T::zero();
        let mut d_hat_sl_rate = T::zero();
        let mut tau_c = T::zero();
        let mut tau_n = T::zero();
        let mut eta = T::zero();
        if let Some(obs) = bndo.as_mut() {
            d_hat_bn = obs.update(&x, &plant, u_prev, cfg.integrator, dt);
        }
        if let Some(obs) = sldo.as_mut() {
            let out = obs.update(&x, &plant, u_prev, cfg.integrator, dt);
            d_hat_bn = out.d_hat_bn;
            d_hat_sl = out.d_hat_sl;
            d_hat_sl_rate = out.d_hat_sl_rate;
            tau_c = out.tau_c;
            tau_n = out.tau_n;
            eta = out.eta;
        }

        if !(x.x1.is_finite() && x.x2.is_finite()) || x.x1.abs() > x1_guard || x.x2.abs() > x2_guard
        {
            tr.diverged = true;
            break;
        }

        let out: ControlOutput<T> = match cfg.controller {
            ControllerKind::Smc => smc_step(&x, &plant, &gains),
            ControllerKind::Ismc => ismc_step(&x, &ismc, &plant, &gains),
            ControllerKind::SmcBndo => smc_bndo_step(&x, d_hat_bn, &plant, &gains),
            ControllerKind::SmcSldo => smc_sldo_step(&x, d_hat_sl, d_hat_sl_rate, &plant, &gains),
        };
        if !(out.u.is_finite() && out.s.is_finite()) {
            tr.diverged = true;
            break;
        }

        tr.push(
            t, x.x1, x.x2, out.u, out.s, d, d_hat_bn, d_hat_sl, tau_c, tau_n, eta,
        );

        if n < steps {
            match cfg.integrator {
                IntegratorKind::Euler => {
                    let der = plant_derivative(&x, &plant, out.u, d);
                    ismc.integral += dt * x.x1;
                    x.x1 += dt * der[0];
                    x.x2 += dt * der[1];
                }
                IntegratorKind::Rk4 => {
                    advance_rk4(&mut x, &mut ismc, &plant, out.u, cfg, t_f64, dt);
                }
            }
            x.t = T::of((n + 1) as f64 * cfg.dt);
            u_prev = out.u;
            if !(x.x1.is_finite() && x.x2.is_finite()) {
                tr.diverged = true;
                break;
            }
        }
    }

    Ok(tr)
}

/// One fourth-order step of the plant state augmented with the integral
/// controller state. The control is held over the step; the disturbance is
/// sampled at the substage times.
fn advance_rk4<T: Real, P: PlantDynamics<T>>(
    x: &mut PlantState<T>,
    ismc: &mut IsmcState<T>,
    plant: &P,
    u: T,
    cfg: &ScenarioConfig,
    t_f64: f64,
    dt: T,
) {
    let d0 = T::of(cfg.disturbance.value_at(t_f64));
    let dm = T::of(cfg.disturbance.value_at(t_f64 + 0.5 * cfg.dt));
    let d1 = T::of(cfg.disturbance.value_at(t_f64 + cfg.dt));

    let deriv = |y: [T; 3], d: T| -> [T; 3] {
        let state = PlantState::new(y[0], y[1], x.t);
        let der = plant_derivative(&state, plant, u, d);
        [der[0], der[1], y[0]]
    };
    let add = |y: [T; 3], k: [T; 3], h: T| -> [T; 3] {
        [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]]
    };

    let y0 = [x.x1, x.x2, ismc.integral];
    let half = dt * T::of(0.5);
    let k1 = deriv(y0, d0);
    let k2 = deriv(add(y0, k1, half), dm);
    let k3 = deriv(add(y0, k2, half), dm);
    let k4 = deriv(add(y0, k3, dt), d1);

    let sixth = dt / T::of(6.0);
    let two = T::of(2.0);
    x.x1 = y0[0] + sixth * (k1[0] + two * k2[0] + two * k3[0] + k4[0]);
    x.x2 = y0[1] + sixth * (k1[1] + two * k2[1] + two * k3[1] + k4[1]);
    ismc.integral = y0[2] + sixth * (k1[2] + two * k2[2] + two * k3[2] + k4[2]);
}
