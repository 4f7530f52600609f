//! Randomized and structural properties of the numerical building blocks.

use proptest::prelude::*;

use mismatch_smc::controllers::{smc_bndo_step, smc_sldo_step, smc_step};
use mismatch_smc::{
    output_rate_check, simulate, BenchmarkPlant, BndoState, ControllerGains, ControllerKind,
    IntegratorKind, NfsParameters, NfsSettings, PlantDynamics, PlantState, RateSample,
    ScenarioConfig, TrajectoryRecord,
};

/// Drift-free unit-gain plant whose disturbance enters the first channel;
/// with zero control the second state stays put and the first integrates
/// the disturbance, which isolates the observer dynamics.
struct IntegratorPlant;

impl PlantDynamics<f64> for IntegratorPlant {
    fn drift(&self, _x: &PlantState<f64>) -> f64 {
        0.0
    }
    fn input_gain(&self, _x: &PlantState<f64>) -> f64 {
        1.0
    }
    fn disturbance_gain(&self) -> [f64; 2] {
        [1.0, 0.0]
    }
}

fn bitwise(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn records_identical(a: &TrajectoryRecord<f64>, b: &TrajectoryRecord<f64>) -> bool {
    a.diverged == b.diverged
        && bitwise(&a.t, &b.t)
        && bitwise(&a.x1, &b.x1)
        && bitwise(&a.x2, &b.x2)
        && bitwise(&a.u, &b.u)
        && bitwise(&a.s, &b.s)
        && bitwise(&a.d_true, &b.d_true)
        && bitwise(&a.d_hat_bn, &b.d_hat_bn)
        && bitwise(&a.d_hat_sl, &b.d_hat_sl)
        && bitwise(&a.tau_c, &b.tau_c)
        && bitwise(&a.tau_n, &b.tau_n)
        && bitwise(&a.eta, &b.eta)
}

proptest! {
    /// The normalized firing weights always form a convex combination, even
    /// far outside the membership grid where every raw firing underflows.
    #[test]
    fn firing_weights_always_sum_to_one(
        xi1 in -100.0f64..100.0,
        xi2 in -100.0f64..100.0,
        c_shift in -5.0f64..5.0,
        sigma_scale in 0.01f64..100.0,
    ) {
        let mut p: NfsParameters<f64> = NfsSettings::default().to_parameters();
        for c in p.c1.iter_mut().chain(p.c2.iter_mut()) {
            *c += c_shift;
        }
        for s in p.sigma1.iter_mut().chain(p.sigma2.iter_mut()) {
            *s *= sigma_scale;
        }
        let w = p.forward(xi1, xi2).w_tilde;
        let sum: f64 = w.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12, "sum = {sum}");
        prop_assert!(w.iter().all(|v| *v >= 0.0 && v.is_finite()));
    }

    /// No adaptation sequence can push a membership width out of its clamp
    /// or any parameter to a non-finite value.
    #[test]
    fn widths_and_outputs_stay_finite_under_random_adaptation(
        seq in prop::collection::vec(
            (-10.0f64..10.0, -10.0f64..10.0, -100.0f64..100.0, -100.0f64..100.0, -5.0f64..5.0),
            1..100,
        ),
        dt in 1e-4f64..1e-2,
    ) {
        let mut p: NfsParameters<f64> = NfsSettings::default().to_parameters();
        for (xi1, xi2, r1, r2, eta) in seq {
            p.adapt(xi1, xi2, r1, r2, eta, dt);
            for s in p.sigma1.iter().chain(&p.sigma2) {
                prop_assert!(*s >= p.sigma_min && *s <= p.sigma_max, "width {s}");
            }
            prop_assert!(p.c1.iter().chain(&p.c2).all(|v| v.is_finite()));
            prop_assert!(p.f.iter().all(|v| v.is_finite()));
            prop_assert!(p.forward(xi1, xi2).tau_n.is_finite());
        }
    }

    /// Feeding zero estimates into the observer-based control laws gives
    /// bit for bit the plain law, so the observers can only add information.
    #[test]
    fn zero_estimates_reduce_to_the_plain_controller(
        x1 in -5.0f64..5.0,
        x2 in -5.0f64..5.0,
        lambda in 0.1f64..20.0,
        k in 0.0f64..20.0,
    ) {
        let x = PlantState::new(x1, x2, 0.0);
        let plant = BenchmarkPlant;
        let gains = ControllerGains::new(lambda, k);
        let base = smc_step(&x, &plant, &gains);
        let with_basic = smc_bndo_step(&x, 0.0, &plant, &gains);
        let with_learning = smc_sldo_step(&x, 0.0, 0.0, &plant, &gains);
        prop_assert_eq!(base.u.to_bits(), with_basic.u.to_bits());
        prop_assert_eq!(base.s.to_bits(), with_basic.s.to_bits());
        prop_assert_eq!(base.u.to_bits(), with_learning.u.to_bits());
        prop_assert_eq!(base.s.to_bits(), with_learning.s.to_bits());
    }

    /// While no guard engages and the training signal holds its sign, the
    /// learned output moves at the nominal rate regardless of the exact
    /// input wave shapes, as long as the supplied rates match the signals.
    #[test]
    fn learned_output_rate_matches_the_law_on_consistent_streams(
        a1 in 0.05f64..0.15,
        w1 in 0.5f64..4.0,
        o1 in 0.2f64..0.45,
        a2 in 0.05f64..0.15,
        w2 in 0.5f64..4.0,
        o2 in 0.2f64..0.45,
        eta in prop::sample::select(vec![-0.7f64, 0.4, 1.5]),
    ) {
        let dt = 1e-3;
        let params: NfsParameters<f64> = NfsSettings::default().to_parameters();
        let samples: Vec<RateSample<f64>> = (0..200)
            .map(|n| {
                let t = n as f64 * dt;
                RateSample {
                    xi1: o1 + a1 * (w1 * t).sin(),
                    xi1_rate: a1 * w1 * (w1 * t).cos(),
                    xi2: o2 + a2 * (w2 * t).cos(),
                    xi2_rate: -a2 * w2 * (w2 * t).sin(),
                    eta,
                }
            })
            .collect();
        let dev = output_rate_check(&params, &samples, dt);
        match dev {
            Ok(d) => prop_assert!(d < 0.05 * params.alpha2, "deviation {d}"),
            Err(e) => prop_assert!(false, "no valid intervals: {e}"),
        }
    }

    /// The basic observer's estimation error decays exponentially at the
    /// design rate for any admissible gain and step size.
    #[test]
    fn estimation_error_contracts_at_the_design_rate(
        lz in 1.0f64..50.0,
        h in 1e-3f64..0.05,
        level in 0.05f64..1.0,
    ) {
        let dt = h / lz;
        let plant = IntegratorPlant;
        let mut x = PlantState::new(0.2, 0.0, 0.0);
        let mut obs = BndoState::new([lz, 0.0], &x);
        let steps = ((2.0 / h).ceil() as usize).min(5000);
        let mut fit: Vec<(f64, f64)> = Vec::with_capacity(steps);
        for n in 0..=steps {
            let d_hat = obs.update(&x, &plant, 0.0, IntegratorKind::Euler, dt);
            let e = (level - d_hat).abs();
            if n >= 1 {
                fit.push((n as f64 * dt, e.ln()));
            }
            x.x1 += dt * level;
            x.t = (n + 1) as f64 * dt;
        }
        let inv_n = 1.0 / fit.len() as f64;
        let t_mean: f64 = fit.iter().map(|p| p.0).sum::<f64>() * inv_n;
        let y_mean: f64 = fit.iter().map(|p| p.1).sum::<f64>() * inv_n;
        let slope = fit
            .iter()
            .map(|p| (p.0 - t_mean) * (p.1 - y_mean))
            .sum::<f64>()
            / fit
                .iter()
                .map(|p| (p.0 - t_mean) * (p.0 - t_mean))
                .sum::<f64>();
        prop_assert!(
            (slope + lz).abs() <= 0.05 * lz,
            "slope {slope} vs design rate {}",
            -lz
        );
    }
}

/// Every controller and scenario combination replays bit for bit.
#[test]
fn every_run_is_bit_reproducible() {
    for scenario in [ScenarioConfig::scenario1(), ScenarioConfig::scenario2()] {
        for controller in ControllerKind::ALL {
            let mut cfg = scenario.clone();
            cfg.controller = controller;
            cfg.duration = 1.0;
            let a = simulate::<f64>(&cfg).expect("valid preset");
            let b = simulate::<f64>(&cfg).expect("valid preset");
            assert!(
                records_identical(&a, &b),
                "{} with {controller} differed between reruns",
                cfg.name
            );
        }
    }
}

/// Halving the step leaves each controller's state trajectory essentially
/// unchanged, so the runs measure the dynamics rather than the integrator.
#[test]
fn halving_the_step_preserves_the_trajectory() {
    for controller in ControllerKind::ALL {
        let mut coarse_cfg = ScenarioConfig::scenario1();
        coarse_cfg.controller = controller;
        coarse_cfg.duration = 15.0;
        let mut fine_cfg = coarse_cfg.clone();
        fine_cfg.dt = coarse_cfg.dt / 2.0;

        let coarse = simulate::<f64>(&coarse_cfg).expect("valid preset");
        let fine = simulate::<f64>(&fine_cfg).expect("valid preset");
        assert_eq!(fine.len(), 2 * coarse.len() - 1);

        let peak = coarse.x1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst = 0.0f64;
        for (n, c) in coarse.x1.iter().enumerate() {
            worst = worst.max((c - fine.x1[2 * n]).abs());
        }
        assert!(
            worst <= 0.05 * peak,
            "{controller}: step halving moved x1 by {worst} against a peak of {peak}"
        );
    }
}
