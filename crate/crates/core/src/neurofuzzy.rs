//! Two-input zeroth-order Takagi-Sugeno fuzzy system with online learning.
//!
//! The rule base is a full grid: every combination of a Gaussian membership
//! function on input 1 and one on input 2 forms a rule, and the output is the
//! firing-strength-weighted average of per-rule constants. The learning rules
//! move all three parameter groups (centers, widths, rule constants) in the
//! direction set by the sign of a scalar training signal `eta`, scaled by the
//! two learning rates:
//!
//! * centers track the input velocity plus a proportional pull toward the
//!   current input,
//! * widths shrink (or grow, for negative `eta`) at a rate that steepens as
//!   the input approaches the center,
//! * rule constants move along the normalized firing vector.
//!
//! This particular shape makes the instantaneous rate of the system output
//! equal to `-alpha2 * sgn(eta)` while no numerical guard is engaged: the
//! center and width rules cancel each other inside every membership function,
//! so the normalized firing strengths stay constant and only the rule
//! constants move the output. [`output_rate_check`] verifies that invariant
//! on a recorded sample stream.

use thiserror::Error;

use crate::{sgn, Real};

/// Smallest total firing strength treated as nonzero; below it the
/// normalized weights fall back to uniform.
const TOTAL_FIRING_FLOOR: f64 = 1e-30;
/// Floor for the squared norm of the normalized weights in the rule-constant
/// update. Unreachable when the weights sum to one, kept as a safety net.
const WEIGHT_NORM_FLOOR: f64 = 1e-12;

/// Parameters of the fuzzy system. Rule constants are stored flat, row-major
/// over (input-1 rule, input-2 rule): rule `(i, j)` lives at `i * J + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct NfsParameters<T> {
    pub c1: Vec<T>,
    pub sigma1: Vec<T>,
    pub c2: Vec<T>,
    pub sigma2: Vec<T>,
    pub f: Vec<T>,
    /// Learning rate for centers and widths.
    pub alpha1: T,
    /// Learning rate for rule constants; also the magnitude of the output
    /// rate while adaptation runs unguarded.
    pub alpha2: T,
    /// Lower clamp for widths. Keeps memberships evaluable.
    pub sigma_min: T,
    /// Upper clamp for widths. The width rule divides by the squared
    /// distance to the center, so an input sitting on a center would
    /// otherwise send the width to infinity in a handful of steps.
    pub sigma_max: T,
    /// Floor for the squared center distance in the width rule.
    pub denom_floor: T,
}

/// Output of a forward pass: the crisp output and the normalized firing
/// strengths it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct NfsForwardResult<T> {
    pub tau_n: T,
    pub w_tilde: Vec<T>,
}

/// Which numerical guards engaged during one adaptation step. Samples where
/// any guard fired fall outside the constant-rate regime of the learning
/// rules, so rate checks skip them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AdaptGuards {
    /// A width hit its lower or upper clamp.
    pub sigma_clamped: bool,
    /// A width update had its center-distance denominator floored.
    pub denom_floored: bool,
    /// Total firing strength was so small the weights fell back to uniform.
    pub weights_degenerate: bool,
}

impl AdaptGuards {
    pub fn any(&self) -> bool {
        self.sigma_clamped || self.denom_floored || self.weights_degenerate
    }
}

/// One recorded adaptation step for [`output_rate_check`]: the two inputs,
/// their time derivatives, and the training signal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSample<T> {
    pub xi1: T,
    pub xi2: T,
    pub xi1_rate: T,
    pub xi2_rate: T,
    pub eta: T,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RateCheckError {
    #[error("output rate check needs at least 2 unguarded steady-sign samples, found {0}")]
    TooFewValidSamples(usize),
}

impl<T: Real> NfsParameters<T> {
    /// Builds a grid of `rules_in1` by `rules_in2` rules with centers spread
    /// uniformly over `center_range` on each input (a single rule sits at
    /// the midpoint), all widths at `sigma_init`, and all rule constants at
    /// zero.
    pub fn new(
        rules_in1: usize,
        rules_in2: usize,
        center_range: [T; 2],
        sigma_init: T,
        alpha1: T,
        alpha2: T,
    ) -> Self {
        assert!(
            rules_in1 >= 1 && rules_in2 >= 1,
            "need at least one rule per input"
        );
        assert!(sigma_init > T::zero(), "initial width must be positive");
        Self {
            c1: uniform_centers(rules_in1, center_range),
            sigma1: vec![sigma_init; rules_in1],
            c2: uniform_centers(rules_in2, center_range),
            sigma2: vec![sigma_init; rules_in2],
            f: vec![T::zero(); rules_in1 * rules_in2],
            alpha1,
            alpha2,
            sigma_min: T::of(1e-3),
            sigma_max: T::of(1e3),
            denom_floor: T::of(1e-6),
        }
    }

    pub fn rule_count(&self) -> usize {
        self.c1.len() * self.c2.len()
    }

    /// Normalized firing strengths at the given inputs. Falls back to a
    /// uniform vector when every rule has effectively zero activation, so
    /// the output stays defined arbitrarily far from all centers.
    fn normalized_weights(&self, xi1: T, xi2: T) -> (Vec<T>, bool) {
        let mu1: Vec<T> = self
            .c1
            .iter()
            .zip(&self.sigma1)
            .map(|(&c, &s)| gaussian(xi1, c, s))
            .collect();
        let mu2: Vec<T> = self
            .c2
            .iter()
            .zip(&self.sigma2)
            .map(|(&c, &s)| gaussian(xi2, c, s))
            .collect();

        let mut w = Vec::with_capacity(mu1.len() * mu2.len());
        let mut total = T::zero();
        for &a in &mu1 {
            for &b in &mu2 {
                let wij = a * b;
                total += wij;
                w.push(wij);
            }
        }

        if total <= T::of(TOTAL_FIRING_FLOOR) {
            let n = T::of(w.len() as f64);
            let uniform = T::one() / n;
            w.fill(uniform);
            (w, true)
        } else {
            for wij in &mut w {
                *wij /= total;
            }
            (w, false)
        }
    }

    /// Evaluates the system: weighted average of the rule constants under
    /// the normalized firing strengths.
    pub fn forward(&self, xi1: T, xi2: T) -> NfsForwardResult<T> {
        let (w_tilde, _) = self.normalized_weights(xi1, xi2);
        let tau_n = self
            .f
            .iter()
            .zip(&w_tilde)
            .fold(T::zero(), |acc, (&fij, &wij)| acc + fij * wij);
        NfsForwardResult { tau_n, w_tilde }
    }

    /// Advances all parameters by one explicit-Euler step of the learning
    /// rules. The rule-constant update uses the firing strengths of the
    /// pre-update parameters at the given inputs, and each width update sees
    /// its center already moved, which is what keeps the width rule's
    /// denominator meaningful while the center chases the input.
    pub fn adapt(
        &mut self,
        xi1: T,
        xi2: T,
        xi1_rate: T,
        xi2_rate: T,
        eta: T,
        dt: T,
    ) -> AdaptGuards {
        let sg = sgn(eta);
        let mut guards = AdaptGuards::default();

        let (w_tilde, degenerate) = self.normalized_weights(xi1, xi2);
        guards.weights_degenerate = degenerate;
        let mut norm_sq = w_tilde.iter().fold(T::zero(), |acc, &wij| acc + wij * wij);
        if norm_sq < T::of(WEIGHT_NORM_FLOOR) {
            norm_sq = T::of(WEIGHT_NORM_FLOOR);
        }
        for (fij, &wij) in self.f.iter_mut().zip(&w_tilde) {
            *fij += dt * (-(wij / norm_sq) * self.alpha2 * sg);
        }

        adapt_input_dim(
            &mut self.c1,
            &mut self.sigma1,
            xi1,
            xi1_rate,
            self.alpha1,
            sg,
            dt,
            self.denom_floor,
            self.sigma_min,
            self.sigma_max,
            &mut guards,
        );
        adapt_input_dim(
            &mut self.c2,
            &mut self.sigma2,
            xi2,
            xi2_rate,
            self.alpha1,
            sg,
            dt,
            self.denom_floor,
            self.sigma_min,
            self.sigma_max,
            &mut guards,
        );

        guards
    }
}

fn gaussian<T: Real>(xi: T, c: T, sigma: T) -> T {
    let r = (xi - c) / sigma;
    (-(r * r)).exp()
}

fn uniform_centers<T: Real>(n: usize, range: [T; 2]) -> Vec<T> {
    let [lo, hi] = range;
    if n == 1 {
        return vec![(lo + hi) / T::of(2.0)];
    }
    let span = hi - lo;
    let last = T::of((n - 1) as f64);
    (0..n).map(|i| lo + span * T::of(i as f64) / last).collect()
}

#[allow(clippy::too_many_arguments)]
fn adapt_input_dim<T: Real>(
    centers: &mut [T],
    widths: &mut [T],
    xi: T,
    xi_rate: T,
    alpha1: T,
    sg: T,
    dt: T,
    denom_floor: T,
    sigma_min: T,
    sigma_max: T,
    guards: &mut AdaptGuards,
) {
    for (c, s) in centers.iter_mut().zip(widths.iter_mut()) {
        *c += dt * (xi_rate + (xi - *c) * alpha1 * sg);
        let diff = xi - *c;
        let mut den = diff * diff;
        if den < denom_floor {
            den = denom_floor;
            if sg != T::zero() {
                guards.denom_floored = true;
            }
        }
        let raw = *s + dt * (-(*s + *s * *s * *s / den) * alpha1 * sg);
        let clamped = raw.max(sigma_min).min(sigma_max);
        if clamped != raw {
            guards.sigma_clamped = true;
        }
        *s = clamped;
    }
}

/// Replays adaptation over a recorded sample stream and measures how far the
/// finite-difference rate of the output strays from `-alpha2 * sgn(eta)`.
/// Intervals where a guard engaged or the training signal changed sign are
/// excluded; at least two must survive. Returns the largest absolute
/// deviation over the surviving intervals.
pub fn output_rate_check<T: Real>(
    start: &NfsParameters<T>,
    samples: &[RateSample<T>],
    dt: T,
) -> Result<T, RateCheckError> {
    let mut p = start.clone();
    let mut outputs = Vec::with_capacity(samples.len());
    let mut guarded = Vec::with_capacity(samples.len());
    for s in samples {
        outputs.push(p.forward(s.xi1, s.xi2).tau_n);
        guarded.push(
            p.adapt(s.xi1, s.xi2, s.xi1_rate, s.xi2_rate, s.eta, dt)
                .any(),
        );
    }

    let mut valid = 0usize;
    let mut max_dev = T::zero();
    for n in 0..samples.len().saturating_sub(1) {
        if guarded[n] || sgn(samples[n].eta) != sgn(samples[n + 1].eta) {
            continue;
        }
        let measured = (outputs[n + 1] - outputs[n]) / dt;
        let predicted = -start.alpha2 * sgn(samples[n].eta);
        let dev = (measured - predicted).abs();
        if dev > max_dev {
            max_dev = dev;
        }
        valid += 1;
    }

    if valid < 2 {
        Err(RateCheckError::TooFewValidSamples(valid))
    } else {
        Ok(max_dev)
    }
}
