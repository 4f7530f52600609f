//! Run configuration: which controller, plant and observer gains, the
//! disturbance profile, and integration settings.
//!
//! [`ScenarioConfig`] deserializes from JSON with every field optional; the
//! defaults are the first benchmark scenario, so a config file only needs to
//! state what differs. Unknown fields are rejected to catch typos.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{BenchmarkPlant, DisturbanceProfile, PlantDynamics, Segment, SegmentKind};
use crate::neurofuzzy::NfsParameters;
use crate::Real;

/// Which control law a run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerKind {
    Smc,
    Ismc,
    SmcBndo,
    SmcSldo,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 4] = [
        ControllerKind::Smc,
        ControllerKind::Ismc,
        ControllerKind::SmcBndo,
        ControllerKind::SmcSldo,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ControllerKind::Smc => "smc",
            ControllerKind::Ismc => "ismc",
            ControllerKind::SmcBndo => "smc-bndo",
            ControllerKind::SmcSldo => "smc-sldo",
        }
    }
}

impl std::fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ControllerKind::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                format!("unknown controller '{s}' (expected smc, ismc, smc-bndo, or smc-sldo)")
            })
    }
}

/// Time-stepping scheme for the plant and all observer dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorKind {
    Euler,
    Rk4,
}

impl IntegratorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            IntegratorKind::Euler => "euler",
            IntegratorKind::Rk4 => "rk4",
        }
    }
}

impl std::fmt::Display for IntegratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for IntegratorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euler" => Ok(IntegratorKind::Euler),
            "rk4" => Ok(IntegratorKind::Rk4),
            other => Err(format!(
                "unknown integrator '{other}' (expected euler or rk4)"
            )),
        }
    }
}

/// Shape and learning rates of the fuzzy system inside the self-learning
/// observer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NfsSettings {
    #[serde(default = "default_rules")]
    pub rules_in1: usize,
    #[serde(default = "default_rules")]
    pub rules_in2: usize,
    #[serde(default = "default_alpha1")]
    pub alpha1: f64,
    #[serde(default = "default_alpha2")]
    pub alpha2: f64,
    #[serde(default = "default_center_range")]
    pub center_range: [f64; 2],
    #[serde(default = "default_sigma_init")]
    pub sigma_init: f64,
}

impl Default for NfsSettings {
    fn default() -> Self {
        Self {
            rules_in1: default_rules(),
            rules_in2: default_rules(),
            alpha1: default_alpha1(),
            alpha2: default_alpha2(),
            center_range: default_center_range(),
            sigma_init: default_sigma_init(),
        }
    }
}

impl NfsSettings {
    /// Instantiates runtime fuzzy-system parameters at the requested scalar
    /// precision.
    pub fn to_parameters<T: Real>(&self) -> NfsParameters<T> {
        NfsParameters::new(
            self.rules_in1,
            self.rules_in2,
            [T::of(self.center_range[0]), T::of(self.center_range[1])],
            T::of(self.sigma_init),
            T::of(self.alpha1),
            T::of(self.alpha2),
        )
    }
}

/// Full description of one simulation run. Defaults reproduce the first
/// benchmark scenario (regulation from `[0.5, -0.5]` under a disturbance
/// that switches on as a step and later turns into a two-tone oscillation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_controller")]
    pub controller: ControllerKind,
    /// Sliding-surface slope.
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Switching gain.
    #[serde(default = "default_k")]
    pub k: f64,
    /// Observer gain vector `l`; its product with the plant's disturbance
    /// gain sets the estimation convergence rate.
    #[serde(default = "default_observer_gain")]
    pub observer_gain: [f64; 2],
    /// Bandwidth of the two cascaded differentiators in the self-learning
    /// observer.
    #[serde(default = "default_filter_bandwidth")]
    pub filter_bandwidth: f64,
    #[serde(default)]
    pub nfs: NfsSettings,
    #[serde(default = "default_disturbance")]
    pub disturbance: DisturbanceProfile<f64>,
    #[serde(default = "default_x0")]
    pub x0: [f64; 2],
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default = "default_integrator")]
    pub integrator: IntegratorKind,
    /// Half-width of the `|x1|` band used for settling-time metrics.
    #[serde(default = "default_settle_band")]
    pub settle_band: f64,
    /// Optional boundary-layer half-width replacing the discontinuous
    /// switching term; absent in the benchmarks.
    #[serde(default)]
    pub boundary_layer: Option<f64>,
}

fn default_name() -> String {
    "scenario1".to_owned()
}
fn default_controller() -> ControllerKind {
    ControllerKind::SmcSldo
}
fn default_lambda() -> f64 {
    5.0
}
fn default_k() -> f64 {
    6.5
}
fn default_observer_gain() -> [f64; 2] {
    [5.0, 0.0]
}
fn default_filter_bandwidth() -> f64 {
    100.0
}
fn default_rules() -> usize {
    3
}
fn default_alpha1() -> f64 {
    0.01
}
fn default_alpha2() -> f64 {
    1.0
}
fn default_center_range() -> [f64; 2] {
    [-1.0, 1.0]
}
fn default_sigma_init() -> f64 {
    0.5
}
fn default_x0() -> [f64; 2] {
    [0.5, -0.5]
}
fn default_dt() -> f64 {
    1e-3
}
fn default_duration() -> f64 {
    30.0
}
fn default_integrator() -> IntegratorKind {
    IntegratorKind::Euler
}
fn default_settle_band() -> f64 {
    0.02
}

fn default_disturbance() -> DisturbanceProfile<f64> {
    DisturbanceProfile::new(vec![
        Segment {
            start: 0.0,
            kind: SegmentKind::Zero,
        },
        Segment {
            start: 10.0,
            kind: SegmentKind::Step { level: 0.3 },
        },
        Segment {
            start: 20.0,
            kind: SegmentKind::Multisine {
                amplitude: 0.15,
                frequencies: vec![1.0, 2.0],
            },
        },
    ])
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: default_name(),
            controller: default_controller(),
            lambda: default_lambda(),
            k: default_k(),
            observer_gain: default_observer_gain(),
            filter_bandwidth: default_filter_bandwidth(),
            nfs: NfsSettings::default(),
            disturbance: default_disturbance(),
            x0: default_x0(),
            dt: default_dt(),
            duration: default_duration(),
            integrator: default_integrator(),
            settle_band: default_settle_band(),
            boundary_layer: None,
        }
    }
}

/// A configuration field failed validation.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field,
        message: message.into(),
    }
}

impl ScenarioConfig {
    /// The first benchmark scenario: high switching gain, nonzero initial
    /// state.
    pub fn scenario1() -> Self {
        Self::default()
    }

    /// The second benchmark scenario: low switching gain from rest, which
    /// exposes how much each controller leans on the disturbance estimate.
    pub fn scenario2() -> Self {
        Self {
            name: "scenario2".to_owned(),
            k: 0.1,
            x0: [0.0, 0.0],
            ..Self::default()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "scenario1" => Some(Self::scenario1()),
            "scenario2" => Some(Self::scenario2()),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["scenario1", "scenario2"]
    }

    /// Checks every numeric constraint the solvers rely on. Returns the
    /// first violation, naming the offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.is_empty() {
            return Err(invalid("name", "must not be empty"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", "must be positive and finite"));
        }
        if !(self.duration.is_finite() && self.duration >= self.dt) {
            return Err(invalid(
                "duration",
                "must be finite and at least one time step",
            ));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(invalid("lambda", "must be positive and finite"));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(invalid("k", "must be positive and finite"));
        }
        if !(self.x0[0].is_finite() && self.x0[1].is_finite()) {
            return Err(invalid("x0", "must be finite"));
        }
        if !(self.settle_band.is_finite() && self.settle_band > 0.0) {
            return Err(invalid("settle_band", "must be positive and finite"));
        }
        if let Some(w) = self.boundary_layer {
            if !(w.is_finite() && w > 0.0) {
                return Err(invalid(
                    "boundary_layer",
                    "must be positive and finite when set",
                ));
            }
        }
        if !self.disturbance.is_well_formed() {
            return Err(invalid(
                "disturbance",
                "segments must start at 0 and have strictly increasing start times",
            ));
        }

        let uses_observer = matches!(
            self.controller,
            ControllerKind::SmcBndo | ControllerKind::SmcSldo
        );
        if uses_observer {
            let z: [f64; 2] = BenchmarkPlant.disturbance_gain();
            let lz = self.observer_gain[0] * z[0] + self.observer_gain[1] * z[1];
            if !(lz.is_finite() && lz > 0.0) {
                return Err(invalid(
                    "observer_gain",
                    "product with the plant disturbance gain must be positive",
                ));
            }
            if lz * self.dt >= 1.0 {
                return Err(invalid(
                    "observer_gain",
                    "estimation rate times dt must stay below 1 for a stable step",
                ));
            }
        }
        if self.controller == ControllerKind::SmcSldo {
            if !(self.filter_bandwidth.is_finite() && self.filter_bandwidth > 0.0) {
                return Err(invalid("filter_bandwidth", "must be positive and finite"));
            }
            if self.filter_bandwidth * self.dt >= 1.0 {
                return Err(invalid(
                    "filter_bandwidth",
                    "bandwidth times dt must stay below 1 for a stable filter step",
                ));
            }
            if self.nfs.rules_in1 < 1 || self.nfs.rules_in2 < 1 {
                return Err(invalid(
                    "nfs.rules_in1",
                    "each input needs at least one rule",
                ));
            }
            if !(self.nfs.alpha1.is_finite() && self.nfs.alpha1 > 0.0) {
                return Err(invalid("nfs.alpha1", "must be positive and finite"));
            }
            if !(self.nfs.alpha2.is_finite() && self.nfs.alpha2 > 0.0) {
                return Err(invalid("nfs.alpha2", "must be positive and finite"));
            }
            if !(self.nfs.sigma_init.is_finite() && self.nfs.sigma_init > 0.0) {
                return Err(invalid("nfs.sigma_init", "must be positive and finite"));
            }
            let [lo, hi] = self.nfs.center_range;
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(invalid(
                    "nfs.center_range",
                    "must be a finite, ordered interval",
                ));
            }
        }
        Ok(())
    }
}
