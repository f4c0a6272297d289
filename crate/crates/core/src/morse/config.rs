use serde::{Deserialize, Serialize};

use super::MorseError;

/// Orientation convention for unstable eigenbases. `Reversed` negates the
/// first basis vector at every critical point of positive index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Standard,
    Reversed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct NumericalConfig {
    /// Newton seeds per axis.
    pub grid_resolution: usize,
    /// Gradient norm at which Newton stops.
    pub grad_tol: f64,
    pub newton_max_iter: usize,
    /// Torus distance under which converged points are identified.
    pub dedupe_radius: f64,
    pub nondeg_tol: f64,
    /// Radius `ε` of the unstable sphere seeds.
    pub sphere_radius: f64,
    /// Radius `δ` at which a trajectory counts as landed.
    pub landing_radius: f64,
    /// Radius at which a trajectory is captured by a critical point outside the landing set.
    pub capture_radius: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Local error tolerance of the adaptive stepper.
    pub step_tol: f64,
    pub bisection_tol: f64,
    pub max_flow_time: f64,
    pub circle_samples: usize,
    /// Departure-direction tolerance when matching arc ends to rigid flows.
    pub match_tol: f64,
    pub convention: Convention,
}

impl Default for NumericalConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 32,
            grad_tol: 1e-10,
            newton_max_iter: 60,
            dedupe_radius: 1e-6,
            nondeg_tol: 1e-6,
            sphere_radius: 1e-3,
            landing_radius: 1e-4,
            capture_radius: 1e-8,
            h_min: 1e-9,
            h_max: 1e-2,
            step_tol: 1e-11,
            bisection_tol: 1e-10,
            max_flow_time: 50.0,
            circle_samples: 64,
            match_tol: 1e-6,
            convention: Convention::Standard,
        }
    }
}

impl NumericalConfig {
    pub fn validate(&self) -> Result<(), MorseError> {
        let bad = |m: String| Err(MorseError::InvalidConfig(m));
        let reals = [
            ("gradTol", self.grad_tol),
            ("dedupeRadius", self.dedupe_radius),
            ("nondegTol", self.nondeg_tol),
            ("sphereRadius", self.sphere_radius),
            ("landingRadius", self.landing_radius),
            ("captureRadius", self.capture_radius),
            ("hMin", self.h_min),
            ("hMax", self.h_max),
            ("stepTol", self.step_tol),
            ("bisectionTol", self.bisection_tol),
            ("maxFlowTime", self.max_flow_time),
            ("matchTol", self.match_tol),
        ];
        for (name, v) in reals {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.grid_resolution == 0 || self.newton_max_iter == 0 {
            return bad("gridResolution and newtonMaxIter must be positive".into());
        }
        if self.circle_samples < 8 {
            return bad(format!("circleSamples must be at least 8, got {}", self.circle_samples));
        }
        if self.h_min > self.h_max {
            return bad("hMin exceeds hMax".into());
        }
        if !(self.capture_radius < self.landing_radius && self.landing_radius < self.sphere_radius) {
            return bad("need captureRadius < landingRadius < sphereRadius".into());
        }
        Ok(())
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, MorseError> {
        let cfg: Self = serde_json::from_value(value.clone()).map_err(|e| MorseError::Json(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
