//! Ruin and survival probabilities.
//!
//! Survival from capital `u` is `delta(u) = P(u ⊕ Y_k > X_k for all k >= 1)`
//! and ruin is `1 - delta(u)`. The α-stable model reduces to a renewal
//! equation in `z = u^alpha`, the max model to a first-order ODE, and every
//! algebra can be simulated.

mod alpha;
mod max;
mod mc;
mod solve;

use serde::{Deserialize, Serialize};

pub use alpha::{
    alpha_ruin, alpha_ruin_laplace_check, alpha_ruin_volterra, alpha_ruin_with_steps, default_z_max,
    DEFAULT_VOLTERRA_STEPS,
};
pub use max::{
    max_ruin_closed_uniform, max_ruin_lom, max_ruin_ode, max_survival_integral_residual, uniform_pair,
};
pub use mc::{kendall_lambda_recursion_check, mc_ruin, mc_ruin_finite_t, LambdaCheck, DEFAULT_HORIZON};
pub use solve::{auto_method, closed_form_applies, max_ruin_closed, method_applies, ruin_at, McOptions};

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Volterra,
    Ode,
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Volterra => "volterra",
            Method::Ode => "ode",
            Method::ClosedForm => "closed_form",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// Horizon an estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Infinite,
    /// First `n` claims.
    Claims(u64),
    /// Claims arriving by time `t`.
    Time(f64),
}

/// Survival and ruin probability at one capital level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuinEstimate {
    pub u: f64,
    pub survival: f64,
    pub ruin: f64,
    /// Confidence interval for `survival` (Monte Carlo only).
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub method: Method,
    pub horizon: Horizon,
    pub paths: Option<u64>,
}

impl RuinEstimate {
    pub(crate) fn analytic(u: f64, survival: f64, method: Method) -> Self {
        let survival = survival.clamp(0.0, 1.0);
        RuinEstimate {
            u,
            survival,
            ruin: 1.0 - survival,
            ci_low: None,
            ci_high: None,
            method,
            horizon: Horizon::Infinite,
            paths: None,
        }
    }

    /// Whether `value` lies in the confidence interval.
    pub fn ci_contains(&self, value: f64) -> bool {
        match (self.ci_low, self.ci_high) {
            (Some(lo), Some(hi)) => lo <= value && value <= hi,
            _ => false,
        }
    }
}

/// Survival function tabulated on an increasing grid.
///
/// For the α-stable model the abscissa is `z = u^alpha`; for the max model
/// it is `u` itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalGrid {
    pub z_grid: Vec<f64>,
    pub delta_values: Vec<f64>,
    /// Net-profit quantity, when the model has one.
    pub rho: Option<f64>,
    /// Largest residual of the defining equation found on re-substitution.
    pub residual: f64,
}

impl SurvivalGrid {
    /// Linear interpolation, which keeps the tabulated monotonicity.
    /// Points outside the grid are `None`.
    pub fn eval(&self, z: f64) -> Option<f64> {
        let zs = &self.z_grid;
        let (&first, &last) = (zs.first()?, zs.last()?);
        if !(first..=last).contains(&z) {
            return None;
        }
        let i = zs.partition_point(|&x| x <= z);
        if i == zs.len() {
            return self.delta_values.last().copied();
        }
        if i == 0 {
            return self.delta_values.first().copied();
        }
        let (z0, z1) = (zs[i - 1], zs[i]);
        let (d0, d1) = (self.delta_values[i - 1], self.delta_values[i]);
        Some(d0 + (d1 - d0) * (z - z0) / (z1 - z0))
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.delta_values.windows(2).all(|w| w[1] >= w[0])
    }
}
