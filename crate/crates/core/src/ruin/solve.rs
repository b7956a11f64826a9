//! Method selection shared by the command line and the C interface.

use serde::{Deserialize, Serialize};

use super::{alpha_ruin, max_ruin_closed_uniform, max_ruin_lom, max_ruin_ode, mc_ruin, uniform_pair};
use super::{Method, RuinEstimate, DEFAULT_HORIZON};
use crate::convolutions::Algebra;
use crate::error::{Error, Result};
use crate::risk::RiskModel;
use crate::rng::DEFAULT_SEED;

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub paths: usize,
    /// Claims per path.
    pub horizon: u64,
    pub seed: u64,
    pub confidence: f64,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            paths: 100_000,
            horizon: DEFAULT_HORIZON,
            seed: DEFAULT_SEED,
            confidence: 0.99,
        }
    }
}

/// `a` when premiums are the point mass at `a > 0`.
fn lom_level(model: &RiskModel) -> Option<f64> {
    match (model.premiums.atoms(), model.premiums.parts()) {
        ([atom], []) if atom.at > 0.0 => Some(atom.at),
        _ => None,
    }
}

/// Whether a max model has uniform laws with `a < b`, or point-mass premiums.
pub fn closed_form_applies(model: &RiskModel) -> bool {
    model.algebra == Algebra::Max
        && (uniform_pair(&model.claims, &model.premiums).is_some_and(|(a, b)| a < b) || lom_level(model).is_some())
}

/// Volterra for α-stable models; closed form, then ODE, for max models;
/// Monte Carlo otherwise.
pub fn auto_method(model: &RiskModel) -> Method {
    match model.algebra {
        Algebra::AlphaStable { .. } => Method::Volterra,
        Algebra::Max if closed_form_applies(model) => Method::ClosedForm,
        Algebra::Max if model.claims.is_absolutely_continuous() && model.premiums.is_absolutely_continuous() => {
            Method::Ode
        }
        _ => Method::MonteCarlo,
    }
}

/// Whether `method` can run on `model`.
pub fn method_applies(model: &RiskModel, method: Method) -> bool {
    match method {
        Method::Volterra => matches!(model.algebra, Algebra::AlphaStable { .. }),
        Method::Ode => model.algebra == Algebra::Max,
        Method::ClosedForm => closed_form_applies(model),
        Method::MonteCarlo => true,
    }
}

/// Closed-form survival for the max models that have one.
pub fn max_ruin_closed(model: &RiskModel, u: f64) -> Result<RuinEstimate> {
    if let Some(level) = lom_level(model).filter(|_| model.algebra == Algebra::Max) {
        return max_ruin_lom(u, level, &model.claims);
    }
    match uniform_pair(&model.claims, &model.premiums) {
        Some((a, b)) if model.algebra == Algebra::Max => max_ruin_closed_uniform(u, a, b),
        _ => Err(Error::Unsupported(
            "closed forms need a max model with uniform(0, a) claims and uniform(0, b) or point-mass premiums".into(),
        )),
    }
}

/// Ruin at capital `u` by `method`, or by [`auto_method`] when `None`.
pub fn ruin_at(model: &RiskModel, u: f64, method: Option<Method>, mc: &McOptions) -> Result<RuinEstimate> {
    let method = method.unwrap_or_else(|| auto_method(model));
    if !method_applies(model, method) {
        return Err(Error::Unsupported(format!(
            "method {} does not apply to this {} model",
            method.as_str(),
            model.algebra.name()
        )));
    }
    match method {
        Method::Volterra => alpha_ruin(u, model),
        Method::Ode => {
            let grid = max_ruin_ode(&model.claims, &model.premiums, &[u])?;
            Ok(RuinEstimate::analytic(u, grid.delta_values[0], Method::Ode))
        }
        Method::ClosedForm => max_ruin_closed(model, u),
        Method::MonteCarlo => mc_ruin(&model.with_u(u)?, mc.horizon, mc.paths, mc.seed, mc.confidence),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Distribution;

    fn model(alg: Algebra, claims: Distribution, premiums: Distribution) -> RiskModel {
        RiskModel::new(alg, claims, premiums, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn auto_choices() {
        let u1 = Distribution::uniform(0.0, 1.0).unwrap();
        let u2 = Distribution::uniform(0.0, 2.0).unwrap();
        let e = Distribution::exponential(1.0).unwrap();
        assert_eq!(auto_method(&model(Algebra::Max, u1.clone(), u2.clone())), Method::ClosedForm);
        assert_eq!(auto_method(&model(Algebra::Max, u2.clone(), u1.clone())), Method::Ode);
        assert_eq!(auto_method(&model(Algebra::Max, u1.clone(), e.clone())), Method::Ode);
        let lom = Distribution::lom_max(2.0).unwrap();
        assert_eq!(auto_method(&model(Algebra::Max, e.clone(), lom)), Method::ClosedForm);
        let k = Distribution::lom_kendall(1.0, 1.0).unwrap();
        let km = model(Algebra::Kendall { alpha: 1.0 }, k.clone(), k);
        assert_eq!(auto_method(&km), Method::MonteCarlo);
        assert!(ruin_at(&km, 1.0, Some(Method::Volterra), &McOptions::default()).is_err());
        let a = model(Algebra::AlphaStable { alpha: 1.0 }, e, Distribution::lom_alpha(1.0, 1.0).unwrap());
        assert_eq!(auto_method(&a), Method::Volterra);
    }

    #[test]
    fn dispatch_agrees_with_direct_calls() {
        let m = model(
            Algebra::Max,
            Distribution::uniform(0.0, 1.0).unwrap(),
            Distribution::uniform(0.0, 2.0).unwrap(),
        );
        let mc = McOptions::default();
        let closed = ruin_at(&m, 0.5, None, &mc).unwrap();
        let ode = ruin_at(&m, 0.5, Some(Method::Ode), &mc).unwrap();
        assert_eq!(closed.method, Method::ClosedForm);
        assert!((closed.survival - ode.survival).abs() < 1e-9);
    }
}
