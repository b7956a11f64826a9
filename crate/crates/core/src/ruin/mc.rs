//! Monte Carlo ruin for any algebra.
//!
//! Each path pairs a claim walk from `v` (usually 0) with a premium walk
//! from `u`, driven by independent seeds, and survives while
//! `u ⊕ Y_k > v ⊕ X_k` for every claim `k = 1, ..., horizon`. Truncating at a
//! finite horizon can only overstate survival.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Horizon, Method, RuinEstimate};
use crate::convolutions::Algebra;
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::measures::Distribution;
use crate::risk::RiskModel;
use crate::rng::{mix64, path_seed, stream, Uniforms};
use crate::stats::{wilson, z_score, MeanEstimate};
use crate::walks::{poisson_inverse, Sampler, Walker};

/// Claims simulated per path when no horizon is given.
pub const DEFAULT_HORIZON: u64 = 10_000;

const PREMIUM_SALT: u64 = 0x7072_656D_6975_6D73;
const INNER_SALT: u64 = 0x696E_6E65_725F_6D63;
const RECURSION_SALT: u64 = 0x7265_6375_7273_696F;

struct Pair<'a> {
    algebra: Algebra,
    claims: &'a Distribution,
    premiums: Distribution,
    /// Premium level past which the max walk can never be caught.
    saturation: Option<f64>,
}

impl<'a> Pair<'a> {
    fn new(model: &'a RiskModel) -> Result<Self> {
        let saturation = if model.algebra == Algebra::Max {
            let top = model.claims.support_upper();
            top.is_finite().then_some(top)
        } else {
            None
        };
        Ok(Pair {
            algebra: model.algebra,
            claims: &model.claims,
            premiums: model.premium_steps()?,
            saturation,
        })
    }

    fn walkers(&self, v: f64, u: f64, seed: u64) -> (Walker<'_>, Walker<'_>) {
        (
            Walker::new(self.algebra, self.claims, v, seed, Sampler::Auto),
            Walker::new(
                self.algebra,
                &self.premiums,
                u,
                mix64(seed ^ PREMIUM_SALT),
                Sampler::Auto,
            ),
        )
    }

    /// Whether the pair stays ordered for `steps` more claims.
    fn survives(&self, x: &mut Walker<'_>, y: &mut Walker<'_>, steps: u64) -> bool {
        for _ in 0..steps {
            let xs = x.advance();
            let ys = y.advance();
            if ys <= xs || ys.is_nan() || xs.is_nan() {
                return false;
            }
            if let Some(top) = self.saturation {
                if ys > top {
                    return true;
                }
            }
        }
        true
    }
}

fn check_mc(paths: usize, confidence: f64) -> Result<()> {
    if paths == 0 {
        return Err(Error::InvalidParameter {
            name: "paths",
            value: 0.0,
            reason: "must be positive",
        });
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidParameter {
            name: "confidence",
            value: confidence,
            reason: "must lie in (0, 1)",
        });
    }
    Ok(())
}

fn estimate(u: f64, survived: u64, paths: usize, confidence: f64, horizon: Horizon) -> RuinEstimate {
    let n = paths as u64;
    let survival = survived as f64 / paths as f64;
    let (lo, hi) = wilson(survived, n, confidence);
    RuinEstimate {
        u,
        survival,
        ruin: 1.0 - survival,
        ci_low: Some(lo),
        ci_high: Some(hi),
        method: Method::MonteCarlo,
        horizon,
        paths: Some(n),
    }
}

/// Survival over the first `horizon_claims` claims, with a Wilson interval.
/// Path `i` uses `path_seed(seed, i)` whatever `u` or the horizon, so
/// estimates on a grid share their random numbers.
pub fn mc_ruin(
    model: &RiskModel,
    horizon_claims: u64,
    paths: usize,
    seed: u64,
    confidence: f64,
) -> Result<RuinEstimate> {
    check_mc(paths, confidence)?;
    if horizon_claims == 0 {
        return Err(Error::InvalidParameter {
            name: "horizon_claims",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let pair = Pair::new(model)?;
    let survived = (0..paths as u64)
        .into_par_iter()
        .filter(|&i| {
            let (mut x, mut y) = pair.walkers(0.0, model.u, path_seed(seed, i));
            pair.survives(&mut x, &mut y, horizon_claims)
        })
        .count() as u64;
    Ok(estimate(
        model.u,
        survived,
        paths,
        confidence,
        Horizon::Claims(horizon_claims),
    ))
}

/// Survival up to time `t`: each path sees `N_t ~ Poisson(lambda t)` claims,
/// drawn by inversion so that a larger `t` never sees fewer claims.
pub fn mc_ruin_finite_t(
    model: &RiskModel,
    t: f64,
    paths: usize,
    seed: u64,
    confidence: f64,
) -> Result<RuinEstimate> {
    check_mc(paths, confidence)?;
    ensure_positive("t", t)?;
    let pair = Pair::new(model)?;
    let mean = model.lambda * t;
    let survived = (0..paths as u64)
        .into_par_iter()
        .filter(|&i| {
            let s = path_seed(seed, i);
            let n = poisson_inverse(mean, Uniforms::new(s, stream::COUNT).next_open());
            let (mut x, mut y) = pair.walkers(0.0, model.u, s);
            pair.survives(&mut x, &mut y, n)
        })
        .count() as u64;
    Ok(estimate(model.u, survived, paths, confidence, Horizon::Time(t)))
}

/// Two estimates of `Lambda(v, u) = P(u ⊕ Y_k > v ⊕ X_k, k = 1..horizon)`:
/// direct simulation, and one step from `(v, u)` followed by inner
/// simulation of `Lambda(x_1, y_1)` over the remaining claims.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaCheck {
    pub v: f64,
    pub u: f64,
    pub horizon: u64,
    pub direct: MeanEstimate,
    pub recursion: MeanEstimate,
    /// `direct - recursion`.
    pub residual: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl LambdaCheck {
    pub fn contains_zero(&self) -> bool {
        self.ci_low <= 0.0 && 0.0 <= self.ci_high
    }
}

#[allow(clippy::too_many_arguments)]
pub fn kendall_lambda_recursion_check(
    v: f64,
    u: f64,
    model: &RiskModel,
    outer: usize,
    inner: usize,
    horizon: u64,
    seed: u64,
    confidence: f64,
) -> Result<LambdaCheck> {
    if !matches!(model.algebra, Algebra::Kendall { .. }) {
        return Err(Error::Unsupported(format!(
            "the recursion check is for Kendall models, got {}",
            model.algebra.name()
        )));
    }
    ensure_nonnegative("v", v)?;
    ensure_nonnegative("u", u)?;
    check_mc(outer, confidence)?;
    check_mc(inner, confidence)?;
    if horizon == 0 {
        return Err(Error::InvalidParameter {
            name: "horizon",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let pair = Pair::new(model)?;
    let direct: Vec<f64> = (0..outer as u64)
        .into_par_iter()
        .map(|i| {
            let (mut x, mut y) = pair.walkers(v, u, path_seed(seed, i));
            f64::from(u8::from(pair.survives(&mut x, &mut y, horizon)))
        })
        .collect();
    let recursion_seed = mix64(seed ^ RECURSION_SALT);
    let recursion: Vec<f64> = (0..outer as u64)
        .into_par_iter()
        .map(|i| {
            let s = path_seed(recursion_seed, i);
            let (mut x, mut y) = pair.walkers(v, u, s);
            let (x1, y1) = (x.advance(), y.advance());
            if y1 <= x1 {
                return 0.0;
            }
            let inner_seed = mix64(s ^ INNER_SALT);
            let ok = (0..inner as u64)
                .filter(|&j| {
                    let (mut xi, mut yi) = pair.walkers(x1, y1, path_seed(inner_seed, j));
                    pair.survives(&mut xi, &mut yi, horizon - 1)
                })
                .count();
            ok as f64 / inner as f64
        })
        .collect();
    let direct = MeanEstimate::from_samples(&direct);
    let recursion = MeanEstimate::from_samples(&recursion);
    let residual = direct.mean - recursion.mean;
    let half = z_score(confidence) * direct.std_error.hypot(recursion.std_error);
    Ok(LambdaCheck {
        v,
        u,
        horizon,
        direct,
        recursion,
        residual,
        ci_low: residual - half,
        ci_high: residual + half,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(alg: Algebra, claims: Distribution, premiums: Distribution, u: f64) -> RiskModel {
        RiskModel::new(alg, claims, premiums, u, 1.0, 1.0).unwrap()
    }

    #[test]
    fn no_claims_means_survival() {
        let m = model(
            Algebra::Kendall { alpha: 1.0 },
            Distribution::point(0.0).unwrap(),
            Distribution::lom_kendall(1.0, 1.0).unwrap(),
            1.0,
        );
        let r = mc_ruin(&m, 50, 500, 1, 0.99).unwrap();
        assert_eq!(r.survival, 1.0);
        assert!(r.ci_low.unwrap() <= 1.0 && r.ci_high.unwrap() == 1.0);
        let c = kendall_lambda_recursion_check(0.0, 1.0, &m, 200, 20, 10, 1, 0.99).unwrap();
        assert_eq!(c.residual, 0.0);
        assert_eq!(c.direct.mean, 1.0);
    }

    #[test]
    fn short_time_rarely_ruins() {
        let m = model(
            Algebra::Max,
            Distribution::uniform(0.0, 1.0).unwrap(),
            Distribution::uniform(0.0, 2.0).unwrap(),
            0.5,
        );
        let r = mc_ruin_finite_t(&m, 1e-6, 2000, 3, 0.99).unwrap();
        assert_eq!(r.ruin, 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let m = model(
            Algebra::Max,
            Distribution::uniform(0.0, 1.0).unwrap(),
            Distribution::uniform(0.0, 2.0).unwrap(),
            0.5,
        );
        assert!(mc_ruin(&m, 0, 10, 1, 0.99).is_err());
        assert!(mc_ruin(&m, 10, 0, 1, 0.99).is_err());
        assert!(mc_ruin(&m, 10, 10, 1, 1.0).is_err());
        assert!(kendall_lambda_recursion_check(0.0, 1.0, &m, 10, 10, 5, 1, 0.99).is_err());
    }
}
