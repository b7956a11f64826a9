//! Risk models and the first safety condition `E R_t > 0`.
//!
//! Claims `U_k ~ mu` arrive at the jumps of a Poisson process with
//! intensity `lambda`; premiums `V_k ~ nu` are collected per claim. Both
//! accumulate through the same generalized convolution, so at time `t` the
//! premium side is `u ⊕ Y_{N_t}` and the claim side is `X_{N_t}`.
//!
//! Where a known closed form and the Poisson-mixture definition of an
//! expectation disagree, the definition is used for margins and the closed
//! form is reported next to it under a `closed_form` field.

use serde::{Deserialize, Serialize};

use crate::convolutions::Algebra;
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::measures::{Continuous, Distribution, LawSpec, Moment};
use crate::quad::{integrate_with_breaks, Tolerance};
use crate::rng::{stream, Uniforms};
use crate::williamson::KendallLawPair;

/// Relative change below which a geometric-grid limit counts as settled.
pub const LIMIT_RELATIVE_TOLERANCE: f64 = 1e-8;
/// Past this abscissa an unsettled limit is declared divergent.
pub const LIMIT_X_MAX: f64 = 1e12;

fn one() -> f64 {
    1.0
}

/// JSON form of a [`RiskModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub algebra: Algebra,
    pub claims: LawSpec,
    pub premiums: LawSpec,
    #[serde(default)]
    pub u: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "one")]
    pub beta: f64,
}

/// Claim law, premium law, initial capital and arrival intensity under one algebra.
#[derive(Debug, Clone)]
pub struct RiskModel {
    pub algebra: Algebra,
    pub claims: Distribution,
    pub premiums: Distribution,
    pub u: f64,
    pub lambda: f64,
    /// Premium scale; only the α-stable model uses it.
    pub beta: f64,
}

impl RiskModel {
    pub fn new(
        algebra: Algebra,
        claims: Distribution,
        premiums: Distribution,
        u: f64,
        lambda: f64,
        beta: f64,
    ) -> Result<Self> {
        ensure_nonnegative("u", u)?;
        ensure_positive("lambda", lambda)?;
        ensure_positive("beta", beta)?;
        Ok(RiskModel {
            algebra,
            claims,
            premiums,
            u,
            lambda,
            beta,
        })
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        let claims = spec.claims.build().map_err(|e| Error::Config {
            path: "claims".into(),
            message: e.to_string(),
        })?;
        let premiums = spec.premiums.build().map_err(|e| Error::Config {
            path: "premiums".into(),
            message: e.to_string(),
        })?;
        Self::new(spec.algebra, claims, premiums, spec.u, spec.lambda, spec.beta)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn with_u(&self, u: f64) -> Result<Self> {
        ensure_nonnegative("u", u)?;
        Ok(RiskModel { u, ..self.clone() })
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        ensure_positive("lambda", lambda)?;
        Ok(RiskModel {
            lambda,
            ..self.clone()
        })
    }

    /// Premium step law as it enters the walk. The α-stable model scales
    /// premiums by `beta`; the other algebras use `nu` unchanged.
    pub fn premium_steps(&self) -> Result<Distribution> {
        match self.algebra {
            Algebra::AlphaStable { .. } if self.beta != 1.0 => self.premiums.dilate(self.beta),
            _ => Ok(self.premiums.clone()),
        }
    }
}

/// Outcome of a first-safety-condition evaluation at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafetyReport {
    pub t: f64,
    /// Premium side minus claim side.
    pub margin: f64,
    pub condition_holds: bool,
    pub premium_side: f64,
    pub claim_side: f64,
    /// Closed form of the premium side, where it differs from the definition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_premium_side: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_margin: Option<f64>,
}

impl SafetyReport {
    fn new(t: f64, premium_side: f64, claim_side: f64, closed_form_premium_side: Option<f64>) -> Self {
        let margin = premium_side - claim_side;
        SafetyReport {
            t,
            margin,
            condition_holds: margin > 0.0,
            premium_side,
            claim_side,
            closed_form_premium_side,
            closed_form_margin: closed_form_premium_side.map(|p| p - claim_side),
        }
    }
}

/// Closed-form and definition-level values of one expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoReadings {
    pub definition: f64,
    pub closed_form: f64,
}

/// Arrival times `S_1 < S_2 < ...` up to `t_max` of a Poisson process.
pub fn sample_claim_times(lambda: f64, t_max: f64, seed: u64) -> Result<Vec<f64>> {
    ensure_positive("lambda", lambda)?;
    ensure_nonnegative("t_max", t_max)?;
    let mut u = Uniforms::new(seed, stream::COUNT);
    let mut times = Vec::new();
    let mut s = 0.0;
    loop {
        s += -u.next_open().ln() / lambda;
        if s > t_max {
            return Ok(times);
        }
        times.push(s);
    }
}

fn require(model: &RiskModel, want: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "{want} needs a {want} model, got the {} algebra",
            model.algebra.name()
        )))
    }
}

fn check_time(t: f64) -> Result<f64> {
    ensure_nonnegative("t", t)
}

fn tail_integral<S: Fn(f64) -> f64>(survival: S, lambda_t: f64, from: f64, breaks: &[f64]) -> f64 {
    integrate_with_breaks(
        |x| -(-lambda_t * survival(x)).exp_m1(),
        from,
        f64::INFINITY,
        breaks,
        Tolerance::DEFAULT,
    )
    .value
}

/// `E X_t = lambda t int x e^{-lambda t (1 - F(x))} dF(x)` for the max walk.
pub fn expected_claim_side_max(model: &RiskModel, t: f64) -> Result<f64> {
    require(model, "max", model.algebra == Algebra::Max)?;
    let t = check_time(t)?;
    if !model.claims.is_absolutely_continuous() {
        return Err(Error::Unsupported(
            "the max claim-side integral needs an absolutely continuous claim law".into(),
        ));
    }
    let lt = model.lambda * t;
    if lt == 0.0 {
        return Ok(0.0);
    }
    let mu = &model.claims;
    Ok(lt * mu.integrate_density(|x| x * (-lt * mu.survival(x)).exp(), &[]))
}

/// `E(u ⊕ Y_t)` for the max walk, as the Poisson mixture of
/// `E max(u, V_1, ..., V_n)` and by the closed form (with a leading `lambda t`).
pub fn expected_premium_side_max(model: &RiskModel, t: f64) -> Result<TwoReadings> {
    require(model, "max", model.algebra == Algebra::Max)?;
    let t = check_time(t)?;
    let (u, lt, nu) = (model.u, model.lambda * t, &model.premiums);
    let mut breaks = nu.breaks();
    breaks.retain(|&b| b > u);
    // E(u ∨ M) = u + int_u^inf P(M > x) dx with P(M <= x) = e^{-lambda t (1 - G(x))}.
    let definition = u + if lt == 0.0 {
        0.0
    } else {
        tail_integral(|x| nu.survival(x), lt, u, &breaks)
    };
    let weight = |x: f64| x * (-lt * nu.survival(x)).exp();
    let atoms: f64 = nu
        .atoms()
        .iter()
        .filter(|a| a.at > u)
        .map(|a| a.mass * weight(a.at))
        .sum();
    let cont = nu.integrate_density(|x| if x > u { weight(x) } else { 0.0 }, &[u]);
    let closed_form = lt * (u * (-lt * nu.survival(u)).exp() + atoms + cont);
    Ok(TwoReadings {
        definition,
        closed_form,
    })
}

/// First safety condition for the max model.
pub fn safety_condition_max(model: &RiskModel, t: f64) -> Result<SafetyReport> {
    let claim = expected_claim_side_max(model, t)?;
    let premium = expected_premium_side_max(model, t)?;
    Ok(SafetyReport::new(t, premium.definition, claim, Some(premium.closed_form)))
}

/// Limit of `g(x)` as `x -> inf` along `1, 2, 4, ...`: settled once three
/// successive values agree to [`LIMIT_RELATIVE_TOLERANCE`], `None` if that
/// has not happened by [`LIMIT_X_MAX`].
pub fn geometric_limit<G: Fn(f64) -> f64>(g: G) -> Option<f64> {
    let mut last = [f64::NAN; 3];
    let mut x = 1.0;
    let mut k = 0usize;
    while x <= LIMIT_X_MAX {
        last[k % 3] = g(x);
        if k >= 2 {
            let v = last[k % 3];
            let a = last[(k + 2) % 3];
            let b = last[(k + 1) % 3];
            let tol = LIMIT_RELATIVE_TOLERANCE * v.abs();
            if (v - a).abs() <= tol && (a - b).abs() <= tol {
                return Some(v);
            }
        }
        x *= 2.0;
        k += 1;
    }
    None
}

/// Where the grid does not settle, a law with finite α-moment still has
/// the limit `lambda t E U^alpha`; fall back to that before flagging divergence.
fn settle<G: Fn(f64) -> f64>(g: G, pair: &KendallLawPair, offset: f64, lt: f64) -> Result<Moment> {
    if let Some(v) = geometric_limit(g) {
        return Ok(Moment::Finite(v));
    }
    if let Some(d) = pair.distribution() {
        if let Moment::Finite(m) = d.moment_alpha(pair.alpha())? {
            return Ok(Moment::Finite(offset + lt * m));
        }
    }
    Ok(Moment::Infinite)
}

/// `E X_t^alpha = lim x^alpha (1 - e^{-lambda t (1 - H(x))})` for the Kendall walk.
pub fn expected_alpha_moment_kendall_claims(pair: &KendallLawPair, lambda: f64, t: f64) -> Result<Moment> {
    ensure_positive("lambda", lambda)?;
    let lt = lambda * check_time(t)?;
    let alpha = pair.alpha();
    if let Some(c) = pair.lack_of_memory_c() {
        return Ok(Moment::Finite(0.5 * lt * c.powf(-alpha)));
    }
    if lt == 0.0 {
        return Ok(Moment::Finite(0.0));
    }
    settle(
        |x| x.powf(alpha) * -(-lt * pair.h_tail(x)).exp_m1(),
        pair,
        0.0,
        lt,
    )
}

/// `E(u ⊕ Y_t)^alpha` for the Kendall walk.
///
/// The definition gives `lim [x^a - (x^a - u^a) e^{-lambda t (1 - J(x))}]`;
/// the closed form adds the atom term `u^a e^{-lambda t (1 - J(u))}` on top.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KendallPremiumMoment {
    pub definition: Moment,
    pub closed_form: Moment,
}

pub fn expected_alpha_moment_kendall_premiums(
    u: f64,
    pair: &KendallLawPair,
    lambda: f64,
    t: f64,
) -> Result<KendallPremiumMoment> {
    ensure_nonnegative("u", u)?;
    ensure_positive("lambda", lambda)?;
    let lt = lambda * check_time(t)?;
    let alpha = pair.alpha();
    let ua = u.powf(alpha);
    let definition = if let Some(c) = pair.lack_of_memory_c() {
        Moment::Finite(ua + 0.5 * lt * c.powf(-alpha))
    } else if lt == 0.0 {
        Moment::Finite(ua)
    } else {
        settle(
            |x| {
                let damp = -lt * pair.h_tail(x);
                x.powf(alpha) * -damp.exp_m1() + ua * damp.exp()
            },
            pair,
            ua,
            lt,
        )?
    };
    let atom = if u > 0.0 {
        ua * (-lt * pair.h_tail(u)).exp()
    } else {
        0.0
    };
    let closed_form = match definition {
        Moment::Finite(v) => Moment::Finite(atom + v),
        Moment::Infinite => Moment::Infinite,
    };
    Ok(KendallPremiumMoment {
        definition,
        closed_form,
    })
}

/// First safety condition for the Kendall model with lack-of-memory claims
/// and premiums sharing `c` and `alpha`. The definition margin is `u^alpha`.
pub fn safety_condition_kendall(model: &RiskModel, t: f64) -> Result<SafetyReport> {
    let Algebra::Kendall { alpha } = model.algebra else {
        return require(model, "kendall", false).map(|_| unreachable!());
    };
    let claims = KendallLawPair::from_distribution(&model.claims, alpha)?;
    let premiums = KendallLawPair::from_distribution(&model.premiums, alpha)?;
    match (claims.lack_of_memory_c(), premiums.lack_of_memory_c()) {
        (Some(a), Some(b)) if a == b => {}
        (Some(_), Some(_)) => {
            return Err(Error::Unsupported(
                "claim and premium laws must share the lack-of-memory parameter c".into(),
            ))
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "the Kendall safety condition needs lom_kendall laws with alpha = {alpha}"
            )))
        }
    }
    let claim = expected_alpha_moment_kendall_claims(&claims, model.lambda, t)?;
    let premium = expected_alpha_moment_kendall_premiums(model.u, &premiums, model.lambda, t)?;
    let finite = |m: Moment| m.finite().ok_or_else(|| Error::InfiniteMoment("lack-of-memory moment".into()));
    Ok(SafetyReport::new(
        t,
        finite(premium.definition)?,
        finite(claim)?,
        premium.closed_form.finite(),
    ))
}

/// Parameters of the α-stable model: `nu = lom_alpha(gamma, alpha)`,
/// `F` the law of `U^alpha` and `rho = gamma mu_alpha / beta^alpha`.
#[derive(Debug, Clone)]
pub struct AlphaModel {
    pub alpha: f64,
    pub gamma: f64,
    pub beta_alpha: f64,
    pub mu_alpha: f64,
    pub claims_power: Distribution,
}

impl AlphaModel {
    pub fn rho(&self) -> f64 {
        self.gamma * self.mu_alpha / self.beta_alpha
    }
}

pub fn alpha_model(model: &RiskModel) -> Result<AlphaModel> {
    let Algebra::AlphaStable { alpha } = model.algebra else {
        return require(model, "alpha_stable", false).map(|_| unreachable!());
    };
    let gamma = match (model.premiums.atoms(), model.premiums.parts()) {
        ([], [(w, Continuous::Weibull { gamma, shape })]) if *w == 1.0 && *shape == alpha => *gamma,
        _ => {
            return Err(Error::Unsupported(format!(
                "the alpha_stable model needs premiums lom_alpha(gamma, {alpha})"
            )))
        }
    };
    let mu_alpha = match model.claims.moment_alpha(alpha)? {
        Moment::Finite(m) => m,
        Moment::Infinite => {
            return Err(Error::InfiniteMoment(format!(
                "claim law has E U^{alpha} = infinity"
            )))
        }
    };
    Ok(AlphaModel {
        alpha,
        gamma,
        beta_alpha: model.beta.powf(alpha),
        mu_alpha,
        claims_power: model.claims.power(alpha)?,
    })
}

/// Net-profit quantity `rho = gamma mu_alpha / beta^alpha`; survival from
/// zero capital is `1 - rho`.
pub fn net_profit_alpha(model: &RiskModel) -> Result<f64> {
    Ok(alpha_model(model)?.rho())
}

/// Safety report for whichever algebra the model uses.
pub fn safety_condition(model: &RiskModel, t: f64) -> Result<SafetyReport> {
    match model.algebra {
        Algebra::Max => safety_condition_max(model, t),
        Algebra::Kendall { .. } => safety_condition_kendall(model, t),
        other => Err(Error::Unsupported(format!(
            "no safety condition for the {} algebra",
            other.name()
        ))),
    }
}
