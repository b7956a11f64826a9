//! Williamson transform and the closed-form laws of Kendall random walks.
//!
//! For a step law with CDF `F` the transform is
//! `Phi(t) = int (1 - (t s)^alpha)_+ dF(s)` and `H(t) = Phi(1/t)`. Every
//! distribution function of the walk (after `n` steps, at a Poisson time,
//! started from a point) is an explicit expression in `F` and `H`.

use std::fmt;
use std::sync::Arc;

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::measures::{Continuous, Distribution};
use crate::quad::{integrate_with_breaks, Tolerance};

/// `Psi(s) = 1 - s^alpha` on `[0, 1]`, zero beyond.
pub fn psi(alpha: f64, s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        1.0 - s.powf(alpha)
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Source {
    Law(Distribution),
    LackOfMemory { c: f64 },
    Functions { f: RealFn, h: RealFn },
}

/// A step law together with its Williamson transform, for a fixed `alpha`.
#[derive(Clone)]
pub struct KendallLawPair {
    alpha: f64,
    source: Source,
}

impl fmt::Debug for KendallLawPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.source {
            Source::Law(d) => format!("{d:?}"),
            Source::LackOfMemory { c } => format!("lack_of_memory(c = {c})"),
            Source::Functions { .. } => "functions".to_string(),
        };
        f.debug_struct("KendallLawPair")
            .field("alpha", &self.alpha)
            .field("law", &kind)
            .finish()
    }
}

const H_TOLERANCE: Tolerance = Tolerance {
    abs: 1e-300,
    rel: 1e-13,
    max_subdivisions: 4000,
};

impl KendallLawPair {
    /// Pair for a law; the Kendall lack-of-memory family with matching
    /// `alpha` is recognized and evaluated in closed form.
    pub fn from_distribution(d: &Distribution, alpha: f64) -> Result<Self> {
        ensure_positive("alpha", alpha)?;
        if let ([], [(w, Continuous::PowerLaw { c, alpha: a })]) = (d.atoms(), d.parts()) {
            if *w == 1.0 && *a == alpha {
                return Self::lack_of_memory(*c, alpha);
            }
        }
        Ok(KendallLawPair {
            alpha,
            source: Source::Law(d.clone()),
        })
    }

    /// `F(x) = min((c x)^alpha, 1)`.
    pub fn lack_of_memory(c: f64, alpha: f64) -> Result<Self> {
        ensure_positive("c", c)?;
        ensure_positive("alpha", alpha)?;
        Ok(KendallLawPair {
            alpha,
            source: Source::LackOfMemory { c },
        })
    }

    /// Pair from user-supplied `F` and `H`; they are not checked for consistency.
    pub fn from_functions<F, H>(alpha: f64, f: F, h: H) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ensure_positive("alpha", alpha)?;
        Ok(KendallLawPair {
            alpha,
            source: Source::Functions {
                f: Arc::new(f),
                h: Arc::new(h),
            },
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The lack-of-memory parameter `c`, when the pair is of that family.
    pub fn lack_of_memory_c(&self) -> Option<f64> {
        match self.source {
            Source::LackOfMemory { c } => Some(c),
            _ => None,
        }
    }

    /// The underlying law, when there is one.
    pub fn distribution(&self) -> Option<Distribution> {
        match &self.source {
            Source::Law(d) => Some(d.clone()),
            Source::LackOfMemory { c } => Distribution::lom_kendall(*c, self.alpha).ok(),
            Source::Functions { .. } => None,
        }
    }

    /// Step CDF `F(t)`.
    pub fn f(&self, t: f64) -> f64 {
        match &self.source {
            Source::Law(d) => d.cdf(t),
            Source::LackOfMemory { c } => {
                if t <= 0.0 {
                    0.0
                } else {
                    (c * t).powf(self.alpha).min(1.0)
                }
            }
            Source::Functions { f, .. } => f(t),
        }
    }

    /// `H(t) = Phi(1/t)`.
    pub fn h(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        if t == 0.0 {
            // Phi(inf) is the mass at zero.
            return self.f(0.0);
        }
        match &self.source {
            Source::Law(d) => {
                let top = t.powf(self.alpha);
                let breaks = power_breaks(d, self.alpha);
                let a = self.alpha;
                let v = integrate_with_breaks(|y| d.cdf(y.powf(1.0 / a)), 0.0, top, &breaks, H_TOLERANCE)
                    .value;
                (v / top).clamp(0.0, 1.0)
            }
            Source::LackOfMemory { c } => {
                let z = (c * t).powf(self.alpha);
                if c * t <= 1.0 {
                    0.5 * z
                } else {
                    1.0 - 0.5 / z
                }
            }
            Source::Functions { h, .. } => h(t),
        }
    }

    /// `1 - H(t)` without cancellation for large `t`.
    pub fn h_tail(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0 - self.h(t);
        }
        match &self.source {
            Source::Law(d) => {
                // 1 - H(t) = t^-alpha int_0^{t^alpha} P(X^alpha > y) dy
                let top = t.powf(self.alpha);
                let mut breaks = power_breaks(d, self.alpha);
                let mut edge = 1.0;
                while edge < top {
                    breaks.push(edge);
                    edge *= 10.0;
                }
                let a = self.alpha;
                let v = integrate_with_breaks(
                    |y| d.survival(y.powf(1.0 / a)),
                    0.0,
                    top,
                    &breaks,
                    H_TOLERANCE,
                )
                .value;
                (v / top).clamp(0.0, 1.0)
            }
            Source::LackOfMemory { c } => {
                let z = (c * t).powf(self.alpha);
                if c * t <= 1.0 {
                    1.0 - 0.5 * z
                } else {
                    0.5 / z
                }
            }
            Source::Functions { h, .. } => 1.0 - h(t),
        }
    }

    /// `H'(t) = alpha (F(t) - H(t)) / t`.
    pub fn h_prime(&self, t: f64) -> f64 {
        self.alpha * (self.f(t) - self.h(t)) / t
    }

    /// Density of the step law's absolutely continuous part, if known.
    pub fn density(&self, t: f64) -> Option<f64> {
        match &self.source {
            Source::Law(d) => Some(d.density(t)),
            Source::LackOfMemory { c } => Some(if t > 0.0 && c * t < 1.0 {
                self.alpha * c.powf(self.alpha) * t.powf(self.alpha - 1.0)
            } else {
                0.0
            }),
            Source::Functions { .. } => None,
        }
    }
}

fn power_breaks(d: &Distribution, alpha: f64) -> Vec<f64> {
    d.breaks().into_iter().map(|b| b.powf(alpha)).collect()
}

/// Williamson transform by the integrated-CDF form
/// `alpha t^alpha int_0^{1/t} s^(alpha-1) F(s) ds`.
pub fn williamson_transform<F: Fn(f64) -> f64>(cdf: F, alpha: f64, t: f64) -> f64 {
    williamson_transform_with_breaks(cdf, alpha, t, &[])
}

/// As [`williamson_transform`], splitting the integral where `F` jumps or kinks.
pub fn williamson_transform_with_breaks<F: Fn(f64) -> f64>(
    cdf: F,
    alpha: f64,
    t: f64,
    breaks: &[f64],
) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    // y = s^alpha turns the weight alpha s^(alpha-1) ds into dy.
    let top = t.powf(-alpha);
    let ybreaks: Vec<f64> = breaks.iter().map(|b| b.powf(alpha)).collect();
    let v = integrate_with_breaks(|y| cdf(y.powf(1.0 / alpha)), 0.0, top, &ybreaks, H_TOLERANCE).value;
    v / top
}

/// `int (1 - (t s)^alpha)_+ dF(s)`.
pub fn transform_form1(d: &Distribution, alpha: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    d.expect(|s| psi(alpha, t * s), &[1.0 / t])
}

/// `F(1/t) - t^alpha int_0^{1/t} s^alpha dF(s)`.
pub fn transform_form2(d: &Distribution, alpha: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let edge = 1.0 / t;
    let atoms: f64 = d
        .atoms()
        .iter()
        .filter(|a| a.at <= edge)
        .map(|a| a.mass * a.at.powf(alpha))
        .sum();
    let cont: f64 = d
        .parts()
        .iter()
        .map(|(w, p)| {
            let (lo, hi) = p.support();
            let hi = hi.min(edge);
            w * integrate_with_breaks(
                |s| s.powf(alpha) * p.density(s),
                lo,
                hi,
                &p.breaks(),
                Tolerance::TIGHT,
            )
            .value
        })
        .sum();
    d.cdf(edge) - t.powf(alpha) * (atoms + cont)
}

/// `alpha t^alpha int_0^{1/t} s^(alpha-1) F(s) ds`.
pub fn transform_form3(d: &Distribution, alpha: f64, t: f64) -> f64 {
    williamson_transform_with_breaks(|s| d.cdf(s), alpha, t, &d.breaks())
}

/// Step used by the numerical derivative in [`williamson_invert`].
pub fn inversion_step(t: f64) -> f64 {
    (1e-5f64).max(1e-5 * t).min(0.25 * t)
}

/// Recovers `F(t) = H(t) + t H'(t) / alpha`, differentiating `H`
/// numerically (central differences with one Richardson extrapolation).
pub fn williamson_invert<H: Fn(f64) -> f64>(h: H, alpha: f64, t: f64) -> Result<f64> {
    ensure_positive("t", t)?;
    ensure_positive("alpha", alpha)?;
    let step = inversion_step(t);
    let central = |s: f64| (h(t + s) - h(t - s)) / (2.0 * s);
    let d1 = central(step);
    let d2 = central(0.5 * step);
    let derivative = (4.0 * d2 - d1) / 3.0;
    let value = h(t) + t * derivative / alpha;
    if !value.is_finite() {
        return Err(Error::Numeric(format!(
            "non-finite derivative estimate in inversion at t = {t}"
        )));
    }
    Ok(value)
}

/// Inversion with an analytic derivative.
pub fn williamson_invert_exact<H, D>(h: H, h_prime: D, alpha: f64, t: f64) -> Result<f64>
where
    H: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    ensure_positive("t", t)?;
    let value = h(t) + t * h_prime(t) / alpha;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numeric(format!("non-finite derivative at t = {t}")))
    }
}

/// CDF of `X_n` at `t`: `H^(n-1) [H + n (F - H)]`.
pub fn n_step_cdf(pair: &KendallLawPair, n: u32, t: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    if n == 0 {
        return 1.0;
    }
    let f = pair.f(t);
    let h = pair.h(t);
    let nf = f64::from(n);
    (h.powi(n as i32 - 1) * (h + nf * (f - h))).clamp(0.0, 1.0)
}

/// CDF of `X_{N_t}` with `N_t ~ Poisson(lambda t)`:
/// `[1 + lambda t (F - H)] exp(-lambda t (1 - H))`.
pub fn compound_cdf(pair: &KendallLawPair, lambda: f64, t: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let lt = lambda * t;
    if x == 0.0 {
        return (-lt).exp();
    }
    let tail = pair.h_tail(x);
    let f_minus_h = pair.f(x) - (1.0 - tail);
    ((1.0 + lt * f_minus_h) * (-lt * tail).exp()).clamp(0.0, 1.0)
}

/// CDF of `u ⊕ Y_n` at `t`:
/// `1[u <= t] J^(n-1) [J + n Psi(u/t) (G - J)]`, and `1[t >= u]` for `n = 0`.
pub fn shifted_n_step_cdf(u: f64, pair: &KendallLawPair, n: u32, t: f64) -> f64 {
    if t < u {
        return 0.0;
    }
    if n == 0 {
        return 1.0;
    }
    if t <= 0.0 {
        return 0.0;
    }
    let g = pair.f(t);
    let j = pair.h(t);
    let w = psi(pair.alpha, u / t);
    (j.powi(n as i32 - 1) * (j + f64::from(n) * w * (g - j))).clamp(0.0, 1.0)
}

/// The mixture form `Psi(u/t) G_n(t) + (1 - Psi(u/t)) J(t)^n` of the same CDF.
pub fn shifted_n_step_cdf_mixture(u: f64, pair: &KendallLawPair, n: u32, t: f64) -> f64 {
    if t < u {
        return 0.0;
    }
    if n == 0 {
        return 1.0;
    }
    if t <= 0.0 {
        return 0.0;
    }
    let w = psi(pair.alpha, u / t);
    let j = pair.h(t);
    w * n_step_cdf(pair, n, t) + (1.0 - w) * j.powi(n as i32)
}

/// Density of the continuous part of `u ⊕ Y_n` at `t > u`, obtained by
/// differentiating [`shifted_n_step_cdf`] in `t`. `None` when the step
/// law's density is unknown.
pub fn shifted_n_step_density(u: f64, pair: &KendallLawPair, n: u32, t: f64) -> Option<f64> {
    if n == 0 || t <= u || t <= 0.0 {
        return Some(0.0);
    }
    let a = pair.alpha;
    let g = pair.f(t);
    let g_density = pair.density(t)?;
    let j = pair.h(t);
    let j_prime = a * (g - j) / t;
    let w = psi(a, u / t);
    let w_prime = if u < t { a * u.powf(a) * t.powf(-a - 1.0) } else { 0.0 };
    let nf = f64::from(n);
    let k = j + nf * w * (g - j);
    let k_prime = j_prime + nf * w_prime * (g - j) + nf * w * (g_density - j_prime);
    let lead = if n >= 2 {
        (nf - 1.0) * j.powi(n as i32 - 2) * j_prime * k
    } else {
        0.0
    };
    Some(lead + j.powi(n as i32 - 1) * k_prime)
}

/// CDF of `u ⊕ Y_{N_t}` at `x`:
/// `1[x >= u] [1 + lambda t Psi(u/x) (G - J)] exp(-lambda t (1 - J))`.
pub fn shifted_compound_cdf(u: f64, pair: &KendallLawPair, lambda: f64, t: f64, x: f64) -> f64 {
    if x < u {
        return 0.0;
    }
    let lt = lambda * t;
    if x <= 0.0 {
        return 1.0;
    }
    let tail = pair.h_tail(x);
    let g_minus_j = pair.f(x) - (1.0 - tail);
    let w = psi(pair.alpha, u / x);
    ((1.0 + lt * w * g_minus_j) * (-lt * tail).exp()).clamp(0.0, 1.0)
}

/// `P(delta_x ⋄ delta_y <= t) = (1 - (x y / t^2)^alpha) 1[x <= t, y <= t]`.
pub fn transition_cdf_points(alpha: f64, x: f64, y: f64, t: f64) -> f64 {
    if x > t || y > t {
        return 0.0;
    }
    1.0 - (x * y / (t * t)).powf(alpha)
}

/// One-step CDF from state `v`: `[Psi(v/t) F(t) + (1 - Psi(v/t)) H(t)] 1[v <= t]`.
pub fn one_step_from_point_cdf(v: f64, pair: &KendallLawPair, t: f64) -> f64 {
    if v > t || t <= 0.0 {
        return if v <= t { 1.0 } else { 0.0 };
    }
    let w = psi(pair.alpha, v / t);
    w * pair.f(t) + (1.0 - w) * pair.h(t)
}

/// CDF of `v ⊕ X_n`; the same expression as [`shifted_n_step_cdf`] with
/// start `v` and the claim-side pair.
pub fn started_n_step_cdf(v: f64, pair: &KendallLawPair, n: u32, t: f64) -> f64 {
    shifted_n_step_cdf(v, pair, n, t)
}

/// Poisson(mean) probabilities `p_0, p_1, ...`, truncated once the
/// remaining tail mass falls below `tail`.
pub fn poisson_weights(mean: f64, tail: f64) -> Result<Vec<f64>> {
    ensure_nonnegative("mean", mean)?;
    let mut out = Vec::new();
    let mut log_p = -mean;
    let mut acc = 0.0;
    let mut n = 0u32;
    loop {
        let p = log_p.exp();
        out.push(p);
        acc += p;
        n += 1;
        if (1.0 - acc) < tail && f64::from(n) > mean {
            break;
        }
        if n > 1_000_000 {
            return Err(Error::Numeric("Poisson series did not truncate".into()));
        }
        log_p += mean.ln() - f64::from(n).ln();
    }
    Ok(out)
}
