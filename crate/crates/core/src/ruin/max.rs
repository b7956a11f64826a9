//! The max model: `X_n = max(U_1..U_n)`, `u ⊕ Y_n = max(u, V_1..V_n)`.
//!
//! With densities, survival satisfies
//! `delta(u) = delta(u) G(u) F(u) + int_u^inf delta(y) F(y) dG(y)`,
//! equivalently `(ln delta)' = G f / (1 - F G)` with `delta = 1` once `u`
//! is beyond the claims' support.

use super::{Method, RuinEstimate, SurvivalGrid};
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::measures::{Continuous, Distribution};
use crate::quad::{integrate_with_breaks, Tolerance};

/// Upper limit of the divergence search on unbounded supports.
const FAR: f64 = 1e12;
/// Log-survival past which `delta` is reported as zero.
const LOG_ZERO: f64 = 700.0;

/// `(a, b)` when claims are `uniform(0, a)` and premiums `uniform(0, b)`.
pub fn uniform_pair(claims: &Distribution, premiums: &Distribution) -> Option<(f64, f64)> {
    let pick = |d: &Distribution| match (d.atoms(), d.parts()) {
        ([], [(w, Continuous::Uniform { low, high })]) if *w == 1.0 && *low == 0.0 => Some(*high),
        _ => None,
    };
    Some((pick(claims)?, pick(premiums)?))
}

/// `delta(u) = sqrt((1 - a/b) / (1 - u^2/(a b)))` below `a`, one above.
pub fn max_ruin_closed_uniform(u: f64, a: f64, b: f64) -> Result<RuinEstimate> {
    ensure_nonnegative("u", u)?;
    ensure_positive("a", a)?;
    ensure_positive("b", b)?;
    if a >= b {
        return Err(Error::InvalidParameter {
            name: "b",
            value: b,
            reason: "the closed form needs a < b",
        });
    }
    let survival = if u >= a {
        1.0
    } else {
        ((1.0 - a / b) / (1.0 - u * u / (a * b))).sqrt()
    };
    Ok(RuinEstimate::analytic(u, survival, Method::ClosedForm))
}

/// Premiums fixed at `a`: survival is one exactly when every claim stays
/// strictly below `u ∨ a`, and zero otherwise.
pub fn max_ruin_lom(u: f64, a: f64, f: &Distribution) -> Result<RuinEstimate> {
    ensure_nonnegative("u", u)?;
    ensure_positive("a", a)?;
    let level = u.max(a);
    // P(U >= level), kept exact in the tail.
    let reach = f.survival(level) + (f.cdf(level) - f.cdf_left(level));
    let survival = if reach > 0.0 { 0.0 } else { 1.0 };
    Ok(RuinEstimate::analytic(u, survival, Method::ClosedForm))
}

struct LogSurvival<'a> {
    f: &'a Distribution,
    g: &'a Distribution,
    top: f64,
    breaks: Vec<f64>,
    /// Nonintegrable blow-up at `top`: `1 - F G` vanishes there linearly.
    singular: bool,
}

impl<'a> LogSurvival<'a> {
    fn new(f: &'a Distribution, g: &'a Distribution) -> Result<Self> {
        if !f.is_absolutely_continuous() || !g.is_absolutely_continuous() {
            return Err(Error::Unsupported(
                "the max survival ODE needs absolutely continuous claim and premium laws".into(),
            ));
        }
        let top = f.support_upper();
        let mut breaks = f.breaks();
        breaks.extend(g.breaks());
        let mut s = LogSurvival {
            f,
            g,
            top,
            breaks,
            singular: false,
        };
        if top.is_finite() && g.survival(top) == 0.0 {
            // Local exponent k in rate ~ k / (top - y): any k > 0 makes the
            // integral diverge logarithmically, so delta = 0 below top.
            let eps = 1e-7 * top.max(1.0);
            let k = s.rate(top - eps) * eps;
            s.singular = k > 1e-6;
        }
        Ok(s)
    }

    /// `G f / (1 - F G)`, with the denominator as `(1 - F) + F (1 - G)`.
    fn rate(&self, y: f64) -> f64 {
        let fy = self.f.density(y);
        if fy == 0.0 {
            return 0.0;
        }
        let denom = self.f.survival(y) + self.f.cdf(y) * self.g.survival(y);
        if denom <= 0.0 {
            return f64::INFINITY;
        }
        self.g.cdf(y) * fy / denom
    }

    /// `int_u^top rate`, or `None` when it diverges.
    fn integral(&self, u: f64) -> Option<f64> {
        if u >= self.top {
            return Some(0.0);
        }
        if self.singular {
            return None;
        }
        let tol = Tolerance::with_abs(1e-13);
        if self.top.is_finite() {
            let v = integrate_with_breaks(|y| self.rate(y), u, self.top, &self.breaks, tol).value;
            return v.is_finite().then_some(v);
        }
        // Unbounded claims: add doubling pieces until they stop contributing.
        let mut total = 0.0;
        let mut lo = u;
        let mut quiet = 0;
        while lo < FAR {
            let hi = 2.0 * lo + 1.0;
            let piece = integrate_with_breaks(|y| self.rate(y), lo, hi, &self.breaks, tol).value;
            total += piece;
            if !total.is_finite() || total > LOG_ZERO {
                return None;
            }
            quiet = if piece <= 1e-15 * (1.0 + total) { quiet + 1 } else { 0 };
            if quiet >= 3 {
                return Some(total);
            }
            lo = hi;
        }
        None
    }

    fn delta(&self, u: f64) -> f64 {
        self.integral(u).map_or(0.0, |v| (-v).exp())
    }
}

/// Survival of the max model on `u_grid` by integrating the log-derivative
/// backward from the claims' upper support end. The residual of the
/// integral equation is checked on the grid with an independent quadrature.
pub fn max_ruin_ode(f: &Distribution, g: &Distribution, u_grid: &[f64]) -> Result<SurvivalGrid> {
    let ls = LogSurvival::new(f, g)?;
    for &u in u_grid {
        ensure_nonnegative("u", u)?;
    }
    if u_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name: "u_grid",
            value: f64::NAN,
            reason: "must be strictly increasing",
        });
    }
    let delta_values: Vec<f64> = u_grid.iter().map(|&u| ls.delta(u)).collect();
    let mut grid = SurvivalGrid {
        z_grid: u_grid.to_vec(),
        delta_values,
        rho: None,
        residual: 0.0,
    };
    grid.residual = residual_with(&ls, &grid);
    Ok(grid)
}

fn residual_with(ls: &LogSurvival<'_>, grid: &SurvivalGrid) -> f64 {
    let n = grid.z_grid.len();
    let stride = (n / 20).max(1);
    let mut worst: f64 = 0.0;
    for i in (0..n).step_by(stride) {
        let u = grid.z_grid[i];
        let d = grid.delta_values[i];
        let tail = integrate_with_breaks(
            |y| ls.delta(y) * ls.f.cdf(y) * ls.g.density(y),
            u,
            f64::INFINITY,
            &ls.breaks,
            Tolerance::with_abs(1e-11),
        )
        .value;
        worst = worst.max((d - d * ls.g.cdf(u) * ls.f.cdf(u) - tail).abs());
    }
    worst
}

/// Largest residual of `delta(u) - delta(u) G(u) F(u) - int_u^inf delta F dG`
/// over the grid's abscissae.
pub fn max_survival_integral_residual(f: &Distribution, g: &Distribution, grid: &SurvivalGrid) -> Result<f64> {
    Ok(residual_with(&LogSurvival::new(f, g)?, grid))
}
