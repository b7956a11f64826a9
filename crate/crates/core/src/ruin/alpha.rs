//! The α-stable model in the scale `z = u^alpha`.
//!
//! With `F` the law of `U^alpha`, `kappa = gamma / beta^alpha` and
//! `rho = kappa E U^alpha`, survival solves the renewal equation
//! `delta(z) = 1 - rho + kappa int_0^z delta(z - x) (1 - F(x)) dx`.

use super::{Method, RuinEstimate, SurvivalGrid};
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::measures::{Distribution, Moment};
use crate::quad::{integrate_with_breaks, Tolerance};
use crate::risk::{alpha_model, RiskModel};

pub const DEFAULT_VOLTERRA_STEPS: usize = 2000;

/// Grid length used for capital level `z = u^alpha`.
pub fn default_z_max(z: f64) -> f64 {
    10f64.max(5.0 * z)
}

fn net_profit(f: &Distribution, gamma: f64, beta_alpha: f64) -> Result<f64> {
    ensure_positive("gamma", gamma)?;
    ensure_positive("beta_alpha", beta_alpha)?;
    let mu = match f.mean()? {
        Moment::Finite(m) => m,
        Moment::Infinite => return Err(Error::InfiniteMoment("E U^alpha is infinite".into())),
    };
    let rho = gamma * mu / beta_alpha;
    if rho >= 1.0 {
        return Err(Error::CertainRuin { rho });
    }
    Ok(rho)
}

/// Solves the renewal equation on `steps` uniform intervals of `[0, z_max]`.
///
/// `delta` is taken piecewise linear between nodes and integrated exactly
/// against `1 - F` (hat-function weights), which is second-order accurate
/// even where `F` has kinks.
pub fn alpha_ruin_volterra(
    f: &Distribution,
    gamma: f64,
    beta_alpha: f64,
    z_max: f64,
    steps: usize,
) -> Result<SurvivalGrid> {
    let rho = net_profit(f, gamma, beta_alpha)?;
    ensure_positive("z_max", z_max)?;
    if steps == 0 {
        return Err(Error::InvalidParameter {
            name: "steps",
            value: 0.0,
            reason: "must be positive",
        });
    }
    let kappa = gamma / beta_alpha;
    let h = z_max / steps as f64;
    let breaks = f.breaks();
    let tol = Tolerance::with_abs(1e-14);
    // a[k], b[k]: 1 - F on interval k against the falling and rising half-hats.
    let (a, b): (Vec<f64>, Vec<f64>) = (0..steps)
        .map(|k| {
            let lo = k as f64 * h;
            let hi = lo + h;
            let fall = integrate_with_breaks(|x| (hi - x) / h * f.survival(x), lo, hi, &breaks, tol).value;
            let rise = integrate_with_breaks(|x| (x - lo) / h * f.survival(x), lo, hi, &breaks, tol).value;
            (fall, rise)
        })
        .unzip();
    // Weight of delta(z_n - z_j) for interior nodes j.
    let w: Vec<f64> = (1..steps).map(|j| b[j - 1] + a[j]).collect();

    let mut delta = Vec::with_capacity(steps + 1);
    delta.push(1.0 - rho);
    let diag = 1.0 - kappa * a[0];
    for n in 1..=steps {
        let mut sum = delta[0] * b[n - 1];
        for j in 1..n {
            sum += delta[n - j] * w[j - 1];
        }
        delta.push((1.0 - rho + kappa * sum) / diag);
    }
    let z_grid: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
    let mut grid = SurvivalGrid {
        z_grid,
        delta_values: delta,
        rho: Some(rho),
        residual: 0.0,
    };
    grid.residual = renewal_residual(&grid, f, kappa, rho);
    Ok(grid)
}

/// Re-substitutes the interpolated solution into the renewal equation at a
/// spread of nodes, integrating independently of the solver's weights.
fn renewal_residual(grid: &SurvivalGrid, f: &Distribution, kappa: f64, rho: f64) -> f64 {
    let n = grid.z_grid.len() - 1;
    let stride = (n / 40).max(1);
    let mut worst: f64 = 0.0;
    let mut breaks = f.breaks();
    breaks.extend_from_slice(&grid.z_grid);
    for i in (0..=n).step_by(stride).chain(std::iter::once(n)) {
        let z = grid.z_grid[i];
        let integral = integrate_with_breaks(
            |x| grid.eval(z - x).unwrap_or(grid.delta_values[0]) * f.survival(x),
            0.0,
            z,
            &breaks,
            Tolerance::with_abs(1e-13),
        )
        .value;
        worst = worst.max((grid.delta_values[i] - (1.0 - rho) - kappa * integral).abs());
    }
    worst
}

/// `|delta_hat(s) - (beta^alpha - gamma mu_alpha) / ((beta^alpha - gamma G_hat(s)) s)|`
/// at each `s`, where `G_hat` is the Laplace transform of `1 - F` and
/// `delta_hat` is taken from the grid (held at its last value beyond it).
pub fn alpha_ruin_laplace_check(
    grid: &SurvivalGrid,
    f: &Distribution,
    gamma: f64,
    beta_alpha: f64,
    s_values: &[f64],
) -> Result<Vec<f64>> {
    let rho = net_profit(f, gamma, beta_alpha)?;
    let mu = rho * beta_alpha / gamma;
    s_values
        .iter()
        .map(|&s| {
            ensure_positive("s", s)?;
            let lhs = laplace_of_grid(grid, s);
            let g_hat = integrate_with_breaks(
                |z| (-s * z).exp() * f.survival(z),
                0.0,
                f64::INFINITY,
                &f.breaks(),
                Tolerance::with_abs(1e-13),
            )
            .value;
            let rhs = (beta_alpha - gamma * mu) / ((beta_alpha - gamma * g_hat) * s);
            Ok((lhs - rhs).abs())
        })
        .collect()
}

/// Exact Laplace transform of the piecewise-linear interpolant.
fn laplace_of_grid(grid: &SurvivalGrid, s: f64) -> f64 {
    let zs = &grid.z_grid;
    let ds = &grid.delta_values;
    let mut total = 0.0;
    for i in 1..zs.len() {
        let (a, b) = (zs[i - 1], zs[i]);
        let h = b - a;
        let (ea, eb) = ((-s * a).exp(), (-s * b).exp());
        let flat = (ea - eb) / s;
        let ramp = (ea - eb * (1.0 + s * h)) / (s * s);
        total += ds[i - 1] * flat + (ds[i] - ds[i - 1]) / h * ramp;
    }
    let last = zs.len() - 1;
    total + ds[last] * (-s * zs[last]).exp() / s
}

/// Ruin at capital `u` for an α-stable risk model, read off the renewal
/// solution at `z = u^alpha`.
pub fn alpha_ruin(u: f64, model: &RiskModel) -> Result<RuinEstimate> {
    Ok(alpha_ruin_with_steps(u, model, DEFAULT_VOLTERRA_STEPS)?.0)
}

/// As [`alpha_ruin`], with an explicit step count; also returns the grid.
pub fn alpha_ruin_with_steps(u: f64, model: &RiskModel, steps: usize) -> Result<(RuinEstimate, SurvivalGrid)> {
    ensure_nonnegative("u", u)?;
    let p = alpha_model(model)?;
    let z = u.powf(p.alpha);
    let grid = alpha_ruin_volterra(&p.claims_power, p.gamma, p.beta_alpha, default_z_max(z), steps)?;
    let survival = grid
        .eval(z)
        .ok_or_else(|| Error::Numeric(format!("z = {z} outside the solved grid")))?;
    Ok((RuinEstimate::analytic(u, survival, Method::Volterra), grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_oracle() {
        let f = Distribution::exponential(1.0).unwrap();
        let g = alpha_ruin_volterra(&f, 1.0, 2.0, 10.0, 2000).unwrap();
        let worst = g
            .z_grid
            .iter()
            .zip(&g.delta_values)
            .map(|(z, d)| (d - (1.0 - 0.5 * (-0.5 * z).exp())).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-3, "{worst}");
        assert!(g.residual <= 1e-6, "{}", g.residual);
        assert!(g.is_nondecreasing());
    }

    #[test]
    fn refuses_certain_ruin() {
        let f = Distribution::exponential(1.0).unwrap();
        assert!(matches!(
            alpha_ruin_volterra(&f, 1.0, 1.0, 10.0, 100),
            Err(Error::CertainRuin { .. })
        ));
        assert!(matches!(
            alpha_ruin_volterra(&f, 3.0, 2.0, 10.0, 100),
            Err(Error::CertainRuin { .. })
        ));
    }

    #[test]
    fn laplace_of_constant() {
        let g = SurvivalGrid {
            z_grid: vec![0.0, 1.0, 2.5],
            delta_values: vec![1.0; 3],
            rho: None,
            residual: 0.0,
        };
        assert!((laplace_of_grid(&g, 0.7) - 1.0 / 0.7).abs() < 1e-14);
    }
}
