//! Random walks driven by a generalized convolution.
//!
//! `X_{k+1}` is a draw from `delta_{X_k} ⋄ delta_{U_{k+1}}` with
//! `U_{k+1} ~ mu`. The α-stable, max and Kendall algebras have pathwise
//! recursions; every other algebra is sampled from the exact law of the
//! point-mass convolution.
//!
//! Randomness per path comes from separate streams (step, catalyzer
//! uniform, Pareto, mixture). Step `k` always uses draw `k` of each stream,
//! so a path can be restarted from any `(k, X_k)` and reproduce its suffix.

use rayon::prelude::*;
use serde::Serialize;

use crate::convolutions::{convolve_points, Algebra};
use crate::error::{ensure_nonnegative, Error, Result};
use crate::measures::Distribution;
use crate::rng::{mix64, path_seed, stream, Uniforms};
use crate::stats::ks_two_sample;

/// Salt separating the generic sampler's randomness from the specialized one.
const GENERIC_SALT: u64 = 0x6E6E_7269_635F_7361;

/// A finite trajectory `X_0, ..., X_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkPath {
    pub states: Vec<f64>,
    pub algebra: Algebra,
    pub start: f64,
    pub seed: u64,
}

impl WalkPath {
    pub fn steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn terminal(&self) -> f64 {
        *self.states.last().expect("a path holds at least its start")
    }
}

/// Which sampler drives the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    /// Pathwise recursion where one exists, the generic sampler otherwise.
    Auto,
    /// Always draw from the exact law of `delta_x ⋄ delta_u`.
    Generic,
}

/// One Kendall step driven by its catalyzers: with `M = max(x, u)`,
/// `m = min(x, u)` and `rho = (m/M)^alpha`, returns `M` when `xi >= rho`
/// and `M * pi` otherwise.
pub fn kendall_step(x: f64, u: f64, xi: f64, pi: f64, alpha: f64) -> f64 {
    let (m, big) = if x <= u { (x, u) } else { (u, x) };
    if big == 0.0 {
        return 0.0;
    }
    let rho = (m / big).powf(alpha);
    if xi < rho {
        big * pi
    } else {
        big
    }
}

/// Pareto draw with density `2 alpha x^(-2 alpha - 1)` on `[1, inf)`.
#[inline]
pub fn pareto_2alpha_draw(alpha: f64, q: f64) -> f64 {
    (-(-q).ln_1p() / (2.0 * alpha)).exp()
}

/// Steps a single walk forward, one convolution at a time.
#[derive(Debug, Clone)]
pub struct Walker<'a> {
    algebra: Algebra,
    law: &'a Distribution,
    state: f64,
    index: u64,
    generic: bool,
    step: Uniforms,
    xi: Uniforms,
    pareto: Uniforms,
    mix: Uniforms,
}

impl<'a> Walker<'a> {
    /// Walk started at `start` whose randomness is keyed by `seed`.
    pub fn new(algebra: Algebra, law: &'a Distribution, start: f64, seed: u64, sampler: Sampler) -> Self {
        Self::resume(algebra, law, start, 0, seed, sampler)
    }

    /// Walk that has already taken `index` steps and sits at `state`.
    pub fn resume(
        algebra: Algebra,
        law: &'a Distribution,
        state: f64,
        index: u64,
        seed: u64,
        sampler: Sampler,
    ) -> Self {
        let generic = match sampler {
            Sampler::Generic => true,
            Sampler::Auto => matches!(
                algebra,
                Algebra::Kingman { .. } | Algebra::KendallType { .. }
            ),
        };
        let seed = if sampler == Sampler::Generic {
            mix64(seed ^ GENERIC_SALT)
        } else {
            seed
        };
        Walker {
            algebra,
            law,
            state,
            index,
            generic,
            step: Uniforms::at(seed, stream::STEP, index),
            xi: Uniforms::at(seed, stream::XI, index),
            pareto: Uniforms::at(seed, stream::PARETO, index),
            mix: Uniforms::at(seed, stream::MIX, index),
        }
    }

    pub fn state(&self) -> f64 {
        self.state
    }

    pub fn steps_taken(&self) -> u64 {
        self.index
    }

    /// Next step draw `U ~ mu`.
    #[inline]
    fn draw_step(&mut self) -> f64 {
        self.law.quantile(self.step.next_open())
    }

    /// Advances one step and returns the new state.
    pub fn advance(&mut self) -> f64 {
        let u = self.draw_step();
        self.advance_with(u)
    }

    /// Advances one step with a given step value `u`.
    pub fn advance_with(&mut self, u: f64) -> f64 {
        self.index += 1;
        let x = self.state;
        self.state = if self.generic {
            let w = self.mix.next_open();
            match convolve_points(&self.algebra, x, u) {
                Ok(d) => d.draw(w),
                Err(_) => f64::NAN,
            }
        } else {
            match self.algebra {
                Algebra::Classical => x + u,
                Algebra::Symmetric => {
                    if self.mix.next_open() < 0.5 {
                        (x - u).abs()
                    } else {
                        x + u
                    }
                }
                Algebra::AlphaStable { alpha } => {
                    let (m, big) = if x <= u { (x, u) } else { (u, x) };
                    if big == 0.0 {
                        0.0
                    } else {
                        big * (1.0 + (m / big).powf(alpha)).powf(1.0 / alpha)
                    }
                }
                Algebra::Max => x.max(u),
                Algebra::Kendall { alpha } => {
                    let xi = self.xi.next_open();
                    let pi = pareto_2alpha_draw(alpha, self.pareto.next_open());
                    kendall_step(x, u, xi, pi, alpha)
                }
                Algebra::Kingman { .. } | Algebra::KendallType { .. } => {
                    unreachable!("sampled generically")
                }
            }
        };
        self.state
    }
}

fn validate(algebra: &Algebra, start: f64) -> Result<()> {
    ensure_nonnegative("start", start)?;
    if let Algebra::Kingman { s } = *algebra {
        Algebra::kingman(s)?;
    }
    Ok(())
}

/// One path of `n` steps from `start`.
pub fn simulate(algebra: &Algebra, step_law: &Distribution, n: usize, start: f64, seed: u64) -> Result<WalkPath> {
    simulate_with(algebra, step_law, n, start, seed, Sampler::Auto)
}

pub fn simulate_with(
    algebra: &Algebra,
    step_law: &Distribution,
    n: usize,
    start: f64,
    seed: u64,
    sampler: Sampler,
) -> Result<WalkPath> {
    validate(algebra, start)?;
    let mut walker = Walker::new(*algebra, step_law, start, seed, sampler);
    let mut states = Vec::with_capacity(n + 1);
    states.push(start);
    for _ in 0..n {
        states.push(walker.advance());
    }
    Ok(WalkPath {
        states,
        algebra: *algebra,
        start,
        seed,
    })
}

/// Path driven by explicit step values; catalyzer randomness is keyed by `seed`.
pub fn walk_with_steps(algebra: &Algebra, steps: &[f64], start: f64, seed: u64) -> Result<WalkPath> {
    validate(algebra, start)?;
    let unit = Distribution::point(0.0)?;
    let mut walker = Walker::new(*algebra, &unit, start, seed, Sampler::Auto);
    let mut states = Vec::with_capacity(steps.len() + 1);
    states.push(start);
    for &u in steps {
        ensure_nonnegative("step", u)?;
        states.push(walker.advance_with(u));
    }
    Ok(WalkPath {
        states,
        algebra: *algebra,
        start,
        seed,
    })
}

/// Continues a path of seed `seed` from step `k` at state `x_k` up to step `n`;
/// the returned states are `X_k, ..., X_n`.
pub fn simulate_from(
    algebra: &Algebra,
    step_law: &Distribution,
    k: usize,
    x_k: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    validate(algebra, x_k)?;
    if n < k {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "must be at least the resume index",
        });
    }
    let mut walker = Walker::resume(*algebra, step_law, x_k, k as u64, seed, Sampler::Auto);
    let mut states = Vec::with_capacity(n - k + 1);
    states.push(x_k);
    for _ in k..n {
        states.push(walker.advance());
    }
    Ok(states)
}

/// `X_n` for `paths` independent paths; path `i` is keyed by `path_seed(seed, i)`.
/// Output order is by path index regardless of the thread pool.
pub fn terminal_states(
    algebra: &Algebra,
    step_law: &Distribution,
    n: usize,
    start: f64,
    paths: usize,
    seed: u64,
    sampler: Sampler,
) -> Result<Vec<f64>> {
    validate(algebra, start)?;
    Ok((0..paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut w = Walker::new(*algebra, step_law, start, path_seed(seed, i), sampler);
            for _ in 0..n {
                w.advance();
            }
            w.state()
        })
        .collect())
}

/// Full paths for `paths` independent walks.
pub fn paths(
    algebra: &Algebra,
    step_law: &Distribution,
    n: usize,
    start: f64,
    paths: usize,
    seed: u64,
) -> Result<Vec<WalkPath>> {
    (0..paths as u64)
        .into_par_iter()
        .map(|i| simulate(algebra, step_law, n, start, path_seed(seed, i)))
        .collect()
}

/// `X_{N_t}` with `N_t ~ Poisson(lambda t)` drawn per path by inversion.
pub fn compound_terminal_states(
    algebra: &Algebra,
    step_law: &Distribution,
    lambda: f64,
    t: f64,
    start: f64,
    paths: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    validate(algebra, start)?;
    let mean = lambda * t;
    Ok((0..paths as u64)
        .into_par_iter()
        .map(|i| {
            let s = path_seed(seed, i);
            let n = poisson_inverse(mean, Uniforms::new(s, stream::COUNT).next_open());
            let mut w = Walker::new(*algebra, step_law, start, s, Sampler::Auto);
            for _ in 0..n {
                w.advance();
            }
            w.state()
        })
        .collect())
}

/// Smallest `n` with `P(N <= n) >= q` for `N ~ Poisson(mean)`.
/// Monotone in both `q` and `mean`, so a shared uniform couples horizons.
pub fn poisson_inverse(mean: f64, q: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean > 700.0 {
        // Work in log space to avoid underflow of exp(-mean).
        let mut n = 0u64;
        let mut log_p = -mean;
        let mut acc = 0.0;
        loop {
            acc += log_p.exp();
            if acc >= q {
                return n;
            }
            n += 1;
            log_p += mean.ln() - (n as f64).ln();
            if n > 100 * mean as u64 + 1000 {
                return n;
            }
        }
    }
    let mut p = (-mean).exp();
    let mut acc = p;
    let mut n = 0u64;
    while acc < q {
        n += 1;
        p *= mean / n as f64;
        acc += p;
        if p == 0.0 && acc < q {
            break;
        }
    }
    n
}

/// Two-sample KS distance between terminal states of the generic sampler
/// and the pathwise recursion.
pub fn simulate_generic_vs_specialized(
    algebra: &Algebra,
    step_law: &Distribution,
    n: usize,
    paths: usize,
    seed: u64,
) -> Result<f64> {
    if !matches!(
        algebra,
        Algebra::AlphaStable { .. } | Algebra::Max | Algebra::Kendall { .. }
    ) {
        return Err(Error::Unsupported(format!(
            "no pathwise recursion for {}",
            algebra.name()
        )));
    }
    let a = terminal_states(algebra, step_law, n, 0.0, paths, seed, Sampler::Auto)?;
    let b = terminal_states(algebra, step_law, n, 0.0, paths, seed, Sampler::Generic)?;
    Ok(ks_two_sample(&a, &b))
}
