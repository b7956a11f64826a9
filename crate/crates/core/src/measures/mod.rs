//! Probability laws on `[0, inf)`: atoms plus weighted absolutely
//! continuous parts, with exact CDFs, quantiles, moments and samplers.

mod continuous;
mod spec;

pub use continuous::{
    kendall_type_cdf, kendall_type_density, kendall_type_survival, Continuous, KendallTypeLaw,
};
pub use spec::LawSpec;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::quad::{integrate_with_breaks, Tolerance};
use crate::rng::{stream, Uniforms};

pub(crate) use continuous::bisect;

const MASS_TOLERANCE: f64 = 1e-10;

/// Largest point at which moment integrals are still evaluated; a tail
/// that has not settled by then is reported as an infinite moment.
pub const MOMENT_TRUNCATION: f64 = 1e12;

/// An atom: a point mass at `at` with probability `mass`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub at: f64,
    pub mass: f64,
}

/// A moment that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Moment::Infinite)
    }
}

/// A probability law on `[0, inf)`.
///
/// Immutable once built; every constructor checks that the masses sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    atoms: Vec<Atom>,
    parts: Vec<(f64, Continuous)>,
}

impl Distribution {
    /// Builds a law from atoms and weighted continuous parts.
    pub fn new(atoms: Vec<Atom>, parts: Vec<(f64, Continuous)>) -> Result<Self> {
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.at.total_cmp(&b.at));
        for a in sorted {
            if !a.at.is_finite() || a.at < 0.0 || a.mass.is_nan() || a.mass < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "atom ({}, {}) outside [0, inf) x [0, 1]",
                    a.at, a.mass
                )));
            }
            if a.mass == 0.0 {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.at == a.at => last.mass += a.mass,
                _ => merged.push(a),
            }
        }
        let parts: Vec<(f64, Continuous)> = parts.into_iter().filter(|(w, _)| *w > 0.0).collect();
        for (w, part) in &parts {
            if !w.is_finite() {
                return Err(Error::InvalidDistribution(format!("weight {w}")));
            }
            let (lo, hi) = part.support();
            if lo.is_nan() || hi.is_nan() || lo < 0.0 || hi < lo {
                return Err(Error::InvalidDistribution(format!(
                    "continuous part with support [{lo}, {hi}]"
                )));
            }
        }
        let total: f64 =
            merged.iter().map(|a| a.mass).sum::<f64>() + parts.iter().map(|p| p.0).sum::<f64>();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "total mass {total} differs from 1"
            )));
        }
        Ok(Distribution {
            atoms: merged,
            parts,
        })
    }

    /// Point mass `delta_x`.
    pub fn point(x: f64) -> Result<Self> {
        ensure_nonnegative("x", x)?;
        Ok(Distribution {
            atoms: vec![Atom { at: x, mass: 1.0 }],
            parts: vec![],
        })
    }

    fn single(part: Continuous) -> Self {
        Distribution {
            atoms: vec![],
            parts: vec![(1.0, part)],
        }
    }

    /// Pareto law with density `2 alpha x^(-2 alpha - 1)` on `[1, inf)`.
    pub fn pareto_2alpha(alpha: f64) -> Result<Self> {
        ensure_positive("alpha", alpha)?;
        Ok(Self::single(Continuous::Pareto {
            tail: 2.0 * alpha,
            scale: 1.0,
        }))
    }

    /// Lack-of-memory law of the stable convolution: `1 - exp(-gamma x^alpha)`.
    pub fn lom_alpha(gamma: f64, alpha: f64) -> Result<Self> {
        ensure_positive("gamma", gamma)?;
        ensure_positive("alpha", alpha)?;
        Ok(Self::single(Continuous::Weibull {
            gamma,
            shape: alpha,
        }))
    }

    /// Exponential law with the given mean.
    pub fn exponential(mean: f64) -> Result<Self> {
        ensure_positive("mean", mean)?;
        Self::lom_alpha(1.0 / mean, 1.0)
    }

    /// Lack-of-memory law of the max convolution: the point mass at `a`.
    pub fn lom_max(a: f64) -> Result<Self> {
        ensure_positive("a", a)?;
        Self::point(a)
    }

    /// Lack-of-memory law of the Kendall convolution: `min((c x)^alpha, 1)`.
    pub fn lom_kendall(c: f64, alpha: f64) -> Result<Self> {
        ensure_positive("c", c)?;
        ensure_positive("alpha", alpha)?;
        Ok(Self::single(Continuous::PowerLaw { c, alpha }))
    }

    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        ensure_nonnegative("low", low)?;
        ensure_positive("high", high)?;
        if high <= low {
            return Err(Error::InvalidParameter {
                name: "high",
                value: high,
                reason: "must exceed low",
            });
        }
        Ok(Self::single(Continuous::Uniform { low, high }))
    }

    /// User data: explicit atoms plus a piecewise-linear CDF for the
    /// continuous remainder. The knots run from CDF value 0 to 1 and are
    /// scaled by the mass the atoms leave over.
    pub fn table(atoms: Vec<Atom>, knots: Vec<(f64, f64)>) -> Result<Self> {
        let atom_mass: f64 = atoms.iter().map(|a| a.mass).sum();
        let rest = 1.0 - atom_mass;
        if knots.is_empty() {
            return Self::new(atoms, vec![]);
        }
        if knots.len() < 2 {
            return Err(Error::InvalidDistribution("table cdf needs at least two knots".into()));
        }
        let ok = knots[0].1 == 0.0
            && (knots[knots.len() - 1].1 - 1.0).abs() < 1e-12
            && knots[0].0 >= 0.0
            && knots.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 >= w[0].1);
        if !ok {
            return Err(Error::InvalidDistribution(
                "table cdf knots must have increasing x, nondecreasing F from 0 to 1".into(),
            ));
        }
        Self::new(atoms, vec![(rest, Continuous::Linear { knots })])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn parts(&self) -> &[(f64, Continuous)] {
        &self.parts
    }

    pub fn is_absolutely_continuous(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.at <= x).map(|a| a.mass).sum();
        let cont: f64 = self.parts.iter().map(|(w, p)| w * p.cdf(x)).sum();
        (atoms + cont).min(1.0)
    }

    /// `P(X > x)`, accurate in the tails.
    pub fn survival(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.at > x).map(|a| a.mass).sum();
        let cont: f64 = self.parts.iter().map(|(w, p)| w * p.survival(x)).sum();
        (atoms + cont).clamp(0.0, 1.0)
    }

    /// `P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.at < x).map(|a| a.mass).sum();
        let cont: f64 = self.parts.iter().map(|(w, p)| w * p.cdf(x)).sum();
        (atoms + cont).min(1.0)
    }

    /// Density of the absolutely continuous part (zero on atoms).
    pub fn density(&self, x: f64) -> f64 {
        self.parts.iter().map(|(w, p)| w * p.density(x)).sum()
    }

    pub fn support_lower(&self) -> f64 {
        let a = self.atoms.first().map_or(f64::INFINITY, |a| a.at);
        self.parts.iter().map(|(_, p)| p.support().0).fold(a, f64::min)
    }

    pub fn support_upper(&self) -> f64 {
        let a = self.atoms.last().map_or(0.0, |a| a.at);
        self.parts.iter().map(|(_, p)| p.support().1).fold(a, f64::max)
    }

    /// Points where the CDF is not smooth: atoms, support ends, knots.
    pub fn breaks(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.atoms.iter().map(|a| a.at).collect();
        for (_, p) in &self.parts {
            out.extend(p.breaks());
        }
        out.retain(|x| x.is_finite());
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Generalized inverse `inf { x : F(x) >= q }`.
    pub fn quantile(&self, q: f64) -> f64 {
        if self.atoms.is_empty() && self.parts.len() == 1 {
            return self.parts[0].1.quantile(q);
        }
        if self.parts.is_empty() {
            let mut acc = 0.0;
            for a in &self.atoms {
                acc += a.mass;
                if acc >= q {
                    return a.at;
                }
            }
            return self.atoms.last().map_or(0.0, |a| a.at);
        }
        if let Some(x) = self.ordered_quantile(q) {
            return x;
        }
        let lo = self.support_lower();
        let mut lo_b = lo;
        let mut hi = self.support_upper();
        if !hi.is_finite() {
            hi = lo.max(1.0) * 2.0;
            while self.cdf(hi) < q {
                lo_b = hi;
                hi *= 2.0;
            }
        }
        if self.cdf(lo) >= q {
            return lo;
        }
        bisect(|x| self.cdf(x), q, lo_b, hi)
    }

    /// Fast path when the pieces occupy consecutive, non-overlapping ranges.
    fn ordered_quantile(&self, q: f64) -> Option<f64> {
        enum Piece<'a> {
            Atom(f64),
            Part(&'a Continuous),
        }
        let mut pieces: Vec<(f64, f64, f64, Piece)> = self
            .atoms
            .iter()
            .map(|a| (a.at, a.at, a.mass, Piece::Atom(a.at)))
            .collect();
        for (w, p) in &self.parts {
            let (lo, hi) = p.support();
            pieces.push((lo, hi, *w, Piece::Part(p)));
        }
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        if pieces.windows(2).any(|w| w[0].1 > w[1].0) {
            return None;
        }
        let mut acc = 0.0;
        for (_, hi, mass, piece) in &pieces {
            if acc + mass >= q {
                return Some(match piece {
                    Piece::Atom(x) => *x,
                    Piece::Part(p) => p.quantile(((q - acc) / mass).clamp(0.0, 1.0)),
                });
            }
            acc += mass;
            let _ = hi;
        }
        pieces.last().map(|p| p.1)
    }

    /// One draw from a single uniform `w`: pick an atom or continuous part
    /// by cumulative mass, then invert that part's CDF at the rescaled
    /// remainder of `w`. Exact, and cheaper than [`Distribution::quantile`]
    /// when the parts overlap.
    pub fn draw(&self, w: f64) -> f64 {
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.mass;
            if w < acc {
                return a.at;
            }
        }
        let last = self.parts.len();
        for (i, (mass, part)) in self.parts.iter().enumerate() {
            if w < acc + mass || i + 1 == last {
                let q = ((w - acc) / mass).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
                return part.quantile(q);
            }
            acc += mass;
        }
        self.atoms.last().map_or(0.0, |a| a.at)
    }

    /// Law of `a X`; `a = 0` gives `delta_0`.
    pub fn dilate(&self, a: f64) -> Result<Self> {
        ensure_nonnegative("a", a)?;
        if a == 0.0 {
            return Self::point(0.0);
        }
        Ok(Distribution {
            atoms: self
                .atoms
                .iter()
                .map(|at| Atom {
                    at: at.at * a,
                    mass: at.mass,
                })
                .collect(),
            parts: self.parts.iter().map(|(w, p)| (*w, p.dilate(a))).collect(),
        })
    }

    /// Law of `X^e` for `e > 0`.
    pub fn power(&self, e: f64) -> Result<Self> {
        ensure_positive("e", e)?;
        Ok(Distribution {
            atoms: self
                .atoms
                .iter()
                .map(|at| Atom {
                    at: at.at.powf(e),
                    mass: at.mass,
                })
                .collect(),
            parts: self.parts.iter().map(|(w, p)| (*w, p.power(e))).collect(),
        })
    }

    /// Approximate `sup_x |F(x) - G(x)|`, evaluated at both laws' breaks
    /// (and just below them) and on a dense grid spanning the supports.
    pub fn cdf_distance(&self, other: &Distribution) -> f64 {
        let mut pts = self.breaks();
        pts.extend(other.breaks());
        let lo = self.support_lower().min(other.support_lower());
        let hi_raw = self.support_upper().max(other.support_upper());
        let hi = if hi_raw.is_finite() {
            hi_raw
        } else {
            pts.iter().copied().fold(lo.max(1.0), f64::max) * 1e4
        };
        let n = 4000;
        for i in 0..=n {
            let f = i as f64 / n as f64;
            pts.push(lo + (hi - lo) * f);
            pts.push(lo.max(1e-300) * (hi / lo.max(1e-300)).powf(f));
        }
        let mut d: f64 = 0.0;
        for &x in &pts {
            if !x.is_finite() {
                continue;
            }
            d = d.max((self.cdf(x) - other.cdf(x)).abs());
            d = d.max((self.cdf_left(x) - other.cdf_left(x)).abs());
        }
        d
    }

    /// `E g(X)` for bounded `g`; atoms are summed exactly and `kinks`
    /// marks where `g` is not smooth.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, kinks: &[f64]) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.mass * g(a.at)).sum();
        let cont: f64 = self.parts.iter().map(|(w, p)| w * p.expect(&g, kinks)).sum();
        atoms + cont
    }

    /// `int g(x) f(x) dx` over the absolutely continuous part.
    pub fn integrate_density<G: Fn(f64) -> f64>(&self, g: G, kinks: &[f64]) -> f64 {
        let mut breaks = self.breaks();
        breaks.extend_from_slice(kinks);
        self.parts
            .iter()
            .map(|(w, p)| {
                let (lo, hi) = p.support();
                w * integrate_with_breaks(|x| g(x) * p.density(x), lo, hi, &breaks, Tolerance::DEFAULT)
                    .value
            })
            .sum()
    }

    /// `E X^alpha`.
    ///
    /// Computed as `int_0^inf P(X^alpha > y) dy` with quadrature over
    /// decades. Parts whose tail index does not exceed `alpha`, or whose
    /// integral has not settled by [`MOMENT_TRUNCATION`], give
    /// [`Moment::Infinite`].
    pub fn moment_alpha(&self, alpha: f64) -> Result<Moment> {
        ensure_positive("alpha", alpha)?;
        let mut total: f64 = self.atoms.iter().map(|a| a.mass * a.at.powf(alpha)).sum();
        for (w, part) in &self.parts {
            match part_moment(part, alpha) {
                Moment::Finite(m) => total += w * m,
                Moment::Infinite => return Ok(Moment::Infinite),
            }
        }
        Ok(Moment::Finite(total))
    }

    pub fn mean(&self) -> Result<Moment> {
        self.moment_alpha(1.0)
    }

    /// `n` i.i.d. draws by inverse CDF on the seeded uniform stream.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut u = Uniforms::new(seed, stream::STEP);
        (0..n).map(|_| self.quantile(u.next_open())).collect()
    }
}

fn part_moment(part: &Continuous, alpha: f64) -> Moment {
    if let Some(tau) = part.tail_index() {
        if tau <= alpha {
            return Moment::Infinite;
        }
    }
    let (lo, hi) = part.support();
    let survival = |y: f64| part.survival(y.powf(1.0 / alpha));
    let breaks: Vec<f64> = part.breaks().iter().map(|b| b.powf(alpha)).collect();
    let start = lo.powf(alpha);
    if hi.is_finite() {
        let tail = integrate_with_breaks(survival, start, hi.powf(alpha), &breaks, Tolerance::DEFAULT);
        return Moment::Finite(start + tail.value);
    }
    // Decades [10^k, 10^(k+1)] beyond the lower end, with a geometric
    // extrapolation of the remainder.
    let mut total = start;
    let mut a = start;
    let mut b = start.max(1.0) * 10.0;
    let mut prev: Option<f64> = None;
    let trunc = MOMENT_TRUNCATION.powf(alpha.min(1.0));
    loop {
        let piece = integrate_with_breaks(survival, a, b, &breaks, Tolerance::DEFAULT).value;
        total += piece;
        if let Some(p) = prev {
            if piece <= 1e-15 * total.abs().max(1e-300) {
                return Moment::Finite(total);
            }
            let ratio = if p > 0.0 { piece / p } else { 0.0 };
            if ratio < 0.999 {
                let remainder = piece * ratio / (1.0 - ratio);
                if remainder <= 1e-13 * total.abs() {
                    return Moment::Finite(total + remainder);
                }
            }
            if b >= trunc {
                return if ratio < 0.999 {
                    Moment::Finite(total + piece * ratio / (1.0 - ratio))
                } else {
                    Moment::Infinite
                };
            }
        }
        prev = Some(piece);
        a = b;
        b *= 10.0;
    }
}
