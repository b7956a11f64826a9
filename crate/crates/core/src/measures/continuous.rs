//! Absolutely continuous building blocks of a [`Distribution`](super::Distribution).

use statrs::function::beta::{beta_reg, inv_beta_reg, ln_beta};

use crate::quad::{integrate_with_breaks, Tolerance};

/// Which of the two auxiliary laws of the Kendall-type convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KendallTypeLaw {
    /// The law with characteristic function `phi(t)^2`, i.e. `delta_1 <> delta_1`.
    One,
    /// The law with characteristic function `phi(t) (1 - t)`.
    Two,
}

/// An absolutely continuous probability law on `[0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Continuous {
    Uniform {
        low: f64,
        high: f64,
    },
    /// `1 - (x / scale)^(-tail)` on `[scale, inf)`.
    Pareto {
        tail: f64,
        scale: f64,
    },
    /// `1 - exp(-gamma x^shape)`.
    Weibull {
        gamma: f64,
        shape: f64,
    },
    /// `min((c x)^alpha, 1)`.
    PowerLaw {
        c: f64,
        alpha: f64,
    },
    /// Piecewise-linear CDF through `knots`, from 0 to 1.
    Linear {
        knots: Vec<(f64, f64)>,
    },
    /// Auxiliary laws of the Kendall-type convolution with `c = 1/(p-1)`,
    /// dilated by `scale`.
    KendallType {
        law: KendallTypeLaw,
        p: f64,
        scale: f64,
    },
    /// Law of `sqrt(a^2 + b^2 + 2 a b theta)` with `theta` on `[-1, 1]`
    /// having density proportional to `(1 - x^2)^(s - 1/2)`.
    KingmanRadial {
        a: f64,
        b: f64,
        s: f64,
    },
    /// Law of `X^exponent` for `X` distributed as `base`.
    Power {
        base: Box<Continuous>,
        exponent: f64,
    },
}

impl Continuous {
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Continuous::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
            Continuous::Pareto { tail, scale } => {
                if x <= *scale {
                    0.0
                } else {
                    -(-tail * (x / scale).ln()).exp_m1()
                }
            }
            Continuous::Weibull { gamma, shape } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-gamma * x.powf(*shape)).exp_m1()
                }
            }
            Continuous::PowerLaw { c, alpha } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (c * x).powf(*alpha).min(1.0)
                }
            }
            Continuous::Linear { knots } => linear_cdf(knots, x),
            Continuous::KendallType { law, p, scale } => {
                if x <= *scale {
                    0.0
                } else {
                    kendall_type_cdf(*law, *p, x / scale)
                }
            }
            Continuous::KingmanRadial { a, b, s } => {
                let (lo, hi) = ((a - b).abs(), a + b);
                if x <= lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else {
                    let theta = ((x * x - a * a - b * b) / (2.0 * a * b)).clamp(-1.0, 1.0);
                    let shape = s + 0.5;
                    beta_reg(shape, shape, 0.5 * (1.0 + theta))
                }
            }
            Continuous::Power { base, exponent } => {
                if x <= 0.0 {
                    0.0
                } else {
                    base.cdf(x.powf(1.0 / exponent))
                }
            }
        }
    }

    /// `1 - cdf(x)`, evaluated without cancellation in heavy tails.
    pub fn survival(&self, x: f64) -> f64 {
        match self {
            Continuous::Pareto { tail, scale } if x > *scale => (x / scale).powf(-tail),
            Continuous::Weibull { gamma, shape } if x > 0.0 => (-gamma * x.powf(*shape)).exp(),
            Continuous::KendallType { law, p, scale } if x > *scale => {
                kendall_type_survival(*law, *p, x / scale)
            }
            Continuous::Power { base, exponent } if x > 0.0 => {
                base.survival(x.powf(1.0 / exponent))
            }
            _ => 1.0 - self.cdf(x),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        match self {
            Continuous::Uniform { low, high } => 1.0 / (high - low),
            Continuous::Pareto { tail, scale } => tail / scale * (x / scale).powf(-tail - 1.0),
            Continuous::Weibull { gamma, shape } => {
                if x <= 0.0 {
                    return if *shape < 1.0 {
                        f64::INFINITY
                    } else if *shape == 1.0 {
                        *gamma
                    } else {
                        0.0
                    };
                }
                let xk = x.powf(*shape);
                gamma * shape * xk / x * (-gamma * xk).exp()
            }
            Continuous::PowerLaw { c, alpha } => alpha * c.powf(*alpha) * x.powf(alpha - 1.0),
            Continuous::Linear { knots } => linear_density(knots, x),
            Continuous::KendallType { law, p, scale } => {
                kendall_type_density(*law, *p, x / scale) / scale
            }
            Continuous::KingmanRadial { a, b, s } => {
                let theta = (x * x - a * a - b * b) / (2.0 * a * b);
                if theta <= -1.0 || theta >= 1.0 {
                    return 0.0;
                }
                let shape = s + 0.5;
                let bb = 0.5 * (1.0 + theta);
                let log_f = (shape - 1.0) * (bb.ln() + (1.0 - bb).ln()) - ln_beta(shape, shape);
                // d theta / dx = x / (a b); d B / d theta = 1/2.
                0.5 * log_f.exp() * x / (a * b)
            }
            Continuous::Power { base, exponent } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let r = 1.0 / exponent;
                base.density(x.powf(r)) * r * x.powf(r - 1.0)
            }
        }
    }

    /// Generalized inverse of the CDF on `(0, 1)`.
    pub fn quantile(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, 1.0);
        match self {
            Continuous::Uniform { low, high } => low + q * (high - low),
            Continuous::Pareto { tail, scale } => scale * (-(-q).ln_1p() / tail).exp(),
            Continuous::Weibull { gamma, shape } => (-(-q).ln_1p() / gamma).powf(1.0 / shape),
            Continuous::PowerLaw { c, alpha } => q.powf(1.0 / alpha) / c,
            Continuous::Linear { knots } => linear_quantile(knots, q),
            Continuous::KendallType { .. } => self.bisect_quantile(q),
            Continuous::KingmanRadial { a, b, s } => {
                let shape = s + 0.5;
                let bb = inv_beta_reg(shape, shape, q);
                let theta = 2.0 * bb - 1.0;
                (a * a + b * b + 2.0 * a * b * theta).max(0.0).sqrt()
            }
            Continuous::Power { base, exponent } => base.quantile(q).powf(*exponent),
        }
    }

    fn bisect_quantile(&self, q: f64) -> f64 {
        let (lo, hi) = self.support();
        let mut lo = lo;
        let mut hi = if hi.is_finite() { hi } else { lo.max(1.0) * 2.0 };
        while hi.is_finite() && self.cdf(hi) < q {
            lo = hi;
            hi *= 2.0;
        }
        bisect(|x| self.cdf(x), q, lo, hi)
    }

    /// Closed support `[lo, hi]`; `hi` may be infinite.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Continuous::Uniform { low, high } => (*low, *high),
            Continuous::Pareto { scale, .. } => (*scale, f64::INFINITY),
            Continuous::Weibull { .. } => (0.0, f64::INFINITY),
            Continuous::PowerLaw { c, .. } => (0.0, 1.0 / c),
            Continuous::Linear { knots } => (knots[0].0, knots[knots.len() - 1].0),
            Continuous::KendallType { scale, .. } => (*scale, f64::INFINITY),
            Continuous::KingmanRadial { a, b, .. } => ((a - b).abs(), a + b),
            Continuous::Power { base, exponent } => {
                let (lo, hi) = base.support();
                (lo.powf(*exponent), hi.powf(*exponent))
            }
        }
    }

    /// Law of `a X`, for `a > 0`.
    pub fn dilate(&self, a: f64) -> Continuous {
        match self {
            Continuous::Uniform { low, high } => Continuous::Uniform {
                low: low * a,
                high: high * a,
            },
            Continuous::Pareto { tail, scale } => Continuous::Pareto {
                tail: *tail,
                scale: scale * a,
            },
            Continuous::Weibull { gamma, shape } => Continuous::Weibull {
                gamma: gamma * a.powf(-shape),
                shape: *shape,
            },
            Continuous::PowerLaw { c, alpha } => Continuous::PowerLaw {
                c: c / a,
                alpha: *alpha,
            },
            Continuous::Linear { knots } => Continuous::Linear {
                knots: knots.iter().map(|&(x, f)| (x * a, f)).collect(),
            },
            Continuous::KendallType { law, p, scale } => Continuous::KendallType {
                law: *law,
                p: *p,
                scale: scale * a,
            },
            Continuous::KingmanRadial { a: x, b: y, s } => Continuous::KingmanRadial {
                a: x * a,
                b: y * a,
                s: *s,
            },
            Continuous::Power { base, exponent } => Continuous::Power {
                base: Box::new(base.dilate(a.powf(1.0 / exponent))),
                exponent: *exponent,
            },
        }
    }

    /// Law of `X^e` for `e > 0`.
    pub fn power(&self, e: f64) -> Continuous {
        if e == 1.0 {
            return self.clone();
        }
        match self {
            Continuous::Pareto { tail, scale } => Continuous::Pareto {
                tail: tail / e,
                scale: scale.powf(e),
            },
            Continuous::Weibull { gamma, shape } => Continuous::Weibull {
                gamma: *gamma,
                shape: shape / e,
            },
            Continuous::PowerLaw { c, alpha } => Continuous::PowerLaw {
                c: c.powf(e),
                alpha: alpha / e,
            },
            Continuous::Power { base, exponent } => base.power(exponent * e),
            other => Continuous::Power {
                base: Box::new(other.clone()),
                exponent: e,
            },
        }
    }

    /// Index `tau` with `1 - F(x) ~ C x^(-tau)`; `None` for bounded or
    /// exponentially decaying tails.
    pub fn tail_index(&self) -> Option<f64> {
        match self {
            Continuous::Pareto { tail, .. } => Some(*tail),
            Continuous::KendallType { law, p, .. } => Some(match law {
                KendallTypeLaw::One | KendallTypeLaw::Two if *p > 2.0 => 2.0,
                _ => p + 1.0,
            }),
            Continuous::Power { base, exponent } => base.tail_index().map(|t| t / exponent),
            _ => None,
        }
    }

    /// Points inside the support where the density is not smooth.
    pub fn breaks(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        let mut out = vec![lo];
        if hi.is_finite() {
            out.push(hi);
        }
        if let Continuous::Linear { knots } = self {
            out.extend(knots.iter().map(|k| k.0));
        }
        if let Continuous::KingmanRadial { a, b, .. } = self {
            // The radial density has an interior kink at sqrt(a^2 + b^2).
            out.push((a * a + b * b).sqrt());
        }
        out
    }

    /// `E g(X)` for a bounded `g`, with `kinks` marking points where `g`
    /// is not smooth.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, kinks: &[f64]) -> f64 {
        self.expect_dyn(&g, kinks)
    }

    fn expect_dyn(&self, g: &dyn Fn(f64) -> f64, kinks: &[f64]) -> f64 {
        let tol = Tolerance::with_abs(1e-12);
        match self {
            Continuous::Linear { knots } => knots
                .windows(2)
                .filter(|w| w[1].1 > w[0].1 && w[1].0 > w[0].0)
                .map(|w| {
                    let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                    slope * integrate_with_breaks(g, w[0].0, w[1].0, kinks, tol).value
                })
                .sum(),
            Continuous::KendallType { law, p, scale } => {
                // x = scale / y maps [scale, inf) onto (0, 1] with a smooth weight.
                let h = |y: f64| {
                    if y <= 0.0 {
                        return 0.0;
                    }
                    let x = scale / y;
                    g(x) * kendall_type_density(*law, *p, 1.0 / y) / (y * y)
                };
                let breaks: Vec<f64> = kinks
                    .iter()
                    .filter(|k| **k > 0.0)
                    .map(|k| scale / k)
                    .collect();
                integrate_with_breaks(h, 0.0, 1.0, &breaks, tol).value
            }
            Continuous::KingmanRadial { a, b, s } => {
                let shape = s + 0.5;
                let norm = shape * ln_beta(shape, shape).exp();
                let radius = |theta: f64| (a * a + b * b + 2.0 * a * b * theta).max(0.0).sqrt();
                let top = 0.5f64.powf(shape);
                let mut total = 0.0;
                for sign in [1.0, -1.0] {
                    // B = v^(1/shape) absorbs the B^(shape-1) endpoint factor.
                    let h = |v: f64| {
                        let bb = v.powf(1.0 / shape);
                        let theta = sign * (2.0 * bb - 1.0);
                        g(radius(theta)) * (1.0 - bb).powf(shape - 1.0) / norm
                    };
                    let breaks: Vec<f64> = kinks
                        .iter()
                        .filter_map(|&z| {
                            let theta = (z * z - a * a - b * b) / (2.0 * a * b);
                            let bb = 0.5 * (1.0 + sign * theta);
                            (bb > 0.0 && bb < 0.5).then(|| bb.powf(shape))
                        })
                        .collect();
                    total += integrate_with_breaks(h, 0.0, top, &breaks, tol).value;
                }
                total
            }
            Continuous::Power { base, exponent } => {
                let inner: Vec<f64> = kinks
                    .iter()
                    .filter(|k| **k > 0.0)
                    .map(|k| k.powf(1.0 / exponent))
                    .collect();
                base.expect_dyn(&|x: f64| g(x.powf(*exponent)), &inner)
            }
            _ => {
                // Quantile substitution: E g(X) = int_0^1 g(Q(q)) dq.
                let mut breaks: Vec<f64> = kinks.iter().map(|k| self.cdf(*k)).collect();
                breaks.extend(self.breaks().iter().map(|k| self.cdf(*k)));
                integrate_with_breaks(|q| g(self.quantile(q)), 0.0, 1.0, &breaks, tol).value
            }
        }
    }
}

/// Smallest `x` in `[lo, hi]` with `cdf(x) >= q`, by bisection.
pub(crate) fn bisect<F: Fn(f64) -> f64>(cdf: F, q: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) >= q {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn linear_cdf(knots: &[(f64, f64)], x: f64) -> f64 {
    let first = knots[0];
    if x <= first.0 {
        return if x == first.0 { first.1 } else { 0.0 };
    }
    let last = knots[knots.len() - 1];
    if x >= last.0 {
        return 1.0;
    }
    let i = knots.partition_point(|k| k.0 <= x);
    let (x0, f0) = knots[i - 1];
    let (x1, f1) = knots[i];
    f0 + (f1 - f0) * (x - x0) / (x1 - x0)
}

fn linear_density(knots: &[(f64, f64)], x: f64) -> f64 {
    let i = knots.partition_point(|k| k.0 <= x);
    if i == 0 || i >= knots.len() {
        return 0.0;
    }
    let (x0, f0) = knots[i - 1];
    let (x1, f1) = knots[i];
    (f1 - f0) / (x1 - x0)
}

fn linear_quantile(knots: &[(f64, f64)], q: f64) -> f64 {
    let i = knots.partition_point(|k| k.1 < q);
    if i == 0 {
        return knots[0].0;
    }
    if i >= knots.len() {
        return knots[knots.len() - 1].0;
    }
    let (x0, f0) = knots[i - 1];
    let (x1, f1) = knots[i];
    x0 + (x1 - x0) * (q - f0) / (f1 - f0)
}

/// CDF of the unit-scale Kendall-type auxiliary law at `x >= 1`.
pub fn kendall_type_cdf(law: KendallTypeLaw, p: f64, x: f64) -> f64 {
    let c = 1.0 / (p - 1.0);
    match law {
        KendallTypeLaw::One => {
            c * c
                * (p * (p - 2.0) * (1.0 - x.powi(-2))
                    + 2.0 * p * (1.0 - x.powf(-p - 1.0))
                    - (2.0 * p - 1.0) * (1.0 - x.powf(-2.0 * p)))
        }
        KendallTypeLaw::Two => {
            c * (p - 2.0) * (1.0 - x.powi(-2)) + c * (1.0 - x.powf(-p - 1.0))
        }
    }
    .clamp(0.0, 1.0)
}

/// Survival function of the unit-scale Kendall-type auxiliary law at `x >= 1`.
pub fn kendall_type_survival(law: KendallTypeLaw, p: f64, x: f64) -> f64 {
    let c = 1.0 / (p - 1.0);
    match law {
        KendallTypeLaw::One => {
            c * c
                * (p * (p - 2.0) * x.powi(-2) + 2.0 * p * x.powf(-p - 1.0)
                    - (2.0 * p - 1.0) * x.powf(-2.0 * p))
        }
        KendallTypeLaw::Two => c * (p - 2.0) * x.powi(-2) + c * x.powf(-p - 1.0),
    }
    .clamp(0.0, 1.0)
}

/// Density of the unit-scale Kendall-type auxiliary law at `x >= 1`.
pub fn kendall_type_density(law: KendallTypeLaw, p: f64, x: f64) -> f64 {
    if x < 1.0 {
        return 0.0;
    }
    let c = 1.0 / (p - 1.0);
    match law {
        KendallTypeLaw::One => {
            2.0 * c
                * c
                * p
                * ((p - 2.0) * x.powi(-3) + (p + 1.0) * x.powf(-p - 2.0)
                    - (2.0 * p - 1.0) * x.powf(-2.0 * p - 1.0))
        }
        KendallTypeLaw::Two => c * (2.0 * (p - 2.0) + (p + 1.0) * x.powf(1.0 - p)) * x.powi(-3),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    #[test]
    fn kendall_type_densities_integrate_to_one() {
        for p in [2.0, 2.5, 3.0, 5.0] {
            for law in [KendallTypeLaw::One, KendallTypeLaw::Two] {
                let mass = integrate(
                    |x| kendall_type_density(law, p, x),
                    1.0,
                    f64::INFINITY,
                    Tolerance::DEFAULT,
                )
                .value;
                assert!((mass - 1.0).abs() < 1e-9, "p={p} {law:?} mass={mass}");
                assert!((kendall_type_cdf(law, p, 1e9) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn kendall_type_cdf_matches_integrated_density() {
        for law in [KendallTypeLaw::One, KendallTypeLaw::Two] {
            let x = 2.7;
            let num = integrate(|s| kendall_type_density(law, 3.0, s), 1.0, x, Tolerance::DEFAULT);
            assert!((num.value - kendall_type_cdf(law, 3.0, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn kingman_half_is_uniform_angle() {
        // s = 1/2: theta uniform on [-1, 1].
        let k = Continuous::KingmanRadial { a: 1.0, b: 1.0, s: 0.5 };
        // P(Z <= sqrt(2)) = P(theta <= 0) = 1/2.
        assert!((k.cdf(2f64.sqrt()) - 0.5).abs() < 1e-12);
        assert!((k.quantile(0.5) - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn power_of_weibull_is_exponential() {
        let w = Continuous::Weibull { gamma: 2.0, shape: 3.0 };
        assert_eq!(w.power(3.0), Continuous::Weibull { gamma: 2.0, shape: 1.0 });
    }

    #[test]
    fn linear_quantile_inverts_cdf() {
        let l = Continuous::Linear {
            knots: vec![(0.0, 0.0), (1.0, 0.25), (3.0, 1.0)],
        };
        for q in [0.1, 0.25, 0.6, 0.99] {
            assert!((l.cdf(l.quantile(q)) - q).abs() < 1e-14);
        }
    }
}
