//! Generalized convolution algebras on `[0, inf)`.
//!
//! Each algebra is described by its kernel `Omega` and by the law of
//! `delta_x ⋄ delta_y`; everything else (walks, characteristic functions)
//! is built from those two pieces.

mod bessel;

use serde::{Deserialize, Serialize};

pub use bessel::normalized_bessel;

use crate::error::{Error, Result};
use crate::measures::{
    kendall_type_density, Atom, Continuous, Distribution, KendallTypeLaw,
};
use crate::quad::{integrate, Tolerance};

/// Mass tolerance used when validating auxiliary laws at construction.
pub const AUXILIARY_MASS_TOLERANCE: f64 = 1e-8;

/// One generalized convolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraSpec", into = "AlgebraSpec")]
pub enum Algebra {
    /// Ordinary convolution; kernel `e^{-t}`.
    Classical,
    /// Convolution of symmetrized laws; kernel `cos t`.
    Symmetric,
    /// Kernel `e^{-t^alpha}`.
    AlphaStable { alpha: f64 },
    /// Kernel `1[0,1]`.
    Max,
    /// Kernel `(1 - t^alpha)_+`.
    Kendall { alpha: f64 },
    /// Bessel kernel of order `s > -1/2`.
    Kingman { s: f64 },
    /// Kernel `(1 - (c+1) t + c t^p) 1[0,1]` with `c = 1/(p-1)`.
    KendallType { p: f64 },
}

/// Wire format: `{"kind": "kendall", "alpha": 1.0}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub kind: AlgebraKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraKind {
    Classical,
    Symmetric,
    AlphaStable,
    Max,
    Kendall,
    Kingman,
    KendallType,
}

fn required(value: Option<f64>, name: &'static str) -> Result<f64> {
    value.ok_or_else(|| Error::Config {
        path: name.to_string(),
        message: "missing field".into(),
    })
}

impl TryFrom<AlgebraSpec> for Algebra {
    type Error = Error;

    fn try_from(spec: AlgebraSpec) -> Result<Self> {
        let alg = match spec.kind {
            AlgebraKind::Classical => Algebra::Classical,
            AlgebraKind::Symmetric => Algebra::Symmetric,
            AlgebraKind::Max => Algebra::Max,
            AlgebraKind::AlphaStable => Algebra::alpha_stable(required(spec.alpha, "alpha")?)?,
            AlgebraKind::Kendall => Algebra::kendall(required(spec.alpha, "alpha")?)?,
            AlgebraKind::Kingman => Algebra::kingman(required(spec.s, "s")?)?,
            AlgebraKind::KendallType => {
                let p = required(spec.p, "p")?;
                let alg = Algebra::kendall_type(p)?;
                if let Some(c) = spec.c {
                    if (c - 1.0 / (p - 1.0)).abs() > 1e-12 {
                        return Err(Error::Unsupported(format!(
                            "kendall_type needs c = 1/(p-1) = {}, got c = {c}",
                            1.0 / (p - 1.0)
                        )));
                    }
                }
                alg
            }
        };
        Ok(alg)
    }
}

impl From<Algebra> for AlgebraSpec {
    fn from(alg: Algebra) -> Self {
        let mut spec = AlgebraSpec {
            kind: alg.kind(),
            alpha: None,
            s: None,
            p: None,
            c: None,
        };
        match alg {
            Algebra::AlphaStable { alpha } | Algebra::Kendall { alpha } => spec.alpha = Some(alpha),
            Algebra::Kingman { s } => spec.s = Some(s),
            Algebra::KendallType { p } => {
                spec.p = Some(p);
                spec.c = Some(1.0 / (p - 1.0));
            }
            _ => {}
        }
        spec
    }
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(alpha)
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must be positive",
        })
    }
}

impl Algebra {
    pub fn alpha_stable(alpha: f64) -> Result<Self> {
        Ok(Algebra::AlphaStable {
            alpha: check_alpha(alpha)?,
        })
    }

    pub fn kendall(alpha: f64) -> Result<Self> {
        Ok(Algebra::Kendall {
            alpha: check_alpha(alpha)?,
        })
    }

    pub fn kingman(s: f64) -> Result<Self> {
        if s.is_finite() && s > -0.5 {
            Ok(Algebra::Kingman { s })
        } else {
            Err(Error::InvalidParameter {
                name: "s",
                value: s,
                reason: "must exceed -1/2",
            })
        }
    }

    /// Validates that both auxiliary laws carry unit mass before accepting `p`.
    pub fn kendall_type(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 2.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "must be at least 2",
            });
        }
        for law in [KendallTypeLaw::One, KendallTypeLaw::Two] {
            check_unit_mass(|x| kendall_type_density(law, p, x))?;
        }
        Ok(Algebra::KendallType { p })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn kind(&self) -> AlgebraKind {
        match self {
            Algebra::Classical => AlgebraKind::Classical,
            Algebra::Symmetric => AlgebraKind::Symmetric,
            Algebra::AlphaStable { .. } => AlgebraKind::AlphaStable,
            Algebra::Max => AlgebraKind::Max,
            Algebra::Kendall { .. } => AlgebraKind::Kendall,
            Algebra::Kingman { .. } => AlgebraKind::Kingman,
            Algebra::KendallType { .. } => AlgebraKind::KendallType,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind() {
            AlgebraKind::Classical => "classical",
            AlgebraKind::Symmetric => "symmetric",
            AlgebraKind::AlphaStable => "alpha_stable",
            AlgebraKind::Max => "max",
            AlgebraKind::Kendall => "kendall",
            AlgebraKind::Kingman => "kingman",
            AlgebraKind::KendallType => "kendall_type",
        }
    }

    /// Every algebra in this crate.
    pub fn catalogue() -> Vec<Algebra> {
        vec![
            Algebra::Classical,
            Algebra::Symmetric,
            Algebra::AlphaStable { alpha: 1.5 },
            Algebra::Max,
            Algebra::Kendall { alpha: 1.0 },
            Algebra::Kingman { s: 1.0 },
            Algebra::KendallType { p: 3.0 },
        ]
    }

    /// Kernel `Omega(t)`.
    pub fn kernel(&self, t: f64) -> f64 {
        kernel(self, t)
    }

    /// Points in `t` where the kernel is not smooth.
    pub fn kernel_kinks(&self) -> &'static [f64] {
        match self {
            Algebra::Max | Algebra::Kendall { .. } | Algebra::KendallType { .. } => &[1.0],
            _ => &[],
        }
    }

    /// Law of `delta_x ⋄ delta_y`.
    pub fn convolve_points(&self, x: f64, y: f64) -> Result<Distribution> {
        convolve_points(self, x, y)
    }

    pub fn char_fn(&self, d: &Distribution, t: f64) -> f64 {
        char_fn(self, d, t)
    }
}

/// Rejects a would-be probability density on `[1, inf)` whose mass is not 1.
pub fn check_unit_mass<F: Fn(f64) -> f64>(density: F) -> Result<()> {
    let mass = integrate(&density, 1.0, f64::INFINITY, Tolerance::TIGHT).value;
    let negative = (0..200).any(|i| density(1.0 + 0.05 * i as f64) < -1e-12);
    if (mass - 1.0).abs() > AUXILIARY_MASS_TOLERANCE || negative {
        return Err(Error::InvalidDistribution(format!(
            "auxiliary density has mass {mass}, not 1"
        )));
    }
    Ok(())
}

/// `Omega(t)` for `t >= 0`.
pub fn kernel(alg: &Algebra, t: f64) -> f64 {
    match *alg {
        Algebra::Classical => (-t).exp(),
        Algebra::Symmetric => t.cos(),
        Algebra::AlphaStable { alpha } => (-t.powf(alpha)).exp(),
        Algebra::Max => {
            if t <= 1.0 {
                1.0
            } else {
                0.0
            }
        }
        Algebra::Kendall { alpha } => (1.0 - t.powf(alpha)).max(0.0),
        Algebra::Kingman { s } => normalized_bessel(s, t),
        Algebra::KendallType { p } => kendall_type_kernel(p, t),
    }
}

fn kendall_type_kernel(p: f64, t: f64) -> f64 {
    if t > 1.0 {
        return 0.0;
    }
    let c = 1.0 / (p - 1.0);
    // Tiny negative values from rounding near t = 1 are clipped.
    (1.0 - (c + 1.0) * t + c * t.powf(p)).max(0.0)
}

/// Exact law of `delta_x ⋄ delta_y`.
pub fn convolve_points(alg: &Algebra, x: f64, y: f64) -> Result<Distribution> {
    crate::error::ensure_nonnegative("x", x)?;
    crate::error::ensure_nonnegative("y", y)?;
    if y == 0.0 {
        return Distribution::point(x);
    }
    if x == 0.0 {
        return Distribution::point(y);
    }
    let (m, big) = if x <= y { (x, y) } else { (y, x) };
    match *alg {
        Algebra::Classical => Distribution::point(x + y),
        Algebra::Symmetric => Distribution::new(
            vec![
                Atom {
                    at: big - m,
                    mass: 0.5,
                },
                Atom {
                    at: x + y,
                    mass: 0.5,
                },
            ],
            vec![],
        ),
        Algebra::AlphaStable { alpha } => {
            Distribution::point(big * (1.0 + (m / big).powf(alpha)).powf(1.0 / alpha))
        }
        Algebra::Max => Distribution::point(big),
        Algebra::Kendall { alpha } => {
            let rho = (m / big).powf(alpha);
            Distribution::new(
                vec![Atom {
                    at: big,
                    mass: 1.0 - rho,
                }],
                vec![(
                    rho,
                    Continuous::Pareto {
                        tail: 2.0 * alpha,
                        scale: big,
                    },
                )],
            )
        }
        Algebra::Kingman { s } => Distribution::new(
            vec![],
            vec![(1.0, Continuous::KingmanRadial { a: x, b: y, s })],
        ),
        Algebra::KendallType { p } => {
            let r = m / big;
            let c = 1.0 / (p - 1.0);
            let rp = r.powf(p);
            let atom = 1.0 - (c + 1.0) * r + c * rp;
            let w2 = (c + 1.0) * (r - rp);
            // Rounding can leave the atom a hair below zero near r = 1.
            let atom = atom.max(0.0);
            let total = atom + rp + w2;
            Distribution::new(
                vec![Atom {
                    at: big,
                    mass: atom / total,
                }],
                vec![
                    (
                        rp / total,
                        Continuous::KendallType {
                            law: KendallTypeLaw::One,
                            p,
                            scale: big,
                        },
                    ),
                    (
                        w2 / total,
                        Continuous::KendallType {
                            law: KendallTypeLaw::Two,
                            p,
                            scale: big,
                        },
                    ),
                ],
            )
        }
    }
}

/// Law of `a X`; `a = 0` gives `delta_0`.
pub fn dilate(d: &Distribution, a: f64) -> Result<Distribution> {
    d.dilate(a)
}

/// `Phi(t) = int Omega(x t) d(dx)`.
pub fn char_fn(alg: &Algebra, d: &Distribution, t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let kinks: Vec<f64> = alg.kernel_kinks().iter().map(|k| k / t).collect();
    d.expect(|x| kernel(alg, x * t), &kinks)
}
