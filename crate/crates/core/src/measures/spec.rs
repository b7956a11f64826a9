use serde::{Deserialize, Serialize};

use super::{Atom, Distribution};
use crate::error::Result;

/// JSON description of a law, e.g. `{"family": "pareto2a", "alpha": 1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    #[serde(rename = "pareto2a")]
    Pareto2a { alpha: f64 },
    LomAlpha { gamma: f64, alpha: f64 },
    LomMax { a: f64 },
    LomKendall { c: f64, alpha: f64 },
    Uniform {
        #[serde(default)]
        low: f64,
        high: f64,
    },
    /// Atoms as `[x, mass]` pairs; `cdf` as `[x, F]` knots of the
    /// continuous remainder, normalized to run from 0 to 1.
    Table {
        #[serde(default)]
        atoms: Vec<(f64, f64)>,
        #[serde(default)]
        cdf: Vec<(f64, f64)>,
    },
    Point { at: f64 },
    Exponential { mean: f64 },
}

impl LawSpec {
    pub fn build(&self) -> Result<Distribution> {
        match *self {
            LawSpec::Pareto2a { alpha } => Distribution::pareto_2alpha(alpha),
            LawSpec::LomAlpha { gamma, alpha } => Distribution::lom_alpha(gamma, alpha),
            LawSpec::LomMax { a } => Distribution::lom_max(a),
            LawSpec::LomKendall { c, alpha } => Distribution::lom_kendall(c, alpha),
            LawSpec::Uniform { low, high } => Distribution::uniform(low, high),
            LawSpec::Table {
                ref atoms,
                ref cdf,
            } => Distribution::table(
                atoms.iter().map(|&(at, mass)| Atom { at, mass }).collect(),
                cdf.clone(),
            ),
            LawSpec::Point { at } => Distribution::point(at),
            LawSpec::Exponential { mean } => Distribution::exponential(mean),
        }
    }

    pub fn from_json(text: &str) -> Result<Distribution> {
        let spec: LawSpec = serde_json::from_str(text)?;
        spec.build()
    }
}

impl TryFrom<&LawSpec> for Distribution {
    type Error = crate::error::Error;

    fn try_from(spec: &LawSpec) -> Result<Self> {
        spec.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_named_families() {
        let d = LawSpec::from_json(r#"{"family":"pareto2a","alpha":1.0}"#).unwrap();
        assert!((d.cdf(2.0) - 0.75).abs() < 1e-15);
        let d = LawSpec::from_json(r#"{"family":"lom_kendall","c":1,"alpha":1}"#).unwrap();
        assert_eq!(d.support_upper(), 1.0);
        let d = LawSpec::from_json(r#"{"family":"uniform","high":2}"#).unwrap();
        assert_eq!(d.cdf(1.0), 0.5);
    }

    #[test]
    fn table_mixes_atoms_and_knots() {
        let d = LawSpec::from_json(
            r#"{"family":"table","atoms":[[0.5,0.5]],"cdf":[[0,0],[1,1]]}"#,
        )
        .unwrap();
        assert!((d.cdf(0.25) - 0.125).abs() < 1e-15);
        assert!((d.cdf(0.5) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn unknown_family_names_the_tag() {
        let err = LawSpec::from_json(r#"{"family":"cauchy"}"#).unwrap_err();
        assert!(err.to_string().contains("cauchy"), "{err}");
    }

    #[test]
    fn missing_field_is_named() {
        let err = LawSpec::from_json(r#"{"family":"lom_alpha","gamma":1}"#).unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");
    }
}
