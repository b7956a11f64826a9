use std::path::Path;

use serde_json::{json, Map, Value};

use super::io::{num, parse_algebra, parse_grid, parse_law, parse_model, write_csv, write_json};
use super::{ConvolveArgs, MethodArg, Outcome, RuinArgs, SafetyArgs, SampleArgs, TransformArgs, WalkArgs};
use crate::convolutions::Algebra;
use crate::error::{Error, Result};
use crate::risk::{alpha_model, safety_condition, RiskModel};
use crate::ruin::{
    alpha_ruin_laplace_check, alpha_ruin_volterra, auto_method, default_z_max, max_ruin_closed, max_ruin_ode,
    mc_ruin, mc_ruin_finite_t, method_applies, Method, RuinEstimate,
};
use crate::walks::{paths, terminal_states, Sampler};
use crate::williamson::{transform_form1, williamson_invert};

type Done = (Outcome, Map<String, Value>);

fn inputs<const N: usize>(pairs: [(&str, Value); N]) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn sample(a: &SampleArgs, out: &Path) -> Result<Done> {
    let (law, law_json) = parse_law(&a.law, "law")?;
    let draws = law.sample(a.n, a.seed);
    let path = out.join("sample.csv");
    write_csv(
        &path,
        &["index", "value"],
        draws.iter().enumerate().map(|(i, &x)| vec![i.to_string(), num(Some(x))]),
    )?;
    let summary = format!("sample: {} draws written to {}", draws.len(), path.display());
    Ok((Outcome { files: vec![path], summary }, inputs([("law", law_json)])))
}

pub fn convolve(a: &ConvolveArgs, out: &Path) -> Result<Done> {
    let (alg, alg_json) = parse_algebra(&a.algebra)?;
    if a.points < 2 {
        return Err(Error::InvalidParameter {
            name: "points",
            value: a.points as f64,
            reason: "need at least 2",
        });
    }
    let d = alg.convolve_points(a.x, a.y)?;
    let top = d.support_upper();
    let hi = if top.is_finite() { top } else { d.quantile(0.999) };
    let hi = if hi > 0.0 { hi } else { 1.0 };
    let n = a.points;
    let table: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let x = hi * i as f64 / (n - 1) as f64;
            [x, d.cdf(x)]
        })
        .collect();
    let atom_mass: f64 = d.atoms().iter().map(|at| at.mass).sum();
    let report = json!({
        "algebra": alg,
        "x": a.x,
        "y": a.y,
        "atoms": d.atoms(),
        "continuous_mass": 1.0 - atom_mass,
        "cdf": table,
    });
    let path = out.join("convolve.json");
    write_json(&path, &report)?;
    let summary = format!(
        "convolve: {} of {} and {}: {} atom(s), CDF on [0, {hi}] written to {}",
        alg.name(),
        a.x,
        a.y,
        d.atoms().len(),
        path.display()
    );
    Ok((Outcome { files: vec![path], summary }, inputs([("algebra", alg_json)])))
}

pub fn transform(a: &TransformArgs, out: &Path) -> Result<Done> {
    let (alg, alg_json) = parse_algebra(&a.algebra)?;
    let Algebra::Kendall { alpha } = alg else {
        return Err(Error::Unsupported(format!(
            "the Williamson transform belongs to the Kendall algebra, got {}",
            alg.name()
        )));
    };
    let (law, law_json) = parse_law(&a.law, "law")?;
    let grid = parse_grid(&a.grid, "grid")?;
    let rows: Vec<Vec<String>> = if a.invert {
        let h = |s: f64| transform_form1(&law, alpha, 1.0 / s);
        grid.iter()
            .map(|&t| Ok(vec![num(Some(t)), num(Some(williamson_invert(h, alpha, t)?))]))
            .collect::<Result<_>>()?
    } else {
        grid.iter()
            .map(|&t| vec![num(Some(t)), num(Some(transform_form1(&law, alpha, t)))])
            .collect()
    };
    let path = out.join("transform.csv");
    let header = if a.invert { ["t", "cdf"] } else { ["t", "phi"] };
    write_csv(&path, &header, rows)?;
    let summary = format!(
        "transform: {} points of {} written to {}",
        grid.len(),
        header[1],
        path.display()
    );
    Ok((
        Outcome { files: vec![path], summary },
        inputs([("algebra", alg_json), ("law", law_json)]),
    ))
}

pub fn walk(a: &WalkArgs, out: &Path) -> Result<Done> {
    let (alg, alg_json) = parse_algebra(&a.algebra)?;
    let (law, law_json) = parse_law(&a.step_law, "step_law")?;
    let path = out.join("walk.csv");
    if a.full {
        let walks = paths(&alg, &law, a.n, a.start, a.paths, a.seed)?;
        let rows = walks.iter().enumerate().flat_map(|(i, w)| {
            w.states
                .iter()
                .enumerate()
                .map(move |(k, &x)| vec![i.to_string(), k.to_string(), num(Some(x))])
        });
        write_csv(&path, &["path", "step", "state"], rows)?;
    } else {
        let states = terminal_states(&alg, &law, a.n, a.start, a.paths, a.seed, Sampler::Auto)?;
        write_csv(
            &path,
            &["path", "state"],
            states.iter().enumerate().map(|(i, &x)| vec![i.to_string(), num(Some(x))]),
        )?;
    }
    let summary = format!(
        "walk: {} path(s) of {} {} step(s) written to {}",
        a.paths,
        a.n,
        alg.name(),
        path.display()
    );
    Ok((
        Outcome { files: vec![path], summary },
        inputs([("algebra", alg_json), ("step_law", law_json)]),
    ))
}

pub fn safety(a: &SafetyArgs, out: &Path) -> Result<Done> {
    let (model, model_json) = parse_model(&a.model)?;
    let report = safety_condition(&model, a.t)?;
    let path = out.join("safety.json");
    write_json(&path, &report)?;
    let summary = format!(
        "safety: margin {} at t = {} ({}), written to {}",
        report.margin,
        a.t,
        if report.condition_holds { "holds" } else { "fails" },
        path.display()
    );
    Ok((Outcome { files: vec![path], summary }, inputs([("model", model_json)])))
}

/// Method actually run.
fn resolve(requested: MethodArg, model: &RiskModel, finite_time: bool) -> Result<Method> {
    let method = match requested {
        MethodArg::Auto if finite_time => Method::MonteCarlo,
        MethodArg::Auto => auto_method(model),
        MethodArg::Volterra => Method::Volterra,
        MethodArg::Ode => Method::Ode,
        MethodArg::Closed => Method::ClosedForm,
        MethodArg::Mc => Method::MonteCarlo,
    };
    if finite_time && method != Method::MonteCarlo {
        return Err(Error::Unsupported("--t is only available with --method mc".into()));
    }
    if !method_applies(model, method) {
        return Err(Error::Unsupported(format!(
            "method {} does not apply to this {} model",
            method.as_str(),
            model.algebra.name()
        )));
    }
    Ok(method)
}

fn row(e: &RuinEstimate) -> Vec<String> {
    vec![
        num(Some(e.u)),
        num(Some(e.survival)),
        num(Some(e.ruin)),
        num(e.ci_low),
        num(e.ci_high),
        e.method.as_str().to_string(),
    ]
}

pub fn ruin(a: &RuinArgs, out: &Path) -> Result<Done> {
    let (model, model_json) = parse_model(&a.model)?;
    let us = match (&a.u_grid, a.u) {
        (Some(g), _) => parse_grid(g, "u_grid")?,
        (None, Some(u)) => vec![u],
        (None, None) => vec![model.u],
    };
    for &u in &us {
        if !(u.is_finite() && u >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "u",
                value: u,
                reason: "must be a nonnegative finite number",
            });
        }
    }
    let method = resolve(a.method, &model, a.t.is_some())?;
    let (estimates, diagnostics) = match method {
        Method::Volterra => {
            let p = alpha_model(&model)?;
            let z_top = us.iter().map(|u| u.powf(p.alpha)).fold(0.0, f64::max);
            let z_max = default_z_max(z_top);
            let grid = alpha_ruin_volterra(&p.claims_power, p.gamma, p.beta_alpha, z_max, a.steps)?;
            let s_values = [0.5, 1.0, 2.0];
            let laplace = alpha_ruin_laplace_check(&grid, &p.claims_power, p.gamma, p.beta_alpha, &s_values)?;
            let estimates = us
                .iter()
                .map(|&u| {
                    let z = u.powf(p.alpha);
                    let survival = grid
                        .eval(z)
                        .ok_or_else(|| Error::Numeric(format!("z = {z} outside the solved grid")))?;
                    Ok(RuinEstimate::analytic(u, survival, Method::Volterra))
                })
                .collect::<Result<Vec<_>>>()?;
            let diag = json!({
                "rho": grid.rho,
                "residual": grid.residual,
                "z_max": z_max,
                "steps": a.steps,
                "laplace_residuals": s_values.iter().zip(&laplace).map(|(s, r)| json!({"s": s, "residual": r})).collect::<Vec<_>>(),
            });
            (estimates, diag)
        }
        Method::Ode => {
            let grid = max_ruin_ode(&model.claims, &model.premiums, &us)?;
            let estimates = us
                .iter()
                .zip(&grid.delta_values)
                .map(|(&u, &d)| RuinEstimate::analytic(u, d, Method::Ode))
                .collect();
            (estimates, json!({ "residual": grid.residual }))
        }
        Method::ClosedForm => {
            let estimates = us.iter().map(|&u| max_ruin_closed(&model, u)).collect::<Result<Vec<_>>>()?;
            (estimates, json!({}))
        }
        Method::MonteCarlo => {
            let estimates = us
                .iter()
                .map(|&u| {
                    let m = model.with_u(u)?;
                    match a.t {
                        Some(t) => mc_ruin_finite_t(&m, t, a.paths, a.seed, a.confidence),
                        None => mc_ruin(&m, a.horizon, a.paths, a.seed, a.confidence),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let truncation = match a.t {
                Some(t) => json!({ "t": t, "lambda": model.lambda }),
                None => json!({ "horizon_claims": a.horizon }),
            };
            let rho = alpha_model(&model).ok().map(|p| p.rho());
            let diag = json!({
                "rho": rho,
                "paths": a.paths,
                "seed": a.seed,
                "confidence": a.confidence,
                "truncation": truncation,
            });
            (estimates, diag)
        }
    };
    let csv_path = out.join("ruin.csv");
    write_csv(
        &csv_path,
        &["u", "survival", "ruin", "ci_low", "ci_high", "method"],
        estimates.iter().map(row),
    )?;
    let used = estimates.first().map_or("none", |e| e.method.as_str());
    let summary_path = out.join("ruin_summary.json");
    write_json(
        &summary_path,
        &json!({
            "method": used,
            "algebra": model.algebra,
            "points": estimates.len(),
            "diagnostics": diagnostics,
            "estimates": estimates,
        }),
    )?;
    let first = &estimates[0];
    let summary = format!(
        "ruin: {} point(s) by {used}; ruin({}) = {}; written to {}",
        estimates.len(),
        first.u,
        first.ruin,
        csv_path.display()
    );
    Ok((
        Outcome {
            files: vec![csv_path, summary_path],
            summary,
        },
        inputs([("model", model_json)]),
    ))
}

