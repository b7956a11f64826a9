use gconv_risk::measures::{Atom, Distribution, LawSpec, Moment};
use gconv_risk::stats::{ks_distance, MeanEstimate};
use proptest::prelude::*;

fn families() -> Vec<(&'static str, Distribution)> {
    vec![
        ("pareto2a(1)", Distribution::pareto_2alpha(1.0).unwrap()),
        ("pareto2a(2.5)", Distribution::pareto_2alpha(2.5).unwrap()),
        ("lom_alpha(2,1)", Distribution::lom_alpha(2.0, 1.0).unwrap()),
        ("lom_alpha(1,0.5)", Distribution::lom_alpha(1.0, 0.5).unwrap()),
        ("lom_max(3)", Distribution::lom_max(3.0).unwrap()),
        ("lom_kendall(2,1.5)", Distribution::lom_kendall(2.0, 1.5).unwrap()),
        ("uniform(1,4)", Distribution::uniform(1.0, 4.0).unwrap()),
        (
            "table",
            Distribution::table(
                vec![Atom { at: 0.5, mass: 0.2 }],
                vec![(0.0, 0.0), (1.0, 0.4), (3.0, 1.0)],
            )
            .unwrap(),
        ),
    ]
}

#[test]
fn quantile_and_cdf_round_trip() {
    for (name, d) in families() {
        for i in 1..200 {
            let q = i as f64 / 200.0;
            let x = d.quantile(q);
            assert!(d.cdf(x) >= q - 1e-12, "{name}: cdf(Q({q})) < q");
            if d.density(x) > 0.0 && d.atoms().iter().all(|a| a.at != x) {
                assert!((d.cdf(x) - q).abs() < 1e-9, "{name} q={q}");
                let back = d.quantile(d.cdf(x));
                assert!((back - x).abs() <= 1e-9 * x.max(1.0), "{name} x={x}");
            }
        }
    }
}

#[test]
fn samples_match_cdf() {
    for (name, d) in families() {
        let xs = d.sample(100_000, 20261017);
        let ks = ks_distance(&xs, |x| d.cdf(x));
        assert!(ks < 0.01, "{name}: KS {ks}");
    }
}

#[test]
fn sampling_is_deterministic() {
    let d = Distribution::pareto_2alpha(1.0).unwrap();
    assert_eq!(d.sample(1000, 5), d.sample(1000, 5));
    assert_ne!(d.sample(10, 5), d.sample(10, 6));
}

#[test]
fn moments_agree_with_sample_means() {
    let cases = [
        (Distribution::pareto_2alpha(2.5).unwrap(), 1.0),
        (Distribution::lom_alpha(2.0, 1.0).unwrap(), 1.0),
        (Distribution::lom_alpha(1.0, 0.5).unwrap(), 0.5),
        (Distribution::lom_kendall(1.0, 2.0).unwrap(), 2.0),
        (Distribution::uniform(1.0, 4.0).unwrap(), 1.5),
        (
            Distribution::table(
                vec![Atom { at: 0.5, mass: 0.2 }],
                vec![(0.0, 0.0), (1.0, 0.4), (3.0, 1.0)],
            )
            .unwrap(),
            1.0,
        ),
    ];
    for (d, alpha) in cases {
        let m = d.moment_alpha(alpha).unwrap().finite().unwrap();
        let xs: Vec<f64> = d
            .sample(100_000, 77)
            .into_iter()
            .map(|x| x.powf(alpha))
            .collect();
        let est = MeanEstimate::from_samples(&xs);
        assert!(est.within(m, 3.0), "{d:?} alpha={alpha}: {m} vs {est:?}");
    }
}

#[test]
fn named_moment_examples() {
    let m = Distribution::lom_alpha(2.0, 1.0).unwrap().moment_alpha(1.0).unwrap();
    assert!((m.finite().unwrap() - 0.5).abs() < 1e-10);
    let m = Distribution::lom_kendall(1.0, 2.0).unwrap().moment_alpha(2.0).unwrap();
    assert!((m.finite().unwrap() - 0.5).abs() < 1e-10);
    let m = Distribution::pareto_2alpha(1.0).unwrap().moment_alpha(1.0).unwrap();
    assert!((m.finite().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(
        Distribution::pareto_2alpha(1.0).unwrap().moment_alpha(2.0).unwrap(),
        Moment::Infinite
    );
    // Tail index 1: the mean diverges.
    assert_eq!(
        Distribution::pareto_2alpha(0.5).unwrap().mean().unwrap(),
        Moment::Infinite
    );
}

#[test]
fn heavy_table_tail_is_flagged_infinite_only_when_it_is() {
    // A mixture whose Pareto part has tail 1.2: E X is finite, E X^1.5 is not.
    let d = Distribution::new(
        vec![Atom { at: 2.0, mass: 0.5 }],
        vec![(
            0.5,
            gconv_risk::measures::Continuous::Pareto {
                tail: 1.2,
                scale: 1.0,
            },
        )],
    )
    .unwrap();
    let m = d.moment_alpha(1.0).unwrap().finite().unwrap();
    assert!((m - (1.0 + 0.5 * 1.2 / 0.2)).abs() < 1e-8, "{m}");
    assert!(d.moment_alpha(1.5).unwrap().is_infinite());
}

#[test]
fn json_families_build() {
    let specs = [
        r#"{"family":"pareto2a","alpha":1}"#,
        r#"{"family":"lom_alpha","gamma":1,"alpha":2}"#,
        r#"{"family":"lom_max","a":3}"#,
        r#"{"family":"lom_kendall","c":1,"alpha":1}"#,
        r#"{"family":"uniform","low":0,"high":1}"#,
        r#"{"family":"table","atoms":[[1,0.25]],"cdf":[[0,0],[2,1]]}"#,
    ];
    for s in specs {
        LawSpec::from_json(s).unwrap();
    }
    assert!(LawSpec::from_json(r#"{"family":"pareto2a","alpha":-1}"#).is_err());
    assert!(LawSpec::from_json(r#"{"family":"table","atoms":[[1,1.25]]}"#).is_err());
    assert!(LawSpec::from_json(r#"{"family":"uniform","high":1,"extra":0}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_is_monotone_and_quantile_is_generalized_inverse(
        alpha in 0.2f64..4.0,
        gamma in 0.2f64..4.0,
        q in 0.001f64..0.999,
    ) {
        for d in [
            Distribution::pareto_2alpha(alpha).unwrap(),
            Distribution::lom_alpha(gamma, alpha).unwrap(),
            Distribution::lom_kendall(gamma, alpha).unwrap(),
        ] {
            let x = d.quantile(q);
            prop_assert!(d.cdf(x) >= q - 1e-12);
            prop_assert!(d.cdf(x * 0.999) <= q + 1e-12);
            prop_assert!(d.cdf(x) <= d.cdf(x * 1.01));
        }
    }

    #[test]
    fn dilation_rescales_quantiles(a in 0.1f64..10.0, q in 0.01f64..0.99) {
        let d = Distribution::lom_alpha(1.0, 1.5).unwrap();
        let scaled = d.dilate(a).unwrap();
        prop_assert!((scaled.quantile(q) - a * d.quantile(q)).abs() < 1e-10 * a.max(1.0));
    }

    #[test]
    fn power_law_of_moment(alpha in 0.3f64..3.0, e in 0.3f64..3.0) {
        // E (X^e)^(1) = E X^e.
        let d = Distribution::lom_alpha(1.0, alpha).unwrap();
        let direct = d.moment_alpha(e).unwrap().finite().unwrap();
        let via_power = d.power(e).unwrap().mean().unwrap().finite().unwrap();
        prop_assert!((direct - via_power).abs() < 1e-8 * direct.max(1.0));
    }
}
