use gconv_risk::measures::Distribution;
use gconv_risk::williamson::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn laws() -> Vec<(&'static str, Distribution, f64)> {
    vec![
        ("uniform", Distribution::uniform(0.0, 1.0).unwrap(), 1.0),
        ("uniform a=2", Distribution::uniform(0.5, 2.0).unwrap(), 2.0),
        ("lom_kendall", Distribution::lom_kendall(1.0, 1.0).unwrap(), 1.0),
        ("lom_kendall(2,0.7)", Distribution::lom_kendall(2.0, 0.7).unwrap(), 0.7),
        ("exponential", Distribution::exponential(1.0).unwrap(), 1.0),
        ("pareto", Distribution::pareto_2alpha(1.0).unwrap(), 1.0),
        ("weibull a=1.5", Distribution::lom_alpha(1.0, 1.5).unwrap(), 1.5),
    ]
}

#[test]
fn three_transform_forms_agree() {
    for (name, d, alpha) in laws() {
        for i in 1..=40 {
            let t = 0.05 * i as f64 * 1.37;
            let a = transform_form1(&d, alpha, t);
            let b = transform_form2(&d, alpha, t);
            let c = transform_form3(&d, alpha, t);
            assert!((a - b).abs() < 1e-8, "{name} t={t}: {a} vs {b}");
            assert!((a - c).abs() < 1e-8, "{name} t={t}: {a} vs {c}");
        }
    }
}

#[test]
fn inversion_round_trip() {
    for (name, d, alpha) in [
        ("lom_kendall", Distribution::lom_kendall(1.0, 1.0).unwrap(), 1.0),
        ("lom_kendall(2,1.5)", Distribution::lom_kendall(2.0, 1.5).unwrap(), 1.5),
        ("uniform", Distribution::uniform(0.0, 1.0).unwrap(), 1.0),
        ("uniform(1,3)", Distribution::uniform(1.0, 3.0).unwrap(), 2.0),
    ] {
        let h = |t: f64| transform_form3(&d, alpha, 1.0 / t);
        let mut worst: f64 = 0.0;
        for i in 1..=300 {
            // Grid offset keeps points away from the support ends, where F has kinks.
            let t = 0.0123 + 0.01 * i as f64;
            let f = williamson_invert(h, alpha, t).unwrap();
            worst = worst.max((f - d.cdf(t)).abs());
        }
        assert!(worst <= 1e-6, "{name}: sup error {worst}");
    }
}

#[test]
fn shifted_cdf_forms_agree_on_random_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(20261017);
    let pairs = [
        KendallLawPair::lack_of_memory(1.0, 1.0).unwrap(),
        KendallLawPair::from_distribution(&Distribution::uniform(0.0, 2.0).unwrap(), 1.5).unwrap(),
        KendallLawPair::from_distribution(&Distribution::pareto_2alpha(1.0).unwrap(), 1.0).unwrap(),
    ];
    for pair in &pairs {
        for _ in 0..100 {
            let u: f64 = rng.random_range(0.0..3.0);
            let t: f64 = rng.random_range(0.01..6.0);
            let n: u32 = rng.random_range(1..20);
            let a = shifted_n_step_cdf(u, pair, n, t);
            let b = shifted_n_step_cdf_mixture(u, pair, n, t);
            assert!((a - b).abs() <= 1e-12, "u={u} t={t} n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn shifted_law_reduces_to_walk_at_zero() {
    let pair = KendallLawPair::from_distribution(&Distribution::uniform(0.0, 1.0).unwrap(), 1.0).unwrap();
    for n in 0..6 {
        for &t in &[0.1, 0.5, 0.9, 1.5, 4.0] {
            assert_eq!(shifted_n_step_cdf(0.0, &pair, n, t), n_step_cdf(&pair, n, t));
            assert!(
                (shifted_compound_cdf(0.0, &pair, 1.3, 0.7, t) - compound_cdf(&pair, 1.3, 0.7, t)).abs()
                    < 1e-15
            );
        }
    }
}

#[test]
fn atom_weights_at_start() {
    let pair = KendallLawPair::lack_of_memory(1.0, 1.0).unwrap();
    let u = 2.0;
    for n in 1..5 {
        let at_u = shifted_n_step_cdf(u, &pair, n, u);
        assert!((at_u - pair.h(u).powi(n as i32)).abs() < 1e-15);
        assert_eq!(shifted_n_step_cdf(u, &pair, n, u - 1e-9), 0.0);
    }
    let at_u = shifted_compound_cdf(u, &pair, 1.0, 2.0, u);
    assert!((at_u - (-2.0 * (1.0 - pair.h(u))).exp()).abs() < 1e-15);
}

#[test]
fn compound_matches_poisson_series() {
    for (_, d, alpha) in laws() {
        let pair = KendallLawPair::from_distribution(&d, alpha).unwrap();
        for &(lambda, t) in &[(1.0, 1.0), (0.3, 2.0), (4.0, 5.0)] {
            let weights = poisson_weights(lambda * t, 1e-12).unwrap();
            for &x in &[0.2, 0.8, 1.7, 5.0, 40.0] {
                let series: f64 = weights
                    .iter()
                    .enumerate()
                    .map(|(n, w)| w * n_step_cdf(&pair, n as u32, x))
                    .sum();
                let closed = compound_cdf(&pair, lambda, t, x);
                assert!((series - closed).abs() < 1e-8, "x={x}: {series} vs {closed}");
                let series: f64 = weights
                    .iter()
                    .enumerate()
                    .map(|(n, w)| w * shifted_n_step_cdf(0.6, &pair, n as u32, x))
                    .sum();
                let closed = shifted_compound_cdf(0.6, &pair, lambda, t, x);
                assert!((series - closed).abs() < 1e-8, "x={x}: {series} vs {closed}");
            }
        }
    }
}

#[test]
fn n_step_law_has_transform_power() {
    for (name, d, alpha) in laws() {
        let pair = KendallLawPair::from_distribution(&d, alpha).unwrap();
        for n in 1..5u32 {
            for &t in &[0.2, 0.7, 1.5, 3.0] {
                let phi = williamson_transform_with_breaks(
                    |s| n_step_cdf(&pair, n, s),
                    alpha,
                    t,
                    &d.breaks(),
                );
                let expected = pair.h(1.0 / t).powi(n as i32);
                assert!((phi - expected).abs() < 1e-7, "{name} n={n} t={t}: {phi} vs {expected}");
            }
        }
    }
}

#[test]
fn pair_satisfies_inversion_identity() {
    for (name, d, alpha) in laws() {
        let pair = KendallLawPair::from_distribution(&d, alpha).unwrap();
        for i in 1..50 {
            let t = 0.0731 * i as f64;
            assert!(pair.h(t) <= pair.f(t) + 1e-12, "{name}: H > F at {t}");
            let f = williamson_invert(|s| pair.h(s), alpha, t).unwrap();
            assert!((f - pair.f(t)).abs() < 1e-6, "{name} t={t}");
        }
    }
}

#[test]
fn density_matches_numerical_derivative() {
    let pair = KendallLawPair::from_distribution(&Distribution::uniform(0.0, 2.0).unwrap(), 1.0).unwrap();
    let u = 0.5;
    for n in 1..4 {
        for &t in &[0.7, 1.1, 1.9, 3.0] {
            let h = 1e-5;
            let numeric = (shifted_n_step_cdf(u, &pair, n, t + h) - shifted_n_step_cdf(u, &pair, n, t - h))
                / (2.0 * h);
            let exact = shifted_n_step_density(u, &pair, n, t).unwrap();
            assert!((numeric - exact).abs() < 1e-6, "n={n} t={t}: {numeric} vs {exact}");
        }
    }
}

#[test]
fn shifted_step_density_completes_atom_to_one() {
    let pair = KendallLawPair::lack_of_memory(1.0, 1.0).unwrap();
    let u = 0.4;
    for n in 1..4 {
        let atom = pair.h(u).powi(n as i32);
        let cont = gconv_risk::quad::integrate_with_breaks(
            |t| shifted_n_step_density(u, &pair, n, t).unwrap(),
            u,
            f64::INFINITY,
            &[1.0],
            gconv_risk::quad::Tolerance::DEFAULT,
        )
        .value;
        assert!((atom + cont - 1.0).abs() < 1e-8, "n={n}: {}", atom + cont);
    }
}

#[test]
fn examples_from_one_step_rules() {
    let pair = KendallLawPair::from_distribution(&Distribution::point(1.0).unwrap(), 1.0).unwrap();
    assert_eq!(one_step_from_point_cdf(0.0, &pair, 2.0), pair.f(2.0));
    for &v in &[0.1, 0.5, 0.9] {
        for &t in &[1.0, 1.5, 3.0] {
            let a = one_step_from_point_cdf(v, &pair, t);
            let b = transition_cdf_points(1.0, v, 1.0, t);
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn psi_identity() {
    for &alpha in &[0.5, 1.0, 2.3] {
        for &a in &[0.0, 0.2, 0.7, 1.0] {
            for &b in &[0.0, 0.4, 0.9, 1.0] {
                let lhs = psi(alpha, a) + psi(alpha, b) - psi(alpha, a) * psi(alpha, b);
                let rhs = 1.0 - (a * b).powf(alpha);
                assert!((lhs - rhs).abs() < 1e-15);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdfs_are_monotone_and_bounded(
        u in 0.0f64..3.0,
        n in 0u32..10,
        lambda in 0.1f64..5.0,
        t in 0.1f64..5.0,
        x in 0.01f64..10.0,
        dx in 0.0f64..2.0,
    ) {
        let pair = KendallLawPair::lack_of_memory(1.0, 1.0).unwrap();
        let fns: [&dyn Fn(f64) -> f64; 4] = [
            &|z| n_step_cdf(&pair, n, z),
            &|z| compound_cdf(&pair, lambda, t, z),
            &|z| shifted_n_step_cdf(u, &pair, n, z),
            &|z| shifted_compound_cdf(u, &pair, lambda, t, z),
        ];
        for f in fns {
            let a = f(x);
            let b = f(x + dx);
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b >= a - 1e-14, "{a} > {b}");
        }
    }
}
