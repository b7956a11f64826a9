use gconv_risk::convolutions::{char_fn, convolve_points, kernel, Algebra};
use gconv_risk::measures::Distribution;
use gconv_risk::rng::{stream, Uniforms};
use gconv_risk::stats::{ks_distance, MeanEstimate};
use gconv_risk::walks::*;
use gconv_risk::williamson::{compound_cdf, n_step_cdf, KendallLawPair};
use proptest::prelude::*;

const SEED: u64 = 20261017;

#[test]
fn kendall_terminal_law_matches_closed_form() {
    let alg = Algebra::Kendall { alpha: 1.0 };
    for law in [
        Distribution::point(1.0).unwrap(),
        Distribution::uniform(0.0, 1.0).unwrap(),
        Distribution::pareto_2alpha(1.0).unwrap(),
    ] {
        let pair = KendallLawPair::from_distribution(&law, 1.0).unwrap();
        let xs = terminal_states(&alg, &law, 5, 0.0, 100_000, SEED, Sampler::Auto).unwrap();
        let ks = ks_distance(&xs, |t| n_step_cdf(&pair, 5, t));
        assert!(ks <= 0.01, "{law:?}: KS {ks}");
    }
}

#[test]
fn kendall_compound_law_matches_closed_form() {
    let alg = Algebra::Kendall { alpha: 1.0 };
    let law = Distribution::uniform(0.0, 1.0).unwrap();
    let pair = KendallLawPair::from_distribution(&law, 1.0).unwrap();
    let xs = compound_terminal_states(&alg, &law, 1.0, 1.0, 0.0, 100_000, SEED).unwrap();
    let ks = ks_distance(&xs, |x| compound_cdf(&pair, 1.0, 1.0, x));
    assert!(ks <= 0.01, "KS {ks}");
}

#[test]
fn generic_sampler_agrees_with_recursions() {
    let cases = [
        (Algebra::Kendall { alpha: 1.0 }, Distribution::uniform(0.0, 1.0).unwrap(), 3),
        (Algebra::Max, Distribution::exponential(1.0).unwrap(), 4),
        (Algebra::AlphaStable { alpha: 1.5 }, Distribution::uniform(0.0, 2.0).unwrap(), 4),
    ];
    for (alg, law, n) in cases {
        let ks = simulate_generic_vs_specialized(&alg, &law, n, 100_000, SEED).unwrap();
        assert!(ks <= 0.01, "{}: KS {ks}", alg.name());
        assert_eq!(simulate_generic_vs_specialized(&alg, &law, 0, 1000, SEED).unwrap(), 0.0);
    }
    assert!(simulate_generic_vs_specialized(
        &Algebra::Kingman { s: 1.0 },
        &Distribution::point(1.0).unwrap(),
        1,
        10,
        SEED
    )
    .is_err());
}

#[test]
fn empirical_transform_is_power_of_step_transform() {
    let law = Distribution::uniform(0.0, 1.0).unwrap();
    let n = 3;
    let t = 0.8;
    for alg in Algebra::catalogue() {
        let xs = terminal_states(&alg, &law, n, 0.0, 40_000, SEED, Sampler::Auto).unwrap();
        let omegas: Vec<f64> = xs.iter().map(|&x| kernel(&alg, t * x)).collect();
        let est = MeanEstimate::from_samples(&omegas);
        let exact = char_fn(&alg, &law, t).powi(n as i32);
        assert!(est.within(exact, 3.0), "{}: {est:?} vs {exact}", alg.name());
    }
}

#[test]
fn kendall_step_has_convolution_law() {
    let alpha = 1.0;
    let mut xi = Uniforms::new(SEED, stream::XI);
    let mut pi = Uniforms::new(SEED, stream::PARETO);
    let xs: Vec<f64> = (0..100_000)
        .map(|_| {
            kendall_step(
                0.5,
                1.0,
                xi.next_open(),
                pareto_2alpha_draw(alpha, pi.next_open()),
                alpha,
            )
        })
        .collect();
    let law = convolve_points(&Algebra::Kendall { alpha }, 0.5, 1.0).unwrap();
    let ks = ks_distance(&xs, |x| law.cdf(x));
    assert!(ks <= 0.01, "KS {ks}");
}

#[test]
fn suffix_is_reproduced_from_any_step() {
    let law = Distribution::uniform(0.0, 1.0).unwrap();
    for alg in Algebra::catalogue() {
        let path = simulate(&alg, &law, 12, 0.3, 99).unwrap();
        for k in [0usize, 1, 5, 11, 12] {
            let suffix = simulate_from(&alg, &law, k, path.states[k], 12, 99).unwrap();
            assert_eq!(suffix, path.states[k..].to_vec(), "{} k={k}", alg.name());
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let law = Distribution::exponential(1.0).unwrap();
    let alg = Algebra::Kendall { alpha: 1.0 };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| terminal_states(&alg, &law, 7, 0.0, 5000, SEED, Sampler::Auto).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn start_is_honored() {
    let law = Distribution::point(1.0).unwrap();
    for alg in Algebra::catalogue() {
        let p = simulate(&alg, &law, 0, 2.5, 1).unwrap();
        assert_eq!(p.states, vec![2.5]);
        let p = simulate(&alg, &law, 3, 2.5, 1).unwrap();
        assert_eq!(p.states[0], 2.5);
        assert_eq!(p.steps(), 3);
    }
    assert!(simulate(&Algebra::Max, &law, 3, -1.0, 1).is_err());
}

#[test]
fn zero_steps_keep_the_walk_at_start() {
    let law = Distribution::point(0.0).unwrap();
    for alg in Algebra::catalogue() {
        let p = simulate(&alg, &law, 5, 1.7, 3).unwrap();
        assert!(p.states.iter().all(|&x| x == 1.7), "{}", alg.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn alpha_stable_states_add_in_power(seed in any::<u64>(), alpha in 0.3f64..3.0) {
        let law = Distribution::exponential(1.0).unwrap();
        let alg = Algebra::AlphaStable { alpha };
        let path = simulate(&alg, &law, 20, 0.0, seed).unwrap();
        let mut u = Uniforms::new(seed, stream::STEP);
        for k in 0..20 {
            let step = law.quantile(u.next_open());
            let lhs = path.states[k + 1].powf(alpha);
            let rhs = path.states[k].powf(alpha) + step.powf(alpha);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }
    }

    #[test]
    fn max_and_kendall_paths_never_decrease(seed in any::<u64>(), alpha in 0.3f64..3.0) {
        let law = Distribution::uniform(0.0, 1.0).unwrap();
        for alg in [Algebra::Max, Algebra::Kendall { alpha }] {
            let path = simulate(&alg, &law, 30, 0.0, seed).unwrap();
            prop_assert!(path.states.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn same_seed_same_path(seed in any::<u64>()) {
        let law = Distribution::pareto_2alpha(1.0).unwrap();
        for alg in Algebra::catalogue() {
            let a = simulate(&alg, &law, 8, 0.0, seed).unwrap();
            let b = simulate(&alg, &law, 8, 0.0, seed).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
