//! Reference values checked against independent brute-force evaluations.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma};
use uqdecomp::{
    dirichlet_expected_entropy, expect, quadrature_1d, EngineConfig, EntropyIntegrand, Method,
    SecondOrder64, Unit,
};

const LN2: f64 = std::f64::consts::LN_2;

type NamedIntegrand = (&'static str, Box<dyn Fn(f64) -> f64>);

fn hb_bits(t: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    (term(t) + term(1.0 - t)) / LN2
}

/// Composite Simpson on a fixed grid of `panels` (even) panels.
fn composite_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Dirichlet draws via independent Gamma variates on a separate generator.
fn dirichlet_draws(alpha: &[f64], n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let gammas: Vec<_> = alpha.iter().map(|&a| Gamma::new(a, 1.0).unwrap()).collect();
    (0..n)
        .map(|_| {
            let g: Vec<f64> = gammas.iter().map(|d| d.sample(&mut rng)).collect();
            let s: f64 = g.iter().sum();
            g.into_iter().map(|x| x / s).collect()
        })
        .collect()
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn uniform_expected_binary_entropy_matches_simpson_grid() {
    let oracle = composite_simpson(hb_bits, 0.0, 1.0, 1_000_000);
    assert!((oracle - 0.721_348).abs() < 1e-6);
    assert!((oracle - 1.0 / (2.0 * LN2)).abs() < 1e-8);

    let adaptive = quadrature_1d(&hb_bits, 0.0, 1.0, 1e-10).unwrap();
    assert!((adaptive.value - oracle).abs() < 1e-8);

    let q = SecondOrder64::interval_uniform(0.0, 1.0).unwrap();
    let r = expect(&q, &hb_bits_of_theta, &EngineConfig::default()).unwrap();
    assert_eq!(r.method, Method::Quadrature);
    assert!((r.value - oracle).abs() < 1e-8);
}

fn hb_bits_of_theta(t: &[f64]) -> f64 {
    hb_bits(t[0])
}

#[test]
fn predictive_mean_matches_monte_carlo() {
    let draws = dirichlet_draws(&[1.0, 3.0], 1_000_000, 1);
    let first: Vec<f64> = draws.iter().map(|d| d[0]).collect();
    let (mean, se) = mean_and_stderr(&first);
    let q = SecondOrder64::dirichlet(&[1.0, 3.0]).unwrap();
    let pm = q.predictive_mean();
    assert_eq!(pm.probs(), &[0.25, 0.75]);
    assert!((mean - pm.probs()[0]).abs() < 3.0 * se, "{mean} ± {se}");
}

#[test]
fn dirichlet_closed_form_matches_monte_carlo() {
    for (alpha, frozen) in [
        (vec![1.0, 1.0], 0.721_347_520_444_481_7),
        (vec![2.0, 2.0], 0.841_572_107_185_229),
    ] {
        let entropies: Vec<f64> = dirichlet_draws(&alpha, 1_000_000, 2)
            .iter()
            .map(|t| hb_bits(t[0]))
            .collect();
        let (mc, se) = mean_and_stderr(&entropies);
        let closed = dirichlet_expected_entropy(&alpha, Unit::Bits);
        assert!((closed - frozen).abs() < 1e-12, "{alpha:?}: {closed}");
        assert!(
            (mc - closed).abs() < 3.0 * se,
            "{alpha:?}: mc {mc} ± {se}, closed {closed}"
        );
    }
    let near_half: f64 = dirichlet_expected_entropy(&[1000.0, 1000.0], Unit::Bits);
    assert!((near_half - 1.0).abs() < 1e-3);
}

#[test]
fn uniform_simplex_closed_form_matches_harmonic_numbers_and_mc() {
    // E[H] under the flat Dirichlet on K outcomes is H_K − 1 nats.
    for k in 2..=6usize {
        let alpha = vec![1.0; k];
        let harmonic: f64 = (1..=k).map(|i| 1.0 / i as f64).sum();
        let closed = dirichlet_expected_entropy(&alpha, Unit::Nats);
        assert!((closed - (harmonic - 1.0)).abs() < 1e-12);

        let entropies: Vec<f64> = dirichlet_draws(&alpha, 200_000, k as u64)
            .iter()
            .map(|t| {
                -t.iter()
                    .filter(|&&p| p > 0.0)
                    .map(|p| p * p.ln())
                    .sum::<f64>()
            })
            .collect();
        let (mc, se) = mean_and_stderr(&entropies);
        assert!((mc - closed).abs() < 3.0 * se, "K={k}");
    }
}

#[test]
fn closed_form_agrees_with_library_monte_carlo() {
    let q = SecondOrder64::dirichlet(&[0.4, 3.0, 9.0]).unwrap();
    let closed = expect(&q, &EntropyIntegrand, &EngineConfig::default()).unwrap();
    assert_eq!(closed.method, Method::ClosedForm);
    let entropy = |t: &[f64]| {
        -t.iter()
            .filter(|&&p| p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    };
    let mc = uqdecomp::mc_expect(&q, &entropy, 100_000, 17).unwrap();
    assert_eq!(mc.method, Method::MonteCarlo);
    assert!((mc.value - closed.value).abs() <= mc.error_bound);
}

#[test]
fn quadrature_error_bound_shrinks_with_tolerance() {
    let integrands: Vec<NamedIntegrand> = vec![
        ("entropy", Box::new(hb_bits)),
        ("sqrt", Box::new(|t: f64| t.sqrt())),
        ("sin", Box::new(|t: f64| (7.0 * t).sin())),
        ("peak", Box::new(|t: f64| 1.0 / (1e-2 + (t - 0.3).powi(2)))),
    ];
    for (name, f) in &integrands {
        let mut prev = f64::INFINITY;
        let mut tol = 1e-3;
        while tol > 1e-12 {
            let r = quadrature_1d(f.as_ref(), 0.0, 1.0, tol).unwrap();
            assert!(r.error_bound <= tol, "{name}: bound above tolerance");
            assert!(r.error_bound <= prev, "{name}: bound grew at tol {tol}");
            prev = r.error_bound;
            tol /= 2.0;
        }
    }
}
