mod common;

use approx::assert_relative_eq;
use levy_exit::{build_approx, jump_cdf, poisson_weights, sample_jump, stream_rng, JumpLaw};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

const ALPHAS: [f64; 4] = [1.0, 1.25, 1.5, 1.75];

/// ∫_0^a q^{1−α} dq on panels [a·2^{−k−1}, a·2^{−k}].
fn small_jump_integral(alpha: f64, a: f64) -> f64 {
    let f = |q: f64| q.powf(1.0 - alpha);
    (0..600)
        .map(|k| {
            let hi = a * 0.5f64.powi(k);
            common::gl16(&f, 0.5 * hi, hi)
        })
        .sum()
}

#[test]
fn sigma_eps_matches_numerical_second_moment() {
    for &a in &ALPHAS {
        let p = build_approx(a, 0.1, 1e5).unwrap();
        let c = common::levy_constant_oracle(a);
        let oracle = 2.0 * c * small_jump_integral(a, 0.1);
        assert_relative_eq!(p.sigma_eps * p.sigma_eps, oracle, max_relative = 1e-10);
    }
}

#[test]
fn lambda_matches_numerical_mass() {
    for &a in &ALPHAS {
        for &eps in &[0.05, 0.1, 0.3] {
            let p = build_approx(a, eps, 1e5).unwrap();
            let c = common::levy_constant_oracle(a);
            let oracle = 2.0 * c * common::gl_geometric(&|q: f64| q.powf(-1.0 - a), eps, 1e5);
            assert_relative_eq!(p.lambda, oracle, max_relative = 1e-10);
        }
    }
}

#[test]
fn jump_density_is_normalized() {
    for &a in &ALPHAS {
        let law = JumpLaw::new(build_approx(a, 0.1, 1e5).unwrap()).unwrap();
        let mass = 2.0 * common::gl_geometric(&|q| law.density(q), 0.1, 1e5);
        assert!((mass - 1.0).abs() < 1e-10, "alpha = {a}: mass = {mass}");
    }
}

#[test]
fn jump_cdf_matches_integrated_density() {
    let law = JumpLaw::new(build_approx(1.5, 0.1, 1e5).unwrap()).unwrap();
    for &q in &[0.1, 0.15, 0.5, 1.0, 7.0, 300.0] {
        let upper = common::gl_geometric(&|s| law.density(s), q, 1e5);
        assert!((1.0 - jump_cdf(&law, q) - upper).abs() < 1e-10, "q = {q}");
        assert!((jump_cdf(&law, -q) - upper).abs() < 1e-10, "q = {q}");
    }
    let tail = 1.0 - jump_cdf(&law, 1.0) + jump_cdf(&law, -1.0);
    assert!((tail - 0.031_622_8).abs() < 1e-7);
}

#[test]
fn sampled_jumps_follow_the_law() {
    let law = JumpLaw::new(build_approx(1.5, 0.1, 1e5).unwrap()).unwrap();
    let mut rng = stream_rng(21, 0);
    let n = 1_000_000;
    let draws: Vec<f64> = (0..n).map(|_| sample_jump(&law, &mut rng)).collect();
    assert!(draws.iter().all(|q| (0.1..=1e5).contains(&q.abs())));
    let big = draws.iter().filter(|q| q.abs() >= 1.0).count() as f64 / n as f64;
    let sd = (0.0316 * 0.9684 / n as f64).sqrt();
    assert!((big - 0.031_622_8).abs() < 4.0 * sd, "P(|q| >= 1) = {big}");
    let pos = draws.iter().filter(|&&q| q > 0.0).count() as f64 / n as f64;
    assert!((pos - 0.5).abs() < 0.002);
    // Magnitude CDF at several points against the integrated density.
    for &m in &[0.12, 0.2, 0.4] {
        let emp = draws.iter().filter(|q| q.abs() <= m).count() as f64 / n as f64;
        let oracle = 2.0 * common::gl_geometric(&|s| law.density(s), 0.1, m);
        assert!((emp - oracle).abs() < 0.002, "m = {m}: {emp} vs {oracle}");
    }
}

#[test]
fn second_moments_add_up() {
    let a = 1.5;
    let dt: f64 = 0.005;
    let p = build_approx(a, 0.1, 1e5).unwrap();
    let law = JumpLaw::new(p).unwrap();
    let mut rng = stream_rng(4, 0);
    let n = 1_000_000;
    let sd = p.sigma_eps * dt.sqrt();
    let var: f64 = (0..n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            (sd * z).powi(2)
        })
        .sum::<f64>()
        / n as f64;
    let jump_moment = 2.0 * common::gl_geometric(&|q| q * q * law.density(q), 0.1, 1e5);
    let total = var + p.lambda * dt * jump_moment;
    let c = common::levy_constant_oracle(a);
    let oracle = dt * 2.0 * c * (small_jump_integral(a, 0.1) + common::gl_geometric(&|q: f64| q.powf(1.0 - a), 0.1, 1e5));
    assert!((total / oracle - 1.0).abs() < 0.02);
    assert!((var / (sd * sd) - 1.0).abs() < 0.02);
    assert_relative_eq!(p.truncated_second_moment() * dt, oracle, max_relative = 1e-8);
}

#[test]
fn poisson_weights_reference() {
    let (p0, p1) = poisson_weights(12.6158, 1e-3).unwrap();
    assert_relative_eq!(p0, (-0.0126158f64).exp(), max_relative = 1e-14);
    assert_relative_eq!(p1, 0.0126158 * (-0.0126158f64).exp(), max_relative = 1e-14);
    assert_eq!(poisson_weights(0.0, 1e-3).unwrap(), (1.0, 0.0));
}

proptest! {
    #[test]
    fn poisson_weights_are_sub_probability(lambda in 0.0f64..1e4, dt in 1e-6f64..1.0) {
        let (p0, p1) = poisson_weights(lambda, dt).unwrap();
        prop_assert!(p0 >= 0.0 && p1 >= 0.0 && p0 + p1 <= 1.0 + 1e-15);
    }

    #[test]
    fn parameters_are_monotone(a in 1.0f64..1.95, e1 in 0.01f64..0.9, de in 0.001f64..0.09) {
        let lo = build_approx(a, e1, 1e5).unwrap();
        let hi = build_approx(a, e1 + de, 1e5).unwrap();
        prop_assert!(hi.sigma_eps > lo.sigma_eps);
        prop_assert!(hi.lambda < lo.lambda);
    }

    #[test]
    fn cdf_is_monotone_and_quantile_inverts(a in 1.0f64..1.95, u in 0.0f64..1.0, q1 in -50.0f64..50.0, dq in 0.0f64..5.0) {
        let law = JumpLaw::new(build_approx(a, 0.1, 1e5).unwrap()).unwrap();
        prop_assert!(jump_cdf(&law, q1 + dq) >= jump_cdf(&law, q1));
        let m = law.magnitude_quantile(u);
        prop_assert!((law.magnitude_cdf(m) - u).abs() < 1e-9);
    }

    #[test]
    fn draws_stay_in_support(a in 1.0f64..1.95, seed in 0u64..1000) {
        let law = JumpLaw::new(build_approx(a, 0.1, 1e5).unwrap()).unwrap();
        let mut rng = stream_rng(seed, 0);
        for _ in 0..100 {
            let q = sample_jump(&law, &mut rng);
            prop_assert!((0.1..=1e5).contains(&q.abs()));
        }
    }
}
