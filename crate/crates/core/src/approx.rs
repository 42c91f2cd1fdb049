//! Gaussian approximation of a symmetric α-stable process.
//!
//! The Lévy measure is split at ε: jumps smaller than ε are replaced by a
//! Brownian motion with variance σ_ε² = ∫_{|q|<ε} q² ν(dq), jumps with
//! ε ≤ |q| ≤ ε_out form a compound Poisson process with intensity λ and
//! jump density φ = ν/λ on that annulus. The drift vanishes by symmetry.

use rand::Rng;
use rand_distr::Open01;

use crate::error::{invalid, Result};
use crate::stable::levy_constant;

pub const DEFAULT_EPS: f64 = 0.1;
pub const DEFAULT_EPS_OUT: f64 = 1e5;

/// Derived parameters of the Brownian + compound Poisson surrogate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxParams {
    pub alpha: f64,
    pub eps: f64,
    pub eps_out: f64,
    pub c_const: f64,
    pub sigma_eps: f64,
    pub lambda: f64,
}

/// Builds the approximation for 1 ≤ α < 2 and cutoffs ε < 1 ≤ ε_out.
pub fn build_approx(alpha: f64, eps: f64, eps_out: f64) -> Result<ApproxParams> {
    if !(1.0..2.0).contains(&alpha) {
        return Err(invalid("alpha", format!("{alpha} is outside [1, 2)")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("{eps} is outside (0, 1)")));
    }
    if !(eps_out >= 1.0 && eps_out.is_finite()) {
        return Err(invalid("eps_out", format!("{eps_out} must be finite and >= 1")));
    }
    let c = levy_constant(alpha, 1)?;
    let sigma2 = 2.0 * c * eps.powf(2.0 - alpha) / (2.0 - alpha);
    let lambda = 2.0 * c * (eps.powf(-alpha) - eps_out.powf(-alpha)) / alpha;
    Ok(ApproxParams {
        alpha,
        eps,
        eps_out,
        c_const: c,
        sigma_eps: sigma2.sqrt(),
        lambda,
    })
}

impl ApproxParams {
    /// Jump-free surrogate: a Brownian motion with standard deviation
    /// `sigma` per unit time. Recorded with α = 2.
    pub fn brownian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", format!("{sigma} must be positive")));
        }
        Ok(Self {
            alpha: 2.0,
            eps: f64::INFINITY,
            eps_out: f64::INFINITY,
            c_const: 0.0,
            sigma_eps: sigma,
            lambda: 0.0,
        })
    }

    pub fn has_jumps(&self) -> bool {
        self.lambda > 0.0
    }

    /// Drift a_ε; zero for the symmetric measure.
    pub fn drift(&self) -> f64 {
        0.0
    }

    /// ∫_{|q| ≤ ε_out} q² ν(dq): the per-unit-time variance of the full
    /// (truncated) surrogate.
    pub fn truncated_second_moment(&self) -> f64 {
        let jumps = if self.has_jumps() {
            2.0 * self.c_const * (self.eps_out.powf(2.0 - self.alpha) - self.eps.powf(2.0 - self.alpha))
                / (2.0 - self.alpha)
        } else {
            0.0
        };
        self.sigma_eps * self.sigma_eps + jumps
    }
}

/// Normalized jump density φ on E = {ε ≤ |q| ≤ ε_out}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpLaw {
    pub approx: ApproxParams,
    /// ε^{−α} − ε_out^{−α}, the normalizer of the magnitude CDF.
    span: f64,
}

impl JumpLaw {
    pub fn new(approx: ApproxParams) -> Result<Self> {
        if !approx.has_jumps() {
            return Err(invalid("lambda", "jump law requires a positive jump intensity"));
        }
        let a = approx.alpha;
        Ok(Self {
            approx,
            span: approx.eps.powf(-a) - approx.eps_out.powf(-a),
        })
    }

    pub fn eps(&self) -> f64 {
        self.approx.eps
    }

    pub fn eps_out(&self) -> f64 {
        self.approx.eps_out
    }

    /// φ(q) = ν(q)/λ on the support, zero elsewhere.
    pub fn density(&self, q: f64) -> f64 {
        let m = q.abs();
        if m < self.approx.eps || m > self.approx.eps_out {
            return 0.0;
        }
        self.approx.c_const / m.powf(1.0 + self.approx.alpha) / self.approx.lambda
    }

    /// Probability that |q| ≤ m, for m ≥ 0.
    pub fn magnitude_cdf(&self, m: f64) -> f64 {
        let (eps, eps_out, a) = (self.approx.eps, self.approx.eps_out, self.approx.alpha);
        if m <= eps {
            0.0
        } else if m >= eps_out {
            1.0
        } else {
            (eps.powf(-a) - m.powf(-a)) / self.span
        }
    }

    /// Probability that q falls in [lo, hi] on the positive side (0 ≤ lo ≤ hi).
    pub fn one_sided_mass(&self, lo: f64, hi: f64) -> f64 {
        0.5 * (self.magnitude_cdf(hi) - self.magnitude_cdf(lo))
    }

    /// Exact CDF of φ.
    pub fn cdf(&self, q: f64) -> f64 {
        if q >= 0.0 {
            0.5 + 0.5 * self.magnitude_cdf(q)
        } else {
            0.5 - 0.5 * self.magnitude_cdf(-q)
        }
    }

    /// Inverse of the magnitude CDF at u ∈ [0, 1].
    pub fn magnitude_quantile(&self, u: f64) -> f64 {
        let a = self.approx.alpha;
        let m = (self.approx.eps.powf(-a) - u * self.span).powf(-1.0 / a);
        m.clamp(self.approx.eps, self.approx.eps_out)
    }

    /// Inverse-CDF draw: uniform sign, magnitude from [`Self::magnitude_quantile`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        let m = self.magnitude_quantile(u);
        if rng.random::<bool>() {
            m
        } else {
            -m
        }
    }
}

pub fn jump_cdf(law: &JumpLaw, q: f64) -> f64 {
    law.cdf(q)
}

pub fn sample_jump<R: Rng + ?Sized>(law: &JumpLaw, rng: &mut R) -> f64 {
    law.sample(rng)
}

/// P(N_dt = 0) and P(N_dt = 1) for a Poisson process of rate `lambda`.
pub fn poisson_weights(lambda: f64, dt: f64) -> Result<(f64, f64)> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("{lambda} must be finite and non-negative")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", format!("{dt} must be positive")));
    }
    let mean = lambda * dt;
    let p0 = (-mean).exp();
    Ok((p0, mean * p0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use approx::assert_relative_eq;

    fn law(alpha: f64, eps: f64) -> JumpLaw {
        JumpLaw::new(build_approx(alpha, eps, DEFAULT_EPS_OUT).unwrap()).unwrap()
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        assert!(build_approx(2.0, 0.1, 1e5).is_err());
        assert!(build_approx(0.9, 0.1, 1e5).is_err());
        assert!(build_approx(1.5, 0.0, 1e5).is_err());
        assert!(build_approx(1.5, 1.2, 1e5).is_err());
        assert!(build_approx(1.5, 0.1, 0.5).is_err());
        assert!(poisson_weights(-1.0, 0.1).is_err());
        assert!(poisson_weights(1.0, 0.0).is_err());
    }

    #[test]
    fn reference_parameters_alpha_1_5() {
        let p = build_approx(1.5, 0.1, 1e5).unwrap();
        assert_relative_eq!(p.sigma_eps * p.sigma_eps, 0.378474, epsilon = 5e-6);
        assert_relative_eq!(p.lambda, 12.6158, epsilon = 5e-4);
        assert_eq!(p.drift(), 0.0);
    }

    #[test]
    fn lambda_ratio_under_eps_doubling() {
        let a = build_approx(1.5, 0.1, 1e5).unwrap();
        let b = build_approx(1.5, 0.2, 1e5).unwrap();
        assert_relative_eq!(b.lambda / a.lambda, 2f64.powf(-1.5), max_relative = 1e-6);
    }

    #[test]
    fn sigma_approaches_two_from_below() {
        let s19 = build_approx(1.9, 0.1, 1e5).unwrap().sigma_eps.powi(2);
        let s199 = build_approx(1.99, 0.1, 1e5).unwrap().sigma_eps.powi(2);
        let s1999 = build_approx(1.999, 0.1, 1e5).unwrap().sigma_eps.powi(2);
        assert!(s19 < s199 && s199 < s1999 && s1999 < 2.0);
        assert!((2.0 - s1999).abs() < 0.01);
    }

    #[test]
    fn monotone_in_eps() {
        for alpha in [1.0, 1.3, 1.8] {
            let ps: Vec<_> = (1..20)
                .map(|i| build_approx(alpha, 0.05 * i as f64, 1e5).unwrap())
                .collect();
            for w in ps.windows(2) {
                assert!(w[1].sigma_eps > w[0].sigma_eps);
                assert!(w[1].lambda < w[0].lambda);
            }
        }
    }

    #[test]
    fn jump_cdf_reference_values() {
        let l = law(1.5, 0.1);
        assert_eq!(jump_cdf(&l, 0.0), 0.5);
        assert_eq!(jump_cdf(&l, 0.05), 0.5);
        assert_eq!(jump_cdf(&l, 1e5), 1.0);
        assert_eq!(jump_cdf(&l, -1e5), 0.0);
        let tail = 1.0 - jump_cdf(&l, 1.0) + jump_cdf(&l, -1.0);
        assert_relative_eq!(tail, 0.0316228, epsilon = 1e-7);
    }

    #[test]
    fn quantile_endpoints() {
        let l = law(1.5, 0.1);
        assert_relative_eq!(l.magnitude_quantile(0.0), 0.1, max_relative = 1e-12);
        assert_relative_eq!(l.magnitude_quantile(1.0), 1e5, max_relative = 1e-9);
    }

    #[test]
    fn sampled_tail_matches_cdf() {
        let l = law(1.5, 0.1);
        let mut rng = stream_rng(21, 0);
        let n = 100_000;
        let mut hits = 0usize;
        for _ in 0..n {
            let q = sample_jump(&l, &mut rng);
            assert!(q.abs() >= 0.1 && q.abs() <= 1e5);
            if q.abs() >= 1.0 {
                hits += 1;
            }
        }
        let p = hits as f64 / n as f64;
        assert!((p - 0.0316).abs() < 0.003, "tail {p}");
    }

    #[test]
    fn poisson_reference_values() {
        let (p0, p1) = poisson_weights(12.6158, 1e-3).unwrap();
        assert_relative_eq!(p0, 0.987463, epsilon = 1e-6);
        assert_relative_eq!(p1, 0.012458, epsilon = 1e-6);
        // P(N >= 2) by series closes the total.
        let mean: f64 = 12.6158e-3;
        let mut rest = 0.0;
        let mut term = p1;
        for k in 2..30 {
            term *= mean / k as f64;
            rest += term;
        }
        assert_relative_eq!(p0 + p1 + rest, 1.0, epsilon = 1e-14);
        let (a, b) = poisson_weights(1.0, 1.0).unwrap();
        assert_eq!(a, b);
        let (a, b) = poisson_weights(3.0, 1e-12).unwrap();
        assert!(1.0 - a < 1e-11 && b < 1e-11);
    }

    #[test]
    fn brownian_surrogate_has_no_jumps() {
        let b = ApproxParams::brownian(0.5).unwrap();
        assert!(!b.has_jumps());
        assert!(JumpLaw::new(b).is_err());
        assert_eq!(b.truncated_second_moment(), 0.25);
    }
}
