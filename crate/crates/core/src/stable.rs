//! Symmetric α-stable laws: parameters, characteristic function, Lévy
//! measure and an exact sampler.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01, StandardNormal};

use crate::error::{invalid, Result};
use crate::special::gamma;

/// Below this distance from α = 1 the Cauchy branch of the characteristic
/// function is used.
const CHAR_FN_ALPHA_ONE_TOL: f64 = 1e-12;
/// Below this distance from α = 1 the sampler returns tan(V) directly.
const SAMPLER_ALPHA_ONE_TOL: f64 = 1e-9;

/// Parameters (α, β, σ, μ) of a stable law S(α, β, σ, μ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub scale: f64,
    pub location: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, scale: f64, location: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(invalid("alpha", format!("{alpha} is outside (0, 2]")));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(invalid("beta", format!("{beta} is outside [-1, 1]")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("scale", format!("{scale} must be positive")));
        }
        if !location.is_finite() {
            return Err(invalid("location", "must be finite"));
        }
        Ok(Self {
            alpha,
            beta,
            scale,
            location,
        })
    }

    /// The standard symmetric law S(α, 0, 1, 0), with characteristic
    /// function exp(−|k|^α).
    pub fn standard_symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0, 1.0, 0.0)
    }
}

/// Normalization constant C_{d,α} of the isotropic α-stable Lévy measure
/// ν(dq) = C_{d,α} |q|^{−d−α} dq.
pub fn levy_constant(alpha: f64, dim: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(invalid(
            "alpha",
            format!("{alpha} is outside (0, 2); the Levy measure degenerates at alpha = 2"),
        ));
    }
    if dim == 0 {
        return Err(invalid("dim", "must be at least 1"));
    }
    let d = dim as f64;
    Ok(alpha * 2f64.powf(alpha - 1.0) * gamma((alpha + d) / 2.0)
        / (PI.powf(d / 2.0) * gamma((2.0 - alpha) / 2.0)))
}

/// One-dimensional symmetric α-stable Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyMeasure1D {
    pub alpha: f64,
    pub c_const: f64,
}

impl LevyMeasure1D {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(Self {
            alpha,
            c_const: levy_constant(alpha, 1)?,
        })
    }

    pub fn dim(&self) -> usize {
        1
    }

    /// Density c/|q|^{1+α}; infinite at the origin.
    pub fn density(&self, q: f64) -> f64 {
        self.c_const / q.abs().powf(1.0 + self.alpha)
    }
}

/// Characteristic function E[exp(ikX)] of S(α, β, σ, μ).
pub fn char_fn(params: &StableParams, k: f64) -> Complex64 {
    let StableParams {
        alpha,
        beta,
        scale,
        location,
    } = *params;
    if k == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let ak = k.abs();
    let sgn = k.signum();
    let exponent = if (alpha - 1.0).abs() < CHAR_FN_ALPHA_ONE_TOL {
        let skew = beta * (2.0 / PI) * sgn * ak.ln();
        Complex64::new(-scale * ak, -scale * ak * skew)
    } else {
        let mag = (scale * ak).powf(alpha);
        let skew = beta * sgn * (PI * alpha / 2.0).tan();
        Complex64::new(-mag, mag * skew)
    };
    (exponent + Complex64::new(0.0, k * location)).exp()
}

/// Chambers–Mallows–Stuck sampler for the standard symmetric law
/// S(α, 0, 1, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricStable {
    alpha: f64,
}

impl SymmetricStable {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&alpha) {
            return Err(invalid("alpha", format!("{alpha} is outside [1, 2]")));
        }
        Ok(Self { alpha })
    }

    /// Sampler for a general parameter set; only β = 0 is supported.
    pub fn from_params(params: &StableParams) -> Result<Self> {
        if params.beta != 0.0 {
            return Err(invalid("beta", "only symmetric (beta = 0) sampling is supported"));
        }
        Self::new(params.alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// CMS transform of a uniform angle `v` on (−π/2, π/2) and a unit
    /// exponential `w`.
    pub fn transform(&self, v: f64, w: f64) -> f64 {
        let a = self.alpha;
        if (a - 1.0).abs() < SAMPLER_ALPHA_ONE_TOL {
            return v.tan();
        }
        let cos_v = v.cos();
        (a * v).sin() / cos_v.powf(1.0 / a) * (((1.0 - a) * v).cos() / w).powf((1.0 - a) / a)
    }
}

impl Distribution<f64> for SymmetricStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.alpha == 2.0 {
            let z: f64 = rng.sample(StandardNormal);
            return std::f64::consts::SQRT_2 * z;
        }
        let u: f64 = rng.sample(Open01);
        let v = PI * u - FRAC_PI_2;
        let mut w: f64 = rng.sample(Exp1);
        if w <= 0.0 {
            w = f64::MIN_POSITIVE;
        }
        self.transform(v, w)
    }
}

/// `n` i.i.d. draws from S(α, 0, 1, 0).
pub fn sample_sas<R: Rng + ?Sized>(alpha: f64, rng: &mut R, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let dist = SymmetricStable::new(alpha)?;
    Ok((0..n).map(|_| dist.sample(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use approx::assert_relative_eq;

    #[test]
    fn levy_constant_cauchy_is_one_over_pi() {
        let c = levy_constant(1.0, 1).unwrap();
        assert!((c * PI - 1.0).abs() < 1e-12);
    }

    #[test]
    fn levy_constant_rejects_endpoints() {
        assert!(levy_constant(2.0, 1).is_err());
        assert!(levy_constant(0.0, 1).is_err());
        assert!(levy_constant(-0.5, 1).is_err());
        assert!(levy_constant(1.5, 0).is_err());
    }

    #[test]
    fn levy_constant_vanishes_toward_gaussian_limit() {
        let alphas: Vec<f64> = (0..=99).map(|i| 1.9 + 0.001 * i as f64).collect();
        let vals: Vec<f64> = alphas.iter().map(|&a| levy_constant(a, 1).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(*vals.last().unwrap() < 2e-3);
    }

    #[test]
    fn levy_measure_is_even() {
        let m = LevyMeasure1D::new(1.3).unwrap();
        for &q in &[0.01, 0.5, 3.0, 1e4] {
            assert_eq!(m.density(q), m.density(-q));
        }
        assert_eq!(m.dim(), 1);
    }

    #[test]
    fn char_fn_reference_values() {
        let gauss = StableParams::standard_symmetric(2.0).unwrap();
        assert_relative_eq!(char_fn(&gauss, 1.0).re, (-1.0f64).exp(), max_relative = 1e-14);
        let p = StableParams::standard_symmetric(1.5).unwrap();
        let v = char_fn(&p, 2.0);
        assert_relative_eq!(v.re, (-(2f64.powf(1.5))).exp(), max_relative = 1e-14);
        assert!(v.im.abs() < 1e-15);
        assert_relative_eq!(v.re, 0.059106, epsilon = 1e-6);
        for a in [1.0, 1.3, 2.0] {
            let p = StableParams::new(a, 0.4, 0.7, 0.2).unwrap();
            assert_eq!(char_fn(&p, 0.0), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn params_validation() {
        assert!(StableParams::new(2.1, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 1.5, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 0.0, 0.0).is_err());
        let skewed = StableParams::new(1.5, 0.5, 1.0, 0.0).unwrap();
        assert!(SymmetricStable::from_params(&skewed).is_err());
    }

    #[test]
    fn sampler_is_seed_deterministic() {
        let a = sample_sas(1.5, &mut stream_rng(3, 0), 100).unwrap();
        let b = sample_sas(1.5, &mut stream_rng(3, 0), 100).unwrap();
        assert_eq!(a, b);
        assert!(sample_sas(1.5, &mut stream_rng(3, 0), 0).is_err());
        assert!(sample_sas(0.8, &mut stream_rng(3, 0), 10).is_err());
    }

    #[test]
    fn cms_transform_is_continuous_through_alpha_one() {
        let below = SymmetricStable { alpha: 1.0 - 2e-9 };
        let at = SymmetricStable { alpha: 1.0 };
        for &(v, w) in &[(0.3, 0.7), (-1.2, 2.0), (1.0, 0.1)] {
            assert!((below.transform(v, w) - at.transform(v, w)).abs() < 1e-6);
        }
    }

    #[test]
    fn gaussian_case_has_variance_two() {
        let xs = sample_sas(2.0, &mut stream_rng(11, 0), 100_000).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((var - 2.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn cauchy_median_is_zero() {
        let mut xs = sample_sas(1.0, &mut stream_rng(5, 0), 100_000).unwrap();
        xs.sort_by(|a, b| a.total_cmp(b));
        let med = 0.5 * (xs[49_999] + xs[50_000]);
        assert!(med.abs() < 0.02, "median {med}");
    }
}
