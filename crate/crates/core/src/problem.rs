//! Exit-problem definitions: domain, boundary topology, noise per axis and
//! optional cellular drift.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Absorbing,
    Periodic,
}

/// Noise acting on one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    /// χ dW.
    Brownian,
    /// χ dL^α, approximated by χ σ_ε dW plus χ-scaled compound Poisson jumps.
    Levy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub boundary: Boundary,
    pub noise: Noise,
}

impl Axis {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drift {
    None,
    /// Pe · v for the mode-(m, n) cellular field on (θ, r).
    Cellular { pe: f64, m: u32, n: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub axes: Vec<Axis>,
    pub chi: f64,
    pub alpha: f64,
    pub drift: Drift,
}

impl ProblemSpec {
    pub fn new(axes: Vec<Axis>, chi: f64, alpha: f64, drift: Drift) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(invalid("dim", format!("{} axes; only 1 or 2 are supported", axes.len())));
        }
        for a in &axes {
            if !(a.lo.is_finite() && a.hi.is_finite() && a.hi > a.lo) {
                return Err(invalid("domain", format!("[{}, {}] is not a proper interval", a.lo, a.hi)));
            }
        }
        if axes.iter().filter(|a| a.noise == Noise::Levy).count() > 1 {
            return Err(invalid("noise", "at most one axis may carry jumps"));
        }
        if !(chi > 0.0 && chi.is_finite()) {
            return Err(invalid("chi", format!("{chi} must be positive")));
        }
        if !(1.0..=2.0).contains(&alpha) {
            return Err(invalid("alpha", format!("{alpha} is outside [1, 2]")));
        }
        if let Drift::Cellular { pe, .. } = drift {
            if axes.len() != 2 {
                return Err(invalid("drift", "cellular drift needs the (theta, r) plane"));
            }
            if !(pe >= 0.0 && pe.is_finite()) {
                return Err(invalid("pe", format!("{pe} must be non-negative")));
            }
        }
        Ok(Self {
            axes,
            chi,
            alpha,
            drift,
        })
    }

    /// dX = χ dL^α on [0, 1] with absorbing ends.
    pub fn benchmark_1d(alpha: f64, chi: f64) -> Result<Self> {
        let axis = Axis {
            lo: 0.0,
            hi: 1.0,
            boundary: Boundary::Absorbing,
            noise: Noise::Levy,
        };
        Self::new(vec![axis], chi, alpha, Drift::None)
    }

    /// dθ = Pe v_θ dt + χ dW, dr = Pe v_r dt + χ dL^α on [−π, π) × [0, 1],
    /// periodic in θ (axis 0) and absorbing in r (axis 1).
    pub fn anisotropic_2d(alpha: f64, chi: f64, drift: Drift) -> Result<Self> {
        let theta = Axis {
            lo: -PI,
            hi: PI,
            boundary: Boundary::Periodic,
            noise: Noise::Brownian,
        };
        let r = Axis {
            lo: 0.0,
            hi: 1.0,
            boundary: Boundary::Absorbing,
            noise: Noise::Levy,
        };
        Self::new(vec![theta, r], chi, alpha, drift)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn jump_axis(&self) -> Option<usize> {
        self.axes.iter().position(|a| a.noise == Noise::Levy)
    }

    /// Drift b(x).
    pub fn drift_at(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.drift_into(x, &mut out);
        out
    }

    /// Writes b(x) into the first `dim` entries of `out`.
    pub fn drift_into(&self, x: &[f64], out: &mut [f64]) {
        match self.drift {
            Drift::None => out.iter_mut().for_each(|v| *v = 0.0),
            Drift::Cellular { pe, .. } => {
                let (vt, vr) = velocity(self, x[0], x[1]);
                out[0] = pe * vt;
                out[1] = pe * vr;
            }
        }
    }

    /// Upper bound of |b| per axis.
    pub fn max_drift(&self) -> Vec<f64> {
        match self.drift {
            Drift::None => vec![0.0; self.dim()],
            Drift::Cellular { pe, m, n } => vec![pe * m as f64 * PI, pe * n as f64],
        }
    }

    /// Whether `x` lies in the open domain; periodic axes never exit.
    pub fn inside(&self, x: &[f64]) -> bool {
        self.axes
            .iter()
            .zip(x)
            .all(|(a, &v)| a.boundary == Boundary::Periodic || (v > a.lo && v < a.hi))
    }

    /// Maps periodic coordinates back into [lo, hi).
    pub fn wrap(&self, x: &mut [f64]) {
        for (a, v) in self.axes.iter().zip(x.iter_mut()) {
            if a.boundary == Boundary::Periodic {
                *v = a.lo + (*v - a.lo).rem_euclid(a.width());
            }
        }
    }
}

/// Cellular velocity (v_θ, v_r); zero when no cellular drift is configured.
pub fn velocity(spec: &ProblemSpec, theta: f64, r: f64) -> (f64, f64) {
    match spec.drift {
        Drift::None => (0.0, 0.0),
        Drift::Cellular { m, n, .. } => cellular_velocity(m, n, theta, r),
    }
}

pub fn cellular_velocity(m: u32, n: u32, theta: f64, r: f64) -> (f64, f64) {
    let (mf, nf) = (m as f64, n as f64);
    let vt = -mf * PI * (mf * PI * r).cos() * (nf * theta).sin();
    let vr = nf * (mf * PI * r).sin() * (nf * theta).cos();
    (vt, vr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cell(m: u32) -> ProblemSpec {
        ProblemSpec::anisotropic_2d(1.5, 0.1, Drift::Cellular { pe: 10.0, m, n: 2 }).unwrap()
    }

    #[test]
    fn stagnation_at_cell_centers() {
        let (vt, vr) = velocity(&cell(1), PI / 4.0, 0.5);
        assert!(vt.abs() < 1e-14 && vr.abs() < 1e-14);
        let (vt, vr) = velocity(&cell(2), PI / 4.0, 0.25);
        assert!(vt.abs() < 1e-14 && vr.abs() < 1e-14);
    }

    #[test]
    fn validation() {
        assert!(ProblemSpec::benchmark_1d(0.5, 0.5).is_err());
        assert!(ProblemSpec::benchmark_1d(1.5, 0.0).is_err());
        assert!(ProblemSpec::new(vec![], 0.5, 1.5, Drift::None).is_err());
        let b1 = ProblemSpec::benchmark_1d(1.5, 0.5).unwrap();
        assert_eq!(b1.jump_axis(), Some(0));
        assert!(ProblemSpec::new(b1.axes.clone(), 0.5, 1.5, Drift::Cellular { pe: 1.0, m: 1, n: 2 }).is_err());
    }

    #[test]
    fn inside_and_wrap() {
        let p = cell(1);
        assert!(p.inside(&[10.0, 0.5]));
        assert!(!p.inside(&[0.0, 1.0]));
        let mut x = [3.5 * PI, 0.5];
        p.wrap(&mut x);
        assert!((x[0] + 0.5 * PI).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn divergence_free(theta in -PI..PI, r in 0.0f64..1.0, m in 1u32..4, n in 1u32..4) {
            // ∂v_θ/∂θ + ∂v_r/∂r evaluated analytically term by term.
            let (mf, nf) = (m as f64, n as f64);
            let dvt = -mf * PI * (mf * PI * r).cos() * nf * (nf * theta).cos();
            let dvr = nf * mf * PI * (mf * PI * r).cos() * (nf * theta).cos();
            prop_assert!((dvt + dvr).abs() < 1e-12);
            // Central differences of the implementation agree with those derivatives.
            let h = 1e-5;
            let fd_t = (cellular_velocity(m, n, theta + h, r).0 - cellular_velocity(m, n, theta - h, r).0) / (2.0 * h);
            let fd_r = (cellular_velocity(m, n, theta, r + h).1 - cellular_velocity(m, n, theta, r - h).1) / (2.0 * h);
            prop_assert!((fd_t - dvt).abs() < 1e-6 && (fd_r - dvr).abs() < 1e-6);
        }

        #[test]
        fn velocity_is_periodic_and_theta_reflective(theta in -PI..PI, r in 0.0f64..1.0) {
            let (a, b) = cellular_velocity(1, 2, theta, r);
            let (c, d) = cellular_velocity(1, 2, theta + 2.0 * PI, r);
            prop_assert!((a - c).abs() < 1e-12 && (b - d).abs() < 1e-12);
            let (e, f) = cellular_velocity(1, 2, -theta, r);
            prop_assert!((a + e).abs() < 1e-12 && (b - f).abs() < 1e-12);
        }
    }
}
