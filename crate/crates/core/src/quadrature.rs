//! Quadrature kernels of the backward scheme.
//!
//! * Gauss–Hermite rules for the Brownian expectation, normalized against the
//!   density ρ(ξ) = π^{−d/2} exp(−|ξ|²).
//! * Trapezoidal rules against the jump density φ, restricted to jumps that
//!   land inside the domain; the exterior mass is added analytically.

use std::f64::consts::PI;

use crate::approx::JumpLaw;
use crate::error::{invalid, Error, Result};
use crate::interp::{Grid1D, InterpOrder, Interpolant};

pub const MIN_HERMITE_POINTS: usize = 2;
pub const MAX_HERMITE_POINTS: usize = 64;

/// One-dimensional Gauss–Hermite rule with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Newton iteration on the orthonormal Hermite recurrence, with the classic
/// asymptotic initial guesses; nodes are returned in decreasing order.
fn hermite_nodes_weights(m: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let half = m.div_ceil(2);
    let mf = m as f64;
    let mut z = 0.0f64;
    for i in 0..half {
        z = match i {
            0 => (2.0 * mf + 1.0).sqrt() - 1.85575 * (2.0 * mf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * mf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=m {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * mf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[m - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[m - 1 - i] = w[i];
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Hermite rule with `m` points, weights divided by √π.
pub fn hermite_rule(m: usize) -> Result<HermiteRule> {
    if !(MIN_HERMITE_POINTS..=MAX_HERMITE_POINTS).contains(&m) {
        return Err(invalid(
            "m_hermite",
            format!("{m} is outside [{MIN_HERMITE_POINTS}, {MAX_HERMITE_POINTS}]"),
        ));
    }
    let (mut nodes, weights) = hermite_nodes_weights(m);
    let mut weights: Vec<f64> = weights.into_iter().map(|w| w / PI.sqrt()).collect();
    nodes.reverse();
    weights.reverse();
    Ok(HermiteRule { nodes, weights })
}

impl HermiteRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn max_abs_node(&self) -> f64 {
        self.nodes.iter().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    /// ∫ f(ξ) ρ(ξ) dξ in one dimension.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Tensor-product points in `dims` dimensions as (weight, abscissa).
    pub fn tensor(&self, dims: usize) -> Vec<(f64, Vec<f64>)> {
        let mut out = vec![(1.0, Vec::with_capacity(dims))];
        for _ in 0..dims {
            out = out
                .into_iter()
                .flat_map(|(w, x)| {
                    self.nodes.iter().zip(&self.weights).map(move |(&e, &v)| {
                        let mut x = x.clone();
                        x.push(e);
                        (w * v, x)
                    })
                })
                .collect();
        }
        out
    }
}

/// Σ_m w_m u(x + drift_step + sigma_step ∘ e_m) over the tensor rule.
///
/// Every abscissa must lie inside the interpolant's domain; a point outside
/// signals a mesh that violates the boundary-offset condition.
pub fn brownian_expectation(
    rule: &HermiteRule,
    interp: &Interpolant,
    x: &[f64],
    drift_step: &[f64],
    sigma_step: &[f64],
) -> Result<f64> {
    let d = x.len();
    if drift_step.len() != d || sigma_step.len() != d || interp.dims() != d {
        return Err(invalid("point", "dimension mismatch"));
    }
    let mut acc = 0.0;
    let mut y = vec![0.0; d];
    for (w, e) in rule.tensor(d) {
        for k in 0..d {
            y[k] = x[k] + drift_step[k] + sigma_step[k] * e[k];
        }
        acc += w * interp.eval(&y)?;
    }
    Ok(acc)
}

/// Trapezoidal rule for the jump expectation from one starting coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpRule {
    /// Jump amplitudes q (before scaling by the jump scale).
    pub abscissae: Vec<f64>,
    pub weights: Vec<f64>,
    /// Probability that the jump lands outside the domain.
    pub exterior_mass: f64,
    /// Nominal trapezoid width in q.
    pub h: f64,
}

impl JumpRule {
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum::<f64>() + self.exterior_mass
    }
}

/// Appends a trapezoid rule for φ on [a, b] (same sign), rescaled to carry
/// exactly `mass`.
fn push_side(law: &JumpLaw, a: f64, b: f64, h: f64, mass: f64, abs: &mut Vec<f64>, wts: &mut Vec<f64>) {
    let n = ((b - a) / h).ceil().max(1.0) as usize;
    let step = (b - a) / n as f64;
    let start = wts.len();
    for k in 0..=n {
        let q = if k == n { b } else { a + step * k as f64 };
        let end = k == 0 || k == n;
        abs.push(q);
        wts.push(if end { 0.5 } else { 1.0 } * step * law.density(q));
    }
    let raw: f64 = wts[start..].iter().sum();
    if raw > 0.0 {
        let scale = mass / raw;
        wts[start..].iter_mut().for_each(|w| *w *= scale);
    }
}

/// Jump rule for a start coordinate `x` in the interval [lo, hi], with
/// landing points x + jump_scale·q.
pub fn jump_rule_for_point(law: &JumpLaw, x: f64, jump_scale: f64, lo: f64, hi: f64, h: f64) -> Result<JumpRule> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid("h_jump", format!("{h} must be positive")));
    }
    if !(jump_scale > 0.0 && jump_scale.is_finite()) {
        return Err(invalid("jump_scale", format!("{jump_scale} must be positive")));
    }
    if !(x > lo && x < hi) {
        return Err(invalid("x", format!("{x} is not strictly inside ({lo}, {hi})")));
    }
    let eps = law.eps();
    let eps_out = law.eps_out();
    let mut abscissae = Vec::new();
    let mut weights = Vec::new();
    let mut inside = 0.0;
    // Negative side first so abscissae come out increasing.
    let reach_neg = ((x - lo) / jump_scale).min(eps_out);
    if reach_neg > eps {
        let mass = law.one_sided_mass(eps, reach_neg);
        let start = abscissae.len();
        push_side(law, eps, reach_neg, h, mass, &mut abscissae, &mut weights);
        abscissae[start..].iter_mut().for_each(|q| *q = -*q);
        abscissae[start..].reverse();
        weights[start..].reverse();
        inside += mass;
    }
    let reach_pos = ((hi - x) / jump_scale).min(eps_out);
    if reach_pos > eps {
        let mass = law.one_sided_mass(eps, reach_pos);
        push_side(law, eps, reach_pos, h, mass, &mut abscissae, &mut weights);
        inside += mass;
    }
    // Renormalize so the total is exactly one in floating point as well.
    let exterior_mass = (1.0 - weights.iter().sum::<f64>()).max(0.0);
    debug_assert!((exterior_mass - (1.0 - inside)).abs() < 1e-12);
    Ok(JumpRule {
        abscissae,
        weights,
        exterior_mass,
        h,
    })
}

/// Jump expectation Σ v_l ũ(x + s·a_l) + exterior_mass, evaluating the
/// interpolant directly; `axis` selects the coordinate the jump acts on.
pub fn jump_expectation(rule: &JumpRule, interp: &Interpolant, x: &[f64], axis: usize, jump_scale: f64) -> Result<f64> {
    let mut y = x.to_vec();
    let mut acc = rule.exterior_mass;
    for (&q, &v) in rule.abscissae.iter().zip(&rule.weights) {
        y[axis] = x[axis] + jump_scale * q;
        acc += v * interp.eval(&y)?;
    }
    Ok(acc)
}

/// The jump expectation along one grid line as a sparse linear form in the
/// line's nodal values and PCHIP slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFunctional {
    /// (node index, value coefficient, slope coefficient).
    pub entries: Vec<(usize, f64, f64)>,
    pub constant: f64,
}

impl LineFunctional {
    pub fn from_rule(rule: &JumpRule, grid: &Grid1D, x: f64, jump_scale: f64, order: InterpOrder) -> Result<Self> {
        let n = grid.len();
        let mut value_coef = vec![0.0; n];
        let mut slope_coef = vec![0.0; n];
        for (&q, &v) in rule.abscissae.iter().zip(&rule.weights) {
            let y = x + jump_scale * q;
            let b = grid.basis(y, order).ok_or_else(|| Error::OutsideDomain { point: vec![y] })?;
            value_coef[b.left] += v * b.value_left;
            value_coef[b.right] += v * b.value_right;
            slope_coef[b.left] += v * b.slope_left;
            slope_coef[b.right] += v * b.slope_right;
        }
        let entries = value_coef
            .into_iter()
            .zip(slope_coef)
            .enumerate()
            .filter(|(_, (a, b))| *a != 0.0 || *b != 0.0)
            .map(|(k, (a, b))| (k, a, b))
            .collect();
        Ok(Self {
            entries,
            constant: rule.exterior_mass,
        })
    }

    /// Evaluates on a line read through index accessors.
    pub fn apply(&self, value: impl Fn(usize) -> f64, slope: impl Fn(usize) -> f64) -> f64 {
        self.entries
            .iter()
            .fold(self.constant, |acc, &(k, a, b)| acc + a * value(k) + b * slope(k))
    }
}
