//! Backward probabilistic scheme for the exit probability of the
//! approximated process.
//!
//! Marching backward from the terminal field u ≡ 0 inside the domain, each
//! step combines the no-jump Brownian expectation (Gauss–Hermite) and the
//! one-jump expectation (trapezoid plus analytic exterior mass), weighted by
//! the Poisson probabilities of zero and one jump. After k steps the field
//! is the exit probability over a horizon of k·Δt.

use std::sync::Arc;

use rayon::prelude::*;

use crate::approx::{poisson_weights, ApproxParams, JumpLaw};
use crate::error::{invalid, Error, Result};
use crate::interp::{pchip_slopes, BoundaryMode, Grid1D, InterpOrder, Interpolant};
use crate::problem::{Boundary, Noise, ProblemSpec};
use crate::quadrature::{hermite_rule, jump_rule_for_point, HermiteRule, LineFunctional};

/// Per-axis Brownian standard deviation per unit time: χ on a Brownian axis,
/// χ σ_ε on the jump axis.
pub fn axis_sigmas(problem: &ProblemSpec, approx: &ApproxParams) -> Vec<f64> {
    problem
        .axes
        .iter()
        .map(|a| match a.noise {
            Noise::Brownian => problem.chi,
            Noise::Levy => problem.chi * approx.sigma_eps,
        })
        .collect()
}

/// Time partition and tensor spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub dt: f64,
    pub n_steps: usize,
    pub grids: Vec<Grid1D>,
    /// Distance from each absorbing boundary to the nearest interior node;
    /// zero on periodic axes.
    pub boundary_offset: Vec<f64>,
    absorbing: Vec<bool>,
}

impl Mesh {
    pub fn t_final(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    pub fn t_grid(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|k| k as f64 * self.dt).collect()
    }

    pub fn dim(&self) -> usize {
        self.grids.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.grids.iter().map(Grid1D::len).collect()
    }

    pub fn len(&self) -> usize {
        self.grids.iter().map(Grid1D::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of a flat index (dimension 0 fastest).
    pub fn index(&self, flat: usize) -> Vec<usize> {
        let mut rest = flat;
        self.grids
            .iter()
            .map(|g| {
                let i = rest % g.len();
                rest /= g.len();
                i
            })
            .collect()
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        let mut stride = 1;
        let mut f = 0;
        for (g, &i) in self.grids.iter().zip(idx) {
            f += i * stride;
            stride *= g.len();
        }
        f
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.index(flat)
            .iter()
            .zip(&self.grids)
            .map(|(&i, g)| g.nodes()[i])
            .collect()
    }

    /// Whether the node sits on an absorbing boundary.
    pub fn is_boundary(&self, flat: usize) -> bool {
        self.index(flat)
            .iter()
            .zip(&self.grids)
            .zip(&self.absorbing)
            .any(|((&i, g), &abs)| abs && (i == 0 || i + 1 == g.len()))
    }
}

/// Builds the mesh for horizon `t_final`. `nodes_per_dim` counts the nodes
/// of an axis including both endpoints; on a periodic axis the endpoints are
/// identified, so one fewer node is stored.
///
/// Interior nodes keep a distance of σ√(2Δt)·max|e_m| + max|b|Δt from
/// absorbing boundaries, so every Hermite abscissa stays in the domain.
pub fn build_mesh(
    problem: &ProblemSpec,
    approx: &ApproxParams,
    rule: &HermiteRule,
    dt: f64,
    t_final: f64,
    nodes_per_dim: &[usize],
) -> Result<Mesh> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", format!("{dt} must be positive")));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(invalid("t_final", format!("{t_final} must be positive")));
    }
    let n_steps = (t_final / dt).round() as usize;
    if n_steps == 0 || (n_steps as f64 * dt - t_final).abs() > 1e-9 * t_final {
        return Err(invalid("dt", format!("{dt} does not divide the horizon {t_final}")));
    }
    if nodes_per_dim.len() != problem.dim() {
        return Err(invalid(
            "nodes",
            format!("{} node counts for a {}-dimensional problem", nodes_per_dim.len(), problem.dim()),
        ));
    }
    let sigmas = axis_sigmas(problem, approx);
    let max_b = problem.max_drift();
    let mut grids = Vec::new();
    let mut offsets = Vec::new();
    for (k, axis) in problem.axes.iter().enumerate() {
        let n = nodes_per_dim[k];
        if n < 4 {
            return Err(invalid("nodes", format!("{n} nodes on axis {k}; at least 4 are required")));
        }
        match axis.boundary {
            Boundary::Periodic => {
                // The endpoints lo and hi are the same node.
                let w = axis.width();
                let unique = n - 1;
                let nodes = (0..unique).map(|i| axis.lo + w * i as f64 / unique as f64).collect();
                grids.push(Grid1D::periodic(nodes, w)?);
                offsets.push(0.0);
            }
            Boundary::Absorbing => {
                let off = sigmas[k] * (2.0 * dt).sqrt() * rule.max_abs_node() + max_b[k] * dt;
                if off >= 0.5 * axis.width() {
                    return Err(invalid(
                        "dt",
                        format!("boundary offset {off} on axis {k} exceeds half the domain width"),
                    ));
                }
                let (a, b) = (axis.lo + off, axis.hi - off);
                let m = n - 2;
                let mut nodes = Vec::with_capacity(n);
                nodes.push(axis.lo);
                nodes.extend((0..m).map(|i| a + (b - a) * i as f64 / (m - 1) as f64));
                nodes.push(axis.hi);
                // A vanishing offset would duplicate the boundary node.
                if off <= 0.0 {
                    return Err(invalid("sigma", format!("axis {k} has no diffusion; the offset layer is empty")));
                }
                grids.push(Grid1D::clamped(nodes)?);
                offsets.push(off);
            }
        }
    }
    Ok(Mesh {
        dt,
        n_steps,
        grids,
        boundary_offset: offsets,
        absorbing: problem.axes.iter().map(|a| a.boundary == Boundary::Absorbing).collect(),
    })
}

/// Exit-probability values at one time level.
#[derive(Debug, Clone)]
pub struct ProbField {
    pub mesh: Arc<Mesh>,
    /// Horizon t for which the values approximate P(t, x).
    pub horizon: f64,
    pub values: Vec<f64>,
}

impl ProbField {
    /// u = 0 at interior nodes, 1 on absorbing boundaries.
    pub fn terminal(mesh: Arc<Mesh>) -> Self {
        let values = (0..mesh.len()).map(|j| if mesh.is_boundary(j) { 1.0 } else { 0.0 }).collect();
        Self {
            mesh,
            horizon: 0.0,
            values,
        }
    }

    pub fn interpolant(&self, order: InterpOrder) -> Result<FieldInterpolant> {
        Ok(FieldInterpolant {
            inner: Interpolant::new(self.mesh.grids.clone(), self.values.clone(), order)?,
        })
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
    }
}

/// Interpolant of a field extended by 1 outside the domain on absorbing axes.
#[derive(Debug, Clone)]
pub struct FieldInterpolant {
    inner: Interpolant,
}

impl FieldInterpolant {
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        let outside = self
            .inner
            .grids()
            .iter()
            .zip(point)
            .any(|(g, &x)| g.mode() == BoundaryMode::Clamped && !(x > g.lo() && x < g.hi()));
        if outside {
            return Ok(1.0);
        }
        self.inner.eval(point)
    }
}

/// How the drift displacement over one step is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DriftStep {
    /// b(x)Δt.
    Euler,
    /// Δt·b(x + b(x)Δt/2). Removes the O(ω²Δt) outward spiral that the
    /// Euler shift produces in rotating cells.
    #[default]
    Midpoint,
}

impl DriftStep {
    pub fn displacement(self, problem: &ProblemSpec, x: &[f64], dt: f64) -> [f64; 2] {
        let mut b = [0.0; 2];
        problem.drift_into(x, &mut b);
        if self == DriftStep::Midpoint {
            let mut mid = [0.0; 2];
            for k in 0..x.len() {
                mid[k] = x[k] + 0.5 * dt * b[k];
            }
            problem.drift_into(&mid[..x.len()], &mut b);
        }
        [b[0] * dt, b[1] * dt]
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub problem: ProblemSpec,
    pub approx: ApproxParams,
    pub dt: f64,
    pub t_final: f64,
    pub m_hermite: usize,
    /// Trapezoid width in jump amplitude; defaults to √Δt.
    pub h_jump: Option<f64>,
    pub nodes: Vec<usize>,
    pub order: InterpOrder,
    pub drift_step: DriftStep,
    /// Horizons at which to record the field; T is always recorded.
    pub snapshots: Vec<f64>,
}

impl SolverConfig {
    pub fn new(problem: ProblemSpec, approx: ApproxParams, dt: f64, t_final: f64, nodes: Vec<usize>) -> Self {
        Self {
            problem,
            approx,
            dt,
            t_final,
            m_hermite: 4,
            h_jump: None,
            nodes,
            order: InterpOrder::Pchip,
            drift_step: DriftStep::default(),
            snapshots: Vec::new(),
        }
    }

    pub fn h_jump(&self) -> f64 {
        self.h_jump.unwrap_or_else(|| self.dt.sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_hermite < 2 {
            return Err(invalid("m_hermite", format!("{} < 2", self.m_hermite)));
        }
        let h = self.h_jump();
        if !(h > 0.0 && h <= self.dt.sqrt() * (1.0 + 1e-12)) {
            return Err(invalid("h_jump", format!("{h} must lie in (0, sqrt(dt)]")));
        }
        if self.approx.has_jumps() {
            match self.problem.jump_axis() {
                None => return Err(invalid("approx", "jump intensity given but no axis carries jumps")),
                Some(k) if self.problem.axes[k].boundary != Boundary::Absorbing => {
                    return Err(invalid("boundary", "jumps are only supported along an absorbing axis"))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

/// Jump part of the scheme: one linear form per node along the jump axis.
#[derive(Debug, Clone)]
struct JumpOperator {
    axis: usize,
    /// Indexed by node position along the jump axis; None on boundary nodes.
    lines: Vec<Option<LineFunctional>>,
}

/// Precomputed quadrature, weights and mesh for repeated backward steps.
#[derive(Debug, Clone)]
pub struct BackwardScheme {
    cfg: SolverConfig,
    mesh: Arc<Mesh>,
    tensor: Vec<(f64, Vec<f64>)>,
    sigma_step: Vec<f64>,
    p0: f64,
    p1: f64,
    jump: Option<JumpOperator>,
    /// Flat indices of nodes updated by the scheme.
    free: Vec<usize>,
    /// Drift displacement over one step, per free node.
    shift: Vec<[f64; 2]>,
}

impl BackwardScheme {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let rule = hermite_rule(cfg.m_hermite)?;
        let mesh = Arc::new(build_mesh(&cfg.problem, &cfg.approx, &rule, cfg.dt, cfg.t_final, &cfg.nodes)?);
        let sigma_step = axis_sigmas(&cfg.problem, &cfg.approx)
            .into_iter()
            .map(|s| s * (2.0 * cfg.dt).sqrt())
            .collect();
        let (p0, p1) = poisson_weights(cfg.approx.lambda, cfg.dt)?;
        let jump = if cfg.approx.has_jumps() {
            let axis = cfg.problem.jump_axis().expect("validated");
            let law = JumpLaw::new(cfg.approx)?;
            let grid = &mesh.grids[axis];
            let (lo, hi) = (cfg.problem.axes[axis].lo, cfg.problem.axes[axis].hi);
            let scale = cfg.problem.chi;
            let h = cfg.h_jump();
            let n = grid.len();
            let lines = (0..n)
                .into_par_iter()
                .map(|i| {
                    if i == 0 || i + 1 == n {
                        return Ok(None);
                    }
                    let x = grid.nodes()[i];
                    let rule = jump_rule_for_point(&law, x, scale, lo, hi, h)?;
                    LineFunctional::from_rule(&rule, grid, x, scale, cfg.order).map(Some)
                })
                .collect::<Result<Vec<_>>>()?;
            Some(JumpOperator { axis, lines })
        } else {
            None
        };
        let free: Vec<usize> = (0..mesh.len()).filter(|&j| !mesh.is_boundary(j)).collect();
        let shift = free
            .iter()
            .map(|&j| cfg.drift_step.displacement(&cfg.problem, &mesh.point(j), cfg.dt))
            .collect();
        Ok(Self {
            tensor: rule.tensor(cfg.problem.dim()),
            cfg,
            mesh,
            sigma_step,
            p0,
            p1,
            jump,
            free,
            shift,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn poisson(&self) -> (f64, f64) {
        (self.p0, self.p1)
    }

    /// Slopes along the jump axis for every line through the mesh.
    fn jump_slopes(&self, values: &[f64], axis: usize) -> Vec<f64> {
        let mut out = vec![0.0; values.len()];
        if self.cfg.order == InterpOrder::Linear {
            return out;
        }
        let shape = self.mesh.shape();
        let grid = &self.mesh.grids[axis];
        let stride: usize = shape[..axis].iter().product();
        let n = shape[axis];
        let outer = values.len() / (stride * n);
        let mut line = vec![0.0; n];
        for o in 0..outer {
            for s in 0..stride {
                let base = o * stride * n + s;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = values[base + k * stride];
                }
                for (k, d) in pchip_slopes(grid, &line).into_iter().enumerate() {
                    out[base + k * stride] = d;
                }
            }
        }
        out
    }

    /// One step u^{n+1} → u^n.
    pub fn backward_step(&self, field: &ProbField) -> Result<ProbField> {
        let values = &field.values;
        let interp = Interpolant::new(self.mesh.grids.clone(), values.clone(), self.cfg.order)?;
        let slopes = match &self.jump {
            Some(j) => self.jump_slopes(values, j.axis),
            None => Vec::new(),
        };
        let shape = self.mesh.shape();
        let dt = self.cfg.dt;
        let d = self.mesh.dim();
        let updates: Vec<f64> = self
            .free
            .par_iter()
            .zip(&self.shift)
            .map(|(&j, shift)| {
                let x = self.mesh.point(j);
                let mut y = vec![0.0; d];
                let mut brown = 0.0;
                for (w, e) in &self.tensor {
                    for k in 0..d {
                        y[k] = x[k] + shift[k] + self.sigma_step[k] * e[k];
                    }
                    brown += w * interp.eval(&y).map_err(|err| match err {
                        Error::OutsideDomain { point } => {
                            Error::MeshInvariant(format!("Hermite abscissa {point:?} from node {x:?} left the domain"))
                        }
                        other => other,
                    })?;
                }
                let jump = match &self.jump {
                    Some(op) => {
                        let idx = self.mesh.index(j);
                        let stride: usize = shape[..op.axis].iter().product();
                        let base = j - idx[op.axis] * stride;
                        let f = op.lines[idx[op.axis]].as_ref().expect("interior node");
                        f.apply(|k| values[base + k * stride], |k| slopes[base + k * stride])
                    }
                    None => 0.0,
                };
                Ok((self.p0 * brown + self.p1 * jump).clamp(0.0, 1.0))
            })
            .collect::<Result<_>>()?;
        let mut next = values.clone();
        for (&j, u) in self.free.iter().zip(updates) {
            next[j] = u;
        }
        Ok(ProbField {
            mesh: Arc::clone(&self.mesh),
            horizon: field.horizon + dt,
            values: next,
        })
    }

    /// Runs all steps, calling `observe` after each with the step count.
    pub fn run(&self, mut observe: impl FnMut(usize, &ProbField)) -> Result<Solution> {
        let n = self.mesh.n_steps;
        let mut wanted: Vec<usize> = self
            .cfg
            .snapshots
            .iter()
            .map(|&t| (t / self.cfg.dt).round() as usize)
            .filter(|&k| k >= 1 && k <= n)
            .collect();
        wanted.push(n);
        wanted.sort_unstable();
        wanted.dedup();
        let mut field = ProbField::terminal(Arc::clone(&self.mesh));
        let mut snapshots = Vec::with_capacity(wanted.len());
        let mut next = wanted.iter().peekable();
        for step in 1..=n {
            field = self.backward_step(&field)?;
            field.horizon = step as f64 * self.cfg.dt;
            observe(step, &field);
            if next.peek() == Some(&&step) {
                snapshots.push(field.clone());
                next.next();
            }
        }
        Ok(Solution {
            mesh: Arc::clone(&self.mesh),
            snapshots,
        })
    }
}

/// Recorded fields in increasing horizon; the last one is P(T, ·).
#[derive(Debug, Clone)]
pub struct Solution {
    pub mesh: Arc<Mesh>,
    pub snapshots: Vec<ProbField>,
}

impl Solution {
    pub fn final_field(&self) -> &ProbField {
        self.snapshots.last().expect("the horizon T is always recorded")
    }
}

/// Builds the scheme and marches from the terminal condition to horizon T.
pub fn solve(cfg: SolverConfig) -> Result<Solution> {
    BackwardScheme::new(cfg)?.run(|_, _| {})
}
