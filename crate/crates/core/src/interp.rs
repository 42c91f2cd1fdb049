//! Monotone piecewise-cubic Hermite (PCHIP) interpolation on tensor grids.
//!
//! Slopes follow Fritsch–Carlson/Fritsch–Butland: a weighted harmonic mean
//! of neighbouring secants at interior nodes (zero at local extrema) and a
//! limited one-sided three-point formula at clamped ends. Each cubic piece
//! is then monotone between its end values, so the interpolant never
//! leaves [min(values), max(values)].
//!
//! Two-dimensional data is interpolated by successive 1D passes: first along
//! dimension 0 for each grid line of dimension 1, then along dimension 1.

use crate::error::{invalid, Error, Result};

/// Relative tolerance for points sitting on a clamped grid edge.
const EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    Clamped,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterpOrder {
    #[default]
    Pchip,
    Linear,
}

/// Strictly increasing nodes along one axis.
///
/// A periodic grid covers [nodes[0], nodes[0] + period); the last interval
/// wraps back to the first node.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    nodes: Vec<f64>,
    mode: BoundaryMode,
    period: f64,
}

/// Position of a point inside a grid interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub left: usize,
    pub right: usize,
    /// Fractional position in [0, 1].
    pub t: f64,
    /// Interval width.
    pub h: f64,
}

/// Evaluation of the interpolant as a linear form in the nodal values and
/// slopes of the two interval end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis {
    pub left: usize,
    pub right: usize,
    pub value_left: f64,
    pub slope_left: f64,
    pub value_right: f64,
    pub slope_right: f64,
}

impl Basis {
    pub fn apply(&self, values: &[f64], slopes: &[f64]) -> f64 {
        let mut v = self.value_left * values[self.left] + self.value_right * values[self.right];
        if self.slope_left != 0.0 || self.slope_right != 0.0 {
            v += self.slope_left * slopes[self.left] + self.slope_right * slopes[self.right];
        }
        v
    }
}

fn check_increasing(nodes: &[f64]) -> Result<()> {
    if nodes.iter().any(|x| !x.is_finite()) {
        return Err(invalid("grid", "nodes must be finite"));
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("grid", "nodes must be strictly increasing"));
    }
    Ok(())
}

impl Grid1D {
    pub fn clamped(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(invalid("grid", "at least 2 nodes are required"));
        }
        check_increasing(&nodes)?;
        Ok(Self {
            nodes,
            mode: BoundaryMode::Clamped,
            period: 0.0,
        })
    }

    pub fn periodic(nodes: Vec<f64>, period: f64) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(invalid("grid", "a periodic grid needs at least 3 nodes"));
        }
        check_increasing(&nodes)?;
        if !(period > 0.0) || nodes[nodes.len() - 1] >= nodes[0] + period {
            return Err(invalid("period", "nodes must fit inside one period"));
        }
        Ok(Self {
            nodes,
            mode: BoundaryMode::Periodic,
            period,
        })
    }

    /// `n` equispaced nodes on [lo, hi] (clamped) or [lo, hi) (periodic).
    pub fn uniform(lo: f64, hi: f64, n: usize, mode: BoundaryMode) -> Result<Self> {
        match mode {
            BoundaryMode::Clamped => {
                if n < 2 {
                    return Err(invalid("grid", "at least 2 nodes are required"));
                }
                let h = (hi - lo) / (n - 1) as f64;
                let mut nodes: Vec<f64> = (0..n).map(|k| lo + h * k as f64).collect();
                nodes[n - 1] = hi;
                Self::clamped(nodes)
            }
            BoundaryMode::Periodic => {
                if n < 3 {
                    return Err(invalid("grid", "a periodic grid needs at least 3 nodes"));
                }
                let h = (hi - lo) / n as f64;
                Self::periodic((0..n).map(|k| lo + h * k as f64).collect(), hi - lo)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn lo(&self) -> f64 {
        self.nodes[0]
    }

    pub fn hi(&self) -> f64 {
        match self.mode {
            BoundaryMode::Clamped => self.nodes[self.nodes.len() - 1],
            BoundaryMode::Periodic => self.nodes[0] + self.period,
        }
    }

    fn tol(&self) -> f64 {
        EDGE_TOL * (self.hi() - self.lo())
    }

    pub fn contains(&self, x: f64) -> bool {
        match self.mode {
            BoundaryMode::Clamped => x >= self.lo() - self.tol() && x <= self.hi() + self.tol(),
            BoundaryMode::Periodic => x.is_finite(),
        }
    }

    /// Wraps `x` into [lo, lo + period) for periodic grids; identity otherwise.
    pub fn wrap(&self, x: f64) -> f64 {
        match self.mode {
            BoundaryMode::Clamped => x,
            BoundaryMode::Periodic => {
                let lo = self.lo();
                let r = lo + (x - lo).rem_euclid(self.period);
                if r >= lo + self.period {
                    lo
                } else {
                    r
                }
            }
        }
    }

    fn next(&self, i: usize) -> Option<usize> {
        if i + 1 < self.nodes.len() {
            Some(i + 1)
        } else if self.mode == BoundaryMode::Periodic {
            Some(0)
        } else {
            None
        }
    }

    fn prev(&self, i: usize) -> Option<usize> {
        if i > 0 {
            Some(i - 1)
        } else if self.mode == BoundaryMode::Periodic {
            Some(self.nodes.len() - 1)
        } else {
            None
        }
    }

    /// Width of the interval starting at node `i`.
    fn spacing_after(&self, i: usize) -> f64 {
        if i + 1 < self.nodes.len() {
            self.nodes[i + 1] - self.nodes[i]
        } else {
            self.nodes[0] + self.period - self.nodes[i]
        }
    }

    pub fn locate(&self, x: f64) -> Option<Location> {
        let n = self.nodes.len();
        let x = match self.mode {
            BoundaryMode::Clamped => {
                if !self.contains(x) {
                    return None;
                }
                x.clamp(self.lo(), self.hi())
            }
            BoundaryMode::Periodic => {
                if !x.is_finite() {
                    return None;
                }
                self.wrap(x)
            }
        };
        let mut left = self.nodes.partition_point(|&v| v <= x).saturating_sub(1);
        if self.mode == BoundaryMode::Clamped {
            left = left.min(n - 2);
        }
        let right = self.next(left).expect("interval has a right end");
        let h = self.spacing_after(left);
        let t = ((x - self.nodes[left]) / h).clamp(0.0, 1.0);
        Some(Location { left, right, t, h })
    }

    /// Interpolation basis at `x`, or `None` outside a clamped grid.
    pub fn basis(&self, x: f64, order: InterpOrder) -> Option<Basis> {
        let loc = self.locate(x)?;
        Some(hermite_basis(&loc, order))
    }
}

fn hermite_basis(loc: &Location, order: InterpOrder) -> Basis {
    let t = loc.t;
    match order {
        InterpOrder::Linear => Basis {
            left: loc.left,
            right: loc.right,
            value_left: 1.0 - t,
            slope_left: 0.0,
            value_right: t,
            slope_right: 0.0,
        },
        InterpOrder::Pchip => {
            let s = 1.0 - t;
            Basis {
                left: loc.left,
                right: loc.right,
                value_left: (1.0 + 2.0 * t) * s * s,
                slope_left: loc.h * t * s * s,
                value_right: t * t * (3.0 - 2.0 * t),
                slope_right: -loc.h * t * t * s,
            }
        }
    }
}

fn interior_slope(h_prev: f64, h_next: f64, d_prev: f64, d_next: f64) -> f64 {
    if d_prev * d_next <= 0.0 {
        return 0.0;
    }
    let w1 = 2.0 * h_next + h_prev;
    let w2 = h_next + 2.0 * h_prev;
    (w1 + w2) / (w1 / d_prev + w2 / d_next)
}

/// Three-point end slope, limited to keep the end piece monotone.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// PCHIP slope at node `i`, reading nodal values through `value`.
fn node_slope(grid: &Grid1D, i: usize, value: &dyn Fn(usize) -> f64) -> f64 {
    let n = grid.len();
    match (grid.prev(i), grid.next(i)) {
        (Some(p), Some(q)) => {
            let hp = grid.spacing_after(p);
            let hn = grid.spacing_after(i);
            let vi = value(i);
            interior_slope(hp, hn, (vi - value(p)) / hp, (value(q) - vi) / hn)
        }
        (None, Some(_)) => {
            let h0 = grid.spacing_after(0);
            let d0 = (value(1) - value(0)) / h0;
            if n == 2 {
                return d0;
            }
            let h1 = grid.spacing_after(1);
            end_slope(h0, h1, d0, (value(2) - value(1)) / h1)
        }
        (Some(_), None) => {
            let h0 = grid.spacing_after(n - 2);
            let d0 = (value(n - 1) - value(n - 2)) / h0;
            if n == 2 {
                return d0;
            }
            let h1 = grid.spacing_after(n - 3);
            end_slope(h0, h1, d0, (value(n - 2) - value(n - 3)) / h1)
        }
        (None, None) => 0.0,
    }
}

/// PCHIP slopes at every node of `grid`.
pub fn pchip_slopes(grid: &Grid1D, values: &[f64]) -> Vec<f64> {
    debug_assert_eq!(grid.len(), values.len());
    let value = |k: usize| values[k];
    (0..grid.len()).map(|i| node_slope(grid, i, &value)).collect()
}

/// Interpolant over a 1D or 2D tensor grid. Values are stored with
/// dimension 0 varying fastest.
#[derive(Debug, Clone)]
pub struct Interpolant {
    grids: Vec<Grid1D>,
    values: Vec<f64>,
    /// Slopes along dimension 0 for every dimension-1 line.
    slopes0: Vec<f64>,
    order: InterpOrder,
    lo: f64,
    hi: f64,
}

impl Interpolant {
    pub fn new(grids: Vec<Grid1D>, values: Vec<f64>, order: InterpOrder) -> Result<Self> {
        if grids.is_empty() || grids.len() > 2 {
            return Err(invalid("grids", "only 1D and 2D grids are supported"));
        }
        let count: usize = grids.iter().map(Grid1D::len).product();
        if values.len() != count {
            return Err(invalid(
                "values",
                format!("expected {count} nodal values, got {}", values.len()),
            ));
        }
        let n0 = grids[0].len();
        let slopes0 = match order {
            InterpOrder::Linear => Vec::new(),
            InterpOrder::Pchip => values
                .chunks_exact(n0)
                .flat_map(|line| pchip_slopes(&grids[0], line))
                .collect(),
        };
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            grids,
            values,
            slopes0,
            order,
            lo,
            hi,
        })
    }

    pub fn dims(&self) -> usize {
        self.grids.len()
    }

    pub fn grid(&self, dim: usize) -> &Grid1D {
        &self.grids[dim]
    }

    pub fn grids(&self) -> &[Grid1D] {
        &self.grids
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn order(&self) -> InterpOrder {
        self.order
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.grids.len() && self.grids.iter().zip(point).all(|(g, &x)| g.contains(x))
    }

    fn line_eval(&self, line: usize, loc: &Location) -> f64 {
        let n0 = self.grids[0].len();
        let vals = &self.values[line * n0..(line + 1) * n0];
        let b = hermite_basis(loc, self.order);
        match self.order {
            InterpOrder::Linear => b.value_left * vals[b.left] + b.value_right * vals[b.right],
            InterpOrder::Pchip => b.apply(vals, &self.slopes0[line * n0..(line + 1) * n0]),
        }
    }

    /// Interpolated value; errors outside the grid in clamped dimensions.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.grids.len() {
            return Err(invalid("point", "dimension mismatch"));
        }
        let outside = || Error::OutsideDomain {
            point: point.to_vec(),
        };
        let loc0 = self.grids[0].locate(point[0]).ok_or_else(outside)?;
        let v = if self.grids.len() == 1 {
            self.line_eval(0, &loc0)
        } else {
            let g1 = &self.grids[1];
            let loc1 = g1.locate(point[1]).ok_or_else(outside)?;
            match self.order {
                InterpOrder::Linear => {
                    let a = self.line_eval(loc1.left, &loc0);
                    let b = self.line_eval(loc1.right, &loc0);
                    (1.0 - loc1.t) * a + loc1.t * b
                }
                InterpOrder::Pchip => {
                    // First pass on the dimension-1 lines the second-pass slopes touch.
                    let mut window = [(usize::MAX, 0.0); 4];
                    let n1 = g1.len() as isize;
                    for (slot, off) in window.iter_mut().zip(-1isize..=2) {
                        let k = loc1.left as isize + off;
                        let k = match g1.mode() {
                            BoundaryMode::Periodic => k.rem_euclid(n1),
                            BoundaryMode::Clamped if k < 0 || k >= n1 => continue,
                            BoundaryMode::Clamped => k,
                        } as usize;
                        *slot = (k, self.line_eval(k, &loc0));
                    }
                    let value = |k: usize| {
                        window
                            .iter()
                            .find(|(idx, _)| *idx == k)
                            .map(|&(_, v)| v)
                            .expect("second-pass stencil inside window")
                    };
                    let dl = node_slope(g1, loc1.left, &value);
                    let dr = node_slope(g1, loc1.right, &value);
                    let b = hermite_basis(&loc1, InterpOrder::Pchip);
                    b.value_left * value(loc1.left)
                        + b.slope_left * dl
                        + b.value_right * value(loc1.right)
                        + b.slope_right * dr
                }
            }
        };
        // Rounding can push a convex combination a few ulps past the data range.
        Ok(v.clamp(self.lo, self.hi))
    }
}

/// One-dimensional PCHIP interpolant.
pub fn pchip_build(grid: Grid1D, values: Vec<f64>) -> Result<Interpolant> {
    Interpolant::new(vec![grid], values, InterpOrder::Pchip)
}

pub fn pchip_eval(interp: &Interpolant, point: &[f64]) -> Result<f64> {
    interp.eval(point)
}
