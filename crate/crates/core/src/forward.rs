//! Forward Monte Carlo for the exact stable process and its Brownian +
//! compound Poisson approximation: terminal samples, log-density
//! histograms, mean-squared displacement and direct exit probabilities.

use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal};
use rayon::prelude::*;

use crate::approx::{ApproxParams, JumpLaw};
use crate::error::{invalid, Result};
use crate::problem::{Noise, ProblemSpec};
use crate::rng::{stream_id, stream_rng, StreamRng};
use crate::stable::SymmetricStable;

/// Trajectories per random stream; fixed so results do not depend on the
/// number of threads.
const CHUNK: usize = 1000;
/// Record times per decade of the MSD grid.
const MSD_POINTS_PER_DECADE: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessKind {
    /// Increments χ Δt^{1/α} ζ with ζ ~ S(α, 0, 1, 0).
    ExactStable,
    /// χ σ_ε ΔW plus χ-scaled compound Poisson jumps.
    GaussApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub chi: f64,
    pub process_kind: ProcessKind,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("{} must be positive", self.dt)));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(invalid("t_max", format!("{} must be positive", self.t_max)));
        }
        if self.n_samples == 0 {
            return Err(invalid("n_samples", "must be at least 1"));
        }
        if !(self.chi > 0.0 && self.chi.is_finite()) {
            return Err(invalid("chi", format!("{} must be positive", self.chi)));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        ((self.t_max / self.dt).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExitRecord {
    pub exited: bool,
    pub exit_time: Option<f64>,
    pub final_position: Vec<f64>,
}

/// Poisson counts by CDF inversion; the mean λΔt is small, so almost every
/// draw stops at the first comparison.
#[derive(Debug, Clone, Copy)]
struct PoissonCount {
    mean: f64,
    p0: f64,
}

impl PoissonCount {
    fn new(mean: f64) -> Self {
        Self { mean, p0: (-mean).exp() }
    }

    fn sample(&self, rng: &mut StreamRng) -> u32 {
        let u: f64 = rng.sample(Open01);
        let (mut k, mut p, mut cdf) = (0u32, self.p0, self.p0);
        while u > cdf && p > 0.0 {
            k += 1;
            p *= self.mean / k as f64;
            cdf += p;
        }
        k
    }
}

/// Per-step increment of the noise on a jump-carrying coordinate.
#[derive(Debug, Clone)]
enum LevyIncrement {
    Exact { dist: SymmetricStable, scale: f64, clip: f64 },
    Approx { sd: f64, jumps: Option<(PoissonCount, JumpLaw)>, scale: f64 },
}

impl LevyIncrement {
    /// `clip_exact` truncates exact increments at ε_out, as for the MSD.
    fn new(kind: ProcessKind, approx: &ApproxParams, dt: f64, chi: f64, clip_exact: bool) -> Result<Self> {
        Ok(match kind {
            ProcessKind::ExactStable => Self::Exact {
                dist: SymmetricStable::new(approx.alpha)?,
                scale: chi * dt.powf(1.0 / approx.alpha),
                clip: if clip_exact { approx.eps_out } else { f64::INFINITY },
            },
            ProcessKind::GaussApprox => {
                let jumps = if approx.has_jumps() {
                    Some((PoissonCount::new(approx.lambda * dt), JumpLaw::new(*approx)?))
                } else {
                    None
                };
                Self::Approx {
                    sd: chi * approx.sigma_eps * dt.sqrt(),
                    jumps,
                    scale: chi,
                }
            }
        })
    }

    fn sample(&self, rng: &mut StreamRng) -> f64 {
        match self {
            Self::Exact { dist, scale, clip } => {
                let z = dist.sample(rng);
                scale * z.clamp(-clip, *clip)
            }
            Self::Approx { sd, jumps, scale } => {
                let z: f64 = rng.sample(StandardNormal);
                let mut inc = sd * z;
                if let Some((pois, law)) = jumps {
                    let k = pois.sample(rng);
                    let total: f64 = (0..k).map(|_| law.sample(rng)).sum();
                    inc += scale * total;
                }
                inc
            }
        }
    }
}

/// Free-space paths from the origin, recorded at the given (sorted) steps.
fn free_paths(cfg: &SimConfig, approx: &ApproxParams, clip_exact: bool, steps: &[usize]) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let inc = LevyIncrement::new(cfg.process_kind, approx, cfg.dt, cfg.chi, clip_exact)?;
    let last = steps.iter().copied().max().unwrap_or(0);
    let chunks = cfg.n_samples.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<Vec<f64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(cfg.seed, stream_id(0, c as u64));
            let count = CHUNK.min(cfg.n_samples - c * CHUNK);
            (0..count)
                .map(|_| {
                    let mut x = 0.0;
                    let mut out = Vec::with_capacity(steps.len());
                    let mut next = 0;
                    for step in 1..=last {
                        x += inc.sample(&mut rng);
                        while next < steps.len() && steps[next] == step {
                            out.push(x);
                            next += 1;
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    Ok(per_chunk.into_iter().flatten().collect())
}

/// Positions at t_max of `n_samples` free-space paths started at 0.
pub fn terminal_samples(cfg: &SimConfig, approx: &ApproxParams) -> Result<Vec<f64>> {
    let n = cfg.n_steps();
    Ok(free_paths(cfg, approx, false, &[n])?.into_iter().map(|v| v[0]).collect())
}

/// Mean-squared displacement on a geometric time grid (30 points per
/// decade, from Δt to t_max). Exact increments are clipped at ε_out.
pub fn simulate_msd(cfg: &SimConfig, approx: &ApproxParams) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    let n = cfg.n_steps();
    let decades = (n as f64).log10();
    let count = (decades * MSD_POINTS_PER_DECADE).floor() as usize;
    let mut steps: Vec<usize> = (0..=count)
        .map(|k| (10f64.powf(k as f64 / MSD_POINTS_PER_DECADE)).round() as usize)
        .map(|s| s.clamp(1, n))
        .collect();
    steps.push(n);
    steps.dedup();
    let paths = free_paths(cfg, approx, true, &steps)?;
    let mut sums = vec![0.0; steps.len()];
    for p in &paths {
        for (s, x) in sums.iter_mut().zip(p) {
            *s += x * x;
        }
    }
    let total = paths.len() as f64;
    Ok(steps
        .iter()
        .zip(sums)
        .map(|(&s, sum)| (s as f64 * cfg.dt, sum / total))
        .collect())
}

/// Histogram bins on a symmetric range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bins {
    pub half_width: f64,
    pub count: usize,
}

/// Log of the normalized histogram of `samples`; empty bins give None.
pub fn log_histogram(samples: &[f64], bins: Bins) -> Result<Vec<(f64, Option<f64>)>> {
    if !(bins.half_width > 0.0) || bins.count == 0 {
        return Err(invalid("bins", "need a positive range and at least one bin"));
    }
    if samples.is_empty() {
        return Err(invalid("samples", "empty sample"));
    }
    let lo = -bins.half_width;
    let w = 2.0 * bins.half_width / bins.count as f64;
    let mut counts = vec![0usize; bins.count];
    for &x in samples {
        let k = ((x - lo) / w).floor();
        if k >= 0.0 && (k as usize) < bins.count {
            counts[k as usize] += 1;
        }
    }
    let n = samples.len() as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            let center = lo + (k as f64 + 0.5) * w;
            (center, (c > 0).then(|| (c as f64 / (n * w)).ln()))
        })
        .collect())
}

/// Log-density histogram of X_{t_max}.
pub fn empirical_logpdf(cfg: &SimConfig, approx: &ApproxParams, bins: Bins) -> Result<Vec<(f64, Option<f64>)>> {
    log_histogram(&terminal_samples(cfg, approx)?, bins)
}

/// Per-axis increment samplers for a problem.
struct Stepper<'a> {
    problem: &'a ProblemSpec,
    dt: f64,
    axes: Vec<AxisIncrement>,
}

enum AxisIncrement {
    Brownian(f64),
    Levy(LevyIncrement),
}

impl<'a> Stepper<'a> {
    fn new(cfg: &SimConfig, problem: &'a ProblemSpec, approx: &ApproxParams) -> Result<Self> {
        let axes = problem
            .axes
            .iter()
            .map(|a| match a.noise {
                Noise::Brownian => Ok(AxisIncrement::Brownian(cfg.chi * cfg.dt.sqrt())),
                Noise::Levy => LevyIncrement::new(cfg.process_kind, approx, cfg.dt, cfg.chi, false).map(AxisIncrement::Levy),
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            problem,
            dt: cfg.dt,
            axes,
        })
    }

    fn step(&self, x: &mut [f64], rng: &mut StreamRng) {
        let mut b = [0.0; 2];
        self.problem.drift_into(x, &mut b);
        for ((v, inc), &bk) in x.iter_mut().zip(&self.axes).zip(&b) {
            let noise = match inc {
                AxisIncrement::Brownian(sd) => {
                    let z: f64 = rng.sample(StandardNormal);
                    sd * z
                }
                AxisIncrement::Levy(l) => l.sample(rng),
            };
            *v += bk * self.dt + noise;
        }
        self.problem.wrap(x);
    }

    /// Steps until exit or `max_steps`; returns the exit step (0 if the
    /// start is already outside the open domain).
    fn run(&self, start: &[f64], max_steps: usize, rng: &mut StreamRng) -> (Option<usize>, Vec<f64>) {
        let mut x = start.to_vec();
        if !self.problem.inside(&x) {
            return (Some(0), x);
        }
        for k in 1..=max_steps {
            self.step(&mut x, rng);
            if !self.problem.inside(&x) {
                return (Some(k), x);
            }
        }
        (None, x)
    }
}

/// One trajectory from `start` up to t_max.
pub fn simulate_exit(
    cfg: &SimConfig,
    problem: &ProblemSpec,
    approx: &ApproxParams,
    start: &[f64],
    rng: &mut StreamRng,
) -> Result<ExitRecord> {
    cfg.validate()?;
    let stepper = Stepper::new(cfg, problem, approx)?;
    let (k, x) = stepper.run(start, cfg.n_steps(), rng);
    Ok(ExitRecord {
        exited: k.is_some(),
        exit_time: k.map(|k| k as f64 * cfg.dt),
        final_position: x,
    })
}

/// Direct Monte Carlo exit probabilities: `result[i][j]` estimates
/// P(τ ≤ times[j]) from `starts[i]`. Trajectories run to the largest
/// requested time.
pub fn dmc_exit(
    cfg: &SimConfig,
    problem: &ProblemSpec,
    approx: &ApproxParams,
    starts: &[Vec<f64>],
    times: &[f64],
) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    if times.is_empty() || times.iter().any(|&t| !(t > 0.0)) {
        return Err(invalid("times", "need at least one positive time"));
    }
    if starts.iter().any(|s| s.len() != problem.dim()) {
        return Err(invalid("starts", "start point dimension does not match the problem"));
    }
    let stepper = Stepper::new(cfg, problem, approx)?;
    let time_steps: Vec<usize> = times.iter().map(|&t| (t / cfg.dt).round() as usize).collect();
    let max_steps = time_steps.iter().copied().max().unwrap_or(0);
    let chunks = cfg.n_samples.div_ceil(CHUNK);
    let tasks: Vec<(usize, usize)> = (0..starts.len()).flat_map(|i| (0..chunks).map(move |c| (i, c))).collect();
    let counts: Vec<Vec<usize>> = tasks
        .par_iter()
        .map(|&(i, c)| {
            let mut rng = stream_rng(cfg.seed, stream_id(i as u64 + 1, c as u64));
            let count = CHUNK.min(cfg.n_samples - c * CHUNK);
            let mut hits = vec![0usize; time_steps.len()];
            for _ in 0..count {
                if let (Some(k), _) = stepper.run(&starts[i], max_steps, &mut rng) {
                    for (h, &s) in hits.iter_mut().zip(&time_steps) {
                        if k <= s {
                            *h += 1;
                        }
                    }
                }
            }
            hits
        })
        .collect();
    let n = cfg.n_samples as f64;
    let mut out = vec![vec![0usize; times.len()]; starts.len()];
    for (&(i, _), hits) in tasks.iter().zip(counts) {
        for (o, h) in out[i].iter_mut().zip(hits) {
            *o += h;
        }
    }
    Ok(out
        .into_iter()
        .map(|row| row.into_iter().map(|c| c as f64 / n).collect())
        .collect())
}
