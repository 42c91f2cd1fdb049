//! Experiment drivers. Each returns the CSV tables it produced and a few
//! summary lines for the terminal.

use levy_exit::output::Row;
use levy_exit::{
    build_approx, dmc_exit, ks_two_sample, log_histogram, loglog_slope, simulate_msd, solve, terminal_samples,
    ApproxParams, Bins, Drift, DriftStep, InterpOrder, ProblemSpec, ProcessKind, SimConfig, SolverConfig,
};
use rayon::prelude::*;

use crate::config::{Config, DriftStepName};
use crate::error::CliResult;

pub struct Table {
    pub file: String,
    pub dims: usize,
    pub rows: Vec<Row>,
}

pub struct Report {
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
}

fn row(alpha: f64, chi: f64, t: Option<f64>, x: Vec<Option<f64>>, value: Option<f64>, estimator: &str) -> Row {
    Row {
        alpha: Some(alpha),
        chi: Some(chi),
        pe: None,
        m: None,
        n: None,
        t,
        x,
        value,
        estimator: estimator.to_string(),
    }
}

fn approx(cfg: &Config, alpha: f64) -> CliResult<ApproxParams> {
    Ok(build_approx(alpha, cfg.approx.eps, cfg.approx.eps_out)?)
}

fn sim(cfg: &Config, dt: f64, t_max: f64, n: usize, chi: f64, kind: ProcessKind) -> SimConfig {
    SimConfig {
        dt,
        t_max,
        n_samples: n,
        seed: cfg.seed,
        chi,
        process_kind: kind,
    }
}

/// X_t of the exact process in one step: χ t^{1/α} ζ.
fn exact_terminal(cfg: &Config, approx: &ApproxParams, t: f64, n: usize, chi: f64) -> CliResult<Vec<f64>> {
    Ok(terminal_samples(&sim(cfg, t, t, n, chi, ProcessKind::ExactStable), approx)?)
}

fn bmc_value_at(cfg: SolverConfig, xs: &[f64]) -> CliResult<Vec<f64>> {
    let sol = solve(cfg)?;
    let it = sol.final_field().interpolant(InterpOrder::Pchip)?;
    xs.iter().map(|&x| Ok(it.eval(&[x])?)).collect()
}

fn benchmark_solver(cfg: &Config, alpha: f64, chi: f64, dt: f64, t: f64, nodes: usize) -> CliResult<SolverConfig> {
    let problem = ProblemSpec::benchmark_1d(alpha, chi)?;
    Ok(SolverConfig::new(problem, approx(cfg, alpha)?, dt, t, vec![nodes]))
}

pub fn sample(cfg: &Config) -> CliResult<Report> {
    let s = &cfg.sample;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &a in &s.alpha {
        let p = approx(cfg, a)?;
        let approx_draws = terminal_samples(&sim(cfg, s.dt, s.t, s.n_samples, s.chi, ProcessKind::GaussApprox), &p)?;
        let exact = exact_terminal(cfg, &p, s.t, s.n_samples, s.chi)?;
        let ks = ks_two_sample(&approx_draws, &exact);
        notes.push(format!("alpha {a}: KS(gauss-approx, exact-stable) = {ks:.4}"));
        for (draws, label) in [(&approx_draws, "gauss-approx"), (&exact, "exact-stable")] {
            rows.extend(draws.iter().map(|&v| row(a, s.chi, Some(s.t), vec![None], Some(v), label)));
        }
        rows.push(row(a, s.chi, Some(s.t), vec![None], Some(ks), "ks"));
    }
    Ok(Report {
        tables: vec![Table {
            file: "sample.csv".into(),
            dims: 1,
            rows,
        }],
        notes,
    })
}

pub fn logpdf(cfg: &Config) -> CliResult<Report> {
    let l = &cfg.logpdf;
    let bins = Bins {
        half_width: l.half_width,
        count: l.bins,
    };
    let mut rows = Vec::new();
    for &a in &l.alpha {
        let p = approx(cfg, a)?;
        let approx_draws = terminal_samples(&sim(cfg, l.dt, l.t, l.n_samples, l.chi, ProcessKind::GaussApprox), &p)?;
        let exact = exact_terminal(cfg, &p, l.t, l.n_samples, l.chi)?;
        for (draws, label) in [(&approx_draws, "gauss-approx"), (&exact, "exact-stable")] {
            for (x, v) in log_histogram(draws, bins)? {
                rows.push(row(a, l.chi, Some(l.t), vec![Some(x)], v, label));
            }
        }
    }
    Ok(Report {
        tables: vec![Table {
            file: "logpdf.csv".into(),
            dims: 1,
            rows,
        }],
        notes: Vec::new(),
    })
}

pub fn msd(cfg: &Config) -> CliResult<Report> {
    let m = &cfg.msd;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &a in &m.alpha {
        let p = approx(cfg, a)?;
        for &proc in &m.processes {
            let curve = simulate_msd(&sim(cfg, m.dt, m.t_max, m.n_samples, m.chi, proc.kind()), &p)?;
            let fit: Vec<(f64, f64)> = curve
                .iter()
                .copied()
                .filter(|&(t, _)| t >= m.fit_min * (1.0 - 1e-12) && t <= m.fit_max * (1.0 + 1e-12))
                .collect();
            let slope = loglog_slope(&fit)?;
            notes.push(format!(
                "alpha {a} {}: log-log slope {slope:.3} (2/alpha = {:.3})",
                proc.label(),
                2.0 / a
            ));
            rows.extend(curve.iter().map(|&(t, v)| row(a, m.chi, Some(t), vec![None], Some(v), proc.label())));
            rows.push(row(a, m.chi, None, vec![None], Some(slope), &format!("{}-slope", proc.label())));
        }
    }
    Ok(Report {
        tables: vec![Table {
            file: "msd.csv".into(),
            dims: 1,
            rows,
        }],
        notes,
    })
}

pub fn dmc(cfg: &Config) -> CliResult<Report> {
    let d = &cfg.dmc;
    let starts: Vec<Vec<f64>> = d.x.iter().map(|&x| vec![x]).collect();
    let label = format!("dmc-{}", d.process.label());
    let mut rows = Vec::new();
    for &a in &d.alpha {
        let problem = ProblemSpec::benchmark_1d(a, d.chi)?;
        let p = approx(cfg, a)?;
        let est = dmc_exit(&sim(cfg, d.dt, d.t, d.n_samples, d.chi, d.process.kind()), &problem, &p, &starts, &[d.t])?;
        for (x, v) in d.x.iter().zip(est) {
            rows.push(row(a, d.chi, Some(d.t), vec![Some(*x)], Some(v[0]), &label));
        }
    }
    Ok(Report {
        tables: vec![Table {
            file: "dmc.csv".into(),
            dims: 1,
            rows,
        }],
        notes: Vec::new(),
    })
}

pub fn bmc(cfg: &Config) -> CliResult<Report> {
    let b = &cfg.bmc;
    let cases: Vec<CliResult<Vec<Row>>> = b
        .alpha
        .par_iter()
        .map(|&a| {
            let mut sc = benchmark_solver(cfg, a, b.chi, b.dt, b.t, b.nodes)?;
            sc.m_hermite = b.m_hermite;
            sc.snapshots = b.snapshots.clone();
            let sol = solve(sc)?;
            let nodes = sol.mesh.grids[0].nodes().to_vec();
            Ok(sol
                .snapshots
                .iter()
                .flat_map(|f| {
                    nodes
                        .iter()
                        .zip(&f.values)
                        .map(|(&x, &v)| row(a, b.chi, Some(f.horizon), vec![Some(x)], Some(v), "bmc"))
                        .collect::<Vec<_>>()
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for c in cases {
        rows.extend(c?);
    }
    Ok(Report {
        tables: vec![Table {
            file: "bmc.csv".into(),
            dims: 1,
            rows,
        }],
        notes: Vec::new(),
    })
}

pub fn converge(cfg: &Config) -> CliResult<Report> {
    let c = &cfg.converge;
    let dt_min = c.dt.iter().copied().fold(f64::INFINITY, f64::min);
    let dt_ref = dt_min / c.reference_refinement as f64;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &a in &c.alpha {
        let reference = bmc_value_at(benchmark_solver(cfg, a, c.chi, dt_ref, c.t, c.nodes)?, &c.x)?;
        let runs: Vec<CliResult<(f64, Vec<f64>)>> = c
            .dt
            .par_iter()
            .map(|&dt| Ok((dt, bmc_value_at(benchmark_solver(cfg, a, c.chi, dt, c.t, c.nodes)?, &c.x)?)))
            .collect();
        let runs: Vec<(f64, Vec<f64>)> = runs.into_iter().collect::<CliResult<_>>()?;
        let l2 = |u: &[f64], r: &[f64]| {
            let sq: f64 = u.iter().zip(r).map(|(p, q)| (p - q).powi(2)).sum();
            (sq / c.x.len() as f64).sqrt()
        };
        let errors: Vec<(f64, f64)> = runs.iter().map(|(dt, u)| (*dt, l2(u, &reference))).collect();
        if c.dmc_samples > 0 {
            let problem = ProblemSpec::benchmark_1d(a, c.chi)?;
            let starts: Vec<Vec<f64>> = c.x.iter().map(|&x| vec![x]).collect();
            let sc = sim(cfg, c.dmc_dt, c.t, c.dmc_samples, c.chi, ProcessKind::GaussApprox);
            let dmc: Vec<f64> = dmc_exit(&sc, &problem, &approx(cfg, a)?, &starts, &[c.t])?
                .into_iter()
                .map(|v| v[0])
                .collect();
            for (dt, u) in &runs {
                rows.push(row(a, c.chi, Some(c.t), vec![Some(*dt)], Some(l2(u, &dmc)), "l2-error-dmc"));
            }
        }
        let slope = loglog_slope(&errors)?;
        notes.push(format!("alpha {a}: observed order {slope:.3} (reference dt {dt_ref:e})"));
        for &(dt, e) in &errors {
            rows.push(row(a, c.chi, Some(c.t), vec![Some(dt)], Some(e), "l2-error"));
        }
        rows.push(row(a, c.chi, Some(c.t), vec![None], Some(slope), "slope"));
    }
    Ok(Report {
        tables: vec![Table {
            file: "converge.csv".into(),
            dims: 1,
            rows,
        }],
        notes,
    })
}

pub fn chi_values(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    (0..count)
        .map(|k| min + (max - min) * k as f64 / (count - 1) as f64)
        .collect()
}

pub fn chi_sweep(cfg: &Config) -> CliResult<Report> {
    let w = &cfg.chi_sweep;
    let chis = chi_values(w.chi_min, w.chi_max, w.chi_count);
    let cases: Vec<(f64, f64)> = w.alpha.iter().flat_map(|&a| chis.iter().map(move |&c| (a, c))).collect();
    let values: Vec<CliResult<f64>> = cases
        .par_iter()
        .map(|&(a, chi)| Ok(bmc_value_at(benchmark_solver(cfg, a, chi, w.dt, w.t, w.nodes)?, &[w.x])?[0]))
        .collect();
    let mut rows = Vec::new();
    for (&(a, chi), v) in cases.iter().zip(values) {
        rows.push(row(a, chi, Some(w.t), vec![Some(w.x)], Some(v?), "bmc"));
    }
    Ok(Report {
        tables: vec![Table {
            file: "chi_sweep.csv".into(),
            dims: 1,
            rows,
        }],
        notes: Vec::new(),
    })
}

pub fn field2d(cfg: &Config) -> CliResult<Report> {
    let f = &cfg.field2d;
    let step = match f.drift_step {
        DriftStepName::Euler => DriftStep::Euler,
        DriftStepName::Midpoint => DriftStep::Midpoint,
    };
    let cases: Vec<(f64, f64, u32)> = f
        .alpha
        .iter()
        .flat_map(|&a| f.pe.iter().flat_map(move |&pe| f.m.iter().map(move |&m| (a, pe, m))))
        .collect();
    let tables: Vec<CliResult<Table>> = cases
        .par_iter()
        .map(|&(a, pe, m)| {
            let problem = ProblemSpec::anisotropic_2d(a, f.chi, Drift::Cellular { pe, m, n: f.n })?;
            let mut sc = SolverConfig::new(problem, approx(cfg, a)?, f.dt, f.t, f.nodes.clone());
            sc.drift_step = step;
            let sol = solve(sc)?;
            let field = sol.final_field();
            let rows = (0..field.mesh.len())
                .map(|j| {
                    let p = field.mesh.point(j);
                    Row {
                        alpha: Some(a),
                        chi: Some(f.chi),
                        pe: Some(pe),
                        m: Some(m),
                        n: Some(f.n),
                        t: Some(field.horizon),
                        x: vec![Some(p[0]), Some(p[1])],
                        value: Some(field.values[j]),
                        estimator: "bmc".into(),
                    }
                })
                .collect();
            Ok(Table {
                file: format!("field2d_alpha{a}_pe{pe}_m{m}.csv"),
                dims: 2,
                rows,
            })
        })
        .collect();
    Ok(Report {
        tables: tables.into_iter().collect::<CliResult<_>>()?,
        notes: Vec::new(),
    })
}
