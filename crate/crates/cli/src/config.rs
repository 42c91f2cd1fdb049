//! TOML experiment configuration. Every key is optional; missing keys take
//! the defaults below. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Process {
    GaussApprox,
    ExactStable,
}

impl Process {
    pub fn kind(self) -> levy_exit::ProcessKind {
        match self {
            Process::GaussApprox => levy_exit::ProcessKind::GaussApprox,
            Process::ExactStable => levy_exit::ProcessKind::ExactStable,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Process::GaussApprox => "gauss-approx",
            Process::ExactStable => "exact-stable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftStepName {
    Euler,
    Midpoint,
}

fn comparison_points() -> Vec<f64> {
    (0..11).map(|k| (5 + 9 * k) as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub seed: u64,
    pub approx: ApproxSection,
    pub sample: SampleSection,
    pub logpdf: LogpdfSection,
    pub msd: MsdSection,
    pub dmc: DmcSection,
    pub bmc: BmcSection,
    pub converge: ConvergeSection,
    pub chi_sweep: ChiSweepSection,
    pub field2d: Field2dSection,
    /// Run record written into manifests; ignored on load.
    #[serde(skip_serializing)]
    pub manifest: Option<toml::Table>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 1,
            approx: ApproxSection::default(),
            sample: SampleSection::default(),
            logpdf: LogpdfSection::default(),
            msd: MsdSection::default(),
            dmc: DmcSection::default(),
            bmc: BmcSection::default(),
            converge: ConvergeSection::default(),
            chi_sweep: ChiSweepSection::default(),
            field2d: Field2dSection::default(),
            manifest: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApproxSection {
    pub eps: f64,
    pub eps_out: f64,
}

impl Default for ApproxSection {
    fn default() -> Self {
        Self { eps: 0.1, eps_out: 1e5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSection {
    pub alpha: Vec<f64>,
    pub chi: f64,
    pub dt: f64,
    pub t: f64,
    pub n_samples: usize,
}

impl Default for SampleSection {
    fn default() -> Self {
        Self {
            alpha: vec![1.25, 1.5, 1.75],
            chi: 1.0,
            dt: 0.005,
            t: 1.0,
            n_samples: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogpdfSection {
    pub alpha: Vec<f64>,
    pub chi: f64,
    pub dt: f64,
    pub t: f64,
    pub n_samples: usize,
    pub half_width: f64,
    pub bins: usize,
}

impl Default for LogpdfSection {
    fn default() -> Self {
        Self {
            alpha: vec![1.25, 1.5, 1.75],
            chi: 1.0,
            dt: 0.005,
            t: 1.0,
            n_samples: 100_000,
            half_width: 10.0,
            bins: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MsdSection {
    pub alpha: Vec<f64>,
    pub chi: f64,
    pub dt: f64,
    pub t_max: f64,
    pub n_samples: usize,
    pub processes: Vec<Process>,
    pub fit_min: f64,
    pub fit_max: f64,
}

impl Default for MsdSection {
    fn default() -> Self {
        Self {
            alpha: vec![1.25, 1.5, 1.75],
            chi: 1.0,
            dt: 0.005,
            t_max: 5.0,
            n_samples: 10_000,
            processes: vec![Process::GaussApprox, Process::ExactStable],
            fit_min: 0.1,
            fit_max: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DmcSection {
    pub alpha: Vec<f64>,
    pub chi: f64,
    pub t: f64,
    pub dt: f64,
    pub n_samples: usize,
    pub x: Vec<f64>,
    pub process: Process,
}

impl Default for DmcSection {
    fn default() -> Self {
        Self {
            alpha: vec![1.0, 1.5, 1.75],
            chi: 0.5,
            t: 1.0,
            dt: 1e-4,
            n_samples: 20_000,
            x: comparison_points(),
            process: Process::GaussApprox,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BmcSection {
    pub alpha: Vec<f64>,
    pub chi: f64,
    pub t: f64,
    pub dt: f64,
    pub nodes: usize,
    pub m_hermite: usize,
    /// Extra horizons to record besides t.
    pub snapshots: Vec<f64>,
}

impl Default for BmcSection {
    fn default() -> Self {
        Self {
            alpha: vec![1.0, 1.5, 1.75],
            chi: 0.5,
            t: 1.0,
            dt: 1e-4,
            nodes: 401,
            m_hermite: 4,
            snapshots: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergeSection {
    pub alpha: Vec<f64>,
    pub chi: f64,
    pub t: f64,
    pub dt: Vec<f64>,
    /// The reference run uses min(dt) / reference_refinement.
    pub reference_refinement: usize,
    pub nodes: usize,
    pub x: Vec<f64>,
    /// Forward Monte Carlo reference as a second comparison; 0 disables it.
    pub dmc_samples: usize,
    pub dmc_dt: f64,
}

impl Default for ConvergeSection {
    fn default() -> Self {
        Self {
            alpha: vec![1.0, 1.5],
            chi: 0.5,
            t: 1.0,
            dt: vec![4e-3, 2e-3, 1e-3, 5e-4],
            reference_refinement: 4,
            nodes: 201,
            x: comparison_points(),
            dmc_samples: 20_000,
            dmc_dt: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChiSweepSection {
    pub alpha: Vec<f64>,
    pub chi_min: f64,
    pub chi_max: f64,
    pub chi_count: usize,
    pub x: f64,
    pub t: f64,
    pub dt: f64,
    pub nodes: usize,
}

impl Default for ChiSweepSection {
    fn default() -> Self {
        Self {
            alpha: vec![1.0, 1.25, 1.5, 1.75],
            chi_min: 0.05,
            chi_max: 0.5,
            chi_count: 10,
            x: 0.5,
            t: 1.0,
            dt: 1e-4,
            nodes: 401,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Field2dSection {
    pub alpha: Vec<f64>,
    pub pe: Vec<f64>,
    pub m: Vec<u32>,
    pub n: u32,
    pub chi: f64,
    pub t: f64,
    pub dt: f64,
    /// Node counts (theta, r), endpoints included.
    pub nodes: Vec<usize>,
    pub drift_step: DriftStepName,
}

impl Default for Field2dSection {
    fn default() -> Self {
        Self {
            alpha: vec![1.0, 1.75],
            pe: vec![0.1, 10.0],
            m: vec![1, 2],
            n: 2,
            chi: 0.1,
            t: 1.0,
            dt: 1e-4,
            nodes: vec![65, 65],
            drift_step: DriftStepName::Midpoint,
        }
    }
}

fn positive(key: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::key(key, format!("{v} must be positive and finite")))
    }
}

fn alphas(key: &str, list: &[f64]) -> CliResult<()> {
    if list.is_empty() {
        return Err(CliError::key(key, "list is empty"));
    }
    match list.iter().find(|a| !(1.0..2.0).contains(*a)) {
        Some(a) => Err(CliError::key(key, format!("{a} is outside [1, 2)"))),
        None => Ok(()),
    }
}

fn count(key: &str, v: usize, min: usize) -> CliResult<()> {
    if v >= min {
        Ok(())
    } else {
        Err(CliError::key(key, format!("{v} is below the minimum {min}")))
    }
}

fn unit_points(key: &str, xs: &[f64]) -> CliResult<()> {
    if xs.is_empty() {
        return Err(CliError::key(key, "list is empty"));
    }
    match xs.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
        Some(x) => Err(CliError::key(key, format!("{x} is not inside (0, 1)"))),
        None => Ok(()),
    }
}

impl Config {
    /// Parses TOML text, applies `key=value` overrides, and validates.
    pub fn from_toml(text: &str, overrides: &[String]) -> CliResult<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: Config = table.try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> CliResult<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml(&text, overrides)
    }

    pub fn validate(&self) -> CliResult<()> {
        let a = &self.approx;
        positive("approx.eps", a.eps)?;
        if a.eps >= 1.0 {
            return Err(CliError::key("approx.eps", format!("{} must be below 1", a.eps)));
        }
        if !(a.eps_out >= 1.0 && a.eps_out.is_finite()) {
            return Err(CliError::key("approx.eps_out", format!("{} must be finite and >= 1", a.eps_out)));
        }

        let s = &self.sample;
        alphas("sample.alpha", &s.alpha)?;
        positive("sample.chi", s.chi)?;
        positive("sample.dt", s.dt)?;
        positive("sample.t", s.t)?;
        count("sample.n_samples", s.n_samples, 1)?;

        let l = &self.logpdf;
        alphas("logpdf.alpha", &l.alpha)?;
        positive("logpdf.chi", l.chi)?;
        positive("logpdf.dt", l.dt)?;
        positive("logpdf.t", l.t)?;
        count("logpdf.n_samples", l.n_samples, 1)?;
        positive("logpdf.half_width", l.half_width)?;
        count("logpdf.bins", l.bins, 1)?;

        let m = &self.msd;
        alphas("msd.alpha", &m.alpha)?;
        positive("msd.chi", m.chi)?;
        positive("msd.dt", m.dt)?;
        positive("msd.t_max", m.t_max)?;
        count("msd.n_samples", m.n_samples, 1)?;
        if m.processes.is_empty() {
            return Err(CliError::key("msd.processes", "list is empty"));
        }
        positive("msd.fit_min", m.fit_min)?;
        if !(m.fit_max > m.fit_min) {
            return Err(CliError::key("msd.fit_max", format!("{} must exceed fit_min", m.fit_max)));
        }

        let d = &self.dmc;
        alphas("dmc.alpha", &d.alpha)?;
        positive("dmc.chi", d.chi)?;
        positive("dmc.t", d.t)?;
        positive("dmc.dt", d.dt)?;
        count("dmc.n_samples", d.n_samples, 1)?;
        unit_points("dmc.x", &d.x)?;

        let b = &self.bmc;
        alphas("bmc.alpha", &b.alpha)?;
        positive("bmc.chi", b.chi)?;
        positive("bmc.t", b.t)?;
        positive("bmc.dt", b.dt)?;
        count("bmc.nodes", b.nodes, 4)?;
        count("bmc.m_hermite", b.m_hermite, 2)?;
        if let Some(s) = b.snapshots.iter().find(|s| !(**s > 0.0 && **s <= b.t)) {
            return Err(CliError::key("bmc.snapshots", format!("{s} is not in (0, t]")));
        }

        let c = &self.converge;
        alphas("converge.alpha", &c.alpha)?;
        positive("converge.chi", c.chi)?;
        positive("converge.t", c.t)?;
        if c.dt.len() < 2 {
            return Err(CliError::key("converge.dt", "at least two step sizes are needed"));
        }
        for v in &c.dt {
            positive("converge.dt", *v)?;
        }
        count("converge.reference_refinement", c.reference_refinement, 2)?;
        count("converge.nodes", c.nodes, 4)?;
        unit_points("converge.x", &c.x)?;
        positive("converge.dmc_dt", c.dmc_dt)?;

        let w = &self.chi_sweep;
        alphas("chi_sweep.alpha", &w.alpha)?;
        positive("chi_sweep.chi_min", w.chi_min)?;
        if !(w.chi_max >= w.chi_min && w.chi_max.is_finite()) {
            return Err(CliError::key("chi_sweep.chi_max", format!("{} is below chi_min", w.chi_max)));
        }
        count("chi_sweep.chi_count", w.chi_count, 1)?;
        unit_points("chi_sweep.x", &[w.x])?;
        positive("chi_sweep.t", w.t)?;
        positive("chi_sweep.dt", w.dt)?;
        count("chi_sweep.nodes", w.nodes, 4)?;

        let f = &self.field2d;
        alphas("field2d.alpha", &f.alpha)?;
        if f.pe.is_empty() {
            return Err(CliError::key("field2d.pe", "list is empty"));
        }
        if let Some(p) = f.pe.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(CliError::key("field2d.pe", format!("{p} must be non-negative")));
        }
        if f.m.is_empty() || f.m.contains(&0) {
            return Err(CliError::key("field2d.m", "modes must be a non-empty list of positive integers"));
        }
        if f.n == 0 {
            return Err(CliError::key("field2d.n", "must be positive"));
        }
        positive("field2d.chi", f.chi)?;
        positive("field2d.t", f.t)?;
        positive("field2d.dt", f.dt)?;
        if f.nodes.len() != 2 {
            return Err(CliError::key("field2d.nodes", "expected [theta_nodes, r_nodes]"));
        }
        for &n in &f.nodes {
            count("field2d.nodes", n, 4)?;
        }
        Ok(())
    }

    /// The configuration as a TOML table (without the manifest section).
    pub fn to_table(&self) -> toml::Table {
        toml::Table::try_from(self).expect("config serializes to a table")
    }
}

/// Applies `section.key=value`; the value is parsed as TOML, falling back
/// to a bare string.
fn apply_override(table: &mut toml::Table, spec: &str) -> CliResult<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not of the form key=value")))?;
    let path = path.trim();
    let value = parse_value(raw.trim());
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| CliError::key(path, "empty key"))?;
    let mut cur = table;
    for p in parts {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::key(path, format!("`{p}` is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}
