mod config;
mod drivers;
mod error;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::Config;
use error::{CliError, CliResult};

/// Exit probabilities of α-stable Lévy flights: forward Monte Carlo and
/// backward mesh scheme.
#[derive(Debug, Parser)]
#[command(name = "levy-exit", version)]
struct Cli {
    /// TOML configuration file (a manifest from a previous run also works).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides `seed` in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Existing directory for CSV files and the manifest.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Configuration override `section.key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Terminal samples of the approximate and exact processes.
    Sample,
    /// Log-density histograms of X_t.
    Logpdf,
    /// Mean-squared displacement and its log-log slope.
    Msd,
    /// Direct Monte Carlo exit probabilities on [0, 1].
    Dmc,
    /// Backward mesh scheme on [0, 1].
    Bmc,
    /// Temporal convergence study of the backward scheme.
    Converge,
    /// Exit probability at one point across a range of chi.
    ChiSweep,
    /// Exit-probability fields for the cellular-flow problem.
    Field2d,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Logpdf => "logpdf",
            Command::Msd => "msd",
            Command::Dmc => "dmc",
            Command::Bmc => "bmc",
            Command::Converge => "converge",
            Command::ChiSweep => "chi-sweep",
            Command::Field2d => "field2d",
        }
    }

    fn run(self, cfg: &Config) -> CliResult<drivers::Report> {
        match self {
            Command::Sample => drivers::sample(cfg),
            Command::Logpdf => drivers::logpdf(cfg),
            Command::Msd => drivers::msd(cfg),
            Command::Dmc => drivers::dmc(cfg),
            Command::Bmc => drivers::bmc(cfg),
            Command::Converge => drivers::converge(cfg),
            Command::ChiSweep => drivers::chi_sweep(cfg),
            Command::Field2d => drivers::field2d(cfg),
        }
    }
}

fn write_manifest(path: &Path, cfg: &Config, cli: &Cli, files: &[String], wall: f64) -> CliResult<()> {
    let mut table = cfg.to_table();
    let mut info = toml::Table::new();
    info.insert("command".into(), cli.command.name().into());
    info.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    info.insert("seed".into(), toml::Value::Integer(cfg.seed as i64));
    info.insert("threads".into(), toml::Value::Integer(rayon::current_num_threads() as i64));
    info.insert("out".into(), cli.out.display().to_string().into());
    info.insert("wall_time_secs".into(), wall.into());
    info.insert(
        "files".into(),
        toml::Value::Array(files.iter().map(|f| f.clone().into()).collect()),
    );
    table.insert("manifest".into(), toml::Value::Table(info));
    let text = toml::to_string(&table).map_err(|e| CliError::Config(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let mut cfg = Config::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if !cli.out.is_dir() {
        return Err(CliError::key("out", format!("{} is not an existing directory", cli.out.display())));
    }
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::key("threads", e.to_string()))?;
    }
    let start = Instant::now();
    let report = cli.command.run(&cfg)?;
    let mut files = Vec::new();
    for t in &report.tables {
        let path = cli.out.join(&t.file);
        let w = BufWriter::new(File::create(&path)?);
        levy_exit::output::write_csv(w, t.dims, &t.rows)?;
        println!("wrote {}", path.display());
        files.push(t.file.clone());
    }
    for n in &report.notes {
        println!("{n}");
    }
    let manifest = cli.out.join("manifest.toml");
    write_manifest(&manifest, &cfg, cli, &files, start.elapsed().as_secs_f64())?;
    println!("wrote {}", manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("levy-exit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
