//! `lab`: runs experiments from config files, plots CSV output, and checks
//! the exact solvers against enumeration.

// `!(x > 0.0)` style guards are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod experiments;
mod manifest;
mod plot;
mod selftest;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use dimerlab::LabError;

/// Thread-count override for the worker pool.
const THREADS_VAR: &str = "DIMERLAB_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad config or arguments; exit 2.
    Validation(String),
    /// A numerical method failed to converge; exit 3.
    Convergence(String),
    /// Filesystem trouble; exit 1.
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Convergence(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> CliError {
        match e {
            LabError::NonConvergence(_)
            | LabError::Fit(_)
            | LabError::Series(_)
            | LabError::Singular
            | LabError::SectorSingular(_) => CliError::Convergence(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "lab", version, about = "Dimer and Ising experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Plot CSV columns to SVG.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        x: String,
        /// Y column; repeat or comma-separate for several series.
        #[arg(long, required = true, value_delimiter = ',')]
        y: Vec<String>,
        #[arg(long)]
        logx: bool,
        #[arg(long)]
        logy: bool,
        /// Error-bar column(s), matching `--y`.
        #[arg(long, value_delimiter = ',')]
        err: Vec<String>,
        /// Output file; defaults to the CSV path with an `.svg` extension.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the exact solvers against exhaustive enumeration.
    Selftest,
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize =
            v.parse().map_err(|_| CliError::Validation(format!("{THREADS_VAR}={v:?} is not a thread count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(path: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let cfg = config::parse(&text)?;
    let start = Instant::now();
    let tables = experiments::run(&cfg)?;
    let mut outputs = Vec::new();
    for t in &tables {
        let file = format!("{}.csv", t.name);
        let bytes = t.to_csv().into_bytes();
        manifest::write_atomic(&cfg.output.join(&file), &bytes)?;
        outputs.push(manifest::OutputEntry { sha256: manifest::sha256_hex(&bytes), rows: t.rows.len(), file });
    }
    let m = manifest::RunManifest {
        experiment: cfg.experiment.name().into(),
        config_sha256: manifest::sha256_hex(text.as_bytes()),
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION").into(),
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs,
    };
    manifest::write_atomic(&cfg.output.join("manifest.toml"), m.to_toml().as_bytes())?;
    for o in &m.outputs {
        eprintln!("wrote {} ({} rows)", cfg.output.join(&o.file).display(), o.rows);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| match cli.cmd {
        Cmd::Run { config } => run(&config),
        Cmd::Plot { csv, x, y, logx, logy, err, output } => {
            let text = std::fs::read_to_string(&csv)
                .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", csv.display())))?;
            let spec = plot::PlotSpec { x, ys: y, errs: err, logx, logy };
            let svg = plot::render(&text, &spec)?;
            let out = output.unwrap_or_else(|| csv.with_extension("svg"));
            manifest::write_atomic(&out, svg.as_bytes())?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }
        Cmd::Selftest => {
            if selftest::run() {
                Ok(())
            } else {
                Err(CliError::Convergence("selftest failed".into()))
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lab: {e}");
            ExitCode::from(e.code())
        }
    }
}
