//! Command implementations behind the `eigenreg` binary.
//!
//! Each `cmd_*` function maps a [`RunConfig`] to an [`Outcome`] without
//! touching standard output; [`emit`] writes the files and [`execute`] wires
//! the whole run together. Structured reports embed the configuration and
//! contain no timings, so equal inputs give byte-identical JSON.

mod analyze;
pub mod config;
mod inspect;
mod plot;
mod synth;
mod verify;

use std::path::{Path, PathBuf};

use eigenreg::spectrum::{Manifold, ModelOperator, SpectrumError};
use eigenreg::synth::SynthError;
use eigenreg::transform::TransformError;
use eigenreg::weights::{check_conditions, parse_weight_spec, WeightSequence, WeightsError};
use serde::Serialize;
use thiserror::Error;

pub use analyze::cmd_analyze;
pub use config::{Command, ReportFormat, RunConfig};
pub use inspect::{cmd_spectrum, cmd_weights};
pub use plot::decay_svg;
pub use synth::cmd_synth;
pub use verify::cmd_verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: TransformError },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

/// What a command produced. Nothing here has been written anywhere yet.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    /// Structured twin of `text`.
    pub json: String,
    /// File product of `synth` (coefficients) and `weights` (record).
    pub artifact: Option<String>,
    pub plot: Option<String>,
}

/// Runs the configured command.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Analyze => cmd_analyze(cfg),
        Command::Synth => cmd_synth(cfg),
        Command::Weights => cmd_weights(cfg),
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Verify => cmd_verify(cfg),
    }
}

/// Path of the structured twin of a text report.
pub fn json_twin(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Writes the outcome's files. With an artifact, `out` receives the
/// artifact; otherwise `out` receives the text report and `<out>.json` its
/// twin.
pub fn emit(cfg: &RunConfig, outcome: &Outcome) -> Result<(), CliError> {
    if let Some(out) = &cfg.out {
        match &outcome.artifact {
            Some(a) => write_file(out, a)?,
            None => {
                write_file(out, &outcome.text)?;
                write_file(&json_twin(out), &outcome.json)?;
            }
        }
    }
    if let (Some(path), Some(svg)) = (&cfg.plot, &outcome.plot) {
        write_file(path, svg)?;
    }
    Ok(())
}

/// Full run: thread pool, command, files, standard output. Returns the exit
/// code.
pub fn execute(cfg: &RunConfig) -> i32 {
    let result = match cfg.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(cfg)),
            Err(e) => Err(CliError::Config(format!("thread pool: {e}"))),
        },
        None => run(cfg),
    };
    let outcome = match result.and_then(|o| emit(cfg, &o).map(|_| o)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let stdout = match (&outcome.artifact, &cfg.out, cfg.format) {
        // A coefficient file or record with nowhere else to go.
        (Some(a), None, _) => a,
        (_, _, ReportFormat::Json) => &outcome.json,
        (_, _, ReportFormat::Text) => &outcome.text,
    };
    print!("{stdout}");
    outcome.code
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: Command,
    config: RunConfig,
    result: &'a T,
}

/// Structured report: the configuration (minus the thread count, which
/// never changes results) followed by the command's result.
pub(crate) fn envelope<T: Serialize>(cfg: &RunConfig, result: &T) -> String {
    let config = RunConfig { threads: None, ..cfg.clone() };
    let mut s = serde_json::to_string_pretty(&Envelope { command: cfg.command, config, result })
        .expect("report serializes");
    s.push('\n');
    s
}

pub(crate) fn check_nu(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.nu != 2 {
        return Err(CliError::Config(format!("only nu = 2 is supported (got {})", cfg.nu)));
    }
    Ok(())
}

pub(crate) fn operator(cfg: &RunConfig) -> Result<ModelOperator, CliError> {
    check_nu(cfg)?;
    Ok(ModelOperator::new(cfg.manifold.unwrap_or(Manifold::Circle), cfg.shift.unwrap_or(0.0))?)
}

/// Resolves the weight spec and runs the condition checks through `k_max`,
/// which certifies the sequence when (M.1) and (M.2) hold.
pub(crate) fn certified_weights(cfg: &RunConfig) -> Result<WeightSequence, CliError> {
    let mut w = parse_weight_spec(&cfg.weights)?.resolve(cfg.nu)?;
    check_conditions(&mut w, cfg.k_max)?;
    Ok(w)
}

pub(crate) fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.6}"))
}
