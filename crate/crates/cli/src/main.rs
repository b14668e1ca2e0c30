use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eigenreg::classify::Regime;
use eigenreg::spectrum::Manifold;
use eigenreg_cli::{execute, Command, ReportFormat, RunConfig};

/// Regularity classes from eigenfunction expansions on the circle, the flat
/// torus and the 2-sphere.
#[derive(Parser)]
#[command(name = "eigenreg", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Classify the coefficients in a coefficient file.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Write a coefficient file with a prescribed profile.
    Synth {
        /// exponential:L,G | polynomial:P | associated:L | poisson:R | delta
        #[arg(long)]
        profile: String,
        /// Point for the delta profile (1 or 2 coordinates).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the weight conditions; `--out` writes a weights record.
    Weights {
        #[command(flatten)]
        common: Common,
    },
    /// List eigenvalue levels (TSV) with multiplicity diagnostics.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in bound and identity checks.
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ManifoldArg {
    Circle,
    Torus2,
    Sphere2,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Roumieu,
    Beurling,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    manifold: Option<ManifoldArg>,
    #[arg(long)]
    nu: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<f64>,
    /// gevrey:S | factorial | file:PATH  [default: factorial]
    #[arg(long, conflicts_with = "weights_file")]
    weights: Option<String>,
    /// Same as `--weights file:PATH`.
    #[arg(long)]
    weights_file: Option<PathBuf>,
    #[arg(long = "jmax")]
    j_max: Option<usize>,
    /// Range of the weight condition checks [default: 64].
    #[arg(long = "kmax")]
    k_max: Option<usize>,
    #[arg(long)]
    lambda_max: Option<f64>,
    /// Relative floor below which levels are ignored [default: 1e-14].
    #[arg(long)]
    floor: Option<f64>,
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// Dyadic L grid exponents [default: -20..=20].
    #[arg(long, allow_hyphen_values = true)]
    l_min: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    l_max: Option<i32>,
    /// Search range of the stretched-exponential exponent [default: 0.05..1.2].
    #[arg(long)]
    g_min: Option<f64>,
    #[arg(long)]
    g_max: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

impl Common {
    fn into_config(self, command: Command) -> Result<RunConfig, String> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                RunConfig::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
            None => RunConfig::default(),
        };
        c.command = command;
        if let Some(m) = self.manifold {
            c.manifold = Some(match m {
                ManifoldArg::Circle => Manifold::Circle,
                ManifoldArg::Torus2 => Manifold::Torus2,
                ManifoldArg::Sphere2 => Manifold::Sphere2,
            });
        }
        if let Some(r) = self.regime {
            c.classify.regime = match r {
                RegimeArg::Roumieu => Regime::Roumieu,
                RegimeArg::Beurling => Regime::Beurling,
            };
        }
        if let Some(f) = self.format {
            c.format = match f {
                FormatArg::Text => ReportFormat::Text,
                FormatArg::Json => ReportFormat::Json,
            };
        }
        if let Some(p) = self.weights_file {
            c.weights = format!("file:{}", p.display());
        }
        set(&mut c.weights, self.weights);
        set(&mut c.nu, self.nu);
        set(&mut c.k_max, self.k_max);
        set(&mut c.seed, self.seed);
        set(&mut c.classify.floor, self.floor);
        set(&mut c.classify.l_grid_min, self.l_min);
        set(&mut c.classify.l_grid_max, self.l_max);
        set(&mut c.classify.g_range.0, self.g_min);
        set(&mut c.classify.g_range.1, self.g_max);
        c.shift = self.shift.or(c.shift);
        c.j_max = self.j_max.or(c.j_max);
        c.lambda_max = self.lambda_max.or(c.lambda_max);
        c.threads = self.threads.or(c.threads);
        c.out = self.out.or(c.out);
        c.plot = self.plot.or(c.plot);
        Ok(c)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let built = match cli.command {
        Sub::Analyze { input, common } => common.into_config(Command::Analyze).map(|mut c| {
            c.input = Some(input);
            c
        }),
        Sub::Synth { profile, point, common } => common.into_config(Command::Synth).map(|mut c| {
            c.profile = Some(profile);
            if !point.is_empty() {
                c.point = point;
            }
            c
        }),
        Sub::Weights { common } => common.into_config(Command::Weights),
        Sub::Spectrum { common } => common.into_config(Command::Spectrum),
        Sub::Verify { common } => common.into_config(Command::Verify),
    };
    match built {
        Ok(cfg) => ExitCode::from(execute(&cfg) as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
