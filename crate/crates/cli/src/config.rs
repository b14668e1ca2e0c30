//! Run configuration shared by every subcommand.
//!
//! A [`RunConfig`] is what actually drives a run; the flag parser only builds
//! one. It serializes to JSON losslessly and is embedded in every structured
//! report, so a report names the exact settings that produced it.

use std::path::PathBuf;

use eigenreg::classify::ClassifyOptions;
use eigenreg::spectrum::Manifold;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Analyze,
    Synth,
    Weights,
    Spectrum,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_J_MAX: usize = 256;
pub const DEFAULT_K_MAX: usize = 64;
pub const DEFAULT_WEIGHTS: &str = "factorial";

/// Everything a run depends on. Omitted fields take the documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Coefficient file read by `analyze`.
    pub input: Option<PathBuf>,
    /// Report (or coefficient file for `synth`, weights record for
    /// `weights`); the structured twin goes to `<out>.json`.
    pub out: Option<PathBuf>,
    /// SVG decay plot written by `analyze`.
    pub plot: Option<PathBuf>,
    /// `None`: taken from the input file (`analyze`) or circle.
    pub manifold: Option<Manifold>,
    pub nu: u32,
    /// `None`: taken from the input file (`analyze`) or 0.
    pub shift: Option<f64>,
    /// `gevrey:S`, `factorial` or `file:PATH`.
    pub weights: String,
    /// Truncation; `None` keeps the whole input (`analyze`) or uses
    /// [`DEFAULT_J_MAX`].
    pub j_max: Option<usize>,
    /// Range for weight condition checks and written weight tables.
    pub k_max: usize,
    /// Spectrum and verify range; `None` uses the command default.
    pub lambda_max: Option<f64>,
    /// Profile for `synth`.
    pub profile: Option<String>,
    /// Evaluation point for the `delta` profile, in manifold coordinates.
    pub point: Vec<f64>,
    pub seed: u64,
    /// Worker threads; `None` uses the runtime default. Results do not
    /// depend on it.
    pub threads: Option<usize>,
    /// What goes to standard output.
    pub format: ReportFormat,
    pub classify: ClassifyOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Verify,
            input: None,
            out: None,
            plot: None,
            manifold: None,
            nu: 2,
            shift: None,
            weights: DEFAULT_WEIGHTS.into(),
            j_max: None,
            k_max: DEFAULT_K_MAX,
            lambda_max: None,
            profile: None,
            point: Vec::new(),
            seed: DEFAULT_SEED,
            threads: None,
            format: ReportFormat::Text,
            classify: ClassifyOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self { command, ..Self::default() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use eigenreg::classify::Regime;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn every_field_round_trips() {
        let mut c = RunConfig::new(Command::Analyze);
        c.input = Some("in.coef".into());
        c.out = Some("r.txt".into());
        c.plot = Some("p.svg".into());
        c.manifold = Some(Manifold::Sphere2);
        c.shift = Some(0.1 + 0.2);
        c.weights = "gevrey:1.5".into();
        c.j_max = Some(1023);
        c.lambda_max = Some(1e15);
        c.profile = Some("exponential:1,0.5".into());
        c.point = vec![0.7, 1.9];
        c.seed = u64::MAX;
        c.threads = Some(8);
        c.format = ReportFormat::Json;
        c.classify.floor = 3e-13;
        c.classify.regime = Regime::Beurling;
        c.classify.g_range = (0.1, 1.0);
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.shift.unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
    }

    #[test]
    fn partial_configs_take_defaults_and_unknown_keys_fail() {
        let c = RunConfig::from_json(r#"{"command": "synth", "seed": 7}"#).unwrap();
        assert_eq!(c.command, Command::Synth);
        assert_eq!(c.seed, 7);
        assert_eq!(c.j_max, None);
        assert_eq!(c.k_max, DEFAULT_K_MAX);
        assert!(RunConfig::from_json(r#"{"comand": "synth"}"#).is_err());
    }
}
