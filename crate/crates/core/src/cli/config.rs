//! Run configuration: flat `key = value` files layered under command-line
//! flags.
//!
//! Precedence, lowest to highest: built-in defaults (including the figure
//! presets), config file, flags, and for the output directory the
//! `MPCR_OUT` environment variable.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::harness::FigureId;
use crate::model::{validate, ModelParams, RawParams};
use crate::presets;
use crate::sim::SimMode;
use crate::table::Format;

/// Keys accepted in a config file. Every value is a scalar or an array.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub v: Option<Vec<f64>>,
    pub z0: Option<Vec<u64>>,
    pub kappa: Option<u32>,
    pub seed: Option<u64>,
    pub replicates: Option<u64>,
    pub n_offset: Option<i32>,
    pub kappa_list: Option<Vec<u32>>,
    pub tol: Option<f64>,
    pub figure_id: Option<String>,
    pub steps: Option<u32>,
    pub mode: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Overlays `other` on top of `self`, field by field.
    pub fn overlay(self, other: FileConfig) -> FileConfig {
        FileConfig {
            v: other.v.or(self.v),
            z0: other.z0.or(self.z0),
            kappa: other.kappa.or(self.kappa),
            seed: other.seed.or(self.seed),
            replicates: other.replicates.or(self.replicates),
            n_offset: other.n_offset.or(self.n_offset),
            kappa_list: other.kappa_list.or(self.kappa_list),
            tol: other.tol.or(self.tol),
            figure_id: other.figure_id.or(self.figure_id),
            steps: other.steps.or(self.steps),
            mode: other.mode.or(self.mode),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
            threads: other.threads.or(self.threads),
        }
    }
}

/// Fully resolved configuration of one invocation; echoed into the run
/// manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub version: String,
    pub v: Vec<f64>,
    pub z0: Vec<u64>,
    pub kappa: u32,
    pub seed: u64,
    pub replicates: u64,
    pub n_offset: i32,
    pub kappa_list: Vec<u32>,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure_id: Option<String>,
    pub steps: u32,
    pub mode: String,
    pub out: PathBuf,
    pub format: Format,
    pub threads: usize,
}

fn preset_for(command: &str, figure: Option<FigureId>) -> FileConfig {
    let params = match (command, figure) {
        ("figure", Some(FigureId::GCurves)) => presets::g_family(),
        ("figure", Some(FigureId::Offset)) => presets::five_type(),
        ("figure", Some(_)) => presets::two_type(),
        _ => return FileConfig::default(),
    };
    FileConfig {
        v: Some(params.rates().v().to_vec()),
        z0: Some(params.z0().to_vec()),
        kappa: Some(params.kappa()),
        seed: Some(params.seed()),
        n_offset: (figure == Some(FigureId::Offset)).then_some(-3),
        ..FileConfig::default()
    }
}

impl RunConfig {
    /// Resolves `file` overlaid by `flags`, with `env_out` (the value of
    /// `MPCR_OUT`) taking precedence for the output directory.
    pub fn resolve(
        command: &str,
        file: FileConfig,
        flags: FileConfig,
        env_out: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        let merged = file.overlay(flags);
        let figure = merged
            .figure_id
            .as_deref()
            .map(str::parse::<FigureId>)
            .transpose()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if command == "figure" && figure.is_none() {
            return Err(CliError::Config("figure requires --id A|1|2|3".into()));
        }
        let merged = preset_for(command, figure).overlay(merged);
        let missing = |key: &str| CliError::Config(format!("missing required setting `{key}`"));
        let kappa = merged.kappa.ok_or_else(|| missing("kappa"))?;
        let tol = merged.tol.unwrap_or(1e-8);
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Config(format!("tol must be positive, got {tol}")));
        }
        let format: Format = merged
            .format
            .as_deref()
            .unwrap_or("csv")
            .parse()
            .map_err(|e: crate::Error| CliError::Config(e.to_string()))?;
        let mode = merged.mode.unwrap_or_else(|| "mpcr".into());
        mode.parse::<SimMode>()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let seed = merged.seed.unwrap_or(0);
        if seed > i64::MAX as u64 {
            return Err(CliError::Config(format!("seed {seed} exceeds 2^63 - 1")));
        }
        let kappa_list = merged.kappa_list.unwrap_or_default();
        if command == "sweep" && kappa_list.is_empty() {
            return Err(missing("kappa_list"));
        }
        Ok(RunConfig {
            command: command.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            v: merged.v.ok_or_else(|| missing("v"))?,
            z0: merged.z0.ok_or_else(|| missing("z0"))?,
            kappa,
            seed,
            replicates: merged.replicates.unwrap_or(200),
            n_offset: merged.n_offset.unwrap_or(0),
            kappa_list,
            tol,
            figure_id: figure.map(|f| f.label().to_owned()),
            steps: merged.steps.unwrap_or(kappa),
            mode,
            out: env_out.or(merged.out).unwrap_or_else(|| PathBuf::from(".")),
            format,
            threads: merged.threads.unwrap_or(0),
        })
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        validate(&RawParams {
            kappa: self.kappa,
            v: self.v.clone(),
            z0: self.z0.clone(),
            seed: self.seed,
        })
        .map_err(CliError::from)
    }

    pub fn figure(&self) -> Option<FigureId> {
        self.figure_id.as_deref().and_then(|s| s.parse().ok())
    }

    pub fn sim_mode(&self) -> SimMode {
        self.mode.parse().expect("validated during resolution")
    }

    pub fn manifest(&self, outputs: &[String]) -> String {
        #[derive(Serialize)]
        struct Manifest<'a> {
            outputs: &'a [String],
            #[serde(flatten)]
            config: &'a RunConfig,
        }
        toml::to_string(&Manifest {
            outputs,
            config: self,
        })
        .expect("manifest serializes")
    }
}
