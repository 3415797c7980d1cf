use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "exclusia", version, about = "Stationary states and algebra checks for open exclusion processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stationary state from the full Markov generator.
    Exact(ExactArgs),
    /// Kinetic Monte Carlo estimate.
    Kmc(KmcArgs),
    /// Matrix-product evaluation.
    Mpa(MpaArgs),
    /// Closed forms of the symmetric chain.
    Ssep(SsepArgs),
    /// Residuals of one relation family on explicit matrices.
    VerifyAlgebra(AlgebraArgs),
    /// Dolan-Grady charges of the symmetric boundary operators.
    Charges(ChargeArgs),
    /// Several methods on the same chain, with their deviations.
    Compare(CompareArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Exact(_) => "exact",
            Command::Kmc(_) => "kmc",
            Command::Mpa(_) => "mpa",
            Command::Ssep(_) => "ssep",
            Command::VerifyAlgebra(_) => "verify-algebra",
            Command::Charges(_) => "charges",
            Command::Compare(_) => "compare",
        }
    }

    pub fn process(&self) -> &ProcessArgs {
        match self {
            Command::Exact(a) => &a.process,
            Command::Kmc(a) => &a.process,
            Command::Mpa(a) => &a.process,
            Command::Ssep(a) => &a.process,
            Command::VerifyAlgebra(a) => &a.process,
            Command::Charges(a) => &a.process,
            Command::Compare(a) => &a.process,
        }
    }

    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Exact(a) => &a.output,
            Command::Kmc(a) => &a.output,
            Command::Mpa(a) => &a.output,
            Command::Ssep(a) => &a.output,
            Command::VerifyAlgebra(a) => &a.output,
            Command::Charges(a) => &a.output,
            Command::Compare(a) => &a.output,
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct ProcessArgs {
    /// TOML file with default values; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Number of sites.
    #[arg(long = "L", visible_alias = "sites")]
    pub sites: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args, Default)]
pub struct OutputArgs {
    /// Report path; relative paths are taken inside EXCLUSIA_OUT_DIR when set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Default)]
pub struct KmcOptions {
    #[arg(long)]
    pub t_burn: Option<f64>,
    #[arg(long)]
    pub t_measure: Option<f64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct KmcArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub kmc: KmcOptions,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evaluator {
    Auto,
    Truncated,
    Normal,
}

#[derive(Debug, Args, Default)]
pub struct MpaOptions {
    /// Relative convergence tolerance of the truncated representation.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long, value_enum)]
    pub evaluator: Option<Evaluator>,
}

#[derive(Debug, Args)]
pub struct MpaArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub mpa: MpaOptions,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SsepArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constants {
    Derived,
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Adopted,
    Printed,
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    /// Relation family, e.g. AW13, DG38, qSerre27, TASEP85.
    #[arg(long)]
    pub kind: Option<String>,
    /// Spin of the boundary representation.
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    /// Truncation of the infinite-dimensional representations.
    #[arg(long)]
    pub m: Option<usize>,
    /// Parameters of the q = 0 representation.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, value_enum)]
    pub constants: Option<Constants>,
    #[arg(long, value_enum)]
    pub form: Option<Form>,
    /// Largest accepted normalized residual.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ChargeArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub f_star: Option<f64>,
    /// Highest charge index n of Q_2n.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, value_enum)]
    pub constants: Option<Constants>,
    /// Largest accepted commutator residual.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    /// Comma-separated list of exact, mpa, kmc, ssep.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    #[command(flatten)]
    pub mpa: MpaOptions,
    #[command(flatten)]
    pub kmc: KmcOptions,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Values read from `--config`. Keys are the flag names with `_` for `-`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    #[serde(rename = "L", alias = "sites")]
    pub sites: Option<usize>,
    pub tol: Option<f64>,
    pub m_max: Option<usize>,
    pub evaluator: Option<Evaluator>,
    pub t_burn: Option<f64>,
    pub t_measure: Option<f64>,
    pub replicas: Option<usize>,
    pub seed: Option<u64>,
    pub kind: Option<String>,
    pub j: Option<f64>,
    pub x0: Option<f64>,
    pub m: Option<usize>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub constants: Option<Constants>,
    pub form: Option<Form>,
    pub f: Option<f64>,
    pub f_star: Option<f64>,
    pub order: Option<usize>,
    pub methods: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }
}
