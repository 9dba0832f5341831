//! Experiment configuration: a TOML file merged with command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Settings shared by all subcommands. Every field is optional so a config
/// file can supply what the flags leave out.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    /// Space family: sphere, real-projective, complex-projective, quaternionic-projective, cayley.
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// Real dimension of the space.
    #[arg(long, global = true)]
    pub dim: Option<u32>,
    /// Number of spectral coefficients N.
    #[arg(long = "N", global = true)]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Comma-separated list of N values.
    #[arg(long = "N-list", global = true, value_delimiter = ',')]
    #[serde(rename = "N-list")]
    pub n_list: Option<Vec<usize>>,
    /// Phase: schrodinger, fractional:<a>, boussinesq, beam, custom:<file.csv>.
    #[arg(long, global = true)]
    pub phase: Option<String>,
    /// Comma-separated Sobolev exponents.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Option<Vec<f64>>,
    /// Comma-separated Lebesgue exponents (`inf` allowed).
    #[arg(long, global = true, value_delimiter = ',')]
    pub p_norms: Option<Vec<String>>,
    /// Width parameter of the congruence set E_N.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Number of sampled times in [0, 2 pi).
    #[arg(long, global = true)]
    pub t_grid: Option<usize>,
    /// Minimum number of angular quadrature nodes.
    #[arg(long, global = true)]
    pub theta_nodes: Option<usize>,
    /// Sample angles per congruence interval.
    #[arg(long, global = true)]
    pub samples_per_interval: Option<usize>,
    /// Seed of the random coefficient generator.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Comma-separated evaluation times (propagate).
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub times: Option<Vec<f64>>,
    /// Coefficient CSV with columns n,re,im (propagate, maximal-scan).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Frequency scale s (strichartz).
    #[arg(long, global = true)]
    pub s: Option<u64>,
    /// Eigenvalue shift ell (strichartz).
    #[arg(long, global = true)]
    pub ell: Option<u64>,
    /// Compare the quadrature and counting L6 norms (strichartz).
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub check_modes: Option<bool>,
    /// Table length for arithmetic functions (nt).
    #[arg(long, global = true)]
    pub limit: Option<u64>,
    /// Largest odd modulus in the Gauss-sum comparison (nt).
    #[arg(long, global = true)]
    pub q_max: Option<u64>,
    /// Smallest dyadic index m (transfer).
    #[arg(long, global = true)]
    pub m_min: Option<u32>,
    /// Largest dyadic index m (transfer).
    #[arg(long, global = true)]
    pub m_max: Option<u32>,
    /// Sobolev gap between the two exponents (transfer).
    #[arg(long, global = true)]
    pub gap: Option<f64>,
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($field:ident),*) => {
        ExperimentConfig { $($field: $flags.$field.or($file.$field)),* }
    };
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Fields set in `self` win over those in `file`.
    pub fn over(self, file: ExperimentConfig) -> Self {
        overlay!(
            self, file, space, dim, n, n_list, phase, alpha, p_norms, epsilon, t_grid, theta_nodes,
            samples_per_interval, seed, out_dir, format, times, input, s, ell, check_modes, limit, q_max,
            m_min, m_max, gap
        )
    }
}

/// Configuration with every default applied, echoed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Resolved {
    pub space: String,
    pub dim: u32,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N-list")]
    pub n_list: Vec<usize>,
    pub phase: String,
    pub alpha: Vec<f64>,
    pub p_norms: Vec<String>,
    pub epsilon: f64,
    pub t_grid: Option<usize>,
    pub theta_nodes: Option<usize>,
    pub samples_per_interval: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: Format,
    pub times: Vec<f64>,
    pub input: Option<PathBuf>,
    pub s: u64,
    pub ell: u64,
    pub check_modes: bool,
    pub limit: u64,
    pub q_max: u64,
    pub m_min: u32,
    pub m_max: u32,
    pub gap: f64,
}

impl ExperimentConfig {
    pub fn resolve(self) -> Resolved {
        Resolved {
            space: self.space.unwrap_or_else(|| "sphere".into()),
            dim: self.dim.unwrap_or(2),
            n: self.n.unwrap_or(64),
            n_list: self.n_list.unwrap_or_else(|| vec![256, 512, 1024, 2048, 4096]),
            phase: self.phase.unwrap_or_else(|| "schrodinger".into()),
            alpha: self.alpha.unwrap_or_else(|| vec![0.0, 0.25, 0.5]),
            p_norms: self.p_norms.unwrap_or_else(|| vec!["1".into(), "2".into(), "inf".into()]),
            epsilon: self.epsilon.unwrap_or(0.1),
            t_grid: self.t_grid,
            theta_nodes: self.theta_nodes,
            samples_per_interval: self.samples_per_interval.unwrap_or(1),
            seed: self.seed.unwrap_or(0),
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            format: self.format.unwrap_or(Format::Json),
            times: self.times.unwrap_or_else(|| vec![0.0]),
            input: self.input,
            s: self.s.unwrap_or(1),
            ell: self.ell.unwrap_or(0),
            check_modes: self.check_modes.unwrap_or(false),
            limit: self.limit.unwrap_or(100),
            q_max: self.q_max.unwrap_or(25),
            m_min: self.m_min.unwrap_or(2),
            m_max: self.m_max.unwrap_or(7),
            gap: self.gap.unwrap_or(0.2),
        }
    }
}
