use crate::Failure;
use clap::{Args, ValueEnum};
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Structured,
}

/// Options shared by every subcommand. Each may also come from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Graph description file
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// JSON file with default values for any of these options; flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k_max: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k_min: Option<f64>,
    #[arg(long, global = true)]
    pub count: Option<usize>,
    /// Output file; standard output when absent
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub rank_tol: Option<f64>,
    #[arg(long, global = true)]
    pub newton_tol: Option<f64>,
    #[arg(long, global = true)]
    pub gen_threshold: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Mesh step of the finite-difference oracle, or the length increment
    /// of the Hadamard difference quotient
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Reserved; no command uses randomness
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// 1-based level, counting the zero-energy state first when present
    #[arg(long, global = true)]
    pub index: Option<usize>,
    /// 1-based member of an orthonormal eigenbasis
    #[arg(long, global = true)]
    pub member: Option<usize>,
    /// 1-based edge
    #[arg(long, global = true)]
    pub edge: Option<usize>,
    /// 1-based vertex
    #[arg(long, global = true)]
    pub vertex: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    graph: Option<PathBuf>,
    k_max: Option<f64>,
    k_min: Option<f64>,
    count: Option<usize>,
    output: Option<PathBuf>,
    format: Option<Format>,
    rank_tol: Option<f64>,
    newton_tol: Option<f64>,
    gen_threshold: Option<f64>,
    samples: Option<usize>,
    h: Option<f64>,
    seed: Option<u64>,
    index: Option<usize>,
    member: Option<usize>,
    edge: Option<usize>,
    vertex: Option<usize>,
    lambda: Option<f64>,
    n_max: Option<usize>,
}

impl Options {
    /// Fill unset flags from the config file, then check tolerances.
    pub fn resolve(mut self) -> Result<Self, Failure> {
        if let Some(path) = self.config.clone() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::io(format!("cannot read config {}: {e}", path.display())))?;
            let file: FileConfig = serde_json::from_str(&text)
                .map_err(|e| Failure::io(format!("config {}: {e}", path.display())))?;
            macro_rules! fill {
                ($($f:ident),*) => { $( if self.$f.is_none() { self.$f = file.$f; } )* };
            }
            fill!(
                graph, k_max, k_min, count, output, format, rank_tol, newton_tol, gen_threshold, samples, h, seed,
                index, member, edge, vertex, lambda, n_max
            );
        }
        for (name, v) in [
            ("rank-tol", self.rank_tol),
            ("newton-tol", self.newton_tol),
            ("gen-threshold", self.gen_threshold),
            ("h", self.h),
        ] {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(Failure::usage(format!("--{name} must be positive, got {x}")));
                }
            }
        }
        Ok(self)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    pub fn k_max(&self) -> Result<f64, Failure> {
        let k = self.k_max.ok_or_else(|| Failure::usage("--k-max is required"))?;
        if !(k > 0.0 && k.is_finite()) {
            return Err(Failure::usage(format!("--k-max must be positive, got {k}")));
        }
        Ok(k)
    }

    pub fn positive(name: &str, value: Option<usize>, default: usize) -> Result<usize, Failure> {
        match value.unwrap_or(default) {
            0 => Err(Failure::usage(format!("--{name} must be at least 1"))),
            n => Ok(n),
        }
    }
}
