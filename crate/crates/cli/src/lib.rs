//! Command-line front end: argument parsing, the computation pipeline and
//! serialization of its results.

pub mod commands;
pub mod fanfile;
pub mod reference;
pub mod render;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use syz_core::refdata::RefError;
use syz_core::toric_cy::FanError;
use thiserror::Error;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "syz",
    version,
    about = "Corrected mirror equations and open invariants of toric Calabi-Yau manifolds"
)]
pub struct Cli {
    /// Truncation order T: series are kept through total degree T.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub cutoff: u32,
    /// Index of the maximal cone used as the base cone.
    #[arg(long, global = true, default_value_t = 0)]
    pub base_cone: usize,
    /// Output format; `json` (alias `structured`) is one document per run.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    #[value(alias = "structured")]
    Json,
    Latex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    /// Area constants kept as symbols `C_i`.
    C,
    /// Area constants absorbed into the Kähler parameters.
    Flat,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check the fan and report its Calabi-Yau structure.
    Validate { fan: PathBuf },
    /// Charge vectors `Q^a`.
    Charges { fan: PathBuf },
    /// The series `f_a` of the single-log periods.
    Periods { fan: PathBuf },
    /// The mirror map `q_a(q̌)`.
    MirrorMap { fan: PathBuf },
    /// The inverse mirror map `q̌_a(q)`.
    Invert { fan: PathBuf },
    /// Open invariants `n_{β+α}` of the compact divisor.
    OpenGw {
        fan: PathBuf,
        /// Use an inverse map written by `invert --format json` instead of recomputing it.
        #[arg(long)]
        inverse: Option<PathBuf>,
    },
    /// The corrected mirror equation `uv = G(z)`.
    MirrorEq {
        fan: PathBuf,
        #[arg(long, value_enum, default_value_t = FormArg::Flat)]
        form: FormArg,
    },
    /// Strata of the discriminant locus.
    Discriminant { fan: PathBuf },
    /// Compare computed data with a bundled reference record.
    Verify {
        /// Bundled example: kp1, conifold, kp2 or kp1xp1.
        #[arg(long)]
        example: String,
        /// Compare coefficients through this total degree.
        #[arg(long)]
        order: u32,
        /// Reference record in the format written by `export-ref`.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Write a bundled reference record as JSON.
    ExportRef {
        /// Bundled example: kp1, conifold, kp2 or kp1xp1.
        #[arg(long)]
        example: String,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid fan: {0}")]
    Fan(#[from] FanError),
    #[error("computation failed: {0}")]
    Computation(String),
    #[error("{0}")]
    UnknownExample(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io { .. } => exit::IO,
            CliError::Parse(_) => exit::PARSE,
            CliError::Fan(_) => exit::FAN,
            CliError::Computation(_) => exit::COMPUTATION,
            CliError::UnknownExample(_) => exit::UNKNOWN_EXAMPLE,
        }
    }
}

impl From<syz_core::Error> for CliError {
    fn from(e: syz_core::Error) -> Self {
        match e {
            syz_core::Error::Fan(f) => CliError::Fan(f),
            syz_core::Error::Reference(r) => r.into(),
            other => CliError::Computation(other.to_string()),
        }
    }
}

impl From<RefError> for CliError {
    fn from(e: RefError) -> Self {
        match e {
            RefError::UnknownExample(_) => CliError::UnknownExample(e.to_string()),
            other => CliError::Computation(other.to_string()),
        }
    }
}

macro_rules! computation_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::from(syz_core::Error::from(e))
            }
        })*
    };
}

computation_error!(
    syz_core::periods::PeriodError,
    syz_core::flat_coords::FlatError,
    syz_core::disk_topology::DiskError,
    syz_series::SeriesError
);

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const MISMATCH: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const PARSE: i32 = 4;
    pub const FAN: i32 = 5;
    pub const COMPUTATION: i32 = 6;
    pub const UNKNOWN_EXAMPLE: i32 = 7;
}

/// Standard output of a run and its exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output {
            stdout,
            code: exit::OK,
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    commands::dispatch(cli)
}
