// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A single problem found while reading a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    /// 1-based line number, when the issue is tied to a line.
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {}: {}", line, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-physical parameters: {0}")]
    NonPhysical(String),

    #[error("integrator could not meet tolerance at t = {t}: {reason}")]
    ToleranceNotMet { t: f64, reason: String },

    #[error("excited amplitude vanishes on the whole grid; rates are undefined")]
    AllPointsInvalid,

    #[error("invalid rate points span {len} consecutive grid steps starting at index {start}")]
    RateGapTooWide { start: usize, len: usize },

    #[error("rates are flagged invalid at grid index {0}")]
    InvalidRates(usize),

    #[error("initial state has weight {weight:e} outside the one-excitation sector")]
    SectorLeak { weight: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigenvector matrix is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),

    #[error("jump probability {probability} at step {step} exceeds 0.1; refine the grid")]
    StepTooLarge { step: usize, probability: f64 },

    #[error("time grids do not match")]
    GridMismatch,

    #[error("config errors:\n{}", issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Config { issues: Vec<ConfigIssue> },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParameter(_) => 2,
            Error::NonPhysical(_) | Error::SectorLeak { .. } => 3,
            Error::ToleranceNotMet { .. }
            | Error::IllConditioned(_)
            | Error::AllPointsInvalid
            | Error::RateGapTooWide { .. }
            | Error::InvalidRates(_) => 4,
            Error::StepTooLarge { .. } => 5,
            Error::DimensionMismatch { .. } | Error::GridMismatch => 6,
            Error::Io { .. } => 7,
        }
    }
}
