// Copyright 2026 The qnn-phase Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("basis index {0} out of range 0..4")]
    BasisIndex(usize),

    #[error("integration diverged at step {step}: norm/trace drift {drift:e}")]
    IntegrationDiverged { step: usize, drift: f64 },

    #[error("amplitudes not normalized: sum of squares is {0}")]
    NotNormalized(f64),

    #[error("probability {0} outside [0, 1]")]
    ProbabilityRange(f64),

    #[error("sample rejected: target {0} outside [0, 1]")]
    RejectedSample(f64),

    #[error("sampler for {kind} rejected {rejected} of {drawn} draws")]
    RejectionRate {
        kind: String,
        rejected: usize,
        drawn: usize,
    },

    #[error("training diverged at epoch {epoch}, pair {pair}")]
    TrainingDiverged { epoch: usize, pair: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
