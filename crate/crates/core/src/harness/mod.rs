// Copyright 2026 The qnn-phase Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment recipes, configuration and file formats behind the CLI.

pub mod config;
pub mod experiments;
pub mod waveio;

use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub use config::ExperimentConfig;
pub use experiments::{
    probe, random_waveforms, run_gradcheck, run_test, run_train, GradcheckReport, ProbeReport,
    TestOutcome, TrainOutcome,
};

/// Writes `contents` to a temporary file beside `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
