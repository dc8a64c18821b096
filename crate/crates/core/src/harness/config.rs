// Copyright 2026 The qnn-phase Authors
// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! dt = 0.05
//! t_f = 190
//! learning_rate = 0.125
//! ```
//!
//! Unknown keys, duplicate keys and malformed values are errors carrying the
//! line number. Every key is optional.

use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use crate::dynamics::{ControlVector, DEFAULT_DT, DEFAULT_T_FINAL};
use crate::error::{Error, Result};
use crate::learning::TrainConfig;

pub const DEFAULT_TEST_COUNT: usize = 550;
pub const DEFAULT_SEED: u64 = 2013;
pub const DEFAULT_GRADCHECK_SAMPLES: usize = 100;
pub const DEFAULT_GRADCHECK_H: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Integration step, ns.
    pub dt: f64,
    /// Evolution time, ns. Must be an integer multiple of `dt`.
    pub t_f: f64,
    pub learning_rate: f64,
    pub epochs: NonZeroUsize,
    /// Starting constants for the five waveforms, rad/ns.
    pub initial: ControlVector,
    /// Random test states per phase set, split over its three families.
    pub test_count: usize,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub gradcheck_samples: usize,
    pub gradcheck_h: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        Self {
            dt: DEFAULT_DT,
            t_f: DEFAULT_T_FINAL,
            learning_rate: train.learning_rate,
            epochs: train.epochs,
            initial: train.initial,
            test_count: DEFAULT_TEST_COUNT,
            out_dir: PathBuf::from("out"),
            seed: DEFAULT_SEED,
            gradcheck_samples: DEFAULT_GRADCHECK_SAMPLES,
            gradcheck_h: DEFAULT_GRADCHECK_H,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            path: path.to_owned(),
            line: 0,
            msg: format!("cannot read config: {e}"),
        })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |msg: String| Error::Parse {
                path: path.to_owned(),
                line,
                msg,
            };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            seen.push(key.to_owned());

            let float = || {
                value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(format!("`{key}` expects a number, got `{value}`")))
            };
            let uint = || {
                value.parse::<u64>().map_err(|_| {
                    err(format!(
                        "`{key}` expects a nonnegative integer, got `{value}`"
                    ))
                })
            };
            match key {
                "dt" => cfg.dt = float()?,
                "t_f" => cfg.t_f = float()?,
                "learning_rate" => cfg.learning_rate = float()?,
                "epochs" => {
                    cfg.epochs = NonZeroUsize::new(uint()? as usize)
                        .ok_or_else(|| err("`epochs` must be at least 1".into()))?
                }
                "k_a0" => cfg.initial.k_a = float()?,
                "k_b0" => cfg.initial.k_b = float()?,
                "eps_a0" => cfg.initial.eps_a = float()?,
                "eps_b0" => cfg.initial.eps_b = float()?,
                "zeta0" => cfg.initial.zeta = float()?,
                "test_count" => cfg.test_count = uint()? as usize,
                "out" => cfg.out_dir = PathBuf::from(value),
                "seed" => cfg.seed = uint()?,
                "gradcheck_samples" => cfg.gradcheck_samples = uint()? as usize,
                "gradcheck_h" => cfg.gradcheck_h = float()?,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Number of integration steps, `t_f / dt`.
    pub fn n_steps(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !(self.t_f > 0.0) {
            return Err(Error::InvalidConfig("dt and t_f must be positive".into()));
        }
        let n = (self.t_f / self.dt).round();
        if n < 1.0 || (n * self.dt - self.t_f).abs() > 1e-9 * self.t_f {
            return Err(Error::InvalidConfig(format!(
                "t_f = {} is not an integer multiple of dt = {}",
                self.t_f, self.dt
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.n_steps()?;
        self.train_config()?.validate()?;
        if self.test_count == 0 {
            return Err(Error::InvalidConfig("test_count must be positive".into()));
        }
        if !(self.gradcheck_h > 0.0) {
            return Err(Error::InvalidConfig("gradcheck_h must be positive".into()));
        }
        Ok(())
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        Ok(TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            dt: self.dt,
            n_steps: self.n_steps()?,
            initial: self.initial,
        })
    }
}
