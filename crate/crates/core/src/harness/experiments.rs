// Copyright 2026 The qnn-phase Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{Control, ControlWaveforms};
use crate::error::{Error, Result};
use crate::harness::{waveio, write_atomic, ExperimentConfig};
use crate::learning::{evaluate, fd_gradient, gradient, train, RunReport, TrainingPair};
use crate::statesgen::{
    build_training_set, phase_set_samples, sample_family, to_training_pair, training_phase,
    StateFamily,
};
use crate::targets::{hadamard_parity_probe, parity_closed_form, FamilyKind, PhaseSet};

pub const WAVEFORMS_FILE: &str = "waveforms.csv";
pub const EPOCHS_FILE: &str = "epochs.csv";
pub const TRAIN_PAIRS_FILE: &str = "train_pairs.csv";

pub fn test_file_name(set: PhaseSet) -> String {
    format!("test_{set}.csv")
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub report: RunReport,
    pub waveforms_path: PathBuf,
    pub epochs_path: PathBuf,
    pub pairs_path: PathBuf,
}

/// Trains on the 11 equal-amplitude Bell pairs and writes the waveforms, the
/// per-epoch error curve and the final per-pair results into `cfg.out_dir`.
/// Nothing is written unless training succeeds.
pub fn run_train(cfg: &ExperimentConfig) -> Result<TrainOutcome> {
    let pairs = build_training_set();
    let report = train(&pairs, &cfg.train_config()?)?;

    let mut epochs = String::from("epoch,mean_rms\n");
    for (i, rms) in report.epoch_rms.iter().enumerate() {
        writeln!(epochs, "{},{rms}", i + 1).unwrap();
    }
    let mut per_pair = String::from("n,phi,target,output,abs_error\n");
    for (i, r) in report.final_pairs.iter().enumerate() {
        writeln!(
            per_pair,
            "{},{},{},{},{}",
            i + 1,
            training_phase(i + 1),
            r.target,
            r.output,
            r.error
        )
        .unwrap();
    }

    std::fs::create_dir_all(&cfg.out_dir)?;
    let waveforms_path = cfg.out_dir.join(WAVEFORMS_FILE);
    let epochs_path = cfg.out_dir.join(EPOCHS_FILE);
    let pairs_path = cfg.out_dir.join(TRAIN_PAIRS_FILE);
    waveio::write_waveforms(&waveforms_path, &report.waveforms)?;
    write_atomic(&epochs_path, &epochs)?;
    write_atomic(&pairs_path, &per_pair)?;
    Ok(TrainOutcome {
        report,
        waveforms_path,
        epochs_path,
        pairs_path,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestRow {
    pub family: StateFamily,
    pub target: f64,
    pub output: f64,
    pub abs_error: f64,
}

#[derive(Debug)]
pub struct TestOutcome {
    pub set: PhaseSet,
    pub rows: Vec<TestRow>,
    pub mean_rms: f64,
    pub per_family: Vec<(FamilyKind, f64)>,
    pub csv_path: PathBuf,
}

/// Random test pairs for `set`, in family order.
pub fn test_pairs(
    set: PhaseSet,
    seed: u64,
    total: usize,
) -> Result<Vec<(StateFamily, TrainingPair)>> {
    phase_set_samples(set, seed, total)?
        .into_iter()
        .map(|f| Ok((f, to_training_pair(&f)?)))
        .collect()
}

/// Evaluates stored waveforms, without further training, on random members
/// of the three families of `set`.
pub fn run_test(waveforms: &Path, set: PhaseSet, cfg: &ExperimentConfig) -> Result<TestOutcome> {
    let w = waveio::read_waveforms(waveforms)?;
    let (families, pairs): (Vec<_>, Vec<_>) = test_pairs(set, cfg.seed, cfg.test_count)?
        .into_iter()
        .unzip();
    let eval = evaluate(&pairs, &w)?;

    let rows: Vec<TestRow> = families
        .into_iter()
        .zip(&eval.pairs)
        .map(|(family, r)| TestRow {
            family,
            target: r.target,
            output: r.output,
            abs_error: r.error,
        })
        .collect();
    let per_family = set
        .families()
        .into_iter()
        .map(|kind| {
            let errs: Vec<f64> = rows
                .iter()
                .filter(|r| r.family.kind == kind)
                .map(|r| r.abs_error)
                .collect();
            (kind, errs.iter().sum::<f64>() / errs.len().max(1) as f64)
        })
        .collect();

    let mut csv = String::from("family,a00,a01,a10,a11,phase,target,output,abs_error\n");
    for r in &rows {
        let [a00, a01, a10, a11] = r.family.magnitudes;
        writeln!(
            csv,
            "{},{a00},{a01},{a10},{a11},{},{},{},{}",
            r.family.kind, r.family.phase, r.target, r.output, r.abs_error
        )
        .unwrap();
    }
    writeln!(csv, "# mean_rms,{}", eval.mean_rms).unwrap();

    std::fs::create_dir_all(&cfg.out_dir)?;
    let csv_path = cfg.out_dir.join(test_file_name(set));
    write_atomic(&csv_path, &csv)?;
    Ok(TestOutcome {
        set,
        rows,
        mean_rms: eval.mean_rms,
        per_family,
        csv_path,
    })
}

/// Absolute differences below this count as exact agreement.
pub const GRADCHECK_ABS_FLOOR: f64 = 1e-10;
pub const GRADCHECK_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GradcheckSample {
    pub family: FamilyKind,
    pub step: usize,
    pub control: Control,
    pub analytic: f64,
    pub finite_difference: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone)]
pub struct GradcheckReport {
    pub h: f64,
    pub samples: Vec<GradcheckSample>,
    pub max_rel_error: f64,
}

impl GradcheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error < GRADCHECK_THRESHOLD
    }
}

pub fn relative_error(analytic: f64, fd: f64) -> f64 {
    let diff = (analytic - fd).abs();
    if diff <= GRADCHECK_ABS_FLOOR {
        0.0
    } else {
        diff / analytic.abs().max(fd.abs())
    }
}

/// Smoothly varying random controls around the configured starting values.
pub fn random_waveforms(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<ControlWaveforms> {
    let n = cfg.n_steps()?;
    let base = cfg.initial.to_array();
    let series = std::array::from_fn(|c| {
        let amp: f64 = rng.random_range(0.005..0.03);
        let freq: f64 = rng.random_range(0.01..0.2);
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        (0..n)
            .map(|k| base[c] + amp * (freq * k as f64 * cfg.dt + phase).sin())
            .collect()
    });
    ControlWaveforms::new(cfg.dt, series)
}

/// Compares analytic gradients with central differences at
/// `cfg.gradcheck_samples` random (pair, step, control) coordinates.
pub fn run_gradcheck(cfg: &ExperimentConfig) -> Result<GradcheckReport> {
    if cfg.gradcheck_samples == 0 {
        return Err(Error::InvalidConfig(
            "gradcheck_samples must be positive".into(),
        ));
    }
    let h = cfg.gradcheck_h;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let w = random_waveforms(cfg, &mut rng)?;

    // One random member of each family.
    let mut pairs = Vec::with_capacity(FamilyKind::ALL.len());
    for kind in FamilyKind::ALL {
        let fam = sample_family(kind, rng.random(), 1)?[0];
        pairs.push((kind, to_training_pair(&fam)?));
    }
    let grads = pairs
        .par_iter()
        .map(|(_, p)| gradient(p, &w))
        .collect::<Result<Vec<_>>>()?;

    let coords: Vec<(usize, usize, Control)> = (0..cfg.gradcheck_samples)
        .map(|i| {
            (
                i % pairs.len(),
                rng.random_range(0..w.n_steps()),
                Control::ALL[rng.random_range(0..Control::ALL.len())],
            )
        })
        .collect();
    let samples = coords
        .par_iter()
        .map(|&(pi, step, control)| {
            let (family, pair) = &pairs[pi];
            let fd = fd_gradient(pair, &w, step, control, h)?;
            let analytic = grads[pi].series(control)[step];
            Ok(GradcheckSample {
                family: *family,
                step,
                control,
                analytic,
                finite_difference: fd,
                rel_error: relative_error(analytic, fd),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_rel_error = samples.iter().map(|s| s.rel_error).fold(0.0, f64::max);
    Ok(GradcheckReport {
        h,
        samples,
        max_rel_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport {
    pub circuit: f64,
    pub closed_form: f64,
}

impl ProbeReport {
    pub fn difference(&self) -> f64 {
        (self.circuit - self.closed_form).abs()
    }

    pub fn agrees(&self) -> bool {
        self.difference() < 1e-12
    }
}

pub fn probe(p: f64, phi: f64) -> Result<ProbeReport> {
    Ok(ProbeReport {
        circuit: hadamard_parity_probe(p, phi)?,
        closed_form: parity_closed_form(p, phi)?,
    })
}
