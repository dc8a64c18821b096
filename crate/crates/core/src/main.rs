// Copyright 2026 The qnn-phase Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qnn_phase::harness::{self, ExperimentConfig};
use qnn_phase::targets::PhaseSet;

#[derive(Parser, Debug)]
#[command(
    name = "qnn-phase",
    version,
    about = "Train and test a two-qubit phase indicator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train on the 11 equal-amplitude Bell pairs.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate trained waveforms on random states of one phase set.
    Test {
        #[arg(long)]
        waveforms: PathBuf,
        #[arg(long, value_parser = ["phi", "theta", "xi"])]
        family_set: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare analytic gradients with central finite differences.
    Gradcheck {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Finite-difference step, rad/ns.
        #[arg(long)]
        h: Option<f64>,
    },
    /// Hadamard parity probe: circuit value against the closed form.
    Probe {
        /// Weight of |00>, in [0, 1].
        #[arg(allow_negative_numbers = true)]
        p: f64,
        /// Relative phase of |11>, radians.
        #[arg(allow_negative_numbers = true)]
        phi: f64,
    },
}

fn load(
    config: Option<&PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
) -> qnn_phase::Result<ExperimentConfig> {
    let mut cfg = match config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = out {
        cfg.out_dir = out;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> qnn_phase::Result<ExitCode> {
    match cli.command {
        Command::Train { config, out, seed } => {
            let cfg = load(config.as_ref(), out, seed)?;
            let outcome = harness::run_train(&cfg)?;
            println!("initial mean_rms {:.6}", outcome.report.initial_rms);
            for (i, rms) in outcome.report.epoch_rms.iter().enumerate() {
                println!("epoch {:>3} mean_rms {rms:.6}", i + 1);
            }
            println!("wrote {}", outcome.waveforms_path.display());
            println!("wrote {}", outcome.epochs_path.display());
            println!("wrote {}", outcome.pairs_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Test {
            waveforms,
            family_set,
            config,
            out,
            seed,
        } => {
            let cfg = load(config.as_ref(), out, seed)?;
            let set: PhaseSet = family_set.parse()?;
            let outcome = harness::run_test(&waveforms, set, &cfg)?;
            for (kind, rms) in &outcome.per_family {
                println!("{kind:<5} mean_rms {rms:.6}");
            }
            println!(
                "{set}: {} states, mean_rms {:.6}",
                outcome.rows.len(),
                outcome.mean_rms
            );
            println!("wrote {}", outcome.csv_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Gradcheck { config, seed, h } => {
            let mut cfg = load(config.as_ref(), None, seed)?;
            if let Some(h) = h {
                cfg.gradcheck_h = h;
                cfg.validate()?;
            }
            let report = harness::run_gradcheck(&cfg)?;
            let worst = report
                .samples
                .iter()
                .max_by(|a, b| a.rel_error.total_cmp(&b.rel_error))
                .expect("at least one sample");
            println!(
                "{} coordinates, h = {:e}: max relative error {:.3e}",
                report.samples.len(),
                report.h,
                report.max_rel_error
            );
            println!(
                "worst: {} {}[{}] analytic {:.9e} fd {:.9e}",
                worst.family,
                worst.control.name(),
                worst.step,
                worst.analytic,
                worst.finite_difference
            );
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Probe { p, phi } => {
            if !(0.0..=1.0).contains(&p) {
                eprintln!("error: p must lie in [0, 1], got {p}");
                return Ok(ExitCode::from(2));
            }
            let r = harness::probe(p, phi)?;
            println!("circuit     {:.15}", r.circuit);
            println!("closed_form {:.15}", r.closed_form);
            println!("difference  {:.3e}", r.difference());
            Ok(if r.agrees() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
