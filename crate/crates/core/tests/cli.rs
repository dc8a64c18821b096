// Copyright 2026 The qnn-phase Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

use qnn_phase::harness::waveio::header_line;
use qnn_phase::learning::{evaluate, TrainConfig};
use qnn_phase::statesgen::build_training_set;

fn qnn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnn-phase"))
        .args(args)
        .output()
        .expect("spawn qnn-phase")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Trains with `cfg_text` into `dir/out` and returns the output directory.
fn train(dir: &Path, cfg_text: &str) -> PathBuf {
    let cfg = write_config(dir, cfg_text);
    let out = dir.join("out");
    let o = qnn(&["train", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn default_training_writes_ten_epochs() {
    let tmp = TempDir::new().unwrap();
    let out = train(tmp.path(), "# defaults\n");
    let epochs = std::fs::read_to_string(out.join("epochs.csv")).unwrap();
    let lines: Vec<&str> = epochs.lines().collect();
    assert_eq!(lines[0], "epoch,mean_rms");
    assert_eq!(lines.len(), 11);
    let last: f64 = lines[10].split(',').nth(1).unwrap().parse().unwrap();
    assert!(last <= 0.02, "final mean_rms {last}");

    let waves = std::fs::read_to_string(out.join("waveforms.csv")).unwrap();
    let mut wl = waves.lines();
    assert_eq!(wl.next().unwrap(), header_line(0.05, 3800));
    assert_eq!(wl.next().unwrap(), "step,t_start,K_A,K_B,eps_A,eps_B,zeta");
    assert_eq!(wl.count(), 3800);

    let pairs = std::fs::read_to_string(out.join("train_pairs.csv")).unwrap();
    assert_eq!(pairs.lines().count(), 12);
}

#[test]
fn zero_learning_rate_keeps_untrained_error() {
    let tmp = TempDir::new().unwrap();
    let out = train(tmp.path(), "epochs = 1\nlearning_rate = 0\n");
    let epochs = std::fs::read_to_string(out.join("epochs.csv")).unwrap();
    let rms: f64 = epochs
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();

    let w = TrainConfig::default().initial_waveforms().unwrap();
    let untrained = evaluate(&build_training_set(), &w).unwrap().mean_rms;
    assert_eq!(rms, untrained);
}

#[test]
fn missing_config_fails_without_outputs() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = qnn(&[
        "train",
        "--config",
        s(&tmp.path().join("absent.cfg")),
        "--out",
        s(&out),
    ]);
    assert!(!o.status.success());
    assert!(!out.exists());
}

#[test]
fn bad_config_reports_line() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "dt = 0.05\nlearning_rate = quick\n");
    let o = qnn(&[
        "train",
        "--config",
        s(&cfg),
        "--out",
        s(&tmp.path().join("out")),
    ]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("run.cfg:2:"), "{err}");
}

#[test]
fn test_subcommand_is_read_only_and_deterministic() {
    let tmp = TempDir::new().unwrap();
    let out = train(tmp.path(), "epochs = 1\n");
    let waves = out.join("waveforms.csv");
    let before = std::fs::read(&waves).unwrap();

    let run = |dir: &str| {
        let dest = tmp.path().join(dir);
        let o = qnn(&[
            "test",
            "--waveforms",
            s(&waves),
            "--family-set",
            "theta",
            "--seed",
            "7",
            "--out",
            s(&dest),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(dest.join("test_theta.csv")).unwrap()
    };
    let a = run("t1");
    let b = run("t2");
    assert_eq!(a, b);
    assert_eq!(std::fs::read(&waves).unwrap(), before);

    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(
        lines[0],
        "family,a00,a01,a10,a11,phase,target,output,abs_error"
    );
    assert_eq!(lines.len(), 552);
    assert!(lines[551].starts_with("# mean_rms,"));
    for kind in ["EPR", "EP1", "EP2"] {
        assert!(lines[1..551]
            .iter()
            .any(|l| l.starts_with(&format!("{kind},"))));
    }
}

#[test]
fn malformed_waveforms_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let waves = tmp.path().join("w.csv");
    let mut text = header_line(0.05, 3800);
    text.push_str("\nstep,t_start,K_A,K_B,eps_A,eps_B,zeta\n0,0,0,0,0,0,0\n");
    std::fs::write(&waves, text).unwrap();
    let out = tmp.path().join("out");
    let o = qnn(&[
        "test",
        "--waveforms",
        s(&waves),
        "--family-set",
        "phi",
        "--out",
        s(&out),
    ]);
    assert!(!o.status.success());
    assert!(!out.join("test_phi.csv").exists());
}

#[test]
fn gradcheck_passes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "gradcheck_samples = 30\n");
    let o = qnn(&["gradcheck", "--config", s(&cfg)]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("max relative error"));
}

#[test]
fn probe_prints_both_values() {
    let value = |o: &Output, label: &str| -> f64 {
        stdout(o)
            .lines()
            .find_map(|l| l.strip_prefix(label))
            .unwrap()
            .trim()
            .parse()
            .unwrap()
    };
    let o = qnn(&["probe", "0.25", "0"]);
    assert!(o.status.success());
    let want = 0.5 + 3f64.sqrt() / 4.0;
    assert!((value(&o, "circuit") - want).abs() < 1e-12);
    assert!((value(&o, "closed_form") - want).abs() < 1e-15);

    let o = qnn(&["probe", "0.5", "3.141592653589793"]);
    assert!(o.status.success());
    assert!(value(&o, "circuit").abs() < 1e-12);

    let o = qnn(&["probe", "0.5", "-1.2"]);
    assert!(o.status.success());

    let o = qnn(&["probe", "1.5", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
