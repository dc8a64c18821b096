// Copyright 2026 The qnn-phase Authors
// SPDX-License-Identifier: Apache-2.0

//! Waveform files.
//!
//! ```text
//! # qnn-waveforms v1, dt=0.05, n_steps=3800, units=rad/ns
//! step,t_start,K_A,K_B,eps_A,eps_B,zeta
//! 0,0.0000000000000000e0,1.5707963267948967e-2,...
//! ```
//!
//! Values carry 17 significant digits, so a write/read cycle is lossless.

use std::path::Path;

use crate::dynamics::{Control, ControlWaveforms};
use crate::error::{Error, Result};

pub const COLUMNS: &str = "step,t_start,K_A,K_B,eps_A,eps_B,zeta";

pub fn header_line(dt: f64, n_steps: usize) -> String {
    format!("# qnn-waveforms v1, dt={dt}, n_steps={n_steps}, units=rad/ns")
}

pub fn format_waveforms(w: &ControlWaveforms) -> String {
    let mut out = String::with_capacity(w.n_steps() * 140);
    out.push_str(&header_line(w.dt(), w.n_steps()));
    out.push('\n');
    out.push_str(COLUMNS);
    out.push('\n');
    for k in 0..w.n_steps() {
        out.push_str(&format!("{k},{:.16e}", k as f64 * w.dt()));
        for v in w.at(k).to_array() {
            out.push_str(&format!(",{v:.16e}"));
        }
        out.push('\n');
    }
    out
}

fn parse_header(line: &str) -> Option<(f64, usize)> {
    let rest = line.strip_prefix("# qnn-waveforms v1, dt=")?;
    let (dt, rest) = rest.split_once(", n_steps=")?;
    let n = rest.strip_suffix(", units=rad/ns")?;
    Some((dt.parse().ok()?, n.parse().ok()?))
}

pub fn parse_waveforms(text: &str, path: &Path) -> Result<ControlWaveforms> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_owned(),
        line,
        msg,
    };
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| err(1, "empty waveform file".into()))?;
    let (dt, n_steps) = parse_header(header.trim_end())
        .ok_or_else(|| err(1, format!("bad waveform header `{header}`")))?;
    if header.trim_end() != header_line(dt, n_steps) {
        return Err(err(1, format!("non-canonical waveform header `{header}`")));
    }
    match lines.next() {
        Some(c) if c.trim_end() == COLUMNS => {}
        other => {
            return Err(err(
                2,
                format!(
                    "expected column line `{COLUMNS}`, got `{}`",
                    other.unwrap_or("")
                ),
            ))
        }
    }

    let mut series: [Vec<f64>; 5] = std::array::from_fn(|_| Vec::with_capacity(n_steps));
    let mut rows = 0usize;
    for (i, row) in lines.enumerate() {
        let line = i + 3;
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(err(
                line,
                format!("expected 7 fields, got {}", fields.len()),
            ));
        }
        match fields[0].parse::<usize>() {
            Ok(k) if k == rows => {}
            _ => {
                return Err(err(
                    line,
                    format!("expected step {rows}, got `{}`", fields[0]),
                ))
            }
        }
        for (c, field) in Control::ALL.into_iter().zip(&fields[2..]) {
            let v: f64 = field
                .parse()
                .map_err(|_| err(line, format!("bad {} value `{field}`", c.name())))?;
            series[c.index()].push(v);
        }
        rows += 1;
    }
    if rows != n_steps {
        return Err(err(
            0,
            format!("header declares {n_steps} steps but file has {rows} rows"),
        ));
    }
    ControlWaveforms::new(dt, series).map_err(|e| err(0, e.to_string()))
}

pub fn read_waveforms(path: &Path) -> Result<ControlWaveforms> {
    let text = std::fs::read_to_string(path)?;
    parse_waveforms(&text, path)
}

pub fn write_waveforms(path: &Path, w: &ControlWaveforms) -> Result<()> {
    super::write_atomic(path, &format_waveforms(w))
}
