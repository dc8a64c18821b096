// Copyright 2026 The qnn-phase Authors
// SPDX-License-Identifier: Apache-2.0

//! Target functions for every input-state family and the Hadamard parity
//! probe.
//!
//! Targets take real magnitudes `a_ij ≥ 0` and the relative phase
//! separately. Each has the shape
//!
//! ```text
//! two amplitudes:   2 (1/2 − x²)² y² + 2 x y cos²(α/2)
//! three amplitudes: 2 |1/3 − c²| x² y² + 3 |1/3 − x²| c² y² + 2 x y cos²(α/2)
//! ```
//!
//! where `x, y` are the magnitudes of the entangled pair and `c` the
//! contaminant. Which magnitude plays which role differs per family.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qcore::{Complex, Operator4, QuantumState};

const NORM_TOL: f64 = 1e-9;

/// The nine parametric input-state families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `a00|00> + a11 e^{iφ}|11>`
    Bell,
    /// `a00|00> + a01|01> + a11 e^{iφ}|11>`
    Bp1,
    /// `a00|00> + a10|10> + a11 e^{iφ}|11>`
    Bp2,
    /// `a01|01> + a10 e^{iθ}|10>`
    Epr,
    /// `a00|00> + a01|01> + a10 e^{iθ}|10>`
    Ep1,
    /// `a01|01> + a10 e^{iθ}|10> + a11|11>`
    Ep2,
    /// `a01 e^{iξ}|01> + a10|10>`
    Eprx,
    /// `a01 e^{iξ}|01> + a10|10> + a11|11>`
    Ep3,
    /// `a00|00> + a01 e^{iξ}|01> + a10|10>`
    Ep4,
}

/// Which relative phase a family carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseSet {
    /// φ on `|11>`, read out on `|11>`.
    Phi,
    /// θ on `|10>`, read out on `|10>`.
    Theta,
    /// ξ on `|01>`, read out on `|01>`.
    Xi,
}

impl PhaseSet {
    pub const ALL: [PhaseSet; 3] = [PhaseSet::Phi, PhaseSet::Theta, PhaseSet::Xi];

    pub fn measure_index(self) -> usize {
        match self {
            PhaseSet::Phi => 3,
            PhaseSet::Theta => 2,
            PhaseSet::Xi => 1,
        }
    }

    pub fn families(self) -> [FamilyKind; 3] {
        use FamilyKind::*;
        match self {
            PhaseSet::Phi => [Bell, Bp1, Bp2],
            PhaseSet::Theta => [Epr, Ep1, Ep2],
            PhaseSet::Xi => [Eprx, Ep3, Ep4],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PhaseSet::Phi => "phi",
            PhaseSet::Theta => "theta",
            PhaseSet::Xi => "xi",
        }
    }
}

impl fmt::Display for PhaseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhaseSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PhaseSet::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown family set `{s}`")))
    }
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 9] = [
        FamilyKind::Bell,
        FamilyKind::Bp1,
        FamilyKind::Bp2,
        FamilyKind::Epr,
        FamilyKind::Ep1,
        FamilyKind::Ep2,
        FamilyKind::Eprx,
        FamilyKind::Ep3,
        FamilyKind::Ep4,
    ];

    pub fn phase_set(self) -> PhaseSet {
        use FamilyKind::*;
        match self {
            Bell | Bp1 | Bp2 => PhaseSet::Phi,
            Epr | Ep1 | Ep2 => PhaseSet::Theta,
            Eprx | Ep3 | Ep4 => PhaseSet::Xi,
        }
    }

    pub fn measure_index(self) -> usize {
        self.phase_set().measure_index()
    }

    /// Basis indices with nonzero magnitude, ascending.
    pub fn support(self) -> &'static [usize] {
        use FamilyKind::*;
        match self {
            Bell => &[0, 3],
            Bp1 => &[0, 1, 3],
            Bp2 => &[0, 2, 3],
            Epr | Eprx => &[1, 2],
            Ep1 | Ep4 => &[0, 1, 2],
            Ep2 | Ep3 => &[1, 2, 3],
        }
    }

    pub fn name(self) -> &'static str {
        use FamilyKind::*;
        match self {
            Bell => "BELL",
            Bp1 => "BP1",
            Bp2 => "BP2",
            Epr => "EPR",
            Ep1 => "EP1",
            Ep2 => "EP2",
            Eprx => "EPRX",
            Ep3 => "EP3",
            Ep4 => "EP4",
        }
    }

    /// Target for full magnitudes `[a00, a01, a10, a11]` and the family's
    /// phase. Magnitudes outside the family's support must be zero.
    pub fn target(self, a: [f64; 4], phase: f64) -> Result<f64> {
        use FamilyKind::*;
        for (i, m) in a.iter().enumerate() {
            if !self.support().contains(&i) && *m != 0.0 {
                return Err(Error::InvalidState(format!(
                    "{} has no |{:02b}> component",
                    self.name(),
                    i
                )));
            }
        }
        let [a00, a01, a10, a11] = a;
        match self {
            Bell => target_bell(a00, a11, phase),
            Bp1 => target_bp1(a00, a01, a11, phase),
            Bp2 => target_bp2(a00, a10, a11, phase),
            Epr => target_epr(a01, a10, phase),
            Ep1 => target_ep1(a00, a01, a10, phase),
            Ep2 => target_ep2(a01, a10, a11, phase),
            Eprx => target_eprx(a01, a10, phase),
            Ep3 => target_ep3(a01, a10, a11, phase),
            Ep4 => target_ep4(a00, a01, a10, phase),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown state family `{s}`")))
    }
}

/// Family and readout index of one target function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetSpec {
    pub family: FamilyKind,
    pub measure_index: usize,
}

impl From<FamilyKind> for TargetSpec {
    fn from(family: FamilyKind) -> Self {
        Self {
            family,
            measure_index: family.measure_index(),
        }
    }
}

fn check_normalized(mags: &[f64]) -> Result<()> {
    if mags.iter().any(|m| !m.is_finite() || *m < 0.0) {
        return Err(Error::InvalidState(
            "magnitudes must be finite and nonnegative".into(),
        ));
    }
    let s: f64 = mags.iter().map(|m| m * m).sum();
    if (s - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(s));
    }
    Ok(())
}

fn half_angle_cos_sq(phase: f64) -> f64 {
    (phase / 2.0).cos().powi(2)
}

fn two_amplitude(x: f64, y: f64, phase: f64) -> f64 {
    2.0 * (0.5 - x * x).powi(2) * y * y + 2.0 * x * y * half_angle_cos_sq(phase)
}

fn three_amplitude(c: f64, x: f64, y: f64, phase: f64) -> f64 {
    let third = 1.0 / 3.0;
    2.0 * (third - c * c).abs() * x * x * y * y
        + 3.0 * (third - x * x).abs() * c * c * y * y
        + 2.0 * x * y * half_angle_cos_sq(phase)
}

/// `cos²(φ/2)`, the target for equal-amplitude Bell inputs.
pub fn target_equal_bell(phi: f64) -> f64 {
    half_angle_cos_sq(phi)
}

pub fn target_bell(a00: f64, a11: f64, phi: f64) -> Result<f64> {
    check_normalized(&[a00, a11])?;
    Ok(two_amplitude(a00, a11, phi))
}

pub fn target_bp1(a00: f64, a01: f64, a11: f64, phi: f64) -> Result<f64> {
    check_normalized(&[a00, a01, a11])?;
    Ok(three_amplitude(a01, a00, a11, phi))
}

pub fn target_bp2(a00: f64, a10: f64, a11: f64, phi: f64) -> Result<f64> {
    check_normalized(&[a00, a10, a11])?;
    Ok(three_amplitude(a10, a00, a11, phi))
}

pub fn target_epr(a01: f64, a10: f64, theta: f64) -> Result<f64> {
    check_normalized(&[a01, a10])?;
    Ok(two_amplitude(a01, a10, theta))
}

pub fn target_ep1(a00: f64, a01: f64, a10: f64, theta: f64) -> Result<f64> {
    check_normalized(&[a00, a01, a10])?;
    Ok(three_amplitude(a00, a01, a10, theta))
}

pub fn target_ep2(a01: f64, a10: f64, a11: f64, theta: f64) -> Result<f64> {
    check_normalized(&[a01, a10, a11])?;
    Ok(three_amplitude(a11, a01, a10, theta))
}

pub fn target_eprx(a01: f64, a10: f64, xi: f64) -> Result<f64> {
    check_normalized(&[a01, a10])?;
    Ok(two_amplitude(a10, a01, xi))
}

pub fn target_ep3(a01: f64, a10: f64, a11: f64, xi: f64) -> Result<f64> {
    check_normalized(&[a01, a10, a11])?;
    Ok(three_amplitude(a11, a10, a01, xi))
}

pub fn target_ep4(a00: f64, a01: f64, a10: f64, xi: f64) -> Result<f64> {
    check_normalized(&[a00, a01, a10])?;
    Ok(three_amplitude(a00, a10, a01, xi))
}

/// `1/2 + √(p(1−p)) cos φ`.
pub fn parity_closed_form(p: f64, phi: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(0.5 + (p * (1.0 - p)).sqrt() * phi.cos())
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::ProbabilityRange(p))
    }
}

/// Prepares `√p|00> + e^{iφ}√(1−p)|11>`, applies a Hadamard to each qubit
/// and returns the probability of an even number of ones.
pub fn hadamard_parity_probe(p: f64, phi: f64) -> Result<f64> {
    check_probability(p)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = [
        [Complex::new(s, 0.0), Complex::new(s, 0.0)],
        [Complex::new(s, 0.0), Complex::new(-s, 0.0)],
    ];
    let hh = Operator4::kron(&h, &h);
    let zero = Complex::new(0.0, 0.0);
    let input = [
        Complex::new(p.sqrt(), 0.0),
        zero,
        zero,
        Complex::from_polar((1.0 - p).sqrt(), phi),
    ];
    let out = QuantumState::normalized(hh.apply(&input))?;
    let a = out.amplitudes();
    Ok(a[0].norm_sqr() + a[3].norm_sqr())
}
