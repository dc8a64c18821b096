// Copyright 2026 The qnn-phase Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense linear algebra on the two-qubit Hilbert space.
//!
//! Basis ordering is `|00>, |01>, |10>, |11>` (indices 0..4), i.e. the
//! lexicographic order of `A ⊗ B`. `σz|0> = +|0>`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Raw amplitude vector, not necessarily normalized.
pub type Amplitudes = [Complex; 4];

pub const DIM: usize = 4;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

pub fn norm_sqr(v: &Amplitudes) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// A pure two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumState {
    amps: Amplitudes,
}

impl QuantumState {
    /// Normalizes `amps` to unit norm.
    pub fn normalized(amps: Amplitudes) -> Result<Self> {
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let n = norm_sqr(&amps).sqrt();
        if n == 0.0 {
            return Err(Error::InvalidState("all amplitudes are zero".into()));
        }
        Ok(Self {
            amps: amps.map(|a| a / n),
        })
    }

    /// Wraps amplitudes already known to be (numerically) normalized.
    pub(crate) fn from_normalized(amps: Amplitudes) -> Self {
        Self { amps }
    }

    pub fn basis(index: usize) -> Result<Self> {
        if index >= DIM {
            return Err(Error::BasisIndex(index));
        }
        let mut amps = [ZERO; DIM];
        amps[index] = ONE;
        Ok(Self { amps })
    }

    pub fn amplitudes(&self) -> &Amplitudes {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }
}

/// Builds `a00|00> + a01 e^{iξ}|01> + a10 e^{iθ}|10> + a11 e^{iφ}|11>`,
/// normalized. `phases` is `[ξ, θ, φ]`; the `|00>` coefficient stays real.
pub fn make_state(magnitudes: [f64; 4], phases: [f64; 3]) -> Result<QuantumState> {
    if magnitudes.iter().any(|m| !m.is_finite() || *m < 0.0) {
        return Err(Error::InvalidState(
            "magnitudes must be finite and nonnegative".into(),
        ));
    }
    if phases.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidState("phases must be finite".into()));
    }
    let amps = [
        Complex::new(magnitudes[0], 0.0),
        Complex::from_polar(magnitudes[1], phases[0]),
        Complex::from_polar(magnitudes[2], phases[1]),
        Complex::from_polar(magnitudes[3], phases[2]),
    ];
    QuantumState::normalized(amps)
}

/// `|<basis_index|ψ>|²`.
pub fn projection_probability(state: &QuantumState, basis_index: usize) -> Result<f64> {
    state
        .amps
        .get(basis_index)
        .map(|a| a.norm_sqr())
        .ok_or(Error::BasisIndex(basis_index))
}

pub fn global_phase(state: &QuantumState, alpha: f64) -> QuantumState {
    let f = Complex::from_polar(1.0, alpha);
    QuantumState {
        amps: state.amps.map(|a| a * f),
    }
}

/// Dense 4×4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator4 {
    pub entries: [[Complex; 4]; 4],
}

impl Operator4 {
    pub const fn zero() -> Self {
        Self {
            entries: [[ZERO; 4]; 4],
        }
    }

    pub fn identity() -> Self {
        Self::diagonal([ONE; 4])
    }

    pub fn diagonal(d: [Complex; 4]) -> Self {
        let mut m = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            m.entries[i][i] = v;
        }
        m
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Self {
        Self {
            entries: rows.map(|r| r.map(|x| Complex::new(x, 0.0))),
        }
    }

    /// Kronecker product of two 2×2 matrices, `a ⊗ b`.
    pub fn kron(a: &[[Complex; 2]; 2], b: &[[Complex; 2]; 2]) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.entries[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
            }
        }
        m
    }

    #[inline]
    pub fn apply(&self, v: &Amplitudes) -> Amplitudes {
        let mut out = [ZERO; 4];
        for (o, row) in out.iter_mut().zip(&self.entries) {
            *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.entries[i][j] = self.entries[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self {
            entries: self.entries.map(|r| r.map(|x| x * s)),
        }
    }

    pub fn trace(&self) -> Complex {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }

    /// `‖M − M†‖_max`.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }
}

impl Index<(usize, usize)> for Operator4 {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.entries[i][j]
    }
}

impl IndexMut<(usize, usize)> for Operator4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.entries[i][j]
    }
}

impl Add for Operator4 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.entries[i][j] += rhs.entries[i][j];
            }
        }
        self
    }
}

impl Sub for Operator4 {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.entries[i][j] -= rhs.entries[i][j];
            }
        }
        self
    }
}

impl Mul for Operator4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.entries[i][j] = (0..4).map(|k| self.entries[i][k] * rhs.entries[k][j]).sum();
            }
        }
        m
    }
}

/// The five operator terms of the control Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    /// σx ⊗ I
    XA,
    /// I ⊗ σx
    XB,
    /// σz ⊗ I
    ZA,
    /// I ⊗ σz
    ZB,
    /// σz ⊗ σz
    ZAZB,
}

impl Pauli {
    pub const ALL: [Pauli; 5] = [Pauli::XA, Pauli::XB, Pauli::ZA, Pauli::ZB, Pauli::ZAZB];
}

const SX: [[Complex; 2]; 2] = [[ZERO, ONE], [ONE, ZERO]];
const SZ: [[Complex; 2]; 2] = [[ONE, ZERO], [ZERO, Complex::new(-1.0, 0.0)]];
const ID2: [[Complex; 2]; 2] = [[ONE, ZERO], [ZERO, ONE]];

pub fn pauli_operator(which: Pauli) -> Operator4 {
    match which {
        Pauli::XA => Operator4::kron(&SX, &ID2),
        Pauli::XB => Operator4::kron(&ID2, &SX),
        Pauli::ZA => Operator4::kron(&SZ, &ID2),
        Pauli::ZB => Operator4::kron(&ID2, &SZ),
        Pauli::ZAZB => Operator4::kron(&SZ, &SZ),
    }
}

/// Density matrix `ρ`. Constructed only through checked paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Operator4);

impl DensityMatrix {
    /// Accepts `m` if Hermitian and unit-trace within `tol`.
    pub fn new(m: Operator4, tol: f64) -> Result<Self> {
        if m.hermiticity_error() > tol {
            return Err(Error::InvalidState(
                "density matrix is not Hermitian".into(),
            ));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("density matrix trace is {tr}")));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_operator_unchecked(m: Operator4) -> Self {
        Self(m)
    }

    pub fn operator(&self) -> &Operator4 {
        &self.0
    }

    pub fn trace(&self) -> Complex {
        self.0.trace()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }
}

/// `|ψ><ψ|`.
pub fn pure_density(state: &QuantumState) -> DensityMatrix {
    let mut m = Operator4::zero();
    for i in 0..4 {
        for j in 0..4 {
            m.entries[i][j] = state.amps[i] * state.amps[j].conj();
        }
    }
    DensityMatrix(m)
}
