// Copyright 2026 The qnn-phase Authors
// SPDX-License-Identifier: Apache-2.0

//! Hamiltonian assembly and time propagation.
//!
//! Controls are piecewise constant: sample `k` is held over
//! `[k·dt, (k+1)·dt)`, including all four RK4 stages of that step. With that
//! discretization [`expm_step`] is the exact flow and serves as an oracle for
//! [`rk4_step`]; [`propagate_density`] integrates `dρ/dt = −i[H, ρ]` as a
//! second, independent picture.

use nalgebra::{Matrix4, SymmetricEigen};

use crate::error::{Error, Result};
use crate::qcore::{
    norm_sqr, pauli_operator, Amplitudes, Complex, DensityMatrix, Operator4, Pauli, QuantumState,
};

/// Step size used throughout, in ns.
pub const DEFAULT_DT: f64 = 0.05;
/// Evolution time, in ns.
pub const DEFAULT_T_FINAL: f64 = 190.0;
pub const DEFAULT_N_STEPS: usize = 3800;

/// Maximum tolerated drift of the norm (or trace) before integration is
/// declared diverged.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-6;

/// Names of the five control channels, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Control {
    KA,
    KB,
    EpsA,
    EpsB,
    Zeta,
}

impl Control {
    pub const ALL: [Control; 5] = [
        Control::KA,
        Control::KB,
        Control::EpsA,
        Control::EpsB,
        Control::Zeta,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// The operator this control multiplies in the Hamiltonian.
    pub fn operator(self) -> Pauli {
        match self {
            Control::KA => Pauli::XA,
            Control::KB => Pauli::XB,
            Control::EpsA => Pauli::ZA,
            Control::EpsB => Pauli::ZB,
            Control::Zeta => Pauli::ZAZB,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Control::KA => "K_A",
            Control::KB => "K_B",
            Control::EpsA => "eps_A",
            Control::EpsB => "eps_B",
            Control::Zeta => "zeta",
        }
    }
}

impl std::str::FromStr for Control {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Control::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown control `{s}`")))
    }
}

/// Instantaneous control values, rad/ns.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlVector {
    pub k_a: f64,
    pub k_b: f64,
    pub eps_a: f64,
    pub eps_b: f64,
    pub zeta: f64,
}

impl ControlVector {
    pub fn from_array(v: [f64; 5]) -> Self {
        Self {
            k_a: v[0],
            k_b: v[1],
            eps_a: v[2],
            eps_b: v[3],
            zeta: v[4],
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.k_a, self.k_b, self.eps_a, self.eps_b, self.zeta]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

/// Five sampled control series on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlWaveforms {
    dt: f64,
    series: [Vec<f64>; 5],
}

impl ControlWaveforms {
    pub fn new(dt: f64, series: [Vec<f64>; 5]) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {dt}"
            )));
        }
        let n = series[0].len();
        if n == 0 {
            return Err(Error::Shape("waveforms need at least one step".into()));
        }
        if series.iter().any(|s| s.len() != n) {
            return Err(Error::Shape("control series lengths differ".into()));
        }
        if series.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("non-finite control sample".into()));
        }
        Ok(Self { dt, series })
    }

    pub fn constant(dt: f64, n_steps: usize, c: ControlVector) -> Result<Self> {
        Self::new(dt, c.to_array().map(|v| vec![v; n_steps]))
    }

    pub fn zeros(dt: f64, n_steps: usize) -> Result<Self> {
        Self::constant(dt, n_steps, ControlVector::default())
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.series[0].len()
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.n_steps() as f64
    }

    pub fn series(&self, c: Control) -> &[f64] {
        &self.series[c.index()]
    }

    pub fn series_mut(&mut self, c: Control) -> &mut [f64] {
        &mut self.series[c.index()]
    }

    pub fn at(&self, k: usize) -> ControlVector {
        ControlVector::from_array(self.series.each_ref().map(|s| s[k]))
    }

    pub fn hamiltonians(&self) -> Vec<Operator4> {
        (0..self.n_steps())
            .map(|k| build_hamiltonian(&self.at(k)))
            .collect()
    }
}

/// `K_A σx⊗I + K_B I⊗σx + ε_A σz⊗I + ε_B I⊗σz + ζ σz⊗σz`.
pub fn build_hamiltonian(c: &ControlVector) -> Operator4 {
    Control::ALL
        .into_iter()
        .zip(c.to_array())
        .fold(Operator4::zero(), |h, (ctl, v)| {
            h + pauli_operator(ctl.operator()).scale(Complex::new(v, 0.0))
        })
}

/// `−iHv`.
#[inline]
pub(crate) fn generator(h: &Operator4, v: &Amplitudes) -> Amplitudes {
    h.apply(v).map(|x| Complex::new(x.im, -x.re))
}

#[inline]
pub(crate) fn axpy(a: f64, x: &Amplitudes, y: &Amplitudes) -> Amplitudes {
    [
        y[0] + x[0] * a,
        y[1] + x[1] * a,
        y[2] + x[2] * a,
        y[3] + x[3] * a,
    ]
}

/// RK4 increment `ψ_{k+1} − ψ_k` for `dψ/dt = −iHψ`.
fn rk4_increment(h: &Operator4, v: &Amplitudes, dt: f64) -> Amplitudes {
    let k1 = generator(h, v);
    let k2 = generator(h, &axpy(0.5 * dt, &k1, v));
    let k3 = generator(h, &axpy(0.5 * dt, &k2, v));
    let k4 = generator(h, &axpy(dt, &k3, v));
    std::array::from_fn(|i| (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0))
}

/// One classical RK4 step of `dψ/dt = −iHψ` on an unnormalized vector.
pub fn rk4_step_raw(h: &Operator4, v: &Amplitudes, dt: f64) -> Amplitudes {
    let d = rk4_increment(h, v, dt);
    std::array::from_fn(|i| v[i] + d[i])
}

/// `a · b = p + e` exactly.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Knuth's two-sum: `a + b = s + e` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `|<index|ψ(t_f)>|²` as an unevaluated sum `hi + lo`. The state is
/// carried the same way, so the per-step rounding of `ψ + Δψ` does not
/// accumulate. Same RK4 map as [`propagate`]; meant for finite differences,
/// which need the output to well below one ulp.
pub fn projection_probability_compensated(
    state0: &QuantumState,
    w: &ControlWaveforms,
    index: usize,
) -> Result<(f64, f64)> {
    if index >= 4 {
        return Err(Error::BasisIndex(index));
    }
    let mut hi = *state0.amplitudes();
    let mut lo = [Complex::new(0.0, 0.0); 4];
    for k in 0..w.n_steps() {
        let h = build_hamiltonian(&w.at(k));
        let d = rk4_increment(&h, &hi, w.dt());
        let dl = rk4_increment(&h, &lo, w.dt());
        for i in 0..4 {
            let (re, re_err) = two_sum(hi[i].re, d[i].re + (lo[i].re + dl[i].re));
            let (im, im_err) = two_sum(hi[i].im, d[i].im + (lo[i].im + dl[i].im));
            hi[i] = Complex::new(re, im);
            lo[i] = Complex::new(re_err, im_err);
        }
    }
    let drift = ((norm_sqr(&hi)).sqrt() - 1.0).abs();
    if !(drift <= DIVERGENCE_TOLERANCE) {
        return Err(Error::IntegrationDiverged {
            step: w.n_steps(),
            drift,
        });
    }
    let (a, b) = (hi[index], lo[index]);
    let (re2, re2_err) = two_prod(a.re, a.re);
    let (im2, im2_err) = two_prod(a.im, a.im);
    let (p, p_err) = two_sum(re2, im2);
    Ok((
        p,
        p_err + re2_err + im2_err + 2.0 * (a.re * b.re + a.im * b.im),
    ))
}

pub fn rk4_step(state: &QuantumState, c: &ControlVector, dt: f64) -> QuantumState {
    let h = build_hamiltonian(c);
    QuantumState::from_normalized(rk4_step_raw(&h, state.amplitudes(), dt))
}

/// Every step-boundary state of one forward integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<QuantumState>,
}

impl Trajectory {
    pub fn initial(&self) -> &QuantumState {
        &self.states[0]
    }

    pub fn final_state(&self) -> &QuantumState {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Integrates a raw vector through every step, returning all `n_steps + 1`
/// boundary vectors. No normalization or drift checks.
pub fn propagate_raw(v0: &Amplitudes, w: &ControlWaveforms) -> Vec<Amplitudes> {
    let mut out = Vec::with_capacity(w.n_steps() + 1);
    out.push(*v0);
    let mut v = *v0;
    for k in 0..w.n_steps() {
        v = rk4_step_raw(&build_hamiltonian(&w.at(k)), &v, w.dt());
        out.push(v);
    }
    out
}

pub fn propagate(state0: &QuantumState, w: &ControlWaveforms) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(w.n_steps() + 1);
    states.push(*state0);
    let mut v = *state0.amplitudes();
    for k in 0..w.n_steps() {
        v = rk4_step_raw(&build_hamiltonian(&w.at(k)), &v, w.dt());
        let drift = (norm_sqr(&v).sqrt() - 1.0).abs();
        if !(drift <= DIVERGENCE_TOLERANCE) {
            return Err(Error::IntegrationDiverged { step: k + 1, drift });
        }
        states.push(QuantumState::from_normalized(v));
    }
    Ok(Trajectory { states })
}

/// Final state only; same arithmetic as [`propagate`] without storing the path.
pub fn propagate_final(state0: &QuantumState, w: &ControlWaveforms) -> Result<QuantumState> {
    let mut v = *state0.amplitudes();
    for k in 0..w.n_steps() {
        v = rk4_step_raw(&build_hamiltonian(&w.at(k)), &v, w.dt());
    }
    let drift = (norm_sqr(&v).sqrt() - 1.0).abs();
    if !(drift <= DIVERGENCE_TOLERANCE) {
        return Err(Error::IntegrationDiverged {
            step: w.n_steps(),
            drift,
        });
    }
    Ok(QuantumState::from_normalized(v))
}

/// `exp(−iH·dt)` from the eigendecomposition of the Hermitian `H`.
pub fn expm_unitary(h: &Operator4, dt: f64) -> Operator4 {
    let m = Matrix4::from_fn(|i, j| h[(i, j)]);
    let eig = SymmetricEigen::new(m);
    let phases = eig
        .eigenvalues
        .map(|lambda| Complex::from_polar(1.0, -lambda * dt));
    let v = &eig.eigenvectors;
    let mut u = Operator4::zero();
    for i in 0..4 {
        for j in 0..4 {
            u[(i, j)] = (0..4)
                .map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj())
                .sum();
        }
    }
    u
}

pub fn expm_step(state: &QuantumState, c: &ControlVector, dt: f64) -> QuantumState {
    let u = expm_unitary(&build_hamiltonian(c), dt);
    QuantumState::from_normalized(u.apply(state.amplitudes()))
}

/// Composes [`expm_step`] over every sample of `w`.
pub fn propagate_expm(state0: &QuantumState, w: &ControlWaveforms) -> QuantumState {
    (0..w.n_steps()).fold(*state0, |s, k| expm_step(&s, &w.at(k), w.dt()))
}

fn liouvillian(h: &Operator4, rho: &Operator4) -> Operator4 {
    // −i[H, ρ]
    h.commutator(rho).scale(Complex::new(0.0, -1.0))
}

/// RK4 integration of `dρ/dt = −i[H, ρ]` with the same grid as `w`.
pub fn propagate_density(rho0: &DensityMatrix, w: &ControlWaveforms) -> Result<DensityMatrix> {
    let dt = w.dt();
    let half = Complex::new(0.5 * dt, 0.0);
    let full = Complex::new(dt, 0.0);
    let mut rho = *rho0.operator();
    let tr0 = rho.trace();
    for k in 0..w.n_steps() {
        let h = build_hamiltonian(&w.at(k));
        let k1 = liouvillian(&h, &rho);
        let k2 = liouvillian(&h, &(rho + k1.scale(half)));
        let k3 = liouvillian(&h, &(rho + k2.scale(half)));
        let k4 = liouvillian(&h, &(rho + k3.scale(full)));
        let incr = k1 + (k2 + k3).scale(Complex::new(2.0, 0.0)) + k4;
        rho = rho + incr.scale(Complex::new(dt / 6.0, 0.0));
        let drift = (rho.trace() - tr0).norm();
        if !(drift <= DIVERGENCE_TOLERANCE) {
            return Err(Error::IntegrationDiverged { step: k + 1, drift });
        }
    }
    Ok(DensityMatrix::from_operator_unchecked(rho))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::qcore::{make_state, pure_density};

    fn paper_scale() -> ControlVector {
        ControlVector {
            k_a: 2.5e-3,
            k_b: 2.5e-3,
            eps_a: 1e-4,
            eps_b: 1e-4,
            zeta: 1e-4,
        }
    }

    fn max_amp_diff(a: &QuantumState, b: &QuantumState) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn hamiltonian_examples() {
        let h = build_hamiltonian(&ControlVector {
            k_a: 1.0,
            ..Default::default()
        });
        assert_eq!(h, pauli_operator(Pauli::XA));
        let h = build_hamiltonian(&ControlVector {
            zeta: 1.0,
            ..Default::default()
        });
        assert_eq!(h, pauli_operator(Pauli::ZAZB));
        assert_eq!(
            build_hamiltonian(&ControlVector::default()),
            Operator4::zero()
        );
        assert!(
            build_hamiltonian(&ControlVector::from_array([0.3, -1.2, 0.7, 2.0, -0.4]))
                .hermiticity_error()
                < 1e-14
        );
    }

    #[test]
    fn rk4_zero_hamiltonian_is_identity() {
        let s = make_state([0.2, 0.4, 0.1, 0.9], [0.1, 0.2, 0.3]).unwrap();
        assert_eq!(rk4_step(&s, &ControlVector::default(), 0.05), s);
    }

    #[test]
    fn rk4_single_qubit_rotation() {
        let k = 0.1;
        let w = ControlWaveforms::constant(
            DEFAULT_DT,
            DEFAULT_N_STEPS,
            ControlVector {
                k_a: k,
                ..Default::default()
            },
        )
        .unwrap();
        let out = propagate(&QuantumState::basis(0).unwrap(), &w).unwrap();
        let t = k * DEFAULT_T_FINAL;
        let exact = [
            Complex::new(t.cos(), 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, -t.sin()),
            Complex::new(0.0, 0.0),
        ];
        let err = out
            .final_state()
            .amplitudes()
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "error {err:e}");
    }

    #[test]
    fn rk4_diagonal_phase() {
        let c = ControlVector {
            zeta: 0.01,
            ..Default::default()
        };
        let s = rk4_step(&QuantumState::basis(3).unwrap(), &c, 0.05);
        let exact = Complex::from_polar(1.0, -0.01 * 0.05);
        assert!((s.amplitudes()[3] - exact).norm() < 1e-12);
    }

    #[test]
    fn expm_examples() {
        let s = make_state([0.3, 0.5, 0.2, 0.1], [1.0, -0.5, 2.0]).unwrap();
        assert!(max_amp_diff(&expm_step(&s, &ControlVector::default(), 0.7), &s) < 1e-15);

        let c = ControlVector {
            zeta: 1.0,
            ..Default::default()
        };
        let s00 = expm_step(&QuantumState::basis(0).unwrap(), &c, PI);
        assert!((s00.amplitudes()[0] - Complex::new(-1.0, 0.0)).norm() < 1e-14);
        let s01 = expm_step(&QuantumState::basis(1).unwrap(), &c, PI);
        // e^{+iπ} = −1 as well; both diagonal phases are ±π.
        assert!((s01.amplitudes()[1] - Complex::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn expm_is_unitary() {
        let h = build_hamiltonian(&ControlVector::from_array([0.3, -1.2, 0.7, 2.0, -0.4]));
        let u = expm_unitary(&h, 0.9);
        assert!((u.adjoint() * u).max_abs_diff(&Operator4::identity()) < 1e-13);
    }

    #[test]
    fn rk4_matches_expm_single_step() {
        let s = make_state([0.5, 0.1, 0.7, 0.3], [0.4, -1.1, 2.2]).unwrap();
        let c = paper_scale();
        let d = max_amp_diff(&rk4_step(&s, &c, 0.05), &expm_step(&s, &c, 0.05));
        assert!(d < 1e-12);
        // Local error scales as dt⁵: compare at a large step where it is visible.
        let big = ControlVector::from_array([0.5, 0.4, 0.3, 0.2, 0.1]);
        let e1 = max_amp_diff(&rk4_step(&s, &big, 0.2), &expm_step(&s, &big, 0.2));
        let e2 = max_amp_diff(&rk4_step(&s, &big, 0.1), &expm_step(&s, &big, 0.1));
        let ratio = e1 / e2;
        assert!((24.0..40.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn propagate_zero_waveforms() {
        let s = make_state([0.5, 0.1, 0.7, 0.3], [0.4, -1.1, 2.2]).unwrap();
        let w = ControlWaveforms::zeros(0.05, 50).unwrap();
        let traj = propagate(&s, &w).unwrap();
        assert_eq!(traj.states.len(), 51);
        assert!(traj.states.iter().all(|x| *x == s));
    }

    #[test]
    fn propagate_paper_scale_matches_expm() {
        let w = ControlWaveforms::constant(DEFAULT_DT, DEFAULT_N_STEPS, paper_scale()).unwrap();
        let s0 = QuantumState::basis(0).unwrap();
        let traj = propagate(&s0, &w).unwrap();
        assert_eq!(*traj.initial(), s0);
        let oracle = propagate_expm(&s0, &w);
        assert!(max_amp_diff(traj.final_state(), &oracle) < 1e-9);
        assert!((traj.final_state().norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn propagate_reports_divergence() {
        // ‖H‖·dt far outside the RK4 stability region.
        let w = ControlWaveforms::constant(
            1.0,
            20,
            ControlVector::from_array([5.0, 5.0, 5.0, 5.0, 5.0]),
        )
        .unwrap();
        let err = propagate(&QuantumState::basis(0).unwrap(), &w).unwrap_err();
        assert!(matches!(err, Error::IntegrationDiverged { step: 1, .. }));
    }

    #[test]
    fn density_zero_waveforms_unchanged() {
        let s = make_state([0.5, 0.1, 0.7, 0.3], [0.4, -1.1, 2.2]).unwrap();
        let rho = pure_density(&s);
        let w = ControlWaveforms::zeros(0.05, 100).unwrap();
        assert_eq!(propagate_density(&rho, &w).unwrap(), rho);
    }

    #[test]
    fn density_matches_state_vector() {
        let s = make_state([0.5, 0.1, 0.7, 0.3], [0.4, -1.1, 2.2]).unwrap();
        let mut w = ControlWaveforms::zeros(DEFAULT_DT, DEFAULT_N_STEPS).unwrap();
        for c in Control::ALL {
            for (k, v) in w.series_mut(c).iter_mut().enumerate() {
                *v = 0.02 * ((k as f64) * 0.003 + c.index() as f64).sin();
            }
        }
        let psi = propagate(&s, &w).unwrap();
        let rho = propagate_density(&pure_density(&s), &w).unwrap();
        let d = rho
            .operator()
            .max_abs_diff(pure_density(psi.final_state()).operator());
        assert!(d < 1e-8, "{d:e}");
        assert!((rho.trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn waveform_validation() {
        assert!(ControlWaveforms::new(0.0, Default::default()).is_err());
        let bad = [
            vec![0.0; 3],
            vec![0.0; 3],
            vec![0.0; 2],
            vec![0.0; 3],
            vec![0.0; 3],
        ];
        assert!(matches!(
            ControlWaveforms::new(0.1, bad),
            Err(Error::Shape(_))
        ));
        let nan = [vec![f64::NAN], vec![0.0], vec![0.0], vec![0.0], vec![0.0]];
        assert!(ControlWaveforms::new(0.1, nan).is_err());
    }
}
