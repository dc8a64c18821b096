// Copyright 2026 The qnn-phase Authors
// SPDX-License-Identifier: Apache-2.0

//! A driven two-qubit system used as a trainable network.
//!
//! The five control waveforms of the Hamiltonian
//! `H = K_A σx⊗I + K_B I⊗σx + ε_A σz⊗I + ε_B I⊗σz + ζ σz⊗σz`
//! act as the weights. A state is propagated with fixed-step RK4, the
//! probability of one basis state at the final time is the network output,
//! and the controls are trained by exact reverse-mode differentiation of the
//! discrete integrator so that the output encodes the input's relative phase.
//!
//! Units: ℏ = 1, time in ns, controls in rad/ns.

pub mod dynamics;
pub mod error;
pub mod harness;
pub mod learning;
pub mod qcore;
pub mod statesgen;
pub mod targets;

pub use error::{Error, Result};
