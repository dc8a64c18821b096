// Copyright 2026 The qnn-phase Authors
// SPDX-License-Identifier: Apache-2.0

//! Training set construction and seeded random test sets.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::learning::{probability_target, TrainingPair};
use crate::qcore::{make_state, QuantumState};
use crate::targets::{target_equal_bell, FamilyKind, PhaseSet};

pub const TRAINING_SET_SIZE: usize = 11;

/// One member of a parametric family: magnitudes `[a00, a01, a10, a11]`
/// (zero off the family's support) and the relative phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateFamily {
    pub kind: FamilyKind,
    pub magnitudes: [f64; 4],
    pub phase: f64,
}

impl StateFamily {
    pub fn new(kind: FamilyKind, magnitudes: [f64; 4], phase: f64) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::InvalidState("phase must be finite".into()));
        }
        let fam = Self {
            kind,
            magnitudes,
            phase,
        };
        // Validates support, sign and normalization.
        kind.target(magnitudes, phase)?;
        Ok(fam)
    }

    /// Phases `[ξ, θ, φ]` in the layout expected by [`make_state`].
    fn phases(&self) -> [f64; 3] {
        match self.kind.phase_set() {
            PhaseSet::Xi => [self.phase, 0.0, 0.0],
            PhaseSet::Theta => [0.0, self.phase, 0.0],
            PhaseSet::Phi => [0.0, 0.0, self.phase],
        }
    }

    pub fn state(&self) -> Result<QuantumState> {
        make_state(self.magnitudes, self.phases())
    }

    pub fn target(&self) -> Result<f64> {
        self.kind.target(self.magnitudes, self.phase)
    }
}

/// Routes a family member to its target function and readout index.
pub fn to_training_pair(fam: &StateFamily) -> Result<TrainingPair> {
    TrainingPair::new(fam.state()?, fam.kind.measure_index(), fam.target()?)
}

/// Phase of the `n`-th training pair, `n` in `1..=11`: `−π/2 + (n−1)π/10`.
pub fn training_phase(n: usize) -> f64 {
    -PI / 2.0 + (n as f64 - 1.0) * PI / 10.0
}

/// Equal-amplitude Bell inputs `(|00> + e^{iφ}|11>)/√2` at eleven phases
/// from −π/2 to π/2, read out on `|11>` with target `cos²(φ/2)`.
pub fn build_training_set() -> Vec<TrainingPair> {
    (1..=TRAINING_SET_SIZE)
        .map(|n| {
            let phi = training_phase(n);
            let input = make_state([1.0, 0.0, 0.0, 1.0], [0.0, 0.0, phi])
                .expect("fixed training state is valid");
            TrainingPair::new(input, 3, target_equal_bell(phi)).expect("target is in [0, 1]")
        })
        .collect()
}

fn draw(kind: FamilyKind, rng: &mut ChaCha8Rng) -> StateFamily {
    let mut magnitudes = [0.0; 4];
    loop {
        for &i in kind.support() {
            let z: f64 = rng.sample(StandardNormal);
            magnitudes[i] = z.abs();
        }
        let n = magnitudes.iter().map(|m| m * m).sum::<f64>().sqrt();
        if n > 0.0 {
            magnitudes.iter_mut().for_each(|m| *m /= n);
            break;
        }
    }
    // (−π, π]
    let phase = PI - rng.random_range(0.0..2.0 * PI);
    StateFamily {
        kind,
        magnitudes,
        phase,
    }
}

fn sample_with<F>(
    kind: FamilyKind,
    rng_seed: u64,
    count: usize,
    accept: F,
) -> Result<Vec<StateFamily>>
where
    F: Fn(&StateFamily) -> bool,
{
    if count == 0 {
        return Err(Error::InvalidConfig("sample count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Vec::with_capacity(count);
    let mut rejected = 0usize;
    while out.len() < count {
        let fam = draw(kind, &mut rng);
        if accept(&fam) {
            out.push(fam);
        } else {
            rejected += 1;
            // More rejections than requested samples means the rate is
            // already above one half.
            if rejected > count {
                return Err(Error::RejectionRate {
                    kind: kind.name().into(),
                    rejected,
                    drawn: rejected + out.len(),
                });
            }
        }
    }
    if rejected > 0 {
        log::info!(
            "{}: rejected {rejected} of {} draws with target outside [0, 1]",
            kind,
            rejected + count
        );
    }
    Ok(out)
}

/// `count` random members of `kind`: magnitudes are normalized absolute
/// values of standard normals on the family's support, the phase is uniform
/// on (−π, π]. Draws whose target leaves [0, 1] are discarded.
pub fn sample_family(kind: FamilyKind, rng_seed: u64, count: usize) -> Result<Vec<StateFamily>> {
    sample_with(kind, rng_seed, count, |f| {
        f.target().is_ok_and(|t| probability_target(t).is_some())
    })
}

/// Test set for one phase set: `total` samples split as evenly as possible
/// over its three families, each family seeded from `rng_seed` and its
/// position in the set.
pub fn phase_set_samples(set: PhaseSet, rng_seed: u64, total: usize) -> Result<Vec<StateFamily>> {
    let mut out = Vec::with_capacity(total);
    for (i, kind) in set.families().into_iter().enumerate() {
        let count = total / 3 + usize::from(i < total % 3);
        if count == 0 {
            continue;
        }
        out.extend(sample_family(kind, rng_seed.wrapping_add(i as u64), count)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::qcore::{norm_sqr, Complex};

    #[test]
    fn training_set_examples() {
        let set = build_training_set();
        assert_eq!(set.len(), 11);
        assert!((training_phase(1) + PI / 2.0).abs() < 1e-15);
        assert!((set[0].target - 0.5).abs() < 1e-15);
        assert_eq!(training_phase(6), 0.0);
        assert_eq!(set[5].target, 1.0);
        assert!((training_phase(11) - PI / 2.0).abs() < 1e-15);
        assert!((set[10].target - 0.5).abs() < 1e-15);
        for (n, p) in set.iter().enumerate() {
            assert_eq!(p.measure_index, 3);
            let a = p.input.amplitudes();
            assert!((a[0] - Complex::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
            let phi = training_phase(n + 1);
            assert!((a[3] - Complex::from_polar(FRAC_1_SQRT_2, phi)).norm() < 1e-15);
        }
        assert_eq!(set, build_training_set());
    }

    #[test]
    fn sampled_bell_states_are_normalized_and_deterministic() {
        let a = sample_family(FamilyKind::Bell, 42, 550).unwrap();
        let b = sample_family(FamilyKind::Bell, 42, 550).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_family(FamilyKind::Bell, 43, 550).unwrap());
        for f in &a {
            let [a00, a01, a10, a11] = f.magnitudes;
            assert_eq!((a01, a10), (0.0, 0.0));
            assert!((a00 * a00 + a11 * a11 - 1.0).abs() < 1e-12);
            assert!(f.phase > -PI && f.phase <= PI);
        }
        let mean = a.iter().map(|f| f.magnitudes[0].powi(2)).sum::<f64>() / a.len() as f64;
        assert!((mean - 0.5).abs() < 0.05, "mean a00² = {mean}");
    }

    #[test]
    fn every_family_yields_valid_pairs() {
        for (i, kind) in FamilyKind::ALL.into_iter().enumerate() {
            let fams = sample_family(kind, 100 + i as u64, 200).unwrap();
            for f in &fams {
                let pair = to_training_pair(f).unwrap();
                assert_eq!(pair.measure_index, kind.measure_index());
                assert!((0.0..=1.0).contains(&pair.target));
                assert!((norm_sqr(pair.input.amplitudes()) - 1.0).abs() < 1e-12);
                for (j, m) in f.magnitudes.iter().enumerate() {
                    let amp = pair.input.amplitudes()[j].norm();
                    assert!((amp - m).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn to_training_pair_examples() {
        let h = FRAC_1_SQRT_2;
        let p =
            to_training_pair(&StateFamily::new(FamilyKind::Bell, [h, 0.0, 0.0, h], 0.0).unwrap())
                .unwrap();
        assert_eq!(p.measure_index, 3);
        assert!((p.target - 1.0).abs() < 1e-15);
        assert!((p.input.amplitudes()[3] - Complex::new(h, 0.0)).norm() < 1e-15);

        let p = to_training_pair(&StateFamily::new(FamilyKind::Epr, [0.0, h, h, 0.0], PI).unwrap())
            .unwrap();
        assert_eq!(p.measure_index, 2);
        assert!(p.target.abs() < 1e-15);
        assert!((p.input.amplitudes()[2] - Complex::new(-h, 0.0)).norm() < 1e-15);

        let p = to_training_pair(
            &StateFamily::new(FamilyKind::Eprx, [0.0, 0.6, 0.8, 0.0], PI).unwrap(),
        )
        .unwrap();
        assert_eq!(p.measure_index, 1);
        assert!((p.target - 0.014112).abs() < 1e-12);
        assert!((p.input.amplitudes()[1] - Complex::new(-0.6, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn out_of_range_target_is_rejected() {
        // EP2 with a11 = 0 and equal a01, a10 at θ = 0 has target 7/6.
        let fam = StateFamily::new(
            FamilyKind::Ep2,
            [0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0],
            0.0,
        )
        .unwrap();
        assert!(matches!(
            to_training_pair(&fam),
            Err(Error::RejectedSample(_))
        ));
    }

    #[test]
    fn excessive_rejection_is_a_configuration_error() {
        let err = sample_with(FamilyKind::Bell, 1, 10, |_| false).unwrap_err();
        assert!(matches!(err, Error::RejectionRate { rejected: 11, .. }));
        assert!(sample_family(FamilyKind::Bell, 1, 0).is_err());
    }

    #[test]
    fn phase_set_split() {
        let s = phase_set_samples(PhaseSet::Theta, 9, 550).unwrap();
        assert_eq!(s.len(), 550);
        let count = |k| s.iter().filter(|f| f.kind == k).count();
        assert_eq!(count(FamilyKind::Epr), 184);
        assert_eq!(count(FamilyKind::Ep1), 183);
        assert_eq!(count(FamilyKind::Ep2), 183);
    }
}
