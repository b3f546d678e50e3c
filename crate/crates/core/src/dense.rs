//! Brute-force state-vector engine used as ground truth.
//!
//! A [`DenseState`] on `N` qubits stores all `2^N` complex amplitudes. Basis
//! index `b` is read with particle 1 as the most significant bit, so particle
//! `p` lives at bit `N - p`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::label::{enumerate_basis, GhzLabel, Sign};

/// Hard cap on dense simulation size (16M amplitudes).
pub const MAX_DENSE_QUBITS: usize = 24;

/// Outcomes whose probability falls below this are dropped.
pub const PROBABILITY_FLOOR: f64 = 1e-14;

/// Below this many amplitudes the projection loop stays on one thread.
const PARALLEL_THRESHOLD: usize = 1 << 12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn check_cap(qubits: usize) -> Result<()> {
    if qubits > MAX_DENSE_QUBITS {
        Err(Error::ResourceLimit {
            qubits,
            max: MAX_DENSE_QUBITS,
        })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// Wrap an amplitude vector. The vector must have length `2^num_qubits`
    /// and unit norm (within `1e-10`).
    pub fn new(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidArity(
                "dense state needs at least one qubit".into(),
            ));
        }
        check_cap(num_qubits)?;
        if amps.len() != 1 << num_qubits {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes for {num_qubits} qubits, got {}",
                1usize << num_qubits,
                amps.len()
            )));
        }
        let state = Self { num_qubits, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "state is not normalized (norm² = {norm})"
            )));
        }
        Ok(state)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_cap(num_qubits)?;
        if num_qubits == 0 || index >= 1 << num_qubits {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DenseState) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::InvalidArgument(format!(
                "inner product of {}-qubit and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn shift(&self, particle: usize) -> usize {
        self.num_qubits - particle
    }

    fn check_particle(&self, particle: usize) -> Result<()> {
        if particle == 0 || particle > self.num_qubits {
            Err(Error::InvalidArgument(format!(
                "particle {particle} out of range 1..={}",
                self.num_qubits
            )))
        } else {
            Ok(())
        }
    }

    /// Probability that a computational-basis measurement of `particle` gives 1.
    pub fn probability_of_one(&self, particle: usize) -> Result<f64> {
        self.check_particle(particle)?;
        let bit = 1usize << self.shift(particle);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Project `particle` onto `|value⟩` and renormalize. Returns the
    /// probability of that outcome; the state is left untouched when the
    /// probability is below [`PROBABILITY_FLOOR`].
    pub fn project_qubit(&mut self, particle: usize, value: u8) -> Result<f64> {
        self.check_particle(particle)?;
        let bit = 1usize << self.shift(particle);
        let keep = if value == 0 { 0 } else { bit };
        let prob: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == keep)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if prob < PROBABILITY_FLOOR {
            return Ok(prob);
        }
        let scale = 1.0 / prob.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a = if i & bit == keep { *a * scale } else { ZERO };
        }
        Ok(prob)
    }

    pub fn apply_hadamard(&mut self, particle: usize) -> Result<()> {
        self.check_particle(particle)?;
        let bit = 1usize << self.shift(particle);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        Ok(())
    }

    /// If this state is `phase·|label⟩` for some GHZ label, return both.
    pub fn identify_label(&self) -> Option<(GhzLabel, Complex64)> {
        if self.num_qubits < 2 {
            return None;
        }
        let mut support = self
            .amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 1e-12)
            .map(|(i, _)| i);
        let (first, second) = (support.next()?, support.next()?);
        if support.next().is_some() || first + second != self.amps.len() - 1 {
            return None;
        }
        // `first` is the smaller index, so its leading bit is 0
        let (lead, tail) = (self.amps[first], self.amps[second]);
        if (lead.norm_sqr() - 0.5).abs() > 1e-10 || (tail.norm_sqr() - 0.5).abs() > 1e-10 {
            return None;
        }
        let ratio = tail / lead;
        let sign = if (ratio - 1.0).norm() < 1e-9 {
            Sign::Plus
        } else if (ratio + 1.0).norm() < 1e-9 {
            Sign::Minus
        } else {
            return None;
        };
        let label = GhzLabel::new(self.num_qubits, first as u64, sign).ok()?;
        Some((label, lead / lead.norm()))
    }
}

/// Dense embedding of a GHZ label: `±1/√2` at indices `d` and `2^m - d - 1`.
pub fn embed(label: GhzLabel) -> Result<DenseState> {
    let m = label.num_qubits();
    check_cap(m)?;
    let mut amps = vec![ZERO; 1 << m];
    amps[label.index() as usize] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[label.partner_index() as usize] =
        Complex64::new(label.sign().as_f64() * FRAC_1_SQRT_2, 0.0);
    Ok(DenseState {
        num_qubits: m,
        amps,
    })
}

/// Tensor product in list order (the first state holds the leading particles).
pub fn tensor(states: &[DenseState]) -> Result<DenseState> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| Error::InvalidArity("tensor product of an empty list".into()))?;
    let total: usize = states.iter().map(|s| s.num_qubits).sum();
    check_cap(total)?;
    let mut acc = first.clone();
    for s in rest {
        let mut amps = Vec::with_capacity(acc.amps.len() * s.amps.len());
        for a in &acc.amps {
            amps.extend(s.amps.iter().map(|b| a * b));
        }
        acc = DenseState {
            num_qubits: acc.num_qubits + s.num_qubits,
            amps,
        };
    }
    Ok(acc)
}

/// Reorder particles: output particle `k` carries input particle `perm[k-1]`
/// (both 1-based). Amplitudes are moved, never recomputed.
pub fn permute(state: &DenseState, perm: &[usize]) -> Result<DenseState> {
    let n = state.num_qubits;
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "permutation has {} entries for {n} qubits",
            perm.len()
        )));
    }
    let mut seen = vec![false; n + 1];
    for &p in perm {
        if p == 0 || p > n || seen[p] {
            return Err(Error::InvalidPermutation(format!(
                "{perm:?} is not a bijection on 1..={n}"
            )));
        }
        seen[p] = true;
    }
    // source bit shift for each destination bit shift
    let moves: Vec<(usize, usize)> = perm
        .iter()
        .enumerate()
        .map(|(k, &src)| (n - src, n - (k + 1)))
        .collect();
    let mut amps = vec![ZERO; state.amps.len()];
    for (i, &a) in state.amps.iter().enumerate() {
        let j = moves
            .iter()
            .fold(0usize, |acc, &(from, to)| acc | (((i >> from) & 1) << to));
        amps[j] = a;
    }
    Ok(DenseState {
        num_qubits: n,
        amps,
    })
}

/// Inverse of a 1-based permutation.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p - 1] = k + 1;
    }
    inv
}

/// One branch of a GHZ-basis measurement on part of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    /// Result on the measured particles, bits in subset order.
    pub outcome: GhzLabel,
    pub probability: f64,
    /// Normalized state of the unmeasured particles, ascending original order.
    pub post_state: DenseState,
    /// GHZ label of `post_state`, when it is exactly one (up to phase).
    pub residual: Option<GhzLabel>,
    /// Phase of `post_state` relative to the canonical embedding of
    /// `residual`; 1 when there is no exact residual label.
    pub relative_phase: Complex64,
}

impl MeasurementOutcome {
    /// Real sign of `relative_phase`, when it is ±1.
    pub fn phase_sign(&self) -> Option<Sign> {
        let p = self.relative_phase;
        if (p - 1.0).norm() < 1e-9 {
            Some(Sign::Plus)
        } else if (p + 1.0).norm() < 1e-9 {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

fn check_subset(n: usize, subset: &[usize], allow_full: bool) -> Result<()> {
    let upper = if allow_full { n } else { n.saturating_sub(1) };
    if subset.len() < 2 || subset.len() > upper {
        return Err(Error::InvalidSubset(format!(
            "measuring {} of {n} particles (need 2..={upper})",
            subset.len()
        )));
    }
    let mut seen = vec![false; n + 1];
    for &p in subset {
        if p == 0 || p > n {
            return Err(Error::InvalidSubset(format!(
                "particle {p} out of range 1..={n}"
            )));
        }
        if seen[p] {
            return Err(Error::InvalidSubset(format!("particle {p} listed twice")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Projective GHZ-basis measurement of `subset` (1-based, ordered).
///
/// Returns one outcome per label of the `|subset|`-qubit basis with
/// probability at least [`PROBABILITY_FLOOR`], in enumeration order.
pub fn measure_ghz(state: &DenseState, subset: &[usize]) -> Result<Vec<MeasurementOutcome>> {
    let n = state.num_qubits;
    check_subset(n, subset, false)?;
    let mut perm = subset.to_vec();
    perm.extend((1..=n).filter(|p| !subset.contains(p)));
    let regrouped = permute(state, &perm)?;

    let measured = subset.len();
    let rest = n - measured;
    let width = 1usize << rest;
    let row = |r: usize| &regrouped.amps[r * width..(r + 1) * width];

    let project = |label: GhzLabel| -> Option<MeasurementOutcome> {
        let s = label.sign().as_f64();
        let (lead, tail) = (
            row(label.index() as usize),
            row(label.partner_index() as usize),
        );
        let v: Vec<Complex64> = lead
            .iter()
            .zip(tail)
            .map(|(a, b)| (a + b * s) * FRAC_1_SQRT_2)
            .collect();
        let probability: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if probability < PROBABILITY_FLOOR {
            return None;
        }
        let scale = 1.0 / probability.sqrt();
        let post_state = DenseState {
            num_qubits: rest,
            amps: v.into_iter().map(|a| a * scale).collect(),
        };
        let (residual, relative_phase) = match post_state.identify_label() {
            Some((label, phase)) => (Some(label), phase),
            None => (None, Complex64::new(1.0, 0.0)),
        };
        Some(MeasurementOutcome {
            outcome: label,
            probability,
            post_state,
            residual,
            relative_phase,
        })
    };

    let basis = enumerate_basis(measured)?;
    let outcomes = if regrouped.amps.len() >= PARALLEL_THRESHOLD {
        basis.into_par_iter().filter_map(project).collect()
    } else {
        basis.into_iter().filter_map(project).collect()
    };
    Ok(outcomes)
}

/// Full-register GHZ-basis measurement: `(label, probability)` for every
/// label with probability at least [`PROBABILITY_FLOOR`].
pub fn ghz_distribution(state: &DenseState) -> Result<Vec<(GhzLabel, f64)>> {
    let n = state.num_qubits;
    if n < 2 {
        return Err(Error::InvalidSubset(format!(
            "GHZ measurement of {n} particle"
        )));
    }
    Ok(enumerate_basis(n)?
        .into_iter()
        .filter_map(|label| {
            let a = state.amps[label.index() as usize];
            let b = state.amps[label.partner_index() as usize];
            let p = ((a + b * label.sign().as_f64()) * FRAC_1_SQRT_2).norm_sqr();
            (p >= PROBABILITY_FLOOR).then_some((label, p))
        })
        .collect())
}
