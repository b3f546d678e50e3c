//! Closed-form entanglement swapping between GHZ-class states.
//!
//! Take `n` states `(|A_h⟩ + s_h|Ā_h⟩)/√2` and split each bitstring into the
//! measured head `H_h` (first `l_h` bits) and the residual tail `T_h`. Writing
//! `x ∈ {0,1}^n` for which branch each state contributes, the product state is
//!
//! ```text
//! 2^(-n/2) Σ_x c(x) |H^x⟩|T^x⟩,   c(x) = Π_{h : x_h = 1} s_h
//! ```
//!
//! with `H^x` the concatenation of `H_h` or `H̄_h`. Pairing `x` with its
//! complement and rewriting `|H^x⟩`, `|H̄^x⟩` in the GHZ basis gives, for every
//! `x` with `x_1 = 0`,
//!
//! ```text
//! c(x) · [ |G(H^x, +)⟩|T^x + σ T̄^x⟩ + |G(H^x, -)⟩|T^x - σ T̄^x⟩ ],   σ = Π_h s_h
//! ```
//!
//! so each outcome has probability `2^-n` and the residual carries sign `σ`
//! (measured `+`) or `-σ` (measured `-`). For SGHZ states cut in half, `T_h`
//! is `H_h` or `H̄_h`, which is what makes measured and residual labels
//! coincide under the same-state conditions.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::dense::{embed, measure_ghz, permute, tensor, MeasurementOutcome, MAX_DENSE_QUBITS};
use crate::error::{Error, Result};
use crate::label::{
    classify_sghz, make_label_with_phase, BitString, CompositeSystem, GhzLabel, HalfRelation,
    SghzLabel, Sign,
};

/// Probability tolerance used when comparing prediction and oracle.
pub const PROBABILITY_TOLERANCE: f64 = 1e-10;

/// A composite system together with how many leading particles of each state
/// go into the joint GHZ measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapSpec {
    composite: CompositeSystem,
    cut: Vec<usize>,
}

impl SwapSpec {
    pub fn new(composite: CompositeSystem, cut: Vec<usize>) -> Result<Self> {
        if cut.len() != composite.len() {
            return Err(Error::InvalidArgument(format!(
                "cut has {} entries for {} states",
                cut.len(),
                composite.len()
            )));
        }
        for (h, (&l, s)) in cut.iter().zip(composite.states()).enumerate() {
            if l == 0 || l >= s.num_qubits() {
                return Err(Error::InvalidArgument(format!(
                    "state {} has {} qubits; cut {l} must be in 1..={}",
                    h + 1,
                    s.num_qubits(),
                    s.num_qubits() - 1
                )));
            }
        }
        if cut.iter().sum::<usize>() < 2 {
            return Err(Error::InvalidArgument(
                "a joint GHZ measurement needs at least 2 particles".into(),
            ));
        }
        Ok(Self { composite, cut })
    }

    /// Measure exactly the first half of every state.
    pub fn half_cut(states: Vec<GhzLabel>) -> Result<Self> {
        if let Some(odd) = states.iter().find(|s| s.num_qubits() % 2 != 0) {
            return Err(Error::InvalidArgument(format!(
                "{odd} has an odd qubit count; give an explicit cut"
            )));
        }
        let cut = states.iter().map(|s| s.num_qubits() / 2).collect();
        Self::new(CompositeSystem::new(states)?, cut)
    }

    pub fn composite(&self) -> &CompositeSystem {
        &self.composite
    }

    pub fn states(&self) -> &[GhzLabel] {
        self.composite.states()
    }

    pub fn cut(&self) -> &[usize] {
        &self.cut
    }

    pub fn total_qubits(&self) -> usize {
        self.composite.total_qubits()
    }

    pub fn is_half_cut(&self) -> bool {
        self.states()
            .iter()
            .zip(&self.cut)
            .all(|(s, &l)| 2 * l == s.num_qubits())
    }

    /// Global indices of the measured particles, state by state.
    pub fn measured_particles(&self) -> Vec<usize> {
        (0..self.composite.len())
            .flat_map(|h| {
                (1..=self.cut[h]).filter_map(move |pos| self.composite.global_index(h, pos))
            })
            .collect()
    }

    /// Global indices of the unmeasured particles, ascending.
    pub fn residual_particles(&self) -> Vec<usize> {
        let measured = self.measured_particles();
        (1..=self.total_qubits())
            .filter(|p| !measured.contains(p))
            .collect()
    }
}

impl fmt::Display for SwapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.states().iter().map(ToString::to_string).collect();
        let cut: Vec<String> = self.cut.iter().map(ToString::to_string).collect();
        write!(f, "[{}] cut [{}]", labels.join(" "), cut.join(","))
    }
}

/// One measured/residual pairing of a swap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwapPair {
    pub measured: GhzLabel,
    pub residual: GhzLabel,
    /// Sign of the amplitude on `|measured⟩|residual⟩` in the regrouped product.
    pub coeff_sign: Sign,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapPrediction {
    /// Sorted by measured label in basis enumeration order.
    pub pairs: Vec<SwapPair>,
}

impl SwapPrediction {
    /// Whether every outcome leaves the residual in the measured state.
    pub fn all_same(&self) -> bool {
        self.pairs.iter().all(|p| p.measured == p.residual)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, measured: GhzLabel) -> Option<&SwapPair> {
        self.pairs.iter().find(|p| p.measured == measured)
    }
}

/// Closed-form expansion for any GHZ labels and cuts.
fn expand(states: &[GhzLabel], cut: &[usize]) -> Result<SwapPrediction> {
    let n = states.len();
    let split: Vec<(BitString, BitString)> = states
        .iter()
        .zip(cut)
        .map(|(s, &l)| s.bits().split_at(l))
        .collect();
    let sigma = Sign::product(states.iter().map(|s| s.sign()));
    let probability = 0.5f64.powi(n as i32);

    let mut pairs = Vec::with_capacity(1 << n);
    for x in 0u64..1 << (n - 1) {
        // bit h-1 of x (counted from the left over states 2..n) selects the complemented branch
        let complemented = |h: usize| h > 0 && (x >> (n - 1 - h)) & 1 == 1;
        let mut head: Option<BitString> = None;
        let mut tail: Option<BitString> = None;
        let mut c = Sign::Plus;
        for (h, &(hd, tl)) in split.iter().enumerate() {
            let (hd, tl) = if complemented(h) {
                c = c * states[h].sign();
                (hd.negate(), tl.negate())
            } else {
                (hd, tl)
            };
            head = Some(match head {
                Some(acc) => acc.concat(hd)?,
                None => hd,
            });
            tail = Some(match tail {
                Some(acc) => acc.concat(tl)?,
                None => tl,
            });
        }
        let (head, tail) = (head.expect("n >= 1"), tail.expect("n >= 1"));
        for measured_sign in [Sign::Plus, Sign::Minus] {
            let measured = GhzLabel::new(head.len(), head.value(), measured_sign)?;
            let (residual, phase) = make_label_with_phase(tail, measured_sign * sigma)?;
            pairs.push(SwapPair {
                measured,
                residual,
                coeff_sign: c * phase,
                probability,
            });
        }
    }
    pairs.sort_by_key(|p| (p.measured.index(), p.measured.sign()));
    Ok(SwapPrediction { pairs })
}

fn require_sghz(label: GhzLabel, position: usize) -> Result<SghzLabel> {
    classify_sghz(label).ok_or_else(|| {
        Error::ClosedFormUnavailable(format!("state {position} ({label}) is not an SGHZ state"))
    })
}

/// Swap between two Bell states, measuring particles (1,3).
pub fn predict_two_bell(a: GhzLabel, b: GhzLabel) -> Result<SwapPrediction> {
    for l in [a, b] {
        if !l.is_bell() {
            return Err(Error::InvalidArity(format!("{l} is not a Bell state")));
        }
    }
    expand(&[a, b], &[1, 1])
}

/// Swap between two SGHZ states (sizes may differ), measuring the first half
/// of each.
pub fn predict_two_sghz(a: SghzLabel, b: SghzLabel) -> Result<SwapPrediction> {
    expand(&[a.label(), b.label()], &[a.half_len(), b.half_len()])
}

/// Swap between `n ≥ 2` SGHZ states cut in half.
pub fn predict_multi(spec: &SwapSpec) -> Result<SwapPrediction> {
    if spec.states().len() < 2 {
        return Err(Error::ClosedFormUnavailable(
            "closed form needs at least two states".into(),
        ));
    }
    if !spec.is_half_cut() {
        return Err(Error::ClosedFormUnavailable(format!(
            "{spec} does not measure exactly half of each state"
        )));
    }
    for (h, &label) in spec.states().iter().enumerate() {
        require_sghz(label, h + 1)?;
    }
    expand(spec.states(), spec.cut())
}

/// Why a same-state predicate holds or fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum VerdictReason {
    Holds,
    TooFewStates,
    /// 1-based position of the first non-SGHZ state.
    NotSghz {
        state: usize,
    },
    /// Some states have equal halves, others negated halves.
    MixedHalfRelations,
    OddMinusCount {
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SameStateVerdict {
    pub same: bool,
    #[serde(flatten)]
    pub reason: VerdictReason,
}

impl SameStateVerdict {
    fn fail(reason: VerdictReason) -> Self {
        Self {
            same: false,
            reason,
        }
    }
}

/// Whether a half-cut swap of these states always leaves the residual in the
/// measured GHZ state: every state is SGHZ, all share one half relation, and
/// an even number of them carry the `-` sign.
pub fn swap_preserves_state(states: &[GhzLabel]) -> SameStateVerdict {
    if states.len() < 2 {
        return SameStateVerdict::fail(VerdictReason::TooFewStates);
    }
    let mut relation: Option<HalfRelation> = None;
    for (h, &label) in states.iter().enumerate() {
        let Some(sghz) = classify_sghz(label) else {
            return SameStateVerdict::fail(VerdictReason::NotSghz { state: h + 1 });
        };
        match relation {
            None => relation = Some(sghz.half_relation()),
            Some(r) if r != sghz.half_relation() => {
                return SameStateVerdict::fail(VerdictReason::MixedHalfRelations)
            }
            Some(_) => {}
        }
    }
    let count = states.iter().filter(|s| s.sign() == Sign::Minus).count();
    if count % 2 == 1 {
        return SameStateVerdict::fail(VerdictReason::OddMinusCount { count });
    }
    SameStateVerdict {
        same: true,
        reason: VerdictReason::Holds,
    }
}

/// Two-state case of [`swap_preserves_state`]: both SGHZ with the same half
/// relation and the same sign.
pub fn pair_swap_preserves_state(a: GhzLabel, b: GhzLabel) -> SameStateVerdict {
    swap_preserves_state(&[a, b])
}

/// Measure the spec's particles with the dense oracle. The measured particles
/// are first regrouped to the front (state order), the residual follows in
/// ascending original order.
pub fn oracle_outcomes(spec: &SwapSpec) -> Result<Vec<MeasurementOutcome>> {
    let total = spec.total_qubits();
    if total > MAX_DENSE_QUBITS {
        return Err(Error::ResourceLimit {
            qubits: total,
            max: MAX_DENSE_QUBITS,
        });
    }
    let dense = spec
        .states()
        .iter()
        .map(|&l| embed(l))
        .collect::<Result<Vec<_>>>()?;
    let product = tensor(&dense)?;
    let mut perm = spec.measured_particles();
    let measured = perm.len();
    perm.extend(spec.residual_particles());
    let regrouped = permute(&product, &perm)?;
    let subset: Vec<usize> = (1..=measured).collect();
    measure_ghz(&regrouped, &subset)
}

/// Whether every oracle outcome leaves the residual in the measured label.
pub fn oracle_all_same(outcomes: &[MeasurementOutcome]) -> bool {
    outcomes.iter().all(|o| o.residual == Some(o.outcome))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MismatchKind {
    MissingFromOracle,
    MissingFromPrediction,
    Probability {
        expected: f64,
        got: f64,
    },
    Residual {
        expected: GhzLabel,
        got: Option<GhzLabel>,
    },
    CoeffSign {
        expected: Sign,
        got: Option<Sign>,
    },
    Normalization {
        total: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub measured: Option<GhzLabel>,
    #[serde(flatten)]
    pub kind: MismatchKind,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = self
            .measured
            .map(|m| m.to_string())
            .unwrap_or_else(|| "-".into());
        match &self.kind {
            MismatchKind::MissingFromOracle => write!(f, "{at}: predicted but absent from oracle"),
            MismatchKind::MissingFromPrediction => write!(f, "{at}: oracle outcome not predicted"),
            MismatchKind::Probability { expected, got } => {
                write!(f, "{at}: probability expected {expected} got {got}")
            }
            MismatchKind::Residual { expected, got } => match got {
                Some(g) => write!(f, "{at}: residual expected {expected} got {g}"),
                None => write!(f, "{at}: residual expected {expected} got a non-GHZ state"),
            },
            MismatchKind::CoeffSign { expected, got } => match got {
                Some(g) => write!(f, "{at}: coefficient sign expected {expected} got {g}"),
                None => write!(
                    f,
                    "{at}: coefficient sign expected {expected} got a complex phase"
                ),
            },
            MismatchKind::Normalization { total } => {
                write!(f, "oracle probabilities sum to {total}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub spec: String,
    pub closed_form: bool,
    pub outcomes: usize,
    pub oracle_all_same: bool,
    pub mismatches: Vec<Mismatch>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compare the closed-form prediction for `spec` against the dense oracle.
/// Specs outside the closed form's scope are checked for normalization only.
pub fn verify_against_oracle(spec: &SwapSpec) -> Result<VerificationReport> {
    let oracle = oracle_outcomes(spec)?;
    let mut mismatches = Vec::new();

    let total: f64 = oracle.iter().map(|o| o.probability).sum();
    if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
        mismatches.push(Mismatch {
            measured: None,
            kind: MismatchKind::Normalization { total },
        });
    }

    let prediction = match predict_multi(spec) {
        Ok(p) => Some(p),
        Err(Error::ClosedFormUnavailable(_)) => None,
        Err(e) => return Err(e),
    };

    if let Some(prediction) = &prediction {
        for pair in &prediction.pairs {
            let Some(o) = oracle.iter().find(|o| o.outcome == pair.measured) else {
                mismatches.push(Mismatch {
                    measured: Some(pair.measured),
                    kind: MismatchKind::MissingFromOracle,
                });
                continue;
            };
            if (o.probability - pair.probability).abs() > PROBABILITY_TOLERANCE {
                mismatches.push(Mismatch {
                    measured: Some(pair.measured),
                    kind: MismatchKind::Probability {
                        expected: pair.probability,
                        got: o.probability,
                    },
                });
            }
            if o.residual != Some(pair.residual) {
                mismatches.push(Mismatch {
                    measured: Some(pair.measured),
                    kind: MismatchKind::Residual {
                        expected: pair.residual,
                        got: o.residual,
                    },
                });
            } else if o.phase_sign() != Some(pair.coeff_sign) {
                mismatches.push(Mismatch {
                    measured: Some(pair.measured),
                    kind: MismatchKind::CoeffSign {
                        expected: pair.coeff_sign,
                        got: o.phase_sign(),
                    },
                });
            }
        }
        for o in &oracle {
            if prediction.get(o.outcome).is_none() {
                mismatches.push(Mismatch {
                    measured: Some(o.outcome),
                    kind: MismatchKind::MissingFromPrediction,
                });
            }
        }
    }

    Ok(VerificationReport {
        spec: spec.to_string(),
        closed_form: prediction.is_some(),
        outcomes: oracle.len(),
        oracle_all_same: oracle_all_same(&oracle),
        mismatches,
    })
}

/// [`verify_against_oracle`] over many specs in parallel; reports keep input order.
pub fn verify_all(specs: &[SwapSpec]) -> Result<Vec<VerificationReport>> {
    specs.par_iter().map(verify_against_oracle).collect()
}
