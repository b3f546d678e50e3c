use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::decoy::{run_decoys, DecoyKind};
use super::{
    sample_full_ghz, sample_ghz, Channel, CheckSummary, Derived, MeasuredValue, MeasurementRecord,
    PreparedState, ProtocolId, ProtocolTranscript, Transmission,
};
use crate::dense::{embed, tensor};
use crate::error::{Error, Result};
use crate::label::{make_label, BitString, GhzLabel, Sign, MAX_LABEL_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QpcVerdict {
    Equal,
    NotEqual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QpcOptions {
    /// Compare `X·M` and `Y·M` instead of `X` and `Y`.
    pub amplify: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QpcResult {
    pub bits: usize,
    pub amplify: Option<u64>,
    pub verdict: QpcVerdict,
    /// 1-based bit positions (most significant first) where TP saw B1 ≠ B2.
    pub mismatched_bits: Vec<usize>,
    /// Ground truth `X == Y`, recorded for auditing the simulation.
    pub truth_equal: bool,
}

fn bit_state(bit: u8) -> Result<GhzLabel> {
    make_label(BitString::from_bits(&[0, bit])?, Sign::Plus)
}

/// Private comparison of `x` and `y` through a third party.
///
/// For every bit `h`, Alice prepares `(|0 x_h⟩ + |1 x̄_h⟩)/√2` and Bob the same
/// with `y_h`; both send their particles to TP with single-photon decoys. TP
/// Bell-measures the two first particles (B1), then the two second particles
/// (B2), and declares equality when B1 = B2 for every bit.
pub fn qpc_session(
    x: u64,
    y: u64,
    n_bits: usize,
    seed: u64,
    channel: &Channel,
    options: QpcOptions,
) -> Result<ProtocolTranscript> {
    if n_bits == 0 || n_bits > MAX_LABEL_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "bit width {n_bits} outside 1..={MAX_LABEL_QUBITS}"
        )));
    }
    if x >> n_bits != 0 || y >> n_bits != 0 {
        return Err(Error::InvalidArgument(format!(
            "inputs must be below 2^{n_bits}"
        )));
    }
    channel.validate()?;

    let (x_enc, y_enc, bits) = match options.amplify {
        None => (x, y, n_bits),
        Some(0) => {
            return Err(Error::InvalidArgument(
                "amplification factor must be positive".into(),
            ))
        }
        Some(m) => {
            let bits = n_bits + (64 - m.leading_zeros() as usize);
            if bits > MAX_LABEL_QUBITS {
                return Err(Error::InvalidArgument(format!(
                    "amplified width {bits} exceeds {MAX_LABEL_QUBITS}"
                )));
            }
            (x * m, y * m, bits)
        }
    };
    let bit_of = |v: u64, h: usize| ((v >> (bits - h)) & 1) as u8;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prepared = Vec::new();
    let mut transmissions = Vec::new();
    let mut measurements = Vec::new();
    let mut decoys = Vec::new();
    let mut mismatched_bits = Vec::new();

    // register: Alice's p1 p2 on 1,2 and Bob's q1 q2 on 3,4
    for h in 1..=bits {
        let a = bit_state(bit_of(x_enc, h))?;
        let b = bit_state(bit_of(y_enc, h))?;
        prepared.push(PreparedState {
            owner: "alice".into(),
            slot: h,
            label: a,
        });
        prepared.push(PreparedState {
            owner: "bob".into(),
            slot: h,
            label: b,
        });

        let mut register = tensor(&[embed(a)?, embed(b)?])?;
        for (from, particles) in [("alice", [1, 2]), ("bob", [3, 4])] {
            let intercepted = channel.transmit_all(&mut register, &particles, &mut rng)?;
            transmissions.push(Transmission {
                from: from.into(),
                to: "tp".into(),
                slot: h,
                particles: particles.to_vec(),
                intercepted,
            });
            decoys.extend(run_decoys(
                DecoyKind::SinglePhoton,
                channel.decoy.per_state,
                from,
                "tp",
                channel,
                &mut rng,
            )?);
        }

        let first = sample_ghz(&register, &[1, 3], &mut rng)?;
        let second = sample_full_ghz(&first.post_state, &mut rng)?;
        measurements.push(MeasurementRecord {
            party: "tp".into(),
            slot: h,
            particles: vec![1, 3],
            result: MeasuredValue::Ghz(first.outcome),
        });
        measurements.push(MeasurementRecord {
            party: "tp".into(),
            slot: h,
            particles: vec![2, 4],
            result: MeasuredValue::Ghz(second),
        });
        if first.outcome != second {
            mismatched_bits.push(h);
        }
    }

    let verdict = if mismatched_bits.is_empty() {
        QpcVerdict::Equal
    } else {
        QpcVerdict::NotEqual
    };
    let truth_equal = x == y;
    let mut checks = CheckSummary {
        decoy_checks: decoys.len(),
        decoy_failures: decoys.iter().filter(|d| !d.passed).count(),
        ..CheckSummary::default()
    };
    checks.eavesdropping_detected = checks.decoy_failures > 0;
    let success = !checks.eavesdropping_detected && (verdict == QpcVerdict::Equal) == truth_equal;

    Ok(ProtocolTranscript {
        protocol: ProtocolId::Qpc,
        seed,
        channel: *channel,
        prepared,
        transmissions,
        measurements,
        decoys,
        derived: Derived::Qpc(QpcResult {
            bits,
            amplify: options.amplify,
            verdict,
            mismatched_bits,
            truth_equal,
        }),
        checks,
        success,
    })
}
