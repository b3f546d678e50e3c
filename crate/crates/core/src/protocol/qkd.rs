use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::decoy::{run_decoys, DecoyKind};
use super::{
    check_register, sample_full_ghz, sample_ghz, Channel, CheckSummary, Derived, MeasuredValue,
    MeasurementRecord, PreparedState, ProtocolId, ProtocolTranscript, Transmission,
};
use crate::dense::{embed, measure_ghz, tensor};
use crate::error::{Error, Result};
use crate::label::GhzLabel;
use crate::sweep::random_sghz;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QkdResult {
    pub l: usize,
    /// Slots whose published preparations matched.
    pub key_slots: Vec<usize>,
    /// Slots whose preparations differed, used for the eavesdropping check.
    pub check_slots: Vec<usize>,
    /// `0 ⊕ i_2 ⊕ … ⊕ i_2l` per key slot.
    pub alice_parity_key: Vec<u8>,
    pub bob_parity_key: Vec<u8>,
    /// `Σ i_k·2^(2l-k)` per key slot.
    pub alice_integer_key: Vec<u64>,
    pub bob_integer_key: Vec<u64>,
    pub keys_agree: bool,
}

fn parity(label: GhzLabel) -> u8 {
    (label.index().count_ones() % 2) as u8
}

/// Run a key distribution session with `n` slots of `2l`-qubit states per party.
///
/// Per slot, Alice and Bob each prepare a random SGHZ state (Bell when `l = 1`).
/// Alice sends the last `l` particles of hers, Bob the first `l` of his. Alice
/// then GHZ-measures her first half together with Bob's first half; Bob
/// measures the two second halves. Slots with identical preparations yield
/// key material; the rest are compared against the ideal correlation.
pub fn qkd_session(n: usize, l: usize, seed: u64, channel: &Channel) -> Result<ProtocolTranscript> {
    if n == 0 || l == 0 {
        return Err(Error::InvalidArgument("qkd needs n >= 1 and l >= 1".into()));
    }
    channel.validate()?;
    check_register(4 * l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut prepared = Vec::new();
    let mut transmissions = Vec::new();
    let mut measurements = Vec::new();
    let mut decoys = Vec::new();
    let mut result = QkdResult {
        l,
        key_slots: Vec::new(),
        check_slots: Vec::new(),
        alice_parity_key: Vec::new(),
        bob_parity_key: Vec::new(),
        alice_integer_key: Vec::new(),
        bob_integer_key: Vec::new(),
        keys_agree: true,
    };
    let mut checks = CheckSummary::default();

    // register layout: Alice's state on 1..=2l, Bob's on 2l+1..=4l
    let alice_sends: Vec<usize> = (l + 1..=2 * l).collect();
    let bob_sends: Vec<usize> = (2 * l + 1..=3 * l).collect();
    let alice_measures: Vec<usize> = (1..=l).chain(2 * l + 1..=3 * l).collect();
    let bob_measures: Vec<usize> = (l + 1..=2 * l).chain(3 * l + 1..=4 * l).collect();

    for slot in 0..n {
        let a = random_sghz(2 * l, &mut rng)?;
        let b = random_sghz(2 * l, &mut rng)?;
        prepared.push(PreparedState {
            owner: "alice".into(),
            slot,
            label: a,
        });
        prepared.push(PreparedState {
            owner: "bob".into(),
            slot,
            label: b,
        });

        let ideal = tensor(&[embed(a)?, embed(b)?])?;
        let mut register = ideal.clone();

        let intercepted = channel.transmit_all(&mut register, &alice_sends, &mut rng)?;
        transmissions.push(Transmission {
            from: "alice".into(),
            to: "bob".into(),
            slot,
            particles: alice_sends.clone(),
            intercepted,
        });
        let intercepted = channel.transmit_all(&mut register, &bob_sends, &mut rng)?;
        transmissions.push(Transmission {
            from: "bob".into(),
            to: "alice".into(),
            slot,
            particles: bob_sends.clone(),
            intercepted,
        });
        if channel.decoy.per_state > 0 {
            decoys.extend(run_decoys(
                DecoyKind::BellPair,
                channel.decoy.per_state,
                "alice",
                "bob",
                channel,
                &mut rng,
            )?);
            decoys.extend(run_decoys(
                DecoyKind::BellPair,
                channel.decoy.per_state,
                "bob",
                "alice",
                channel,
                &mut rng,
            )?);
        }

        let alice = sample_ghz(&register, &alice_measures, &mut rng)?;
        let bob = sample_full_ghz(&alice.post_state, &mut rng)?;
        measurements.push(MeasurementRecord {
            party: "alice".into(),
            slot,
            particles: alice_measures.clone(),
            result: MeasuredValue::Ghz(alice.outcome),
        });
        measurements.push(MeasurementRecord {
            party: "bob".into(),
            slot,
            particles: bob_measures.clone(),
            result: MeasuredValue::Ghz(bob),
        });

        if a == b {
            result.key_slots.push(slot);
            result.alice_parity_key.push(parity(alice.outcome));
            result.bob_parity_key.push(parity(bob));
            result.alice_integer_key.push(alice.outcome.index());
            result.bob_integer_key.push(bob.index());
        } else {
            result.check_slots.push(slot);
            checks.slot_checks += 1;
            let expected = measure_ghz(&ideal, &alice_measures)?
                .into_iter()
                .find(|o| o.outcome == alice.outcome)
                .and_then(|o| o.residual);
            if expected != Some(bob) {
                checks.slot_failures += 1;
            }
        }
    }

    result.keys_agree = result.alice_parity_key == result.bob_parity_key
        && result.alice_integer_key == result.bob_integer_key;
    checks.decoy_checks = decoys.len();
    checks.decoy_failures = decoys.iter().filter(|d| !d.passed).count();
    checks.eavesdropping_detected = checks.slot_failures > 0 || checks.decoy_failures > 0;
    let success = result.keys_agree && !checks.eavesdropping_detected;

    Ok(ProtocolTranscript {
        protocol: ProtocolId::Qkd,
        seed,
        channel: *channel,
        prepared,
        transmissions,
        measurements,
        decoys,
        derived: Derived::Qkd(result),
        checks,
        success,
    })
}
