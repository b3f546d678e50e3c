use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::decoy::{run_decoys, DecoyKind};
use super::{
    check_register, sample_ghz, sample_z, Channel, CheckSummary, DecoyConfig, Derived,
    MeasuredValue, MeasurementRecord, PreparedState, ProtocolId, ProtocolTranscript, Transmission,
};
use crate::dense::{embed, tensor};
use crate::error::{Error, Result};
use crate::label::{BitString, GhzLabel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QssResult {
    pub parties: usize,
    pub alice_outcome: GhzLabel,
    pub secret: u64,
    /// Bob_1 … Bob_n computational-basis results, concatenated.
    pub bob_bits: String,
    pub reconstructed: u64,
    pub reconstruction_ok: bool,
}

/// Alice's secret: the index `Σ i_k·2^(n-k)` of her GHZ outcome.
pub fn secret_from_outcome(outcome: GhzLabel) -> u64 {
    outcome.index()
}

/// Recover the secret from the Bobs' joint bits, flipping every bit first
/// when the leading one is 1 (so `1001` reads as `0110`).
pub fn reconstruct_secret(bits: BitString) -> u64 {
    if bits.leading() == 1 {
        bits.negate().value()
    } else {
        bits.value()
    }
}

/// Share a secret from Alice to `n_parties` Bobs.
///
/// Alice prepares `n` copies of `|φ+⟩`, sends the first particle of copy `h`
/// to Bob_h, and GHZ-measures the second particles. Her outcome index is the
/// secret; the Bobs' particles collapse into the same GHZ state, so their
/// joint computational-basis bits equal her bitstring or its negation.
/// `decoy_m` Bell-pair decoys guard each Bob's channel.
pub fn qss_session(
    n_parties: usize,
    seed: u64,
    channel: &Channel,
    decoy_m: usize,
) -> Result<ProtocolTranscript> {
    if n_parties < 2 {
        return Err(Error::InvalidArgument(
            "secret sharing needs at least 2 parties".into(),
        ));
    }
    check_register(2 * n_parties)?;
    channel.validate()?;
    let channel = Channel {
        decoy: DecoyConfig {
            per_state: decoy_m,
            ..channel.decoy
        },
        ..*channel
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let bob = |h: usize| format!("bob{h}");
    let pairs = (0..n_parties)
        .map(|_| embed(GhzLabel::PHI_PLUS))
        .collect::<Result<Vec<_>>>()?;
    let mut register = tensor(&pairs)?;
    let prepared = (1..=n_parties)
        .map(|h| PreparedState {
            owner: "alice".into(),
            slot: h,
            label: GhzLabel::PHI_PLUS,
        })
        .collect();

    // copy h holds particles 2h-1 (sent to Bob_h) and 2h (kept)
    let mut transmissions = Vec::new();
    let mut decoys = Vec::new();
    for h in 1..=n_parties {
        let intercepted = channel.transmit_all(&mut register, &[2 * h - 1], &mut rng)?;
        transmissions.push(Transmission {
            from: "alice".into(),
            to: bob(h),
            slot: h,
            particles: vec![2 * h - 1],
            intercepted,
        });
        decoys.extend(run_decoys(
            DecoyKind::BellPair,
            decoy_m,
            "alice",
            &bob(h),
            &channel,
            &mut rng,
        )?);
    }

    let kept: Vec<usize> = (1..=n_parties).map(|h| 2 * h).collect();
    let alice = sample_ghz(&register, &kept, &mut rng)?;
    let mut measurements = vec![MeasurementRecord {
        party: "alice".into(),
        slot: 0,
        particles: kept,
        result: MeasuredValue::Ghz(alice.outcome),
    }];

    // the post-state orders the Bobs' particles as Bob_1 … Bob_n
    let mut bobs_state = alice.post_state;
    let mut bits = Vec::with_capacity(n_parties);
    for h in 1..=n_parties {
        let bit = sample_z(&mut bobs_state, h, &mut rng)?;
        bits.push(bit);
        measurements.push(MeasurementRecord {
            party: bob(h),
            slot: h,
            particles: vec![2 * h - 1],
            result: MeasuredValue::Bits(bit.to_string()),
        });
    }
    let bob_bits = BitString::from_bits(&bits)?;
    let secret = secret_from_outcome(alice.outcome);
    let reconstructed = reconstruct_secret(bob_bits);

    let mut checks = CheckSummary {
        decoy_checks: decoys.len(),
        decoy_failures: decoys.iter().filter(|d| !d.passed).count(),
        ..CheckSummary::default()
    };
    checks.eavesdropping_detected = checks.decoy_failures > 0;
    let reconstruction_ok = reconstructed == secret;

    Ok(ProtocolTranscript {
        protocol: ProtocolId::Qss,
        seed,
        channel,
        prepared,
        transmissions,
        measurements,
        decoys,
        derived: Derived::Qss(QssResult {
            parties: n_parties,
            alice_outcome: alice.outcome,
            secret,
            bob_bits: bob_bits.to_string(),
            reconstructed,
            reconstruction_ok,
        }),
        checks,
        success: reconstruction_ok && !checks.eavesdropping_detected,
    })
}
