//! Decoy-based eavesdropping checks.
//!
//! Two decoy kinds are supported:
//!
//! * `SinglePhoton`: the sender prepares one of `|0⟩, |1⟩, |+⟩, |−⟩`, the
//!   receiver measures in the announced basis and compares.
//! * `BellPair`: the sender keeps one half of a `|φ+⟩` and sends the other;
//!   both measure in a common basis and compare (φ+ is correlated in Z and X).
//!
//! With computational-basis intercept-resend at probability `p` and a random
//! basis, a check fails with probability `p/4` for either kind.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sample_z, BasisRule, Channel};
use crate::dense::{embed, DenseState};
use crate::error::Result;
use crate::label::GhzLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoyKind {
    SinglePhoton,
    BellPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckBasis {
    Z,
    X,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoyRecord {
    pub kind: DecoyKind,
    pub sender: String,
    pub receiver: String,
    pub basis: CheckBasis,
    /// Eavesdropper's bit, when the decoy was intercepted.
    pub intercepted: Option<u8>,
    pub sender_bit: u8,
    pub receiver_bit: u8,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecoyStats {
    pub checks: usize,
    pub failures: usize,
}

impl DecoyStats {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Fraction of failed checks; 0 when there were none.
    pub fn failure_rate(&self) -> f64 {
        if self.checks == 0 {
            0.0
        } else {
            self.failures as f64 / self.checks as f64
        }
    }
}

/// Pass/fail statistics over a run of decoy records.
pub fn decoy_check(records: &[DecoyRecord]) -> DecoyStats {
    DecoyStats {
        checks: records.len(),
        failures: records.iter().filter(|r| !r.passed).count(),
    }
}

fn pick_basis<R: Rng + ?Sized>(rule: BasisRule, rng: &mut R) -> CheckBasis {
    match rule {
        BasisRule::Computational => CheckBasis::Z,
        BasisRule::Hadamard => CheckBasis::X,
        BasisRule::Random => {
            if rng.gen_bool(0.5) {
                CheckBasis::X
            } else {
                CheckBasis::Z
            }
        }
    }
}

fn measure_in<R: Rng + ?Sized>(
    state: &mut DenseState,
    particle: usize,
    basis: CheckBasis,
    rng: &mut R,
) -> Result<u8> {
    if basis == CheckBasis::X {
        state.apply_hadamard(particle)?;
    }
    sample_z(state, particle, rng)
}

/// Run one decoy check across `channel`.
pub fn run_decoy<R: Rng + ?Sized>(
    kind: DecoyKind,
    sender: &str,
    receiver: &str,
    channel: &Channel,
    rng: &mut R,
) -> Result<DecoyRecord> {
    let basis = pick_basis(channel.decoy.basis, rng);
    let (intercepted, sender_bit, receiver_bit) = match kind {
        DecoyKind::SinglePhoton => {
            let value = u8::from(rng.gen_bool(0.5));
            let mut photon = DenseState::basis(1, usize::from(value))?;
            if basis == CheckBasis::X {
                photon.apply_hadamard(1)?;
            }
            let intercepted = channel.transmit(&mut photon, 1, rng)?;
            let got = measure_in(&mut photon, 1, basis, rng)?;
            (intercepted, value, got)
        }
        DecoyKind::BellPair => {
            let mut pair = embed(GhzLabel::PHI_PLUS)?;
            let intercepted = channel.transmit(&mut pair, 2, rng)?;
            let kept = measure_in(&mut pair, 1, basis, rng)?;
            let got = measure_in(&mut pair, 2, basis, rng)?;
            (intercepted, kept, got)
        }
    };
    Ok(DecoyRecord {
        kind,
        sender: sender.to_string(),
        receiver: receiver.to_string(),
        basis,
        intercepted: intercepted.map(|i| i.bit),
        sender_bit,
        receiver_bit,
        passed: sender_bit == receiver_bit,
    })
}

/// Run `count` decoy checks between two parties.
pub fn run_decoys<R: Rng + ?Sized>(
    kind: DecoyKind,
    count: usize,
    sender: &str,
    receiver: &str,
    channel: &Channel,
    rng: &mut R,
) -> Result<Vec<DecoyRecord>> {
    (0..count)
        .map(|_| run_decoy(kind, sender, receiver, channel, rng))
        .collect()
}
