//! Seeded simulations of the swap-based key distribution, private comparison
//! and secret sharing protocols.
//!
//! All measurement statistics come from the dense oracle. Each session owns a
//! single ChaCha8 stream seeded from the caller's seed, so a transcript is a
//! pure function of its inputs.

mod channel;
pub mod decoy;
mod qkd;
mod qpc;
mod qss;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use channel::{BasisRule, Channel, DecoyConfig, Eavesdropper};
pub use decoy::{decoy_check, DecoyKind, DecoyRecord, DecoyStats};
pub use qkd::{qkd_session, QkdResult};
pub use qpc::{qpc_session, QpcOptions, QpcResult, QpcVerdict};
pub use qss::{qss_session, reconstruct_secret, secret_from_outcome, QssResult};

use crate::dense::{ghz_distribution, measure_ghz, DenseState, MeasurementOutcome};
use crate::error::{Error, Result};
use crate::label::GhzLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolId {
    Qkd,
    Qpc,
    Qss,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreparedState {
    pub owner: String,
    pub slot: usize,
    pub label: GhzLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interception {
    pub particle: usize,
    pub bit: u8,
}

/// Particles moved between parties. Particle numbers are local to the slot's
/// register.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transmission {
    pub from: String,
    pub to: String,
    pub slot: usize,
    pub particles: Vec<usize>,
    pub intercepted: Vec<Interception>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasuredValue {
    Ghz(GhzLabel),
    Bits(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub party: String,
    pub slot: usize,
    pub particles: Vec<usize>,
    pub result: MeasuredValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derived {
    Qkd(QkdResult),
    Qpc(QpcResult),
    Qss(QssResult),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CheckSummary {
    pub decoy_checks: usize,
    pub decoy_failures: usize,
    pub slot_checks: usize,
    pub slot_failures: usize,
    pub eavesdropping_detected: bool,
}

/// Ordered record of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub protocol: ProtocolId,
    pub seed: u64,
    pub channel: Channel,
    pub prepared: Vec<PreparedState>,
    pub transmissions: Vec<Transmission>,
    pub measurements: Vec<MeasurementRecord>,
    pub decoys: Vec<DecoyRecord>,
    pub derived: Derived,
    pub checks: CheckSummary,
    /// Protocol goal met and no eavesdropping detected.
    pub success: bool,
}

impl ProtocolTranscript {
    /// Recount the decoy records carried by this transcript.
    pub fn decoy_stats(&self) -> DecoyStats {
        decoy_check(&self.decoys)
    }
}

fn sample_index<R: Rng + ?Sized>(weights: impl Iterator<Item = f64>, rng: &mut R) -> usize {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        acc += w;
        last = i;
        if r < acc {
            return i;
        }
    }
    last
}

/// Sample one branch of a GHZ measurement on `subset`.
fn sample_ghz<R: Rng + ?Sized>(
    state: &DenseState,
    subset: &[usize],
    rng: &mut R,
) -> Result<MeasurementOutcome> {
    let mut outcomes = measure_ghz(state, subset)?;
    let i = sample_index(outcomes.iter().map(|o| o.probability), rng);
    Ok(outcomes.swap_remove(i))
}

/// Sample a GHZ-basis measurement of the whole register.
fn sample_full_ghz<R: Rng + ?Sized>(state: &DenseState, rng: &mut R) -> Result<GhzLabel> {
    let dist = ghz_distribution(state)?;
    let i = sample_index(dist.iter().map(|(_, p)| *p), rng);
    Ok(dist[i].0)
}

/// Sample a computational-basis measurement of `particle` and collapse.
fn sample_z<R: Rng + ?Sized>(state: &mut DenseState, particle: usize, rng: &mut R) -> Result<u8> {
    let p1 = state.probability_of_one(particle)?;
    let bit = u8::from(rng.gen::<f64>() < p1);
    state.project_qubit(particle, bit)?;
    Ok(bit)
}

fn check_register(qubits: usize) -> Result<()> {
    if qubits > crate::dense::MAX_DENSE_QUBITS {
        Err(Error::ResourceLimit {
            qubits,
            max: crate::dense::MAX_DENSE_QUBITS,
        })
    } else {
        Ok(())
    }
}
