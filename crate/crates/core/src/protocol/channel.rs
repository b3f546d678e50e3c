use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sample_z, Interception};
use crate::dense::DenseState;
use crate::error::{Error, Result};

/// Attack applied to every particle crossing the channel.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Eavesdropper {
    #[default]
    None,
    /// Intercept-resend in the computational basis: with `probability`, the
    /// particle is measured and a fresh one in the observed state forwarded.
    InterceptMeasure { probability: f64 },
}

impl Eavesdropper {
    pub fn probability(self) -> f64 {
        match self {
            Eavesdropper::None => 0.0,
            Eavesdropper::InterceptMeasure { probability } => probability,
        }
    }
}

/// How the check basis of each decoy is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisRule {
    /// Z or X with equal probability.
    #[default]
    Random,
    Computational,
    Hadamard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecoyConfig {
    /// Decoy checks per transmitted data state.
    pub per_state: usize,
    pub basis: BasisRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Channel {
    pub eavesdropper: Eavesdropper,
    pub decoy: DecoyConfig,
}

impl Channel {
    pub fn clean() -> Self {
        Self::default()
    }

    pub fn intercept(probability: f64) -> Self {
        Self {
            eavesdropper: Eavesdropper::InterceptMeasure { probability },
            ..Self::default()
        }
    }

    pub fn with_decoys(mut self, per_state: usize) -> Self {
        self.decoy.per_state = per_state;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.eavesdropper.probability();
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "intercept probability {p} outside [0, 1]"
            )));
        }
        Ok(())
    }

    /// Send `particle` of `state` across the channel, letting the eavesdropper
    /// act on it.
    pub(crate) fn transmit<R: Rng + ?Sized>(
        &self,
        state: &mut DenseState,
        particle: usize,
        rng: &mut R,
    ) -> Result<Option<Interception>> {
        match self.eavesdropper {
            Eavesdropper::None => Ok(None),
            Eavesdropper::InterceptMeasure { probability } => {
                if rng.gen::<f64>() < probability {
                    let bit = sample_z(state, particle, rng)?;
                    Ok(Some(Interception { particle, bit }))
                } else {
                    Ok(None)
                }
            }
        }
    }

    /// Send several particles, collecting interceptions.
    pub(crate) fn transmit_all<R: Rng + ?Sized>(
        &self,
        state: &mut DenseState,
        particles: &[usize],
        rng: &mut R,
    ) -> Result<Vec<Interception>> {
        let mut out = Vec::new();
        for &p in particles {
            out.extend(self.transmit(state, p, rng)?);
        }
        Ok(out)
    }
}
