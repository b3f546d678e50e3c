//! Entanglement swapping for Bell, GHZ and SGHZ qubit states.
//!
//! * [`label`]: canonical `(m, d, ±)` labels and their text encoding.
//! * [`dense`]: brute-force state vectors used as ground truth.
//! * [`swap`]: closed-form swap outcomes and the "same state" predicates,
//!   checked against [`dense`].
//! * [`protocol`]: key distribution, private comparison and secret sharing
//!   simulations driven entirely by the dense engine.

pub mod dense;
pub mod error;
pub mod label;
pub mod protocol;
pub mod swap;
pub mod sweep;

pub use error::{Error, Result};
pub use label::{GhzLabel, HalfRelation, SghzLabel, Sign};
