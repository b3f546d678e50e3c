//! Canonical labels for Bell, GHZ and SGHZ qubit states.
//!
//! An `m`-qubit GHZ-class basis state is written as
//!
//! ```text
//! |G(m, d, ±)⟩ = (|B(d)⟩ ± |B(2^m - d - 1)⟩) / √2,   0 ≤ d < 2^(m-1)
//! ```
//!
//! where `B(d)` is the `m`-bit binary expansion of `d` with particle 1 as the
//! most significant bit. The leading bit of `B(d)` is always 0. Bell states are
//! the `m = 2` members: `φ± = (2, 0, ±)` and `ψ± = (2, 1, ±)`.
//!
//! Labels discard global phase. Writing the `1`-led branch first and
//! canonicalizing gives the same label; for the `-` sign this drops a factor
//! of `-1`, which [`make_label_with_phase`] reports to callers that need it.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest qubit count a label can carry (bitstrings are packed into a `u64`).
pub const MAX_LABEL_QUBITS: usize = 63;

/// Relative sign between the two branches of a GHZ-class state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_symbol(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }

    /// Product of a sequence of signs; the empty product is `Plus`.
    pub fn product<I: IntoIterator<Item = Sign>>(signs: I) -> Sign {
        signs.into_iter().fold(Sign::Plus, |acc, s| acc * s)
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_char(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let c = char::deserialize(deserializer)?;
        Sign::from_symbol(c).ok_or_else(|| serde::de::Error::custom(format!("invalid sign {c:?}")))
    }
}

/// Fixed-length string of bits. Position 1 is the most significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    value: u64,
    len: usize,
}

impl BitString {
    pub fn new(value: u64, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_LABEL_QUBITS {
            return Err(Error::InvalidArity(format!(
                "bitstring length {len} outside 1..={MAX_LABEL_QUBITS}"
            )));
        }
        if value >> len != 0 {
            return Err(Error::InvalidArgument(format!(
                "value {value} does not fit in {len} bits"
            )));
        }
        Ok(Self { value, len })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut value = 0u64;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidArgument(format!(
                    "bit value {b} is not 0 or 1"
                )));
            }
            value = (value << 1) | u64::from(b);
        }
        Self::new(value, bits.len())
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn len(self) -> usize {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// Bit at 1-based `position` (1 = most significant).
    pub fn bit(self, position: usize) -> u8 {
        assert!(
            position >= 1 && position <= self.len,
            "bit position out of range"
        );
        ((self.value >> (self.len - position)) & 1) as u8
    }

    pub fn leading(self) -> u8 {
        self.bit(1)
    }

    fn mask(self) -> u64 {
        (1u64 << self.len) - 1
    }

    /// Logical NOT of every bit.
    pub fn negate(self) -> Self {
        Self {
            value: !self.value & self.mask(),
            len: self.len,
        }
    }

    pub fn concat(self, other: BitString) -> Result<Self> {
        let len = self.len + other.len;
        if len > MAX_LABEL_QUBITS {
            return Err(Error::InvalidArity(format!(
                "concatenated length {len} exceeds {MAX_LABEL_QUBITS}"
            )));
        }
        Ok(Self {
            value: (self.value << other.len) | other.value,
            len,
        })
    }

    /// Split into the first `at` bits and the remaining `len - at` bits.
    pub fn split_at(self, at: usize) -> (BitString, BitString) {
        assert!(at >= 1 && at < self.len, "split point out of range");
        let tail_len = self.len - at;
        let head = Self {
            value: self.value >> tail_len,
            len: at,
        };
        let tail = Self {
            value: self.value & ((1u64 << tail_len) - 1),
            len: tail_len,
        };
        (head, tail)
    }

    pub fn count_ones(self) -> u32 {
        self.value.count_ones()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 1..=self.len {
            write!(f, "{}", self.bit(k))?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(Error::Parse {
                    input: s.to_string(),
                    reason: format!("unexpected character {c:?} in bitstring"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

/// Canonical label `(m, d, sign)` of a GHZ-class basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GhzLabel {
    m: usize,
    d: u64,
    sign: Sign,
}

impl GhzLabel {
    pub const PHI_PLUS: GhzLabel = GhzLabel {
        m: 2,
        d: 0,
        sign: Sign::Plus,
    };
    pub const PHI_MINUS: GhzLabel = GhzLabel {
        m: 2,
        d: 0,
        sign: Sign::Minus,
    };
    pub const PSI_PLUS: GhzLabel = GhzLabel {
        m: 2,
        d: 1,
        sign: Sign::Plus,
    };
    pub const PSI_MINUS: GhzLabel = GhzLabel {
        m: 2,
        d: 1,
        sign: Sign::Minus,
    };

    pub fn new(m: usize, d: u64, sign: Sign) -> Result<Self> {
        if !(2..=MAX_LABEL_QUBITS).contains(&m) {
            return Err(Error::InvalidArity(format!(
                "GHZ label needs 2..={MAX_LABEL_QUBITS} qubits, got {m}"
            )));
        }
        if d >= 1u64 << (m - 1) {
            return Err(Error::InvalidArgument(format!(
                "index {d} out of range for {m} qubits (must be < {})",
                1u64 << (m - 1)
            )));
        }
        Ok(Self { m, d, sign })
    }

    pub fn num_qubits(self) -> usize {
        self.m
    }

    pub fn index(self) -> u64 {
        self.d
    }

    pub fn sign(self) -> Sign {
        self.sign
    }

    pub fn with_sign(self, sign: Sign) -> Self {
        Self { sign, ..self }
    }

    /// The `0`-led branch `B(d)`.
    pub fn bits(self) -> BitString {
        BitString {
            value: self.d,
            len: self.m,
        }
    }

    /// Basis index of the `1`-led branch, `2^m - d - 1`.
    pub fn partner_index(self) -> u64 {
        (1u64 << self.m) - self.d - 1
    }

    pub fn is_bell(self) -> bool {
        self.m == 2
    }

    /// Conventional name for Bell labels (`phi+`, `psi-`, ...).
    pub fn bell_name(self) -> Option<&'static str> {
        match (self.m, self.d, self.sign) {
            (2, 0, Sign::Plus) => Some("phi+"),
            (2, 0, Sign::Minus) => Some("phi-"),
            (2, 1, Sign::Plus) => Some("psi+"),
            (2, 1, Sign::Minus) => Some("psi-"),
            _ => None,
        }
    }
}

impl fmt::Display for GhzLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.m, self.d, self.sign)
    }
}

impl FromStr for GhzLabel {
    type Err = Error;

    /// Accepts `m:d:±` (e.g. `4:6:+`) or `GHZ(bits,±)` (e.g. `GHZ(0110,+)`).
    /// The bitstring form is canonicalized, so `GHZ(1001,+)` is `4:6:+`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        let parse_sign = |part: &str| {
            let mut chars = part.trim().chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Sign::from_symbol(c).ok_or_else(|| err("sign must be + or -")),
                _ => Err(err("sign must be + or -")),
            }
        };

        if t.len() >= 4 && t[..4].eq_ignore_ascii_case("ghz(") {
            let inner = t[4..]
                .strip_suffix(')')
                .ok_or_else(|| err("missing closing parenthesis"))?;
            let (bits, sign) = inner
                .split_once(',')
                .ok_or_else(|| err("expected GHZ(bits,sign)"))?;
            let bits: BitString = bits
                .trim()
                .parse()
                .map_err(|_| err("malformed bitstring"))?;
            let sign = parse_sign(sign)?;
            return make_label(bits, sign).map_err(|e| err(&e.to_string()));
        }

        let parts: Vec<&str> = t.split(':').collect();
        if parts.len() != 3 {
            return Err(err("expected m:d:sign or GHZ(bits,sign)"));
        }
        let m: usize = parts[0]
            .trim()
            .parse()
            .map_err(|_| err("qubit count is not an integer"))?;
        let d: u64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| err("index is not an integer"))?;
        let sign = parse_sign(parts[2])?;
        GhzLabel::new(m, d, sign).map_err(|e| err(&e.to_string()))
    }
}

impl Serialize for GhzLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GhzLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Canonical label for the state `(|bits⟩ + sign·|bits̄⟩)/√2`.
pub fn make_label(bits: BitString, sign: Sign) -> Result<GhzLabel> {
    make_label_with_phase(bits, sign).map(|(label, _)| label)
}

/// Like [`make_label`], also returning the global phase `p` such that
/// `(|bits⟩ + sign·|bits̄⟩)/√2 = p·|label⟩`.
pub fn make_label_with_phase(bits: BitString, sign: Sign) -> Result<(GhzLabel, Sign)> {
    if bits.len() < 2 {
        return Err(Error::InvalidArity(format!(
            "GHZ label needs at least 2 qubits, got {}",
            bits.len()
        )));
    }
    if bits.leading() == 0 {
        Ok((GhzLabel::new(bits.len(), bits.value(), sign)?, Sign::Plus))
    } else {
        // |b⟩ + s|b̄⟩ = s(|b̄⟩ + s|b⟩)
        let canonical = bits.negate();
        Ok((GhzLabel::new(bits.len(), canonical.value(), sign)?, sign))
    }
}

/// `d = Σ_{k=2}^{m} b_k·2^(m-k)` for a bitstring with leading bit 0.
pub fn ghz_index(bits: BitString) -> Result<u64> {
    if bits.leading() != 0 {
        return Err(Error::NotCanonical(bits.to_string()));
    }
    Ok(bits.value())
}

/// Which SGHZ condition the two halves of a canonical bitstring satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfRelation {
    /// Second half equals the first.
    Equal,
    /// Second half is the bitwise negation of the first.
    Negated,
}

/// A GHZ label of even size `2n` whose halves are equal or negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SghzLabel {
    inner: GhzLabel,
    half_relation: HalfRelation,
}

impl SghzLabel {
    pub fn label(self) -> GhzLabel {
        self.inner
    }

    pub fn half_relation(self) -> HalfRelation {
        self.half_relation
    }

    pub fn half_len(self) -> usize {
        self.inner.m / 2
    }

    pub fn sign(self) -> Sign {
        self.inner.sign
    }

    /// First and second halves of the canonical bitstring.
    pub fn halves(self) -> (BitString, BitString) {
        self.inner.bits().split_at(self.half_len())
    }
}

impl fmt::Display for SghzLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.inner.fmt(f)
    }
}

/// Classify `label` as an SGHZ state, or `None` when it is not one.
pub fn classify_sghz(label: GhzLabel) -> Option<SghzLabel> {
    if !label.m.is_multiple_of(2) {
        return None;
    }
    let (first, second) = label.bits().split_at(label.m / 2);
    let half_relation = if first == second {
        HalfRelation::Equal
    } else if first == second.negate() {
        HalfRelation::Negated
    } else {
        return None;
    };
    Some(SghzLabel {
        inner: label,
        half_relation,
    })
}

/// All `2^m` labels of the `m`-qubit GHZ basis, `d` ascending and `+` before `-`.
pub fn enumerate_basis(m: usize) -> Result<Vec<GhzLabel>> {
    if !(2..=MAX_LABEL_QUBITS).contains(&m) {
        return Err(Error::InvalidArity(format!(
            "GHZ basis needs 2..={MAX_LABEL_QUBITS} qubits, got {m}"
        )));
    }
    let half = 1u64 << (m - 1);
    let mut out = Vec::with_capacity(2 * half as usize);
    for d in 0..half {
        out.push(GhzLabel {
            m,
            d,
            sign: Sign::Plus,
        });
        out.push(GhzLabel {
            m,
            d,
            sign: Sign::Minus,
        });
    }
    Ok(out)
}

/// Every SGHZ label on `m` qubits, in basis enumeration order.
pub fn enumerate_sghz(m: usize) -> Result<Vec<SghzLabel>> {
    if !m.is_multiple_of(2) {
        return Err(Error::InvalidArity(format!(
            "SGHZ states have an even qubit count, got {m}"
        )));
    }
    Ok(enumerate_basis(m)?
        .into_iter()
        .filter_map(classify_sghz)
        .collect())
}

/// An ordered list of GHZ-class states with a global particle numbering
/// `1..=M`, assigned state by state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeSystem {
    states: Vec<GhzLabel>,
    offsets: Vec<usize>,
}

impl CompositeSystem {
    pub fn new(states: Vec<GhzLabel>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidArity(
                "composite system needs at least one state".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(states.len());
        let mut next = 0;
        for s in &states {
            offsets.push(next);
            next += s.num_qubits();
        }
        Ok(Self { states, offsets })
    }

    pub fn states(&self) -> &[GhzLabel] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn total_qubits(&self) -> usize {
        self.states.iter().map(|s| s.num_qubits()).sum()
    }

    /// Global index (1-based) of `position` (1-based) within state `state`.
    pub fn global_index(&self, state: usize, position: usize) -> Option<usize> {
        let label = self.states.get(state)?;
        (1..=label.num_qubits())
            .contains(&position)
            .then(|| self.offsets[state] + position)
    }

    /// `(state, position)` of global particle `particle`, both 0-based/1-based
    /// respectively.
    pub fn locate(&self, particle: usize) -> Option<(usize, usize)> {
        if particle == 0 || particle > self.total_qubits() {
            return None;
        }
        let state = self.offsets.partition_point(|&o| o < particle) - 1;
        Some((state, particle - self.offsets[state]))
    }
}
