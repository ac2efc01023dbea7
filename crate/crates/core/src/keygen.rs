//! Minutiae-to-bits encoding and the drop-and-swap reduction to a 64-bit key.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::minutiae::MinutiaeSet;

/// Bits per encoded minutia record.
pub const RECORD_BITS: usize = 8;
/// Shortest usable key material after trimming to a multiple of 64.
pub const MIN_KEY_MATERIAL_BITS: usize = 128;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum KeyError {
    #[error(
        "insufficient minutiae: key derivation needs at least {required} minutiae ({} bits), found {found} ({bits} bits)",
        required * RECORD_BITS
    )]
    InsufficientMinutiae {
        found: usize,
        required: usize,
        bits: usize,
    },
    #[error("a DES key is exactly 16 hex digits, got {0} characters")]
    BadKeyWidth(usize),
    #[error("invalid hex digit {0:?} in key")]
    BadKeyDigit(char),
}

/// Ordered bit sequence with explicit length.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: usize) {
        for i in (0..width).rev() {
            self.bits.push(value >> i & 1 == 1);
        }
    }

    pub fn to_string_01(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        Self { bits }
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().collect(),
        }
    }
}

/// 64-bit DES key, bit 1 (FIPS numbering) in the most significant position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DesKey(u64);

impl DesKey {
    pub const fn new(bits: u64) -> Self {
        Self(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn to_hex(self) -> String {
        format!("{:016X}", self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, KeyError> {
        let s = s.trim();
        let width = s.chars().count();
        if width != 16 {
            return Err(KeyError::BadKeyWidth(width));
        }
        let mut v = 0u64;
        for c in s.chars() {
            let d = c.to_digit(16).ok_or(KeyError::BadKeyDigit(c))?;
            v = v << 4 | d as u64;
        }
        Ok(Self(v))
    }

    /// Exactly 64 bits, first bit most significant.
    pub fn from_bit_string(bits: &BitString) -> Option<Self> {
        (bits.len() == 64).then(|| Self(bits.bits.iter().fold(0u64, |acc, &b| acc << 1 | b as u64)))
    }
}

impl fmt::Display for DesKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016X}", self.0)
    }
}

impl FromStr for DesKey {
    type Err = KeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_hex(s)
    }
}

pub fn key_to_hex(key: DesKey) -> String {
    key.to_hex()
}

/// One byte per minutia in (y, x) order: high nibble `x mod 16`, low nibble `y mod 16`.
pub fn encode_minutiae(set: &MinutiaeSet) -> BitString {
    let mut out = BitString::new();
    for m in set.minutiae() {
        let record = ((m.x % 16) << 4 | (m.y % 16)) as u64;
        out.push_bits(record, RECORD_BITS);
    }
    out
}

/// Lengths involved in reducing a key set of a given size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionPlan {
    /// Input length.
    pub input_bits: usize,
    /// Trailing bits dropped so the length divides by 64.
    pub remainder: usize,
    /// Length after trimming.
    pub usable_bits: usize,
    /// Drop-and-swap passes needed to reach 64 bits.
    pub passes: usize,
}

impl ReductionPlan {
    pub fn for_len(input_bits: usize) -> Self {
        let remainder = input_bits % 64;
        let usable_bits = input_bits - remainder;
        Self {
            input_bits,
            remainder,
            usable_bits,
            passes: (usable_bits / 64).saturating_sub(1),
        }
    }
}

/// Compresses a key set to 64 bits.
///
/// Trailing `len mod 64` bits are discarded. Then, while more than 64 bits
/// remain, the leftmost 32 and rightmost 32 bits are dropped and the two
/// halves of what is left swap places.
pub fn reduce_key(keyset: &BitString) -> Result<DesKey, KeyError> {
    let plan = ReductionPlan::for_len(keyset.len());
    if plan.usable_bits < MIN_KEY_MATERIAL_BITS {
        return Err(KeyError::InsufficientMinutiae {
            found: keyset.len() / RECORD_BITS,
            required: MIN_KEY_MATERIAL_BITS / RECORD_BITS,
            bits: keyset.len(),
        });
    }
    let mut work = BitString::from(keyset.bits[..plan.usable_bits].to_vec());
    while work.len() > 64 {
        let inner = &work.bits[32..work.len() - 32];
        let (left, right) = inner.split_at(inner.len() / 2);
        work = right.iter().chain(left).copied().collect();
    }
    Ok(DesKey::from_bit_string(&work).expect("reduction ends at 64 bits"))
}
