//! MSB-first bit strings used by the allocation and DCI codecs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitStringError {
    #[error("invalid character {0:?} in bit string, expected '0' or '1'")]
    InvalidChar(char),
    #[error("invalid hex character {0:?}")]
    InvalidHex(char),
    #[error("read of {width} bits at offset {offset} exceeds length {len}")]
    OutOfRange {
        offset: usize,
        width: usize,
        len: usize,
    },
    #[error("value {value} does not fit in {width} bits")]
    Overflow { value: u64, width: usize },
}

/// An ordered sequence of bits, index 0 being the most significant.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn extend(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    /// Flip the bit at `i`. Panics if out of range.
    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    /// Append `value` as a fixed-width MSB-first field.
    pub fn append_uint(&mut self, value: u64, width: usize) -> Result<(), BitStringError> {
        if width < 64 && value >> width != 0 {
            return Err(BitStringError::Overflow { value, width });
        }
        for k in (0..width).rev() {
            self.0.push((value >> k) & 1 == 1);
        }
        Ok(())
    }

    /// Read a fixed-width MSB-first field starting at `offset`.
    pub fn read_uint(&self, offset: usize, width: usize) -> Result<u64, BitStringError> {
        if offset + width > self.0.len() || width > 64 {
            return Err(BitStringError::OutOfRange {
                offset,
                width,
                len: self.0.len(),
            });
        }
        let mut v = 0u64;
        for i in 0..width {
            v = (v << 1) | u64::from(self.0[offset + i]);
        }
        Ok(v)
    }

    pub fn slice(&self, offset: usize, width: usize) -> Result<BitString, BitStringError> {
        if offset + width > self.0.len() {
            return Err(BitStringError::OutOfRange {
                offset,
                width,
                len: self.0.len(),
            });
        }
        Ok(Self(self.0[offset..offset + width].to_vec()))
    }

    /// Hex rendering for logs and golden vectors. The bit string is padded
    /// with trailing zeros to a whole number of nibbles.
    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        for chunk in self.0.chunks(4) {
            let mut v = 0u8;
            for (i, b) in chunk.iter().enumerate() {
                if *b {
                    v |= 1 << (3 - i);
                }
            }
            out.push(char::from_digit(u32::from(v), 16).unwrap());
        }
        out
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = BitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(BitStringError::InvalidChar(other)),
            }
        }
        Ok(Self(bits))
    }
}

impl TryFrom<String> for BitString {
    type Error = BitStringError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        b.to_string()
    }
}
