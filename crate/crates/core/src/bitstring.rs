//! Measurement outcomes as fixed-width bitstrings.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as SerdeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An N-bit measurement outcome. Qubit 0 is the leftmost character and the
/// most significant bit of the packed index, matching the tensor-product
/// order used for operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bitstring {
    index: u64,
    n: usize,
}

impl Bitstring {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=64).contains(&n));
        Bitstring { index: 0, n }
    }

    pub fn from_index(index: u64, n: usize) -> Self {
        assert!((1..=64).contains(&n));
        assert!(n == 64 || index < (1u64 << n));
        Bitstring { index, n }
    }

    /// The packed computational-basis index.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bit(&self, qubit: usize) -> bool {
        assert!(qubit < self.n);
        (self.index >> (self.n - 1 - qubit)) & 1 == 1
    }

    pub fn is_all_zero(&self) -> bool {
        self.index == 0
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", if self.bit(q) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let n = s.len();
        if n == 0 || n > 64 {
            return Err(Error::Parse(format!("bitstring length {n} out of range")));
        }
        let mut index = 0u64;
        for ch in s.chars() {
            index = (index << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(Error::Parse(format!("invalid bitstring char `{other}`"))),
                };
        }
        Ok(Bitstring { index, n })
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}
