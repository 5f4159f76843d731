//! Finite bit strings, written externally as ASCII `0`/`1` text.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A finite string of bits.
///
/// Ordering is length-lexicographic: shorter strings first, then
/// lexicographic with `0 < 1`. Every census, checkpoint and report in the
/// crate is sorted this way.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits(Vec<bool>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid bit character {found:?} at position {position}")]
pub struct BitsParseError {
    pub position: usize,
    pub found: char,
}

impl Bits {
    pub fn new() -> Self {
        Bits(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        Bits(Vec::with_capacity(n))
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

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    pub fn extend_from(&mut self, other: &Bits) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    /// True when `self` is a prefix of `other` and strictly shorter.
    pub fn is_proper_prefix_of(&self, other: &Bits) -> bool {
        self.len() < other.len() && other.0.starts_with(&self.0)
    }

    /// The `len`-bit binary form of `value`, most significant bit first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        Bits((0..len).rev().map(|i| i < 64 && (value >> i) & 1 == 1).collect())
    }

    /// Like `Display`, but the empty string is written as `empty`.
    pub fn display_or<'a>(&'a self, empty: &'a str) -> DisplayOr<'a> {
        DisplayOr { bits: self, empty }
    }
}

pub struct DisplayOr<'a> {
    bits: &'a Bits,
    empty: &'a str,
}

impl fmt::Display for DisplayOr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            f.write_str(self.empty)
        } else {
            fmt::Display::fmt(self.bits, f)
        }
    }
}

impl From<Vec<bool>> for Bits {
    fn from(v: Vec<bool>) -> Self {
        Bits(v)
    }
}

impl From<&[bool]> for Bits {
    fn from(v: &[bool]) -> Self {
        Bits(v.to_vec())
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Bits(iter.into_iter().collect())
    }
}

impl FromStr for Bits {
    type Err = BitsParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(position, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                found => Err(BitsParseError { position, found }),
            })
            .collect()
    }
}

impl Ord for Bits {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Shorthand used throughout the tests: panics on non-bit characters.
pub fn bits(s: &str) -> Bits {
    s.parse().expect("bit string literal")
}
