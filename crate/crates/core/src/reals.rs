//! Computable reals built on the machine.
//!
//! - [`DigitStream`]: a program read as a decimal expansion, one digit per
//!   four emitted bits (`value mod 10`), regardless of whether it halts.
//! - [`diagonal`]: a real that differs from the `n`th stream at digit `n`,
//!   using only the digits 5 and 6 so no digit is ever 0 or 9.
//! - [`borel_cover`]: intervals of width `eps / 2^N` around listed points.
//! - [`borel_digit`]: the `k`th string of a small question language,
//!   classified 0 to 4 by grammar and budgeted answer.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::bits::Bits;
use crate::vm::{decode, InvalidReason, Program, RunOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Digit {
    Known(u8),
    Unknown,
}

#[derive(Debug, Clone)]
pub struct DigitStream {
    program: Program,
}

impl DigitStream {
    pub fn new(bits: &Bits) -> Result<Self, InvalidReason> {
        Ok(DigitStream {
            program: decode(bits)?,
        })
    }

    pub fn bits(&self) -> &Bits {
        self.program.bits()
    }

    /// Digit `n` from emitted bits `4n..4n+4`, or `Unknown` if the program
    /// halts or exhausts `budget` before emitting them.
    pub fn digit_at(&self, n: usize, budget: u64) -> Digit {
        let need = 4 * (n + 1);
        let out = self.program.run_streaming(budget, need).output;
        digit_from(&out, n)
    }

    /// The first `m` digits from a single run.
    pub fn digits(&self, m: usize, budget: u64) -> Vec<Digit> {
        let out = self.program.run_streaming(budget, 4 * m).output;
        (0..m).map(|n| digit_from(&out, n)).collect()
    }
}

fn digit_from(out: &Bits, n: usize) -> Digit {
    match out.as_slice().get(4 * n..4 * n + 4) {
        Some(group) => {
            let v = group.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b));
            Digit::Known(v % 10)
        }
        None => Digit::Unknown,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalReal {
    pub digits: Vec<u8>,
    pub verified: Vec<bool>,
}

impl DiagonalReal {
    pub fn unverified(&self) -> Vec<usize> {
        self.verified
            .iter()
            .enumerate()
            .filter(|(_, v)| !**v)
            .map(|(i, _)| i)
            .collect()
    }
}

/// `0.d1d2...dm`.
impl fmt::Display for DiagonalReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("0.")?;
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("diagonal of length {needed} needs that many streams, got {got}")]
pub struct TooFewStreams {
    pub needed: usize,
    pub got: usize,
}

pub fn diagonal(streams: &[DigitStream], m: usize, budget: u64) -> Result<DiagonalReal, TooFewStreams> {
    if streams.len() < m {
        return Err(TooFewStreams {
            needed: m,
            got: streams.len(),
        });
    }
    let (digits, verified) = streams[..m]
        .iter()
        .enumerate()
        .map(|(n, s)| match s.digit_at(n, budget) {
            Digit::Known(5) => (6, true),
            Digit::Known(_) => (5, true),
            Digit::Unknown => (5, false),
        })
        .unzip();
    Ok(DiagonalReal { digits, verified })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    /// 1-based position in the list.
    pub index: usize,
    pub center: BigRational,
    pub halfwidth: BigRational,
}

impl Interval {
    pub fn width(&self) -> BigRational {
        &self.halfwidth * BigRational::from_integer(BigInt::from(2))
    }

    pub fn lo(&self) -> BigRational {
        &self.center - &self.halfwidth
    }

    pub fn hi(&self) -> BigRational {
        &self.center + &self.halfwidth
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        (x - &self.center).abs() <= self.halfwidth
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    pub epsilon: BigRational,
    pub intervals: Vec<Interval>,
    pub total_length: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(BigRational),
    #[error("point {index} = {point} lies outside [0, 1]")]
    PointOutside { index: usize, point: BigRational },
}

fn pow2(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::one() << n)
}

/// Interval `N` is centred on point `N` with width exactly `epsilon / 2^N`;
/// the total is `epsilon * (1 - 2^-count)`.
pub fn borel_cover(points: &[BigRational], epsilon: &BigRational) -> Result<CoverReport, CoverError> {
    if !epsilon.is_positive() {
        return Err(CoverError::NonPositiveEpsilon(epsilon.clone()));
    }
    let zero = BigRational::zero();
    let one = BigRational::one();
    let mut intervals = Vec::with_capacity(points.len());
    let mut total_length = BigRational::zero();
    for (i, point) in points.iter().enumerate() {
        let index = i + 1;
        if *point < zero || *point > one {
            return Err(CoverError::PointOutside {
                index,
                point: point.clone(),
            });
        }
        let interval = Interval {
            index,
            center: point.clone(),
            halfwidth: epsilon / pow2(index + 1),
        };
        total_length += interval.width();
        intervals.push(interval);
    }
    Ok(CoverReport {
        epsilon: epsilon.clone(),
        intervals,
        total_length,
    })
}

/// Formats as `p/q`, including `0/1` and `n/1`.
pub fn fmt_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for CoverReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "EPSILON {}", fmt_ratio(&self.epsilon))?;
        for iv in &self.intervals {
            writeln!(
                f,
                "INTERVAL {} center={} halfwidth={} [{}, {}]",
                iv.index,
                fmt_ratio(&iv.center),
                fmt_ratio(&iv.halfwidth),
                fmt_ratio(&iv.lo()),
                fmt_ratio(&iv.hi()),
            )?;
        }
        writeln!(f, "TOTAL {}", fmt_ratio(&self.total_length))
    }
}

/// Symbols of the question language, in enumeration order.
pub const BOREL_ALPHABET: [char; 10] = ['H', 'O', '(', ')', ',', '.', '?', '0', '1', 'e'];

/// The `k`th string (1-based) in length-lexicographic order over
/// [`BOREL_ALPHABET`]. Panics if `k == 0`.
pub fn borel_string(k: u64) -> String {
    assert!(k >= 1, "strings are numbered from 1");
    let mut k = k;
    let mut out = Vec::new();
    while k > 0 {
        k -= 1;
        out.push(BOREL_ALPHABET[(k % 10) as usize]);
        k /= 10;
    }
    out.iter().rev().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    Halts(Bits),
    Outputs(Bits, Bits),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub predicate: Predicate,
    pub question: bool,
}

fn parse_bits_arg(s: &str) -> Option<Bits> {
    match s {
        "e" => Some(Bits::new()),
        "" => None,
        _ => s.parse().ok(),
    }
}

/// `H(bits)` or `O(bits,bits)` followed by `?` (question) or `.` (statement).
pub fn parse_sentence(text: &str) -> Option<Sentence> {
    let (body, question) = if let Some(b) = text.strip_suffix('?') {
        (b, true)
    } else {
        (text.strip_suffix('.')?, false)
    };
    let predicate = if let Some(arg) = body.strip_prefix("H(").and_then(|r| r.strip_suffix(')')) {
        Predicate::Halts(parse_bits_arg(arg)?)
    } else {
        let args = body.strip_prefix("O(")?.strip_suffix(')')?;
        let (p, s) = args.split_once(',')?;
        Predicate::Outputs(parse_bits_arg(p)?, parse_bits_arg(s)?)
    };
    Some(Sentence {
        predicate,
        question,
    })
}

/// 0 unparsable, 1 statement, 2 undecided within budget, 3 no, 4 yes.
///
/// A non-program never halts, so questions about one answer no.
pub fn classify(text: &str, budget: u64) -> u8 {
    let Some(sentence) = parse_sentence(text) else {
        return 0;
    };
    if !sentence.question {
        return 1;
    }
    let (program, expected) = match &sentence.predicate {
        Predicate::Halts(p) => (p, None),
        Predicate::Outputs(p, s) => (p, Some(s)),
    };
    let Ok(program) = decode(program) else {
        return 3;
    };
    match program.run(budget) {
        RunOutcome::Halted { output, .. } => match expected {
            Some(s) if *s != output => 3,
            _ => 4,
        },
        _ if program.detect_loop(budget).is_some() => 3,
        _ => 2,
    }
}

pub fn borel_digit(k: u64, budget: u64) -> u8 {
    classify(&borel_string(k), budget)
}
