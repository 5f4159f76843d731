//! Elegant programs: the shortest programs producing a given output.
//!
//! Minimality can only be certified relative to a length bound and a step
//! budget. A verdict is certified when every strictly shorter program was
//! seen to halt with a different output or carries a loop certificate.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::bits::Bits;
use crate::enumerator::programs_of_length;
use crate::vm::{decode, literal_program, RunOutcome};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElegantVerdict {
    pub target: Bits,
    pub witnesses: Vec<Bits>,
    pub certified: bool,
    /// Shorter programs still running at the budget with no loop certificate.
    pub unresolved: Vec<Bits>,
    pub max_len: usize,
    pub budget: u64,
}

impl ElegantVerdict {
    pub fn minimal_length(&self) -> usize {
        self.witnesses[0].len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no program of length <= {max_len} outputs {} within {budget} steps", target.display_or("the empty string"))]
pub struct NotFound {
    pub target: Bits,
    pub max_len: usize,
    pub budget: u64,
}

/// Scans programs by increasing length; the first length containing a
/// producer of `target` gives every witness at that length.
pub fn find_elegant(target: &Bits, max_len: usize, budget: u64) -> Result<ElegantVerdict, NotFound> {
    let mut unresolved = Vec::new();
    for len in 1..=max_len {
        let mut witnesses = Vec::new();
        let mut undecided = Vec::new();
        for program in programs_of_length(len) {
            let p = decode(&program).expect("generated program decodes");
            match p.run(budget) {
                RunOutcome::Halted { output, .. } if output == *target => witnesses.push(program),
                RunOutcome::Halted { .. } => {}
                _ => {
                    if p.detect_loop(budget).is_none() {
                        undecided.push(program);
                    }
                }
            }
        }
        if !witnesses.is_empty() {
            return Ok(ElegantVerdict {
                target: target.clone(),
                witnesses,
                certified: unresolved.is_empty(),
                unresolved,
                max_len,
                budget,
            });
        }
        unresolved.extend(undecided);
    }
    Err(NotFound {
        target: target.clone(),
        max_len,
        budget,
    })
}

impl fmt::Display for ElegantVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TARGET {}", self.target.display_or("-"))?;
        writeln!(f, "MINIMAL_LENGTH {}", self.minimal_length())?;
        for w in &self.witnesses {
            writeln!(f, "WITNESS {w}")?;
        }
        if self.certified {
            writeln!(
                f,
                "CERTIFIED (len<={}, budget {})",
                self.max_len, self.budget
            )
        } else {
            writeln!(
                f,
                "UNCERTIFIED (len<={}, budget {}): {} shorter programs unresolved",
                self.max_len,
                self.budget,
                self.unresolved.len()
            )?;
            for u in &self.unresolved {
                writeln!(f, "UNRESOLVED {u}")?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressionReport {
    pub facts: Bits,
    pub baseline_bits: usize,
    pub best_program: Bits,
    pub best_bits: usize,
    /// `best_bits / baseline_bits`.
    pub ratio: BigRational,
}

/// Compares the literal program for `facts` against the shortest producer
/// found by exhaustive search up to `max_len`.
pub fn compression_report(facts: &Bits, max_len: usize, budget: u64) -> CompressionReport {
    let literal = literal_program(facts);
    let search_len = max_len.min(literal.len() - 1);
    let best_program = match find_elegant(facts, search_len, budget) {
        Ok(v) => v.witnesses[0].clone(),
        Err(_) => literal.clone(),
    };
    CompressionReport {
        facts: facts.clone(),
        baseline_bits: literal.len(),
        best_bits: best_program.len(),
        ratio: BigRational::new(
            BigInt::from(best_program.len()),
            BigInt::from(literal.len()),
        ),
        best_program,
    }
}

impl fmt::Display for CompressionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FACTS {} ({} bits)", self.facts.display_or("-"), self.facts.len())?;
        writeln!(f, "BASELINE {} bits (literal program)", self.baseline_bits)?;
        writeln!(f, "BEST {} bits {}", self.best_bits, self.best_program)?;
        writeln!(f, "RATIO {}/{}", self.ratio.numer(), self.ratio.denom())?;
        writeln!(
            f,
            "NOTE literal programs cost 2 bits per fact bit plus a logarithmic header"
        )
    }
}
