//! Exact lower bounds on the halting probability of the OMV machine.
//!
//! Each halting program `p` contributes `2^-|p|`. A census only ever sees
//! part of the halting set, so the sum is a lower bound; non-halting mass
//! that the census cannot rule out may still change any bit of the true
//! value.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bits::Bits;
use crate::dyadic::Dyadic;
use crate::enumerator::{EnumState, HaltRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusSource {
    pub max_len: usize,
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaBound {
    value: Dyadic,
    contributing: BTreeSet<Bits>,
    source: Option<CensusSource>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OmegaError {
    #[error("program {0} already contributes to the bound")]
    Duplicate(Bits),
    #[error("bounds overlap on program {0}")]
    Overlap(Bits),
}

impl Default for OmegaBound {
    fn default() -> Self {
        Self::empty()
    }
}

impl OmegaBound {
    pub fn empty() -> Self {
        OmegaBound {
            value: Dyadic::zero(),
            contributing: BTreeSet::new(),
            source: None,
        }
    }

    pub fn value(&self) -> &Dyadic {
        &self.value
    }

    pub fn contributing(&self) -> &BTreeSet<Bits> {
        &self.contributing
    }

    pub fn source(&self) -> Option<CensusSource> {
        self.source
    }

    pub fn add_record(mut self, rec: &HaltRecord) -> Result<Self, OmegaError> {
        self.add_program(&rec.program)?;
        Ok(self)
    }

    fn add_program(&mut self, program: &Bits) -> Result<(), OmegaError> {
        if !self.contributing.insert(program.clone()) {
            return Err(OmegaError::Duplicate(program.clone()));
        }
        self.value = &self.value + &Dyadic::pow2_neg(program.len() as u32);
        Ok(())
    }

    pub fn from_state(state: &EnumState) -> Self {
        let mut bound = OmegaBound::empty();
        for rec in state.records() {
            bound
                .add_program(&rec.program)
                .expect("census records are distinct");
        }
        bound.source = Some(CensusSource {
            max_len: state.max_len_done(),
            budget: state.budget(),
        });
        bound
    }

    /// Combines bounds built from disjoint censuses.
    pub fn merge(&self, other: &OmegaBound) -> Result<Self, OmegaError> {
        if let Some(p) = self.contributing.intersection(&other.contributing).next() {
            return Err(OmegaError::Overlap(p.clone()));
        }
        Ok(OmegaBound {
            value: &self.value + &other.value,
            contributing: self.contributing.union(&other.contributing).cloned().collect(),
            source: None,
        })
    }

    pub fn binary_expansion(&self, k: usize) -> String {
        self.value.binary_expansion(k)
    }

    pub fn report(&self, state: &EnumState, bits: usize) -> String {
        format!(
            "OMEGA >= {} = 0.{}... (census: len<={}, budget {}, {} halting, {} pending) \
             [lower bound only; bits not settled]",
            self.value,
            self.binary_expansion(bits),
            state.max_len_done(),
            state.budget(),
            state.records().len(),
            state.pending().len(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KraftVerdict {
    Pass { mass: Dyadic },
    PrefixPair { shorter: Bits, longer: Bits },
    MassAtLeastOne { mass: Dyadic },
}

impl KraftVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, KraftVerdict::Pass { .. })
    }
}

/// Checks that `programs` is prefix-free with total mass `sum 2^-|p|`
/// strictly below one.
pub fn kraft_check<'a>(programs: impl IntoIterator<Item = &'a Bits>) -> KraftVerdict {
    let mut sorted: Vec<&Bits> = programs.into_iter().collect();
    // Plain lexicographic order puts any prefix pair next to each other.
    sorted.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
    sorted.dedup();
    for pair in sorted.windows(2) {
        if pair[0].is_proper_prefix_of(pair[1]) {
            return KraftVerdict::PrefixPair {
                shorter: pair[0].clone(),
                longer: pair[1].clone(),
            };
        }
    }
    let mass = sorted
        .iter()
        .fold(Dyadic::zero(), |acc, p| &acc + &Dyadic::pow2_neg(p.len() as u32));
    if mass >= Dyadic::one() {
        KraftVerdict::MassAtLeastOne { mass }
    } else {
        KraftVerdict::Pass { mass }
    }
}
