//! A toy formal theory about OMV programs.
//!
//! Statements are closed s-expressions:
//!
//! ```text
//! (halts p)  (outputs p s)  (loops p)  (elegant p)
//! ```
//!
//! where `p` is a program written in bits and `s` is a bit string or `eps`
//! for the empty output. A [`Theory`] holds only facts certified by running
//! the machine, so every theorem it proves is true at the certification
//! budget. Its size `N` is eight bits per byte of its canonical text.
//!
//! Theorems are the facts themselves plus anything derived by
//! `ELEGANT-INTRO`:
//!
//! ```text
//!   (outputs p s)      for every valid q with |q| < |p|:
//!                      (loops q)  or  (outputs q s') with s' != s
//!   ----------------------------------------------------------------
//!                            (elegant p)
//! ```
//!
//! Side premises are never derived statements, so breadth-first search over
//! rule applications closes after a single round.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::bits::Bits;
use crate::enumerator::programs_up_to;
use crate::vm::{self, InvalidReason, RunOutcome};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Statement {
    Halts(Bits),
    Outputs(Bits, Bits),
    Loops(Bits),
    Elegant(Bits),
}

impl Statement {
    pub fn program(&self) -> &Bits {
        match self {
            Statement::Halts(p)
            | Statement::Outputs(p, _)
            | Statement::Loops(p)
            | Statement::Elegant(p) => p,
        }
    }

    fn is_fact_kind(&self) -> bool {
        !matches!(self, Statement::Elegant(_))
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Halts(p) => write!(f, "(halts {p})"),
            Statement::Outputs(p, s) => write!(f, "(outputs {p} {})", s.display_or("eps")),
            Statement::Loops(p) => write!(f, "(loops {p})"),
            Statement::Elegant(p) => write!(f, "(elegant {p})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            self.fail(format!("expected {c:?}"))
        }
    }

    fn word(&mut self) -> Result<(usize, &'a str), ParseError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        if len == 0 {
            return self.fail("expected a word");
        }
        let start = self.pos;
        self.pos += len;
        Ok((start, &rest[..len]))
    }

    fn program(&mut self) -> Result<Bits, ParseError> {
        let (start, w) = self.word()?;
        w.parse().map_err(|e: crate::bits::BitsParseError| ParseError {
            position: start + e.position,
            message: format!("program must be written in bits, found {:?}", e.found),
        })
    }

    fn output(&mut self) -> Result<Bits, ParseError> {
        let (start, w) = self.word()?;
        if w == "eps" {
            return Ok(Bits::new());
        }
        w.parse().map_err(|e: crate::bits::BitsParseError| ParseError {
            position: start + e.position,
            message: format!("output must be bits or eps, found {:?}", e.found),
        })
    }
}

pub fn parse_statement(text: &str) -> Result<Statement, ParseError> {
    let mut c = Cursor { text, pos: 0 };
    c.expect('(')?;
    let (kw_pos, keyword) = c.word()?;
    let stmt = match keyword {
        "halts" => Statement::Halts(c.program()?),
        "outputs" => {
            let p = c.program()?;
            Statement::Outputs(p, c.output()?)
        }
        "loops" => Statement::Loops(c.program()?),
        "elegant" => Statement::Elegant(c.program()?),
        other => {
            return Err(ParseError {
                position: kw_pos,
                message: format!("unknown keyword {other:?}"),
            })
        }
    };
    c.expect(')')?;
    c.skip_ws();
    if c.pos != text.len() {
        return c.fail("trailing input");
    }
    Ok(stmt)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("line {line}: {error}")]
    Parse { line: usize, error: ParseError },
    #[error("{0} cannot be a fact; only halts, outputs and loops statements are")]
    NotAFact(Statement),
    #[error("{statement} is not certified within {budget} steps")]
    Uncertified { statement: Statement, budget: u64 },
    #[error("{statement}: {reason}")]
    InvalidProgram {
        statement: Statement,
        reason: InvalidReason,
    },
}

/// The facts obtainable by running `p` for `budget` steps.
pub fn certify_run_axioms(p: &Bits, budget: u64) -> Result<Vec<Statement>, InvalidReason> {
    let program = vm::decode(p)?;
    Ok(match program.run(budget) {
        RunOutcome::Halted { output, .. } => {
            vec![Statement::Halts(p.clone()), Statement::Outputs(p.clone(), output)]
        }
        _ => match program.detect_loop(budget) {
            Some(_) => vec![Statement::Loops(p.clone())],
            None => Vec::new(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    facts: BTreeSet<Statement>,
    budget: u64,
    outputs: BTreeMap<Bits, Bits>,
    loops: BTreeSet<Bits>,
}

impl Theory {
    /// Builds a theory, certifying every fact by execution within `budget`
    /// steps.
    pub fn new(facts: impl IntoIterator<Item = Statement>, budget: u64) -> Result<Self, TheoryError> {
        let facts: BTreeSet<Statement> = facts.into_iter().collect();
        for f in &facts {
            certify_fact(f, budget)?;
        }
        Ok(Self::assemble(facts, budget))
    }

    fn assemble(facts: BTreeSet<Statement>, budget: u64) -> Self {
        let mut outputs = BTreeMap::new();
        let mut loops = BTreeSet::new();
        for f in &facts {
            match f {
                Statement::Outputs(p, s) => {
                    outputs.insert(p.clone(), s.clone());
                }
                Statement::Loops(p) => {
                    loops.insert(p.clone());
                }
                _ => {}
            }
        }
        Theory {
            facts,
            budget,
            outputs,
            loops,
        }
    }

    /// Skips certification. Only for tests that need an unsound theory.
    #[cfg(test)]
    pub(crate) fn unchecked(facts: impl IntoIterator<Item = Statement>, budget: u64) -> Self {
        Self::assemble(facts.into_iter().collect(), budget)
    }

    /// Every run axiom for every program of length `1..=max_len`.
    pub fn certified_up_to(max_len: usize, budget: u64) -> Self {
        let facts = programs_up_to(max_len)
            .iter()
            .flat_map(|p| certify_run_axioms(p, budget).expect("generated program decodes"))
            .collect();
        Self::assemble(facts, budget)
    }

    /// Parses a theory file: one statement per line, `#` comments.
    pub fn parse(text: &str, budget: u64) -> Result<Self, TheoryError> {
        let mut facts = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let stmt = parse_statement(trimmed).map_err(|error| TheoryError::Parse {
                line: i + 1,
                error,
            })?;
            facts.push(stmt);
        }
        Self::new(facts, budget)
    }

    pub fn facts(&self) -> &BTreeSet<Statement> {
        &self.facts
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn contains(&self, s: &Statement) -> bool {
        self.facts.contains(s)
    }

    /// Canonical text: facts in order, one per line.
    pub fn serialize(&self) -> String {
        self.facts.iter().map(|f| format!("{f}\n")).collect()
    }

    /// `N`: eight times the byte length of [`Theory::serialize`].
    pub fn size_bits(&self) -> usize {
        8 * self.serialize().len()
    }

    pub fn with_facts(&self, extra: impl IntoIterator<Item = Statement>) -> Result<Self, TheoryError> {
        Self::new(self.facts.iter().cloned().chain(extra), self.budget)
    }
}

fn certify_fact(f: &Statement, budget: u64) -> Result<(), TheoryError> {
    if !f.is_fact_kind() {
        return Err(TheoryError::NotAFact(f.clone()));
    }
    let program = vm::decode(f.program()).map_err(|reason| TheoryError::InvalidProgram {
        statement: f.clone(),
        reason,
    })?;
    let ok = match f {
        Statement::Halts(_) => program.run(budget).is_halted(),
        Statement::Outputs(_, s) => {
            matches!(program.run(budget), RunOutcome::Halted { output, .. } if output == *s)
        }
        Statement::Loops(_) => program.detect_loop(budget).is_some(),
        Statement::Elegant(_) => unreachable!(),
    };
    if ok {
        Ok(())
    } else {
        Err(TheoryError::Uncertified {
            statement: f.clone(),
            budget,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Axiom,
    ElegantIntro,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Axiom => "AXIOM",
            Rule::ElegantIntro => "ELEGANT-INTRO",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub goal: Statement,
    pub rule: Rule,
    pub premises: Vec<Statement>,
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GOAL {}", self.goal)?;
        writeln!(f, "RULE {}", self.rule)?;
        for p in &self.premises {
            writeln!(f, "PREMISE {p}")?;
        }
        Ok(())
    }
}

/// Why an elegance side condition could not be met.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstacle {
    /// The goal is not a fact and no rule concludes it.
    NotAFact(Statement),
    /// No `(outputs p s)` fact for the goal program.
    NoOutputFact(Bits),
    /// A shorter program with neither an outputs nor a loops fact.
    Unclassified(Bits),
    /// A shorter program known to produce the same output.
    SameOutput(Bits),
}

impl fmt::Display for Obstacle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstacle::NotAFact(s) => write!(f, "{s} is not a fact"),
            Obstacle::NoOutputFact(p) => write!(f, "no (outputs {p} _) fact"),
            Obstacle::Unclassified(q) => write!(f, "shorter program {q} is unclassified"),
            Obstacle::SameOutput(q) => write!(f, "shorter program {q} has the same output"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{goal} is unprovable ({} obstacles)", missing.len())]
pub struct Unprovable {
    pub goal: Statement,
    pub missing: Vec<Obstacle>,
}

pub fn prove(theory: &Theory, goal: &Statement) -> Result<Proof, Unprovable> {
    if theory.contains(goal) {
        return Ok(Proof {
            goal: goal.clone(),
            rule: Rule::Axiom,
            premises: Vec::new(),
        });
    }
    let Statement::Elegant(p) = goal else {
        return Err(Unprovable {
            goal: goal.clone(),
            missing: vec![Obstacle::NotAFact(goal.clone())],
        });
    };

    let mut missing = Vec::new();
    let mut premises = Vec::new();
    let target = theory.outputs.get(p);
    match target {
        Some(s) => premises.push(Statement::Outputs(p.clone(), s.clone())),
        None => missing.push(Obstacle::NoOutputFact(p.clone())),
    }
    for q in programs_up_to(p.len().saturating_sub(1)) {
        match (theory.outputs.get(&q), target) {
            (Some(sq), Some(s)) if sq == s => missing.push(Obstacle::SameOutput(q)),
            (Some(sq), _) => premises.push(Statement::Outputs(q, sq.clone())),
            (None, _) if theory.loops.contains(&q) => premises.push(Statement::Loops(q)),
            (None, _) => missing.push(Obstacle::Unclassified(q)),
        }
    }
    if missing.is_empty() {
        Ok(Proof {
            goal: goal.clone(),
            rule: Rule::ElegantIntro,
            premises,
        })
    } else {
        Err(Unprovable {
            goal: goal.clone(),
            missing,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("proof rejected at step {step}: {reason}")]
pub struct Rejection {
    /// 0 is the conclusion itself; `k >= 1` is premise `k`.
    pub step: usize,
    pub reason: String,
}

/// Valid programs shorter than `len`, found by decoding every candidate
/// prefix. Kept apart from the grammar-driven generator the prover uses.
fn shorter_programs_by_decoding(len: usize) -> Vec<Bits> {
    let mut found = Vec::new();
    let mut stack = vec![Bits::new()];
    while let Some(prefix) = stack.pop() {
        match vm::decode(&prefix) {
            Ok(_) => found.push(prefix),
            Err(InvalidReason::Leftover) => {}
            Err(_) => {
                if prefix.len() + 1 < len {
                    for bit in [false, true] {
                        let mut next = prefix.clone();
                        next.push(bit);
                        stack.push(next);
                    }
                }
            }
        }
    }
    found.sort();
    found
}

pub fn check_proof(theory: &Theory, proof: &Proof) -> Result<(), Rejection> {
    let reject = |step: usize, reason: String| Err(Rejection { step, reason });
    match proof.rule {
        Rule::Axiom => {
            if !proof.premises.is_empty() {
                return reject(1, "an axiom step takes no premises".into());
            }
            if !theory.contains(&proof.goal) {
                return reject(0, format!("{} is not a fact of the theory", proof.goal));
            }
            Ok(())
        }
        Rule::ElegantIntro => {
            let Statement::Elegant(p) = &proof.goal else {
                return reject(0, "ELEGANT-INTRO concludes only elegance statements".into());
            };
            let s = match proof.premises.first() {
                Some(first @ Statement::Outputs(q, s)) if q == p => {
                    if !theory.contains(first) {
                        return reject(1, format!("{first} is not a fact of the theory"));
                    }
                    s
                }
                _ => return reject(1, format!("first premise must be (outputs {p} _)")),
            };
            let shorter = shorter_programs_by_decoding(p.len());
            for (i, q) in shorter.iter().enumerate() {
                let step = i + 2;
                let Some(premise) = proof.premises.get(i + 1) else {
                    return reject(step, format!("no premise classifies {q}"));
                };
                let fits = match premise {
                    Statement::Loops(r) => r == q,
                    Statement::Outputs(r, sq) => r == q && sq != s,
                    _ => false,
                };
                if !fits {
                    return reject(step, format!("{premise} does not classify {q} away from the goal output"));
                }
                if !theory.contains(premise) {
                    return reject(step, format!("{premise} is not a fact of the theory"));
                }
            }
            if proof.premises.len() > shorter.len() + 1 {
                return reject(shorter.len() + 2, "unexpected extra premise".into());
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frontier {
    pub size_bits: usize,
    /// Longest provably elegant program, 0 if none.
    pub frontier: usize,
    pub elegant: Vec<Bits>,
}

/// Tries every elegance goal backed by an outputs fact, in length order.
pub fn elegance_frontier(theory: &Theory) -> Frontier {
    let mut goals: Vec<&Bits> = theory.outputs.keys().collect();
    goals.sort();
    let elegant: Vec<Bits> = goals
        .into_iter()
        .filter(|p| prove(theory, &Statement::Elegant((*p).clone())).is_ok())
        .cloned()
        .collect();
    Frontier {
        size_bits: theory.size_bits(),
        frontier: elegant.iter().map(Bits::len).max().unwrap_or(0),
        elegant,
    }
}

impl fmt::Display for Frontier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N={} FRONTIER={}", self.size_bits, self.frontier)?;
        for p in &self.elegant {
            writeln!(f, "ELEGANT {p}")?;
        }
        Ok(())
    }
}
