//! Halting censuses over every program up to a bit length.
//!
//! Programs are visited in length-lexicographic order and run with a fixed
//! per-program step budget. Programs still running when the budget runs out
//! are kept as `pending` so a later [`EnumState::refine`] only re-runs
//! those. States round-trip through a line-oriented checkpoint file.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::bits::Bits;
use crate::vm::{decode, gamma_encode, gamma_len, RunOutcome};

pub const CHECKPOINT_MAGIC: &str = "OMEGALAB v1";

/// Longest program length the census machinery accepts. Valid-program
/// counts are tracked in `u128`.
pub const MAX_CENSUS_LEN: usize = 120;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HaltRecord {
    pub program: Bits,
    pub output: Bits,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumState {
    max_len_done: usize,
    budget: u64,
    records: BTreeSet<HaltRecord>,
    pending: BTreeSet<Bits>,
}

#[derive(Debug, Error)]
pub enum EnumError {
    #[error("new budget {requested} must exceed the current budget {current}")]
    BudgetNotLarger { current: u64, requested: u64 },
    #[error("requested length {requested} is below the census frontier {frontier}")]
    FrontierAhead { frontier: usize, requested: usize },
    #[error("length {0} exceeds the supported maximum {MAX_CENSUS_LEN}")]
    TooLong(usize),
    #[error("checkpoint line {line}: {message}")]
    Checkpoint { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// How many threads run programs. `Serial` and `Threads(n)` produce
/// identical states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workers {
    Serial,
    Threads(usize),
}

impl Workers {
    fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Workers::Serial | Workers::Threads(0) | Workers::Threads(1) => {
                items.iter().map(f).collect()
            }
            Workers::Threads(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .expect("thread pool");
                pool.install(|| items.par_iter().map(f).collect())
            }
        }
    }
}

/// Number of distinct instruction codes of each bit size `0..=max`.
fn instruction_code_counts(max: usize) -> Vec<u128> {
    let mut counts = vec![0u128; max + 1];
    let mut add = |size: usize, n: u128| {
        if size <= max {
            counts[size] += n;
        }
    };
    add(2, 3);
    add(4, 2);
    // DJZA/DJZB with a gamma code of 2k + 1 bits: 2^k codes each.
    let mut k = 0;
    while 5 + 2 * k <= max && k < 64 {
        add(5 + 2 * k, 2u128 << k);
        k += 1;
    }
    counts
}

/// Number of valid programs of exactly `len` bits.
pub fn count_programs_of_length(len: usize) -> u128 {
    if len == 0 {
        return 0;
    }
    let codes = instruction_code_counts(len);
    // ways[r] for the current instruction count: sequences filling r bits.
    let mut ways = vec![0u128; len + 1];
    ways[0] = 1;
    let mut total = 0u128;
    let mut n: u64 = 0;
    loop {
        let header = gamma_len(n + 1);
        if header + 2 * n as usize > len {
            break;
        }
        total += ways[len - header];
        let mut next = vec![0u128; len + 1];
        for r in 0..=len {
            if ways[r] == 0 {
                continue;
            }
            for (size, &c) in codes.iter().enumerate() {
                if c != 0 && r + size <= len {
                    next[r + size] += ways[r] * c;
                }
            }
        }
        ways = next;
        n += 1;
    }
    total
}

/// Count of all bit strings of length `1..=max_len` that are not programs.
pub fn count_invalid_up_to(max_len: usize) -> u128 {
    let strings = (1u128 << (max_len + 1)) - 2;
    strings - (1..=max_len).map(count_programs_of_length).sum::<u128>()
}

/// Every valid program of exactly `len` bits, in lexicographic order.
///
/// Generated from the grammar rather than by filtering all `2^len` strings.
pub fn programs_of_length(len: usize) -> Vec<Bits> {
    let mut out = Vec::new();
    let mut n: u64 = 0;
    loop {
        let header = gamma_len(n + 1);
        if header + 2 * n as usize > len {
            break;
        }
        let mut prefix = gamma_encode(n + 1);
        fill_instructions(n, len - header, &mut prefix, &mut out);
        n += 1;
    }
    out.sort();
    out
}

/// All valid programs of length `1..=max_len`, length-lexicographic.
pub fn programs_up_to(max_len: usize) -> Vec<Bits> {
    (1..=max_len).flat_map(programs_of_length).collect()
}

fn fill_instructions(left: u64, rem: usize, prefix: &mut Bits, out: &mut Vec<Bits>) {
    if left == 0 {
        if rem == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let reserve = 2 * (left as usize - 1);
    if rem < 2 + reserve {
        return;
    }
    let mark = prefix.len();
    let with = |code: &[bool], prefix: &mut Bits, out: &mut Vec<Bits>| {
        for &b in code {
            prefix.push(b);
        }
        fill_instructions(left - 1, rem - code.len(), prefix, out);
        prefix.truncate(mark);
    };
    for code in [[false, false], [false, true], [true, false]] {
        with(&code, prefix, out);
    }
    if rem < 4 + reserve {
        return;
    }
    for code in [[true, true, false, false], [true, true, false, true]] {
        with(&code, prefix, out);
    }
    for opcode in [[true, true, true, false], [true, true, true, true]] {
        let mut k = 0usize;
        while 4 + 2 * k + 1 + reserve <= rem && k < 64 {
            for m in (1u64 << k)..=((1u128 << (k + 1)) - 1) as u64 {
                let mut code = opcode.to_vec();
                code.extend(gamma_encode(m).iter());
                with(&code, prefix, out);
            }
            k += 1;
        }
    }
}

enum Classified {
    Halted(HaltRecord),
    Pending(Bits),
}

fn classify(program: &Bits, budget: u64) -> Classified {
    match crate::vm::run(program, budget) {
        RunOutcome::Halted { output, steps } => Classified::Halted(HaltRecord {
            program: program.clone(),
            output,
            steps,
        }),
        RunOutcome::Running { .. } => Classified::Pending(program.clone()),
        RunOutcome::Invalid(reason) => unreachable!("generated program failed to decode: {reason}"),
    }
}

pub fn enumerate(max_len: usize, budget: u64) -> EnumState {
    enumerate_with(max_len, budget, Workers::Serial)
}

/// Panics if `max_len` exceeds [`MAX_CENSUS_LEN`].
pub fn enumerate_with(max_len: usize, budget: u64, workers: Workers) -> EnumState {
    EnumState::empty(budget)
        .extend(max_len, workers)
        .expect("census length within supported range")
}

impl EnumState {
    /// The census of no programs: frontier 0.
    pub fn empty(budget: u64) -> Self {
        EnumState {
            max_len_done: 0,
            budget,
            records: BTreeSet::new(),
            pending: BTreeSet::new(),
        }
    }

    pub fn max_len_done(&self) -> usize {
        self.max_len_done
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn records(&self) -> &BTreeSet<HaltRecord> {
        &self.records
    }

    pub fn pending(&self) -> &BTreeSet<Bits> {
        &self.pending
    }

    pub fn invalid_count(&self) -> u128 {
        count_invalid_up_to(self.max_len_done)
    }

    /// Adds one more length to the census at the current budget.
    pub fn extend_one(&mut self, workers: Workers) -> Result<(), EnumError> {
        let len = self.max_len_done + 1;
        if len > MAX_CENSUS_LEN {
            return Err(EnumError::TooLong(len));
        }
        let programs = programs_of_length(len);
        let budget = self.budget;
        for c in workers.map(&programs, |p| classify(p, budget)) {
            match c {
                Classified::Halted(r) => {
                    self.records.insert(r);
                }
                Classified::Pending(p) => {
                    self.pending.insert(p);
                }
            }
        }
        self.max_len_done = len;
        Ok(())
    }

    /// Grows the census to `max_len` at the current budget.
    pub fn extend(mut self, max_len: usize, workers: Workers) -> Result<Self, EnumError> {
        if max_len < self.max_len_done {
            return Err(EnumError::FrontierAhead {
                frontier: self.max_len_done,
                requested: max_len,
            });
        }
        if max_len > MAX_CENSUS_LEN {
            return Err(EnumError::TooLong(max_len));
        }
        while self.max_len_done < max_len {
            self.extend_one(workers)?;
        }
        Ok(self)
    }

    /// Re-runs the pending programs with a larger budget.
    pub fn refine(&self, new_budget: u64, workers: Workers) -> Result<Self, EnumError> {
        if new_budget <= self.budget {
            return Err(EnumError::BudgetNotLarger {
                current: self.budget,
                requested: new_budget,
            });
        }
        let pending: Vec<Bits> = self.pending.iter().cloned().collect();
        let mut next = EnumState {
            max_len_done: self.max_len_done,
            budget: new_budget,
            records: self.records.clone(),
            pending: BTreeSet::new(),
        };
        for c in workers.map(&pending, |p| classify(p, new_budget)) {
            match c {
                Classified::Halted(r) => {
                    next.records.insert(r);
                }
                Classified::Pending(p) => {
                    next.pending.insert(p);
                }
            }
        }
        Ok(next)
    }

    pub fn to_checkpoint(&self) -> String {
        let mut out = String::new();
        out.push_str(CHECKPOINT_MAGIC);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "H {} {} {}\n",
                r.program,
                r.output.display_or("-"),
                r.steps
            ));
        }
        for p in &self.pending {
            out.push_str(&format!("P {p}\n"));
        }
        out.push_str(&format!("FRONTIER {} {}\n", self.max_len_done, self.budget));
        out
    }

    pub fn from_checkpoint(text: &str) -> Result<Self, EnumError> {
        let err = |line: usize, message: String| EnumError::Checkpoint { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, CHECKPOINT_MAGIC)) => {}
            Some((n, other)) => {
                return Err(err(n, format!("expected header {CHECKPOINT_MAGIC:?}, found {other:?}")))
            }
            None => return Err(err(1, "empty checkpoint".into())),
        }

        let mut records = BTreeSet::new();
        let mut pending = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut frontier = None;
        let mut last_line = 1;
        for (n, line) in lines {
            last_line = n;
            if frontier.is_some() {
                return Err(err(n, "content after FRONTIER trailer".into()));
            }
            let fields: Vec<&str> = line.split(' ').collect();
            let mut program = |s: &str| -> Result<Bits, EnumError> {
                let p: Bits = s.parse().map_err(|e| err(n, format!("{e}")))?;
                decode(&p).map_err(|e| err(n, format!("{p} is not a program: {e}")))?;
                if !seen.insert(p.clone()) {
                    return Err(err(n, format!("{p} listed twice")));
                }
                Ok(p)
            };
            match fields.as_slice() {
                ["H", prog, output, steps] => {
                    let prog_bits = program(prog)?;
                    let output = if *output == "-" {
                        Bits::new()
                    } else {
                        output
                            .parse()
                            .map_err(|e| err(n, format!("bad output: {e}")))?
                    };
                    let steps = steps
                        .parse()
                        .map_err(|e| err(n, format!("bad step count: {e}")))?;
                    records.insert(HaltRecord {
                        program: prog_bits,
                        output,
                        steps,
                    });
                }
                ["P", prog] => {
                    pending.insert(program(prog)?);
                }
                ["FRONTIER", len, budget] => {
                    let len: usize = len
                        .parse()
                        .map_err(|e| err(n, format!("bad frontier length: {e}")))?;
                    let budget: u64 = budget
                        .parse()
                        .map_err(|e| err(n, format!("bad budget: {e}")))?;
                    if len > MAX_CENSUS_LEN {
                        return Err(err(n, format!("frontier {len} exceeds {MAX_CENSUS_LEN}")));
                    }
                    frontier = Some((n, len, budget));
                }
                _ => return Err(err(n, format!("unrecognized line {line:?}"))),
            }
        }
        let Some((n, max_len_done, budget)) = frontier else {
            return Err(err(last_line, "missing FRONTIER trailer".into()));
        };
        if let Some(p) = seen.iter().find(|p| p.len() > max_len_done) {
            return Err(err(n, format!("{p} is longer than the frontier")));
        }
        if let Some(r) = records.iter().find(|r| r.steps > budget) {
            return Err(err(n, format!("{} halts after the budget", r.program)));
        }
        let expected: u128 = (1..=max_len_done).map(count_programs_of_length).sum();
        if seen.len() as u128 != expected {
            return Err(err(
                n,
                format!(
                    "census lists {} programs, {expected} exist up to length {max_len_done}",
                    seen.len()
                ),
            ));
        }
        Ok(EnumState {
            max_len_done,
            budget,
            records,
            pending,
        })
    }

    /// Writes to a sibling temporary file and renames it over `path`.
    pub fn save(&self, path: &Path) -> Result<(), EnumError> {
        let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
        tmp_name.push(".tmp");
        let tmp = path.with_file_name(tmp_name);
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(self.to_checkpoint().as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, EnumError> {
        Self::from_checkpoint(&fs::read_to_string(path)?)
    }
}
