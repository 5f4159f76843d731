//! A deliberately plain re-implementation of the machine over `&str`
//! bit strings, used as an oracle. Shares no code with the library.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    Halt,
    Emit(char),
    Inc(usize),
    Djz(usize, i64),
}

fn read_gamma(s: &str, pos: &mut usize) -> Option<u64> {
    let rest = &s[*pos..];
    let zeros = rest.chars().take_while(|&c| c == '0').count();
    if zeros > 63 || rest.len() < 2 * zeros + 1 {
        return None;
    }
    let v = u64::from_str_radix(&rest[zeros..2 * zeros + 1], 2).ok()?;
    *pos += 2 * zeros + 1;
    Some(v)
}

/// `None` for anything that is not exactly one program.
pub fn decode(s: &str) -> Option<Vec<Op>> {
    let mut pos = 0;
    let n = read_gamma(s, &mut pos)? - 1;
    let mut ops = Vec::new();
    for _ in 0..n {
        let op = s.get(pos..pos + 2)?;
        pos += 2;
        ops.push(match op {
            "00" => Op::Halt,
            "01" => Op::Emit('0'),
            "10" => Op::Emit('1'),
            _ => {
                let ext = s.get(pos..pos + 2)?;
                pos += 2;
                match ext {
                    "00" => Op::Inc(0),
                    "01" => Op::Inc(1),
                    _ => {
                        let z = read_gamma(s, &mut pos)? - 1;
                        let d = if z % 2 == 0 { (z / 2) as i64 } else { -(((z + 1) / 2) as i64) };
                        Op::Djz(if ext == "10" { 0 } else { 1 }, d)
                    }
                }
            }
        });
    }
    if pos == s.len() {
        Some(ops)
    } else {
        None
    }
}

fn step(ops: &[Op], pc: usize, c: &mut [u64; 2], out: &mut String) -> usize {
    let n = ops.len() as i64;
    match ops[pc] {
        Op::Halt => ops.len(),
        Op::Emit(ch) => {
            out.push(ch);
            pc + 1
        }
        Op::Inc(r) => {
            c[r] += 1;
            pc + 1
        }
        Op::Djz(r, d) => {
            if c[r] > 0 {
                c[r] -= 1;
                pc + 1
            } else {
                let t = pc as i64 + 1 + d;
                if (0..=n).contains(&t) {
                    t as usize
                } else {
                    ops.len()
                }
            }
        }
    }
}

/// `Some((output, steps))` if the program halts within `budget` steps.
pub fn run(ops: &[Op], budget: u64) -> Option<(String, u64)> {
    let (mut pc, mut c, mut out) = (0usize, [0u64; 2], String::new());
    let mut steps = 0;
    while pc < ops.len() {
        if steps == budget {
            return None;
        }
        pc = step(ops, pc, &mut c, &mut out);
        steps += 1;
    }
    Some((out, steps))
}

/// Step at which some control state first repeats, if within `budget`.
pub fn first_revisit(ops: &[Op], budget: u64) -> Option<u64> {
    let (mut pc, mut c, mut out) = (0usize, [0u64; 2], String::new());
    let mut seen = HashMap::new();
    seen.insert((pc, c), 0u64);
    for steps in 1..=budget {
        if pc >= ops.len() {
            return None;
        }
        pc = step(ops, pc, &mut c, &mut out);
        if seen.insert((pc, c), steps).is_some() {
            return Some(steps);
        }
    }
    None
}

pub fn all_strings(max_len: usize) -> impl Iterator<Item = String> {
    (1..=max_len).flat_map(|len| (0u64..1 << len).map(move |v| format!("{v:0len$b}")))
}

pub struct Census {
    pub halting: BTreeMap<String, (String, u64)>,
    pub pending: BTreeSet<String>,
}

pub fn census(max_len: usize, budget: u64) -> Census {
    let mut halting = BTreeMap::new();
    let mut pending = BTreeSet::new();
    for s in all_strings(max_len) {
        if let Some(ops) = decode(&s) {
            match run(&ops, budget) {
                Some(r) => {
                    halting.insert(s, r);
                }
                None => {
                    pending.insert(s);
                }
            }
        }
    }
    Census { halting, pending }
}

/// Exact `sum 2^-|p|` as a reduced `(numerator, denominator)` pair.
pub fn mass<'a>(programs: impl IntoIterator<Item = &'a String>) -> (u128, u128) {
    let lens: Vec<usize> = programs.into_iter().map(|p| p.len()).collect();
    let top = lens.iter().copied().max().unwrap_or(0);
    let mut num: u128 = lens.iter().map(|&l| 1u128 << (top - l)).sum();
    let mut den: u128 = 1 << top;
    while num % 2 == 0 && den > 1 {
        num /= 2;
        den /= 2;
    }
    if num == 0 {
        den = 1;
    }
    (num, den)
}
