//! The OMV machine: a prefix-free, self-delimiting two-counter language.
//!
//! A program is `gamma(n + 1)` followed by `n` instructions:
//!
//! | instruction | code                 |
//! |-------------|----------------------|
//! | `HALT`      | `00`                 |
//! | `EMIT0`     | `01`                 |
//! | `EMIT1`     | `10`                 |
//! | `INCA`      | `1100`               |
//! | `INCB`      | `1101`               |
//! | `DJZA δ`    | `1110` + `gamma(zigzag(δ) + 1)` |
//! | `DJZB δ`    | `1111` + `gamma(zigzag(δ) + 1)` |
//!
//! A bit string is a program only if decoding consumes every bit, which
//! makes the set of programs prefix-free. Execution starts at `pc = 0` with
//! both counters zero; leaving the instruction range (including via `HALT`)
//! halts the machine.

use std::fmt;

use thiserror::Error;

use crate::bits::Bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Error)]
pub enum InvalidReason {
    #[error("input ends in the middle of an instruction")]
    Truncated,
    #[error("bits remain after the last instruction")]
    Leftover,
    #[error("malformed gamma code")]
    MalformedGamma,
}

/// Elias-gamma code of `m`: `floor(log2 m)` zeros, then `m` in binary.
///
/// Panics if `m == 0`.
pub fn gamma_encode(m: u64) -> Bits {
    let mut out = Bits::new();
    gamma_encode_into(m, &mut out);
    out
}

fn gamma_encode_into(m: u64, out: &mut Bits) {
    assert!(m >= 1, "gamma code is defined for m >= 1");
    let k = 63 - m.leading_zeros() as usize;
    for _ in 0..k {
        out.push(false);
    }
    for i in (0..=k).rev() {
        out.push((m >> i) & 1 == 1);
    }
}

/// Length in bits of `gamma_encode(m)`.
pub fn gamma_len(m: u64) -> usize {
    2 * (63 - m.leading_zeros() as usize) + 1
}

/// Decodes one gamma code from the front of `bits`, returning the value and
/// the number of bits consumed.
pub fn gamma_decode(bits: &[bool]) -> Result<(u64, usize), InvalidReason> {
    let k = bits
        .iter()
        .position(|&b| b)
        .ok_or(InvalidReason::MalformedGamma)?;
    if k > 63 || bits.len() < 2 * k + 1 {
        return Err(InvalidReason::MalformedGamma);
    }
    let value = bits[k..=2 * k]
        .iter()
        .fold(0u64, |acc, &b| (acc << 1) | u64::from(b));
    Ok((value, 2 * k + 1))
}

pub fn zigzag(d: i64) -> u64 {
    ((d << 1) ^ (d >> 63)) as u64
}

pub fn unzigzag(z: u64) -> i64 {
    ((z >> 1) as i64) ^ -((z & 1) as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instruction {
    Halt,
    Emit0,
    Emit1,
    IncA,
    IncB,
    DjzA(i64),
    DjzB(i64),
}

impl Instruction {
    pub fn encode_into(&self, out: &mut Bits) {
        let (code, offset): (&[bool], Option<i64>) = match *self {
            Instruction::Halt => (&[false, false], None),
            Instruction::Emit0 => (&[false, true], None),
            Instruction::Emit1 => (&[true, false], None),
            Instruction::IncA => (&[true, true, false, false], None),
            Instruction::IncB => (&[true, true, false, true], None),
            Instruction::DjzA(d) => (&[true, true, true, false], Some(d)),
            Instruction::DjzB(d) => (&[true, true, true, true], Some(d)),
        };
        for &b in code {
            out.push(b);
        }
        if let Some(d) = offset {
            let m = zigzag(d)
                .checked_add(1)
                .expect("jump offset out of encodable range");
            gamma_encode_into(m, out);
        }
    }

    /// Encoded size in bits.
    pub fn len_bits(&self) -> usize {
        match *self {
            Instruction::Halt | Instruction::Emit0 | Instruction::Emit1 => 2,
            Instruction::IncA | Instruction::IncB => 4,
            Instruction::DjzA(d) | Instruction::DjzB(d) => 4 + gamma_len(zigzag(d) + 1),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Halt => f.write_str("HALT"),
            Instruction::Emit0 => f.write_str("EMIT0"),
            Instruction::Emit1 => f.write_str("EMIT1"),
            Instruction::IncA => f.write_str("INCA"),
            Instruction::IncB => f.write_str("INCB"),
            Instruction::DjzA(d) => write!(f, "DJZA {d:+}"),
            Instruction::DjzB(d) => write!(f, "DJZB {d:+}"),
        }
    }
}

/// Header plus instruction codes for `instructions`.
pub fn encode(instructions: &[Instruction]) -> Bits {
    let mut out = Bits::new();
    gamma_encode_into(instructions.len() as u64 + 1, &mut out);
    for inst in instructions {
        inst.encode_into(&mut out);
    }
    out
}

/// A validly decoded program. Its size `K` is `bits.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    bits: Bits,
    instructions: Vec<Instruction>,
}

/// Position of the machine between steps. Output is not part of it, so a
/// repeated control state means the machine never halts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ControlState {
    pub pc: usize,
    pub a: u64,
    pub b: u64,
}

impl ControlState {
    pub const START: ControlState = ControlState { pc: 0, a: 0, b: 0 };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Halted { output: Bits, steps: u64 },
    Running { budget: u64 },
    Invalid(InvalidReason),
}

impl RunOutcome {
    pub fn is_halted(&self) -> bool {
        matches!(self, RunOutcome::Halted { .. })
    }
}

/// Evidence that `program` never halts: the control state at
/// `first_step` recurs at `revisit_step`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopCert {
    pub program: Bits,
    pub first_step: u64,
    pub revisit_step: u64,
    pub state: ControlState,
}

/// Output gathered by a budget-limited run that may stop early once enough
/// bits have been emitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Streamed {
    pub output: Bits,
    pub steps: u64,
    pub halted: bool,
}

pub fn decode(bits: &Bits) -> Result<Program, InvalidReason> {
    let s = bits.as_slice();
    let (count, mut pos) = gamma_decode(s)?;
    let n = count - 1;
    let mut instructions = Vec::new();
    for _ in 0..n {
        let (inst, used) = decode_instruction(&s[pos..])?;
        instructions.push(inst);
        pos += used;
    }
    if pos != s.len() {
        return Err(InvalidReason::Leftover);
    }
    Ok(Program {
        bits: bits.clone(),
        instructions,
    })
}

fn decode_instruction(s: &[bool]) -> Result<(Instruction, usize), InvalidReason> {
    let op = s.get(..2).ok_or(InvalidReason::Truncated)?;
    match (op[0], op[1]) {
        (false, false) => return Ok((Instruction::Halt, 2)),
        (false, true) => return Ok((Instruction::Emit0, 2)),
        (true, false) => return Ok((Instruction::Emit1, 2)),
        (true, true) => {}
    }
    let ext = s.get(2..4).ok_or(InvalidReason::Truncated)?;
    let jump = |ctor: fn(i64) -> Instruction| {
        let (m, used) = gamma_decode(&s[4..])?;
        Ok((ctor(unzigzag(m - 1)), 4 + used))
    };
    match (ext[0], ext[1]) {
        (false, false) => Ok((Instruction::IncA, 4)),
        (false, true) => Ok((Instruction::IncB, 4)),
        (true, false) => jump(Instruction::DjzA),
        (true, true) => jump(Instruction::DjzB),
    }
}

impl Program {
    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn length_bits(&self) -> usize {
        self.bits.len()
    }

    pub fn is_halted(&self, state: &ControlState) -> bool {
        state.pc >= self.instructions.len()
    }

    /// Executes the instruction at `state.pc`, which must be in range.
    /// Returns the successor state and the emitted bit, if any.
    pub fn step(&self, state: ControlState) -> (ControlState, Option<bool>) {
        let n = self.instructions.len();
        let ControlState { pc, mut a, mut b } = state;
        let next = |pc| ControlState { pc, a, b };
        match self.instructions[pc] {
            Instruction::Halt => (next(n), None),
            Instruction::Emit0 => (next(pc + 1), Some(false)),
            Instruction::Emit1 => (next(pc + 1), Some(true)),
            Instruction::IncA => {
                a += 1;
                (ControlState { pc: pc + 1, a, b }, None)
            }
            Instruction::IncB => {
                b += 1;
                (ControlState { pc: pc + 1, a, b }, None)
            }
            Instruction::DjzA(d) => {
                if a == 0 {
                    (next(jump_target(pc, d, n)), None)
                } else {
                    a -= 1;
                    (ControlState { pc: pc + 1, a, b }, None)
                }
            }
            Instruction::DjzB(d) => {
                if b == 0 {
                    (next(jump_target(pc, d, n)), None)
                } else {
                    b -= 1;
                    (ControlState { pc: pc + 1, a, b }, None)
                }
            }
        }
    }

    fn successor(&self, state: ControlState) -> Option<ControlState> {
        if self.is_halted(&state) {
            None
        } else {
            Some(self.step(state).0)
        }
    }

    pub fn run(&self, budget: u64) -> RunOutcome {
        let s = self.run_streaming(budget, usize::MAX);
        if s.halted {
            RunOutcome::Halted {
                output: s.output,
                steps: s.steps,
            }
        } else {
            RunOutcome::Running { budget }
        }
    }

    /// Runs until halting, `budget` steps, or `max_output` bits emitted,
    /// whichever comes first.
    pub fn run_streaming(&self, budget: u64, max_output: usize) -> Streamed {
        let mut state = ControlState::START;
        let mut output = Bits::new();
        let mut steps = 0;
        loop {
            if self.is_halted(&state) {
                return Streamed {
                    output,
                    steps,
                    halted: true,
                };
            }
            if steps == budget || output.len() >= max_output {
                return Streamed {
                    output,
                    steps,
                    halted: false,
                };
            }
            let (next, emitted) = self.step(state);
            if let Some(bit) = emitted {
                output.push(bit);
            }
            state = next;
            steps += 1;
        }
    }

    /// Brent cycle detection on the control state. A certificate is returned
    /// iff the first repeated state recurs within `budget` steps.
    pub fn detect_loop(&self, budget: u64) -> Option<LoopCert> {
        if budget == 0 {
            return None;
        }
        let start = ControlState::START;
        // The hare needs at most about 3 * (first revisit step) moves.
        let cap = budget.saturating_mul(4).saturating_add(4);
        let mut power = 1u64;
        let mut period = 1u64;
        let mut tortoise = start;
        let mut hare = self.successor(start)?;
        let mut moves = 1u64;
        while tortoise != hare {
            if power == period {
                tortoise = hare;
                power *= 2;
                period = 0;
            }
            hare = self.successor(hare)?;
            moves += 1;
            period += 1;
            if moves > cap {
                return None;
            }
        }

        let mut tortoise = start;
        let mut hare = start;
        for _ in 0..period {
            hare = self.successor(hare)?;
        }
        let mut tail = 0u64;
        while tortoise != hare {
            if tail + period >= budget {
                return None;
            }
            tortoise = self.successor(tortoise)?;
            hare = self.successor(hare)?;
            tail += 1;
        }
        if tail + period > budget {
            return None;
        }
        Some(LoopCert {
            program: self.bits.clone(),
            first_step: tail,
            revisit_step: tail + period,
            state: tortoise,
        })
    }
}

fn jump_target(pc: usize, offset: i64, n: usize) -> usize {
    let target = pc as i128 + 1 + offset as i128;
    if target < 0 || target > n as i128 {
        n
    } else {
        target as usize
    }
}

pub fn run(bits: &Bits, budget: u64) -> RunOutcome {
    match decode(bits) {
        Ok(p) => p.run(budget),
        Err(reason) => RunOutcome::Invalid(reason),
    }
}

pub fn detect_loop(bits: &Bits, budget: u64) -> Result<Option<LoopCert>, InvalidReason> {
    Ok(decode(bits)?.detect_loop(budget))
}

/// The program that emits `s` verbatim and falls off the end.
pub fn literal_program(s: &Bits) -> Bits {
    let instructions: Vec<Instruction> = s
        .iter()
        .map(|b| if b { Instruction::Emit1 } else { Instruction::Emit0 })
        .collect();
    encode(&instructions)
}

impl LoopCert {
    /// Re-checks the certificate by plain simulation.
    pub fn verify(&self) -> bool {
        let Ok(program) = decode(&self.program) else {
            return false;
        };
        if self.first_step >= self.revisit_step {
            return false;
        }
        let mut state = ControlState::START;
        for step in 0..self.revisit_step {
            if step == self.first_step && state != self.state {
                return false;
            }
            match program.successor(state) {
                Some(next) => state = next,
                None => return false,
            }
        }
        state == self.state
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_encode(1), bits("1"));
        assert_eq!(gamma_encode(2), bits("010"));
        assert_eq!(gamma_encode(4), bits("00100"));
        assert_eq!(gamma_decode(bits("00100").as_slice()), Ok((4, 5)));
        assert_eq!(gamma_decode(bits("0111").as_slice()), Ok((3, 3)));
    }

    #[test]
    fn gamma_exhaustion_is_malformed() {
        assert_eq!(gamma_decode(&[]), Err(InvalidReason::MalformedGamma));
        assert_eq!(gamma_decode(bits("000").as_slice()), Err(InvalidReason::MalformedGamma));
        assert_eq!(gamma_decode(bits("0010").as_slice()), Err(InvalidReason::MalformedGamma));
    }

    #[test]
    fn gamma_extremes() {
        let code = gamma_encode(u64::MAX);
        assert_eq!(code.len(), 127);
        assert_eq!(gamma_decode(code.as_slice()), Ok((u64::MAX, 127)));
        let mut too_long = vec![false; 64];
        too_long.extend(vec![true; 65]);
        assert_eq!(gamma_decode(&too_long), Err(InvalidReason::MalformedGamma));
    }

    #[test]
    fn zigzag_roundtrip() {
        for d in [-3i64, -2, -1, 0, 1, 2, 3, i64::MAX, i64::MIN] {
            assert_eq!(unzigzag(zigzag(d)), d);
        }
        assert_eq!(zigzag(0), 0);
        assert_eq!(zigzag(-1), 1);
        assert_eq!(zigzag(1), 2);
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode(&bits("1")).unwrap().instructions(), &[]);
        assert_eq!(
            decode(&bits("01001")).unwrap().instructions(),
            &[Instruction::Emit0]
        );
        assert_eq!(decode(&bits("10")), Err(InvalidReason::Leftover));
        assert_eq!(decode(&bits("010")), Err(InvalidReason::Truncated));
        assert_eq!(decode(&bits("0101")), Err(InvalidReason::Truncated));
        assert_eq!(decode(&bits("0101110")), Err(InvalidReason::MalformedGamma));
        assert_eq!(
            decode(&bits("0101110010")).unwrap().instructions(),
            &[Instruction::DjzA(-1)]
        );
    }

    #[test]
    fn run_examples() {
        assert_eq!(
            run(&bits("1"), 10),
            RunOutcome::Halted {
                output: bits(""),
                steps: 0
            }
        );
        assert_eq!(
            run(&bits("01001"), 10),
            RunOutcome::Halted {
                output: bits("0"),
                steps: 1
            }
        );
        for budget in [0, 1, 10, 1000] {
            assert_eq!(run(&bits("0101110010"), budget), RunOutcome::Running { budget });
        }
        assert_eq!(run(&bits("10"), 5), RunOutcome::Invalid(InvalidReason::Leftover));
    }

    #[test]
    fn halt_instruction_costs_a_step() {
        assert_eq!(run(&bits("01000"), 0), RunOutcome::Running { budget: 0 });
        assert_eq!(
            run(&bits("01000"), 1),
            RunOutcome::Halted {
                output: bits(""),
                steps: 1
            }
        );
    }

    #[test]
    fn out_of_range_jumps_halt() {
        // DJZA +5 with A = 0 jumps past the end.
        let p = encode(&[Instruction::DjzA(5), Instruction::Emit1]);
        assert_eq!(
            run(&p, 10),
            RunOutcome::Halted {
                output: bits(""),
                steps: 1
            }
        );
        let p = encode(&[Instruction::Emit0, Instruction::DjzB(-7)]);
        assert_eq!(
            run(&p, 10),
            RunOutcome::Halted {
                output: bits("0"),
                steps: 2
            }
        );
    }

    #[test]
    fn counted_loop() {
        // INCA INCA; loop: DJZA +1 (exit), EMIT1, DJZB -3 (B stays 0, back to DJZA)
        let p = encode(&[
            Instruction::IncA,
            Instruction::IncA,
            Instruction::DjzA(2),
            Instruction::Emit1,
            Instruction::DjzB(-3),
        ]);
        match run(&p, 100) {
            RunOutcome::Halted { output, .. } => assert_eq!(output, bits("11")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn literal_examples() {
        assert_eq!(literal_program(&bits("")), bits("1"));
        assert_eq!(literal_program(&bits("0")), bits("01001"));
        assert_eq!(literal_program(&bits("01")), bits("0110110"));
        assert_eq!(literal_program(&bits("0101")).len(), 13);
    }

    #[test]
    fn loop_examples() {
        let cert = detect_loop(&bits("0101110010"), 100).unwrap().unwrap();
        assert_eq!(cert.revisit_step, 1);
        assert_eq!(cert.first_step, 0);
        assert_eq!(cert.state, ControlState::START);
        assert!(cert.verify());
        assert_eq!(detect_loop(&bits("01001"), 100), Ok(None));
        assert_eq!(detect_loop(&bits("0101110010"), 0), Ok(None));
        assert_eq!(detect_loop(&bits("0"), 10), Err(InvalidReason::MalformedGamma));
    }

    #[test]
    fn loop_with_tail() {
        // EMIT0 EMIT1 INCA; then DJZB -1 spins forever at pc 3 with A = 1.
        let p = encode(&[
            Instruction::Emit0,
            Instruction::Emit1,
            Instruction::IncA,
            Instruction::DjzB(-1),
        ]);
        let cert = detect_loop(&p, 10).unwrap().unwrap();
        assert_eq!((cert.first_step, cert.revisit_step), (3, 4));
        assert_eq!(cert.state, ControlState { pc: 3, a: 1, b: 0 });
        assert!(cert.verify());
        assert_eq!(detect_loop(&p, 3), Ok(None));
        assert!(detect_loop(&p, 4).unwrap().is_some());
    }

    #[test]
    fn tampered_cert_fails_verification() {
        let mut cert = detect_loop(&bits("0101110010"), 100).unwrap().unwrap();
        cert.state.a = 1;
        assert!(!cert.verify());
        let mut cert = detect_loop(&bits("0101110010"), 100).unwrap().unwrap();
        cert.program = bits("01001");
        assert!(!cert.verify());
    }

    #[test]
    fn streaming_stops_early() {
        let p = decode(&literal_program(&bits("10110"))).unwrap();
        let s = p.run_streaming(100, 3);
        assert_eq!(s.output, bits("101"));
        assert!(!s.halted);
        assert_eq!(s.steps, 3);
    }
}
