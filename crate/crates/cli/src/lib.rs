//! Command-line front end. [`dispatch`] parses arguments, runs one
//! experiment and returns the exit code with the report text, so the whole
//! surface is testable without spawning processes.
//!
//! Exit codes: 0 success, 1 mathematical negative (not found, unprovable,
//! not a program), 2 usage, parse or I/O failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use omegalab_core::bits::Bits;
use omegalab_core::elegant::{compression_report, find_elegant};
use omegalab_core::enumerator::{EnumState, Workers};
use omegalab_core::omega::{kraft_check, KraftVerdict, OmegaBound};
use omegalab_core::reals::{self, borel_cover, diagonal, fmt_ratio, DigitStream};
use omegalab_core::theory::{
    check_proof, elegance_frontier, parse_statement, prove, Theory,
};
use omegalab_core::vm::{self, RunOutcome};

/// Step budget used to certify facts when loading a theory file.
pub const DEFAULT_THEORY_BUDGET: u64 = 10_000;

pub const THREADS_ENV: &str = "OMEGALAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "omegalab", version, about = "Experiments on a prefix-free two-counter machine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build or resume a halting census, checkpointing after every length
    Enumerate {
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        budget: u64,
        #[arg(long)]
        checkpoint: PathBuf,
        /// Continue from an existing checkpoint instead of starting over
        #[arg(long)]
        resume: bool,
    },
    /// Lower bound on the halting probability from a census checkpoint
    Omega {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Binary digits to print (default: the census length)
        #[arg(long)]
        bits: Option<usize>,
    },
    /// Shortest programs producing a target output
    Elegant {
        #[arg(long, value_parser = parse_bits_arg, allow_hyphen_values = true)]
        target: Bits,
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        budget: u64,
    },
    /// Compare the literal program for some facts with the best found
    Compress {
        #[arg(long, value_parser = parse_bits_arg, allow_hyphen_values = true)]
        facts: Bits,
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        budget: u64,
    },
    /// Run one program
    Run {
        #[arg(long, value_parser = parse_bits_arg)]
        program: Bits,
        #[arg(long)]
        budget: u64,
    },
    /// Diagonal real over the digit streams of listed programs
    Diag {
        #[arg(long)]
        programs: PathBuf,
        #[arg(long)]
        digits: usize,
        #[arg(long)]
        budget: u64,
    },
    /// Cover listed points with intervals of total length below epsilon
    Cover {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        epsilon: String,
    },
    /// Classify the first strings of the question language
    Borel {
        #[arg(long)]
        prefix: u64,
        #[arg(long)]
        budget: u64,
    },
    /// Toy formal theory
    Theory {
        #[command(subcommand)]
        command: TheoryCommand,
    },
}

#[derive(Debug, Subcommand)]
enum TheoryCommand {
    /// Prove a statement and re-check the proof
    Prove {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        goal: String,
        /// Step budget for certifying the theory's facts
        #[arg(long, default_value_t = DEFAULT_THEORY_BUDGET)]
        budget: u64,
    },
    /// Longest provably elegant program, with the theory size
    Frontier {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THEORY_BUDGET)]
        budget: u64,
    },
    /// Print the run axioms of every program up to a length as a theory file
    Certify {
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        budget: u64,
    },
}

/// Accepts `-` (or nothing) for the empty string.
fn parse_bits_arg(s: &str) -> Result<Bits, String> {
    if s == "-" {
        return Ok(Bits::new());
    }
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn negative(stdout: String) -> Self {
        Outcome {
            code: 1,
            stdout,
            stderr: String::new(),
        }
    }

    fn failure(stderr: String) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Worker count from `OMEGALAB_THREADS`, or all available cores.
pub fn workers_from_env() -> Result<Workers> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("{THREADS_ENV}={v:?} is not a thread count"))?;
            Ok(Workers::Threads(n.max(1)))
        }
        Err(_) => Ok(Workers::Threads(
            std::thread::available_parallelism().map_or(1, |n| n.get()),
        )),
    }
}

pub fn dispatch<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match workers_from_env() {
        Ok(w) => dispatch_with(args, w),
        Err(e) => Outcome::failure(format!("error: {e:#}\n")),
    }
}

pub fn dispatch_with<I, T>(args: I, workers: Workers) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome::ok(text)
                }
                _ => Outcome::failure(text),
            };
        }
    };
    match execute(cli.command, workers) {
        Ok(outcome) => outcome,
        Err(e) => Outcome::failure(format!("error: {e:#}\n")),
    }
}

fn execute(command: Command, workers: Workers) -> Result<Outcome> {
    match command {
        Command::Enumerate {
            max_len,
            budget,
            checkpoint,
            resume,
        } => cmd_enumerate(max_len, budget, &checkpoint, resume, workers),
        Command::Omega { checkpoint, bits } => cmd_omega(&checkpoint, bits),
        Command::Elegant {
            target,
            max_len,
            budget,
        } => Ok(match find_elegant(&target, max_len, budget) {
            Ok(v) => Outcome::ok(v.to_string()),
            Err(nf) => Outcome::negative(format!(
                "NOT FOUND target={} (len<={}, budget {})\n",
                nf.target.display_or("-"),
                nf.max_len,
                nf.budget
            )),
        }),
        Command::Compress {
            facts,
            max_len,
            budget,
        } => Ok(Outcome::ok(compression_report(&facts, max_len, budget).to_string())),
        Command::Run { program, budget } => Ok(cmd_run(&program, budget)),
        Command::Diag {
            programs,
            digits,
            budget,
        } => cmd_diag(&programs, digits, budget),
        Command::Cover { points, epsilon } => cmd_cover(&points, &epsilon),
        Command::Borel { prefix, budget } => {
            let mut out = String::new();
            for k in 1..=prefix {
                let s = reals::borel_string(k);
                let _ = writeln!(out, "{k} {s} {}", reals::classify(&s, budget));
            }
            Ok(Outcome::ok(out))
        }
        Command::Theory { command } => cmd_theory(command),
    }
}

fn cmd_enumerate(
    max_len: usize,
    budget: u64,
    checkpoint: &Path,
    resume: bool,
    workers: Workers,
) -> Result<Outcome> {
    let mut state = if resume && checkpoint.exists() {
        EnumState::load(checkpoint)
            .with_context(|| format!("loading {}", checkpoint.display()))?
    } else {
        EnumState::empty(budget)
    };
    if state.budget() > budget {
        bail!(
            "checkpoint budget {} exceeds --budget {budget}",
            state.budget()
        );
    }
    if state.max_len_done() > max_len {
        bail!(
            "checkpoint frontier {} exceeds --max-len {max_len}",
            state.max_len_done()
        );
    }
    if state.budget() < budget {
        state = state.refine(budget, workers)?;
    }
    state.save(checkpoint)?;
    while state.max_len_done() < max_len {
        state.extend_one(workers)?;
        state.save(checkpoint)?;
    }
    Ok(Outcome::ok(format!(
        "ENUMERATED len<={} budget {}: {} halting, {} pending, {} invalid strings skipped\n",
        state.max_len_done(),
        state.budget(),
        state.records().len(),
        state.pending().len(),
        state.invalid_count()
    )))
}

fn cmd_omega(checkpoint: &Path, bits: Option<usize>) -> Result<Outcome> {
    let state = EnumState::load(checkpoint)
        .with_context(|| format!("loading {}", checkpoint.display()))?;
    let bound = OmegaBound::from_state(&state);
    match kraft_check(bound.contributing()) {
        KraftVerdict::Pass { .. } => {}
        KraftVerdict::PrefixPair { shorter, longer } => {
            bail!("census violates prefix-freeness: {shorter} is a prefix of {longer}")
        }
        KraftVerdict::MassAtLeastOne { mass } => bail!("census mass {mass} is not below 1"),
    }
    let k = bits.unwrap_or(state.max_len_done());
    Ok(Outcome::ok(format!("{}\n", bound.report(&state, k))))
}

fn cmd_run(program: &Bits, budget: u64) -> Outcome {
    match vm::run(program, budget) {
        RunOutcome::Halted { output, steps } => Outcome::ok(format!(
            "HALTED output={} steps={steps}\n",
            output.display_or("-")
        )),
        RunOutcome::Running { budget } => {
            let mut text = format!("RUNNING budget={budget}\n");
            if let Ok(Some(cert)) = vm::detect_loop(program, budget) {
                let _ = writeln!(
                    text,
                    "LOOP state pc={} a={} b={} at step {} recurs at step {}",
                    cert.state.pc, cert.state.a, cert.state.b, cert.first_step, cert.revisit_step
                );
            }
            Outcome::ok(text)
        }
        RunOutcome::Invalid(reason) => Outcome::negative(format!("INVALID {reason:?}: {reason}\n")),
    }
}

/// Non-empty lines that are not `#` comments, with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn cmd_diag(path: &Path, digits: usize, budget: u64) -> Result<Outcome> {
    let text = read(path)?;
    let mut streams = Vec::new();
    for (n, line) in content_lines(&text) {
        let bits: Bits = line
            .parse()
            .map_err(|e| anyhow!("{}:{n}: {e}", path.display()))?;
        let stream = DigitStream::new(&bits)
            .map_err(|e| anyhow!("{}:{n}: {bits} is not a program: {e}", path.display()))?;
        streams.push(stream);
    }
    let d = diagonal(&streams, digits, budget)?;
    let unverified: Vec<String> = d.unverified().iter().map(|i| (i + 1).to_string()).collect();
    Ok(Outcome::ok(format!(
        "{d}\nUNVERIFIED {}\n",
        if unverified.is_empty() {
            "none".to_string()
        } else {
            unverified.join(" ")
        }
    )))
}

/// Parses `p/q` or a bare integer `p`. Decimals are rejected.
pub fn parse_ratio(s: &str) -> Result<BigRational, String> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: BigInt = p
        .trim()
        .parse()
        .map_err(|_| format!("{s:?} is not an integer ratio p/q"))?;
    let q: BigInt = q
        .trim()
        .parse()
        .map_err(|_| format!("{s:?} is not an integer ratio p/q"))?;
    if q.is_zero() {
        return Err(format!("{s:?} has a zero denominator"));
    }
    Ok(BigRational::new(p, q))
}

/// One ratio per line; `#` starts a comment line.
pub fn parse_points(text: &str) -> Result<Vec<BigRational>, String> {
    content_lines(text)
        .map(|(n, line)| parse_ratio(line).map_err(|e| format!("line {n}: {e}")))
        .collect()
}

pub fn parse_points_file(path: &Path) -> Result<Vec<BigRational>> {
    parse_points(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn cmd_cover(points: &Path, epsilon: &str) -> Result<Outcome> {
    let points = parse_points_file(points)?;
    let eps = parse_ratio(epsilon).map_err(|e| anyhow!("--epsilon: {e}"))?;
    let report = borel_cover(&points, &eps)?;
    let mut text = report.to_string();
    let _ = writeln!(
        text,
        "BOUND total = {} * (1 - 2^-{}) < {}",
        fmt_ratio(&report.epsilon),
        report.intervals.len(),
        fmt_ratio(&report.epsilon)
    );
    Ok(Outcome::ok(text))
}

fn load_theory(path: &Path, budget: u64) -> Result<Theory> {
    Theory::parse(&read(path)?, budget).with_context(|| format!("loading {}", path.display()))
}

fn cmd_theory(command: TheoryCommand) -> Result<Outcome> {
    match command {
        TheoryCommand::Prove {
            theory,
            goal,
            budget,
        } => {
            let theory = load_theory(&theory, budget)?;
            let goal = parse_statement(&goal).map_err(|e| anyhow!("--goal: {e}"))?;
            match prove(&theory, &goal) {
                Ok(proof) => {
                    check_proof(&theory, &proof)
                        .map_err(|e| anyhow!("internal error: emitted proof fails to check: {e}"))?;
                    Ok(Outcome::ok(format!(
                        "{proof}CHECKED accept (N={})\n",
                        theory.size_bits()
                    )))
                }
                Err(u) => {
                    let mut text = format!("UNPROVABLE {}\n", u.goal);
                    for m in &u.missing {
                        let _ = writeln!(text, "MISSING {m}");
                    }
                    Ok(Outcome::negative(text))
                }
            }
        }
        TheoryCommand::Frontier { theory, budget } => {
            let theory = load_theory(&theory, budget)?;
            Ok(Outcome::ok(elegance_frontier(&theory).to_string()))
        }
        TheoryCommand::Certify { max_len, budget } => {
            let theory = Theory::certified_up_to(max_len, budget);
            Ok(Outcome::ok(format!(
                "# run axioms for every program of length <= {max_len} at budget {budget}\n{}",
                theory.serialize()
            )))
        }
    }
}
