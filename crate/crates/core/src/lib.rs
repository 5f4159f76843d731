//! An executable laboratory for algorithmic information theory.
//!
//! Everything here runs on one fixed machine, the prefix-free two-counter
//! language in [`vm`]. On top of it:
//!
//! - [`enumerator`] builds resumable halting censuses of all short programs,
//! - [`omega`] turns a census into an exact lower bound on the halting
//!   probability,
//! - [`elegant`] searches for size-minimal programs and compression reports,
//! - [`theory`] is a small formal theory whose theorems include elegance
//!   claims, with an independent proof checker,
//! - [`reals`] builds digit streams, a diagonal real, a measure-zero cover
//!   and a question-answering digit sequence.
//!
//! All arithmetic is exact; no floating point is used.

pub mod bits;
pub mod dyadic;
pub mod elegant;
pub mod enumerator;
pub mod omega;
pub mod reals;
pub mod theory;
pub mod vm;

pub use bits::Bits;
pub use dyadic::Dyadic;
pub use enumerator::{EnumState, HaltRecord};
pub use omega::OmegaBound;
pub use vm::{decode, detect_loop, literal_program, run, Instruction, LoopCert, Program, RunOutcome};
