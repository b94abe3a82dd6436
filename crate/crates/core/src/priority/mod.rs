//! The three finite-injury engines and their replay verifiers.
//!
//! Each engine is a deterministic stage machine over `[0, H)` that appends
//! to a [`PriorityTrace`]; each verifier re-derives the run's claims from the
//! run record and the inputs, independently of the engine's bookkeeping.
//!
//! Requirement truth is evaluated directly against the object built so far
//! rather than through an index for the finished object.

mod candidates;
mod functional;
mod report;
pub mod sads;
pub mod sdnr;
pub mod sts;
mod trace;

pub use candidates::{Candidate, CandidateFamily};
pub use functional::{Computation, FunctionalTable, TableEntry};
pub use report::{Check, Status, Verdict, Verification};
pub use trace::{EngineTag, EventKind, PriorityTrace, TraceRecord, TraceValue};

/// Cantor pairing `<e, i>`; requirement priority is this value.
pub fn cantor_pair(e: usize, i: usize) -> usize {
    (e + i) * (e + i + 1) / 2 + i
}
