//! Finite-horizon workbench for priority constructions over colorings,
//! linear orders and tournaments.
//!
//! Every construction in this crate runs for a bounded number of stages and
//! is paired with a verifier that re-derives its claimed properties by brute
//! force. The modules are layered bottom-up:
//!
//! - [`structures`]: tournaments, pair colorings, linear orders, set families
//!   and the exhaustive search oracles over them.
//! - [`limit`]: stage-indexed approximations and the stable-pair transforms.
//! - [`priority`]: the three finite-injury engines and their verifiers.
//! - [`em`]: Erdős–Moser conditions and the multi-tournament walker.
//! - [`reductions`]: rainbow, normality, collapse and cohesive-set machinery.
//! - [`harness`]: scenarios, seeded generators, trace persistence and replay.
//!
//! Batch evaluation over seeds goes through [`batch`], which is backed by
//! rayon unless the `parallel` feature is disabled.

pub mod batch;
pub mod em;
mod error;
pub mod harness;
pub mod limit;
pub mod priority;
pub mod reductions;
pub mod structures;

pub use error::{Error, Result};
