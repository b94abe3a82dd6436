//! Finite models of limit-computable objects.
//!
//! A [`Delta2Approx`] is a stage-indexed function that changes value at
//! finitely many declared events per point; [`EnumeratedSet`] is a monotone
//! enumeration with settling times. The stable-pair transforms convert
//! between an approximation and the pair coloring `h(x, s)` that carries it.

mod approx;
mod enumerated;
mod stable;

pub use approx::{Delta2Approx, DoubleLimitApprox, Event, LimitReport};
pub use enumerated::EnumeratedSet;
pub use stable::{from_stable_pairs, to_stable_pairs, StabilityReport};
