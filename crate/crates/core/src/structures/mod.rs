//! Finite combinatorial objects and the direct checkers over them.
//!
//! Vertex sets are passed as slices of `usize`; order does not matter for
//! checkers, and every set returned by this module is sorted ascending.

mod coloring;
mod family;
mod order;
pub mod search;
mod tournament;

pub use coloring::{FiniteColoring2, Homogeneity};
pub use family::{cohesive_report, CohesiveVerdict, SetFamily, Side};
pub use order::{longest_monotone, LinearOrderPrefix, MonotoneReport};
pub use search::{greedy_common_transitive, max_common_transitive, max_transitive_subtournament};
pub use tournament::{
    beats, is_transitive, minimal_intervals, three_cycle_in, Beats, Endpoint, HashedTournament,
    Interval, Tournament,
};

use crate::{Error, Result};

/// Default cap for the exponential transitive-subset search.
pub const DEFAULT_SEARCH_CAP: usize = 20;

pub(crate) fn check_range(set: &[usize], size: usize) -> Result<()> {
    match set.iter().find(|&&v| v >= size) {
        Some(&vertex) => Err(Error::VertexOutOfRange { vertex, size }),
        None => Ok(()),
    }
}

pub(crate) fn sorted_unique(set: &[usize]) -> Vec<usize> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}
