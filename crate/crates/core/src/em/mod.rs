//! Erdős–Moser conditions at finite scale: validity, the beats dichotomy,
//! one-point and block extensions, and a walk over several tournaments.
//!
//! Behaviour vectors `ρ` are `u64` masks with bit `ν` holding `ρ(ν)`; ties
//! between vectors go to the lexicographically least sequence
//! `ρ(0) ρ(1) ...`.

mod block;
mod condition;
mod encode;
mod walk;

pub use block::{block_extend, BlockSplit};
pub use condition::{
    check_condition, one_point_extend, register_tournament, verify_beats, EMCondition, Violation,
};
pub use encode::{encode_set_tournament, find_alternation, find_alternation_exhaustive};
pub use walk::{em_walk, verify_walk, WalkConfig, WalkOutcome};

/// Ordering key for `ρ` over `k` bits: lexicographic on `ρ(0), ρ(1), ...`.
pub(crate) fn rho_key(rho: u64, k: usize) -> u64 {
    if k == 0 {
        0
    } else {
        rho.reverse_bits() >> (64 - k)
    }
}

/// `ρ(0) ρ(1) ...` as a bit string, `-` when empty.
pub fn rho_string(rho: u64, k: usize) -> String {
    if k == 0 {
        return "-".into();
    }
    (0..k)
        .map(|nu| if rho >> nu & 1 == 1 { '1' } else { '0' })
        .collect()
}
