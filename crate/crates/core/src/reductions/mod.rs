//! Translations between principles at finite scale: bounded colorings and
//! rainbows, normality, the triple-to-pair collapse, the coloring view of a
//! tournament, cohesive cells and pointwise diagonal escape.

mod bounded;
mod bridge;
mod cohesive;
mod collapse;

pub use bounded::{
    classify_rainbow_stable, colex_rank, greedy_normal_subset, is_normal, is_rainbow, max_rainbow,
    normal_witness, normal_witness_on, rainbow_collision, KBoundedColoring, RainbowStable,
};
pub use bridge::{
    coloring_to_tournament, monotone_in_transitive, tournament_to_coloring, transitive_order,
};
pub use cohesive::{
    canonical_cohesive_instance, diagonal_escape, find_cohesive, find_cohesive_exhaustive,
    CohesiveCell, MAX_COHESIVE_FAMILY,
};
pub use collapse::{
    collapse_triples, collapse_with_tail, greedy_rainbow, lift_rainbow, tail_len, Collapse,
};
