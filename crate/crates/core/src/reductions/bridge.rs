use crate::structures::{
    check_range, longest_monotone, sorted_unique, three_cycle_in, Beats, FiniteColoring2,
    LinearOrderPrefix, MonotoneReport, Tournament,
};
use crate::{Error, Result};

/// For `x < y`: `x -> y` iff `f(x, y) = 1`.
pub fn coloring_to_tournament(f: &FiniteColoring2) -> Result<Tournament> {
    if f.palette() != 2 {
        return Err(Error::PaletteMismatch {
            expected: 2,
            found: f.palette(),
        });
    }
    Ok(Tournament::from_fn(f.horizon(), |x, y| f.color(x, y) == 1))
}

/// Inverse of [`coloring_to_tournament`].
pub fn tournament_to_coloring<B: Beats>(t: &B) -> FiniteColoring2 {
    FiniteColoring2::from_fn(t.order(), 2, |x, y| t.beats(x, y) as u32)
        .expect("two colors fit a palette of two")
}

/// Positions of `s` (ascending) ordered by the tournament; fails if `s` is
/// not transitive.
pub fn transitive_order<B: Beats>(t: &B, s: &[usize]) -> Result<LinearOrderPrefix> {
    check_range(s, t.order())?;
    let s = sorted_unique(s);
    if let Some(c) = three_cycle_in(t, &s) {
        return Err(Error::NotTransitive(c));
    }
    let ranks: Vec<usize> = s
        .iter()
        .map(|&x| s.iter().filter(|&&y| y != x && t.beats(y, x)).count())
        .collect();
    LinearOrderPrefix::from_ranks(&ranks)
}

/// Longest monotone runs of a transitive set, as vertices.
pub fn monotone_in_transitive<B: Beats>(t: &B, s: &[usize]) -> Result<MonotoneReport> {
    let order = transitive_order(t, s)?;
    let s = sorted_unique(s);
    let r = longest_monotone(&order);
    Ok(MonotoneReport {
        ascending: r.ascending.iter().map(|&i| s[i]).collect(),
        descending: r.descending.iter().map(|&i| s[i]).collect(),
    })
}
