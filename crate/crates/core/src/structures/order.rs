use super::tournament::{Beats, Tournament};
use crate::{Error, Result};

/// A linear order on `[0, n)`, kept as a transitive tournament where
/// `beats(x, y)` means `x <_L y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearOrderPrefix {
    rel: Tournament,
}

impl LinearOrderPrefix {
    /// Wraps a tournament after checking it has no 3-cycle.
    pub fn from_tournament(rel: Tournament) -> Result<Self> {
        if let Some(c) = rel.find_three_cycle() {
            return Err(Error::NotTransitive(c));
        }
        Ok(LinearOrderPrefix { rel })
    }

    /// `ranks[x]` is the position of `x` in the order; ranks must be distinct.
    pub fn from_ranks(ranks: &[usize]) -> Result<Self> {
        let mut seen = ranks.to_vec();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != ranks.len() {
            return Err(Error::Parse("ranks are not distinct".into()));
        }
        Ok(LinearOrderPrefix {
            rel: Tournament::from_fn(ranks.len(), |x, y| ranks[x] < ranks[y]),
        })
    }

    pub fn len(&self) -> usize {
        self.rel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rel.is_empty()
    }

    /// `x <_L y`.
    pub fn less(&self, x: usize, y: usize) -> bool {
        x != y && self.rel.beats(x, y)
    }

    pub fn relation(&self) -> &Tournament {
        &self.rel
    }
}

/// Longest subsequences (increasing in position) that ascend or descend in
/// the order, with witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneReport {
    pub ascending: Vec<usize>,
    pub descending: Vec<usize>,
}

impl MonotoneReport {
    pub fn ascending_len(&self) -> usize {
        self.ascending.len()
    }
    pub fn descending_len(&self) -> usize {
        self.descending.len()
    }
}

fn longest_chain(n: usize, step: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut len = vec![1usize; n];
    let mut prev = vec![usize::MAX; n];
    for j in 0..n {
        for i in 0..j {
            if step(i, j) && len[i] + 1 > len[j] {
                len[j] = len[i] + 1;
                prev[j] = i;
            }
        }
    }
    let Some(end) = (0..n).max_by(|&a, &b| len[a].cmp(&len[b]).then(b.cmp(&a))) else {
        return Vec::new();
    };
    let mut out = vec![end];
    while prev[*out.last().unwrap()] != usize::MAX {
        out.push(prev[*out.last().unwrap()]);
    }
    out.reverse();
    out
}

/// Quadratic dynamic program over positions `0..n`.
pub fn longest_monotone(l: &LinearOrderPrefix) -> MonotoneReport {
    let n = l.len();
    MonotoneReport {
        ascending: longest_chain(n, |i, j| l.less(i, j)),
        descending: longest_chain(n, |i, j| l.less(j, i)),
    }
}
