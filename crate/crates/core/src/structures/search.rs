//! Exact and greedy searches for sets transitive in several tournaments.

use super::tournament::Beats;
use super::{check_range, sorted_unique};
use crate::{Error, Result};

/// Maximum-cardinality transitive subset of `t`, lexicographically least on
/// ties. Exponential; refuses instances larger than `cap`.
pub fn max_transitive_subtournament<B: Beats>(t: &B, cap: usize) -> Result<Vec<usize>> {
    let n = t.order();
    if n > cap {
        return Err(Error::SizeExceedsCap { size: n, cap });
    }
    let all: Vec<usize> = (0..n).collect();
    max_common_transitive(&[t], &all, cap)
}

/// Maximum subset of `vertices` that is transitive in every tournament of
/// `ts` simultaneously, lexicographically least among maximum sets.
///
/// Branch and bound over the sorted vertex list, include-branch first, so
/// the first maximum found is the lex-least one.
pub fn max_common_transitive<B: Beats>(
    ts: &[B],
    vertices: &[usize],
    cap: usize,
) -> Result<Vec<usize>> {
    let vs = sorted_unique(vertices);
    if vs.len() > cap || vs.len() > 64 {
        return Err(Error::SizeExceedsCap {
            size: vs.len(),
            cap: cap.min(64),
        });
    }
    for t in ts {
        check_range(&vs, t.order())?;
    }
    let k = vs.len();
    // succ[t][i]: mask of local indices j with vs[i] -> vs[j] in tournament t
    let succ: Vec<Vec<u64>> = ts
        .iter()
        .map(|t| {
            (0..k)
                .map(|i| {
                    (0..k)
                        .filter(|&j| j != i && t.beats(vs[i], vs[j]))
                        .fold(0u64, |m, j| m | 1 << j)
                })
                .collect()
        })
        .collect();
    let mut search = Bnb {
        succ: &succ,
        k,
        best: 0,
        best_len: 0,
        found: false,
    };
    search.go(0, 0, 0);
    let mask = search.best;
    Ok((0..k)
        .filter(|&i| mask >> i & 1 == 1)
        .map(|i| vs[i])
        .collect())
}

struct Bnb<'a> {
    succ: &'a [Vec<u64>],
    k: usize,
    best: u64,
    best_len: usize,
    found: bool,
}

impl Bnb<'_> {
    fn can_add(&self, set: u64, i: usize) -> bool {
        let full = if self.k == 64 {
            u64::MAX
        } else {
            (1u64 << self.k) - 1
        };
        self.succ.iter().all(|succ| {
            let out = set & succ[i];
            let inn = set & !succ[i] & full & !(1 << i);
            let mut o = out;
            while o != 0 {
                let w = o.trailing_zeros() as usize;
                o &= o - 1;
                if succ[w] & inn != 0 {
                    return false;
                }
            }
            true
        })
    }

    fn go(&mut self, i: usize, set: u64, len: usize) {
        if i == self.k {
            if !self.found || len > self.best_len {
                self.best = set;
                self.best_len = len;
                self.found = true;
            }
            return;
        }
        if self.found && len + (self.k - i) <= self.best_len {
            return;
        }
        if self.can_add(set, i) {
            self.go(i + 1, set | 1 << i, len + 1);
        }
        self.go(i + 1, set, len);
    }
}

/// Ascending greedy: admit each vertex iff the set stays transitive in
/// every tournament of `ts`.
pub fn greedy_common_transitive<B: Beats>(ts: &[B], vertices: &[usize]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for v in sorted_unique(vertices) {
        let ok = ts.iter().all(|t| {
            chosen.iter().all(|&u| {
                if !t.beats(u, v) {
                    return true;
                }
                // u -> v; a cycle needs w with v -> w -> u
                !chosen
                    .iter()
                    .any(|&w| w != u && t.beats(v, w) && t.beats(w, u))
            })
        });
        if ok {
            chosen.push(v);
        }
    }
    chosen
}
