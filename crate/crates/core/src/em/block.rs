use std::collections::{BTreeMap, HashMap};

use super::condition::{behaviour, EMCondition};
use super::rho_key;
use crate::structures::{greedy_common_transitive, is_transitive, max_common_transitive, Beats};
use crate::{Error, Result};

/// A partition of a finite block `E ⊆ X` together with the reservoir `Y`
/// that sits uniformly above or below each part, per tournament.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSplit {
    pub base: EMCondition,
    /// `E_ρ` by `ρ`: if `ρ(ν) = 0` then `E_ρ → Y` in `T_ν`, else `Y → E_ρ`.
    pub classes: BTreeMap<u64, Vec<usize>>,
    pub reservoir: Vec<usize>,
}

/// Partitions `block` by the behaviour each later reservoir element induces
/// on it and keeps the largest such preimage as the new reservoir.
pub fn block_extend<B: Beats + Sync>(
    c: &EMCondition,
    ts: &[B],
    block: &[usize],
) -> Result<BlockSplit> {
    if c.sigma.len() > ts.len() {
        return Err(Error::TooFewTournaments(c.sigma.len(), ts.len()));
    }
    let k = c.sigma.len();
    let mut block = block.to_vec();
    block.sort_unstable();
    block.dedup();
    if let Some(&x) = block
        .iter()
        .find(|&&x| c.reservoir.binary_search(&x).is_err())
    {
        return Err(Error::InvalidCondition(format!(
            "block element {x} is not in the reservoir"
        )));
    }
    let top = block.last().copied();
    let candidates: Vec<usize> = c
        .reservoir
        .iter()
        .copied()
        .filter(|&y| top.is_none_or(|t| y > t))
        .collect();
    // Label of a in E under y: bit ν set iff T_ν(y, a), i.e. ρ(ν) = 1.
    let signatures: Vec<Vec<u64>> = crate::batch::map(&candidates, |&y| {
        block.iter().map(|&a| behaviour(ts, k, y, a)).collect()
    });
    let mut groups: HashMap<&[u64], usize> = HashMap::new();
    for sig in &signatures {
        *groups.entry(sig.as_slice()).or_default() += 1;
    }
    // Ties compare complemented labels, so a singleton block picks the same
    // class as the one-point extension.
    let mask = if k == 0 { 0 } else { u64::MAX >> (64 - k) };
    let key = |sig: &[u64]| {
        sig.iter()
            .map(|&r| rho_key(!r & mask, k))
            .collect::<Vec<_>>()
    };
    let (best, _) = groups
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| key(b.0).cmp(&key(a.0))))
        .map(|(s, n)| (s.to_vec(), *n))
        .ok_or(Error::EmptyReservoir)?;
    let reservoir: Vec<usize> = candidates
        .iter()
        .zip(&signatures)
        .filter(|(_, s)| **s == best)
        .map(|(&y, _)| y)
        .collect();
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (&a, &rho) in block.iter().zip(&best) {
        classes.entry(rho).or_default().push(a);
    }
    Ok(BlockSplit {
        base: c.clone(),
        classes,
        reservoir,
    })
}

impl BlockSplit {
    fn k(&self) -> usize {
        self.base.sigma.len()
    }

    /// `(σ, F ∪ F₁, Y)` for a transitive `F₁ ⊆ E_ρ`.
    pub fn extend<B: Beats>(&self, ts: &[B], rho: u64, f1: &[usize]) -> Result<EMCondition> {
        let class = self
            .classes
            .get(&rho)
            .ok_or_else(|| Error::InvalidCondition(format!("no class {rho:#b}")))?;
        if let Some(&x) = f1.iter().find(|x| !class.contains(x)) {
            return Err(Error::InvalidCondition(format!(
                "{x} is not in class {rho:#b}"
            )));
        }
        for (nu, t) in ts.iter().enumerate().take(self.k()) {
            if !is_transitive(t, f1)? {
                return Err(Error::InvalidCondition(format!(
                    "F1 not transitive for T_{nu}"
                )));
            }
        }
        let mut core = self.base.core.clone();
        core.extend_from_slice(f1);
        core.sort_unstable();
        core.dedup();
        EMCondition::new(self.base.sigma.clone(), core, self.reservoir.clone())
    }

    /// Largest simultaneously transitive subset of each class (exact up to
    /// `cap` elements, greedy beyond); returns the best `(ρ, F₁)`, ties to
    /// the lexicographically least `ρ`.
    pub fn best_chain<B: Beats>(&self, ts: &[B], cap: usize) -> Result<(u64, Vec<usize>)> {
        let k = self.k();
        let ts = &ts[..k];
        let mut best: Option<(u64, Vec<usize>)> = None;
        for (&rho, class) in &self.classes {
            let chain = if class.len() <= cap {
                max_common_transitive(ts, class, cap)?
            } else {
                greedy_common_transitive(ts, class)
            };
            let better = match &best {
                None => true,
                Some((r, b)) => {
                    chain.len() > b.len()
                        || (chain.len() == b.len() && rho_key(rho, k) < rho_key(*r, k))
                }
            };
            if better {
                best = Some((rho, chain));
            }
        }
        best.ok_or(Error::EmptyReservoir)
    }
}
