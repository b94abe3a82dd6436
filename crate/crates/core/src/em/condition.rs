use crate::structures::Beats;
use crate::{Error, Result};

use super::rho_key;

/// `(σ, F, X)`: for each registered `ν`, `(F_ν, X)` is an EM condition for
/// `T_ν`, where `F_ν = F \ [0, σ(ν)]`. `F` and `X` are sorted, `F < X`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EMCondition {
    pub sigma: Vec<usize>,
    pub core: Vec<usize>,
    pub reservoir: Vec<usize>,
}

/// Why a condition fails for tournament `nu`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `F_ν` itself has a 3-cycle.
    Core { nu: usize, cycle: [usize; 3] },
    /// `F_ν ∪ {x}` has a 3-cycle.
    Extension {
        nu: usize,
        x: usize,
        cycle: [usize; 3],
    },
    /// `x` and `y` lie in different minimal intervals of `F_ν`.
    Split { nu: usize, x: usize, y: usize },
}

impl EMCondition {
    /// `(σ = [], F = ∅, X = [0, n))`.
    pub fn fresh(n: usize) -> Self {
        EMCondition {
            sigma: Vec::new(),
            core: Vec::new(),
            reservoir: (0..n).collect(),
        }
    }

    pub fn new(sigma: Vec<usize>, core: Vec<usize>, reservoir: Vec<usize>) -> Result<Self> {
        let mut core = core;
        let mut reservoir = reservoir;
        core.sort_unstable();
        core.dedup();
        reservoir.sort_unstable();
        reservoir.dedup();
        let c = EMCondition {
            sigma,
            core,
            reservoir,
        };
        c.check_mathias()?;
        Ok(c)
    }

    fn check_mathias(&self) -> Result<()> {
        if let (Some(&core_max), Some(&reservoir_min)) = (self.core.last(), self.reservoir.first())
        {
            if core_max >= reservoir_min {
                return Err(Error::ReservoirNotAboveCore {
                    core_max,
                    reservoir_min,
                });
            }
        }
        Ok(())
    }

    /// `F_ν = F \ [0, σ(ν)]`.
    pub fn core_for(&self, nu: usize) -> &[usize] {
        let cut = self.sigma[nu];
        let start = self.core.partition_point(|&f| f <= cut);
        &self.core[start..]
    }
}

fn check_arity<B>(c: &EMCondition, ts: &[B]) -> Result<()> {
    if c.sigma.len() > ts.len() {
        return Err(Error::TooFewTournaments(c.sigma.len(), ts.len()));
    }
    Ok(())
}

/// Chain order of a transitive set: `chain[0]` beats every other element.
fn chain<B: Beats>(t: &B, f: &[usize]) -> std::result::Result<Vec<usize>, [usize; 3]> {
    let mut scored: Vec<(usize, usize)> = f
        .iter()
        .map(|&x| (f.iter().filter(|&&y| y != x && t.beats(x, y)).count(), x))
        .collect();
    scored.sort_unstable_by(|a, b| b.cmp(a));
    let k = f.len();
    if scored.iter().enumerate().all(|(i, &(w, _))| w == k - 1 - i) {
        Ok(scored.into_iter().map(|(_, x)| x).collect())
    } else {
        Err(crate::structures::three_cycle_in(t, f).expect("non-transitive set has a 3-cycle"))
    }
}

/// Position of `x` in the chain (number of chain elements beating it), or a
/// 3-cycle through `x`.
fn slot<B: Beats>(t: &B, chain: &[usize], x: usize) -> std::result::Result<usize, [usize; 3]> {
    let p = chain.iter().filter(|&&c| t.beats(c, x)).count();
    for (i, &c) in chain.iter().enumerate() {
        if (i < p) != t.beats(c, x) {
            // Some earlier chain element loses to x while a later one beats it.
            let (lo, hi) = if i < p {
                (
                    c,
                    chain[p..].iter().copied().find(|&d| t.beats(d, x)).unwrap(),
                )
            } else {
                (
                    chain[..p]
                        .iter()
                        .copied()
                        .find(|&d| !t.beats(d, x))
                        .unwrap(),
                    c,
                )
            };
            return Err([lo, hi, x]);
        }
    }
    Ok(p)
}

/// Checks the condition against `ts`; `Ok(None)` means valid.
pub fn check_condition<B: Beats>(c: &EMCondition, ts: &[B]) -> Result<Option<Violation>> {
    check_arity(c, ts)?;
    c.check_mathias()?;
    for nu in 0..c.sigma.len() {
        let t = &ts[nu];
        let f = c.core_for(nu);
        let order = match chain(t, f) {
            Ok(o) => o,
            Err(cycle) => return Ok(Some(Violation::Core { nu, cycle })),
        };
        let mut first: Option<(usize, usize)> = None;
        for &x in &c.reservoir {
            match slot(t, &order, x) {
                Err(cycle) => return Ok(Some(Violation::Extension { nu, x, cycle })),
                Ok(p) => match first {
                    None => first = Some((x, p)),
                    Some((y, q)) if q != p => return Ok(Some(Violation::Split { nu, x: y, y: x })),
                    _ => {}
                },
            }
        }
    }
    Ok(None)
}

/// For every `ν` and `x ∈ F_ν`: `{x} → X` or `X → {x}`. A `false` here on a
/// valid condition is an implementation bug.
pub fn verify_beats<B: Beats>(c: &EMCondition, ts: &[B]) -> Result<bool> {
    if let Some(v) = check_condition(c, ts)? {
        return Err(Error::InvalidCondition(format!("{v:?}")));
    }
    Ok((0..c.sigma.len()).all(|nu| {
        let t = &ts[nu];
        c.core_for(nu).iter().all(|&x| {
            c.reservoir.iter().all(|&y| t.beats(x, y)) || c.reservoir.iter().all(|&y| t.beats(y, x))
        })
    }))
}

/// Registers the next tournament with offset `min X`.
pub fn register_tournament<B>(c: &EMCondition, ts: &[B]) -> Result<EMCondition> {
    let &x = c.reservoir.first().ok_or(Error::EmptyReservoir)?;
    let mut d = c.clone();
    d.sigma.push(x);
    check_arity(&d, ts)?;
    Ok(d)
}

/// Behaviour vector of `s` against `x`: bit `ν` is `T_ν(x, s)`.
pub(crate) fn behaviour<B: Beats>(ts: &[B], k: usize, x: usize, s: usize) -> u64 {
    (0..k).fold(0, |m, nu| m | (ts[nu].beats(x, s) as u64) << nu)
}

/// Moves `x = min X` into `F` and keeps the largest behaviour class of the
/// rest as reservoir. Returns the new condition and the chosen `ρ`.
pub fn one_point_extend<B: Beats>(
    c: &EMCondition,
    ts: &[B],
    min_keep: usize,
) -> Result<(EMCondition, u64)> {
    check_arity(c, ts)?;
    let k = c.sigma.len();
    if k > 64 {
        return Err(Error::TooFewTournaments(64, k));
    }
    let (&x, rest) = c.reservoir.split_first().ok_or(Error::EmptyReservoir)?;
    let mut counts: std::collections::HashMap<u64, usize> = Default::default();
    let rhos: Vec<u64> = rest.iter().map(|&s| behaviour(ts, k, x, s)).collect();
    for &r in &rhos {
        *counts.entry(r).or_default() += 1;
    }
    let best = counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(rho_key(*b.0, k).cmp(&rho_key(*a.0, k))))
        .map(|(&r, &n)| (r, n));
    let (rho, size) = best.unwrap_or((0, 0));
    if size < min_keep {
        return Err(Error::ReservoirExhausted {
            best: size,
            needed: min_keep,
        });
    }
    let reservoir = rest
        .iter()
        .zip(&rhos)
        .filter(|(_, &r)| r == rho)
        .map(|(&s, _)| s)
        .collect();
    let mut core = c.core.clone();
    core.push(x);
    Ok((
        EMCondition {
            sigma: c.sigma.clone(),
            core,
            reservoir,
        },
        rho,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Tournament;

    #[test]
    fn fresh_condition_is_valid() {
        let t = [Tournament::ascending(10)];
        let c = EMCondition::fresh(10);
        assert_eq!(check_condition(&c, &t).unwrap(), None);
        let c = register_tournament(&c, &t).unwrap();
        assert_eq!(c.sigma, vec![0]);
        assert!(verify_beats(&c, &t).unwrap());
        let c = register_tournament(&c, &[t[0].clone(), t[0].clone()]).unwrap();
        assert_eq!(c.sigma, vec![0, 0]);
    }

    #[test]
    fn mathias_order_is_enforced() {
        assert!(matches!(
            EMCondition::new(vec![], vec![4], vec![2, 5]),
            Err(Error::ReservoirNotAboveCore {
                core_max: 4,
                reservoir_min: 2
            })
        ));
    }

    #[test]
    fn three_cycle_with_core_fails() {
        // 1 -> 2 -> 3 -> 1, everything else ascending.
        let t = [Tournament::from_fn(5, |x, y| !(x == 1 && y == 3))];
        let c = EMCondition {
            sigma: vec![0],
            core: vec![1, 2],
            reservoir: vec![3, 4],
        };
        assert_eq!(
            check_condition(&c, &t).unwrap(),
            Some(Violation::Extension {
                nu: 0,
                x: 3,
                cycle: [1, 2, 3]
            })
        );
        // With offset 1 the core seen by the tournament is {2} only.
        let c = EMCondition {
            sigma: vec![1],
            ..c
        };
        assert_eq!(check_condition(&c, &t).unwrap(), None);
    }

    #[test]
    fn split_reservoir_fails() {
        // 3 beats 1 while 2 loses to it: 2 and 3 sit on opposite sides of 1.
        let t = [Tournament::from_fn(4, |x, y| !(x == 1 && y == 3))];
        let c = EMCondition {
            sigma: vec![0],
            core: vec![1],
            reservoir: vec![2, 3],
        };
        assert_eq!(
            check_condition(&c, &t).unwrap(),
            Some(Violation::Split { nu: 0, x: 2, y: 3 })
        );
        assert!(verify_beats(&c, &t).is_err());
    }

    #[test]
    fn beats_for_interval_above_single_core_point() {
        let t = [Tournament::ascending(8)];
        let c = EMCondition {
            sigma: vec![0],
            core: vec![2],
            reservoir: vec![3, 5, 7],
        };
        assert!(verify_beats(&c, &t).unwrap());
        assert!(c.reservoir.iter().all(|&y| t[0].beats(2, y)));
    }

    #[test]
    fn one_point_extend_without_tournaments_keeps_rest() {
        let t: [Tournament; 0] = [];
        let (d, rho) = one_point_extend(&EMCondition::fresh(5), &t, 1).unwrap();
        assert_eq!((d.core, d.reservoir, rho), (vec![0], vec![1, 2, 3, 4], 0));
    }

    #[test]
    fn one_point_extend_halves_at_worst() {
        let t = [crate::structures::HashedTournament::new(501, 9)];
        let c = register_tournament(&EMCondition::fresh(501), &t).unwrap();
        let (d, _) = one_point_extend(&c, &t, 1).unwrap();
        assert!(d.reservoir.len() >= 250);
        assert_eq!(check_condition(&d, &t).unwrap(), None);
        assert!(matches!(
            one_point_extend(&c, &t, 400),
            Err(Error::ReservoirExhausted { .. })
        ));
    }
}
