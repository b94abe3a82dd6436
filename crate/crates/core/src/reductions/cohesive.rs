use crate::em::rho_key;
use crate::limit::EnumeratedSet;
use crate::priority::FunctionalTable;
use crate::structures::SetFamily;
use crate::{Error, Result};

/// Largest family accepted by [`find_cohesive`].
pub const MAX_COHESIVE_FAMILY: usize = 20;

/// `R_e` = stages `s < H` at which table `e`, run on input `e` for `s`
/// steps against the stage-`s` enumeration, outputs 1.
pub fn canonical_cohesive_instance(
    tables: &[FunctionalTable],
    e_set: &EnumeratedSet,
    horizon: usize,
) -> Result<SetFamily> {
    let members = tables
        .iter()
        .enumerate()
        .map(|(e, t)| {
            if t.index() != e {
                return Err(Error::InconsistentTable {
                    table: t.index(),
                    input: e,
                    detail: format!("listed at position {e}"),
                });
            }
            Ok((0..horizon)
                .filter(|&s| {
                    t.apply(e, |x| e_set.contains_at(x, s), s)
                        .is_some_and(|c| c.value == 1)
                })
                .collect())
        })
        .collect::<Result<Vec<Vec<usize>>>>()?;
    SetFamily::new(horizon, members)
}

/// A cell `⋂ R_i^{ε_i}` (complement where `ε_i` is set).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohesiveCell {
    pub signs: Vec<bool>,
    pub set: Vec<usize>,
}

fn cell(family: &SetFamily, n: usize, eps: u64) -> Vec<usize> {
    (0..n)
        .filter(|&x| (0..family.len()).all(|i| family.contains(i, x) != (eps >> i & 1 == 1)))
        .collect()
}

fn check_size(family: &SetFamily) -> Result<usize> {
    let k = family.len();
    if k > MAX_COHESIVE_FAMILY {
        return Err(Error::FamilyTooLarge(k, MAX_COHESIVE_FAMILY));
    }
    Ok(k)
}

/// Largest cell over `[0, n)`; ties go to the lexicographically least sign
/// vector. Buckets points by membership signature.
pub fn find_cohesive(family: &SetFamily, n: usize) -> Result<CohesiveCell> {
    let k = check_size(family)?;
    let mut counts = vec![0usize; 1 << k];
    for x in 0..n {
        let eps = (0..k).fold(0u64, |m, i| m | ((!family.contains(i, x)) as u64) << i);
        counts[eps as usize] += 1;
    }
    let best = (0..1u64 << k)
        .min_by_key(|&eps| (std::cmp::Reverse(counts[eps as usize]), rho_key(eps, k)))
        .unwrap_or(0);
    Ok(CohesiveCell {
        signs: (0..k).map(|i| best >> i & 1 == 1).collect(),
        set: cell(family, n, best),
    })
}

/// Oracle for [`find_cohesive`]: intersects every sign vector directly.
pub fn find_cohesive_exhaustive(family: &SetFamily, n: usize) -> Result<CohesiveCell> {
    let k = check_size(family)?;
    let mut best: Option<(u64, Vec<usize>)> = None;
    for eps in 0..1u64 << k {
        let c = cell(family, n, eps);
        let better = match &best {
            None => true,
            Some((b, bc)) => {
                c.len() > bc.len() || (c.len() == bc.len() && rho_key(eps, k) < rho_key(*b, k))
            }
        };
        if better {
            best = Some((eps, c));
        }
    }
    let (eps, set) = best.expect("at least the empty sign vector");
    Ok(CohesiveCell {
        signs: (0..k).map(|i| eps >> i & 1 == 1).collect(),
        set,
    })
}

/// `g(x) = f(x) + 1`, wrapping at the top.
pub fn diagonal_escape(f: &[u32]) -> Vec<u32> {
    f.iter().map(|v| v.wrapping_add(1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::priority::TableEntry;
    use crate::structures::cohesive_report;

    #[test]
    fn empty_and_constant_tables() {
        let e = EnumeratedSet::new(vec![]).unwrap();
        assert!(canonical_cohesive_instance(&[], &e, 50).unwrap().is_empty());
        let one = FunctionalTable::new(
            0,
            [TableEntry {
                input: 0,
                prefix: vec![],
                value: 1,
            }],
        )
        .unwrap();
        let fam = canonical_cohesive_instance(&[one], &e, 50).unwrap();
        assert_eq!(fam.member(0), (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn scripted_tables_follow_enumeration() {
        // Table 1 outputs 1 once 0 is enumerated and 0 before, reading one
        // bit; 0 enters at stage 6.
        let t0 = FunctionalTable::new(0, []).unwrap();
        let t1 = FunctionalTable::new(
            1,
            [
                TableEntry {
                    input: 1,
                    prefix: vec![true],
                    value: 1,
                },
                TableEntry {
                    input: 1,
                    prefix: vec![false],
                    value: 0,
                },
            ],
        )
        .unwrap();
        let e = EnumeratedSet::new(vec![(0, 6)]).unwrap();
        let fam = canonical_cohesive_instance(&[t0.clone(), t1.clone()], &e, 10).unwrap();
        assert!(fam.member(0).is_empty());
        assert_eq!(fam.member(1), [6, 7, 8, 9]);
        assert!(canonical_cohesive_instance(&[t1, t0], &e, 10).is_err());
    }

    #[test]
    fn single_and_nested_families() {
        let fam = SetFamily::new(20, vec![(0..7).collect()]).unwrap();
        let c = find_cohesive(&fam, 20).unwrap();
        assert_eq!((c.signs, c.set), (vec![true], (7..20).collect::<Vec<_>>()));
        let nested = SetFamily::new(
            20,
            vec![(0..18).collect(), (0..16).collect(), (0..15).collect()],
        )
        .unwrap();
        let c = find_cohesive(&nested, 20).unwrap();
        assert_eq!(c.set, (0..15).collect::<Vec<_>>());
        assert!(cohesive_report(&c.set, &nested)
            .iter()
            .all(|v| v.exceptions == 0));
        assert_eq!(find_cohesive_exhaustive(&nested, 20).unwrap(), c);
    }

    #[test]
    fn ties_go_to_least_signs() {
        let fam = SetFamily::new(4, vec![vec![0, 1], vec![0, 2]]).unwrap();
        let c = find_cohesive(&fam, 4).unwrap();
        assert_eq!(
            (c.signs.clone(), c.set.clone()),
            (vec![false, false], vec![0])
        );
        assert_eq!(find_cohesive_exhaustive(&fam, 4).unwrap(), c);
        let big = SetFamily::new(4, vec![vec![]; 21]).unwrap();
        assert!(matches!(
            find_cohesive(&big, 4),
            Err(Error::FamilyTooLarge(21, 20))
        ));
    }

    #[test]
    fn escape_differs_pointwise() {
        assert_eq!(diagonal_escape(&[0, 0, 0]), vec![1, 1, 1]);
        let f = [3, u32::MAX, 0, 9];
        assert!(diagonal_escape(&f).iter().zip(&f).all(|(g, f)| g != f));
    }
}
