use std::collections::BTreeMap;

use crate::{Error, Result};

/// One halting computation: on input `input`, with an oracle extending
/// `prefix`, output `value`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct TableEntry {
    pub input: usize,
    pub prefix: Vec<bool>,
    pub value: u32,
}

/// A matched computation; `use_len` is the length of the oracle prefix read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Computation {
    pub value: u32,
    pub use_len: usize,
    pub prefix: Vec<bool>,
}

/// Finite table of a Turing functional. Entries for the same input are
/// consistent: comparable prefixes carry equal values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FunctionalTable {
    index: usize,
    by_input: BTreeMap<usize, Vec<(Vec<bool>, u32)>>,
}

fn comparable(p: &[bool], q: &[bool]) -> bool {
    let n = p.len().min(q.len());
    p[..n] == q[..n]
}

impl FunctionalTable {
    pub fn new(index: usize, entries: impl IntoIterator<Item = TableEntry>) -> Result<Self> {
        let mut by_input: BTreeMap<usize, Vec<(Vec<bool>, u32)>> = BTreeMap::new();
        for e in entries {
            if e.prefix.len() < e.input {
                return Err(Error::UseBelowInput {
                    table: index,
                    input: e.input,
                    use_len: e.prefix.len(),
                });
            }
            let list = by_input.entry(e.input).or_default();
            if let Some((p, v)) = list
                .iter()
                .find(|(p, v)| comparable(p, &e.prefix) && *v != e.value)
            {
                return Err(Error::InconsistentTable {
                    table: index,
                    input: e.input,
                    detail: format!(
                        "prefixes of length {} and {} give {} and {}",
                        p.len(),
                        e.prefix.len(),
                        v,
                        e.value
                    ),
                });
            }
            if !list.iter().any(|(p, _)| *p == e.prefix) {
                list.push((e.prefix, e.value));
            }
        }
        for list in by_input.values_mut() {
            list.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        }
        Ok(FunctionalTable { index, by_input })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn entries(&self) -> impl Iterator<Item = TableEntry> + '_ {
        self.by_input.iter().flat_map(|(&input, list)| {
            list.iter().map(move |(prefix, value)| TableEntry {
                input,
                prefix: prefix.clone(),
                value: *value,
            })
        })
    }

    /// Runs on input `a` for at most `steps` steps: the shortest matching
    /// entry with prefix length `<= steps`.
    pub fn apply(
        &self,
        a: usize,
        oracle: impl Fn(usize) -> bool,
        steps: usize,
    ) -> Option<Computation> {
        self.by_input.get(&a)?.iter().find_map(|(p, v)| {
            (p.len() <= steps && p.iter().enumerate().all(|(i, &b)| oracle(i) == b)).then(|| {
                Computation {
                    value: *v,
                    use_len: p.len(),
                    prefix: p.clone(),
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(input: usize, prefix: &str, value: u32) -> TableEntry {
        TableEntry {
            input,
            prefix: prefix.bytes().map(|b| b == b'1').collect(),
            value,
        }
    }

    #[test]
    fn shortest_match_wins() {
        let t = FunctionalTable::new(0, [entry(1, "10", 5), entry(1, "1", 5), entry(1, "01", 7)])
            .unwrap();
        let d = |i: usize| i == 0;
        let c = t.apply(1, d, 10).unwrap();
        assert_eq!((c.value, c.use_len), (5, 1));
        assert_eq!(t.apply(1, d, 0), None);
        let d2 = |i: usize| i == 1;
        assert_eq!(t.apply(1, d2, 2).unwrap().value, 7);
        assert_eq!(t.apply(2, d2, 2), None);
    }

    #[test]
    fn rejects_inconsistent_and_short_use() {
        assert!(matches!(
            FunctionalTable::new(3, [entry(1, "1", 0), entry(1, "10", 1)]),
            Err(Error::InconsistentTable { table: 3, .. })
        ));
        assert!(matches!(
            FunctionalTable::new(0, [entry(4, "101", 0)]),
            Err(Error::UseBelowInput { .. })
        ));
    }
}
