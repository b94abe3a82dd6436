use std::collections::HashMap;
use std::fmt::Write as _;

use super::approx::parse_nums;
use crate::{Error, Result};

/// Monotone enumeration: each element appears once, stages nondecreasing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EnumeratedSet {
    entries: Vec<(usize, usize)>,
    stage_of: HashMap<usize, usize>,
}

impl EnumeratedSet {
    pub fn new(entries: Vec<(usize, usize)>) -> Result<Self> {
        let mut stage_of = HashMap::with_capacity(entries.len());
        for (i, &(x, s)) in entries.iter().enumerate() {
            if i > 0 && entries[i - 1].1 > s {
                return Err(Error::MalformedEnumeration(format!(
                    "stage {s} of element {x} precedes stage {}",
                    entries[i - 1].1
                )));
            }
            if stage_of.insert(x, s).is_some() {
                return Err(Error::MalformedEnumeration(format!(
                    "element {x} enumerated twice"
                )));
            }
        }
        Ok(EnumeratedSet { entries, stage_of })
    }

    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    /// Enumeration stage of `x`, if it is ever enumerated.
    pub fn settling_time(&self, x: usize) -> Option<usize> {
        self.stage_of.get(&x).copied()
    }

    /// Least stage `<= s` at which `x` is enumerated.
    pub fn theta(&self, x: usize, s: usize) -> Option<usize> {
        self.settling_time(x).filter(|&t| t <= s)
    }

    pub fn contains_at(&self, x: usize, s: usize) -> bool {
        self.theta(x, s).is_some()
    }

    /// Text form: `enumeration` then `element stage` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::from("enumeration\n");
        for &(x, st) in &self.entries {
            let _ = writeln!(s, "{x} {st}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "enumeration" => {}
            other => {
                return Err(Error::Parse(format!(
                    "bad enumeration header {:?}",
                    other.map(|(_, l)| l)
                )))
            }
        }
        let mut entries = Vec::new();
        for (ln, line) in lines {
            let nums =
                parse_nums(line).map_err(|m| Error::Parse(format!("line {}: {m}", ln + 1)))?;
            let [x, s] = nums[..] else {
                return Err(Error::Parse(format!(
                    "line {}: expected `element stage`",
                    ln + 1
                )));
            };
            entries.push((x, s));
        }
        Self::new(entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_cases() {
        let e = EnumeratedSet::new(vec![(4, 1), (2, 3)]).unwrap();
        assert_eq!(e.theta(7, 100), None);
        assert_eq!(e.theta(2, 10), Some(3));
        assert_eq!(e.theta(2, 2), None);
        assert!(e.contains_at(4, 1));
    }

    #[test]
    fn malformed() {
        assert!(EnumeratedSet::new(vec![(1, 3), (2, 2)]).is_err());
        assert!(EnumeratedSet::new(vec![(1, 3), (1, 4)]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let e = EnumeratedSet::new(vec![(4, 1), (2, 3), (9, 3)]).unwrap();
        assert_eq!(EnumeratedSet::from_text(&e.to_text()).unwrap(), e);
    }
}
