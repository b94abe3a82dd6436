use std::fmt::Write as _;

use super::{check_range, sorted_unique};
use crate::{Error, Result};

/// Read access to a tournament: for `x != y` exactly one of
/// `beats(x, y)` and `beats(y, x)` holds.
pub trait Beats {
    fn order(&self) -> usize;
    fn beats(&self, x: usize, y: usize) -> bool;
}

impl<B: Beats + ?Sized> Beats for &B {
    fn order(&self) -> usize {
        (**self).order()
    }
    fn beats(&self, x: usize, y: usize) -> bool {
        (**self).beats(x, y)
    }
}

/// Tournament on `[0, n)` stored as one packed bit row per vertex.
#[derive(Clone, PartialEq, Eq)]
pub struct Tournament {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl std::fmt::Debug for Tournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tournament").field("n", &self.n).finish()
    }
}

impl Tournament {
    /// Builds a tournament from `up(x, y)` for `x < y`: true means `x -> y`.
    pub fn from_fn(n: usize, mut up: impl FnMut(usize, usize) -> bool) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut t = Tournament {
            n,
            words,
            rows: vec![0; n * words],
        };
        for y in 0..n {
            for x in 0..y {
                if up(x, y) {
                    t.set_bit(x, y);
                } else {
                    t.set_bit(y, x);
                }
            }
        }
        t
    }

    /// `x -> y` whenever `x < y`.
    pub fn ascending(n: usize) -> Self {
        Self::from_fn(n, |_, _| true)
    }

    pub fn descending(n: usize) -> Self {
        Self::from_fn(n, |_, _| false)
    }

    /// Copies any [`Beats`] implementation into packed rows.
    pub fn materialize<B: Beats>(b: &B) -> Self {
        Self::from_fn(b.order(), |x, y| b.beats(x, y))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Orients the edge between `x` and `y` as `x -> y`.
    pub fn orient(&mut self, x: usize, y: usize) {
        assert!(x != y && x < self.n && y < self.n);
        self.clear_bit(y, x);
        self.set_bit(x, y);
    }

    fn set_bit(&mut self, x: usize, y: usize) {
        self.rows[x * self.words + y / 64] |= 1 << (y % 64);
    }

    fn clear_bit(&mut self, x: usize, y: usize) {
        self.rows[x * self.words + y / 64] &= !(1 << (y % 64));
    }

    /// Out-neighbourhood of `x` as packed words.
    pub fn row(&self, x: usize) -> &[u64] {
        &self.rows[x * self.words..(x + 1) * self.words]
    }

    /// The induced subtournament on `vs`, re-indexed by position in `vs`.
    pub fn induced(&self, vs: &[usize]) -> Result<Tournament> {
        check_range(vs, self.n)?;
        Ok(Tournament::from_fn(vs.len(), |i, j| {
            self.beats(vs[i], vs[j])
        }))
    }

    /// Checks irreflexivity and that exactly one direction holds per pair.
    pub fn validate(&self) -> Result<()> {
        for x in 0..self.n {
            if self.beats(x, x) {
                return Err(Error::Parse(format!("tournament loop at {x}")));
            }
            for y in x + 1..self.n {
                if self.beats(x, y) == self.beats(y, x) {
                    return Err(Error::Parse(format!(
                        "tournament pair ({x},{y}) has {} directions",
                        if self.beats(x, y) { 2 } else { 0 }
                    )));
                }
            }
        }
        // padding bits past n must be clear
        for x in 0..self.n {
            let last = self.row(x)[self.words - 1];
            let used = self.n - (self.words - 1) * 64;
            if used < 64 && last >> used != 0 {
                return Err(Error::Parse(format!("padding bits set in row {x}")));
            }
        }
        Ok(())
    }

    /// Exhaustive 3-cycle search over all triples, word-parallel.
    ///
    /// For every edge `u -> v` it intersects the out-row of `v` with the
    /// in-row of `u`; a non-empty intersection is a cycle `u -> v -> w -> u`.
    /// Returns the cycle with least `u`, then least `v`, then least `w`.
    pub fn find_three_cycle(&self) -> Option<[usize; 3]> {
        let rows: Vec<usize> = (0..self.n).collect();
        let hits = crate::batch::map(&rows, |&u| self.three_cycle_from(u));
        hits.into_iter().flatten().next()
    }

    fn three_cycle_from(&self, u: usize) -> Option<[usize; 3]> {
        let out_u = self.row(u);
        let mut in_u = vec![0u64; self.words];
        for (k, w) in in_u.iter_mut().enumerate() {
            *w = !out_u[k];
        }
        in_u[u / 64] &= !(1 << (u % 64));
        let used = self.n - (self.words - 1) * 64;
        if used < 64 {
            in_u[self.words - 1] &= (1u64 << used) - 1;
        }
        for v in iter_bits(out_u) {
            let out_v = self.row(v);
            if out_v.iter().zip(&in_u).fold(0, |acc, (a, b)| acc | (a & b)) == 0 {
                continue;
            }
            if let Some((k, m)) = out_v
                .iter()
                .zip(&in_u)
                .map(|(a, b)| a & b)
                .enumerate()
                .find(|&(_, m)| m != 0)
            {
                return Some([u, v, k * 64 + m.trailing_zeros() as usize]);
            }
        }
        None
    }

    /// Canonical text form: `tournament N` then one hex line per row,
    /// 16 hex digits per 64-bit word, lowest word first.
    pub fn to_text(&self) -> String {
        let mut s = format!("tournament {}\n", self.n);
        for x in 0..self.n {
            for w in self.row(x) {
                let _ = write!(s, "{w:016x}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty tournament text".into()))?;
        let n = header
            .strip_prefix("tournament ")
            .and_then(|r| r.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("bad tournament header {header:?}")))?;
        let words = n.div_ceil(64).max(1);
        let mut rows = Vec::with_capacity(n * words);
        for x in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {x}")))?
                .trim();
            if line.len() != words * 16 {
                return Err(Error::Parse(format!("row {x} has wrong width")));
            }
            for k in 0..words {
                let w = u64::from_str_radix(&line[k * 16..(k + 1) * 16], 16)
                    .map_err(|e| Error::Parse(format!("row {x}: {e}")))?;
                rows.push(w);
            }
        }
        let t = Tournament { n, words, rows };
        t.validate()?;
        Ok(t)
    }
}

impl Beats for Tournament {
    fn order(&self) -> usize {
        self.n
    }
    #[inline]
    fn beats(&self, x: usize, y: usize) -> bool {
        self.rows[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            }
        })
    })
}

/// A random tournament defined by hashing `(seed, min, max)`; never stored,
/// so it scales to reservoirs far larger than a packed matrix allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashedTournament {
    pub n: usize,
    pub seed: u64,
}

impl HashedTournament {
    pub fn new(n: usize, seed: u64) -> Self {
        HashedTournament { n, seed }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Beats for HashedTournament {
    fn order(&self) -> usize {
        self.n
    }
    fn beats(&self, x: usize, y: usize) -> bool {
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        let h = splitmix(self.seed ^ splitmix(((lo as u64) << 32) | hi as u64));
        let up = h & 1 == 1;
        if x < y {
            up
        } else {
            !up
        }
    }
}

/// True iff `s` contains no 3-cycle of `t`.
///
/// Uses the score characterisation: a tournament on `k` vertices is
/// transitive iff its in-set win counts are exactly `0..k`.
pub fn is_transitive<B: Beats>(t: &B, s: &[usize]) -> Result<bool> {
    check_range(s, t.order())?;
    let s = sorted_unique(s);
    let k = s.len();
    let mut seen = vec![false; k];
    for &x in &s {
        let wins = s.iter().filter(|&&y| y != x && t.beats(x, y)).count();
        if seen[wins] {
            return Ok(false);
        }
        seen[wins] = true;
    }
    Ok(true)
}

/// First 3-cycle `[u, v, w]` (`u -> v -> w -> u`) inside `s`, by triple loop.
pub fn three_cycle_in<B: Beats>(t: &B, s: &[usize]) -> Option<[usize; 3]> {
    let s = sorted_unique(s);
    for (i, &a) in s.iter().enumerate() {
        for (j, &b) in s.iter().enumerate().skip(i + 1) {
            for &c in &s[j + 1..] {
                if t.beats(a, b) && t.beats(b, c) && t.beats(c, a) {
                    return Some([a, b, c]);
                }
                if t.beats(a, c) && t.beats(c, b) && t.beats(b, a) {
                    return Some([a, c, b]);
                }
            }
        }
    }
    None
}

/// True iff every element of `e` beats every element of `f`.
pub fn beats<B: Beats>(t: &B, e: &[usize], f: &[usize]) -> Result<bool> {
    check_range(e, t.order())?;
    check_range(f, t.order())?;
    Ok(e.iter()
        .all(|&x| f.iter().all(|&y| x != y && t.beats(x, y))))
}

/// Endpoint of an interval; the infinite ends are the unconstrained sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    NegInf,
    At(usize),
    PosInf,
}

/// The interval `(lo, hi)`: vertices `x` with `lo -> x` and `x -> hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl Interval {
    pub fn contains<B: Beats>(&self, t: &B, x: usize) -> bool {
        let lo_ok = match self.lo {
            Endpoint::NegInf => true,
            Endpoint::At(a) => a != x && t.beats(a, x),
            Endpoint::PosInf => false,
        };
        let hi_ok = match self.hi {
            Endpoint::PosInf => true,
            Endpoint::At(b) => b != x && t.beats(x, b),
            Endpoint::NegInf => false,
        };
        lo_ok && hi_ok
    }
}

/// Sorts a transitive set along the tournament: the element beating all
/// others comes first.
pub(crate) fn chain_order<B: Beats>(t: &B, f: &[usize]) -> Result<Vec<usize>> {
    check_range(f, t.order())?;
    if let Some(c) = three_cycle_in(t, f) {
        return Err(Error::NotTransitive(c));
    }
    let f = sorted_unique(f);
    let mut scored: Vec<(usize, usize)> = f
        .iter()
        .map(|&x| (f.iter().filter(|&&y| y != x && t.beats(x, y)).count(), x))
        .collect();
    scored.sort_by_key(|&(score, _)| std::cmp::Reverse(score));
    Ok(scored.into_iter().map(|(_, x)| x).collect())
}

/// All minimal intervals of the transitive set `f`, in chain order.
pub fn minimal_intervals<B: Beats>(t: &B, f: &[usize]) -> Result<Vec<Interval>> {
    let chain = chain_order(t, f)?;
    let mut ends = Vec::with_capacity(chain.len() + 2);
    ends.push(Endpoint::NegInf);
    ends.extend(chain.iter().map(|&x| Endpoint::At(x)));
    ends.push(Endpoint::PosInf);
    Ok(ends
        .windows(2)
        .map(|w| Interval { lo: w[0], hi: w[1] })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_cycle() -> Tournament {
        // 0 -> 1 -> 2 -> 0
        Tournament::from_fn(3, |x, y| !(x == 0 && y == 2))
    }

    #[test]
    fn exactly_one_direction() {
        let t = Tournament::from_fn(130, |x, y| (x * 7 + y * 13) % 3 == 0);
        t.validate().unwrap();
        for x in 0..130 {
            assert!(!t.beats(x, x));
            for y in 0..130 {
                if x != y {
                    assert!(t.beats(x, y) ^ t.beats(y, x));
                }
            }
        }
    }

    #[test]
    fn three_cycle_is_not_transitive() {
        let t = three_cycle();
        assert!(!is_transitive(&t, &[0, 1, 2]).unwrap());
        assert!(is_transitive(&t, &[0, 2]).unwrap());
        assert!(is_transitive(&t, &[]).unwrap());
        assert_eq!(t.find_three_cycle(), Some([0, 1, 2]));
        assert_eq!(
            is_transitive(&t, &[0, 3]),
            Err(Error::VertexOutOfRange { vertex: 3, size: 3 })
        );
    }

    #[test]
    fn ascending_has_no_cycle() {
        assert_eq!(Tournament::ascending(200).find_three_cycle(), None);
    }

    #[test]
    fn intervals_of_empty_and_pair() {
        let t = Tournament::ascending(5);
        assert_eq!(
            minimal_intervals(&t, &[]).unwrap(),
            vec![Interval {
                lo: Endpoint::NegInf,
                hi: Endpoint::PosInf
            }]
        );
        let iv = minimal_intervals(&t, &[3, 1]).unwrap();
        assert_eq!(
            iv,
            vec![
                Interval {
                    lo: Endpoint::NegInf,
                    hi: Endpoint::At(1)
                },
                Interval {
                    lo: Endpoint::At(1),
                    hi: Endpoint::At(3)
                },
                Interval {
                    lo: Endpoint::At(3),
                    hi: Endpoint::PosInf
                },
            ]
        );
        assert!(iv[1].contains(&t, 2));
        assert!(!iv[1].contains(&t, 4));
        assert!(matches!(
            minimal_intervals(&three_cycle(), &[0, 1, 2]),
            Err(Error::NotTransitive(_))
        ));
    }

    #[test]
    fn beats_is_vacuous_on_empty() {
        let t = three_cycle();
        assert!(beats(&t, &[], &[0, 1]).unwrap());
        assert!(beats(&t, &[0], &[1]).unwrap());
        assert!(!beats(&t, &[0], &[2]).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let t = Tournament::from_fn(70, |x, y| (x ^ y) & 1 == 0);
        let back = Tournament::from_text(&t.to_text()).unwrap();
        assert_eq!(t, back);
        assert!(
            Tournament::from_text("tournament 2\n0000000000000003\n0000000000000000\n").is_err()
        );
    }

    #[test]
    fn hashed_is_a_tournament() {
        let h = HashedTournament::new(50, 9);
        for x in 0..50 {
            for y in 0..50 {
                if x != y {
                    assert!(h.beats(x, y) ^ h.beats(y, x));
                }
            }
        }
        Tournament::materialize(&h).validate().unwrap();
    }
}
