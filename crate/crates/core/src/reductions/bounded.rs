use std::collections::HashMap;
use std::fmt::Write as _;

use crate::structures::{check_range, sorted_unique};
use crate::{Error, Result};

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Colex rank of a strictly ascending tuple.
pub fn colex_rank(t: &[usize]) -> usize {
    t.iter().enumerate().map(|(i, &x)| binomial(x, i + 1)).sum()
}

/// Calls `f` on every ascending `n`-tuple of `set` (itself ascending), in
/// colex order.
pub(crate) fn for_each_tuple(set: &[usize], n: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..n).collect();
    if n == 0 || set.len() < n {
        return;
    }
    let mut buf = vec![0; n];
    // Colex order: advance the lowest index that can move.
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = set[i];
        }
        f(&buf);
        let mut j = 0;
        while j < n {
            let limit = if j + 1 < n { idx[j + 1] } else { set.len() };
            if idx[j] + 1 < limit {
                idx[j] += 1;
                for (i, v) in idx.iter_mut().enumerate().take(j) {
                    *v = i;
                }
                break;
            }
            j += 1;
        }
        if j == n {
            return;
        }
    }
}

/// A coloring of `[0, H)^n` (ascending tuples) in which every color has at
/// most `bound` preimages.
#[derive(Clone, PartialEq, Eq)]
pub struct KBoundedColoring {
    arity: usize,
    horizon: usize,
    bound: usize,
    colors: Vec<u32>,
}

impl std::fmt::Debug for KBoundedColoring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KBoundedColoring")
            .field("arity", &self.arity)
            .field("horizon", &self.horizon)
            .field("bound", &self.bound)
            .finish()
    }
}

impl KBoundedColoring {
    /// `colors` is indexed by colex rank.
    pub fn new(arity: usize, horizon: usize, bound: usize, colors: Vec<u32>) -> Result<Self> {
        if !(2..=3).contains(&arity) {
            return Err(Error::UnsupportedArity(arity));
        }
        let expected = binomial(horizon, arity);
        if colors.len() != expected {
            return Err(Error::Parse(format!(
                "expected {expected} colors, found {}",
                colors.len()
            )));
        }
        let f = KBoundedColoring {
            arity,
            horizon,
            bound,
            colors,
        };
        if let Some((color, count)) = f.worst_color() {
            if count > bound {
                return Err(Error::NotBounded {
                    bound,
                    color,
                    count,
                });
            }
        }
        Ok(f)
    }

    pub fn from_fn(
        arity: usize,
        horizon: usize,
        bound: usize,
        mut color: impl FnMut(&[usize]) -> u32,
    ) -> Result<Self> {
        let all: Vec<usize> = (0..horizon).collect();
        let mut colors = Vec::with_capacity(binomial(horizon, arity));
        for_each_tuple(&all, arity, |t| colors.push(color(t)));
        Self::new(arity, horizon, bound, colors)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Color of an ascending tuple.
    #[inline]
    pub fn color(&self, t: &[usize]) -> u32 {
        debug_assert!(t.len() == self.arity && t.windows(2).all(|w| w[0] < w[1]));
        self.colors[colex_rank(t)]
    }

    /// Most used color and its count.
    pub fn worst_color(&self) -> Option<(u32, usize)> {
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for &c in &self.colors {
            *counts.entry(c).or_default() += 1;
        }
        counts
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
    }

    /// Ascending tuples inside `set` grouped by color.
    pub fn preimages_on(&self, set: &[usize]) -> HashMap<u32, Vec<Vec<usize>>> {
        let mut out: HashMap<u32, Vec<Vec<usize>>> = HashMap::new();
        for_each_tuple(set, self.arity, |t| {
            out.entry(self.color(t)).or_default().push(t.to_vec())
        });
        out
    }

    /// Header `bounded n H k`, then one `x y [z] color` line per tuple.
    pub fn to_text(&self) -> String {
        let mut s = format!("bounded {} {} {}\n", self.arity, self.horizon, self.bound);
        let all: Vec<usize> = (0..self.horizon).collect();
        for_each_tuple(&all, self.arity, |t| {
            for x in t {
                let _ = write!(s, "{x} ");
            }
            let _ = writeln!(s, "{}", self.color(t));
        });
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty coloring text".into()))?;
        let nums = |l: &str, ln: usize| -> Result<Vec<usize>> {
            l.split_whitespace()
                .map(|w| w.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {ln}: {e}")))
        };
        let (arity, horizon, bound) = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["bounded", ..] => match nums(&header["bounded".len()..], 1)?[..] {
                [n, h, k] => (n, h, k),
                _ => return Err(Error::Parse("header: expected `bounded n H k`".into())),
            },
            _ => return Err(Error::Parse(format!("bad header {header:?}"))),
        };
        if !(2..=3).contains(&arity) {
            return Err(Error::UnsupportedArity(arity));
        }
        let mut colors = vec![None; binomial(horizon, arity)];
        for (i, line) in lines.enumerate() {
            let ln = i + 2;
            let v = nums(line, ln)?;
            if v.len() != arity + 1 {
                return Err(Error::Parse(format!(
                    "line {ln}: expected {} numbers",
                    arity + 1
                )));
            }
            let (t, c) = v.split_at(arity);
            if t.windows(2).any(|w| w[0] >= w[1]) || t[arity - 1] >= horizon {
                return Err(Error::Parse(format!("line {ln}: bad tuple {t:?}")));
            }
            colors[colex_rank(t)] = Some(c[0] as u32);
        }
        let colors = colors
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::Parse(format!("tuple #{i} missing"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arity, horizon, bound, colors)
    }
}

/// Two distinct tuples of `r` sharing a color, least by colex rank of the
/// later one.
pub fn rainbow_collision(f: &KBoundedColoring, r: &[usize]) -> Result<Option<[Vec<usize>; 2]>> {
    check_range(r, f.horizon)?;
    let r = sorted_unique(r);
    let mut seen: HashMap<u32, Vec<usize>> = HashMap::new();
    let mut hit = None;
    for_each_tuple(&r, f.arity, |t| {
        if hit.is_some() {
            return;
        }
        match seen.get(&f.color(t)) {
            Some(prev) => hit = Some([prev.clone(), t.to_vec()]),
            None => {
                seen.insert(f.color(t), t.to_vec());
            }
        }
    });
    Ok(hit)
}

/// `f` restricted to `[R]^n` is injective.
pub fn is_rainbow(f: &KBoundedColoring, r: &[usize]) -> Result<bool> {
    Ok(rainbow_collision(f, r)?.is_none())
}

/// Largest rainbow by branch and bound; include-first search order makes the
/// result deterministic. Fails above `cap` vertices.
pub fn max_rainbow(f: &KBoundedColoring, cap: usize) -> Result<Vec<usize>> {
    if f.horizon > cap {
        return Err(Error::SizeExceedsCap {
            size: f.horizon,
            cap,
        });
    }
    struct Search<'a> {
        f: &'a KBoundedColoring,
        cur: Vec<usize>,
        used: HashMap<u32, usize>,
        best: Vec<usize>,
    }
    impl Search<'_> {
        fn new_colors(&self, x: usize) -> Option<Vec<u32>> {
            let mut out = Vec::new();
            let mut ok = true;
            for_each_tuple(&self.cur, self.f.arity - 1, |t| {
                if !ok {
                    return;
                }
                let mut tup = t.to_vec();
                tup.push(x);
                let c = self.f.color(&tup);
                if self.used.contains_key(&c) || out.contains(&c) {
                    ok = false;
                } else {
                    out.push(c);
                }
            });
            ok.then_some(out)
        }

        fn go(&mut self, x: usize) {
            if self.cur.len() + (self.f.horizon - x) <= self.best.len() {
                return;
            }
            if x == self.f.horizon {
                self.best = self.cur.clone();
                return;
            }
            if let Some(cs) = self.new_colors(x) {
                for &c in &cs {
                    self.used.insert(c, x);
                }
                self.cur.push(x);
                self.go(x + 1);
                self.cur.pop();
                for c in cs {
                    self.used.remove(&c);
                }
            }
            self.go(x + 1);
        }
    }
    let mut s = Search {
        f,
        cur: Vec::new(),
        used: HashMap::new(),
        best: Vec::new(),
    };
    s.go(0);
    Ok(s.best)
}

/// Per-point outcome of the rainbow-stability classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "partner")]
pub enum RainbowStable {
    /// `f(x, s) = f(y, s)` throughout the window.
    Paired(usize),
    /// No `y` collides with `x` anywhere in the window.
    Isolated,
    Undetermined,
}

/// Classifies each point against the window `[H - tail, H)`.
pub fn classify_rainbow_stable(f: &KBoundedColoring, tail: usize) -> Result<Vec<RainbowStable>> {
    if f.arity != 2 {
        return Err(Error::UnsupportedArity(f.arity));
    }
    if let Some((color, count)) = f.worst_color().filter(|&(_, c)| c > 2) {
        return Err(Error::NotBounded {
            bound: 2,
            color,
            count,
        });
    }
    let h = f.horizon;
    let all: Vec<usize> = (0..h).collect();
    let pre = f.preimages_on(&all);
    let pair = |a: usize, b: usize| if a < b { [a, b] } else { [b, a] };
    let lo = h.saturating_sub(tail);
    Ok((0..h)
        .map(|x| {
            let mut partners = (lo..h).filter(|&s| s != x).map(|s| {
                let me = pair(x, s);
                pre[&f.color(&me)]
                    .iter()
                    .find(|t| t[..] != me[..] && t.contains(&s))
                    .map(|t| if t[0] == s { t[1] } else { t[0] })
            });
            let Some(first) = partners.next() else {
                return RainbowStable::Undetermined;
            };
            if partners.all(|p| p == first) {
                match first {
                    Some(y) => RainbowStable::Paired(y),
                    None => RainbowStable::Isolated,
                }
            } else {
                RainbowStable::Undetermined
            }
        })
        .collect())
}

/// Two tuples of `y` sharing a color with different last coordinates.
pub fn normal_witness_on(f: &KBoundedColoring, y: &[usize]) -> Result<Option<[Vec<usize>; 2]>> {
    check_range(y, f.horizon)?;
    let y = sorted_unique(y);
    let mut last: HashMap<u32, Vec<usize>> = HashMap::new();
    let mut hit = None;
    for_each_tuple(&y, f.arity, |t| {
        if hit.is_some() {
            return;
        }
        let c = f.color(t);
        match last.get(&c) {
            Some(prev) if prev.last() != t.last() => hit = Some([prev.clone(), t.to_vec()]),
            Some(_) => {}
            None => {
                last.insert(c, t.to_vec());
            }
        }
    });
    Ok(hit)
}

pub fn normal_witness(f: &KBoundedColoring) -> Option<[Vec<usize>; 2]> {
    let all: Vec<usize> = (0..f.horizon).collect();
    normal_witness_on(f, &all).expect("full range is in range")
}

pub fn is_normal(f: &KBoundedColoring) -> bool {
    normal_witness(f).is_none()
}

/// Ascending scan admitting a point iff the restriction stays normal.
pub fn greedy_normal_subset(f: &KBoundedColoring) -> Vec<usize> {
    let mut y: Vec<usize> = Vec::new();
    let mut used: std::collections::HashSet<u32> = Default::default();
    for p in 0..f.horizon {
        let mut fresh = Vec::new();
        let mut ok = true;
        for_each_tuple(&y, f.arity - 1, |t| {
            if !ok {
                return;
            }
            let mut tup = t.to_vec();
            tup.push(p);
            let c = f.color(&tup);
            if used.contains(&c) {
                ok = false;
            } else {
                fresh.push(c);
            }
        });
        if ok {
            used.extend(fresh);
            y.push(p);
        }
    }
    y
}
