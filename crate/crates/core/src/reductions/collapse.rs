use std::collections::{BTreeMap, HashMap};

use super::bounded::{colex_rank, for_each_tuple, normal_witness_on, KBoundedColoring};
use crate::structures::{check_range, sorted_unique};
use crate::{Error, Result};

/// Length of the settling tail for a set of `len` elements.
pub fn tail_len(len: usize) -> usize {
    len.div_ceil(4)
}

/// Pair coloring obtained from a 3-ary coloring by taking stable minimal
/// collision partners over the tail of `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collapse {
    /// `Z` minus its tail; `f̃` is meaningful on pairs from here.
    pub domain: Vec<usize>,
    pub tail: Vec<usize>,
    /// Pairs outside the domain get private colors.
    pub ftilde: KBoundedColoring,
    /// Minimizing partner for every domain pair that has one besides itself.
    pub witness: BTreeMap<[usize; 2], [usize; 2]>,
}

/// [`collapse_with_tail`] with the default tail length.
pub fn collapse_triples(f: &KBoundedColoring, z: &[usize]) -> Result<Collapse> {
    collapse_with_tail(f, z, tail_len(sorted_unique(z).len()))
}

/// Requires `f` 3-ary, 2-bounded and normal on `Z`. For each pair `σ` of
/// the domain, the least `τ <=lex σ` with `f(σ, s) = f(τ, s)` must be the
/// same for every `s` in the tail.
pub fn collapse_with_tail(f: &KBoundedColoring, z: &[usize], tail: usize) -> Result<Collapse> {
    if f.arity() != 3 {
        return Err(Error::UnsupportedArity(f.arity()));
    }
    if let Some((color, count)) = f.worst_color().filter(|&(_, c)| c > 2) {
        return Err(Error::NotBounded {
            bound: 2,
            color,
            count,
        });
    }
    check_range(z, f.horizon())?;
    let z = sorted_unique(z);
    if let Some([a, b]) = normal_witness_on(f, &z)? {
        return Err(Error::NotNormal(a, b));
    }
    let tail = tail.min(z.len());
    let (domain, tail) = z.split_at(z.len() - tail);
    let in_domain: Vec<bool> = {
        let mut m = vec![false; f.horizon()];
        for &x in domain {
            m[x] = true;
        }
        m
    };

    // Lex-least domain preimage of each color of `(τ, s)`, per tail element.
    let per_s: Vec<HashMap<u32, [usize; 2]>> = tail
        .iter()
        .map(|&s| {
            let mut m = HashMap::new();
            for_each_tuple(domain, 2, |t| {
                let t = [t[0], t[1]];
                m.entry(f.color(&[t[0], t[1], s]))
                    .and_modify(|p: &mut [usize; 2]| *p = (*p).min(t))
                    .or_insert(t);
            });
            m
        })
        .collect();
    let minimizer = |sigma: [usize; 2], i: usize| -> [usize; 2] {
        let s = tail[i];
        let c = f.color(&[sigma[0], sigma[1], s]);
        // 2-bounded: the color has at most one other domain preimage.
        let mut best = sigma;
        if let Some(&tau) = per_s[i].get(&c) {
            if tau < best {
                best = tau;
            }
        }
        best
    };

    let mut witness = BTreeMap::new();
    let mut value: HashMap<[usize; 2], [usize; 2]> = HashMap::new();
    let mut failure = None;
    for_each_tuple(domain, 2, |t| {
        if failure.is_some() {
            return;
        }
        let sigma = [t[0], t[1]];
        let Some(first) = (!tail.is_empty()).then(|| minimizer(sigma, 0)) else {
            value.insert(sigma, sigma);
            return;
        };
        for i in 1..tail.len() {
            let m = minimizer(sigma, i);
            if m != first {
                let tau = if m == sigma { first } else { m };
                failure = Some(Error::NotSettled { sigma, tau });
                return;
            }
        }
        if first != sigma {
            witness.insert(sigma, first);
        }
        value.insert(sigma, first);
    });
    if let Some(e) = failure {
        return Err(e);
    }

    let h = f.horizon();
    let offset = h * h.saturating_sub(1) / 2;
    let ftilde = KBoundedColoring::from_fn(2, h, 2, |t| {
        if in_domain[t[0]] && in_domain[t[1]] {
            colex_rank(&value[&[t[0], t[1]]]) as u32
        } else {
            (offset + colex_rank(t)) as u32
        }
    })?;
    Ok(Collapse {
        domain: domain.to_vec(),
        tail: tail.to_vec(),
        ftilde,
        witness,
    })
}

/// Turns an `f̃`-rainbow into an `f`-rainbow: a greedy `f`-rainbow subset of
/// its domain part, topped with the first tail element.
pub fn lift_rainbow(f: &KBoundedColoring, c: &Collapse, r: &[usize]) -> Vec<usize> {
    let r = sorted_unique(r);
    let mut out: Vec<usize> = Vec::new();
    let mut used = std::collections::HashSet::new();
    for &x in r.iter().filter(|x| c.domain.binary_search(x).is_ok()) {
        let mut fresh = Vec::new();
        let mut ok = true;
        for_each_tuple(&out, f.arity() - 1, |t| {
            let mut tup = t.to_vec();
            tup.push(x);
            let col = f.color(&tup);
            if !ok || used.contains(&col) || fresh.contains(&col) {
                ok = false;
            } else {
                fresh.push(col);
            }
        });
        if ok {
            used.extend(fresh);
            out.push(x);
        }
    }
    out.extend(c.tail.first());
    out
}

/// Greedy `f̃`-rainbow over the domain, ascending.
pub fn greedy_rainbow(g: &KBoundedColoring, vertices: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut used = std::collections::HashSet::new();
    for &x in &sorted_unique(vertices) {
        let cols: Vec<u32> = out.iter().map(|&y| g.color(&[y, x])).collect();
        let distinct = cols.iter().collect::<std::collections::HashSet<_>>().len() == cols.len();
        if distinct && cols.iter().all(|c| !used.contains(c)) {
            used.extend(cols);
            out.push(x);
        }
    }
    out
}
