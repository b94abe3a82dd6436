use crate::structures::Tournament;

/// `a → b` for `a < b` iff `a` and `b` are on the same side of `X`.
pub fn encode_set_tournament(x: &[usize], n: usize) -> Tournament {
    let mut inside = vec![false; n];
    for &a in x.iter().filter(|&&a| a < n) {
        inside[a] = true;
    }
    Tournament::from_fn(n, |a, b| inside[a] == inside[b])
}

/// A pattern `a < b < c < d` inside `set` with `a, c` on one side of `X`
/// and `b, d` on the other, found by scanning side runs.
pub fn find_alternation(x: &[usize], set: &[usize]) -> Option<[usize; 4]> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    let side = |v: usize| x.contains(&v);
    let mut picks: Vec<usize> = Vec::with_capacity(4);
    for &v in &s {
        if picks.last().is_none_or(|&p| side(p) != side(v)) {
            picks.push(v);
            if picks.len() == 4 {
                return Some([picks[0], picks[1], picks[2], picks[3]]);
            }
        }
    }
    None
}

/// Lexicographically least alternation by scanning every 4-subset.
pub fn find_alternation_exhaustive(x: &[usize], set: &[usize]) -> Option<[usize; 4]> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    let side = |v: usize| x.contains(&v);
    let n = s.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let (a, b, c, d) = (s[i], s[j], s[k], s[l]);
                    if side(a) == side(c) && side(b) == side(d) && side(a) != side(b) {
                        return Some([a, b, c, d]);
                    }
                }
            }
        }
    }
    None
}
