//! Seeded input generators. Every generator draws only from the `rng` it is
//! handed, so a seed fixes the output.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::em::{one_point_extend, register_tournament, EMCondition};
use crate::limit::{Delta2Approx, EnumeratedSet, Event};
use crate::priority::{Candidate, FunctionalTable, TableEntry};
use crate::reductions::{colex_rank, KBoundedColoring, RainbowStable};
use crate::structures::{Beats, FiniteColoring2, LinearOrderPrefix, SetFamily, Tournament};
use crate::Result;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A set meeting every window `[a, a + window)` inside `[0, h)`.
pub fn windowed_set(rng: &mut impl Rng, h: usize, window: usize) -> Vec<usize> {
    let window = window.max(1);
    let mut out = Vec::new();
    let mut x = rng.gen_range(0..window);
    while x < h {
        out.push(x);
        x += rng.gen_range(1..=window);
    }
    out
}

/// Random subset of `[0, n)` with the given density.
pub fn random_subset(rng: &mut impl Rng, n: usize, density: f64) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(density)).collect()
}

/// Membership approximation with at most `flips` changes per point; a point
/// starts in with probability `density`.
pub fn delta2_set(rng: &mut impl Rng, h: usize, flips: usize, density: f64) -> Delta2Approx {
    let mut events = Vec::new();
    for x in 0..h {
        let start_in = rng.gen_bool(density);
        let budget = flips.saturating_sub(start_in as usize);
        let k = if budget == 0 || h < 2 {
            0
        } else {
            rng.gen_range(0..=budget)
        };
        let mut stages = rand::seq::index::sample(rng, h - 1, k.min(h - 1)).into_vec();
        stages.sort_unstable();
        let mut v = 0;
        if start_in {
            v = 1;
            events.push(Event {
                point: x,
                stage: 0,
                value: 1,
            });
        }
        for s in stages {
            v ^= 1;
            events.push(Event {
                point: x,
                stage: s + 1,
                value: v,
            });
        }
    }
    Delta2Approx::new(h, events).expect("generated events are well formed")
}

/// `count` candidates: static sets of assorted density and approximations
/// with at most `flips` changes per point, alternating.
pub fn mixed_candidates(
    rng: &mut impl Rng,
    count: usize,
    h: usize,
    flips: usize,
) -> Vec<Candidate> {
    (0..count)
        .map(|i| {
            let density = [0.01, 0.05, 0.2, 0.5][rng.gen_range(0..4)];
            if i % 2 == 0 || flips == 0 {
                Candidate::Static(random_subset(rng, h, density))
            } else {
                Candidate::Approx(delta2_set(rng, h, flips, density))
            }
        })
        .collect()
}

/// Events at stages strictly between `x` and `h / 2`, at most `max_flips`
/// per point, values in `0..4`.
pub fn round_trip_approx(rng: &mut impl Rng, h: usize, max_flips: usize) -> Delta2Approx {
    let half = h / 2;
    let mut events = Vec::new();
    for x in 0..h {
        if x + 1 >= half {
            break;
        }
        let room = half - x - 1;
        let k = rng.gen_range(0..=max_flips.min(room));
        let mut stages = rand::seq::index::sample(rng, room, k).into_vec();
        stages.sort_unstable();
        let mut v = 0u32;
        for s in stages {
            let next = (v + rng.gen_range(1..4)) % 4;
            v = next;
            events.push(Event {
                point: x,
                stage: x + 1 + s,
                value: v,
            });
        }
    }
    Delta2Approx::new(h, events).expect("generated events are well formed")
}

/// Random instance for the diagonalization engine: `live` oracle bits below
/// `h / 4` that change up to three times, an enumeration of a third of
/// `[0, h)`, and tables whose computations read the live bits.
pub fn sdnr_instance(
    rng: &mut impl Rng,
    h: usize,
    functionals: usize,
    live: usize,
) -> Result<(Vec<FunctionalTable>, Delta2Approx, EnumeratedSet)> {
    let mut live_bits =
        rand::seq::index::sample(rng, (h / 4).max(1), live.min((h / 4).max(1))).into_vec();
    live_bits.sort_unstable();
    let mut d_events = Vec::new();
    for &b in &live_bits {
        let k = rng.gen_range(0..4).min(h.saturating_sub(1));
        let mut st = rand::seq::index::sample(rng, h.saturating_sub(1).max(1), k).into_vec();
        st.sort_unstable();
        let mut v = 0;
        for s in st {
            v ^= 1;
            d_events.push(Event {
                point: b,
                stage: s + 1,
                value: v,
            });
        }
    }
    let d = Delta2Approx::new(h, d_events)?;
    let mut enumerated = rand::seq::index::sample(rng, h, h / 3).into_vec();
    enumerated.sort_unstable();
    let mut stage = 0;
    let mut e_entries = Vec::new();
    for x in enumerated {
        stage = stage.max((x + rng.gen_range(1..15)).min(h - 1));
        if stage > x {
            e_entries.push((x, stage));
        }
    }
    let e_set = EnumeratedSet::new(e_entries)?;
    let mut tables = Vec::new();
    for e in 0..functionals {
        let mut entries = Vec::new();
        for a in 0..h {
            if rng.gen_bool(0.3) {
                continue;
            }
            let use_len = a + rng.gen_range(0..4);
            let lv: Vec<usize> = live_bits.iter().copied().filter(|&b| b < use_len).collect();
            for vals in 0..1u64 << lv.len() {
                if rng.gen_bool(0.2) {
                    continue;
                }
                let mut prefix = vec![false; use_len];
                for (i, &b) in lv.iter().enumerate() {
                    prefix[b] = vals >> i & 1 == 1;
                }
                entries.push(TableEntry {
                    input: a,
                    prefix,
                    value: rng.gen_range(0..4),
                });
            }
        }
        tables.push(FunctionalTable::new(e, entries)?);
    }
    Ok((tables, d, e_set))
}

/// Per-tournament seeds derived from a scenario seed.
pub fn tournament_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut r = rng(seed);
    (0..count).map(|_| r.gen()).collect()
}

/// A valid condition reached by registering every tournament and taking a
/// random number of one-point extensions.
pub fn random_em_condition<B: Beats>(
    rng: &mut impl Rng,
    ts: &[B],
    n: usize,
) -> Result<EMCondition> {
    let mut c = EMCondition::fresh(n);
    let arrivals: Vec<usize> = {
        let mut a: Vec<usize> = (0..ts.len()).map(|_| rng.gen_range(0..4)).collect();
        a.sort_unstable();
        a
    };
    let steps = rng.gen_range(0..6);
    for step in 0..=steps {
        while c.sigma.len() < ts.len() && arrivals[c.sigma.len()] <= step && !c.reservoir.is_empty()
        {
            c = register_tournament(&c, ts)?;
        }
        if c.reservoir.len() < 2 || step == steps {
            break;
        }
        c = one_point_extend(&c, ts, 1)?.0;
    }
    Ok(c)
}

/// Limit plan of a stable tournament: from `settle` on, `x` beats every
/// later vertex iff `beats_later`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StablePlan {
    pub beats_later: bool,
    pub settle: usize,
}

/// Edges `x -> s` for `s > settle(x)` follow the plan; earlier ones are
/// random. Every point settles by `h / 2`.
pub fn stable_tournament(rng: &mut impl Rng, h: usize) -> (Tournament, Vec<StablePlan>) {
    let plan: Vec<StablePlan> = (0..h)
        .map(|x| StablePlan {
            beats_later: rng.gen(),
            settle: rng.gen_range(x..=x.max(h / 2)),
        })
        .collect();
    let noise: Vec<bool> = (0..h * h.saturating_sub(1) / 2)
        .map(|_| rng.gen())
        .collect();
    let t = Tournament::from_fn(h, |x, s| {
        if s > plan[x].settle {
            plan[x].beats_later
        } else {
            noise[s * (s - 1) / 2 + x]
        }
    });
    (t, plan)
}

/// 2-bounded coloring: a random share of tuples is paired off, the rest get
/// private colors.
pub fn bounded_coloring(rng: &mut impl Rng, arity: usize, h: usize) -> Result<KBoundedColoring> {
    let n = (0..arity).fold(1usize, |acc, i| acc * (h - i) / (i + 1));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let paired = rng.gen_range(0..=n / 2);
    let mut colors: Vec<u32> = (0..n as u32).collect();
    for i in 0..paired {
        colors[order[2 * i + 1]] = order[2 * i] as u32;
    }
    KBoundedColoring::new(arity, h, 2, colors)
}

/// Rainbow-stable 2-bounded pair coloring. Points below `h / 2` are
/// matched at random (or left single); from stage `h / 2` on, matched points
/// share every column color and nothing else collides. Earlier stages carry
/// random same-stage collisions. Returns the plan per point.
pub fn rainbow_stable_coloring(
    rng: &mut impl Rng,
    h: usize,
) -> Result<(KBoundedColoring, Vec<RainbowStable>)> {
    let half = h / 2;
    let mut low: Vec<usize> = (0..half).collect();
    low.shuffle(rng);
    let mut plan = vec![RainbowStable::Isolated; h];
    let pairs = rng.gen_range(0..=half / 2);
    for i in 0..pairs {
        let (x, y) = (low[2 * i], low[2 * i + 1]);
        plan[x] = RainbowStable::Paired(y);
        plan[y] = RainbowStable::Paired(x);
    }
    // Early stages: a random matching among the points below each stage.
    let mut early: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for s in 0..half {
        let mut below: Vec<usize> = (0..s).collect();
        below.shuffle(rng);
        for w in below
            .chunks(2)
            .filter(|w| w.len() == 2 && rng.gen_bool(0.5))
        {
            early.insert((w[1], s), w[0].min(w[1]));
            early.insert((w[0], s), w[0].min(w[1]));
        }
    }
    let f = KBoundedColoring::from_fn(2, h, 2, |t| {
        let (x, s) = (t[0], t[1]);
        let shared = if s >= half {
            match plan[x] {
                RainbowStable::Paired(y) if y < s => Some(x.min(y)),
                _ => None,
            }
        } else {
            early.get(&(x, s)).copied()
        };
        match shared {
            Some(m) => colex_rank(&[m, s]) as u32,
            None => (h * h + colex_rank(t)) as u32,
        }
    })?;
    Ok((f, plan))
}

/// A linear order of type ω+ω*: each point joins the ascending part with
/// probability one half. Returns the order and the ascending-part flags.
pub fn omega_omega_star(rng: &mut impl Rng, h: usize) -> (LinearOrderPrefix, Vec<bool>) {
    let up: Vec<bool> = (0..h).map(|_| rng.gen()).collect();
    let n_up = up.iter().filter(|&&u| u).count();
    let mut next_up = 0;
    let mut next_down = h;
    let ranks: Vec<usize> = up
        .iter()
        .map(|&u| {
            if u {
                next_up += 1;
                next_up - 1
            } else {
                next_down -= 1;
                next_down
            }
        })
        .collect();
    debug_assert_eq!(next_up, n_up);
    (
        LinearOrderPrefix::from_ranks(&ranks).expect("ranks are a permutation"),
        up,
    )
}

/// 3-ary 2-bounded normal coloring on `[0, h)` with `Z = [0, h)` settled
/// on the default tail. Domain pairs are matched at random and collide at
/// every tail stage; stages before the tail carry random same-stage
/// collisions.
pub fn settled_collapse_instance(
    rng: &mut impl Rng,
    h: usize,
) -> Result<(KBoundedColoring, Vec<usize>)> {
    let tail = crate::reductions::tail_len(h);
    let dom = h - tail;
    let mut pairs: Vec<[usize; 2]> = Vec::new();
    for b in 0..dom {
        for a in 0..b {
            pairs.push([a, b]);
        }
    }
    pairs.shuffle(rng);
    let matched = rng.gen_range(0..=pairs.len() / 2);
    let mut partner: BTreeMap<[usize; 2], [usize; 2]> = BTreeMap::new();
    for i in 0..matched {
        let (p, q) = (pairs[2 * i], pairs[2 * i + 1]);
        partner.insert(p, q);
        partner.insert(q, p);
    }
    let mut early: BTreeMap<[usize; 3], usize> = BTreeMap::new();
    for s in 2..dom {
        let mut below: Vec<[usize; 2]> = Vec::new();
        for b in 0..s {
            for a in 0..b {
                below.push([a, b]);
            }
        }
        below.shuffle(rng);
        for w in below
            .chunks(2)
            .filter(|w| w.len() == 2 && rng.gen_bool(0.3))
        {
            let m = colex_rank(&[w[0][0], w[0][1], s]).min(colex_rank(&[w[1][0], w[1][1], s]));
            early.insert([w[0][0], w[0][1], s], m);
            early.insert([w[1][0], w[1][1], s], m);
        }
    }
    let f = KBoundedColoring::from_fn(3, h, 2, |t| {
        let (sigma, s) = ([t[0], t[1]], t[2]);
        let own = colex_rank(t);
        let shared = if s >= dom {
            partner
                .get(&sigma)
                .filter(|tau| tau[1] < dom)
                .map(|tau| own.min(colex_rank(&[tau[0], tau[1], s])))
        } else {
            early.get(&[t[0], t[1], s]).copied()
        };
        shared.unwrap_or(own) as u32
    })?;
    Ok((f, (0..h).collect()))
}

/// `k` random subsets of `[0, n)` with assorted densities.
pub fn random_family(rng: &mut impl Rng, k: usize, n: usize) -> Result<SetFamily> {
    let members = (0..k)
        .map(|_| {
            let density = rng.gen_range(0.05..0.95);
            random_subset(rng, n, density)
        })
        .collect();
    SetFamily::new(n, members)
}

pub fn random_two_coloring(rng: &mut impl Rng, h: usize) -> FiniteColoring2 {
    let bits: Vec<u32> = (0..h * h.saturating_sub(1) / 2)
        .map(|_| rng.gen_range(0..2))
        .collect();
    FiniteColoring2::from_fn(h, 2, |x, y| bits[y * (y - 1) / 2 + x]).expect("two colors")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::check_condition;
    use crate::reductions::{classify_rainbow_stable, collapse_triples, is_normal};
    use crate::structures::HashedTournament;

    #[test]
    fn same_seed_same_bytes() {
        let a = delta2_set(&mut rng(5), 300, 3, 0.2).to_text();
        let b = delta2_set(&mut rng(5), 300, 3, 0.2).to_text();
        assert_eq!(a, b);
        assert_ne!(a, delta2_set(&mut rng(6), 300, 3, 0.2).to_text());
    }

    #[test]
    fn windowed_sets_meet_every_window() {
        let s = windowed_set(&mut rng(1), 1000, 64);
        for a in 0..=1000 - 64 {
            assert!(s.iter().any(|&x| (a..a + 64).contains(&x)), "window at {a}");
        }
    }

    #[test]
    fn flip_budgets_hold() {
        let mut r = rng(2);
        for _ in 0..20 {
            delta2_set(&mut r, 200, 3, 0.3)
                .check_flip_budget(3)
                .unwrap();
            round_trip_approx(&mut r, 256, 5)
                .check_flip_budget(5)
                .unwrap();
        }
    }

    #[test]
    fn stable_tournament_settles_by_half() {
        let h = 200;
        let (t, plan) = stable_tournament(&mut rng(3), h);
        for (x, p) in plan.iter().enumerate().take(h / 2) {
            assert!(p.settle <= h / 2);
            assert!((h / 2 + 1..h)
                .filter(|&s| s > x)
                .all(|s| t.beats(x, s) == p.beats_later));
        }
    }

    #[test]
    fn bounded_generators_pass_load_checks() {
        let mut r = rng(4);
        for arity in [2, 3] {
            let f = bounded_coloring(&mut r, arity, 12).unwrap();
            assert!(f.worst_color().unwrap().1 <= 2);
        }
    }

    #[test]
    fn rainbow_stable_plan_matches_classifier() {
        let mut r = rng(5);
        for _ in 0..10 {
            let h = 40;
            let (f, plan) = rainbow_stable_coloring(&mut r, h).unwrap();
            let got = classify_rainbow_stable(&f, h / 4).unwrap();
            assert_eq!(got[..h / 2], plan[..h / 2]);
        }
    }

    #[test]
    fn omega_order_shape() {
        let (l, up) = omega_omega_star(&mut rng(6), 50);
        for x in 0..50 {
            for y in 0..50 {
                if up[x] && !up[y] {
                    assert!(l.less(x, y));
                }
            }
        }
    }

    #[test]
    fn collapse_instances_are_settled_and_normal() {
        let mut r = rng(7);
        for _ in 0..5 {
            let (f, z) = settled_collapse_instance(&mut r, 16).unwrap();
            assert!(is_normal(&f));
            collapse_triples(&f, &z).unwrap();
        }
    }

    #[test]
    fn random_conditions_are_valid() {
        let ts: Vec<HashedTournament> = (0..2).map(|i| HashedTournament::new(256, i)).collect();
        let mut r = rng(8);
        for _ in 0..20 {
            let c = random_em_condition(&mut r, &ts, 256).unwrap();
            assert_eq!(check_condition(&c, &ts).unwrap(), None);
        }
    }
}
