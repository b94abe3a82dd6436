//! One line per acceptance criterion; exits non-zero if any fails.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::Rng;

use finjury_core::batch;
use finjury_core::em::{
    block_extend, check_condition, em_walk, encode_set_tournament, find_alternation,
    find_alternation_exhaustive, verify_beats, verify_walk, WalkConfig,
};
use finjury_core::harness::{self, build_sdnr, gen, load_scenario, replay, Engine};
use finjury_core::limit::{from_stable_pairs, to_stable_pairs};
use finjury_core::priority::sads::{run_sads, verify_sads, SadsOptions};
use finjury_core::priority::sdnr::{run_sdnr, verify_sdnr, SdnrReport};
use finjury_core::priority::sts::{run_sts, verify_sts, StsVerdict};
use finjury_core::priority::{Candidate, CandidateFamily};
use finjury_core::reductions::{
    collapse_triples, coloring_to_tournament, is_rainbow, lift_rainbow, monotone_in_transitive,
};
use finjury_core::structures::{
    greedy_common_transitive, is_transitive, max_transitive_subtournament, Beats, HashedTournament,
    Homogeneity,
};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn fixtures() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .expect("scenario directory")
        .map(|e| e.expect("directory entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    paths
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../scenarios/{name}.toml"))
}

fn meets_every_window(set: &[usize], h: usize, w: usize) -> bool {
    let mut inside = vec![false; h];
    for &x in set {
        inside[x] = true;
    }
    (0..=h - w).all(|start| inside[start..start + w].iter().any(|&b| b))
}

fn sts_static() -> Outcome {
    let h = 10_000;
    let mut rng = gen::rng(1);
    let sets: Vec<Vec<usize>> = (0..8).map(|_| gen::windowed_set(&mut rng, h, 64)).collect();
    ensure(sets.iter().all(|s| meets_every_window(s, h, 64)), || {
        "generated set misses a window".into()
    })?;
    let z = CandidateFamily::new(h, sets.into_iter().map(Candidate::Static).collect())
        .map_err(|e| e.to_string())?;
    let started = Instant::now();
    let run = run_sts(&z, 4, h);
    let rep = verify_sts(&run, &z, 10).map_err(|e| e.to_string())?;
    let took = started.elapsed();
    ensure(rep.structurally_ok(), || {
        format!("structural failure {rep:?}")
    })?;
    ensure(rep.all_satisfied(), || {
        format!(
            "{} of {} satisfied",
            rep.satisfied(),
            rep.requirements.len()
        )
    })?;
    for r in &rep.requirements {
        if let StsVerdict::Satisfied { witness } = r.verdict {
            ensure(
                run.c[witness] == r.req.i && z.contains(r.req.e, witness),
                || format!("bad witness {witness} for {}", r.req),
            )?;
        }
    }
    ensure(took < Duration::from_secs(1), || {
        format!("took {:.0} ms", ms(took))
    })?;
    Ok(format!(
        "static: {}/{} satisfied in {:.0} ms",
        rep.satisfied(),
        rep.requirements.len(),
        ms(took)
    ))
}

fn sts_approx() -> Outcome {
    let h = 10_000;
    let (mut satisfied, mut excused, mut total) = (0, 0, 0);
    let mut slowest = Duration::ZERO;
    for seed in 0..5 {
        let mut rng = gen::rng(100 + seed);
        let cands: Vec<Candidate> = (0..8)
            .map(|_| Candidate::Approx(gen::delta2_set(&mut rng, h, 3, 0.3)))
            .collect();
        let z = CandidateFamily::new(h, cands).map_err(|e| e.to_string())?;
        let started = Instant::now();
        let run = run_sts(&z, 4, h);
        let rep = verify_sts(&run, &z, 10).map_err(|e| e.to_string())?;
        slowest = slowest.max(started.elapsed());
        ensure(rep.structurally_ok(), || {
            format!("seed {seed}: structural failure")
        })?;
        for r in &rep.requirements {
            total += 1;
            match r.verdict {
                StsVerdict::Satisfied { .. } => satisfied += 1,
                StsVerdict::Excused { since } => {
                    let waiting = run.c[since..].iter().all(|&v| v == r.req.i);
                    let empty = (since..h).all(|a| !z.contains(r.req.e, a));
                    ensure(waiting && empty, || {
                        format!("seed {seed}: excuse for {} does not hold", r.req)
                    })?;
                    excused += 1;
                }
                v => {
                    return Err(format!(
                        "seed {seed}: {} unsatisfied without excuse ({v:?})",
                        r.req
                    ))
                }
            }
        }
    }
    ensure(slowest < Duration::from_secs(1), || {
        format!("slowest run {:.0} ms", ms(slowest))
    })?;
    Ok(format!(
        "approx: {satisfied} satisfied, {excused} excused of {total}, slowest {:.0} ms",
        ms(slowest)
    ))
}

fn criterion_1() -> Outcome {
    let a = sts_static();
    let b = sts_approx();
    match (a, b) {
        (Ok(a), Ok(b)) => Ok(format!("{a}; {b}")),
        (a, b) => Err(format!(
            "{}; {}",
            a.unwrap_or_else(|e| e),
            b.unwrap_or_else(|e| e)
        )),
    }
}

fn criterion_2() -> Outcome {
    let h = 1500;
    let seeds: Vec<u64> = (0..50).collect();
    let started = Instant::now();
    let reports = batch::map(&seeds, |&seed| {
        let z = CandidateFamily::new(h, gen::mixed_candidates(&mut gen::rng(seed), 4, h, 3))
            .expect("generated candidates are valid");
        verify_sads(&run_sads(&z, h, SadsOptions::default()), &z)
    });
    let took = started.elapsed();
    let mut large = 0;
    for (seed, rep) in seeds.iter().zip(&reports) {
        ensure(rep.three_cycle.is_none(), || {
            format!("seed {seed}: 3-cycle {:?}", rep.three_cycle)
        })?;
        ensure(rep.flip_excess.is_empty(), || {
            format!("seed {seed}: flips exceed claims {:?}", rep.flip_excess)
        })?;
        ensure(rep.structurally_ok(), || {
            format!("seed {seed}: structural failure")
        })?;
        for c in rep.candidates.iter().filter(|c| c.late_elements >= 16) {
            large += 1;
            ensure(c.meets_u && c.meets_complement, || {
                format!("seed {seed}: candidate {} misses a side", c.e)
            })?;
        }
    }
    ensure(took < Duration::from_secs(5), || {
        format!("took {:.0} ms", ms(took))
    })?;
    Ok(format!(
        "50 runs at H={h}, no 3-cycles, {large} large candidates split, {:.0} ms",
        ms(took)
    ))
}

fn sdnr_check(label: &str, rep: &SdnrReport) -> Result<(), String> {
    ensure(rep.structurally_ok(), || {
        format!("{label}: structural failure {rep:?}")
    })?;
    ensure(rep.agreement_ok(), || {
        format!("{label}: witness without agreement")
    })?;
    ensure(rep.flips_ok(), || {
        let (y, f, i) = rep.flip_excess[0];
        format!("{label}: point {y} flips {f} times with {i} injuries")
    })
}

fn criterion_3() -> Outcome {
    let mut witnessed = 0;
    let mut pairs = 0;
    let mut injuries = 0;
    for seed in 0..20 {
        let (tables, d, e_set) =
            gen::sdnr_instance(&mut gen::rng(seed), 80, 4, 4).map_err(|e| e.to_string())?;
        let run = run_sdnr(&tables, &d, &e_set, 80);
        let rep = verify_sdnr(&run, &tables, &d, &e_set);
        sdnr_check(&format!("seed {seed}"), &rep)?;
        witnessed += rep
            .agreements
            .iter()
            .filter(|a| a.witness.is_some())
            .count();
        pairs += rep.pairs.len();
        injuries += run.injuries.len();
    }
    for name in ["sdnr-empty", "sdnr-constant", "sdnr-cascade"] {
        let s = load_scenario(fixture(name)).map_err(|e| e.to_string())?;
        let (tables, d, e_set) = build_sdnr(&s).map_err(|e| e.to_string())?;
        let run = run_sdnr(&tables, &d, &e_set, s.horizon);
        let rep = verify_sdnr(&run, &tables, &d, &e_set);
        sdnr_check(name, &rep)?;
        if name == "sdnr-cascade" {
            ensure(run.injuries.len() >= 2, || {
                "cascade scenario has no cascade".into()
            })?;
        }
        witnessed += rep
            .agreements
            .iter()
            .filter(|a| a.witness.is_some())
            .count();
        pairs += rep.pairs.len();
        injuries += run.injuries.len();
    }
    Ok(format!(
        "23 runs, {witnessed} witnessed functionals agree, {pairs} restraint classes, {injuries} injuries within 1 + injuries flips"
    ))
}

fn criterion_4() -> Outcome {
    let started = Instant::now();
    let mut rng = gen::rng(4);
    let mut blocks = 0;
    let mut conditions = 0;
    let mut classes = 0;
    while conditions < 1000 || blocks < 1000 {
        let k = rng.gen_range(1..4);
        let n = rng.gen_range(32..512);
        let ts: Vec<HashedTournament> = (0..k)
            .map(|_| HashedTournament::new(n, rng.gen()))
            .collect();
        let c = gen::random_em_condition(&mut rng, &ts, n).map_err(|e| e.to_string())?;
        ensure(
            check_condition(&c, &ts)
                .map_err(|e| e.to_string())?
                .is_none(),
            || "generated condition invalid".into(),
        )?;
        if conditions < 1000 {
            ensure(verify_beats(&c, &ts).map_err(|e| e.to_string())?, || {
                format!("beats dichotomy fails for {c:?}")
            })?;
            conditions += 1;
        }
        if blocks < 1000 && c.reservoir.len() >= 2 {
            let take = rng.gen_range(1..c.reservoir.len().min(17));
            let split = block_extend(&c, &ts, &c.reservoir[..take]).map_err(|e| e.to_string())?;
            for (&rho, class) in &split.classes {
                let chain = greedy_common_transitive(&ts[..c.sigma.len()], class);
                let d = split.extend(&ts, rho, &chain).map_err(|e| e.to_string())?;
                ensure(
                    check_condition(&d, &ts)
                        .map_err(|e| e.to_string())?
                        .is_none(),
                    || format!("extension by class {rho:#b} is invalid"),
                )?;
                classes += 1;
            }
            blocks += 1;
        }
    }
    let ts: Vec<HashedTournament> = gen::tournament_seeds(4, 2)
        .into_iter()
        .map(|s| HashedTournament::new(65536, s))
        .collect();
    let out = em_walk(&ts, &WalkConfig::new(65536, vec![0, 0], 8)).map_err(|e| e.to_string())?;
    ensure(out.g.len() >= 8, || format!("|G| = {}", out.g.len()))?;
    for (nu, t) in ts.iter().enumerate() {
        let past: Vec<usize> = out
            .g
            .iter()
            .copied()
            .filter(|&x| x > out.sigma[nu])
            .collect();
        ensure(is_transitive(t, &past).map_err(|e| e.to_string())?, || {
            format!("G not transitive for T_{nu}")
        })?;
    }
    ensure(verify_walk(&ts, &out).iter().all(Option::is_none), || {
        "walk verifier found a cycle".into()
    })?;
    let took = started.elapsed();
    ensure(took < Duration::from_secs(10), || {
        format!("took {:.0} ms", ms(took))
    })?;
    Ok(format!(
        "{conditions} conditions, {blocks} blocks ({classes} class extensions) valid; walk |G| = {} in {:.0} ms",
        out.g.len(),
        ms(took)
    ))
}

fn criterion_5() -> Outcome {
    let n = 200;
    let mut rng = gen::rng(5);
    let mut largest = 0;
    for i in 0..200 {
        let density = rng.gen_range(0.1..0.9);
        let x = gen::random_subset(&mut rng, n, density);
        let t = encode_set_tournament(&x, n);
        let all: Vec<usize> = (0..n).collect();
        let greedy = greedy_common_transitive(&[&t], &all);
        ensure(
            is_transitive(&t, &greedy).map_err(|e| e.to_string())?,
            || format!("set {i}: greedy set not transitive"),
        )?;
        ensure(find_alternation(&x, &greedy).is_none(), || {
            format!("set {i}: alternation in greedy set")
        })?;
        let window: Vec<usize> = rand::seq::index::sample(&mut rng, n, 20).into_vec();
        let sub = t.induced(&window).map_err(|e| e.to_string())?;
        let exact: Vec<usize> = max_transitive_subtournament(&sub, 20)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|j| window[j])
            .collect();
        ensure(find_alternation_exhaustive(&x, &exact).is_none(), || {
            format!("set {i}: alternation in exact set")
        })?;
        largest = largest.max(greedy.len());
    }
    let evens: Vec<usize> = (0..n).step_by(2).collect();
    let t = encode_set_tournament(&evens, n);
    let cycle = [(0, 2), (2, 1), (1, 3), (3, 0)];
    ensure(cycle.iter().all(|&(a, b)| t.beats(a, b)), || {
        "evens do not give 0->2->1->3->0".into()
    })?;
    Ok(format!(
        "200 sets clean (largest greedy transitive set {largest}); evens give 0->2->1->3->0"
    ))
}

fn criterion_6() -> Outcome {
    let h = 1024;
    let seeds: Vec<u64> = (0..500).collect();
    let bad = batch::map(&seeds, |&seed| {
        let c = gen::round_trip_approx(&mut gen::rng(seed), h, 5);
        let (back, rep) = from_stable_pairs(&to_stable_pairs(&c).expect("palette fits"), h / 2);
        let mismatch = (0..h).find(|&x| back.limit_report(x) != c.limit_report(x));
        (rep.is_stable(), mismatch)
    });
    for (seed, (stable, mismatch)) in seeds.iter().zip(&bad) {
        ensure(*stable, || format!("seed {seed}: unstable column"))?;
        ensure(mismatch.is_none(), || {
            format!("seed {seed}: point {mismatch:?} differs")
        })?;
    }
    Ok(format!("500 approximations at H={h} round-trip exactly"))
}

fn criterion_7() -> Outcome {
    let mut rainbows = 0usize;
    let mut witnesses = 0usize;
    for seed in 0..100 {
        let (f, z) =
            gen::settled_collapse_instance(&mut gen::rng(seed), 16).map_err(|e| e.to_string())?;
        let c = collapse_triples(&f, &z).map_err(|e| format!("seed {seed}: {e}"))?;
        witnesses += c.witness.len();
        let mut count: HashMap<u32, usize> = HashMap::new();
        for (j, &b) in c.domain.iter().enumerate() {
            for &a in &c.domain[..j] {
                *count.entry(c.ftilde.color(&[a, b])).or_default() += 1;
            }
        }
        ensure(count.values().all(|&k| k <= 2), || {
            format!("seed {seed}: f~ not 2-bounded")
        })?;
        let d = c.domain.len();
        for mask in 1u32..1 << d {
            let r: Vec<usize> = (0..d)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| c.domain[i])
                .collect();
            if !is_rainbow(&c.ftilde, &r).map_err(|e| e.to_string())? {
                continue;
            }
            let lifted = lift_rainbow(&f, &c, &r);
            ensure(is_rainbow(&f, &lifted).map_err(|e| e.to_string())?, || {
                format!("seed {seed}: rainbow {r:?} lifts to non-rainbow {lifted:?}")
            })?;
            rainbows += 1;
        }
    }
    Ok(format!(
        "100 instances 2-bounded ({witnesses} collapsed pairs); all {rainbows} f~-rainbows lift"
    ))
}

fn homogeneous(f: &finjury_core::structures::FiniteColoring2, s: &[usize]) -> bool {
    !matches!(f.is_homogeneous(s), Ok(Homogeneity::Mixed) | Err(_))
}

fn criterion_8() -> Outcome {
    let mut rng = gen::rng(8);
    let mut checked = 0;
    for i in 0..100 {
        let h = if i % 2 == 0 { 20 } else { 64 };
        let f = gen::random_two_coloring(&mut rng, h);
        let t = coloring_to_tournament(&f).map_err(|e| e.to_string())?;
        let s = if h <= 20 {
            max_transitive_subtournament(&t, 20).map_err(|e| e.to_string())?
        } else {
            let all: Vec<usize> = (0..h).collect();
            greedy_common_transitive(&[&t], &all)
        };
        let m = monotone_in_transitive(&t, &s).map_err(|e| e.to_string())?;
        for w in [&m.ascending, &m.descending] {
            ensure(homogeneous(&f, w), || {
                format!("coloring {i}: witness {w:?} is not homogeneous")
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "100 colorings, {checked} monotone witnesses homogeneous"
    ))
}

fn criterion_9() -> Outcome {
    let paths = fixtures();
    let scenarios = paths
        .iter()
        .map(|p| load_scenario(p).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let first = harness::run_all(&scenarios);
    let second = batch::map_seq(&scenarios, harness::run);
    for ((s, a), b) in scenarios.iter().zip(first).zip(second) {
        let (a, b) = (a.map_err(|e| e.to_string())?, b.map_err(|e| e.to_string())?);
        ensure(a.trace == b.trace, || format!("{}: traces differ", s.name))?;
        let report = a.report.render_machine();
        ensure(report == b.report.render_machine(), || {
            format!("{}: reports differ", s.name)
        })?;
        let again = replay(&a.trace, Some(s.engine)).map_err(|e| format!("{}: {e}", s.name))?;
        ensure(again.render_machine() == report, || {
            format!("{}: replay differs", s.name)
        })?;
    }
    let engines: std::collections::BTreeSet<Engine> = scenarios.iter().map(|s| s.engine).collect();
    ensure(engines.len() == 6, || {
        format!("fixtures cover {} engines", engines.len())
    })?;
    Ok(format!(
        "{} scenarios byte-identical across runs and replay",
        scenarios.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "thin-set diagonalization", criterion_1),
        (2, "linear order and stable set", criterion_2),
        (3, "diagonally non-recursive construction", criterion_3),
        (4, "EM condition calculus", criterion_4),
        (5, "set-encoding tournament", criterion_5),
        (6, "limit round trip", criterion_6),
        (7, "collapse and lifting", criterion_7),
        (8, "monotone/homogeneous bridge", criterion_8),
        (9, "determinism and replay", criterion_9),
    ];
    let mut failed = 0;
    for (n, title, f) in criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let wall = ms(started.elapsed());
        match outcome {
            Ok(detail) => println!("PASS criterion {n} ({title}): {detail} [{wall:.0} ms]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n} ({title}): {detail} [{wall:.0} ms]");
            }
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
