use proptest::prelude::*;

use finjury_core::em::{
    block_extend, check_condition, encode_set_tournament, find_alternation,
    find_alternation_exhaustive, one_point_extend, verify_beats,
};
use finjury_core::harness::{gen, Engine, Scenario};
use finjury_core::limit::{from_stable_pairs, to_stable_pairs};
use finjury_core::priority::sads::{run_sads, verify_sads, SadsOptions};
use finjury_core::priority::sdnr::{run_sdnr, verify_sdnr};
use finjury_core::priority::sts::{run_sts, verify_sts};
use finjury_core::priority::{CandidateFamily, EngineTag, PriorityTrace};
use finjury_core::reductions::{
    collapse_triples, coloring_to_tournament, find_cohesive, find_cohesive_exhaustive,
    greedy_normal_subset, greedy_rainbow, is_normal, is_rainbow, lift_rainbow, normal_witness_on,
    tournament_to_coloring,
};
use finjury_core::structures::{HashedTournament, Tournament, DEFAULT_SEARCH_CAP};

fn family(seed: u64, k: usize, h: usize) -> CandidateFamily {
    CandidateFamily::new(h, gen::mixed_candidates(&mut gen::rng(seed), k, h, 3)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sads_stays_linear(seed in any::<u64>(), h in 16usize..160, k in 1usize..6, strict in any::<bool>()) {
        let z = family(seed, k, h);
        let options = SadsOptions { strict, ..Default::default() };
        let report = verify_sads(&run_sads(&z, h, options), &z);
        prop_assert!(report.three_cycle.is_none());
        prop_assert!(report.flip_excess.is_empty());
        prop_assert!(report.structurally_ok(), "{report:?}");
    }

    #[test]
    fn sts_replays_and_stays_thin(seed in any::<u64>(), h in 8usize..400, k in 0usize..6, colors in 1u32..5) {
        let z = family(seed, k, h);
        let run = run_sts(&z, colors, h);
        prop_assert_eq!(run.c.len(), h);
        prop_assert!(run.c.iter().all(|&v| v < colors));
        let report = verify_sts(&run, &z, 10).unwrap();
        prop_assert!(report.structurally_ok(), "{report:?}");
    }

    #[test]
    fn sdnr_restraints_are_consistent(seed in any::<u64>(), h in 12usize..72, k in 1usize..5) {
        let (tables, d, e_set) = gen::sdnr_instance(&mut gen::rng(seed), h, k, 4).unwrap();
        let run = run_sdnr(&tables, &d, &e_set, h);
        let report = verify_sdnr(&run, &tables, &d, &e_set);
        prop_assert!(report.structurally_ok(), "{report:?}");
        prop_assert!(report.agreement_ok(), "{report:?}");
        prop_assert!(report.doubled_flips_ok(), "{report:?}");
    }

    #[test]
    fn trace_text_round_trips(seed in any::<u64>(), h in 8usize..64) {
        let (tables, d, e_set) = gen::sdnr_instance(&mut gen::rng(seed), h, 3, 3).unwrap();
        let trace = run_sdnr(&tables, &d, &e_set, h).trace;
        let text = trace.render();
        let back = PriorityTrace::parse_lines(EngineTag::Sdnr, text.lines(), 1).unwrap();
        prop_assert_eq!(back.render(), text);
        prop_assert!(back.check_complete(h).is_ok());
    }

    #[test]
    fn em_extensions_preserve_validity(seed in any::<u64>(), n in 16usize..256, k in 1usize..4) {
        let ts: Vec<HashedTournament> =
            gen::tournament_seeds(seed, k).into_iter().map(|s| HashedTournament::new(n, s)).collect();
        let mut rng = gen::rng(seed ^ 1);
        let c = gen::random_em_condition(&mut rng, &ts, n).unwrap();
        prop_assert_eq!(check_condition(&c, &ts).unwrap(), None);
        prop_assert!(verify_beats(&c, &ts).unwrap());
        if c.reservoir.len() >= 2 {
            let (d, _) = one_point_extend(&c, &ts, 1).unwrap();
            prop_assert_eq!(check_condition(&d, &ts).unwrap(), None);
        }
        let take = c.reservoir.len().min(12);
        if take > 0 && c.reservoir.len() > take {
            let split = block_extend(&c, &ts, &c.reservoir[..take]).unwrap();
            let (rho, chain) = split.best_chain(&ts, DEFAULT_SEARCH_CAP).unwrap();
            let d = split.extend(&ts, rho, &chain).unwrap();
            prop_assert_eq!(check_condition(&d, &ts).unwrap(), None);
        }
    }

    #[test]
    fn alternation_scan_matches_exhaustive(seed in any::<u64>(), n in 4usize..40) {
        let mut rng = gen::rng(seed);
        let x = gen::random_subset(&mut rng, n, 0.5);
        let set = gen::random_subset(&mut rng, n, 0.6);
        prop_assert_eq!(
            find_alternation(&x, &set).is_some(),
            find_alternation_exhaustive(&x, &set).is_some()
        );
        let t = encode_set_tournament(&x, n);
        prop_assert!(t.validate().is_ok());
    }

    #[test]
    fn coloring_tournament_duality(seed in any::<u64>(), h in 2usize..48) {
        let f = gen::random_two_coloring(&mut gen::rng(seed), h);
        let t = coloring_to_tournament(&f).unwrap();
        prop_assert_eq!(tournament_to_coloring(&t), f);
        let back = coloring_to_tournament(&tournament_to_coloring(&t)).unwrap();
        prop_assert_eq!(Tournament::materialize(&back), t);
    }

    #[test]
    fn cohesive_search_matches_exhaustive(seed in any::<u64>(), k in 0usize..9, n in 1usize..200) {
        let family = gen::random_family(&mut gen::rng(seed), k, n).unwrap();
        prop_assert_eq!(find_cohesive(&family, n).unwrap(), find_cohesive_exhaustive(&family, n).unwrap());
    }

    #[test]
    fn collapse_is_bounded_and_lifts(seed in any::<u64>(), h in 6usize..20) {
        let (f, z) = gen::settled_collapse_instance(&mut gen::rng(seed), h).unwrap();
        let c = collapse_triples(&f, &z).unwrap();
        prop_assert!(c.ftilde.worst_color().map_or(0, |w| w.1) <= 2);
        let r = greedy_rainbow(&c.ftilde, &c.domain);
        prop_assert!(is_rainbow(&c.ftilde, &r).unwrap());
        prop_assert!(is_rainbow(&f, &lift_rainbow(&f, &c, &r)).unwrap());
    }

    #[test]
    fn greedy_normal_output_is_normal(seed in any::<u64>(), h in 4usize..14, arity in 2usize..4) {
        let f = gen::bounded_coloring(&mut gen::rng(seed), arity, h).unwrap();
        let y = greedy_normal_subset(&f);
        prop_assert_eq!(normal_witness_on(&f, &y).unwrap(), None);
        prop_assert_eq!(is_normal(&f), y.len() == h);
    }

    #[test]
    fn stable_pair_round_trip_is_exact(seed in any::<u64>(), h in 4usize..256, flips in 0usize..6) {
        let c = gen::round_trip_approx(&mut gen::rng(seed), h, flips);
        let (back, rep) = from_stable_pairs(&to_stable_pairs(&c).unwrap(), h - h / 2);
        prop_assert!(rep.is_stable());
        for x in 0..h {
            prop_assert_eq!(back.limit_report(x), c.limit_report(x));
        }
    }

    #[test]
    fn scenario_text_round_trips(seed in any::<u64>(), h in 1usize..5000, e in 0usize..6) {
        let engine = [Engine::Sts, Engine::Sads, Engine::Sdnr, Engine::EmWalk, Engine::Collapse, Engine::Cohesive][e];
        let s = Scenario::new(engine, h, seed);
        let back = Scenario::parse(&s.to_text()).unwrap();
        prop_assert_eq!(back.digest(), s.digest());
        prop_assert_eq!(back, s);
    }
}
