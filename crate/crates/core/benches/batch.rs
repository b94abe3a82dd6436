use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use finjury_core::batch::{map_par, map_seq};
use finjury_core::em::check_condition;
use finjury_core::harness::gen;
use finjury_core::priority::sads::{run_sads, verify_sads, SadsOptions};
use finjury_core::priority::CandidateFamily;
use finjury_core::structures::{HashedTournament, Tournament};

fn sads_sweep(c: &mut Criterion) {
    let h = 400;
    let families: Vec<CandidateFamily> = (0..16)
        .map(|seed| {
            CandidateFamily::new(h, gen::mixed_candidates(&mut gen::rng(seed), 4, h, 3)).unwrap()
        })
        .collect();
    let job = |z: &CandidateFamily| {
        verify_sads(&run_sads(z, h, SadsOptions::default()), z).structurally_ok()
    };
    let mut g = c.benchmark_group("sads_sweep");
    g.sample_size(10);
    g.bench_function("seq", |b| b.iter(|| map_seq(black_box(&families), job)));
    g.bench_function("par", |b| b.iter(|| map_par(black_box(&families), job)));
    g.finish();
}

fn triple_scan(c: &mut Criterion) {
    let ts: Vec<Tournament> = gen::tournament_seeds(7, 16)
        .into_iter()
        .map(|s| Tournament::materialize(&HashedTournament::new(512, s)))
        .collect();
    let job = |t: &Tournament| t.find_three_cycle();
    let mut g = c.benchmark_group("triple_scan");
    g.sample_size(20);
    g.bench_function("seq", |b| b.iter(|| map_seq(black_box(&ts), job)));
    g.bench_function("par", |b| b.iter(|| map_par(black_box(&ts), job)));
    g.finish();
}

fn em_conditions(c: &mut Criterion) {
    let n = 256;
    let ts: Vec<HashedTournament> = gen::tournament_seeds(3, 2)
        .into_iter()
        .map(|s| HashedTournament::new(n, s))
        .collect();
    let mut rng = gen::rng(11);
    let conds: Vec<_> = (0..64)
        .map(|_| gen::random_em_condition(&mut rng, &ts, n).unwrap())
        .collect();
    let job = |cond: &_| check_condition(cond, &ts).unwrap().is_none();
    let mut g = c.benchmark_group("em_conditions");
    g.bench_function("seq", |b| b.iter(|| map_seq(black_box(&conds), job)));
    g.bench_function("par", |b| b.iter(|| map_par(black_box(&conds), job)));
    g.finish();
}

criterion_group!(benches, sads_sweep, triple_scan, em_conditions);
criterion_main!(benches);
