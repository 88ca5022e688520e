//! Throughput of the compute kernels that dominate scans and sweeps:
//! primality, factorization, stabilizer-chain construction, generation
//! tests, exact generator counts, and submodule enumeration.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use secondmax::families::{agl1, borel_maximal, l2_borel, psl2, suzuki};
use secondmax::modlat::{all_submodules, fully_deleted_module};
use secondmax::numtheory::{factorize, is_prime, nat, repunit_value};
use secondmax::permgroup::{d_exact, estimate_generation_probability, PermGroup};
use secondmax::starsearch::{scan_star, ScanBudget};
use std::hint::black_box;

fn bench_primality(c: &mut Criterion) {
    let mut group = c.benchmark_group("primality");
    group.bench_function("u64_prime", |b| {
        b.iter(|| is_prime(black_box(&nat(2147483647))))
    });
    let m127 = repunit_value(&nat(2), &nat(127));
    group.bench_function("m127_probabilistic", |b| {
        b.iter(|| is_prime(black_box(&m127)))
    });
    group.bench_function("factorize_992", |b| {
        b.iter(|| factorize(black_box(&nat(992)), 1000).unwrap())
    });
    group.bench_function("factorize_repunit_11_10", |b| {
        // (10^11 - 1)/9 = 21649 * 513239
        let r11 = repunit_value(&nat(10), &nat(11));
        b.iter(|| factorize(black_box(&r11), 10_000_000).unwrap())
    });
    group.finish();
}

fn bench_chains(c: &mut Criterion) {
    let mut group = c.benchmark_group("stabilizer_chain");
    group.sample_size(20);
    group.bench_function("psl2_32", |b| b.iter(|| psl2(black_box(32)).unwrap()));
    group.bench_function("psl2_128", |b| b.iter(|| psl2(black_box(128)).unwrap()));
    group.bench_function("suzuki_8", |b| b.iter(|| suzuki(black_box(8)).unwrap()));
    group.bench_function("agl1_256", |b| b.iter(|| agl1(black_box(256)).unwrap()));
    group.finish();
}

fn bench_generation(c: &mut Criterion) {
    let mut group = c.benchmark_group("generation");
    let l2_8 = psl2(8).unwrap();
    group.bench_function("p_l2_8_k2_1000_trials", |b| {
        b.iter(|| estimate_generation_probability(black_box(&l2_8), 2, 1000, 7))
    });
    let b16 = agl1(16).unwrap();
    group.bench_function("d_exact_agl16_e3", |b| {
        b.iter_batched(
            || borel_maximal(&b16, 5).unwrap().group,
            |m: PermGroup| d_exact(&m, 8).unwrap(),
            BatchSize::SmallInput,
        )
    });
    let borel32 = l2_borel(32).unwrap();
    group.bench_function("sweep_borel_l2_32", |b| {
        b.iter(|| borel_maximal(black_box(&borel32), 31).unwrap())
    });
    group.finish();
}

fn bench_modules_and_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("modules_and_scan");
    let fdp = fully_deleted_module(6, 2).unwrap();
    group.bench_function("submodules_fdp_6_2", |b| {
        b.iter(|| all_submodules(black_box(&fdp)).unwrap())
    });
    group.bench_function("star_scan_r13_q50", |b| {
        b.iter(|| scan_star(13, 50, ScanBudget::Unlimited).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_primality,
    bench_chains,
    bench_generation,
    bench_modules_and_scan
);
criterion_main!(benches);
