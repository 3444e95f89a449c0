use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dyndist::ff_poly::rng_from_seed;
use dyndist::minplus::{minplus_approx, minplus_exact};
use dyndist::polymatrix::fmat_mul;
use dyndist::shorthop::{ShortHopOracle, ShortHopParams};
use dyndist::{FieldConfig, SliceInverseDS, TruncPoly};
use dyndist_bench::{random_dist, random_fmat, random_poly, random_unit_form, ring_graph};
use std::hint::black_box;

fn field_matmul(c: &mut Criterion) {
    let f = FieldConfig::mersenne61();
    let mut g = c.benchmark_group("fmat_mul");
    for n in [32, 64, 128] {
        let (a, b) = (random_fmat(&f, n, 1), random_fmat(&f, n, 2));
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |bch, _| bch.iter(|| fmat_mul(&f, black_box(&a), black_box(&b)).unwrap()));
    }
    g.finish();
}

fn poly_mul(c: &mut Criterion) {
    let f = FieldConfig::mersenne61();
    let mut g = c.benchmark_group("trunc_poly_mul");
    for h in [16, 64, 256] {
        let (a, b) = (random_poly(&f, h, 3), random_poly(&f, h, 4));
        g.bench_with_input(BenchmarkId::from_parameter(h), &h, |bch, _| bch.iter(|| black_box(&a).mul(black_box(&b), &f).unwrap()));
    }
    g.finish();
}

fn slice_structure(c: &mut Criterion) {
    let f = FieldConfig::mersenne61();
    let (n, h) = (48, 8);
    let m = random_unit_form(&f, n, h, 5);
    let base = SliceInverseDS::new(&f, &m, vec![2, 5, 7], 8, 32).unwrap();
    let delta = TruncPoly::monomial(h, f.elem(7), 3);
    let all: Vec<usize> = (0..n).collect();
    c.bench_function("slice_update_n48", |bch| {
        bch.iter_batched(|| base.clone(), |mut ds| ds.update(1, 2, &delta).unwrap(), criterion::BatchSize::SmallInput)
    });
    c.bench_function("slice_query_8x8_n48", |bch| {
        let mut ds = base.clone();
        bch.iter(|| ds.query(&all[..8], &all[8..16], 5).unwrap())
    });
}

fn short_hop_query(c: &mut Criterion) {
    let f = FieldConfig::mersenne61();
    let g = ring_graph(64);
    let p = ShortHopParams { bound: 24, eps: 0.25, mu_cap: 4, nu_cap: 8 };
    let mut o = ShortHopOracle::new(&f, &g, &p, rng_from_seed(6)).unwrap();
    let all: Vec<usize> = (0..64).collect();
    c.bench_function("short_hop_batch_query_n64", |bch| bch.iter(|| o.batch_query(&all, &all).unwrap()));
}

fn minplus(c: &mut Criterion) {
    let mut g = c.benchmark_group("minplus_64");
    let (a, b) = (random_dist(64, 7), random_dist(64, 8));
    g.bench_function("exact", |bch| bch.iter(|| minplus_exact(black_box(&a), black_box(&b)).unwrap()));
    g.bench_function("approx_eps0.1", |bch| bch.iter(|| minplus_approx(black_box(&a), black_box(&b), 0.1).unwrap()));
    g.finish();
}

criterion_group!(benches, field_matmul, poly_mul, slice_structure, short_hop_query, minplus);
criterion_main!(benches);
