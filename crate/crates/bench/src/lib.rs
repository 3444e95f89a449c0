//! Deterministic inputs for the kernel benchmarks.

use dyndist::ff_poly::rng_from_seed;
use dyndist::{DistMatrix, DynGraph, FMatrix, FieldConfig, PolyMatrix, TruncPoly};

pub fn random_fmat(f: &FieldConfig, n: usize, seed: u64) -> FMatrix {
    let mut rng = rng_from_seed(seed);
    FMatrix::from_elems(n, n, (0..n * n).map(|_| f.sample(&mut rng)).collect()).expect("square shape")
}

pub fn random_poly(f: &FieldConfig, h: usize, seed: u64) -> TruncPoly {
    let mut rng = rng_from_seed(seed);
    TruncPoly::from_elems((0..h).map(|_| f.sample(&mut rng)).collect())
}

/// Identity plus random higher slices: a valid input of the dynamic inverse.
pub fn random_unit_form(f: &FieldConfig, n: usize, h: usize, seed: u64) -> PolyMatrix {
    let mut m = PolyMatrix::identity(n, h);
    for k in 1..h {
        *m.slice_mut(k) = random_fmat(f, n, seed + k as u64);
    }
    m
}

/// Entries in [1, 100] drawn from the field sampler.
pub fn random_dist(n: usize, seed: u64) -> DistMatrix {
    let f = FieldConfig::mersenne61();
    let mut rng = rng_from_seed(seed);
    DistMatrix::from_vec(n, n, (0..n * n).map(|_| (f.sample(&mut rng).value() % 100 + 1) as f64).collect()).expect("square shape")
}

/// Directed ring with chords `i -> 3i+1`, integer weights 1..=3.
pub fn ring_graph(n: usize) -> DynGraph {
    let mut g = DynGraph::new(n, true, 3.0);
    for i in 0..n {
        g.set_weight(i, (i + 1) % n, (1 + i % 3) as f64).expect("valid weight");
        let j = (3 * i + 1) % n;
        if j != i {
            g.set_weight(i, j, 2.0).expect("valid weight");
        }
    }
    g
}
