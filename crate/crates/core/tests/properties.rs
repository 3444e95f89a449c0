//! Randomized invariants across the core modules.

use dyndist::complexity::{omega_abc, OmegaTable};
use dyndist::ff_poly::rng_from_seed;
use dyndist::graphenc::INF;
use dyndist::metrics::{diameter_15, ExactSource, MetricSnapshot};
use dyndist::minplus::{minplus_approx, minplus_exact};
use dyndist::oracle::dijkstra_apsp;
use dyndist::polymatrix::{fmat_mul, fmat_mul_naive, neumann_inverse, series_inverse};
use dyndist::shorthop::{thresholds, ShortHopOracle, ShortHopParams};
use dyndist::{DistMatrix, DynGraph, FMatrix, FieldConfig, PolyMatrix, TruncPoly};
use proptest::prelude::*;

fn field() -> FieldConfig {
    FieldConfig::mersenne61()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_inverse_roundtrip(x in 1u64..(1u64 << 61) - 1) {
        let f = field();
        let a = f.elem(x);
        prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.elem(1));
        prop_assert_eq!(f.add(a, f.neg(a)), f.elem(0));
    }

    #[test]
    fn unit_series_inverse(c in proptest::collection::vec(0u64..1000, 1..12), lead in 1u64..1000) {
        let f = field();
        let mut coeffs = c.clone();
        coeffs[0] = lead;
        let p = TruncPoly::from_coeffs(&f, coeffs.len(), &coeffs);
        let q = p.inv_unit(&f).unwrap();
        prop_assert_eq!(p.mul(&q, &f).unwrap(), TruncPoly::one(coeffs.len()));
    }

    #[test]
    fn poly_mul_associates(a in proptest::collection::vec(0u64..50, 6), b in proptest::collection::vec(0u64..50, 6), c in proptest::collection::vec(0u64..50, 6)) {
        let f = field();
        let (a, b, c) = (TruncPoly::from_coeffs(&f, 6, &a), TruncPoly::from_coeffs(&f, 6, &b), TruncPoly::from_coeffs(&f, 6, &c));
        prop_assert_eq!(a.mul(&b, &f).unwrap().mul(&c, &f).unwrap(), a.mul(&b.mul(&c, &f).unwrap(), &f).unwrap());
    }

    #[test]
    fn matmul_kernels_agree(r in 1usize..9, k in 1usize..9, c in 1usize..9, seed in 0u64..1000) {
        let f = field();
        let mut rng = rng_from_seed(seed);
        let a = FMatrix::from_elems(r, k, (0..r * k).map(|_| f.sample(&mut rng)).collect()).unwrap();
        let b = FMatrix::from_elems(k, c, (0..k * c).map(|_| f.sample(&mut rng)).collect()).unwrap();
        prop_assert_eq!(fmat_mul(&f, &a, &b).unwrap(), fmat_mul_naive(&f, &a, &b).unwrap());
    }

    #[test]
    fn inverse_routes_agree(n in 1usize..6, h in 1usize..7, seed in 0u64..1000) {
        let f = field();
        let mut rng = rng_from_seed(seed);
        let mut m = PolyMatrix::identity(n, h);
        for k in 1..h {
            for i in 0..n {
                for j in 0..n {
                    m.slice_mut(k).set(i, j, f.sample(&mut rng));
                }
            }
        }
        prop_assert_eq!(neumann_inverse(&f, &m).unwrap(), series_inverse(&f, &m).unwrap());
    }

    #[test]
    fn thresholds_cover_every_value(eps in 0.01f64..1.0, bound in 1usize..300) {
        let s = thresholds(eps, bound);
        prop_assert_eq!(s[0], 1);
        prop_assert_eq!(*s.last().unwrap(), bound);
        for x in 1..=bound {
            let d = s[s.partition_point(|&d| d < x)];
            prop_assert!(d as f64 <= (1.0 + eps) * x as f64 + 1e-9);
        }
    }

    #[test]
    fn omega_symmetric(a in 0.0f64..2.0, b in 0.0f64..2.0, c in 0.0f64..2.0) {
        let t = OmegaTable::embedded();
        let v = omega_abc(t, a, b, c);
        for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            prop_assert!((omega_abc(t, x, y, z) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn omega_splitting(a in 0.0f64..1.5, b in 0.0f64..1.5, c in 0.0f64..1.5, d in 0.0f64..1.0) {
        let t = OmegaTable::embedded();
        prop_assert!(omega_abc(t, a, b, c + d) <= omega_abc(t, a, b, c) + d + 1e-9);
    }

    #[test]
    fn approx_minplus_sandwich(seed in 0u64..1000, eps in 0.05f64..0.5) {
        use rand::Rng as _;
        let mut rng = rng_from_seed(seed);
        let m = |r: usize, c: usize, rng: &mut dyndist::Rng| {
            let data = (0..r * c).map(|_| if rng.gen_bool(0.1) { INF } else { rng.gen_range(1.0..100.0) }).collect();
            DistMatrix::from_vec(r, c, data).unwrap()
        };
        let a = m(6, 7, &mut rng);
        let b = m(7, 5, &mut rng);
        let exact = minplus_exact(&a, &b).unwrap();
        let approx = minplus_approx(&a, &b, eps).unwrap();
        for (x, y) in approx.data().iter().zip(exact.data()) {
            if y.is_infinite() {
                prop_assert!(x.is_infinite());
            } else {
                prop_assert!(*x >= y * (1.0 - 1e-9) && *x <= y * (1.0 + eps) * (1.0 + 1e-9));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn short_hop_never_underestimates(seed in 0u64..1000, n in 2usize..12) {
        use rand::Rng as _;
        let mut rng = rng_from_seed(seed);
        let mut g = DynGraph::new(n, true, 3.0);
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(0.3) {
                    g.set_weight(u, v, rng.gen_range(1..=3) as f64).unwrap();
                }
            }
        }
        let p = ShortHopParams { bound: 6, eps: 0.3, mu_cap: 3, nu_cap: 3 };
        let mut o = ShortHopOracle::new(&field(), &g, &p, rng_from_seed(seed + 1)).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let est = o.batch_query(&all, &all).unwrap();
        let truth = dijkstra_apsp(&g).0;
        for (e, d) in est.data().iter().zip(truth.data()) {
            prop_assert!(e >= d);
        }
    }

    #[test]
    fn metric_ignores_query_order(seed in 0u64..1000) {
        use rand::Rng as _;
        let mut rng = rng_from_seed(seed);
        let n = 20;
        let mut g = DynGraph::new(n, true, 1.0);
        for i in 0..n {
            g.set_weight(i, (i + 1) % n, 1.0).unwrap();
            let j = rng.gen_range(0..n);
            if j != i {
                g.set_weight(i, j, 1.0).unwrap();
            }
        }
        let mut src = ExactSource::new(&g);
        let plain = diameter_15(&mut MetricSnapshot::new(&mut src), 0.1, &mut rng_from_seed(7)).unwrap();
        // warm the memo in a scrambled order first
        let mut snap = MetricSnapshot::new(&mut src);
        let mut order: Vec<usize> = (0..n).collect();
        order.reverse();
        for chunk in order.chunks(3) {
            snap.pairs(chunk, &order).unwrap();
        }
        let warmed = diameter_15(&mut snap, 0.1, &mut rng_from_seed(7)).unwrap();
        prop_assert_eq!(plain, warmed);
    }
}
