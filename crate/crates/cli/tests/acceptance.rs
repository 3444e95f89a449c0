//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p dyndist-cli --test acceptance`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use dyndist::complexity::{headline_table, OmegaTable};
use dyndist::ff_poly::rng_from_seed;
use dyndist::graphenc::{encode, is_strongly_connected};
use dyndist::metrics::{closeness_all, diameter_15, diameter_1eps, eccentricities_35, radius_15, ExactSource, MetricSnapshot};
use dyndist::minplus::{minplus_approx, minplus_exact, minplus_power};
use dyndist::oracle::{dijkstra_apsp, dijkstra_from, hop_bounded_apsp, metrics_from, naive_poly_inverse};
use dyndist::polymatrix::series_inverse;
use dyndist::shorthop::{pow_cap, RealParams, RealShortHop, ShortHopOracle, ShortHopParams};
use dyndist::{
    ApspOracle, DistMatrix, DynGraph, ExactDiameter, ExactInverseDS, FieldConfig, FieldElement, OracleParams, PolyMatrix, Rng, SliceInverseDS,
    SsspOracle, TruncPoly, UndirectedOracle, WorstCaseWrapper,
};
use dyndist_cli::{run, Config, Mode};
use rand::seq::SliceRandom;
use rand::Rng as _;

const SLACK: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn field() -> FieldConfig {
    FieldConfig::mersenne61()
}

/// Random graph with integer (or real, when `real`) weights in [1, w].
fn random_graph(rng: &mut Rng, n: usize, directed: bool, density: f64, w: f64, real: bool) -> DynGraph {
    let mut g = DynGraph::new(n, directed, w);
    for u in 0..n {
        for v in 0..n {
            if u != v && (directed || u < v) && rng.gen_bool(density) {
                g.set_weight(u, v, weight(rng, w, real)).unwrap();
            }
        }
    }
    g
}

fn weight(rng: &mut Rng, w: f64, real: bool) -> f64 {
    if real {
        rng.gen_range(1.0..=w)
    } else {
        rng.gen_range(1..=w as u64) as f64
    }
}

/// Random graph made connected by a spanning cycle.
fn connected_graph(rng: &mut Rng, n: usize, directed: bool, density: f64, w: f64, real: bool) -> DynGraph {
    let mut g = random_graph(rng, n, directed, density, w, real);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    for i in 0..n {
        let (u, v) = (perm[i], perm[(i + 1) % n]);
        if u != v {
            g.set_weight(u, v, weight(rng, w, real)).unwrap();
        }
    }
    g
}

fn random_update(rng: &mut Rng, g: &DynGraph, w: f64, real: bool) -> (usize, usize, f64) {
    let n = g.n();
    let u = rng.gen_range(0..n);
    let mut v = rng.gen_range(0..n - 1);
    if v >= u {
        v += 1;
    }
    let nw = if rng.gen_bool(0.3) { f64::INFINITY } else { weight(rng, w, real) };
    (u, v, nw)
}

/// Counts entries outside dist ≤ est ≤ (1+ε)·scope, where `scope` is the
/// distance the upper bound refers to (∞ = no upper bound required).
fn sandwich_violations(est: &DistMatrix, dist: &DistMatrix, scope: &DistMatrix, eps: f64) -> usize {
    let mut bad = 0;
    for ((&e, &d), &s) in est.data().iter().zip(dist.data()).zip(scope.data()) {
        let lower = e >= d * (1.0 - SLACK);
        let upper = s.is_infinite() || e <= s * (1.0 + eps) * (1.0 + SLACK);
        if !(lower && upper) {
            bad += 1;
        }
    }
    bad
}

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn reduction_soundness() -> Outcome {
    let f = field();
    let mut rng = rng_from_seed(101);
    let mut fails = 0;
    let mut cells = 0usize;
    for _ in 0..100 {
        let n = rng.gen_range(2..=64);
        let h = rng.gen_range(2..=64);
        let density = rng.gen_range(0.02..0.2);
        let g = random_graph(&mut rng, n, true, density, 4.0, false);
        let (m, _) = encode(&f, &g, h, rng_from_seed(rng.gen())).unwrap();
        let inv = series_inverse(&f, &m).unwrap();
        let dist = dijkstra_apsp(&g).0;
        for d in 0..h {
            let s = inv.slice(d);
            for u in 0..n {
                for v in 0..n {
                    cells += 1;
                    if !s.get(u, v).is_zero() != (dist.get(u, v) <= d as f64) {
                        fails += 1;
                    }
                }
            }
        }
    }
    outcome(fails == 0, format!("{fails} mismatches over {cells} (u, v, d) cells in 100 graphs"))
}

fn rand_delta(f: &FieldConfig, h: usize, rng: &mut Rng) -> TruncPoly {
    let mut c = vec![FieldElement::ZERO; h];
    for x in c.iter_mut().skip(1) {
        if rng.gen_bool(0.5) {
            *x = f.sample(rng);
        }
    }
    TruncPoly::from_elems(c)
}

fn dynamic_inverse_exactness() -> Outcome {
    let f = field();
    let mut rng = rng_from_seed(102);
    let mut mismatches = 0;
    let mut checks = 0usize;
    let streams = 6;
    for _ in 0..streams {
        let n = rng.gen_range(2..=8);
        let h = rng.gen_range(2..=8);
        let mut s: Vec<usize> = (0..h).filter(|_| rng.gen_bool(0.5)).collect();
        if s.is_empty() {
            s.push(h - 1);
        }
        let (mu, nu) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let mut m = PolyMatrix::identity(n, h);
        let mut exact = ExactInverseDS::new(&f, &m, nu).unwrap();
        let mut plain = SliceInverseDS::new(&f, &m, s.clone(), mu, nu).unwrap();
        let mut wrapped = WorstCaseWrapper::new(&f, &m, s.clone(), mu, nu).unwrap();
        let idx = all(n);
        for _ in 0..200 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let d = rand_delta(&f, h, &mut rng);
            exact.update(i, j, &d).unwrap();
            plain.update(i, j, &d).unwrap();
            wrapped.update(i, j, &d).unwrap();
            let e = m.entry(i, j).add(&d, &f).unwrap();
            m.set_entry(i, j, &e).unwrap();
            if rng.gen_bool(0.05) {
                exact.reset();
            }
            if rng.gen_bool(0.05) {
                plain.reset();
            }
            let inv = naive_poly_inverse(&f, &m).unwrap();
            for r in 0..n {
                let row = exact.query_row(r).unwrap();
                let col = exact.query_col(r).unwrap();
                for c in 0..n {
                    checks += 2;
                    mismatches += usize::from(row[c] != inv.entry(r, c)) + usize::from(col[c] != inv.entry(c, r));
                }
            }
            for &k in &s {
                let a = plain.query(&idx, &idx, k).unwrap();
                let b = wrapped.query(&idx, &idx, k).unwrap();
                checks += 2;
                mismatches += usize::from(&a != inv.slice(k)) + usize::from(a != b);
            }
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches over {checks} comparisons in {streams} streams of 200 updates"))
}

/// Corpus shared by the sandwich criteria: (graph, eps, real weights).
fn sandwich_corpus(seed: u64, count: usize, directed: bool) -> Vec<(DynGraph, f64, bool)> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|i| {
            let real = i % 4 == 3;
            let eps = if i % 2 == 0 { 0.1 } else { 0.5 };
            let n = if real { rng.gen_range(8..=32) } else { rng.gen_range(8..=128) };
            let density = 3.0 / n as f64;
            let w = if real { 4.0 } else { 3.0 };
            (random_graph(&mut rng, n, directed, density, w, real), eps, real)
        })
        .collect()
}

fn short_hop_sandwich() -> Outcome {
    let f = field();
    let mut rng = rng_from_seed(103);
    let (mut bad, mut pairs) = (0, 0usize);
    let corpus = sandwich_corpus(203, 50, true);
    for (mut g, eps, real) in corpus {
        let n = g.n();
        let idx = all(n);
        let w = g.w_cap();
        if real {
            let hop = 3;
            let p = RealParams { hop, eps, mu_cap: pow_cap(n, 0.3), nu_cap: pow_cap(n, 0.5) };
            let mut o = RealShortHop::new(&f, &g, &p, &mut rng).unwrap();
            for _ in 0..20 {
                let (u, v, nw) = random_update(&mut rng, &g, w, true);
                g.set_weight(u, v, nw).unwrap();
                o.update(u, v, nw).unwrap();
                let est = o.batch_query(&idx, &idx).unwrap();
                bad += sandwich_violations(&est, &dijkstra_apsp(&g).0, &hop_bounded_apsp(&g, hop), eps);
                pairs += n * n;
            }
        } else {
            let p = ShortHopParams { bound: 3 * pow_cap(n, 0.34), eps, mu_cap: pow_cap(n, 0.3), nu_cap: pow_cap(n, 0.5) };
            let mut o = ShortHopOracle::new(&f, &g, &p, rng_from_seed(rng.gen())).unwrap();
            for _ in 0..20 {
                let (u, v, nw) = random_update(&mut rng, &g, w, false);
                g.set_weight(u, v, nw).unwrap();
                o.update(u, v, nw).unwrap();
                let est = o.batch_query(&idx, &idx).unwrap();
                let dist = dijkstra_apsp(&g).0;
                let scope = DistMatrix::from_vec(n, n, dist.data().iter().map(|&d| if d <= p.bound as f64 { d } else { f64::INFINITY }).collect()).unwrap();
                bad += sandwich_violations(&est, &dist, &scope, eps);
                pairs += n * n;
            }
        }
    }
    outcome(bad == 0, format!("{bad} violations over {pairs} pair checks (50 graphs x 20 updates)"))
}

fn full_sandwich() -> Outcome {
    let f = field();
    let mut rng = rng_from_seed(104);
    let (mut bad, mut checks) = (0, 0usize);
    let mut corpus = sandwich_corpus(204, 50, true);
    // long-path stressor: a directed n-cycle with unit weights
    let mut cycle = DynGraph::new(96, true, 3.0);
    for i in 0..96 {
        cycle.set_weight(i, (i + 1) % 96, 1.0).unwrap();
    }
    corpus.push((cycle, 0.1, false));
    for (mut g, eps, real) in corpus {
        let n = g.n();
        let idx = all(n);
        let w = g.w_cap();
        let p = OracleParams::new(0.34, 0.3, 0.5, eps);
        let mut apsp = ApspOracle::new(&f, &g, &p, rng.gen()).unwrap();
        let mut sssp = SsspOracle::new(&f, &g, 0, &p, rng.gen()).unwrap();
        for _ in 0..20 {
            let (u, v, nw) = random_update(&mut rng, &g, w, real);
            g.set_weight(u, v, nw).unwrap();
            apsp.update(u, v, nw).unwrap();
            let row = sssp.update(u, v, nw).unwrap().to_vec();
            let dist = dijkstra_apsp(&g).0;
            bad += sandwich_violations(&apsp.query(&idx, &idx).unwrap(), &dist, &dist, eps);
            let est = DistMatrix::from_vec(1, n, row).unwrap();
            let d0 = dist.select(&[0], &idx);
            bad += sandwich_violations(&est, &d0, &d0, eps);
            checks += n * n + n;
        }
    }
    // undirected integer graphs
    let mut und = 0;
    for i in 0..20 {
        let n = rng.gen_range(8..=96);
        let eps = if i % 2 == 0 { 0.1 } else { 0.5 };
        let mut g = random_graph(&mut rng, n, false, 3.0 / n as f64, 3.0, false);
        let mut o = UndirectedOracle::new(&f, &g, &OracleParams::new(0.34, 0.3, 0.5, eps), rng.gen()).unwrap();
        let idx = all(n);
        for _ in 0..10 {
            let (u, v, nw) = random_update(&mut rng, &g, 3.0, false);
            g.set_weight(u, v, nw).unwrap();
            o.update(u, v, nw).unwrap();
            let dist = dijkstra_apsp(&g).0;
            bad += sandwich_violations(&o.query(&idx, &idx).unwrap(), &dist, &dist, eps);
            checks += n * n;
        }
        und += 1;
    }
    // adaptive adversary: delete the last edge of a tight path to a random target
    let (n, eps) = (64, 0.1);
    let mut g = connected_graph(&mut rng, n, true, 0.05, 3.0, false);
    let mut o = SsspOracle::new(&f, &g, 0, &OracleParams::new(0.34, 0.3, 0.5, eps), rng.gen()).unwrap();
    let mut removed: Vec<(usize, usize, f64)> = Vec::new();
    for round in 0..200 {
        let row = o.row().to_vec();
        let (u, v, nw) = if round % 3 == 2 && !removed.is_empty() {
            removed.remove(0)
        } else {
            let t = rng.gen_range(1..n);
            let tight = g.in_edges(t).filter(|&(x, _)| row[x].is_finite()).min_by(|a, b| (row[a.0] + a.1).total_cmp(&(row[b.0] + b.1)));
            match tight {
                Some((x, wx)) => {
                    removed.push((x, t, wx));
                    (x, t, f64::INFINITY)
                }
                None => random_update(&mut rng, &g, 3.0, false),
            }
        };
        g.set_weight(u, v, nw).unwrap();
        let est = DistMatrix::from_vec(1, n, o.update(u, v, nw).unwrap().to_vec()).unwrap();
        let d0 = DistMatrix::from_vec(1, n, dijkstra_from(&g, 0, false).0).unwrap();
        bad += sandwich_violations(&est, &d0, &d0, eps);
        checks += n;
    }
    outcome(bad == 0, format!("{bad} violations over {checks} checks (51 directed incl. 96-cycle, {und} undirected, 200 adversarial sssp rounds)"))
}

fn metric_bounds() -> Outcome {
    let f = field();
    let mut rng = rng_from_seed(105);
    let eps = 0.1;
    let (mut bad, mut trials) = (0, 0);
    for i in 0..100 {
        let n = rng.gen_range(8..=128);
        let g = connected_graph(&mut rng, n, false, 2.0 / n as f64, 1.0, false);
        let t = metrics_from(&dijkstra_apsp(&g).0);
        let p = OracleParams::new(0.34, 0.3, 0.5, eps / 2.0);
        let mut src = UndirectedOracle::new(&f, &g, &p, rng.gen()).unwrap();
        let mut snap = MetricSnapshot::new(&mut src);
        let d = diameter_15(&mut snap, eps, &mut rng).unwrap().value;
        let r = radius_15(&mut snap, eps, &mut rng).unwrap().value;
        let ecc = eccentricities_35(&mut snap, eps, &mut rng).unwrap();
        let mut ok = d >= (2.0 / 3.0 - eps) * t.diameter - 1.0 / 3.0 - SLACK && d <= (1.0 + eps) * t.diameter + SLACK;
        ok &= r >= t.radius / (1.0 + eps) - SLACK && r <= ((1.5 + eps) * t.radius + 2.0 / 3.0) * (1.0 + eps) + SLACK;
        for (&e, &x) in ecc.iter().zip(&t.ecc) {
            ok &= e >= (3.0 - 6.0 * eps) / 5.0 * x - 4.0 / 7.0 - SLACK && e <= (1.0 + 2.0 * eps) * x + SLACK;
        }
        // (1+ε) diameter through a hop-bounded source on a directed graph
        if i % 4 == 0 {
            let gd = connected_graph(&mut rng, n.min(64), true, 1.5 / n.min(64) as f64, 2.0, false);
            let truth = metrics_from(&dijkstra_apsp(&gd).0).diameter;
            let sp = ShortHopParams { bound: 2 * pow_cap(gd.n(), 0.5), eps: eps / 2.0, mu_cap: 4, nu_cap: 8 };
            let mut sh = ShortHopOracle::new(&f, &gd, &sp, rng_from_seed(rng.gen())).unwrap();
            let est = diameter_1eps(&mut MetricSnapshot::new(&mut sh), eps, &mut rng).unwrap();
            ok &= est >= truth - SLACK && est <= (1.0 + eps) * truth + SLACK;
        }
        bad += usize::from(!ok);
        trials += 1;
    }
    outcome(bad == 0, format!("{bad} of {trials} graphs violate a diameter/radius/eccentricity bound"))
}

fn exact_diameter() -> Outcome {
    let f = field();
    let mut rng = rng_from_seed(106);
    let mut bad = 0;
    for _ in 0..100 {
        let n = rng.gen_range(4..=64);
        let density = rng.gen_range(0.0..3.0) / n as f64;
        let g = connected_graph(&mut rng, n, true, density, 4.0, false);
        assert!(is_strongly_connected(&g));
        let truth = metrics_from(&dijkstra_apsp(&g).0).diameter;
        let mut o = ExactDiameter::new(&f, &g, 0.34, 0.3, rng_from_seed(rng.gen())).unwrap();
        bad += usize::from(o.diameter(&mut rng).unwrap() != truth);
    }
    outcome(bad == 0, format!("{bad} of 100 digraphs differ from brute force"))
}

fn closeness() -> Outcome {
    let mut rng = rng_from_seed(107);
    let (n, eps) = (1000, 0.2);
    let g = connected_graph(&mut rng, n, false, 3.0 / n as f64, 1.0, false);
    let exact = metrics_from(&dijkstra_apsp(&g).0).closeness;
    let mut src = ExactSource::new(&g);
    let mut good = 0;
    for _ in 0..20 {
        let est = closeness_all(&mut MetricSnapshot::new(&mut src), eps, &mut rng).unwrap();
        good += usize::from(est.iter().zip(&exact).all(|(&e, &x)| e >= (1.0 - eps) * x && e <= (1.0 + eps) * x));
    }
    outcome(good >= 19, format!("{good} of 20 trials within (1 +/- eps) at every node"))
}

fn minplus() -> Outcome {
    let mut rng = rng_from_seed(108);
    let mut bad = 0;
    let mut worst: f64 = 1.0;
    for &eps in &[0.05, 0.3] {
        for _ in 0..50 {
            let mut m = || DistMatrix::from_vec(16, 16, (0..256).map(|_| rng.gen_range(1.0..=100.0)).collect()).unwrap();
            let (a, b, c) = (m(), m(), m());
            let approx = minplus_approx(&a, &b, eps).unwrap();
            let exact = minplus_exact(&a, &b).unwrap();
            // closure by repeated exact squaring
            let mut closure = c.min_with(&DistMatrix::identity(16)).unwrap();
            for _ in 0..4 {
                closure = minplus_exact(&closure, &closure).unwrap();
            }
            let power = minplus_power(&c, eps).unwrap();
            for (x, y) in approx.data().iter().zip(exact.data()).chain(power.data().iter().zip(closure.data())) {
                let r = if *y == 0.0 { 1.0 + f64::from(u8::from(*x != 0.0)) * 10.0 } else { x / y };
                worst = worst.max(r);
                bad += usize::from(r < 1.0 - SLACK || r > 1.0 + eps + SLACK);
            }
        }
    }
    outcome(bad == 0, format!("{bad} entries outside [1, 1+eps]; worst ratio {worst:.4}"))
}

fn exponents() -> Outcome {
    let start = Instant::now();
    let rows = headline_table(OmegaTable::embedded());
    let secs = start.elapsed().as_secs_f64();
    let off: Vec<String> = rows.iter().filter(|h| !h.within(0.005)).map(|h| format!("{} {:.4} vs {}", h.name, h.value, h.target)).collect();
    let worst = rows.iter().map(|h| (h.value - h.target).abs()).fold(0.0, f64::max);
    outcome(off.is_empty() && secs < 10.0, format!("{} of {} targets within 0.005 (worst {worst:.4}) in {secs:.2}s {}", rows.len() - off.len(), rows.len(), off.join("; ")))
}

fn smoothing() -> Outcome {
    let f = field();
    let mut rng = rng_from_seed(110);
    let (n, h, mu_cap, nu_cap) = (48, 8, 16, 64);
    let s = vec![2, 4, 7];
    let m = PolyMatrix::identity(n, h);
    let mut wrapped = WorstCaseWrapper::new(&f, &m, s.clone(), mu_cap, nu_cap).unwrap();
    let mut plain = SliceInverseDS::new(&f, &m, s, mu_cap, nu_cap).unwrap();
    let mut plain_log = Vec::new();
    for _ in 0..4 * mu_cap {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let d = rand_delta(&f, h, &mut rng);
        wrapped.update(i, j, &d).unwrap();
        let o = plain.ops();
        plain.update(i, j, &d).unwrap();
        plain_log.push(plain.ops() - o);
    }
    let ratio = |log: &[u64]| {
        let mut v = log.to_vec();
        v.sort_unstable();
        *v.last().unwrap() as f64 / v[v.len() / 2].max(1) as f64
    };
    let (rw, rp) = (ratio(wrapped.op_log()), ratio(&plain_log));
    outcome(rw <= 5.0 && rp >= 20.0, format!("wrapped max/median {rw:.2} (need <= 5), unwrapped {rp:.1} (need >= 20) over {} updates", 4 * mu_cap))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn determinism() -> Outcome {
    let digests = |threads: Option<usize>| {
        let mut c = Config::new(Mode::Apsp);
        c.graph = Some(data("corpus64.graph"));
        c.stream = Some(data("corpus64.stream"));
        c.seed = 7;
        c.threads = threads;
        run(&c).unwrap().rows.into_iter().map(|r| r.digest).collect::<Vec<_>>()
    };
    let a = digests(None);
    let b = digests(None);
    let c = digests(Some(1));
    let d = digests(Some(4));
    outcome(!a.is_empty() && a == b && a == c && a == d, format!("{} answer digests compared across 2 runs and 1/4 threads", a.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("reduction soundness and completeness", reduction_soundness),
        ("dynamic inverse exactness", dynamic_inverse_exactness),
        ("short-hop sandwich", short_hop_sandwich),
        ("apsp / sssp / undirected sandwich", full_sandwich),
        ("diameter / radius / eccentricity bounds", metric_bounds),
        ("exact diameter", exact_diameter),
        ("closeness", closeness),
        ("min-plus approximation", minplus),
        ("exponent reproduction", exponents),
        ("worst-case smoothing", smoothing),
        ("cli determinism", determinism),
    ];
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if filter.as_ref().is_some_and(|f| !name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("[{verdict}] {:>2}. {name}: {} ({:.1}s)", i + 1, o.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
