//! Graph metrics computed over a distance oracle: nearly 1.5-approximate
//! diameter and radius, eccentricities, (1+ε) diameter by hub sampling,
//! exact diameter and closeness centrality.
//!
//! Every routine reads distances through a [`MetricSnapshot`], which memoizes
//! answers so that a repeated pair within one computation is never re-asked.

use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::ff_poly::{FieldConfig, Rng};
use crate::graphenc::{is_strongly_connected, sample_hitting_set, DynGraph, INF};
use crate::longrange::{ApspOracle, UndirectedOracle};
use crate::minplus::{minplus_power, DistMatrix};
use crate::oracle::dijkstra_from;
use crate::shorthop::{pow_cap, ShortHopOracle};

/// Anything that answers batch distance queries on a known graph.
pub trait DistanceSource {
    fn graph(&self) -> &DynGraph;

    /// Approximation factor: answers lie in [dist, (1+eps)·dist].
    fn eps(&self) -> f64;

    /// Largest distance the source reports; larger ones come back as ∞.
    fn bound(&self) -> f64 {
        INF
    }

    fn query(&mut self, ri: &[usize], ci: &[usize]) -> Result<DistMatrix>;
}

/// Exact distances by Dijkstra on the current graph.
#[derive(Clone, Debug)]
pub struct ExactSource {
    graph: DynGraph,
}

impl ExactSource {
    pub fn new(g: &DynGraph) -> Self {
        ExactSource { graph: g.clone() }
    }
}

impl DistanceSource for ExactSource {
    fn graph(&self) -> &DynGraph {
        &self.graph
    }

    fn eps(&self) -> f64 {
        0.0
    }

    fn query(&mut self, ri: &[usize], ci: &[usize]) -> Result<DistMatrix> {
        let n = self.graph.n();
        for &x in ri.iter().chain(ci) {
            if x >= n {
                return Err(Error::IndexOutOfRange { index: x, len: n });
            }
        }
        let mut out = DistMatrix::inf(ri.len(), ci.len());
        for (a, &i) in ri.iter().enumerate() {
            let (d, _) = dijkstra_from(&self.graph, i, false);
            for (b, &j) in ci.iter().enumerate() {
                out.set(a, b, d[j]);
            }
        }
        Ok(out)
    }
}

impl DistanceSource for ShortHopOracle {
    fn graph(&self) -> &DynGraph {
        ShortHopOracle::graph(self)
    }

    fn eps(&self) -> f64 {
        ShortHopOracle::eps(self)
    }

    fn bound(&self) -> f64 {
        ShortHopOracle::bound(self) as f64
    }

    fn query(&mut self, ri: &[usize], ci: &[usize]) -> Result<DistMatrix> {
        self.batch_query(ri, ci)
    }
}

impl DistanceSource for ApspOracle {
    fn graph(&self) -> &DynGraph {
        ApspOracle::graph(self)
    }

    fn eps(&self) -> f64 {
        ApspOracle::eps(self)
    }

    fn query(&mut self, ri: &[usize], ci: &[usize]) -> Result<DistMatrix> {
        ApspOracle::query(self, ri, ci)
    }
}

impl DistanceSource for UndirectedOracle {
    fn graph(&self) -> &DynGraph {
        UndirectedOracle::graph(self)
    }

    fn eps(&self) -> f64 {
        UndirectedOracle::eps(self)
    }

    fn query(&mut self, ri: &[usize], ci: &[usize]) -> Result<DistMatrix> {
        UndirectedOracle::query(self, ri, ci)
    }
}

/// A source frozen for one metric computation, with a dense memo.
pub struct MetricSnapshot<'a> {
    src: &'a mut dyn DistanceSource,
    n: usize,
    memo: Vec<f64>,
    asked: usize,
}

impl<'a> MetricSnapshot<'a> {
    pub fn new(src: &'a mut dyn DistanceSource) -> Self {
        let n = src.graph().n();
        MetricSnapshot { src, n, memo: vec![f64::NAN; n * n], asked: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn graph(&self) -> &DynGraph {
        self.src.graph()
    }

    pub fn eps(&self) -> f64 {
        self.src.eps()
    }

    pub fn bound(&self) -> f64 {
        self.src.bound()
    }

    /// Number of pairs actually sent to the source.
    pub fn pairs_asked(&self) -> usize {
        self.asked
    }

    /// d̃(i, j) for I×J; only rows with a missing entry reach the source,
    /// and entries already seen keep their first answer.
    pub fn pairs(&mut self, ri: &[usize], ci: &[usize]) -> Result<DistMatrix> {
        let n = self.n;
        for &x in ri.iter().chain(ci) {
            if x >= n {
                return Err(Error::IndexOutOfRange { index: x, len: n });
            }
        }
        let missing: Vec<usize> = ri.iter().copied().filter(|&i| ci.iter().any(|&j| self.memo[i * n + j].is_nan())).collect();
        if !missing.is_empty() {
            let mut rows = missing.clone();
            rows.sort_unstable();
            rows.dedup();
            let mut cols = ci.to_vec();
            cols.sort_unstable();
            cols.dedup();
            let got = self.src.query(&rows, &cols)?;
            self.asked += rows.len() * cols.len();
            for (a, &i) in rows.iter().enumerate() {
                for (b, &j) in cols.iter().enumerate() {
                    let slot = &mut self.memo[i * n + j];
                    if slot.is_nan() {
                        *slot = got.get(a, b);
                    }
                }
            }
        }
        let mut out = DistMatrix::inf(ri.len(), ci.len());
        for (a, &i) in ri.iter().enumerate() {
            for (b, &j) in ci.iter().enumerate() {
                out.set(a, b, self.memo[i * n + j]);
            }
        }
        Ok(out)
    }

    /// d̃(i, ·) for each i.
    pub fn rows(&mut self, ri: &[usize]) -> Result<DistMatrix> {
        let all: Vec<usize> = (0..self.n).collect();
        self.pairs(ri, &all)
    }

    /// d̃(·, j) for each j, as a |J|×n matrix.
    pub fn cols(&mut self, ci: &[usize]) -> Result<DistMatrix> {
        let all: Vec<usize> = (0..self.n).collect();
        Ok(self.pairs(&all, ci)?.transpose())
    }
}

/// Which branch produced an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMode {
    /// Sampled sources and sinks, all distances within the tracked bound.
    FewHops,
    /// Hub graph after some distance exceeded the tracked bound.
    HubSampling,
    Disconnected,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiameterEstimate {
    pub value: f64,
    pub mode: EstimateMode,
}

fn sample_sorted(n: usize, k: usize, rng: &mut Rng) -> Vec<usize> {
    let mut v = sample(rng, n, k.min(n)).into_vec();
    v.sort_unstable();
    v
}

// sources and sinks probed by the 1.5 scheme: S, the far node w and its ⌈√n⌉ nearest
struct Probe {
    sources: Vec<usize>,
    out: DistMatrix,
    inn: DistMatrix,
}

fn probe(snap: &mut MetricSnapshot, rng: &mut Rng) -> Result<Probe> {
    let n = snap.n();
    let nf = n as f64;
    let k = ((3.0 * nf.sqrt() * nf.ln()).ceil() as usize).clamp(1, n);
    let s = sample_sorted(n, k, rng);
    let to_s = snap.cols(&s)?;
    // w maximizes min_{s∈S} d̃(w, s); the smallest index wins ties
    let mut w = 0;
    let mut best = -1.0;
    for u in 0..n {
        let m = (0..s.len()).map(|a| to_s.get(a, u)).fold(INF, f64::min);
        if m > best {
            best = m;
            w = u;
        }
    }
    let from_w = snap.rows(&[w])?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| from_w.get(0, a).total_cmp(&from_w.get(0, b)).then(a.cmp(&b)));
    order.truncate(pow_cap(n, 0.5).min(n));
    let mut sources = s;
    sources.push(w);
    sources.extend(order);
    sources.sort_unstable();
    sources.dedup();
    let out = snap.rows(&sources)?;
    let inn = if snap.graph().directed() { snap.cols(&sources)? } else { out.clone() };
    Ok(Probe { sources, out, inn })
}

fn split_for_sampling(eps: f64, eps_q: f64) -> Result<(f64, f64)> {
    let rem = (1.0 + eps) / (1.0 + eps_q) - 1.0;
    if !(rem > 0.0) {
        return Err(Error::InvalidParameter(format!("source accuracy {eps_q} leaves no room inside {eps}")));
    }
    Ok((rem / 3.0, rem / 3.0))
}

/// Diameter (or radius) of the hub graph G_H plus the sampling slack.
/// `wd` is the largest edge cost kept in G_H; the caller knows the metric
/// is at least `wd`.
fn hub_extreme(snap: &mut MetricSnapshot, wd: f64, eps: f64, rng: &mut Rng, radius: bool) -> Result<f64> {
    let n = snap.n();
    let (eps_s, eps_c) = split_for_sampling(eps, snap.eps())?;
    let w = snap.graph().w_cap().max(1.0);
    let d = (wd / w).floor().max(1.0);
    let nf = n as f64;
    let k = (3.0 * 2.0 * nf / (d * eps_s * eps_s) * nf.ln()).ceil();
    let k = if k >= nf { n } else { (k as usize).max(1) };
    let hubs = sample_sorted(n, k, rng);
    let mut g_h = snap.pairs(&hubs, &hubs)?;
    for a in 0..hubs.len() {
        for b in 0..hubs.len() {
            if a == b {
                g_h.set(a, b, 0.0);
            } else if g_h.get(a, b) > wd {
                g_h.set(a, b, INF);
            }
        }
    }
    let clo = minplus_power(&g_h, eps_c)?;
    let ecc: Vec<f64> = (0..hubs.len()).map(|a| clo.row(a).iter().copied().fold(0.0, f64::max)).collect();
    Ok(if radius {
        ecc.iter().copied().fold(INF, f64::min) + 0.5 * wd * eps_s
    } else {
        ecc.iter().copied().fold(0.0, f64::max) + wd * eps_s
    })
}

/// (2/3−ε)·diam − 1/3 ≤ D̃ ≤ (1+ε)·diam w.h.p., for unweighted graphs and a
/// source at most ε-approximate. Falls back to [`diameter_1eps`] when some
/// probed distance exceeds the source's bound.
pub fn diameter_15(snap: &mut MetricSnapshot, eps: f64, rng: &mut Rng) -> Result<DiameterEstimate> {
    if snap.n() <= 1 {
        return Ok(DiameterEstimate { value: 0.0, mode: EstimateMode::FewHops });
    }
    if !is_strongly_connected(snap.graph()) {
        return Ok(DiameterEstimate { value: INF, mode: EstimateMode::Disconnected });
    }
    let p = probe(snap, rng)?;
    let top = p.out.data().iter().chain(p.inn.data()).copied().fold(0.0, f64::max);
    if top.is_finite() {
        return Ok(DiameterEstimate { value: top, mode: EstimateMode::FewHops });
    }
    let value = hub_extreme(snap, snap.bound(), eps, rng, false)?;
    Ok(DiameterEstimate { value, mode: EstimateMode::HubSampling })
}

/// R/(1+ε) ≤ R̃ ≤ ((1.5+ε)R + 2/3)(1+ε) w.h.p. on undirected graphs. A
/// bounded source should track twice the radius of interest: past its bound
/// the radius exceeds half of it and hub sampling takes over.
pub fn radius_15(snap: &mut MetricSnapshot, eps: f64, rng: &mut Rng) -> Result<DiameterEstimate> {
    if snap.graph().directed() {
        return Err(Error::DirectedInput);
    }
    if snap.n() <= 1 {
        return Ok(DiameterEstimate { value: 0.0, mode: EstimateMode::FewHops });
    }
    if !is_strongly_connected(snap.graph()) {
        return Ok(DiameterEstimate { value: INF, mode: EstimateMode::Disconnected });
    }
    let p = probe(snap, rng)?;
    if p.out.data().iter().all(|x| x.is_finite()) {
        let value = (0..p.sources.len()).map(|a| p.out.row(a).iter().copied().fold(0.0, f64::max)).fold(INF, f64::min);
        return Ok(DiameterEstimate { value, mode: EstimateMode::FewHops });
    }
    let value = hub_extreme(snap, 0.5 * snap.bound(), eps, rng, true)?;
    Ok(DiameterEstimate { value, mode: EstimateMode::HubSampling })
}

/// Per-node estimates with (3−6ε)/5·ecc − 4/7 ≤ ẽcc ≤ (1+2ε)·ecc w.h.p., on
/// connected undirected graphs with an unbounded source.
pub fn eccentricities_35(snap: &mut MetricSnapshot, _eps: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    if snap.graph().directed() {
        return Err(Error::DirectedInput);
    }
    let n = snap.n();
    if n <= 1 {
        return Ok(vec![0.0; n]);
    }
    if !is_strongly_connected(snap.graph()) {
        return Ok(vec![INF; n]);
    }
    let p = probe(snap, rng)?;
    if p.out.data().iter().any(|x| x.is_infinite()) {
        return Err(Error::InvalidParameter("eccentricities need distances beyond the source bound".into()));
    }
    let cap = p.out.max_finite();
    let ecc_s: Vec<f64> = (0..p.sources.len()).map(|a| p.out.row(a).iter().copied().fold(0.0, f64::max)).collect();
    let mut est = vec![0.0; n];
    for (v, e) in est.iter_mut().enumerate() {
        *e = match p.sources.binary_search(&v) {
            Ok(a) => ecc_s[a],
            Err(_) => (0..p.sources.len())
                .map(|a| {
                    let d = p.out.get(a, v);
                    d.max(ecc_s[a] - d)
                })
                .fold(0.0, f64::max),
        }
        .min(cap);
    }
    Ok(est)
}

/// (1+ε)-approximate diameter. Unbounded sources are read in full; bounded
/// ones go through the hub graph, which assumes diam ≥ bound.
pub fn diameter_1eps(snap: &mut MetricSnapshot, eps: f64, rng: &mut Rng) -> Result<f64> {
    if snap.n() <= 1 {
        return Ok(0.0);
    }
    if !is_strongly_connected(snap.graph()) {
        return Err(Error::NotConnected);
    }
    if snap.bound().is_infinite() {
        let all: Vec<usize> = (0..snap.n()).collect();
        return Ok(snap.pairs(&all, &all)?.data().iter().copied().fold(0.0, f64::max));
    }
    hub_extreme(snap, snap.bound(), eps, rng, false)
}

/// Closeness c(s) = (n−1)/Σ_v dist(v, s) estimated from k sampled rows,
/// k = min(n, ⌈c₀·n^{2/3}/ε²·ln n⌉); 0 everywhere when disconnected.
pub fn closeness_all(snap: &mut MetricSnapshot, eps: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    if snap.graph().directed() {
        return Err(Error::DirectedInput);
    }
    let n = snap.n();
    if n <= 1 || !is_strongly_connected(snap.graph()) {
        return Ok(vec![0.0; n]);
    }
    let k = closeness_sample_size(n, eps, 4.0);
    let picks = sample_sorted(n, k, rng);
    let rows = snap.rows(&picks)?;
    let scale = n as f64 / (k as f64 * (n - 1) as f64);
    Ok((0..n)
        .map(|s| {
            let sum: f64 = (0..k).map(|i| rows.get(i, s)).sum();
            if sum > 0.0 {
                1.0 / (sum * scale)
            } else {
                0.0
            }
        })
        .collect())
}

pub fn closeness_sample_size(n: usize, eps: f64, c0: f64) -> usize {
    let nf = n.max(2) as f64;
    let k = (c0 * nf.powf(2.0 / 3.0) / (eps * eps) * nf.ln()).ceil();
    if k >= n as f64 {
        n
    } else {
        (k as usize).max(1)
    }
}

/// Dynamic exact diameter for integer weights: exact tracking of every
/// value up to W·⌈n^s⌉, with hub Dijkstra trees for the pairs beyond it.
#[derive(Clone, Debug)]
pub struct ExactDiameter {
    oracle: ShortHopOracle,
    hop: usize,
    c: f64,
}

impl ExactDiameter {
    pub fn new(f: &FieldConfig, g: &DynGraph, s: f64, mu: f64, rng: Rng) -> Result<Self> {
        let n = g.n();
        let hop = pow_cap(n, s);
        let bound = (g.w_cap().max(1.0) as usize) * hop;
        let cap = pow_cap(n, mu);
        Ok(ExactDiameter { oracle: ShortHopOracle::exact(f, g, bound, cap, cap, rng)?, hop, c: 3.0 })
    }

    pub fn graph(&self) -> &DynGraph {
        self.oracle.graph()
    }

    pub fn bound(&self) -> usize {
        self.oracle.bound()
    }

    pub fn ops(&self) -> u64 {
        self.oracle.ops()
    }

    pub fn update(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        self.oracle.update(u, v, w)
    }

    /// Exact diameter w.h.p., ∞ when not strongly connected.
    pub fn diameter(&mut self, rng: &mut Rng) -> Result<f64> {
        let n = self.oracle.n();
        if n <= 1 {
            return Ok(0.0);
        }
        let all: Vec<usize> = (0..n).collect();
        let bound = self.oracle.bound();
        let top = self.oracle.slice(&all, &all, bound)?;
        let far: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| i != j && top.get(i, j).is_zero()).collect();
        if far.is_empty() {
            // smallest d with every pair within d
            let (mut lo, mut hi) = (1, bound);
            while lo < hi {
                let mid = (lo + hi) / 2;
                let sl = self.oracle.slice(&all, &all, mid)?;
                let covered = (0..n).all(|i| (0..n).all(|j| i == j || !sl.get(i, j).is_zero()));
                if covered {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            return Ok(lo as f64);
        }
        let g = self.oracle.graph();
        if !is_strongly_connected(g) {
            return Ok(INF);
        }
        // far pairs need more than `hop` edges, so some hub lies on each path
        let hubs = sample_hitting_set(n, self.hop, self.c, rng).nodes;
        let from: Vec<Vec<f64>> = hubs.iter().map(|&x| dijkstra_from(g, x, false).0).collect();
        let to: Vec<Vec<f64>> = hubs.iter().map(|&x| dijkstra_from(g, x, true).0).collect();
        let mut best: f64 = 0.0;
        for &(u, v) in &far {
            let d = (0..hubs.len()).map(|k| to[k][u] + from[k][v]).fold(INF, f64::min);
            best = best.max(d);
        }
        Ok(best)
    }
}
