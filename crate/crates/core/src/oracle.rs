//! Brute-force references. Each uses a different loop structure from the
//! production path it checks.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::Result;
use crate::ff_poly::FieldConfig;
use crate::graphenc::{DynGraph, INF};
use crate::minplus::DistMatrix;
use crate::polymatrix::{polymat_mul, PolyMatrix};

/// Hop-count distances, ignoring weights.
pub fn bfs_apsp(g: &DynGraph) -> DistMatrix {
    let n = g.n();
    let mut d = DistMatrix::inf(n, n);
    for s in 0..n {
        d.set(s, s, 0.0);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let du = d.get(s, u);
            for (v, _) in g.out_edges(u) {
                if d.get(s, v) == INF {
                    d.set(s, v, du + 1.0);
                    q.push_back(v);
                }
            }
        }
    }
    d
}

#[derive(PartialEq)]
struct Item(f64, usize, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        // min-heap on (distance, hops, node)
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1)).then(o.2.cmp(&self.2))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Single-source Dijkstra returning (distance, fewest hops among shortest paths).
pub fn dijkstra_from(g: &DynGraph, s: usize, reverse: bool) -> (Vec<f64>, Vec<usize>) {
    let n = g.n();
    let mut dist = vec![INF; n];
    let mut hops = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    hops[s] = 0;
    heap.push(Item(0.0, 0, s));
    while let Some(Item(d, k, u)) = heap.pop() {
        if (d, k) != (dist[u], hops[u]) {
            continue;
        }
        let edges: Vec<(usize, f64)> = if reverse { g.in_edges(u).collect() } else { g.out_edges(u).collect() };
        for (v, w) in edges {
            let nd = d + w;
            if nd < dist[v] || (nd == dist[v] && k + 1 < hops[v]) {
                dist[v] = nd;
                hops[v] = k + 1;
                heap.push(Item(nd, k + 1, v));
            }
        }
    }
    (dist, hops)
}

/// Weighted distances plus, per pair, the fewest hops of any shortest path.
pub fn dijkstra_apsp(g: &DynGraph) -> (DistMatrix, Vec<Vec<usize>>) {
    let n = g.n();
    let mut d = DistMatrix::inf(n, n);
    let mut hops = Vec::with_capacity(n);
    for s in 0..n {
        let (ds, hs) = dijkstra_from(g, s, false);
        for (v, x) in ds.into_iter().enumerate() {
            d.set(s, v, x);
        }
        hops.push(hs);
    }
    (d, hops)
}

/// Shortest paths using at most `k` edges (Bellman–Ford rounds).
pub fn hop_bounded_apsp(g: &DynGraph, k: usize) -> DistMatrix {
    let n = g.n();
    let mut d = DistMatrix::identity(n);
    let arcs = g.arcs();
    for _ in 0..k {
        let prev = d.clone();
        for s in 0..n {
            for &(u, v, w) in &arcs {
                let cand = prev.get(s, u) + w;
                if cand < d.get(s, v) {
                    d.set(s, v, cand);
                }
            }
        }
    }
    d
}

pub fn floyd_warshall(g: &DynGraph) -> DistMatrix {
    let n = g.n();
    let mut d = DistMatrix::identity(n);
    for (u, v, w) in g.arcs() {
        if w < d.get(u, v) {
            d.set(u, v, w);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d.get(i, k);
            if dik == INF {
                continue;
            }
            for j in 0..n {
                let c = dik + d.get(k, j);
                if c < d.get(i, j) {
                    d.set(i, j, c);
                }
            }
        }
    }
    d
}

/// Σ_{i<h} N^i with N = I − M, by repeated multiplication.
pub fn naive_poly_inverse(f: &FieldConfig, m: &PolyMatrix) -> Result<PolyMatrix> {
    if !m.has_identity_constant() {
        return Err(crate::Error::BadForm);
    }
    let (n, h) = (m.rows(), m.h());
    let nmat = PolyMatrix::identity(n, h).sub(m, f)?;
    let mut power = PolyMatrix::identity(n, h);
    let mut sum = PolyMatrix::identity(n, h);
    for _ in 1..h {
        power = polymat_mul(f, &power, &nmat)?;
        sum = sum.add(&power, f)?;
    }
    Ok(sum)
}

/// Exact metrics derived from all-pairs distances.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMetrics {
    pub diameter: f64,
    pub radius: f64,
    /// Out-eccentricity max_v d(u, v).
    pub ecc: Vec<f64>,
    /// (n−1) / Σ_v d(v, s); 0 when some node cannot reach s.
    pub closeness: Vec<f64>,
}

pub fn exact_metrics(g: &DynGraph) -> ExactMetrics {
    metrics_from(&floyd_warshall(g))
}

pub fn metrics_from(d: &DistMatrix) -> ExactMetrics {
    let n = d.rows();
    let ecc: Vec<f64> = (0..n).map(|u| d.row(u).iter().fold(0.0, |a: f64, &b| a.max(b))).collect();
    let diameter = ecc.iter().fold(0.0, |a: f64, &b| a.max(b));
    let radius = if n == 0 { 0.0 } else { ecc.iter().fold(INF, |a: f64, &b| a.min(b)) };
    let closeness = (0..n)
        .map(|s| {
            let total: f64 = (0..n).map(|v| d.get(v, s)).sum();
            if n <= 1 || total.is_infinite() || total == 0.0 {
                0.0
            } else {
                (n - 1) as f64 / total
            }
        })
        .collect();
    ExactMetrics { diameter, radius, ecc, closeness }
}
