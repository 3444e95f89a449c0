//! Long-range composition on top of the short-hop oracles: batch-query APSP,
//! SSSP through an overlay graph, and the undirected hub oracle.
//!
//! Paths with many hops are split at hubs from a random hitting set that is
//! resampled after every update, so the reported answers reveal nothing about
//! the next sample.

use std::collections::BinaryHeap;

use rand::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::ff_poly::{FieldConfig, Rng};
use crate::graphenc::{hitting_set_size, sample_hitting_set, DynGraph, INF};
use crate::minplus::{minplus_approx, minplus_power, DistMatrix};
use crate::shorthop::{pow_cap, RealParams, ShortHop, ShortHopOracle, ShortHopParams};

/// Exponents and accuracy shared by the long-range oracles.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleParams {
    /// Hop bound ⌈n^s⌉ of the short-hop layer.
    pub s: f64,
    /// Reset period ⌈n^μ⌉ of the slice structure.
    pub mu: f64,
    /// Reset period ⌈n^ν⌉ of the exact structure.
    pub nu: f64,
    pub eps: f64,
    /// Hitting-set confidence constant.
    pub c: f64,
}

impl OracleParams {
    pub fn new(s: f64, mu: f64, nu: f64, eps: f64) -> Self {
        OracleParams { s, mu, nu, eps, c: 3.0 }
    }

    fn check(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon {} must be positive", self.eps)));
        }
        for (name, x) in [("s", self.s), ("mu", self.mu), ("nu", self.nu)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidParameter(format!("{name} = {x} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Short-hop layer for a graph: integer oracle with value bound W·hop for
/// integer weights, the rounding bank otherwise.
pub fn build_short_hop(f: &FieldConfig, g: &DynGraph, hop: usize, eps: f64, p: &OracleParams, rng: &mut Rng) -> Result<ShortHop> {
    let n = g.n();
    let (mu_cap, nu_cap) = (pow_cap(n, p.mu), pow_cap(n, p.nu));
    if g.is_integer() && g.w_cap().fract() == 0.0 {
        let bound = (g.w_cap() as usize).max(1) * hop;
        let sp = ShortHopParams { bound, eps, mu_cap, nu_cap };
        Ok(ShortHop::Int(ShortHopOracle::new(f, g, &sp, Rng::seed_from_u64(rng.next_u64()))?))
    } else {
        let rp = RealParams { hop, eps, mu_cap, nu_cap };
        Ok(ShortHop::Real(crate::shorthop::RealShortHop::new(f, g, &rp, rng)?))
    }
}

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

// the short-hop layer takes 3/4 of ε; the min-plus layers split the rest geometrically
fn split_eps(eps: f64, layers: i32) -> (f64, f64) {
    let short = 0.75 * eps;
    let rest = (1.0 + eps) / (1.0 + short);
    (short, rest.powf(1.0 / layers as f64) - 1.0)
}

/// Batch-query APSP for all hop counts.
#[derive(Clone, Debug)]
pub struct ApspOracle {
    short: ShortHop,
    hop: usize,
    eps: f64,
    eps_mp: f64,
    c: f64,
    rng: Rng,
    hubs: Vec<usize>,
    // D_{V,H} ⋆ closure(D_{H,H}), and D_{H,V}
    t: DistMatrix,
    d_hv: DistMatrix,
}

impl ApspOracle {
    pub fn new(f: &FieldConfig, g: &DynGraph, p: &OracleParams, seed: u64) -> Result<Self> {
        p.check()?;
        let mut rng = Rng::seed_from_u64(seed);
        let hop = pow_cap(g.n(), p.s);
        let (e_short, eps_mp) = split_eps(p.eps, 3);
        let short = build_short_hop(f, g, hop, e_short, p, &mut rng)?;
        let mut o = ApspOracle {
            short,
            hop,
            eps: p.eps,
            eps_mp,
            c: p.c,
            rng,
            hubs: Vec::new(),
            t: DistMatrix::inf(0, 0),
            d_hv: DistMatrix::inf(0, 0),
        };
        o.refresh()?;
        Ok(o)
    }

    pub fn graph(&self) -> &DynGraph {
        self.short.graph()
    }

    pub fn n(&self) -> usize {
        self.short.n()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn hubs(&self) -> &[usize] {
        &self.hubs
    }

    pub fn short_hop(&self) -> &ShortHop {
        &self.short
    }

    pub fn ops(&self) -> u64 {
        self.short.ops()
    }

    fn refresh(&mut self) -> Result<()> {
        let n = self.n();
        self.hubs = sample_hitting_set(n, self.hop, self.c, &mut self.rng).nodes;
        let v = all(n);
        let d_vh = self.short.batch_query(&v, &self.hubs)?;
        self.d_hv = self.short.batch_query(&self.hubs, &v)?;
        let d_hh = d_vh.select(&self.hubs, &all(self.hubs.len()));
        let closure = minplus_power(&d_hh, self.eps_mp)?;
        self.t = minplus_approx(&d_vh, &closure, self.eps_mp)?;
        Ok(())
    }

    pub fn update(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        self.short.update(u, v, w)?;
        self.refresh()
    }

    /// dist ≤ answer ≤ (1+ε)·dist for every pair in I×J, w.h.p.
    pub fn query(&mut self, ri: &[usize], ci: &[usize]) -> Result<DistMatrix> {
        let direct = self.short.batch_query(ri, ci)?;
        let t_ih = self.t.select(ri, &all(self.hubs.len()));
        let d_hj = self.d_hv.select(&all(self.hubs.len()), ci);
        let via = minplus_approx(&t_ih, &d_hj, self.eps_mp)?;
        let mut out = direct.min_with(&via)?;
        for (x, &i) in ri.iter().enumerate() {
            for (y, &j) in ci.iter().enumerate() {
                if i == j {
                    out.set(x, y, 0.0);
                }
            }
        }
        Ok(out)
    }

    /// Update followed by the full n×n query.
    pub fn explicit_update(&mut self, u: usize, v: usize, w: f64) -> Result<DistMatrix> {
        self.update(u, v, w)?;
        let v = all(self.n());
        self.query(&v, &v)
    }
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

/// Single-source distances: overlay edges x → y of cost D[x,y] for x in
/// H ∪ {source}, then Dijkstra from the source.
#[derive(Clone, Debug)]
pub struct SsspOracle {
    short: ShortHop,
    source: usize,
    hop: usize,
    eps: f64,
    c: f64,
    rng: Rng,
    row: Vec<f64>,
}

impl SsspOracle {
    pub fn new(f: &FieldConfig, g: &DynGraph, source: usize, p: &OracleParams, seed: u64) -> Result<Self> {
        p.check()?;
        if source >= g.n() {
            return Err(Error::IndexOutOfRange { index: source, len: g.n() });
        }
        let mut rng = Rng::seed_from_u64(seed);
        let hop = pow_cap(g.n(), p.s);
        // the overlay search is exact, so the whole budget goes to the short-hop layer
        let short = build_short_hop(f, g, hop, p.eps, p, &mut rng)?;
        let mut o = SsspOracle { short, source, hop, eps: p.eps, c: p.c, rng, row: Vec::new() };
        o.recompute()?;
        Ok(o)
    }

    pub fn graph(&self) -> &DynGraph {
        self.short.graph()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn row(&self) -> &[f64] {
        &self.row
    }

    pub fn ops(&self) -> u64 {
        self.short.ops()
    }

    pub fn set_source(&mut self, source: usize) -> Result<&[f64]> {
        if source >= self.short.n() {
            return Err(Error::IndexOutOfRange { index: source, len: self.short.n() });
        }
        self.source = source;
        self.recompute()?;
        Ok(&self.row)
    }

    pub fn update(&mut self, u: usize, v: usize, w: f64) -> Result<&[f64]> {
        self.short.update(u, v, w)?;
        self.recompute()?;
        Ok(&self.row)
    }

    fn recompute(&mut self) -> Result<()> {
        let n = self.short.n();
        let mut x = sample_hitting_set(n, self.hop, self.c, &mut self.rng).nodes;
        if let Err(pos) = x.binary_search(&self.source) {
            x.insert(pos, self.source);
        }
        let d = self.short.batch_query(&x, &all(n))?;
        let mut slot = vec![usize::MAX; n];
        for (k, &v) in x.iter().enumerate() {
            slot[v] = k;
        }
        let mut dist = vec![INF; n];
        dist[self.source] = 0.0;
        let mut heap = BinaryHeap::from([HeapItem(0.0, self.source)]);
        while let Some(HeapItem(du, u)) = heap.pop() {
            if du > dist[u] || slot[u] == usize::MAX {
                continue;
            }
            for (y, &c) in d.row(slot[u]).iter().enumerate() {
                let nd = du + c;
                if nd < dist[y] {
                    dist[y] = nd;
                    heap.push(HeapItem(nd, y));
                }
            }
        }
        self.row = dist;
        Ok(())
    }
}

/// Undirected integer-weight oracle: short-hop values up to W·h, plus hub
/// distances for far pairs, each far answer padded by 0.5·W·h·ε.
#[derive(Clone, Debug)]
pub struct UndirectedOracle {
    short: ShortHopOracle,
    h: usize,
    w: f64,
    eps: f64,
    eps_u: f64,
    c: f64,
    rng: Rng,
    hubs: Vec<usize>,
    assign: Vec<Option<usize>>,
    delta: DistMatrix,
}

impl UndirectedOracle {
    pub fn new(f: &FieldConfig, g: &DynGraph, p: &OracleParams, seed: u64) -> Result<Self> {
        p.check()?;
        if g.directed() {
            return Err(Error::DirectedInput);
        }
        if !g.is_integer() || g.w_cap().fract() != 0.0 {
            return Err(Error::InvalidWeight("undirected oracle needs integer weights".into()));
        }
        let n = g.n();
        let mut rng = Rng::seed_from_u64(seed);
        let h = pow_cap(n, p.s);
        let w = g.w_cap();
        // three (1+ε_u) factors compose to 1+ε
        let eps_u = (1.0 + p.eps).cbrt() - 1.0;
        let sp = ShortHopParams {
            bound: (w as usize).max(1) * h,
            eps: eps_u,
            mu_cap: pow_cap(n, p.mu),
            nu_cap: pow_cap(n, p.nu),
        };
        let short = ShortHopOracle::new(f, g, &sp, Rng::seed_from_u64(rng.next_u64()))?;
        let mut o = UndirectedOracle {
            short,
            h,
            w,
            eps: p.eps,
            eps_u,
            c: p.c,
            rng,
            hubs: Vec::new(),
            assign: Vec::new(),
            delta: DistMatrix::inf(0, 0),
        };
        o.refresh()?;
        Ok(o)
    }

    pub fn graph(&self) -> &DynGraph {
        self.short.graph()
    }

    pub fn n(&self) -> usize {
        self.short.n()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Value bound W·h of the short-hop layer.
    pub fn value_bound(&self) -> f64 {
        self.w * self.h as f64
    }

    pub fn hubs(&self) -> &[usize] {
        &self.hubs
    }

    /// Hub assigned to each node, if one lies within 0.25·W·h·ε_u.
    pub fn assignment(&self) -> Vec<Option<usize>> {
        self.assign.iter().map(|a| a.map(|k| self.hubs[k])).collect()
    }

    pub fn ops(&self) -> u64 {
        self.short.ops()
    }

    /// Hop window the hitting set must cover: a hub this many hops away is
    /// at distance at most 0.25·W·h·ε_u after the short-hop overestimate.
    fn window(&self) -> usize {
        ((0.25 * self.h as f64 * self.eps_u / (1.0 + self.eps_u)).floor() as usize).max(1)
    }

    fn refresh(&mut self) -> Result<()> {
        let n = self.n();
        let window = self.window();
        debug_assert!(hitting_set_size(n, window, self.c) <= n);
        self.hubs = sample_hitting_set(n, window, self.c, &mut self.rng).nodes;
        let k = self.hubs.len();
        let d_vh = self.short.batch_query(&all(n), &self.hubs)?;
        let reach = 0.25 * self.w * self.h as f64 * self.eps_u;
        self.assign = (0..n)
            .map(|v| {
                let (best, d) = d_vh.row(v).iter().enumerate().fold((None, INF), |(b, bd), (x, &d)| {
                    if d < bd {
                        (Some(x), d)
                    } else {
                        (b, bd)
                    }
                });
                if d <= reach {
                    best
                } else {
                    None
                }
            })
            .collect();
        let d_hh = d_vh.select(&self.hubs, &all(k));
        self.delta = minplus_power(&d_hh, self.eps_u)?;
        Ok(())
    }

    pub fn update(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        self.short.update(u, v, w)?;
        self.refresh()
    }

    /// Hub term alone: Δ[x_u, x_v] + 0.5·W·h·ε_u, or ∞ without both hubs.
    pub fn hub_estimate(&self, u: usize, v: usize) -> f64 {
        match (self.assign[u], self.assign[v]) {
            (Some(a), Some(b)) => self.delta.get(a, b) + 0.5 * self.w * self.h as f64 * self.eps_u,
            _ => INF,
        }
    }

    pub fn query(&mut self, ri: &[usize], ci: &[usize]) -> Result<DistMatrix> {
        let mut out = self.short.batch_query(ri, ci)?;
        for (x, &i) in ri.iter().enumerate() {
            for (y, &j) in ci.iter().enumerate() {
                let v = if i == j { 0.0 } else { out.get(x, y).min(self.hub_estimate(i, j)) };
                out.set(x, y, v);
            }
        }
        Ok(out)
    }
}
