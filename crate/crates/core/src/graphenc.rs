//! Dynamic weighted graphs, their polynomial-matrix encoding, hitting sets
//! and a connectivity check.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::ff_poly::{FieldConfig, FieldElement, Rng, TruncPoly};
use crate::polymatrix::PolyMatrix;

/// Weight of an absent edge and distance of an unreachable pair.
pub const INF: f64 = f64::INFINITY;

/// Directed (or undirected) graph on nodes `0..n` with weights in [1, W].
#[derive(Clone, Debug, PartialEq)]
pub struct DynGraph {
    n: usize,
    directed: bool,
    w_cap: f64,
    out: Vec<BTreeMap<usize, f64>>,
    inn: Vec<BTreeMap<usize, f64>>,
}

impl DynGraph {
    pub fn new(n: usize, directed: bool, w_cap: f64) -> Self {
        DynGraph { n, directed, w_cap, out: vec![BTreeMap::new(); n], inn: vec![BTreeMap::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    /// The weight cap W.
    pub fn w_cap(&self) -> f64 {
        self.w_cap
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.out.get(u).and_then(|m| m.get(&v)).copied().unwrap_or(INF)
    }

    /// Sets w(u,v) (both directions when undirected); `INF` deletes.
    /// Returns the previous weight.
    pub fn set_weight(&mut self, u: usize, v: usize, w: f64) -> Result<f64> {
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::IndexOutOfRange { index: x, len: self.n });
            }
        }
        if u == v {
            return Err(Error::InvalidWeight(format!("self-loop at node {u}")));
        }
        if w.is_nan() || (w.is_finite() && !(1.0..=self.w_cap).contains(&w)) || w == f64::NEG_INFINITY {
            return Err(Error::InvalidWeight(format!("{w} outside [1, {}]", self.w_cap)));
        }
        let old = self.weight(u, v);
        self.put(u, v, w);
        if !self.directed {
            self.put(v, u, w);
        }
        Ok(old)
    }

    fn put(&mut self, u: usize, v: usize, w: f64) {
        if w.is_finite() {
            self.out[u].insert(v, w);
            self.inn[v].insert(u, w);
        } else {
            self.out[u].remove(&v);
            self.inn[v].remove(&u);
        }
    }

    pub fn out_edges(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.out[u].iter().map(|(&v, &w)| (v, w))
    }

    pub fn in_edges(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.inn[v].iter().map(|(&u, &w)| (u, w))
    }

    /// All stored arcs (u, v, w); an undirected edge appears in both directions.
    pub fn arcs(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n).flat_map(|u| self.out_edges(u).map(move |(v, w)| (u, v, w))).collect()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(BTreeMap::len).sum()
    }

    /// Largest finite weight present (1 for an edgeless graph).
    pub fn max_weight(&self) -> f64 {
        self.out.iter().flat_map(|m| m.values()).fold(1.0, |a, &w| a.max(w))
    }

    pub fn is_integer(&self) -> bool {
        self.out.iter().flat_map(|m| m.values()).all(|w| w.fract() == 0.0)
    }

    /// Same graph with every finite weight mapped through `g`.
    pub fn map_weights(&self, w_cap: f64, g: impl Fn(f64) -> f64) -> DynGraph {
        let mut out = DynGraph::new(self.n, self.directed, w_cap);
        for (u, v, w) in self.arcs() {
            out.put(u, v, g(w));
        }
        out
    }
}

fn int_weight(w: f64) -> Result<Option<usize>> {
    if w.is_infinite() {
        return Ok(None);
    }
    if w.fract() != 0.0 || w < 1.0 {
        return Err(Error::InvalidWeight(format!("{w} is not a positive integer")));
    }
    Ok(Some(w as usize))
}

/// Random coefficients a_{u,v} of the encoding, plus the generator that
/// draws fresh ones on every update.
#[derive(Clone, Debug)]
pub struct Encoding {
    f: FieldConfig,
    h: usize,
    coeffs: BTreeMap<(usize, usize), FieldElement>,
    rng: Rng,
}

impl Encoding {
    pub fn h(&self) -> usize {
        self.h
    }

    pub fn coeff(&self, u: usize, v: usize) -> Option<FieldElement> {
        self.coeffs.get(&(u, v)).copied()
    }

    /// Translates w(u,v): old → new into the element update of A,
    /// a′X^new − aX^old, resampling the coefficient. M = I − A changes by
    /// the negation of the returned delta.
    pub fn edge_update_to_element_update(
        &mut self,
        u: usize,
        v: usize,
        old_w: f64,
        new_w: f64,
    ) -> Result<(usize, usize, TruncPoly)> {
        let old = int_weight(old_w)?;
        let new = int_weight(new_w)?;
        let old_term = match (old, self.coeffs.get(&(u, v))) {
            (Some(c), Some(&a)) => Some((a, c)),
            _ => None,
        };
        let new_term = match new {
            Some(c) => {
                let a = self.f.sample(&mut self.rng);
                self.coeffs.insert((u, v), a);
                Some((a, c))
            }
            None => {
                self.coeffs.remove(&(u, v));
                None
            }
        };
        Ok((u, v, edge_delta(&self.f, self.h, old_term, new_term)))
    }
}

/// a′X^{c′} − aX^{c}; either term may be absent and exponents ≥ h vanish.
pub fn edge_delta(
    f: &FieldConfig,
    h: usize,
    old: Option<(FieldElement, usize)>,
    new: Option<(FieldElement, usize)>,
) -> TruncPoly {
    let mut d = TruncPoly::zero(h);
    if let Some((a, c)) = new {
        d = d.add(&TruncPoly::monomial(h, a, c), f).expect("same h");
    }
    if let Some((a, c)) = old {
        d = d.sub(&TruncPoly::monomial(h, a, c), f).expect("same h");
    }
    d
}

/// M = I − A(G) with A_{u,v} = a_{u,v}X^{c_{u,v}} (dropped when c ≥ h) and
/// self-loops A_{v,v} = a_{v,v}X. Requires integer weights.
pub fn encode(f: &FieldConfig, g: &DynGraph, h: usize, mut rng: Rng) -> Result<(PolyMatrix, Encoding)> {
    let n = g.n();
    let mut m = PolyMatrix::identity(n, h);
    let mut coeffs = BTreeMap::new();
    for v in 0..n {
        let a = f.sample(&mut rng);
        coeffs.insert((v, v), a);
        if h > 1 {
            m.slice_mut(1).set(v, v, f.neg(a));
        }
    }
    for (u, v, w) in g.arcs() {
        let c = int_weight(w)?.expect("stored arcs are finite");
        let a = f.sample(&mut rng);
        coeffs.insert((u, v), a);
        if c < h {
            m.slice_mut(c).set(u, v, f.neg(a));
        }
    }
    Ok((m, Encoding { f: *f, h, coeffs, rng }))
}

/// Random node subset meant to hit every d-hop window of every shortest path.
#[derive(Clone, Debug, PartialEq)]
pub struct HittingSet {
    pub nodes: Vec<usize>,
    pub hop_bound: usize,
    pub c: f64,
}

/// min(n, ⌈c·(n/d)·ln n⌉) nodes without replacement, sorted.
pub fn hitting_set_size(n: usize, d: usize, c: f64) -> usize {
    if n <= 1 {
        return n;
    }
    let want = (c * (n as f64 / d.max(1) as f64) * (n as f64).ln()).ceil();
    if want >= n as f64 {
        n
    } else {
        want as usize
    }
}

pub fn sample_hitting_set(n: usize, d: usize, c: f64, rng: &mut Rng) -> HittingSet {
    let k = hitting_set_size(n, d, c);
    let mut nodes = sample(rng, n, k).into_vec();
    nodes.sort_unstable();
    HittingSet { nodes, hop_bound: d.max(1), c }
}

/// Forward and backward search from node 0.
pub fn is_strongly_connected(g: &DynGraph) -> bool {
    let n = g.n();
    if n <= 1 {
        return true;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut q = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = q.pop_front() {
            let next: Vec<usize> =
                if forward { g.out_edges(u).map(|e| e.0).collect() } else { g.in_edges(u).map(|e| e.0).collect() };
            for v in next {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    q.push_back(v);
                }
            }
        }
        count
    };
    reach(true) == n && reach(false) == n
}
