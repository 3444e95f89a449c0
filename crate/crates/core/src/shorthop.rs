//! Dynamic bounded-distance oracles.
//!
//! [`ShortHopOracle`] handles integer weights: it encodes the graph with
//! degree bound h = bound + 1 and reports, for each pair, the smallest tracked
//! threshold d ∈ S whose inverse slice is nonzero there. A nonzero slice
//! certifies a walk of length exactly d, so estimates never undershoot.
//!
//! [`RealShortHop`] handles real weights through a bank of rounded integer
//! oracles, one per power-of-two scale.

use rayon::prelude::*;

use crate::dyninv::WorstCaseWrapper;
use crate::error::{Error, Result};
use crate::ff_poly::{FieldConfig, Rng};
use crate::graphenc::{encode, DynGraph, Encoding, INF};
use crate::minplus::DistMatrix;
use crate::polymatrix::{check_index_set, FMatrix};

/// Dedup {⌊(1+ε)^i⌋ : 0 ≤ i ≤ ⌈log_{1+ε} bound⌉}, clamped to `bound`, plus `bound`.
pub fn thresholds(eps: f64, bound: usize) -> Vec<usize> {
    let bound = bound.max(1);
    let top = ((bound as f64).ln() / (1.0 + eps).ln()).ceil().max(0.0) as i32;
    let mut s: Vec<usize> = (0..=top)
        .map(|i| (1.0 + eps).powi(i).floor() as usize)
        .filter(|&d| d <= bound)
        .collect();
    s.push(bound);
    s.sort_unstable();
    s.dedup();
    s
}

/// ⌈n^x⌉, at least 1.
pub fn pow_cap(n: usize, x: f64) -> usize {
    ((n.max(1) as f64).powf(x) - 1e-9).ceil().max(1.0) as usize
}

/// Construction parameters of an integer short-hop oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortHopParams {
    /// Largest tracked distance value.
    pub bound: usize,
    pub eps: f64,
    pub mu_cap: usize,
    pub nu_cap: usize,
}

impl ShortHopParams {
    /// bound = ⌈n^s⌉, caps ⌈n^μ⌉ and ⌈n^ν⌉.
    pub fn from_exponents(n: usize, s: f64, mu: f64, nu: f64, eps: f64) -> Self {
        ShortHopParams { bound: pow_cap(n, s), eps, mu_cap: pow_cap(n, mu), nu_cap: pow_cap(n, nu) }
    }
}

/// Integer-weight oracle for distances up to `bound`.
#[derive(Clone, Debug)]
pub struct ShortHopOracle {
    graph: DynGraph,
    enc: Encoding,
    ds: WorstCaseWrapper,
    s_set: Vec<usize>,
    eps: f64,
    bound: usize,
}

impl ShortHopOracle {
    pub fn new(f: &FieldConfig, g: &DynGraph, p: &ShortHopParams, rng: Rng) -> Result<Self> {
        if !(p.eps > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon {} must be positive", p.eps)));
        }
        let s = thresholds(p.eps, p.bound);
        Self::with_thresholds(f, g, p.bound.max(1), s, p.eps, p.mu_cap, p.nu_cap, rng)
    }

    /// Tracks every value 1..=bound, so estimates are exact up to `bound`.
    pub fn exact(f: &FieldConfig, g: &DynGraph, bound: usize, mu_cap: usize, nu_cap: usize, rng: Rng) -> Result<Self> {
        let bound = bound.max(1);
        Self::with_thresholds(f, g, bound, (1..=bound).collect(), 0.0, mu_cap, nu_cap, rng)
    }

    #[allow(clippy::too_many_arguments)]
    fn with_thresholds(
        f: &FieldConfig,
        g: &DynGraph,
        bound: usize,
        s_set: Vec<usize>,
        eps: f64,
        mu_cap: usize,
        nu_cap: usize,
        rng: Rng,
    ) -> Result<Self> {
        if !g.is_integer() {
            return Err(Error::InvalidWeight("integer oracle needs integer weights".into()));
        }
        let h = bound + 1;
        f.check_budget(h, g.n())?;
        let (m, enc) = encode(f, g, h, rng)?;
        let ds = WorstCaseWrapper::new(f, &m, s_set.clone(), mu_cap, nu_cap)?;
        Ok(ShortHopOracle { graph: g.clone(), enc, ds, s_set, eps, bound })
    }

    pub fn graph(&self) -> &DynGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn thresholds(&self) -> &[usize] {
        &self.s_set
    }

    pub fn ops(&self) -> u64 {
        self.ds.ops()
    }

    pub fn inverse(&self) -> &WorstCaseWrapper {
        &self.ds
    }

    /// Sets w(u,v) (∞ deletes); undirected graphs update both orientations.
    pub fn update(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        if w.is_finite() && w.fract() != 0.0 {
            return Err(Error::InvalidWeight(format!("{w} is not an integer")));
        }
        let old = self.graph.set_weight(u, v, w)?;
        let mut arcs = vec![(u, v)];
        if !self.graph.directed() {
            arcs.push((v, u));
        }
        for (a, b) in arcs {
            let (i, j, delta) = self.enc.edge_update_to_element_update(a, b, old, w)?;
            if delta.is_zero() {
                continue;
            }
            // M = I − A moves opposite to A
            let f = *self.ds.field();
            self.ds.update(i, j, &delta.neg(&f))?;
        }
        Ok(())
    }

    /// Boolean slice: entry nonzero ⇔ a walk of length exactly d (w.h.p. ⇔ dist ≤ d).
    pub fn slice(&mut self, ri: &[usize], ci: &[usize], d: usize) -> Result<FMatrix> {
        self.ds.query(ri, ci, d)
    }

    /// Estimates for I×J: 0 on the diagonal, otherwise the smallest d ∈ S
    /// certified by a nonzero slice entry, or ∞.
    pub fn batch_query(&mut self, ri: &[usize], ci: &[usize]) -> Result<DistMatrix> {
        let n = self.n();
        check_index_set(ri, n)?;
        check_index_set(ci, n)?;
        let mut out = DistMatrix::inf(ri.len(), ci.len());
        let Some(&dmax) = self.s_set.last() else {
            return Ok(out);
        };
        // pairs unreachable within max(S) are settled by one block query
        let top = self.ds.query(ri, ci, dmax)?;
        let mut open: Vec<(usize, usize)> = Vec::new();
        for (x, &i) in ri.iter().enumerate() {
            for (y, &j) in ci.iter().enumerate() {
                if i == j {
                    out.set(x, y, 0.0);
                } else if !top.get(x, y).is_zero() {
                    open.push((x, y));
                }
            }
        }
        // bisection over S for each open pair; S has max(S) certified already
        let k = self.s_set.len();
        let mut lo = vec![0usize; open.len()];
        let mut hi = vec![k - 1; open.len()];
        loop {
            let mut probes: Vec<(usize, usize)> = (0..open.len()).filter(|&p| lo[p] < hi[p]).map(|p| ((lo[p] + hi[p]) / 2, p)).collect();
            if probes.is_empty() {
                break;
            }
            probes.sort_unstable();
            for group in probes.chunk_by(|a, b| a.0 == b.0) {
                let d = self.s_set[group[0].0];
                let pairs: Vec<(usize, usize)> = group.iter().map(|&(_, p)| (ri[open[p].0], ci[open[p].1])).collect();
                let vals = self.ds.query_entries(&pairs, d)?;
                for (&(mid, p), v) in group.iter().zip(vals) {
                    if v.is_zero() {
                        lo[p] = mid + 1;
                    } else {
                        hi[p] = mid;
                    }
                }
            }
        }
        for (p, &(x, y)) in open.iter().enumerate() {
            out.set(x, y, self.s_set[hi[p]] as f64);
        }
        Ok(out)
    }
}

/// Rounding parameters of the real-weight bank.
#[derive(Clone, Debug, PartialEq)]
pub struct RealParams {
    /// Hop bound of the guarantee.
    pub hop: usize,
    pub eps: f64,
    pub mu_cap: usize,
    pub nu_cap: usize,
}

#[derive(Clone, Debug)]
struct Scale {
    b: f64,
    oracle: ShortHopOracle,
}

/// Real-weight oracle for paths of at most `hop` edges: one rounded integer
/// oracle per scale B_i = 2^i, answering min_i (B_i/A)·est_i.
#[derive(Clone, Debug)]
pub struct RealShortHop {
    graph: DynGraph,
    scales: Vec<Scale>,
    a: f64,
    hop: usize,
    eps: f64,
}

/// ⌈A·c/B⌉ with a guard so that the descaled weight is never below c.
pub fn round_weight(a: f64, b: f64, c: f64) -> f64 {
    let mut q = (a * c / b).ceil().max(1.0);
    while q * b / a < c {
        q += 1.0;
    }
    q
}

impl RealShortHop {
    pub fn new(f: &FieldConfig, g: &DynGraph, p: &RealParams, rng: &mut Rng) -> Result<Self> {
        if !(p.eps > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon {} must be positive", p.eps)));
        }
        let e1 = (1.0 + p.eps).sqrt() - 1.0;
        let hop = p.hop.max(1);
        let a = 2.0 * hop as f64 / e1;
        let bound = (3.0 * hop as f64 / e1).ceil() as usize;
        let top = ((g.n().max(2) as f64) * g.w_cap()).log2().ceil() as i32;
        let params = ShortHopParams { bound, eps: e1, mu_cap: p.mu_cap, nu_cap: p.nu_cap };
        let mut scales = Vec::new();
        for i in 0..=top {
            let b = 2f64.powi(i);
            let gi = Self::scaled(g, a, b);
            let seed_rng = <Rng as rand::SeedableRng>::seed_from_u64(rand::RngCore::next_u64(rng));
            scales.push(Scale { b, oracle: ShortHopOracle::new(f, &gi, &params, seed_rng)? });
        }
        Ok(RealShortHop { graph: g.clone(), scales, a, hop, eps: p.eps })
    }

    fn scaled(g: &DynGraph, a: f64, b: f64) -> DynGraph {
        let mut out = DynGraph::new(g.n(), g.directed(), a.ceil());
        for (u, v, c) in g.arcs() {
            if c <= b && (g.directed() || u < v) {
                out.set_weight(u, v, round_weight(a, b, c)).expect("rounded weight within cap");
            }
        }
        out
    }

    pub fn graph(&self) -> &DynGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn scale_count(&self) -> usize {
        self.scales.len()
    }

    pub fn ops(&self) -> u64 {
        self.scales.iter().map(|s| s.oracle.ops()).sum()
    }

    pub fn update(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        self.graph.set_weight(u, v, w)?;
        let a = self.a;
        self.scales.par_iter_mut().try_for_each(|s| {
            let nw = if w <= s.b { round_weight(a, s.b, w) } else { INF };
            if s.oracle.graph().weight(u, v) == nw {
                return Ok(());
            }
            s.oracle.update(u, v, nw)
        })
    }

    pub fn batch_query(&mut self, ri: &[usize], ci: &[usize]) -> Result<DistMatrix> {
        let a = self.a;
        let parts: Vec<DistMatrix> = self
            .scales
            .par_iter_mut()
            .map(|s| {
                let est = s.oracle.batch_query(ri, ci)?;
                let k = s.b / a;
                let data = est.data().iter().map(|&x| if x.is_finite() { x * k } else { INF }).collect();
                DistMatrix::from_vec(est.rows(), est.cols(), data)
            })
            .collect::<Result<_>>()?;
        let mut out = DistMatrix::inf(ri.len(), ci.len());
        for p in &parts {
            out = out.min_with(p)?;
        }
        Ok(out)
    }
}

/// Either flavour of short-hop oracle behind one interface.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum ShortHop {
    Int(ShortHopOracle),
    Real(RealShortHop),
}

impl ShortHop {
    pub fn graph(&self) -> &DynGraph {
        match self {
            ShortHop::Int(o) => o.graph(),
            ShortHop::Real(o) => o.graph(),
        }
    }

    pub fn n(&self) -> usize {
        self.graph().n()
    }

    pub fn ops(&self) -> u64 {
        match self {
            ShortHop::Int(o) => o.ops(),
            ShortHop::Real(o) => o.ops(),
        }
    }

    pub fn update(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        match self {
            ShortHop::Int(o) => o.update(u, v, w),
            ShortHop::Real(o) => o.update(u, v, w),
        }
    }

    pub fn batch_query(&mut self, ri: &[usize], ci: &[usize]) -> Result<DistMatrix> {
        match self {
            ShortHop::Int(o) => o.batch_query(ri, ci),
            ShortHop::Real(o) => o.batch_query(ri, ci),
        }
    }
}
