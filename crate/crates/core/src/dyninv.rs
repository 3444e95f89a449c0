//! Dynamic inverses of M ∈ (F[X]/<X^h>)^{n×n} under single-entry updates.
//!
//! * [`ExactInverseDS`]: exact row/column queries. Keeps the inverse from the
//!   last reset plus Sherman–Morrison correction pairs (û, v̂).
//! * [`SliceInverseDS`]: keeps only the coefficient slices d ∈ S of the base
//!   inverse; corrections live as column blocks Û, V̂ and a query subtracts one
//!   stacked-slice product.
//! * [`WorstCaseWrapper`]: two phase-shifted copies so that the reset work is
//!   spread evenly over updates.
//!
//! Every update must have zero constant term, so 1 + vᵀû always has constant
//! term 1 and is a unit.
//!
//! Operation counts are analytic: they are computed from the shapes of the
//! products actually executed, in units of field multiply-adds.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff_poly::{convolve_into, FieldConfig, FieldElement, TruncPoly};
use crate::polymatrix::{check_index_set, series_inverse, stacked_slice_product, FMatrix, PolyMatrix};

fn conv_ops(h: usize) -> u64 {
    (h * (h + 1) / 2) as u64
}

/// One Sherman–Morrison correction: the inverse loses û·v̂ᵀ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    pub uhat: Vec<TruncPoly>,
    pub vhat: Vec<TruncPoly>,
}

/// Exact dynamic inverse with row and column queries.
#[derive(Clone, Debug)]
pub struct ExactInverseDS {
    f: FieldConfig,
    n: usize,
    h: usize,
    base: Vec<Arc<FMatrix>>,
    corrections: Vec<Correction>,
    // off-identity view of the current M: nonzero entries only
    m: BTreeMap<(usize, usize), TruncPoly>,
    nu_cap: usize,
    ops: u64,
    resets: usize,
}

impl ExactInverseDS {
    /// Requires M^[0] = I. Resets fire after `nu_cap` updates.
    pub fn new(f: &FieldConfig, m: &PolyMatrix, nu_cap: usize) -> Result<Self> {
        let inv = series_inverse(f, m)?;
        Ok(Self::with_inverse(f, m, inv, nu_cap))
    }

    pub(crate) fn with_inverse(f: &FieldConfig, m: &PolyMatrix, inv: PolyMatrix, nu_cap: usize) -> Self {
        let (n, h) = (m.rows(), m.h());
        let mut entries = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                if m.slices().iter().any(|s| !s.get(i, j).is_zero()) {
                    entries.insert((i, j), m.entry(i, j));
                }
            }
        }
        ExactInverseDS {
            f: *f,
            n,
            h,
            base: inv.into_slices().into_iter().map(Arc::new).collect(),
            corrections: Vec::new(),
            m: entries,
            nu_cap: nu_cap.max(1),
            ops: 0,
            resets: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// Updates since the last reset.
    pub fn t(&self) -> usize {
        self.corrections.len()
    }

    pub fn nu_cap(&self) -> usize {
        self.nu_cap
    }

    pub(crate) fn set_nu_cap(&mut self, cap: usize) {
        self.nu_cap = cap.max(1);
    }

    pub fn ops(&self) -> u64 {
        self.ops
    }

    pub fn resets(&self) -> usize {
        self.resets
    }

    pub fn corrections(&self) -> &[Correction] {
        &self.corrections
    }

    pub(crate) fn base_slice(&self, k: usize) -> &Arc<FMatrix> {
        &self.base[k]
    }

    /// The accumulated matrix M.
    pub fn current_matrix(&self) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(self.n, self.n, self.h);
        for (&(i, j), p) in &self.m {
            m.set_entry(i, j, p).expect("stored with matching h");
        }
        m
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, len: self.n });
        }
        Ok(())
    }

    /// Row i of the current inverse.
    pub fn query_row(&mut self, i: usize) -> Result<Vec<TruncPoly>> {
        self.check_index(i)?;
        let row = self.query_line(i, true);
        Ok(row)
    }

    /// Column j of the current inverse.
    pub fn query_col(&mut self, j: usize) -> Result<Vec<TruncPoly>> {
        self.check_index(j)?;
        Ok(self.query_line(j, false))
    }

    // row: base[idx, :] − Σ û[idx]·v̂ ; column: base[:, idx] − Σ û·v̂[idx]
    fn query_line(&mut self, idx: usize, row: bool) -> Vec<TruncPoly> {
        let (n, h, f) = (self.n, self.h, self.f);
        let mut out: Vec<TruncPoly> = (0..n)
            .map(|r| {
                let (a, b) = if row { (idx, r) } else { (r, idx) };
                TruncPoly::from_elems(self.base.iter().map(|s| s.get(a, b)).collect())
            })
            .collect();
        let mut tmp = vec![FieldElement::ZERO; h];
        for c in &self.corrections {
            let (fixed, running) = if row { (&c.uhat[idx], &c.vhat) } else { (&c.vhat[idx], &c.uhat) };
            if fixed.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(running) {
                convolve_into(&f, fixed.coeffs(), p.coeffs(), &mut tmp);
                for (x, &y) in o.coeffs_mut().iter_mut().zip(&tmp) {
                    *x = f.sub(*x, y);
                }
            }
        }
        self.ops += (n * h) as u64 + self.corrections.len() as u64 * n as u64 * conv_ops(h);
        out
    }

    /// Computes the correction pair for M[i][j] += delta without applying it.
    pub fn prepare(&mut self, i: usize, j: usize, delta: &TruncPoly) -> Result<Correction> {
        self.check_index(i)?;
        self.check_index(j)?;
        if delta.h() != self.h {
            return Err(Error::DegreeMismatch { left: self.h, right: delta.h() });
        }
        if !delta.constant_term().is_zero() {
            return Err(Error::ConstantTermUpdate);
        }
        let f = self.f;
        let uhat = self.query_col(i)?;
        let row = self.query_row(j)?;
        let pivot = TruncPoly::one(self.h).add(&delta.mul(&uhat[j], &f)?, &f)?;
        assert_eq!(pivot.constant_term(), FieldElement::ONE, "pivot must have constant term 1");
        let scale = pivot.inv_unit(&f).map_err(|_| Error::SingularPivot)?.mul(delta, &f)?;
        let vhat: Vec<TruncPoly> = row.iter().map(|r| scale.mul(r, &f)).collect::<Result<_>>()?;
        self.ops += conv_ops(self.h) * (self.n as u64 + 3);
        Ok(Correction { uhat, vhat })
    }

    /// Records a pair from [`prepare`](Self::prepare) and adds delta to M.
    pub fn apply(&mut self, i: usize, j: usize, delta: &TruncPoly, pair: Correction) {
        debug_assert!(pair.vhat.iter().all(|p| p.constant_term().is_zero()));
        let f = self.f;
        let e = self.m.entry((i, j)).or_insert_with(|| TruncPoly::zero(delta.h()));
        *e = e.add(delta, &f).expect("same h");
        if e.is_zero() {
            self.m.remove(&(i, j));
        }
        self.corrections.push(pair);
    }

    /// M[i][j] += delta; resets after `nu_cap` corrections.
    pub fn update(&mut self, i: usize, j: usize, delta: &TruncPoly) -> Result<()> {
        let pair = self.prepare(i, j, delta)?;
        self.apply(i, j, delta, pair);
        if self.t() >= self.nu_cap {
            self.reset();
        }
        Ok(())
    }

    /// Folds all corrections into the base inverse: base − Σ ûv̂ᵀ, slice by slice.
    pub fn reset(&mut self) {
        let mut job = ResetJob::new(self);
        while !job.done() {
            self.ops += job.step(&self.f, self.n.max(1));
        }
        self.install(job.finish());
    }

    pub(crate) fn install(&mut self, base: Vec<Arc<FMatrix>>) {
        self.base = base;
        self.corrections.clear();
        self.resets += 1;
    }
}

/// Row-chunked materialization of base − Û V̂ᵀ over all h slices, taken from a
/// frozen snapshot so it can be interleaved with other work.
#[derive(Clone, Debug)]
pub(crate) struct ResetJob {
    n: usize,
    t: usize,
    base: Vec<Arc<FMatrix>>,
    u: Vec<FMatrix>,
    v: Vec<FMatrix>,
    out: Vec<FMatrix>,
    next_row: usize,
}

impl ResetJob {
    pub(crate) fn new(ds: &ExactInverseDS) -> Self {
        let (n, h, t) = (ds.n, ds.h, ds.t());
        let stack = |pick: fn(&Correction) -> &Vec<TruncPoly>| -> Vec<FMatrix> {
            (0..h)
                .map(|k| {
                    let mut s = FMatrix::zeros(n, t);
                    for (c, corr) in ds.corrections.iter().enumerate() {
                        for (r, p) in pick(corr).iter().enumerate() {
                            s.set(r, c, p.coeff(k));
                        }
                    }
                    s
                })
                .collect()
        };
        let (u, v) = if t == 0 { (Vec::new(), Vec::new()) } else { (stack(|c| &c.uhat), stack(|c| &c.vhat)) };
        let out = if t == 0 { Vec::new() } else { vec![FMatrix::zeros(n, n); h] };
        ResetJob { n, t, base: ds.base.clone(), u, v, out, next_row: if t == 0 { n } else { 0 } }
    }

    pub(crate) fn done(&self) -> bool {
        self.next_row >= self.n
    }

    /// Processes up to `rows` block-rows; returns the operations spent.
    pub(crate) fn step(&mut self, f: &FieldConfig, rows: usize) -> u64 {
        if self.done() {
            return 0;
        }
        let r0 = self.next_row;
        let r1 = (r0 + rows).min(self.n);
        let ur: Vec<usize> = (r0..r1).collect();
        let vr: Vec<usize> = (0..self.n).collect();
        let mut ops = 0;
        for k in 0..self.base.len() {
            let corr = stacked_slice_product(f, &self.u, &self.v, &ur, &vr, self.t, k);
            for (x, r) in (r0..r1).enumerate() {
                let dst = self.out[k].row_mut(r);
                for ((d, &b), &c) in dst.iter_mut().zip(self.base[k].row(r)).zip(corr.row(x)) {
                    *d = f.sub(b, c);
                }
            }
            ops += ((r1 - r0) * self.n) as u64 * (1 + (self.t * (k + 1)) as u64);
        }
        self.next_row = r1;
        ops
    }

    pub(crate) fn finish(self) -> Vec<Arc<FMatrix>> {
        debug_assert!(self.done());
        if self.t == 0 {
            self.base
        } else {
            self.out.into_iter().map(Arc::new).collect()
        }
    }
}

/// Maintains the slices (M⁻¹)^[d] for d ∈ S under element updates.
#[derive(Clone, Debug)]
pub struct SliceInverseDS {
    f: FieldConfig,
    n: usize,
    h: usize,
    s: Vec<usize>,
    base: Vec<Arc<FMatrix>>,
    // slice-major correction columns; the first t columns are live
    uhat: Vec<FMatrix>,
    vhat: Vec<FMatrix>,
    t: usize,
    mu_cap: usize,
    exact: ExactInverseDS,
    auto_reset: bool,
    ops: u64,
    resets: usize,
}

impl SliceInverseDS {
    /// `s` must be sorted, duplicate-free and below h. Requires M^[0] = I.
    pub fn new(f: &FieldConfig, m: &PolyMatrix, s: Vec<usize>, mu_cap: usize, nu_cap: usize) -> Result<Self> {
        let exact = ExactInverseDS::new(f, m, nu_cap)?;
        Self::from_exact(exact, s, mu_cap)
    }

    pub(crate) fn from_exact(exact: ExactInverseDS, s: Vec<usize>, mu_cap: usize) -> Result<Self> {
        let (n, h) = (exact.n, exact.h);
        check_index_set(&s, h).map_err(|_| Error::InvalidParameter("S must be sorted, distinct and below h".into()))?;
        let mu_cap = mu_cap.max(1);
        let base = s.iter().map(|&d| exact.base_slice(d).clone()).collect();
        let cap = mu_cap.clamp(1, 64);
        Ok(SliceInverseDS {
            f: exact.f,
            n,
            h,
            s,
            base,
            uhat: vec![FMatrix::zeros(n, cap); h],
            vhat: vec![FMatrix::zeros(n, cap); h],
            t: 0,
            mu_cap,
            exact,
            auto_reset: true,
            ops: 0,
            resets: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn s(&self) -> &[usize] {
        &self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn mu_cap(&self) -> usize {
        self.mu_cap
    }

    pub fn resets(&self) -> usize {
        self.resets
    }

    pub fn exact(&self) -> &ExactInverseDS {
        &self.exact
    }

    pub fn field(&self) -> &FieldConfig {
        &self.f
    }

    /// Total operations, including the internal exact structure.
    pub fn ops(&self) -> u64 {
        self.ops + self.exact.ops
    }

    pub(crate) fn set_auto_reset(&mut self, on: bool) {
        self.auto_reset = on;
    }

    pub(crate) fn exact_mut(&mut self) -> &mut ExactInverseDS {
        &mut self.exact
    }

    /// The degree-`k` slice of V̂ restricted to live columns.
    pub fn vhat_slice(&self, k: usize) -> FMatrix {
        let cols: Vec<usize> = (0..self.t).collect();
        let rows: Vec<usize> = (0..self.n).collect();
        self.vhat[k].submatrix(&rows, &cols).expect("in range")
    }

    fn grow(&mut self) {
        let cap = self.uhat[0].cols();
        if self.t < cap {
            return;
        }
        let new_cap = (cap * 2).max(1);
        for mats in [&mut self.uhat, &mut self.vhat] {
            for s in mats.iter_mut() {
                let mut g = FMatrix::zeros(self.n, new_cap);
                for r in 0..self.n {
                    g.row_mut(r)[..cap].copy_from_slice(s.row(r));
                }
                *s = g;
            }
        }
    }

    /// M[i][j] += delta (delta must have zero constant term).
    pub fn update(&mut self, i: usize, j: usize, delta: &TruncPoly) -> Result<()> {
        let pair = self.exact.prepare(i, j, delta)?;
        self.grow();
        let c = self.t;
        for k in 0..self.h {
            for r in 0..self.n {
                self.uhat[k].set(r, c, pair.uhat[r].coeff(k));
                self.vhat[k].set(r, c, pair.vhat[r].coeff(k));
            }
        }
        assert!((0..self.n).all(|r| self.vhat[0].get(r, c).is_zero()), "v̂ must have zero constant term");
        self.ops += 2 * (self.n * self.h) as u64;
        // the exact structure is always updated last
        self.exact.apply(i, j, delta, pair);
        self.t += 1;
        let slice_due = self.auto_reset && self.t >= self.mu_cap;
        let exact_due = self.exact.t() >= self.exact.nu_cap;
        if slice_due && exact_due {
            self.joint_reset();
        } else {
            if exact_due {
                self.exact.reset();
            }
            if slice_due {
                self.reset();
            }
        }
        Ok(())
    }

    fn tracked(&self, d: usize) -> Result<usize> {
        self.s.binary_search(&d).map_err(|_| Error::DegreeNotTracked(d))
    }

    /// (M⁻¹)^[d] restricted to rows I and columns J.
    pub fn query(&mut self, ri: &[usize], ci: &[usize], d: usize) -> Result<FMatrix> {
        let idx = self.tracked(d)?;
        let mut out = self.base[idx].submatrix(ri, ci)?;
        self.ops += (ri.len() * ci.len()) as u64;
        if self.t > 0 {
            let corr = stacked_slice_product(&self.f, &self.uhat, &self.vhat, ri, ci, self.t, d);
            let f = self.f;
            for (o, c) in out.data_mut().iter_mut().zip(corr.data()) {
                *o = f.sub(*o, *c);
            }
            self.ops += (ri.len() * ci.len() * self.t * (d + 1)) as u64;
        }
        Ok(out)
    }

    /// Individual entries (M⁻¹)^[d]_{i,j}, for sparse query patterns.
    pub fn query_entries(&mut self, pairs: &[(usize, usize)], d: usize) -> Result<Vec<FieldElement>> {
        let idx = self.tracked(d)?;
        let (f, t) = (self.f, self.t);
        let mut out = Vec::with_capacity(pairs.len());
        for &(i, j) in pairs {
            if i >= self.n || j >= self.n {
                return Err(Error::IndexOutOfRange { index: i.max(j), len: self.n });
            }
            let mut v = self.base[idx].get(i, j);
            for k in 0..=d {
                let c = f.dot(&self.uhat[k].row(i)[..t], &self.vhat[d - k].row(j)[..t]);
                v = f.sub(v, FieldElement(c));
            }
            out.push(v);
        }
        self.ops += pairs.len() as u64 * (1 + (t * (d + 1)) as u64);
        Ok(out)
    }

    /// Folds the corrections into the tracked slices; the exact structure
    /// keeps its own schedule.
    pub fn reset(&mut self) {
        let all: Vec<usize> = (0..self.n).collect();
        let s = self.s.clone();
        let fresh: Vec<Arc<FMatrix>> =
            s.iter().map(|&d| Arc::new(self.query(&all, &all, d).expect("tracked"))).collect();
        self.base = fresh;
        self.t = 0;
        self.resets += 1;
    }

    // Both structures reset on the same update: materialize the exact base
    // once and share its slices.
    fn joint_reset(&mut self) {
        self.exact.reset();
        self.adopt_exact_base();
    }

    pub(crate) fn adopt_exact_base(&mut self) {
        self.base = self.s.iter().map(|&d| self.exact.base_slice(d).clone()).collect();
        self.t = 0;
        self.resets += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Reset,
    CatchUp,
    Available,
}

#[derive(Clone, Debug)]
struct Copy {
    ds: SliceInverseDS,
    phase: Phase,
    step: usize,
    queue: VecDeque<(usize, usize, TruncPoly)>,
    job: Option<ResetJob>,
}

/// Two phase-shifted [`SliceInverseDS`] copies with the reset spread over
/// updates. Each life-cycle has four quarters of μ/4 updates: one quarter of
/// chunked reset (updates are queued), one quarter of catch-up (two queued
/// updates per incoming one), then two quarters of being the answering copy.
/// The exact sub-structure resets together with its copy.
#[derive(Clone, Debug)]
pub struct WorstCaseWrapper {
    copies: [Copy; 2],
    quarter: usize,
    rows_per_chunk: usize,
    op_log: Vec<u64>,
}

impl WorstCaseWrapper {
    pub fn new(f: &FieldConfig, m: &PolyMatrix, s: Vec<usize>, mu_cap: usize, nu_cap: usize) -> Result<Self> {
        let exact = ExactInverseDS::new(f, m, nu_cap)?;
        Self::from_exact(exact, s, mu_cap, nu_cap)
    }

    pub(crate) fn from_exact(mut exact: ExactInverseDS, s: Vec<usize>, mu_cap: usize, nu_cap: usize) -> Result<Self> {
        let mu_cap = mu_cap.max(1);
        // joint resets replace the exact structure's own schedule unless it is shorter
        if nu_cap >= mu_cap {
            exact.set_nu_cap(usize::MAX);
        }
        let mut ds = SliceInverseDS::from_exact(exact, s, mu_cap)?;
        ds.set_auto_reset(false);
        let quarter = (mu_cap / 4).max(1);
        let n = ds.n();
        let first = Copy {
            job: Some(ResetJob::new(ds.exact())),
            ds: ds.clone(),
            phase: Phase::Reset,
            step: 0,
            queue: VecDeque::new(),
        };
        let second = Copy { ds, phase: Phase::Available, step: 0, queue: VecDeque::new(), job: None };
        Ok(WorstCaseWrapper {
            copies: [first, second],
            quarter,
            rows_per_chunk: n.div_ceil(quarter).max(1),
            op_log: Vec::new(),
        })
    }

    fn available(&self) -> &Copy {
        self.copies.iter().find(|c| c.phase == Phase::Available).expect("one copy is always available")
    }

    fn available_mut(&mut self) -> &mut Copy {
        self.copies.iter_mut().find(|c| c.phase == Phase::Available).expect("one copy is always available")
    }

    /// The answering copy.
    pub fn current(&self) -> &SliceInverseDS {
        &self.available().ds
    }

    pub fn n(&self) -> usize {
        self.current().n()
    }

    pub fn h(&self) -> usize {
        self.current().h()
    }

    pub fn s(&self) -> &[usize] {
        self.current().s()
    }

    pub fn field(&self) -> &FieldConfig {
        self.current().field()
    }

    /// Operations spent by each update call so far.
    pub fn op_log(&self) -> &[u64] {
        &self.op_log
    }

    pub fn ops(&self) -> u64 {
        self.copies.iter().map(|c| c.ds.ops()).sum()
    }

    pub fn update(&mut self, i: usize, j: usize, delta: &TruncPoly) -> Result<()> {
        let n = self.n();
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange { index: i.max(j), len: n });
        }
        if delta.h() != self.h() {
            return Err(Error::DegreeMismatch { left: self.h(), right: delta.h() });
        }
        if !delta.constant_term().is_zero() {
            return Err(Error::ConstantTermUpdate);
        }
        let before = self.ops();
        let (q, chunk) = (self.quarter, self.rows_per_chunk);
        for c in self.copies.iter_mut() {
            let mut job_ops = 0;
            match c.phase {
                Phase::Reset => {
                    c.queue.push_back((i, j, delta.clone()));
                    let job = c.job.as_mut().expect("reset phase owns a job");
                    job_ops += job.step(c.ds.field(), chunk);
                    c.step += 1;
                    if c.step == q {
                        let mut job = c.job.take().expect("job present");
                        while !job.done() {
                            job_ops += job.step(c.ds.field(), chunk);
                        }
                        c.ds.exact_mut().install(job.finish());
                        c.ds.adopt_exact_base();
                        c.phase = Phase::CatchUp;
                        c.step = 0;
                    }
                }
                Phase::CatchUp => {
                    c.queue.push_back((i, j, delta.clone()));
                    for _ in 0..2 {
                        if let Some((a, b, d)) = c.queue.pop_front() {
                            c.ds.update(a, b, &d)?;
                        }
                    }
                    c.step += 1;
                    if c.step == q {
                        debug_assert!(c.queue.is_empty());
                        c.phase = Phase::Available;
                        c.step = 0;
                    }
                }
                Phase::Available => {
                    c.ds.update(i, j, delta)?;
                    c.step += 1;
                    if c.step == 2 * q {
                        c.job = Some(ResetJob::new(c.ds.exact()));
                        job_ops += (2 * c.ds.t() * c.ds.n() * c.ds.h()) as u64;
                        c.phase = Phase::Reset;
                        c.step = 0;
                    }
                }
            }
            c.ds.exact_mut().ops += job_ops;
        }
        self.op_log.push(self.ops() - before);
        Ok(())
    }

    pub fn query(&mut self, ri: &[usize], ci: &[usize], d: usize) -> Result<FMatrix> {
        self.available_mut().ds.query(ri, ci, d)
    }

    pub fn query_entries(&mut self, pairs: &[(usize, usize)], d: usize) -> Result<Vec<FieldElement>> {
        self.available_mut().ds.query_entries(pairs, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff_poly::rng_from_seed;
    use crate::polymatrix::neumann_inverse;
    use rand::Rng as _;

    fn f() -> FieldConfig {
        FieldConfig::mersenne61()
    }

    fn rand_delta(f: &FieldConfig, h: usize, rng: &mut crate::ff_poly::Rng) -> TruncPoly {
        let mut c = vec![FieldElement::ZERO; h];
        for x in c.iter_mut().skip(1) {
            if rng.gen_bool(0.5) {
                *x = f.sample(rng);
            }
        }
        TruncPoly::from_elems(c)
    }

    #[test]
    fn exact_identity_and_nilpotent() {
        let f = f();
        let mut ds = ExactInverseDS::new(&f, &PolyMatrix::identity(3, 2), 4).unwrap();
        let row = ds.query_row(1).unwrap();
        assert_eq!(row[1], TruncPoly::one(2));
        assert!(row[0].is_zero() && row[2].is_zero());
        let mut m = PolyMatrix::identity(2, 3);
        m.slice_mut(1).set(0, 1, f.neg(FieldElement::ONE));
        let mut ds = ExactInverseDS::new(&f, &m, 4).unwrap();
        assert_eq!(ds.query_row(0).unwrap()[1], TruncPoly::monomial(3, FieldElement::ONE, 1));
    }

    #[test]
    fn exact_single_update_hand_expanded() {
        // M = I + X·E01 has inverse row 0 equal to (1, −X)
        let f = f();
        let mut ds = ExactInverseDS::new(&f, &PolyMatrix::identity(2, 3), 8).unwrap();
        ds.update(0, 1, &TruncPoly::monomial(3, FieldElement::ONE, 1)).unwrap();
        let row = ds.query_row(0).unwrap();
        assert_eq!(row[0], TruncPoly::one(3));
        assert_eq!(row[1], TruncPoly::monomial(3, f.neg(FieldElement::ONE), 1));
    }

    #[test]
    fn exact_rejects_constant_term() {
        let f = f();
        let mut ds = ExactInverseDS::new(&f, &PolyMatrix::identity(2, 3), 8).unwrap();
        assert_eq!(ds.update(0, 1, &TruncPoly::one(3)), Err(Error::ConstantTermUpdate));
        assert!(matches!(ds.query_row(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn exact_matches_reinversion_over_stream() {
        let f = f();
        let (n, h) = (8, 8);
        let mut rng = rng_from_seed(21);
        let mut m = PolyMatrix::identity(n, h);
        let mut ds = ExactInverseDS::new(&f, &m, 7).unwrap();
        for _ in 0..50 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let d = rand_delta(&f, h, &mut rng);
            ds.update(i, j, &d).unwrap();
            let e = m.entry(i, j).add(&d, &f).unwrap();
            m.set_entry(i, j, &e).unwrap();
            let inv = neumann_inverse(&f, &m).unwrap();
            for r in 0..n {
                let row = ds.query_row(r).unwrap();
                let col = ds.query_col(r).unwrap();
                for c in 0..n {
                    assert_eq!(row[c], inv.entry(r, c));
                    assert_eq!(col[c], inv.entry(c, r));
                }
            }
            assert_eq!(ds.current_matrix(), m);
        }
        assert!(ds.resets() >= 7);
    }

    #[test]
    fn slice_structure_tracks_inverse() {
        let f = f();
        let (n, h) = (6, 6);
        let s = vec![0, 2, 5];
        let mut rng = rng_from_seed(22);
        let mut m = PolyMatrix::identity(n, h);
        let mut ds = SliceInverseDS::new(&f, &m, s.clone(), 5, 3).unwrap();
        let all: Vec<usize> = (0..n).collect();
        for step in 0..30 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let d = rand_delta(&f, h, &mut rng);
            ds.update(i, j, &d).unwrap();
            let e = m.entry(i, j).add(&d, &f).unwrap();
            m.set_entry(i, j, &e).unwrap();
            let inv = neumann_inverse(&f, &m).unwrap();
            for &k in &s {
                assert_eq!(&ds.query(&all, &all, k).unwrap(), inv.slice(k), "step {step} degree {k}");
                let got = ds.query_entries(&[(0, 1), (n - 1, 2)], k).unwrap();
                assert_eq!(got, vec![inv.slice(k).get(0, 1), inv.slice(k).get(n - 1, 2)]);
            }
            assert!(ds.vhat_slice(0).is_zero());
        }
        assert_eq!(ds.resets(), 6);
        assert_eq!(ds.query(&all, &all, 1), Err(Error::DegreeNotTracked(1)));
    }

    #[test]
    fn reset_count_is_one_query_per_slice() {
        let f = f();
        let n = 5;
        let mut ds = SliceInverseDS::new(&f, &PolyMatrix::identity(n, 4), vec![1, 3], 100, 100).unwrap();
        let mut rng = rng_from_seed(23);
        for _ in 0..4 {
            let d = rand_delta(&f, 4, &mut rng);
            ds.update(rng.gen_range(0..n), rng.gen_range(0..n), &d).unwrap();
        }
        let all: Vec<usize> = (0..n).collect();
        let mut probe = ds.clone();
        let o0 = probe.ops();
        probe.query(&all, &all, 1).unwrap();
        probe.query(&all, &all, 3).unwrap();
        let query_cost = probe.ops() - o0;
        let before: Vec<FMatrix> = [1, 3].iter().map(|&d| ds.clone().query(&all, &all, d).unwrap()).collect();
        let o1 = ds.ops();
        ds.reset();
        assert_eq!(ds.ops() - o1, query_cost);
        for (k, &d) in [1, 3].iter().enumerate() {
            assert_eq!(ds.query(&all, &all, d).unwrap(), before[k]);
        }
    }

    #[test]
    fn wrapper_matches_unwrapped() {
        let f = f();
        let (n, h) = (6, 5);
        let s = vec![1, 2, 4];
        let mut rng = rng_from_seed(24);
        let m = PolyMatrix::identity(n, h);
        let mut plain = SliceInverseDS::new(&f, &m, s.clone(), 8, 8).unwrap();
        let mut wrapped = WorstCaseWrapper::new(&f, &m, s.clone(), 8, 8).unwrap();
        let all: Vec<usize> = (0..n).collect();
        for &d in &s {
            assert_eq!(plain.query(&all, &all, d).unwrap(), wrapped.query(&all, &all, d).unwrap());
        }
        for _ in 0..60 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let d = rand_delta(&f, h, &mut rng);
            plain.update(i, j, &d).unwrap();
            wrapped.update(i, j, &d).unwrap();
            for &d in &s {
                assert_eq!(plain.query(&all, &all, d).unwrap(), wrapped.query(&all, &all, d).unwrap());
            }
        }
        assert_eq!(wrapped.op_log().len(), 60);
    }
}
