//! (min,+) algebra on distance matrices: exact and (1+ε)-approximate
//! products, approximate closure, and the hub composition for long paths.
//!
//! Approximate products use per-scale rounding: for each power of two B
//! covering the entry range, entries ≤ B are rounded up to multiples of B/R,
//! the resulting small-integer product is taken exactly, and the scales are
//! combined by an entry-wise minimum. Rounding only ever goes up, so the
//! result never underestimates the exact product.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphenc::INF;

/// Dense matrix of nonnegative reals or ∞.
#[derive(Clone, Debug, PartialEq)]
pub struct DistMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DistMatrix {
    pub fn filled(rows: usize, cols: usize, v: f64) -> Self {
        DistMatrix { rows, cols, data: vec![v; rows * cols] }
    }

    pub fn inf(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, INF)
    }

    /// The (min,+) identity: 0 on the diagonal, ∞ elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::inf(n, n);
        for i in 0..n {
            m.set(i, i, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} values for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|&x| x.is_nan() || x < 0.0) {
            return Err(Error::InvalidParameter("distances must be nonnegative".into()));
        }
        Ok(DistMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::inf(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Rows `ri` and columns `ci`, in the given order.
    pub fn select(&self, ri: &[usize], ci: &[usize]) -> Self {
        let mut data = Vec::with_capacity(ri.len() * ci.len());
        for &i in ri {
            data.extend(ci.iter().map(|&j| self.get(i, j)));
        }
        DistMatrix { rows: ri.len(), cols: ci.len(), data }
    }

    /// Entry-wise minimum.
    pub fn min_with(&self, o: &Self) -> Result<Self> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| a.min(b)).collect();
        Ok(DistMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Largest finite entry, or 0 when there is none.
    pub fn max_finite(&self) -> f64 {
        self.data.iter().filter(|x| x.is_finite()).fold(0.0, |a, &b| a.max(b))
    }
}

fn check_inner(a: &DistMatrix, b: &DistMatrix) -> Result<()> {
    if a.cols != b.rows {
        return Err(Error::ShapeMismatch(format!("{}x{} star {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    Ok(())
}

/// C[i,j] = min_k A[i,k] + B[k,j].
pub fn minplus_exact(a: &DistMatrix, b: &DistMatrix) -> Result<DistMatrix> {
    check_inner(a, b)?;
    let mut c = DistMatrix::inf(a.rows, b.cols);
    let cols = b.cols;
    if cols == 0 {
        return Ok(c);
    }
    c.data.par_chunks_mut(cols).enumerate().for_each(|(i, crow)| {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if aik == INF {
                continue;
            }
            for (x, &bkj) in crow.iter_mut().zip(b.row(k)) {
                let s = aik + bkj;
                if s < *x {
                    *x = s;
                }
            }
        }
    });
    Ok(c)
}

const UINF: u32 = u32::MAX;

/// ⌈x·R/B⌉ with a guard so the descaled value never falls below x.
fn round_up(x: f64, r: f64, b: f64) -> u32 {
    let mut q = (x * r / b).ceil();
    while q * b / r < x {
        q += 1.0;
    }
    q as u32
}

/// Entry-wise exact ≤ C ≤ (1+ε)·exact.
pub fn minplus_approx(a: &DistMatrix, b: &DistMatrix, eps: f64) -> Result<DistMatrix> {
    check_inner(a, b)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} must be positive")));
    }
    let (n, inner, m) = (a.rows, a.cols, b.cols);
    let mut out = DistMatrix::inf(n, m);
    if n == 0 || m == 0 || inner == 0 {
        return Ok(out);
    }
    let pos = a.data.iter().chain(&b.data).filter(|x| x.is_finite() && **x > 0.0);
    let (lo, hi) = pos.fold((INF, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let r = (4.0 / eps).ceil();
    // without positive finite entries only zeros and ∞ remain, handled by any scale
    let (e_lo, e_hi) = if hi == 0.0 { (0, 0) } else { (lo.log2().floor() as i32, hi.log2().ceil() as i32) };
    for e in e_lo..=e_hi {
        let scale = 2f64.powi(e);
        let quant = |x: f64| if x <= scale { round_up(x, r, scale) } else { UINF };
        let qa: Vec<u32> = a.data.iter().map(|&x| quant(x)).collect();
        let qb: Vec<u32> = b.data.iter().map(|&x| quant(x)).collect();
        out.data.par_chunks_mut(m).enumerate().for_each(|(i, orow)| {
            let mut best = vec![UINF; m];
            for k in 0..inner {
                let x = qa[i * inner + k];
                if x == UINF {
                    continue;
                }
                for (o, &y) in best.iter_mut().zip(&qb[k * m..(k + 1) * m]) {
                    if y != UINF && x + y < *o {
                        *o = x + y;
                    }
                }
            }
            for (o, &q) in orow.iter_mut().zip(&best) {
                if q != UINF {
                    let v = q as f64 * scale / r;
                    if v < *o {
                        *o = v;
                    }
                }
            }
        });
    }
    Ok(out)
}

/// Approximate (min,+) closure: zero the diagonal, then ⌈log₂ n⌉ squarings
/// at ε/(2⌈log₂ n⌉) each.
pub fn minplus_power(d: &DistMatrix, eps: f64) -> Result<DistMatrix> {
    if d.rows != d.cols {
        return Err(Error::ShapeMismatch(format!("power of a {}x{} matrix", d.rows, d.cols)));
    }
    let n = d.rows;
    let mut cur = d.clone();
    for i in 0..n {
        cur.set(i, i, 0.0);
    }
    let levels = (n.max(1) as f64).log2().ceil() as usize;
    if levels == 0 {
        return Ok(cur);
    }
    let e = eps / (2.0 * levels as f64);
    for _ in 0..levels {
        cur = minplus_approx(&cur, &cur, e)?;
    }
    Ok(cur)
}

/// D_{V,H} ⋆ closure(D_{H,H}) ⋆ D_{H,V} with the ε budget split three ways.
/// Callers combine the result with D by an entry-wise minimum.
pub fn extend_to_long_hops(d: &DistMatrix, hubs: &[usize], eps: f64) -> Result<DistMatrix> {
    if d.rows != d.cols {
        return Err(Error::ShapeMismatch(format!("hub extension of a {}x{} matrix", d.rows, d.cols)));
    }
    let n = d.rows;
    if hubs.is_empty() {
        return Ok(DistMatrix::inf(n, n));
    }
    let e = (1.0 + eps).cbrt() - 1.0;
    let all: Vec<usize> = (0..n).collect();
    let hh = minplus_power(&d.select(hubs, hubs), e)?;
    let vh = minplus_approx(&d.select(&all, hubs), &hh, e)?;
    minplus_approx(&vh, &d.select(hubs, &all), e)
}
