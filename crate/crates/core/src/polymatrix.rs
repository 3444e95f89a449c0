//! Dense matrices over Z_p and over F[X]/<X^h>, stored slice-major.
//!
//! A [`PolyMatrix`] keeps one [`FMatrix`] per degree, so every polynomial
//! matrix operation reduces to plain field-matrix products.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ff_poly::{FieldConfig, FieldElement, TruncPoly};

/// Row-major matrix over Z_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FMatrix { rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = FieldElement::ONE;
        }
        m
    }

    pub fn from_elems(rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} values for a {rows}x{cols} matrix", data.len())));
        }
        Ok(FMatrix { rows, cols, data })
    }

    pub fn from_u64(f: &FieldConfig, rows: usize, cols: usize, vals: &[u64]) -> Result<Self> {
        Self::from_elems(rows, cols, vals.iter().map(|&v| f.elem(v)).collect())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [FieldElement] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [FieldElement] {
        &mut self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self, f: &FieldConfig) -> Result<Self> {
        self.same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(FMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, o: &Self, f: &FieldConfig) -> Result<Self> {
        self.same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(FMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self, f: &FieldConfig) -> Self {
        FMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.neg(a)).collect() }
    }

    pub fn scale(&self, c: FieldElement, f: &FieldConfig) -> Self {
        FMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.mul(a, c)).collect() }
    }

    /// Rows `ri` by columns `ci`; both must be sorted and duplicate-free.
    pub fn submatrix(&self, ri: &[usize], ci: &[usize]) -> Result<Self> {
        check_index_set(ri, self.rows)?;
        check_index_set(ci, self.cols)?;
        let mut data = Vec::with_capacity(ri.len() * ci.len());
        for &i in ri {
            let row = self.row(i);
            data.extend(ci.iter().map(|&j| row[j]));
        }
        Ok(FMatrix { rows: ri.len(), cols: ci.len(), data })
    }
}

/// Validates a query index set: strictly increasing and below `len`.
pub fn check_index_set(idx: &[usize], len: usize) -> Result<()> {
    for (k, &i) in idx.iter().enumerate() {
        if i >= len {
            return Err(Error::IndexOutOfRange { index: i, len });
        }
        if k > 0 && idx[k - 1] >= i {
            return Err(Error::ShapeMismatch(format!("index set not sorted and duplicate-free at position {k}")));
        }
    }
    Ok(())
}

// Below this many multiply-adds the rayon split costs more than it saves.
const PAR_THRESHOLD: usize = 1 << 15;
const COL_BLOCK: usize = 512;

/// Σ_t A_t·B_t for same-shaped pairs, accumulated lazily in u128.
///
/// Row-axpy order: for each row of the output, stream the rows of every B_t
/// scaled by the nonzero entries of A_t. Zero entries of the left factor cost
/// nothing, which makes products with sparse encodings cheap.
pub(crate) fn mul_sum(f: &FieldConfig, pairs: &[(&FMatrix, &FMatrix)], rows: usize, cols: usize) -> FMatrix {
    let mut out = FMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 || pairs.is_empty() {
        return out;
    }
    let chunk = f.lazy() - 1;
    let work: usize = pairs.iter().map(|(a, _)| a.cols).sum::<usize>() * rows * cols;
    let kernel = |i: usize, orow: &mut [FieldElement]| {
        let mut acc = vec![0u128; COL_BLOCK.min(cols)];
        for j0 in (0..cols).step_by(COL_BLOCK) {
            let jw = COL_BLOCK.min(cols - j0);
            let acc = &mut acc[..jw];
            acc.fill(0);
            let mut cnt = 0;
            for (a, b) in pairs {
                let arow = a.row(i);
                for (k, av) in arow.iter().enumerate() {
                    if av.is_zero() {
                        continue;
                    }
                    let av = av.0 as u128;
                    let brow = &b.data[k * cols + j0..k * cols + j0 + jw];
                    for (x, bv) in acc.iter_mut().zip(brow) {
                        *x += av * bv.0 as u128;
                    }
                    cnt += 1;
                    if cnt == chunk {
                        for x in acc.iter_mut() {
                            *x = f.reduce(*x) as u128;
                        }
                        cnt = 0;
                    }
                }
            }
            for (o, x) in orow[j0..j0 + jw].iter_mut().zip(acc.iter()) {
                *o = FieldElement(f.reduce(*x));
            }
        }
    };
    if work >= PAR_THRESHOLD && rows > 1 {
        out.data.par_chunks_mut(cols).enumerate().for_each(|(i, orow)| kernel(i, orow));
    } else {
        out.data.chunks_mut(cols).enumerate().for_each(|(i, orow)| kernel(i, orow));
    }
    out
}

/// Exact product A·B over Z_p.
pub fn fmat_mul(f: &FieldConfig, a: &FMatrix, b: &FMatrix) -> Result<FMatrix> {
    if a.cols != b.rows {
        return Err(Error::ShapeMismatch(format!("{}x{} times {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    Ok(mul_sum(f, &[(a, b)], a.rows, b.cols))
}

/// Reference triple loop with a reduction after every product.
pub fn fmat_mul_naive(f: &FieldConfig, a: &FMatrix, b: &FMatrix) -> Result<FMatrix> {
    if a.cols != b.rows {
        return Err(Error::ShapeMismatch(format!("{}x{} times {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    let mut out = FMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut s = FieldElement::ZERO;
            for k in 0..a.cols {
                s = f.add(s, f.mul(a.get(i, k), b.get(k, j)));
            }
            out.set(i, j, s);
        }
    }
    Ok(out)
}

/// A·Bᵀ by row dot products; both operands are read row-wise.
pub fn fmat_mul_abt(f: &FieldConfig, a: &FMatrix, b: &FMatrix) -> Result<FMatrix> {
    if a.cols != b.cols {
        return Err(Error::ShapeMismatch(format!("{}x{} times ({}x{})^T", a.rows, a.cols, b.rows, b.cols)));
    }
    let mut out = FMatrix::zeros(a.rows, b.rows);
    if b.rows == 0 {
        return Ok(out);
    }
    let kernel = |i: usize, orow: &mut [FieldElement]| {
        let arow = a.row(i);
        for (j, o) in orow.iter_mut().enumerate() {
            *o = FieldElement(f.dot(arow, b.row(j)));
        }
    };
    if a.rows * b.rows * a.cols >= PAR_THRESHOLD && a.rows > 1 {
        out.data.par_chunks_mut(b.rows).enumerate().for_each(|(i, r)| kernel(i, r));
    } else {
        out.data.chunks_mut(b.rows).enumerate().for_each(|(i, r)| kernel(i, r));
    }
    Ok(out)
}

/// Matrix over F[X]/<X^h> as h coefficient slices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    slices: Vec<FMatrix>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, h: usize) -> Self {
        PolyMatrix { rows, cols, slices: vec![FMatrix::zeros(rows, cols); h] }
    }

    pub fn identity(n: usize, h: usize) -> Self {
        let mut m = Self::zeros(n, n, h);
        if h > 0 {
            m.slices[0] = FMatrix::identity(n);
        }
        m
    }

    pub fn from_slices(slices: Vec<FMatrix>) -> Result<Self> {
        let Some(first) = slices.first() else {
            return Err(Error::ShapeMismatch("no slices".into()));
        };
        let (rows, cols) = (first.rows, first.cols);
        if slices.iter().any(|s| s.rows != rows || s.cols != cols) {
            return Err(Error::ShapeMismatch("slices differ in shape".into()));
        }
        Ok(PolyMatrix { rows, cols, slices })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn h(&self) -> usize {
        self.slices.len()
    }

    pub fn slice(&self, k: usize) -> &FMatrix {
        &self.slices[k]
    }

    pub fn slice_mut(&mut self, k: usize) -> &mut FMatrix {
        &mut self.slices[k]
    }

    pub fn slices(&self) -> &[FMatrix] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<FMatrix> {
        self.slices
    }

    pub fn entry(&self, i: usize, j: usize) -> TruncPoly {
        TruncPoly::from_elems(self.slices.iter().map(|s| s.get(i, j)).collect())
    }

    pub fn set_entry(&mut self, i: usize, j: usize, p: &TruncPoly) -> Result<()> {
        if p.h() != self.h() {
            return Err(Error::DegreeMismatch { left: self.h(), right: p.h() });
        }
        for (s, &c) in self.slices.iter_mut().zip(p.coeffs()) {
            s.set(i, j, c);
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        PolyMatrix { rows: self.cols, cols: self.rows, slices: self.slices.iter().map(FMatrix::transpose).collect() }
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.h() != o.h() {
            return Err(Error::DegreeMismatch { left: self.h(), right: o.h() });
        }
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self, f: &FieldConfig) -> Result<Self> {
        self.same_shape(o)?;
        let slices = self.slices.iter().zip(&o.slices).map(|(a, b)| a.add(b, f)).collect::<Result<_>>()?;
        Ok(PolyMatrix { rows: self.rows, cols: self.cols, slices })
    }

    pub fn sub(&self, o: &Self, f: &FieldConfig) -> Result<Self> {
        self.same_shape(o)?;
        let slices = self.slices.iter().zip(&o.slices).map(|(a, b)| a.sub(b, f)).collect::<Result<_>>()?;
        Ok(PolyMatrix { rows: self.rows, cols: self.cols, slices })
    }

    pub fn submatrix(&self, ri: &[usize], ci: &[usize]) -> Result<Self> {
        let slices = self.slices.iter().map(|s| s.submatrix(ri, ci)).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix { rows: ri.len(), cols: ci.len(), slices })
    }

    /// True when slice 0 is the identity, the form every inverse routine needs.
    pub fn has_identity_constant(&self) -> bool {
        self.rows == self.cols && self.h() > 0 && self.slices[0] == FMatrix::identity(self.rows)
    }
}

/// (AB)^[k] = Σ_{i≤k} A^[i]·B^[k−i], skipping zero slices.
pub fn polymat_mul(f: &FieldConfig, a: &PolyMatrix, b: &PolyMatrix) -> Result<PolyMatrix> {
    if a.h() != b.h() {
        return Err(Error::DegreeMismatch { left: a.h(), right: b.h() });
    }
    if a.cols != b.rows {
        return Err(Error::ShapeMismatch(format!("{}x{} times {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    let az: Vec<bool> = a.slices.iter().map(FMatrix::is_zero).collect();
    let bz: Vec<bool> = b.slices.iter().map(FMatrix::is_zero).collect();
    let slices = (0..a.h())
        .map(|k| {
            let pairs: Vec<_> =
                (0..=k).filter(|&i| !az[i] && !bz[k - i]).map(|i| (&a.slices[i], &b.slices[k - i])).collect();
            mul_sum(f, &pairs, a.rows, b.cols)
        })
        .collect();
    Ok(PolyMatrix { rows: a.rows, cols: b.cols, slices })
}

/// Inverse of M with M^[0] = I by the doubling product
/// (I + N)(I + N^2)(I + N^4)…, where N = I − M has zero constant term.
pub fn neumann_inverse(f: &FieldConfig, m: &PolyMatrix) -> Result<PolyMatrix> {
    if !m.has_identity_constant() {
        return Err(Error::BadForm);
    }
    let (n, h) = (m.rows, m.h());
    let mut p = neg_tail(f, m);
    let mut r = PolyMatrix::identity(n, h);
    let mut span = 1;
    while span < h {
        r = r.add(&polymat_mul(f, &r, &p)?, f)?;
        span *= 2;
        if span < h {
            p = polymat_mul(f, &p, &p)?;
        }
    }
    Ok(r)
}

/// Inverse of M with M^[0] = I by the degree recurrence
/// R^[d] = Σ_{c=1..d} N^[c]·R^[d−c]. Zero entries of the sparse N slices are
/// skipped by the kernel, so for graph encodings this is far cheaper than
/// the doubling product while producing the identical result.
pub fn series_inverse(f: &FieldConfig, m: &PolyMatrix) -> Result<PolyMatrix> {
    if !m.has_identity_constant() {
        return Err(Error::BadForm);
    }
    let (n, h) = (m.rows, m.h());
    let nm = neg_tail(f, m);
    let nz: Vec<bool> = nm.slices.iter().map(FMatrix::is_zero).collect();
    let mut slices = Vec::with_capacity(h);
    slices.push(FMatrix::identity(n));
    for d in 1..h {
        let pairs: Vec<_> = (1..=d).filter(|&c| !nz[c]).map(|c| (&nm.slices[c], &slices[d - c])).collect();
        let next = mul_sum(f, &pairs, n, n);
        slices.push(next);
    }
    Ok(PolyMatrix { rows: n, cols: n, slices })
}

// N = I − M given M^[0] = I: zero constant slice, negated higher slices.
fn neg_tail(f: &FieldConfig, m: &PolyMatrix) -> PolyMatrix {
    let mut slices = Vec::with_capacity(m.h());
    slices.push(FMatrix::zeros(m.rows, m.cols));
    slices.extend(m.slices[1..].iter().map(|s| s.neg(f)));
    PolyMatrix { rows: m.rows, cols: m.cols, slices }
}

/// (U Vᵀ)^[k] as one product of stacked slices [U^[0]|…|U^[k]]·[V^[k]|…|V^[0]]ᵀ.
pub fn coeff_slice_product(f: &FieldConfig, u: &PolyMatrix, v: &PolyMatrix, k: usize) -> Result<FMatrix> {
    if u.h() != v.h() {
        return Err(Error::DegreeMismatch { left: u.h(), right: v.h() });
    }
    if u.cols != v.cols {
        return Err(Error::ShapeMismatch(format!("inner widths {} and {}", u.cols, v.cols)));
    }
    if k >= u.h() {
        return Err(Error::DegreeNotTracked(k));
    }
    let ur: Vec<usize> = (0..u.rows).collect();
    let vr: Vec<usize> = (0..v.rows).collect();
    Ok(stacked_slice_product(f, &u.slices, &v.slices, &ur, &vr, u.cols, k))
}

/// Stacked-slice product restricted to rows `ur` of U, rows `vr` of V and the
/// first `t` columns of both. Shared by the slice structure's queries.
pub(crate) fn stacked_slice_product(
    f: &FieldConfig,
    u: &[FMatrix],
    v: &[FMatrix],
    ur: &[usize],
    vr: &[usize],
    t: usize,
    k: usize,
) -> FMatrix {
    let w = (k + 1) * t;
    let mut l = Vec::with_capacity(ur.len() * w);
    for &r in ur {
        for s in &u[..=k] {
            l.extend_from_slice(&s.row(r)[..t]);
        }
    }
    let mut rt = Vec::with_capacity(vr.len() * w);
    for &r in vr {
        for s in v[..=k].iter().rev() {
            rt.extend_from_slice(&s.row(r)[..t]);
        }
    }
    let l = FMatrix { rows: ur.len(), cols: w, data: l };
    let rt = FMatrix { rows: vr.len(), cols: w, data: rt };
    fmat_mul_abt(f, &l, &rt).expect("stacked widths agree")
}
