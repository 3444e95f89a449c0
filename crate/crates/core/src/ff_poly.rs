//! Arithmetic over a prime field Z_p and over truncated polynomials F[X]/<X^h>.
//!
//! Elements are plain `u64` residues; every operation takes the [`FieldConfig`]
//! explicitly so that the hot kernels can work on raw slices.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

/// 2^61 - 1, the default modulus.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// The generator behind every random choice in the crate: ChaCha20, a
/// counter-based stream cipher, seeded with `SeedableRng::seed_from_u64`.
/// Golden values in the tests depend on this choice.
pub type Rng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Residue in `[0, p)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct FieldElement(pub(crate) u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The prime modulus plus precomputed reduction data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldConfig {
    p: u64,
    mersenne: bool,
    mask: u64,
    // how many products (p-1)^2 fit in a u128 accumulator
    lazy: usize,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self::mersenne61()
    }
}

impl FieldConfig {
    /// Checks primality (deterministic for all u64) and the `p < 2^62` bound.
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 62 {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let sq = ((p - 1) as u128) * ((p - 1) as u128);
        let lazy = (u128::MAX / sq.max(1)).min(1 << 20) as usize;
        let bits = 64 - (p - 1).leading_zeros();
        let mask = if bits >= 64 { u64::MAX } else { (1u64 << bits.max(1)) - 1 };
        Ok(FieldConfig { p, mersenne: p == MERSENNE_61, mask, lazy: lazy.max(2) })
    }

    pub fn mersenne61() -> Self {
        Self::new(MERSENNE_61).expect("2^61-1 is prime")
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Maximum number of raw products that may be summed in a u128 before reducing.
    #[inline]
    pub(crate) fn lazy(&self) -> usize {
        self.lazy
    }

    /// Schwartz-Zippel budget check: p must exceed h*n^2 by a factor 2^20.
    pub fn check_budget(&self, h: usize, n: usize) -> Result<()> {
        let need = ((h.max(1) as u128) * (n.max(1) as u128) * (n.max(1) as u128)) << 20;
        if (self.p as u128) < need {
            return Err(Error::PrimeTooSmall { p: self.p, h, n });
        }
        Ok(())
    }

    #[inline]
    pub fn elem(&self, x: u64) -> FieldElement {
        FieldElement(x % self.p)
    }

    pub fn from_i64(&self, x: i64) -> FieldElement {
        let r = x.rem_euclid(self.p as i64);
        FieldElement(r as u64)
    }

    #[inline]
    pub(crate) fn reduce(&self, x: u128) -> u64 {
        if self.mersenne {
            let p = MERSENNE_61 as u128;
            let y = (x & p) + (x >> 61);
            let y = (y & p) + (y >> 61);
            let r = y as u64;
            if r >= MERSENNE_61 {
                r - MERSENNE_61
            } else {
                r
            }
        } else {
            (x % self.p as u128) as u64
        }
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add_raw(a.0, b.0))
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 >= b.0 {
            FieldElement(a.0 - b.0)
        } else {
            FieldElement(a.0 + self.p - b.0)
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if a.0 == 0 {
            a
        } else {
            FieldElement(self.p - a.0)
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.reduce(a.0 as u128 * b.0 as u128))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement(1 % self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by Fermat's little theorem.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// Uniform draw by rejection: mask to the bit length of p-1, retry on >= p.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> FieldElement {
        loop {
            let x = rng.next_u64() & self.mask;
            if x < self.p {
                debug_assert!(x < self.p);
                return FieldElement(x);
            }
        }
    }

    /// Sum of a[i]*b[i] with lazy u128 accumulation.
    pub(crate) fn dot(&self, a: &[FieldElement], b: &[FieldElement]) -> u64 {
        let mut total = 0u64;
        for (ca, cb) in a.chunks(self.lazy - 1).zip(b.chunks(self.lazy - 1)) {
            let mut acc = 0u128;
            for (x, y) in ca.iter().zip(cb) {
                acc += x.0 as u128 * y.0 as u128;
            }
            total = self.add_raw(total, self.reduce(acc));
        }
        total
    }
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin; the first twelve prime bases suffice below 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n == b {
            return true;
        }
        if n % b == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Element of F[X]/<X^h>; `coeffs.len()` is the degree bound h.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncPoly {
    coeffs: Vec<FieldElement>,
}

impl TruncPoly {
    pub fn zero(h: usize) -> Self {
        TruncPoly { coeffs: vec![FieldElement::ZERO; h] }
    }

    pub fn one(h: usize) -> Self {
        Self::constant(h, FieldElement::ONE)
    }

    pub fn constant(h: usize, c: FieldElement) -> Self {
        Self::monomial(h, c, 0)
    }

    /// c * X^deg, or zero when deg >= h.
    pub fn monomial(h: usize, c: FieldElement, deg: usize) -> Self {
        let mut p = Self::zero(h);
        if deg < h {
            p.coeffs[deg] = c;
        }
        p
    }

    /// Reduces each coefficient mod p; pads with zeros or drops degrees >= h.
    pub fn from_coeffs(f: &FieldConfig, h: usize, coeffs: &[u64]) -> Self {
        let mut p = Self::zero(h);
        for (dst, &c) in p.coeffs.iter_mut().zip(coeffs) {
            *dst = f.elem(c);
        }
        p
    }

    pub fn from_elems(coeffs: Vec<FieldElement>) -> Self {
        TruncPoly { coeffs }
    }

    #[inline]
    pub fn h(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [FieldElement] {
        &mut self.coeffs
    }

    /// Coefficient of X^k (zero beyond the degree bound).
    pub fn coeff(&self, k: usize) -> FieldElement {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn constant_term(&self) -> FieldElement {
        self.coeff(0)
    }

    fn same_h(&self, other: &Self) -> Result<()> {
        if self.h() != other.h() {
            return Err(Error::DegreeMismatch { left: self.h(), right: other.h() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self, f: &FieldConfig) -> Result<Self> {
        self.same_h(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(TruncPoly { coeffs })
    }

    pub fn sub(&self, other: &Self, f: &FieldConfig) -> Result<Self> {
        self.same_h(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(TruncPoly { coeffs })
    }

    pub fn neg(&self, f: &FieldConfig) -> Self {
        TruncPoly { coeffs: self.coeffs.iter().map(|&a| f.neg(a)).collect() }
    }

    pub fn scale(&self, c: FieldElement, f: &FieldConfig) -> Self {
        TruncPoly { coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect() }
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self, f: &FieldConfig) -> Result<Self> {
        self.same_h(other)?;
        let mut out = Self::zero(self.h());
        convolve_into(f, &self.coeffs, &other.coeffs, &mut out.coeffs);
        Ok(out)
    }

    /// Inverse of a unit by Newton iteration, doubling the precision each round.
    pub fn inv_unit(&self, f: &FieldConfig) -> Result<Self> {
        let h = self.h();
        if h == 0 {
            return Ok(self.clone());
        }
        let c0 = self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NonUnit);
        }
        let two = f.elem(2);
        let mut g = vec![FieldElement::ZERO; h];
        g[0] = f.inv(c0)?;
        let mut prec = 1;
        let mut e = vec![FieldElement::ZERO; h];
        let mut r = vec![FieldElement::ZERO; h];
        while prec < h {
            let np = (2 * prec).min(h);
            convolve_into(f, &self.coeffs[..np], &g[..np], &mut e[..np]);
            for c in e[..np].iter_mut() {
                *c = f.neg(*c);
            }
            e[0] = f.add(e[0], two);
            convolve_into(f, &g[..np], &e[..np], &mut r[..np]);
            g[..np].copy_from_slice(&r[..np]);
            prec = np;
        }
        Ok(TruncPoly { coeffs: g })
    }
}

/// Schoolbook truncated convolution: out = a*b mod X^{out.len()}.
///
/// This is the single polynomial-multiplication kernel; a transform-based
/// backend would replace only this function.
pub(crate) fn convolve_into(f: &FieldConfig, a: &[FieldElement], b: &[FieldElement], out: &mut [FieldElement]) {
    let h = out.len();
    let span = |v: &[FieldElement]| {
        let v = &v[..v.len().min(h)];
        let lo = v.iter().position(|c| !c.is_zero())?;
        let hi = v.iter().rposition(|c| !c.is_zero())? + 1;
        Some((lo, hi))
    };
    let (Some((alo, ahi)), Some((blo, bhi))) = (span(a), span(b)) else {
        out.fill(FieldElement::ZERO);
        return;
    };
    let chunk = f.lazy() - 1;
    for (k, o) in out.iter_mut().enumerate() {
        if k < alo + blo {
            *o = FieldElement::ZERO;
            continue;
        }
        let i_min = alo.max((k + 1).saturating_sub(bhi));
        let i_max = (k - blo).min(ahi - 1);
        if i_min > i_max {
            *o = FieldElement::ZERO;
            continue;
        }
        let mut total = 0u64;
        let mut acc = 0u128;
        let mut cnt = 0;
        for i in i_min..=i_max {
            acc += a[i].0 as u128 * b[k - i].0 as u128;
            cnt += 1;
            if cnt == chunk {
                total = f.add_raw(total, f.reduce(acc));
                acc = 0;
                cnt = 0;
            }
        }
        *o = FieldElement(f.add_raw(total, f.reduce(acc)));
    }
}
