use std::sync::Arc;

use num_traits::One;
use serde::Serialize;

use super::{Ring, Trunc};
use crate::coefficients::rational::factorial;
use crate::coefficients::{FieldDesc, KElem, Q};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::par;

/// A truncated element Σ_m Σ_a C_{m,a} X^[a] t^m with l×l coefficients over K.
///
/// Scalars are the case l = 1 and act on matrix-valued elements by broadcasting.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexRingElem {
    ring: Arc<Ring>,
    l: usize,
    /// Index `m * n_monos + mono`.
    coeffs: Vec<Mat>,
}

impl SimplexRingElem {
    pub fn zero(ring: &Arc<Ring>, l: usize) -> Self {
        let z = Mat::zeros(ring.field(), l, l);
        SimplexRingElem {
            ring: ring.clone(),
            l,
            coeffs: vec![z; ring.len()],
        }
    }

    pub fn constant(ring: &Arc<Ring>, c: Mat) -> Self {
        let mut s = Self::zero(ring, c.rows());
        s.coeffs[0] = c;
        s
    }

    pub fn one(ring: &Arc<Ring>, l: usize) -> Self {
        Self::constant(ring, Mat::identity(ring.field(), l))
    }

    pub fn scalar_const(ring: &Arc<Ring>, c: KElem) -> Self {
        Self::constant(ring, Mat::scalar(ring.field(), 1, c))
    }

    /// c·X^[multi]·t^m; terms beyond the truncation give zero.
    pub fn monomial(ring: &Arc<Ring>, m: usize, multi: &[u32], c: Mat) -> Self {
        let mut s = Self::zero(ring, c.rows());
        if let (true, Some(i)) = (m < ring.trunc().t_order, ring.mono_index(multi)) {
            s.coeffs[m * ring.n_monos() + i] = c;
        }
        s
    }

    /// The scalar X_j (1-based).
    pub fn var(ring: &Arc<Ring>, j: usize) -> Result<Self> {
        if j == 0 || j > ring.n_vars() {
            return Err(Error::IndexOutOfRange {
                index: j,
                n_vars: ring.n_vars(),
            });
        }
        let mut multi = vec![0; ring.n_vars()];
        multi[j - 1] = 1;
        Ok(Self::monomial(ring, 0, &multi, Mat::identity(ring.field(), 1)))
    }

    /// The scalar t.
    pub fn t(ring: &Arc<Ring>) -> Self {
        let multi = vec![0; ring.n_vars()];
        Self::monomial(ring, 1, &multi, Mat::identity(ring.field(), 1))
    }

    /// Builds a one-variable scalar element from ordinary-power coefficients
    /// Σ c_n X^n t^m, rewriting X^n = n!·X^[n].
    pub fn from_power_coeffs(ring: &Arc<Ring>, terms: &[(usize, u32, KElem)]) -> Result<Self> {
        if ring.n_vars() != 1 {
            return Err(Error::ShapeMismatch(
                "power-basis input needs exactly one variable".into(),
            ));
        }
        let f = ring.field();
        let mut s = Self::zero(ring, 1);
        for (m, n, c) in terms {
            let fact = Q::from_integer(factorial(*n as u64));
            let c = f.scale(c, &fact);
            let term = Self::monomial(ring, *m, &[*n], Mat::scalar(f, 1, c));
            s = s.add(&term)?;
        }
        Ok(s)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn field(&self) -> &FieldDesc {
        self.ring.field()
    }

    pub fn trunc(&self) -> Trunc {
        self.ring.trunc()
    }

    pub fn n_vars(&self) -> usize {
        self.ring.n_vars()
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn coeffs(&self) -> &[Mat] {
        &self.coeffs
    }

    /// Coefficient of X^[multi] t^m; `None` if outside the truncation.
    pub fn coeff(&self, m: usize, multi: &[u32]) -> Option<&Mat> {
        if m >= self.trunc().t_order {
            return None;
        }
        let i = self.ring.mono_index(multi)?;
        Some(&self.coeffs[m * self.ring.n_monos() + i])
    }

    pub fn coeff_at(&self, m: usize, mono: usize) -> &Mat {
        &self.coeffs[m * self.ring.n_monos() + mono]
    }

    pub fn set_coeff(&mut self, m: usize, multi: &[u32], c: Mat) -> Result<()> {
        if c.rows() != self.l || c.cols() != self.l {
            return Err(Error::ShapeMismatch("coefficient size differs from l".into()));
        }
        let i = self
            .ring
            .mono_index(multi)
            .filter(|_| m < self.trunc().t_order)
            .ok_or_else(|| Error::ShapeMismatch("monomial outside truncation".into()))?;
        let n = self.ring.n_monos();
        self.coeffs[m * n + i] = c;
        Ok(())
    }

    /// Constant term (t⁰, X^[0]).
    pub fn constant_term(&self) -> &Mat {
        &self.coeffs[0]
    }

    /// Scalar coefficient for l = 1.
    pub fn scalar_coeff(&self, m: usize, multi: &[u32]) -> Option<&KElem> {
        self.coeff(m, multi).map(|c| c.get(0, 0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Mat::is_zero)
    }

    /// Nonzero terms as (t-exponent, multi-index, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (usize, &[u32], &Mat)> {
        let n = self.ring.n_monos();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(idx, c)| (idx / n, self.ring.mono(idx % n), c))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.ring, &other.ring) && *self.ring != *other.ring {
            return Err(Error::ShapeMismatch(format!(
                "ring mismatch: {} vars {:?} vs {} vars {:?}",
                self.n_vars(),
                self.trunc(),
                other.n_vars(),
                other.trunc()
            )));
        }
        Ok(())
    }

    fn result_l(&self, other: &Self) -> Result<usize> {
        match (self.l, other.l) {
            (a, b) if a == b => Ok(a),
            (1, b) => Ok(b),
            (a, 1) => Ok(a),
            (a, b) => Err(Error::ShapeMismatch(format!("matrix sizes {a} and {b}"))),
        }
    }

    fn widen(&self, l: usize) -> Self {
        if self.l == l {
            return self.clone();
        }
        let f = self.field();
        SimplexRingElem {
            ring: self.ring.clone(),
            l,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Mat::scalar(f, l, c.get(0, 0).clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |f, a, b| a.add(f, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |f, a, b| a.sub(f, b))
    }

    fn combine(
        &self,
        other: &Self,
        op: impl Fn(&FieldDesc, &Mat, &Mat) -> Result<Mat>,
    ) -> Result<Self> {
        self.check_compatible(other)?;
        let l = self.result_l(other)?;
        let (a, b) = (self.widen(l), other.widen(l));
        let f = self.field();
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| op(f, x, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(SimplexRingElem {
            ring: self.ring.clone(),
            l,
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        let f = self.field();
        self.map_coeffs(|c| c.neg(f))
    }

    pub fn scale(&self, c: &KElem) -> Self {
        let f = self.field();
        self.map_coeffs(|m| m.scale(f, c))
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        let f = self.field();
        self.map_coeffs(|m| m.scale_q(f, c))
    }

    /// M·self for a constant matrix M (scalars are widened).
    pub fn left_mul_const(&self, m: &Mat) -> Result<Self> {
        let c = Self::constant(&self.ring, m.clone());
        c.mul(self)
    }

    /// self·M for a constant matrix M.
    pub fn right_mul_const(&self, m: &Mat) -> Result<Self> {
        self.mul(&Self::constant(&self.ring, m.clone()))
    }

    fn map_coeffs(&self, g: impl Fn(&Mat) -> Mat) -> Self {
        SimplexRingElem {
            ring: self.ring.clone(),
            l: self.l,
            coeffs: self.coeffs.iter().map(g).collect(),
        }
    }

    /// Truncated product using the divided-power rule X^[i]X^[j] = C(i+j,i)X^[i+j].
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let l = self.result_l(other)?;
        let ring = &self.ring;
        let f = ring.field();
        let n = ring.n_monos();
        let t_order = ring.trunc().t_order;
        let nz_a: Vec<Vec<usize>> = (0..t_order)
            .map(|m| (0..n).filter(|&i| !self.coeffs[m * n + i].is_zero()).collect())
            .collect();
        let nz_b: Vec<Vec<usize>> = (0..t_order)
            .map(|m| (0..n).filter(|&i| !other.coeffs[m * n + i].is_zero()).collect())
            .collect();
        let blocks = par::map_range(t_order, |m| -> Result<Vec<Mat>> {
            let mut out = vec![Mat::zeros(f, l, l); n];
            for ma in 0..=m {
                let mb = m - ma;
                for &ia in &nz_a[ma] {
                    let ca = &self.coeffs[ma * n + ia];
                    for &ib in &nz_b[mb] {
                        let Some((k, mult)) = ring.product(ia, ib) else {
                            continue;
                        };
                        let cb = &other.coeffs[mb * n + ib];
                        let mut prod = mat_product(f, ca, cb)?;
                        if !mult.is_one() {
                            prod = prod.scale_q(f, mult);
                        }
                        out[*k] = out[*k].add(f, &prod)?;
                    }
                }
            }
            Ok(out)
        });
        let mut coeffs = Vec::with_capacity(ring.len());
        for b in blocks {
            coeffs.extend(b?);
        }
        Ok(SimplexRingElem {
            ring: ring.clone(),
            l,
            coeffs,
        })
    }

    /// Inverse via Σ_k (−C₀⁻¹R)^k C₀⁻¹ where self = C₀ + R; R is nilpotent in truncation.
    pub fn inverse(&self) -> Result<Self> {
        let f = self.field();
        let c0_inv = self
            .constant_term()
            .inverse(f)
            .map_err(|_| Error::NonUnit("constant term is not invertible".into()))?;
        let mut r = self.clone();
        r.coeffs[0] = Mat::zeros(f, self.l, self.l);
        let y = r.left_mul_const(&c0_inv.neg(f))?;
        let mut term = Self::constant(&self.ring, c0_inv);
        let mut sum = term.clone();
        loop {
            term = y.mul(&term)?;
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    /// Integer power; negative exponents go through [`Self::inverse`].
    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(&self.ring, self.l);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// y^[n] = yⁿ/n! for y with zero constant term.
    pub fn divided_power(&self, n: u32) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::BadConstantTerm(
                "divided powers need a zero constant term".into(),
            ));
        }
        let p = self.pow(n as i64)?;
        Ok(p.scale_q(&Q::from_integer(factorial(n as u64)).recip()))
    }

    /// log(self) = Σ (−1)^{k−1}(self−1)^k/k; requires constant term I.
    pub fn log(&self) -> Result<Self> {
        let f = self.field();
        if !self.constant_term().is_identity(f) {
            return Err(Error::BadConstantTerm("log needs constant term I".into()));
        }
        let mut y = self.clone();
        y.coeffs[0] = Mat::zeros(f, self.l, self.l);
        let mut pw = y.clone();
        let mut sum = y.clone();
        let mut k: i64 = 1;
        loop {
            pw = pw.mul(&y)?;
            if pw.is_zero() {
                break;
            }
            k += 1;
            let sign = if k % 2 == 0 { -1 } else { 1 };
            sum = sum.add(&pw.scale_q(&Q::new(sign.into(), k.into())))?;
        }
        Ok(sum)
    }

    /// exp(self) = Σ self^k/k!; requires zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::BadConstantTerm("exp needs zero constant term".into()));
        }
        let mut term = Self::one(&self.ring, self.l);
        let mut sum = term.clone();
        let mut k: i64 = 0;
        loop {
            k += 1;
            term = term.mul(self)?.scale_q(&Q::new(1.into(), k.into()));
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    /// self^M := exp(M·log self) for scalar self with constant term 1.
    pub fn exp_pow(&self, m: &Mat) -> Result<Self> {
        if self.l != 1 {
            return Err(Error::ShapeMismatch("exp_pow needs a scalar base".into()));
        }
        if !m.is_square() {
            return Err(Error::ShapeMismatch("exponent must be square".into()));
        }
        self.log()?.left_mul_const(m)?.exp()
    }

    /// Re-expresses the element in a ring with the same field and variables but
    /// a coarser truncation.
    pub fn truncate_to(&self, target: &Arc<Ring>) -> Result<Self> {
        if target.n_vars() != self.n_vars()
            || target.trunc().t_order > self.trunc().t_order
            || target.trunc().pd_degree > self.trunc().pd_degree
        {
            return Err(Error::ShapeMismatch("target truncation is not coarser".into()));
        }
        let mut out = Self::zero(target, self.l);
        let n = target.n_monos();
        for m in 0..target.trunc().t_order {
            for i in 0..n {
                if let Some(c) = self.coeff(m, target.mono(i)) {
                    out.coeffs[m * n + i] = c.clone();
                }
            }
        }
        Ok(out)
    }

    /// Embeds into a ring with more variables (new variables are absent).
    pub fn embed(&self, target: &Arc<Ring>) -> Result<Self> {
        if target.n_vars() < self.n_vars() {
            return Err(Error::ShapeMismatch("cannot drop variables".into()));
        }
        let mut out = Self::zero(target, self.l);
        for (m, multi, c) in self.terms() {
            let mut wide = multi.to_vec();
            wide.resize(target.n_vars(), 0);
            if m < target.trunc().t_order {
                if let Some(i) = target.mono_index(&wide) {
                    out.coeffs[m * target.n_monos() + i] = c.clone();
                }
            }
        }
        Ok(out)
    }

    /// Multiplies by a scalar element coefficient-wise; `s` must have l = 1.
    pub fn times_scalar_series(&self, s: &Self) -> Result<Self> {
        s.mul(self)
    }

    /// The t^m coefficient as an element of `flat` (same variables, t-order 1).
    pub fn t_slice(&self, m: usize, flat: &Arc<Ring>) -> Result<Self> {
        if flat.n_vars() != self.n_vars() || flat.trunc().t_order != 1 {
            return Err(Error::ShapeMismatch("slice target must have t-order 1".into()));
        }
        let mut out = Self::zero(flat, self.l);
        if m >= self.trunc().t_order {
            return Ok(out);
        }
        for i in 0..flat.n_monos() {
            if let Some(c) = self.coeff(m, flat.mono(i)) {
                out.coeffs[i] = c.clone();
            }
        }
        Ok(out)
    }

    /// Entry (i, j) as a scalar series.
    pub fn entry(&self, i: usize, j: usize) -> Self {
        let f = self.field();
        SimplexRingElem {
            ring: self.ring.clone(),
            l: 1,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Mat::scalar(f, 1, c.get(i, j).clone()))
                .collect(),
        }
    }

    pub fn report(&self) -> SeriesReport {
        SeriesReport {
            trunc: self.trunc(),
            n_vars: self.n_vars(),
            l: self.l,
            entries: self
                .terms()
                .map(|(m, multi, c)| SeriesEntry {
                    m,
                    multi_index: multi.to_vec(),
                    matrix: c.clone(),
                })
                .collect(),
        }
    }
}

fn mat_product(f: &FieldDesc, a: &Mat, b: &Mat) -> Result<Mat> {
    match (a.rows(), b.rows()) {
        (1, 1) => Ok(Mat::scalar(f, 1, f.mul(a.get(0, 0), b.get(0, 0)))),
        (1, _) => Ok(b.scale(f, a.get(0, 0))),
        (_, 1) => Ok(a.scale(f, b.get(0, 0))),
        _ => a.mul(f, b),
    }
}

/// JSON form of a series.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub trunc: Trunc,
    pub n_vars: usize,
    pub l: usize,
    pub entries: Vec<SeriesEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesEntry {
    pub m: usize,
    pub multi_index: Vec<u32>,
    pub matrix: Mat,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::q;

    fn ring(n: usize, t: usize, d: usize) -> Arc<Ring> {
        let f = FieldDesc::from_ints(3, &[-3, 1]).unwrap();
        Ring::new(&f, n, Trunc::new(t, d).unwrap())
    }

    fn sc(r: &Arc<Ring>, m: usize, a: u32, c: i64) -> SimplexRingElem {
        SimplexRingElem::monomial(r, m, &[a], Mat::scalar(r.field(), 1, r.field().from_int(c)))
    }

    #[test]
    fn pd_products() {
        let r = ring(1, 1, 6);
        let x = SimplexRingElem::var(&r, 1).unwrap();
        assert_eq!(x.mul(&x).unwrap(), sc(&r, 0, 2, 2));
        assert_eq!(sc(&r, 0, 2, 1).mul(&sc(&r, 0, 3, 1)).unwrap(), sc(&r, 0, 5, 10));
        let r = ring(1, 1, 3);
        assert!(sc(&r, 0, 2, 1).mul(&sc(&r, 0, 2, 1)).unwrap().is_zero());
    }

    #[test]
    fn t_truncation() {
        let r = ring(0, 2, 0);
        let one = SimplexRingElem::one(&r, 1);
        let t = SimplexRingElem::t(&r);
        let p = one.add(&t).unwrap().mul(&one.sub(&t).unwrap()).unwrap();
        assert_eq!(p, one);
    }

    #[test]
    fn inverse_of_one_minus_x() {
        let r = ring(1, 1, 3);
        let one = SimplexRingElem::one(&r, 1);
        let x = SimplexRingElem::var(&r, 1).unwrap();
        let inv = one.sub(&x).unwrap().inverse().unwrap();
        let expect = one
            .add(&x)
            .unwrap()
            .add(&sc(&r, 0, 2, 2))
            .unwrap()
            .add(&sc(&r, 0, 3, 6))
            .unwrap();
        assert_eq!(inv, expect);
        assert!(matches!(x.inverse(), Err(Error::NonUnit(_))));
        assert_eq!(one.inverse().unwrap(), one);
    }

    #[test]
    fn log_exp() {
        let r = ring(1, 1, 2);
        let one = SimplexRingElem::one(&r, 1);
        let x = SimplexRingElem::var(&r, 1).unwrap();
        let a = one.sub(&x).unwrap();
        assert_eq!(a.log().unwrap(), x.neg().sub(&sc(&r, 0, 2, 1)).unwrap());
        assert!(one.log().unwrap().is_zero());
        assert!(matches!(x.log(), Err(Error::BadConstantTerm(_))));
        let r = ring(1, 1, 6);
        let x = SimplexRingElem::var(&r, 1).unwrap();
        let a = SimplexRingElem::one(&r, 1).sub(&x).unwrap();
        assert_eq!(a.log().unwrap().exp().unwrap(), a);
    }

    #[test]
    fn exp_pow_square() {
        let r = ring(1, 1, 5);
        let f = r.field().clone();
        let x = SimplexRingElem::var(&r, 1).unwrap();
        let a = SimplexRingElem::one(&r, 1).sub(&x).unwrap();
        let sq = a.exp_pow(&Mat::scalar(&f, 1, f.from_q(q(2)))).unwrap();
        let expect = SimplexRingElem::one(&r, 1)
            .sub(&sc(&r, 0, 1, 2))
            .unwrap()
            .add(&sc(&r, 0, 2, 2))
            .unwrap();
        assert_eq!(sq, expect);
        let z = a.exp_pow(&Mat::zeros(&f, 2, 2)).unwrap();
        assert_eq!(z, SimplexRingElem::one(&r, 2));
    }
}
