use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{fmt_q, is_prime, parse_q, q, vp, Q};
use crate::error::{Error, Result};

/// An element of K = ℚ[π]/(E(π)), stored as its coordinates on 1, π, …, π^{e-1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KElem {
    coords: Vec<Q>,
}

impl KElem {
    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Whether the element lies in the prime field ℚ.
    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(Zero::is_zero)
    }

    pub fn rational_part(&self) -> &Q {
        &self.coords[0]
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(fmt_q).collect()
    }
}

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})π")?,
                _ => write!(f, "({c})π^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for KElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// Raw coordinates as read from JSON; turned into a [`KElem`] by [`FieldDesc::elem_from_strings`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct RawKElem(pub Vec<String>);

impl<'de> Deserialize<'de> for RawKElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            One(String),
            Many(Vec<String>),
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Int(n) => RawKElem(vec![n.to_string()]),
            Repr::One(s) => RawKElem(vec![s]),
            Repr::Many(v) => RawKElem(v),
        })
    }
}

/// Valuation normalized by v(π) = 1, with v(0) = +∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.finite().serialize(s)
    }
}

/// The base field K = ℚ[u]/(E(u)) for an Eisenstein polynomial E at an odd prime p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDesc {
    p: u64,
    p_big: BigInt,
    /// E, low-to-high, monic, length e + 1.
    poly: Vec<Q>,
    beta: KElem,
}

impl FieldDesc {
    pub fn new(p: u64, e_coeffs: Vec<Q>) -> Result<Self> {
        if !is_prime(p) {
            return Err(if p <= 2 {
                Error::PrimeTooSmall(p)
            } else {
                Error::NotPrime(p)
            });
        }
        if p == 2 {
            return Err(Error::PrimeTooSmall(p));
        }
        let mut poly = e_coeffs;
        while poly.len() > 1 && poly.last().is_some_and(Zero::is_zero) {
            poly.pop();
        }
        if poly.len() < 2 {
            return Err(Error::NotEisenstein("degree must be at least 1".into()));
        }
        if !poly.last().unwrap().is_one() {
            return Err(Error::NotEisenstein("polynomial is not monic".into()));
        }
        let p_big = BigInt::from(p);
        let e = poly.len() - 1;
        for (i, c) in poly[..e].iter().enumerate() {
            let v = vp(c, &p_big);
            if i == 0 {
                if v != Some(1) {
                    return Err(Error::NotEisenstein(format!(
                        "constant coefficient {} must have p-adic valuation exactly 1",
                        fmt_q(c)
                    )));
                }
            } else if let Some(v) = v {
                if v < 1 {
                    return Err(Error::NotEisenstein(format!(
                        "coefficient of u^{i} ({}) must be divisible by p",
                        fmt_q(c)
                    )));
                }
            }
        }
        let mut field = FieldDesc {
            p,
            p_big,
            poly,
            beta: KElem { coords: vec![] },
        };
        let deriv = poly_derivative(&field.poly);
        field.beta = field.eval_poly(&deriv, &field.pi());
        Ok(field)
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_ints(p: u64, e_coeffs: &[i64]) -> Result<Self> {
        Self::new(p, e_coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn p_big(&self) -> &BigInt {
        &self.p_big
    }

    pub fn e(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn poly(&self) -> &[Q] {
        &self.poly
    }

    /// β = E′(π).
    pub fn beta(&self) -> &KElem {
        &self.beta
    }

    pub fn zero(&self) -> KElem {
        KElem {
            coords: vec![Q::zero(); self.e()],
        }
    }

    pub fn one(&self) -> KElem {
        self.from_q(Q::one())
    }

    pub fn from_q(&self, x: Q) -> KElem {
        let mut coords = vec![Q::zero(); self.e()];
        coords[0] = x;
        KElem { coords }
    }

    pub fn from_int(&self, n: i64) -> KElem {
        self.from_q(q(n))
    }

    pub fn pi(&self) -> KElem {
        // For e = 1, π = −E(0).
        self.reduce(vec![Q::zero(), Q::one()])
    }

    /// Builds an element from coordinates; longer inputs are reduced modulo E.
    pub fn elem(&self, coords: Vec<Q>) -> KElem {
        self.reduce(coords)
    }

    pub fn elem_from_strings<S: AsRef<str>>(&self, coords: &[S]) -> Result<KElem> {
        if coords.is_empty() {
            return Err(Error::Parse("empty field element".into()));
        }
        let qs = coords
            .iter()
            .map(|s| parse_q(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.reduce(qs))
    }

    fn reduce(&self, mut c: Vec<Q>) -> KElem {
        let e = self.e();
        while c.len() > e {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = c.len() - e;
            for (i, ei) in self.poly[..e].iter().enumerate() {
                c[shift + i] -= &top * ei;
            }
        }
        c.resize(e, Q::zero());
        KElem { coords: c }
    }

    pub fn add(&self, a: &KElem, b: &KElem) -> KElem {
        KElem {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, a: &KElem, b: &KElem) -> KElem {
        KElem {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn neg(&self, a: &KElem) -> KElem {
        KElem {
            coords: a.coords.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, a: &KElem, s: &Q) -> KElem {
        KElem {
            coords: a.coords.iter().map(|x| x * s).collect(),
        }
    }

    pub fn mul(&self, a: &KElem, b: &KElem) -> KElem {
        let e = self.e();
        if e == 1 {
            return KElem {
                coords: vec![&a.coords[0] * &b.coords[0]],
            };
        }
        if a.is_rational() {
            return self.scale(b, &a.coords[0]);
        }
        if b.is_rational() {
            return self.scale(a, &b.coords[0]);
        }
        let mut prod = vec![Q::zero(); 2 * e - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        self.reduce(prod)
    }

    /// Multiplication-by-`a` matrix on the basis 1, π, …, π^{e-1} (column j = a·π^j).
    pub fn mul_matrix(&self, a: &KElem) -> Vec<Vec<Q>> {
        let e = self.e();
        let mut cols = Vec::with_capacity(e);
        let mut cur = a.clone();
        let pi = self.pi();
        for _ in 0..e {
            cols.push(cur.coords.clone());
            cur = self.mul(&cur, &pi);
        }
        (0..e)
            .map(|r| (0..e).map(|c| cols[c][r].clone()).collect())
            .collect()
    }

    /// Inverse via the linear system (mult-by-a)·x = 1 over ℚ.
    pub fn inv(&self, a: &KElem) -> Result<KElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if a.is_rational() {
            return Ok(self.from_q(a.coords[0].recip()));
        }
        let e = self.e();
        let mut m = self.mul_matrix(a);
        let mut rhs = vec![Q::zero(); e];
        rhs[0] = Q::one();
        for col in 0..e {
            let piv = (col..e)
                .find(|&r| !m[r][col].is_zero())
                .ok_or(Error::DivisionByZero)?;
            m.swap(col, piv);
            rhs.swap(col, piv);
            let inv = m[col][col].recip();
            for c in col..e {
                m[col][c] *= &inv;
            }
            rhs[col] *= &inv;
            for r in 0..e {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in col..e {
                        let t = &f * &m[col][c];
                        m[r][c] -= t;
                    }
                    let t = &f * &rhs[col];
                    rhs[r] -= t;
                }
            }
        }
        Ok(KElem { coords: rhs })
    }

    pub fn div(&self, a: &KElem, b: &KElem) -> Result<KElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &KElem, n: i64) -> Result<KElem> {
        let base = if n < 0 { self.inv(a)? } else { a.clone() };
        let mut exp = n.unsigned_abs();
        let mut acc = self.one();
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            exp >>= 1;
            if exp > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        Ok(acc)
    }

    /// v(a) with v(π) = 1.
    ///
    /// The terms c_i π^i have valuations e·v_p(c_i) + i, pairwise distinct mod e,
    /// so the minimum is attained exactly once and equals v(a).
    pub fn valuation(&self, a: &KElem) -> Valuation {
        let e = self.e() as i64;
        a.coords
            .iter()
            .enumerate()
            .filter_map(|(i, c)| vp(c, &self.p_big).map(|v| e * v + i as i64))
            .min()
            .map_or(Valuation::Infinite, Valuation::Finite)
    }

    /// Norm N_{K/ℚ}(a) as the determinant of multiplication by a.
    pub fn norm(&self, a: &KElem) -> Q {
        det_q(self.mul_matrix(a))
    }

    /// Evaluates a polynomial with rational coefficients (low-to-high) at `x`.
    pub fn eval_poly(&self, coeffs: &[Q], x: &KElem) -> KElem {
        let mut acc = self.zero();
        for c in coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            acc.coords[0] += c;
        }
        acc
    }

    /// Image of an element under the residue map O_K → 𝔽_p, as an integer in [0, p).
    /// Returns `None` when the element is not integral.
    pub fn residue(&self, a: &KElem) -> Option<u64> {
        if self.valuation(a) < Valuation::Finite(0) {
            return None;
        }
        let c0 = &a.coords[0];
        let r = super::rational::reduce_mod_pk(c0, &self.p_big, 1);
        debug_assert!(r.is_integer());
        let n: BigInt = r.to_integer();
        Some(n.try_into().unwrap_or(0))
    }
}

pub fn poly_derivative(c: &[Q]) -> Vec<Q> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, x)| x * q(i as i64))
        .collect()
}

fn det_q(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut det = Q::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &m[col][col];
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    det
}
