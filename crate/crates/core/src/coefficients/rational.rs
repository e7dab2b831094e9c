//! Helpers around arbitrary-precision rationals: parsing, the canonical
//! `"num/den"` text form and p-adic valuations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"n"`, `"-n"` or `"n/d"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Q::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(n, d))
        }
    }
}

/// Canonical text form: reduced, positive denominator, always `num/den`.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (quot, rem) = n.div_rem(p);
        if !rem.is_zero() {
            return v;
        }
        n = quot;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn vp(x: &Q, p: &BigInt) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(vp_int(x.numer(), p) - vp_int(x.denom(), p))
    }
}

/// A representative of `x` modulo `p^k Z_(p)`.
///
/// Writes `x = n / (p^j d')` with `p ∤ d'` and returns
/// `(n · d'^{-1} mod p^{k+j}) / p^j`, so the result has denominator a power of p.
pub fn reduce_mod_pk(x: &Q, p: &BigInt, k: i64) -> Q {
    if x.is_zero() {
        return Q::zero();
    }
    let j = vp_int(x.denom(), p);
    if k + j <= 0 {
        return Q::zero();
    }
    let pj = num_traits::pow(p.clone(), j as usize);
    let d_prime = x.denom() / &pj;
    let modulus = num_traits::pow(p.clone(), (k + j) as usize);
    let inv = mod_inverse(&d_prime, &modulus).expect("p does not divide d'");
    let r = (x.numer() * inv).mod_floor(&modulus);
    Q::new(r, pj)
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_are_canonical() {
        assert_eq!(fmt_q(&parse_q("6/-4").unwrap()), "-3/2");
        assert_eq!(fmt_q(&parse_q(" 7 ").unwrap()), "7/1");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn valuations() {
        let p = BigInt::from(3);
        assert_eq!(vp(&qf(18, 5), &p), Some(2));
        assert_eq!(vp(&qf(2, 27), &p), Some(-3));
        assert_eq!(vp(&q(0), &p), None);
    }

    #[test]
    fn reduction_mod_prime_power() {
        let p = BigInt::from(3);
        // 1/2 ≡ 5 mod 9
        assert_eq!(reduce_mod_pk(&qf(1, 2), &p, 2), q(5));
        // 1/6 = 1/(3·2): (1·2^{-1} mod 27)/3 = 14/3
        assert_eq!(reduce_mod_pk(&qf(1, 6), &p, 2), qf(14, 3));
        let diff = qf(1, 6) - qf(14, 3);
        assert!(vp(&diff, &p).unwrap() >= 2);
        assert_eq!(reduce_mod_pk(&qf(1, 9), &p, -3), q(0));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::from(0));
        assert_eq!(factorial(6), BigInt::from(720));
    }
}
