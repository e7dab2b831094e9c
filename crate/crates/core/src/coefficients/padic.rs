//! Elements of K known only modulo a power of π.

use serde::Serialize;

use super::field::{FieldDesc, KElem, Valuation};
use super::rational::reduce_mod_pk;
use crate::error::{Error, Result};

/// Precision value standing for "known exactly".
pub const EXACT: i64 = i64::MAX / 4;

/// A value of K known modulo π^abs_prec (so modulo p^⌊abs_prec/e⌋).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicApprox {
    value: KElem,
    abs_prec: i64,
}

impl PadicApprox {
    pub fn exact(value: KElem) -> Self {
        PadicApprox {
            value,
            abs_prec: EXACT,
        }
    }

    /// Reduces `value` to a canonical representative modulo π^abs_prec.
    pub fn new(field: &FieldDesc, value: KElem, abs_prec: i64) -> Self {
        if abs_prec >= EXACT {
            return Self::exact(value);
        }
        PadicApprox {
            value: reduce_mod_pi(field, &value, abs_prec),
            abs_prec,
        }
    }

    /// Precision given as a power of p.
    pub fn with_p_prec(field: &FieldDesc, value: KElem, prec: i64) -> Self {
        Self::new(field, value, prec.saturating_mul(field.e() as i64))
    }

    pub fn value(&self) -> &KElem {
        &self.value
    }

    pub fn is_exact(&self) -> bool {
        self.abs_prec >= EXACT
    }

    /// Precision in π-units.
    pub fn abs_prec(&self) -> i64 {
        self.abs_prec
    }

    /// Precision as a power of p.
    pub fn prec_p(&self, field: &FieldDesc) -> i64 {
        if self.is_exact() {
            EXACT
        } else {
            self.abs_prec.div_euclid(field.e() as i64)
        }
    }

    /// Lower bound on the valuation; exact when below the precision.
    fn val_bound(&self, field: &FieldDesc) -> i64 {
        match field.valuation(&self.value) {
            Valuation::Finite(v) => v.min(self.abs_prec),
            Valuation::Infinite => self.abs_prec,
        }
    }

    /// The valuation, if the precision is enough to determine it.
    pub fn valuation(&self, field: &FieldDesc) -> Option<Valuation> {
        match field.valuation(&self.value) {
            Valuation::Finite(v) if v < self.abs_prec => Some(Valuation::Finite(v)),
            Valuation::Infinite if self.is_exact() => Some(Valuation::Infinite),
            _ => None,
        }
    }

    /// Whether the value is known to be nonzero.
    pub fn is_known_nonzero(&self, field: &FieldDesc) -> bool {
        matches!(self.valuation(field), Some(Valuation::Finite(_)))
    }

    pub fn add(&self, field: &FieldDesc, other: &Self) -> Self {
        Self::new(
            field,
            field.add(&self.value, &other.value),
            self.abs_prec.min(other.abs_prec),
        )
    }

    pub fn sub(&self, field: &FieldDesc, other: &Self) -> Self {
        Self::new(
            field,
            field.sub(&self.value, &other.value),
            self.abs_prec.min(other.abs_prec),
        )
    }

    pub fn neg(&self, field: &FieldDesc) -> Self {
        Self::new(field, field.neg(&self.value), self.abs_prec)
    }

    pub fn mul(&self, field: &FieldDesc, other: &Self) -> Self {
        let prec = if self.is_exact() && other.is_exact() {
            EXACT
        } else {
            let va = self.val_bound(field);
            let vb = other.val_bound(field);
            clamp(sat_add(self.abs_prec, vb).min(sat_add(other.abs_prec, va)))
        };
        Self::new(field, field.mul(&self.value, &other.value), prec)
    }

    pub fn div(&self, field: &FieldDesc, other: &Self) -> Result<Self> {
        let vb = match other.valuation(field) {
            Some(Valuation::Finite(v)) => v,
            Some(Valuation::Infinite) => return Err(Error::DivisionByZero),
            None => {
                return Err(Error::PrecisionLoss(
                    "divisor indistinguishable from zero at its precision".into(),
                ))
            }
        };
        let value = field.div(&self.value, &other.value)?;
        let prec = if self.is_exact() && other.is_exact() {
            EXACT
        } else {
            let va = self.val_bound(field);
            clamp((self.abs_prec - vb).min(sat_add(other.abs_prec, va) - 2 * vb))
        };
        Ok(Self::new(field, value, prec))
    }

    /// Lowers the precision to `abs_prec` π-units (no-op if already coarser).
    pub fn truncate(&self, field: &FieldDesc, abs_prec: i64) -> Self {
        Self::new(field, self.value.clone(), self.abs_prec.min(abs_prec))
    }

    /// Whether both values agree modulo π^n (n must not exceed either precision).
    pub fn agrees_mod(&self, field: &FieldDesc, other: &Self, n: i64) -> bool {
        if n > self.abs_prec || n > other.abs_prec {
            return false;
        }
        field.valuation(&field.sub(&self.value, &other.value)) >= Valuation::Finite(n)
    }

    pub fn report(&self, field: &FieldDesc) -> PadicReport {
        PadicReport {
            value: self.value.clone(),
            exact: self.is_exact(),
            prec_pi: (!self.is_exact()).then_some(self.abs_prec),
            prec_p: (!self.is_exact()).then_some(self.prec_p(field)),
        }
    }
}

/// JSON form with precision metadata.
#[derive(Clone, Debug, Serialize)]
pub struct PadicReport {
    pub value: KElem,
    pub exact: bool,
    pub prec_pi: Option<i64>,
    pub prec_p: Option<i64>,
}

fn sat_add(a: i64, b: i64) -> i64 {
    a.saturating_add(b)
}

fn clamp(x: i64) -> i64 {
    x.min(EXACT)
}

/// Canonical representative of `a` modulo π^n.
///
/// The coordinate c_i contributes c_i π^i of valuation e·v_p(c_i) + i, so it
/// is reduced modulo p^⌈(n−i)/e⌉.
pub fn reduce_mod_pi(field: &FieldDesc, a: &KElem, n: i64) -> KElem {
    let e = field.e() as i64;
    let coords = a
        .coords()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = (n - i as i64 + e - 1).div_euclid(e);
            reduce_mod_pk(c, field.p_big(), k)
        })
        .collect();
    field.elem(coords)
}

#[cfg(test)]
mod tests {
    use super::super::rational::{q, qf};
    use super::*;

    #[test]
    fn reduction_respects_valuation() {
        let f = FieldDesc::from_ints(3, &[-3, 0, 1]).unwrap();
        // 1 + 4π modulo π^3 = 3π: coefficient of π lives mod 3.
        let a = f.elem(vec![q(1), q(4)]);
        assert_eq!(reduce_mod_pi(&f, &a, 3), f.elem(vec![q(1), q(1)]));
        // modulo π^2 = 3
        assert_eq!(reduce_mod_pi(&f, &a, 2), f.elem(vec![q(1), q(1)]));
        assert_eq!(reduce_mod_pi(&f, &a, 1), f.elem(vec![q(1), q(0)]));
        let d = f.elem(vec![qf(1, 3), q(0)]);
        // 1/3 has valuation −2
        assert_eq!(reduce_mod_pi(&f, &d, 0), d);
        assert_eq!(reduce_mod_pi(&f, &d, -1), d);
        assert_eq!(reduce_mod_pi(&f, &d, -2), f.zero());
    }

    #[test]
    fn division_loses_precision() {
        let f = FieldDesc::from_ints(3, &[-3, 1]).unwrap();
        let one = PadicApprox::with_p_prec(&f, f.one(), 10);
        let three = PadicApprox::exact(f.from_int(3));
        let r = one.div(&f, &three).unwrap();
        assert_eq!(r.abs_prec(), 9);
        let zero = PadicApprox::with_p_prec(&f, f.zero(), 4);
        assert!(matches!(one.div(&f, &zero), Err(Error::PrecisionLoss(_))));
    }
}
