//! Truncated models of K{X₁,…,X_n}_pd[[t]] and matrix algebras over them.

mod series;

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coefficients::rational::binomial;
use crate::coefficients::{FieldDesc, Q};
use crate::error::{Error, Result};

pub use series::{SeriesEntry, SeriesReport, SimplexRingElem};

/// Work modulo t^T and drop pd monomials of total degree > D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Trunc {
    #[serde(rename = "t")]
    pub t_order: usize,
    #[serde(rename = "x")]
    pub pd_degree: usize,
}

impl Trunc {
    pub fn new(t_order: usize, pd_degree: usize) -> Result<Self> {
        if t_order == 0 {
            return Err(Error::ShapeMismatch("t-order must be at least 1".into()));
        }
        Ok(Trunc {
            t_order,
            pd_degree,
        })
    }
}

/// Shared monomial data for one (field, n_vars, truncation) triple.
pub struct Ring {
    field: FieldDesc,
    n_vars: usize,
    trunc: Trunc,
    monos: Vec<Vec<u32>>,
    degrees: Vec<usize>,
    index: HashMap<Vec<u32>, usize>,
    /// Entry `a * n_monos + b`: index of X^[a]·X^[b] and its integer coefficient.
    products: Vec<Option<(usize, Q)>>,
}

impl std::fmt::Debug for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ring")
            .field("p", &self.field.p())
            .field("e", &self.field.e())
            .field("n_vars", &self.n_vars)
            .field("trunc", &self.trunc)
            .finish()
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.n_vars == other.n_vars && self.trunc == other.trunc && self.field == other.field
    }
}

impl Ring {
    pub fn new(field: &FieldDesc, n_vars: usize, trunc: Trunc) -> Arc<Ring> {
        let mut monos = Vec::new();
        for d in 0..=trunc.pd_degree {
            push_compositions(n_vars, d as u32, &mut Vec::new(), &mut monos);
            if n_vars == 0 {
                break;
            }
        }
        let degrees: Vec<usize> = monos
            .iter()
            .map(|m| m.iter().map(|&a| a as usize).sum())
            .collect();
        let index: HashMap<Vec<u32>, usize> = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let n = monos.len();
        let mut products = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                if degrees[a] + degrees[b] > trunc.pd_degree {
                    products.push(None);
                    continue;
                }
                let sum: Vec<u32> = monos[a].iter().zip(&monos[b]).map(|(x, y)| x + y).collect();
                let coeff = monos[a]
                    .iter()
                    .zip(&monos[b])
                    .fold(num_bigint::BigInt::from(1), |acc, (&x, &y)| {
                        acc * binomial((x + y) as u64, x as u64)
                    });
                products.push(Some((index[&sum], Q::from_integer(coeff))));
            }
        }
        Arc::new(Ring {
            field: field.clone(),
            n_vars,
            trunc,
            monos,
            degrees,
            index,
            products,
        })
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn trunc(&self) -> Trunc {
        self.trunc
    }

    pub fn n_monos(&self) -> usize {
        self.monos.len()
    }

    pub fn mono(&self, i: usize) -> &[u32] {
        &self.monos[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// Index of a multi-index, or `None` if it is truncated away.
    pub fn mono_index(&self, multi: &[u32]) -> Option<usize> {
        self.index.get(multi).copied()
    }

    /// Index of X_j^[a] (1-based variable index).
    pub fn var_power_index(&self, var: usize, a: u32) -> Option<usize> {
        let mut m = vec![0; self.n_vars];
        m[var - 1] = a;
        self.mono_index(&m)
    }

    pub(crate) fn product(&self, a: usize, b: usize) -> Option<&(usize, Q)> {
        self.products[a * self.monos.len() + b].as_ref()
    }

    pub fn len(&self) -> usize {
        self.trunc.t_order * self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn push_compositions(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 >= n {
        if n == 0 {
            if d == 0 {
                out.push(Vec::new());
            }
            return;
        }
        prefix.push(d);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for a in (0..=d).rev() {
        prefix.push(a);
        push_compositions(n, d - a, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts() {
        let f = FieldDesc::from_ints(3, &[-3, 1]).unwrap();
        let t = Trunc::new(2, 4).unwrap();
        assert_eq!(Ring::new(&f, 0, t).n_monos(), 1);
        assert_eq!(Ring::new(&f, 1, t).n_monos(), 5);
        assert_eq!(Ring::new(&f, 2, t).n_monos(), 15);
        assert_eq!(Ring::new(&f, 3, t).n_monos(), 35);
        let r = Ring::new(&f, 2, t);
        assert_eq!(r.mono(0), &[0, 0]);
        let a = r.mono_index(&[1, 1]).unwrap();
        let (k, c) = r.product(a, a).unwrap();
        assert_eq!(r.mono(*k), &[2, 2]);
        assert_eq!(c, &Q::from_integer(4.into()));
    }
}
