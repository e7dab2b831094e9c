//! The constants f_{m,i} and g^j_{m,f,i}, by closed form and by induction on m.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coefficients::rational::factorial;
use crate::coefficients::{q, FieldDesc, KElem, Q};

/// s(s−1)⋯(s−j+1).
pub fn falling(s: i64, j: usize) -> Q {
    (0..j as i64).fold(q(1), |acc, k| acc * q(s - k))
}

/// f_{m,i} = β^{i−1}/i!·(m−1)⋯(m−(i−1)) for 1 ≤ i ≤ m, zero otherwise.
pub fn f_closed(field: &FieldDesc, m: usize, i: usize) -> KElem {
    if i == 0 || i > m {
        return field.zero();
    }
    let c = (1..i).fold(q(1), |acc, k| acc * q(m as i64 - k as i64))
        / Q::from_integer(factorial(i as u64));
    field.scale(&field.pow(field.beta(), i as i64 - 1).expect("β ≠ 0"), &c)
}

/// g^j_{m,f,i} = β^{j−i−1}/j·1/(j−i−1)!·(m−(f+1))⋯(m−(f+j−i−1)) for m ≥ f+1 and
/// i+1 ≤ j ≤ m−f+i, zero otherwise.
pub fn g_closed(field: &FieldDesc, m: usize, f: usize, i: usize, j: usize) -> KElem {
    if m < f + 1 || j < i + 1 || j + f > m + i {
        return field.zero();
    }
    let r = j - i - 1;
    let c = (1..=r).fold(q(1), |acc, k| acc * q(m as i64 - (f + k) as i64))
        / (Q::from_integer(factorial(r as u64)) * q(j as i64));
    field.scale(&field.pow(field.beta(), r as i64).expect("β ≠ 0"), &c)
}

/// f indexed by (m, i); g indexed by (m, f, i, j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgTables {
    pub m_max: usize,
    pub f: BTreeMap<(usize, usize), KElem>,
    pub g: BTreeMap<(usize, usize, usize, usize), KElem>,
}

impl FgTables {
    pub fn closed(field: &FieldDesc, m_max: usize) -> Self {
        let mut f = BTreeMap::new();
        let mut g = BTreeMap::new();
        for m in 1..=m_max {
            for i in 1..=m {
                f.insert((m, i), f_closed(field, m, i));
            }
            for fv in 0..m {
                for i in 0..=2 * fv {
                    for j in 1..=(m - fv + i) {
                        g.insert((m, fv, i, j), g_closed(field, m, fv, i, j));
                    }
                }
            }
        }
        FgTables { m_max, f, g }
    }

    /// f_{m+1,i} = f_{m,i} + β(1 − 1/i)f_{m,i−1} from f_{1,1} = 1, and
    /// g^j_{m+1,f,i} = g^j_{m,f,i} + β(1 − 1/j)g^{j−1}_{m,f,i} from g^{i+1}_{f+1,f,i} = 1/(i+1).
    pub fn inductive(field: &FieldDesc, m_max: usize) -> Self {
        let beta = field.beta();
        let step = |prev: &[KElem], n: usize| -> Vec<KElem> {
            // prev indexed 0..n (index 0 unused = 0); result indexed 0..=n
            (0..=n)
                .map(|k| {
                    let cur = prev.get(k).cloned().unwrap_or_else(|| field.zero());
                    if k < 2 {
                        return cur;
                    }
                    let low = prev.get(k - 1).cloned().unwrap_or_else(|| field.zero());
                    let factor = Q::new((k as i64 - 1).into(), (k as i64).into());
                    field.add(&cur, &field.scale(&field.mul(beta, &low), &factor))
                })
                .collect()
        };

        let mut f = BTreeMap::new();
        if m_max >= 1 {
            let mut row = vec![field.zero(), field.one()];
            for m in 1..=m_max {
                for (i, v) in row.iter().enumerate().skip(1) {
                    f.insert((m, i), v.clone());
                }
                row = step(&row, m + 1);
            }
        }

        let mut g = BTreeMap::new();
        for fv in 0..m_max {
            for i in 0..=2 * fv {
                let mut row = vec![field.zero(); i + 2];
                row[i + 1] = field.from_q(Q::new(1.into(), (i as i64 + 1).into()));
                for m in (fv + 1)..=m_max {
                    for (j, v) in row.iter().enumerate().skip(1) {
                        g.insert((m, fv, i, j), v.clone());
                    }
                    row = step(&row, m + 1 - fv + i);
                }
            }
        }
        FgTables { m_max, f, g }
    }

    pub fn f(&self, m: usize, i: usize) -> Option<&KElem> {
        self.f.get(&(m, i))
    }

    pub fn g(&self, m: usize, f: usize, i: usize, j: usize) -> Option<&KElem> {
        self.g.get(&(m, f, i, j))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FgReport {
    pub m_max: usize,
    pub agree: bool,
    pub f_entries: usize,
    pub g_entries: usize,
    pub mismatches: Vec<String>,
}

/// Builds both tables and compares them entry by entry.
pub fn fg_coeffs(field: &FieldDesc, m_max: usize) -> (FgTables, FgReport) {
    let closed = FgTables::closed(field, m_max);
    let ind = FgTables::inductive(field, m_max);
    let mut mismatches = Vec::new();
    for (k, v) in &closed.f {
        if ind.f.get(k) != Some(v) {
            mismatches.push(format!("f{k:?}"));
        }
    }
    for (k, v) in &closed.g {
        if ind.g.get(k) != Some(v) {
            mismatches.push(format!("g{k:?}"));
        }
    }
    if closed.f.len() != ind.f.len() || closed.g.len() != ind.g.len() {
        mismatches.push("table sizes differ".into());
    }
    let report = FgReport {
        m_max,
        agree: mismatches.is_empty(),
        f_entries: closed.f.len(),
        g_entries: closed.g.len(),
        mismatches,
    };
    (closed, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let field = FieldDesc::from_ints(3, &[-3, 0, 1]).unwrap();
        let beta = field.beta().clone();
        for m in 1..6 {
            assert_eq!(f_closed(&field, m, 1), field.one());
        }
        assert_eq!(f_closed(&field, 2, 2), field.scale(&beta, &Q::new(1.into(), 2.into())));
        for fv in 0..4 {
            for i in 0..5 {
                assert_eq!(
                    g_closed(&field, fv + 1, fv, i, i + 1),
                    field.from_q(Q::new(1.into(), (i as i64 + 1).into()))
                );
            }
        }
        assert_eq!(falling(5, 2), q(20));
        assert_eq!(falling(1, 2), q(0));
    }

    #[test]
    fn both_paths_agree() {
        let field = FieldDesc::from_ints(5, &[5, 10, 1]).unwrap();
        let (_, report) = fg_coeffs(&field, 6);
        assert!(report.agree, "{:?}", report.mismatches);
    }
}
