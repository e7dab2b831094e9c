//! Sample-point checks of the summation lemmas behind the closed form.

use serde::Serialize;

use super::fg::{f_closed, falling, g_closed};
use super::htable::product_range;
use crate::coefficients::{q, FieldDesc};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::rings::{Ring, SimplexRingElem, Trunc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LemmaKind {
    /// Σ_{c<s} ∏_{k=1}^{m−1}(−kβ + A + cβ) against Σ_i ∏_{t=1}^{m−i}(−tβ + A)·s^{(i)}·f_{m,i}.
    ChangeM { m: usize },
    /// Σ_{c<s} ∏_{k=f+1}^{m−1}(−kβ + A + cβ)·c^{(i)} against
    /// Σ_j ∏_{t=f−i+1}^{m−j}(−tβ + A)·s^{(j)}·g^j_{m,f,i}.
    ChangeMfi { m: usize, f: usize, i: usize },
    /// Σ_s A_{k+s}X^[s] against A_k·(1−βX)^{−A/β−k} via exp/log, to pd degree D.
    ExpSum { k: usize, pd_degree: usize },
}

impl LemmaKind {
    /// Degree in s of both sides of the polynomial identities.
    pub fn degree(&self) -> usize {
        match *self {
            LemmaKind::ChangeM { m } => m,
            LemmaKind::ChangeMfi { m, f, i } => m.saturating_sub(f) + i,
            LemmaKind::ExpSum { .. } => 0,
        }
    }

    /// Default sample points s = 0..=m+i+1, which covers degree + 1 points.
    pub fn default_samples(&self) -> Vec<i64> {
        let top = match *self {
            LemmaKind::ChangeM { m } => m + 1,
            LemmaKind::ChangeMfi { m, i, .. } => m + i + 1,
            LemmaKind::ExpSum { .. } => 0,
        };
        (0..=top as i64).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma: LemmaKind,
    pub samples: Vec<i64>,
    pub mismatched_samples: Vec<i64>,
    pub holds: bool,
}

pub fn lemma_identity_check(
    field: &FieldDesc,
    a: &Mat,
    lemma: LemmaKind,
    samples: &[i64],
) -> Result<LemmaReport> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch("A must be square".into()));
    }
    let mut mismatched = Vec::new();
    match lemma {
        LemmaKind::ChangeM { m } | LemmaKind::ChangeMfi { m, .. } if m == 0 => {
            return Err(Error::ShapeMismatch("m must be at least 1".into()));
        }
        LemmaKind::ChangeMfi { m, f, .. } if m < f + 1 => {
            return Err(Error::ShapeMismatch("needs m ≥ f + 1".into()));
        }
        LemmaKind::ExpSum { k, pd_degree } => {
            if !exp_sum_holds(field, a, k, pd_degree)? {
                mismatched.push(0);
            }
        }
        _ => {
            for &s in samples {
                if s < 0 {
                    return Err(Error::ShapeMismatch("sample points must be non-negative".into()));
                }
                let (lhs, rhs) = sides(field, a, lemma, s)?;
                if lhs != rhs {
                    mismatched.push(s);
                }
            }
        }
    }
    Ok(LemmaReport {
        lemma,
        samples: if matches!(lemma, LemmaKind::ExpSum { .. }) {
            Vec::new()
        } else {
            samples.to_vec()
        },
        holds: mismatched.is_empty(),
        mismatched_samples: mismatched,
    })
}

/// ∏_{k=lo}^{hi}(−kβ + A + cβ).
fn shifted_product(field: &FieldDesc, a: &Mat, lo: usize, hi: usize, c: i64) -> Result<Mat> {
    let mut p = Mat::identity(field, a.rows());
    for k in lo..=hi {
        let shift = field.mul(field.beta(), &field.from_int(c - k as i64));
        p = a.add_scalar(field, &shift).mul(field, &p)?;
    }
    Ok(p)
}

fn sides(field: &FieldDesc, a: &Mat, lemma: LemmaKind, s: i64) -> Result<(Mat, Mat)> {
    let l = a.rows();
    let mut lhs = Mat::zeros(field, l, l);
    let mut rhs = Mat::zeros(field, l, l);
    match lemma {
        LemmaKind::ChangeM { m } => {
            for c in 0..s {
                lhs = lhs.add(field, &shifted_product(field, a, 1, m - 1, c)?)?;
            }
            for i in 1..=m {
                // ∏_{t=1}^{m−i}(−tβ + A) = ∏_{t=−(m−i)}^{−1}(tβ + A)
                let p = product_range(a, i as i64 - m as i64, -1, field)?;
                let c = field.scale(&f_closed(field, m, i), &falling(s, i));
                rhs = rhs.add(field, &p.scale(field, &c))?;
            }
        }
        LemmaKind::ChangeMfi { m, f, i } => {
            for c in 0..s {
                let p = shifted_product(field, a, f + 1, m - 1, c)?;
                lhs = lhs.add(field, &p.scale_q(field, &falling(c, i)))?;
            }
            for j in 1..=(m - f + i) {
                let p = product_range(a, j as i64 - m as i64, i as i64 - f as i64 - 1, field)?;
                let c = field.scale(&g_closed(field, m, f, i, j), &falling(s, j));
                rhs = rhs.add(field, &p.scale(field, &c))?;
            }
        }
        LemmaKind::ExpSum { .. } => unreachable!("handled by exp_sum_holds"),
    }
    Ok((lhs, rhs))
}

fn exp_sum_holds(field: &FieldDesc, a: &Mat, k: usize, d: usize) -> Result<bool> {
    let flat = Ring::new(field, 1, Trunc::new(1, d)?);
    let l = a.rows();
    let mut lhs = SimplexRingElem::zero(&flat, l);
    for s in 0..=d {
        let ak_s = product_range(a, 0, (k + s) as i64 - 1, field)?;
        lhs.set_coeff(0, &[s as u32], ak_s)?;
    }
    let ak = product_range(a, 0, k as i64 - 1, field)?;
    let beta_inv = field.inv(field.beta())?;
    let expo = a
        .scale(field, &field.neg(&beta_inv))
        .add_scalar(field, &field.from_q(q(-(k as i64))));
    let base = SimplexRingElem::one(&flat, 1).sub(&SimplexRingElem::var(&flat, 1)?.scale(field.beta()))?;
    let rhs = base.exp_pow(&expo)?.left_mul_const(&ak)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::qf;

    #[test]
    fn lemmas_hold_for_a_scalar() {
        let field = FieldDesc::from_ints(3, &[-3, 0, 1]).unwrap();
        let a = Mat::scalar(&field, 1, field.from_q(qf(2, 7)));
        for m in 1..5 {
            let k = LemmaKind::ChangeM { m };
            assert!(lemma_identity_check(&field, &a, k, &k.default_samples()).unwrap().holds);
            for f in 0..m {
                for i in 0..=2 * f {
                    let k = LemmaKind::ChangeMfi { m, f, i };
                    let r = lemma_identity_check(&field, &a, k, &k.default_samples()).unwrap();
                    assert!(r.holds, "{k:?} {:?}", r.mismatched_samples);
                }
            }
        }
        for k in 0..3 {
            let lk = LemmaKind::ExpSum { k, pd_degree: 6 };
            assert!(lemma_identity_check(&field, &a, lk, &[]).unwrap().holds);
        }
    }

    #[test]
    fn change_m_one_is_s() {
        let field = FieldDesc::from_ints(3, &[-3, 1]).unwrap();
        let a = Mat::scalar(&field, 1, field.from_int(5));
        let (lhs, rhs) = sides(&field, &a, LemmaKind::ChangeM { m: 1 }, 7).unwrap();
        assert_eq!(lhs, Mat::scalar(&field, 1, field.from_int(7)));
        assert_eq!(lhs, rhs);
    }
}
