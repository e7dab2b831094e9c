//! The polynomials h̃_{m,j} and the generating-function form of the rows of {A_{m,n}}.

use std::sync::Arc;

use serde::Serialize;

use super::fg::{f_closed, falling, g_closed};
use crate::coefficients::rational::factorial;
use crate::coefficients::{q, FieldDesc, Q};
use crate::cosimplicial::CosimpCtx;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::par;
use crate::rings::{Ring, SimplexRingElem, Trunc};
use crate::stratification::{generate_amn, ResidualReport, Seeds, StratTable};

/// h̃_{m,j} for 0 ≤ m ≤ m_max and 0 ≤ j ≤ 2m.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HTable {
    l: usize,
    m_max: usize,
    h: Vec<Vec<Mat>>,
}

impl HTable {
    pub fn get(&self, m: usize, j: usize) -> Option<&Mat> {
        self.h.get(m)?.get(j)
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn l(&self) -> usize {
        self.l
    }
}

/// Fills h̃ by the merged recursion
///
/// h̃_{m,j} = [j ≤ m] f_{m,j} A_{m,1}
///   + Σ_{f=1}^{m−1} (A_{m−f,1} − fθ_{1,m−f}) Σ_{i=1}^{2f} h̃_{f,i} g^j_{m,f,i}
///   + Σ_{f=0}^{m−1} θ_{1,m−f} Σ_{i=0}^{2f} h̃_{f,i} ((j−1)g^j_{m,f,i} + (1−1/j) g^{j−1}_{m,f,i} ((j−1−m)β + A_{0,1})).
///
/// Multiplying the j > m cases through by A_{0,j−m} removes every quotient of
/// A_{0,·} factors, so singular A_{0,k} are fine.
pub fn h_table(seeds: &Seeds, ctx: &CosimpCtx, m_max: usize) -> Result<HTable> {
    let f = ctx.field();
    seeds.require_commuting(f)?;
    if ctx.trunc().t_order <= m_max {
        return Err(Error::ShapeMismatch(format!(
            "θ_{{1,r}} needed up to r = {m_max} but the context has t-order {}",
            ctx.trunc().t_order
        )));
    }
    let l = seeds.l();
    let a01 = seeds.a01();
    let beta = ctx.beta();
    let mut h: Vec<Vec<Mat>> = vec![vec![Mat::identity(f, l)]];
    for m in 1..=m_max {
        let prev = &h;
        let row = par::map_range(2 * m + 1, |j| -> Result<Mat> {
            let mut acc = Mat::zeros(f, l, l);
            if j == 0 {
                return Ok(acc);
            }
            if j <= m {
                acc = seeds.a(f, m).scale(f, &f_closed(f, m, j));
            }
            for fv in 1..m {
                let r = m - fv;
                let coef = seeds
                    .a(f, r)
                    .add_scalar(f, &f.neg(&f.scale(&ctx.theta(1, r), &q(fv as i64))));
                let mut inner = Mat::zeros(f, l, l);
                for i in 1..=2 * fv {
                    let g = g_closed(f, m, fv, i, j);
                    if !g.is_zero() {
                        inner = inner.add(f, &prev[fv][i].scale(f, &g))?;
                    }
                }
                acc = acc.add(f, &coef.mul(f, &inner)?)?;
            }
            let shifted = a01.add_scalar(f, &f.mul(beta, &f.from_int(j as i64 - 1 - m as i64)));
            let jq = q(j as i64);
            for fv in 0..m {
                let th = ctx.theta(1, m - fv);
                if th.is_zero() {
                    continue;
                }
                let mut inner = Mat::zeros(f, l, l);
                for i in 0..=2 * fv {
                    if fv > 0 && i == 0 {
                        continue;
                    }
                    let gj = g_closed(f, m, fv, i, j);
                    let gj1 = g_closed(f, m, fv, i, j - 1);
                    let mut w = Mat::scalar(f, l, f.scale(&gj, &q(j as i64 - 1)));
                    if !gj1.is_zero() {
                        let c = f.scale(&gj1, &((jq.clone() - q(1)) / jq.clone()));
                        w = w.add(f, &shifted.scale(f, &c))?;
                    }
                    inner = inner.add(f, &prev[fv][i].mul(f, &w)?)?;
                }
                acc = acc.add(f, &inner.scale(f, &th))?;
            }
            Ok(acc)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        h.push(row);
    }
    Ok(HTable { l, m_max, h })
}

/// G = Σ_s A_{0,s} X^[s] in the one-variable ring with t-order 1.
fn row0_series(table: &StratTable, flat: &Arc<Ring>) -> Result<SimplexRingElem> {
    let d = flat.trunc().pd_degree;
    if table.n_max() < d {
        return Err(Error::ShapeMismatch("table has fewer columns than the pd degree".into()));
    }
    let mut g = SimplexRingElem::zero(flat, table.l());
    for s in 0..=d {
        g.set_coeff(0, &[s as u32], table.get(0, s).expect("in range").clone())?;
    }
    Ok(g)
}

/// Σ_j h̃_{m,j} (1−βX)^{m−j} X^j · Σ_s A_{0,s}X^[s], truncated at pd degree D.
pub fn closedform_series(
    ht: &HTable,
    table: &StratTable,
    m: usize,
    pd_degree: usize,
    field: &FieldDesc,
) -> Result<SimplexRingElem> {
    if m > ht.m_max() {
        return Err(Error::ShapeMismatch(format!("h̃ only tabulated up to m = {}", ht.m_max())));
    }
    let flat = Ring::new(field, 1, Trunc::new(1, pd_degree)?);
    let g = row0_series(table, &flat)?;
    if m == 0 {
        return Ok(g);
    }
    let one = SimplexRingElem::one(&flat, 1);
    let x = SimplexRingElem::var(&flat, 1)?;
    let base = one.sub(&x.scale(field.beta()))?;
    let base_inv = base.inverse()?;
    let mut sum = SimplexRingElem::zero(&flat, ht.l());
    for j in 1..=2 * m {
        let h = ht.get(m, j).expect("tabulated");
        if h.is_zero() {
            continue;
        }
        let e = m as i64 - j as i64;
        let pw = if e >= 0 { base.pow(e)? } else { base_inv.pow(-e)? };
        // X^j = j!·X^[j]
        let xj = SimplexRingElem::monomial(
            &flat,
            0,
            &[j as u32],
            Mat::scalar(field, 1, field.from_q(Q::from_integer(factorial(j as u64)))),
        );
        let term = pw.mul(&xj)?.left_mul_const(h)?.mul(&g)?;
        sum = sum.add(&term)?;
    }
    Ok(sum)
}

/// Row m of the table as a one-variable pd polynomial up to degree D.
pub fn table_row_series(
    table: &StratTable,
    m: usize,
    pd_degree: usize,
    field: &FieldDesc,
) -> Result<SimplexRingElem> {
    let flat = Ring::new(field, 1, Trunc::new(1, pd_degree)?);
    let mut out = SimplexRingElem::zero(&flat, table.l());
    for n in 0..=pd_degree {
        let a = table
            .get(m, n)
            .ok_or_else(|| Error::ShapeMismatch("table too small".into()))?;
        out.set_coeff(0, &[n as u32], a.clone())?;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub m_max: usize,
    pub pd_degree: usize,
    pub per_m: Vec<ResidualReport>,
    pub all_zero: bool,
}

/// Compares the recursion rows with the closed form for every m ≤ m_max.
pub fn verify_commutative(
    seeds: &Seeds,
    ctx: &CosimpCtx,
    m_max: usize,
    pd_degree: usize,
) -> Result<VerifyReport> {
    let f = ctx.field();
    let ht = h_table(seeds, ctx, m_max)?;
    let table = generate_amn(seeds, ctx, pd_degree)?;
    let per_m = par::map_range(m_max + 1, |m| -> Result<ResidualReport> {
        let lhs = table_row_series(&table, m, pd_degree, f)?;
        let rhs = closedform_series(&ht, &table, m, pd_degree, f)?;
        Ok(ResidualReport::from_series(&lhs.sub(&rhs)?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let all_zero = per_m.iter().all(ResidualReport::is_zero);
    Ok(VerifyReport {
        m_max,
        pd_degree,
        per_m,
        all_zero,
    })
}

/// A_{m,s} rebuilt from h̃ as Σ_j s(s−1)⋯(s−j+1)·∏_{t=j−m}^{s−m−1}(tβ + A_{0,1})·h̃_{m,j};
/// an empty product is I, which realizes the convention A_{0,−j}(−jβ+A_{0,1})⋯(−β+A_{0,1}) = I.
pub fn amn_from_h(ht: &HTable, a01: &Mat, m: usize, s: usize, field: &FieldDesc) -> Result<Mat> {
    let l = ht.l();
    let mut acc = Mat::zeros(field, l, l);
    if m == 0 {
        return product_range(a01, 0, s as i64 - 1, field);
    }
    for j in 1..=2 * m {
        let fall = falling(s as i64, j);
        if fall == q(0) {
            continue;
        }
        let p = product_range(a01, j as i64 - m as i64, s as i64 - m as i64 - 1, field)?;
        let term = p.mul(field, ht.get(m, j).expect("tabulated"))?.scale_q(field, &fall);
        acc = acc.add(field, &term)?;
    }
    Ok(acc)
}

/// ∏_{t=lo}^{hi}(tβ + A), I when lo > hi.
pub fn product_range(a: &Mat, lo: i64, hi: i64, field: &FieldDesc) -> Result<Mat> {
    let mut p = Mat::identity(field, a.rows());
    for t in lo..=hi {
        p = a.add_scalar(field, &field.mul(field.beta(), &field.from_int(t))).mul(field, &p)?;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::qf;

    #[test]
    fn e1_hand_example() {
        let field = FieldDesc::from_ints(3, &[-3, 1]).unwrap();
        let ctx = CosimpCtx::new(&field, Trunc::new(3, 6).unwrap()).unwrap();
        let a = field.from_q(qf(4, 5));
        let seeds = Seeds::scalars(&field, vec![field.from_int(-1), a.clone()]).unwrap();
        let ht = h_table(&seeds, &ctx, 2).unwrap();
        let table = generate_amn(&seeds, &ctx, 6).unwrap();
        let s = closedform_series(&ht, &table, 1, 6, &field).unwrap();
        // a·X(1−X) = aX^[1] − 2aX^[2]
        assert_eq!(s.scalar_coeff(0, &[1]), Some(&a));
        assert_eq!(s.scalar_coeff(0, &[2]), Some(&field.scale(&a, &q(-2))));
        for n in 3..=6 {
            assert!(s.scalar_coeff(0, &[n]).unwrap().is_zero());
        }
        let r = verify_commutative(&seeds, &ctx, 2, 6).unwrap();
        assert!(r.all_zero);
    }

    #[test]
    fn zero_seeds_give_zero_h() {
        let field = FieldDesc::from_ints(3, &[-3, 1]).unwrap();
        let ctx = CosimpCtx::new(&field, Trunc::new(4, 4).unwrap()).unwrap();
        let ht = h_table(&Seeds::zero(&field, 1), &ctx, 3).unwrap();
        for m in 1..=3 {
            for j in 0..=2 * m {
                assert!(ht.get(m, j).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn noncommuting_rejected() {
        let field = FieldDesc::from_ints(3, &[-3, 1]).unwrap();
        let ctx = CosimpCtx::new(&field, Trunc::new(3, 2).unwrap()).unwrap();
        let m = |r: [[i64; 2]; 2]| {
            Mat::from_rows(
                r.iter()
                    .map(|row| row.iter().map(|&x| field.from_int(x)).collect())
                    .collect(),
            )
            .unwrap()
        };
        let seeds = Seeds::new(vec![m([[1, 0], [0, 2]]), m([[0, 1], [0, 0]])]).unwrap();
        assert_eq!(h_table(&seeds, &ctx, 2), Err(Error::NonCommutingSeeds(1)));
    }
}
