//! H⁰ of a de Rham crystal from its stratification, via the degree-0
//! Čech–Alexander condition, and the kernel-count dimension bound.

use serde::Serialize;

use crate::coefficients::{q, FieldDesc, KElem};
use crate::cosimplicial::CosimpCtx;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::par;
use crate::rings::SimplexRingElem;
use crate::stratification::StratTable;

/// One truncated global section: `B[m]` is the l-vector coefficient of t^m.
pub type Section = Vec<Vec<KElem>>;

#[derive(Clone, Debug, Serialize)]
pub struct H0Solution {
    /// K-basis of truncated sections surviving the full condition, B_0..B_{T−1}.
    pub basis: Vec<Section>,
    pub dim: usize,
    /// Dimension of the stage-1 (X₁-linear) solution space.
    pub stage1_dim: usize,
    /// Full-condition dimension at truncation orders 1..=T.
    pub dim_per_order: Vec<usize>,
    /// Dimension unchanged over the last three orders.
    pub stabilized: bool,
    pub q: usize,
    pub m_probe: usize,
    /// Every stage-1 candidate has vanishing X-degree 0 and 1 parts in the full residual.
    pub stage1_consistent: bool,
}

/// q = Σ_{m=0}^{m_probe} dim ker(A_{0,1} − mβ).
pub fn h0_dim_bound(f: &FieldDesc, a01: &Mat, m_probe: usize) -> usize {
    let beta = f.beta().clone();
    let l = a01.rows();
    (0..=m_probe)
        .map(|m| l - a01.add_scalar(f, &f.neg(&f.scale(&beta, &q(m as i64)))).rank(f))
        .sum()
}

/// Stage 1: the triangular system
/// (A_{0,1} − mβ)B_m = Σ_{p<m}(pθ_{1,m−p} − A_{m−p,1})B_p for m < t_order.
/// Returns a basis of the solution space, each element as B_0..B_{t_order−1}.
pub fn stage1_solutions(table: &StratTable, ctx: &CosimpCtx, t_order: usize) -> Result<Vec<Section>> {
    let f = ctx.field();
    let l = table.l();
    check_table(table, ctx, t_order, 1)?;
    // b[m] is l×P: B_m as a linear function of the current P parameters.
    let mut b: Vec<Mat> = Vec::new();
    let mut n_params = 0usize;
    for m in 0..t_order {
        let mut rhs = Mat::zeros(f, l, n_params);
        for (p, bp) in b.iter().enumerate() {
            let th = f.scale(&ctx.theta(1, m - p), &q(p as i64));
            let coef = table.get(m - p, 1).expect("checked").neg(f).add_scalar(f, &th);
            rhs = rhs.add(f, &coef.mul(f, bp)?)?;
        }
        let lhs = table
            .get(0, 1)
            .expect("checked")
            .add_scalar(f, &f.neg(&f.scale(ctx.beta(), &q(m as i64))));
        // Solve lhs·x = rhs·c jointly in (x, c): kernel of [lhs | −rhs].
        let aug = Mat::from_fn(l, l + n_params, |i, j| {
            if j < l {
                lhs.get(i, j).clone()
            } else {
                f.neg(rhs.get(i, j - l))
            }
        });
        let ker = aug.kernel(f);
        let new_p = ker.len();
        let c = Mat::from_fn(n_params, new_p, |i, k| ker[k][l + i].clone());
        let x = Mat::from_fn(l, new_p, |i, k| ker[k][i].clone());
        b = b.iter().map(|bp| bp.mul(f, &c)).collect::<Result<_>>()?;
        b.push(x);
        n_params = new_p;
    }
    Ok((0..n_params)
        .map(|k| b.iter().map(|bm| bm.column(k)).collect())
        .collect())
}

fn check_table(table: &StratTable, ctx: &CosimpCtx, t_order: usize, n_need: usize) -> Result<()> {
    if t_order == 0 || t_order > ctx.trunc().t_order || t_order > table.t_order() || table.n_max() < n_need {
        return Err(Error::ShapeMismatch(format!(
            "H⁰ truncation {t_order} needs a table and context with t-order ≥ {t_order} and pd degree ≥ {n_need}"
        )));
    }
    Ok(())
}

/// W_j = U·(αt)^j − t^j, so that a section's residual is Σ_j W_j·B_j.
fn residual_blocks(table: &StratTable, ctx: &CosimpCtx, t_order: usize) -> Result<Vec<SimplexRingElem>> {
    let u = crate::stratification::assemble_epsilon(table, ctx)?;
    let ring = ctx.ring(1);
    let l = table.l();
    par::map_range(t_order, |j| {
        let g = ctx.alpha_pow(j as i64)?.mul(&SimplexRingElem::t(&ring).pow(j as i64)?)?;
        let tj = SimplexRingElem::monomial(&ring, j, &[0], Mat::identity(ctx.field(), l));
        u.times_scalar_series(&g)?.sub(&tj)
    })
    .into_iter()
    .collect()
}

/// Coefficients of the residual of one section, restricted to t^m with m < t_order,
/// ordered by (m, pd degree, row). The second value collects X-degree ≤ 1 entries.
fn residual_vector(
    f: &FieldDesc,
    blocks: &[SimplexRingElem],
    sec: &Section,
    t_order: usize,
    pd_degree: usize,
) -> Result<(Vec<KElem>, bool)> {
    let l = sec.first().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(t_order * (pd_degree + 1) * l);
    let mut low_zero = true;
    for m in 0..t_order {
        for n in 0..=pd_degree {
            let mut acc = vec![f.zero(); l];
            for (j, bj) in sec.iter().enumerate().take(m + 1) {
                let w = blocks[j].coeff(m, &[n as u32]).expect("in range");
                for (i, a) in acc.iter_mut().enumerate() {
                    for (k, bk) in bj.iter().enumerate() {
                        if !bk.is_zero() {
                            *a = f.add(a, &f.mul(w.get(i, k), bk));
                        }
                    }
                }
            }
            if n <= 1 && acc.iter().any(|a| !a.is_zero()) {
                low_zero = false;
            }
            out.extend(acc);
        }
    }
    Ok((out, low_zero))
}

/// Full-condition solutions at one truncation order, from the stage-1 basis.
fn stage2(
    f: &FieldDesc,
    blocks: &[SimplexRingElem],
    cands: &[Section],
    t_order: usize,
    pd_degree: usize,
) -> Result<(Vec<Section>, bool)> {
    if cands.is_empty() {
        return Ok((Vec::new(), true));
    }
    let cols: Vec<(Vec<KElem>, bool)> = par::map(cands, |c| residual_vector(f, blocks, c, t_order, pd_degree))
        .into_iter()
        .collect::<Result<_>>()?;
    let consistent = cols.iter().all(|(_, z)| *z);
    let rows = cols[0].0.len();
    let s = Mat::from_fn(rows, cands.len(), |i, k| cols[k].0[i].clone());
    let ker = s.kernel(f);
    let l = cands[0][0].len();
    let basis = ker
        .iter()
        .map(|coef| {
            (0..t_order)
                .map(|m| {
                    (0..l)
                        .map(|i| {
                            coef.iter().zip(cands).fold(f.zero(), |acc, (c, cand)| {
                                if c.is_zero() {
                                    acc
                                } else {
                                    f.add(&acc, &f.mul(c, &cand[m][i]))
                                }
                            })
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok((basis, consistent))
}

/// Truncated H⁰ with the default kernel probe m_probe = T − 1 + l.
pub fn h0_solve(table: &StratTable, ctx: &CosimpCtx, t_order: usize) -> Result<H0Solution> {
    h0_solve_with_probe(table, ctx, t_order, t_order - 1 + table.l())
}

pub fn h0_solve_with_probe(
    table: &StratTable,
    ctx: &CosimpCtx,
    t_order: usize,
    m_probe: usize,
) -> Result<H0Solution> {
    let f = ctx.field();
    let d = ctx.trunc().pd_degree;
    check_table(table, ctx, t_order, d.max(1))?;
    let blocks = residual_blocks(table, ctx, t_order)?;
    let mut dim_per_order = Vec::with_capacity(t_order);
    let mut last = None;
    let mut consistent = true;
    for order in 1..=t_order {
        let cands = stage1_solutions(table, ctx, order)?;
        let (basis, ok) = stage2(f, &blocks, &cands, order, d)?;
        consistent &= ok;
        dim_per_order.push(basis.len());
        if order == t_order {
            last = Some((cands.len(), basis));
        }
    }
    let (stage1_dim, basis) = last.expect("t_order ≥ 1");
    let stabilized = dim_per_order.len() >= 3 && dim_per_order.windows(2).rev().take(2).all(|w| w[0] == w[1]);
    Ok(H0Solution {
        dim: basis.len(),
        basis,
        stage1_dim,
        dim_per_order,
        stabilized,
        q: h0_dim_bound(f, table.get(0, 1).expect("checked"), m_probe),
        m_probe,
        stage1_consistent: consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{qf, Q};
    use crate::rings::Trunc;
    use crate::stratification::{generate_amn, Seeds};

    fn setup(e2: bool, seeds: Vec<Q>, t: usize, d: usize) -> (FieldDesc, CosimpCtx, StratTable) {
        let field = if e2 {
            FieldDesc::from_ints(3, &[-3, 0, 1]).unwrap()
        } else {
            FieldDesc::from_ints(3, &[-3, 1]).unwrap()
        };
        let ctx = CosimpCtx::new(&field, Trunc::new(t, d).unwrap()).unwrap();
        let s = if seeds.is_empty() {
            Seeds::zero(&field, 1)
        } else {
            Seeds::scalars(&field, seeds.iter().map(|c| field.from_q(c.clone())).collect()).unwrap()
        };
        let table = generate_amn(&s, &ctx, d).unwrap();
        (field, ctx, table)
    }

    #[test]
    fn trivial_crystal() {
        let (f, ctx, table) = setup(true, vec![], 4, 6);
        let sol = h0_solve(&table, &ctx, 4).unwrap();
        assert_eq!(sol.dim, 1);
        assert!(sol.stabilized);
        assert_eq!(sol.basis[0][0], vec![f.one()]);
        assert!(sol.basis[0][1..].iter().all(|b| b[0].is_zero()));
    }

    #[test]
    fn hand_solve_first_order() {
        let (f, ctx, table) = setup(false, vec![qf(0, 1), qf(2, 5)], 2, 4);
        let cands = stage1_solutions(&table, &ctx, 2).unwrap();
        assert_eq!(cands.len(), 1);
        let b0 = &cands[0][0][0];
        let b1 = &cands[0][1][0];
        // B_1 = a B_0 / β with β = 1
        assert_eq!(f.mul(b0, &f.from_q(qf(2, 5))), *b1);
    }

    #[test]
    fn generic_weight_kills_h0() {
        let (f, ctx, table) = setup(false, vec![qf(-1, 1)], 4, 6);
        let sol = h0_solve(&table, &ctx, 4).unwrap();
        assert_eq!(sol.dim, 0);
        assert_eq!(sol.q, 0);
        assert_eq!(h0_dim_bound(&f, &Mat::diag(&f, vec![f.zero(), f.one()]), 3), 2);
    }
}
