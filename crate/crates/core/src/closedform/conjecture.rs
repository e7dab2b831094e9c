//! The series f̃(t) = Σ a_k t^k and the coefficient-wise form of the identity
//! α^a·f̃(αt)/f̃(t) = Σ_m (Σ_n A_{m,n}X^[n]) t^m.

use serde::Serialize;

use crate::coefficients::qf;
use crate::cosimplicial::CosimpCtx;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::par;
use crate::rings::{Ring, SimplexRingElem, Trunc};
use crate::stratification::{generate_amn, ResidualReport, Seeds};

/// a_0 = I and a_k = (1/(kβ)) Σ_{i+s=k, i<k} (d_{i+a,s,1} − A_{s,1})·a_i with
/// a = −A_{0,1}/β and d_{i+a,s,1} = −(i + a)θ_{1,s}.
pub fn ak_series(seeds: &Seeds, ctx: &CosimpCtx, k_max: usize) -> Result<Vec<Mat>> {
    let f = ctx.field();
    seeds.require_commuting(f)?;
    if ctx.trunc().t_order <= k_max {
        return Err(Error::ShapeMismatch(format!(
            "θ_{{1,s}} needed up to s = {k_max} but the context has t-order {}",
            ctx.trunc().t_order
        )));
    }
    let l = seeds.l();
    let beta_inv = f.inv(ctx.beta())?;
    let a = seeds.a01().scale(f, &f.neg(&beta_inv));
    let mut out = vec![Mat::identity(f, l)];
    for k in 1..=k_max {
        let mut acc = Mat::zeros(f, l, l);
        for i in 0..k {
            let s = k - i;
            // d_{i+a,s,1} = −(iI + a)θ_{1,s}
            let d = a
                .add_scalar(f, &f.from_int(i as i64))
                .scale(f, &f.neg(&ctx.theta(1, s)));
            let coef = d.sub(f, &seeds.a(f, s))?;
            acc = acc.add(f, &coef.mul(f, &out[i])?)?;
        }
        let scale = f.scale(&beta_inv, &qf(1, k as i64));
        out.push(acc.scale(f, &scale));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub k_max: usize,
    pub pd_degree: usize,
    pub a_k: Vec<Mat>,
    pub residuals: Vec<ResidualReport>,
    /// Orders k with a nonzero residual.
    pub nonzero_orders: Vec<usize>,
}

/// For each k ≤ k_max, LHS_k − RHS_k with
/// LHS_k = Σ_{i+s=k} c_{i+a,s}·a_i and RHS_k = Σ_{m+l=k} (Σ_n A_{m,n}X^[n])·a_l,
/// where c_{i+a,s} is the t^s coefficient of α^i·α^a and α^a = exp(a·log α).
pub fn conjecture_residual(seeds: &Seeds, ctx: &CosimpCtx, k_max: usize) -> Result<ConjectureReport> {
    let a_k = ak_series(seeds, ctx, k_max)?;
    conjecture_residual_with(seeds, ctx, a_k)
}

/// Same residuals for caller-supplied a_0, …, a_{k_max}.
pub fn conjecture_residual_with(seeds: &Seeds, ctx: &CosimpCtx, a_k: Vec<Mat>) -> Result<ConjectureReport> {
    let f = ctx.field();
    if a_k.is_empty() || ctx.trunc().t_order < a_k.len() {
        return Err(Error::ShapeMismatch("need 1 ≤ k_max + 1 ≤ t-order".into()));
    }
    let k_max = a_k.len() - 1;
    let d = ctx.trunc().pd_degree;
    let ring1 = ctx.ring(1);
    let flat = Ring::new(f, 1, Trunc::new(1, d)?);
    let beta_inv = f.inv(ctx.beta())?;
    let a = seeds.a01().scale(f, &f.neg(&beta_inv));
    let alpha_a = ctx.alpha().exp_pow(&a)?;
    let table = generate_amn(seeds, ctx, d)?;

    // α^{i+a} for i ≤ k_max
    let mut powers = vec![alpha_a];
    for i in 1..=k_max {
        powers.push(powers[i - 1].mul(ctx.alpha())?);
    }
    let row = |m: usize| -> Result<SimplexRingElem> {
        let mut out = SimplexRingElem::zero(&flat, seeds.l());
        for n in 0..=d {
            out.set_coeff(0, &[n as u32], table.get(m, n).expect("in range").clone())?;
        }
        Ok(out)
    };
    debug_assert!(ring1.trunc().t_order > k_max);

    let residuals = par::map_range(k_max + 1, |k| -> Result<ResidualReport> {
        let mut diff = SimplexRingElem::zero(&flat, seeds.l());
        for i in 0..=k {
            let c = powers[i].t_slice(k - i, &flat)?;
            diff = diff.add(&c.right_mul_const(&a_k[i])?)?;
        }
        for m in 0..=k {
            diff = diff.sub(&row(m)?.right_mul_const(&a_k[k - m])?)?;
        }
        Ok(ResidualReport::from_series(&diff))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let nonzero_orders = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_zero())
        .map(|(k, _)| k)
        .collect();
    Ok(ConjectureReport {
        k_max,
        pd_degree: d,
        a_k,
        residuals,
        nonzero_orders,
    })
}
