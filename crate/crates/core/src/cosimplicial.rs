//! The Breuil–Kisin cosimplicial data: u₀(t), θ_{n,i}, α = E(u₁)/E(u₀),
//! its powers and the face maps δᵢ.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::coefficients::field::poly_derivative;
use crate::coefficients::{FieldDesc, KElem, Q};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::rings::{Ring, SimplexRingElem, Trunc};

/// Everything derived from (E, truncation) that the other modules share.
#[derive(Clone, Debug)]
pub struct CosimpCtx {
    field: FieldDesc,
    trunc: Trunc,
    rings: Vec<Arc<Ring>>,
    u0: SimplexRingElem,
    /// `theta[n - 1][i]` = θ_{n,i} for 1 ≤ n ≤ e, i < T.
    theta: Vec<Vec<KElem>>,
    alpha: SimplexRingElem,
    alpha_inv: SimplexRingElem,
}

impl CosimpCtx {
    pub fn new(field: &FieldDesc, trunc: Trunc) -> Result<Self> {
        let rings: Vec<Arc<Ring>> = (0..=2).map(|n| Ring::new(field, n, trunc)).collect();
        let u0 = hensel_u0(field, trunc.t_order)?.embed(&rings[0])?;
        let theta = theta_from_u0(field, &u0)?;
        let alpha = alpha_from_theta(&rings[1], &theta)?;
        let alpha_inv = alpha.inverse()?;
        Ok(CosimpCtx {
            field: field.clone(),
            trunc,
            rings,
            u0,
            theta,
            alpha,
            alpha_inv,
        })
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn trunc(&self) -> Trunc {
        self.trunc
    }

    pub fn beta(&self) -> &KElem {
        self.field.beta()
    }

    /// The ring in `n` variables at this truncation (built on demand beyond n = 2).
    pub fn ring(&self, n: usize) -> Arc<Ring> {
        self.rings
            .get(n)
            .cloned()
            .unwrap_or_else(|| Ring::new(&self.field, n, self.trunc))
    }

    /// u₀ ∈ K[[t]]/t^T.
    pub fn u0(&self) -> &SimplexRingElem {
        &self.u0
    }

    /// θ_{n,i}; zero for i ≥ T or n outside 1..=e.
    pub fn theta(&self, n: usize, i: usize) -> KElem {
        if n == 0 {
            return self.field.zero();
        }
        self.theta
            .get(n - 1)
            .and_then(|row| row.get(i))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn theta_table(&self) -> &[Vec<KElem>] {
        &self.theta
    }

    pub fn alpha(&self) -> &SimplexRingElem {
        &self.alpha
    }

    pub fn alpha_inv(&self) -> &SimplexRingElem {
        &self.alpha_inv
    }

    /// α^p for integer p.
    pub fn alpha_pow(&self, p: i64) -> Result<SimplexRingElem> {
        if p >= 0 {
            self.alpha.pow(p)
        } else {
            self.alpha_inv.pow(-p)
        }
    }

    /// Face map δᵢ^{n+1} from the n-variable ring to the (n+1)-variable ring.
    pub fn face_map(&self, i: usize, x: &SimplexRingElem) -> Result<SimplexRingElem> {
        let n = x.n_vars();
        if i > n + 1 {
            return Err(Error::IndexOutOfRange { index: i, n_vars: n });
        }
        if x.trunc() != self.trunc {
            return Err(Error::ShapeMismatch("element truncation differs from context".into()));
        }
        let target = self.ring(n + 1);
        let one = SimplexRingElem::one(&target, 1);
        let t = SimplexRingElem::t(&target);
        let (var_images, t_image) = if i == 0 {
            let alpha = self.alpha.embed(&target)?;
            let alpha_inv = self.alpha_inv.embed(&target)?;
            let x1 = SimplexRingElem::var(&target, 1)?;
            let vars = (1..=n)
                .map(|j| {
                    SimplexRingElem::var(&target, j + 1)?
                        .sub(&x1)?
                        .mul(&alpha_inv)
                })
                .collect::<Result<Vec<_>>>()?;
            (vars, alpha.mul(&t)?)
        } else {
            let vars = (1..=n)
                .map(|j| SimplexRingElem::var(&target, if j < i { j } else { j + 1 }))
                .collect::<Result<Vec<_>>>()?;
            (vars, t)
        };

        let d = self.trunc.pd_degree;
        // divided powers of the variable images and powers of the t image
        let var_pows = var_images
            .iter()
            .map(|y| divided_power_table(y, d))
            .collect::<Result<Vec<_>>>()?;
        let mut t_pows = vec![one.clone()];
        for m in 1..self.trunc.t_order {
            t_pows.push(t_pows[m - 1].mul(&t_image)?);
        }

        let mut out = SimplexRingElem::zero(&target, x.l());
        for (m, multi, c) in x.terms() {
            let mut img = t_pows[m].clone();
            for (j, &a) in multi.iter().enumerate() {
                if a > 0 {
                    img = img.mul(&var_pows[j][a as usize])?;
                }
            }
            out = out.add(&img.right_mul_const(c)?)?;
        }
        Ok(out)
    }

    /// α^p for every p in the range, with their t- and pd-coefficients.
    pub fn cd_table(&self, p_min: i64, p_max: i64) -> Result<CDTable> {
        let mut powers = BTreeMap::new();
        let mut cur = SimplexRingElem::one(&self.rings[1], 1);
        for p in 0..=p_max.max(0) {
            if p >= p_min {
                powers.insert(p, cur.clone());
            }
            cur = cur.mul(&self.alpha)?;
        }
        let mut cur = self.alpha_inv.clone();
        for p in (p_min.min(0)..0).rev() {
            if p <= p_max {
                powers.insert(p, cur.clone());
            }
            cur = cur.mul(&self.alpha_inv)?;
        }
        Ok(CDTable { powers })
    }

    pub fn report(&self) -> CosimpReport {
        CosimpReport {
            trunc: self.trunc,
            u0: self.u0.report(),
            theta: self
                .theta
                .iter()
                .enumerate()
                .map(|(n, row)| (format!("{}", n + 1), row.clone()))
                .collect(),
            alpha: self.alpha.report(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CosimpReport {
    pub trunc: Trunc,
    pub u0: crate::rings::SeriesReport,
    pub theta: BTreeMap<String, Vec<KElem>>,
    pub alpha: crate::rings::SeriesReport,
}

/// Coefficients of α^p = Σ_s c_{p,s} t^s with c_{p,s} = Σ_k d_{p,s,k} X₁^[k].
#[derive(Clone, Debug)]
pub struct CDTable {
    powers: BTreeMap<i64, SimplexRingElem>,
}

impl CDTable {
    pub fn power(&self, p: i64) -> Option<&SimplexRingElem> {
        self.powers.get(&p)
    }

    pub fn exponents(&self) -> impl Iterator<Item = i64> + '_ {
        self.powers.keys().copied()
    }

    /// d_{p,s,k}, or `None` when p was not tabulated or (s, k) is truncated away.
    pub fn d(&self, p: i64, s: usize, k: u32) -> Option<&KElem> {
        self.powers.get(&p)?.scalar_coeff(s, &[k])
    }

    /// c_{p,s} as its list of pd-coefficients d_{p,s,0..=D}.
    pub fn c(&self, p: i64, s: usize) -> Option<Vec<KElem>> {
        let a = self.powers.get(&p)?;
        let d = a.trunc().pd_degree as u32;
        (0..=d).map(|k| a.scalar_coeff(s, &[k]).cloned()).collect()
    }
}

/// y^[0..=d] for y with zero constant term.
fn divided_power_table(y: &SimplexRingElem, d: usize) -> Result<Vec<SimplexRingElem>> {
    let mut out = vec![SimplexRingElem::one(y.ring(), y.l())];
    for a in 1..=d {
        // y^[a] = y^[a−1]·y / a
        let next = out[a - 1]
            .mul(y)?
            .scale_q(&Q::new(1.into(), (a as i64).into()));
        out.push(next);
    }
    Ok(out)
}

/// Evaluates a polynomial with rational coefficients at a scalar series.
pub fn eval_poly_series(coeffs: &[Q], x: &SimplexRingElem) -> Result<SimplexRingElem> {
    let f = x.field();
    let mut acc = SimplexRingElem::zero(x.ring(), 1);
    for c in coeffs.iter().rev() {
        acc = acc.mul(x)?;
        acc = acc.add(&SimplexRingElem::scalar_const(x.ring(), f.from_q(c.clone())))?;
    }
    Ok(acc)
}

/// The unique u₀ ∈ K[[t]]/t^T with u₀(0) = π and E(u₀) = t, by Newton iteration
/// with doubling precision.
pub fn hensel_u0(field: &FieldDesc, t_order: usize) -> Result<SimplexRingElem> {
    let poly = field.poly();
    let deriv = poly_derivative(poly);
    let mut prec = 1;
    let mut ring = Ring::new(field, 0, Trunc::new(1, 0)?);
    let mut u = SimplexRingElem::scalar_const(&ring, field.pi());
    while prec < t_order {
        prec = (2 * prec).min(t_order);
        ring = Ring::new(field, 0, Trunc::new(prec, 0)?);
        u = u.embed(&ring)?;
        let residual = eval_poly_series(poly, &u)?.sub(&SimplexRingElem::t(&ring))?;
        let step = residual.mul(&eval_poly_series(&deriv, &u)?.inverse()?)?;
        u = u.sub(&step)?;
    }
    Ok(u)
}

fn theta_from_u0(field: &FieldDesc, u0: &SimplexRingElem) -> Result<Vec<Vec<KElem>>> {
    let mut d = field.poly().to_vec();
    let mut out = Vec::with_capacity(field.e());
    for _ in 0..field.e() {
        d = poly_derivative(&d);
        let s = eval_poly_series(&d, u0)?;
        out.push(
            (0..u0.trunc().t_order)
                .map(|i| s.scalar_coeff(i, &[]).cloned().unwrap_or_else(|| field.zero()))
                .collect(),
        );
    }
    Ok(out)
}

/// α = 1 + Σ_{n=1}^{e} E^{(n)}(u₀)·(−1)ⁿ·X₁^[n]·t^{n−1}.
fn alpha_from_theta(ring1: &Arc<Ring>, theta: &[Vec<KElem>]) -> Result<SimplexRingElem> {
    let f = ring1.field();
    let t_order = ring1.trunc().t_order;
    let mut alpha = SimplexRingElem::one(ring1, 1);
    for (idx, row) in theta.iter().enumerate() {
        let n = idx + 1;
        for (i, th) in row.iter().enumerate() {
            let m = i + n - 1;
            if m >= t_order || th.is_zero() {
                continue;
            }
            let c = if n % 2 == 0 { th.clone() } else { f.neg(th) };
            let term = SimplexRingElem::monomial(ring1, m, &[n as u32], Mat::scalar(f, 1, c));
            alpha = alpha.add(&term)?;
        }
    }
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{q, qf};

    #[test]
    fn linear_e() {
        let f = FieldDesc::from_ints(3, &[-3, 1]).unwrap();
        let ctx = CosimpCtx::new(&f, Trunc::new(4, 3).unwrap()).unwrap();
        assert_eq!(ctx.u0().scalar_coeff(0, &[]), Some(&f.from_int(3)));
        assert_eq!(ctx.u0().scalar_coeff(1, &[]), Some(&f.one()));
        assert!(ctx.u0().scalar_coeff(2, &[]).unwrap().is_zero());
        assert_eq!(ctx.theta(1, 0), f.one());
        assert!(ctx.theta(1, 1).is_zero());
        let x = SimplexRingElem::var(&ctx.ring(1), 1).unwrap();
        let expect = SimplexRingElem::one(&ctx.ring(1), 1).sub(&x).unwrap();
        assert_eq!(ctx.alpha(), &expect);
    }

    #[test]
    fn quadratic_e() {
        let f = FieldDesc::from_ints(3, &[-3, 0, 1]).unwrap();
        let ctx = CosimpCtx::new(&f, Trunc::new(3, 2).unwrap()).unwrap();
        // coefficient of t is 1/β = 1/(2π) = π/6
        assert_eq!(
            ctx.u0().scalar_coeff(1, &[]),
            Some(&f.elem(vec![q(0), qf(1, 6)]))
        );
        // θ_{1,1} = 1/π = π/3
        assert_eq!(ctx.theta(1, 1), f.elem(vec![q(0), qf(1, 3)]));
        assert_eq!(ctx.theta(2, 0), f.from_int(2));
        let back = eval_poly_series(f.poly(), ctx.u0()).unwrap();
        assert_eq!(back, SimplexRingElem::t(&ctx.ring(0)));
    }

    #[test]
    fn face_map_on_t() {
        let f = FieldDesc::from_ints(3, &[-3, 0, 1]).unwrap();
        let ctx = CosimpCtx::new(&f, Trunc::new(3, 3).unwrap()).unwrap();
        let t = SimplexRingElem::t(&ctx.ring(0));
        let img = ctx.face_map(0, &t).unwrap();
        let expect = ctx.alpha().mul(&SimplexRingElem::t(&ctx.ring(1))).unwrap();
        assert_eq!(img, expect);
        assert_eq!(ctx.face_map(1, &t).unwrap(), SimplexRingElem::t(&ctx.ring(1)));
        assert!(matches!(
            ctx.face_map(3, &SimplexRingElem::t(&ctx.ring(1))),
            Err(Error::IndexOutOfRange { .. })
        ));
    }
}
