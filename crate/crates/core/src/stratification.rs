//! Stratification tables {A_{m,n}} generated from the seeds {A_{m,1}}, the
//! near-Hodge–Tate probe on A_{0,1}, and cocycle residuals.

use serde::Serialize;

use crate::coefficients::{FieldDesc, KElem, Valuation};
use crate::cosimplicial::CosimpCtx;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::par;
use crate::rings::{SimplexRingElem, Trunc};

/// The seeds A_{m,1} for 0 ≤ m < len; missing rows count as zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seeds {
    l: usize,
    a1: Vec<Mat>,
}

impl Seeds {
    pub fn new(a1: Vec<Mat>) -> Result<Self> {
        let first = a1
            .first()
            .ok_or_else(|| Error::SeedShapeMismatch("at least A_{0,1} is required".into()))?;
        let l = first.rows();
        if l == 0 {
            return Err(Error::SeedShapeMismatch("empty seed matrix".into()));
        }
        for (m, a) in a1.iter().enumerate() {
            if !a.is_square() {
                return Err(Error::SeedShapeMismatch(format!(
                    "A_{{{m},1}} is {}x{}, not square",
                    a.rows(),
                    a.cols()
                )));
            }
            if a.rows() != l {
                return Err(Error::SeedShapeMismatch(format!(
                    "A_{{{m},1}} has size {} but A_{{0,1}} has size {l}",
                    a.rows()
                )));
            }
        }
        Ok(Seeds { l, a1 })
    }

    /// Scalar seeds (l = 1).
    pub fn scalars(f: &FieldDesc, a1: Vec<KElem>) -> Result<Self> {
        Self::new(a1.into_iter().map(|a| Mat::scalar(f, 1, a)).collect())
    }

    pub fn zero(f: &FieldDesc, l: usize) -> Self {
        Seeds {
            l,
            a1: vec![Mat::zeros(f, l, l)],
        }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.a1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a1.is_empty()
    }

    pub fn a01(&self) -> &Mat {
        &self.a1[0]
    }

    /// A_{m,1}, zero past the supplied seeds.
    pub fn a(&self, f: &FieldDesc, m: usize) -> Mat {
        self.a1
            .get(m)
            .cloned()
            .unwrap_or_else(|| Mat::zeros(f, self.l, self.l))
    }

    pub fn raw(&self) -> &[Mat] {
        &self.a1
    }

    /// First m ≥ 1 with A_{m,1} not commuting with A_{0,1}.
    pub fn first_noncommuting(&self, f: &FieldDesc) -> Option<usize> {
        let a0 = self.a01();
        (1..self.a1.len()).find(|&m| !a0.commutes(f, &self.a1[m]).unwrap_or(false))
    }

    pub fn require_commuting(&self, f: &FieldDesc) -> Result<()> {
        match self.first_noncommuting(f) {
            Some(m) => Err(Error::NonCommutingSeeds(m)),
            None => Ok(()),
        }
    }
}

/// A_{m,n} for m < T and n ≤ n_max.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratTable {
    l: usize,
    t_order: usize,
    n_max: usize,
    /// `a[m][n]`.
    a: Vec<Vec<Mat>>,
}

impl StratTable {
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn t_order(&self) -> usize {
        self.t_order
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, m: usize, n: usize) -> Option<&Mat> {
        self.a.get(m)?.get(n)
    }

    pub fn row(&self, m: usize) -> &[Mat] {
        &self.a[m]
    }

    /// Minimum entry valuation of each A_{m,n}, row by row.
    pub fn row_valuations(&self, f: &FieldDesc) -> Vec<Vec<Valuation>> {
        self.a
            .iter()
            .map(|row| row.iter().map(|a| a.min_valuation(f)).collect())
            .collect()
    }
}

/// Fills A_{m,n} column by column using
/// A_{m,k+1} = (β(k−m) + A_{0,1})A_{m,k} + Σ_{i+j=m, i<m}(A_{j,1} + (k−i)θ_{1,j})A_{i,k},
/// starting from A_{0,0} = I and A_{m,0} = 0.
pub fn generate_amn(seeds: &Seeds, ctx: &CosimpCtx, n_max: usize) -> Result<StratTable> {
    let f = ctx.field();
    let l = seeds.l();
    let t_order = ctx.trunc().t_order;
    let beta = ctx.beta();
    let a01 = seeds.a01();
    let a1: Vec<Mat> = (0..t_order).map(|m| seeds.a(f, m)).collect();

    let mut cols: Vec<Vec<Mat>> = Vec::with_capacity(n_max + 1);
    cols.push(
        (0..t_order)
            .map(|m| {
                if m == 0 {
                    Mat::identity(f, l)
                } else {
                    Mat::zeros(f, l, l)
                }
            })
            .collect(),
    );
    for k in 0..n_max {
        let prev = &cols[k];
        let next = par::map_range(t_order, |m| -> Result<Mat> {
            let shift = f.mul(beta, &f.from_int(k as i64 - m as i64));
            let mut acc = a01.add_scalar(f, &shift).mul(f, &prev[m])?;
            for i in 0..m {
                let j = m - i;
                let th = f.scale(&ctx.theta(1, j), &crate::coefficients::q(k as i64 - i as i64));
                let coef = a1[j].add_scalar(f, &th);
                acc = acc.add(f, &coef.mul(f, &prev[i])?)?;
            }
            Ok(acc)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        cols.push(next);
    }
    let a = (0..t_order)
        .map(|m| cols.iter().map(|c| c[m].clone()).collect())
        .collect();
    Ok(StratTable {
        l,
        t_order,
        n_max,
        a,
    })
}

/// U(X₁, t) = Σ_m (Σ_n A_{m,n} X₁^[n]) t^m in the one-variable ring.
pub fn assemble_epsilon(table: &StratTable, ctx: &CosimpCtx) -> Result<SimplexRingElem> {
    let ring = ctx.ring(1);
    let trunc = ctx.trunc();
    let mut u = SimplexRingElem::zero(&ring, table.l());
    for m in 0..trunc.t_order.min(table.t_order()) {
        for n in 0..=trunc.pd_degree.min(table.n_max()) {
            u.set_coeff(m, &[n as u32], table.a[m][n].clone())?;
        }
    }
    Ok(u)
}

/// R = δ₁²(U) − δ₂²(U)·δ₀²(U); zero exactly when the cocycle condition holds in truncation.
pub fn cocycle_residual(u: &SimplexRingElem, ctx: &CosimpCtx) -> Result<SimplexRingElem> {
    if u.n_vars() != 1 {
        return Err(Error::ShapeMismatch("ε must live in the one-variable ring".into()));
    }
    let d1 = ctx.face_map(1, u)?;
    let d2 = ctx.face_map(2, u)?;
    let d0 = ctx.face_map(0, u)?;
    d1.sub(&d2.mul(&d0)?)
}

/// The same residual assembled coefficient by coefficient: the X₂^[k]t^m part is
/// A_{m,k} − Σ_{i+j=m}(Σ_s A_{j,s}X₁^[s])(Σ_{p≤i}Σ_v A_{p,k+v}(−1)^v X₁^[v] c_{p−k−v, i−p}).
pub fn cocycle_residual_by_coefficients(
    table: &StratTable,
    ctx: &CosimpCtx,
) -> Result<SimplexRingElem> {
    let f = ctx.field();
    let trunc = ctx.trunc();
    let (t_order, d) = (trunc.t_order, trunc.pd_degree);
    if table.n_max() < d || table.t_order() < t_order {
        return Err(Error::ShapeMismatch("table smaller than the truncation".into()));
    }
    let l = table.l();
    let flat = crate::rings::Ring::new(f, 1, Trunc::new(1, d)?);
    let cd = ctx.cd_table(-(d as i64), t_order as i64)?;
    // c_{p,s} restricted to t⁰ of the flat one-variable ring
    let c_poly = |p: i64, s: usize| -> Result<SimplexRingElem> {
        let coeffs = cd.c(p, s).expect("tabulated");
        let mut out = SimplexRingElem::zero(&flat, 1);
        for (k, v) in coeffs.into_iter().enumerate() {
            out.set_coeff(0, &[k as u32], Mat::scalar(f, 1, v))?;
        }
        Ok(out)
    };
    let row_poly = |j: usize| -> Result<SimplexRingElem> {
        let mut out = SimplexRingElem::zero(&flat, l);
        for s in 0..=d {
            out.set_coeff(0, &[s as u32], table.a[j][s].clone())?;
        }
        Ok(out)
    };

    let ring2 = ctx.ring(2);
    let pieces = par::map_range(t_order * (d + 1), |idx| -> Result<Vec<(usize, usize, u32, Mat)>> {
        let (m, k) = (idx / (d + 1), idx % (d + 1));
        let mut rhs = SimplexRingElem::zero(&flat, l);
        for i in 0..=m {
            let j = m - i;
            let mut inner = SimplexRingElem::zero(&flat, l);
            for p in 0..=i {
                for v in 0..=(d - k) {
                    let q = k + v;
                    let sign = if v % 2 == 0 { f.one() } else { f.from_int(-1) };
                    let coef = table.a[p][q].scale(f, &sign);
                    let xv = SimplexRingElem::monomial(&flat, 0, &[v as u32], coef);
                    let c = c_poly(p as i64 - q as i64, i - p)?;
                    inner = inner.add(&xv.mul(&c)?)?;
                }
            }
            rhs = rhs.add(&row_poly(j)?.mul(&inner)?)?;
        }
        let mut out = Vec::new();
        for a in 0..=(d - k) {
            let mut c = rhs.coeff(0, &[a as u32]).expect("in range").neg(f);
            if a == 0 {
                c = c.add(f, &table.a[m][k])?;
            }
            if !c.is_zero() {
                out.push((m, k, a as u32, c));
            }
        }
        Ok(out)
    });
    let mut r = SimplexRingElem::zero(&ring2, l);
    for piece in pieces {
        for (m, k, a, c) in piece? {
            r.set_coeff(m, &[a, k as u32], c)?;
        }
    }
    Ok(r)
}

/// Verdicts shared by the probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NearHtMode {
    /// Track v(∏_{i≤n}(iβ + A_{0,1})) for n ≤ `n`.
    Probe { n: usize, threshold: i64 },
    /// Check the given eigenvalues w of −A_{0,1}/β lie in ℤ + β⁻¹𝔪.
    ExactWeights(Vec<KElem>),
}

impl Default for NearHtMode {
    fn default() -> Self {
        NearHtMode::Probe {
            n: 64,
            threshold: 40,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightCheck {
    pub weight: KElem,
    pub nearest_integer: i64,
    pub distance_valuation: Valuation,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NearHtReport {
    pub mode: &'static str,
    pub verdict: Verdict,
    /// Probe mode: min-entry valuation of P_n for n = 0..=N (null once P_n = 0).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valuations: Option<Vec<Valuation>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_at: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<WeightCheck>>,
}

pub fn check_near_ht(f: &FieldDesc, a01: &Mat, mode: &NearHtMode) -> Result<NearHtReport> {
    if !a01.is_square() {
        return Err(Error::ShapeMismatch("A_{0,1} must be square".into()));
    }
    match mode {
        NearHtMode::Probe { n, threshold } => {
            let mut p = a01.clone();
            let mut vals = vec![p.min_valuation(f)];
            let mut zero_at = p.is_zero().then_some(0);
            for i in 1..=*n {
                if zero_at.is_some() {
                    break;
                }
                let factor = a01.add_scalar(f, &f.mul(f.beta(), &f.from_int(i as i64)));
                p = factor.mul(f, &p)?;
                vals.push(p.min_valuation(f));
                if p.is_zero() {
                    zero_at = Some(i);
                }
            }
            let last = *vals.last().expect("nonempty");
            let verdict = if zero_at.is_some() || last >= Valuation::Finite(*threshold) {
                Verdict::Pass
            } else if last <= vals[*n / 2] {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            };
            Ok(NearHtReport {
                mode: "probe",
                verdict,
                valuations: Some(vals),
                zero_at,
                threshold: Some(*threshold),
                weights: None,
            })
        }
        NearHtMode::ExactWeights(ws) => {
            let checks: Vec<WeightCheck> = ws.iter().map(|w| weight_check(f, w)).collect();
            let verdict = if checks.iter().all(|c| c.ok) {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            Ok(NearHtReport {
                mode: "exact_weights",
                verdict,
                valuations: None,
                zero_at: None,
                threshold: None,
                weights: Some(checks),
            })
        }
    }
}

/// w ∈ ℤ + β⁻¹𝔪 iff v(β(w − n)) > 0 for the integer n closest to w.
/// For integral w that is its residue mod π; otherwise every integer is equally far.
pub fn weight_check(f: &FieldDesc, w: &KElem) -> WeightCheck {
    let n = f.residue(w).map_or(0, |r| r as i64);
    let dist = f.sub(w, &f.from_int(n));
    let v = f.valuation(&f.mul(f.beta(), &dist));
    WeightCheck {
        weight: w.clone(),
        nearest_integer: n,
        distance_valuation: f.valuation(&dist),
        ok: v > Valuation::Finite(0),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NonzeroMonomial {
    pub m: usize,
    pub multi_index: Vec<u32>,
    pub valuation: Valuation,
}

/// Machine-readable summary of a residual series.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub trunc: Trunc,
    /// Smallest valuation among nonzero coefficients (null for a zero residual).
    pub max_nonzero_coefficient_valuation: Option<i64>,
    pub nonzero_monomials: Vec<NonzeroMonomial>,
    pub verdict: ResidualVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ResidualVerdict {
    ZeroResidual,
    NonzeroResidual,
}

impl ResidualReport {
    pub fn from_series(r: &SimplexRingElem) -> Self {
        let f = r.field();
        let nonzero: Vec<NonzeroMonomial> = r
            .terms()
            .map(|(m, multi, c)| NonzeroMonomial {
                m,
                multi_index: multi.to_vec(),
                valuation: c.min_valuation(f),
            })
            .collect();
        let min_val = nonzero.iter().filter_map(|n| n.valuation.finite()).min();
        ResidualReport {
            trunc: r.trunc(),
            max_nonzero_coefficient_valuation: min_val,
            verdict: if nonzero.is_empty() {
                ResidualVerdict::ZeroResidual
            } else {
                ResidualVerdict::NonzeroResidual
            },
            nonzero_monomials: nonzero,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.verdict == ResidualVerdict::ZeroResidual
    }
}

/// Generates the table at the context truncation and reports the cocycle residual.
pub fn cocycle_report(seeds: &Seeds, ctx: &CosimpCtx) -> Result<ResidualReport> {
    let table = generate_amn(seeds, ctx, ctx.trunc().pd_degree)?;
    let u = assemble_epsilon(&table, ctx)?;
    Ok(ResidualReport::from_series(&cocycle_residual(&u, ctx)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{q, qf};

    fn e1(t: usize, d: usize) -> CosimpCtx {
        let f = FieldDesc::from_ints(3, &[-3, 1]).unwrap();
        CosimpCtx::new(&f, Trunc::new(t, d).unwrap()).unwrap()
    }

    #[test]
    fn hand_recursion() {
        let ctx = e1(2, 4);
        let f = ctx.field().clone();
        let a = f.from_q(qf(5, 7));
        let seeds = Seeds::scalars(&f, vec![f.from_int(-1), a.clone()]).unwrap();
        let t = generate_amn(&seeds, &ctx, 4).unwrap();
        assert_eq!(t.get(1, 1).unwrap().get(0, 0), &a);
        assert_eq!(t.get(1, 2).unwrap().get(0, 0), &f.scale(&a, &q(-2)));
        assert!(t.get(1, 3).unwrap().is_zero());
        assert!(t.get(0, 2).unwrap().is_zero());
    }

    #[test]
    fn zero_seed_residual() {
        let ctx = e1(3, 4);
        let seeds = Seeds::zero(ctx.field(), 1);
        let r = cocycle_report(&seeds, &ctx).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn seed_shape_errors() {
        let f = FieldDesc::from_ints(3, &[-3, 1]).unwrap();
        let bad = Seeds::new(vec![Mat::zeros(&f, 2, 2), Mat::zeros(&f, 1, 1)]);
        assert!(matches!(bad, Err(Error::SeedShapeMismatch(_))));
        let bad = Seeds::new(vec![Mat::zeros(&f, 2, 1)]);
        assert!(matches!(bad, Err(Error::SeedShapeMismatch(_))));
    }

    #[test]
    fn probe_verdicts() {
        let f = FieldDesc::from_ints(3, &[-3, 1]).unwrap();
        let m = |x| Mat::scalar(&f, 1, x);
        let r = check_near_ht(&f, &m(f.neg(f.beta())), &NearHtMode::default()).unwrap();
        assert_eq!((r.verdict, r.zero_at), (Verdict::Pass, Some(1)));
        let r = check_near_ht(&f, &m(f.from_q(qf(1, 3))), &NearHtMode::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let long = NearHtMode::Probe {
            n: 128,
            threshold: 40,
        };
        let r = check_near_ht(&f, &m(f.one()), &long).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }
}
