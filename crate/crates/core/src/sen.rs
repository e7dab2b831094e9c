//! The Kummer-Sen operator on the crystal basis: the unit λ₁, the matrix
//! N = −λ₁·u₀·Σ_m A_{m,1}t^m, and the nearly de Rham classification.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::coefficients::{FieldDesc, KElem, PadicApprox, PadicReport, Valuation, Q};
use crate::cosimplicial::CosimpCtx;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::stratification::{check_near_ht, weight_check, NearHtMode, NearHtReport, Seeds, Verdict, WeightCheck};

/// Truncated t-series with p-adic coefficients.
pub type PSeries = Vec<PadicApprox>;

fn ps_mul(f: &FieldDesc, a: &[PadicApprox], b: &[PadicApprox]) -> PSeries {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| {
            (0..=k).fold(PadicApprox::exact(f.zero()), |acc, i| acc.add(f, &a[i].mul(f, &b[k - i])))
        })
        .collect()
}

fn ps_pow(f: &FieldDesc, a: &[PadicApprox], mut e: u64) -> PSeries {
    let mut base = a.to_vec();
    let mut out: PSeries = (0..a.len())
        .map(|i| PadicApprox::exact(if i == 0 { f.one() } else { f.zero() }))
        .collect();
    while e > 0 {
        if e & 1 == 1 {
            out = ps_mul(f, &out, &base);
        }
        e >>= 1;
        if e > 0 {
            base = ps_mul(f, &base, &base);
        }
    }
    out
}

/// Σ c_i x^i by Horner's rule.
fn ps_eval_poly(f: &FieldDesc, coeffs: &[Q], x: &[PadicApprox]) -> PSeries {
    let n = x.len();
    let mut acc: PSeries = vec![PadicApprox::exact(f.zero()); n];
    for c in coeffs.iter().rev() {
        acc = ps_mul(f, &acc, x);
        acc[0] = acc[0].add(f, &PadicApprox::exact(f.from_q(c.clone())));
    }
    acc
}

fn ps_scale(f: &FieldDesc, a: &[PadicApprox], c: &KElem) -> PSeries {
    let c = PadicApprox::exact(c.clone());
    a.iter().map(|x| x.mul(f, &c)).collect()
}

fn min_prec(a: &[PadicApprox]) -> i64 {
    a.iter().map(PadicApprox::abs_prec).min().unwrap_or(crate::coefficients::EXACT)
}

/// Exact t-coefficients of u₀ as p-adic values known to π^work.
fn u0_approx(ctx: &CosimpCtx, work: i64) -> PSeries {
    let f = ctx.field();
    (0..ctx.trunc().t_order)
        .map(|m| {
            let c = ctx.u0().scalar_coeff(m, &vec![0; ctx.u0().n_vars()]).cloned().unwrap_or_else(|| f.zero());
            PadicApprox::new(f, c, work)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Lambda1 {
    /// t-coefficients of λ₁.
    #[serde(serialize_with = "ser_pseries")]
    pub coeffs: PSeries,
    /// Requested precision as a power of p.
    pub prec: i64,
    /// Frobenius factors n = 1..=n_used entered the product.
    pub n_used: usize,
    /// Smallest coefficient precision, in powers of p.
    pub achieved_prec: i64,
    /// Working precision (π-units) of the run that settled.
    pub work_prec: i64,
    /// v(E(u₀^{pⁿ})/E(0) − 1) lower bounds for n = 1..=n_used + 1, in π-units.
    pub factor_valuations: Vec<i64>,
}

fn ser_pseries<S: serde::Serializer>(s: &PSeries, ser: S) -> std::result::Result<S::Ok, S::Error> {
    // Serialization needs the field for precision in powers of p; report π-units only.
    use serde::ser::SerializeSeq;
    let mut seq = ser.serialize_seq(Some(s.len()))?;
    for x in s {
        seq.serialize_element(&PadicJson {
            value: x.value(),
            exact: x.is_exact(),
            prec_pi: (!x.is_exact()).then_some(x.abs_prec()),
        })?;
    }
    seq.end()
}

#[derive(Serialize)]
struct PadicJson<'a> {
    value: &'a KElem,
    exact: bool,
    prec_pi: Option<i64>,
}

/// Lower bound on min_k v(a_k − [k = 0]) using what is known of each coefficient.
fn distance_from_one(f: &FieldDesc, a: &[PadicApprox]) -> i64 {
    a.iter()
        .enumerate()
        .map(|(k, x)| {
            let d = if k == 0 { x.sub(f, &PadicApprox::exact(f.one())) } else { x.clone() };
            match f.valuation(d.value()) {
                Valuation::Finite(v) => v.min(d.abs_prec()),
                Valuation::Infinite => d.abs_prec(),
            }
        })
        .min()
        .unwrap_or(crate::coefficients::EXACT)
}

/// One attempt at working precision `work`; `None` means the factors did not
/// settle within n_phi_max.
fn lambda1_attempt(ctx: &CosimpCtx, target: i64, work: i64, n_phi_max: usize) -> Result<Option<(PSeries, usize, Vec<i64>)>> {
    let f = ctx.field();
    let p = f.p();
    let e0 = PadicApprox::exact(f.from_q(f.poly()[0].clone()));
    let mut x = u0_approx(ctx, work);
    let n = x.len();
    let mut prod: PSeries = ps_scale(f, &one_series(f, n), &f.inv(e0.value())?);
    let mut vals = Vec::new();
    for k in 1..=n_phi_max + 1 {
        x = ps_pow(f, &x, p);
        let factor: PSeries = ps_eval_poly(f, f.poly(), &x)
            .iter()
            .map(|c| c.div(f, &e0))
            .collect::<Result<_>>()?;
        let dist = distance_from_one(f, &factor);
        vals.push(dist);
        if dist >= target {
            // Remaining factors are 1 + O(π^target); fold that uncertainty in.
            let tail: PSeries = (0..n)
                .map(|i| PadicApprox::new(f, if i == 0 { f.one() } else { f.zero() }, target))
                .collect();
            return Ok(Some((ps_mul(f, &prod, &tail), k - 1, vals)));
        }
        if k > n_phi_max {
            break;
        }
        prod = ps_mul(f, &prod, &factor);
    }
    Ok(None)
}

fn one_series(f: &FieldDesc, n: usize) -> PSeries {
    (0..n)
        .map(|i| PadicApprox::exact(if i == 0 { f.one() } else { f.zero() }))
        .collect()
}

/// λ₁ = (1/E(0))·∏_{n≥1} E(u₀^{pⁿ})/E(0) to precision p^prec in every t-coefficient.
///
/// The working precision and the settling target are raised until every
/// coefficient is known mod p^prec; the result is then truncated to p^prec.
pub fn lambda1_series(ctx: &CosimpCtx, prec: i64, n_phi_max: usize) -> Result<Lambda1> {
    if prec < 1 {
        return Err(Error::ShapeMismatch("prec must be at least 1".into()));
    }
    let f = ctx.field();
    let e = f.e() as i64;
    let want = prec * e;
    let mut slack = e + 2 * ctx.trunc().t_order as i64;
    for _ in 0..8 {
        let target = want + slack;
        let work = target + slack;
        match lambda1_attempt(ctx, target, work, n_phi_max)? {
            None => return Err(Error::ProductNotSettled { prec, n_max: n_phi_max }),
            Some((coeffs, n_used, vals)) if min_prec(&coeffs) >= want => {
                let coeffs: PSeries = coeffs.iter().map(|c| c.truncate(f, want)).collect();
                return Ok(Lambda1 {
                    achieved_prec: min_prec(&coeffs).div_euclid(e),
                    coeffs,
                    prec,
                    n_used,
                    work_prec: work,
                    factor_valuations: vals,
                });
            }
            Some(_) => slack *= 2,
        }
    }
    Err(Error::PrecisionLoss(format!("λ₁ could not reach p^{prec}")))
}

/// λ = ∏_{n=0}^{n_used} E(u₀^{pⁿ})/E(0), the product with the n = 0 factor,
/// times the same tail uncertainty as λ₁.
pub fn lambda_series(ctx: &CosimpCtx, l1: &Lambda1) -> Result<PSeries> {
    let f = ctx.field();
    let work = l1.work_prec;
    let p = f.p();
    let e0 = PadicApprox::exact(f.from_q(f.poly()[0].clone()));
    let mut x = u0_approx(ctx, work);
    let n = x.len();
    let mut prod = one_series(f, n);
    for k in 0..=l1.n_used {
        if k > 0 {
            x = ps_pow(f, &x, p);
        }
        let factor: PSeries = ps_eval_poly(f, f.poly(), &x)
            .iter()
            .map(|c| c.div(f, &e0))
            .collect::<Result<_>>()?;
        prod = ps_mul(f, &prod, &factor);
    }
    let want = l1.prec * f.e() as i64;
    let tail: PSeries = (0..n)
        .map(|i| PadicApprox::new(f, if i == 0 { f.one() } else { f.zero() }, want + 2 * f.e() as i64))
        .collect();
    Ok(ps_mul(f, &prod, &tail))
}

/// Coefficient-wise agreement of two series modulo π^n where n is the
/// smaller of the two precisions; returns that n or `None` on disagreement.
pub fn series_agree(f: &FieldDesc, a: &[PadicApprox], b: &[PadicApprox]) -> Option<i64> {
    let n = min_prec(a).min(min_prec(b));
    a.iter().zip(b).all(|(x, y)| x.agrees_mod(f, y, n)).then_some(n)
}

#[derive(Clone, Debug, Serialize)]
pub struct LeibnizCheck {
    /// E′(u₀)·λ and E′(u₀)·λ₁·t agree modulo π^prec_pi.
    pub holds: bool,
    pub prec_pi: Option<i64>,
}

/// Rational root with multiplicity.
#[derive(Clone, Debug, Serialize)]
pub struct RationalRoot {
    #[serde(serialize_with = "ser_q")]
    pub root: Q,
    pub multiplicity: usize,
}

fn ser_q<S: serde::Serializer>(q: &Q, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&crate::coefficients::fmt_q(q))
}

#[derive(Clone, Debug, Serialize)]
pub struct SenWeights {
    /// Characteristic polynomial of −A_{0,1}/β, low degree first, monic.
    pub charpoly: Vec<KElem>,
    /// Whether the polynomial lies in ℚ[x] and the rational-root scan ran.
    pub scanned: bool,
    pub rational_roots: Vec<RationalRoot>,
    /// Degree left over after removing rational roots.
    pub unsplit_degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SenReport {
    pub lambda1: Lambda1,
    /// N_m, entries as p-adic values, for m < T.
    pub n_matrix: Vec<Vec<Vec<PadicReport>>>,
    pub weights_mod_t: SenWeights,
    /// charpoly(N(0)/(θ(λ₁)·π·β)) agrees with charpoly(−A_{0,1}/β) modulo π^prec_pi.
    pub normalized_charpoly_matches: bool,
    pub normalized_charpoly_prec_pi: i64,
    pub leibniz: LeibnizCheck,
    pub near_ht_verdict: Verdict,
}

/// Sen weights: −A_{0,1}/β with its characteristic polynomial and rational roots.
pub fn sen_weights(f: &FieldDesc, a01: &Mat) -> Result<SenWeights> {
    let w = a01.scale(f, &f.neg(&f.inv(f.beta())?));
    let cp = w.charpoly(f);
    let rational: Option<Vec<Q>> = cp
        .iter()
        .map(|c| c.is_rational().then(|| c.coords()[0].clone()))
        .collect();
    let (scanned, roots, rest) = match rational.and_then(|qs| rational_roots(&qs)) {
        Some((roots, rest)) => (true, roots, rest),
        None => (false, Vec::new(), cp.len() - 1),
    };
    Ok(SenWeights {
        charpoly: cp,
        scanned,
        rational_roots: roots,
        unsplit_degree: rest,
    })
}

/// Largest integer whose divisors are enumerated by trial division.
const DIVISOR_LIMIT: u64 = 1 << 40;

fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64()?;
    if n > DIVISOR_LIMIT {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    Some(out)
}

fn eval_q(poly: &[Q], x: &Q) -> Q {
    poly.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

/// Divides by (x − r), assuming r is a root.
fn deflate(poly: &[Q], r: &Q) -> Vec<Q> {
    let n = poly.len() - 1;
    let mut out = vec![Q::zero(); n];
    let mut carry = Q::zero();
    for i in (0..n).rev() {
        carry = &poly[i + 1] + carry * r;
        out[i] = carry.clone();
    }
    out
}

/// Rational roots with multiplicity and the leftover degree; `None` if the
/// coefficients are too large to scan.
fn rational_roots(poly: &[Q]) -> Option<(Vec<RationalRoot>, usize)> {
    let mut poly = poly.to_vec();
    let mut roots = Vec::new();
    let mut zero_mult = 0;
    while poly.len() > 1 && poly[0].is_zero() {
        poly.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push(RationalRoot {
            root: Q::zero(),
            multiplicity: zero_mult,
        });
    }
    if poly.len() > 1 {
        let lcm = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = poly.iter().map(|c| (c * Q::from(lcm.clone())).to_integer()).collect();
        let num_divs = divisors(&ints[0])?;
        let den_divs = divisors(ints.last().expect("nonempty"))?;
        let mut cands: Vec<Q> = Vec::new();
        for a in &num_divs {
            for b in &den_divs {
                for s in [1i64, -1] {
                    let c = Q::new(BigInt::from(*a) * s, BigInt::from(*b));
                    if !cands.contains(&c) {
                        cands.push(c);
                    }
                }
            }
        }
        cands.sort();
        for c in cands {
            let mut mult = 0;
            while poly.len() > 1 && eval_q(&poly, &c).is_zero() {
                poly = deflate(&poly, &c);
                mult += 1;
            }
            if mult > 0 {
                roots.push(RationalRoot { root: c, multiplicity: mult });
            }
        }
    }
    Some((roots, poly.len() - 1))
}

/// N_m = −Σ_{i+j=m} (λ₁u₀)_i·A_{j,1}, with the Leibniz and normalization checks.
pub fn sen_operator_matrix(seeds: &Seeds, ctx: &CosimpCtx, prec: i64, n_phi_max: usize) -> Result<SenReport> {
    let f = ctx.field();
    let l1 = lambda1_series(ctx, prec, n_phi_max)?;
    let t_order = ctx.trunc().t_order;
    let u0 = u0_approx(ctx, crate::coefficients::EXACT);
    let s = ps_mul(f, &l1.coeffs, &u0);
    let l = seeds.l();
    let n_mats: Vec<Vec<Vec<PadicApprox>>> = (0..t_order)
        .map(|m| {
            (0..l)
                .map(|i| {
                    (0..l)
                        .map(|j| {
                            (0..=m).fold(PadicApprox::exact(f.zero()), |acc, k| {
                                let a = PadicApprox::exact(seeds.a(f, m - k).get(i, j).clone());
                                acc.sub(f, &s[k].mul(f, &a))
                            })
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    // Normalization: N(0)/(θ(λ₁)·π·β) against −A_{0,1}/β.
    let weights = sen_weights(f, seeds.a01())?;
    let norm = s[0].mul(f, &PadicApprox::exact(f.beta().clone()));
    let normalized: Vec<Vec<PadicApprox>> = n_mats[0]
        .iter()
        .map(|row| row.iter().map(|x| x.div(f, &norm)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let (cp_ok, cp_prec) = charpoly_agrees(f, &normalized, &weights.charpoly);

    // E′(u₀)·λ against E′(u₀)·λ₁·t.
    let lambda = lambda_series(ctx, &l1)?;
    let dpoly = crate::coefficients::poly_derivative(f.poly());
    let ep = ps_eval_poly(f, &dpoly, &u0);
    let lhs = ps_mul(f, &ep, &lambda);
    let mut l1t = vec![PadicApprox::exact(f.zero())];
    l1t.extend(l1.coeffs.iter().take(t_order - 1).cloned());
    let rhs = ps_mul(f, &ep, &l1t);
    let agree = series_agree(f, &lhs, &rhs);

    let near = check_near_ht(f, seeds.a01(), &NearHtMode::default())?;
    Ok(SenReport {
        n_matrix: n_mats
            .iter()
            .map(|m| m.iter().map(|r| r.iter().map(|x| x.report(f)).collect()).collect())
            .collect(),
        lambda1: l1,
        weights_mod_t: weights,
        normalized_charpoly_matches: cp_ok,
        normalized_charpoly_prec_pi: cp_prec,
        leibniz: LeibnizCheck {
            holds: agree.is_some(),
            prec_pi: agree,
        },
        near_ht_verdict: near.verdict,
    })
}

/// Charpoly of the value matrix against an exact one, modulo the precision
/// the entries support: P + (l − 1)·min(0, v_min) for entry precision P.
fn charpoly_agrees(f: &FieldDesc, m: &[Vec<PadicApprox>], exact: &[KElem]) -> (bool, i64) {
    let l = m.len();
    let vals = Mat::from_fn(l, l, |i, j| m[i][j].value().clone());
    let p = m.iter().flatten().map(PadicApprox::abs_prec).min().unwrap_or(crate::coefficients::EXACT);
    let vmin = match vals.min_valuation(f) {
        Valuation::Finite(v) => v.min(0),
        Valuation::Infinite => 0,
    };
    let bound = p + (l as i64 - 1) * vmin;
    let cp = vals.charpoly(f);
    let ok = cp
        .iter()
        .zip(exact)
        .all(|(a, b)| f.valuation(&f.sub(a, b)) >= Valuation::Finite(bound));
    (ok, bound)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NearlyDeRham {
    NearlyDeRhamProbe,
    FailsProbe,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct NearlyDrReport {
    pub classification: NearlyDeRham,
    pub probe: NearHtReport,
    pub weights: SenWeights,
    /// Distance checks for the rational Sen weights found by the scan.
    pub per_weight: Vec<WeightCheck>,
}

pub fn nearly_dr_report(seeds: &Seeds, ctx: &CosimpCtx) -> Result<NearlyDrReport> {
    let f = ctx.field();
    let probe = check_near_ht(f, seeds.a01(), &NearHtMode::default())?;
    let weights = sen_weights(f, seeds.a01())?;
    let per_weight = weights
        .rational_roots
        .iter()
        .map(|r| weight_check(f, &f.from_q(r.root.clone())))
        .collect();
    Ok(NearlyDrReport {
        classification: match probe.verdict {
            Verdict::Pass => NearlyDeRham::NearlyDeRhamProbe,
            Verdict::Fail => NearlyDeRham::FailsProbe,
            Verdict::Inconclusive => NearlyDeRham::Inconclusive,
        },
        probe,
        weights,
        per_weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::qf;
    use crate::rings::Trunc;

    #[test]
    fn rational_root_scan() {
        // (x − 1/2)²(x + 3)(x² + 1)
        let p = [qf(3, 4), qf(-11, 4), qf(11, 4), qf(-7, 4), qf(2, 1), qf(1, 1)];
        let (roots, rest) = rational_roots(&p).unwrap();
        assert_eq!(rest, 2);
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].root, qf(-3, 1));
        assert_eq!(roots[1].root, qf(1, 2));
        assert_eq!(roots[1].multiplicity, 2);
    }

    #[test]
    fn lambda1_constant_is_a_unit_times_one_over_e0() {
        let f = FieldDesc::from_ints(3, &[-3, 1]).unwrap();
        let ctx = CosimpCtx::new(&f, Trunc::new(3, 1).unwrap()).unwrap();
        let l1 = lambda1_series(&ctx, 6, 20).unwrap();
        assert_eq!(l1.achieved_prec, 6);
        assert_eq!(l1.coeffs[0].valuation(&f), Some(Valuation::Finite(-1)));
    }
}
