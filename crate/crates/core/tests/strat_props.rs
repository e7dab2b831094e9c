use prismstrat::closedform::{amn_from_h, h_table, verify_commutative};
use prismstrat::cohomology::h0_solve;
use prismstrat::coefficients::{qf, FieldDesc, KElem};
use prismstrat::cosimplicial::CosimpCtx;
use prismstrat::matrix::Mat;
use prismstrat::rings::Trunc;
use prismstrat::sen::{nearly_dr_report, sen_weights, NearlyDeRham};
use prismstrat::stratification::{
    assemble_epsilon, check_near_ht, cocycle_residual, cocycle_residual_by_coefficients, generate_amn, NearHtMode,
    Seeds, Verdict,
};
use proptest::prelude::*;

fn field(which: usize) -> FieldDesc {
    if which == 0 {
        FieldDesc::from_ints(3, &[-3, 1]).unwrap()
    } else {
        FieldDesc::from_ints(3, &[-3, 0, 1]).unwrap()
    }
}

fn rationals(n: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-7i64..=7, prop::sample::select(vec![1i64, 2, 3, 5])), n)
}

fn scalar_seeds(f: &FieldDesc, raw: &[(i64, i64)]) -> Seeds {
    Seeds::scalars(f, raw.iter().map(|&(n, d)| f.from_q(qf(n, d))).collect()).unwrap()
}

fn mat2(f: &FieldDesc, raw: &[(i64, i64)]) -> Mat {
    Mat::from_fn(2, 2, |i, j| {
        let (n, d) = raw[2 * i + j];
        f.from_q(qf(n, d))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn boundary_rows(w in 0usize..2, raw in rationals(3)) {
        let f = field(w);
        let ctx = CosimpCtx::new(&f, Trunc::new(3, 3).unwrap()).unwrap();
        let t = generate_amn(&scalar_seeds(&f, &raw), &ctx, 5).unwrap();
        prop_assert!(t.get(0, 0).unwrap().is_identity(&f));
        for m in 1..3 {
            prop_assert!(t.get(m, 0).unwrap().is_zero());
        }
    }

    #[test]
    fn cocycle_holds_for_scalar_seeds(w in 0usize..2, raw in rationals(3)) {
        let f = field(w);
        let ctx = CosimpCtx::new(&f, Trunc::new(3, 3).unwrap()).unwrap();
        let table = generate_amn(&scalar_seeds(&f, &raw), &ctx, 3).unwrap();
        let u = assemble_epsilon(&table, &ctx).unwrap();
        let r = cocycle_residual(&u, &ctx).unwrap();
        prop_assert!(r.is_zero());
        prop_assert_eq!(cocycle_residual_by_coefficients(&table, &ctx).unwrap(), r);
    }

    #[test]
    fn cocycle_for_matrix_seeds(raw in rationals(8)) {
        let f = field(1);
        let ctx = CosimpCtx::new(&f, Trunc::new(3, 3).unwrap()).unwrap();
        let seeds = Seeds::new(vec![mat2(&f, &raw[..4]), mat2(&f, &raw[4..])]).unwrap();
        let table = generate_amn(&seeds, &ctx, 3).unwrap();
        let u = assemble_epsilon(&table, &ctx).unwrap();
        let ring = cocycle_residual(&u, &ctx).unwrap();
        prop_assert_eq!(cocycle_residual_by_coefficients(&table, &ctx).unwrap(), ring);
    }

    #[test]
    fn closed_form_rebuilds_the_table(w in 0usize..2, raw in rationals(4)) {
        let f = field(w);
        let ctx = CosimpCtx::new(&f, Trunc::new(4, 2).unwrap()).unwrap();
        let seeds = scalar_seeds(&f, &raw);
        prop_assert!(verify_commutative(&seeds, &ctx, 3, 6).unwrap().all_zero);
        let ht = h_table(&seeds, &ctx, 3).unwrap();
        let table = generate_amn(&seeds, &ctx, 6).unwrap();
        for m in 1..=3 {
            for s in 0..=6 {
                prop_assert_eq!(&amn_from_h(&ht, seeds.a01(), m, s, &f).unwrap(), table.get(m, s).unwrap());
            }
        }
    }

    #[test]
    fn h0_dimension_is_bounded(w in 0usize..2, k in 0i64..3, raw in rationals(3)) {
        let f = field(w);
        let ctx = CosimpCtx::new(&f, Trunc::new(3, 3).unwrap()).unwrap();
        let mut seeds: Vec<KElem> = raw.iter().map(|&(n, d)| f.from_q(qf(n, d))).collect();
        seeds[0] = f.mul(f.beta(), &f.from_int(k));
        let seeds = Seeds::scalars(&f, seeds).unwrap();
        let sol = h0_solve(&generate_amn(&seeds, &ctx, 3).unwrap(), &ctx, 3).unwrap();
        prop_assert!(sol.dim <= sol.q);
        prop_assert!(sol.dim <= sol.stage1_dim);
        prop_assert!(sol.stage1_consistent);
    }
}

#[test]
fn near_ht_known_examples() {
    for w in 0..2 {
        let f = field(w);
        let ctx = CosimpCtx::new(&f, Trunc::new(2, 1).unwrap()).unwrap();
        let integral = Seeds::scalars(&f, vec![f.mul(f.beta(), &f.from_int(-2))]).unwrap();
        assert_eq!(nearly_dr_report(&integral, &ctx).unwrap().classification, NearlyDeRham::NearlyDeRhamProbe);
        let third = f.mul(f.beta(), &f.from_q(qf(1, 3)));
        let r = check_near_ht(&f, &Mat::scalar(&f, 1, third.clone()), &NearHtMode::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let s = Seeds::scalars(&f, vec![third]).unwrap();
        let rep = nearly_dr_report(&s, &ctx).unwrap();
        assert_eq!(rep.classification, NearlyDeRham::FailsProbe);
        assert!(!rep.per_weight[0].ok);
    }
}

#[test]
fn sen_weights_of_a_diagonal_mix() {
    let f = field(1);
    let b = f.beta().clone();
    let a = Mat::diag(&f, vec![f.mul(&b, &f.from_int(-2)), f.mul(&b, &f.from_q(qf(1, 3)))]);
    let w = sen_weights(&f, &a).unwrap();
    assert!(w.scanned);
    assert_eq!(w.unsplit_degree, 0);
    let roots: Vec<_> = w.rational_roots.iter().map(|r| r.root.clone()).collect();
    assert_eq!(roots, vec![qf(-1, 3), qf(2, 1)]);
}
