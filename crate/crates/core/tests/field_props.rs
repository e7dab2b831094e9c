use num_bigint::BigInt;
use prismstrat::coefficients::padic::reduce_mod_pi;
use prismstrat::coefficients::rational::vp;
use prismstrat::coefficients::{qf, FieldDesc, KElem, PadicApprox, Valuation};
use proptest::prelude::*;

fn field(which: usize) -> FieldDesc {
    match which {
        0 => FieldDesc::from_ints(3, &[-3, 1]).unwrap(),
        1 => FieldDesc::from_ints(3, &[-3, 0, 1]).unwrap(),
        2 => FieldDesc::from_ints(5, &[10, 5, 0, 1]).unwrap(),
        _ => FieldDesc::from_ints(3, &[6, -3, 0, 1]).unwrap(),
    }
}

fn elem(f: &FieldDesc, raw: &[(i64, i64)]) -> KElem {
    f.elem(raw.iter().take(f.e()).map(|&(n, d)| qf(n, d)).collect())
}

fn raw_elem() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-60i64..=60, prop::sample::select(vec![1i64, 2, 3, 5, 9, 25, 27])), 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplication_is_associative_and_commutative(w in 0usize..4, a in raw_elem(), b in raw_elem(), c in raw_elem()) {
        let f = field(w);
        let (a, b, c) = (elem(&f, &a), elem(&f, &b), elem(&f, &c));
        prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
        prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
        prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
    }

    #[test]
    fn inverse_round_trip(w in 0usize..4, a in raw_elem()) {
        let f = field(w);
        let a = elem(&f, &a);
        prop_assume!(!a.is_zero());
        let inv = f.inv(&a).unwrap();
        prop_assert_eq!(f.mul(&a, &inv), f.one());
    }

    #[test]
    fn valuation_matches_norm(w in 0usize..4, a in raw_elem()) {
        // Totally ramified of degree e: v_π(a) = v_p(N(a)).
        let f = field(w);
        let a = elem(&f, &a);
        prop_assume!(!a.is_zero());
        let via_norm = vp(&f.norm(&a), &BigInt::from(f.p())).unwrap();
        prop_assert_eq!(f.valuation(&a), Valuation::Finite(via_norm));
    }

    #[test]
    fn valuation_is_multiplicative_and_ultrametric(w in 0usize..4, a in raw_elem(), b in raw_elem()) {
        let f = field(w);
        let (a, b) = (elem(&f, &a), elem(&f, &b));
        prop_assume!(!a.is_zero() && !b.is_zero());
        let (va, vb) = (f.valuation(&a).finite().unwrap(), f.valuation(&b).finite().unwrap());
        prop_assert_eq!(f.valuation(&f.mul(&a, &b)), Valuation::Finite(va + vb));
        prop_assert!(f.valuation(&f.add(&a, &b)) >= Valuation::Finite(va.min(vb)));
    }

    #[test]
    fn reduction_mod_pi_is_close_and_idempotent(w in 0usize..4, a in raw_elem(), n in -4i64..12) {
        let f = field(w);
        let a = elem(&f, &a);
        let r = reduce_mod_pi(&f, &a, n);
        prop_assert!(f.valuation(&f.sub(&a, &r)) >= Valuation::Finite(n));
        prop_assert_eq!(reduce_mod_pi(&f, &r, n), r);
    }

    #[test]
    fn padic_products_agree_with_exact_products(w in 0usize..4, a in raw_elem(), b in raw_elem(), pa in 0i64..10, pb in 0i64..10) {
        let f = field(w);
        let (a, b) = (elem(&f, &a), elem(&f, &b));
        let x = PadicApprox::new(&f, a.clone(), pa);
        let y = PadicApprox::new(&f, b.clone(), pb);
        let exact = PadicApprox::exact(f.mul(&a, &b));
        let prod = x.mul(&f, &y);
        prop_assert!(prod.agrees_mod(&f, &exact, prod.abs_prec()));
        let sum = x.add(&f, &y);
        prop_assert!(sum.agrees_mod(&f, &PadicApprox::exact(f.add(&a, &b)), sum.abs_prec()));
    }
}

#[test]
fn non_eisenstein_rejected() {
    assert!(matches!(
        FieldDesc::from_ints(3, &[-1, 0, 1]),
        Err(prismstrat::Error::NotEisenstein(_))
    ));
    assert!(matches!(FieldDesc::from_ints(2, &[-2, 1]), Err(prismstrat::Error::PrimeTooSmall(2))));
}

#[test]
fn inverse_of_pi() {
    let f = field(1);
    assert_eq!(f.inv(&f.pi()).unwrap(), f.elem(vec![qf(0, 1), qf(1, 3)]));
}
