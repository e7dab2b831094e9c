#![allow(dead_code)]

use prismstrat::coefficients::{qf, FieldDesc, KElem};
use prismstrat::matrix::Mat;
use prismstrat::stratification::Seeds;
use rand::Rng;

/// E = u − 3 and E = u² − 3 over p = 3.
pub fn test_fields() -> Vec<FieldDesc> {
    vec![
        FieldDesc::from_ints(3, &[-3, 1]).unwrap(),
        FieldDesc::from_ints(3, &[-3, 0, 1]).unwrap(),
    ]
}

pub fn rand_rational<R: Rng>(rng: &mut R) -> prismstrat::coefficients::Q {
    let num = rng.gen_range(-9i64..=9);
    let den = [1i64, 2, 3, 4, 5, 7, 9][rng.gen_range(0..7)];
    qf(num, den)
}

pub fn rand_nonzero_rational<R: Rng>(rng: &mut R) -> prismstrat::coefficients::Q {
    loop {
        let x = rand_rational(rng);
        if x != qf(0, 1) {
            return x;
        }
    }
}

/// Random element of K with every coordinate a small rational.
pub fn rand_k<R: Rng>(rng: &mut R, f: &FieldDesc) -> KElem {
    f.elem((0..f.e()).map(|_| rand_rational(rng)).collect())
}

pub fn rand_matrix<R: Rng>(rng: &mut R, f: &FieldDesc, l: usize) -> Mat {
    Mat::from_fn(l, l, |_, _| rand_k(rng, f))
}

/// Scalar seeds A_{0,1}, …, A_{n−1,1} with nonzero rational entries.
pub fn rand_scalar_seeds<R: Rng>(rng: &mut R, f: &FieldDesc, n: usize) -> Seeds {
    Seeds::scalars(f, (0..n).map(|_| f.from_q(rand_nonzero_rational(rng))).collect()).unwrap()
}

/// 2×2 diagonal seeds, which always commute.
pub fn rand_diag_seeds<R: Rng>(rng: &mut R, f: &FieldDesc, n: usize) -> Seeds {
    Seeds::new(
        (0..n)
            .map(|_| Mat::diag(f, vec![f.from_q(rand_nonzero_rational(rng)), f.from_q(rand_nonzero_rational(rng))]))
            .collect(),
    )
    .unwrap()
}

pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
