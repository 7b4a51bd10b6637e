//! Property tests for the exact layers: interval containment under sampling,
//! the Lagrange identity, and the ψ-map value identity.

use num::{BigInt, BigRational};
use proptest::prelude::*;
use qd::exact::{det, proj_dist, wedge_norm_sq, IntVector, IntervalReal};
use qd::qform::QuadraticForm;

fn rational(n: i64, d: u32) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d.max(1)))
}

proptest! {
    /// Every interval operation's output contains the result of evaluating at
    /// rational samples inside the inputs.
    #[test]
    fn interval_ops_contain_rational_samples(
        an in -1000i64..1000, ad in 1u32..60,
        bn in -1000i64..1000, bd in 1u32..60,
    ) {
        let a = rational(an, ad);
        let b = rational(bn, bd);
        let ia = IntervalReal::from_rational(&a, 64);
        let ib = IntervalReal::from_rational(&b, 64);

        prop_assert!(ia.add(&ib).contains_rational(&(&a + &b)));
        prop_assert!(ia.sub(&ib).contains_rational(&(&a - &b)));
        prop_assert!(ia.mul(&ib).contains_rational(&(&a * &b)));
        if !ib.contains_zero() {
            prop_assert!(ia.div(&ib).unwrap().contains_rational(&(&a / &b)));
        }
        // sqrt containment via squaring: sqrt(a²) contains |a|
        let sq = ia.square();
        let root = sq.sqrt().unwrap();
        let abs_a = if a < BigRational::from_integer(BigInt::from(0)) { -a } else { a };
        prop_assert!(root.contains_rational(&abs_a));
    }

    /// wedge_norm_sq(x, y) = ‖x‖²‖y‖² − (x·y)², exactly.
    #[test]
    fn lagrange_identity(coords in proptest::collection::vec(-10_000i64..10_000, 8)) {
        let x = IntVector::from_i64(&coords[..4]);
        let y = IntVector::from_i64(&coords[4..]);
        let dot = x.dot(&y);
        let expect = x.norm_sq() * y.norm_sq() - &dot * &dot;
        prop_assert_eq!(wedge_norm_sq(&x, &y).unwrap(), expect);
    }

    /// Swapping two rows negates the determinant.
    #[test]
    fn det_is_alternating(coords in proptest::collection::vec(-50i64..50, 9), i in 0usize..3, j in 0usize..3) {
        prop_assume!(i != j);
        let mut rows: Vec<IntVector> =
            coords.chunks(3).map(IntVector::from_i64).collect();
        let d = det(&rows).unwrap();
        rows.swap(i, j);
        prop_assert_eq!(det(&rows).unwrap(), -d);
    }

    /// q(ψ(x, y)) = q(x)²·q(y) for arbitrary forms and points.
    #[test]
    fn psi_value_identity(
        c00 in -9i64..=9, c01 in -9i64..=9, c02 in -9i64..=9,
        c11 in -9i64..=9, c12 in -9i64..=9, c22 in -9i64..=9,
        xs in proptest::collection::vec(-100i64..100, 3),
        ys in proptest::collection::vec(-100i64..100, 3),
    ) {
        let entries = [(0, 0, c00), (0, 1, c01), (0, 2, c02), (1, 1, c11), (1, 2, c12), (2, 2, c22)];
        let nonzero: Vec<_> = entries.iter().filter(|&&(_, _, c)| c != 0).cloned().collect();
        prop_assume!(!nonzero.is_empty());
        let q = QuadraticForm::from_i64(3, &nonzero).unwrap();
        let x = IntVector::from_i64(&xs);
        let y = IntVector::from_i64(&ys);
        let z = q.psi(&x, &y).unwrap();
        let qx = q.eval_q(&x).unwrap();
        prop_assert_eq!(q.eval_q(&z).unwrap(), &qx * &qx * q.eval_q(&y).unwrap());
    }

    /// Projective distance obeys the triangle inequality at interval level.
    #[test]
    fn proj_dist_triangle(coords in proptest::collection::vec(-40i64..40, 9)) {
        let x = IntVector::from_i64(&coords[..3]);
        let y = IntVector::from_i64(&coords[3..6]);
        let z = IntVector::from_i64(&coords[6..]);
        prop_assume!(!x.is_zero() && !y.is_zero() && !z.is_zero());
        let xz = proj_dist(&x, &z, 96).unwrap();
        let sum = proj_dist(&x, &y, 96).unwrap().add(&proj_dist(&y, &z, 96).unwrap());
        prop_assert!(xz.lo.cmp(&sum.hi) != std::cmp::Ordering::Greater);
    }
}
