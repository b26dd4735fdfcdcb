//! Root counting and trinomial discriminants.

use multistat::unipoly::{
    descartes_sign_changes, discriminant_via_resultant, sturm_count_positive, trinomial_d, trinomial_discriminant,
    trinomial_positive_roots, TrinomialForm,
};
use multistat::{RatPoly, Rational};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1..=200i64, 1..=20i64).prop_map(|(a, b)| q(a, b))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (positive_rational(), any::<bool>()).prop_map(|(x, neg)| if neg { -x } else { x })
}

fn exponents(max_n: u32) -> impl Strategy<Value = (u32, u32)> {
    (2..=max_n).prop_flat_map(|n| (Just(n), 1..n))
}

/// `x^n + a x^k + b`.
fn trinomial(n: u32, k: u32, a: &Rational, b: &Rational) -> RatPoly {
    let mut coeffs = vec![q(0, 1); n as usize + 1];
    coeffs[0] = b.clone();
    coeffs[k as usize] = a.clone();
    coeffs[n as usize] = q(1, 1);
    RatPoly::new(coeffs)
}

/// Either random coefficients or the tangent case with a double root at `t`:
/// `c = n t^(n-k) / k`, `b = t^n (n/k - 1)`.
fn alternating_form() -> impl Strategy<Value = TrinomialForm> {
    let random = (exponents(10), positive_rational(), positive_rational())
        .prop_map(|((n, k), b, c)| TrinomialForm::new(n, k, b, c).unwrap());
    let tangent = (exponents(8), 1..=6i64, 1..=4i64).prop_map(|((n, k), tn, td)| {
        let t = q(tn, td);
        let pow = |e: u32| num_traits::pow(t.clone(), e as usize);
        let c = q(n as i64, k as i64) * pow(n - k);
        let b = pow(n) * (q(n as i64, k as i64) - q(1, 1));
        TrinomialForm::new(n, k, b, c).unwrap()
    });
    prop_oneof![3 => random, 1 => tangent]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sturm_bounded_by_descartes(coeffs in prop::collection::vec(-20..=20i64, 1..=9)) {
        let p = RatPoly::new(coeffs.iter().map(|&c| q(c, 1)).collect());
        prop_assume!(!p.is_zero());
        let sturm = sturm_count_positive(&p).unwrap();
        let descartes = descartes_sign_changes(&p).unwrap();
        prop_assert!(sturm <= descartes);
        // parity holds for square-free p with p(0) != 0 and lc > 0
        if p.is_square_free() && p.coeff(0) != q(0, 1) && p.lc() > q(0, 1) {
            prop_assert_eq!(sturm % 2, descartes % 2);
        }
    }

    #[test]
    fn trichotomy_matches_sturm(t in alternating_form()) {
        let sturm = sturm_count_positive(&t.polynomial()).unwrap();
        prop_assert_eq!(trinomial_positive_roots(&t) as usize, sturm);
    }

    #[test]
    fn d_vanishes_with_the_discriminant(t in alternating_form()) {
        let disc = trinomial_discriminant(t.n(), t.k(), &-t.c().clone(), t.b()).unwrap();
        prop_assert_eq!(trinomial_d(&t) == q(0, 1), disc == q(0, 1));
    }

    #[test]
    fn discriminant_zero_iff_repeated_root(t in alternating_form(), flip in any::<bool>()) {
        // also the non-alternating sign pattern x^n + c x^k + b
        let a = if flip { t.c().clone() } else { -t.c().clone() };
        let g = trinomial(t.n(), t.k(), &a, t.b());
        let disc = trinomial_discriminant(t.n(), t.k(), &a, t.b()).unwrap();
        let repeated = g.gcd(&g.derivative()).degree().unwrap_or(0) > 0;
        prop_assert_eq!(disc == q(0, 1), repeated);
    }

    #[test]
    fn closed_form_matches_resultant((n, k) in exponents(6), a in nonzero_rational(), b in nonzero_rational()) {
        let g = trinomial(n, k, &a, &b);
        prop_assert_eq!(trinomial_discriminant(n, k, &a, &b).unwrap(), discriminant_via_resultant(&g));
    }
}
