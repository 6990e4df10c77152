//! Property tests for the exact arithmetic layer and the coset machinery.

use num::{BigInt, One, Zero};
use proptest::prelude::*;

use twistaff_core::scalar::{coset_sum, frac, Rat, RationalExponent, Scalar};

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rat::new(BigInt::from(n), BigInt::from(d)))
}

fn arb_scalar() -> impl Strategy<Value = Scalar> {
    let root = (0i64..24, prop_oneof![Just(1u64), Just(2), Just(3), Just(4), Just(6), Just(8), Just(12)])
        .prop_map(|(k, n)| Scalar::root_of_unity(k, n).expect("small order"));
    (arb_rat(), root, arb_rat()).prop_map(|(a, z, b)| {
        Scalar::from_rat(a).add_ref(&z.scale(&b))
    })
}

proptest! {
    #[test]
    fn addition_is_commutative_and_associative(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
        prop_assert_eq!(a.add_ref(&b), b.add_ref(&a));
        prop_assert_eq!(a.add_ref(&b).add_ref(&c), a.add_ref(&b.add_ref(&c)));
    }

    #[test]
    fn multiplication_distributes(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
        let lhs = a.mul_ref(&b.add_ref(&c));
        let rhs = a.mul_ref(&b).add_ref(&a.mul_ref(&c));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn nonzero_scalars_invert(a in arb_scalar()) {
        prop_assume!(!a.is_zero());
        let inv = a.inv().expect("nonzero");
        prop_assert!(a.mul_ref(&inv).is_one());
    }

    #[test]
    fn subtraction_cancels(a in arb_scalar(), b in arb_scalar()) {
        prop_assert!(a.add_ref(&b).sub_ref(&b).sub_ref(&a).is_zero());
    }

    #[test]
    fn canonical_representation_is_stable(a in arb_scalar(), b in arb_scalar()) {
        // equality through different computation routes: (a+b)^2 vs
        // a^2 + 2ab + b^2
        let lhs = a.add_ref(&b).pow(2);
        let two = Scalar::from_int(2);
        let rhs = a.pow(2).add_ref(&b.pow(2)).add_ref(&two.mul_ref(&a).mul_ref(&b));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rendering_round_trips(a in arb_scalar()) {
        let text = a.to_string();
        let back = Scalar::parse(&text, None).expect("grammar");
        prop_assert_eq!(back, a);
    }

    #[test]
    fn document_rendering_round_trips(a in arb_scalar()) {
        let doc = a.conductor() * 2;
        let text = a.render_in(doc);
        let back = Scalar::parse(&text, Some(doc)).expect("grammar");
        prop_assert_eq!(back, a);
    }

    #[test]
    fn coset_sum_stays_in_the_window(a in arb_rat(), b in arb_rat()) {
        let (fa, fb) = (frac(&a), frac(&b));
        let s = coset_sum(&fa, &fb);
        prop_assert!(s >= Rat::zero() && s < Rat::one());
        // agreement modulo one
        prop_assert!(frac(&(&fa + &fb)) == s);
    }

    #[test]
    fn exponent_decomposition_is_unique(v in arb_rat()) {
        let e = RationalExponent::new(v.clone());
        let alpha = e.coset_rep();
        let m = e.integer_offset();
        prop_assert!(alpha >= Rat::zero() && alpha < Rat::one());
        prop_assert_eq!(alpha + Rat::from_integer(m), v);
    }

    #[test]
    fn galois_conjugation_is_multiplicative(a in arb_scalar(), b in arb_scalar()) {
        prop_assert_eq!(
            a.mul_ref(&b).conj(),
            a.conj().mul_ref(&b.conj())
        );
    }
}
