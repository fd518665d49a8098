use metaplectic::coeff::{field_make, FieldElem};
use metaplectic::galois::{
    half_p2_plus_1, iso_test, order, reduce_odd_exponent, twist_invariant_class, InducedParams,
};
use metaplectic::chars::TameChar;
use metaplectic::laurent::{psi_ring, GammaUnit, LaurentSeries};
use metaplectic::metagroup::{cocycle, hilbert, rat_frac, PMatrix};
use num_rational::BigRational;
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(3u32), Just(5), Just(7)]
}

/// Nonzero rational with small numerator and denominator.
fn nonzero_rat() -> impl Strategy<Value = BigRational> {
    (1i64..200, 1i64..200, any::<bool>()).prop_map(|(n, d, neg)| rat_frac(if neg { -n } else { n }, d))
}

fn series(p: u32, m: u32, val: i64, codes: &[u32], prec: i64) -> LaurentSeries {
    let f = field_make(p, m).unwrap();
    let q = f.size();
    let codes: Vec<u32> = codes.iter().map(|c| c % q).collect();
    LaurentSeries::from_codes(&f, val, &codes, prec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hilbert_is_bimultiplicative(p in prime(), a in nonzero_rat(), b in nonzero_rat(), c in nonzero_rat()) {
        let ab = hilbert(&(a.clone() * b.clone()), &c, p).unwrap();
        prop_assert_eq!(ab, hilbert(&a, &c, p).unwrap() * hilbert(&b, &c, p).unwrap());
        prop_assert_eq!(hilbert(&a, &c, p).unwrap(), hilbert(&c, &a, p).unwrap());
    }

    #[test]
    fn hilbert_steinberg_relations(p in prime(), a in nonzero_rat()) {
        prop_assert_eq!(hilbert(&a, &(-a.clone()), p).unwrap(), 1);
        let one_minus = BigRational::from_integer(1.into()) - a.clone();
        if one_minus != BigRational::from_integer(0.into()) {
            prop_assert_eq!(hilbert(&a, &one_minus, p).unwrap(), 1);
        }
    }

    #[test]
    fn cocycle_is_normalized(p in prime(), e in prop::array::uniform4(-9i64..10)) {
        let det = e[0] * e[3] - e[1] * e[2];
        prop_assume!(det != 0);
        let g = PMatrix::from_ints(e[0], e[1], e[2], e[3]).unwrap();
        prop_assert_eq!(cocycle(&g, &PMatrix::identity(), p), 1);
        prop_assert_eq!(cocycle(&PMatrix::identity(), &g, p), 1);
    }

    #[test]
    fn field_distributes(m in 1u32..4, a in 0u32..10_000, b in 0u32..10_000, c in 0u32..10_000) {
        let f = field_make(5, m).unwrap();
        let q = f.size();
        let (a, b, c) = (
            FieldElem::from_code(&f, a % q),
            FieldElem::from_code(&f, b % q),
            FieldElem::from_code(&f, c % q),
        );
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv().unwrap()).is_one());
        }
        // Frobenius is additive
        prop_assert_eq!(a.add(&b).pow(5).unwrap(), a.pow(5).unwrap().add(&b.pow(5).unwrap()));
    }

    #[test]
    fn series_inverse(p in prime(), val in -5i64..5, codes in prop::collection::vec(0u32..49, 1..20)) {
        let mut codes = codes;
        codes[0] = codes[0] % (p - 1) + 1;
        let f = series(p, 1, val, &codes, 30);
        let one = f.mul(&f.invert().unwrap());
        prop_assert!(one.agrees_with(&LaurentSeries::one(f.field())));
    }

    #[test]
    fn psi_left_inverts_phi(p in prime(), val in -4i64..4, codes in prop::collection::vec(0u32..49, 0..20)) {
        let f = series(p, 2, val, &codes, 25);
        let back = psi_ring(&f.frobenius_phi());
        prop_assert!(back.agrees_with(&f));
        prop_assert!(back.precision() >= f.precision());
    }

    #[test]
    fn gamma_action_composes(p in prime(), c1 in 1u64..200, c2 in 1u64..200, codes in prop::collection::vec(0u32..49, 0..15)) {
        prop_assume!(c1 % p as u64 != 0 && c2 % p as u64 != 0);
        let f = series(p, 1, 0, &codes, 20);
        let g1 = GammaUnit::new(c1, p).unwrap();
        let g2 = GammaUnit::new(c2, p).unwrap();
        let g12 = GammaUnit::new(c1 * c2, p).unwrap();
        let lhs = f.gamma_act(g2, 20).unwrap().gamma_act(g1, 20).unwrap();
        prop_assert!(lhs.agrees_with(&f.gamma_act(g12, 20).unwrap()));
        // the action is a ring map
        let prod = f.mul(&f).gamma_act(g1, 20).unwrap();
        let fg = f.gamma_act(g1, 20).unwrap();
        prop_assert!(prod.agrees_with(&fg.mul(&fg)));
    }

    #[test]
    fn induced_iso_is_frobenius_stable(p in prime(), h in 1u64..2400, tame in 0i64..6) {
        let f = field_make(p, 1).unwrap();
        let h = h % (order(p, 4) - 1) + 1;
        let lam = FieldElem::from_int(&f, 2);
        let x = InducedParams::new(4, h as i128, lam.clone()).unwrap();
        let y = InducedParams::new(4, (h * p as u64) as i128, lam).unwrap();
        prop_assert!(iso_test(&x, &y).unwrap());
        let chi = TameChar::omega_pow(&f, tame);
        let round = x.twist(&chi).twist(&chi.inv());
        prop_assert!(iso_test(&round, &x).unwrap());
        prop_assert!(iso_test(&x.dual().dual(), &x).unwrap());
    }

    #[test]
    fn odd_exponent_reduction_verifies(p in prop_oneof![Just(5u32), Just(7)], k in 0i64..2000) {
        let h = 2 * k + 1;
        let f = field_make(p, 1).unwrap();
        let (a, hp) = reduce_odd_exponent(h, p).unwrap();
        prop_assert!(hp % 2 == 1 && (3..=2 * p as u64 - 1).contains(&hp));
        let q = half_p2_plus_1(p) as i128;
        let one = FieldElem::one(&f);
        let lhs = InducedParams::new(4, q * h as i128, one.clone()).unwrap();
        let rhs = InducedParams::with_twist(4, q * hp as i128, a as i128, one).unwrap();
        prop_assert!(iso_test(&lhs, &rhs).unwrap());
        // and the classifier lands on the same orbit label
        prop_assert_eq!(twist_invariant_class(&rhs), twist_invariant_class(&lhs));
    }
}
