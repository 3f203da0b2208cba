//! Ring axioms and structural identities on random inputs.

use proptest::prelude::*;
use qvacheck::cartan_data::{Gcm, Level};
use qvacheck::qheisenberg::{kappa_closed_form, Heisenberg};
use qvacheck::scalars::{qf, HbarScalar};
use qvacheck::series::{exp_substitute, LaurentSeries, Poly, RationalFunction, Sign, Z};

const N: usize = 4;

fn scalar() -> impl Strategy<Value = HbarScalar> {
    prop::collection::vec((-6i64..=6, 1i64..=4), N).prop_map(|v| HbarScalar::from_coeffs(v.into_iter().map(|(a, b)| qf(a, b)).collect(), N))
}

fn unit() -> impl Strategy<Value = HbarScalar> {
    (scalar(), 1i64..=5).prop_map(|(s, c)| &s.mul_hbar() + &HbarScalar::from_int(c, N))
}

fn series() -> impl Strategy<Value = LaurentSeries> {
    (-3i64..=3, prop::collection::vec(scalar(), 0..5)).prop_map(|(lo, cs)| LaurentSeries::new(Z, lo, cs, None, N))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_ring(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) - &b, a);
    }

    #[test]
    fn scalar_units(u in unit()) {
        let inv = u.inverse().unwrap();
        prop_assert!((&u * &inv).is_one());
    }

    #[test]
    fn exp_log_inverse(a in scalar()) {
        let x = a.mul_hbar();
        prop_assert_eq!(x.exp_series().unwrap().log_series().unwrap(), x);
    }

    #[test]
    fn series_ring(a in series(), b in series(), c in series()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn exp_substitute_is_multiplicative(p in prop::collection::vec(-3i64..=3, 1..4), q in prop::collection::vec(-3i64..=3, 1..4), c in 1i64..=3) {
        let den = Poly::from_ints(&[-1, 1], N).mul(&Poly::from_ints(&[1, c], N));
        let f = RationalFunction::new(Poly::from_ints(&p, N), den).unwrap();
        let g = RationalFunction::new(Poly::from_ints(&q, N), Poly::from_ints(&[1, c], N)).unwrap();
        let cap = 10;
        let lhs = &exp_substitute(&f, Sign::Minus, cap).unwrap() * &exp_substitute(&g, Sign::Minus, cap).unwrap();
        let rhs = exp_substitute(&f.mul(&g), Sign::Minus, cap).unwrap();
        prop_assert!(lhs.first_difference(&rhs, 6).unwrap().is_none());
    }

    #[test]
    fn heisenberg_constants(m in -6i64..=6, l in 1i64..=3) {
        let (g, lev) = (Gcm::a2(), Level::int(l));
        let h = Heisenberg::from_relation(&g, &lev, N, 6).unwrap();
        for (i, j) in g.pairs() {
            prop_assert_eq!(h.kappa(i, j, m).unwrap(), &kappa_closed_form(&g, &lev, i, j, m, N));
            prop_assert_eq!(h.kappa(i, j, m).unwrap().clone(), -(h.kappa(j, i, -m).unwrap().clone()));
        }
    }
}
