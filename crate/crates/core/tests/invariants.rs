use approx::assert_abs_diff_eq;
use kreinlab::fock::{krein_inner, KreinVector, TruncatedBasis};
use kreinlab::minkowski::{FourVector, GroupElement, LorentzMatrix};
use kreinlab::symbol::{
    left_right_commutator, moyal_bracket, star_apply, star_product, Monomial, Poly, Side, Symbol,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn four() -> impl Strategy<Value = FourVector> {
    prop::array::uniform4(-1.0f64..1.0).prop_map(FourVector)
}

fn lorentz() -> impl Strategy<Value = LorentzMatrix> {
    (1usize..=3, -0.8f64..0.8, 1usize..=3, -3.0f64..3.0).prop_map(|(axis, w, i, angle)| {
        let boost = LorentzMatrix::boost(axis, w).unwrap();
        let j = if i == 3 { 1 } else { i + 1 };
        boost.compose(&LorentzMatrix::rotation(i, j, angle).unwrap())
    })
}

fn element() -> impl Strategy<Value = GroupElement> {
    (four(), four(), -1.0f64..1.0, lorentz()).prop_map(|(p, x, theta, lambda)| GroupElement { p, x, theta, lambda })
}

/// Polynomial with small integer coefficients, so star products are exact.
fn poly(max_degree: u8) -> impl Strategy<Value = Symbol> {
    prop::collection::vec((prop::array::uniform8(0u8..=max_degree), -3i32..=3, -2i32..=2), 1..5).prop_map(
        move |terms| {
            let mut p = Poly::zero();
            for (m, re, im) in terms {
                let total: u8 = m.iter().sum();
                if total > max_degree {
                    continue;
                }
                p.add_term(m as Monomial, Complex64::new(re as f64, im as f64));
            }
            Symbol::from_poly(p)
        },
    )
}

/// Polynomial times a fixed Gaussian with a complex cross term.
fn gaussian_symbol() -> impl Strategy<Value = Symbol> {
    poly(2).prop_map(|p| {
        let mut q = Poly::zero();
        for i in 0..8 {
            q.add_term(
                {
                    let mut m = [0u8; 8];
                    m[i] = 2;
                    m
                },
                Complex64::new(-0.5, 0.0),
            );
        }
        q.add_term([1, 0, 0, 0, 1, 0, 0, 0], Complex64::new(0.0, 1.0));
        p.mul(&Symbol::exp_of(&q).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_composition_is_associative(a in element(), b in element(), c in element()) {
        let left = a.compose(&b).compose(&c);
        let right = a.compose(&b.compose(&c));
        prop_assert!(left.max_abs_diff(&right) < 1e-11);
    }

    #[test]
    fn inverse_gives_identity(a in element()) {
        prop_assert!(a.compose(&a.inverse()).max_abs_diff(&GroupElement::identity()) < 1e-11);
        prop_assert!(a.inverse().compose(&a).max_abs_diff(&GroupElement::identity()) < 1e-11);
    }

    #[test]
    fn theta_cocycle_is_antisymmetric(p1 in four(), x1 in four(), p2 in four(), x2 in four(), t1 in -1.0f64..1.0, t2 in -1.0f64..1.0) {
        let g1 = GroupElement::translation(p1, x1, t1);
        let g2 = GroupElement::translation(p2, x2, t2);
        let sum = g1.compose(&g2).theta + g2.compose(&g1).theta;
        prop_assert!((sum - 2.0 * (t1 + t2)).abs() < 1e-12);
    }

    #[test]
    fn lorentz_preserves_interval(l in lorentz(), u in four(), v in four()) {
        prop_assert!(l.is_lorentz());
        assert_abs_diff_eq!(l.apply(u).dot(l.apply(v)), u.dot(v), epsilon = 1e-11);
    }

    #[test]
    fn krein_inner_is_sesquilinear(
        coeffs in prop::collection::vec((-5i64..5, -5i64..5), 3 * 15),
        a in (-3i64..3, -3i64..3),
    ) {
        let basis = TruncatedBasis::new(2);
        let n = basis.len();
        let make = |k: usize| {
            let c = coeffs[k * n..(k + 1) * n].iter().map(|&(re, im)| num_complex::Complex::new(re, im)).collect();
            KreinVector::from_coefficients(&basis, c).unwrap()
        };
        let (u, v, w) = (make(0), make(1), make(2));
        let a = num_complex::Complex::new(a.0, a.1);
        let combo = KreinVector::from_coefficients(
            &basis,
            v.coefficients().iter().zip(w.coefficients()).map(|(x, y)| a * x + y).collect(),
        ).unwrap();
        let lhs = krein_inner(&u, &combo).unwrap();
        prop_assert_eq!(lhs, a * krein_inner(&u, &v).unwrap() + krein_inner(&u, &w).unwrap());
        let swapped = krein_inner(&combo, &u).unwrap();
        prop_assert_eq!(swapped, a.conj() * krein_inner(&v, &u).unwrap() + krein_inner(&w, &u).unwrap());
    }

    #[test]
    fn star_product_is_associative(g1 in poly(2), g2 in poly(2), phi in gaussian_symbol()) {
        let lhs = star_apply(&star_product(&g1, &g2).unwrap(), &phi, Side::Left).unwrap();
        let rhs = star_apply(&g1, &star_apply(&g2, &phi, Side::Left).unwrap(), Side::Left).unwrap();
        prop_assert!(lhs.approx_eq(&rhs, 1e-12));
        let lhs = star_apply(&g2, &star_apply(&g1, &phi, Side::Right).unwrap(), Side::Right).unwrap();
        let rhs = star_apply(&star_product(&g1, &g2).unwrap(), &phi, Side::Right).unwrap();
        prop_assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn moyal_jacobi_identity(a in poly(3), b in poly(3), c in poly(3)) {
        let t1 = moyal_bracket(&a, &moyal_bracket(&b, &c).unwrap()).unwrap();
        let t2 = moyal_bracket(&b, &moyal_bracket(&c, &a).unwrap()).unwrap();
        let t3 = moyal_bracket(&c, &moyal_bracket(&a, &b).unwrap()).unwrap();
        prop_assert!(t1.add(&t2).add(&t3).max_abs_coeff() < 1e-9);
    }

    #[test]
    fn moyal_bracket_is_antisymmetric(a in poly(3), b in poly(3)) {
        let ab = moyal_bracket(&a, &b).unwrap();
        let ba = moyal_bracket(&b, &a).unwrap();
        prop_assert!(ab.add(&ba).is_zero());
    }

    #[test]
    fn left_and_right_actions_commute(a in poly(3), b in poly(3)) {
        prop_assert!(left_right_commutator(&a, &b).unwrap().is_zero());
    }
}
