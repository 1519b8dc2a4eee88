use std::collections::BTreeMap;

use gwloc::algebra::{q, Polynomial, RationalFunction, Var, Q};
use gwloc::io::parse_polynomial;
use proptest::prelude::*;

const VARS: [Var; 4] = [Var::Lambda(0), Var::Lambda(1), Var::X, Var::Z];

fn poly_from(terms: &[(i64, [u8; 4])]) -> Polynomial {
    let mut p = Polynomial::zero();
    for (c, e) in terms {
        let mut t = Polynomial::constant(q(*c));
        for (v, &k) in VARS.iter().zip(e) {
            t = &t * &Polynomial::var(*v).pow(k as u32);
        }
        p = &p + &t;
    }
    p
}

fn linear_from(c: &[i64; 4], k: i64) -> Polynomial {
    let mut p = Polynomial::constant(q(k));
    for (v, &a) in VARS.iter().zip(c) {
        p = &p + &Polynomial::var(*v).scale(&q(a));
    }
    p
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((-5i64..=5, prop::array::uniform4(0u8..3)), 0..5).prop_map(|t| poly_from(&t))
}

/// A linear form that really involves a variable.
fn form() -> impl Strategy<Value = Polynomial> {
    (prop::array::uniform4(-3i64..=3), -3i64..=3)
        .prop_filter("involves a variable", |(c, _)| c.iter().any(|&a| a != 0))
        .prop_map(|(c, k)| linear_from(&c, k))
}

fn rational() -> impl Strategy<Value = RationalFunction> {
    (polynomial(), prop::collection::vec(form(), 0..3)).prop_map(|(n, ds)| {
        let mut r = RationalFunction::from_polynomial(n);
        for d in ds {
            r = &r * &RationalFunction::inverse_linear(&d).unwrap();
        }
        r
    })
}

/// A unit: a nonzero constant times a ratio of linear forms.
fn unit() -> impl Strategy<Value = RationalFunction> {
    (1i64..=7, prop::collection::vec(form(), 0..3), prop::collection::vec(form(), 0..3)).prop_map(|(c, ns, ds)| {
        let mut r = RationalFunction::integer(c);
        for n in ns {
            r = &r * &RationalFunction::from_polynomial(n);
        }
        for d in ds {
            r = &r * &RationalFunction::inverse_linear(&d).unwrap();
        }
        r
    })
}

fn point() -> impl Strategy<Value = [i64; 4]> {
    prop::array::uniform4(-40i64..=40)
}

fn at(p: [i64; 4]) -> impl Fn(Var) -> Option<Q> {
    move |v| VARS.iter().position(|&w| w == v).map(|i| q(p[i]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, RationalFunction::zero());
        prop_assert_eq!(&a + &RationalFunction::zero(), a.clone());
        prop_assert_eq!(&a * &RationalFunction::one(), a.clone());
    }

    #[test]
    fn units_invert(u in unit(), a in rational()) {
        let inv = u.inverse().unwrap();
        prop_assert_eq!(&u * &inv, RationalFunction::one());
        prop_assert_eq!(&(&a * &u) * &inv, a);
    }

    #[test]
    fn canonical_form_is_idempotent(a in rational()) {
        let den: BTreeMap<_, _> = a.denominator().map(|(f, m)| (f.clone(), m)).collect();
        let again = RationalFunction::from_parts(a.numerator().clone(), den);
        prop_assert_eq!(&again, &a);
        // equal values have equal text
        let b = &(&a + &RationalFunction::one()) - &RationalFunction::one();
        prop_assert_eq!(b.to_string(), a.to_string());
    }

    #[test]
    fn polynomial_text_round_trips(p in polynomial()) {
        prop_assert_eq!(parse_polynomial(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in rational(), b in rational(), pt in point()) {
        let v = at(pt);
        if let (Ok(x), Ok(y)) = (a.evaluate(&v), b.evaluate(&v)) {
            prop_assert_eq!((&a + &b).evaluate(&v).unwrap(), &x + &y);
            prop_assert_eq!((&a * &b).evaluate(&v).unwrap(), &x * &y);
        }
    }

    #[test]
    fn substitution_then_evaluation(a in rational(), pt in point()) {
        let v = at(pt);
        if let Ok(x) = a.evaluate(&v) {
            let partial = a.substitute_values(&[(Var::Lambda(0), q(pt[0])), (Var::X, q(pt[2]))]);
            if let Ok(partial) = partial {
                prop_assert_eq!(partial.evaluate(&v).unwrap(), x);
            }
        }
    }

    #[test]
    fn limit_agrees_with_substitution(a in rational()) {
        match a.limit_at_zero(Var::X) {
            Ok(l) => {
                prop_assert!(!l.involves(Var::X));
                prop_assert_eq!(l, a.substitute_values(&[(Var::X, q(0))]).unwrap());
            }
            Err(_) => prop_assert!(a.denominator().any(|(f, _)| f.to_polynomial() == Polynomial::var(Var::X))),
        }
    }
}
