//! Rational functions with products of linear forms as denominators: canonical form,
//! partial fractions in z, limits and evaluation.

use gwloc::algebra::{q, Polynomial, RationalFunction, Var};

fn main() {
    let l0 = Polynomial::var(Var::Lambda(0));
    let l1 = Polynomial::var(Var::Lambda(1));
    let z = Polynomial::var(Var::Z);
    let a = RationalFunction::inverse_linear(&(&l0 - &l1)).unwrap();
    let b = RationalFunction::inverse_linear(&(&l1 - &l0)).unwrap();
    println!("1/(l1 - l2) + 1/(l2 - l1) = {}", &a + &b);

    // 1/((z - l0)(z - l1)^2)
    let f = &RationalFunction::inverse_linear(&(&z - &l0)).unwrap() * &RationalFunction::inverse_linear(&(&z - &l1)).unwrap().pow(2).unwrap();
    println!("f = {f}");
    for (pole, order) in f.poles_in(Var::Z) {
        println!("  order {order} pole at {}: principal part {}", pole.to_polynomial(), f.principal_part(&pole).unwrap());
    }
    println!("  vanishes as z -> oo: {}", f.vanishes_at_infinity(Var::Z));

    let x = Polynomial::var(Var::X);
    let g = &RationalFunction::from_polynomial(&(&x + &l0) * &l1) * &RationalFunction::inverse_linear(&(&l0 - &l1)).unwrap();
    println!("g = {g}, g at x = 0: {}", g.limit_at_zero(Var::X).unwrap());
    let at = |v: Var| match v {
        Var::Lambda(0) => Some(q(3)),
        Var::Lambda(1) => Some(q(5)),
        Var::X => Some(q(0)),
        _ => None,
    };
    println!("g(l1 = 3, l2 = 5, x = 0) = {}", g.evaluate(&at).unwrap());
}
