//! Twisted invariants: the two degree-one brackets that both equal 1, and local P²
//! in degree one (x → 0) against the hand-checkable sum over lines.
//! Pass a degree to also print the local P² invariant in that degree.

use gwloc::algebra::{q, Character, Polynomial, Var};
use gwloc::engine::{solve, EngineOptions, EulerMode, Orientation, Problem, TwistSpec, TwistSummand};
use gwloc::gkm::{projective_space, CurveClass, LineBundle};
use gwloc::oracles::{lefschetz_line_check, local_p2_degree_one_bott};

fn main() {
    for l in lefschetz_line_check().lines {
        println!("{:<48} {:>6}  expected {:>3}  {}", l.name, l.value, l.expected, if l.passed { "ok" } else { "FAIL" });
    }
    for w in [[0, 1, 3], [0, 2, 7], [1, -4, 5]] {
        let w: Vec<Polynomial> = w.iter().map(|&c| Polynomial::constant(q(c))).collect();
        println!("sum over lines at weights ({}, {}, {}): {}", w[0], w[1], w[2], local_p2_degree_one_bott([&w[0], &w[1], &w[2]]).unwrap());
    }

    let Some(d) = std::env::args().nth(1).and_then(|s| s.parse::<i64>().ok()) else { return };
    let ws = vec![Character::zero(), Character::basis(2, 0), Character::basis(2, 1)];
    let p2 = projective_space(2, ws.clone()).unwrap();
    let twist = TwistSpec {
        summands: vec![TwistSummand { bundle: LineBundle::new(ws.iter().map(|c| c.scale(3)).collect()), orientation: Orientation::Concave }],
        euler: EulerMode::Inverse,
        auxiliary_weight: true,
    };
    let r = solve(&Problem::new(&p2, CurveClass(vec![d]), Vec::new()).with_twist(Some(&twist)).with_limit_x(true), &EngineOptions::symbolic())
        .expect("local P2");
    let v = r.value;
    println!("local P2, degree {d}: {v} ({} graphs, depends on x: {})", r.trees, v.involves(Var::X));
}
