//! Restrictions of the J-function to fixed points, and the check that each pole in z
//! is predicted by a lower-degree coefficient through the edge recursion.

use gwloc::algebra::Character;
use gwloc::cone::{compute_all, verify_recursion, VerifyOptions};
use gwloc::gkm::{projective_space, CurveClass};

fn main() {
    let d: i64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let p2 = projective_space(2, vec![Character::zero(), Character::basis(2, 0), Character::basis(2, 1)]).unwrap();
    let bound = CurveClass(vec![d]);
    for j in compute_all(&p2, &bound, None, 0).expect("J") {
        for (beta, f) in &j.coefficients {
            println!("J at point {}, degree {}: {f}", j.point, beta);
        }
    }
    let r = verify_recursion(&p2, &bound, None, VerifyOptions::default());
    for c in &r.comparisons {
        println!(
            "point {} degree {} edge {} cover {}, pole of order {} at z = {}: {}",
            c.point,
            c.beta,
            c.edge,
            c.cover,
            c.order,
            c.pole,
            if c.matches { "matches" } else { "MISMATCH" }
        );
    }
    println!("{} principal parts, {} mismatches, highest pole order {}", r.comparisons.len(), r.mismatches(), r.max_pole_order);
}
