//! Curves on P¹×P¹ through 2a + 2b − 1 points: localization against the WDVV recursion.

use std::time::Instant;

use gwloc::algebra::Character;
use gwloc::engine::{nonequivariant_invariant, EngineOptions, Insertion};
use gwloc::gkm::builders::{product, projective_space};
use gwloc::gkm::CurveClass;
use gwloc::oracles::wdvv_p1p1;

fn main() {
    let a = projective_space(1, vec![Character::zero(), Character::basis(2, 0)]).expect("P1");
    let b = projective_space(1, vec![Character::zero(), Character::basis(2, 1)]).expect("P1");
    let f0 = product(&a, &b).expect("F0");
    let table = wdvv_p1p1((2, 2));
    for (da, db) in [(1, 0), (0, 1), (1, 1), (1, 2), (2, 1), (2, 2)] {
        let n = 2 * da + 2 * db - 1;
        let ins: Vec<Insertion> = (0..n).map(|i| Insertion::new(f0.delta(i as usize % 4))).collect();
        let symbolic = std::env::args().any(|a| a == "--symbolic");
        let opts = if symbolic || da + db <= 3 { EngineOptions::symbolic() } else { EngineOptions::evaluated(11) };
        let start = Instant::now();
        let v = nonequivariant_invariant(&f0, &CurveClass(vec![da, db]), &ins, &opts).expect("invariant");
        println!("({da},{db}): localization {v}, WDVV {}  ({:.2?})", table.get(&[da, db]).unwrap(), start.elapsed());
    }
}
