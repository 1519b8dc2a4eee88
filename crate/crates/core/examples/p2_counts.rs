//! Counts of rational plane curves through 3d − 1 points, by localization and by WDVV.

use std::time::Instant;

use gwloc::algebra::Character;
use gwloc::engine::{nonequivariant_invariant, EngineOptions, Insertion};
use gwloc::gkm::builders::projective_space;
use gwloc::gkm::CurveClass;

fn main() {
    let dmax: i64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let p2 = projective_space(2, vec![Character::zero(), Character::basis(2, 0), Character::basis(2, 1)]).expect("P2");
    for d in 1..=dmax {
        let ins: Vec<Insertion> = (0..3 * d - 1).map(|i| Insertion::new(p2.delta(i as usize % 3))).collect();
        let opts = if d <= 2 { EngineOptions::symbolic() } else { EngineOptions::evaluated(d as u64).with_workers(8) };
        let start = Instant::now();
        let n = nonequivariant_invariant(&p2, &CurveClass(vec![d]), &ins, &opts).expect("invariant");
        println!("N_{d} = {n}  ({:.2?})", start.elapsed());
    }
}
