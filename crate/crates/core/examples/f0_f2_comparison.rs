//! P(O ⊕ O) against P(O(1) ⊕ O(−1)) over P¹: every invariant of the first equals the
//! corresponding invariant of the second after identifying classes.

use std::time::Instant;

use gwloc::algebra::Character;
use gwloc::compare::{run_compare, ComparisonJob};
use gwloc::engine::Mode;
use gwloc::gkm::IdentificationMode;
use gwloc::io::TargetSpec;

fn main() {
    let l = |i| Character::basis(2, i);
    let job = ComparisonJob {
        base: TargetSpec::ProjectiveSpace { n: 1, weights: vec![Character::zero(), l(0)] },
        // trivial summands with weights l2 and 0
        source: vec![vec![l(1), l(1)], vec![Character::zero(), Character::zero()]],
        // degrees +1 and −1 over the base
        target: vec![vec![l(1), &l(1) - &l(0)], vec![Character::zero(), l(0)]],
        mode: IdentificationMode::NonEquivariant,
        anticanonical_bound: 9,
        base_degree_bound: Some(std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(2)),
        max_psi: 0,
        extra_markings: std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1),
        engine: if std::env::args().nth(3).is_some_and(|s| s == "evaluated") { Mode::Evaluated { seed: 1 } } else { Mode::Symbolic },
    };
    let start = Instant::now();
    let report = run_compare(&job, 0, None).expect("comparison");
    for line in &report.lines {
        println!(
            "({}) -> ({})  <{}>  {} | {}  {}",
            line.source_class,
            line.target_class,
            line.insertions.join(", "),
            line.source_value,
            line.target_value,
            if line.equal { "ok" } else { "MISMATCH" }
        );
    }
    for s in &report.skipped {
        println!("skipped {s}");
    }
    println!("{} comparisons, {} mismatches ({:.2?})", report.lines.len(), report.mismatches(), start.elapsed());
}
