//! Targets whose tangent weights are collinear at a fixed point admit chains of covers
//! with positive-dimensional fixed loci; they are rejected with a witness.

use std::path::Path;

use gwloc::algebra::Character;
use gwloc::compare::{run_compare, ComparisonJob};
use gwloc::gkm::projective_space;
use gwloc::io::read_json;

fn main() {
    let collinear = projective_space(2, vec![Character::new(vec![-2]), Character::new(vec![-1]), Character::zero()]).unwrap();
    println!("P2 with weights (-2, -1, 0): {}", collinear.validate());
    let generic = projective_space(2, vec![Character::new(vec![0, 0]), Character::new(vec![1, 0]), Character::new(vec![0, 1])]).unwrap();
    println!("P2 with generic weights: {}", generic.validate());

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/f0_vs_f2_chern_matched.json");
    let job: ComparisonJob = read_json(&path).unwrap();
    match run_compare(&job, 0, None) {
        Ok(r) => println!("unexpectedly compared {} lines", r.lines.len()),
        Err(e) => println!("equivariant F0/F2 comparison refused: {e}"),
    }
}
