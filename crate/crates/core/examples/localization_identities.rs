//! ∫1 = 0 and ∫δ_p = 1 by Atiyah–Bott on a few GKM targets, plus the first Chern
//! class integrals that come out of the same sum.

use gwloc::algebra::Character;
use gwloc::gkm::{product, projective_bundle, projective_space, EquivariantClass, GkmTarget, LineBundle, SplitBundle};

fn ch(v: &[i64]) -> Character {
    Character::new(v.to_vec())
}

fn report(name: &str, t: &GkmTarget) {
    let one = t.integrate(&EquivariantClass::one(t.num_points())).expect("integral");
    let deltas: Vec<String> = (0..t.num_points()).map(|p| t.integrate(&t.delta(p)).expect("integral").to_string()).collect();
    println!("{name}: {} points, {} edges, validation {}", t.num_points(), t.num_edges(), t.validate());
    println!("  int 1 = {one}");
    println!("  int delta_p = [{}]", deltas.join(", "));
}

fn main() {
    let p1 = projective_space(1, vec![ch(&[0, 0]), ch(&[1, 0])]).unwrap();
    let other = projective_space(1, vec![ch(&[0, 0]), ch(&[0, 1])]).unwrap();
    report("P1", &p1);
    report("P3", &projective_space(3, vec![ch(&[0, 0, 0]), ch(&[1, 0, 0]), ch(&[0, 1, 0]), ch(&[0, 0, 1])]).unwrap());
    report("P1 x P1", &product(&p1, &other).unwrap());

    // Hirzebruch F_2 as P(O ⊕ O(2)) over P¹
    let f2 = projective_bundle(&p1, &SplitBundle::new(vec![LineBundle::trivial(2, ch(&[0, 1])), LineBundle::new(vec![ch(&[0, 0]), ch(&[-2, 0])])])).unwrap();
    report("F2", &f2);
    println!("{}", f2.summary());
}
