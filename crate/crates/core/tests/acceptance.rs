//! Acceptance suite: one PASS/FAIL line per criterion, with its runtime limit.
//! Runs without the libtest harness so every line is printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use gwloc::algebra::{q, Character, Polynomial, RationalFunction, Var};
use gwloc::cache::Cache;
use gwloc::compare::{run_compare, CompareError, CompareReport, ComparisonJob};
use gwloc::cone::{verify_recursion, RecursionReport, VerifyOptions};
use gwloc::engine::{
    gw_invariant, nonequivariant_invariant, EngineOptions, EulerMode, Insertion, Mode, Orientation, TwistSpec, TwistSummand,
};
use gwloc::gkm::{product, projective_bundle, projective_space, CurveClass, EquivariantClass, GkmError, GkmTarget, LineBundle, SplitBundle, Violation};
use gwloc::io::{read_json, TargetSpec};
use gwloc::oracles::{lefschetz_line_check, local_p2_degree_one_bott, psi_agreement, wdvv_p1p1, wdvv_p2};

type Outcome = Result<String, String>;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn target(name: &str) -> GkmTarget {
    read_json::<TargetSpec>(&data(name)).unwrap().build().unwrap()
}

fn job(name: &str) -> ComparisonJob {
    read_json(&data(name)).unwrap()
}

fn ch(v: &[i64]) -> Character {
    Character::new(v.to_vec())
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn points(t: &GkmTarget, k: usize) -> Vec<Insertion> {
    (0..k).map(|i| Insertion::new(t.delta(i % t.num_points()))).collect()
}

fn p2() -> GkmTarget {
    projective_space(2, vec![ch(&[0, 0]), ch(&[1, 0]), ch(&[0, 1])]).unwrap()
}

fn built_targets() -> Vec<(&'static str, GkmTarget)> {
    let p1 = projective_space(1, vec![ch(&[0]), ch(&[1])]).unwrap();
    let p3 = projective_space(3, vec![ch(&[0, 0, 0]), ch(&[1, 0, 0]), ch(&[0, 1, 0]), ch(&[0, 0, 1])]).unwrap();
    let p1b = projective_space(1, vec![ch(&[0, 0, 0]), ch(&[1, 0, 0])]).unwrap();
    let p2b = projective_space(2, vec![ch(&[0, 0, 0]), ch(&[0, 1, 0]), ch(&[0, 0, 1])]).unwrap();
    // O, O(1), O(2) with distinct generic weights
    let v = SplitBundle::new(vec![
        LineBundle::new(vec![ch(&[0, 1, 0]), ch(&[0, 1, 0])]),
        LineBundle::new(vec![ch(&[0, 0, 1]), ch(&[-1, 0, 1])]),
        LineBundle::new(vec![ch(&[0, 0, 0]), ch(&[-2, 0, 0])]),
    ]);
    vec![
        ("P1", p1),
        ("P2", p2()),
        ("P3", p3),
        ("F0", target("f0.json")),
        ("F2", target("f2.json")),
        ("P1xP2", product(&p1b, &p2b).unwrap()),
        ("P(O+O(1)+O(2))", projective_bundle(&p1b, &v).unwrap()),
    ]
}

fn localization_identities() -> Outcome {
    let mut n = 0;
    for (name, t) in built_targets() {
        check(t.validate().is_ok(), format!("{name} fails validation: {}", t.validate()))?;
        let one = t.integrate(&EquivariantClass::one(t.num_points())).map_err(|e| e.to_string())?;
        check(one.is_zero(), format!("{name}: integral of 1 is {one}"))?;
        for p in 0..t.num_points() {
            let v = t.integrate(&t.delta(p)).map_err(|e| e.to_string())?;
            check(v == RationalFunction::one(), format!("{name}: integral of delta_{p} is {v}"))?;
            n += 1;
        }
    }
    Ok(format!("7 targets, {n} point classes"))
}

fn psi_integrals() -> Outcome {
    let (checked, bad) = psi_agreement(8);
    check(bad.is_empty(), format!("mismatches at {bad:?}"))?;
    Ok(format!("{checked} exponent vectors, n = 3..=8"))
}

fn p2_counts() -> Outcome {
    let oracle = wdvv_p2(3);
    let t = p2();
    let mut parts = Vec::new();
    for d in 1..=3i64 {
        let start = Instant::now();
        let opts = if d <= 2 { EngineOptions::symbolic() } else { EngineOptions::evaluated(0x5EED).with_workers(8) };
        let v = nonequivariant_invariant(&t, &CurveClass(vec![d]), &points(&t, 3 * d as usize - 1), &opts).map_err(|e| e.to_string())?;
        let want = oracle.get(&[d]).unwrap();
        check(&v == want, format!("N_{d} = {v}, oracle {want}"))?;
        let limit = if d <= 2 { Duration::from_secs(2) } else { Duration::from_secs(300) };
        check(start.elapsed() < limit, format!("N_{d} took {:.2?}", start.elapsed()))?;
        parts.push(format!("N_{d} = {v} ({:.2?})", start.elapsed()));
    }
    Ok(parts.join(", "))
}

const F0_DEGREES: [(i64, i64); 5] = [(1, 0), (0, 1), (1, 1), (1, 2), (2, 2)];

fn f0_wdvv() -> Outcome {
    let oracle = wdvv_p1p1((2, 2));
    let t = target("f0.json");
    let mut parts = Vec::new();
    for (a, b) in F0_DEGREES {
        let n = (2 * a + 2 * b - 1) as usize;
        let v = nonequivariant_invariant(&t, &CurveClass(vec![a, b]), &points(&t, n), &EngineOptions::symbolic()).map_err(|e| e.to_string())?;
        let want = oracle.get(&[a, b]).unwrap();
        check(&v == want, format!("({a},{b}) = {v}, oracle {want}"))?;
        parts.push(format!("({a},{b}) = {v}"));
    }
    Ok(parts.join(", "))
}

fn comparison_report(mode: Mode) -> Result<CompareReport, String> {
    let mut j = job("f0_vs_f2.json");
    j.engine = mode;
    run_compare(&j, 0, None).map_err(|e| e.to_string())
}

fn f0_f2_comparison(symbolic: &mut Option<CompareReport>) -> Outcome {
    let r = comparison_report(Mode::Symbolic)?;
    check(!r.lines.is_empty(), "empty report")?;
    check(r.skipped.is_empty(), format!("skipped entries: {:?}", r.skipped))?;
    let bad: Vec<String> = r.lines.iter().filter(|l| !l.equal).map(|l| format!("({}) {:?}", l.source_class, l.insertions)).collect();
    check(bad.is_empty(), format!("{} mismatches, first {:?}", bad.len(), bad.first()))?;
    let one_one = r
        .lines
        .iter()
        .find(|l| l.source_class == "1,1" && l.insertions.len() == 3 && l.insertions.iter().all(|i| i == "d1*h"))
        .ok_or("no (1,1) point-insertion line")?;
    check(one_one.source_value == "1", format!("(1,1) through 3 points is {}", one_one.source_value))?;
    let msg = format!("{} classes, {} lines, all equal; (1,1) through 3 points = 1", r.classes.len(), r.lines.len());
    *symbolic = Some(r);
    Ok(msg)
}

fn twisted_theory() -> Outcome {
    let r = lefschetz_line_check();
    for l in &r.lines {
        check(l.passed, format!("{}: {} (expected {})", l.name, l.value, l.expected))?;
    }
    let limit = r.lines.iter().find(|l| l.name.contains("x -> 0")).ok_or("no x -> 0 line")?;
    check(limit.value == "3", format!("x -> 0 limit is {}", limit.value))?;
    // the hand computation in docs/local-p2-bott.md uses w = (0, 1, 3)
    let w: Vec<Polynomial> = [0, 1, 3].iter().map(|&c| Polynomial::constant(q(c))).collect();
    let hand = local_p2_degree_one_bott([&w[0], &w[1], &w[2]]).map_err(|e| e.to_string())?;
    check(hand == RationalFunction::integer(3), format!("Bott sum at (0,1,3) is {hand}"))?;
    Ok(format!("{} checks; both brackets 1, local P2 limit 3 = Bott sum", r.lines.len()))
}

fn recursion_ok(name: &str, r: &RecursionReport) -> Result<usize, String> {
    check(r.passed(), format!("{name}: {} mismatches, errors {:?}, support {:?}", r.mismatches(), r.errors, r.support_violations))?;
    check(!r.comparisons.is_empty(), format!("{name}: nothing compared"))?;
    Ok(r.comparisons.len())
}

fn recursion() -> Outcome {
    let opts = VerifyOptions::default();
    let mut total = 0;
    let p1 = projective_space(1, vec![ch(&[0, 0]), ch(&[1, 0])]).unwrap();
    total += recursion_ok("P1", &verify_recursion(&p1, &CurveClass(vec![3]), None, opts))?;
    let r = verify_recursion(&p2(), &CurveClass(vec![2]), None, opts);
    total += recursion_ok("P2", &r)?;
    check(r.comparisons.iter().any(|c| c.cover == 2), "P2: no double-cover pole compared")?;
    for name in ["f0.json", "f2.json"] {
        total += recursion_ok(name, &verify_recursion(&target(name), &CurveClass(vec![1, 1]), None, opts))?;
    }
    let tw = TwistSpec {
        summands: vec![TwistSummand { bundle: LineBundle::trivial(2, ch(&[0, 1])), orientation: Orientation::Convex }],
        euler: EulerMode::Inverse,
        auxiliary_weight: false,
    };
    total += recursion_ok("twisted P1", &verify_recursion(&p1, &CurveClass(vec![3]), Some(&tw), opts))?;
    Ok(format!("{total} principal parts on P1, P2, F0, F2, twisted P1"))
}

fn collinear_witness(t: &GkmTarget) -> Option<String> {
    t.validate().violations.into_iter().find_map(|v| match v {
        Violation::CollinearTangentWeights { point, first, second } => Some(format!("point {point}: {first} ~ {second}")),
        _ => None,
    })
}

fn chain_free_gate() -> Outcome {
    let t = projective_space(2, vec![ch(&[-2]), ch(&[-1]), ch(&[0])]).unwrap();
    let w1 = collinear_witness(&t).ok_or("P2 with (-2l,-l,0) accepted")?;
    let j = job("f0_vs_f2_chern_matched.json");
    match run_compare(&j, 0, None) {
        Err(CompareError::Target(GkmError::NotChainFree(msg))) => check(msg.contains("collinear"), format!("no witness in {msg:?}"))?,
        other => return Err(format!("Chern-matched pair not rejected: {:?}", other.map(|r| r.lines.len()))),
    }
    let base = j.base.build().unwrap();
    let side = |s: &Vec<Vec<Character>>| projective_bundle(&base, &SplitBundle::new(s.iter().map(|w| LineBundle::new(w.clone())).collect())).unwrap();
    let w2 = collinear_witness(&side(&j.source)).ok_or("F0 side accepted")?;
    let w3 = collinear_witness(&side(&j.target)).ok_or("F2 side accepted")?;
    Ok(format!("P2 witness {w1}; F0 witness {w2}; F2 witness {w3}"))
}

fn mode_agreement(t: &GkmTarget, beta: &CurveClass, ins: &[Insertion], seeds: u64) -> Result<(), String> {
    let symbolic = gw_invariant(t, beta, ins, None, &EngineOptions::symbolic()).map_err(|e| e.to_string())?.value;
    for s in 0..seeds {
        let r = gw_invariant(t, beta, ins, None, &EngineOptions::evaluated(1000 + s)).map_err(|e| e.to_string())?;
        let point = r.point.clone().ok_or("no point recorded")?;
        let at = |v: Var| match v {
            Var::Lambda(i) => point.get(i).cloned(),
            _ => None,
        };
        let expect = symbolic.evaluate(&at).map_err(|e| e.to_string())?;
        let got = r.value.as_constant().ok_or("evaluated result is not a number")?;
        check(expect == got, format!("({beta}) seed {}: symbolic gives {expect}, evaluated {got}", 1000 + s))?;
    }
    Ok(())
}

fn engineering(symbolic: Option<&CompareReport>) -> Outcome {
    // parallel determinism
    let t = p2();
    let beta = CurveClass(vec![3]);
    let ins = points(&t, 8);
    let a = gw_invariant(&t, &beta, &ins, None, &EngineOptions::evaluated(9).with_workers(1)).map_err(|e| e.to_string())?;
    let b = gw_invariant(&t, &beta, &ins, None, &EngineOptions::evaluated(9).with_workers(8)).map_err(|e| e.to_string())?;
    check(a == b, "P2 degree 3 differs between 1 and 8 workers")?;
    let small = job("f0_vs_f2_small.json");
    let one = run_compare(&small, 1, None).map_err(|e| e.to_string())?;
    let many = run_compare(&small, 4, None).map_err(|e| e.to_string())?;
    let text = |r: &CompareReport| serde_json::to_string(r).unwrap();
    check(text(&one) == text(&many), "comparison report differs between 1 and 4 workers")?;

    // cache bypass
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cache = Cache::at(dir.path());
    let first = run_compare(&small, 0, Some(&cache)).map_err(|e| e.to_string())?;
    let second = run_compare(&small, 0, Some(&cache)).map_err(|e| e.to_string())?;
    check(first.cache_hits == 0 && second.cache_hits > 0, format!("cache hits {} then {}", first.cache_hits, second.cache_hits))?;
    check(first.lines == one.lines && second.lines == one.lines, "cached report differs from recomputation")?;

    // symbolic against evaluated
    let mut points_checked = 0;
    for d in 1..=3i64 {
        mode_agreement(&t, &CurveClass(vec![d]), &points(&t, 3 * d as usize - 1), 100)?;
        points_checked += 100;
    }
    let f0 = target("f0.json");
    for (a, b) in F0_DEGREES {
        mode_agreement(&f0, &CurveClass(vec![a, b]), &points(&f0, (2 * a + 2 * b - 1) as usize), 100)?;
        points_checked += 100;
    }
    let symbolic = match symbolic {
        Some(r) => r.clone(),
        None => comparison_report(Mode::Symbolic)?,
    };
    let evaluated = comparison_report(Mode::Evaluated { seed: 77 })?;
    check(evaluated.lines.len() == symbolic.lines.len(), "line counts differ")?;
    for (s, e) in symbolic.lines.iter().zip(&evaluated.lines) {
        check(s == e, format!("({}) {:?}: symbolic {} vs evaluated {}", s.source_class, s.insertions, s.source_value, e.source_value))?;
    }
    Ok(format!(
        "1 vs 8 workers identical; cache hits identical; {points_checked} seeded points on criteria 3-4; {} comparison lines identical at a dual evaluation point",
        evaluated.lines.len()
    ))
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, n: u32, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let r = r.and_then(|m| if took <= limit { Ok(m) } else { Err(format!("{m}; took {took:.2?}, limit {limit:?}")) });
        match r {
            Ok(m) => println!("criterion {n} {name}: PASS ({took:.2?}, limit {limit:?}) {m}"),
            Err(m) => {
                self.failures += 1;
                println!("criterion {n} {name}: FAIL ({took:.2?}, limit {limit:?}) {m}");
            }
        }
    }
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored; `--list` prints nothing
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut suite = Suite { failures: 0 };
    let min = |m: u64| Duration::from_secs(60 * m);
    suite.run(1, "localization identities", Duration::from_secs(1), localization_identities);
    suite.run(2, "psi integrals", Duration::from_secs(10), psi_integrals);
    suite.run(3, "P2 counts", min(5), p2_counts);
    suite.run(4, "F0 WDVV", min(5), f0_wdvv);
    let mut report = None;
    suite.run(5, "F0/F2 comparison", min(10), || f0_f2_comparison(&mut report));
    suite.run(6, "twisted theory", min(1), twisted_theory);
    suite.run(7, "recursion", min(5), recursion);
    suite.run(8, "chain-free gate", Duration::from_secs(1), chain_free_gate);
    suite.run(9, "engineering properties", min(10), || engineering(report.as_ref()));
    if suite.failures > 0 {
        println!("{} criteria failed", suite.failures);
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
