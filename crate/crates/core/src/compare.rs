//! Invariants of two projective bundles with equal Chern classes, compared through `𝔉`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::Character;
use crate::cache::{canonical_problem, hash_input, Cache, CachedResult};
use crate::engine::invariant::{insertion_degree, Problem};
use crate::engine::{nonequivariant_batch, solve, EngineError, EngineOptions, Insertion, Mode};
use crate::gkm::{CohomologyIdentification, CurveClass, GkmError, GkmTarget, IdentificationMode};
use crate::io::{parse_class, InputError, TargetSpec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompareError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Target(#[from] GkmError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("the class bound does not cut out a finite set: edge class ({0}) has no positive degree")]
    UnboundedClasses(String),
}

fn default_bound() -> i64 {
    9
}

fn default_extra() -> usize {
    1
}

/// `P(V_1)` against `P(V_2)` over a common base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonJob {
    pub base: TargetSpec,
    /// `source[i][p]`: weight of the i-th summand of `V_1` at base point `p`.
    pub source: Vec<Vec<Character>>,
    pub target: Vec<Vec<Character>>,
    pub mode: IdentificationMode,
    /// Classes with `⟨−K, β⟩` at most this.
    #[serde(default = "default_bound")]
    pub anticanonical_bound: i64,
    /// Caps the base degree, needed when some fiber-direction class has `⟨−K, β⟩ ≤ 0`.
    #[serde(default)]
    pub base_degree_bound: Option<i64>,
    /// Menu items carry `ψ^a` for `a ≤ max_psi`.
    #[serde(default)]
    pub max_psi: u32,
    /// Markings beyond the fewest that reach the virtual dimension.
    #[serde(default = "default_extra")]
    pub extra_markings: usize,
    #[serde(default = "default_engine_mode")]
    pub engine: Mode,
}

fn default_engine_mode() -> Mode {
    Mode::Symbolic
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompareLine {
    pub source_class: String,
    pub target_class: String,
    pub insertions: Vec<String>,
    pub source_value: String,
    pub target_value: String,
    pub equal: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CompareReport {
    pub mode: String,
    pub classes: Vec<String>,
    pub lines: Vec<CompareLine>,
    /// Entries not compared, with the reason.
    pub skipped: Vec<String>,
    pub cache_hits: usize,
}

impl CompareReport {
    pub fn all_equal(&self) -> bool {
        self.lines.iter().all(|l| l.equal)
    }

    pub fn mismatches(&self) -> usize {
        self.lines.iter().filter(|l| !l.equal).count()
    }
}

/// One menu entry: a monomial in the generators with a ψ-power.
#[derive(Clone, Debug, PartialEq, Eq)]
struct MenuItem {
    expr: String,
    degree: u32,
    psi: u32,
}

impl MenuItem {
    fn label(&self) -> String {
        if self.psi == 0 {
            self.expr.clone()
        } else {
            format!("psi^{}*{}", self.psi, self.expr)
        }
    }
}

/// The unit and the monomials of degree `1..=dim` in the named divisor classes.
fn menu(t: &GkmTarget, max_psi: u32) -> Vec<MenuItem> {
    let names: Vec<String> = t.divisors().iter().map(|d| d.name.clone()).collect();
    let mut monos: Vec<(Vec<usize>, u32)> = Vec::new();
    fn rec(k: usize, start: usize, left: u32, acc: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, u32)>, deg: u32) {
        if left == 0 {
            out.push((acc.clone(), deg));
            return;
        }
        for i in start..k {
            acc.push(i);
            rec(k, i, left - 1, acc, out, deg);
            acc.pop();
        }
    }
    for deg in 1..=t.dimension() as u32 {
        rec(names.len(), 0, deg, &mut Vec::new(), &mut monos, deg);
    }
    let mut out: Vec<MenuItem> = (0..=max_psi).map(|psi| MenuItem { expr: "1".into(), degree: 0, psi }).collect();
    for (m, deg) in monos {
        let mut factors: Vec<String> = Vec::new();
        let mut i = 0;
        while i < m.len() {
            let j = m[i..].iter().take_while(|&&x| x == m[i]).count();
            factors.push(if j == 1 { names[m[i]].clone() } else { format!("{}^{j}", names[m[i]]) });
            i += j;
        }
        for psi in 0..=max_psi {
            out.push(MenuItem { expr: factors.join("*"), degree: deg, psi });
        }
    }
    out
}

/// Multisets of menu items with `n` entries and total degree `total`.
fn tuples(menu: &[MenuItem], n: usize, total: i64) -> Vec<Vec<usize>> {
    fn rec(menu: &[MenuItem], start: usize, n: usize, total: i64, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            if total == 0 {
                out.push(acc.clone());
            }
            return;
        }
        for i in start..menu.len() {
            let d = (menu[i].degree + menu[i].psi) as i64;
            if d > total {
                continue;
            }
            acc.push(i);
            rec(menu, i, n - 1, total - d, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(menu, 0, n, total, &mut Vec::new(), &mut out);
    out
}

/// Base degree of a bundle class: the base functional on the base coordinates.
fn base_degree(t: &GkmTarget, beta: &CurveClass) -> i64 {
    let s = t.bundle_structure().expect("bundle target");
    let f = s.base.positive_functional().unwrap_or(&[]);
    beta.0.iter().zip(f).map(|(a, b)| a * b).sum()
}

/// Effective classes with `⟨−K, β⟩ ≤ bound` (and base degree ≤ the cap, if given).
pub fn effective_classes(t: &GkmTarget, bound: i64, base_cap: Option<i64>) -> Result<Vec<CurveClass>, CompareError> {
    let gens = t.edge_classes();
    let c1 = |b: &CurveClass| t.anticanonical_degree(b).unwrap_or(i64::MAX);
    for g in &gens {
        if c1(g) <= 0 && (base_cap.is_none() || base_degree(t, g) <= 0) {
            return Err(CompareError::UnboundedClasses(g.to_string()));
        }
    }
    let ok = |b: &CurveClass| c1(b) <= bound && base_cap.is_none_or(|cap| base_degree(t, b) <= cap);
    let mut seen: BTreeSet<CurveClass> = BTreeSet::new();
    let mut frontier = vec![CurveClass::zero(t.lattice_rank())];
    while let Some(c) = frontier.pop() {
        for g in &gens {
            let s = c.add(g);
            if ok(&s) && !s.is_zero() && seen.insert(s.clone()) {
                frontier.push(s);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

fn build_side(base: &GkmTarget, summands: &[Vec<Character>]) -> Result<GkmTarget, CompareError> {
    let v = crate::gkm::SplitBundle::new(summands.iter().map(|w| crate::gkm::LineBundle::new(w.clone())).collect());
    Ok(crate::gkm::builders::projective_bundle(base, &v)?)
}

fn problem_key(t: &GkmTarget, beta: &CurveClass, insertions: &[Insertion], mode: IdentificationMode, opts: &EngineOptions) -> String {
    let mut key = canonical_problem(&Problem::new(t, beta.clone(), insertions.to_vec()), opts);
    if mode == IdentificationMode::NonEquivariant {
        key += "nonequivariant\n";
    }
    key
}

/// Values of every tuple for one class, as canonical text. Non-equivariant misses are
/// computed together so they share tree sums.
fn evaluate_all(
    t: &GkmTarget,
    beta: &CurveClass,
    tuples: &[Vec<Insertion>],
    mode: IdentificationMode,
    opts: &EngineOptions,
    cache: Option<&Cache>,
    hits: &mut usize,
) -> Result<Vec<String>, CompareError> {
    let keys: Vec<String> = tuples.iter().map(|ins| problem_key(t, beta, ins, mode, opts)).collect();
    let mut out: Vec<Option<String>> = keys.iter().map(|k| cache.and_then(|c| c.get(&hash_input(k))).map(|r| r.value)).collect();
    *hits += out.iter().filter(|v| v.is_some()).count();
    let missing: Vec<usize> = (0..tuples.len()).filter(|&i| out[i].is_none()).collect();
    let fresh: Vec<CachedResult> = match mode {
        IdentificationMode::Equivariant => missing
            .iter()
            .map(|&i| {
                let r = solve(&Problem::new(t, beta.clone(), tuples[i].clone()), opts)?;
                Ok(CachedResult { value: r.value.to_string(), trees: r.trees, point_seed: r.point_seed })
            })
            .collect::<Result<_, EngineError>>()?,
        IdentificationMode::NonEquivariant => {
            let todo: Vec<Vec<Insertion>> = missing.iter().map(|&i| tuples[i].clone()).collect();
            nonequivariant_batch(t, beta, &todo, opts)?
                .into_iter()
                .map(|v| CachedResult { value: v.to_string(), trees: 0, point_seed: None })
                .collect()
        }
    };
    for (&i, r) in missing.iter().zip(fresh) {
        if let Some(c) = cache {
            let _ = c.put(&hash_input(&keys[i]), &r);
        }
        out[i] = Some(r.value);
    }
    Ok(out.into_iter().map(|v| v.expect("filled")).collect())
}

/// Runs the comparison over every class and every insertion tuple of the right dimension.
pub fn run_compare(job: &ComparisonJob, workers: usize, cache: Option<&Cache>) -> Result<CompareReport, CompareError> {
    let base = job.base.build()?;
    let src = Arc::new(build_side(&base, &job.source)?);
    let tgt = Arc::new(build_side(&base, &job.target)?);
    if job.mode == IdentificationMode::Equivariant {
        src.validate().into_result()?;
        tgt.validate().into_result()?;
    }
    let id = CohomologyIdentification::new(src.clone(), tgt.clone(), job.mode)?;
    let back = id.inverse()?;
    let opts = EngineOptions { mode: job.engine, workers };

    let mut classes: BTreeSet<CurveClass> = effective_classes(&src, job.anticanonical_bound, job.base_degree_bound)?.into_iter().collect();
    for b in effective_classes(&tgt, job.anticanonical_bound, job.base_degree_bound)? {
        classes.insert(back.map_curve(&b)?);
    }
    let mut report = CompareReport {
        mode: format!("{:?}", job.mode),
        classes: classes.iter().map(|c| c.to_string()).collect(),
        ..Default::default()
    };
    let items = menu(&src, job.max_psi);
    let dim = src.dimension() as i64;
    for beta in &classes {
        let image = id.map_curve(beta)?;
        let Some(c1) = src.anticanonical_degree(beta) else {
            report.skipped.push(format!("({beta}): anticanonical degree is not an integer"));
            continue;
        };
        // dim − 3 + c1 + n = Σ (deg + ψ)
        let maxdeg = items.iter().map(|m| (m.degree + m.psi) as i64).max().unwrap_or(0);
        let n_min = (0..=64).find(|&n: &i64| {
            let v = dim - 3 + c1 + n;
            v >= 0 && v <= maxdeg * n
        });
        let Some(n_min) = n_min else {
            report.skipped.push(format!("({beta}): no insertion tuple has the virtual dimension"));
            continue;
        };
        for n in n_min..=n_min + job.extra_markings as i64 {
            let vdim = dim - 3 + c1 + n;
            if n == 0 && vdim != 0 {
                continue;
            }
            let ts = tuples(&items, n as usize, vdim);
            let mut left = Vec::with_capacity(ts.len());
            let mut right = Vec::with_capacity(ts.len());
            for tuple in &ts {
                let mut l = Vec::new();
                let mut r = Vec::new();
                for &i in tuple {
                    let m = &items[i];
                    let a = parse_class(&src, &m.expr)?;
                    let b = match job.mode {
                        IdentificationMode::Equivariant => id.map_class(&a)?,
                        IdentificationMode::NonEquivariant => parse_class(&tgt, &m.expr)?,
                    };
                    l.push(Insertion::with_psi(a, m.psi));
                    r.push(Insertion::with_psi(b, m.psi));
                }
                debug_assert_eq!(insertion_degree(&l), Some(vdim));
                left.push(l);
                right.push(r);
            }
            let lhs = evaluate_all(&src, beta, &left, job.mode, &opts, cache, &mut report.cache_hits)?;
            let rhs = evaluate_all(&tgt, &image, &right, job.mode, &opts, cache, &mut report.cache_hits)?;
            for ((tuple, l), r) in ts.iter().zip(lhs).zip(rhs) {
                report.lines.push(CompareLine {
                    source_class: beta.to_string(),
                    target_class: image.to_string(),
                    insertions: tuple.iter().map(|&i| items[i].label()).collect(),
                    equal: l == r,
                    source_value: l,
                    target_value: r,
                });
            }
        }
    }
    Ok(report)
}
