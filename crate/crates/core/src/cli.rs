//! The `gwloc` command line: argument parsing, file handling, and JSON output.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 bad input or usage.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cache::{cached, canonical_problem, hash_input, Cache, CachedResult};
use crate::compare::{run_compare, CompareError, ComparisonJob};
use crate::cone::{compute_all, verify_recursion, ConeError, VerifyOptions};
use crate::engine::{solve, EngineError, EngineOptions, Mode, Problem};
use crate::gkm::{CurveClass, GkmError, GkmTarget};
use crate::io::{build_insertions, read_json, InputError, InsertionSpec, TargetSpec, TwistFile};
use crate::oracles;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

const FORMATS: &str = "\
File formats (JSON):
  target      {\"builder\": \"projective_space\", \"n\": 2, \"weights\": [[0,0],[1,0],[0,1]]}
              builders: point, projective_space, product {factors}, projective_bundle {base, summands},
              explicit {name, torus_rank, points, edges: [{ends, character, class}], lattice_rank, divisors}
  insertions  [{\"class\": \"pt\"}, {\"class\": \"d1^2\", \"psi\": 1}]
              class expressions use l1.., x, named classes (d1.., h), pt, pt_i, + - * / ^
  twist       {\"summands\": [{\"weights\": [[0,0],[-1,0],[0,-1]], \"orientation\": \"convex\"}],
               \"euler\": \"inverse\" | \"direct\", \"auxiliary_weight\": false}
  compare job {\"base\": <target>, \"source\": [[w..]..], \"target\": [[w..]..], \"mode\": \"non-equivariant\",
               \"anticanonical_bound\": 9, \"base_degree_bound\": 4, \"extra_markings\": 1}
Cache directory: $GWLOC_CACHE_DIR (default .gwloc-cache).";

#[derive(Parser, Debug)]
#[command(name = "gwloc", version, about = "Genus-zero equivariant Gromov-Witten invariants by localization", after_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moment-graph targets.
    #[command(subcommand)]
    Target(TargetCommand),
    /// One invariant.
    Invariant(InvariantArgs),
    /// J-function restrictions.
    #[command(subcommand)]
    Jfun(JfunCommand),
    /// Independent reference values.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Compare two projective bundles over a common base.
    Compare(CompareArgs),
    /// The result cache.
    #[command(subcommand)]
    Cache(CacheCommand),
}

#[derive(Subcommand, Debug)]
enum TargetCommand {
    /// Print the moment graph and check every target invariant.
    Validate { file: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Symbolic,
    Evaluated,
}

#[derive(Args, Debug)]
struct EngineArgs {
    #[arg(long, value_enum, default_value = "symbolic")]
    mode: ModeArg,
    /// Seed of the evaluation point (evaluated mode).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl EngineArgs {
    fn options(&self) -> EngineOptions {
        let mode = match self.mode {
            ModeArg::Symbolic => Mode::Symbolic,
            ModeArg::Evaluated => Mode::Evaluated { seed: self.seed },
        };
        EngineOptions { mode, workers: self.workers }
    }
}

#[derive(Args, Debug)]
struct InvariantArgs {
    #[arg(long)]
    target: PathBuf,
    /// Curve class coordinates, e.g. "2" or "1,1".
    #[arg(long)]
    class: String,
    #[arg(long)]
    insertions: PathBuf,
    #[arg(long)]
    twist: Option<PathBuf>,
    /// Take the auxiliary weight to zero at the end.
    #[arg(long)]
    limit_x: bool,
    #[arg(long)]
    no_cache: bool,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Subcommand, Debug)]
enum JfunCommand {
    /// Coefficients of every restriction up to a class.
    Compute(JfunArgs),
    /// Check the principal parts against the recursion.
    Verify(JfunArgs),
}

#[derive(Args, Debug)]
struct JfunArgs {
    #[arg(long)]
    target: PathBuf,
    /// Bound on the curve class, e.g. "3" or "1,1".
    #[arg(long)]
    degree: String,
    #[arg(long)]
    twist: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Test hook: corrupt one predicted principal part.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Plane curve counts up to a degree.
    WdvvP2 {
        #[arg(long, default_value_t = 4)]
        dmax: i64,
    },
    /// P¹×P¹ counts up to a bidegree, e.g. "2,2".
    WdvvF0 {
        #[arg(long, default_value = "2,2")]
        bound: String,
    },
    /// Compare ψ-integrals with the string-equation recursion.
    Psi {
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Twisted line counts and the local P² Bott sum.
    Lefschetz,
}

#[derive(Args, Debug)]
struct CompareArgs {
    job: PathBuf,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    no_cache: bool,
}

#[derive(Subcommand, Debug)]
enum CacheCommand {
    Path,
    Clear,
    Stats,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INPUT, message: e.to_string() }
}

fn mismatch(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_MISMATCH, message: e.to_string() }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        input(e)
    }
}

impl From<GkmError> for Failure {
    fn from(e: GkmError) -> Self {
        input(e)
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::BadClass(_) | EngineError::InvalidInsertion(_) | EngineError::InvalidTwist(_) | EngineError::Target(_) => {
                input(e)
            }
            _ => mismatch(e),
        }
    }
}

impl From<CompareError> for Failure {
    fn from(e: CompareError) -> Self {
        match e {
            CompareError::Engine(e) => e.into(),
            _ => input(e),
        }
    }
}

impl From<ConeError> for Failure {
    fn from(e: ConeError) -> Self {
        match e {
            ConeError::Engine(e) => e.into(),
            _ => mismatch(e),
        }
    }
}

type Outcome = Result<i32, Failure>;

fn print_json(out: &mut dyn Write, v: &serde_json::Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn load_target(path: &PathBuf) -> Result<GkmTarget, Failure> {
    Ok(read_json::<TargetSpec>(path)?.build()?)
}

fn parse_degree(t: &GkmTarget, s: &str) -> Result<CurveClass, Failure> {
    let c = CurveClass::parse(s).map_err(|e| input(format!("curve class {s:?}: {e}")))?;
    if c.rank() != t.lattice_rank() {
        return Err(input(format!("curve class ({c}) has rank {}, the target's lattice has rank {}", c.rank(), t.lattice_rank())));
    }
    Ok(c)
}

fn target_validate(file: &PathBuf, out: &mut dyn Write) -> Outcome {
    let t = load_target(file)?;
    let report = t.validate();
    let _ = write!(out, "{}", t.summary());
    let _ = writeln!(out, "validation: {report}");
    print_json(out, &json!({ "target": t.name, "chain_free": report.is_chain_free(), "violations": report.violations }));
    Ok(if report.is_ok() { EXIT_OK } else { EXIT_MISMATCH })
}

fn invariant(a: &InvariantArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let t = load_target(&a.target)?;
    let beta = parse_degree(&t, &a.class)?;
    let specs: Vec<InsertionSpec> = read_json(&a.insertions)?;
    let insertions = build_insertions(&t, &specs)?;
    let twist = match &a.twist {
        Some(p) => Some(read_json::<TwistFile>(p)?.build()),
        None => None,
    };
    let opts = a.engine.options();
    let problem = Problem::new(&t, beta, insertions).with_twist(twist.as_ref()).with_limit_x(a.limit_x);
    let canonical = canonical_problem(&problem, &opts);
    let cache = (!a.no_cache).then(Cache::from_env);
    let start = Instant::now();
    let (r, hit) = cached(cache.as_ref(), &canonical, || {
        let r = solve(&problem, &opts)?;
        Ok::<_, EngineError>(CachedResult { value: r.value.to_string(), trees: r.trees, point_seed: r.point_seed })
    })?;
    let _ = writeln!(err, "{} in {:.3?}", if hit { "cache hit" } else { "computed" }, start.elapsed());
    let (mode, seed) = match opts.mode {
        Mode::Symbolic => ("symbolic", None),
        Mode::Evaluated { seed } => ("evaluated", Some(seed)),
    };
    print_json(
        out,
        &json!({
            "value": r.value,
            "inputs_hash": hash_input(&canonical),
            "mode": mode,
            "seed": seed,
            "point_seed": r.point_seed,
            "graphs": r.trees,
            "version": env!("CARGO_PKG_VERSION"),
        }),
    );
    Ok(EXIT_OK)
}

fn jfun(cmd: &JfunCommand, out: &mut dyn Write) -> Outcome {
    let (JfunCommand::Compute(a) | JfunCommand::Verify(a)) = cmd;
    let t = load_target(&a.target)?;
    let bound = parse_degree(&t, &a.degree)?;
    let twist = match &a.twist {
        Some(p) => Some(read_json::<TwistFile>(p)?.build()),
        None => None,
    };
    if let Some(tw) = &twist {
        crate::engine::invariant::check_twist(&t, tw)?;
    }
    t.validate().into_result()?;
    match cmd {
        JfunCommand::Compute(_) => {
            let js = compute_all(&t, &bound, twist.as_ref(), a.workers)?;
            let points: Vec<serde_json::Value> = js
                .iter()
                .map(|j| {
                    let coeffs: Vec<serde_json::Value> =
                        j.coefficients.iter().map(|(b, f)| json!({ "class": b.0, "value": f.to_string() })).collect();
                    json!({ "point": t.point_name(j.point), "coefficients": coeffs })
                })
                .collect();
            print_json(out, &json!({ "bound": bound.0, "restrictions": points }));
            Ok(EXIT_OK)
        }
        JfunCommand::Verify(_) => {
            let report = verify_recursion(&t, &bound, twist.as_ref(), VerifyOptions { workers: a.workers, inject_fault: a.inject_fault });
            print_json(
                out,
                &json!({
                    "passed": report.passed(),
                    "comparisons": report.comparisons.len(),
                    "mismatches": report.mismatches(),
                    "max_pole_order": report.max_pole_order,
                    "report": report,
                }),
            );
            Ok(if report.passed() { EXIT_OK } else { EXIT_MISMATCH })
        }
    }
}

fn oracle(cmd: &OracleCommand, out: &mut dyn Write) -> Outcome {
    match cmd {
        OracleCommand::WdvvP2 { dmax } => {
            if *dmax < 1 {
                return Err(input("--dmax must be at least 1"));
            }
            print_json(out, &oracles::wdvv_p2(*dmax).to_json());
        }
        OracleCommand::WdvvF0 { bound } => {
            let c = CurveClass::parse(bound).map_err(|e| input(format!("bound {bound:?}: {e}")))?;
            let [a, b] = c.0[..] else { return Err(input("--bound needs two coordinates")) };
            if a < 0 || b < 0 {
                return Err(input("--bound must be nonnegative"));
            }
            print_json(out, &oracles::wdvv_p1p1((a, b)).to_json());
        }
        OracleCommand::Psi { n } => {
            let (checked, bad) = oracles::psi_agreement(*n);
            print_json(out, &json!({ "checked": checked, "mismatches": bad }));
            return Ok(if bad.is_empty() { EXIT_OK } else { EXIT_MISMATCH });
        }
        OracleCommand::Lefschetz => {
            let r = oracles::lefschetz_line_check();
            print_json(out, &json!({ "passed": r.passed(), "lines": r.lines }));
            return Ok(if r.passed() { EXIT_OK } else { EXIT_MISMATCH });
        }
    }
    Ok(EXIT_OK)
}

fn compare(a: &CompareArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let job: ComparisonJob = read_json(&a.job)?;
    let cache = (!a.no_cache).then(Cache::from_env);
    let start = Instant::now();
    let report = run_compare(&job, a.workers, cache.as_ref())?;
    let _ = writeln!(err, "{} comparisons, {} cache hits, {:.3?}", report.lines.len(), report.cache_hits, start.elapsed());
    let mut v = serde_json::to_value(&report).expect("serializable");
    // hits depend on the cache state, not on the inputs
    v.as_object_mut().expect("object").remove("cache_hits");
    v["all_equal"] = json!(report.all_equal());
    v["version"] = json!(env!("CARGO_PKG_VERSION"));
    print_json(out, &v);
    Ok(if report.all_equal() { EXIT_OK } else { EXIT_MISMATCH })
}

fn cache_command(cmd: &CacheCommand, out: &mut dyn Write) -> Outcome {
    let cache = Cache::from_env();
    match cmd {
        CacheCommand::Path => {
            let _ = writeln!(out, "{}", cache.dir().display());
        }
        CacheCommand::Clear => {
            let n = cache.clear().map_err(input)?;
            let _ = writeln!(out, "removed {n} entries");
        }
        CacheCommand::Stats => {
            let _ = writeln!(out, "{} entries in {}", cache.len(), cache.dir().display());
        }
    }
    Ok(EXIT_OK)
}

/// Runs one command line (including the program name) with explicit output streams.
pub fn run_with_output<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}\n{FORMATS}\n");
            }
            return code;
        }
    };
    let r = match &cli.command {
        Command::Target(TargetCommand::Validate { file }) => target_validate(file, out),
        Command::Invariant(a) => invariant(a, out, err),
        Command::Jfun(c) => jfun(c, out),
        Command::Oracle(c) => oracle(c, out),
        Command::Compare(a) => compare(a, out, err),
        Command::Cache(c) => cache_command(c, out),
    };
    match r {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            if f.code == EXIT_INPUT {
                let _ = writeln!(err, "{FORMATS}");
            }
            f.code
        }
    }
}

/// Runs one command line against stdout and stderr; returns the exit code.
pub fn run_command<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_output(argv, &mut stdout.lock(), &mut stderr.lock())
}
