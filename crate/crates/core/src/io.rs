//! Input files and the class expression language.
//!
//! Class expressions combine rational numbers, the equivariant parameters `l1, l2, …`,
//! the auxiliary weight `x`, the target's named classes (`d1, d2, …`, `h`), and point
//! classes `pt` (the fixed point 0) or `pt_i`, with `+ - * / ^` and parentheses.
//! Division is only by numbers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{Character, Polynomial, RationalFunction, Var, Q};
use crate::engine::{EulerMode, Insertion, Orientation, TwistSpec, TwistSummand};
use crate::gkm::builders::{point_target, product, projective_bundle, projective_space};
use crate::gkm::{CurveClass, Edge, EquivariantClass, GkmError, GkmTarget, LineBundle, NamedClass, SplitBundle};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("cannot parse expression {expr:?}: {message}")]
    Expression { expr: String, message: String },
    #[error(transparent)]
    Target(#[from] GkmError),
}

#[derive(Clone, Debug, PartialEq)]
enum Expr {
    Num(Q),
    Name(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Q),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(num_bigint::BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Num(text.parse().map_err(|_| format!("bad number {text}"))?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, String> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, String> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                let Expr::Num(d) = self.unary()? else { return Err("can only divide by a number".into()) };
                if num_traits::Zero::is_zero(&d) {
                    return Err("division by zero".into());
                }
                lhs = Expr::Div(Box::new(lhs), d);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, String> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Token::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| "exponent too large".to_string())?;
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => Err("exponent must be a nonnegative integer".into()),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, String> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(Q::from_integer(n)))
            }
            Some(Token::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Name(s))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err("missing )".into());
                }
                Ok(e)
            }
            Some(t) => Err(format!("unexpected {t:?}")),
            None => Err("unexpected end of input".into()),
        }
    }
}

fn parse(s: &str) -> Result<Expr, InputError> {
    let err = |message: String| InputError::Expression { expr: s.to_string(), message };
    let tokens = tokenize(s).map_err(err)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr().map_err(err)?;
    if p.pos != p.tokens.len() {
        return Err(err("trailing input".into()));
    }
    Ok(e)
}

fn parameter(name: &str) -> Option<Var> {
    if name == "x" {
        return Some(Var::X);
    }
    if name == "z" {
        return Some(Var::Z);
    }
    let i: usize = name.strip_prefix('l')?.parse().ok()?;
    (i >= 1).then(|| Var::Lambda(i - 1))
}

trait Ring: Sized + Clone {
    fn num(&self, c: &Q) -> Self;
    fn name(&self, s: &str) -> Result<Self, String>;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: &Q) -> Self;
}

fn eval<R: Ring>(ctx: &R, e: &Expr) -> Result<R, String> {
    Ok(match e {
        Expr::Num(c) => ctx.num(c),
        Expr::Name(s) => ctx.name(s)?,
        Expr::Add(a, b) => eval(ctx, a)?.add(&eval(ctx, b)?),
        Expr::Sub(a, b) => eval(ctx, a)?.add(&eval(ctx, b)?.scale(&Q::from_integer((-1).into()))),
        Expr::Mul(a, b) => eval(ctx, a)?.mul(&eval(ctx, b)?),
        Expr::Div(a, d) => eval(ctx, a)?.scale(&(Q::from_integer(1.into()) / d)),
        Expr::Neg(a) => eval(ctx, a)?.scale(&Q::from_integer((-1).into())),
        Expr::Pow(a, k) => {
            let b = eval(ctx, a)?;
            let mut acc = ctx.num(&Q::from_integer(1.into()));
            for _ in 0..*k {
                acc = acc.mul(&b);
            }
            acc
        }
    })
}

impl Ring for Polynomial {
    fn num(&self, c: &Q) -> Self {
        Polynomial::constant(c.clone())
    }
    fn name(&self, s: &str) -> Result<Self, String> {
        parameter(s).map(Polynomial::var).ok_or_else(|| format!("unknown parameter {s}"))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Q) -> Self {
        Polynomial::scale(self, c)
    }
}

/// Parses a polynomial in `l1, l2, …, x, z`.
pub fn parse_polynomial(s: &str) -> Result<Polynomial, InputError> {
    eval(&Polynomial::zero(), &parse(s)?).map_err(|message| InputError::Expression { expr: s.into(), message })
}

#[derive(Clone)]
struct ClassRing<'a> {
    target: &'a GkmTarget,
    value: EquivariantClass,
}

impl Ring for ClassRing<'_> {
    fn num(&self, c: &Q) -> Self {
        ClassRing { target: self.target, value: EquivariantClass::constant(self.target.num_points(), c.clone()) }
    }
    fn name(&self, s: &str) -> Result<Self, String> {
        let t = self.target;
        let value = if let Some(c) = t.class_named(s) {
            c.clone()
        } else if s == "pt" {
            t.delta(0)
        } else if let Some(i) = s.strip_prefix("pt_") {
            let i: usize = i.parse().map_err(|_| format!("bad point index in {s}"))?;
            if i >= t.num_points() {
                return Err(format!("{s}: the target has {} fixed points", t.num_points()));
            }
            t.delta(i)
        } else if let Some(v) = parameter(s) {
            EquivariantClass::from_polynomials(vec![Polynomial::var(v); t.num_points()])
        } else {
            let names: Vec<&str> = t.divisors().iter().map(|d| d.name.as_str()).collect();
            return Err(format!("unknown class {s} (known: {}, pt, pt_i, l1, l2, ..., x)", names.join(", ")));
        };
        Ok(ClassRing { target: t, value })
    }
    fn add(&self, o: &Self) -> Self {
        ClassRing { target: self.target, value: self.value.add(&o.value) }
    }
    fn mul(&self, o: &Self) -> Self {
        ClassRing { target: self.target, value: self.value.mul(&o.value) }
    }
    fn scale(&self, c: &Q) -> Self {
        ClassRing { target: self.target, value: self.value.scale(c) }
    }
}

/// Evaluates a class expression on a target.
pub fn parse_class(target: &GkmTarget, s: &str) -> Result<EquivariantClass, InputError> {
    let ctx = ClassRing { target, value: EquivariantClass::zero(target.num_points()) };
    eval(&ctx, &parse(s)?).map(|r| r.value).map_err(|message| InputError::Expression { expr: s.into(), message })
}

/// Target description: a builder expression or an explicit moment graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Point {
        torus_rank: usize,
    },
    ProjectiveSpace {
        n: usize,
        weights: Vec<Character>,
    },
    Product {
        factors: Vec<TargetSpec>,
    },
    /// `summands[i][p]` is the weight of `L_i` at the base fixed point `p`.
    ProjectiveBundle {
        base: Box<TargetSpec>,
        summands: Vec<Vec<Character>>,
    },
    Explicit {
        name: String,
        torus_rank: usize,
        points: Vec<String>,
        edges: Vec<EdgeSpec>,
        lattice_rank: usize,
        #[serde(default)]
        divisors: Vec<DivisorSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub ends: [usize; 2],
    /// Character at `ends[0]`.
    pub character: Character,
    pub class: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorSpec {
    pub name: String,
    /// Restrictions to the fixed points, as polynomials in `l1, l2, …`.
    pub restrictions: Vec<String>,
}

impl TargetSpec {
    pub fn build(&self) -> Result<GkmTarget, InputError> {
        Ok(match self {
            TargetSpec::Point { torus_rank } => point_target(*torus_rank),
            TargetSpec::ProjectiveSpace { n, weights } => projective_space(*n, weights.clone())?,
            TargetSpec::Product { factors } => {
                let mut it = factors.iter();
                let first = it.next().ok_or_else(|| GkmError::InvalidInput("a product needs at least one factor".into()))?;
                let mut t = first.build()?;
                for f in it {
                    t = product(&t, &f.build()?)?;
                }
                t
            }
            TargetSpec::ProjectiveBundle { base, summands } => {
                let base = base.build()?;
                let v = SplitBundle::new(summands.iter().map(|w| LineBundle::new(w.clone())).collect());
                projective_bundle(&base, &v)?
            }
            TargetSpec::Explicit { name, torus_rank, points, edges, lattice_rank, divisors } => {
                let edges = edges
                    .iter()
                    .map(|e| Edge { ends: e.ends, character: e.character.clone(), class: CurveClass(e.class.clone()) })
                    .collect();
                let mut named = Vec::new();
                for d in divisors {
                    let ps = d.restrictions.iter().map(|s| parse_polynomial(s)).collect::<Result<Vec<_>, _>>()?;
                    named.push(NamedClass { name: d.name.clone(), class: EquivariantClass::from_polynomials(ps) });
                }
                GkmTarget::new(name.clone(), *torus_rank, points.clone(), edges, *lattice_rank, named)?
            }
        })
    }
}

/// One entry of an insertion file: `{"class": "h^2", "psi": 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InsertionSpec {
    pub class: String,
    #[serde(default)]
    pub psi: u32,
}

pub fn build_insertions(target: &GkmTarget, specs: &[InsertionSpec]) -> Result<Vec<Insertion>, InputError> {
    specs.iter().map(|s| Ok(Insertion::with_psi(parse_class(target, &s.class)?, s.psi))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistSummandSpec {
    /// Fiber weight at each fixed point of the target.
    pub weights: Vec<Character>,
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistFile {
    pub summands: Vec<TwistSummandSpec>,
    #[serde(default = "default_euler")]
    pub euler: EulerMode,
    #[serde(default)]
    pub auxiliary_weight: bool,
}

fn default_euler() -> EulerMode {
    EulerMode::Inverse
}

impl TwistFile {
    pub fn build(&self) -> TwistSpec {
        TwistSpec {
            summands: self
                .summands
                .iter()
                .map(|s| TwistSummand { bundle: LineBundle::new(s.weights.clone()), orientation: s.orientation })
                .collect(),
            euler: self.euler,
            auxiliary_weight: self.auxiliary_weight,
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Io { path: path.display().to_string(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| InputError::Json(format!("{}: {e}", path.display())))
}

/// Canonical text of a built target (used for hashing).
pub fn canonical_target(t: &GkmTarget) -> String {
    let mut s = format!("torus {}\nlattice {}\n", t.torus_rank(), t.lattice_rank());
    for p in t.points() {
        s += &format!("point {p}\n");
    }
    for e in t.edges() {
        s += &format!("edge {} {} [{}] ({})\n", e.ends[0], e.ends[1], e.character, e.class);
    }
    for d in t.divisors() {
        s += &format!("class {} {}\n", d.name, canonical_class(&d.class));
    }
    s
}

pub fn canonical_class(c: &EquivariantClass) -> String {
    let parts: Vec<String> = c.restrictions().iter().map(RationalFunction::to_string).collect();
    format!("[{}]", parts.join("; "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> GkmTarget {
        projective_space(2, vec![Character::zero(), Character::basis(2, 0), Character::basis(2, 1)]).unwrap()
    }

    #[test]
    fn polynomials() {
        let p = parse_polynomial("(l1 - 2*l2)^2 / 2 + x").unwrap();
        assert_eq!(p.to_string(), parse_polynomial("l1^2/2 - 2*l1*l2 + 2*l2^2 + x").unwrap().to_string());
        assert!(parse_polynomial("l1 / l2").is_err());
        assert!(parse_polynomial("l0").is_err());
        assert!(parse_polynomial("(l1").is_err());
        assert!(parse_polynomial("l1 $").is_err());
    }

    #[test]
    fn classes() {
        let t = p2();
        let h = t.class_named("d1").unwrap();
        assert_eq!(parse_class(&t, "d1^2").unwrap(), h.mul(h));
        assert_eq!(parse_class(&t, "pt_2").unwrap(), t.delta(2));
        assert_eq!(parse_class(&t, "1").unwrap(), EquivariantClass::one(3));
        assert_eq!(parse_class(&t, "3/2*pt - pt").unwrap(), t.delta(0).scale(&crate::algebra::qq(1, 2)));
        assert_eq!(t.integrate(&parse_class(&t, "d1^2").unwrap()).unwrap(), RationalFunction::one());
        assert!(parse_class(&t, "h").is_err());
        assert!(parse_class(&t, "pt_3").is_err());
    }

    #[test]
    fn target_files() {
        let json = r#"{"builder": "projective_bundle",
            "base": {"builder": "projective_space", "n": 1, "weights": [[0], [1]]},
            "summands": [[[0, 1], [-1, 1]], [[0], [1]]]}"#;
        let spec: TargetSpec = serde_json::from_str(json).unwrap();
        let t = spec.build().unwrap();
        assert_eq!(t.num_points(), 4);
        assert!(t.validate().is_ok());
        let back: TargetSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let explicit = r#"{"builder": "explicit", "name": "P1", "torus_rank": 1, "points": ["a", "b"],
            "edges": [{"ends": [0, 1], "character": [1], "class": [1]}], "lattice_rank": 1,
            "divisors": [{"name": "d1", "restrictions": ["0", "-l1"]}]}"#;
        let t: TargetSpec = serde_json::from_str(explicit).unwrap();
        let t = t.build().unwrap();
        assert!(t.validate().is_ok());
        assert!(serde_json::from_str::<TargetSpec>(r#"{"builder": "torus"}"#).is_err());
    }
}
