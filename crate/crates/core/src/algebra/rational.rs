//! Rational functions whose denominators are products of linear forms.
//!
//! Every denominator that arises from localization is an Euler class of a sum of
//! weight spaces, so it factors into linear forms. Keeping it factored avoids
//! multivariate gcd entirely: cancellation is trial division by each factor.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::polynomial::{Monomial, Polynomial, Var};
use super::{AlgebraError, Q};

/// A non-constant affine form normalised so the coefficient of its first variable is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    coeffs: BTreeMap<usize, Q>,
    constant: Q,
}

/// Result of normalising a degree-≤1 polynomial.
pub enum Normalized {
    Constant(Q),
    Form(Q, LinearForm),
}

impl LinearForm {
    /// Splits `p = scale · form`; fails if `p` has degree above one.
    pub fn normalize(p: &Polynomial) -> Result<Normalized, AlgebraError> {
        let mut coeffs = BTreeMap::new();
        let mut constant = Q::zero();
        for (m, c) in p.terms() {
            match m.degree() {
                0 => constant = c.clone(),
                1 => {
                    let (i, _) = m.support().next().unwrap();
                    coeffs.insert(i, c.clone());
                }
                _ => return Err(AlgebraError::NotLinear(p.to_string())),
            }
        }
        let Some((_, lead)) = coeffs.iter().next() else {
            return Ok(Normalized::Constant(constant));
        };
        let lead = lead.clone();
        for v in coeffs.values_mut() {
            *v = &*v / &lead;
        }
        Ok(Normalized::Form(lead.clone(), LinearForm { coeffs, constant: constant / lead }))
    }

    pub fn var(v: Var) -> LinearForm {
        LinearForm { coeffs: BTreeMap::from([(v.index(), Q::one())]), constant: Q::zero() }
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let mut p = Polynomial::constant(self.constant.clone());
        for (&i, c) in &self.coeffs {
            p.add_term(Monomial::var(Var::from_index(i)), c.clone());
        }
        p
    }

    pub fn leading_var(&self) -> Var {
        Var::from_index(*self.coeffs.keys().next().expect("linear form has a variable"))
    }

    pub fn coefficient(&self, v: Var) -> Q {
        self.coeffs.get(&v.index()).cloned().unwrap_or_else(Q::zero)
    }

    pub fn involves(&self, v: Var) -> bool {
        self.coeffs.contains_key(&v.index())
    }

    /// `self = leading_var - root`; returns `root`.
    fn root(&self) -> Polynomial {
        let mut r = Polynomial::constant(-self.constant.clone());
        for (&i, c) in self.coeffs.iter().skip(1) {
            r.add_term(Monomial::var(Var::from_index(i)), -c.clone());
        }
        r
    }

    /// Exact quotient `p / self`, if it exists.
    pub fn divide(&self, p: &Polynomial) -> Option<Polynomial> {
        let lead = self.leading_var();
        if !p.involves(lead) {
            return if p.is_zero() { Some(Polynomial::zero()) } else { None };
        }
        p.div_by_root(lead, &self.root())
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_polynomial())
    }
}

/// `numerator / ∏ form^mult`, canonical: no denominator form divides the numerator,
/// and the zero function has an empty denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalFunction {
    num: Polynomial,
    den: BTreeMap<LinearForm, u32>,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction { num: Polynomial::zero(), den: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::from_polynomial(Polynomial::constant(c))
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(Q::from_integer(BigInt::from(n)))
    }

    pub fn var(v: Var) -> Self {
        Self::from_polynomial(Polynomial::var(v))
    }

    pub fn from_polynomial(num: Polynomial) -> Self {
        RationalFunction { num, den: BTreeMap::new() }
    }

    /// Builds `num / ∏ den` and cancels.
    pub fn from_parts(num: Polynomial, den: BTreeMap<LinearForm, u32>) -> Self {
        let mut r = RationalFunction { num, den };
        r.canonicalize();
        r
    }

    /// `1 / p` for a polynomial of degree ≤ 1.
    pub fn inverse_linear(p: &Polynomial) -> Result<Self, AlgebraError> {
        match LinearForm::normalize(p)? {
            Normalized::Constant(c) => {
                if c.is_zero() {
                    Err(AlgebraError::DivisionByZero)
                } else {
                    Ok(Self::constant(c.recip()))
                }
            }
            Normalized::Form(scale, form) => Ok(RationalFunction {
                num: Polynomial::constant(scale.recip()),
                den: BTreeMap::from([(form, 1)]),
            }),
        }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> impl Iterator<Item = (&LinearForm, u32)> {
        self.den.iter().map(|(f, &m)| (f, m))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.is_polynomial() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn involves(&self, v: Var) -> bool {
        self.num.involves(v) || self.den.keys().any(|f| f.involves(v))
    }

    /// Homogeneous degree (numerator degree minus denominator degree), when defined.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        if self.num.is_zero() {
            return None;
        }
        if self.den.keys().any(|f| !f.constant.is_zero()) {
            return None;
        }
        let d = self.num.homogeneous_degree()? as i64;
        Some(d - self.den.values().map(|&m| m as i64).sum::<i64>())
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let forms: Vec<LinearForm> = self.den.keys().cloned().collect();
        for f in forms {
            let mut mult = self.den[&f];
            while mult > 0 {
                match f.divide(&self.num) {
                    Some(q) => {
                        self.num = q;
                        mult -= 1;
                    }
                    None => break,
                }
            }
            if mult == 0 {
                self.den.remove(&f);
            } else {
                self.den.insert(f, mult);
            }
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self, AlgebraError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = RationalFunction::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Inverse of a function whose numerator is a rational constant times a product
    /// of linear forms.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        if self.num.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let (scale, factors) = factor_linear_product(&self.num)?;
        let mut num = Polynomial::constant(scale.recip());
        for (f, &m) in &self.den {
            num = &num * &f.to_polynomial().pow(m);
        }
        Ok(RationalFunction::from_parts(num, factors))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Exact value at a point; `value(v)` must cover every variable present.
    pub fn evaluate(&self, value: &dyn Fn(Var) -> Option<Q>) -> Result<Q, AlgebraError> {
        let mut d = Q::one();
        for (f, &m) in &self.den {
            let v = f.to_polynomial().evaluate(value).ok_or(AlgebraError::MissingValue)?;
            if v.is_zero() {
                return Err(AlgebraError::PoleAtPoint(f.to_string()));
            }
            d *= num_traits::pow(v, m as usize);
        }
        let n = self.num.evaluate(value).ok_or(AlgebraError::MissingValue)?;
        Ok(n / d)
    }

    /// Substitutes rational values for some variables, keeping the rest symbolic.
    pub fn substitute_values(&self, values: &[(Var, Q)]) -> Result<Self, AlgebraError> {
        let mut num = self.num.substitute_values(values);
        let mut den = BTreeMap::new();
        for (f, &m) in &self.den {
            let p = f.to_polynomial().substitute_values(values);
            match LinearForm::normalize(&p)? {
                Normalized::Constant(c) => {
                    if c.is_zero() {
                        return Err(AlgebraError::PoleAtPoint(f.to_string()));
                    }
                    num = num.scale(&num_traits::pow(c.recip(), m as usize));
                }
                Normalized::Form(s, g) => {
                    num = num.scale(&num_traits::pow(s.recip(), m as usize));
                    *den.entry(g).or_insert(0) += m;
                }
            }
        }
        Ok(RationalFunction::from_parts(num, den))
    }

    /// Substitutes a polynomial of degree ≤ 1 for `v`.
    pub fn substitute_linear(&self, v: Var, by: &Polynomial) -> Result<Self, AlgebraError> {
        let mut num = self.num.substitute(v, by);
        let mut den = BTreeMap::new();
        for (f, &m) in &self.den {
            let p = f.to_polynomial().substitute(v, by);
            match LinearForm::normalize(&p)? {
                Normalized::Constant(c) => {
                    if c.is_zero() {
                        return Err(AlgebraError::PoleAtPoint(f.to_string()));
                    }
                    num = num.scale(&num_traits::pow(c.recip(), m as usize));
                }
                Normalized::Form(s, g) => {
                    num = num.scale(&num_traits::pow(s.recip(), m as usize));
                    *den.entry(g).or_insert(0) += m;
                }
            }
        }
        Ok(RationalFunction::from_parts(num, den))
    }

    /// The limit `v → 0`, which exists exactly when no surviving denominator factor
    /// is `v` itself.
    pub fn limit_at_zero(&self, v: Var) -> Result<Self, AlgebraError> {
        if self.den.contains_key(&LinearForm::var(v)) {
            return Err(AlgebraError::NoLimit(v.name()));
        }
        self.substitute_values(&[(v, Q::zero())])
    }

    /// Principal part at the zero of `pole` (a form with leading variable `v`):
    /// `Σ_{j≥1} c_j / pole^j` with `c_j` free of `v`.
    pub fn principal_part(&self, pole: &LinearForm) -> Result<Self, AlgebraError> {
        let Some(&m) = self.den.get(pole) else {
            return Ok(Self::zero());
        };
        let v = pole.leading_var();
        let t = Var::Scratch;
        // v = root + t
        let shift = &pole.root() + &Polynomial::var(t);
        let mut rest = self.clone();
        rest.den.remove(pole);
        let n = rest.num.substitute(v, &shift);
        let order = m as usize;
        let ncoef = n.coefficients_in(t);
        let mut series: Vec<RationalFunction> = (0..order)
            .map(|j| ncoef.get(j).cloned().map(RationalFunction::from_polynomial).unwrap_or_default())
            .collect();
        for (f, &e) in &rest.den {
            let p = f.to_polynomial().substitute(v, &shift);
            let slope = p.coefficients_in(t).get(1).cloned().unwrap_or_default();
            let slope = slope.as_constant().ok_or_else(|| AlgebraError::NotLinear(p.to_string()))?;
            let base = p.substitute_values(&[(t, Q::zero())]);
            let inv_base = RationalFunction::inverse_linear(&base)?;
            // 1/(base + slope t) = Σ_k (-slope)^k t^k / base^{k+1}
            let mut factor = Vec::with_capacity(order);
            let mut term = inv_base.clone();
            let ratio = inv_base.scale(&-slope.clone());
            for _ in 0..order {
                factor.push(term.clone());
                term = &term * &ratio;
            }
            for _ in 0..e {
                series = truncated_product(&series, &factor, order);
            }
        }
        let mut out = RationalFunction::zero();
        for (j, c) in series.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let power = (m as usize - j) as u32;
            let mut den = c.den.clone();
            *den.entry(pole.clone()).or_insert(0) += power;
            out = &out + &RationalFunction::from_parts(c.num, den);
        }
        Ok(out)
    }

    /// Denominator forms that involve `v`, with multiplicities.
    pub fn poles_in(&self, v: Var) -> Vec<(LinearForm, u32)> {
        self.den.iter().filter(|(f, _)| f.involves(v)).map(|(f, &m)| (f.clone(), m)).collect()
    }

    /// True when, as a function of `v`, the numerator degree is below the denominator degree.
    pub fn vanishes_at_infinity(&self, v: Var) -> bool {
        let dd: u32 = self.den.iter().filter(|(f, _)| f.involves(v)).map(|(_, &m)| m).sum();
        self.num.is_zero() || (self.num.degree_in(v) as u32) < dd
    }
}

fn truncated_product(a: &[RationalFunction], b: &[RationalFunction], order: usize) -> Vec<RationalFunction> {
    let mut out = vec![RationalFunction::zero(); order];
    for i in 0..order {
        for j in 0..(order - i) {
            if a[i].is_zero() || b[j].is_zero() {
                continue;
            }
            out[i + j] = &out[i + j] + &(&a[i] * &b[j]);
        }
    }
    out
}

fn merge_den(a: &BTreeMap<LinearForm, u32>, b: &BTreeMap<LinearForm, u32>) -> BTreeMap<LinearForm, u32> {
    let mut out = a.clone();
    for (f, &m) in b {
        *out.entry(f.clone()).or_insert(0) += m;
    }
    out
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunction::from_parts(&self.num + &rhs.num, self.den.clone());
        }
        let mut den = self.den.clone();
        for (f, &m) in &rhs.den {
            let e = den.entry(f.clone()).or_insert(0);
            *e = (*e).max(m);
        }
        let lift = |r: &RationalFunction| {
            let mut n = r.num.clone();
            for (f, &m) in &den {
                let have = r.den.get(f).copied().unwrap_or(0);
                if m > have {
                    n = &n * &f.to_polynomial().pow(m - have);
                }
            }
            n
        };
        let num = &lift(self) + &lift(rhs);
        RationalFunction::from_parts(num, den)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction::from_parts(&self.num * &rhs.num, merge_den(&self.den, &rhs.den))
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        RationalFunction::from_polynomial(p)
    }
}

/// Canonical text: `N` or `(N)/((L1)^a*(L2))`.
impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let (_, c) = self.num.terms().next().unwrap();
        if self.num.num_terms() == 1 && !c.is_negative() && c.is_integer() {
            write!(f, "{}/", self.num)?;
        } else {
            write!(f, "({})/", self.num)?;
        }
        let parts: Vec<String> = self
            .den
            .iter()
            .map(|(l, &m)| if m == 1 { format!("({l})") } else { format!("({l})^{m}") })
            .collect();
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join("*"))
        }
    }
}

/// Writes `p = scale · ∏ form^mult`, or fails with `NotLinearProduct`.
///
/// Candidate factors come from the rational roots of `p` along a few generic
/// lines in the variable being eliminated; every candidate is confirmed by exact
/// division, so the result is always exact.
pub fn factor_linear_product(p: &Polynomial) -> Result<(Q, BTreeMap<LinearForm, u32>), AlgebraError> {
    let mut rest = p.clone();
    let mut factors: BTreeMap<LinearForm, u32> = BTreeMap::new();
    'outer: loop {
        if let Some(c) = rest.as_constant() {
            if c.is_zero() {
                return Err(AlgebraError::DivisionByZero);
            }
            return Ok((c, factors));
        }
        if rest.total_degree() == Some(1) {
            if let Normalized::Form(s, f) = LinearForm::normalize(&rest)? {
                *factors.entry(f).or_insert(0) += 1;
                return Ok((s, factors));
            }
        }
        let vars = rest.vars();
        for &v in &vars {
            let others: Vec<Var> = vars.iter().copied().filter(|&w| w != v).collect();
            if let Some(form) = find_linear_factor(&rest, v, &others) {
                rest = form.divide(&rest).expect("candidate confirmed by division");
                *factors.entry(form).or_insert(0) += 1;
                continue 'outer;
            }
        }
        return Err(AlgebraError::NotLinearProduct(p.to_string()));
    }
}

const PROBE: [i64; 8] = [3, 7, 13, 19, 29, 37, 43, 53];

fn find_linear_factor(p: &Polynomial, v: Var, others: &[Var]) -> Option<LinearForm> {
    let base: Vec<(Var, Q)> =
        others.iter().enumerate().map(|(i, &w)| (w, Q::from_integer(BigInt::from(PROBE[i % PROBE.len()] + i as i64)))).collect();
    let roots0 = rational_roots(&p.substitute_values(&base), v)?;
    // shifted probes: one per other variable
    let mut shifted_roots = Vec::with_capacity(others.len());
    for (i, _) in others.iter().enumerate() {
        let mut pt = base.clone();
        pt[i].1 += Q::one();
        shifted_roots.push(rational_roots(&p.substitute_values(&pt), v)?);
    }
    for r0 in &roots0 {
        // slopes: candidate coefficient of each other variable in the root
        let candidates: Vec<Vec<Q>> = shifted_roots.iter().map(|rs| rs.iter().map(|r| r - r0).collect()).collect();
        let mut idx = vec![0usize; others.len()];
        loop {
            // root(v) = r0 + Σ s_i (w_i - base_i)
            let mut root = Polynomial::constant(r0.clone());
            for (i, &w) in others.iter().enumerate() {
                let s = &candidates[i][idx[i]];
                root.add_term(Monomial::var(w), s.clone());
                root.add_term(Monomial::one(), -(s * &base[i].1));
            }
            let lin = &Polynomial::var(v) - &root;
            if let Ok(Normalized::Form(_, f)) = LinearForm::normalize(&lin) {
                if f.divide(p).is_some() {
                    return Some(f);
                }
            }
            // odometer
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < candidates[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    None
}

/// Distinct rational roots in `v` of a univariate polynomial (None if it is constant).
fn rational_roots(p: &Polynomial, v: Var) -> Option<Vec<Q>> {
    use num_integer::Integer;
    let coeffs = p.coefficients_in(v);
    if coeffs.len() < 2 {
        return None;
    }
    let vals: Vec<Q> = coeffs.iter().map(|c| c.as_constant().unwrap_or_else(Q::zero)).collect();
    let mut lcm = BigInt::one();
    for c in &vals {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = vals.iter().map(|c| (c * Q::from_integer(lcm.clone())).to_integer()).collect();
    let mut roots = Vec::new();
    let low = ints.iter().position(|c| !c.is_zero())?;
    if low > 0 {
        roots.push(Q::zero());
    }
    let a0 = ints[low].abs();
    let an = ints.last()?.abs();
    let da = small_divisors(&a0)?;
    let dn = small_divisors(&an)?;
    for num in &da {
        for den in &dn {
            for sign in [1i64, -1] {
                let r = Q::new(num * BigInt::from(sign), den.clone());
                let mut acc = Q::zero();
                for c in vals.iter().rev() {
                    acc = acc * &r + c;
                }
                if acc.is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    Some(roots)
}

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    use num_traits::ToPrimitive;
    let n = n.to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}
