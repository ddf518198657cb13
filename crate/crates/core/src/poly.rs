//! Sparse multivariate Laurent polynomials with rational coefficients.
//!
//! Variables are indices; names live in a [`VarNames`] table owned by the
//! caller. Negative exponents are allowed so that parameters such as `M/K`
//! stay exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::scalar::parse_rational;

/// Exponent vector; trailing zeros are trimmed so equal monomials compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[i32; 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(i: usize, exp: i32) -> Self {
        let mut v = SmallVec::from_elem(0, i + 1);
        v[i] = exp;
        Monomial(v).trimmed()
    }

    pub fn from_exponents(exps: &[i32]) -> Self {
        Monomial(SmallVec::from_slice(exps)).trimmed()
    }

    pub fn exponent(&self, i: usize) -> i32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    fn trimmed(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    fn with_exponent(&self, i: usize, exp: i32) -> Self {
        let mut v = self.0.clone();
        if v.len() <= i {
            v.resize(i + 1, 0);
        }
        v[i] = exp;
        Monomial(v).trimmed()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        Monomial(
            (0..n)
                .map(|i| self.exponent(i) + other.exponent(i))
                .collect(),
        )
        .trimmed()
    }

    fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }
}

#[derive(Clone, Default, PartialEq, Eq)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn constant(c: BigRational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn term(c: BigRational, mono: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        Polynomial { terms }
    }

    /// The variable with index `i`.
    pub fn var(i: usize) -> Self {
        Self::term(BigRational::one(), Monomial::var(i, 1))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// The single term, if there is exactly one.
    pub fn as_monomial(&self) -> Option<(&Monomial, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, mono: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(mono).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// `∂/∂v_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e != 0 {
                out.add_term(
                    m.with_exponent(i, e - 1),
                    c * BigRational::from_integer(e.into()),
                );
            }
        }
        out
    }

    /// Exact power; negative exponents need a single-term polynomial.
    pub fn powi(&self, exp: i32) -> Option<Self> {
        if exp < 0 {
            let (m, c) = self.as_monomial()?;
            let inv = Polynomial::term(c.recip(), m.inverse());
            return inv.powi(-exp);
        }
        let mut out = Self::one();
        for _ in 0..exp {
            out = &out * self;
        }
        Some(out)
    }

    /// Replaces `v_i` by `value`. Fails only when `v_i` appears with a
    /// negative exponent and `value` is not a single term.
    pub fn substitute(&self, i: usize, value: &Polynomial) -> Option<Self> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            let rest = Polynomial::term(c.clone(), m.with_exponent(i, 0));
            out = &out + &(&rest * &value.powi(e)?);
        }
        Some(out)
    }

    /// Multiplies by `c · mono^{-1}`; exact division by a single term.
    pub fn div_term(&self, mono: &Monomial, c: &BigRational) -> Self {
        let inv = mono.inverse();
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.times(&inv), v / c))
                .collect(),
        }
    }

    /// Coefficients of `v_i^k` as polynomials in the other variables.
    pub fn coefficients_in(&self, i: usize) -> BTreeMap<i32, Polynomial> {
        let mut out: BTreeMap<i32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exponent(i))
                .or_default()
                .add_term(m.with_exponent(i, 0), c.clone());
        }
        out
    }

    /// Largest variable index that appears, plus one.
    /// Re-expresses `self`, written over `from`, in the variables of `to`,
    /// matching by name and interning names `to` lacks.
    pub fn rename(&self, from: &VarNames, to: &mut VarNames) -> Self {
        let mut out = Polynomial::zero();
        for (mono, c) in &self.terms {
            let mut exps: Vec<i32> = Vec::new();
            for (i, &e) in mono.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let j = to.intern(&from.name(i));
                if exps.len() <= j {
                    exps.resize(j + 1, 0);
                }
                exps[j] += e;
            }
            out = out + Polynomial::term(c.clone(), Monomial::from_exponents(&exps));
        }
        out
    }

    pub fn arity(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = c.to_f64().unwrap_or(f64::NAN);
                for (i, &e) in m.0.iter().enumerate() {
                    if e != 0 {
                        v *= point[i].powi(e);
                    }
                }
                v
            })
            .sum()
    }

    /// Exact evaluation; `None` if a negative power hits a zero value.
    pub fn eval_rational(&self, point: &[BigRational]) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if e < 0 && point[i].is_zero() {
                    return None;
                }
                v *= num_traits::pow::pow(point[i].clone(), e.unsigned_abs() as usize).pow_sign(e);
            }
            acc += v;
        }
        Some(acc)
    }

    pub fn display<'a>(&'a self, names: &'a VarNames) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, names }
    }

    pub fn parse(text: &str, names: &mut VarNames) -> Result<Self, String> {
        let tokens = tokenize(text)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            names,
        };
        let out = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(format!("unexpected `{}`", p.tokens[p.pos]));
        }
        Ok(out)
    }
}

trait PowSign {
    fn pow_sign(self, e: i32) -> Self;
}

impl PowSign for BigRational {
    fn pow_sign(self, e: i32) -> Self {
        if e < 0 {
            self.recip()
        } else {
            self
        }
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(&VarNames::default()))
    }
}

impl Zero for Polynomial {
    fn zero() -> Self {
        Polynomial::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Polynomial {
    fn one() -> Self {
        Polynomial::constant(BigRational::one())
    }
}

impl FromPrimitive for Polynomial {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Polynomial::constant(BigRational::from_integer(n.into())))
    }

    fn from_u64(n: u64) -> Option<Self> {
        Some(Polynomial::constant(BigRational::from_integer(n.into())))
    }

    fn from_f64(n: f64) -> Option<Self> {
        BigRational::from_float(n).map(Polynomial::constant)
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

/// Names of polynomial variables, by index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarNames(Vec<String>);

impl VarNames {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        VarNames(names.iter().map(|s| s.as_ref().to_string()).collect())
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// Index of `name`, appending it if new.
    pub fn intern(&mut self, name: &str) -> usize {
        match self.index(name) {
            Some(i) => i,
            None => {
                self.0.push(name.to_string());
                self.0.len() - 1
            }
        }
    }

    pub fn name(&self, i: usize) -> String {
        self.0.get(i).cloned().unwrap_or_else(|| format!("v{i}"))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a VarNames,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.terms.is_empty() {
            return f.write_str("0");
        }
        // constant first, then by total degree
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by_key(|(m, _)| (m.0.iter().map(|e| e.abs()).sum::<i32>(), (*m).clone()));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let vars: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e != 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            self.names.name(i)
                        } else {
                            format!("{}^{}", self.names.name(i), e)
                        }
                    })
                    .collect();
            let coef = if mag.is_integer() {
                mag.numer().to_string()
            } else {
                format!("{}/{}", mag.numer(), mag.denom())
            };
            if vars.is_empty() {
                f.write_str(&coef)?;
            } else if mag.is_one() {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "{}*{}", coef, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

fn tokenize(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if "+-*/^()".contains(ch) {
            out.push(ch.to_string());
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else {
            return Err(format!("unexpected character `{ch}`"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<String>,
    pos: usize,
    names: &'a mut VarNames,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(|s| s.as_str())
    }

    fn next(&mut self) -> Option<String> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Polynomial, String> {
        let mut acc = match self.peek() {
            Some("-") => {
                self.pos += 1;
                -self.term()?
            }
            Some("+") => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(op) = self.peek() {
            match op {
                "+" => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                "-" => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, String> {
        let mut acc = self.power()?;
        while let Some(op) = self.peek() {
            match op {
                "*" => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                "/" => {
                    self.pos += 1;
                    let divisor = self.power()?;
                    let inv = divisor
                        .powi(-1)
                        .ok_or_else(|| "division by a non-monomial".to_string())?;
                    if divisor.is_zero() {
                        return Err("division by zero".into());
                    }
                    acc = &acc * &inv;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial, String> {
        let base = self.atom()?;
        if self.peek() == Some("^") {
            self.pos += 1;
            let negative = self.peek() == Some("-");
            if negative {
                self.pos += 1;
            }
            let e: i32 = self
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| "expected integer exponent".to_string())?;
            return base
                .powi(if negative { -e } else { e })
                .ok_or_else(|| "negative power of a non-monomial".to_string());
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, String> {
        let tok = self
            .next()
            .ok_or_else(|| "unexpected end of expression".to_string())?;
        if tok == "(" {
            let inner = self.expr()?;
            if self.next().as_deref() != Some(")") {
                return Err("missing `)`".into());
            }
            return Ok(inner);
        }
        if tok == "-" {
            return Ok(-self.power()?);
        }
        if tok.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
            let v = parse_rational(&tok).ok_or_else(|| format!("bad number `{tok}`"))?;
            return Ok(Polynomial::constant(v));
        }
        if tok.starts_with(|c: char| c.is_alphabetic() || c == '_') {
            let i = self.names.intern(&tok);
            return Ok(Polynomial::var(i));
        }
        Err(format!("unexpected `{tok}`"))
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn rename_by_name() {
        let mut a = VarNames::new(&["z", "K", "M"]);
        let p = Polynomial::parse("M/K*z^2 + 3*K", &mut a).unwrap();
        let mut b = VarNames::new(&["K", "M"]);
        let q = p.rename(&a, &mut b);
        assert_eq!(b.index("z"), Some(2));
        assert_eq!(q, Polynomial::parse("M/K*z^2 + 3*K", &mut b).unwrap());
    }

    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ring_basics() {
        let x = Polynomial::var(0);
        let y = Polynomial::var(1);
        let p = &(&x + &y) * &(&x - &y);
        let expected = &(&x * &x) - &(&y * &y);
        assert_eq!(p, expected);
        assert!((&p - &expected).is_zero());
        assert_eq!(Polynomial::from_i64(0).unwrap(), Polynomial::zero());
    }

    #[test]
    fn parse_display_round_trip() {
        let mut names = VarNames::new(&["z", "K", "M"]);
        let p = Polynomial::parse("M/K*(z^2 - z^3) - 3/2", &mut names).unwrap();
        assert_eq!(names.len(), 3);
        let shown = p.display(&names).to_string();
        let again = Polynomial::parse(&shown, &mut names).unwrap();
        assert_eq!(again, p);
        assert!(Polynomial::parse("z/(z+1)", &mut names).is_err());
        assert!(Polynomial::parse("z +", &mut names).is_err());
        assert!(Polynomial::parse("2^", &mut names).is_err());
    }

    #[test]
    fn calculus() {
        let mut names = VarNames::new(&["z", "K"]);
        let p = Polynomial::parse("z^3*K^-1 + 2*z", &mut names).unwrap();
        let dp = p.derivative(0);
        assert_eq!(dp, Polynomial::parse("3*z^2/K + 2", &mut names).unwrap());
        let at_k = p.substitute(0, &Polynomial::var(1)).unwrap();
        assert_eq!(at_k, Polynomial::parse("K^2 + 2*K", &mut names).unwrap());
        assert_eq!(p.eval_f64(&[2.0, 4.0]), 6.0);
        assert_eq!(p.eval_rational(&[q(2, 1), q(4, 1)]), Some(q(6, 1)));
        let by_z = p.coefficients_in(0);
        assert_eq!(by_z[&1], Polynomial::from_i64(2).unwrap());
    }
}
