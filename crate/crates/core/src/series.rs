//! Truncated multivariate power series in the theorem parameters `a, b, c, d`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::Rational;
use crate::error::{Error, Result};

/// Ring operations needed from series coefficients.
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, r: &Rational) -> Self;
}

impl Coefficient for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamVar {
    A,
    B,
    C,
    D,
}

impl ParamVar {
    pub const ALL: [ParamVar; 4] = [ParamVar::A, ParamVar::B, ParamVar::C, ParamVar::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> char {
        ['a', 'b', 'c', 'd'][self.index()]
    }

    pub fn from_name(c: char) -> Option<ParamVar> {
        match c {
            'a' => Some(ParamVar::A),
            'b' => Some(ParamVar::B),
            'c' => Some(ParamVar::C),
            'd' => Some(ParamVar::D),
            _ => None,
        }
    }
}

/// Exponent vector over `a, b, c, d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial([u8; 4]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; 4])
    }

    pub fn new(a: u8, b: u8, c: u8, d: u8) -> Self {
        Monomial([a, b, c, d])
    }

    pub fn var(v: ParamVar) -> Self {
        let mut e = [0; 4];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn exponent(&self, v: ParamVar) -> u8 {
        self.0[v.index()]
    }

    pub fn exponents(&self) -> [u8; 4] {
        self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (x, y) in e.iter_mut().zip(other.0) {
            *x += y;
        }
        Monomial(e)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0).all(|(x, y)| *x <= y)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let mut e = other.0;
        for (x, y) in e.iter_mut().zip(self.0) {
            *x -= y;
        }
        Some(Monomial(e))
    }

    /// Display form like `a²bc` used in summaries and LaTeX.
    pub fn pretty(&self) -> String {
        const SUP: [&str; 10] = ["⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"];
        let mut s = String::new();
        for v in ParamVar::ALL {
            let e = self.exponent(v);
            if e > 0 {
                s.push(v.name());
                if e > 1 {
                    s.push_str(SUP[e as usize % 10]);
                }
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }

    /// All monomials in the variables `vars` of total degree at most `n`.
    pub fn all_up_to(vars: &[ParamVar], n: u32) -> Vec<Monomial> {
        let mut out = vec![Monomial::one()];
        for &v in vars {
            let mut next = Vec::new();
            for m in &out {
                for e in 0..=(n - m.degree()) {
                    let mut x = *m;
                    x.0[v.index()] = e as u8;
                    next.push(x);
                }
            }
            out = next;
        }
        out.sort();
        out
    }
}

/// Canonical key form: `a1b2`, zero exponents omitted, `1` for the constant.
impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return f.write_str("1");
        }
        for v in ParamVar::ALL {
            let e = self.exponent(v);
            if e > 0 {
                write!(f, "{}{}", v.name(), e)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("monomial {s:?}"));
        if s == "1" {
            return Ok(Monomial::one());
        }
        let mut e = [0u8; 4];
        let mut chars = s.chars().peekable();
        if chars.peek().is_none() {
            return Err(bad());
        }
        while let Some(c) = chars.next() {
            let v = ParamVar::from_name(c).ok_or_else(bad)?;
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let n: u8 = if digits.is_empty() {
                1
            } else {
                digits.parse().map_err(|_| bad())?
            };
            e[v.index()] = e[v.index()].checked_add(n).ok_or_else(bad)?;
        }
        Ok(Monomial(e))
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Homogeneous linear form `Σ c_v · v` in the parameters.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearForm([Rational; 4]);

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn var(v: ParamVar) -> Self {
        Self::term(v, Rational::one())
    }

    pub fn term(v: ParamVar, c: Rational) -> Self {
        let mut f = Self::zero();
        f.0[v.index()] = c;
        f
    }

    pub fn from_coeffs(coeffs: [Rational; 4]) -> Self {
        LinearForm(coeffs)
    }

    pub fn coeff(&self, v: ParamVar) -> &Rational {
        &self.0[v.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    pub fn plus(&self, other: &LinearForm) -> LinearForm {
        let mut f = self.clone();
        for (x, y) in f.0.iter_mut().zip(&other.0) {
            *x += y;
        }
        f
    }

    pub fn scaled(&self, r: &Rational) -> LinearForm {
        LinearForm(self.0.clone().map(|c| c * r))
    }

    pub fn eval(&self, params: &ParamValues) -> Rational {
        ParamVar::ALL
            .iter()
            .map(|&v| self.coeff(v) * params.get(v))
            .sum()
    }

    pub fn vars(&self) -> Vec<ParamVar> {
        ParamVar::ALL
            .into_iter()
            .filter(|v| !self.coeff(*v).is_zero())
            .collect()
    }

    /// The form as a degree-1 series with coefficients `C::one()` scaled.
    pub fn to_series<C: Coefficient>(&self, degree: u32) -> TruncatedSeries<C> {
        let mut s = TruncatedSeries::zero(degree);
        if degree == 0 {
            return s;
        }
        for v in ParamVar::ALL {
            let c = self.coeff(v);
            if !c.is_zero() {
                s.insert(Monomial::var(v), C::one().scale(c));
            }
        }
        s
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in ParamVar::ALL {
            let c = self.coeff(v);
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            if a.is_one() {
                write!(f, "{}", v.name())?;
            } else {
                write!(f, "{a}{}", v.name())?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Rational values assigned to the parameters (unassigned ones are zero).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamValues([Rational; 4]);

impl ParamValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, v: ParamVar, x: Rational) -> Self {
        self.0[v.index()] = x;
        self
    }

    pub fn get(&self, v: ParamVar) -> &Rational {
        &self.0[v.index()]
    }

    pub fn monomial_value(&self, m: &Monomial) -> Rational {
        ParamVar::ALL
            .iter()
            .map(|&v| self.get(v).pow(m.exponent(v) as i32))
            .product()
    }
}

/// Multivariate power series truncated at total degree `degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<C> {
    degree: u32,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> TruncatedSeries<C> {
    pub fn zero(degree: u32) -> Self {
        TruncatedSeries {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(degree: u32) -> Self {
        Self::constant(C::one(), degree)
    }

    pub fn constant(c: C, degree: u32) -> Self {
        let mut s = Self::zero(degree);
        s.insert(Monomial::one(), c);
        s
    }

    pub fn monomial(m: Monomial, c: C, degree: u32) -> Self {
        let mut s = Self::zero(degree);
        s.insert(m, c);
        s
    }

    pub fn from_terms(degree: u32, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut s = Self::zero(degree);
        for (m, c) in terms {
            s.insert(m, c);
        }
        s
    }

    /// Adds `c` at `m`; terms above the truncation degree are dropped.
    pub fn insert(&mut self, m: Monomial, c: C) {
        if m.degree() > self.degree || c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::from(-1))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::from_terms(
            self.degree,
            self.terms.iter().map(|(m, c)| (*m, c.scale(r))),
        )
    }

    /// Multiplies every coefficient by the ring element `c`.
    pub fn scale_by(&self, c: &C) -> Self {
        Self::from_terms(self.degree, self.terms.iter().map(|(m, x)| (*m, x.mul(c))))
    }

    /// Multiplies by `c · m`, discarding anything pushed past the truncation degree.
    pub fn mul_monomial(&self, m: &Monomial, c: &C) -> Self {
        Self::from_terms(
            self.degree,
            self.terms.iter().map(|(n, x)| (n.mul(m), x.mul(c))),
        )
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.degree);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if m1.degree() + m2.degree() <= self.degree {
                    out.insert(m1.mul(m2), c1.mul(c2));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(self.degree);
        for _ in 0..n {
            out = out.mul(self).expect("same degree");
        }
        out
    }

    /// `Σ_{m=0}^{N} s^m / m!` for a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if self.terms.contains_key(&Monomial::one()) {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut out = Self::one(self.degree);
        let mut power = Self::one(self.degree);
        for m in 1..=self.degree {
            power = power.mul(self)?.scale(&Rational::new(1, m));
            if power.is_empty() {
                break;
            }
            out = out.add(&power)?;
        }
        Ok(out)
    }

    pub fn coeff(&self, m: &Monomial) -> Result<C> {
        if m.degree() > self.degree {
            return Err(Error::DegreeOutOfRange {
                monomial: m.to_string(),
                degree: self.degree,
            });
        }
        Ok(self.terms.get(m).cloned().unwrap_or_else(C::zero))
    }

    /// Re-truncates at a lower degree.
    pub fn truncate(&self, degree: u32) -> Self {
        Self::from_terms(degree, self.terms.iter().map(|(m, c)| (*m, c.clone())))
    }

    /// Substitutes a linear form for the series variable of a univariate
    /// series `Σ c_j x^j`, given as its coefficient list.
    pub fn compose_linear(coeffs: &[C], form: &LinearForm, degree: u32) -> Self {
        let base = form.to_series::<Rational>(degree);
        let mut out = Self::zero(degree);
        let mut power = TruncatedSeries::<Rational>::one(degree);
        for (j, c) in coeffs.iter().enumerate() {
            if j as u32 > degree {
                break;
            }
            if j > 0 {
                power = power.mul(&base).expect("same degree");
            }
            if c.is_zero() {
                continue;
            }
            for (m, r) in power.terms() {
                out.insert(*m, c.scale(r));
            }
        }
        out
    }
}
