//! Sparse commutative polynomials over `Rational` in an ordered symbol set.
//!
//! Both the constant ring (`ZetaPoly`) and the harmonic-number ring
//! (`HarmonicPoly`) are instances of [`SymPoly`].

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::arith::Rational;
use crate::series::Coefficient;

/// A monomial: symbols in ascending order with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term<S>(Vec<(S, u32)>);

impl<S: Ord + Clone> Term<S> {
    pub fn one() -> Self {
        Term(Vec::new())
    }

    pub fn symbol(s: S) -> Self {
        Term(vec![(s, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (S, u32)>) -> Self {
        let mut map: BTreeMap<S, u32> = BTreeMap::new();
        for (s, e) in powers {
            *map.entry(s).or_default() += e;
        }
        Term(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn powers(&self) -> &[(S, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, s: &S) -> u32 {
        self.0
            .iter()
            .find(|(t, _)| t == s)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (&self.0[i], &other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0.clone(), a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Term(out)
    }

    /// Removes `count` powers of `s`; the caller guarantees they are present.
    pub fn without(&self, s: &S, count: u32) -> Self {
        Term(
            self.0
                .iter()
                .filter_map(|(t, e)| {
                    if t == s {
                        (*e > count).then(|| (t.clone(), e - count))
                    } else {
                        Some((t.clone(), *e))
                    }
                })
                .collect(),
        )
    }
}

/// Polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymPoly<S: Ord> {
    terms: BTreeMap<Term<S>, Rational>,
}

impl<S: Ord + Clone> Default for SymPoly<S> {
    fn default() -> Self {
        SymPoly {
            terms: BTreeMap::new(),
        }
    }
}

impl<S: Ord + Clone + Debug> SymPoly<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(Term::one(), c)
    }

    pub fn symbol(s: S) -> Self {
        Self::monomial(Term::symbol(s), Rational::one())
    }

    pub fn monomial(t: Term<S>, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(t, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Term<S>, Rational)>) -> Self {
        let mut p = Self::zero();
        for (t, c) in terms {
            p.add_term(t, c);
        }
        p
    }

    pub fn add_term(&mut self, t: Term<S>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(t) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term<S>, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, t: &Term<S>) -> Rational {
        self.terms.get(t).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Term::one())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::from(-1))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        SymPoly {
            terms: self.terms.iter().map(|(t, c)| (t.clone(), c * r)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (t1, c1) in &self.terms {
            for (t2, c2) in &other.terms {
                out.add_term(t1.mul(t2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(Rational::one());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Replaces every occurrence of symbol `s` by the polynomial `with`.
    pub fn substitute(&self, s: &S, with: &Self) -> Self {
        let mut out = Self::zero();
        for (t, c) in &self.terms {
            let e = t.exponent(s);
            if e == 0 {
                out.add_term(t.clone(), c.clone());
            } else {
                let rest = Self::monomial(t.without(s, e), c.clone());
                out = out.add(&rest.mul(&with.pow(e)));
            }
        }
        out
    }

    /// Positive gcd of all coefficients (zero for the zero polynomial).
    pub fn content(&self) -> Rational {
        self.terms
            .values()
            .fold(Rational::zero(), |acc, c| acc.gcd(c))
    }

    /// Largest exponent of `s` dividing every monomial.
    pub fn common_power(&self, s: &S) -> u32 {
        self.terms.keys().map(|t| t.exponent(s)).min().unwrap_or(0)
    }

    /// Divides every monomial by `s^count`; requires `count <= common_power(s)`.
    pub fn divide_power(&self, s: &S, count: u32) -> Self {
        debug_assert!(count <= self.common_power(s));
        SymPoly {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.without(s, count), c.clone()))
                .collect(),
        }
    }

    /// Maps every symbol through `f` and expands; `f` returns the replacement polynomial.
    pub fn map_symbols<T: Ord + Clone + Debug>(
        &self,
        mut f: impl FnMut(&S) -> SymPoly<T>,
    ) -> SymPoly<T> {
        let mut out = SymPoly::zero();
        for (t, c) in &self.terms {
            let mut acc = SymPoly::constant(c.clone());
            for (s, e) in t.powers() {
                acc = acc.mul(&f(s).pow(*e));
            }
            out = out.add(&acc);
        }
        out
    }

    pub fn symbols(&self) -> std::collections::BTreeSet<S> {
        self.terms
            .keys()
            .flat_map(|t| t.powers().iter().map(|(s, _)| s.clone()))
            .collect()
    }
}

/// Parses `+`, `-`, `*`, `^n`, parentheses, integer or `p/q` coefficients and
/// symbol names. `atom(name, e)` resolves `name^e` (with `e = 1` when absent).
/// Multiplication is explicit.
pub fn parse_poly<S: Ord + Clone + Debug>(
    text: &str,
    atom: impl Fn(&str, u32) -> Option<SymPoly<S>>,
) -> Option<SymPoly<S>> {
    let tokens: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        atom: &atom,
    };
    let p = parser.expr()?;
    (parser.pos == tokens.len()).then_some(p)
}

struct Parser<'a, F> {
    tokens: &'a [char],
    pos: usize,
    atom: &'a F,
}

impl<S, F> Parser<'_, F>
where
    S: Ord + Clone + Debug,
    F: Fn(&str, u32) -> Option<SymPoly<S>>,
{
    fn peek(&self) -> Option<char> {
        self.tokens.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Option<SymPoly<S>> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Some(acc);
            }
        }
    }

    fn term(&mut self) -> Option<SymPoly<S>> {
        let mut acc = self.power()?;
        while self.eat('*') {
            acc = acc.mul(&self.power()?);
        }
        Some(acc)
    }

    fn exponent(&mut self) -> Option<u32> {
        if self.eat('^') {
            u32::try_from(self.integer()?).ok()
        } else {
            Some(1)
        }
    }

    fn integer(&mut self) -> Option<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.tokens[start..self.pos]
            .iter()
            .collect::<String>()
            .parse()
            .ok()
    }

    fn power(&mut self) -> Option<SymPoly<S>> {
        match self.peek()? {
            '(' => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return None;
                }
                let e = self.exponent()?;
                Some(inner.pow(e))
            }
            c if c.is_ascii_digit() => {
                let n = self.integer()?;
                let mut r = Rational::from(num_bigint::BigInt::from(n));
                if self.eat('/') {
                    let d = self.integer()?;
                    if d == 0 {
                        return None;
                    }
                    r = r / Rational::from(num_bigint::BigInt::from(d));
                }
                let e = self.exponent()?;
                Some(SymPoly::constant(r.pow(e as i32)))
            }
            c if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.tokens[start..self.pos].iter().collect();
                let e = self.exponent()?;
                (self.atom)(&name, e)
            }
            _ => None,
        }
    }
}

impl<S: Ord + Clone + Debug> Coefficient for SymPoly<S> {
    fn zero() -> Self {
        SymPoly::zero()
    }
    fn one() -> Self {
        SymPoly::constant(Rational::one())
    }
    fn is_zero(&self) -> bool {
        SymPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        SymPoly::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        SymPoly::mul(self, other)
    }
    fn scale(&self, r: &Rational) -> Self {
        SymPoly::scale(self, r)
    }
}
