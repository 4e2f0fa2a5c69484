//! Generalized harmonic numbers as polynomial symbols, and the expansions of
//! the finite products `Π (1 + x/i)^{±1}` and `Π (1 + y/(2i-1))^{±1}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::poly::{parse_poly, SymPoly, Term};
use crate::series::{LinearForm, TruncatedSeries};

/// Largest order/degree covered by the expansion templates.
pub const MAX_TEMPLATE_DEGREE: u32 = 6;

/// `H_k^(r)`, `O_k^(r)`, their values at `k-1`, or `1/k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HarmonicSymbol {
    H(u32),
    O(u32),
    /// `H_{k-1}^(r)`
    HPrev(u32),
    /// `O_{k-1}^(r)`
    OPrev(u32),
    /// `1/k`
    KInv,
}

impl HarmonicSymbol {
    pub fn order(&self) -> u32 {
        match self {
            HarmonicSymbol::H(r)
            | HarmonicSymbol::O(r)
            | HarmonicSymbol::HPrev(r)
            | HarmonicSymbol::OPrev(r) => *r,
            HarmonicSymbol::KInv => 1,
        }
    }

    /// Exact value at summation index `k ≥ 1`.
    pub fn value(&self, k: u64) -> Rational {
        let power_sum = |n: u64, r: u32, odd: bool| -> Rational {
            (1..=n)
                .map(|j| {
                    let base = if odd { 2 * j - 1 } else { j };
                    Rational::new(1, base as i64).pow(r as i32)
                })
                .sum()
        };
        match *self {
            HarmonicSymbol::H(r) => power_sum(k, r, false),
            HarmonicSymbol::O(r) => power_sum(k, r, true),
            HarmonicSymbol::HPrev(r) => power_sum(k - 1, r, false),
            HarmonicSymbol::OPrev(r) => power_sum(k - 1, r, true),
            HarmonicSymbol::KInv => Rational::new(1, k as i64),
        }
    }

    fn suffix(r: u32) -> String {
        if r == 1 {
            String::new()
        } else {
            r.to_string()
        }
    }

    /// LaTeX form, e.g. `H_{k-1}^{(2)}`.
    pub fn latex(&self) -> String {
        let sup = |r: u32| {
            if r == 1 {
                String::new()
            } else {
                format!("^{{({r})}}")
            }
        };
        match *self {
            HarmonicSymbol::H(r) => format!("H_k{}", sup(r)),
            HarmonicSymbol::O(r) => format!("O_k{}", sup(r)),
            HarmonicSymbol::HPrev(r) => format!("H_{{k-1}}{}", sup(r)),
            HarmonicSymbol::OPrev(r) => format!("O_{{k-1}}{}", sup(r)),
            HarmonicSymbol::KInv => "\\frac{1}{k}".to_string(),
        }
    }

    /// Plain-text form, e.g. `H_{k-1}^(2)`.
    pub fn pretty(&self) -> String {
        let sup = |r: u32| {
            if r == 1 {
                String::new()
            } else {
                format!("^({r})")
            }
        };
        match *self {
            HarmonicSymbol::H(r) => format!("H{}", sup(r)),
            HarmonicSymbol::O(r) => format!("O{}", sup(r)),
            HarmonicSymbol::HPrev(r) => format!("H_{{k-1}}{}", sup(r)),
            HarmonicSymbol::OPrev(r) => format!("O_{{k-1}}{}", sup(r)),
            HarmonicSymbol::KInv => "(1/k)".to_string(),
        }
    }
}

/// Serialized names: `H`, `H2`, `O`, `O3`, `Hm1`, `Hm1_2`, `Om1`, `Kinv`.
impl fmt::Display for HarmonicSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            HarmonicSymbol::H(r) => write!(f, "H{}", Self::suffix(r)),
            HarmonicSymbol::O(r) => write!(f, "O{}", Self::suffix(r)),
            HarmonicSymbol::HPrev(1) => f.write_str("Hm1"),
            HarmonicSymbol::HPrev(r) => write!(f, "Hm1_{r}"),
            HarmonicSymbol::OPrev(1) => f.write_str("Om1"),
            HarmonicSymbol::OPrev(r) => write!(f, "Om1_{r}"),
            HarmonicSymbol::KInv => f.write_str("Kinv"),
        }
    }
}

impl FromStr for HarmonicSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("harmonic symbol {s:?}"));
        let order = |digits: &str| -> Result<u32> {
            if digits.is_empty() {
                return Ok(1);
            }
            match digits.parse::<u32>() {
                Ok(r) if r >= 2 => Ok(r),
                _ => Err(bad()),
            }
        };
        if s == "Kinv" {
            return Ok(HarmonicSymbol::KInv);
        }
        if let Some(rest) = s.strip_prefix("Hm1") {
            let digits = if rest.is_empty() {
                ""
            } else {
                rest.strip_prefix('_').ok_or_else(bad)?
            };
            return Ok(HarmonicSymbol::HPrev(order(digits)?));
        }
        if let Some(rest) = s.strip_prefix("Om1") {
            let digits = if rest.is_empty() {
                ""
            } else {
                rest.strip_prefix('_').ok_or_else(bad)?
            };
            return Ok(HarmonicSymbol::OPrev(order(digits)?));
        }
        if let Some(rest) = s.strip_prefix('H') {
            return Ok(HarmonicSymbol::H(order(rest)?));
        }
        if let Some(rest) = s.strip_prefix('O') {
            return Ok(HarmonicSymbol::O(order(rest)?));
        }
        Err(bad())
    }
}

pub type HarmonicPoly = SymPoly<HarmonicSymbol>;

pub fn hsym(s: HarmonicSymbol) -> HarmonicPoly {
    HarmonicPoly::symbol(s)
}

/// Exact value of a harmonic polynomial at `k ≥ 1` (`H_0 = O_0 = 0`).
pub fn hpoly_eval(p: &HarmonicPoly, k: u64) -> Rational {
    assert!(k >= 1, "harmonic polynomials are evaluated at k >= 1");
    let mut cache: BTreeMap<HarmonicSymbol, Rational> = BTreeMap::new();
    let mut total = Rational::zero();
    for (t, c) in p.terms() {
        let mut v = c.clone();
        for (s, e) in t.powers() {
            let x = cache.entry(*s).or_insert_with(|| s.value(k));
            v *= &x.pow(*e as i32);
        }
        total += &v;
    }
    total
}

/// Rewrites `H_{k-1}^(r)` as `H_k^(r) - (1/k)^r`.
pub fn hpoly_shift_rewrite(p: &HarmonicPoly) -> HarmonicPoly {
    p.map_symbols(|s| match *s {
        HarmonicSymbol::HPrev(r) => hsym(HarmonicSymbol::H(r)).sub(&HarmonicPoly::monomial(
            Term::from_powers([(HarmonicSymbol::KInv, r)]),
            Rational::one(),
        )),
        other => hsym(other),
    })
}

/// Writes a harmonic polynomial in plain text, e.g. `O² - O^(2)`.
pub fn hpoly_pretty(p: &HarmonicPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (t, c)) in leading_first(p).into_iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let body: String = t
            .powers()
            .iter()
            .map(|(s, e)| {
                let base = s.pretty();
                if *e > 1 {
                    format!("{base}^{e}")
                } else {
                    base
                }
            })
            .collect::<Vec<_>>()
            .join("·");
        if body.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&body);
        } else {
            out.push_str(&format!("{a}·{body}"));
        }
    }
    out
}

pub fn hpoly_latex(p: &HarmonicPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (t, c)) in leading_first(p).into_iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let body: String = t
            .powers()
            .iter()
            .map(|(s, e)| {
                let base = s.latex();
                if *e > 1 {
                    // H_k^{(2)} squared needs braces before the power
                    if base.contains('^') {
                        format!("\\left({base}\\right)^{e}")
                    } else {
                        format!("{base}^{e}")
                    }
                } else {
                    base
                }
            })
            .collect();
        let coeff = if a.is_one() && !body.is_empty() {
            String::new()
        } else if a.is_integer() {
            a.to_string()
        } else {
            format!("\\frac{{{}}}{{{}}}", a.numer(), a.denom())
        };
        out.push_str(&coeff);
        out.push_str(&body);
    }
    out
}

/// Sort key for monomials: highest weight first, then symbol order.
pub fn monomial_rank(
    t: &Term<HarmonicSymbol>,
) -> (
    std::cmp::Reverse<u32>,
    Vec<(HarmonicSymbol, std::cmp::Reverse<u32>)>,
) {
    let weight = t.powers().iter().map(|(s, e)| s.order() * e).sum();
    (
        std::cmp::Reverse(weight),
        t.powers()
            .iter()
            .map(|(s, e)| (*s, std::cmp::Reverse(*e)))
            .collect(),
    )
}

/// Terms ordered leading monomial first.
pub fn leading_first(p: &HarmonicPoly) -> Vec<(Term<HarmonicSymbol>, Rational)> {
    let mut terms: Vec<_> = p.terms().map(|(t, c)| (t.clone(), c.clone())).collect();
    terms.sort_by_key(|(t, _)| monomial_rank(t));
    terms
}

/// Serialized form of one harmonic monomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTermRecord {
    pub coefficient: Rational,
    pub symbols: BTreeMap<String, u32>,
}

pub fn hpoly_to_records(p: &HarmonicPoly) -> Vec<HarmonicTermRecord> {
    p.terms()
        .map(|(t, c)| HarmonicTermRecord {
            coefficient: c.clone(),
            symbols: t
                .powers()
                .iter()
                .map(|(s, e)| (s.to_string(), *e))
                .collect(),
        })
        .collect()
}

pub fn hpoly_from_records(records: &[HarmonicTermRecord]) -> Result<HarmonicPoly> {
    let mut p = HarmonicPoly::zero();
    for r in records {
        let powers = r
            .symbols
            .iter()
            .map(|(k, e)| k.parse::<HarmonicSymbol>().map(|s| (s, *e)))
            .collect::<Result<Vec<_>>>()?;
        p.add_term(Term::from_powers(powers), r.coefficient.clone());
    }
    Ok(p)
}

/// Parses a polynomial like `6*O - 5*Hm1` or `(O^2 - O2)*(H^2 + H2)`.
pub fn hpoly_parse(s: &str) -> Result<HarmonicPoly> {
    parse_poly(s, |name, e| {
        name.parse::<HarmonicSymbol>().ok().map(|x| hsym(x).pow(e))
    })
    .ok_or_else(|| Error::Parse(format!("harmonic polynomial {s:?}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorShape {
    /// denominators `i`
    Linear,
    /// denominators `2i - 1`
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorRange {
    UpToK,
    UpToKMinus1,
}

/// `Π_{i ≤ k or k-1} (1 + L/d_i)^exponent` with `d_i = i` or `2i - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductFactor {
    pub shape: FactorShape,
    pub exponent: i8,
    pub range: FactorRange,
    pub argument: LinearForm,
}

impl ProductFactor {
    pub fn new(
        shape: FactorShape,
        exponent: i8,
        range: FactorRange,
        argument: LinearForm,
    ) -> ProductFactor {
        assert!(exponent == 1 || exponent == -1);
        assert!(!argument.is_zero(), "product factor with zero argument");
        ProductFactor {
            shape,
            exponent,
            range,
            argument,
        }
    }

    /// Power-sum symbol of order `r` for this factor's denominators and range.
    pub fn power_sum(&self, r: u32) -> HarmonicSymbol {
        match (self.shape, self.range) {
            (FactorShape::Linear, FactorRange::UpToK) => HarmonicSymbol::H(r),
            (FactorShape::Linear, FactorRange::UpToKMinus1) => HarmonicSymbol::HPrev(r),
            (FactorShape::Odd, FactorRange::UpToK) => HarmonicSymbol::O(r),
            (FactorShape::Odd, FactorRange::UpToKMinus1) => HarmonicSymbol::OPrev(r),
        }
    }

    /// Number of literal factors at summation index `k`.
    pub fn count(&self, k: u64) -> u64 {
        match self.range {
            FactorRange::UpToK => k,
            FactorRange::UpToKMinus1 => k - 1,
        }
    }

    /// Denominator of the `i`-th literal factor.
    pub fn denominator(&self, i: u64) -> u64 {
        match self.shape {
            FactorShape::Linear => i,
            FactorShape::Odd => 2 * i - 1,
        }
    }
}

/// Elementary (`e_m`) and complete homogeneous (`h_m`) symmetric functions in
/// terms of power sums `p_r`, indexed by `r`. Built once from Newton's identities.
struct Templates {
    elementary: Vec<SymPoly<u32>>,
    complete: Vec<SymPoly<u32>>,
}

static TEMPLATES: LazyLock<Templates> = LazyLock::new(|| {
    let n = MAX_TEMPLATE_DEGREE as usize;
    let p = |r: usize| SymPoly::<u32>::symbol(r as u32);
    let mut elementary = vec![SymPoly::constant(Rational::one())];
    let mut complete = vec![SymPoly::constant(Rational::one())];
    for m in 1..=n {
        // m e_m = Σ (-1)^(i-1) e_{m-i} p_i ;  m h_m = Σ h_{m-i} p_i
        let mut e = SymPoly::zero();
        let mut h = SymPoly::zero();
        for i in 1..=m {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            e = e.add(&elementary[m - i].mul(&p(i)).scale(&Rational::from(sign)));
            h = h.add(&complete[m - i].mul(&p(i)));
        }
        let inv = Rational::new(1, m as i64);
        elementary.push(e.scale(&inv));
        complete.push(h.scale(&inv));
    }
    Templates {
        elementary,
        complete,
    }
});

/// Coefficient of `x^m` in `Π (1 + x/d_i)^exponent` as a harmonic polynomial.
pub fn template_coefficient(f: &ProductFactor, m: u32) -> Result<HarmonicPoly> {
    if m > MAX_TEMPLATE_DEGREE {
        return Err(Error::TemplateDegree {
            requested: m,
            max: MAX_TEMPLATE_DEGREE,
        });
    }
    let t = &*TEMPLATES;
    let (base, sign) = if f.exponent > 0 {
        (&t.elementary[m as usize], 1)
    } else {
        // Π (1 + x/d)^-1 = Σ h_m (-x)^m
        (
            &t.complete[m as usize],
            if m.is_multiple_of(2) { 1 } else { -1 },
        )
    };
    Ok(base
        .map_symbols(|r| hsym(f.power_sum(*r)))
        .scale(&Rational::from(sign)))
}

/// Series in the parameters of one product factor, coefficients in harmonic symbols.
pub fn product_expansion(f: &ProductFactor, degree: u32) -> Result<TruncatedSeries<HarmonicPoly>> {
    if degree > MAX_TEMPLATE_DEGREE {
        return Err(Error::TemplateDegree {
            requested: degree,
            max: MAX_TEMPLATE_DEGREE,
        });
    }
    let coeffs = (0..=degree)
        .map(|m| template_coefficient(f, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedSeries::compose_linear(
        &coeffs,
        &f.argument,
        degree,
    ))
}

/// Brute-force expansion of the `k`-th literal product over `Rational`,
/// used as an independent oracle for [`product_expansion`].
pub fn literal_product_series(f: &ProductFactor, k: u64, degree: u32) -> TruncatedSeries<Rational> {
    let mut out = TruncatedSeries::one(degree);
    for i in 1..=f.count(k) {
        let d = Rational::new(1, f.denominator(i) as i64);
        let lin = f.argument.scaled(&d).to_series::<Rational>(degree);
        let factor = if f.exponent > 0 {
            TruncatedSeries::one(degree).add(&lin).expect("same degree")
        } else {
            // (1 + u)^-1 = Σ (-u)^j
            let neg = lin.neg();
            let mut acc = TruncatedSeries::one(degree);
            let mut pw = TruncatedSeries::one(degree);
            for _ in 0..degree {
                pw = pw.mul(&neg).expect("same degree");
                acc = acc.add(&pw).expect("same degree");
            }
            acc
        };
        out = out.mul(&factor).expect("same degree");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::series::{Monomial, ParamVar};
    use proptest::prelude::*;

    use HarmonicSymbol::*;

    fn x() -> LinearForm {
        LinearForm::var(ParamVar::A)
    }

    fn x_pow(e: u8) -> Monomial {
        Monomial::new(e, 0, 0, 0)
    }

    #[test]
    fn symbol_names_round_trip() {
        for s in [
            H(1),
            H(2),
            H(6),
            O(1),
            O(3),
            HPrev(1),
            HPrev(2),
            OPrev(1),
            OPrev(4),
            KInv,
        ] {
            assert_eq!(s.to_string().parse::<HarmonicSymbol>().unwrap(), s);
        }
        assert_eq!(HPrev(2).to_string(), "Hm1_2");
        assert_eq!(O(2).to_string(), "O2");
        assert!("H1".parse::<HarmonicSymbol>().is_err());
        assert!("X".parse::<HarmonicSymbol>().is_err());
    }

    #[test]
    fn linear_plus_template() {
        let f = ProductFactor::new(FactorShape::Linear, 1, FactorRange::UpToK, x());
        let s = product_expansion(&f, 2).unwrap();
        assert_eq!(
            s.coeff(&Monomial::one()).unwrap(),
            HarmonicPoly::constant(q(1, 1))
        );
        assert_eq!(s.coeff(&x_pow(1)).unwrap(), hsym(H(1)));
        let expected = hsym(H(1)).pow(2).sub(&hsym(H(2))).scale(&q(1, 2));
        assert_eq!(s.coeff(&x_pow(2)).unwrap(), expected);
        // at k = 2: (1 + x)(1 + x/2) = 1 + 3x/2 + x²/2
        let vals: Vec<_> = (0..=2)
            .map(|e| hpoly_eval(&s.coeff(&x_pow(e)).unwrap(), 2))
            .collect();
        assert_eq!(vals, vec![q(1, 1), q(3, 2), q(1, 2)]);
    }

    #[test]
    fn odd_inverse_template() {
        let f = ProductFactor::new(
            FactorShape::Odd,
            -1,
            FactorRange::UpToK,
            x().scaled(&q(-1, 1)),
        );
        let s = product_expansion(&f, 2).unwrap();
        // Π (1 - y/(2i-1))^-1 = 1 + yO + y²(O² + O^(2))/2
        assert_eq!(s.coeff(&x_pow(1)).unwrap(), hsym(O(1)));
        let expected = hsym(O(1)).pow(2).add(&hsym(O(2))).scale(&q(1, 2));
        assert_eq!(s.coeff(&x_pow(2)).unwrap(), expected);
    }

    #[test]
    fn degree_three_templates_match_printed_forms() {
        let f = ProductFactor::new(FactorShape::Linear, 1, FactorRange::UpToK, x());
        let e3 = template_coefficient(&f, 3).unwrap();
        let h = hsym(H(1));
        let printed = h
            .pow(3)
            .sub(&h.mul(&hsym(H(2))).scale(&q(3, 1)))
            .add(&hsym(H(3)).scale(&q(2, 1)))
            .scale(&q(1, 6));
        assert_eq!(e3, printed);
        let g = ProductFactor::new(
            FactorShape::Linear,
            -1,
            FactorRange::UpToK,
            x().scaled(&q(-1, 1)),
        );
        let s = product_expansion(&g, 3).unwrap();
        let printed = h
            .pow(3)
            .add(&h.mul(&hsym(H(2))).scale(&q(3, 1)))
            .add(&hsym(H(3)).scale(&q(2, 1)))
            .scale(&q(1, 6));
        assert_eq!(s.coeff(&x_pow(3)).unwrap(), printed);
    }

    #[test]
    fn inverse_is_plus_template_with_negated_argument() {
        // Π(1+x/i)^-1 composed with x → -x and exponent flip equals Π(1-x/i)^-1 ... structurally
        for m in 0..=MAX_TEMPLATE_DEGREE {
            let plus = template_coefficient(
                &ProductFactor::new(FactorShape::Linear, 1, FactorRange::UpToK, x()),
                m,
            )
            .unwrap();
            let minus = template_coefficient(
                &ProductFactor::new(FactorShape::Linear, -1, FactorRange::UpToK, x()),
                m,
            )
            .unwrap();
            // e_m and (-1)^m h_m differ exactly by flipping the sign of every even-order power sum
            let flipped = plus.map_symbols(|s| match s {
                H(r) if r % 2 == 0 => hsym(H(*r)).neg(),
                other => hsym(*other),
            });
            let sign = if m % 2 == 0 { 1 } else { -1 };
            assert_eq!(minus, flipped.scale(&q(sign, 1)), "m = {m}");
        }
    }

    #[test]
    fn template_degree_limit() {
        let f = ProductFactor::new(FactorShape::Linear, 1, FactorRange::UpToK, x());
        assert!(matches!(
            product_expansion(&f, 7),
            Err(Error::TemplateDegree { requested: 7, .. })
        ));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(hpoly_eval(&hsym(H(1)), 3), q(11, 6));
        assert_eq!(hpoly_eval(&hsym(O(2)), 2), q(10, 9));
        let p = hsym(H(1)).pow(2).sub(&hsym(H(2))).scale(&q(1, 2));
        assert_eq!(hpoly_eval(&p, 2), q(1, 2));
        assert_eq!(hpoly_eval(&hsym(HPrev(1)), 1), Rational::zero());
        assert_eq!(hpoly_eval(&hsym(KInv), 4), q(1, 4));
    }

    #[test]
    fn shift_rewrite_examples() {
        let kinv = hsym(KInv);
        assert_eq!(hpoly_shift_rewrite(&hsym(HPrev(1))), hsym(H(1)).sub(&kinv));
        let p = hsym(H(1)).mul(&hsym(HPrev(1)));
        assert_eq!(
            hpoly_shift_rewrite(&p),
            hsym(H(1)).pow(2).sub(&hsym(H(1)).mul(&kinv))
        );
        let p = hsym(HPrev(1)).pow(2).sub(&hsym(HPrev(2)));
        let r = hpoly_shift_rewrite(&p);
        let expected = hsym(H(1))
            .pow(2)
            .sub(&hsym(H(1)).mul(&kinv).scale(&q(2, 1)))
            .sub(&hsym(H(2)))
            .add(&kinv.pow(2).scale(&q(2, 1)));
        assert_eq!(r, expected);
        assert!(r.symbols().iter().all(|s| !matches!(s, HPrev(_))));
        for k in 1..=10 {
            assert_eq!(hpoly_eval(&r, k), hpoly_eval(&p, k));
        }
        assert_eq!(
            hpoly_eval(&r, 3),
            q(121, 36) - q(11, 9) - q(49, 36) + q(2, 9)
        );
    }

    #[test]
    fn parse_compact_form() {
        let p = hpoly_parse("6*O - 5*Hm1").unwrap();
        assert_eq!(
            p,
            hsym(O(1))
                .scale(&q(6, 1))
                .sub(&hsym(HPrev(1)).scale(&q(5, 1)))
        );
        let p = hpoly_parse("O^2 - O2").unwrap();
        assert_eq!(p, hsym(O(1)).pow(2).sub(&hsym(O(2))));
        let p = hpoly_parse("1/2*H*Hm1_2 + 3").unwrap();
        assert_eq!(p.constant_term(), q(3, 1));
        assert_eq!(p.len(), 2);
        assert!(hpoly_parse("").is_err());
        assert!(hpoly_parse("H**O").is_err());
        assert!(hpoly_parse("(H + O").is_err());
        assert!(hpoly_parse("H/2").is_err());
        let p = hpoly_parse("(O^2 - O2)*(H^2 + H2)").unwrap();
        assert_eq!(p, hpoly_parse("O^2*H^2 + O^2*H2 - O2*H^2 - O2*H2").unwrap());
        let p = hpoly_parse("-(2*Hm1 - H)^2").unwrap();
        assert_eq!(p, hpoly_parse("-4*Hm1^2 + 4*Hm1*H - H^2").unwrap());
    }

    #[test]
    fn records_round_trip() {
        let p = hpoly_parse("H^2*Hm1 + 4*H2*H - 3*H2*Hm1 + Kinv").unwrap();
        let back = hpoly_from_records(&hpoly_to_records(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn pretty_and_latex() {
        let p = hpoly_parse("O^2 - O2").unwrap();
        assert_eq!(hpoly_pretty(&p), "O^2 - O^(2)");
        assert_eq!(hpoly_latex(&p), "O_k^2 - O_k^{(2)}");
        let p = hpoly_parse("6*O - 5*Hm1").unwrap();
        assert_eq!(hpoly_latex(&p), "6O_k - 5H_{k-1}");
    }

    fn all_factor_kinds() -> Vec<ProductFactor> {
        let arg = LinearForm::var(ParamVar::A)
            .scaled(&q(2, 1))
            .plus(&LinearForm::term(ParamVar::C, q(-1, 3)));
        let mut out = Vec::new();
        for shape in [FactorShape::Linear, FactorShape::Odd] {
            for exponent in [1, -1] {
                for range in [FactorRange::UpToK, FactorRange::UpToKMinus1] {
                    out.push(ProductFactor::new(shape, exponent, range, arg.clone()));
                }
            }
        }
        out
    }

    #[test]
    fn expansion_matches_literal_products() {
        let degree = 4;
        for f in all_factor_kinds() {
            let s = product_expansion(&f, degree).unwrap();
            for k in 1..=12u64 {
                let lit = literal_product_series(&f, k, degree);
                for m in Monomial::all_up_to(&[ParamVar::A, ParamVar::C], degree) {
                    let sym = hpoly_eval(&s.coeff(&m).unwrap(), k);
                    assert_eq!(sym, lit.coeff(&m).unwrap(), "{f:?} k={k} m={m}");
                }
            }
        }
    }

    fn arb_hpoly() -> impl Strategy<Value = HarmonicPoly> {
        let syms = [H(1), H(2), HPrev(1), HPrev(2), HPrev(3), O(1), KInv];
        proptest::collection::vec(
            (
                proptest::collection::vec((0..7usize, 1u32..3), 0..3),
                -5i64..6,
                1i64..4,
            ),
            1..5,
        )
        .prop_map(move |terms| {
            HarmonicPoly::from_terms(terms.into_iter().map(|(pw, n, d)| {
                (
                    Term::from_powers(pw.into_iter().map(|(i, e)| (syms[i], e))),
                    q(n, d),
                )
            }))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn shift_rewrite_preserves_values(p in arb_hpoly()) {
            let r = hpoly_shift_rewrite(&p);
            for k in 1..=20u64 {
                prop_assert_eq!(hpoly_eval(&r, k), hpoly_eval(&p, k));
            }
        }
    }
}
