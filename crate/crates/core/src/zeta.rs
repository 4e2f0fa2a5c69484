//! The constant ring `Q[γ, ln 2, ζ(2), ζ(3), …]`, the Γ-ratio series expander
//! and rendering/evaluation of constants.
//!
//! ζ(2) and ζ(4) are kept as basis symbols; π only appears when rendering.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::numeric::{self, Real};
use crate::poly::{parse_poly, SymPoly, Term};
use crate::series::{LinearForm, ParamValues, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstSymbol {
    EulerGamma,
    Ln2,
    /// ζ(m), m ≥ 2
    Zeta(u32),
}

impl ConstSymbol {
    pub fn zeta(m: u32) -> ConstSymbol {
        assert!(m >= 2, "zeta index must be at least 2");
        ConstSymbol::Zeta(m)
    }

    pub fn key(&self) -> String {
        match self {
            ConstSymbol::EulerGamma => "gamma".into(),
            ConstSymbol::Ln2 => "ln2".into(),
            ConstSymbol::Zeta(m) => format!("zeta{m}"),
        }
    }

    pub fn from_key(s: &str) -> Option<ConstSymbol> {
        match s {
            "gamma" => Some(ConstSymbol::EulerGamma),
            "ln2" => Some(ConstSymbol::Ln2),
            _ => s
                .strip_prefix("zeta")
                .and_then(|m| m.parse().ok())
                .filter(|m| *m >= 2)
                .map(ConstSymbol::Zeta),
        }
    }
}

pub type ZetaPoly = SymPoly<ConstSymbol>;

pub fn zeta_poly(m: u32) -> ZetaPoly {
    ZetaPoly::symbol(ConstSymbol::zeta(m))
}

pub fn ln2_poly() -> ZetaPoly {
    ZetaPoly::symbol(ConstSymbol::Ln2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaTau {
    Sigma,
    Tau,
}

/// σ_k and τ_k in the constant basis.
pub fn sigma_tau_normalize(kind: SigmaTau, k: u32) -> ZetaPoly {
    assert!(k >= 1, "sigma/tau index starts at 1");
    let gamma = ZetaPoly::symbol(ConstSymbol::EulerGamma);
    match (kind, k) {
        (SigmaTau::Sigma, 1) => gamma,
        (SigmaTau::Tau, 1) => gamma.add(&ln2_poly().scale(&Rational::from(2))),
        (SigmaTau::Sigma, m) => zeta_poly(m),
        (SigmaTau::Tau, m) => zeta_poly(m).scale(&Rational::from((1i64 << m) - 1)),
    }
}

/// Coefficient of Euler's γ anywhere in `p` (zero iff γ does not occur).
pub fn gamma_part(p: &ZetaPoly) -> ZetaPoly {
    ZetaPoly::from_terms(
        p.terms()
            .filter(|(t, _)| t.exponent(&ConstSymbol::EulerGamma) > 0)
            .map(|(t, c)| (t.clone(), c.clone())),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaBase {
    /// Γ(1 + ·)
    One,
    /// Γ(1/2 + ·)
    Half,
}

/// `Γ(base + argument)^exponent`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaFactor {
    pub exponent: i8,
    pub base: GammaBase,
    pub argument: LinearForm,
}

impl GammaFactor {
    pub fn new(exponent: i8, base: GammaBase, argument: LinearForm) -> GammaFactor {
        assert!(exponent == 1 || exponent == -1);
        GammaFactor {
            exponent,
            base,
            argument,
        }
    }

    /// Builds `Γ(shift + argument)^exponent`; only shifts 1 and 1/2 are expandable.
    pub fn from_shift(exponent: i8, shift: &Rational, argument: LinearForm) -> Result<GammaFactor> {
        let base = if shift.is_one() {
            GammaBase::One
        } else if *shift == Rational::new(1, 2) {
            GammaBase::Half
        } else {
            return Err(Error::ShiftedArgument);
        };
        Ok(GammaFactor::new(exponent, base, argument))
    }

    pub fn shift(&self) -> Rational {
        match self.base {
            GammaBase::One => Rational::one(),
            GammaBase::Half => Rational::new(1, 2),
        }
    }
}

impl fmt::Display for GammaFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shift = match self.base {
            GammaBase::One => "1",
            GammaBase::Half => "1/2",
        };
        let arg = if self.argument.is_zero() {
            String::new()
        } else {
            let s = self.argument.to_string();
            match s.strip_prefix('-') {
                Some(rest) => format!(" - {rest}"),
                None => format!(" + {s}"),
            }
        };
        write!(f, "Γ({shift}{arg})")?;
        if self.exponent < 0 {
            f.write_str("^-1")?;
        }
        Ok(())
    }
}

/// Series of `Π Γ(base + arg)^exponent` in the parameters, truncated at `degree`.
///
/// Uses Γ(1+z) = exp(Σ (−1)^k σ_k z^k / k) and Γ(1/2+z) = √π exp(Σ (−1)^k τ_k z^k / k);
/// the √π factors must cancel.
pub fn rhs_gamma_series(factors: &[GammaFactor], degree: u32) -> Result<TruncatedSeries<ZetaPoly>> {
    let half_count: i32 = factors
        .iter()
        .filter(|f| f.base == GammaBase::Half)
        .map(|f| f.exponent as i32)
        .sum();
    if half_count != 0 {
        return Err(Error::UnbalancedHalfGamma(half_count));
    }
    let mut log = TruncatedSeries::<ZetaPoly>::zero(degree);
    for f in factors {
        let kind = match f.base {
            GammaBase::One => SigmaTau::Sigma,
            GammaBase::Half => SigmaTau::Tau,
        };
        let mut coeffs = vec![ZetaPoly::zero()];
        for k in 1..=degree {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let c = Rational::new(sign * f.exponent as i64, k as i64);
            coeffs.push(sigma_tau_normalize(kind, k).scale(&c));
        }
        log = log.add(&TruncatedSeries::compose_linear(
            &coeffs,
            &f.argument,
            degree,
        ))?;
    }
    log.exp()
}

/// Literal numeric value of `Π Γ(shift + arg(params))^exponent`.
pub fn gamma_ratio_numeric(
    factors: &[GammaFactor],
    params: &ParamValues,
    bits: u32,
) -> Result<Real> {
    let wp = bits + 16;
    let mut log = Real::zero(wp);
    for f in factors {
        let x = f.shift() + f.argument.eval(params);
        if x.is_negative() || x.is_zero() {
            return Err(Error::Convergence(format!(
                "Gamma argument {x} is not positive"
            )));
        }
        let lg = numeric::gamma::ln_gamma(&x, wp);
        if f.exponent > 0 {
            log += &lg;
        } else {
            log -= &lg;
        }
    }
    Ok(log.exp().with_bits(bits))
}

/// Evaluates a truncated series with `Real`-valued coefficients at rational parameters.
pub fn series_eval(s: &TruncatedSeries<ZetaPoly>, params: &ParamValues, bits: u32) -> Result<Real> {
    let mut total = Real::zero(bits);
    for (m, c) in s.terms() {
        let v = params.monomial_value(m);
        if v.is_zero() {
            continue;
        }
        total += &zetapoly_eval(c, bits)?.mul_rational(&v);
    }
    Ok(total)
}

/// Numeric value of a basis constant.
pub fn eval_constant(s: ConstSymbol, precision_bits: u32) -> Result<Real> {
    if precision_bits < 64 {
        return Err(Error::Precision(precision_bits));
    }
    Ok(match s {
        ConstSymbol::EulerGamma => numeric::euler_gamma_value(precision_bits),
        ConstSymbol::Ln2 => numeric::ln2(precision_bits),
        ConstSymbol::Zeta(m) if m >= 2 => numeric::zeta(m, precision_bits),
        other => return Err(Error::UnsupportedSymbol(format!("{other:?}"))),
    })
}

pub fn zetapoly_eval(p: &ZetaPoly, precision_bits: u32) -> Result<Real> {
    if precision_bits < 64 {
        return Err(Error::Precision(precision_bits));
    }
    let wp = precision_bits + numeric::GUARD_BITS;
    let mut total = Real::zero(wp);
    for (t, c) in p.terms() {
        let mut v = Real::from_rational(c, wp);
        for (s, e) in t.powers() {
            let x = eval_constant(*s, wp)?;
            v = &v * &x.powi(*e);
        }
        total += &v;
    }
    Ok(total.with_bits(precision_bits))
}

/// Serialized form of one constant monomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstTermRecord {
    pub coefficient: Rational,
    pub symbols: BTreeMap<String, u32>,
}

pub fn zetapoly_to_records(p: &ZetaPoly) -> Vec<ConstTermRecord> {
    p.terms()
        .map(|(t, c)| ConstTermRecord {
            coefficient: c.clone(),
            symbols: t.powers().iter().map(|(s, e)| (s.key(), *e)).collect(),
        })
        .collect()
}

pub fn zetapoly_from_records(records: &[ConstTermRecord]) -> Result<ZetaPoly> {
    let mut p = ZetaPoly::zero();
    for r in records {
        let powers = r
            .symbols
            .iter()
            .map(|(k, e)| {
                ConstSymbol::from_key(k)
                    .map(|s| (s, *e))
                    .ok_or_else(|| Error::Parse(format!("unknown constant symbol {k:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        p.add_term(Term::from_powers(powers), r.coefficient.clone());
    }
    Ok(p)
}

/// `ζ(2m) / π^{2m}`, a rational.
fn even_zeta_ratio(m: u32) -> Rational {
    let b = crate::arith::bernoulli(2 * m as usize).abs();
    let fact: num_bigint::BigInt = (1..=2 * m as u64).map(num_bigint::BigInt::from).product();
    b * Rational::from(num_bigint::BigInt::from(2).pow(2 * m - 1)) / Rational::from(fact)
}

/// Rewrites products of even zeta values as a single `ζ(2n)`, so that equal
/// constants have equal representations (e.g. `ζ(2)² = 5/2·ζ(4)`).
pub fn reduce_even_zetas(p: &ZetaPoly) -> ZetaPoly {
    let mut out = ZetaPoly::zero();
    for (t, c) in p.terms() {
        let even: Vec<(u32, u32)> = t
            .powers()
            .iter()
            .filter_map(|(s, e)| match s {
                ConstSymbol::Zeta(m) if m % 2 == 0 => Some((*m / 2, *e)),
                _ => None,
            })
            .collect();
        let factors: u32 = even.iter().map(|(_, e)| e).sum();
        if factors <= 1 {
            out.add_term(t.clone(), c.clone());
            continue;
        }
        let total: u32 = even.iter().map(|(m, e)| m * e).sum();
        let mut coef = c.clone();
        for (m, e) in &even {
            coef = coef * even_zeta_ratio(*m).pow(*e as i32);
        }
        coef = coef / even_zeta_ratio(total);
        let rest = t
            .powers()
            .iter()
            .filter(|(s, _)| !matches!(s, ConstSymbol::Zeta(m) if m % 2 == 0))
            .cloned()
            .chain([(ConstSymbol::Zeta(2 * total), 1)]);
        out.add_term(Term::from_powers(rest), coef);
    }
    out
}

/// Parses text such as `7/2*zeta3 + 1/2*pi^2*ln2`. Even powers of `pi` up to
/// six are rewritten into the ζ basis.
pub fn zetapoly_parse(s: &str) -> Result<ZetaPoly> {
    parse_poly(s, |name, e| match name {
        "pi" => {
            let (c, m) = match e {
                2 => (6, 2),
                4 => (90, 4),
                6 => (945, 6),
                _ => return None,
            };
            Some(zeta_poly(m).scale(&Rational::from_int(c)))
        }
        _ => ConstSymbol::from_key(name).map(|x| ZetaPoly::symbol(x).pow(e)),
    })
    .map(|p| reduce_even_zetas(&p))
    .ok_or_else(|| Error::Parse(format!("constant polynomial {s:?}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum DisplaySym {
    EulerGamma,
    Pi,
    Ln2,
    Zeta(u32),
}

/// Rewrites ζ(2), ζ(4) as rational multiples of π², π⁴ when `pi_form` is set.
fn display_terms(p: &ZetaPoly, pi_form: bool) -> Vec<(Vec<(DisplaySym, u32)>, Rational)> {
    let mut acc: BTreeMap<Vec<(DisplaySym, u32)>, Rational> = BTreeMap::new();
    for (t, c) in p.terms() {
        let mut c = c.clone();
        let mut syms: BTreeMap<DisplaySym, u32> = BTreeMap::new();
        for (s, e) in t.powers() {
            let d = match s {
                ConstSymbol::Zeta(2) if pi_form => {
                    c = c * Rational::new(1, 6).pow(*e as i32);
                    *syms.entry(DisplaySym::Pi).or_default() += 2 * e;
                    continue;
                }
                ConstSymbol::Zeta(4) if pi_form => {
                    c = c * Rational::new(1, 90).pow(*e as i32);
                    *syms.entry(DisplaySym::Pi).or_default() += 4 * e;
                    continue;
                }
                ConstSymbol::Zeta(m) => DisplaySym::Zeta(*m),
                ConstSymbol::Ln2 => DisplaySym::Ln2,
                ConstSymbol::EulerGamma => DisplaySym::EulerGamma,
            };
            *syms.entry(d).or_default() += e;
        }
        let key: Vec<_> = syms.into_iter().collect();
        *acc.entry(key).or_default() += &c;
    }
    let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    // highest weight first, the way closed forms are usually written
    terms.sort_by_key(|(syms, _)| {
        let weight: u32 = syms
            .iter()
            .map(|(s, e)| match s {
                DisplaySym::Zeta(m) => m * e,
                DisplaySym::Pi | DisplaySym::Ln2 | DisplaySym::EulerGamma => *e,
            })
            .sum();
        let has_zeta = syms.iter().any(|(s, _)| matches!(s, DisplaySym::Zeta(_)));
        (std::cmp::Reverse(weight), !has_zeta, syms.clone())
    });
    terms
}

fn superscript(n: u32) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| SUP[c.to_digit(10).unwrap() as usize])
        .collect()
}

fn plain_symbols(syms: &[(DisplaySym, u32)]) -> String {
    let mut s = String::new();
    for (d, e) in syms {
        let pow = if *e > 1 {
            superscript(*e)
        } else {
            String::new()
        };
        match d {
            DisplaySym::Pi => s.push_str(&format!("π{pow}")),
            DisplaySym::Ln2 => s.push_str(&format!("ln{pow}2")),
            DisplaySym::Zeta(m) => s.push_str(&format!("ζ({m}){pow}")),
            DisplaySym::EulerGamma => s.push_str(&format!("γ{pow}")),
        }
    }
    s
}

fn latex_symbols(syms: &[(DisplaySym, u32)]) -> String {
    let mut parts = Vec::new();
    for (d, e) in syms {
        let pow = if *e > 1 {
            format!("^{e}")
        } else {
            String::new()
        };
        parts.push(match d {
            DisplaySym::Pi => format!("\\pi{pow}"),
            DisplaySym::Ln2 => format!("\\ln{pow} 2"),
            DisplaySym::Zeta(m) => format!("\\zeta({m}){pow}"),
            DisplaySym::EulerGamma => format!("\\gamma{pow}"),
        });
    }
    parts.join(" ")
}

/// Plain-text rendering, e.g. `π²/4` or `7ζ(3)/2 + π²ln2/2`.
pub fn render(p: &ZetaPoly, pi_form: bool) -> String {
    let terms = display_terms(p, pi_form);
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (syms, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let body = plain_symbols(syms);
        let num = a.numer().to_string();
        let den = a.denom().to_string();
        let head = if body.is_empty() {
            num
        } else if num == "1" {
            body
        } else {
            format!("{num}{body}")
        };
        out.push_str(&head);
        if den != "1" {
            out.push('/');
            out.push_str(&den);
        }
    }
    out
}

/// LaTeX rendering with `\zeta(m)`, `\ln 2`, `\pi`.
pub fn render_latex(p: &ZetaPoly, pi_form: bool) -> String {
    let terms = display_terms(p, pi_form);
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (syms, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let body = latex_symbols(syms);
        let num = a.numer().to_string();
        let den = a.denom().to_string();
        let head = if body.is_empty() {
            num
        } else if num == "1" {
            body
        } else {
            format!("{num}{body}")
        };
        if den == "1" {
            out.push_str(&head);
        } else {
            out.push_str(&format!("\\frac{{{head}}}{{{den}}}"));
        }
    }
    out
}
