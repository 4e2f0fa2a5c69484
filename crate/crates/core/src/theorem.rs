//! The four substituted summation theorems, encoded as LHS summand factorizations
//! and RHS gamma-factor lists, plus numeric evaluators used as oracles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{q, Rational};
use crate::error::{Error, Result};
use crate::harmonic::{FactorRange, FactorShape, ProductFactor};
use crate::numeric::Real;
use crate::series::{LinearForm, Monomial, ParamValues, ParamVar};
use crate::zeta::{GammaBase, GammaFactor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremName {
    Gauss,
    Watson,
    Bailey,
    Wang,
}

impl TheoremName {
    pub const ALL: [TheoremName; 4] = [
        TheoremName::Gauss,
        TheoremName::Watson,
        TheoremName::Bailey,
        TheoremName::Wang,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremName::Gauss => "gauss",
            TheoremName::Watson => "watson",
            TheoremName::Bailey => "bailey",
            TheoremName::Wang => "wang",
        }
    }
}

impl fmt::Display for TheoremName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gauss" => Ok(TheoremName::Gauss),
            "watson" => Ok(TheoremName::Watson),
            "bailey" => Ok(TheoremName::Bailey),
            "wang" => Ok(TheoremName::Wang),
            _ => Err(Error::UnknownTheorem(s.to_string())),
        }
    }
}

/// k-dependence of a sum's weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WeightFamily {
    /// `C(2k,k) / 4^k`
    W1,
    /// `2^-k`
    W2,
    /// `3^k / C(2k,k)`
    W3,
}

impl WeightFamily {
    /// Exact weight at `k ≥ 0`.
    pub fn exact(&self, k: u64) -> Rational {
        let cb = Rational::from(crate::arith::central_binomial(k));
        match self {
            WeightFamily::W1 => cb / Rational::from(num_bigint::BigInt::from(4).pow(k as u32)),
            WeightFamily::W2 => Rational::new(1, 2).pow(k as i32),
            WeightFamily::W3 => Rational::from(num_bigint::BigInt::from(3).pow(k as u32)) / cb,
        }
    }

    /// `w(k) / w(k-1)` as a fraction `(num, den)`.
    pub fn step(&self, k: u64) -> (u64, u64) {
        match self {
            WeightFamily::W1 => (2 * k - 1, 2 * k),
            WeightFamily::W2 => (1, 2),
            WeightFamily::W3 => (3 * k, 2 * (2 * k - 1)),
        }
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightFamily::W1 => "W1",
            WeightFamily::W2 => "W2",
            WeightFamily::W3 => "W3",
        })
    }
}

impl FromStr for WeightFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "W1" => Ok(WeightFamily::W1),
            "W2" => Ok(WeightFamily::W2),
            "W3" => Ok(WeightFamily::W3),
            _ => Err(Error::Parse(format!("weight family {s:?}"))),
        }
    }
}

/// `constant + linear(params)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine {
    pub constant: Rational,
    pub linear: LinearForm,
}

impl Affine {
    pub fn new(constant: Rational, linear: LinearForm) -> Affine {
        Affine { constant, linear }
    }

    pub fn eval(&self, params: &ParamValues) -> Rational {
        self.constant.clone() + self.linear.eval(params)
    }
}

/// `pFq(numerators; denominators; z)` with affine parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RawHypergeometric {
    pub numerators: Vec<Affine>,
    pub denominators: Vec<Affine>,
    pub z: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremDescriptor {
    pub name: TheoremName,
    pub prefactor: (Rational, Monomial),
    pub weight: WeightFamily,
    pub base_denominator_exponent: u32,
    pub lhs_factors: Vec<ProductFactor>,
    pub rhs_factors: Vec<GammaFactor>,
    pub raw_hypergeometric: RawHypergeometric,
    /// Must be positive for the series to converge (if present).
    pub convergence: Option<Affine>,
}

fn lin(coeffs: [(i64, i64); 4]) -> LinearForm {
    LinearForm::from_coeffs(coeffs.map(|(n, d)| q(n, d)))
}

fn v(x: ParamVar) -> LinearForm {
    LinearForm::var(x)
}

fn factor(
    shape: FactorShape,
    exponent: i8,
    range: FactorRange,
    argument: LinearForm,
) -> ProductFactor {
    ProductFactor::new(shape, exponent, range, argument)
}

fn g(exponent: i8, base: GammaBase, argument: LinearForm) -> GammaFactor {
    GammaFactor::new(exponent, base, argument)
}

fn aff(c: Rational, l: LinearForm) -> Affine {
    Affine::new(c, l)
}

use FactorRange::{UpToK, UpToKMinus1};
use FactorShape::{Linear, Odd};
use GammaBase::{Half, One};
use ParamVar::{A, B, C, D};

impl TheoremDescriptor {
    pub fn get(name: TheoremName) -> TheoremDescriptor {
        match name {
            TheoremName::Gauss => Self::gauss(),
            TheoremName::Watson => Self::watson(),
            TheoremName::Bailey => Self::bailey(),
            TheoremName::Wang => Self::wang(),
        }
    }

    pub fn all() -> Vec<TheoremDescriptor> {
        TheoremName::ALL.iter().map(|n| Self::get(*n)).collect()
    }

    /// 2F1(1/2 + a, b; 1 + c; 1)
    fn gauss() -> TheoremDescriptor {
        TheoremDescriptor {
            name: TheoremName::Gauss,
            prefactor: (Rational::one(), Monomial::var(B)),
            weight: WeightFamily::W1,
            base_denominator_exponent: 1,
            lhs_factors: vec![
                factor(Odd, 1, UpToK, v(A).scaled(&q(2, 1))),
                factor(Linear, 1, UpToKMinus1, v(B)),
                factor(Linear, -1, UpToK, v(C)),
            ],
            rhs_factors: vec![
                g(1, One, v(C)),
                g(1, Half, lin([(-1, 1), (-1, 1), (1, 1), (0, 1)])),
                g(-1, Half, lin([(-1, 1), (0, 1), (1, 1), (0, 1)])),
                g(-1, One, lin([(0, 1), (-1, 1), (1, 1), (0, 1)])),
            ],
            raw_hypergeometric: RawHypergeometric {
                numerators: vec![aff(q(1, 2), v(A)), aff(Rational::zero(), v(B))],
                denominators: vec![aff(Rational::one(), v(C))],
                z: Rational::one(),
            },
            convergence: Some(aff(q(1, 2), lin([(-1, 1), (-1, 1), (1, 1), (0, 1)]))),
        }
    }

    /// 3F2(1 + a, b, 1/2 + c; 1 + (a+b)/2, 1 + 2c; 1)
    fn watson() -> TheoremDescriptor {
        let half_ab = lin([(1, 2), (1, 2), (0, 1), (0, 1)]);
        TheoremDescriptor {
            name: TheoremName::Watson,
            prefactor: (Rational::one(), Monomial::var(B)),
            weight: WeightFamily::W1,
            base_denominator_exponent: 1,
            lhs_factors: vec![
                factor(Linear, 1, UpToK, v(A)),
                factor(Odd, 1, UpToK, v(C).scaled(&q(2, 1))),
                factor(Linear, 1, UpToKMinus1, v(B)),
                factor(Linear, -1, UpToK, half_ab.clone()),
                factor(Linear, -1, UpToK, v(C).scaled(&q(2, 1))),
            ],
            rhs_factors: vec![
                // Γ(1/2) itself: contributes only the √π it cancels
                g(1, Half, LinearForm::zero()),
                g(1, One, v(C)),
                g(1, One, half_ab.clone()),
                g(1, Half, lin([(-1, 2), (-1, 2), (1, 1), (0, 1)])),
                g(-1, One, v(A).scaled(&q(1, 2))),
                g(-1, Half, v(B).scaled(&q(1, 2))),
                g(-1, Half, lin([(-1, 2), (0, 1), (1, 1), (0, 1)])),
                g(-1, One, lin([(0, 1), (-1, 2), (1, 1), (0, 1)])),
            ],
            raw_hypergeometric: RawHypergeometric {
                numerators: vec![
                    aff(Rational::one(), v(A)),
                    aff(Rational::zero(), v(B)),
                    aff(q(1, 2), v(C)),
                ],
                denominators: vec![
                    aff(Rational::one(), half_ab),
                    aff(Rational::one(), v(C).scaled(&q(2, 1))),
                ],
                z: Rational::one(),
            },
            convergence: Some(aff(q(1, 1), lin([(-1, 1), (-1, 1), (2, 1), (0, 1)]))),
        }
    }

    /// 2F1(a, 1 - a; 1 + c; 1/2)
    fn bailey() -> TheoremDescriptor {
        TheoremDescriptor {
            name: TheoremName::Bailey,
            prefactor: (Rational::one(), Monomial::var(A)),
            weight: WeightFamily::W2,
            base_denominator_exponent: 1,
            lhs_factors: vec![
                factor(Linear, 1, UpToKMinus1, v(A)),
                factor(Linear, 1, UpToK, v(A).scaled(&q(-1, 1))),
                factor(Linear, -1, UpToK, v(C)),
            ],
            rhs_factors: vec![
                g(1, Half, v(C).scaled(&q(1, 2))),
                g(1, One, v(C).scaled(&q(1, 2))),
                g(-1, Half, lin([(1, 2), (0, 1), (1, 2), (0, 1)])),
                g(-1, One, lin([(-1, 2), (0, 1), (1, 2), (0, 1)])),
            ],
            raw_hypergeometric: RawHypergeometric {
                numerators: vec![
                    aff(Rational::zero(), v(A)),
                    aff(Rational::one(), v(A).scaled(&q(-1, 1))),
                ],
                denominators: vec![aff(Rational::one(), v(C))],
                z: q(1, 2),
            },
            convergence: None,
        }
    }

    /// 3F2(b, d, (b+d)/3; (b+d)/2, (1+b+d)/2; 3/4)
    fn wang() -> TheoremDescriptor {
        let bd = lin([(0, 1), (1, 1), (0, 1), (1, 1)]);
        TheoremDescriptor {
            name: TheoremName::Wang,
            prefactor: (q(2, 3), Monomial::var(B).mul(&Monomial::var(D))),
            weight: WeightFamily::W3,
            base_denominator_exponent: 2,
            lhs_factors: vec![
                factor(Linear, 1, UpToKMinus1, v(B)),
                factor(Linear, 1, UpToKMinus1, v(D)),
                factor(Linear, 1, UpToKMinus1, bd.scaled(&q(1, 3))),
                factor(Linear, -1, UpToKMinus1, bd.scaled(&q(1, 2))),
                factor(Odd, -1, UpToK, bd.clone()),
            ],
            rhs_factors: vec![
                g(1, One, bd.clone()),
                g(1, One, v(B).scaled(&q(1, 3))),
                g(1, One, v(D).scaled(&q(1, 3))),
                g(-1, One, v(B)),
                g(-1, One, v(D)),
                g(-1, One, bd.scaled(&q(1, 3))),
            ],
            raw_hypergeometric: RawHypergeometric {
                numerators: vec![
                    aff(Rational::zero(), v(B)),
                    aff(Rational::zero(), v(D)),
                    aff(Rational::zero(), bd.scaled(&q(1, 3))),
                ],
                denominators: vec![
                    aff(Rational::zero(), bd.scaled(&q(1, 2))),
                    aff(q(1, 2), bd.scaled(&q(1, 2))),
                ],
                z: q(3, 4),
            },
            convergence: Some(aff(q(3, 1), bd.scaled(&q(-2, 1)))),
        }
    }

    /// Parameters the descriptor actually depends on.
    pub fn variables(&self) -> Vec<ParamVar> {
        match self.name {
            TheoremName::Gauss | TheoremName::Watson => vec![A, B, C],
            TheoremName::Bailey => vec![A, C],
            TheoremName::Wang => vec![B, D],
        }
    }

    pub fn check_convergence(&self, params: &ParamValues) -> Result<()> {
        if let Some(cond) = &self.convergence {
            let value = cond.eval(params);
            if value.is_negative() || value.is_zero() {
                return Err(Error::Convergence(format!(
                    "{} needs {} + {} > 0, got {}",
                    self.name, cond.constant, cond.linear, value
                )));
            }
        }
        Ok(())
    }
}

/// `1 + prefactor · Σ_{k=1}^{K} w(k)/k^i0 · Π factors(k)`.
pub fn descriptor_term_numeric(
    d: &TheoremDescriptor,
    params: &ParamValues,
    max_terms: u64,
    precision_bits: u32,
) -> Result<Real> {
    d.check_convergence(params)?;
    let wp = precision_bits + 32;
    let prefactor = d.prefactor.0.clone() * params.monomial_value(&d.prefactor.1);
    let args: Vec<Rational> = d
        .lhs_factors
        .iter()
        .map(|f| f.argument.eval(params))
        .collect();
    let mut weight = Real::one(wp);
    let mut product = Real::one(wp);
    let mut sum = Real::zero(wp);
    for k in 1..=max_terms {
        let (n, m) = d.weight.step(k);
        weight = weight.mul_int(n as i64).div_int(m);
        // factors with range UpToK gain index k now, UpToKMinus1 gained k-1 last step
        for (f, arg) in d.lhs_factors.iter().zip(&args) {
            let i = match f.range {
                FactorRange::UpToK => k,
                FactorRange::UpToKMinus1 => k - 1,
            };
            if i == 0 {
                continue;
            }
            let den = Rational::from(f.denominator(i) as i64);
            let ratio = (den.clone() + arg.clone()) / den;
            if ratio.is_zero() {
                if f.exponent < 0 {
                    return Err(Error::ZeroFactor(k));
                }
                return Ok(
                    (&Real::one(wp) + &sum.mul_rational(&prefactor)).with_bits(precision_bits)
                );
            }
            product = if f.exponent > 0 {
                product.mul_rational(&ratio)
            } else {
                product.mul_rational(&ratio.recip())
            };
        }
        let mut term = &weight * &product;
        for _ in 0..d.base_denominator_exponent {
            term = term.div_int(k);
        }
        sum += &term;
    }
    Ok((&Real::one(wp) + &sum.mul_rational(&prefactor)).with_bits(precision_bits))
}

/// Partial sum `Σ_{n=0}^{K}` of the substituted pFq straight from Pochhammer ratios.
pub fn raw_hypergeometric_numeric(
    d: &TheoremDescriptor,
    params: &ParamValues,
    max_terms: u64,
    precision_bits: u32,
) -> Result<Real> {
    d.check_convergence(params)?;
    let wp = precision_bits + 32;
    let raw = &d.raw_hypergeometric;
    let num: Vec<Rational> = raw.numerators.iter().map(|a| a.eval(params)).collect();
    let den: Vec<Rational> = raw.denominators.iter().map(|a| a.eval(params)).collect();
    let mut term = Real::one(wp);
    let mut sum = Real::one(wp);
    for n in 0..max_terms {
        let nr = Rational::from(n as i64);
        let mut ratio = raw.z.clone() / Rational::from(n as i64 + 1);
        for a in &num {
            ratio *= &(a.clone() + nr.clone());
        }
        // a vanishing numerator terminates the series (also the 0/0 limit at the origin)
        if ratio.is_zero() {
            break;
        }
        for b in &den {
            let x = b.clone() + nr.clone();
            if x.is_zero() {
                return Err(Error::ZeroFactor(n + 1));
            }
            ratio = ratio / x;
        }
        term = term.mul_rational(&ratio);
        sum += &term;
    }
    Ok(sum.with_bits(precision_bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::gamma_ratio_numeric;

    const BITS: u32 = 192;

    fn params(a: Rational, b: Rational, c: Rational, d: Rational) -> ParamValues {
        ParamValues::new()
            .with(A, a)
            .with(B, b)
            .with(C, c)
            .with(D, d)
    }

    fn diff_log2(x: &Real, y: &Real) -> i64 {
        let d = (x - y).abs();
        if d.is_zero() {
            i64::MIN
        } else {
            d.ilog2()
        }
    }

    #[test]
    fn names_parse() {
        assert_eq!("GAUSS".parse::<TheoremName>().unwrap(), TheoremName::Gauss);
        assert_eq!("wang".parse::<TheoremName>().unwrap(), TheoremName::Wang);
        assert!("euler".parse::<TheoremName>().is_err());
        assert_eq!(
            serde_json::to_string(&TheoremName::Bailey).unwrap(),
            "\"bailey\""
        );
        assert_eq!(serde_json::to_string(&WeightFamily::W3).unwrap(), "\"W3\"");
    }

    #[test]
    fn weight_steps_match_exact_weights() {
        for w in [WeightFamily::W1, WeightFamily::W2, WeightFamily::W3] {
            let mut r = Rational::one();
            for k in 1..=40 {
                let (n, m) = w.step(k);
                r = r * Rational::new(n as i64, m as i64);
                assert_eq!(r, w.exact(k), "{w} at k = {k}");
            }
        }
        assert_eq!(WeightFamily::W3.exact(3), q(27, 20));
    }

    #[test]
    fn zero_prefactor_gives_one() {
        let zero = ParamValues::new();
        for d in TheoremDescriptor::all() {
            let v = descriptor_term_numeric(&d, &zero, 50, BITS).unwrap();
            assert_eq!(v, Real::one(BITS), "{}", d.name);
            let raw = raw_hypergeometric_numeric(&d, &zero, 50, BITS).unwrap();
            assert_eq!(raw, Real::one(BITS), "{}", d.name);
        }
    }

    #[test]
    fn rhs_gamma_factors_are_balanced() {
        for d in TheoremDescriptor::all() {
            let net: i32 = d
                .rhs_factors
                .iter()
                .filter(|f| f.base == Half)
                .map(|f| f.exponent as i32)
                .sum();
            assert_eq!(net, 0, "{}", d.name);
        }
    }

    #[test]
    fn bailey_descriptor_matches_raw_series() {
        let d = TheoremDescriptor::get(TheoremName::Bailey);
        let p = params(q(1, 5), Rational::zero(), q(1, 7), Rational::zero());
        let x = descriptor_term_numeric(&d, &p, 300, BITS).unwrap();
        let y = raw_hypergeometric_numeric(&d, &p, 300, BITS).unwrap();
        assert!(diff_log2(&x, &y) < -160);
        // and both equal the closed form (geometric convergence)
        let g = gamma_ratio_numeric(&d.rhs_factors, &p, BITS).unwrap();
        assert!(diff_log2(&x, &g) < -100);
    }

    #[test]
    fn wang_descriptor_matches_gamma_ratio() {
        let d = TheoremDescriptor::get(TheoremName::Wang);
        let p = params(Rational::zero(), q(1, 10), Rational::zero(), q(1, 10));
        let x = descriptor_term_numeric(&d, &p, 200, BITS).unwrap();
        let g = gamma_ratio_numeric(&d.rhs_factors, &p, BITS).unwrap();
        assert!((&x - &g).abs().to_f64() < 1e-20);
    }

    #[test]
    fn gauss_raw_series_approaches_gamma_ratio() {
        let d = TheoremDescriptor::get(TheoremName::Gauss);
        let p = params(q(1, 10), q(1, 10), q(1, 5), Rational::zero());
        let raw = raw_hypergeometric_numeric(&d, &p, 10_000, 128).unwrap();
        let g = gamma_ratio_numeric(&d.rhs_factors, &p, 128).unwrap();
        let err = (&raw - &g).abs().to_f64();
        // terms decay like n^-(3/2 + c - a - b), so the remainder is O(K^-(1/2 + c - a - b))
        let k: f64 = 10_000.0;
        let expected_order = k.powf(-(0.5 + 0.2 - 0.1 - 0.1));
        assert!(err > 0.0 && err < expected_order, "err {err:e}");
        let raw_more = raw_hypergeometric_numeric(&d, &p, 20_000, 128).unwrap();
        assert!((&raw_more - &g).abs().to_f64() < err);
    }

    #[test]
    fn convergence_violation_is_rejected() {
        let d = TheoremDescriptor::get(TheoremName::Gauss);
        let p = params(q(1, 2), q(1, 2), Rational::zero(), Rational::zero());
        assert!(matches!(
            descriptor_term_numeric(&d, &p, 10, 128),
            Err(Error::Convergence(_))
        ));
        let w = TheoremDescriptor::get(TheoremName::Wang);
        let p = params(Rational::zero(), q(1, 1), Rational::zero(), q(1, 2));
        assert!(raw_hypergeometric_numeric(&w, &p, 10, 128).is_err());
    }

    #[test]
    fn zero_denominator_factor_is_reported() {
        // c = -2 makes (1 + c/2) vanish in the Gauss denominator product
        let d = TheoremDescriptor::get(TheoremName::Gauss);
        let p = params(Rational::zero(), q(-3, 1), q(-2, 1), Rational::zero());
        assert_eq!(
            descriptor_term_numeric(&d, &p, 10, 128),
            Err(Error::ZeroFactor(2))
        );
    }
}
