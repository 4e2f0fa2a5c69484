//! Coefficient extraction: expand both sides of a theorem, read off one identity
//! per monomial, and form rational linear combinations of identities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::harmonic::{
    hpoly_eval, hpoly_shift_rewrite, leading_first, product_expansion, HarmonicPoly,
    HarmonicSymbol, MAX_TEMPLATE_DEGREE,
};
use crate::poly::Term;
use crate::series::{Monomial, TruncatedSeries};
use crate::theorem::{TheoremDescriptor, TheoremName, WeightFamily};
use crate::zeta::{gamma_part, reduce_even_zetas, rhs_gamma_series, ZetaPoly};

/// `Σ_{k≥1} w(k) / k^i · P_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SumExpression {
    pub weight: WeightFamily,
    pub denom_exponent: u32,
    pub poly: HarmonicPoly,
}

impl SumExpression {
    /// Builds the canonical form: common powers of `1/k` move into the exponent.
    pub fn new(weight: WeightFamily, denom_exponent: u32, poly: HarmonicPoly) -> SumExpression {
        let mut s = SumExpression {
            weight,
            denom_exponent,
            poly,
        };
        s.canonicalize();
        s
    }

    fn canonicalize(&mut self) {
        if self.poly.is_zero() {
            return;
        }
        let p = self.poly.common_power(&HarmonicSymbol::KInv);
        if p > 0 {
            self.poly = self.poly.divide_power(&HarmonicSymbol::KInv, p);
            self.denom_exponent += p;
        }
    }

    /// Same sum with every `H_{k-1}` rewritten in terms of `H_k` and `1/k`.
    pub fn shift_canonical(&self) -> SumExpression {
        SumExpression::new(
            self.weight,
            self.denom_exponent,
            hpoly_shift_rewrite(&self.poly),
        )
    }

    /// Polynomial multiplied by `(1/k)^(i - base)`, so sums with different
    /// exponents can be compared or added.
    pub fn poly_at_exponent(&self, base: u32) -> HarmonicPoly {
        assert!(base <= self.denom_exponent);
        let extra = self.denom_exponent - base;
        if extra == 0 {
            return self.poly.clone();
        }
        self.poly.mul(&HarmonicPoly::monomial(
            Term::from_powers([(HarmonicSymbol::KInv, extra)]),
            Rational::one(),
        ))
    }

    /// `λ` with `self = λ · other` as sums (after shift rewriting), if any.
    pub fn ratio_to(&self, other: &SumExpression) -> Option<Rational> {
        if self.weight != other.weight || other.poly.is_zero() {
            return None;
        }
        let x = self.shift_canonical();
        let y = other.shift_canonical();
        let base = x.denom_exponent.min(y.denom_exponent);
        let px = x.poly_at_exponent(base);
        let py = y.poly_at_exponent(base);
        let (t, c) = py.terms().next()?;
        let lambda = px.coeff(t) / c.clone();
        (px == py.scale(&lambda)).then_some(lambda)
    }

    /// Exact summand at `k`.
    pub fn term(&self, k: u64) -> Rational {
        let w = self.weight.exact(k);
        w * hpoly_eval(&self.poly, k) / Rational::from(k as i64).pow(self.denom_exponent as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParentRef {
    pub id: String,
    pub coefficient: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Extraction {
        theorem: TheoremName,
        monomial: Monomial,
    },
    Combination {
        parents: Vec<ParentRef>,
        simplify: bool,
    },
    /// Transcribed from the regression corpus rather than derived.
    Printed { key: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum Status {
    Unverified,
    Verified {
        abs_diff: String,
        precision_bits: u32,
    },
    Failed {
        abs_diff: String,
    },
}

/// `lhs = rhs` with where it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Identity {
    pub id: String,
    pub lhs: SumExpression,
    pub rhs: ZetaPoly,
    pub provenance: Provenance,
    pub status: Status,
}

impl Identity {
    pub fn theorem(&self) -> Option<TheoremName> {
        match &self.provenance {
            Provenance::Extraction { theorem, .. } => Some(*theorem),
            _ => None,
        }
    }

    pub fn monomial(&self) -> Option<Monomial> {
        match &self.provenance {
            Provenance::Extraction { monomial, .. } => Some(*monomial),
            _ => None,
        }
    }

    pub fn is_combination(&self) -> bool {
        matches!(self.provenance, Provenance::Combination { .. })
    }
}

pub fn extraction_id(theorem: TheoremName, m: &Monomial) -> String {
    format!("{theorem}:{m}")
}

fn check_degree(degree: u32) -> Result<()> {
    if degree > MAX_TEMPLATE_DEGREE {
        return Err(Error::TemplateDegree {
            requested: degree,
            max: MAX_TEMPLATE_DEGREE,
        });
    }
    Ok(())
}

/// LHS series: prefactor times the product of all factor expansions.
fn lhs_series(d: &TheoremDescriptor, degree: u32) -> Result<TruncatedSeries<HarmonicPoly>> {
    check_degree(degree)?;
    let (coeff, pre) = &d.prefactor;
    let mut out = TruncatedSeries::zero(degree);
    if pre.degree() > degree {
        return Ok(out);
    }
    let inner = degree - pre.degree();
    let mut product = TruncatedSeries::one(inner);
    for f in &d.lhs_factors {
        product = product.mul(&product_expansion(f, inner)?)?;
    }
    for (m, c) in product.terms() {
        out.insert(m.mul(pre), c.scale(coeff));
    }
    Ok(out)
}

/// One sum per monomial of the expanded left side.
pub fn expand_lhs(d: &TheoremDescriptor, degree: u32) -> Result<BTreeMap<Monomial, SumExpression>> {
    Ok(lhs_series(d, degree)?
        .terms()
        .map(|(m, p)| {
            (
                *m,
                SumExpression::new(d.weight, d.base_denominator_exponent, p.clone()),
            )
        })
        .collect())
}

pub fn expand_rhs(d: &TheoremDescriptor, degree: u32) -> Result<TruncatedSeries<ZetaPoly>> {
    check_degree(degree)?;
    let s = rhs_gamma_series(&d.rhs_factors, degree)?;
    Ok(TruncatedSeries::from_terms(
        degree,
        s.terms().map(|(m, c)| (*m, reduce_even_zetas(c))),
    ))
}

/// Divides both sides so the polynomial has content 1 and a positive leading coefficient.
fn normalize(lhs: SumExpression, rhs: ZetaPoly) -> (SumExpression, ZetaPoly) {
    let content = lhs.poly.content();
    let lead = leading_first(&lhs.poly)
        .first()
        .map(|(_, c)| c.is_negative())
        .unwrap_or(false);
    let divisor = if lead { -content } else { content };
    let inv = divisor.recip();
    let poly = lhs.poly.scale(&inv);
    (SumExpression { poly, ..lhs }, rhs.scale(&inv))
}

/// Compares both expansions monomial by monomial (degrees 1..=N).
pub fn extract_identities(d: &TheoremDescriptor, degree: u32) -> Result<Vec<Identity>> {
    let lhs = expand_lhs(d, degree)?;
    let rhs = expand_rhs(d, degree)?;
    let mut out = Vec::new();
    for m in Monomial::all_up_to(&d.variables(), degree) {
        if m.degree() == 0 {
            continue;
        }
        let l = lhs.get(&m);
        let r = rhs.coeff(&m)?;
        let (l, r) = match (l, r.is_zero()) {
            (None, true) => continue,
            (Some(l), false) => (l.clone(), r),
            (Some(_), true) => {
                return Err(Error::Inconsistent {
                    monomial: m.to_string(),
                    detail: "left side present, right side zero".into(),
                })
            }
            (None, false) => {
                return Err(Error::Inconsistent {
                    monomial: m.to_string(),
                    detail: "right side present, left side zero".into(),
                })
            }
        };
        if !gamma_part(&r).is_zero() {
            return Err(Error::Inconsistent {
                monomial: m.to_string(),
                detail: "Euler's gamma survives on the right side".into(),
            });
        }
        let (lhs, rhs) = normalize(l, r);
        out.push(Identity {
            id: extraction_id(d.name, &m),
            lhs,
            rhs,
            provenance: Provenance::Extraction {
                theorem: d.name,
                monomial: m,
            },
            status: Status::Unverified,
        });
    }
    Ok(out)
}

/// Stable id for a combination, independent of parent order.
pub fn combination_id(parents: &[ParentRef]) -> String {
    let mut keys: Vec<String> = parents
        .iter()
        .map(|p| format!("{}*{}", p.id, p.coefficient))
        .collect();
    keys.sort();
    let digest = Sha256::digest(keys.join(";").as_bytes());
    let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    format!("combo:{hex}")
}

/// Rational linear combination of identities sharing a weight family.
pub fn combine(parents: &[(&Identity, Rational)], simplify: bool) -> Result<Identity> {
    let (first, _) = parents.first().ok_or(Error::EmptyCombination)?;
    let weight = first.lhs.weight;
    for (p, _) in parents {
        if p.lhs.weight != weight {
            return Err(Error::MixedWeights(
                weight.to_string(),
                p.lhs.weight.to_string(),
            ));
        }
    }
    let base = parents
        .iter()
        .map(|(p, _)| p.lhs.denom_exponent)
        .min()
        .unwrap_or(1);
    let mut poly = HarmonicPoly::zero();
    let mut rhs = ZetaPoly::zero();
    for (p, c) in parents {
        poly = poly.add(&p.lhs.poly_at_exponent(base).scale(c));
        rhs = rhs.add(&p.rhs.scale(c));
    }
    if simplify {
        poly = hpoly_shift_rewrite(&poly);
    }
    if poly.is_zero() && !rhs.is_zero() {
        return Err(Error::ZeroLhsNonzeroRhs);
    }
    let refs: Vec<ParentRef> = parents
        .iter()
        .map(|(p, c)| ParentRef {
            id: p.id.clone(),
            coefficient: c.clone(),
        })
        .collect();
    Ok(Identity {
        id: combination_id(&refs),
        lhs: SumExpression::new(weight, base, poly),
        rhs,
        provenance: Provenance::Combination {
            parents: refs,
            simplify,
        },
        status: Status::Unverified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::harmonic::{hpoly_parse, hsym, literal_product_series};
    use crate::series::ParamVar;
    use crate::zeta::{ln2_poly, zeta_poly};
    use HarmonicSymbol::*;

    fn m(s: &str) -> Monomial {
        s.parse().unwrap()
    }

    fn find<'a>(ids: &'a [Identity], id: &str) -> &'a Identity {
        ids.iter()
            .find(|i| i.id == id)
            .unwrap_or_else(|| panic!("missing {id}"))
    }

    #[test]
    fn gauss_lhs_examples() {
        let d = TheoremDescriptor::get(TheoremName::Gauss);
        let lhs = expand_lhs(&d, 3).unwrap();
        let ab = &lhs[&m("a1b1")];
        assert_eq!(ab.weight, WeightFamily::W1);
        assert_eq!(ab.denom_exponent, 1);
        assert_eq!(ab.poly, hsym(O(1)).scale(&q(2, 1)));
        assert!(!lhs.contains_key(&m("a1")));
        assert!(lhs.keys().all(|k| k.exponent(ParamVar::B) >= 1));
    }

    #[test]
    fn wang_lhs_example() {
        let d = TheoremDescriptor::get(TheoremName::Wang);
        let lhs = expand_lhs(&d, 3).unwrap();
        let e = &lhs[&m("b2d1")];
        assert_eq!(e.weight, WeightFamily::W3);
        assert_eq!(e.denom_exponent, 2);
        let expected = hsym(HPrev(1))
            .scale(&q(5, 6))
            .sub(&hsym(O(1)))
            .scale(&q(2, 3));
        assert_eq!(e.poly, expected);
    }

    #[test]
    fn rhs_examples() {
        let gauss = expand_rhs(&TheoremDescriptor::get(TheoremName::Gauss), 4).unwrap();
        assert_eq!(
            gauss.coeff(&m("a1b1")).unwrap(),
            zeta_poly(2).scale(&q(3, 1))
        );
        assert_eq!(
            gauss.coeff(&m("1")).unwrap(),
            ZetaPoly::constant(Rational::one())
        );
        let wang = expand_rhs(&TheoremDescriptor::get(TheoremName::Wang), 4).unwrap();
        assert_eq!(
            wang.coeff(&m("b1d1")).unwrap(),
            zeta_poly(2).scale(&q(8, 9))
        );
        assert_eq!(
            wang.coeff(&m("b2d1")).unwrap(),
            zeta_poly(3).scale(&q(-26, 27))
        );
        for d in TheoremDescriptor::all() {
            let s = expand_rhs(&d, 3).unwrap();
            assert_eq!(
                s.coeff(&Monomial::one()).unwrap(),
                ZetaPoly::constant(Rational::one())
            );
        }
    }

    #[test]
    fn printed_extractions() {
        let gauss = extract_identities(&TheoremDescriptor::get(TheoremName::Gauss), 3).unwrap();
        let ab = find(&gauss, "gauss:a1b1");
        assert_eq!(ab.lhs.poly, hsym(O(1)));
        assert_eq!(ab.rhs, zeta_poly(2).scale(&q(3, 2)));
        let b = find(&gauss, "gauss:b1");
        assert_eq!(b.lhs.poly, HarmonicPoly::constant(Rational::one()));
        assert_eq!(b.rhs, ln2_poly().scale(&q(2, 1)));

        let bailey = extract_identities(&TheoremDescriptor::get(TheoremName::Bailey), 2).unwrap();
        let ac = find(&bailey, "bailey:a1c1");
        assert_eq!(ac.lhs.poly, hsym(H(1)));
        assert_eq!(ac.lhs.weight, WeightFamily::W2);
        assert_eq!(ac.rhs, zeta_poly(2).scale(&q(1, 2)));

        let wang = extract_identities(&TheoremDescriptor::get(TheoremName::Wang), 3).unwrap();
        let b2d = find(&wang, "wang:b2d1");
        assert_eq!(b2d.lhs.poly, hpoly_parse("6*O - 5*Hm1").unwrap());
        assert_eq!(b2d.rhs, zeta_poly(3).scale(&q(26, 3)));
    }

    /// The monomial coefficient of the k-th literal summand, computed by brute force.
    fn literal_coefficient(
        d: &TheoremDescriptor,
        k: u64,
        mono: &Monomial,
        degree: u32,
    ) -> Rational {
        let mut s = TruncatedSeries::<Rational>::one(degree);
        for f in &d.lhs_factors {
            s = s.mul(&literal_product_series(f, k, degree)).unwrap();
        }
        let (c, pre) = &d.prefactor;
        match pre.quotient_of(mono) {
            Some(rest) => s.coeff(&rest).unwrap() * c.clone(),
            None => Rational::zero(),
        }
    }

    #[test]
    fn per_k_coefficients_match_literal_products() {
        for d in TheoremDescriptor::all() {
            let lhs = lhs_series(&d, 4).unwrap();
            for mono in Monomial::all_up_to(&d.variables(), 4) {
                let sym = lhs.coeff(&mono).unwrap();
                for k in 1..=10 {
                    assert_eq!(
                        hpoly_eval(&sym, k),
                        literal_coefficient(&d, k, &mono, 4),
                        "{} {mono} k={k}",
                        d.name
                    );
                }
            }
        }
    }

    #[test]
    fn gamma_cancels_at_degree_six() {
        for d in TheoremDescriptor::all() {
            let ids = extract_identities(&d, 6).unwrap();
            assert!(!ids.is_empty());
            for id in &ids {
                assert!(gamma_part(&id.rhs).is_zero(), "{}", id.id);
                assert!(!id.lhs.poly.is_zero());
            }
        }
    }

    #[test]
    fn degree_limit() {
        let d = TheoremDescriptor::get(TheoremName::Gauss);
        assert!(matches!(
            extract_identities(&d, 7),
            Err(Error::TemplateDegree { requested: 7, .. })
        ));
    }

    #[test]
    fn combine_self_difference_is_zero() {
        let ids = extract_identities(&TheoremDescriptor::get(TheoremName::Gauss), 2).unwrap();
        let x = find(&ids, "gauss:a1b1");
        let z = combine(&[(x, q(1, 1)), (x, q(-1, 1))], false).unwrap();
        assert!(z.lhs.poly.is_zero());
        assert!(z.rhs.is_zero());
    }

    #[test]
    fn combine_gauss_examples() {
        let ids = extract_identities(&TheoremDescriptor::get(TheoremName::Gauss), 3).unwrap();
        let bc = find(&ids, "gauss:b1c1");
        let b2 = find(&ids, "gauss:b2");
        let c = combine(&[(bc, q(1, 1)), (b2, q(-1, 1))], true).unwrap();
        assert_eq!(c.lhs.denom_exponent, 2);
        assert_eq!(c.lhs.poly, HarmonicPoly::constant(Rational::one()));
        let expected = zeta_poly(2).sub(&ln2_poly().pow(2).scale(&q(2, 1)));
        assert_eq!(c.rhs, expected);
        assert!(c.id.starts_with("combo:"));

        let abc = find(&ids, "gauss:a1b1c1");
        let ab2 = find(&ids, "gauss:a1b2");
        let c = combine(&[(abc, q(1, 1)), (ab2, q(-1, 1))], true).unwrap();
        assert_eq!(c.lhs.denom_exponent, 2);
        assert_eq!(c.lhs.poly, hsym(O(1)));
        let expected = zeta_poly(3)
            .scale(&q(7, 2))
            .sub(&zeta_poly(2).mul(&ln2_poly()).scale(&q(3, 1)));
        assert_eq!(c.rhs, expected);
    }

    #[test]
    fn combine_errors() {
        let g = extract_identities(&TheoremDescriptor::get(TheoremName::Gauss), 2).unwrap();
        let b = extract_identities(&TheoremDescriptor::get(TheoremName::Bailey), 2).unwrap();
        let x = find(&g, "gauss:a1b1");
        let y = find(&b, "bailey:a1c1");
        assert!(matches!(
            combine(&[(x, q(1, 1)), (y, q(1, 1))], false),
            Err(Error::MixedWeights(..))
        ));
        assert_eq!(combine(&[], false), Err(Error::EmptyCombination));
        let mut bad = x.clone();
        bad.rhs = zeta_poly(2);
        assert_eq!(
            combine(&[(x, q(1, 1)), (&bad, q(-1, 1))], false),
            Err(Error::ZeroLhsNonzeroRhs)
        );
    }

    #[test]
    fn single_parent_clone() {
        let g = extract_identities(&TheoremDescriptor::get(TheoremName::Gauss), 2).unwrap();
        let x = find(&g, "gauss:a1b1");
        let c = combine(&[(x, q(1, 1))], false).unwrap();
        assert_eq!(c.lhs, x.lhs);
        assert_eq!(c.rhs, x.rhs);
        assert!(c.is_combination());
    }

    #[test]
    fn combination_id_ignores_order() {
        let a = ParentRef {
            id: "x".into(),
            coefficient: q(1, 1),
        };
        let b = ParentRef {
            id: "y".into(),
            coefficient: q(-1, 2),
        };
        assert_eq!(
            combination_id(&[a.clone(), b.clone()]),
            combination_id(&[b, a.clone()])
        );
        assert_ne!(
            combination_id(std::slice::from_ref(&a)),
            combination_id(&[a.clone(), a])
        );
    }

    #[test]
    fn ratio_under_shift_rewrite() {
        // Σ w (H - Hm1)/k = Σ w / k^2
        let x = SumExpression::new(WeightFamily::W1, 1, hpoly_parse("2*H - 2*Hm1").unwrap());
        let y = SumExpression::new(WeightFamily::W1, 2, HarmonicPoly::constant(Rational::one()));
        assert_eq!(x.ratio_to(&y), Some(q(2, 1)));
        let z = SumExpression::new(WeightFamily::W2, 2, HarmonicPoly::constant(Rational::one()));
        assert_eq!(x.ratio_to(&z), None);
        let w = SumExpression::new(WeightFamily::W1, 1, hsym(H(1)));
        assert_eq!(w.ratio_to(&y), None);
    }

    #[test]
    fn kinv_powers_move_into_exponent() {
        let e = SumExpression::new(
            WeightFamily::W2,
            1,
            hpoly_parse("Kinv^2*H + Kinv^3").unwrap(),
        );
        assert_eq!(e.denom_exponent, 3);
        assert_eq!(e.poly, hpoly_parse("H + Kinv").unwrap());
        assert_eq!(e.term(2), q(1, 4) * (q(3, 2) + q(1, 2)) / q(8, 1));
    }
}
