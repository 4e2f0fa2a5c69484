//! The regression corpus of printed identities, the allowlist of printed
//! values known to be wrong, and combination spec files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::engine::{
    combination_id, combine, extract_identities, Identity, ParentRef, Provenance, Status,
    SumExpression,
};
use crate::error::{Error, Result};
use crate::harmonic::hpoly_parse;
use crate::series::Monomial;
use crate::theorem::{TheoremDescriptor, TheoremName, WeightFamily};
use crate::verify::Discrepancy;
use crate::zeta::{zetapoly_parse, ZetaPoly};

const CORPUS_JSON: &str = include_str!("../data/corpus.json");
const ALLOWLIST_JSON: &str = include_str!("../data/allowlist.json");

/// One printed identity read off a single monomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrintedEntry {
    pub key: String,
    pub label: String,
    pub theorem: TheoremName,
    pub monomial: Monomial,
    pub weight: WeightFamily,
    pub denom_exponent: u32,
    pub lhs: String,
    pub rhs: String,
}

/// One printed identity obtained by combining extractions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrintedCombination {
    pub key: String,
    pub label: String,
    pub weight: WeightFamily,
    pub denom_exponent: u32,
    pub lhs: String,
    pub rhs: String,
    pub parents: BTreeMap<String, Rational>,
    #[serde(default = "yes")]
    pub simplify: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub format_version: u32,
    pub propositions: Vec<PrintedEntry>,
    pub combinations: Vec<PrintedCombination>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscrepancyKind {
    /// The printed constant is wrong for the printed sum.
    Rhs,
    /// The printed constant belongs to a different sum than the one printed.
    Lhs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AllowlistEntry {
    pub key: String,
    pub kind: DiscrepancyKind,
    pub printed_lhs: String,
    pub printed_rhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived_lhs: Option<String>,
    pub derived_rhs: String,
    /// `|printed − derived|` evaluated on the printed sum, as a decimal string.
    pub gap: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Allowlist {
    pub format_version: u32,
    pub entries: Vec<AllowlistEntry>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn printed_identity(
    key: &str,
    weight: WeightFamily,
    i: u32,
    lhs: &str,
    rhs: &str,
) -> Result<Identity> {
    Ok(Identity {
        id: format!("printed:{key}"),
        lhs: SumExpression::new(weight, i, hpoly_parse(lhs)?),
        rhs: zetapoly_parse(rhs)?,
        provenance: Provenance::Printed {
            key: key.to_string(),
        },
        status: Status::Unverified,
    })
}

impl Corpus {
    pub fn builtin() -> Corpus {
        Corpus::parse(CORPUS_JSON).expect("shipped corpus is valid")
    }

    pub fn parse(text: &str) -> Result<Corpus> {
        parse_json(text, "corpus")
    }

    /// Printed identities, with ids `printed:<key>`.
    pub fn identities(&self) -> Result<Vec<Identity>> {
        let mut out = Vec::new();
        for p in &self.propositions {
            out.push(printed_identity(
                &p.key,
                p.weight,
                p.denom_exponent,
                &p.lhs,
                &p.rhs,
            )?);
        }
        for c in &self.combinations {
            out.push(printed_identity(
                &c.key,
                c.weight,
                c.denom_exponent,
                &c.lhs,
                &c.rhs,
            )?);
        }
        Ok(out)
    }

    pub fn weight_of(&self, key: &str) -> Option<(WeightFamily, u32)> {
        self.propositions
            .iter()
            .find(|p| p.key == key)
            .map(|p| (p.weight, p.denom_exponent))
            .or_else(|| {
                self.combinations
                    .iter()
                    .find(|c| c.key == key)
                    .map(|c| (c.weight, c.denom_exponent))
            })
    }

    /// Id the engine assigns to the identity behind `key`.
    pub fn engine_id(&self, key: &str) -> Option<String> {
        if self.propositions.iter().any(|p| p.key == key) {
            return Some(key.to_string());
        }
        self.combinations
            .iter()
            .find(|c| c.key == key)
            .map(|c| combination_id(&parent_refs(&c.parents)))
    }

    /// Degree needed to extract every proposition.
    pub fn max_degree(&self) -> u32 {
        self.propositions
            .iter()
            .map(|p| p.monomial.degree())
            .max()
            .unwrap_or(1)
    }
}

impl Allowlist {
    pub fn builtin() -> Allowlist {
        Allowlist::parse(ALLOWLIST_JSON).expect("shipped allowlist is valid")
    }

    pub fn parse(text: &str) -> Result<Allowlist> {
        parse_json(text, "allowlist")
    }

    pub fn get(&self, key: &str) -> Option<&AllowlistEntry> {
        self.entries.iter().find(|e| e.key == key)
    }

    /// Printed and derived identities for every entry, for the verifier.
    pub fn discrepancies(&self, corpus: &Corpus) -> Result<Vec<Discrepancy>> {
        self.entries
            .iter()
            .map(|e| {
                let (w, i) = corpus
                    .weight_of(&e.key)
                    .ok_or_else(|| Error::UnknownIdentity(e.key.clone()))?;
                let printed = printed_identity(&e.key, w, i, &e.printed_lhs, &e.printed_rhs)?;
                let mut derived = printed_identity(
                    &e.key,
                    w,
                    i,
                    e.derived_lhs.as_deref().unwrap_or(&e.printed_lhs),
                    &e.derived_rhs,
                )?;
                derived.id = format!("derived:{}", e.key);
                Ok(Discrepancy {
                    key: e.key.clone(),
                    label: corpus_label(corpus, &e.key),
                    engine_id: corpus.engine_id(&e.key).unwrap_or_default(),
                    printed,
                    derived,
                    note: e.note.clone(),
                })
            })
            .collect()
    }
}

fn corpus_label(corpus: &Corpus, key: &str) -> String {
    corpus
        .propositions
        .iter()
        .find(|p| p.key == key)
        .map(|p| p.label.clone())
        .or_else(|| {
            corpus
                .combinations
                .iter()
                .find(|c| c.key == key)
                .map(|c| c.label.clone())
        })
        .unwrap_or_default()
}

pub fn parent_refs(parents: &BTreeMap<String, Rational>) -> Vec<ParentRef> {
    parents
        .iter()
        .map(|(id, c)| ParentRef {
            id: id.clone(),
            coefficient: c.clone(),
        })
        .collect()
}

/// A request to combine catalog identities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub parents: BTreeMap<String, Rational>,
    #[serde(default = "yes")]
    pub simplify: bool,
}

/// Accepts a single spec, a list of specs, or an object with a
/// `combinations` list (so the corpus itself is a valid spec file).
pub fn parse_combination_specs(text: &str) -> Result<Vec<CombinationSpec>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Wrapped { combinations: Vec<CombinationSpec> },
        List(Vec<CombinationSpec>),
        Single(CombinationSpec),
    }
    Ok(match parse_json::<Repr>(text, "combination spec")? {
        Repr::Wrapped { combinations } => combinations,
        Repr::List(v) => v,
        Repr::Single(s) => vec![s],
    })
}

/// Runs one spec against identities looked up by id.
pub fn apply_combination(spec: &CombinationSpec, catalog: &[Identity]) -> Result<Identity> {
    let parents = spec
        .parents
        .iter()
        .map(|(id, c)| {
            catalog
                .iter()
                .find(|i| &i.id == id)
                .map(|i| (i, c.clone()))
                .ok_or_else(|| Error::UnknownIdentity(id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    combine(&parents, spec.simplify)
}

#[derive(Clone, Debug, PartialEq)]
pub enum RegressionOutcome {
    /// The engine reproduces the printed identity up to a scalar.
    Match,
    /// The engine differs exactly as the allowlist documents.
    Allowlisted,
    Mismatch(String),
}

#[derive(Clone, Debug, Default)]
pub struct RegressionReport {
    pub outcomes: Vec<(String, RegressionOutcome)>,
}

impl RegressionReport {
    pub fn mismatches(&self) -> Vec<(&str, &str)> {
        self.outcomes
            .iter()
            .filter_map(|(k, o)| match o {
                RegressionOutcome::Mismatch(why) => Some((k.as_str(), why.as_str())),
                _ => None,
            })
            .collect()
    }

    pub fn count(&self, want: &RegressionOutcome) -> usize {
        self.outcomes
            .iter()
            .filter(|(_, o)| std::mem::discriminant(o) == std::mem::discriminant(want))
            .count()
    }

    pub fn is_clean(&self) -> bool {
        self.mismatches().is_empty()
    }
}

/// Compares a printed identity against the engine's, consulting the allowlist.
fn compare(
    printed: &Identity,
    engine: &Identity,
    allow: Option<&AllowlistEntry>,
) -> Result<RegressionOutcome> {
    let scaled = |lhs: &SumExpression| -> Option<ZetaPoly> {
        lhs.ratio_to(&engine.lhs).map(|l| engine.rhs.scale(&l))
    };
    let outcome = match scaled(&printed.lhs) {
        Some(expected) if expected == printed.rhs => match allow {
            None => RegressionOutcome::Match,
            Some(_) => RegressionOutcome::Mismatch(
                "allowlisted but the engine agrees with the printed value".into(),
            ),
        },
        Some(expected) => match allow {
            Some(a)
                if a.kind == DiscrepancyKind::Rhs
                    && zetapoly_parse(&a.derived_rhs)? == expected =>
            {
                RegressionOutcome::Allowlisted
            }
            _ => RegressionOutcome::Mismatch(format!(
                "right side differs: engine gives {}",
                crate::zeta::render(&expected, true)
            )),
        },
        None => match allow {
            Some(a) if a.kind == DiscrepancyKind::Lhs => {
                let lhs = SumExpression::new(
                    printed.lhs.weight,
                    printed.lhs.denom_exponent,
                    hpoly_parse(a.derived_lhs.as_deref().unwrap_or_default())?,
                );
                let derived_rhs = zetapoly_parse(&a.derived_rhs)?;
                if scaled(&lhs) == Some(derived_rhs) {
                    RegressionOutcome::Allowlisted
                } else {
                    RegressionOutcome::Mismatch(
                        "allowlisted left side does not match the engine".into(),
                    )
                }
            }
            _ => RegressionOutcome::Mismatch("left side is not a multiple of the engine's".into()),
        },
    };
    Ok(outcome)
}

/// Checks every corpus entry against a fresh extraction.
pub fn regression_check(corpus: &Corpus, allowlist: &Allowlist) -> Result<RegressionReport> {
    let degree = corpus.max_degree();
    let mut engine: Vec<Identity> = Vec::new();
    for name in TheoremName::ALL {
        if corpus.propositions.iter().any(|p| p.theorem == name) {
            engine.extend(extract_identities(&TheoremDescriptor::get(name), degree)?);
        }
    }
    let printed = corpus.identities()?;
    let mut report = RegressionReport::default();
    let mut printed_iter = printed.iter();
    for p in &corpus.propositions {
        let mine = printed_iter.next().expect("one identity per entry");
        let outcome = match engine.iter().find(|e| e.id == p.key) {
            Some(e) => compare(mine, e, allowlist.get(&p.key))?,
            None => RegressionOutcome::Mismatch("no engine identity for this monomial".into()),
        };
        report.outcomes.push((p.key.clone(), outcome));
    }
    for c in &corpus.combinations {
        let mine = printed_iter.next().expect("one identity per entry");
        let spec = CombinationSpec {
            label: Some(c.label.clone()),
            parents: c.parents.clone(),
            simplify: c.simplify,
        };
        let outcome = match apply_combination(&spec, &engine) {
            Ok(e) => compare(mine, &e, allowlist.get(&c.key))?,
            Err(err) => RegressionOutcome::Mismatch(err.to_string()),
        };
        report.outcomes.push((c.key.clone(), outcome));
    }
    for a in &allowlist.entries {
        if !report.outcomes.iter().any(|(k, _)| k == &a.key) {
            report.outcomes.push((
                a.key.clone(),
                RegressionOutcome::Mismatch("allowlist key not in corpus".into()),
            ));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_data_parses() {
        let c = Corpus::builtin();
        assert!(c.propositions.len() >= 50);
        assert_eq!(
            c.identities().unwrap().len(),
            c.propositions.len() + c.combinations.len()
        );
        let a = Allowlist::builtin();
        assert!(a.entries.len() >= 3);
        for e in &a.entries {
            let printed = c
                .propositions
                .iter()
                .map(|p| (&p.key, &p.lhs, &p.rhs))
                .chain(c.combinations.iter().map(|p| (&p.key, &p.lhs, &p.rhs)))
                .find(|(k, _, _)| **k == e.key)
                .unwrap();
            assert_eq!(
                (printed.1, printed.2),
                (&e.printed_lhs, &e.printed_rhs),
                "{}",
                e.key
            );
        }
    }

    #[test]
    fn corpus_matches_engine_except_allowlist() {
        let report = regression_check(&Corpus::builtin(), &Allowlist::builtin()).unwrap();
        assert!(report.is_clean(), "{:#?}", report.mismatches());
        assert_eq!(
            report.count(&RegressionOutcome::Allowlisted),
            Allowlist::builtin().entries.len()
        );
    }

    #[test]
    fn tampered_corpus_is_caught() {
        let mut c = Corpus::builtin();
        c.propositions[0].rhs = "1/3*pi^2".into();
        let report = regression_check(&c, &Allowlist::builtin()).unwrap();
        assert_eq!(report.mismatches().len(), 1);

        let mut a = Allowlist::builtin();
        a.entries.retain(|e| e.key != "wang:b2d1");
        let report = regression_check(&Corpus::builtin(), &a).unwrap();
        assert_eq!(report.mismatches()[0].0, "wang:b2d1");
    }

    #[test]
    fn spec_formats() {
        let one = parse_combination_specs(r#"{"parents": {"gauss:a1b1c1": 1, "gauss:a1b2": -1}}"#)
            .unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].simplify);
        let list =
            parse_combination_specs(r#"[{"parents": {"x": "1/2"}, "simplify": false}]"#).unwrap();
        assert_eq!(list[0].parents["x"], Rational::new(1, 2));
        assert_eq!(
            parse_combination_specs(crate::corpus::CORPUS_JSON)
                .unwrap()
                .len(),
            17
        );
        assert!(parse_combination_specs("{}").is_err());
    }
}
