//! Catalog files: identities (and optionally verification reports) as JSON,
//! plus LaTeX export.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::engine::{Identity, Provenance, Status, SumExpression};
use crate::error::{Error, Result};
use crate::harmonic::{hpoly_from_records, hpoly_latex, hpoly_to_records, HarmonicTermRecord};
use crate::series::Monomial;
use crate::theorem::{TheoremName, WeightFamily};
use crate::verify::ReportRecord;
use crate::zeta::{render_latex, zetapoly_from_records, zetapoly_to_records, ConstTermRecord};

pub const FORMAT_VERSION: u32 = 1;

/// JSON form of one identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomial: Option<Monomial>,
    pub weight: WeightFamily,
    pub denom_exponent: u32,
    pub hpoly: Vec<HarmonicTermRecord>,
    pub rhs: Vec<ConstTermRecord>,
    pub provenance: Provenance,
    pub status: Status,
}

impl IdentityRecord {
    pub fn from_identity(id: &Identity) -> IdentityRecord {
        IdentityRecord {
            id: id.id.clone(),
            theorem: id.theorem(),
            monomial: id.monomial(),
            weight: id.lhs.weight,
            denom_exponent: id.lhs.denom_exponent,
            hpoly: hpoly_to_records(&id.lhs.poly),
            rhs: zetapoly_to_records(&id.rhs),
            provenance: id.provenance.clone(),
            status: id.status.clone(),
        }
    }

    pub fn to_identity(&self) -> Result<Identity> {
        Ok(Identity {
            id: self.id.clone(),
            lhs: SumExpression {
                weight: self.weight,
                denom_exponent: self.denom_exponent,
                poly: hpoly_from_records(&self.hpoly)?,
            },
            rhs: zetapoly_from_records(&self.rhs)?,
            provenance: self.provenance.clone(),
            status: self.status.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogFile {
    pub format_version: u32,
    pub identities: Vec<IdentityRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reports: Option<Vec<ReportRecord>>,
}

/// In-memory catalog with unique ids.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    pub identities: Vec<Identity>,
    pub reports: Option<Vec<ReportRecord>>,
}

impl Catalog {
    pub fn new(identities: Vec<Identity>) -> Result<Catalog> {
        let c = Catalog {
            identities,
            reports: None,
        };
        c.check_unique()?;
        Ok(c)
    }

    fn check_unique(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for id in &self.identities {
            if !seen.insert(id.id.as_str()) {
                return Err(Error::DuplicateIdentity(id.id.clone()));
            }
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Identity> {
        self.identities.iter().find(|i| i.id == id)
    }

    /// Adds an identity; an existing identity with the same id is an error.
    pub fn push(&mut self, id: Identity) -> Result<()> {
        if self.get(&id.id).is_some() {
            return Err(Error::DuplicateIdentity(id.id));
        }
        self.identities.push(id);
        Ok(())
    }

    pub fn to_file(&self) -> CatalogFile {
        CatalogFile {
            format_version: FORMAT_VERSION,
            identities: self
                .identities
                .iter()
                .map(IdentityRecord::from_identity)
                .collect(),
            reports: self.reports.clone(),
        }
    }

    pub fn from_file(file: CatalogFile) -> Result<Catalog> {
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported catalog format_version {}",
                file.format_version
            )));
        }
        let identities = file
            .identities
            .iter()
            .map(IdentityRecord::to_identity)
            .collect::<Result<Vec<_>>>()?;
        let c = Catalog {
            identities,
            reports: file.reports,
        };
        c.check_unique()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("catalog serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Catalog> {
        let file: CatalogFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("catalog: {e}")))?;
        Catalog::from_file(file)
    }
}

/// `\sum_{k=1}^\infty \frac{…}{…} = …` for one identity.
pub fn latex_equation(id: &Identity, pi_form: bool) -> String {
    let poly = &id.lhs.poly;
    let single = poly.len() == 1 && poly.terms().next().is_some_and(|(_, c)| c.is_one());
    let p = if poly.terms().all(|(t, _)| t.is_one()) && single {
        String::new()
    } else if single {
        hpoly_latex(poly)
    } else {
        format!("\\left({}\\right)", hpoly_latex(poly))
    };
    let kpow = match id.lhs.denom_exponent {
        0 => String::new(),
        1 => "k".to_string(),
        i => format!("k^{i}"),
    };
    let (num, den) = match id.lhs.weight {
        WeightFamily::W1 => (format!("\\binom{{2k}}{{k}}{p}"), join_den(&kpow, "2^{2k}")),
        WeightFamily::W2 => (
            if p.is_empty() { "1".to_string() } else { p },
            join_den(&kpow, "2^k"),
        ),
        WeightFamily::W3 => (format!("3^k{p}"), format!("{kpow}\\binom{{2k}}{{k}}")),
    };
    format!(
        "\\sum_{{k=1}}^\\infty \\frac{{{num}}}{{{den}}} = {}",
        render_latex(&id.rhs, pi_form)
    )
}

fn join_den(kpow: &str, rest: &str) -> String {
    if kpow.is_empty() {
        rest.to_string()
    } else {
        format!("{kpow}\\,{rest}")
    }
}

/// Display equations, one per identity; combinations get a comment line
/// naming their parents. An empty catalog gives an empty document.
pub fn export_latex(identities: &[Identity], pi_form: bool) -> String {
    let mut out = String::new();
    for id in identities {
        out.push_str(&format!("% {}\n", id.id));
        if let Provenance::Combination { parents, simplify } = &id.provenance {
            let list: Vec<String> = parents
                .iter()
                .map(|p| format!("({}) {}", p.coefficient, p.id))
                .collect();
            out.push_str(&format!(
                "% combination of {}{}\n",
                list.join(" + "),
                if *simplify { ", simplified" } else { "" }
            ));
        }
        out.push_str("\\[\n");
        out.push_str(&latex_equation(id, pi_form));
        out.push_str("\n\\]\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{combine, extract_identities};
    use crate::theorem::TheoremDescriptor;

    fn gauss() -> Vec<Identity> {
        extract_identities(&TheoremDescriptor::get(TheoremName::Gauss), 3).unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut ids = gauss();
        let a = ids.iter().find(|i| i.id == "gauss:a1b1c1").unwrap().clone();
        let b = ids.iter().find(|i| i.id == "gauss:a1b2").unwrap().clone();
        ids.push(combine(&[(&a, 1.into()), (&b, (-1).into())], true).unwrap());
        ids[0].status = Status::Verified {
            abs_diff: "1.0e-30".into(),
            precision_bits: 192,
        };
        let cat = Catalog::new(ids).unwrap();
        let text = cat.to_json();
        let back = Catalog::from_json(&text).unwrap();
        assert_eq!(back.identities, cat.identities);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn rejects_duplicates_and_versions() {
        let ids = gauss();
        let mut twice = ids.clone();
        twice.push(ids[0].clone());
        assert!(matches!(
            Catalog::new(twice),
            Err(Error::DuplicateIdentity(_))
        ));
        let mut file = Catalog::new(ids).unwrap().to_file();
        file.format_version = 99;
        assert!(Catalog::from_file(file).is_err());
        assert!(Catalog::from_json("{").is_err());
    }

    #[test]
    fn latex_examples() {
        let ids = gauss();
        let ab = ids.iter().find(|i| i.id == "gauss:a1b1").unwrap();
        assert_eq!(
            latex_equation(ab, true),
            "\\sum_{k=1}^\\infty \\frac{\\binom{2k}{k}O_k}{k\\,2^{2k}} = \\frac{\\pi^2}{4}"
        );
        let b = ids.iter().find(|i| i.id == "gauss:b1").unwrap();
        assert_eq!(
            latex_equation(b, true),
            "\\sum_{k=1}^\\infty \\frac{\\binom{2k}{k}}{k\\,2^{2k}} = 2\\ln 2"
        );
        let bailey = extract_identities(&TheoremDescriptor::get(TheoremName::Bailey), 2).unwrap();
        let ac = bailey.iter().find(|i| i.id == "bailey:a1c1").unwrap();
        assert_eq!(
            latex_equation(ac, true),
            "\\sum_{k=1}^\\infty \\frac{H_k}{k\\,2^k} = \\frac{\\pi^2}{12}"
        );
        assert_eq!(export_latex(&[], true), "");
    }

    #[test]
    fn combination_gets_provenance_comment() {
        let ids = gauss();
        let a = ids.iter().find(|i| i.id == "gauss:a1b1c1").unwrap();
        let b = ids.iter().find(|i| i.id == "gauss:a1b2").unwrap();
        let c = combine(&[(a, 1.into()), (b, (-1).into())], true).unwrap();
        let doc = export_latex(&[c], true);
        let lines: Vec<&str> = doc.lines().collect();
        assert!(lines[0].starts_with("% combo:"));
        assert_eq!(
            lines[1],
            "% combination of (1) gauss:a1b1c1 + (-1) gauss:a1b2, simplified"
        );
        assert!(lines[3].contains("O_k}{k^2\\,2^{2k}}"));
    }
}
