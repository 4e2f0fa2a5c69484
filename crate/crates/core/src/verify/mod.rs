//! Numeric checks of identities: partial sums at high precision, plus an
//! asymptotic tail for the slowly convergent central-binomial family.
//!
//! Identities sharing a weight family are summed in a single pass over `k`.
//! Each distinct pair (harmonic monomial, power of `1/k`) gets one
//! accumulator, and every identity is a rational combination of those.

mod tail;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::{Identity, Status};
use crate::error::{Error, Result};
use crate::harmonic::HarmonicSymbol;
use crate::numeric::Real;
use crate::poly::Term;
use crate::theorem::WeightFamily;
use crate::zeta::{gamma_part, zetapoly_eval};

pub use tail::{tail_estimate, TailEstimate, MAX_TAIL_ORDER, TAIL_MIN_TERMS};

/// Extra bits carried through the summation.
const SUM_GUARD_BITS: u32 = 32;
/// Digits used for decimal strings in reports.
pub const REPORT_DIGITS: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub precision_bits: u32,
    /// Cutoff `K`; `None` picks the family default.
    pub max_terms: Option<u64>,
    /// `None` picks the family default.
    pub tolerance: Option<f64>,
    pub tail_order: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            precision_bits: 192,
            max_terms: None,
            tolerance: None,
            tail_order: 2,
        }
    }
}

impl VerifyConfig {
    pub fn max_terms_for(&self, w: WeightFamily) -> u64 {
        self.max_terms.unwrap_or(match w {
            WeightFamily::W1 => 1_000_000,
            WeightFamily::W2 | WeightFamily::W3 => 500,
        })
    }

    pub fn tolerance_for(&self, w: WeightFamily) -> f64 {
        self.tolerance.unwrap_or(match w {
            WeightFamily::W1 => 1e-6,
            WeightFamily::W2 | WeightFamily::W3 => 1e-20,
        })
    }

    /// Rejects tolerances the working precision cannot resolve.
    pub fn validate(&self, w: WeightFamily) -> Result<()> {
        if self.precision_bits < 64 {
            return Err(Error::Precision(self.precision_bits));
        }
        let tol = self.tolerance_for(w);
        let floor = 2f64.powi(64 - self.precision_bits as i32);
        if tol.is_nan() || tol <= floor {
            return Err(Error::Tolerance {
                tolerance: tol,
                bits: self.precision_bits,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The tail model cannot support the requested tolerance.
    Indeterminate,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub id: String,
    pub lhs_value: Option<Real>,
    pub rhs_value: Option<Real>,
    pub abs_diff: Option<Real>,
    pub terms_used: u64,
    pub tail_correction: Option<Real>,
    pub tail_bound: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub error: Option<String>,
}

/// JSON form of a report with 30-digit decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub id: String,
    pub lhs_value: Option<String>,
    pub rhs_value: Option<String>,
    pub abs_diff: Option<String>,
    pub terms_used: u64,
    pub tail_correction: Option<String>,
    pub tail_bound: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl VerifyReport {
    fn failed(id: &str, tolerance: f64, err: &Error) -> VerifyReport {
        VerifyReport {
            id: id.to_string(),
            lhs_value: None,
            rhs_value: None,
            abs_diff: None,
            terms_used: 0,
            tail_correction: None,
            tail_bound: None,
            tolerance,
            verdict: Verdict::Fail,
            error: Some(err.to_string()),
        }
    }

    pub fn abs_diff_f64(&self) -> Option<f64> {
        self.abs_diff.as_ref().map(Real::to_f64)
    }

    pub fn record(&self) -> ReportRecord {
        let dec = |x: &Option<Real>| x.as_ref().map(|v| v.to_decimal(REPORT_DIGITS));
        ReportRecord {
            id: self.id.clone(),
            lhs_value: dec(&self.lhs_value),
            rhs_value: dec(&self.rhs_value),
            abs_diff: dec(&self.abs_diff),
            terms_used: self.terms_used,
            tail_correction: dec(&self.tail_correction),
            tail_bound: self.tail_bound,
            tolerance: self.tolerance,
            verdict: self.verdict,
            error: self.error.clone(),
        }
    }

    /// Catalog status implied by this report.
    pub fn status(&self, precision_bits: u32) -> Status {
        let diff = self
            .abs_diff
            .as_ref()
            .map(|d| d.to_decimal(REPORT_DIGITS))
            .unwrap_or_else(|| self.error.clone().unwrap_or_default());
        match self.verdict {
            Verdict::Pass => Status::Verified {
                abs_diff: diff,
                precision_bits,
            },
            Verdict::Fail => Status::Failed { abs_diff: diff },
            Verdict::Indeterminate => Status::Unverified,
        }
    }
}

/// Weight values `w(0), w(1), …` by the ratio recurrence.
#[derive(Clone, Debug)]
pub struct WeightRecurrence {
    family: WeightFamily,
    k: u64,
    value: Real,
}

impl WeightRecurrence {
    pub fn new(family: WeightFamily, bits: u32) -> WeightRecurrence {
        WeightRecurrence {
            family,
            k: 0,
            value: Real::one(bits),
        }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn value(&self) -> &Real {
        &self.value
    }

    /// Steps to `k + 1` and returns the new value.
    pub fn advance(&mut self) -> &Real {
        self.k += 1;
        let (num, den) = self.family.step(self.k);
        self.value = self.value.mul_int(num as i64).div_int(den);
        &self.value
    }
}

/// `w(k)` for `k ≥ 1`, reached through the recurrence.
pub fn weight_value(w: WeightFamily, k: u64, bits: u32) -> Real {
    let mut r = WeightRecurrence::new(w, bits + SUM_GUARD_BITS);
    while r.k() < k {
        r.advance();
    }
    r.value().with_bits(bits)
}

/// Product-tree node: `parent · symbol`, or the empty monomial.
struct Node {
    parent: Option<usize>,
    symbol: Option<usize>,
}

/// Shared summation plan for one weight family.
struct Plan {
    symbols: Vec<HarmonicSymbol>,
    symbol_index: BTreeMap<HarmonicSymbol, usize>,
    nodes: Vec<Node>,
    node_index: BTreeMap<Term<HarmonicSymbol>, usize>,
    exponents: Vec<u32>,
    pairs: Vec<(usize, usize)>,
    pair_index: BTreeMap<(usize, u32), usize>,
}

impl Plan {
    fn new() -> Plan {
        Plan {
            symbols: Vec::new(),
            symbol_index: BTreeMap::new(),
            nodes: Vec::new(),
            node_index: BTreeMap::new(),
            exponents: Vec::new(),
            pairs: Vec::new(),
            pair_index: BTreeMap::new(),
        }
    }

    fn symbol(&mut self, s: HarmonicSymbol) -> usize {
        if let Some(&i) = self.symbol_index.get(&s) {
            return i;
        }
        self.symbols.push(s);
        self.symbol_index.insert(s, self.symbols.len() - 1);
        self.symbols.len() - 1
    }

    fn node(&mut self, t: &Term<HarmonicSymbol>) -> usize {
        if let Some(&i) = self.node_index.get(t) {
            return i;
        }
        let node = match t.powers().last() {
            None => Node {
                parent: None,
                symbol: None,
            },
            Some((s, _)) => {
                let parent = t.without(s, 1);
                let parent = (!parent.is_one()).then(|| self.node(&parent));
                Node {
                    parent,
                    symbol: Some(self.symbol(*s)),
                }
            }
        };
        self.nodes.push(node);
        self.node_index.insert(t.clone(), self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn pair(&mut self, t: &Term<HarmonicSymbol>, i: u32) -> usize {
        let n = self.node(t);
        if let Some(&p) = self.pair_index.get(&(n, i)) {
            return p;
        }
        let e = match self.exponents.iter().position(|x| *x == i) {
            Some(e) => e,
            None => {
                self.exponents.push(i);
                self.exponents.len() - 1
            }
        };
        self.pairs.push((n, e));
        self.pair_index.insert((n, i), self.pairs.len() - 1);
        self.pairs.len() - 1
    }

    /// `Σ_{k=1}^{K} w(k) k^{-i} t(k)` for every registered pair.
    fn run(&self, family: WeightFamily, cutoff: u64, wp: u32) -> Vec<Real> {
        let max_order = |pick: fn(&HarmonicSymbol) -> Option<u32>| {
            self.symbols.iter().filter_map(pick).max().unwrap_or(0) as usize
        };
        let max_h = max_order(|s| match s {
            HarmonicSymbol::H(r) | HarmonicSymbol::HPrev(r) => Some(*r),
            HarmonicSymbol::KInv => Some(1),
            _ => None,
        });
        let max_o = max_order(|s| match s {
            HarmonicSymbol::O(r) | HarmonicSymbol::OPrev(r) => Some(*r),
            _ => None,
        });
        let max_pow = max_h.max(*self.exponents.iter().max().unwrap_or(&0) as usize);

        let zero = Real::zero(wp);
        let one = Real::one(wp);
        let mut h = vec![zero.clone(); max_h + 1];
        let mut o = vec![zero.clone(); max_o + 1];
        let mut inv_k = vec![one.clone(); max_pow + 1];
        let mut inv_odd = vec![one.clone(); max_o + 1];
        let mut sym = vec![zero.clone(); self.symbols.len()];
        let mut node_val = vec![zero.clone(); self.nodes.len()];
        let mut base = vec![zero.clone(); self.exponents.len()];
        let mut acc = vec![zero.clone(); self.pairs.len()];
        let mut weight = WeightRecurrence::new(family, wp);

        for k in 1..=cutoff {
            let w = weight.advance();
            if max_pow > 0 {
                inv_k[1] = one.div_int(k);
                for r in 2..=max_pow {
                    inv_k[r] = &inv_k[r - 1] * &inv_k[1];
                }
            }
            if max_o > 0 {
                inv_odd[1] = one.div_int(2 * k - 1);
                for r in 2..=max_o {
                    inv_odd[r] = &inv_odd[r - 1] * &inv_odd[1];
                }
            }
            // Previous-index symbols read the sums before this step's update.
            for (slot, s) in sym.iter_mut().zip(&self.symbols) {
                match *s {
                    HarmonicSymbol::HPrev(r) => *slot = h[r as usize].clone(),
                    HarmonicSymbol::OPrev(r) => *slot = o[r as usize].clone(),
                    _ => {}
                }
            }
            for r in 1..=max_h {
                h[r] += &inv_k[r];
            }
            for r in 1..=max_o {
                o[r] += &inv_odd[r];
            }
            for (slot, s) in sym.iter_mut().zip(&self.symbols) {
                match *s {
                    HarmonicSymbol::H(r) => *slot = h[r as usize].clone(),
                    HarmonicSymbol::O(r) => *slot = o[r as usize].clone(),
                    HarmonicSymbol::KInv => *slot = inv_k[1].clone(),
                    _ => {}
                }
            }
            for (n, node) in self.nodes.iter().enumerate() {
                let v = match (node.parent, node.symbol) {
                    (Some(p), Some(s)) => &node_val[p] * &sym[s],
                    (None, Some(s)) => sym[s].clone(),
                    _ => one.clone(),
                };
                node_val[n] = v;
            }
            for (b, i) in base.iter_mut().zip(&self.exponents) {
                *b = if *i == 0 {
                    w.clone()
                } else {
                    w * &inv_k[*i as usize]
                };
            }
            for (a, (n, e)) in acc.iter_mut().zip(&self.pairs) {
                *a += &(&base[*e] * &node_val[*n]);
            }
        }
        acc
    }
}

/// Checks every identity of one weight family in a single pass.
fn verify_family(
    family: WeightFamily,
    identities: &[&Identity],
    cfg: &VerifyConfig,
) -> Vec<Result<VerifyReport>> {
    let tol = cfg.tolerance_for(family);
    let cutoff = cfg.max_terms_for(family);
    let wp = cfg.precision_bits + SUM_GUARD_BITS;
    let precheck = |id: &Identity| -> Result<()> {
        cfg.validate(family)?;
        if !gamma_part(&id.rhs).is_zero() {
            return Err(Error::GammaInRhs);
        }
        if family == WeightFamily::W1 && cutoff < TAIL_MIN_TERMS {
            return Err(Error::TailCutoff {
                got: cutoff,
                min: TAIL_MIN_TERMS,
            });
        }
        Ok(())
    };

    let mut plan = Plan::new();
    let mut prepared: Vec<std::result::Result<Vec<(usize, crate::arith::Rational)>, Error>> =
        Vec::new();
    for id in identities {
        prepared.push(precheck(id).map(|()| {
            id.lhs
                .poly
                .terms()
                .map(|(t, c)| (plan.pair(t, id.lhs.denom_exponent), c.clone()))
                .collect()
        }));
    }
    let sums = if plan.pairs.is_empty() {
        Vec::new()
    } else {
        plan.run(family, cutoff, wp)
    };

    identities
        .iter()
        .zip(prepared)
        .map(|(id, prep)| {
            let finish = || -> Result<VerifyReport> {
                let terms = prep.clone()?;
                let mut lhs = Real::zero(wp);
                for (p, c) in &terms {
                    lhs += &sums[*p].mul_rational(c);
                }
                let (tail_correction, tail_bound) = if family == WeightFamily::W1 {
                    let t = tail_estimate(
                        family,
                        &id.lhs.poly,
                        id.lhs.denom_exponent,
                        cutoff,
                        cfg.tail_order,
                        wp,
                    )?;
                    lhs += &t.correction;
                    (Some(t.correction), Some(t.bound))
                } else {
                    (None, None)
                };
                let rhs = zetapoly_eval(&id.rhs, wp)?;
                let diff = (&lhs - &rhs).abs();
                let verdict = if tail_bound.is_some_and(|b| b > tol) {
                    Verdict::Indeterminate
                } else if diff.to_f64() <= tol {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
                let out = |x: Real| Some(x.with_bits(cfg.precision_bits));
                Ok(VerifyReport {
                    id: id.id.clone(),
                    lhs_value: out(lhs),
                    rhs_value: out(rhs),
                    abs_diff: out(diff),
                    terms_used: cutoff,
                    tail_correction: tail_correction.and_then(out),
                    tail_bound,
                    tolerance: tol,
                    verdict,
                    error: None,
                })
            };
            finish()
        })
        .collect()
}

/// Checks identities grouped by weight family. Reports come back in input order.
pub fn verify_many(identities: &[&Identity], cfg: &VerifyConfig) -> Vec<VerifyReport> {
    let mut groups: BTreeMap<WeightFamily, Vec<usize>> = BTreeMap::new();
    for (n, id) in identities.iter().enumerate() {
        groups.entry(id.lhs.weight).or_default().push(n);
    }
    let mut out: Vec<Option<VerifyReport>> = vec![None; identities.len()];
    for (family, members) in groups {
        let ids: Vec<&Identity> = members.iter().map(|n| identities[*n]).collect();
        let tol = cfg.tolerance_for(family);
        for (n, r) in members.into_iter().zip(verify_family(family, &ids, cfg)) {
            out[n] = Some(r.unwrap_or_else(|e| VerifyReport::failed(&identities[n].id, tol, &e)));
        }
    }
    out.into_iter().flatten().collect()
}

/// Checks one identity. Errors that prevent evaluation are returned directly.
pub fn verify(identity: &Identity, cfg: &VerifyConfig) -> Result<VerifyReport> {
    verify_family(identity.lhs.weight, &[identity], cfg).remove(0)
}

/// A printed value known to disagree with the derivation.
#[derive(Clone, Debug)]
pub struct Discrepancy {
    pub key: String,
    pub label: String,
    /// Id the engine gives the corresponding derived identity.
    pub engine_id: String,
    pub printed: Identity,
    pub derived: Identity,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct DiscrepancyNote {
    pub key: String,
    pub label: String,
    pub printed: VerifyReport,
    pub derived: VerifyReport,
    pub note: String,
}

impl DiscrepancyNote {
    pub fn message(&self) -> String {
        let diff = |r: &VerifyReport| {
            r.abs_diff
                .as_ref()
                .map_or("n/a".to_string(), |d| d.to_decimal(12))
        };
        format!(
            "{} {}: derived value differs from printed value (printed {:?}, diff {}; derived {:?}, diff {})",
            self.key,
            self.label,
            self.printed.verdict,
            diff(&self.printed),
            self.derived.verdict,
            diff(&self.derived),
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct CatalogVerification {
    pub reports: Vec<VerifyReport>,
    pub discrepancies: Vec<DiscrepancyNote>,
    /// Failures not explained by a known discrepancy.
    pub unexpected_failures: usize,
}

impl CatalogVerification {
    pub fn count(&self, v: Verdict) -> usize {
        self.reports.iter().filter(|r| r.verdict == v).count()
    }
}

/// Verifies a catalog. Identities matching a known discrepancy (by printed key
/// or by engine id) also get their printed and derived versions evaluated, and
/// a failing printed version is reported as a discrepancy, not a failure.
pub fn verify_catalog(
    identities: &[Identity],
    cfg: &VerifyConfig,
    known: &[Discrepancy],
) -> CatalogVerification {
    let matched: Vec<&Discrepancy> = known
        .iter()
        .filter(|d| {
            identities
                .iter()
                .any(|id| id.id == d.engine_id || id.id == d.printed.id)
        })
        .collect();
    let mut all: Vec<&Identity> = identities.iter().collect();
    for d in &matched {
        all.push(&d.printed);
        all.push(&d.derived);
    }
    let mut reports = verify_many(&all, cfg);
    let extra = reports.split_off(identities.len());
    let discrepancies: Vec<DiscrepancyNote> = matched
        .iter()
        .zip(extra.chunks(2))
        .map(|(d, pair)| DiscrepancyNote {
            key: d.key.clone(),
            label: d.label.clone(),
            printed: pair[0].clone(),
            derived: pair[1].clone(),
            note: d.note.clone(),
        })
        .collect();
    let unexpected_failures = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Fail)
        .filter(|r| !matched.iter().any(|d| d.printed.id == r.id))
        .count();
    CatalogVerification {
        reports,
        discrepancies,
        unexpected_failures,
    }
}
