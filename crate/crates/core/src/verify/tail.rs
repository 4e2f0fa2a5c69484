//! Asymptotic tail `Σ_{k>K}` for sums with central-binomial weight.
//!
//! Each harmonic symbol is expanded in `u = 1/k` and `L = ln k`, the summand
//! becomes `π^{-1/2} Σ c_{jm} k^{-(i+1/2+j)} L^m`, and every term is summed
//! past `K` by Euler–Maclaurin. The arithmetic is `f64`: the tail is a small
//! correction and its model error dominates rounding by many orders.

use num_traits::ToPrimitive;

use crate::arith::{bernoulli, binomial};
use crate::error::{Error, Result};
use crate::harmonic::{HarmonicPoly, HarmonicSymbol};
use crate::numeric::{constants, Real};
use crate::theorem::WeightFamily;

/// Smallest cutoff for which the asymptotic model is trusted.
pub const TAIL_MIN_TERMS: u64 = 1000;
/// Highest supported expansion order in `1/k`.
pub const MAX_TAIL_ORDER: u32 = 5;

/// `√(πk) · C(2k,k)/4^k` in powers of `1/k`.
const W1_RELATIVE: [f64; 7] = [
    1.0,
    -1.0 / 8.0,
    1.0 / 128.0,
    5.0 / 1024.0,
    -21.0 / 32768.0,
    -399.0 / 262144.0,
    869.0 / 4194304.0,
];

#[derive(Clone, Debug)]
pub struct TailEstimate {
    pub correction: Real,
    /// Heuristic error estimate: twice the change from adding one more order.
    pub bound: f64,
}

/// `Σ c[j][m] u^j L^m` truncated at `u^order`.
#[derive(Clone, Debug)]
struct Asym {
    c: Vec<Vec<f64>>,
}

impl Asym {
    fn zero(order: usize) -> Asym {
        Asym {
            c: vec![Vec::new(); order + 1],
        }
    }

    fn order(&self) -> usize {
        self.c.len() - 1
    }

    fn add_at(&mut self, j: usize, m: usize, x: f64) {
        if j > self.order() {
            return;
        }
        let row = &mut self.c[j];
        if row.len() <= m {
            row.resize(m + 1, 0.0);
        }
        row[m] += x;
    }

    fn constant(order: usize, x: f64) -> Asym {
        let mut a = Asym::zero(order);
        a.add_at(0, 0, x);
        a
    }

    fn u_pow(order: usize, p: usize, x: f64) -> Asym {
        let mut a = Asym::zero(order);
        a.add_at(p, 0, x);
        a
    }

    fn axpy(&mut self, s: f64, other: &Asym) {
        for (j, row) in other.c.iter().enumerate() {
            for (m, x) in row.iter().enumerate() {
                self.add_at(j, m, s * x);
            }
        }
    }

    fn plus(&self, s: f64, other: &Asym) -> Asym {
        let mut a = self.clone();
        a.axpy(s, other);
        a
    }

    fn mul(&self, other: &Asym) -> Asym {
        let mut out = Asym::zero(self.order());
        for (j1, r1) in self.c.iter().enumerate() {
            for (j2, r2) in other.c.iter().enumerate().take(self.order() + 1 - j1) {
                for (m1, x1) in r1.iter().enumerate() {
                    for (m2, x2) in r2.iter().enumerate() {
                        out.add_at(j1 + j2, m1 + m2, x1 * x2);
                    }
                }
            }
        }
        out
    }

    /// Value at `2k`: `u → u/2`, `L → L + ln 2`.
    fn at_double(&self, ln2: f64) -> Asym {
        let mut out = Asym::zero(self.order());
        for (j, row) in self.c.iter().enumerate() {
            let scale = 0.5f64.powi(j as i32);
            for (m, x) in row.iter().enumerate() {
                for q in 0..=m {
                    let b = binomial(m as u64, q as u64).to_f64().unwrap_or(f64::NAN);
                    out.add_at(j, q, scale * x * b * ln2.powi((m - q) as i32));
                }
            }
        }
        out
    }
}

struct Expander {
    order: usize,
    gamma: f64,
    ln2: f64,
}

impl Expander {
    fn new(order: usize) -> Expander {
        Expander {
            order,
            gamma: constants::euler_gamma_value(64).to_f64(),
            ln2: constants::ln2(64).to_f64(),
        }
    }

    fn h(&self, r: u32) -> Asym {
        let n = self.order;
        let mut a = Asym::zero(n);
        if r == 1 {
            a.add_at(0, 1, 1.0);
            a.add_at(0, 0, self.gamma);
            a.add_at(1, 0, 0.5);
            for p in 1..=n / 2 {
                a.add_at(2 * p, 0, -bernoulli(2 * p).to_f64() / (2 * p) as f64);
            }
            return a;
        }
        let r = r as usize;
        a.add_at(0, 0, constants::zeta(r as u32, 64).to_f64());
        a.add_at(r - 1, 0, -1.0 / (r - 1) as f64);
        a.add_at(r, 0, 0.5);
        let mut p = 1;
        while r + 2 * p - 1 <= n {
            let rising: f64 = (0..2 * p - 1).map(|t| (r + t) as f64).product();
            let fact: f64 = (1..=2 * p).map(|t| t as f64).product();
            a.add_at(r + 2 * p - 1, 0, -bernoulli(2 * p).to_f64() / fact * rising);
            p += 1;
        }
        a
    }

    fn o(&self, r: u32) -> Asym {
        let h = self.h(r);
        h.at_double(self.ln2).plus(-0.5f64.powi(r as i32), &h)
    }

    /// `(2k-1)^{-r} = (u/2)^r (1 - u/2)^{-r}`.
    fn odd_last(&self, r: u32) -> Asym {
        let mut a = Asym::zero(self.order);
        for n in 0..=self.order {
            let b = binomial(r as u64 + n as u64 - 1, n as u64)
                .to_f64()
                .unwrap_or(f64::NAN);
            a.add_at(r as usize + n, 0, b * 0.5f64.powi((r as usize + n) as i32));
        }
        a
    }

    fn symbol(&self, s: &HarmonicSymbol) -> Asym {
        let n = self.order;
        match *s {
            HarmonicSymbol::H(r) => self.h(r),
            HarmonicSymbol::O(r) => self.o(r),
            HarmonicSymbol::HPrev(r) => self.h(r).plus(-1.0, &Asym::u_pow(n, r as usize, 1.0)),
            HarmonicSymbol::OPrev(r) => self.o(r).plus(-1.0, &self.odd_last(r)),
            HarmonicSymbol::KInv => Asym::u_pow(n, 1, 1.0),
        }
    }

    fn poly(&self, p: &HarmonicPoly) -> Asym {
        let mut out = Asym::zero(self.order);
        for (t, c) in p.terms() {
            let mut v = Asym::constant(self.order, c.to_f64());
            for (s, e) in t.powers() {
                let x = self.symbol(s);
                for _ in 0..*e {
                    v = v.mul(&x);
                }
            }
            out.axpy(1.0, &v);
        }
        out
    }
}

/// `Σ_{k>K} k^{-s} P(ln k)` by Euler–Maclaurin with two derivative corrections.
fn log_power_tail(s: f64, p: &[f64], k: f64) -> f64 {
    let lk = k.ln();
    let eval =
        |t: f64, q: &[f64]| -> f64 { k.powf(-t) * q.iter().rev().fold(0.0, |acc, x| acc * lk + x) };
    // ∫_K^∞ x^{-s} L^m dx = K^{1-s} Σ_j m!/(m-j)! L^{m-j} / (s-1)^{j+1}
    let mut integral = 0.0;
    for (m, a) in p.iter().enumerate() {
        let mut falling = 1.0;
        for j in 0..=m {
            integral += a * falling * lk.powi((m - j) as i32) / (s - 1.0).powi(j as i32 + 1);
            falling *= (m - j) as f64;
        }
    }
    integral *= k.powf(1.0 - s);
    // x^{-t} Q(L) has derivative x^{-t-1} (Q'(L) - t Q(L)).
    let derive = |t: f64, q: &[f64]| -> Vec<f64> {
        let mut d: Vec<f64> = q.iter().map(|x| -t * x).collect();
        for (m, x) in q.iter().enumerate().skip(1) {
            d[m - 1] += m as f64 * x;
        }
        d
    };
    let d1 = derive(s, p);
    let d2 = derive(s + 1.0, &d1);
    let d3 = derive(s + 2.0, &d2);
    integral - eval(s, p) / 2.0 - eval(s + 1.0, &d1) / 12.0 + eval(s + 3.0, &d3) / 720.0
}

/// Approximates `Σ_{k>K} w(k)/k^i · poly(k)` for the central-binomial family.
pub fn tail_estimate(
    weight: WeightFamily,
    poly: &HarmonicPoly,
    denom_exponent: u32,
    cutoff: u64,
    tail_order: u32,
    bits: u32,
) -> Result<TailEstimate> {
    if weight != WeightFamily::W1 {
        return Err(Error::UnsupportedWeight(weight.to_string()));
    }
    if cutoff < TAIL_MIN_TERMS {
        return Err(Error::TailCutoff {
            got: cutoff,
            min: TAIL_MIN_TERMS,
        });
    }
    let order = tail_order.min(MAX_TAIL_ORDER) as usize;
    let ex = Expander::new(order + 1);
    let mut weight_rel = Asym::zero(order + 1);
    for (j, x) in W1_RELATIVE.iter().enumerate() {
        weight_rel.add_at(j, 0, *x);
    }
    let summand = weight_rel.mul(&ex.poly(poly));
    let k = cutoff as f64;
    let by_order: Vec<f64> = summand
        .c
        .iter()
        .enumerate()
        .map(|(j, row)| log_power_tail(denom_exponent as f64 + 0.5 + j as f64, row, k))
        .collect();
    let scale = std::f64::consts::PI.sqrt().recip();
    let tail: f64 = by_order[..=order].iter().sum::<f64>() * scale;
    let next = by_order[order + 1] * scale;
    let bound = 2.0 * next.abs() + tail.abs() * 1e-14;
    Ok(TailEstimate {
        correction: Real::from_f64(tail, bits),
        bound,
    })
}
