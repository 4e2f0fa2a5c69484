//! High-precision values of π, ln 2, ζ(m) and Euler's γ.
//!
//! Every constant is computed with [`GUARD_BITS`] extra bits and rounded to
//! the requested precision. Results are cached per (constant, precision).

use std::collections::HashMap;
use std::sync::{LazyLock, Mutex};

use num_bigint::BigInt;

use super::real::Real;
use crate::arith::{bernoulli, Rational};

pub const GUARD_BITS: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NumConst {
    Pi,
    Ln2,
    EulerGamma,
    Zeta(u32),
}

static CACHE: LazyLock<Mutex<HashMap<(NumConst, u32), Real>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Cached constant at `bits` precision. Duplicate concurrent computation is harmless.
pub fn constant(c: NumConst, bits: u32) -> Real {
    if let Some(v) = CACHE
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get(&(c, bits))
    {
        return v.clone();
    }
    let wp = bits + GUARD_BITS;
    let v = match c {
        NumConst::Pi => pi_machin(wp),
        NumConst::Ln2 => ln2_artanh(wp),
        NumConst::EulerGamma => euler_gamma(wp),
        NumConst::Zeta(m) => zeta_euler_maclaurin(m, wp),
    }
    .with_bits(bits);
    CACHE
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert((c, bits), v.clone());
    v
}

pub fn pi(bits: u32) -> Real {
    constant(NumConst::Pi, bits)
}

pub fn ln2(bits: u32) -> Real {
    constant(NumConst::Ln2, bits)
}

pub fn zeta(m: u32, bits: u32) -> Real {
    constant(NumConst::Zeta(m), bits)
}

pub fn euler_gamma_value(bits: u32) -> Real {
    constant(NumConst::EulerGamma, bits)
}

/// ln 2 without guard bits, for use inside `exp`/`ln` which add their own.
pub(crate) fn ln2_raw(bits: u32) -> Real {
    constant(NumConst::Ln2, bits)
}

/// `atan(1/n)` by its Taylor series, all in integer fixed point.
pub fn atan_inv(n: u64, bits: u32) -> Real {
    let n2 = n * n;
    let mut power = Real::one(bits).div_int(n);
    let mut sum = power.clone();
    let mut j = 1u64;
    loop {
        power = power.div_int(n2);
        let term = power.div_int(2 * j + 1);
        if term.is_zero() {
            break;
        }
        if j % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        j += 1;
    }
    sum
}

/// π = 16 atan(1/5) − 4 atan(1/239).
fn pi_machin(bits: u32) -> Real {
    &atan_inv(5, bits).mul_int(16) - &atan_inv(239, bits).mul_int(4)
}

/// ln 2 = 2 artanh(1/3) = 2 Σ 1/((2j+1) 3^(2j+1)).
fn ln2_artanh(bits: u32) -> Real {
    let mut power = Real::one(bits).div_int(3);
    let mut sum = power.clone();
    let mut j = 1u64;
    loop {
        power = power.div_int(9);
        let term = power.div_int(2 * j + 1);
        if term.is_zero() {
            break;
        }
        sum += &term;
        j += 1;
    }
    sum.mul_int(2)
}

/// Euler–Maclaurin cutoff for ζ at a given precision.
fn zeta_cutoff(bits: u32) -> u64 {
    (bits as u64 / 3).max(16)
}

/// ζ(s) = Σ_{k<N} k^-s + N^(1-s)/(s-1) + N^-s/2 + Σ_p B_2p/(2p)! (s)_(2p-1) N^(-s-2p+1).
pub fn zeta_euler_maclaurin_with_cutoff(s: u32, n: u64, bits: u32) -> Real {
    assert!(s >= 2, "zeta pole at s = 1");
    let mut sum = Real::zero(bits);
    for k in 1..n {
        sum += &Real::one(bits).div_big(&BigInt::from(k).pow(s));
    }
    let n_pow_s = BigInt::from(n).pow(s);
    let inv_ns = Real::one(bits).div_big(&n_pow_s);
    sum += &inv_ns.mul_int(n as i64).div_int(s as u64 - 1);
    sum += &inv_ns.ldexp(-1);
    // correction terms: B_2p/(2p)! · s(s+1)...(s+2p-2) · N^(-s-2p+1)
    let mut rising = Rational::from(s as i64); // (s)_(2p-1)
    let mut factorial = Rational::from(2); // (2p)!
    let mut npow = inv_ns.div_int(n); // N^(-s-1)
    let mut p = 1usize;
    let mut last = None::<Real>;
    loop {
        let coeff = bernoulli(2 * p) / &factorial * &rising;
        let term = npow.mul_rational(&coeff);
        if term.is_zero() {
            break;
        }
        // asymptotic series: stop once terms stop shrinking
        if let Some(prev) = &last {
            if term.abs() >= prev.abs() {
                break;
            }
        }
        sum += &term;
        last = Some(term);
        let pp = 2 * p as i64;
        rising = rising * Rational::from((s as i64 + pp - 1) * (s as i64 + pp));
        factorial = factorial * Rational::from((pp + 1) * (pp + 2));
        npow = npow.div_int(n * n);
        p += 1;
    }
    sum
}

fn zeta_euler_maclaurin(s: u32, bits: u32) -> Real {
    zeta_euler_maclaurin_with_cutoff(s, zeta_cutoff(bits), bits)
}

/// γ = H_N − ln N − 1/(2N) + Σ_p B_2p / (2p N^2p) with N a power of two.
fn euler_gamma(bits: u32) -> Real {
    let j = (bits / 24).clamp(6, 14);
    let n = 1u64 << j;
    let mut h = Real::zero(bits);
    for k in 1..=n {
        h += &Real::one(bits).div_int(k);
    }
    let mut g = &h - &ln2_artanh(bits).mul_int(j as i64);
    g -= &Real::one(bits).div_int(2 * n);
    let mut npow = Real::one(bits).div_int(n * n);
    let mut last = None::<Real>;
    for p in 1.. {
        let term = npow.mul_rational(&(bernoulli(2 * p) / Rational::from(2 * p as i64)));
        if term.is_zero() {
            break;
        }
        if let Some(prev) = &last {
            if term.abs() >= prev.abs() {
                break;
            }
        }
        g += &term;
        last = Some(term);
        npow = npow.div_int(n * n);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u32 = 128;

    fn agree(x: &Real, y: &Real, bits: i64) -> bool {
        (x - y).abs().is_zero() || (x - y).abs().ilog2() < -bits
    }

    #[test]
    fn pi_two_machin_formulas() {
        // Størmer: π/4 = 44 atan(1/57) + 7 atan(1/239) − 12 atan(1/682) + 24 atan(1/12943)
        let wp = B + 16;
        let stormer = &(&(&atan_inv(57, wp).mul_int(44) + &atan_inv(239, wp).mul_int(7))
            - &atan_inv(682, wp).mul_int(12))
            + &atan_inv(12943, wp).mul_int(24);
        let stormer = stormer.mul_int(4).with_bits(B);
        assert!(agree(&pi(B), &stormer, 120));
        assert!(pi(B).to_decimal(30).starts_with("3.14159265358979323846"));
    }

    #[test]
    fn ln2_against_geometric_series() {
        // ln 2 = Σ 1/(k 2^k)
        let wp = B + 16;
        let mut sum = Real::zero(wp);
        let mut power = Real::one(wp);
        for k in 1..=200u64 {
            power = power.ldexp(-1);
            sum += &power.div_int(k);
        }
        assert!(agree(&ln2(B), &sum.with_bits(B), 120));
        assert!(ln2(B).to_decimal(30).starts_with("0.69314718055994530941"));
    }

    #[test]
    fn zeta_independent_cutoffs() {
        let a = zeta_euler_maclaurin_with_cutoff(3, 30, B + 16).with_bits(B);
        let b = zeta_euler_maclaurin_with_cutoff(3, 90, B + 16).with_bits(B);
        assert!(agree(&a, &b, 100));
        assert!(zeta(3, B)
            .to_decimal(30)
            .starts_with("1.20205690315959428539"));
    }

    #[test]
    fn even_zeta_matches_pi_forms() {
        let p = pi(B);
        let z2 = p.square().div_int(6);
        let z4 = p.powi(4).div_int(90);
        assert!(agree(&zeta(2, B), &z2, 120));
        assert!(agree(&zeta(4, B), &z4, 118));
        let z6 = p.powi(6).div_int(945);
        assert!(agree(&zeta(6, B), &z6, 116));
    }

    #[test]
    fn euler_gamma_digits() {
        assert!(euler_gamma_value(B)
            .to_decimal(30)
            .starts_with("0.57721566490153286060651209"));
    }

    #[test]
    fn guarded_precision_at_192_bits() {
        let p = pi(192);
        let stormer = pi_machin(260).with_bits(192);
        assert!(agree(&p, &stormer, 190));
    }
}
