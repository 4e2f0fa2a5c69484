//! Numeric log-gamma via the Stirling series, used to evaluate the closed-form
//! side of a summation theorem independently of the symbolic expansion.

use super::constants::pi;
use super::real::Real;
use crate::arith::{bernoulli, Rational};

/// Argument above which the Stirling series is used directly.
fn stirling_threshold(bits: u32) -> i64 {
    (bits as i64 / 6).max(24)
}

/// ln Γ(x) for rational `x > 0`.
pub fn ln_gamma(x: &Rational, bits: u32) -> Real {
    assert!(
        !x.is_negative() && !x.is_zero(),
        "ln_gamma needs a positive argument"
    );
    let wp = bits + 32;
    let threshold = Rational::from(stirling_threshold(bits));
    // shift x up by M so Stirling applies, dividing out x(x+1)...(x+M-1)
    let mut y = x.clone();
    let mut shift_product = Rational::one();
    while y < threshold {
        shift_product *= &y;
        y += &Rational::one();
    }
    let yr = Real::from_rational(&y, wp);
    let ln_y = yr.ln();
    let half = Real::ratio(1, 2, wp);
    // (y - 1/2) ln y - y + ln(2π)/2
    let mut s = &(&(&yr - &half) * &ln_y) - &yr;
    let two_pi = pi(wp).mul_int(2);
    s += &two_pi.ln().ldexp(-1);
    let y2 = &yr * &yr;
    let mut ypow = yr.clone(); // y^(2p-1)
    let mut last = None::<Real>;
    for p in 1..200usize {
        let c = bernoulli(2 * p) / Rational::from((2 * p * (2 * p - 1)) as i64);
        let term = &Real::from_rational(&c, wp) / &ypow;
        if term.is_zero() {
            break;
        }
        if let Some(prev) = &last {
            if term.abs() >= prev.abs() {
                break;
            }
        }
        s += &term;
        last = Some(term);
        ypow = &ypow * &y2;
    }
    if !shift_product.is_one() {
        s -= &Real::from_rational(&shift_product, wp).ln();
    }
    s.with_bits(bits)
}

/// Γ(x) for rational `x > 0`.
pub fn gamma(x: &Rational, bits: u32) -> Real {
    ln_gamma(x, bits + 16).exp().with_bits(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::numeric::constants::pi;

    const B: u32 = 160;

    fn close(x: &Real, y: &Real, bits: i64) -> bool {
        let d = (x - y).abs();
        d.is_zero() || d.ilog2() < -bits
    }

    #[test]
    fn integer_and_half_integer_values() {
        assert!(close(&gamma(&q(1, 1), B), &Real::one(B), 150));
        assert!(close(&gamma(&q(5, 1), B), &Real::from_int(24, B), 145));
        let sqrt_pi = pi(B).sqrt();
        assert!(close(&gamma(&q(1, 2), B), &sqrt_pi, 150));
        // Γ(7/2) = 15√π/8
        assert!(close(
            &gamma(&q(7, 2), B),
            &sqrt_pi.mul_rational(&q(15, 8)),
            148
        ));
    }

    #[test]
    fn recurrence_holds_at_small_arguments() {
        // Γ(1 + x) = x Γ(x)
        let x = q(1, 7);
        let lhs = gamma(&(x.clone() + Rational::one()), B);
        let rhs = gamma(&x, B).mul_rational(&x);
        assert!(close(&lhs, &rhs, 148));
    }
}
