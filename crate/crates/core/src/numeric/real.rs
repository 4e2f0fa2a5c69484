//! Binary fixed-point reals: a value is `mant · 2^(-bits)`.
//!
//! All operands of a binary operation must carry the same `bits`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Real {
    mant: BigInt,
    bits: u32,
}

/// Integer division rounding to nearest (ties away from zero); `d > 0`.
fn div_round(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_mod_floor(d);
    if (r << 1u32) >= *d {
        q + 1u32
    } else {
        q
    }
}

fn shr_round(n: &BigInt, s: u32) -> BigInt {
    if s == 0 {
        return n.clone();
    }
    let half = BigInt::one() << (s - 1);
    (n + half) >> s
}

impl Real {
    pub fn zero(bits: u32) -> Real {
        Real {
            mant: BigInt::zero(),
            bits,
        }
    }

    pub fn one(bits: u32) -> Real {
        Real {
            mant: BigInt::one() << bits,
            bits,
        }
    }

    pub fn from_int(n: i64, bits: u32) -> Real {
        Real {
            mant: BigInt::from(n) << bits,
            bits,
        }
    }

    pub fn from_bigint(n: &BigInt, bits: u32) -> Real {
        Real {
            mant: n << bits,
            bits,
        }
    }

    pub fn from_rational(r: &Rational, bits: u32) -> Real {
        Real {
            mant: div_round(&(r.numer() << bits), r.denom()),
            bits,
        }
    }

    /// `n / d` correctly rounded.
    pub fn ratio(n: i64, d: i64, bits: u32) -> Real {
        Self::from_rational(&Rational::new(n, d), bits)
    }

    /// Nearest representable value to an `f64` (exact for dyadic inputs).
    pub fn from_f64(x: f64, bits: u32) -> Real {
        assert!(x.is_finite());
        let (m, e) = decompose(x);
        let shift = bits as i64 + e;
        let mant = if shift >= 0 {
            BigInt::from(m) << shift as u32
        } else {
            shr_round(&BigInt::from(m), (-shift) as u32)
        };
        Real { mant, bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Real {
        Real {
            mant: self.mant.abs(),
            bits: self.bits,
        }
    }

    /// Re-rounds to a different precision.
    pub fn with_bits(&self, bits: u32) -> Real {
        let mant = match bits.cmp(&self.bits) {
            Ordering::Equal => self.mant.clone(),
            Ordering::Greater => &self.mant << (bits - self.bits),
            Ordering::Less => shr_round(&self.mant, self.bits - bits),
        };
        Real { mant, bits }
    }

    pub fn mul_int(&self, n: i64) -> Real {
        Real {
            mant: &self.mant * n,
            bits: self.bits,
        }
    }

    pub fn mul_big(&self, n: &BigInt) -> Real {
        Real {
            mant: &self.mant * n,
            bits: self.bits,
        }
    }

    /// Division by a positive integer, truncating toward negative infinity.
    pub fn div_int(&self, n: u64) -> Real {
        debug_assert!(n > 0);
        Real {
            mant: self.mant.div_floor(&BigInt::from(n)),
            bits: self.bits,
        }
    }

    pub fn div_big(&self, n: &BigInt) -> Real {
        Real {
            mant: div_round(&self.mant, n),
            bits: self.bits,
        }
    }

    pub fn mul_rational(&self, r: &Rational) -> Real {
        Real {
            mant: div_round(&(&self.mant * r.numer()), r.denom()),
            bits: self.bits,
        }
    }

    /// Multiplication by `2^e`.
    pub fn ldexp(&self, e: i32) -> Real {
        let mant = if e >= 0 {
            &self.mant << e as u32
        } else {
            shr_round(&self.mant, (-e) as u32)
        };
        Real {
            mant,
            bits: self.bits,
        }
    }

    pub fn recip(&self) -> Real {
        assert!(!self.is_zero(), "reciprocal of zero");
        &Real::one(self.bits) / self
    }

    pub fn square(&self) -> Real {
        self * self
    }

    pub fn powi(&self, n: u32) -> Real {
        let mut out = Real::one(self.bits);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn sqrt(&self) -> Real {
        assert!(!self.is_negative(), "sqrt of negative value");
        Real {
            mant: (&self.mant << self.bits).sqrt(),
            bits: self.bits,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let len = self.mant.bits() as i64;
        let drop = (len - 62).max(0) as u32;
        let m = (&self.mant >> drop).to_f64().unwrap_or(0.0);
        m * 2f64.powi(drop as i32 - self.bits as i32)
    }

    /// Floor of `log2 |x|` for nonzero `x`.
    pub fn ilog2(&self) -> i64 {
        self.mant.bits() as i64 - 1 - self.bits as i64
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let neg = self.is_negative();
        let a = self.mant.abs();
        let ten = BigInt::from(10u32);
        let mut e10 = (self.to_f64().abs()).log10().floor() as i64;
        let scaled = |e10: i64| {
            let p = digits as i64 - 1 - e10;
            let (num, den) = if p >= 0 {
                (
                    &a * num_traits::pow(ten.clone(), p as usize),
                    BigInt::one() << self.bits,
                )
            } else {
                (
                    a.clone(),
                    (BigInt::one() << self.bits) * num_traits::pow(ten.clone(), (-p) as usize),
                )
            };
            div_round(&num, &den)
        };
        let mut n = scaled(e10);
        let limit = num_traits::pow(ten.clone(), digits);
        if n >= limit {
            e10 += 1;
            n = scaled(e10);
        } else if n < num_traits::pow(ten.clone(), digits - 1) {
            e10 -= 1;
            n = scaled(e10);
        }
        let s = n.to_string();
        let sign = if neg { "-" } else { "" };
        if (-5..=15).contains(&e10) {
            if e10 >= 0 {
                let int_len = (e10 + 1) as usize;
                if int_len >= s.len() {
                    format!("{sign}{s}{}", "0".repeat(int_len - s.len()))
                } else {
                    format!("{sign}{}.{}", &s[..int_len], &s[int_len..])
                }
            } else {
                format!("{sign}0.{}{s}", "0".repeat((-e10 - 1) as usize))
            }
        } else {
            format!("{sign}{}.{}e{e10}", &s[..1], &s[1..])
        }
    }

    /// `exp(x)`, computed with internal guard bits.
    pub fn exp(&self) -> Real {
        let bits = self.bits;
        let wp = bits + 32;
        let x = self.with_bits(wp);
        let ln2 = super::constants::ln2_raw(wp);
        // x = n ln2 + r with |r| <= ln2 / 2
        let n = (&x / &ln2).round_to_int();
        let r = &x - &ln2.mul_big(&n);
        // halve r further to speed up the Taylor series
        const HALVINGS: i32 = 12;
        let r = r.ldexp(-HALVINGS);
        let mut sum = Real::one(wp);
        let mut term = Real::one(wp);
        let mut k = 1u64;
        loop {
            term = (&term * &r).div_int(k);
            if term.is_zero() {
                break;
            }
            sum += &term;
            k += 1;
        }
        for _ in 0..HALVINGS {
            sum = sum.square();
        }
        let n = n.to_i32().expect("exponent within range");
        sum.ldexp(n).with_bits(bits)
    }

    /// Natural logarithm of a positive value.
    pub fn ln(&self) -> Real {
        assert!(
            !self.is_negative() && !self.is_zero(),
            "ln of non-positive value"
        );
        let bits = self.bits;
        let wp = bits + 32;
        let x = self.with_bits(wp);
        let e = x.ilog2();
        let m = x.ldexp(-(e as i32)); // m in [1, 2)
        let one = Real::one(wp);
        let t = &(&m - &one) / &(&m + &one);
        let t2 = t.square();
        let mut sum = t.clone();
        let mut power = t;
        let mut j = 1u64;
        loop {
            power = &power * &t2;
            let term = power.div_int(2 * j + 1);
            if term.is_zero() {
                break;
            }
            sum += &term;
            j += 1;
        }
        let ln2 = super::constants::ln2_raw(wp);
        (&sum.mul_int(2) + &ln2.mul_int(e)).with_bits(bits)
    }

    fn round_to_int(&self) -> BigInt {
        shr_round(&self.mant, self.bits)
    }
}

/// Splits a finite `f64` into `m · 2^e` with integer `m`.
fn decompose(x: f64) -> (i64, i64) {
    if x == 0.0 {
        return (0, 0);
    }
    let b = x.to_bits();
    let sign = if b >> 63 == 1 { -1 } else { 1 };
    let exp = ((b >> 52) & 0x7ff) as i64;
    let frac = (b & ((1u64 << 52) - 1)) as i64;
    let (m, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), exp - 1075)
    };
    (sign * m, e)
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(30))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(30);
        f.write_str(&self.to_decimal(digits))
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Real) -> Ordering {
        assert_eq!(self.bits, other.bits, "precision mismatch");
        self.mant.cmp(&other.mant)
    }
}

impl Add<&Real> for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        assert_eq!(self.bits, rhs.bits, "precision mismatch");
        Real {
            mant: &self.mant + &rhs.mant,
            bits: self.bits,
        }
    }
}

impl Sub<&Real> for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        assert_eq!(self.bits, rhs.bits, "precision mismatch");
        Real {
            mant: &self.mant - &rhs.mant,
            bits: self.bits,
        }
    }
}

impl Mul<&Real> for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        assert_eq!(self.bits, rhs.bits, "precision mismatch");
        Real {
            mant: (&self.mant * &rhs.mant) >> self.bits,
            bits: self.bits,
        }
    }
}

impl Div<&Real> for &Real {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        assert_eq!(self.bits, rhs.bits, "precision mismatch");
        assert!(!rhs.is_zero(), "division by zero");
        let (n, d) = if rhs.mant.sign() == Sign::Minus {
            (-(&self.mant << self.bits), -&rhs.mant)
        } else {
            (&self.mant << self.bits, rhs.mant.clone())
        };
        Real {
            mant: div_round(&n, &d),
            bits: self.bits,
        }
    }
}

impl AddAssign<&Real> for Real {
    fn add_assign(&mut self, rhs: &Real) {
        assert_eq!(self.bits, rhs.bits, "precision mismatch");
        self.mant += &rhs.mant;
    }
}

impl SubAssign<&Real> for Real {
    fn sub_assign(&mut self, rhs: &Real) {
        assert_eq!(self.bits, rhs.bits, "precision mismatch");
        self.mant -= &rhs.mant;
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mant: -self.mant,
            bits: self.bits,
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mant: -&self.mant,
            bits: self.bits,
        }
    }
}
