//! Exact rational arithmetic and the combinatorial kernels built on it.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::{LazyLock, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational number, always in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Rational {
        let denom = denom.into();
        assert!(!denom.is_zero(), "rational with zero denominator");
        Rational(BigRational::new(numer.into(), denom))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Rational {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Rational {
        Rational(BigRational::zero())
    }

    pub fn one() -> Rational {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Rational {
        assert!(!self.is_zero(), "inverse of zero");
        Rational(self.0.recip())
    }

    pub fn pow(&self, exp: i32) -> Rational {
        Rational(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// Positive gcd of two rationals: gcd of numerators over lcm of denominators.
    pub fn gcd(&self, other: &Rational) -> Rational {
        if self.is_zero() {
            return other.abs();
        }
        if other.is_zero() {
            return self.abs();
        }
        let n = self.numer().gcd(other.numer());
        let d = self.denom().lcm(other.denom());
        Rational::new(n, d)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_int(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| err())?;
                let q: BigInt = q.trim().parse().map_err(|_| err())?;
                if q.is_zero() {
                    return Err(err());
                }
                Ok(Rational::new(p, q))
            }
            None => Ok(Rational::from_int(s.parse::<BigInt>().map_err(|_| err())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        // Integers are accepted as bare JSON numbers for hand-written spec files.
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Int(i64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Rational::from(n)),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0.is_integer() && *self.0.numer() == BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0
            .partial_cmp(&BigRational::from_integer(BigInt::from(*other)))
    }
}

/// Convenience constructor used throughout the crate and its tests.
pub fn q(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

/// Central binomial coefficient C(2k, k).
pub fn central_binomial(k: u64) -> BigInt {
    let mut c = BigInt::one();
    for j in 1..=k {
        // C(2j,j) = C(2j-2,j-1) * 2(2j-1) / j, exact at every step
        c = c * BigInt::from(2 * (2 * j - 1)) / BigInt::from(j);
    }
    c
}

/// Binomial coefficient C(n, k) as an integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut c = BigInt::one();
    for j in 0..k {
        c = c * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    c
}

static BERNOULLI: LazyLock<Mutex<Vec<Rational>>> =
    LazyLock::new(|| Mutex::new(vec![Rational::one()]));

/// Bernoulli number B_n with the convention B_1 = -1/2.
pub fn bernoulli(n: usize) -> Rational {
    if n == 1 {
        return q(-1, 2);
    }
    if n % 2 == 1 {
        return Rational::zero();
    }
    let mut cache = BERNOULLI.lock().unwrap_or_else(|e| e.into_inner());
    while cache.len() <= n {
        // sum_{j<m} C(m+1, j) B_j = -(m+1) B_m
        let m = cache.len();
        let mut acc = Rational::zero();
        for (j, b) in cache.iter().enumerate() {
            if !b.is_zero() {
                acc += &(Rational::from(binomial(m as u64 + 1, j as u64)) * b);
            }
        }
        let bm = -acc / Rational::from(m as i64 + 1);
        cache.push(bm);
    }
    cache[n].clone()
}
