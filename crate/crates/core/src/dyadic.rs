//! Exact dyadic rationals `m * 2^e`.

use alloc::format;
use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact number `mantissa * 2^exponent`.
///
/// The representation is canonical: the mantissa is odd, or zero with
/// exponent zero. Structural equality is therefore value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        match self.mantissa.trailing_zeros() {
            None => self.exponent = 0,
            Some(0) => {}
            Some(tz) => {
                self.mantissa >>= tz;
                self.exponent += tz as i64;
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: 0 }
    }

    /// `2^exponent`.
    pub fn pow2(exponent: i64) -> Self {
        Dyadic { mantissa: BigInt::one(), exponent }
    }

    pub fn from_int(value: i64) -> Self {
        Dyadic::new(BigInt::from(value), 0)
    }

    pub fn from_u64(value: u64) -> Self {
        Dyadic::new(BigInt::from(value), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    /// True when the value is exactly `2^e` for some integer `e`.
    pub fn is_power_of_two(&self) -> bool {
        self.mantissa.is_one()
    }

    /// Multiplies by `2^shift`.
    pub fn mul_pow2(&self, shift: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent + shift }
    }

    /// Exact quotient, when it is itself dyadic.
    pub fn checked_div(&self, other: &Dyadic) -> Option<Dyadic> {
        if other.is_zero() {
            return None;
        }
        let (q, r) = self.mantissa.div_rem(&other.mantissa);
        if !r.is_zero() {
            return None;
        }
        Some(Dyadic::new(q, self.exponent - other.exponent))
    }

    /// Smallest integer `e` with `2^e >= self`. Requires a positive value.
    pub fn ceil_log2(&self) -> Option<i64> {
        if !self.is_positive() {
            return None;
        }
        if self.mantissa.is_one() {
            Some(self.exponent)
        } else {
            Some(self.exponent + self.mantissa.bits() as i64)
        }
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << (self.exponent as u64))
        } else {
            BigRational::new(
                self.mantissa.clone(),
                BigInt::one() << ((-self.exponent) as u64),
            )
        }
    }

    /// Converts an exact rational, failing if its reduced denominator is not
    /// a power of two.
    pub fn from_rational(value: &BigRational) -> Option<Dyadic> {
        let denom = value.denom();
        let tz = denom.trailing_zeros().unwrap_or(0);
        if (denom >> tz) != BigInt::one() {
            return None;
        }
        Some(Dyadic::new(value.numer().clone(), -(tz as i64)))
    }

    /// Nearest `f64`, for display and fitting only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits();
        let (m, e) = if bits > 64 {
            let drop = bits - 64;
            (&self.mantissa >> drop, self.exponent + drop as i64)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        let m = m.to_f64().unwrap_or(0.0);
        let e = e.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        libm::ldexp(m, e)
    }

    /// Exact base-10 expansion (dyadic rationals always terminate).
    pub fn to_decimal_string(&self) -> String {
        if self.exponent >= 0 {
            return (&self.mantissa << (self.exponent as u64)).to_string();
        }
        let places = (-self.exponent) as usize;
        // m / 2^p = m * 5^p / 10^p
        let five = BigInt::from(5u32);
        let scaled = &self.mantissa * num_traits::pow(five, places);
        let negative = scaled.sign() == Sign::Minus;
        let digits = scaled.abs().to_string();
        let digits = if digits.len() <= places {
            let mut padded = "0".repeat(places + 1 - digits.len());
            padded.push_str(&digits);
            padded
        } else {
            digits
        };
        let (int_part, frac_part) = digits.split_at(digits.len() - places);
        let frac_part = frac_part.trim_end_matches('0');
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(int_part);
        if !frac_part.is_empty() {
            out.push('.');
            out.push_str(frac_part);
        }
        out
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl From<i64> for Dyadic {
    fn from(value: i64) -> Self {
        Dyadic::from_int(value)
    }
}

impl From<BigInt> for Dyadic {
    fn from(value: BigInt) -> Self {
        Dyadic::new(value, 0)
    }
}

fn add_impl(a: &Dyadic, b: &Dyadic) -> Dyadic {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let e = a.exponent.min(b.exponent);
    let ma = &a.mantissa << ((a.exponent - e) as u64);
    let mb = &b.mantissa << ((b.exponent - e) as u64);
    Dyadic::new(ma + mb, e)
}

fn mul_impl(a: &Dyadic, b: &Dyadic) -> Dyadic {
    if a.is_zero() || b.is_zero() {
        return Dyadic::zero();
    }
    // product of odd mantissas stays odd
    Dyadic { mantissa: &a.mantissa * &b.mantissa, exponent: a.exponent + b.exponent }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $imp:expr) => {
        impl $trait<&Dyadic> for &Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: &Dyadic) -> Dyadic {
                $imp(self, rhs)
            }
        }
        impl $trait<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                $imp(&self, &rhs)
            }
        }
        impl $trait<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: &Dyadic) -> Dyadic {
                $imp(&self, rhs)
            }
        }
        impl $trait<Dyadic> for &Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                $imp(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_impl);
forward_binop!(Mul, mul, mul_impl);
forward_binop!(Sub, sub, |a: &Dyadic, b: &Dyadic| add_impl(a, &-b));

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -self.mantissa, exponent: self.exponent }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let sa = self.mantissa.sign();
        let sb = other.mantissa.sign();
        if sa != sb {
            return sa.cmp(&sb);
        }
        let e = self.exponent.min(other.exponent);
        let ma = &self.mantissa << ((self.exponent - e) as u64);
        let mb = &other.mantissa << ((other.exponent - e) as u64);
        ma.cmp(&mb)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical form: `m` when the exponent is zero, `m*2^e` otherwise.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exponent)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

fn parse_exponent(s: &str) -> Result<i64> {
    let s = s.trim();
    let s = s.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(s);
    s.trim()
        .parse::<i64>()
        .map_err(|_| Error::Parse(format!("not an exponent: {s:?}")))
}

/// Accepts `m`, `m*2^e`, `m/2^e`, `p/q` with `q` a power of two, and
/// terminating decimals whose value is dyadic.
impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty number".to_string()));
        }
        if let Some((m, e)) = s.split_once("*2^") {
            return Ok(Dyadic::new(parse_int(m)?, parse_exponent(e)?));
        }
        if let Some((m, e)) = s.split_once("/2^") {
            return Ok(Dyadic::new(parse_int(m)?, -parse_exponent(e)?));
        }
        if let Some((p, q)) = s.split_once('/') {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            let r = BigRational::new(parse_int(p)?, q);
            return Dyadic::from_rational(&r)
                .ok_or_else(|| Error::Parse(format!("{s:?} is not a dyadic rational")));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let negative = int_part.trim_start().starts_with('-');
            let int_digits = int_part.trim().trim_start_matches(['-', '+']);
            let mut digits = String::from(if int_digits.is_empty() { "0" } else { int_digits });
            digits.push_str(frac_part);
            let mut numer = parse_int(&digits)?;
            if negative {
                numer = -numer;
            }
            let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
            let r = BigRational::new(numer, denom);
            return Dyadic::from_rational(&r)
                .ok_or_else(|| Error::Parse(format!("{s:?} is not a dyadic rational")));
        }
        Ok(Dyadic::new(parse_int(s)?, 0))
    }
}
