use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Coefficient ring for moment expressions.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Embeds an integer.
    fn from_i64(v: i64) -> Self;
    /// Nearest floating-point value.
    fn to_f64(&self) -> f64;
    /// Text form used when rendering expressions.
    fn render(&self) -> String;
}

impl Coeff for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn render(&self) -> String {
        format!("{self}")
    }
}

impl Coeff for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// The rational `num/den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Decimal text of a rational. Terminating expansions are exact; others are
/// rounded to `digits` places after the point. Trailing zeros are removed.
pub fn decimal(r: &BigRational, digits: usize) -> String {
    let negative = r.numer().sign() == num_bigint::Sign::Minus;
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();
    let int_part = &num / &den;
    let mut rem = &num % &den;
    let ten = num_bigint::BigUint::from(10u32);
    let mut frac = Vec::new();
    let mut exhausted = false;
    for _ in 0..digits {
        if rem == num_bigint::BigUint::from(0u32) {
            exhausted = true;
            break;
        }
        rem *= &ten;
        frac.push((&rem / &den).to_string());
        rem %= &den;
    }
    let mut int_part = int_part;
    if !exhausted && rem != num_bigint::BigUint::from(0u32) {
        // Round half up on the next digit.
        let next = (&rem * &ten) / &den;
        if next >= num_bigint::BigUint::from(5u32) {
            let mut carry = true;
            for d in frac.iter_mut().rev() {
                if !carry {
                    break;
                }
                let v: u8 = d.parse().unwrap_or(0) + 1;
                if v == 10 {
                    *d = "0".into();
                } else {
                    *d = v.to_string();
                    carry = false;
                }
            }
            if carry {
                int_part += 1u32;
            }
        }
    }
    while frac.last().map(|d| d == "0").unwrap_or(false) {
        frac.pop();
    }
    let zero = int_part == num_bigint::BigUint::from(0u32) && frac.is_empty();
    let mut out = String::new();
    if negative && !zero {
        out.push('-');
    }
    out.push_str(&int_part.to_string());
    if !frac.is_empty() {
        out.push('.');
        out.push_str(&frac.concat());
    }
    out
}
