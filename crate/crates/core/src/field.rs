//! Coefficient arithmetic: exact rationals or a prime field `F_p`, `p < 2^31`.
//!
//! All arithmetic in the engine goes through [`BaseField`] so there is a
//! single place that knows the modulus; no floating point exists anywhere.

use crate::error::{Error, Result};
use num::{bigint::Sign, BigInt, BigRational, One, Signed, Zero};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum BaseField {
    Rationals,
    /// Prime field with the given characteristic (checked prime, `< 2^31`).
    PrimeField(u64),
}

/// A scalar in one of the supported fields. `Fp` values are kept reduced to
/// the canonical range `0..p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coeff {
    Q(BigRational),
    Fp(u64),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl BaseField {
    pub fn prime(p: u64) -> Result<Self> {
        if p >= 1 << 31 {
            return Err(Error::Invalid(format!("characteristic {p} exceeds 2^31 - 1")));
        }
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        Ok(BaseField::PrimeField(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            BaseField::Rationals => 0,
            BaseField::PrimeField(p) => *p,
        }
    }

    pub fn zero(&self) -> Coeff {
        match self {
            BaseField::Rationals => Coeff::Q(BigRational::zero()),
            BaseField::PrimeField(_) => Coeff::Fp(0),
        }
    }

    pub fn one(&self) -> Coeff {
        match self {
            BaseField::Rationals => Coeff::Q(BigRational::one()),
            BaseField::PrimeField(_) => Coeff::Fp(1),
        }
    }

    pub fn from_i64(&self, n: i64) -> Coeff {
        match self {
            BaseField::Rationals => Coeff::Q(BigRational::from(BigInt::from(n))),
            BaseField::PrimeField(p) => {
                let r = n.rem_euclid(*p as i64) as u64;
                Coeff::Fp(r)
            }
        }
    }

    pub fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match (self, a, b) {
            (BaseField::Rationals, Coeff::Q(x), Coeff::Q(y)) => Coeff::Q(x + y),
            (BaseField::PrimeField(p), Coeff::Fp(x), Coeff::Fp(y)) => Coeff::Fp((x + y) % p),
            _ => panic!("coefficient does not belong to this field"),
        }
    }

    pub fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match (self, a, b) {
            (BaseField::Rationals, Coeff::Q(x), Coeff::Q(y)) => Coeff::Q(x - y),
            (BaseField::PrimeField(p), Coeff::Fp(x), Coeff::Fp(y)) => Coeff::Fp((x + p - y) % p),
            _ => panic!("coefficient does not belong to this field"),
        }
    }

    pub fn neg(&self, a: &Coeff) -> Coeff {
        match (self, a) {
            (BaseField::Rationals, Coeff::Q(x)) => Coeff::Q(-x),
            (BaseField::PrimeField(p), Coeff::Fp(x)) => Coeff::Fp((p - x) % p),
            _ => panic!("coefficient does not belong to this field"),
        }
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match (self, a, b) {
            (BaseField::Rationals, Coeff::Q(x), Coeff::Q(y)) => Coeff::Q(x * y),
            // p < 2^31 so the product of two reduced residues fits in u64.
            (BaseField::PrimeField(p), Coeff::Fp(x), Coeff::Fp(y)) => Coeff::Fp(x * y % p),
            _ => panic!("coefficient does not belong to this field"),
        }
    }

    pub fn inv(&self, a: &Coeff) -> Coeff {
        match (self, a) {
            (BaseField::Rationals, Coeff::Q(x)) => {
                assert!(!x.is_zero(), "division by zero");
                Coeff::Q(x.recip())
            }
            (BaseField::PrimeField(p), Coeff::Fp(x)) => {
                assert!(*x != 0, "division by zero");
                Coeff::Fp(mod_pow(*x, p - 2, *p))
            }
            _ => panic!("coefficient does not belong to this field"),
        }
    }

    pub fn div(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.mul(a, &self.inv(b))
    }

    /// Parse `n`, `-n`, or `a/b` (the latter only meaningful over the
    /// rationals, but accepted over `F_p` as `a * b^-1`).
    pub fn parse_scalar(&self, s: &str) -> Result<Coeff> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad coefficient `{s}`"));
        if let Some((num, den)) = s.split_once('/') {
            let n: i64 = num.trim().parse().map_err(|_| bad())?;
            let d: i64 = den.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            let dc = self.from_i64(d);
            if dc.is_zero() {
                return Err(Error::Parse(format!(
                    "denominator of `{s}` vanishes in characteristic {}",
                    self.characteristic()
                )));
            }
            Ok(self.div(&self.from_i64(n), &dc))
        } else {
            let n: i64 = s.parse().map_err(|_| bad())?;
            Ok(self.from_i64(n))
        }
    }

    /// A square root of -1, when one exists (p = 2 is excluded on purpose:
    /// there 1 = -1 and the quadric normal forms degenerate).
    pub fn sqrt_minus_one(&self) -> Option<Coeff> {
        match self {
            BaseField::Rationals => None,
            BaseField::PrimeField(2) => None,
            BaseField::PrimeField(p) => {
                if p % 4 != 1 {
                    return None;
                }
                // Find a non-residue g, then g^((p-1)/4) squares to -1.
                for g in 2..*p {
                    if mod_pow(g, (p - 1) / 2, *p) == p - 1 {
                        return Some(Coeff::Fp(mod_pow(g, (p - 1) / 4, *p)));
                    }
                }
                None
            }
        }
    }
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

impl Coeff {
    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Q(x) => x.is_zero(),
            Coeff::Fp(x) => *x == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Q(x) => x.is_one(),
            Coeff::Fp(x) => *x == 1,
        }
    }

    /// Exact integer value, if the scalar is an integer (always over `F_p`,
    /// where the canonical representative is returned).
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Coeff::Q(x) => x.is_integer().then(|| x.to_integer()),
            Coeff::Fp(x) => Some(BigInt::from(*x)),
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Q(x) => {
                if x.is_integer() {
                    write!(f, "{}", x.to_integer())
                } else {
                    write!(f, "{}/{}", x.numer(), x.denom())
                }
            }
            Coeff::Fp(x) => write!(f, "{x}"),
        }
    }
}

/// Formatting helper: `true` when the printed form starts with a minus sign.
pub fn coeff_is_negative_display(c: &Coeff) -> bool {
    match c {
        Coeff::Q(x) => x.is_negative(),
        Coeff::Fp(_) => false,
    }
}

/// Signed magnitude of a rational's numerator plus denominator, used only to
/// keep printed test fixtures readable. Not meaningful over `F_p`.
pub fn q_of(n: i64, d: i64) -> Coeff {
    Coeff::Q(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

pub fn q_int(n: i64) -> Coeff {
    Coeff::Q(BigRational::from(BigInt::from(n)))
}

/// Rational helpers used by the Hilbert fitting code.
pub fn big_rational_from_i64(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

pub fn big_rational_is_integer(x: &BigRational) -> bool {
    x.is_integer()
}

pub fn big_rational_to_i64(x: &BigRational) -> Option<i64> {
    if !x.is_integer() {
        return None;
    }
    let n = x.to_integer();
    let (sign, digits) = n.to_u64_digits();
    match (sign, digits.len()) {
        (Sign::NoSign, _) => Some(0),
        (_, 1) => {
            let v = digits[0];
            if sign == Sign::Minus {
                if v <= i64::MAX as u64 + 1 {
                    Some((v as i128 * -1) as i64)
                } else {
                    None
                }
            } else if v <= i64::MAX as u64 {
                Some(v as i64)
            } else {
                None
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_characteristic() {
        match BaseField::prime(6) {
            Err(Error::NonPrime(6)) => {}
            other => panic!("expected NonPrime(6), got {other:?}"),
        }
        assert!(BaseField::prime(2).is_ok());
        assert!(BaseField::prime(5).is_ok());
        assert!(BaseField::prime(101).is_ok());
        assert!(BaseField::prime(1).is_err());
    }

    #[test]
    fn fp_arithmetic_is_modular() {
        let f = BaseField::prime(5).unwrap();
        let two = f.from_i64(2);
        let three = f.from_i64(3);
        assert!(f.add(&two, &three).is_zero());
        assert_eq!(f.mul(&two, &three), f.from_i64(1));
        assert_eq!(f.inv(&two), f.from_i64(3));
        assert_eq!(f.from_i64(-1), f.from_i64(4));
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        let f = BaseField::Rationals;
        let half = f.parse_scalar("1/2").unwrap();
        let third = f.parse_scalar("1/3").unwrap();
        let sum = f.add(&half, &third);
        assert_eq!(sum, q_of(5, 6));
        assert_eq!(f.mul(&half, &f.from_i64(2)), f.one());
    }

    #[test]
    fn sqrt_minus_one_when_available() {
        let f5 = BaseField::prime(5).unwrap();
        let i = f5.sqrt_minus_one().expect("5 = 1 mod 4");
        assert_eq!(f5.mul(&i, &i), f5.from_i64(-1));
        assert!(BaseField::prime(7).unwrap().sqrt_minus_one().is_none());
        assert!(BaseField::Rationals.sqrt_minus_one().is_none());
    }

    #[test]
    fn i64_round_trip() {
        assert_eq!(big_rational_to_i64(&big_rational_from_i64(-42)), Some(-42));
        assert_eq!(big_rational_to_i64(&big_rational_from_i64(0)), Some(0));
    }
}
