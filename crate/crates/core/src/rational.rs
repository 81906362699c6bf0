//! Arbitrary-precision rationals with an inline `i64` fast path.
//!
//! Nearly every structure constant met in practice is a small fraction, so the
//! common case stays on machine words and only spills to `BigRational` when a
//! numerator or denominator leaves the `i64` range.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational number in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rational {
    /// `num / den` with `den > 0` and `gcd(num, den) = 1`.
    Small(i64, i64),
    /// Only used when the value does not fit the small representation.
    Big(Box<BigRational>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        let (mut x, mut y) = (a as u64, b as u64);
        while y != 0 {
            let t = x % y;
            x = y;
            y = t;
        }
        return x as u128;
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational::Small(0, 1);
    pub const ONE: Rational = Rational::Small(1, 1);

    pub fn integer(n: i64) -> Self {
        Rational::Small(n, 1)
    }

    /// Builds `num / den` from wide integers, normalising sign and common factors.
    pub fn from_i128(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        if num == 0 {
            return Ok(Rational::ZERO);
        }
        let neg = (num < 0) != (den < 0);
        let (n, d) = (num.unsigned_abs(), den.unsigned_abs());
        let g = gcd_u128(n, d);
        let (n, d) = (n / g, d / g);
        if n <= i64::MAX as u128 && d <= i64::MAX as u128 {
            let n = n as i64;
            return Ok(Rational::Small(if neg { -n } else { n }, d as i64));
        }
        let mut bn = BigInt::from(n);
        if neg {
            bn = -bn;
        }
        Ok(Rational::Big(Box::new(BigRational::new_raw(bn, BigInt::from(d)))))
    }

    pub fn from_big(r: BigRational) -> Self {
        // BigRational::new keeps the value reduced, so only the size test remains.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return Rational::Small(n, d);
        }
        Rational::Big(Box::new(r))
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(_, d) => *d == 1,
            Rational::Big(b) => b.is_integer(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small(n, _) => BigInt::from(*n),
            Rational::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small(_, d) => BigInt::from(*d),
            Rational::Big(b) => b.denom().clone(),
        }
    }

    /// Small-representation parts, if the value has one.
    pub fn small_parts(&self) -> Option<(i64, i64)> {
        match self {
            Rational::Small(n, d) => Some((*n, *d)),
            Rational::Big(_) => None,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Rational::Small(n, d) => match n.checked_neg() {
                Some(m) => Rational::Small(m, *d),
                None => Rational::from_big(-self.to_big()),
            },
            Rational::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if let (Rational::Small(a, b), Rational::Small(c, d)) = (self, other) {
            if *b == 1 && *d == 1 {
                if let Some(s) = a.checked_add(*c) {
                    return Rational::Small(s, 1);
                }
            }
            let num = (*a as i128) * (*d as i128) + (*c as i128) * (*b as i128);
            let den = (*b as i128) * (*d as i128);
            return Rational::from_i128(num, den).expect("nonzero denominator");
        }
        Rational::from_big(self.to_big() + other.to_big())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if let (Rational::Small(a, b), Rational::Small(c, d)) = (self, other) {
            if *b == 1 && *d == 1 {
                if let Some(p) = a.checked_mul(*c) {
                    return Rational::Small(p, 1);
                }
            }
            let num = (*a as i128) * (*c as i128);
            let den = (*b as i128) * (*d as i128);
            return Rational::from_i128(num, den).expect("nonzero denominator");
        }
        Rational::from_big(self.to_big() * other.to_big())
    }

    pub fn inv(&self) -> Result<Self> {
        match self {
            Rational::Small(0, _) => Err(Error::DivisionByZero),
            Rational::Small(n, d) => Rational::from_i128(*d as i128, *n as i128),
            Rational::Big(b) => Ok(Rational::from_big(b.recip())),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Image in GF(p), or `None` when the denominator is divisible by `p`.
    pub fn reduce_mod(&self, p: u32) -> Option<u32> {
        let p64 = p as i64;
        let (n, d) = match self {
            Rational::Small(n, d) => (n.rem_euclid(p64) as u64, d.rem_euclid(p64) as u64),
            Rational::Big(b) => {
                let bp = BigInt::from(p);
                let n = b.numer().mod_floor(&bp).to_u64()?;
                let d = b.denom().mod_floor(&bp).to_u64()?;
                (n, d)
            }
        };
        if d == 0 {
            return None;
        }
        let dinv = crate::field::mod_inverse(d, p as u64)?;
        Some(((n * dinv) % p as u64) as u32)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Rational::Small(a, b), Rational::Small(c, d)) = (self, other) {
            return ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)));
        }
        self.to_big().cmp(&other.to_big())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Rational::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_int(s: &str, whole: &str) -> Result<BigInt> {
    let bad = |reason: &str| Error::ScalarParse { input: whole.to_string(), reason: reason.to_string() };
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad("expected an integer or a fraction a/b"));
    }
    BigInt::from_str(s).map_err(|e| bad(&e.to_string()))
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (parse_int(n.trim(), s)?, parse_int(d.trim(), s)?),
            None => (parse_int(t, s)?, BigInt::one()),
        };
        if d.is_zero() {
            return Err(Error::ScalarParse { input: s.to_string(), reason: "zero denominator".into() });
        }
        let r = BigRational::new(n, d);
        let r = if r.denom().is_negative() { BigRational::new(-r.numer(), -r.denom()) } else { r };
        Ok(Rational::from_big(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalises_sign_and_gcd() {
        assert_eq!(Rational::from_i128(6, -4).unwrap(), Rational::Small(-3, 2));
        assert_eq!(Rational::from_i128(0, -7).unwrap(), Rational::ZERO);
        assert!(Rational::from_i128(1, 0).is_err());
    }

    #[test]
    fn spills_to_big_and_back() {
        let big = Rational::integer(i64::MAX).add(&Rational::ONE);
        assert!(matches!(big, Rational::Big(_)));
        let back = big.sub(&Rational::ONE);
        assert_eq!(back, Rational::integer(i64::MAX));
        let huge = Rational::integer(i64::MAX).mul(&Rational::integer(i64::MAX));
        assert_eq!(huge.div(&Rational::integer(i64::MAX)).unwrap(), Rational::integer(i64::MAX));
    }

    #[test]
    fn parse_and_display() {
        let r: Rational = "9/2".parse().unwrap();
        assert_eq!(r.to_string(), "9/2");
        let r: Rational = "-6/-4".parse().unwrap();
        assert_eq!(r.to_string(), "3/2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        let big: Rational = "123456789012345678901234567891/2".parse().unwrap();
        assert_eq!(big.to_string(), "123456789012345678901234567891/2");
    }

    #[test]
    fn reduction_mod_p() {
        let r: Rational = "9/2".parse().unwrap();
        assert_eq!(r.reduce_mod(5), Some(2));
        assert_eq!(r.reduce_mod(3), Some(0));
        assert_eq!("1/3".parse::<Rational>().unwrap().reduce_mod(3), None);
        assert_eq!(Rational::integer(-1).reduce_mod(7), Some(6));
    }
}
