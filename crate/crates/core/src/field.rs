//! Scalar fields: ℚ and GF(p) for odd primes p < 2³¹.
//!
//! Both fields share the element type [`Scalar`]. A GF(p) element is stored as
//! the integer `Rational::Small(r, 1)` with `0 <= r < p`; all arithmetic must
//! go through a [`Field`] so that residues stay canonical.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type Scalar = Rational;

/// A ground field of characteristic 0 or an odd prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Rational,
    Prime(u32),
}

pub(crate) fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % p as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(p as i128) as u64)
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Square root modulo an odd prime (Tonelli–Shanks).
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = tt * tt % p;
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    Some(r)
}

impl Field {
    /// Builds the field of the given characteristic.
    pub fn new(characteristic: u64) -> Result<Field> {
        match characteristic {
            0 => Ok(Field::Rational),
            2 => Err(Error::InvalidField("characteristic 2 is not supported".into())),
            p if p >= 1 << 31 => Err(Error::InvalidField(format!("characteristic {p} is not below 2^31"))),
            p if !is_prime(p) => Err(Error::InvalidField(format!("{p} is not prime"))),
            p => Ok(Field::Prime(p as u32)),
        }
    }

    /// Parses `q` (or `0`) and `fp:<p>`.
    pub fn parse_spec(s: &str) -> Result<Field> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") || t == "0" {
            return Ok(Field::Rational);
        }
        let num = t
            .strip_prefix("fp:")
            .or_else(|| t.strip_prefix("gf:"))
            .ok_or_else(|| Error::InvalidField(format!("unknown field {s:?}; expected q or fp:<prime>")))?;
        let p: u64 = num
            .parse()
            .map_err(|_| Error::InvalidField(format!("cannot read characteristic in {s:?}")))?;
        if p == 0 {
            return Err(Error::InvalidField("fp:0 is not a prime field; use q".into()));
        }
        Field::new(p)
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p,
        }
    }

    /// Short name used in descriptors and files: `q` or `fp:<p>`.
    pub fn name(&self) -> String {
        match self {
            Field::Rational => "q".into(),
            Field::Prime(p) => format!("fp:{p}"),
        }
    }

    pub fn zero(&self) -> Scalar {
        Rational::ZERO
    }

    pub fn one(&self) -> Scalar {
        Rational::ONE
    }

    #[inline]
    fn res(a: &Scalar) -> u64 {
        match a {
            Rational::Small(r, _) => *r as u64,
            Rational::Big(_) => unreachable!("GF(p) element stored as big rational"),
        }
    }

    #[inline]
    fn mk(r: u64) -> Scalar {
        Rational::Small(r as i64, 1)
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        *a == Rational::ONE
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Rational => Rational::integer(n),
            Field::Prime(p) => Self::mk(n.rem_euclid(*p as i64) as u64),
        }
    }

    pub fn from_ratio(&self, n: i64, d: i64) -> Result<Scalar> {
        let q = Rational::from_i128(n as i128, d as i128)?;
        self.from_rational(&q)
    }

    /// Image of a rational number; fails when the denominator vanishes in the field.
    pub fn from_rational(&self, q: &Rational) -> Result<Scalar> {
        match self {
            Field::Rational => Ok(q.clone()),
            Field::Prime(p) => q.reduce_mod(*p).map(|r| Self::mk(r as u64)).ok_or(Error::DivisionByZero),
        }
    }

    #[inline]
    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            Field::Rational => a.add(b),
            Field::Prime(p) => {
                let s = Self::res(a) + Self::res(b);
                let p = *p as u64;
                Self::mk(if s >= p { s - p } else { s })
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: &Scalar) -> Scalar {
        match self {
            Field::Rational => a.neg(),
            Field::Prime(p) => {
                let r = Self::res(a);
                Self::mk(if r == 0 { 0 } else { *p as u64 - r })
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            Field::Rational => a.sub(b),
            Field::Prime(_) => self.add(a, &self.neg(b)),
        }
    }

    #[inline]
    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            Field::Rational => a.mul(b),
            Field::Prime(p) => Self::mk(Self::res(a) * Self::res(b) % *p as u64),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        match self {
            Field::Rational => a.inv(),
            Field::Prime(p) => {
                let r = Self::res(a);
                if r == 0 {
                    return Err(Error::DivisionByZero);
                }
                Ok(Self::mk(mod_inverse(r, *p as u64).expect("prime modulus")))
            }
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `1/2`, which exists because the characteristic is never 2.
    pub fn half(&self) -> Scalar {
        self.from_ratio(1, 2).expect("characteristic is not 2")
    }

    pub fn pow(&self, a: &Scalar, e: u32) -> Scalar {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// A square root in the field, if one exists.
    pub fn sqrt(&self, a: &Scalar) -> Option<Scalar> {
        match self {
            Field::Rational => {
                use num_traits::Signed;
                if a.is_zero() {
                    return Some(Rational::ZERO);
                }
                let (n, d) = (a.numer(), a.denom());
                if n.is_negative() {
                    return None;
                }
                let (rn, rd) = (n.sqrt(), d.sqrt());
                if &rn * &rn == n && &rd * &rd == d {
                    Some(Rational::from_big(num_rational::BigRational::new(rn, rd)))
                } else {
                    None
                }
            }
            Field::Prime(p) => sqrt_mod(Self::res(a), *p as u64).map(Self::mk),
        }
    }

    /// Parses a scalar: `a/b` or an integer over ℚ; a residue (or fraction) over GF(p).
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let q: Rational = s.parse()?;
        self.from_rational(&q).map_err(|_| Error::ScalarParse {
            input: s.to_string(),
            reason: format!("denominator vanishes in {}", self.name()),
        })
    }

    pub fn format(&self, a: &Scalar) -> String {
        a.to_string()
    }

    /// A random element: uniform over GF(p), small fractions over ℚ.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match self {
            Field::Rational => {
                let n = rng.gen_range(-9i64..=9);
                let d = rng.gen_range(1i64..=4);
                Rational::from_i128(n as i128, d as i128).expect("positive denominator")
            }
            Field::Prime(p) => Self::mk(rng.gen_range(0..*p as u64)),
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        loop {
            let x = self.random(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// Centered integer representative of a GF(p) element, or `None` over ℚ.
    pub fn centered(&self, a: &Scalar) -> Option<i64> {
        match self {
            Field::Rational => None,
            Field::Prime(p) => {
                let r = Self::res(a) as i64;
                let p = *p as i64;
                Some(if r > p / 2 { r - p } else { r })
            }
        }
    }

    /// Residue in `0..p` for GF(p) elements.
    pub fn residue(&self, a: &Scalar) -> Option<u32> {
        match self {
            Field::Rational => None,
            Field::Prime(_) => Some(Self::res(a) as u32),
        }
    }

    pub fn from_residue(&self, r: u64) -> Scalar {
        match self {
            Field::Rational => Rational::integer(r as i64),
            Field::Prime(p) => Self::mk(r % *p as u64),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn field_make_gates() {
        assert!(Field::new(2).is_err());
        assert!(Field::new(9).is_err());
        assert!(Field::new(1).is_err());
        assert!(Field::new(1 << 31).is_err());
        assert_eq!(Field::new(0).unwrap(), Field::Rational);
        assert_eq!(Field::new(2147483647).unwrap(), Field::Prime(2147483647));
    }

    #[test]
    fn gf3_three_is_zero() {
        let f = Field::new(3).unwrap();
        let one = f.one();
        let s = f.add(&f.add(&one, &one), &one);
        assert!(f.is_zero(&s));
    }

    #[test]
    fn nine_halves() {
        let q = Field::new(0).unwrap();
        assert_eq!(q.from_ratio(9, 2).unwrap().to_string(), "9/2");
        let f5 = Field::new(5).unwrap();
        // 9 ≡ 4 and 2⁻¹ ≡ 3 in GF(5), so 9/2 ≡ 12 ≡ 2
        assert_eq!(f5.from_ratio(9, 2).unwrap(), f5.from_i64(2));
        assert!(Field::new(3).unwrap().from_ratio(1, 3).is_err());
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(Field::parse_spec("q").unwrap(), Field::Rational);
        assert_eq!(Field::parse_spec("fp:7").unwrap(), Field::Prime(7));
        assert!(Field::parse_spec("fp:2").is_err());
        assert!(Field::parse_spec("fp:15").is_err());
        assert!(Field::parse_spec("fp:").is_err());
        assert!(Field::parse_spec("r").is_err());
    }

    #[test]
    fn scalar_parsing() {
        let f = Field::Prime(7);
        assert_eq!(f.parse("10").unwrap(), f.from_i64(3));
        assert_eq!(f.parse("-1").unwrap(), f.from_i64(6));
        assert_eq!(f.parse("1/2").unwrap(), f.from_i64(4));
        assert!(f.parse("1/7").is_err());
        assert_eq!(Field::Rational.parse("-3/6").unwrap().to_string(), "-1/2");
    }

    #[test]
    fn square_roots() {
        for p in [5u32, 7, 13, 17, 97, 65537, 2147483647] {
            let f = Field::Prime(p);
            let mut rng = ChaCha8Rng::seed_from_u64(p as u64);
            for _ in 0..50 {
                let a = f.random(&mut rng);
                let sq = f.mul(&a, &a);
                let r = f.sqrt(&sq).unwrap();
                assert_eq!(f.mul(&r, &r), sq);
            }
        }
        assert!(Field::Prime(7).sqrt(&Field::Prime(7).from_i64(3)).is_none());
        assert_eq!(Field::Rational.sqrt(&"9/4".parse().unwrap()).unwrap().to_string(), "3/2");
        assert!(Field::Rational.sqrt(&Rational::integer(-3)).is_none());
    }

    fn axioms(f: Field, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
            assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            assert_eq!(f.add(&a, &f.neg(&a)), f.zero());
            assert_eq!(f.sub(&a, &b), f.add(&a, &f.neg(&b)));
            if !a.is_zero() {
                assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
            } else {
                assert!(f.inv(&a).is_err());
            }
        }
    }

    #[test]
    fn field_axioms_rational() {
        axioms(Field::Rational, 1);
    }

    #[test]
    fn field_axioms_prime() {
        axioms(Field::Prime(5), 2);
        axioms(Field::Prime(2147483647), 3);
    }
}
