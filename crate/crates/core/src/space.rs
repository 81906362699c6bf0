use std::collections::HashMap;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ℤ₂-degree of a homogeneous element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(b: u8) -> Result<Parity> {
        match b {
            0 => Ok(Parity::Even),
            1 => Ok(Parity::Odd),
            _ => Err(Error::Parity(format!("parity bit must be 0 or 1, got {b}"))),
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// `(-1)^{|a||b|}` as a boolean "negate" flag.
    #[inline]
    pub fn koszul(a: Parity, b: Parity) -> bool {
        a.is_odd() && b.is_odd()
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// A finite ℤ₂-graded vector space with a labelled homogeneous basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperSpace {
    labels: Vec<String>,
    parities: Vec<Parity>,
    index: HashMap<String, usize>,
}

impl SuperSpace {
    pub fn new(basis: Vec<(String, Parity)>) -> Result<SuperSpace> {
        let mut index = HashMap::with_capacity(basis.len());
        let mut labels = Vec::with_capacity(basis.len());
        let mut parities = Vec::with_capacity(basis.len());
        for (i, (l, p)) in basis.into_iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate basis label {l:?}")));
            }
            labels.push(l);
            parities.push(p);
        }
        Ok(SuperSpace { labels, parities, index })
    }

    /// A purely even space with the given labels.
    pub fn even<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<SuperSpace> {
        SuperSpace::new(labels.into_iter().map(|l| (l.into(), Parity::Even)).collect())
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// `(dim even, dim odd)`.
    pub fn dims(&self) -> (usize, usize) {
        let odd = self.parities.iter().filter(|p| p.is_odd()).count();
        (self.dim() - odd, odd)
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parities[i]
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn is_purely_even(&self) -> bool {
        self.parities.iter().all(|p| !p.is_odd())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_arithmetic() {
        assert_eq!(Parity::Odd + Parity::Odd, Parity::Even);
        assert_eq!(Parity::Odd + Parity::Even, Parity::Odd);
        assert!(Parity::koszul(Parity::Odd, Parity::Odd));
        assert!(!Parity::koszul(Parity::Odd, Parity::Even));
        assert!(Parity::from_bit(2).is_err());
    }

    #[test]
    fn labels_unique() {
        let s = SuperSpace::new(vec![("a".into(), Parity::Even), ("a".into(), Parity::Odd)]);
        assert!(s.is_err());
        let s = SuperSpace::new(vec![("a".into(), Parity::Even), ("b".into(), Parity::Odd)]).unwrap();
        assert_eq!(s.dims(), (1, 1));
        assert_eq!(s.index_of("b"), Some(1));
    }
}
