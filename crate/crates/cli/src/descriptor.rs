//! Ingredient descriptors: `unit`, `binarion`, `quaternion`, `octonion`, `b12`,
//! `b42`, `okubo`, `para:<comp>`, `h3:<comp>`, `j02`, `dt:<t>`, `k3`, `k10`, `bgd:<n>`.

use std::fmt;
use std::str::FromStr;

use titsforge::composition::{
    composition_make, okubo_make, para_hurwitz, CompositionHandle, CompositionKind, SymmetricCompositionHandle,
};
use titsforge::jordan::{bgd_make, h3_make, jsuper_make, JordanHandle, JordanKind};
use titsforge::rational::Rational;
use titsforge::{Error, Field, Result};

/// Largest `n` accepted in `bgd:<n>`; 𝒪(1;n) has dimension 3ⁿ.
pub const MAX_BGD: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Descriptor {
    Composition(CompositionKind),
    Para(CompositionKind),
    Okubo,
    Jordan(JordanKind),
}

fn bad(s: &str, why: impl fmt::Display) -> Error {
    Error::Parse { location: format!("descriptor {s:?}"), message: why.to_string() }
}

fn comp(s: &str, name: &str) -> Result<CompositionKind> {
    CompositionKind::from_name(name).ok_or_else(|| {
        bad(s, format!("unknown composition algebra {name:?}; expected unit, binarion, quaternion, octonion, b12 or b42"))
    })
}

impl FromStr for Descriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Descriptor> {
        let t = s.trim().to_ascii_lowercase();
        let (head, arg) = match t.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (t.as_str(), None),
        };
        let no_arg = |d: Descriptor| match arg {
            None => Ok(d),
            Some(_) => Err(bad(s, format!("{head} takes no argument"))),
        };
        let need = || arg.filter(|a| !a.is_empty()).ok_or_else(|| bad(s, format!("{head} needs an argument")));
        match head {
            "okubo" => no_arg(Descriptor::Okubo),
            "j02" => no_arg(Descriptor::Jordan(JordanKind::J02)),
            "k3" => no_arg(Descriptor::Jordan(JordanKind::K3)),
            "k10" => no_arg(Descriptor::Jordan(JordanKind::K10)),
            "para" => Ok(Descriptor::Para(comp(s, need()?)?)),
            "h3" => {
                let k = comp(s, need()?)?;
                if k.is_super() {
                    return Err(bad(s, "h3 takes a Hurwitz algebra"));
                }
                Ok(Descriptor::Jordan(JordanKind::H3(k)))
            }
            "dt" => {
                let q: Rational = need()?.parse().map_err(|e| bad(s, e))?;
                if q.is_zero() {
                    return Err(bad(s, "D_t needs t ≠ 0"));
                }
                Ok(Descriptor::Jordan(JordanKind::Dt(q)))
            }
            "bgd" => {
                let n: u32 = need()?.parse().map_err(|_| bad(s, "bgd needs a positive integer"))?;
                if n == 0 || n > MAX_BGD {
                    return Err(bad(s, format!("bgd:<n> needs 1 ≤ n ≤ {MAX_BGD}")));
                }
                Ok(Descriptor::Jordan(JordanKind::Bgd(n)))
            }
            _ => {
                let k = comp(s, head)?;
                no_arg(Descriptor::Composition(k))
            }
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Composition(k) => write!(f, "{}", k.name()),
            Descriptor::Para(k) => write!(f, "para:{}", k.name()),
            Descriptor::Okubo => f.write_str("okubo"),
            Descriptor::Jordan(k) => write!(f, "{k}"),
        }
    }
}

impl Descriptor {
    /// The unital composition (super)algebra named by the descriptor.
    pub fn composition(&self, f: Field) -> Result<CompositionHandle> {
        match self {
            Descriptor::Composition(k) => composition_make(*k, f),
            other => Err(Error::Invalid(format!("{other} is not a unital composition algebra"))),
        }
    }

    /// Symmetric composition (super)algebra; Hurwitz names become para-Hurwitz.
    pub fn symmetric(&self, f: Field) -> Result<SymmetricCompositionHandle> {
        match self {
            Descriptor::Composition(k) | Descriptor::Para(k) => Ok(para_hurwitz(&composition_make(*k, f)?)),
            Descriptor::Okubo => okubo_make(f),
            Descriptor::Jordan(k) => Err(Error::Invalid(format!("{k} is a Jordan algebra, not a composition algebra"))),
        }
    }

    pub fn jordan(&self, f: Field) -> Result<JordanHandle> {
        match self {
            Descriptor::Jordan(JordanKind::H3(k)) => h3_make(&composition_make(*k, f)?),
            Descriptor::Jordan(JordanKind::Bgd(n)) => bgd_make(*n, f),
            Descriptor::Jordan(k) => jsuper_make(k, f),
            other => Err(Error::Invalid(format!("{other} is not a Jordan algebra"))),
        }
    }
}
