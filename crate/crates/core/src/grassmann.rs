//! Finite Grassmann algebras and Grassmann envelopes of superalgebras.
//!
//! A monomial `e_{i1} ... e_{ik}` with `i1 < ... < ik` is a bitmask. Envelope
//! elements are finite sums `Σ a_S ⊗ e_S` with `a_S` in the superalgebra, and
//! multiply by the ordinary tensor rule `(a⊗g)(b⊗h) = ab⊗gh`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::SparseVec;
use crate::space::Parity;
use crate::table::AlgebraTable;

pub const MAX_GENERATORS: u32 = 24;

/// Sign of `e_S e_T` for disjoint `S`, `T`: `true` means negative.
///
/// Each generator of `T` moves left past the larger generators of `S`.
#[inline]
pub fn merge_sign(s: u32, t: u32) -> bool {
    let mut inv = 0u32;
    let mut rest = t;
    while rest != 0 {
        let b = rest.trailing_zeros();
        inv += (s >> b >> 1).count_ones();
        rest &= rest - 1;
    }
    inv % 2 == 1
}

/// The Grassmann algebra on `m` generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrassmannContext {
    m: u32,
}

impl GrassmannContext {
    pub fn new(m: u32) -> Result<GrassmannContext> {
        if m > MAX_GENERATORS {
            return Err(Error::Invalid(format!("{m} Grassmann generators requested; at most {MAX_GENERATORS} supported")));
        }
        Ok(GrassmannContext { m })
    }

    pub fn generators(&self) -> u32 {
        self.m
    }

    pub fn contains(&self, mono: u32) -> bool {
        mono >> self.m == 0
    }

    /// `e_S e_T` as `(negate, S ∪ T)`, or `None` when `S ∩ T ≠ ∅`.
    #[inline]
    pub fn monomial_mul(&self, s: u32, t: u32) -> Option<(bool, u32)> {
        if s & t != 0 {
            return None;
        }
        Some((merge_sign(s, t), s | t))
    }

    /// The monomial of the `i`-th generator (0-based).
    pub fn generator(&self, i: u32) -> Result<u32> {
        if i >= self.m {
            return Err(Error::Invalid(format!("generator e{} outside a context with {} generators", i + 1, self.m)));
        }
        Ok(1 << i)
    }
}

pub fn monomial_parity(mono: u32) -> Parity {
    if mono.count_ones() % 2 == 1 {
        Parity::Odd
    } else {
        Parity::Even
    }
}

/// An element of the Grassmann algebra itself.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrassmannElem {
    terms: BTreeMap<u32, Scalar>,
}

impl GrassmannElem {
    pub fn zero() -> GrassmannElem {
        GrassmannElem::default()
    }

    pub fn scalar(c: Scalar) -> GrassmannElem {
        let mut g = GrassmannElem::default();
        if !c.is_zero() {
            g.terms.insert(0, c);
        }
        g
    }

    pub fn monomial(mono: u32, c: Scalar) -> GrassmannElem {
        let mut g = GrassmannElem::default();
        if !c.is_zero() {
            g.terms.insert(mono, c);
        }
        g
    }

    pub fn terms(&self) -> &BTreeMap<u32, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, f: Field, mono: u32, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(mono).or_insert_with(|| Scalar::ZERO);
        *e = f.add(e, c);
        if e.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn add(&self, f: Field, other: &GrassmannElem) -> GrassmannElem {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(f, *m, c);
        }
        out
    }

    pub fn scale(&self, f: Field, c: &Scalar) -> GrassmannElem {
        let mut out = GrassmannElem::default();
        for (m, x) in &self.terms {
            out.add_term(f, *m, &f.mul(x, c));
        }
        out
    }

    pub fn mul(&self, f: Field, other: &GrassmannElem) -> GrassmannElem {
        let mut out = GrassmannElem::default();
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                if s & t != 0 {
                    continue;
                }
                let c = f.mul(a, b);
                out.add_term(f, s | t, &if merge_sign(*s, *t) { f.neg(&c) } else { c });
            }
        }
        out
    }
}

/// An element of the Grassmann envelope `Σ a_S ⊗ e_S`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnvelopeElement {
    terms: BTreeMap<u32, SparseVec>,
}

impl EnvelopeElement {
    pub fn zero() -> EnvelopeElement {
        EnvelopeElement::default()
    }

    /// `a ⊗ e_S`.
    pub fn pure(a: SparseVec, mono: u32) -> EnvelopeElement {
        let mut e = EnvelopeElement::default();
        if !a.is_zero() {
            e.terms.insert(mono, a);
        }
        e
    }

    pub fn terms(&self) -> &BTreeMap<u32, SparseVec> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Component attached to monomial `mono`.
    pub fn component(&self, mono: u32) -> SparseVec {
        self.terms.get(&mono).cloned().unwrap_or_default()
    }

    fn add_component(&mut self, f: Field, mono: u32, a: &SparseVec) {
        if a.is_zero() {
            return;
        }
        let e = self.terms.entry(mono).or_default();
        *e = e.add(f, a);
        if e.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn add(&self, f: Field, other: &EnvelopeElement) -> EnvelopeElement {
        let mut out = self.clone();
        for (m, a) in &other.terms {
            out.add_component(f, *m, a);
        }
        out
    }

    pub fn sub(&self, f: Field, other: &EnvelopeElement) -> EnvelopeElement {
        self.add(f, &other.scale(f, &f.from_i64(-1)))
    }

    pub fn scale(&self, f: Field, c: &Scalar) -> EnvelopeElement {
        let mut out = EnvelopeElement::default();
        for (m, a) in &self.terms {
            out.add_component(f, *m, &a.scale(f, c));
        }
        out
    }

    /// Multiplication by an even Grassmann element, acting on the Grassmann factor.
    pub fn scale_grassmann(&self, f: Field, g: &GrassmannElem) -> EnvelopeElement {
        let mut out = EnvelopeElement::default();
        for (s, c) in g.terms() {
            for (t, a) in &self.terms {
                if s & t != 0 {
                    continue;
                }
                let c = if merge_sign(*s, *t) { f.neg(c) } else { c.clone() };
                out.add_component(f, s | t, &a.scale(f, &c));
            }
        }
        out
    }

    /// `(a⊗g)(b⊗h) = ab ⊗ gh`, extended bilinearly.
    pub fn mul(&self, table: &AlgebraTable, other: &EnvelopeElement) -> EnvelopeElement {
        let f = table.field();
        let mut out = EnvelopeElement::default();
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                if s & t != 0 {
                    continue;
                }
                let mut ab = table.mul(a, b);
                if ab.is_zero() {
                    continue;
                }
                if merge_sign(*s, *t) {
                    ab = ab.neg(f);
                }
                out.add_component(f, s | t, &ab);
            }
        }
        out
    }

    /// Applies a linear functional to the algebra factor, giving a Grassmann element.
    pub fn functional(&self, f: Field, coeffs: &[Scalar]) -> GrassmannElem {
        let mut g = GrassmannElem::default();
        for (m, a) in &self.terms {
            g.add_term(f, *m, &a.dot_dense(f, coeffs));
        }
        g
    }

    /// The parity of the element if it lies in `G(A)`; rejects mixed or misplaced terms.
    pub fn envelope_parity(&self, table: &AlgebraTable) -> Result<Parity> {
        let mut seen: Option<Parity> = None;
        for (m, a) in &self.terms {
            let gp = monomial_parity(*m);
            for (i, _) in a.iter() {
                if table.parity(*i) != gp {
                    return Err(Error::Parity(format!(
                        "term {}⊗e{:#b} pairs parity {} with a Grassmann monomial of parity {}",
                        table.space().label(*i),
                        m,
                        table.parity(*i),
                        gp
                    )));
                }
            }
            let p = table.parity(a.leading().expect("stored components are nonzero")) + gp;
            match seen {
                None => seen = Some(p),
                Some(q) if q != p => return Err(Error::Parity("envelope element is not homogeneous".into())),
                _ => {}
            }
        }
        Ok(seen.unwrap_or(Parity::Even))
    }
}

/// Polynomial expressions in envelope elements.
#[derive(Clone, Debug)]
pub enum EnvExpr {
    Elem(EnvelopeElement),
    Add(Box<EnvExpr>, Box<EnvExpr>),
    Mul(Box<EnvExpr>, Box<EnvExpr>),
    Scale(Scalar, Box<EnvExpr>),
}

impl EnvExpr {
    pub fn elem(e: EnvelopeElement) -> EnvExpr {
        EnvExpr::Elem(e)
    }

    pub fn add(a: EnvExpr, b: EnvExpr) -> EnvExpr {
        EnvExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: EnvExpr, b: EnvExpr) -> EnvExpr {
        EnvExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn scale(c: Scalar, a: EnvExpr) -> EnvExpr {
        EnvExpr::Scale(c, Box::new(a))
    }
}

/// Expands an expression in the basis `{a_i ⊗ e_S}`.
pub fn grassmann_eval(ctx: &GrassmannContext, table: &AlgebraTable, expr: &EnvExpr) -> Result<EnvelopeElement> {
    let f = table.field();
    match expr {
        EnvExpr::Elem(e) => {
            if let Some(m) = e.terms.keys().find(|m| !ctx.contains(**m)) {
                return Err(Error::Invalid(format!("monomial {m:#b} uses generators outside the context")));
            }
            e.envelope_parity(table)?;
            Ok(e.clone())
        }
        EnvExpr::Add(a, b) => Ok(grassmann_eval(ctx, table, a)?.add(f, &grassmann_eval(ctx, table, b)?)),
        EnvExpr::Mul(a, b) => Ok(grassmann_eval(ctx, table, a)?.mul(table, &grassmann_eval(ctx, table, b)?)),
        EnvExpr::Scale(c, a) => Ok(grassmann_eval(ctx, table, a)?.scale(f, c)),
    }
}
