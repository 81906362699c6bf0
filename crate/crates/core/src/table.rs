//! Structure-constant tables for (super)algebras.

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{Accumulator, LinMap, SparseVec};
use crate::space::{Parity, SuperSpace};

/// A finite-dimensional (super)algebra given by the products of its basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraTable {
    field: Field,
    space: SuperSpace,
    products: Vec<SparseVec>,
}

impl AlgebraTable {
    /// The zero product on `space`.
    pub fn new(field: Field, space: SuperSpace) -> AlgebraTable {
        let n = space.dim();
        AlgebraTable { field, space, products: vec![SparseVec::new(); n * n] }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn space(&self) -> &SuperSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.space.dims()
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.space.parity(i)
    }

    pub fn parities(&self) -> &[Parity] {
        self.space.parities()
    }

    /// Product of basis vectors `e_i e_j`.
    #[inline]
    pub fn product(&self, i: usize, j: usize) -> &SparseVec {
        &self.products[i * self.dim() + j]
    }

    /// Sets `e_i e_j`, rejecting products that break the grading.
    pub fn set(&mut self, i: usize, j: usize, v: SparseVec) -> Result<()> {
        let n = self.dim();
        if i >= n || j >= n || v.max_index().is_some_and(|k| k >= n) {
            return Err(Error::Dimension(format!("product ({i},{j}) outside a {n}-dimensional table")));
        }
        let want = self.parity(i) + self.parity(j);
        if v.iter().any(|(k, _)| self.parity(*k) != want) {
            return Err(Error::Parity(format!(
                "product {}·{} is not of parity {}",
                self.space.label(i),
                self.space.label(j),
                want
            )));
        }
        self.products[i * n + j] = v;
        Ok(())
    }

    /// Sets `e_i e_j` from `(label, coefficient)` pairs.
    pub fn set_labeled(&mut self, i: &str, j: &str, terms: &[(&str, Scalar)]) -> Result<()> {
        let idx = |l: &str| self.space.index_of(l).ok_or_else(|| Error::Invalid(format!("unknown basis label {l:?}")));
        let (a, b) = (idx(i)?, idx(j)?);
        let mut pairs = Vec::with_capacity(terms.len());
        for (l, c) in terms {
            pairs.push((idx(l)?, c.clone()));
        }
        let v = SparseVec::from_pairs(self.field, pairs);
        self.set(a, b, v)
    }

    /// Bilinear extension of the basis products.
    pub fn mul(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let f = self.field;
        let mut acc = Accumulator::new(f, self.dim());
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let p = self.product(*i, *j);
                if !p.is_zero() {
                    acc.add_scaled(&f.mul(a, b), p);
                }
            }
        }
        acc.take()
    }

    /// Left multiplication `l_x : y ↦ xy`.
    pub fn left(&self, x: &SparseVec) -> LinMap {
        let n = self.dim();
        LinMap::from_cols(n, (0..n).map(|j| self.mul(x, &SparseVec::unit(j))).collect())
    }

    /// Right multiplication `r_x : y ↦ yx` (no sign).
    pub fn right(&self, x: &SparseVec) -> LinMap {
        let n = self.dim();
        LinMap::from_cols(n, (0..n).map(|j| self.mul(&SparseVec::unit(j), x)).collect())
    }

    pub fn left_basis(&self, i: usize) -> LinMap {
        let n = self.dim();
        LinMap::from_cols(n, (0..n).map(|j| self.product(i, j).clone()).collect())
    }

    /// Sign flag for `(-1)^{|e_i||e_j|}`.
    #[inline]
    pub fn koszul(&self, i: usize, j: usize) -> bool {
        Parity::koszul(self.parity(i), self.parity(j))
    }

    /// Number of stored nonzero structure constants.
    pub fn nnz(&self) -> usize {
        self.products.iter().map(|v| v.nnz()).sum()
    }

    /// First basis pair violating `e_j e_i = (-1)^{|i||j|} e_i e_j`.
    pub fn supercommutativity_violation(&self) -> Option<(usize, usize)> {
        self.symmetry_violation(false)
    }

    /// First basis pair violating `e_j e_i = -(-1)^{|i||j|} e_i e_j` (including odd squares when `i = j` is even).
    pub fn superanticommutativity_violation(&self) -> Option<(usize, usize)> {
        self.symmetry_violation(true)
    }

    fn symmetry_violation(&self, anti: bool) -> Option<(usize, usize)> {
        let f = self.field;
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                let negate = anti ^ self.koszul(i, j);
                let expect = if negate { self.product(i, j).neg(f) } else { self.product(i, j).clone() };
                if *self.product(j, i) != expect {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_supercommutative(&self) -> bool {
        self.supercommutativity_violation().is_none()
    }

    pub fn is_superanticommutative(&self) -> bool {
        self.superanticommutativity_violation().is_none()
    }

    /// First basis pair `(i, j)` on which `d` breaks the super-Leibniz rule
    /// `d(xy) = d(x)y + (-1)^{|d||x|} x d(y)`; inhomogeneous maps are checked part by part.
    pub fn derivation_violation(&self, d: &LinMap) -> Option<(usize, usize)> {
        let f = self.field;
        let n = self.dim();
        let pars = self.parities();
        for dpar in [Parity::Even, Parity::Odd] {
            let cols: Vec<SparseVec> =
                d.cols.iter().enumerate().map(|(j, c)| c.filter(|i| pars[i] + pars[j] == dpar)).collect();
            let part = LinMap::from_cols(n, cols);
            if part.is_zero() {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    let lhs = part.apply(f, self.product(i, j));
                    let a = self.mul(&part.cols[i], &SparseVec::unit(j));
                    let b = self.mul(&SparseVec::unit(i), &part.cols[j]);
                    let rhs = if Parity::koszul(dpar, pars[i]) { a.sub(f, &b) } else { a.add(f, &b) };
                    if lhs != rhs {
                        return Some((i, j));
                    }
                }
            }
        }
        None
    }

    /// Super tensor product with `(a⊗b)(c⊗d) = (-1)^{|b||c|} ac⊗bd`.
    pub fn super_tensor(a: &AlgebraTable, b: &AlgebraTable) -> Result<AlgebraTable> {
        if a.field != b.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", a.field, b.field)));
        }
        let f = a.field;
        let (na, nb) = (a.dim(), b.dim());
        let mut basis = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                basis.push((format!("{}⊗{}", a.space.label(i), b.space.label(j)), a.parity(i) + b.parity(j)));
            }
        }
        let mut t = AlgebraTable::new(f, SuperSpace::new(basis)?);
        for ia in 0..na {
            for ib in 0..nb {
                for ic in 0..na {
                    for id in 0..nb {
                        let (ac, bd) = (a.product(ia, ic), b.product(ib, id));
                        if ac.is_zero() || bd.is_zero() {
                            continue;
                        }
                        let neg = Parity::koszul(b.parity(ib), a.parity(ic));
                        let mut pairs = Vec::with_capacity(ac.nnz() * bd.nnz());
                        for (k, x) in ac.iter() {
                            for (l, y) in bd.iter() {
                                let c = f.mul(x, y);
                                pairs.push((k * nb + l, if neg { f.neg(&c) } else { c }));
                            }
                        }
                        t.set(ia * nb + ib, ic * nb + id, SparseVec::from_pairs(f, pairs))?;
                    }
                }
            }
        }
        Ok(t)
    }

    /// Builds a table from the `n²` basis products in row-major order.
    pub fn with_products(field: Field, space: SuperSpace, products: Vec<SparseVec>) -> Result<AlgebraTable> {
        let n = space.dim();
        if products.len() != n * n {
            return Err(Error::Dimension(format!("expected {} products, got {}", n * n, products.len())));
        }
        let mut t = AlgebraTable::new(field, space);
        for (idx, v) in products.into_iter().enumerate() {
            t.set(idx / n, idx % n, v)?;
        }
        Ok(t)
    }

    /// Restriction of the product to a subalgebra given by a homogeneous basis.
    ///
    /// Every product of basis vectors must lie in the span; the new basis is labelled `w0, w1, ...`.
    pub fn restrict(&self, basis: &[SparseVec]) -> Result<AlgebraTable> {
        let f = self.field;
        let n = self.dim();
        let mut ech = crate::linalg::Echelon::new(f, n);
        let mut combo: Vec<SparseVec> = Vec::new();
        let mut space = Vec::with_capacity(basis.len());
        for (k, v) in basis.iter().enumerate() {
            let p = v
                .parity(self.parities())
                .ok_or_else(|| Error::Parity(format!("subalgebra basis vector {k} is not homogeneous")))?;
            space.push((format!("w{k}"), p));
            let before = ech.rank();
            ech.insert(v);
            if ech.rank() == before {
                return Err(Error::Invalid("subalgebra basis is linearly dependent".into()));
            }
        }
        // gram[k] holds the coordinates of basis_k in the echelon rows; inverting
        // that square matrix expresses each echelon row through the given basis.
        let m = basis.len();
        let gram: Vec<SparseVec> = basis.iter().map(|v| ech.coords_unchecked(v)).collect();
        combo.extend(invert_square(f, m, &gram)?);
        let sub_space = SuperSpace::new(space)?;
        let mut t = AlgebraTable::new(f, sub_space);
        for a in 0..m {
            for b in 0..m {
                let p = self.mul(&basis[a], &basis[b]);
                let c = ech
                    .coords(&p)
                    .ok_or_else(|| Error::Invalid("span is not closed under the product".into()))?;
                let mut acc = Accumulator::new(f, m);
                for (r, x) in c {
                    acc.add_scaled(&x, &combo[r]);
                }
                t.set(a, b, acc.take())?;
            }
        }
        Ok(t)
    }
}

/// Inverts the `m × m` matrix whose `k`-th column is `cols[k]`; returns the columns of
/// the inverse read as rows: `out[r]` gives the expansion of unit `r` in terms of the columns.
fn invert_square(f: Field, m: usize, cols: &[SparseVec]) -> Result<Vec<SparseVec>> {
    // Solve M x = e_r for each r, where M has columns `cols`.
    let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); m];
    for (k, c) in cols.iter().enumerate() {
        for (r, x) in c.iter() {
            rows[*r].push((k, x.clone()));
        }
    }
    let mat = crate::linalg::SparseMatrix::new(m, rows.into_iter().map(|r| SparseVec::from_pairs(f, r)).collect());
    let mut out = Vec::with_capacity(m);
    for r in 0..m {
        let s = crate::linalg::solve_linear(f, &mat, Some(&SparseVec::unit(r)))?;
        out.push(s.particular.ok_or_else(|| Error::Internal("singular change of basis".into()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    fn k3(f: Field) -> AlgebraTable {
        let sp = SuperSpace::new(vec![
            ("e".into(), Parity::Even),
            ("u1".into(), Parity::Odd),
            ("u2".into(), Parity::Odd),
        ])
        .unwrap();
        let mut t = AlgebraTable::new(f, sp);
        let h = f.half();
        t.set_labeled("e", "e", &[("e", f.one())]).unwrap();
        for u in ["u1", "u2"] {
            t.set_labeled("e", u, &[(u, h.clone())]).unwrap();
            t.set_labeled(u, "e", &[(u, h.clone())]).unwrap();
        }
        t.set_labeled("u1", "u2", &[("e", f.one())]).unwrap();
        t.set_labeled("u2", "u1", &[("e", f.from_i64(-1))]).unwrap();
        t
    }

    #[test]
    fn parity_is_enforced() {
        let mut t = k3(q());
        assert!(t.set_labeled("e", "u1", &[("e", q().one())]).is_err());
    }

    #[test]
    fn tensor_with_unit_field_is_a_copy() {
        let f = q();
        let mut unit = AlgebraTable::new(f, SuperSpace::even(["1"]).unwrap());
        unit.set(0, 0, SparseVec::unit(0)).unwrap();
        let b = k3(f);
        let t = AlgebraTable::super_tensor(&unit, &b).unwrap();
        assert_eq!(t.dims(), b.dims());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.product(i, j), b.product(i, j));
            }
        }
    }

    #[test]
    fn k3_tensor_k3_dims_and_signs() {
        let f = q();
        let t = AlgebraTable::super_tensor(&k3(f), &k3(f)).unwrap();
        assert_eq!(t.dims(), (5, 4));
        assert!(t.is_supercommutative());
        // (u1⊗u1)(u2⊗u2): sign (-1)^{|u1||u2|} = -1, and u1u2 = e on both sides.
        let a = t.space().index_of("u1⊗u1").unwrap();
        let b = t.space().index_of("u2⊗u2").unwrap();
        let ee = t.space().index_of("e⊗e").unwrap();
        assert_eq!(*t.product(a, b), SparseVec::single(ee, f.from_i64(-1)));
    }

    #[test]
    fn field_mismatch_rejected() {
        assert!(AlgebraTable::super_tensor(&k3(Field::Rational), &k3(Field::Prime(5))).is_err());
    }

    #[test]
    fn restriction_to_subalgebra() {
        let f = q();
        let t = k3(f);
        let e = t.space().index_of("e").unwrap();
        let sub = t.restrict(&[SparseVec::unit(e).scale(f, &f.from_i64(2))]).unwrap();
        // (2e)(2e) = 4e = 2·(2e)
        assert_eq!(*sub.product(0, 0), SparseVec::single(0, f.from_i64(2)));
    }
}
