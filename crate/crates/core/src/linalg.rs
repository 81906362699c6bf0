//! Exact sparse linear algebra: vectors, linear maps, reduced echelon forms,
//! linear solving and subspace operations.

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::space::Parity;

/// A sparse vector: sorted `(index, value)` pairs with no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> SparseVec {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> SparseVec {
        SparseVec { entries: vec![(i, Scalar::ONE)] }
    }

    pub fn single(i: usize, c: Scalar) -> SparseVec {
        if c.is_zero() {
            SparseVec::new()
        } else {
            SparseVec { entries: vec![(i, c)] }
        }
    }

    /// Sums duplicate indices and drops zeros.
    pub fn from_pairs(f: Field, pairs: impl IntoIterator<Item = (usize, Scalar)>) -> SparseVec {
        let mut v: Vec<(usize, Scalar)> = pairs.into_iter().collect();
        v.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, Scalar)> = Vec::with_capacity(v.len());
        for (i, c) in v {
            match out.last_mut() {
                Some((j, d)) if *j == i => *d = f.add(d, &c),
                _ => out.push((i, c)),
            }
        }
        out.retain(|e| !e.1.is_zero());
        SparseVec { entries: out }
    }

    /// Trusts that `entries` are sorted, unique and nonzero.
    pub(crate) fn from_sorted(entries: Vec<(usize, Scalar)>) -> SparseVec {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|e| !e.1.is_zero()));
        SparseVec { entries }
    }

    pub fn from_dense(v: &[Scalar]) -> SparseVec {
        SparseVec {
            entries: v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect(),
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<Scalar> {
        let mut d = vec![Scalar::ZERO; n];
        for (i, c) in &self.entries {
            d[*i] = c.clone();
        }
        d
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Scalar)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Scalar::ZERO,
        }
    }

    /// First nonzero index.
    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|e| e.0)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    pub fn scale(&self, f: Field, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec { entries: self.entries.iter().map(|(i, x)| (*i, f.mul(x, c))).collect() }
    }

    pub fn neg(&self, f: Field) -> SparseVec {
        SparseVec { entries: self.entries.iter().map(|(i, x)| (*i, f.neg(x))).collect() }
    }

    /// `self + c * other`.
    pub fn axpy(&self, f: Field, c: &Scalar, other: &SparseVec) -> SparseVec {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, f.mul(c, &b[j].1)));
                j += 1;
            } else {
                let s = f.add(&a[i].1, &f.mul(c, &b[j].1));
                if !s.is_zero() {
                    out.push((a[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, f: Field, other: &SparseVec) -> SparseVec {
        self.axpy(f, &Scalar::ONE, other)
    }

    pub fn sub(&self, f: Field, other: &SparseVec) -> SparseVec {
        self.axpy(f, &f.neg(&Scalar::ONE), other)
    }

    pub fn dot_dense(&self, f: Field, d: &[Scalar]) -> Scalar {
        let mut acc = Scalar::ZERO;
        for (i, c) in &self.entries {
            if !d[*i].is_zero() {
                acc = f.add(&acc, &f.mul(c, &d[*i]));
            }
        }
        acc
    }

    pub fn dot(&self, f: Field, other: &SparseVec) -> Scalar {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut acc = Scalar::ZERO;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc = f.add(&acc, &f.mul(&a[i].1, &b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Keeps entries whose index satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> SparseVec {
        SparseVec { entries: self.entries.iter().filter(|e| keep(e.0)).cloned().collect() }
    }

    /// Reindexes through `map`; the map must be injective on the support.
    pub fn map_indices(&self, f: Field, map: impl Fn(usize) -> usize) -> SparseVec {
        SparseVec::from_pairs(f, self.entries.iter().map(|(i, c)| (map(*i), c.clone())))
    }

    /// The parity of a homogeneous vector; `None` if it mixes degrees.
    /// The zero vector is reported as even.
    pub fn parity(&self, parities: &[Parity]) -> Option<Parity> {
        let mut seen: Option<Parity> = None;
        for (i, _) in &self.entries {
            let p = parities[*i];
            match seen {
                None => seen = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(seen.unwrap_or(Parity::Even))
    }
}

/// Dense scratch accumulator producing sparse vectors.
pub struct Accumulator {
    field: Field,
    vals: Vec<Scalar>,
    live: Vec<bool>,
    touched: Vec<usize>,
}

impl Accumulator {
    pub fn new(field: Field, n: usize) -> Accumulator {
        Accumulator { field, vals: vec![Scalar::ZERO; n], live: vec![false; n], touched: Vec::new() }
    }

    #[inline]
    pub fn add(&mut self, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        if !self.live[i] {
            self.live[i] = true;
            self.touched.push(i);
            self.vals[i] = c.clone();
        } else {
            self.vals[i] = self.field.add(&self.vals[i], c);
        }
    }

    pub fn add_scaled(&mut self, c: &Scalar, v: &SparseVec) {
        if c.is_zero() {
            return;
        }
        let one = c.is_one_value();
        for (i, x) in v.iter() {
            if one {
                self.add(*i, x);
            } else {
                let t = self.field.mul(c, x);
                self.add(*i, &t);
            }
        }
    }

    pub fn take(&mut self) -> SparseVec {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            self.live[i] = false;
            let v = std::mem::take(&mut self.vals[i]);
            if !v.is_zero() {
                out.push((i, v));
            }
        }
        self.touched.clear();
        SparseVec::from_sorted(out)
    }
}

trait IsOne {
    fn is_one_value(&self) -> bool;
}

impl IsOne for Scalar {
    #[inline]
    fn is_one_value(&self) -> bool {
        *self == Scalar::ONE
    }
}

/// A linear map on an `n`-dimensional coordinate space, stored by columns:
/// `cols[j]` is the image of the `j`-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinMap {
    pub n: usize,
    pub cols: Vec<SparseVec>,
}

impl LinMap {
    pub fn zero(n: usize) -> LinMap {
        LinMap { n, cols: vec![SparseVec::new(); n] }
    }

    pub fn identity(n: usize) -> LinMap {
        LinMap { n, cols: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_cols(n: usize, cols: Vec<SparseVec>) -> LinMap {
        assert_eq!(cols.len(), n);
        LinMap { n, cols }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    pub fn entry(&self, row: usize, col: usize) -> Scalar {
        self.cols[col].get(row)
    }

    pub fn apply(&self, f: Field, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(f, self.n);
        for (j, c) in v.iter() {
            acc.add_scaled(c, &self.cols[*j]);
        }
        acc.take()
    }

    /// `self ∘ other`.
    pub fn compose(&self, f: Field, other: &LinMap) -> LinMap {
        let mut acc = Accumulator::new(f, self.n);
        let cols = other
            .cols
            .iter()
            .map(|col| {
                for (k, c) in col.iter() {
                    acc.add_scaled(c, &self.cols[*k]);
                }
                acc.take()
            })
            .collect();
        LinMap { n: self.n, cols }
    }

    pub fn scale(&self, f: Field, c: &Scalar) -> LinMap {
        LinMap { n: self.n, cols: self.cols.iter().map(|v| v.scale(f, c)).collect() }
    }

    pub fn axpy(&self, f: Field, c: &Scalar, other: &LinMap) -> LinMap {
        LinMap { n: self.n, cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.axpy(f, c, b)).collect() }
    }

    pub fn add(&self, f: Field, other: &LinMap) -> LinMap {
        self.axpy(f, &Scalar::ONE, other)
    }

    pub fn sub(&self, f: Field, other: &LinMap) -> LinMap {
        self.axpy(f, &f.neg(&Scalar::ONE), other)
    }

    /// Supercommutator `[a, b] = ab - (-1)^{|a||b|} ba`; `negate` carries the sign flag.
    pub fn supercommutator(&self, f: Field, other: &LinMap, negate: bool) -> LinMap {
        let ab = self.compose(f, other);
        let ba = other.compose(f, self);
        if negate {
            ab.add(f, &ba)
        } else {
            ab.sub(f, &ba)
        }
    }

    /// Row-major flattening into a vector of length `n²` (index `row * n + col`).
    pub fn flatten(&self, f: Field) -> SparseVec {
        let n = self.n;
        SparseVec::from_pairs(
            f,
            self.cols.iter().enumerate().flat_map(|(j, col)| col.iter().map(move |(i, c)| (i * n + j, c.clone()))),
        )
    }

    pub fn unflatten(n: usize, v: &SparseVec) -> LinMap {
        let mut cols: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); n];
        for (idx, c) in v.iter() {
            cols[idx % n].push((idx / n, c.clone()));
        }
        LinMap {
            n,
            cols: cols
                .into_iter()
                .map(|mut c| {
                    c.sort_by_key(|e| e.0);
                    SparseVec::from_sorted(c)
                })
                .collect(),
        }
    }

    pub fn transpose(&self, f: Field) -> LinMap {
        let mut cols: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.n];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, c) in col.iter() {
                cols[*i].push((j, c.clone()));
            }
        }
        let _ = f;
        LinMap { n: self.n, cols: cols.into_iter().map(SparseVec::from_sorted).collect() }
    }

    /// Parity of a homogeneous map relative to the basis parities; `None` if inhomogeneous.
    pub fn parity(&self, parities: &[Parity]) -> Option<Parity> {
        let mut seen: Option<Parity> = None;
        for (j, col) in self.cols.iter().enumerate() {
            for (i, _) in col.iter() {
                let p = parities[*i] + parities[j];
                match seen {
                    None => seen = Some(p),
                    Some(q) if q != p => return None,
                    _ => {}
                }
            }
        }
        Some(seen.unwrap_or(Parity::Even))
    }
}

/// A matrix stored as sparse rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(cols: usize, data: Vec<SparseVec>) -> SparseMatrix {
        SparseMatrix { rows: data.len(), cols, data }
    }

    pub fn identity(n: usize) -> SparseMatrix {
        SparseMatrix::new(n, (0..n).map(SparseVec::unit).collect())
    }

    pub fn zero(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix::new(cols, vec![SparseVec::new(); rows])
    }

    pub fn apply(&self, f: Field, v: &SparseVec) -> SparseVec {
        SparseVec::from_sorted(
            self.data
                .iter()
                .enumerate()
                .filter_map(|(i, r)| {
                    let c = r.dot(f, v);
                    (!c.is_zero()).then_some((i, c))
                })
                .collect(),
        )
    }
}

/// An incrementally maintained, fully reduced row echelon form.
///
/// Every stored row has a leading 1 at its pivot and zeros at all other pivots,
/// so the coordinates of a vector in the row span are its entries at the pivots.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    dim: usize,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(field: Field, dim: usize) -> Echelon {
        Echelon { field, dim, rows: Vec::new(), pivots: Vec::new(), pivot_row: vec![None; dim] }
    }

    pub fn from_vectors<'a>(field: Field, dim: usize, vs: impl IntoIterator<Item = &'a SparseVec>) -> Echelon {
        let mut e = Echelon::new(field, dim);
        for v in vs {
            e.insert(v);
            if e.rank() == dim {
                break;
            }
        }
        e
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    /// Rows in insertion order.
    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Rows sorted by pivot column (the canonical RREF basis).
    pub fn basis(&self) -> Vec<SparseVec> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| self.pivots[i]);
        order.into_iter().map(|i| self.rows[i].clone()).collect()
    }

    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let f = self.field;
        let hits: Vec<(usize, Scalar)> =
            v.iter().filter_map(|(i, c)| self.pivot_row[*i].map(|r| (r, c.clone()))).collect();
        if hits.is_empty() {
            return v.clone();
        }
        if hits.len() <= 2 {
            let mut out = v.clone();
            for (r, c) in hits {
                out = out.axpy(f, &f.neg(&c), &self.rows[r]);
            }
            return out;
        }
        let mut acc = Accumulator::new(f, self.dim);
        acc.add_scaled(&Scalar::ONE, v);
        for (r, c) in hits {
            acc.add_scaled(&f.neg(&c), &self.rows[r]);
        }
        acc.take()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns `true` if the rank grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let f = self.field;
        let r = self.reduce(v);
        let Some(p) = r.leading() else { return false };
        let inv = f.inv(&r.get(p)).expect("leading entry is nonzero");
        let r = r.scale(f, &inv);
        for row in self.rows.iter_mut() {
            let c = row.get(p);
            if !c.is_zero() {
                *row = row.axpy(f, &f.neg(&c), &r);
            }
        }
        self.pivot_row[p] = Some(self.rows.len());
        self.pivots.push(p);
        self.rows.push(r);
        true
    }

    /// Coordinates of `v` with respect to [`Echelon::rows`], if `v` lies in the span.
    pub fn coords(&self, v: &SparseVec) -> Option<Vec<(usize, Scalar)>> {
        if !self.contains(v) {
            return None;
        }
        let mut out: Vec<(usize, Scalar)> =
            v.iter().filter_map(|(i, c)| self.pivot_row[*i].map(|r| (r, c.clone()))).collect();
        out.sort_by_key(|e| e.0);
        Some(out)
    }

    /// Coordinates without the membership check, for vectors known to lie in the span.
    pub fn coords_unchecked(&self, v: &SparseVec) -> SparseVec {
        let mut out: Vec<(usize, Scalar)> =
            v.iter().filter_map(|(i, c)| self.pivot_row[*i].map(|r| (r, c.clone()))).collect();
        out.sort_by_key(|e| e.0);
        SparseVec::from_sorted(out)
    }

    /// Reorders the rows by a key computed from their pivot columns.
    pub fn sort_rows_by_pivot<K: Ord>(&mut self, key: impl Fn(usize) -> K) {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| key(self.pivots[i]));
        let rows: Vec<SparseVec> = order.iter().map(|&i| std::mem::take(&mut self.rows[i])).collect();
        let pivots: Vec<usize> = order.iter().map(|&i| self.pivots[i]).collect();
        self.rows = rows;
        self.pivots = pivots;
        self.pivot_row = vec![None; self.dim];
        for (r, &p) in self.pivots.iter().enumerate() {
            self.pivot_row[p] = Some(r);
        }
    }

    /// Basis of `{x : row·x = 0 for every row}`, ordered by free column.
    pub fn null_space(&self) -> Vec<SparseVec> {
        let f = self.field;
        let mut out = Vec::new();
        for free in 0..self.dim {
            if self.pivot_row[free].is_some() {
                continue;
            }
            let mut entries = vec![(free, Scalar::ONE)];
            for (r, row) in self.rows.iter().enumerate() {
                let c = row.get(free);
                if !c.is_zero() {
                    entries.push((self.pivots[r], f.neg(&c)));
                }
            }
            out.push(SparseVec::from_pairs(f, entries));
        }
        out
    }
}

/// Result of [`solve_linear`]: an affine solution space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// `None` when the system is inconsistent.
    pub particular: Option<SparseVec>,
    pub kernel: Vec<SparseVec>,
}

/// Solves `m · x = rhs` (or `m · x = 0`) exactly.
pub fn solve_linear(f: Field, m: &SparseMatrix, rhs: Option<&SparseVec>) -> Result<Solution> {
    if m.data.len() != m.rows {
        return Err(Error::Dimension(format!("matrix claims {} rows but stores {}", m.rows, m.data.len())));
    }
    if let Some(b) = rhs {
        if b.max_index().is_some_and(|i| i >= m.rows) {
            return Err(Error::Dimension("right-hand side longer than the row count".into()));
        }
    }
    if m.data.iter().any(|r| r.max_index().is_some_and(|i| i >= m.cols)) {
        return Err(Error::Dimension("row entry beyond the column count".into()));
    }
    let n = m.cols;
    let mut e = Echelon::new(f, n + 1);
    for (i, row) in m.data.iter().enumerate() {
        let mut aug = row.clone();
        if let Some(b) = rhs {
            let c = b.get(i);
            if !c.is_zero() {
                aug = aug.add(f, &SparseVec::single(n, c));
            }
        }
        e.insert(&aug);
    }
    let inconsistent = e.pivots().contains(&n);
    let mut coeffs = Echelon::new(f, n);
    let mut particular = Vec::new();
    for row in e.rows() {
        if row.leading() == Some(n) {
            continue;
        }
        let c = row.get(n);
        if !c.is_zero() {
            particular.push((row.leading().unwrap(), c));
        }
        coeffs.insert(&row.filter(|i| i < n));
    }
    Ok(Solution {
        particular: (!inconsistent).then(|| SparseVec::from_pairs(f, particular)),
        kernel: coeffs.null_space(),
    })
}

/// A subspace of an `n`-dimensional coordinate space, kept as an RREF basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ech: Echelon,
}

impl Subspace {
    pub fn new(field: Field, ambient: usize) -> Subspace {
        Subspace { ech: Echelon::new(field, ambient) }
    }

    pub fn span<'a>(field: Field, ambient: usize, vs: impl IntoIterator<Item = &'a SparseVec>) -> Subspace {
        Subspace { ech: Echelon::from_vectors(field, ambient, vs) }
    }

    pub fn full(field: Field, ambient: usize) -> Subspace {
        let units: Vec<SparseVec> = (0..ambient).map(SparseVec::unit).collect();
        Subspace::span(field, ambient, &units)
    }

    pub fn field(&self) -> Field {
        self.ech.field()
    }

    pub fn ambient(&self) -> usize {
        self.ech.dim()
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn insert(&mut self, v: &SparseVec) -> bool {
        self.ech.insert(v)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.ech.contains(v)
    }

    pub fn basis(&self) -> Vec<SparseVec> {
        self.ech.basis()
    }

    pub fn echelon(&self) -> &Echelon {
        &self.ech
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.ech.rows().iter().all(|v| self.contains(v))
    }

    /// Intersection via the kernel of `[A | -B]`.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let f = self.field();
        let a = self.ech.rows();
        let b = other.ech.rows();
        let (ka, kb) = (a.len(), b.len());
        // Unknowns (α, β) with Σα_i a_i − Σβ_j b_j = 0; one equation per ambient coordinate.
        let mut eqs: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.ambient()];
        for (i, v) in a.iter().enumerate() {
            for (k, c) in v.iter() {
                eqs[*k].push((i, c.clone()));
            }
        }
        for (j, v) in b.iter().enumerate() {
            for (k, c) in v.iter() {
                eqs[*k].push((ka + j, f.neg(c)));
            }
        }
        let m = SparseMatrix::new(ka + kb, eqs.into_iter().map(|e| SparseVec::from_pairs(f, e)).collect());
        let sol = solve_linear(f, &m, None).expect("consistent dimensions");
        let mut out = Subspace::new(f, self.ambient());
        let mut acc = Accumulator::new(f, self.ambient());
        for k in sol.kernel {
            for (i, c) in k.iter().filter(|e| e.0 < ka) {
                acc.add_scaled(c, &a[*i]);
            }
            out.insert(&acc.take());
        }
        out
    }

    /// Dimensions of the even and odd homogeneous parts of the span of the
    /// homogeneous projections of the basis.
    pub fn graded_dims(&self, parities: &[Parity]) -> (usize, usize) {
        let (even, odd) = self.homogeneous_parts(parities);
        (even.dim(), odd.dim())
    }

    /// True if the subspace is the direct sum of its homogeneous parts.
    pub fn is_graded(&self, parities: &[Parity]) -> bool {
        let (e, o) = self.graded_dims(parities);
        e + o == self.dim()
    }

    /// Subspaces spanned by the even and the odd projections of the basis.
    pub fn homogeneous_parts(&self, parities: &[Parity]) -> (Subspace, Subspace) {
        let f = self.field();
        let mut even = Subspace::new(f, self.ambient());
        let mut odd = Subspace::new(f, self.ambient());
        for v in self.ech.rows() {
            even.insert(&v.filter(|i| !parities[i].is_odd()));
            odd.insert(&v.filter(|i| parities[i].is_odd()));
        }
        (even, odd)
    }

    /// A homogeneous basis (even vectors first) if the subspace is graded.
    pub fn homogeneous_basis(&self, parities: &[Parity]) -> Option<Vec<SparseVec>> {
        let (even, odd) = self.homogeneous_parts(parities);
        if even.dim() + odd.dim() != self.dim() {
            return None;
        }
        let mut b = even.basis();
        b.extend(odd.basis());
        Some(b)
    }
}

/// A span of linear maps on a graded coordinate space, kept as a reduced
/// echelon basis of homogeneous maps ordered even first, then by pivot.
#[derive(Clone, Debug)]
pub struct MapSpan {
    n: usize,
    parities: Vec<Parity>,
    ech: Echelon,
    basis: Vec<LinMap>,
}

impl MapSpan {
    /// Spans the homogeneous components of `maps`.
    pub fn build(field: Field, parities: &[Parity], maps: impl IntoIterator<Item = LinMap>) -> MapSpan {
        let n = parities.len();
        let mut ech = Echelon::new(field, n * n);
        for m in maps {
            let flat = m.flatten(field);
            let even = flat.filter(|k| parities[k / n] == parities[k % n]);
            let odd = flat.filter(|k| parities[k / n] != parities[k % n]);
            ech.insert(&even);
            ech.insert(&odd);
            if ech.is_full() {
                break;
            }
        }
        ech.sort_rows_by_pivot(|k| ((parities[k / n] + parities[k % n]).bit(), k));
        let basis = ech.rows().iter().map(|r| LinMap::unflatten(n, r)).collect();
        MapSpan { n, parities: parities.to_vec(), ech, basis }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        let odd = (0..self.dim()).filter(|&i| self.parity(i).is_odd()).count();
        (self.dim() - odd, odd)
    }

    pub fn basis(&self) -> &[LinMap] {
        &self.basis
    }

    pub fn parity(&self, i: usize) -> Parity {
        let k = self.ech.pivots()[i];
        self.parities[k / self.n] + self.parities[k % self.n]
    }

    pub fn contains(&self, m: &LinMap) -> bool {
        self.ech.contains(&m.flatten(self.ech.field()))
    }

    /// Coordinates of `m` in [`MapSpan::basis`], if it lies in the span.
    pub fn coords(&self, m: &LinMap) -> Option<SparseVec> {
        self.ech.coords(&m.flatten(self.ech.field())).map(SparseVec::from_sorted)
    }

    /// First basis pair whose supercommutator leaves the span.
    pub fn closure_violation(&self) -> Option<(usize, usize)> {
        let f = self.ech.field();
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let negate = Parity::koszul(self.parity(i), self.parity(j));
                let c = self.basis[i].supercommutator(f, &self.basis[j], negate);
                if !self.contains(&c) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Coordinates read off the pivots without a membership check.
    pub fn coords_unchecked(&self, m: &LinMap) -> SparseVec {
        self.ech.coords_unchecked(&m.flatten(self.ech.field()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> Field {
        Field::Rational
    }

    fn sv(v: &[i64]) -> SparseVec {
        SparseVec::from_dense(&v.iter().map(|&x| Scalar::integer(x)).collect::<Vec<_>>())
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let s = solve_linear(q(), &SparseMatrix::identity(4), None).unwrap();
        assert!(s.kernel.is_empty());
        assert_eq!(s.particular, Some(SparseVec::new()));
    }

    #[test]
    fn zero_row_kernel_is_everything() {
        let s = solve_linear(q(), &SparseMatrix::zero(1, 2), None).unwrap();
        assert_eq!(s.kernel.len(), 2);
        assert_eq!(s.kernel[0], SparseVec::unit(0));
        assert_eq!(s.kernel[1], SparseVec::unit(1));
    }

    #[test]
    fn inconsistent_system_is_marked() {
        let m = SparseMatrix::new(2, vec![sv(&[1, 1]), sv(&[2, 2])]);
        let s = solve_linear(q(), &m, Some(&sv(&[1, 0]))).unwrap();
        assert!(s.particular.is_none());
        assert_eq!(s.kernel.len(), 1);
    }

    #[test]
    fn particular_solution_solves() {
        let f = Field::Prime(7);
        let m = SparseMatrix::new(3, vec![sv(&[1, 2, 3]), sv(&[0, 1, 4])]);
        let b = sv(&[5, 6]);
        let s = solve_linear(f, &m, Some(&b)).unwrap();
        let x = s.particular.unwrap();
        assert_eq!(m.apply(f, &x), b.map_indices(f, |i| i));
        assert_eq!(s.kernel.len(), 1);
        assert!(m.apply(f, &s.kernel[0]).is_zero());
    }

    #[test]
    fn echelon_coordinates() {
        let f = q();
        let basis = [sv(&[1, 1, 0, 0]), sv(&[0, 1, 1, 0])];
        let e = Echelon::from_vectors(f, 4, &basis);
        let v = sv(&[2, 5, 3, 0]);
        let c = e.coords(&v).unwrap();
        let mut r = SparseVec::new();
        for (i, x) in c {
            r = r.axpy(f, &x, &e.rows()[i]);
        }
        assert_eq!(r, v);
        assert!(e.coords(&sv(&[0, 0, 0, 1])).is_none());
    }

    #[test]
    fn intersection_of_planes() {
        let f = q();
        let a = Subspace::span(f, 3, &[sv(&[1, 0, 0]), sv(&[0, 1, 0])]);
        let b = Subspace::span(f, 3, &[sv(&[0, 1, 0]), sv(&[0, 0, 1])]);
        let c = a.intersect(&b);
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&sv(&[0, 1, 0])));
    }

    #[test]
    fn graded_detection() {
        let f = q();
        let par = [Parity::Even, Parity::Odd];
        assert!(!Subspace::span(f, 2, &[sv(&[1, 1])]).is_graded(&par));
        assert!(Subspace::span(f, 2, &[sv(&[1, 1]), sv(&[1, 0])]).is_graded(&par));
    }

    #[test]
    fn linmap_flatten_roundtrip() {
        let f = q();
        let m = LinMap::from_cols(2, vec![sv(&[1, 2]), sv(&[0, -3])]);
        assert_eq!(LinMap::unflatten(2, &m.flatten(f)), m);
        assert_eq!(m.entry(1, 0), Scalar::integer(2));
        let t = m.transpose(f);
        assert_eq!(t.entry(0, 1), Scalar::integer(2));
        let id = LinMap::identity(2);
        assert_eq!(m.compose(f, &id), m);
        assert!(m.supercommutator(f, &id, false).is_zero());
    }

    fn small_matrix() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            (Just(c), proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r))
        })
    }

    proptest! {
        #[test]
        fn kernel_vectors_annihilate((cols, rows) in small_matrix(), p in prop_oneof![Just(0u64), Just(5), Just(7)]) {
            let f = Field::new(p).unwrap();
            let data: Vec<SparseVec> = rows
                .iter()
                .map(|r| SparseVec::from_pairs(f, r.iter().enumerate().map(|(i, &x)| (i, f.from_i64(x)))))
                .collect();
            let m = SparseMatrix::new(cols, data.clone());
            let s = solve_linear(f, &m, None).unwrap();
            for k in &s.kernel {
                prop_assert!(m.apply(f, k).is_zero());
            }
            let rank = Echelon::from_vectors(f, cols, &data).rank();
            prop_assert_eq!(rank + s.kernel.len(), cols);
        }
    }
}
