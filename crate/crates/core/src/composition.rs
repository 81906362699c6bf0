//! Split Hurwitz algebras, the characteristic-3 composition superalgebras
//! B(1,2) and B(4,2), and the symmetric composition algebras built from them.

use std::fmt;

use crate::check::{CheckReport, IdentityCheck};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{Echelon, LinMap, MapSpan, SparseVec};
use crate::space::{Parity, SuperSpace};
use crate::table::AlgebraTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompositionKind {
    Unit,
    Binarion,
    Quaternion,
    Octonion,
    B12,
    B42,
}

impl CompositionKind {
    pub const HURWITZ: [CompositionKind; 4] =
        [CompositionKind::Unit, CompositionKind::Binarion, CompositionKind::Quaternion, CompositionKind::Octonion];
    pub const ALL: [CompositionKind; 6] = [
        CompositionKind::Unit,
        CompositionKind::Binarion,
        CompositionKind::Quaternion,
        CompositionKind::Octonion,
        CompositionKind::B12,
        CompositionKind::B42,
    ];

    /// Descriptor name (`unit`, `binarion`, ..., `b42`).
    pub fn name(self) -> &'static str {
        match self {
            CompositionKind::Unit => "unit",
            CompositionKind::Binarion => "binarion",
            CompositionKind::Quaternion => "quaternion",
            CompositionKind::Octonion => "octonion",
            CompositionKind::B12 => "b12",
            CompositionKind::B42 => "b42",
        }
    }

    pub fn from_name(s: &str) -> Option<CompositionKind> {
        CompositionKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn is_super(self) -> bool {
        matches!(self, CompositionKind::B12 | CompositionKind::B42)
    }

    pub fn dim(self) -> usize {
        match self {
            CompositionKind::Unit => 1,
            CompositionKind::Binarion => 2,
            CompositionKind::Quaternion => 4,
            CompositionKind::Octonion => 8,
            CompositionKind::B12 => 3,
            CompositionKind::B42 => 6,
        }
    }
}

impl fmt::Display for CompositionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A quadratic superform `(q₀, b)`: `q₀` on the even part, `b` an even
/// supersymmetric bilinear form whose even restriction is the polar of `q₀`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSuperform {
    parities: Vec<Parity>,
    gram: Vec<Vec<Scalar>>,
    q0: Vec<Scalar>,
}

impl QuadraticSuperform {
    /// Builds the form from its Gram matrix; `q₀` on basis vectors is read off the diagonal.
    pub fn from_gram(field: Field, parities: &[Parity], gram: Vec<Vec<Scalar>>) -> Result<QuadraticSuperform> {
        let n = parities.len();
        if gram.len() != n || gram.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("Gram matrix must be {n}x{n}")));
        }
        let half = field.half();
        let q0 = (0..n)
            .map(|i| if parities[i].is_odd() { Scalar::ZERO } else { field.mul(&half, &gram[i][i]) })
            .collect();
        let form = QuadraticSuperform { parities: parities.to_vec(), gram, q0 };
        form.validate(field, parities)?;
        Ok(form)
    }

    /// Gram matrix from the listed entries; the transposed entries are filled in
    /// symmetrically on the even part and alternating on the odd part.
    pub fn from_entries(
        field: Field,
        parities: &[Parity],
        entries: &[(usize, usize, Scalar)],
    ) -> Result<QuadraticSuperform> {
        let n = parities.len();
        let mut gram = vec![vec![Scalar::ZERO; n]; n];
        for (i, j, c) in entries {
            let c = field.from_rational(c)?;
            gram[*i][*j] = c.clone();
            if i != j {
                gram[*j][*i] = if parities[*i].is_odd() { field.neg(&c) } else { c };
            }
        }
        QuadraticSuperform::from_gram(field, parities, gram)
    }

    fn validate(&self, field: Field, parities: &[Parity]) -> Result<()> {
        let n = parities.len();
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&self.gram[i][j], &self.gram[j][i]);
                let ok = match (parities[i], parities[j]) {
                    (Parity::Even, Parity::Even) => a == b,
                    (Parity::Odd, Parity::Odd) => *a == field.neg(b),
                    _ => a.is_zero(),
                };
                if !ok {
                    return Err(Error::Invalid(format!("bilinear form is not supersymmetric at ({i},{j})")));
                }
            }
        }
        let mut ech = Echelon::new(field, n);
        for row in &self.gram {
            ech.insert(&SparseVec::from_dense(row));
        }
        if !ech.is_full() {
            return Err(Error::Invalid("bilinear form is degenerate".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<Scalar>] {
        &self.gram
    }

    #[inline]
    pub fn b_basis(&self, i: usize, j: usize) -> &Scalar {
        &self.gram[i][j]
    }

    pub fn b(&self, field: Field, x: &SparseVec, y: &SparseVec) -> Scalar {
        let mut acc = Scalar::ZERO;
        for (i, a) in x.iter() {
            for (j, c) in y.iter() {
                let g = &self.gram[*i][*j];
                if !g.is_zero() {
                    acc = field.add(&acc, &field.mul(g, &field.mul(a, c)));
                }
            }
        }
        acc
    }

    /// `q₀` applied to the even component of `x`.
    pub fn q0(&self, field: Field, x: &SparseVec) -> Scalar {
        let ev: Vec<&(usize, Scalar)> = x.iter().filter(|(i, _)| !self.parities[*i].is_odd()).collect();
        let mut acc = Scalar::ZERO;
        for (a, (i, xi)) in ev.iter().enumerate() {
            acc = field.add(&acc, &field.mul(&self.q0[*i], &field.mul(xi, xi)));
            for (j, xj) in ev.iter().skip(a + 1).map(|e| (&e.0, &e.1)) {
                acc = field.add(&acc, &field.mul(&self.gram[*i][*j], &field.mul(xi, xj)));
            }
        }
        acc
    }
}

fn zero_gram(n: usize) -> Vec<Vec<Scalar>> {
    vec![vec![Scalar::ZERO; n]; n]
}

/// A unital composition (super)algebra with its norm.
#[derive(Clone, Debug)]
pub struct CompositionHandle {
    kind: CompositionKind,
    table: AlgebraTable,
    norm: QuadraticSuperform,
    unit: SparseVec,
}

fn labels_of(kind: CompositionKind) -> Vec<(&'static str, Parity)> {
    use Parity::{Even as E, Odd as O};
    match kind {
        CompositionKind::Unit => vec![("1", E)],
        CompositionKind::Binarion => vec![("e1", E), ("e2", E)],
        CompositionKind::Quaternion => vec![("E11", E), ("E12", E), ("E21", E), ("E22", E)],
        CompositionKind::Octonion => {
            vec![("e1", E), ("e2", E), ("u1", E), ("u2", E), ("u3", E), ("v1", E), ("v2", E), ("v3", E)]
        }
        CompositionKind::B12 => vec![("1", E), ("v1", O), ("v2", O)],
        CompositionKind::B42 => vec![("E11", E), ("E12", E), ("E21", E), ("E22", E), ("v1", O), ("v2", O)],
    }
}

fn space_of(kind: CompositionKind) -> SuperSpace {
    SuperSpace::new(labels_of(kind).into_iter().map(|(l, p)| (l.to_string(), p)).collect())
        .expect("fixed labels are unique")
}

/// Levi-Civita symbol on {0,1,2}.
fn epsilon(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// Matrix unit index for `E_{rc}` in the basis `E11, E12, E21, E22` (0-based r, c).
fn eidx(r: usize, c: usize) -> usize {
    2 * r + c
}

/// Builds a split Hurwitz algebra.
pub fn hurwitz_make(kind: CompositionKind, field: Field) -> Result<CompositionHandle> {
    if kind.is_super() {
        return Err(Error::Invalid(format!("{kind} is a composition superalgebra; use comp_super_make")));
    }
    let space = space_of(kind);
    let n = space.dim();
    let pars = space.parities().to_vec();
    let mut t = AlgebraTable::new(field, space);
    let one = Scalar::ONE;
    let m1 = field.from_i64(-1);
    let mut gram = zero_gram(n);
    let unit;
    match kind {
        CompositionKind::Unit => {
            t.set(0, 0, SparseVec::unit(0))?;
            gram[0][0] = field.from_i64(2);
            unit = SparseVec::unit(0);
        }
        CompositionKind::Binarion => {
            t.set(0, 0, SparseVec::unit(0))?;
            t.set(1, 1, SparseVec::unit(1))?;
            gram[0][1] = one.clone();
            gram[1][0] = one.clone();
            unit = SparseVec::from_pairs(field, [(0, one.clone()), (1, one.clone())]);
        }
        CompositionKind::Quaternion => {
            for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                for d in 0..2 {
                    t.set(eidx(r, c), eidx(c, d), SparseVec::unit(eidx(r, d)))?;
                }
            }
            // polar form of det: tr f tr g - tr(fg)
            gram[eidx(0, 0)][eidx(1, 1)] = one.clone();
            gram[eidx(1, 1)][eidx(0, 0)] = one.clone();
            gram[eidx(0, 1)][eidx(1, 0)] = m1.clone();
            gram[eidx(1, 0)][eidx(0, 1)] = m1.clone();
            unit = SparseVec::from_pairs(field, [(eidx(0, 0), one.clone()), (eidx(1, 1), one.clone())]);
        }
        CompositionKind::Octonion => {
            let (e1, e2) = (0, 1);
            let u = |i: usize| 2 + i;
            let v = |i: usize| 5 + i;
            t.set(e1, e1, SparseVec::unit(e1))?;
            t.set(e2, e2, SparseVec::unit(e2))?;
            for i in 0..3 {
                t.set(e1, u(i), SparseVec::unit(u(i)))?;
                t.set(u(i), e2, SparseVec::unit(u(i)))?;
                t.set(v(i), e1, SparseVec::unit(v(i)))?;
                t.set(e2, v(i), SparseVec::unit(v(i)))?;
                t.set(u(i), v(i), SparseVec::unit(e1))?;
                t.set(v(i), u(i), SparseVec::unit(e2))?;
                for j in 0..3 {
                    if i != j {
                        let k = 3 - i - j;
                        let s = epsilon(i, j, k);
                        t.set(u(i), u(j), SparseVec::single(v(k), field.from_i64(s)))?;
                        t.set(v(i), v(j), SparseVec::single(u(k), field.from_i64(-s)))?;
                    }
                }
                gram[u(i)][v(i)] = m1.clone();
                gram[v(i)][u(i)] = m1.clone();
            }
            gram[e1][e2] = one.clone();
            gram[e2][e1] = one.clone();
            unit = SparseVec::from_pairs(field, [(e1, one.clone()), (e2, one.clone())]);
        }
        CompositionKind::B12 | CompositionKind::B42 => unreachable!(),
    }
    let norm = QuadraticSuperform::from_gram(field, &pars, gram)?;
    Ok(CompositionHandle { kind, table: t, norm, unit })
}

/// Builds B(1,2) or B(4,2); both need characteristic 3.
pub fn comp_super_make(kind: CompositionKind, field: Field) -> Result<CompositionHandle> {
    if !kind.is_super() {
        return Err(Error::Invalid(format!("{kind} is a Hurwitz algebra; use hurwitz_make")));
    }
    if field.characteristic() != 3 {
        return Err(Error::Gating(format!(
            "{kind} requires characteristic 3 (it is a composition superalgebra only there), got {}",
            field.name()
        )));
    }
    let space = space_of(kind);
    let n = space.dim();
    let pars = space.parities().to_vec();
    let mut t = AlgebraTable::new(field, space);
    let one = Scalar::ONE;
    let m1 = field.from_i64(-1);
    let mut gram = zero_gram(n);
    let unit;
    match kind {
        CompositionKind::B12 => {
            for x in 0..3 {
                t.set(0, x, SparseVec::unit(x))?;
                t.set(x, 0, SparseVec::unit(x))?;
            }
            t.set(1, 2, SparseVec::unit(0))?;
            t.set(2, 1, SparseVec::single(0, m1.clone()))?;
            gram[0][0] = field.from_i64(2);
            gram[1][2] = one.clone();
            gram[2][1] = m1.clone();
            unit = SparseVec::unit(0);
        }
        CompositionKind::B42 => {
            let v = |k: usize| 4 + k;
            // E_rc v_k = δ_ck v_r, and ⟨v1|v2⟩ = 1
            let form = |a: usize, b: usize| -> i64 {
                match (a, b) {
                    (0, 1) => 1,
                    (1, 0) => -1,
                    _ => 0,
                }
            };
            for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                for d in 0..2 {
                    t.set(eidx(r, c), eidx(c, d), SparseVec::unit(eidx(r, d)))?;
                }
                for k in 0..2 {
                    // v·f = f(v)
                    if c == k {
                        t.set(v(k), eidx(r, c), SparseVec::unit(v(r)))?;
                    }
                    // f·v = f̄(v) with f̄ = tr(f)·1 - f
                    let mut terms = Vec::new();
                    if r == c {
                        terms.push((v(k), one.clone()));
                    }
                    if c == k {
                        terms.push((v(r), m1.clone()));
                    }
                    t.set(eidx(r, c), v(k), SparseVec::from_pairs(field, terms))?;
                }
            }
            // u·v = ⟨·|u⟩v, i.e. w ↦ ⟨w|u⟩v
            for a in 0..2 {
                for b in 0..2 {
                    let terms: Vec<(usize, Scalar)> =
                        (0..2).map(|w| (eidx(b, w), field.from_i64(form(w, a)))).collect();
                    t.set(v(a), v(b), SparseVec::from_pairs(field, terms))?;
                }
            }
            gram[eidx(0, 0)][eidx(1, 1)] = one.clone();
            gram[eidx(1, 1)][eidx(0, 0)] = one.clone();
            gram[eidx(0, 1)][eidx(1, 0)] = m1.clone();
            gram[eidx(1, 0)][eidx(0, 1)] = m1.clone();
            gram[v(0)][v(1)] = one.clone();
            gram[v(1)][v(0)] = m1.clone();
            unit = SparseVec::from_pairs(field, [(eidx(0, 0), one.clone()), (eidx(1, 1), one.clone())]);
        }
        _ => unreachable!(),
    }
    let norm = QuadraticSuperform::from_gram(field, &pars, gram)?;
    Ok(CompositionHandle { kind, table: t, norm, unit })
}

/// Any of the six standard composition (super)algebras.
pub fn composition_make(kind: CompositionKind, field: Field) -> Result<CompositionHandle> {
    if kind.is_super() {
        comp_super_make(kind, field)
    } else {
        hurwitz_make(kind, field)
    }
}

impl CompositionHandle {
    /// Assembles a handle without running any composition checks.
    pub fn from_parts(
        kind: CompositionKind,
        table: AlgebraTable,
        norm: QuadraticSuperform,
        unit: SparseVec,
    ) -> CompositionHandle {
        CompositionHandle { kind, table, norm, unit }
    }

    pub fn kind(&self) -> CompositionKind {
        self.kind
    }

    pub fn field(&self) -> Field {
        self.table.field()
    }

    pub fn dim(&self) -> usize {
        self.table.dim()
    }

    pub fn table(&self) -> &AlgebraTable {
        &self.table
    }

    pub fn form(&self) -> &QuadraticSuperform {
        &self.norm
    }

    pub fn unit(&self) -> &SparseVec {
        &self.unit
    }

    pub fn mul(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        self.table.mul(x, y)
    }

    /// `n(x)`, i.e. `q₀` on the even component.
    pub fn norm(&self, x: &SparseVec) -> Scalar {
        self.norm.q0(self.field(), x)
    }

    /// The polar form `n(x, y)`.
    pub fn b(&self, x: &SparseVec, y: &SparseVec) -> Scalar {
        self.norm.b(self.field(), x, y)
    }

    /// `t_C(x) = n(x, 1)`.
    pub fn trace(&self, x: &SparseVec) -> Scalar {
        self.b(x, &self.unit)
    }

    /// `x̄ = t_C(x)1 - x`.
    pub fn conj(&self, x: &SparseVec) -> SparseVec {
        let f = self.field();
        self.unit.scale(f, &self.trace(x)).sub(f, x)
    }

    /// Basis of the trace-zero subspace C⁰, ordered by free coordinate.
    pub fn c0_basis(&self) -> Vec<SparseVec> {
        let f = self.field();
        let n = self.dim();
        let row = SparseVec::from_pairs(f, (0..n).map(|i| (i, self.trace(&SparseVec::unit(i)))));
        Echelon::from_vectors(f, n, [&row]).null_space()
    }

    /// `a² - t_C(a)a + n(a)1`, which vanishes for every even `a`.
    pub fn degree2_residual(&self, a: &SparseVec) -> SparseVec {
        let f = self.field();
        self.mul(a, a).axpy(f, &f.neg(&self.trace(a)), a).axpy(f, &self.norm(a), &self.unit)
    }

    fn basis_derivation(&self, i: usize, j: usize) -> LinMap {
        let f = self.field();
        let t = &self.table;
        let n = self.dim();
        let ei = SparseVec::unit(i);
        let ej = SparseVec::unit(j);
        let ij = t.product(i, j);
        let ji = t.product(j, i);
        let comm = if t.koszul(i, j) { ij.add(f, ji) } else { ij.sub(f, ji) };
        let three = f.from_i64(3);
        let cols = (0..n)
            .map(|k| {
                let ek = SparseVec::unit(k);
                let ck = t.mul(&comm, &ek);
                let kc = t.mul(&ek, &comm);
                let pc = t.parity(i) + t.parity(j);
                let outer = if Parity::koszul(pc, t.parity(k)) { ck.add(f, &kc) } else { ck.sub(f, &kc) };
                let assoc = t.mul(t.product(i, k), &ej).sub(f, &t.mul(&ei, t.product(k, j)));
                let c = if t.koszul(j, k) { f.neg(&three) } else { three.clone() };
                outer.axpy(f, &c, &assoc)
            })
            .collect();
        LinMap::from_cols(n, cols)
    }

    /// `D_{a,b} = [[a,b],·] + 3(a,·,b)`, with the super signs
    /// `D_{a,b}(c) = [[a,b],c] + 3(-1)^{|b||c|}(a,c,b)`, extended bilinearly.
    pub fn inner_derivation(&self, a: &SparseVec, b: &SparseVec) -> LinMap {
        let f = self.field();
        let mut out = LinMap::zero(self.dim());
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                out = out.axpy(f, &f.mul(x, y), &self.basis_derivation(*i, *j));
            }
        }
        out
    }

    /// The span inder C of all `D_{a,b}`.
    pub fn inder_span(&self) -> MapSpan {
        let n = self.dim();
        let maps = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| self.basis_derivation(i, j));
        MapSpan::build(self.field(), self.table.parities(), maps)
    }

    pub fn check(&self) -> CheckReport {
        check_composition(self)
    }
}

fn labels(t: &AlgebraTable, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| t.space().label(i).to_string()).collect()
}

/// Checks the three composition identities on basis tuples, reporting the first failure of each.
pub fn check_composition(c: &CompositionHandle) -> CheckReport {
    let f = c.field();
    let t = &c.table;
    let n = c.dim();
    let even: Vec<usize> = (0..n).filter(|&i| !t.parity(i).is_odd()).collect();
    let e = SparseVec::unit;
    let q = |x: &SparseVec| c.norm.q0(f, x);
    let b = |x: &SparseVec, y: &SparseVec| c.norm.b(f, x, y);

    let mut w1 = None;
    'a: for &i in &even {
        for &j in &even {
            if q(t.product(i, j)) != f.mul(&q(&e(i)), &q(&e(j))) {
                w1 = Some(labels(t, &[i, j]));
                break 'a;
            }
        }
    }

    let mut w2 = None;
    'b: for &x in &even {
        let qx = q(&e(x));
        for y in 0..n {
            for z in 0..n {
                let mid = f.mul(&qx, c.norm.b_basis(y, z));
                if b(t.product(x, y), t.product(x, z)) != mid || b(t.product(y, x), t.product(z, x)) != mid {
                    w2 = Some(labels(t, &[x, y, z]));
                    break 'b;
                }
            }
        }
    }

    let mut w3 = None;
    let p = |i: usize| t.parity(i).is_odd();
    'c: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let lhs1 = b(t.product(x, y), t.product(z, w));
                    let lhs2 = b(t.product(z, y), t.product(x, w));
                    let s = (p(x) && p(y)) ^ (p(x) && p(z)) ^ (p(y) && p(z));
                    let lhs = if s { f.sub(&lhs1, &lhs2) } else { f.add(&lhs1, &lhs2) };
                    let r = f.mul(c.norm.b_basis(x, z), c.norm.b_basis(y, w));
                    let rhs = if p(y) && p(z) { f.neg(&r) } else { r };
                    if lhs != rhs {
                        w3 = Some(labels(t, &[x, y, z, w]));
                        break 'c;
                    }
                }
            }
        }
    }

    CheckReport {
        checks: vec![
            IdentityCheck::from_witness("qcompo1", w1),
            IdentityCheck::from_witness("qcompo2", w2),
            IdentityCheck::from_witness("qcompo3", w3),
        ],
    }
}

/// Where a symmetric composition algebra came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymmetricOrigin {
    ParaHurwitz(CompositionKind),
    Okubo { mu: Scalar },
}

/// A symmetric composition (super)algebra: `b(x∗y, z) = b(x, y∗z)` and `n(x∗y) = n(x)n(y)`.
#[derive(Clone, Debug)]
pub struct SymmetricCompositionHandle {
    origin: SymmetricOrigin,
    table: AlgebraTable,
    norm: QuadraticSuperform,
}

/// The para-Hurwitz product `x∙y = x̄ȳ` on the space of `c`.
pub fn para_hurwitz(c: &CompositionHandle) -> SymmetricCompositionHandle {
    let n = c.dim();
    let bars: Vec<SparseVec> = (0..n).map(|i| c.conj(&SparseVec::unit(i))).collect();
    let mut t = AlgebraTable::new(c.field(), c.table.space().clone());
    for i in 0..n {
        for j in 0..n {
            t.set(i, j, c.mul(&bars[i], &bars[j])).expect("conjugation preserves degrees");
        }
    }
    SymmetricCompositionHandle { origin: SymmetricOrigin::ParaHurwitz(c.kind), table: t, norm: c.norm.clone() }
}

/// Smallest residue `μ` with `3μ(1 - μ) = 1`.
pub fn okubo_mu(field: Field) -> Result<Scalar> {
    match field {
        Field::Rational => Err(Error::Gating(
            "the Okubo algebra needs a root of 3X(1-X)=1; -3 is not a square in q (use fp:p with p ≡ 1 mod 3)".into(),
        )),
        Field::Prime(3) => Err(Error::Gating("the Okubo algebra is not defined this way in characteristic 3".into())),
        Field::Prime(p) => {
            let root = field.sqrt(&field.from_i64(-3)).ok_or_else(|| {
                Error::Gating(format!("3X(1-X)=1 has no root in fp:{p}; the Okubo algebra needs p ≡ 1 (mod 3)"))
            })?;
            let three = field.from_i64(3);
            let six = field.from_i64(6);
            let mut roots = [
                field.div(&field.add(&three, &root), &six)?,
                field.div(&field.sub(&three, &root), &six)?,
            ];
            roots.sort();
            Ok(roots[0].clone())
        }
    }
}

/// The Okubo algebra on trace-zero 3×3 matrices:
/// `x∗y = μxy + (1-μ)yx - ⅓tr(xy)1`, with `n(x) = tr(x²)/6`.
pub fn okubo_make(field: Field) -> Result<SymmetricCompositionHandle> {
    let mu = okubo_mu(field)?;
    let labels = ["E12", "E13", "E21", "E23", "E31", "E32", "H1", "H2"];
    let space = SuperSpace::even(labels)?;
    // basis matrices as dense 3×3 arrays
    let off = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];
    let mut mats: Vec<[[i64; 3]; 3]> = Vec::new();
    for (r, c) in off {
        let mut m = [[0; 3]; 3];
        m[r][c] = 1;
        mats.push(m);
    }
    mats.push([[1, 0, 0], [0, -1, 0], [0, 0, 0]]);
    mats.push([[0, 0, 0], [0, 1, 0], [0, 0, -1]]);
    let matmul = |a: &[[i64; 3]; 3], b: &[[i64; 3]; 3]| {
        let mut m = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        m
    };
    let tr = |m: &[[i64; 3]; 3]| m[0][0] + m[1][1] + m[2][2];
    let third = field.from_ratio(1, 3)?;
    let one_minus_mu = field.sub(&Scalar::ONE, &mu);
    // coordinates of a traceless matrix given as a field-valued 3×3 array
    let coords = |m: &[[Scalar; 3]; 3]| {
        let mut pairs: Vec<(usize, Scalar)> =
            off.iter().enumerate().map(|(k, (r, c))| (k, m[*r][*c].clone())).collect();
        pairs.push((6, m[0][0].clone()));
        pairs.push((7, field.neg(&m[2][2])));
        SparseVec::from_pairs(field, pairs)
    };
    let mut t = AlgebraTable::new(field, space);
    let n = mats.len();
    for i in 0..n {
        for j in 0..n {
            let xy = matmul(&mats[i], &mats[j]);
            let yx = matmul(&mats[j], &mats[i]);
            let s = field.mul(&third, &field.from_i64(tr(&xy)));
            let mut m: [[Scalar; 3]; 3] = Default::default();
            for r in 0..3 {
                for c in 0..3 {
                    let mut v =
                        field.add(&field.mul(&mu, &field.from_i64(xy[r][c])), &field.mul(&one_minus_mu, &field.from_i64(yx[r][c])));
                    if r == c {
                        v = field.sub(&v, &s);
                    }
                    m[r][c] = v;
                }
            }
            t.set(i, j, coords(&m))?;
        }
    }
    let gram = (0..n)
        .map(|i| (0..n).map(|j| field.mul(&third, &field.from_i64(tr(&matmul(&mats[i], &mats[j]))))).collect())
        .collect();
    let norm = QuadraticSuperform::from_gram(field, t.parities(), gram)?;
    Ok(SymmetricCompositionHandle { origin: SymmetricOrigin::Okubo { mu }, table: t, norm })
}

impl SymmetricCompositionHandle {
    pub fn from_parts(origin: SymmetricOrigin, table: AlgebraTable, norm: QuadraticSuperform) -> Self {
        SymmetricCompositionHandle { origin, table, norm }
    }

    pub fn origin(&self) -> &SymmetricOrigin {
        &self.origin
    }

    /// Descriptor-style name: `para:<kind>` or `okubo`.
    pub fn name(&self) -> String {
        match &self.origin {
            SymmetricOrigin::ParaHurwitz(k) => format!("para:{k}"),
            SymmetricOrigin::Okubo { .. } => "okubo".into(),
        }
    }

    pub fn field(&self) -> Field {
        self.table.field()
    }

    pub fn dim(&self) -> usize {
        self.table.dim()
    }

    pub fn table(&self) -> &AlgebraTable {
        &self.table
    }

    pub fn form(&self) -> &QuadraticSuperform {
        &self.norm
    }

    pub fn mul(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        self.table.mul(x, y)
    }

    pub fn norm(&self, x: &SparseVec) -> Scalar {
        self.norm.q0(self.field(), x)
    }

    pub fn b(&self, x: &SparseVec, y: &SparseVec) -> Scalar {
        self.norm.b(self.field(), x, y)
    }

    /// Norm associativity on all basis triples and multiplicativity on even basis pairs.
    pub fn check(&self) -> CheckReport {
        let f = self.field();
        let t = &self.table;
        let n = self.dim();
        let mut wa = None;
        'a: for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let l = self.norm.b(f, t.product(x, y), &SparseVec::unit(z));
                    let r = self.norm.b(f, &SparseVec::unit(x), t.product(y, z));
                    if l != r {
                        wa = Some(labels(t, &[x, y, z]));
                        break 'a;
                    }
                }
            }
        }
        let mut wm = None;
        let even: Vec<usize> = (0..n).filter(|&i| !t.parity(i).is_odd()).collect();
        'm: for &x in &even {
            for &y in &even {
                let l = self.norm(t.product(x, y));
                let r = f.mul(&self.norm(&SparseVec::unit(x)), &self.norm(&SparseVec::unit(y)));
                if l != r {
                    wm = Some(labels(t, &[x, y]));
                    break 'm;
                }
            }
        }
        CheckReport {
            checks: vec![
                IdentityCheck::from_witness("norm-associativity", wa),
                IdentityCheck::from_witness("multiplicativity", wm),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> Field {
        Field::Rational
    }

    fn fp(p: u64) -> Field {
        Field::new(p).unwrap()
    }

    fn random_even(c: &CompositionHandle, rng: &mut ChaCha8Rng) -> SparseVec {
        let f = c.field();
        SparseVec::from_pairs(f, (0..c.dim()).filter(|&i| !c.table.parity(i).is_odd()).map(|i| (i, f.random(rng))))
    }

    fn all_handles() -> Vec<CompositionHandle> {
        let mut v = Vec::new();
        for f in [q(), fp(5), fp(7)] {
            for k in CompositionKind::HURWITZ {
                v.push(hurwitz_make(k, f).unwrap());
            }
        }
        for k in CompositionKind::ALL {
            v.push(composition_make(k, fp(3)).unwrap());
        }
        v
    }

    #[test]
    fn octonion_dims() {
        let c = hurwitz_make(CompositionKind::Octonion, fp(7)).unwrap();
        assert_eq!(c.dim(), 8);
        assert_eq!(c.c0_basis().len(), 7);
    }

    #[test]
    fn unit_degree_two() {
        let c = hurwitz_make(CompositionKind::Unit, q()).unwrap();
        let one = c.unit().clone();
        assert_eq!(c.norm(&one), Scalar::ONE);
        assert_eq!(c.trace(&one), Scalar::integer(2));
        assert!(c.degree2_residual(&one).is_zero());
    }

    #[test]
    fn quaternion_norm_is_det() {
        let c = hurwitz_make(CompositionKind::Quaternion, q()).unwrap();
        assert!(c.norm(&SparseVec::unit(0)).is_zero());
        assert_eq!(c.b(&SparseVec::unit(0), &SparseVec::unit(3)), Scalar::ONE);
        // det [[1,2],[3,4]] = -2
        let m = SparseVec::from_dense(&[1, 2, 3, 4].map(Scalar::integer));
        assert_eq!(c.norm(&m), Scalar::integer(-2));
    }

    #[test]
    fn super_gating() {
        assert!(matches!(comp_super_make(CompositionKind::B12, fp(5)), Err(Error::Gating(_))));
        assert!(comp_super_make(CompositionKind::B42, q()).is_err());
        let b = comp_super_make(CompositionKind::B12, fp(3)).unwrap();
        assert_eq!(b.table.dims(), (1, 2));
        assert_eq!(*b.table.product(1, 2), SparseVec::unit(0));
        assert_eq!(*b.table.product(2, 1), SparseVec::single(0, fp(3).from_i64(-1)));
    }

    #[test]
    fn b42_products() {
        let f = fp(3);
        let b = comp_super_make(CompositionKind::B42, f).unwrap();
        assert_eq!(b.table.dims(), (4, 2));
        // v1·v2 is w ↦ ⟨w|v1⟩v2, which sends v2 to -v2 and kills v1
        assert_eq!(*b.table.product(4, 5), SparseVec::single(3, f.from_i64(-1)));
        assert_eq!(b.norm(b.unit()), Scalar::ONE);
        let r = b.check();
        assert!(r.get("qcompo2").unwrap().holds);
    }

    #[test]
    fn all_handles_are_composition() {
        for c in all_handles() {
            let r = check_composition(&c);
            assert!(r.all_hold(), "{} over {}: {:?}", c.kind(), c.field().name(), r.first_failure());
        }
    }

    #[test]
    fn corrupted_table_fails_qcompo3() {
        let c = hurwitz_make(CompositionKind::Octonion, q()).unwrap();
        let mut t = c.table().clone();
        let bumped = t.product(2, 3).add(q(), &SparseVec::unit(7));
        t.set(2, 3, bumped).unwrap();
        let bad = CompositionHandle::from_parts(c.kind(), t, c.form().clone(), c.unit().clone());
        let r = check_composition(&bad);
        let w = r.get("qcompo3").unwrap();
        assert!(!w.holds);
        assert_eq!(w.witness.as_ref().unwrap().len(), 4);
    }

    #[test]
    fn inder_dimensions() {
        let cases = [
            (CompositionKind::Octonion, fp(7), 14),
            (CompositionKind::Octonion, fp(3), 7),
            (CompositionKind::Quaternion, q(), 3),
            (CompositionKind::Binarion, q(), 0),
            (CompositionKind::Unit, q(), 0),
        ];
        for (k, f, d) in cases {
            assert_eq!(hurwitz_make(k, f).unwrap().inder_span().dim(), d, "{k} over {}", f.name());
        }
    }

    #[test]
    fn associative_inner_derivation_is_adjoint() {
        let c = hurwitz_make(CompositionKind::Quaternion, q()).unwrap();
        let f = c.field();
        for i in 0..4 {
            for j in 0..4 {
                let (a, b) = (SparseVec::unit(i), SparseVec::unit(j));
                let comm = c.mul(&a, &b).sub(f, &c.mul(&b, &a));
                let ad = c.table.left(&comm).sub(f, &c.table.right(&comm));
                assert_eq!(c.inner_derivation(&a, &b), ad);
            }
        }
    }

    #[test]
    fn inner_derivations_are_skew_derivations() {
        for c in all_handles() {
            let f = c.field();
            let n = c.dim();
            let one = c.unit().clone();
            for i in 0..n {
                assert!(c.inner_derivation(&one, &SparseVec::unit(i)).is_zero());
                for j in 0..n {
                    let d = c.inner_derivation(&SparseVec::unit(i), &SparseVec::unit(j));
                    let e = c.inner_derivation(&SparseVec::unit(j), &SparseVec::unit(i));
                    let sign = if c.table.koszul(i, j) { Scalar::ONE } else { f.from_i64(-1) };
                    assert_eq!(d, e.scale(f, &sign));
                    assert_eq!(c.table.derivation_violation(&d), None, "{} D({i},{j})", c.kind());
                    // D ∈ osp(C, b)
                    let dpar = c.table.parity(i) + c.table.parity(j);
                    for x in 0..n {
                        for y in 0..n {
                            let l = c.b(&d.cols[x], &SparseVec::unit(y));
                            let r = c.b(&SparseVec::unit(x), &d.cols[y]);
                            let r = if Parity::koszul(dpar, c.table.parity(x)) { f.neg(&r) } else { r };
                            assert!(f.add(&l, &r).is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cyclic_relation() {
        let c = hurwitz_make(CompositionKind::Octonion, fp(7)).unwrap();
        let f = c.field();
        let e = SparseVec::unit;
        for (a, b, d) in [(2, 3, 5), (0, 4, 6), (1, 2, 7), (3, 3, 6)] {
            let s = c
                .inner_derivation(&c.mul(&e(a), &e(b)), &e(d))
                .add(f, &c.inner_derivation(&c.mul(&e(b), &e(d)), &e(a)))
                .add(f, &c.inner_derivation(&c.mul(&e(d), &e(a)), &e(b)));
            assert!(s.is_zero());
        }
    }

    #[test]
    fn hurwitz_random_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for c in all_handles().into_iter().filter(|c| !c.kind().is_super()) {
            let f = c.field();
            let sample: Vec<SparseVec> = (0..200).map(|_| random_even(&c, &mut rng)).collect();
            for (k, a) in sample.iter().enumerate() {
                assert_eq!(c.conj(&c.conj(a)), *a);
                let b = &sample[(k * 7 + 3) % sample.len()];
                assert_eq!(c.norm(&c.mul(a, b)), f.mul(&c.norm(a), &c.norm(b)));
                if k < 100 {
                    assert!(c.degree2_residual(a).is_zero());
                }
            }
            for i in 0..c.dim() {
                assert!(c.degree2_residual(&SparseVec::unit(i)).is_zero());
            }
        }
    }

    #[test]
    fn para_hurwitz_unit_and_cayley() {
        let p = para_hurwitz(&hurwitz_make(CompositionKind::Unit, q()).unwrap());
        assert_eq!(*p.table().product(0, 0), SparseVec::unit(0));
        let c = hurwitz_make(CompositionKind::Octonion, q()).unwrap();
        let p = para_hurwitz(&c);
        assert!(p.check().all_hold());
        // no left unit: e∙x = x for all x is an inconsistent linear system in e
        let f = q();
        let n = 8;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for x in 0..n {
            for k in 0..n {
                rows.push(SparseVec::from_pairs(f, (0..n).map(|e| (e, p.table().product(e, x).get(k)))));
                rhs.push((rows.len() - 1, if k == x { Scalar::ONE } else { Scalar::ZERO }));
            }
        }
        let m = crate::linalg::SparseMatrix::new(n, rows);
        let sol = crate::linalg::solve_linear(f, &m, Some(&SparseVec::from_pairs(f, rhs))).unwrap();
        assert!(sol.particular.is_none());
    }

    #[test]
    fn para_hurwitz_symmetric_on_all_kinds() {
        for c in all_handles() {
            let r = para_hurwitz(&c).check();
            assert!(r.all_hold(), "para:{} over {}: {:?}", c.kind(), c.field().name(), r.first_failure());
        }
    }

    #[test]
    fn okubo() {
        let f = fp(7);
        assert_eq!(okubo_mu(f).unwrap(), f.from_i64(2));
        let mu = okubo_mu(fp(13)).unwrap();
        let g = fp(13);
        assert_eq!(g.mul(&g.from_i64(3), &g.mul(&mu, &g.sub(&Scalar::ONE, &mu))), Scalar::ONE);
        assert!(matches!(okubo_make(q()), Err(Error::Gating(_))));
        assert!(okubo_make(fp(3)).is_err());
        assert!(okubo_make(fp(5)).is_err());
        let o = okubo_make(f).unwrap();
        assert_eq!(o.dim(), 8);
        assert!(o.check().all_hold());
        assert!(okubo_make(fp(13)).unwrap().check().all_hold());
    }

    #[test]
    fn okubo_mu_oracle() {
        // brute force over the residues
        for p in [7u64, 13, 19, 31] {
            let f = fp(p);
            let roots: Vec<i64> = (0..p as i64)
                .filter(|&x| (3 * x * (1 - x)).rem_euclid(p as i64) == 1)
                .collect();
            assert_eq!(okubo_mu(f).unwrap(), f.from_i64(roots[0]));
        }
    }

    #[test]
    fn degenerate_form_rejected() {
        let pars = [Parity::Even, Parity::Even];
        let g = vec![vec![Scalar::ONE, Scalar::ONE], vec![Scalar::ONE, Scalar::ONE]];
        assert!(QuadraticSuperform::from_gram(q(), &pars, g).is_err());
        let pars = [Parity::Odd, Parity::Odd];
        let g = vec![vec![Scalar::ZERO, Scalar::ONE], vec![Scalar::ONE, Scalar::ZERO]];
        assert!(QuadraticSuperform::from_gram(q(), &pars, g).is_err());
    }

    proptest::proptest! {
        #[test]
        fn symmetric_multiplicative_random(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let o = okubo_make(fp(7)).unwrap();
            let f = o.field();
            let x = SparseVec::from_pairs(f, (0..8).map(|i| (i, f.random(&mut rng))));
            let y = SparseVec::from_pairs(f, (0..8).map(|i| (i, f.random(&mut rng))));
            proptest::prop_assert_eq!(o.norm(&o.mul(&x, &y)), f.mul(&o.norm(&x), &o.norm(&y)));
            let c = para_hurwitz(&hurwitz_make(CompositionKind::Octonion, q()).unwrap());
            let f = q();
            let x = SparseVec::from_pairs(f, (0..8).map(|i| (i, f.random(&mut rng))));
            let y = SparseVec::from_pairs(f, (0..8).map(|i| (i, f.random(&mut rng))));
            proptest::prop_assert_eq!(c.norm(&c.mul(&x, &y)), f.mul(&c.norm(&x), &c.norm(&y)));
        }
    }
}
