//! Orthosymplectic algebras, the triality algebra tri(S) of a symmetric
//! composition (super)algebra, its elements `t_{x,y}` and the automorphism θ.

use crate::composition::{CompositionHandle, QuadraticSuperform, SymmetricCompositionHandle};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{solve_linear, LinMap, MapSpan, SparseMatrix, SparseVec};
use crate::space::Parity;
use crate::table::AlgebraTable;

/// Homogeneous basis of `osp(C, b)`, even maps first.
#[derive(Clone, Debug)]
pub struct OspBasis {
    pub even: Vec<LinMap>,
    pub odd: Vec<LinMap>,
}

impl OspBasis {
    pub fn dims(&self) -> (usize, usize) {
        (self.even.len(), self.odd.len())
    }

    pub fn of_parity(&self, p: Parity) -> &[LinMap] {
        match p {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }
}

/// Solves `b(Xx, y) + (-1)^{|X||x|} b(x, Xy) = 0` for homogeneous `X`.
pub fn osp_basis(field: Field, parities: &[Parity], form: &QuadraticSuperform) -> Result<OspBasis> {
    let n = parities.len();
    if form.dim() != n {
        return Err(Error::Dimension(format!("form of dimension {} on a {n}-dimensional space", form.dim())));
    }
    let mut parts = Vec::new();
    for pi in [Parity::Even, Parity::Odd] {
        // unknown k ↔ entry (r, c) with |r| + |c| = π
        let slots: Vec<(usize, usize)> =
            (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).filter(|&(r, c)| parities[r] + parities[c] == pi).collect();
        let mut rows = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let sign = Parity::koszul(pi, parities[x]);
                let row = SparseVec::from_pairs(
                    field,
                    slots.iter().enumerate().flat_map(|(k, &(r, c))| {
                        let mut out = Vec::new();
                        if c == x {
                            out.push((k, form.b_basis(r, y).clone()));
                        }
                        if c == y {
                            let v = form.b_basis(x, r).clone();
                            out.push((k, if sign { field.neg(&v) } else { v }));
                        }
                        out
                    }),
                );
                if !row.is_zero() {
                    rows.push(row);
                }
            }
        }
        let sol = solve_linear(field, &SparseMatrix::new(slots.len(), rows), None)?;
        let maps = sol
            .kernel
            .iter()
            .map(|v| {
                let mut cols = vec![Vec::new(); n];
                for (k, c) in v.iter() {
                    let (r, col) = slots[*k];
                    cols[col].push((r, c.clone()));
                }
                LinMap::from_cols(n, cols.into_iter().map(|p| SparseVec::from_pairs(field, p)).collect())
            })
            .collect();
        parts.push(maps);
    }
    let odd = parts.pop().expect("two parities");
    let even = parts.pop().expect("two parities");
    Ok(OspBasis { even, odd })
}

/// A triple `(d₀, d₁, d₂)` of maps on a composition (super)algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialityElement {
    pub d: [LinMap; 3],
}

impl TrialityElement {
    pub fn zero(n: usize) -> TrialityElement {
        TrialityElement { d: [LinMap::zero(n), LinMap::zero(n), LinMap::zero(n)] }
    }

    pub fn n(&self) -> usize {
        self.d[0].n
    }

    /// `θ(d₀, d₁, d₂) = (d₂, d₀, d₁)`.
    pub fn theta(&self) -> TrialityElement {
        TrialityElement { d: [self.d[2].clone(), self.d[0].clone(), self.d[1].clone()] }
    }

    pub fn theta_pow(&self, i: usize) -> TrialityElement {
        let mut t = self.clone();
        for _ in 0..i % 3 {
            t = t.theta();
        }
        t
    }

    /// Block-diagonal map on `C ⊕ C ⊕ C`.
    pub fn to_block(&self, f: Field) -> LinMap {
        let n = self.n();
        let mut cols = Vec::with_capacity(3 * n);
        for (b, m) in self.d.iter().enumerate() {
            for c in &m.cols {
                cols.push(c.map_indices(f, |k| k + b * n));
            }
        }
        LinMap::from_cols(3 * n, cols)
    }

    pub fn from_block(f: Field, block: &LinMap) -> TrialityElement {
        let n = block.n / 3;
        let part = |b: usize| {
            LinMap::from_cols(
                n,
                (0..n).map(|j| block.cols[b * n + j].map_indices(f, |k| k - b * n)).collect(),
            )
        };
        TrialityElement { d: [part(0), part(1), part(2)] }
    }

    pub fn add(&self, f: Field, o: &TrialityElement) -> TrialityElement {
        TrialityElement { d: [0, 1, 2].map(|i| self.d[i].add(f, &o.d[i])) }
    }

    pub fn scale(&self, f: Field, c: &Scalar) -> TrialityElement {
        TrialityElement { d: [0, 1, 2].map(|i| self.d[i].scale(f, c)) }
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|m| m.is_zero())
    }

    /// Componentwise supercommutator.
    pub fn bracket(&self, f: Field, o: &TrialityElement, negate: bool) -> TrialityElement {
        TrialityElement { d: [0, 1, 2].map(|i| self.d[i].supercommutator(f, &o.d[i], negate)) }
    }

    pub fn parity(&self, parities: &[Parity]) -> Option<Parity> {
        let mut seen = None;
        for m in &self.d {
            if m.is_zero() {
                continue;
            }
            let p = m.parity(parities)?;
            match seen {
                None => seen = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(seen.unwrap_or(Parity::Even))
    }
}

/// Where a triple fails to lie in tri(S).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriViolation {
    Inhomogeneous,
    NotOrthosymplectic { component: usize, x: usize, y: usize },
    Relation { x: usize, y: usize },
}

/// Checks osp membership of each component and
/// `d₀(x∙y) = d₁(x)∙y + (-1)^{|d||x|} x∙d₂(y)` on all basis pairs.
pub fn tri_violation(s: &SymmetricCompositionHandle, t: &TrialityElement) -> Option<TriViolation> {
    let f = s.field();
    let tb = s.table();
    let pars = tb.parities();
    let n = s.dim();
    let Some(pd) = t.parity(pars) else { return Some(TriViolation::Inhomogeneous) };
    for (component, d) in t.d.iter().enumerate() {
        for x in 0..n {
            for y in 0..n {
                let l = s.b(&d.cols[x], &SparseVec::unit(y));
                let r = s.b(&SparseVec::unit(x), &d.cols[y]);
                let sum = if Parity::koszul(pd, pars[x]) { f.sub(&l, &r) } else { f.add(&l, &r) };
                if !sum.is_zero() {
                    return Some(TriViolation::NotOrthosymplectic { component, x, y });
                }
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            let lhs = t.d[0].apply(f, tb.product(x, y));
            let a = tb.mul(&t.d[1].cols[x], &SparseVec::unit(y));
            let b = tb.mul(&SparseVec::unit(x), &t.d[2].cols[y]);
            let rhs = if Parity::koszul(pd, pars[x]) { a.sub(f, &b) } else { a.add(f, &b) };
            if lhs != rhs {
                return Some(TriViolation::Relation { x, y });
            }
        }
    }
    None
}

/// tri(S) with a reduced echelon basis of homogeneous triples.
#[derive(Clone, Debug)]
pub struct TrialitySpace {
    span: MapSpan,
    elements: Vec<TrialityElement>,
    parities: Vec<Parity>,
    field: Field,
}

impl TrialitySpace {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.span.dims()
    }

    pub fn basis(&self) -> &[TrialityElement] {
        &self.elements
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.span.parity(i)
    }

    /// Coordinates in [`TrialitySpace::basis`], if `t` lies in the span.
    pub fn coords(&self, t: &TrialityElement) -> Option<SparseVec> {
        self.span.coords(&t.to_block(self.field))
    }

    pub fn coords_unchecked(&self, t: &TrialityElement) -> SparseVec {
        self.span.coords_unchecked(&t.to_block(self.field))
    }

    /// First pair of basis elements whose bracket leaves the span.
    pub fn closure_violation(&self) -> Option<(usize, usize)> {
        self.span.closure_violation()
    }

    /// Matrix of θ in the basis (columns are coordinates of θ(basis_j)).
    pub fn theta_matrix(&self) -> Result<LinMap> {
        let cols = self
            .elements
            .iter()
            .map(|t| self.coords(&t.theta()).ok_or_else(|| Error::Internal("θ leaves tri".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(LinMap::from_cols(self.dim(), cols))
    }

    pub fn space_parities(&self) -> &[Parity] {
        &self.parities
    }
}

/// Solves for tri(S) over triples in `osp(S, b)³`.
pub fn tri_solve(s: &SymmetricCompositionHandle) -> Result<TrialitySpace> {
    let f = s.field();
    let tb = s.table();
    let pars = tb.parities().to_vec();
    let n = s.dim();
    let osp = osp_basis(f, &pars, s.form())?;
    let mut found = Vec::new();
    for pi in [Parity::Even, Parity::Odd] {
        let ob = osp.of_parity(pi);
        let m = ob.len();
        if m == 0 {
            continue;
        }
        // equation rows indexed by (x, y, output coordinate); unknown (i, k) ↔ α_{i,k} at i*m + k
        let mut cols_of: Vec<Vec<SparseVec>> = Vec::with_capacity(3 * m);
        for comp in 0..3 {
            for o in ob {
                let mut per_pair = Vec::with_capacity(n * n);
                for x in 0..n {
                    for y in 0..n {
                        let v = match comp {
                            0 => o.apply(f, tb.product(x, y)),
                            1 => tb.mul(&o.cols[x], &SparseVec::unit(y)).neg(f),
                            _ => {
                                let w = tb.mul(&SparseVec::unit(x), &o.cols[y]);
                                if Parity::koszul(pi, pars[x]) {
                                    w
                                } else {
                                    w.neg(f)
                                }
                            }
                        };
                        per_pair.push(v);
                    }
                }
                cols_of.push(per_pair);
            }
        }
        let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); n * n * n];
        for (u, per_pair) in cols_of.iter().enumerate() {
            for (pair, v) in per_pair.iter().enumerate() {
                for (k, c) in v.iter() {
                    rows[pair * n + k].push((u, c.clone()));
                }
            }
        }
        let rows: Vec<SparseVec> =
            rows.into_iter().filter(|r| !r.is_empty()).map(|r| SparseVec::from_pairs(f, r)).collect();
        let sol = solve_linear(f, &SparseMatrix::new(3 * m, rows), None)?;
        for v in sol.kernel {
            let mut t = TrialityElement::zero(n);
            for (u, c) in v.iter() {
                let (comp, k) = (u / m, u % m);
                t.d[comp] = t.d[comp].axpy(f, c, &ob[k]);
            }
            found.push(t);
        }
    }
    let block_pars: Vec<Parity> = pars.iter().chain(&pars).chain(&pars).copied().collect();
    let span = MapSpan::build(f, &block_pars, found.iter().map(|t| t.to_block(f)));
    let elements = span.basis().iter().map(|b| TrialityElement::from_block(f, b)).collect();
    Ok(TrialitySpace { span, elements, parities: pars, field: f })
}

/// θ with a membership check on input and output.
pub fn theta(s: &SymmetricCompositionHandle, t: &TrialityElement) -> Result<TrialityElement> {
    if let Some(v) = tri_violation(s, t) {
        return Err(Error::Invalid(format!("not an element of tri: {v:?}")));
    }
    let out = t.theta();
    if let Some(v) = tri_violation(s, &out) {
        return Err(Error::Internal(format!("θ left tri: {v:?}")));
    }
    Ok(out)
}

fn sign(f: Field, neg: bool, c: Scalar) -> Scalar {
    if neg {
        f.neg(&c)
    } else {
        c
    }
}

/// `t_{x,y}` for basis vectors:
/// `(σ_{x,y}, ½b(x,y)1 - r_x l_y, ½b(x,y)1 - l_x r_y)` with `l_x z = x∙z`,
/// `r_x z = (-1)^{|x||z|} z∙x` and
/// `σ_{x,y}(z) = (-1)^{|y||z|} b(x,z)y - (-1)^{|x|(|y|+|z|)} b(y,z)x`.
pub fn t_xy_basis(s: &SymmetricCompositionHandle, x: usize, y: usize) -> TrialityElement {
    let f = s.field();
    let tb: &AlgebraTable = s.table();
    let p = |i: usize| tb.parity(i).is_odd();
    let n = s.dim();
    let half_b = f.mul(&f.half(), s.form().b_basis(x, y));
    let (ex, ey) = (SparseVec::unit(x), SparseVec::unit(y));
    let mut sigma = Vec::with_capacity(n);
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for z in 0..n {
        let bxz = s.form().b_basis(x, z).clone();
        let byz = s.form().b_basis(y, z).clone();
        let a = ey.scale(f, &sign(f, p(y) && p(z), bxz));
        let b = ex.scale(f, &sign(f, p(x) && (p(y) ^ p(z)), byz));
        sigma.push(a.sub(f, &b));
        let ez = SparseVec::unit(z);
        // r_x l_y z = (-1)^{|x|(|y|+|z|)} (y∙z)∙x
        let rl = tb.mul(tb.product(y, z), &ex);
        let rl = if p(x) && (p(y) ^ p(z)) { rl.neg(f) } else { rl };
        d1.push(ez.scale(f, &half_b).sub(f, &rl));
        // l_x r_y z = (-1)^{|y||z|} x∙(z∙y)
        let lr = tb.mul(&ex, tb.product(z, y));
        let lr = if p(y) && p(z) { lr.neg(f) } else { lr };
        d2.push(ez.scale(f, &half_b).sub(f, &lr));
    }
    TrialityElement { d: [LinMap::from_cols(n, sigma), LinMap::from_cols(n, d1), LinMap::from_cols(n, d2)] }
}

/// `t_{x,y}` extended bilinearly.
pub fn t_xy(s: &SymmetricCompositionHandle, x: &SparseVec, y: &SparseVec) -> TrialityElement {
    let f = s.field();
    let mut out = TrialityElement::zero(s.dim());
    for (i, a) in x.iter() {
        for (j, b) in y.iter() {
            out = out.add(f, &t_xy_basis(s, *i, *j).scale(f, &f.mul(a, b)));
        }
    }
    out
}

/// The Hurwitz form `(n(x,·)y - n(y,·)x, ½n(x,y)1 - R_x̄R_y, ½n(x,y)1 - L_x̄L_y)`
/// written with the unital product of `c`.
pub fn t_xy_hurwitz(c: &CompositionHandle, x: &SparseVec, y: &SparseVec) -> TrialityElement {
    let f = c.field();
    let n = c.dim();
    let xb = c.conj(x);
    let half = f.mul(&f.half(), &c.b(x, y));
    let mut d = [Vec::new(), Vec::new(), Vec::new()];
    for z in 0..n {
        let ez = SparseVec::unit(z);
        d[0].push(y.scale(f, &c.b(x, &ez)).sub(f, &x.scale(f, &c.b(y, &ez))));
        d[1].push(ez.scale(f, &half).sub(f, &c.mul(&c.mul(&ez, y), &xb)));
        d[2].push(ez.scale(f, &half).sub(f, &c.mul(&xb, &c.mul(y, &ez))));
    }
    TrialityElement { d: d.map(|cols| LinMap::from_cols(n, cols)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::{comp_super_make, hurwitz_make, okubo_make, para_hurwitz, CompositionKind};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fp(p: u64) -> Field {
        Field::new(p).unwrap()
    }

    fn para(kind: CompositionKind, f: Field) -> SymmetricCompositionHandle {
        let c = if kind.is_super() { comp_super_make(kind, f) } else { hurwitz_make(kind, f) };
        para_hurwitz(&c.unwrap())
    }

    // osp(m|2k): even so(m) ⊕ sp(2k), odd m·2k
    fn osp_dims(m: usize, k2: usize) -> (usize, usize) {
        (m * (m.saturating_sub(1)) / 2 + k2 * (k2 + 1) / 2, m * k2)
    }

    #[test]
    fn osp_dimensions_match_formula() {
        for (kind, f) in [
            (CompositionKind::Unit, Field::Rational),
            (CompositionKind::Binarion, fp(5)),
            (CompositionKind::Quaternion, Field::Rational),
            (CompositionKind::Octonion, fp(7)),
            (CompositionKind::B12, fp(3)),
            (CompositionKind::B42, fp(3)),
        ] {
            let s = para(kind, f);
            let (e, o) = s.table().dims();
            let b = osp_basis(f, s.table().parities(), s.form()).unwrap();
            assert_eq!(b.dims(), osp_dims(e, o), "{kind}");
            for m in &b.even {
                assert_eq!(m.parity(s.table().parities()), Some(Parity::Even));
            }
            for m in &b.odd {
                assert_eq!(m.parity(s.table().parities()), Some(Parity::Odd));
            }
        }
    }

    fn check_space(s: &SymmetricCompositionHandle, expected: (usize, usize)) -> TrialitySpace {
        let t = tri_solve(s).unwrap();
        assert_eq!(t.dims(), expected, "{}", s.name());
        for (i, e) in t.basis().iter().enumerate() {
            assert_eq!(tri_violation(s, e), None, "{} basis {i}", s.name());
            assert_eq!(e.parity(s.table().parities()), Some(t.parity(i)));
        }
        assert_eq!(t.closure_violation(), None, "{}", s.name());
        t
    }

    #[test]
    fn tri_dimensions_hurwitz() {
        for f in [Field::Rational, fp(7)] {
            check_space(&para(CompositionKind::Unit, f), (0, 0));
            check_space(&para(CompositionKind::Binarion, f), (2, 0));
            check_space(&para(CompositionKind::Quaternion, f), (9, 0));
            check_space(&para(CompositionKind::Octonion, f), (28, 0));
        }
    }

    #[test]
    fn tri_dimensions_okubo_and_super() {
        check_space(&okubo_make(fp(7)).unwrap(), (28, 0));
        check_space(&para(CompositionKind::B12, fp(3)), (3, 2));
        check_space(&para(CompositionKind::B42, fp(3)), (9, 8));
    }

    fn pow_map(f: Field, m: &LinMap, k: usize) -> LinMap {
        (0..k).fold(LinMap::identity(m.n), |acc, _| acc.compose(f, m))
    }

    #[test]
    fn theta_has_order_three() {
        for s in [para(CompositionKind::Octonion, Field::Rational), okubo_make(fp(13)).unwrap(), para(CompositionKind::B42, fp(3))] {
            let t = tri_solve(&s).unwrap();
            let th = t.theta_matrix().unwrap();
            assert_ne!(th, LinMap::identity(t.dim()));
            assert_eq!(pow_map(s.field(), &th, 3), LinMap::identity(t.dim()));
        }
    }

    #[test]
    fn theta_rejects_non_members() {
        let s = para(CompositionKind::Quaternion, Field::Rational);
        let mut t = TrialityElement::zero(4);
        t.d[0] = LinMap::identity(4);
        assert!(matches!(theta(&s, &t), Err(Error::Invalid(_))));
        let good = tri_solve(&s).unwrap().basis()[0].clone();
        assert_eq!(theta(&s, &good).unwrap(), good.theta());
    }

    fn all_symmetric() -> Vec<SymmetricCompositionHandle> {
        let mut v = Vec::new();
        for k in CompositionKind::HURWITZ {
            v.push(para(k, Field::Rational));
            v.push(para(k, fp(5)));
        }
        v.push(okubo_make(fp(7)).unwrap());
        v.push(para(CompositionKind::B12, fp(3)));
        v.push(para(CompositionKind::B42, fp(3)));
        v
    }

    #[test]
    fn t_xy_lie_in_tri_and_theta_orbits_span_it() {
        for s in all_symmetric() {
            let f = s.field();
            let n = s.dim();
            let mut gens = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    let t = t_xy_basis(&s, x, y);
                    assert_eq!(tri_violation(&s, &t), None, "{} t({x},{y})", s.name());
                    for i in 0..3 {
                        gens.push(t.theta_pow(i).to_block(f));
                    }
                }
            }
            let pars: Vec<Parity> = (0..3).flat_map(|_| s.table().parities().iter().copied()).collect();
            let span = MapSpan::build(f, &pars, gens);
            assert_eq!(span.dims(), tri_solve(&s).unwrap().dims(), "{}", s.name());
        }
    }

    #[test]
    fn t_xy_matches_hurwitz_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in [Field::Rational, fp(7)] {
            for k in CompositionKind::HURWITZ {
                let c = hurwitz_make(k, f).unwrap();
                let s = para_hurwitz(&c);
                for _ in 0..10 {
                    let x = SparseVec::from_pairs(f, (0..c.dim()).map(|i| (i, f.random(&mut rng))));
                    let y = SparseVec::from_pairs(f, (0..c.dim()).map(|i| (i, f.random(&mut rng))));
                    assert_eq!(t_xy(&s, &x, &y), t_xy_hurwitz(&c, &x, &y), "{k}");
                }
            }
        }
    }

    #[test]
    fn block_round_trip() {
        let s = para(CompositionKind::B12, fp(3));
        for t in tri_solve(&s).unwrap().basis() {
            assert_eq!(&TrialityElement::from_block(s.field(), &t.to_block(s.field())), t);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn t_xy_is_superskew(x in 0usize..6, y in 0usize..6, which in 0usize..3) {
            let s = match which {
                0 => para(CompositionKind::B42, fp(3)),
                1 => para(CompositionKind::Octonion, fp(5)),
                _ => okubo_make(fp(7)).unwrap(),
            };
            let f = s.field();
            let sign = s.table().koszul(x, y);
            let a = t_xy_basis(&s, x, y);
            let b = t_xy_basis(&s, y, x);
            let sum = if sign { a.add(f, &b.scale(f, &f.from_i64(-1))) } else { a.add(f, &b) };
            prop_assert!(sum.is_zero());
        }

        #[test]
        fn random_combinations_stay_in_tri(seed in any::<u64>()) {
            let s = para(CompositionKind::Octonion, fp(7));
            let f = s.field();
            let t = tri_solve(&s).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut acc = TrialityElement::zero(8);
            for b in t.basis() {
                acc = acc.add(f, &b.scale(f, &f.random(&mut rng)));
            }
            prop_assert_eq!(tri_violation(&s, &acc), None);
            prop_assert!(t.coords(&acc.theta()).is_some());
        }
    }
}
