//! The Tits construction 𝒯(C,J), the symmetric construction 𝔤(S,S′) and the
//! characteristic-3 variant 𝒯̃(C,J), as explicit structure-constant tables.

use serde::Serialize;
use serde_json::{json, Value};

use crate::analyze::{check_super_jacobi, JacobiVerdict};
use crate::check::IdentityCheck;
use crate::composition::{CompositionHandle, CompositionKind, SymmetricCompositionHandle};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::jordan::{ch3_verify, JordanHandle, CH3_DRAWS};
use crate::linalg::{Accumulator, Echelon, LinMap, MapSpan, SparseVec};
use crate::space::{Parity, SuperSpace};
use crate::table::AlgebraTable;
use crate::triality::{t_xy_basis, tri_solve, TrialitySpace};

pub const DEFAULT_CH3_SEED: u64 = 3;

/// A contiguous run of basis vectors with a common origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub name: String,
    pub start: usize,
    pub len: usize,
    pub dims: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub construction: String,
    pub ingredients: Vec<String>,
    pub field: String,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub forced: bool,
    /// Construction-specific choices (θ orientation, bracket coefficients, ch₃ verdicts).
    #[serde(skip_serializing_if = "Value::is_null")]
    pub choices: Value,
}

/// A Lie (super)algebra produced by one of the constructions.
#[derive(Clone, Debug)]
pub struct LieSuperAlgebra {
    table: AlgebraTable,
    provenance: Provenance,
    blocks: Vec<Block>,
    jacobi: JacobiVerdict,
}

impl LieSuperAlgebra {
    /// Wraps a table; Jacobi is computed here.
    pub fn new(table: AlgebraTable, provenance: Provenance, blocks: Vec<Block>) -> Result<LieSuperAlgebra> {
        check_blocks(&table, &blocks)?;
        if let Some((i, j)) = table.superanticommutativity_violation() {
            return Err(Error::Internal(format!(
                "bracket is not super-anticommutative on ({}, {})",
                table.space().label(i),
                table.space().label(j)
            )));
        }
        let jacobi = check_super_jacobi(&table);
        Ok(LieSuperAlgebra { table, provenance, blocks, jacobi })
    }

    /// Wraps a table with a Jacobi verdict computed elsewhere.
    pub fn from_parts(table: AlgebraTable, provenance: Provenance, blocks: Vec<Block>, jacobi: JacobiVerdict) -> Self {
        LieSuperAlgebra { table, provenance, blocks, jacobi }
    }

    pub fn table(&self) -> &AlgebraTable {
        &self.table
    }

    pub fn into_table(self) -> AlgebraTable {
        self.table
    }

    pub fn field(&self) -> Field {
        self.table.field()
    }

    pub fn dim(&self) -> usize {
        self.table.dim()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.table.dims()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn jacobi(&self) -> &JacobiVerdict {
        &self.jacobi
    }

    pub fn blocks_json(&self) -> Value {
        Value::Array(
            self.blocks
                .iter()
                .map(|b| json!({ "name": b.name, "start": b.start, "len": b.len, "dims": [b.dims.0, b.dims.1] }))
                .collect(),
        )
    }
}

/// Blocks must tile the basis in order and report their graded dimensions.
pub fn check_blocks(t: &AlgebraTable, blocks: &[Block]) -> Result<()> {
    let mut at = 0;
    for b in blocks {
        if b.start != at {
            return Err(Error::Invalid(format!("block {} starts at {} instead of {at}", b.name, b.start)));
        }
        let end = b.start + b.len;
        if end > t.dim() {
            return Err(Error::Invalid(format!("block {} runs past the basis", b.name)));
        }
        let odd = (b.start..end).filter(|&i| t.parity(i).is_odd()).count();
        if b.dims != (b.len - odd, odd) {
            return Err(Error::Invalid(format!("block {} declares dims {:?}", b.name, b.dims)));
        }
        at = end;
    }
    if at != t.dim() {
        return Err(Error::Invalid(format!("blocks cover {at} of {} basis vectors", t.dim())));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// helpers

/// Human-readable label of a vector, e.g. `e1-e2` or `2·u1+v3`.
fn vec_label(f: Field, space: &SuperSpace, v: &SparseVec) -> String {
    let mut s = String::new();
    for (k, (i, c)) in v.iter().enumerate() {
        let neg = f.centered(c).map_or(c.to_string().starts_with('-'), |x| x < 0);
        let mag = if neg { f.neg(c) } else { c.clone() };
        if neg {
            s.push('-');
        } else if k > 0 {
            s.push('+');
        }
        if !f.is_one(&mag) {
            s.push_str(&f.format(&mag));
            s.push('·');
        }
        s.push_str(space.label(*i));
    }
    s
}

/// A fixed basis of a subspace with coordinates read from the echelon form.
struct SubBasis {
    ech: Echelon,
}

impl SubBasis {
    fn new(f: Field, n: usize, vs: &[SparseVec]) -> SubBasis {
        SubBasis { ech: Echelon::from_vectors(f, n, vs) }
    }

    fn rows(&self) -> &[SparseVec] {
        self.ech.rows()
    }

    fn len(&self) -> usize {
        self.ech.rank()
    }

    fn coords(&self, v: &SparseVec, what: &str) -> Result<SparseVec> {
        let pairs = self.ech.coords(v).ok_or_else(|| Error::Internal(format!("{what} leaves its subspace")))?;
        Ok(SparseVec::from_pairs(self.ech.field(), pairs))
    }
}

fn map_coords(span: &MapSpan, m: &LinMap, what: &str) -> Result<SparseVec> {
    span.coords(m).ok_or_else(|| Error::Internal(format!("{what} is not in the derivation span")))
}

fn shift(f: Field, v: &SparseVec, by: usize) -> SparseVec {
    v.map_indices(f, |i| i + by)
}

fn block(name: &str, start: usize, parities: &[Parity]) -> Block {
    let odd = parities.iter().filter(|p| p.is_odd()).count();
    Block { name: name.to_string(), start, len: parities.len(), dims: (parities.len() - odd, odd) }
}

/// Row-major product storage filled pair by pair.
struct Products {
    f: Field,
    n: usize,
    data: Vec<SparseVec>,
}

impl Products {
    fn new(f: Field, n: usize) -> Products {
        Products { f, n, data: vec![SparseVec::new(); n * n] }
    }

    /// Sets `[e_i, e_j] = v` and `[e_j, e_i] = -(-1)^{|i||j|} v`.
    fn set_pair(&mut self, i: usize, j: usize, v: SparseVec, koszul: bool) {
        let back = if koszul { v.clone() } else { v.neg(self.f) };
        self.data[j * self.n + i] = back;
        self.data[i * self.n + j] = v;
    }

    fn finish(self, space: SuperSpace) -> Result<AlgebraTable> {
        AlgebraTable::with_products(self.f, space, self.data)
    }
}

// ---------------------------------------------------------------------------
// Tits construction

#[derive(Clone, Copy, Debug)]
pub struct TitsOptions {
    /// Build even when J fails the degree-3 test for dim C = 8.
    pub force: bool,
    pub ch3_seed: u64,
}

impl Default for TitsOptions {
    fn default() -> Self {
        TitsOptions { force: false, ch3_seed: DEFAULT_CH3_SEED }
    }
}

fn tits_gate(c: &CompositionHandle, j: &JordanHandle, opts: &TitsOptions) -> Result<Value> {
    let f = c.field();
    if f != j.field() {
        return Err(Error::FieldMismatch(format!("{} over {} and {} over {}", c.kind(), f, j.kind(), j.field())));
    }
    if f.characteristic() == 3 {
        return Err(Error::Gating(
            "the Tits construction needs characteristic other than 3; use the g construction".into(),
        ));
    }
    if c.kind().is_super() {
        return Err(Error::Gating(format!("{} is a superalgebra; the Tits construction takes a Hurwitz algebra", c.kind())));
    }
    j.trace()?;
    if c.dim() == 8 {
        let r = ch3_verify(j, opts.ch3_seed, CH3_DRAWS)?;
        if !r.holds && !opts.force {
            return Err(Error::Gating(format!(
                "{} fails the degree-3 identity over {}; the octonion row needs it (use --force to build anyway)",
                j.kind(),
                f.name()
            )));
        }
        return Ok(json!({ "ch3": r.holds }));
    }
    Ok(Value::Null)
}

/// Ingredient data shared by [`tits_build`] and [`tits_conditions_check`].
struct TitsData {
    ic: MapSpan,
    c0: SubBasis,
    j0: SubBasis,
    ij: MapSpan,
}

fn tits_data(c: &CompositionHandle, j: &JordanHandle) -> Result<TitsData> {
    let f = c.field();
    let c0 = SubBasis::new(f, c.dim(), &c.c0_basis());
    let mut j0v = j.j0_basis()?;
    // homogeneous vectors, even first
    j0v.sort_by_key(|v| v.parity(j.table().parities()).map(|p| p.bit()));
    let j0 = SubBasis::new(f, j.dim(), &j0v);
    Ok(TitsData { ic: c.inder_span(), c0, j0, ij: j.inder_span() })
}

/// `𝒯(C,J) = inder C ⊕ (C⁰⊗J⁰) ⊕ inder J` with
/// `[a⊗x, b⊗y] = t_J(xy)D_{a,b} + [a,b]⊗x∗y + 2t_C(ab)d_{x,y}`.
pub fn tits_build(c: &CompositionHandle, j: &JordanHandle, opts: &TitsOptions) -> Result<LieSuperAlgebra> {
    let choices = tits_gate(c, j, opts)?;
    let f = c.field();
    let d = tits_data(c, j)?;
    let jp = j.table().parities();
    let (kc, m, kj) = (d.ic.dim(), d.c0.len(), d.j0.len());
    let (sc, st, sj) = (0, d.ic.dim(), d.ic.dim() + m * kj);
    let n = sj + d.ij.dim();
    let j0par: Vec<Parity> = d.j0.rows().iter().map(|v| v.parity(jp).expect("homogeneous J⁰ basis")).collect();

    let mut basis = Vec::with_capacity(n);
    for k in 0..kc {
        basis.push((format!("D{k}"), d.ic.parity(k)));
    }
    for a in d.c0.rows() {
        for (x, p) in d.j0.rows().iter().zip(&j0par) {
            basis.push((format!("{}⊗{}", vec_label(f, c.table().space(), a), vec_label(f, j.table().space(), x)), *p));
        }
    }
    for k in 0..d.ij.dim() {
        basis.push((format!("d{k}"), d.ij.parity(k)));
    }
    let space = SuperSpace::new(basis)?;
    let tensor = |a: usize, x: usize| st + a * kj + x;

    // precomputed pieces
    let ca: Vec<LinMap> = d.ic.basis().to_vec();
    let ja: Vec<LinMap> = d.ij.basis().to_vec();
    let mut dab = vec![SparseVec::new(); m * m];
    let mut comm = vec![SparseVec::new(); m * m];
    let mut tcab = vec![f.zero(); m * m];
    for (a, va) in d.c0.rows().iter().enumerate() {
        for (b, vb) in d.c0.rows().iter().enumerate() {
            dab[a * m + b] = map_coords(&d.ic, &c.inner_derivation(va, vb), "D_{a,b}")?;
            let ab = c.mul(va, vb);
            comm[a * m + b] = d.c0.coords(&ab.sub(f, &c.mul(vb, va)), "[a,b]")?;
            tcab[a * m + b] = c.trace(&ab);
        }
    }
    let mut dxy = vec![SparseVec::new(); kj * kj];
    let mut star = vec![SparseVec::new(); kj * kj];
    let mut txy = vec![f.zero(); kj * kj];
    for (x, vx) in d.j0.rows().iter().enumerate() {
        for (y, vy) in d.j0.rows().iter().enumerate() {
            dxy[x * kj + y] = map_coords(&d.ij, &j.inner_derivation(vx, vy), "d_{x,y}")?;
            star[x * kj + y] = d.j0.coords(&j.star(vx, vy)?, "x∗y")?;
            txy[x * kj + y] = j.t(&j.mul(vx, vy))?;
        }
    }

    let mut pr = Products::new(f, n);
    let kz = |i: usize, k: usize| Parity::koszul(space.parity(i), space.parity(k));
    for p in 0..kc {
        for q in p..kc {
            let v = map_coords(&d.ic, &ca[p].supercommutator(f, &ca[q], false), "[D,D']")?;
            pr.set_pair(sc + p, sc + q, shift(f, &v, sc), false);
        }
        for a in 0..m {
            let da = d.c0.coords(&ca[p].apply(f, &d.c0.rows()[a]), "D(a)")?;
            for x in 0..kj {
                let v = SparseVec::from_pairs(f, da.iter().map(|(b, s)| (tensor(*b, x), s.clone())));
                pr.set_pair(sc + p, tensor(a, x), v, false);
            }
        }
    }
    for p in 0..d.ij.dim() {
        for q in p..d.ij.dim() {
            let neg = kz(sj + p, sj + q);
            let v = map_coords(&d.ij, &ja[p].supercommutator(f, &ja[q], neg), "[d,d']")?;
            pr.set_pair(sj + p, sj + q, shift(f, &v, sj), neg);
        }
        for x in 0..kj {
            let dx = d.j0.coords(&ja[p].apply(f, &d.j0.rows()[x]), "d(x)")?;
            for a in 0..m {
                let v = SparseVec::from_pairs(f, dx.iter().map(|(y, s)| (tensor(a, *y), s.clone())));
                pr.set_pair(sj + p, tensor(a, x), v, kz(sj + p, tensor(a, x)));
            }
        }
    }
    let two = f.from_i64(2);
    for a in 0..m {
        for x in 0..kj {
            for b in 0..m {
                for y in 0..kj {
                    let (u, w) = (tensor(a, x), tensor(b, y));
                    if w < u {
                        continue;
                    }
                    let mut acc = Accumulator::new(f, n);
                    let t = &txy[x * kj + y];
                    if !t.is_zero() {
                        acc.add_scaled(t, &shift(f, &dab[a * m + b], sc));
                    }
                    for (cb, s) in comm[a * m + b].iter() {
                        for (z, r) in star[x * kj + y].iter() {
                            acc.add(tensor(*cb, *z), &f.mul(s, r));
                        }
                    }
                    let tc = &tcab[a * m + b];
                    if !tc.is_zero() {
                        acc.add_scaled(&f.mul(&two, tc), &shift(f, &dxy[x * kj + y], sj));
                    }
                    pr.set_pair(u, w, acc.take(), kz(u, w));
                }
            }
        }
    }
    let table = pr.finish(space)?;
    let pars = table.parities().to_vec();
    let blocks = vec![
        block("inder C", sc, &pars[sc..st]),
        block("C0⊗J0", st, &pars[st..sj]),
        block("inder J", sj, &pars[sj..]),
    ];
    let prov = Provenance {
        construction: "tits".into(),
        ingredients: vec![c.kind().name().to_string(), j.kind().to_string()],
        field: f.name(),
        forced: opts.force,
        choices,
    };
    LieSuperAlgebra::new(table, prov, blocks)
}

// ---------------------------------------------------------------------------
// conditions (i)–(iii)

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TitsConditions {
    pub i: IdentityCheck,
    pub ii: IdentityCheck,
    pub iii: IdentityCheck,
}

impl TitsConditions {
    pub fn all_hold(&self) -> bool {
        self.i.holds && self.ii.holds && self.iii.holds
    }
}

/// Cyclic rotations of `(1,2,3)` with the super sign `(-1)^{|x_σ1||x_σ3|}`.
fn cyclic(x: [usize; 3], odd: &[bool]) -> [([usize; 3], bool); 3] {
    let rot = |[a, b, c]: [usize; 3]| [b, c, a];
    let s0 = x;
    let s1 = rot(s0);
    let s2 = rot(s1);
    [s0, s1, s2].map(|s| (s, odd[s[0]] && odd[s[2]]))
}

/// Evaluates the cyclic sums (i)–(iii) over all basis triples of `C⁰` and `J⁰`,
/// with the super sign `(-1)^{|x_1||x_3|}` on each rotated term.
pub fn tits_conditions_check(c: &CompositionHandle, j: &JordanHandle) -> Result<TitsConditions> {
    let f = c.field();
    if f != j.field() {
        return Err(Error::FieldMismatch("ingredients over different fields".into()));
    }
    let d = tits_data(c, j)?;
    let (m, kj) = (d.c0.len(), d.j0.len());
    let (nc, nj) = (c.dim(), j.dim());
    let av = d.c0.rows();
    let xv = d.j0.rows();
    let jp = j.table().parities();
    let odd: Vec<bool> = xv.iter().map(|v| v.parity(jp).expect("homogeneous").is_odd()).collect();
    let two = f.from_i64(2);

    let mut dab = vec![LinMap::zero(nc); m * m];
    let mut comm = vec![SparseVec::new(); m * m];
    let mut tcab = vec![f.zero(); m * m];
    for a in 0..m {
        for b in 0..m {
            dab[a * m + b] = c.inner_derivation(&av[a], &av[b]);
            let ab = c.mul(&av[a], &av[b]);
            comm[a * m + b] = ab.sub(f, &c.mul(&av[b], &av[a]));
            tcab[a * m + b] = c.trace(&ab);
        }
    }
    let mut dxy = vec![LinMap::zero(nj); kj * kj];
    let mut star = vec![SparseVec::new(); kj * kj];
    let mut txy = vec![f.zero(); kj * kj];
    for x in 0..kj {
        for y in 0..kj {
            dxy[x * kj + y] = j.inner_derivation(&xv[x], &xv[y]);
            star[x * kj + y] = j.star(&xv[x], &xv[y])?;
            txy[x * kj + y] = j.t(&j.mul(&xv[x], &xv[y]))?;
        }
    }
    let ijf = |map: &LinMap| map.flatten(f);
    let triples = |k: usize| (0..k * k * k).map(move |t| [t / (k * k), (t / k) % k, t % k]);
    let even_a = vec![false; m];

    // (i): Σ t_C([a1,a2]a3) d_{x1∗x2, x3}
    let mut cond_i = IdentityCheck::pass("(i)");
    'i: for xs in triples(kj) {
        let xc = cyclic(xs, &odd);
        for as_ in triples(m) {
            let ac = cyclic(as_, &even_a);
            let mut acc = SparseVec::new();
            for ((x, neg), (a, _)) in xc.iter().zip(&ac) {
                let s = c.trace(&c.mul(&comm[a[0] * m + a[1]], &av[a[2]]));
                if s.is_zero() {
                    continue;
                }
                let s = if *neg { f.neg(&s) } else { s };
                let mut dm = LinMap::zero(nj);
                for (z, r) in star[x[0] * kj + x[1]].iter() {
                    dm = dm.axpy(f, r, &j.inner_derivation(&SparseVec::unit(*z), &xv[x[2]]));
                }
                acc = acc.axpy(f, &s, &ijf(&dm));
            }
            if !acc.is_zero() {
                cond_i = IdentityCheck::fail("(i)", witness_labels(c, j, &d, as_, xs));
                break 'i;
            }
        }
    }

    // (ii): Σ t_J((x1∗x2)x3) D_{[a1,a2], a3}
    let mut cond_ii = IdentityCheck::pass("(ii)");
    'ii: for xs in triples(kj) {
        let xc = cyclic(xs, &odd);
        let scal: Vec<Scalar> = xc
            .iter()
            .map(|(x, neg)| {
                let v = j.t(&j.mul(&star[x[0] * kj + x[1]], &xv[x[2]])).expect("trace checked");
                if *neg {
                    f.neg(&v)
                } else {
                    v
                }
            })
            .collect();
        if scal.iter().all(|s| s.is_zero()) {
            continue;
        }
        for as_ in triples(m) {
            let ac = cyclic(as_, &even_a);
            let mut acc = LinMap::zero(nc);
            for (s, (a, _)) in scal.iter().zip(&ac) {
                if s.is_zero() {
                    continue;
                }
                acc = acc.axpy(f, s, &c.inner_derivation(&comm[a[0] * m + a[1]], &av[a[2]]));
            }
            if !acc.is_zero() {
                cond_ii = IdentityCheck::fail("(ii)", witness_labels(c, j, &d, as_, xs));
                break 'ii;
            }
        }
    }

    // (iii): Σ D_{a1,a2}(a3)⊗t_J(x1x2)x3 + [[a1,a2],a3]⊗(x1∗x2)∗x3 + 2t_C(a1a2)a3⊗d_{x1,x2}(x3)
    let a_terms: Vec<[[SparseVec; 3]; 3]> = triples(m)
        .map(|as_| {
            cyclic(as_, &even_a).map(|(a, _)| {
                let ab = a[0] * m + a[1];
                [
                    dab[ab].apply(f, &av[a[2]]),
                    c.mul(&comm[ab], &av[a[2]]).sub(f, &c.mul(&av[a[2]], &comm[ab])),
                    av[a[2]].scale(f, &f.mul(&two, &tcab[ab])),
                ]
            })
        })
        .collect();
    let mut cond_iii = IdentityCheck::pass("(iii)");
    'iii: for xs in triples(kj) {
        let x_terms = cyclic(xs, &odd).map(|(x, neg)| {
            let xy = x[0] * kj + x[1];
            let terms = [
                xv[x[2]].scale(f, &txy[xy]),
                j.star(&star[xy], &xv[x[2]]).expect("trace checked"),
                dxy[xy].apply(f, &xv[x[2]]),
            ];
            if neg {
                terms.map(|t| t.neg(f))
            } else {
                terms
            }
        });
        for (ai, at) in a_terms.iter().enumerate() {
            let mut acc = Accumulator::new(f, nc * nj);
            for (ar, xr) in at.iter().zip(&x_terms) {
                for (av_, xv_) in ar.iter().zip(xr) {
                    for (p, s) in av_.iter() {
                        for (q, r) in xv_.iter() {
                            acc.add(p * nj + q, &f.mul(s, r));
                        }
                    }
                }
            }
            if !acc.take().is_zero() {
                let as_ = [ai / (m * m), (ai / m) % m, ai % m];
                cond_iii = IdentityCheck::fail("(iii)", witness_labels(c, j, &d, as_, xs));
                break 'iii;
            }
        }
    }
    Ok(TitsConditions { i: cond_i, ii: cond_ii, iii: cond_iii })
}

fn witness_labels(c: &CompositionHandle, j: &JordanHandle, d: &TitsData, a: [usize; 3], x: [usize; 3]) -> Vec<String> {
    let f = c.field();
    a.iter()
        .map(|&i| vec_label(f, c.table().space(), &d.c0.rows()[i]))
        .chain(x.iter().map(|&i| vec_label(f, j.table().space(), &d.j0.rows()[i])))
        .collect()
}

/// Second row: the map `(1,-1)⊗x + d ↦ 2l_x + d` from 𝒯(𝔽×𝔽, J) into the
/// endomorphisms of J. Returns the first basis pair on which it fails to be a
/// homomorphism, or an error if it is not injective.
pub fn second_row_violation(t: &LieSuperAlgebra, j: &JordanHandle) -> Result<Option<(usize, usize)>> {
    let f = t.field();
    let (Some(tb), Some(jb)) = (t.block("C0⊗J0"), t.block("inder J")) else {
        return Err(Error::Invalid("not a Tits construction".into()));
    };
    if t.block("inder C").map_or(1, |b| b.len) != 0 || t.provenance().ingredients.first().map(String::as_str) != Some("binarion")
    {
        return Err(Error::Invalid("the second-row embedding needs C = binarion".into()));
    }
    let c = crate::composition::hurwitz_make(CompositionKind::Binarion, f)?;
    let c0 = SubBasis::new(f, 2, &c.c0_basis());
    // c0 = λ(e1 - e2)
    let lambda = c0.rows()[0].get(0);
    let mut j0 = j.j0_basis()?;
    j0.sort_by_key(|v| v.parity(j.table().parities()).map(|p| p.bit()));
    let j0 = SubBasis::new(f, j.dim(), &j0);
    let ij = j.inder_span();
    let two_l = f.mul(&f.from_i64(2), &lambda);
    let images: Vec<LinMap> = (0..t.dim())
        .map(|i| {
            if i < jb.start {
                j.left(&j0.rows()[i - tb.start]).scale(f, &two_l)
            } else {
                ij.basis()[i - jb.start].clone()
            }
        })
        .collect();
    let image_span = MapSpan::build(f, j.table().parities(), images.iter().cloned());
    if image_span.dim() != t.dim() {
        return Err(Error::Invalid(format!("embedding has rank {} on a {}-dimensional algebra", image_span.dim(), t.dim())));
    }
    let tt = t.table();
    for a in 0..t.dim() {
        for b in 0..t.dim() {
            let lhs = tt.product(a, b).iter().fold(LinMap::zero(j.dim()), |acc, (k, s)| acc.axpy(f, s, &images[*k]));
            let rhs = images[a].supercommutator(f, &images[b], tt.koszul(a, b));
            if lhs != rhs {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// symmetric construction

/// Orientation of the triality automorphism in the ι-ι bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaOrientation {
    /// `θ^i`
    Forward,
    /// `θ^{-i}`
    Reverse,
}

struct GData {
    t1: TrialitySpace,
    t2: TrialitySpace,
    /// coordinates of `θ^i(t_{x,y})` in tri, indexed `[i][x * n + y]`
    th1: [Vec<SparseVec>; 3],
    th2: [Vec<SparseVec>; 3],
}

fn theta_coords(s: &SymmetricCompositionHandle, t: &TrialitySpace) -> Result<[Vec<SparseVec>; 3]> {
    let n = s.dim();
    let mut out: [Vec<SparseVec>; 3] = Default::default();
    for x in 0..n {
        for y in 0..n {
            let txy = t_xy_basis(s, x, y);
            if let Some(v) = crate::triality::tri_violation(s, &txy) {
                return Err(Error::Internal(format!("t_{{{x},{y}}} is not in tri: {v:?}")));
            }
            for (i, slot) in out.iter_mut().enumerate() {
                let c = t.coords(&txy.theta_pow(i)).ok_or_else(|| Error::Internal("θ(t) left tri".into()))?;
                slot.push(c);
            }
        }
    }
    Ok(out)
}

fn g_table(
    s: &SymmetricCompositionHandle,
    s2: &SymmetricCompositionHandle,
    d: &GData,
    orient: ThetaOrientation,
) -> Result<(AlgebraTable, Vec<Block>)> {
    let f = s.field();
    let (n, n2) = (s.dim(), s2.dim());
    let (k1, k2) = (d.t1.dim(), d.t2.dim());
    let p1 = s.table().parities();
    let p2 = s2.table().parities();
    let o1 = |x: usize| p1[x].is_odd();
    let o2 = |x: usize| p2[x].is_odd();
    let base = k1 + k2;
    let iota = |i: usize, x: usize, y: usize| base + i * n * n2 + x * n2 + y;
    let dim = base + 3 * n * n2;

    let mut basis = Vec::with_capacity(dim);
    for k in 0..k1 {
        basis.push((format!("t{k}"), d.t1.parity(k)));
    }
    for k in 0..k2 {
        basis.push((format!("t'{k}"), d.t2.parity(k)));
    }
    for i in 0..3 {
        for x in 0..n {
            for y in 0..n2 {
                basis.push((format!("i{i}({}⊗{})", s.table().space().label(x), s2.table().space().label(y)), p1[x] + p2[y]));
            }
        }
    }
    let space = SuperSpace::new(basis)?;
    let kz = |a: usize, b: usize| Parity::koszul(space.parity(a), space.parity(b));
    let mut pr = Products::new(f, dim);

    // tri ⊕ tri′
    for (off, t) in [(0, &d.t1), (k1, &d.t2)] {
        for a in 0..t.dim() {
            for b in a..t.dim() {
                let neg = Parity::koszul(t.parity(a), t.parity(b));
                let br = t.basis()[a].bracket(f, &t.basis()[b], neg);
                let v = t.coords(&br).ok_or_else(|| Error::Internal("tri is not closed".into()))?;
                pr.set_pair(off + a, off + b, shift(f, &v, off), neg);
            }
        }
    }
    // tri acting on ι_i(x⊗x′)
    for (a, tr) in d.t1.basis().iter().enumerate() {
        for i in 0..3 {
            for x in 0..n {
                for y in 0..n2 {
                    let v = SparseVec::from_pairs(f, tr.d[i].cols[x].iter().map(|(z, c)| (iota(i, *z, y), c.clone())));
                    pr.set_pair(a, iota(i, x, y), v, kz(a, iota(i, x, y)));
                }
            }
        }
    }
    for (a, tr) in d.t2.basis().iter().enumerate() {
        let pa = d.t2.parity(a).is_odd();
        for i in 0..3 {
            for x in 0..n {
                let sign = pa && o1(x);
                for y in 0..n2 {
                    let v = SparseVec::from_pairs(
                        f,
                        tr.d[i].cols[y].iter().map(|(z, c)| (iota(i, x, *z), if sign { f.neg(c) } else { c.clone() })),
                    );
                    pr.set_pair(k1 + a, iota(i, x, y), v, kz(k1 + a, iota(i, x, y)));
                }
            }
        }
    }
    // [ι_i(x⊗x′), ι_{i+1}(y⊗y′)] = (-1)^{|x′||y|} ι_{i+2}((x∙y)⊗(x′∙y′))
    for i in 0..3 {
        let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
        for x in 0..n {
            for xp in 0..n2 {
                for y in 0..n {
                    let sign = |yp: usize| o2(xp) && o1(y) && yp < usize::MAX;
                    for yp in 0..n2 {
                        let a = s.table().product(x, y);
                        let b = s2.table().product(xp, yp);
                        let neg = sign(yp);
                        let mut pairs = Vec::with_capacity(a.nnz() * b.nnz());
                        for (u, c) in a.iter() {
                            for (w, e) in b.iter() {
                                let v = f.mul(c, e);
                                pairs.push((iota(i2, *u, *w), if neg { f.neg(&v) } else { v }));
                            }
                        }
                        let (l, r) = (iota(i, x, xp), iota(i1, y, yp));
                        let v = SparseVec::from_pairs(f, pairs);
                        if l <= r {
                            pr.set_pair(l, r, v, kz(l, r));
                        } else {
                            // [e_r, e_l] = -(-1)^{|l||r|} v
                            let back = if kz(l, r) { v } else { v.neg(f) };
                            pr.set_pair(r, l, back, kz(l, r));
                        }
                    }
                }
            }
        }
    }
    // [ι_i(x⊗x′), ι_i(y⊗y′)]
    for i in 0..3 {
        let ti = match orient {
            ThetaOrientation::Forward => i,
            ThetaOrientation::Reverse => (3 - i) % 3,
        };
        for x in 0..n {
            for xp in 0..n2 {
                let l = iota(i, x, xp);
                for y in 0..n {
                    for yp in 0..n2 {
                        let r = iota(i, y, yp);
                        if r < l {
                            continue;
                        }
                        let mut acc = Accumulator::new(f, dim);
                        let b2 = s2.form().b_basis(xp, yp);
                        if !b2.is_zero() {
                            let neg = (o1(x) && o2(xp)) ^ (o1(x) && o2(yp)) ^ (o1(y) && o2(yp));
                            let c = if neg { f.neg(b2) } else { b2.clone() };
                            acc.add_scaled(&c, &d.th1[ti][x * n + y]);
                        }
                        let b1 = s.form().b_basis(x, y);
                        if !b1.is_zero() {
                            let neg = o1(y) && o2(xp);
                            let c = if neg { f.neg(b1) } else { b1.clone() };
                            acc.add_scaled(&c, &shift(f, &d.th2[ti][xp * n2 + yp], k1));
                        }
                        pr.set_pair(l, r, acc.take(), kz(l, r));
                    }
                }
            }
        }
    }
    let table = pr.finish(space)?;
    let pars = table.parities().to_vec();
    let mut blocks = vec![block("tri", 0, &pars[..k1]), block("tri'", k1, &pars[k1..base])];
    for i in 0..3 {
        let st = base + i * n * n2;
        blocks.push(block(&format!("iota{i}"), st, &pars[st..st + n * n2]));
    }
    Ok((table, blocks))
}

/// `𝔤(S,S′) = tri(S) ⊕ tri(S′) ⊕ ι₀(S⊗S′) ⊕ ι₁(S⊗S′) ⊕ ι₂(S⊗S′)`. The θ
/// orientation is the first of forward/reverse for which Jacobi holds.
pub fn g_build(s: &SymmetricCompositionHandle, s2: &SymmetricCompositionHandle) -> Result<LieSuperAlgebra> {
    let f = s.field();
    if f != s2.field() {
        return Err(Error::FieldMismatch(format!("{} over {} and {} over {}", s.name(), f, s2.name(), s2.field())));
    }
    let t1 = tri_solve(s)?;
    let t2 = tri_solve(s2)?;
    let th1 = theta_coords(s, &t1)?;
    let th2 = theta_coords(s2, &t2)?;
    let d = GData { t1, t2, th1, th2 };
    let mut first = None;
    for orient in [ThetaOrientation::Forward, ThetaOrientation::Reverse] {
        let (table, blocks) = g_table(s, s2, &d, orient)?;
        let prov = Provenance {
            construction: "g".into(),
            ingredients: vec![s.name(), s2.name()],
            field: f.name(),
            forced: false,
            choices: json!({ "theta": orient }),
        };
        let alg = LieSuperAlgebra::new(table, prov, blocks)?;
        if alg.jacobi().passes() {
            return Ok(alg);
        }
        first.get_or_insert(alg);
    }
    Ok(first.expect("two orientations tried"))
}

/// The map `𝔤(S,S′) → 𝔤(S′,S)` exchanging the triality blocks and sending
/// `ι_i(x⊗x′)` to `(-1)^{|x||x′|} ι_i(x′⊗x)`, given by signed images of basis vectors.
pub fn g_swap_map(
    a: &LieSuperAlgebra,
    s: &SymmetricCompositionHandle,
    s2: &SymmetricCompositionHandle,
) -> Result<Vec<(usize, bool)>> {
    let (Some(t1), Some(t2)) = (a.block("tri"), a.block("tri'")) else {
        return Err(Error::Invalid("not a g construction".into()));
    };
    let (n, n2) = (s.dim(), s2.dim());
    let base = t1.len + t2.len;
    if a.dim() != base + 3 * n * n2 {
        return Err(Error::Dimension("ingredients do not match the algebra".into()));
    }
    let p1 = s.table().parities();
    let p2 = s2.table().parities();
    let mut out = Vec::with_capacity(a.dim());
    for k in 0..t1.len {
        out.push((t2.len + k, false));
    }
    for k in 0..t2.len {
        out.push((k, false));
    }
    for i in 0..3 {
        for x in 0..n {
            for y in 0..n2 {
                out.push((base + i * n * n2 + y * n + x, Parity::koszul(p1[x], p2[y])));
            }
        }
    }
    Ok(out)
}

/// First basis pair on which a signed basis map fails to be a homomorphism.
pub fn signed_map_violation(a: &AlgebraTable, b: &AlgebraTable, map: &[(usize, bool)]) -> Option<(usize, usize)> {
    let f = a.field();
    let img = |v: &SparseVec| {
        SparseVec::from_pairs(f, v.iter().map(|(k, c)| (map[*k].0, if map[*k].1 { f.neg(c) } else { c.clone() })))
    };
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let lhs = img(a.product(i, j));
            let (bi, si) = map[i];
            let (bj, sj) = map[j];
            let rhs = b.product(bi, bj);
            let rhs = if si ^ sj { rhs.neg(f) } else { rhs.clone() };
            if lhs != rhs {
                return Some((i, j));
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// modified Tits construction in characteristic 3

/// Values tried for each open coefficient slot.
pub const COEFFICIENT_CANDIDATES: [(i64, i64); 6] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2)];

fn fmt_ratio((a, b): (i64, i64)) -> String {
    if b == 1 {
        a.to_string()
    } else {
        format!("{a}/{b}")
    }
}

fn modified_table(
    c: &CompositionHandle,
    j: &JordanHandle,
    c0: &SubBasis,
    ij: &MapSpan,
    alpha: &Scalar,
    beta: &Scalar,
) -> Result<(AlgebraTable, Vec<Block>)> {
    let f = c.field();
    let m = c0.len();
    let nj = j.dim();
    let jp = j.table().parities();
    let st = m * nj;
    let n = st + ij.dim();
    let mut basis = Vec::with_capacity(n);
    for a in c0.rows() {
        for x in 0..nj {
            basis.push((format!("{}⊗{}", vec_label(f, c.table().space(), a), j.table().space().label(x)), jp[x]));
        }
    }
    for k in 0..ij.dim() {
        basis.push((format!("d{k}"), ij.parity(k)));
    }
    let space = SuperSpace::new(basis)?;
    let kz = |a: usize, b: usize| Parity::koszul(space.parity(a), space.parity(b));
    let tensor = |a: usize, x: usize| a * nj + x;
    let mut pr = Products::new(f, n);
    let ja = ij.basis();
    for p in 0..ij.dim() {
        for q in p..ij.dim() {
            let neg = kz(st + p, st + q);
            let v = map_coords(ij, &ja[p].supercommutator(f, &ja[q], neg), "[d,d']")?;
            pr.set_pair(st + p, st + q, shift(f, &v, st), neg);
        }
        for x in 0..nj {
            for a in 0..m {
                let v = SparseVec::from_pairs(f, ja[p].cols[x].iter().map(|(y, s)| (tensor(a, *y), s.clone())));
                pr.set_pair(st + p, tensor(a, x), v, kz(st + p, tensor(a, x)));
            }
        }
    }
    let mut comm = vec![SparseVec::new(); m * m];
    let mut tc = vec![f.zero(); m * m];
    for a in 0..m {
        for b in 0..m {
            let (va, vb) = (&c0.rows()[a], &c0.rows()[b]);
            let ab = c.mul(va, vb);
            comm[a * m + b] = c0.coords(&ab.sub(f, &c.mul(vb, va)), "[a,b]")?.scale(f, alpha);
            tc[a * m + b] = f.mul(beta, &c.trace(&ab));
        }
    }
    let mut dxy = vec![SparseVec::new(); nj * nj];
    for x in 0..nj {
        for y in 0..nj {
            dxy[x * nj + y] =
                shift(f, &map_coords(ij, &j.inner_derivation(&SparseVec::unit(x), &SparseVec::unit(y)), "d_{x,y}")?, st);
        }
    }
    for a in 0..m {
        for x in 0..nj {
            for b in 0..m {
                for y in 0..nj {
                    let (u, w) = (tensor(a, x), tensor(b, y));
                    if w < u {
                        continue;
                    }
                    let mut acc = Accumulator::new(f, n);
                    let xy = j.table().product(x, y);
                    for (cb, s) in comm[a * m + b].iter() {
                        for (z, r) in xy.iter() {
                            acc.add(tensor(*cb, *z), &f.mul(s, r));
                        }
                    }
                    if !tc[a * m + b].is_zero() {
                        acc.add_scaled(&tc[a * m + b], &dxy[x * nj + y]);
                    }
                    pr.set_pair(u, w, acc.take(), kz(u, w));
                }
            }
        }
    }
    let table = pr.finish(space)?;
    let pars = table.parities().to_vec();
    Ok((table, vec![block("C0⊗J", 0, &pars[..st]), block("inder J", st, &pars[st..])]))
}

/// `𝒯̃(C,J) ≅ (C⁰⊗J) ⊕ inder J` over a characteristic-3 Cayley algebra, with
/// `[a⊗x, b⊗y] = α[a,b]⊗xy + β t_C(ab) d_{x,y}` and `[d, a⊗x] = a⊗d(x)`.
/// The slots `α, β` are searched over [`COEFFICIENT_CANDIDATES`]; the first pair
/// passing Jacobi is kept and recorded.
pub fn tits_modified_build(c: &CompositionHandle, j: &JordanHandle) -> Result<LieSuperAlgebra> {
    let f = c.field();
    if f != j.field() {
        return Err(Error::FieldMismatch("ingredients over different fields".into()));
    }
    if f.characteristic() != 3 {
        return Err(Error::Gating("the modified Tits construction requires characteristic 3".into()));
    }
    if c.kind() != CompositionKind::Octonion {
        return Err(Error::Gating(format!("the modified Tits construction takes the Cayley algebra, not {}", c.kind())));
    }
    if j.unit().is_none() {
        return Err(Error::Gating(format!("{} has no unit", j.kind())));
    }
    if let Some((x, y)) = j.table().supercommutativity_violation() {
        return Err(Error::Gating(format!("{} is not supercommutative at ({x}, {y})", j.kind())));
    }
    let c0 = SubBasis::new(f, c.dim(), &c.c0_basis());
    let ij = j.inder_span();
    let mut tried: Vec<(Scalar, Scalar)> = Vec::new();
    let mut labels = Vec::new();
    for ra in COEFFICIENT_CANDIDATES {
        for rb in COEFFICIENT_CANDIDATES {
            let alpha = f.from_ratio(ra.0, ra.1)?;
            let beta = f.from_ratio(rb.0, rb.1)?;
            if tried.contains(&(alpha.clone(), beta.clone())) {
                continue;
            }
            tried.push((alpha.clone(), beta.clone()));
            labels.push(format!("({}, {})", fmt_ratio(ra), fmt_ratio(rb)));
            let (table, blocks) = modified_table(c, j, &c0, &ij, &alpha, &beta)?;
            let jacobi = check_super_jacobi(&table);
            if jacobi.passes() {
                let prov = Provenance {
                    construction: "tits-modified".into(),
                    ingredients: vec![c.kind().name().to_string(), j.kind().to_string()],
                    field: f.name(),
                    forced: false,
                    choices: json!({
                        "alpha": fmt_ratio(ra),
                        "beta": fmt_ratio(rb),
                        "configurations_tried": labels.len(),
                    }),
                };
                return LieSuperAlgebra::new(table, prov, blocks);
            }
        }
    }
    Err(Error::Invalid(format!(
        "no coefficient configuration (alpha, beta) passes Jacobi for {}; tried {}",
        j.kind(),
        labels.join(", ")
    )))
}
