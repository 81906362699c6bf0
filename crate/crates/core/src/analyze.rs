//! Structural checks on Lie (super)algebra tables: super-Jacobi, derived
//! algebra, center, ideal closure, Killing form and simplicity.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{solve_linear, SparseMatrix, SparseVec, Subspace};
use crate::meataxe::{meataxe, DenseSpan, Mat, MeatAxe};
use crate::rational::Rational;
use crate::space::{Parity, SuperSpace};
use crate::table::AlgebraTable;

pub const DEFAULT_PRIMES: [u32; 3] = [5, 7, 13];
pub const DEFAULT_ROUNDS: usize = 64;
pub const DEFAULT_SEED: u64 = 0x7175_6f72;

// ---------------------------------------------------------------------------
// arithmetic backends for the hot loops

trait Arith {
    type V: Clone;
    fn zero(&self) -> Self::V;
    fn is_zero(&self, a: &Self::V) -> bool;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn neg(&self, a: &Self::V) -> Self::V;
}

struct ModP(u64);

impl Arith for ModP {
    type V = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.0
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }
}

/// Integers obtained by clearing a common denominator.
struct Int;

impl Arith for Int {
    type V = i128;
    fn zero(&self) -> i128 {
        0
    }
    fn is_zero(&self, a: &i128) -> bool {
        *a == 0
    }
    fn add(&self, a: &i128, b: &i128) -> i128 {
        a + b
    }
    fn mul(&self, a: &i128, b: &i128) -> i128 {
        a * b
    }
    fn neg(&self, a: &i128) -> i128 {
        -a
    }
}

struct Exact(Field);

impl Arith for Exact {
    type V = Scalar;
    fn zero(&self) -> Scalar {
        self.0.zero()
    }
    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.0.add(a, b)
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.0.mul(a, b)
    }
    fn neg(&self, a: &Scalar) -> Scalar {
        self.0.neg(a)
    }
}

type Rows<V> = Vec<Vec<(u32, V)>>;

/// The structure constants in the cheapest exact representation available.
enum Lift {
    Mod(ModP, Rows<u64>),
    /// Constants multiplied by `den`.
    Int(i128, Rows<i128>),
    Exact(Exact, Rows<Scalar>),
}

const INT_BOUND: i128 = 1 << 40;

fn lift(t: &AlgebraTable) -> Lift {
    let n = t.dim();
    let f = t.field();
    let all = || (0..n * n).map(|k| t.product(k / n, k % n));
    if let Field::Prime(p) = f {
        let rows = all()
            .map(|v| v.iter().map(|(i, c)| (*i as u32, f.residue(c).expect("prime field") as u64)).collect())
            .collect();
        return Lift::Mod(ModP(p as u64), rows);
    }
    let mut den: i128 = 1;
    let mut ok = true;
    'outer: for v in all() {
        for (_, c) in v.iter() {
            match c.small_parts() {
                Some((_, d)) => {
                    den = num_integer::lcm(den, d as i128);
                    if den > INT_BOUND {
                        ok = false;
                        break 'outer;
                    }
                }
                None => {
                    ok = false;
                    break 'outer;
                }
            }
        }
    }
    if ok {
        let mut rows = Vec::with_capacity(n * n);
        for v in all() {
            let mut r = Vec::with_capacity(v.nnz());
            for (i, c) in v.iter() {
                let (a, d) = c.small_parts().expect("checked");
                let s = a as i128 * (den / d as i128);
                if s.abs() > INT_BOUND {
                    ok = false;
                }
                r.push((*i as u32, s));
            }
            rows.push(r);
        }
        if ok {
            return Lift::Int(den, rows);
        }
    }
    Lift::Exact(Exact(f), all().map(|v| v.iter().map(|(i, c)| (*i as u32, c.clone())).collect()).collect())
}

// ---------------------------------------------------------------------------
// super-Jacobi

/// A basis triple on which the super-Jacobi identity fails, with the value of
/// `(-1)^{|x||z|}[[x,y],z] + (-1)^{|y||x|}[[y,z],x] + (-1)^{|z||y|}[[z,x],y]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiWitness {
    pub triple: [usize; 3],
    pub value: SparseVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JacobiVerdict {
    Pass,
    Fail(JacobiWitness),
}

impl JacobiVerdict {
    pub fn passes(&self) -> bool {
        matches!(self, JacobiVerdict::Pass)
    }

    pub fn to_json(&self, t: &AlgebraTable) -> Value {
        match self {
            JacobiVerdict::Pass => json!("pass"),
            JacobiVerdict::Fail(w) => json!({
                "fail": {
                    "triple": w.triple.iter().map(|&i| t.space().label(i)).collect::<Vec<_>>(),
                    "value": vec_json(t.field(), t.space(), &w.value),
                }
            }),
        }
    }
}

fn vec_json(f: Field, space: &SuperSpace, v: &SparseVec) -> Value {
    Value::Array(v.iter().map(|(i, c)| json!([space.label(*i), f.format(c)])).collect())
}

/// The Jacobiator of three basis vectors, computed directly from the table.
pub fn jacobiator(t: &AlgebraTable, i: usize, j: usize, k: usize) -> SparseVec {
    let f = t.field();
    let odd = |a: usize| t.parity(a).is_odd();
    let term = |x: usize, y: usize, z: usize| {
        let v = t.mul(t.product(x, y), &SparseVec::unit(z));
        if odd(x) && odd(z) {
            v.neg(f)
        } else {
            v
        }
    };
    term(i, j, k).add(f, &term(j, k, i)).add(f, &term(k, i, j))
}

fn scan<A: Arith>(a: &A, n: usize, odd: &[bool], rows: &[Vec<(u32, A::V)>]) -> Option<[usize; 3]> {
    let mut acc: Vec<A::V> = vec![a.zero(); n];
    let mut touched: Vec<usize> = Vec::new();
    let add_term = |acc: &mut Vec<A::V>, touched: &mut Vec<usize>, x: usize, y: usize, z: usize, neg: bool| {
        for (m, c) in &rows[x * n + y] {
            let c = if neg { a.neg(c) } else { c.clone() };
            for (l, d) in &rows[*m as usize * n + z] {
                let l = *l as usize;
                acc[l] = a.add(&acc[l], &a.mul(&c, d));
                touched.push(l);
            }
        }
    };
    // The Jacobiator is super-alternating once the table is super-anticommutative,
    // so sorted triples suffice and a repeated even argument gives zero.
    for i in 0..n {
        for j in i..n {
            if i == j && !odd[i] {
                continue;
            }
            for k in j..n {
                if j == k && !odd[j] {
                    continue;
                }
                add_term(&mut acc, &mut touched, i, j, k, odd[i] && odd[k]);
                add_term(&mut acc, &mut touched, j, k, i, odd[j] && odd[i]);
                add_term(&mut acc, &mut touched, k, i, j, odd[k] && odd[j]);
                let mut bad = false;
                for &l in &touched {
                    if !a.is_zero(&acc[l]) {
                        bad = true;
                    }
                    acc[l] = a.zero();
                }
                touched.clear();
                if bad {
                    return Some([i, j, k]);
                }
            }
        }
    }
    None
}

/// Checks the super-Jacobi identity on all sorted basis triples. The table must
/// be super-anticommutative; a table that is not fails on the first bad pair.
pub fn check_super_jacobi(t: &AlgebraTable) -> JacobiVerdict {
    if let Some((i, j)) = t.superanticommutativity_violation() {
        let f = t.field();
        let sym = if t.koszul(i, j) { t.product(j, i).neg(f) } else { t.product(j, i).clone() };
        return JacobiVerdict::Fail(JacobiWitness { triple: [i, j, j], value: t.product(i, j).add(f, &sym) });
    }
    let n = t.dim();
    let odd: Vec<bool> = t.parities().iter().map(|p| p.is_odd()).collect();
    let hit = match lift(t) {
        Lift::Mod(a, rows) => scan(&a, n, &odd, &rows),
        Lift::Int(_, rows) => scan(&Int, n, &odd, &rows),
        Lift::Exact(a, rows) => scan(&a, n, &odd, &rows),
    };
    match hit {
        None => JacobiVerdict::Pass,
        Some([i, j, k]) => JacobiVerdict::Fail(JacobiWitness { triple: [i, j, k], value: jacobiator(t, i, j, k) }),
    }
}

/// All ordered triples, straight from the definition.
pub fn check_super_jacobi_naive(t: &AlgebraTable) -> JacobiVerdict {
    let n = t.dim();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = jacobiator(t, i, j, k);
                if !v.is_zero() {
                    return JacobiVerdict::Fail(JacobiWitness { triple: [i, j, k], value: v });
                }
            }
        }
    }
    JacobiVerdict::Pass
}

// ---------------------------------------------------------------------------
// subspaces

pub fn derived_subalgebra(t: &AlgebraTable) -> Subspace {
    let n = t.dim();
    let mut s = Subspace::new(t.field(), n);
    for i in 0..n {
        for j in i..n {
            if s.dim() == n {
                return s;
            }
            s.insert(t.product(i, j));
        }
    }
    s
}

/// `{z : [z, x] = 0 for all x}`.
pub fn center(t: &AlgebraTable) -> Subspace {
    let n = t.dim();
    let f = t.field();
    let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in 0..n {
            for (k, c) in t.product(i, j).iter() {
                rows[j * n + k].push((i, c.clone()));
            }
        }
    }
    let rows = rows.into_iter().filter(|r| !r.is_empty()).map(|r| SparseVec::from_pairs(f, r)).collect();
    let sol = solve_linear(f, &SparseMatrix::new(n, rows), None).expect("well-formed system");
    Subspace::span(f, n, &sol.kernel)
}

/// Closure of `gens` under left and right multiplication by basis vectors.
pub fn ideal_generated(t: &AlgebraTable, gens: &[SparseVec]) -> Subspace {
    let n = t.dim();
    let mut s = Subspace::new(t.field(), n);
    let mut queue: Vec<SparseVec> = gens.iter().filter(|g| s.insert(g)).cloned().collect();
    while let Some(v) = queue.pop() {
        for i in 0..n {
            if s.dim() == n {
                return s;
            }
            let e = SparseVec::unit(i);
            for w in [t.mul(&e, &v), t.mul(&v, &e)] {
                if s.insert(&w) {
                    queue.push(w);
                }
            }
        }
    }
    s
}

/// `[L, W] ⊆ W` on basis vectors.
pub fn is_ideal(t: &AlgebraTable, w: &Subspace) -> bool {
    let basis = w.basis();
    (0..t.dim()).all(|i| {
        let e = SparseVec::unit(i);
        basis.iter().all(|v| w.contains(&t.mul(&e, v)) && w.contains(&t.mul(v, &e)))
    })
}

// ---------------------------------------------------------------------------
// Killing form

#[derive(Clone, Debug)]
pub struct KillingForm {
    /// `κ(e_i, e_j) = str(ad e_i ∘ ad e_j)`.
    pub matrix: Vec<Vec<Scalar>>,
    pub rank: usize,
    pub radical_dim: usize,
    /// Random triples on which `κ([x,y],z) = κ(x,[y,z])` was checked.
    pub invariance_checked: usize,
    pub invariant: bool,
}

fn killing_core<A: Arith>(a: &A, n: usize, odd: &[bool], rows: &[Vec<(u32, A::V)>]) -> Vec<Vec<A::V>> {
    // κ_ij = Σ_{k,m} (-1)^{|k|} c_{im}^k c_{jk}^m
    let mut out = vec![vec![a.zero(); n]; n];
    let mut dense: Vec<A::V> = vec![a.zero(); n * n];
    for i in 0..n {
        for v in dense.iter_mut() {
            *v = a.zero();
        }
        for m in 0..n {
            for (k, c) in &rows[i * n + m] {
                dense[*k as usize * n + m] = c.clone();
            }
        }
        for j in 0..n {
            let mut s = a.zero();
            for k in 0..n {
                for (m, c) in &rows[j * n + k] {
                    let x = &dense[k * n + *m as usize];
                    if a.is_zero(x) {
                        continue;
                    }
                    let term = a.mul(x, c);
                    s = if odd[k] { a.add(&s, &a.neg(&term)) } else { a.add(&s, &term) };
                }
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn killing_form(t: &AlgebraTable, seed: u64) -> KillingForm {
    let n = t.dim();
    let f = t.field();
    let odd: Vec<bool> = t.parities().iter().map(|p| p.is_odd()).collect();
    let matrix: Vec<Vec<Scalar>> = match lift(t) {
        Lift::Mod(a, rows) => killing_core(&a, n, &odd, &rows)
            .into_iter()
            .map(|r| r.into_iter().map(|x| f.from_residue(x)).collect())
            .collect(),
        Lift::Int(den, rows) => killing_core(&Int, n, &odd, &rows)
            .into_iter()
            .map(|r| r.into_iter().map(|x| Rational::from_i128(x, den * den).expect("nonzero denominator")).collect())
            .collect(),
        Lift::Exact(a, rows) => killing_core(&a, n, &odd, &rows),
    };
    let rowvecs: Vec<SparseVec> = matrix.iter().map(|r| SparseVec::from_dense(r)).collect();
    let rank = Subspace::span(f, n, &rowvecs).dim();
    let kappa = |x: &SparseVec, j: usize| -> Scalar {
        x.iter().fold(f.zero(), |acc, (m, c)| f.add(&acc, &f.mul(c, &matrix[*m][j])))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut invariant = true;
    let checks = if n == 0 { 0 } else { 100 };
    for _ in 0..checks {
        let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        let lhs = kappa(t.product(i, j), k);
        let rhs = t.product(j, k).iter().fold(f.zero(), |acc, (m, c)| f.add(&acc, &f.mul(c, &matrix[i][*m])));
        if lhs != rhs {
            invariant = false;
        }
    }
    KillingForm { matrix, rank, radical_dim: n - rank, invariance_checked: checks, invariant }
}

// ---------------------------------------------------------------------------
// simplicity

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealWitness {
    pub reason: String,
    pub dims: (usize, usize),
    pub basis: Vec<SparseVec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Simplicity {
    Simple,
    NotSimple(IdealWitness),
    Inconclusive(String),
}

impl Simplicity {
    pub fn label(&self) -> &'static str {
        match self {
            Simplicity::Simple => "Simple",
            Simplicity::NotSimple(_) => "NotSimple",
            Simplicity::Inconclusive(_) => "Inconclusive",
        }
    }

    pub fn to_json(&self, t: &AlgebraTable, with_basis: bool) -> Value {
        match self {
            Simplicity::Simple => json!("Simple"),
            Simplicity::NotSimple(w) => {
                let mut o = json!({ "reason": w.reason, "dims": [w.dims.0, w.dims.1] });
                if with_basis {
                    o["basis"] = Value::Array(w.basis.iter().map(|v| vec_json(t.field(), t.space(), v)).collect());
                }
                json!({ "NotSimple": o })
            }
            Simplicity::Inconclusive(d) => json!({ "Inconclusive": d }),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SimplicityOptions {
    pub seed: u64,
    pub rounds: usize,
}

impl Default for SimplicityOptions {
    fn default() -> Self {
        SimplicityOptions { seed: DEFAULT_SEED, rounds: DEFAULT_ROUNDS }
    }
}

fn witness(t: &AlgebraTable, reason: &str, w: &Subspace) -> Result<Simplicity> {
    let n = t.dim();
    if w.dim() == 0 || w.dim() >= n || !is_ideal(t, w) {
        return Err(Error::Internal(format!("{reason}: subspace of dim {} is not a proper ideal", w.dim())));
    }
    let basis = w.homogeneous_basis(t.parities()).ok_or_else(|| Error::Internal(format!("{reason}: ungraded witness")))?;
    Ok(Simplicity::NotSimple(IdealWitness { reason: reason.to_string(), dims: w.graded_dims(t.parities()), basis }))
}

/// Checks that do not need randomness: zero/abelian, imperfect, nonzero center.
fn structural_gates(t: &AlgebraTable) -> Result<Option<Simplicity>> {
    let n = t.dim();
    if n == 0 {
        return Ok(Some(Simplicity::NotSimple(IdealWitness { reason: "zero algebra".into(), dims: (0, 0), basis: vec![] })));
    }
    let d = derived_subalgebra(t);
    if d.dim() == 0 {
        return Ok(Some(Simplicity::NotSimple(IdealWitness {
            reason: "abelian".into(),
            dims: t.dims(),
            basis: vec![],
        })));
    }
    if d.dim() < n {
        return witness(t, "derived subalgebra", &d).map(Some);
    }
    let z = center(t);
    if z.dim() > 0 {
        return witness(t, "center", &z).map(Some);
    }
    Ok(None)
}

fn sparse_ad(t: &AlgebraTable, p: u64) -> Vec<Vec<Vec<(usize, u64)>>> {
    let n = t.dim();
    let f = t.field();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| t.product(i, j).iter().map(|(k, c)| (*k, f.residue(c).expect("prime field") as u64 % p)).collect())
                .collect()
        })
        .collect()
}

fn apply_sparse(cols: &[Vec<(usize, u64)>], v: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; v.len()];
    for (j, &x) in v.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for &(i, c) in &cols[j] {
            out[i] = (out[i] + x * c) % p;
        }
    }
    out
}

fn spin_all(ad: &[Vec<Vec<(usize, u64)>>], start: &[Vec<u64>], n: usize, p: u64) -> DenseSpan {
    let mut span = DenseSpan::new(n, p);
    let mut queue: Vec<Vec<u64>> = start.iter().filter_map(|v| span.insert(v.clone())).collect();
    while let Some(v) = queue.pop() {
        for a in ad {
            if span.dim() == n {
                return span;
            }
            if let Some(w) = span.insert(apply_sparse(a, &v, p)) {
                queue.push(w);
            }
        }
    }
    span
}

fn dense_to_subspace(f: Field, s: &DenseSpan) -> Subspace {
    let vs: Vec<SparseVec> = s
        .rows()
        .iter()
        .map(|r| SparseVec::from_pairs(f, r.iter().enumerate().filter(|e| *e.1 != 0).map(|(i, &x)| (i, f.from_residue(x)))))
        .collect();
    Subspace::span(f, s.n, &vs)
}

/// Graded simplicity over GF(p). Structural gates first, then the MeatAxe on
/// the adjoint module of a few random homogeneous elements; a proper invariant
/// subspace that is not an ideal enlarges the generator set.
pub fn is_simple(t: &AlgebraTable, opts: SimplicityOptions) -> Result<Simplicity> {
    let f = t.field();
    let Field::Prime(p) = f else {
        return Err(Error::Gating("simplicity over Q is decided per prime; pass --primes".into()));
    };
    if let Some(s) = structural_gates(t)? {
        return Ok(s);
    }
    let p = p as u64;
    let n = t.dim();
    let ad = sparse_ad(t, p);
    let pars = t.parities();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random_ad = |parity: Parity, rng: &mut ChaCha8Rng| {
        let mut m = Mat::zeros(n, p);
        for (i, a) in ad.iter().enumerate() {
            if pars[i] != parity {
                continue;
            }
            let r: u64 = rng.gen_range(0..p);
            for (j, col) in a.iter().enumerate() {
                for &(k, c) in col {
                    m.a[k * n + j] = (m.a[k * n + j] + r * c) % p;
                }
            }
        }
        m
    };
    let (_, odd_dim) = t.dims();
    let mut gens = vec![random_ad(Parity::Even, &mut rng), random_ad(Parity::Even, &mut rng)];
    if odd_dim > 0 {
        gens.push(random_ad(Parity::Odd, &mut rng));
        gens.push(random_ad(Parity::Odd, &mut rng));
    }
    let mut remaining = opts.rounds;
    while remaining > 0 {
        match meataxe(&gens, &mut rng, remaining) {
            MeatAxe::Irreducible => return Ok(Simplicity::Simple),
            MeatAxe::Inconclusive { .. } => break,
            MeatAxe::Reducible(w) => {
                remaining -= 1;
                let bad = (0..n).find(|&i| w.rows().iter().any(|v| !w.contains(&apply_sparse(&ad[i], v, p))));
                if let Some(i) = bad {
                    gens.push(Mat::from_sparse_cols(n, p, &ad[i]));
                    continue;
                }
                let graded: Vec<Vec<u64>> = w
                    .rows()
                    .iter()
                    .flat_map(|v| {
                        let even = v.iter().enumerate().map(|(i, &x)| if pars[i].is_odd() { 0 } else { x }).collect();
                        let odd = v.iter().enumerate().map(|(i, &x)| if pars[i].is_odd() { x } else { 0 }).collect();
                        [even, odd]
                    })
                    .collect();
                let closure = spin_all(&ad, &graded, n, p);
                if closure.dim() < n {
                    let reason = if closure.dim() == w.dim() { "invariant subspace" } else { "graded closure" };
                    return witness(t, reason, &dense_to_subspace(f, &closure));
                }
            }
        }
    }
    Ok(Simplicity::Inconclusive(format!("no certificate after {} rounds", opts.rounds)))
}

/// Reduces a ℚ-table modulo `p`; fails if a denominator is divisible by `p`.
pub fn reduce_mod(t: &AlgebraTable, p: u32) -> Result<AlgebraTable> {
    if t.field() != Field::Rational {
        return Err(Error::FieldMismatch(format!("reduction expects a table over Q, got {}", t.field())));
    }
    let fp = Field::new(p as u64)?;
    let n = t.dim();
    let mut products = Vec::with_capacity(n * n);
    for k in 0..n * n {
        let v = t.product(k / n, k % n);
        let mut pairs = Vec::with_capacity(v.nnz());
        for (i, c) in v.iter() {
            let r = c.reduce_mod(p).ok_or_else(|| Error::Invalid(format!("structure constant {c} is not {p}-integral")))?;
            pairs.push((*i, fp.from_residue(r as u64)));
        }
        products.push(SparseVec::from_pairs(fp, pairs));
    }
    AlgebraTable::with_products(fp, t.space().clone(), products)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeVerdict {
    pub prime: u32,
    pub verdict: Simplicity,
}

/// Lifts an ideal found mod `p` to ℚ through centered residues and keeps it
/// if the ideal it generates over ℚ is still proper.
fn lift_witness(t: &AlgebraTable, p: u32, basis: &[SparseVec]) -> Result<Option<Simplicity>> {
    let fp = Field::Prime(p);
    let lift = |v: &SparseVec| {
        SparseVec::from_pairs(
            Field::Rational,
            v.iter().map(|(i, c)| (*i, Rational::integer(fp.centered(c).expect("prime field residue")))),
        )
    };
    let lifted: Vec<SparseVec> = basis.iter().map(lift).collect();
    let n = t.dim();
    let mut tries = vec![lifted.clone()];
    tries.extend(lifted.into_iter().map(|v| vec![v]));
    for gens in tries {
        let w = ideal_generated(t, &gens);
        if w.dim() > 0 && w.dim() < n {
            return witness(t, &format!("ideal lifted from fp:{p}"), &w).map(Some);
        }
    }
    Ok(None)
}

/// Simplicity over ℚ: exact structural gates, then the MeatAxe on reductions.
/// A simple reduction of a table with `p`-integral constants certifies
/// simplicity over ℚ, since a proper ideal would reduce to a proper ideal.
/// Ideals found mod `p` are lifted and re-checked exactly before being reported.
pub fn is_simple_rational(
    t: &AlgebraTable,
    primes: &[u32],
    opts: SimplicityOptions,
) -> Result<(Simplicity, Vec<PrimeVerdict>)> {
    if t.field() != Field::Rational {
        return Ok((is_simple(t, opts)?, vec![]));
    }
    if let Some(s) = structural_gates(t)? {
        return Ok((s, vec![]));
    }
    let mut per = Vec::new();
    let mut overall = None;
    for &p in primes {
        let verdict = match reduce_mod(t, p) {
            Ok(tp) => is_simple(&tp, opts)?,
            Err(e) => Simplicity::Inconclusive(e.to_string()),
        };
        if overall.is_none() {
            match &verdict {
                Simplicity::Simple => overall = Some(Simplicity::Simple),
                Simplicity::NotSimple(w) => overall = lift_witness(t, p, &w.basis)?,
                Simplicity::Inconclusive(_) => {}
            }
        }
        per.push(PrimeVerdict { prime: p, verdict });
    }
    let overall = overall.unwrap_or_else(|| Simplicity::Inconclusive(format!("no prime in {primes:?} certified simplicity")));
    Ok((overall, per))
}

// ---------------------------------------------------------------------------
// report

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub simplicity_detail: bool,
    pub killing: bool,
    pub primes: Vec<u32>,
    pub seed: u64,
    pub rounds: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            simplicity_detail: false,
            killing: false,
            primes: DEFAULT_PRIMES.to_vec(),
            seed: DEFAULT_SEED,
            rounds: DEFAULT_ROUNDS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub dims: (usize, usize),
    pub jacobi: JacobiVerdict,
    pub derived: (usize, usize),
    pub center: usize,
    pub killing: Option<(usize, usize, bool)>,
    /// Skipped when Jacobi fails.
    pub simplicity: Option<(Simplicity, Vec<PrimeVerdict>)>,
    pub seed: u64,
    pub rounds: usize,
    pub timings_ms: Vec<(&'static str, u128)>,
}

pub fn analyze(t: &AlgebraTable, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &'static str, timings: &mut Vec<(&'static str, u128)>| {
        timings.push((name, clock.elapsed().as_millis()));
        clock = Instant::now();
    };
    let jacobi = check_super_jacobi(t);
    lap("jacobi", &mut timings);
    let derived = derived_subalgebra(t).graded_dims(t.parities());
    let center_dim = center(t).dim();
    lap("derived+center", &mut timings);
    let killing = if opts.killing {
        let k = killing_form(t, opts.seed);
        lap("killing", &mut timings);
        Some((k.rank, k.radical_dim, k.invariant))
    } else {
        None
    };
    let sopts = SimplicityOptions { seed: opts.seed, rounds: opts.rounds };
    let simplicity = if jacobi.passes() {
        let s = is_simple_rational(t, &opts.primes, sopts)?;
        lap("simplicity", &mut timings);
        Some(s)
    } else {
        None
    };
    Ok(AnalysisReport {
        dims: t.dims(),
        jacobi,
        derived,
        center: center_dim,
        killing,
        simplicity,
        seed: opts.seed,
        rounds: opts.rounds,
        timings_ms: timings,
    })
}

impl AnalysisReport {
    /// JSON form; timings are left out when `timings` is false so that reports compare equal.
    pub fn to_json(&self, t: &AlgebraTable, detail: bool, timings: bool) -> Value {
        let mut o = json!({
            "dims": [self.dims.0, self.dims.1],
            "jacobi": self.jacobi.to_json(t),
            "derived": self.derived.0 + self.derived.1,
            "derived_dims": [self.derived.0, self.derived.1],
            "center": self.center,
            "seed": self.seed,
        });
        if let Some((s, per)) = &self.simplicity {
            o["simple"] = s.to_json(t, detail);
            if detail {
                o["rounds"] = json!(self.rounds);
                if !per.is_empty() {
                    o["per_prime"] = Value::Array(
                        per.iter().map(|pv| json!({ "prime": pv.prime, "verdict": pv.verdict.to_json(t, false) })).collect(),
                    );
                }
            }
        }
        if let Some((rank, radical, invariant)) = self.killing {
            o["killing"] = json!({ "rank": rank, "radical": radical, "invariant": invariant });
        }
        if timings {
            o["timings_ms"] = Value::Object(self.timings_ms.iter().map(|(k, v)| (k.to_string(), json!(*v as u64))).collect());
        }
        o
    }
}
