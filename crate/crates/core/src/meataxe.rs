//! Dense linear algebra over GF(p) and a MeatAxe-style irreducibility test
//! with Norton's criterion.

use rand::seq::SliceRandom;
use rand::Rng;

/// Dense square matrix over GF(p), row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub n: usize,
    pub p: u64,
    pub a: Vec<u64>,
}

impl Mat {
    pub fn zeros(n: usize, p: u64) -> Mat {
        Mat { n, p, a: vec![0; n * n] }
    }

    pub fn identity(n: usize, p: u64) -> Mat {
        let mut m = Mat::zeros(n, p);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from its columns given as sparse `(row, value)` lists.
    pub fn from_sparse_cols(n: usize, p: u64, cols: &[Vec<(usize, u64)>]) -> Mat {
        let mut m = Mat::zeros(n, p);
        for (j, col) in cols.iter().enumerate() {
            for &(i, v) in col {
                m.a[i * n + j] = v % p;
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.n + j]
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let (n, p) = (self.n, self.p);
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let c = self.a[i * n + k];
                if c == 0 {
                    continue;
                }
                let orow = &o.a[k * n..(k + 1) * n];
                for j in 0..n {
                    row[j] += c * orow[j];
                }
                if k % 64 == 63 {
                    row.iter_mut().for_each(|x| *x %= p);
                }
            }
            row.iter_mut().for_each(|x| *x %= p);
        }
        Mat { n, p, a: out }
    }

    pub fn axpy(&mut self, c: u64, o: &Mat) {
        let p = self.p;
        for (x, y) in self.a.iter_mut().zip(&o.a) {
            *x = (*x + c * y) % p;
        }
    }

    pub fn sub_scalar(&self, lambda: u64) -> Mat {
        let mut m = self.clone();
        let n = self.n;
        for i in 0..n {
            m.a[i * n + i] = (m.a[i * n + i] + self.p - lambda % self.p) % self.p;
        }
        m
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut m = Mat::zeros(n, self.p);
        for i in 0..n {
            for j in 0..n {
                m.a[j * n + i] = self.a[i * n + j];
            }
        }
        m
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        let (n, p) = (self.n, self.p);
        (0..n)
            .map(|i| {
                let row = &self.a[i * n..(i + 1) * n];
                row.iter().zip(v).fold(0u64, |acc, (a, b)| (acc + a * b) % p)
            })
            .collect()
    }

    /// Basis of `{v : Mv = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let rows: Vec<Vec<u64>> = (0..self.n).map(|i| self.a[i * self.n..(i + 1) * self.n].to_vec()).collect();
        nullspace_of_rows(&rows, self.n, self.p)
    }
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    crate::field::pow_mod(a, p - 2, p)
}

/// Kernel of the matrix with the given rows (vectors `v` with `r·v = 0` for every row).
pub fn nullspace_of_rows(rows: &[Vec<u64>], n: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(k) = (r..m.len()).find(|&k| m[k][c] != 0) else { continue };
        m.swap(r, k);
        let inv = inv_mod(m[r][c], p);
        m[r].iter_mut().for_each(|x| *x = *x * inv % p);
        let pr = m[r].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k != r && row[c] != 0 {
                let f = row[c];
                for j in c..n {
                    row[j] = (row[j] + (p - f) * pr[j]) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; n];
            v[fc] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[ri][fc]) % p;
            }
            v
        })
        .collect()
}

/// A subspace of GF(p)ⁿ in reduced echelon form.
#[derive(Clone, Debug)]
pub struct DenseSpan {
    pub n: usize,
    pub p: u64,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl DenseSpan {
    pub fn new(n: usize, p: u64) -> DenseSpan {
        DenseSpan { n, p, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn reduce(&self, v: &mut [u64]) {
        let p = self.p;
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = v[c];
            if f != 0 {
                for j in c..self.n {
                    v[j] = (v[j] + (p - f) * row[j]) % p;
                }
            }
        }
    }

    /// Inserts `v`; returns the reduced, normalized vector if it was new.
    pub fn insert(&mut self, mut v: Vec<u64>) -> Option<Vec<u64>> {
        self.reduce(&mut v);
        let c = v.iter().position(|&x| x != 0)?;
        let p = self.p;
        let inv = inv_mod(v[c], p);
        v.iter_mut().for_each(|x| *x = *x * inv % p);
        for row in &mut self.rows {
            let f = row[c];
            if f != 0 {
                for j in c..self.n {
                    row[j] = (row[j] + (p - f) * v[j]) % p;
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < c);
        self.pivots.insert(pos, c);
        self.rows.insert(pos, v.clone());
        Some(v)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Basis of the orthogonal complement under the standard pairing.
    pub fn annihilator(&self) -> Vec<Vec<u64>> {
        nullspace_of_rows(&self.rows, self.n, self.p)
    }
}

/// Smallest subspace containing `start` and stable under every generator.
pub fn spin(gens: &[Mat], start: &[Vec<u64>], n: usize, p: u64) -> DenseSpan {
    let mut span = DenseSpan::new(n, p);
    let mut queue = Vec::new();
    for v in start {
        if let Some(w) = span.insert(v.clone()) {
            queue.push(w);
        }
    }
    while let Some(v) = queue.pop() {
        if span.dim() == n {
            break;
        }
        for g in gens {
            if let Some(w) = span.insert(g.apply(&v)) {
                queue.push(w);
            }
        }
    }
    span
}

/// Outcome of one MeatAxe run.
#[derive(Clone, Debug)]
pub enum MeatAxe {
    Irreducible,
    /// A proper nonzero invariant subspace.
    Reducible(DenseSpan),
    Inconclusive { rounds: usize },
}

fn random_combination<R: Rng>(gens: &[Mat], rng: &mut R) -> Mat {
    let (n, p) = (gens[0].n, gens[0].p);
    let mut m = Mat::zeros(n, p);
    for g in gens {
        m.axpy(rng.gen_range(0..p), g);
    }
    m
}

/// Tests the module given by `gens` for irreducibility. A certificate is an
/// element `Y` of the generated algebra and `λ` with `ker(Y - λ)` one-dimensional
/// such that both the kernel vector and a vector of `ker(Y - λ)ᵀ` spin to the
/// whole space (under `gens` and their transposes respectively).
pub fn meataxe<R: Rng>(gens: &[Mat], rng: &mut R, rounds: usize) -> MeatAxe {
    let n = gens.first().map_or(0, |g| g.n);
    if n <= 1 {
        return MeatAxe::Irreducible;
    }
    let p = gens[0].p;
    let gens_t: Vec<Mat> = gens.iter().map(Mat::transpose).collect();
    let mut lambdas: Vec<u64> = (0..p).collect();
    for _ in 0..rounds {
        let w1 = random_combination(gens, rng);
        let w2 = random_combination(gens, rng);
        let mut y = w1.mul(&w2);
        y.axpy(1, &random_combination(gens, rng));
        lambdas.shuffle(rng);
        for &lambda in &lambdas {
            let m = y.sub_scalar(lambda);
            let ker = m.nullspace();
            if ker.is_empty() {
                continue;
            }
            let s = spin(gens, &ker[..1], n, p);
            if s.dim() < n {
                return MeatAxe::Reducible(s);
            }
            if ker.len() > 1 {
                continue;
            }
            let kt = m.transpose().nullspace();
            let st = spin(&gens_t, &kt[..1], n, p);
            if st.dim() < n {
                let mut w = DenseSpan::new(n, p);
                for v in st.annihilator() {
                    w.insert(v);
                }
                return MeatAxe::Reducible(w);
            }
            return MeatAxe::Irreducible;
        }
    }
    MeatAxe::Inconclusive { rounds }
}
