use proptest::prelude::*;
use titsforge::analyze::*;
use titsforge::composition::{composition_make, hurwitz_make, para_hurwitz, CompositionKind};
use titsforge::construct::{g_build, tits_build, TitsOptions};
use titsforge::jordan::{dt_make, h3_make};
use titsforge::rational::Rational;
use titsforge::{AlgebraTable, Field, Parity, SparseVec, SuperSpace};

const Q: Field = Field::Rational;
const GF3: Field = Field::Prime(3);

fn sl2(f: Field) -> AlgebraTable {
    let unit = hurwitz_make(CompositionKind::Unit, f).unwrap();
    tits_build(&unit, &h3_make(&unit).unwrap(), &TitsOptions::default()).unwrap().into_table()
}

fn abelian(f: Field, even: usize, odd: usize) -> AlgebraTable {
    let basis = (0..even + odd).map(|i| (format!("e{i}"), if i < even { Parity::Even } else { Parity::Odd })).collect();
    AlgebraTable::new(f, SuperSpace::new(basis).unwrap())
}

fn direct_sum(a: &AlgebraTable, b: &AlgebraTable) -> AlgebraTable {
    let f = a.field();
    let (n, m) = (a.dim(), b.dim());
    let basis = (0..n)
        .map(|i| (format!("a{i}"), a.parity(i)))
        .chain((0..m).map(|i| (format!("b{i}"), b.parity(i))))
        .collect();
    let mut products = vec![SparseVec::new(); (n + m) * (n + m)];
    for i in 0..n {
        for j in 0..n {
            products[i * (n + m) + j] = a.product(i, j).clone();
        }
    }
    for i in 0..m {
        for j in 0..m {
            products[(n + i) * (n + m) + n + j] = b.product(i, j).map_indices(f, |k| k + n);
        }
    }
    AlgebraTable::with_products(f, SuperSpace::new(basis).unwrap(), products).unwrap()
}

fn small_lie_tables() -> Vec<AlgebraTable> {
    let p = |k, f| para_hurwitz(&composition_make(k, f).unwrap());
    let bin = hurwitz_make(CompositionKind::Binarion, Q).unwrap();
    let mat2 = hurwitz_make(CompositionKind::Quaternion, Q).unwrap();
    vec![
        sl2(Q),
        tits_build(&bin, &h3_make(&bin).unwrap(), &TitsOptions::default()).unwrap().into_table(),
        tits_build(&mat2, &dt_make(&Rational::integer(2), Q).unwrap(), &TitsOptions::default()).unwrap().into_table(),
        g_build(&p(CompositionKind::Unit, GF3), &p(CompositionKind::B12, GF3)).unwrap().into_table(),
        g_build(&p(CompositionKind::B12, GF3), &p(CompositionKind::B12, GF3)).unwrap().into_table(),
    ]
}

/// Adds `c·e_k` to `[e_i, e_j]` and the matching term to `[e_j, e_i]`.
fn perturb(t: &AlgebraTable, i: usize, j: usize, k: usize, c: i64) -> Option<AlgebraTable> {
    let f = t.field();
    let n = t.dim();
    if t.parity(k) != t.parity(i) + t.parity(j) || (i == j && !t.parity(i).is_odd()) {
        return None;
    }
    let mut products: Vec<SparseVec> = (0..n * n).map(|x| t.product(x / n, x % n).clone()).collect();
    let d = SparseVec::single(k, f.from_i64(c));
    products[i * n + j] = products[i * n + j].add(f, &d);
    if i != j {
        let back = if t.koszul(i, j) { d } else { d.neg(f) };
        products[j * n + i] = products[j * n + i].add(f, &back);
    }
    Some(AlgebraTable::with_products(f, t.space().clone(), products).unwrap())
}

fn agree(t: &AlgebraTable) {
    let fast = check_super_jacobi(t);
    let naive = check_super_jacobi_naive(t);
    assert_eq!(fast.passes(), naive.passes());
    if let JacobiVerdict::Fail(w) = fast {
        let [i, j, k] = w.triple;
        assert!(!w.value.is_zero());
        assert_eq!(w.value, jacobiator(t, i, j, k));
    }
}

#[test]
fn jacobi_fast_path_matches_naive_on_constructed_tables() {
    for t in small_lie_tables() {
        assert!(t.dim() <= 40);
        assert!(check_super_jacobi(&t).passes());
        assert!(check_super_jacobi_naive(&t).passes());
        let n = t.dim();
        for (i, j, k) in [(0, 1, 2), (1, 1, 0), (n - 1, n - 2, 0), (0, n - 1, n - 1), (n / 2, n / 3, n - 1)] {
            if let Some(p) = perturb(&t, i, j, k, 1) {
                agree(&p);
            }
        }
    }
}

fn table_strategy() -> impl Strategy<Value = AlgebraTable> {
    (1usize..=6, prop::bool::ANY, prop::collection::vec(prop::bool::ANY, 6))
        .prop_flat_map(|(n, prime, odd)| {
            let entries = prop::collection::vec(prop::option::weighted(0.3, -2i64..=2), n * n * n);
            (Just(n), Just(prime), Just(odd), entries)
        })
        .prop_map(|(n, prime, odd, entries)| {
            let f = if prime { Field::Prime(5) } else { Q };
            let par = |i: usize| if odd[i] { Parity::Odd } else { Parity::Even };
            let basis = (0..n).map(|i| (format!("e{i}"), par(i))).collect();
            let mut products = vec![SparseVec::new(); n * n];
            for i in 0..n {
                for j in i..n {
                    if i == j && !odd[i] {
                        continue;
                    }
                    let pairs: Vec<_> = (0..n)
                        .filter(|&k| par(k) == par(i) + par(j))
                        .filter_map(|k| entries[(i * n + j) * n + k].map(|c| (k, f.from_i64(c))))
                        .collect();
                    let v = SparseVec::from_pairs(f, pairs);
                    let back = if Parity::koszul(par(i), par(j)) { v.clone() } else { v.neg(f) };
                    products[j * n + i] = back;
                    products[i * n + j] = v;
                }
            }
            AlgebraTable::with_products(f, SuperSpace::new(basis).unwrap(), products).unwrap()
        })
}

proptest! {
    #[test]
    fn jacobi_fast_path_matches_naive_on_random_tables(t in table_strategy()) {
        agree(&t);
    }

    #[test]
    fn derived_and_center_are_ideals(t in table_strategy()) {
        prop_assume!(check_super_jacobi(&t).passes());
        prop_assert!(is_ideal(&t, &derived_subalgebra(&t)));
        prop_assert!(is_ideal(&t, &center(&t)));
    }
}

#[test]
fn non_anticommutative_table_fails() {
    let mut t = abelian(Q, 2, 0);
    t.set(0, 1, SparseVec::single(0, Q.one())).unwrap();
    assert!(!check_super_jacobi(&t).passes());
}

#[test]
fn abelian_algebras() {
    let t = abelian(GF3, 2, 2);
    assert!(check_super_jacobi(&t).passes());
    assert_eq!(derived_subalgebra(&t).dim(), 0);
    assert_eq!(center(&t).dim(), 4);
    let k = killing_form(&t, 1);
    assert_eq!((k.rank, k.radical_dim), (0, 4));
    assert!(matches!(is_simple(&t, SimplicityOptions::default()).unwrap(), Simplicity::NotSimple(_)));
}

#[test]
fn sl2_is_simple_with_nondegenerate_killing_form() {
    let t = sl2(Q);
    let k = killing_form(&t, 1);
    assert_eq!(k.rank, 3);
    assert!(k.invariant);
    let (v, per) = is_simple_rational(&t, &DEFAULT_PRIMES, SimplicityOptions::default()).unwrap();
    assert_eq!(v, Simplicity::Simple);
    assert!(!per.is_empty());
    assert_eq!(is_simple(&sl2(Field::Prime(5)), SimplicityOptions::default()).unwrap(), Simplicity::Simple);
}

#[test]
fn direct_sum_is_not_simple() {
    let f = Field::Prime(7);
    let t = direct_sum(&sl2(f), &sl2(f));
    assert!(check_super_jacobi(&t).passes());
    match is_simple(&t, SimplicityOptions::default()).unwrap() {
        Simplicity::NotSimple(w) => assert_eq!(w.dims, (3, 0)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn rational_direct_sum_gets_exact_witness() {
    let t = direct_sum(&sl2(Q), &sl2(Q));
    match is_simple_rational(&t, &DEFAULT_PRIMES, SimplicityOptions::default()).unwrap().0 {
        Simplicity::NotSimple(w) => {
            assert_eq!(w.dims, (3, 0));
            let s = titsforge::linalg::Subspace::span(Q, t.dim(), &w.basis);
            assert!(is_ideal(&t, &s));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn imperfect_algebra_reports_derived_ideal() {
    let p = |k| para_hurwitz(&composition_make(k, GF3).unwrap());
    let g = g_build(&p(CompositionKind::Unit), &p(CompositionKind::Binarion)).unwrap();
    match is_simple(g.table(), SimplicityOptions::default()).unwrap() {
        Simplicity::NotSimple(w) => assert_eq!(w.dims, (7, 0)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn rational_simplicity_requires_prime_list() {
    assert!(is_simple(&sl2(Q), SimplicityOptions::default()).is_err());
}

#[test]
fn report_json_keys() {
    let t = sl2(Q);
    let opts = AnalyzeOptions { killing: true, ..Default::default() };
    let r = analyze(&t, &opts).unwrap();
    let j = r.to_json(&t, false, false);
    for key in ["dims", "jacobi", "derived", "center", "simple", "killing"] {
        assert!(j.get(key).is_some(), "{key}");
    }
    assert_eq!(j["jacobi"], "pass");
    assert_eq!(j["simple"], "Simple");
}
