//! Randomized and exhaustive property suites over the foundation layers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use proptest::prelude::*;

use iqstab::braid::{t_i, t_i_inv};
use iqstab::crystal::Crystal;
use iqstab::gcb::{bar_tensor, based_irreducible, based_tensor, based_tensor_of, kashiwara, Based};
use iqstab::iqg::{IContext, IrrCache};
use iqstab::linalg::SVec;
use iqstab::rep::{Gen, Module, DEFAULT_SIZE_BOUND as BOUND};
use iqstab::rootdata::{admissible_pair, build_datum, PairKind, RootDatum, Series};
use iqstab::scalar::{qint_f, RatFn};

const CASES: u32 = 256;

fn datum(s: Series, n: usize) -> Arc<RootDatum> {
    Arc::new(build_datum(s, n).unwrap())
}

/// Irreducibles and tensor products shared by the module-level suites.
fn based_pool() -> &'static Vec<(String, Based)> {
    static POOL: OnceLock<Vec<(String, Based)>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = Vec::new();
        for (s, n, l) in [
            (Series::A, 1, vec![3]),
            (Series::A, 2, vec![1, 1]),
            (Series::A, 3, vec![0, 1, 0]),
            (Series::B, 2, vec![1, 1]),
            (Series::C, 3, vec![0, 1, 0]),
            (Series::D, 4, vec![1, 0, 0, 0]),
            (Series::F4, 4, vec![0, 0, 0, 1]),
            (Series::A1xA1, 2, vec![1, 2]),
        ] {
            out.push((format!("{s}{n} {l:?}"), based_irreducible(&datum(s, n), &l, BOUND).unwrap()));
        }
        for (s, n, ls) in [
            (Series::A, 1, vec![vec![1], vec![2]]),
            (Series::A, 2, vec![vec![1, 0], vec![0, 1]]),
            (Series::B, 2, vec![vec![0, 1], vec![1, 0]]),
            (Series::A, 2, vec![vec![1, 0], vec![1, 0], vec![0, 1]]),
        ] {
            out.push((format!("{s}{n} {ls:?}"), based_tensor_of(&datum(s, n), &ls, BOUND).unwrap()));
        }
        out
    })
}

/// Small random vector on a module of dimension `dim`.
fn vector(dim: usize, picks: &[(usize, i64, i32)]) -> SVec {
    let mut v = SVec::new();
    for &(k, c, e) in picks {
        v.add_term(k % dim, &RatFn::monomial(c, e));
    }
    v
}

fn picks() -> impl Strategy<Value = Vec<(usize, i64, i32)>> {
    prop::collection::vec((0usize..10_000, -3i64..4, -2i32..3), 1..4)
}

/// `(-1)^r` as a scalar.
fn sign(r: u32) -> RatFn {
    if r % 2 == 0 {
        RatFn::one()
    } else {
        RatFn::from_int(-1)
    }
}

// ---------------------------------------------------------------------------
// U-relations, computed on vectors against a weight-based oracle

fn commutator_oracle(m: &Module, i: usize, v: &SVec) -> SVec {
    let mut out = SVec::new();
    for (k, x) in v.iter() {
        out.add_term(k, &(x * &qint_f(m.weights[k][i], m.datum.d[i])));
    }
    out
}

fn serre(m: &Module, g: Gen, i: usize, j: usize, v: &SVec) -> SVec {
    let top = (1 - m.datum.cartan[i][j]) as u32;
    let mut acc = SVec::new();
    for r in 0..=top {
        let w = m.divided_power(g, i, top - r, v);
        let w = m.act(g, j, &w);
        let w = m.divided_power(g, i, r, &w);
        acc.axpy(&sign(r), &w);
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn u_relations_on_vectors(idx in 0usize..12, i in 0usize..4, j in 0usize..4, p in picks()) {
        let (name, b) = &based_pool()[idx];
        let m = &b.module;
        let (i, j) = (i % m.rank(), j % m.rank());
        let v = vector(m.dim(), &p);
        let ef = m.act(Gen::E, i, &m.act(Gen::F, j, &v));
        let fe = m.act(Gen::F, j, &m.act(Gen::E, i, &v));
        let lhs = ef.sub(&fe);
        let rhs = if i == j { commutator_oracle(m, i, &v) } else { SVec::new() };
        prop_assert_eq!(lhs, rhs, "{} [E_{}, F_{}]", name, i, j);
        if i != j {
            prop_assert!(serre(m, Gen::E, i, j, &v).is_zero(), "{} Serre E {} {}", name, i, j);
            prop_assert!(serre(m, Gen::F, i, j, &v).is_zero(), "{} Serre F {} {}", name, i, j);
        }
        // K_i E_j K_i^-1 = q_i^{a_ij} E_j
        let conj = m.act_ki(i, 1, &m.act(Gen::E, j, &m.act_ki(i, -1, &v)));
        let expect = m.act(Gen::E, j, &v).scale(&RatFn::q_pow(m.datum.d[i] * m.datum.cartan[i][j]));
        prop_assert_eq!(conj, expect);
    }

    #[test]
    fn braid_operators_on_vectors(idx in 0usize..12, i in 0usize..4, j in 0usize..4, p in picks()) {
        let (name, b) = &based_pool()[idx];
        let m = &b.module;
        let (i, j) = (i % m.rank(), j % m.rank());
        let v = vector(m.dim(), &p);
        prop_assert_eq!(t_i_inv(m, i, &t_i(m, i, &v)), v.clone());
        for k in 0..m.dim().min(4) {
            let img = t_i(m, i, &SVec::unit((p[0].0 + k) % m.dim()));
            let wt = m.datum.reflect(i, &m.weights[(p[0].0 + k) % m.dim()]);
            prop_assert_eq!(m.weight_of(&img), Some(wt));
        }
        let a = m.datum.cartan[i][j] * m.datum.cartan[j][i];
        if i != j {
            let len = match a { 0 => 2, 1 => 3, 2 => 4, _ => 6 };
            let word = |x: usize, y: usize| -> SVec {
                let mut w = v.clone();
                for s in 0..len {
                    w = t_i(m, if s % 2 == 0 { y } else { x }, &w);
                }
                w
            };
            prop_assert_eq!(word(i, j), word(j, i), "{} braid {} {}", name, i, j);
        }
        if i != j && m.datum.cartan[i][j] == 0 {
            prop_assert_eq!(t_i(m, i, &m.act(Gen::E, j, &v)), m.act(Gen::E, j, &t_i(m, i, &v)));
        }
        // T''_{i,1}(E_i) = -F_i K_i
        let lhs = t_i(m, i, &m.act(Gen::E, i, &v));
        let rhs = m.act(Gen::F, i, &m.act_ki(i, 1, &t_i(m, i, &v))).neg();
        prop_assert_eq!(lhs, rhs, "{} T_{} E_{}", name, i, i);
    }
}

#[test]
fn u_relations_as_matrices() {
    for (name, b) in based_pool() {
        b.module.check_relations().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(b.module.actions_in_a(), "{name}");
    }
}

// ---------------------------------------------------------------------------
// Weyl dimension formula

type DimCache = Mutex<HashMap<(String, Vec<i32>), (usize, usize)>>;

fn series_case(k: usize) -> (Series, usize) {
    [(Series::A, 1), (Series::A, 2), (Series::A, 3), (Series::B, 2), (Series::B, 3), (Series::C, 3), (Series::D, 4), (Series::A1xA1, 2)][k]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn weyl_dimension_agrees(k in 0usize..8, raw in prop::collection::vec(0i32..3, 4)) {
        static CACHE: OnceLock<DimCache> = OnceLock::new();
        let (s, n) = series_case(k);
        let d = datum(s, n);
        let l: Vec<i32> = raw[..n].to_vec();
        let expect = d.weyl_dimension(&l);
        prop_assume!(expect <= 200);
        let key = (d.name(), l.clone());
        let cached = CACHE.get_or_init(Default::default).lock().unwrap().get(&key).copied();
        let (dim, crystal) = match cached {
            Some(x) => x,
            None => {
                let b = based_irreducible(&d, &l, BOUND).unwrap();
                b.crystal.check(&d).unwrap();
                let x = (b.dim(), b.crystal.len());
                CACHE.get_or_init(Default::default).lock().unwrap().insert(key, x);
                x
            }
        };
        prop_assert_eq!(dim as u64, expect);
        prop_assert_eq!(crystal as u64, expect);
    }
}

// ---------------------------------------------------------------------------
// Global basis invariants

fn two_factor_pool() -> &'static Vec<(Based, Based, Based, iqstab::linalg::SpMat)> {
    static POOL: OnceLock<Vec<(Based, Based, Based, iqstab::linalg::SpMat)>> = OnceLock::new();
    POOL.get_or_init(|| {
        [
            (Series::A, 1, vec![1], vec![2]),
            (Series::A, 2, vec![1, 0], vec![0, 1]),
            (Series::B, 2, vec![0, 1], vec![1, 0]),
            (Series::C, 3, vec![1, 0, 0], vec![1, 0, 0]),
        ]
        .into_iter()
        .map(|(s, n, l1, l2)| {
            let d = datum(s, n);
            let m = based_irreducible(&d, &l1, BOUND).unwrap();
            let nb = based_irreducible(&d, &l2, BOUND).unwrap();
            let t = based_tensor(&m, &nb).unwrap();
            let psi = bar_tensor(&m, &nb, &Module::tensor(&m.module, &nb.module)).unwrap();
            (m, nb, t, psi)
        })
        .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn global_basis_lattice_and_crystal_limit(idx in 0usize..12, b in 0usize..10_000, i in 0usize..4, up in any::<bool>()) {
        let (name, based) = &based_pool()[idx];
        let b = b % based.dim();
        let i = i % based.module.rank();
        // G(b) = pure(b) + q^-1 Z[q^-1] combination
        for (r, x) in based.to_pure.cols[b].iter() {
            if r == b {
                prop_assert!(x.is_one(), "{} diagonal {}", name, x);
            } else {
                prop_assert!(x.is_in_a() && x.is_in_qinv_ainf(), "{} G({}) coefficient {}", name, b, x);
            }
        }
        // Kashiwara operators reduce to crystal arrows
        let dir = if up { Gen::E } else { Gen::F };
        let arrows = if up { &based.crystal.e[i] } else { &based.crystal.f[i] };
        let w = kashiwara(&based.module, i, dir, &SVec::unit(b));
        let mut hit = None;
        for (r, x) in w.iter() {
            prop_assert!(x.is_in_ainf());
            let v = x.ev_inf().unwrap();
            if !v.is_zero() {
                prop_assert!(v.is_one() && hit.is_none());
                hit = Some(r);
            }
        }
        prop_assert_eq!(hit, arrows[b]);
        // (G(b), G(b')) in delta + q^-1 A_oo
        if let Some(form) = &based.form {
            for b2 in 0..based.dim() {
                let x = form.get(b, b2);
                if b == b2 {
                    prop_assert!((&x - &RatFn::one()).is_in_qinv_ainf(), "{} ({},{}) = {}", name, b, b2, x);
                } else {
                    prop_assert!(x.is_in_qinv_ainf(), "{} ({},{}) = {}", name, b, b2, x);
                }
            }
        }
    }

    #[test]
    fn tensor_global_basis_is_bar_fixed(idx in 0usize..4, b in 0usize..10_000, p in picks()) {
        let (_, _, t, psi) = &two_factor_pool()[idx];
        let b = b % t.dim();
        let g = &t.to_pure.cols[b];
        prop_assert_eq!(&psi.apply(&g.bar()), g);
        // psi is an antilinear involution
        let v = vector(t.dim(), &p);
        prop_assert_eq!(psi.apply(&psi.apply(&v.bar()).bar()), v);
    }

    #[test]
    fn crystal_tensor_rule_matches_module(idx in 0usize..4, b in 0usize..10_000, i in 0usize..4) {
        let (m, nb, t, _) = &two_factor_pool()[idx];
        let rule = Crystal::tensor(&m.crystal, &nb.crystal);
        let b = b % t.dim();
        let i = i % t.module.rank();
        prop_assert_eq!(&rule.weights[b], &t.crystal.weights[b]);
        prop_assert_eq!(rule.e[i][b], t.crystal.e[i][b]);
        prop_assert_eq!(rule.f[i][b], t.crystal.f[i][b]);
        prop_assert_eq!(rule.eps[b][i], t.crystal.eps[b][i]);
        prop_assert_eq!(rule.phi[b][i], t.crystal.phi[b][i]);
    }
}

#[test]
fn triple_tensor_crystal_nests_left() {
    let d = datum(Series::A, 2);
    let ls = [vec![1, 0], vec![0, 1], vec![1, 0]];
    let t = based_tensor_of(&d, &ls, BOUND).unwrap();
    let c: Vec<Crystal> = ls.iter().map(|l| based_irreducible(&d, l, BOUND).unwrap().crystal).collect();
    let rule = Crystal::tensor(&Crystal::tensor(&c[0], &c[1]), &c[2]);
    assert_eq!(rule.e, t.crystal.e);
    assert_eq!(rule.f, t.crystal.f);
    assert_eq!(rule.weights, t.crystal.weights);
}

// ---------------------------------------------------------------------------
// ibar involution

fn icontexts() -> &'static Vec<(String, IContext)> {
    static POOL: OnceLock<Vec<(String, IContext)>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut cache = IrrCache::default();
        let mut out = Vec::new();
        for (k, n, ls) in [
            (PairKind::AI, 1, vec![vec![2]]),
            (PairKind::AI, 1, vec![vec![1], vec![2]]),
            (PairKind::AII, 3, vec![vec![0, 1, 0]]),
            (PairKind::AIII, 2, vec![vec![1, 1]]),
            (PairKind::AIV, 3, vec![vec![1, 0, 1]]),
            (PairKind::BII, 2, vec![vec![0, 1]]),
            (PairKind::BII, 2, vec![vec![1, 0], vec![0, 1]]),
            (PairKind::CII, 3, vec![vec![0, 1, 0]]),
            (PairKind::DII, 4, vec![vec![1, 0, 0, 0]]),
            (PairKind::FII, 4, vec![vec![0, 0, 0, 1]]),
        ] {
            let pair = Arc::new(admissible_pair(k, n).unwrap());
            let d = Arc::new(pair.datum.clone());
            let b = based_tensor_of(&d, &ls, BOUND).unwrap();
            out.push((format!("{k} {ls:?}"), IContext::new(pair, b, &mut cache, BOUND).unwrap()));
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn ibar_involutive_and_intertwining(idx in 0usize..10, g in 0usize..16, p in picks()) {
        let (name, c) = &icontexts()[idx];
        let v = vector(c.dim(), &p);
        prop_assert_eq!(c.ibar(&c.ibar(&v)), v.clone(), "{}", name);
        let gens = c.generators();
        let (gname, x) = &gens[g % gens.len()];
        prop_assert_eq!(c.ibar(&x.apply(&v)), x.apply(&c.ibar(&v)), "{} {}", name, gname);
        let ks = c.k_generators();
        if !ks.is_empty() {
            let (kname, k) = &ks[g % ks.len()];
            prop_assert_eq!(c.ibar(&k.apply(&v)), k.bar().apply(&c.ibar(&v)), "{} {}", name, kname);
        }
        // psi^i is antilinear
        let s = &RatFn::q_pow(1) + &RatFn::from_int(2);
        prop_assert_eq!(c.ibar(&v.scale(&s)), c.ibar(&v).scale(&s.bar()));
    }
}

#[test]
fn icanonical_bases_are_fixed() {
    for (name, c) in icontexts() {
        c.check_ibar().unwrap_or_else(|e| panic!("{name}: {e}"));
        c.check_icb().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
