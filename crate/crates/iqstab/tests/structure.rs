//! Parabolic components, transport, the based submodules `V(w lambda, mu)`
//! and negative controls, across all pairs at their smallest rank.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use iqstab::crystal::extend_from_hw;
use iqstab::gcb::{based_tensor_of, suff_cond_lift};
use iqstab::iqg::{IContext, IrrCache};
use iqstab::props;
use iqstab::rep::DEFAULT_SIZE_BOUND as BOUND;
use iqstab::rootdata::{admissible_pair, build_datum, AdmissiblePair, PairKind, Series, Weight};
use iqstab::scalar::RatFn;
use iqstab::stability::{build_pi_i, corrupt_functional, pi_with, standard_triples, Instance};
use iqstab::Error;

fn pairs() -> Vec<AdmissiblePair> {
    PairKind::ALL.iter().map(|&k| admissible_pair(k, k.min_rank()).unwrap()).collect()
}

/// Zero and the fundamental weights of dimension at most `cap`.
fn small_weights(p: &AdmissiblePair, cap: u64) -> Vec<Weight> {
    let d = &p.datum;
    let mut out = vec![d.zero()];
    out.extend((0..p.rank()).map(|i| d.fundamental(i)).filter(|w| d.weyl_dimension(w) <= cap));
    out
}

fn nu_of(p: &AdmissiblePair) -> Weight {
    standard_triples(p)[0].2.clone()
}

#[test]
fn parabolic_components_are_weight_filters() {
    for p in pairs() {
        for l in small_weights(&p, 60) {
            props::parabolic_characterization(&p, &l, BOUND).unwrap_or_else(|e| panic!("{} {l:?}: {e}", p.name()));
        }
    }
}

#[test]
fn transport_laws_hold() {
    for p in pairs() {
        let nu = nu_of(&p);
        let cap = if p.kind == PairKind::FII { 26 } else { 30 };
        for l in small_weights(&p, cap) {
            props::transport_laws(&p, &l, &nu, BOUND).unwrap_or_else(|e| panic!("{} {l:?}: {e}", p.name()));
        }
    }
}

#[test]
fn highest_weight_elements_and_top_global_vectors() {
    for p in pairs() {
        let nu = nu_of(&p);
        for l in small_weights(&p, 30) {
            for m in [p.datum.zero(), nu.clone()] {
                if p.datum.weyl_dimension(&l) * p.datum.weyl_dimension(&m) > 260 {
                    continue;
                }
                props::hw_elements(&p, &l, &m, BOUND).unwrap_or_else(|e| panic!("{} {l:?} {m:?}: {e}", p.name()));
                props::g_of_b_tensor_top(&p, &l, &m, BOUND).unwrap_or_else(|e| panic!("{} {l:?} {m:?}: {e}", p.name()));
            }
        }
    }
}

#[test]
fn triple_tensor_and_outer_basedness() {
    for p in pairs() {
        let nu = nu_of(&p);
        let z = p.datum.zero();
        let dv = p.datum.weyl_dimension(&p.varpi);
        for (l, m) in [(z.clone(), nu.clone()), (nu.clone(), z.clone())] {
            let size = dv * p.datum.weyl_dimension(&l) * p.datum.weyl_dimension(&m);
            if size > 400 {
                continue;
            }
            props::g_of_triple(&p, &p.varpi, &l, &m, BOUND).unwrap_or_else(|e| panic!("{} {l:?} {m:?}: {e}", p.name()));
            props::based_outer(&p, &p.varpi, &l, &m, BOUND).unwrap_or_else(|e| panic!("{} {l:?} {m:?}: {e}", p.name()));
        }
    }
}

/// Every swap of two highest weight images of equal weight in the identity
/// of a small tensor power breaks the lifting hypothesis.
#[test]
fn swapped_highest_weight_images_never_lift() {
    let cases: [(Series, usize, Vec<Weight>); 3] = [
        (Series::A, 1, vec![vec![1], vec![1], vec![1]]),
        (Series::A, 1, vec![vec![1], vec![1], vec![1], vec![1]]),
        (Series::A, 2, vec![vec![1, 0], vec![0, 1], vec![1, 0]]),
    ];
    let mut swaps = 0;
    for (s, n, ls) in cases {
        let d = Arc::new(build_datum(s, n).unwrap());
        let t = based_tensor_of(&d, &ls, BOUND).unwrap();
        let hws = t.crystal.hw_elements();
        for (a, &x) in hws.iter().enumerate() {
            for &y in &hws[a + 1..] {
                if t.crystal.weights[x] != t.crystal.weights[y] {
                    continue;
                }
                let mut hw: BTreeMap<usize, Option<usize>> = hws.iter().map(|&h| (h, Some(h))).collect();
                hw.insert(x, Some(y));
                hw.insert(y, Some(x));
                let phi = extend_from_hw(&t.crystal, &t.crystal, &hw).unwrap();
                match suff_cond_lift(&t, &t, &phi) {
                    Err(Error::HypothesisFailed { .. }) => swaps += 1,
                    other => panic!("{s}{n} swap {x} {y}: {:?}", other.map(|_| ())),
                }
            }
        }
    }
    assert!(swaps >= 4, "only {swaps} swaps exercised");
}

struct Corruptible {
    inst: Instance,
    src: IContext,
    tgt: IContext,
}

fn corruptible() -> &'static Vec<Corruptible> {
    static POOL: OnceLock<Vec<Corruptible>> = OnceLock::new();
    POOL.get_or_init(|| {
        [PairKind::AI, PairKind::AIII, PairKind::BII]
            .into_iter()
            .map(|k| {
                let pair = Arc::new(admissible_pair(k, k.min_rank()).unwrap());
                let (l, m, v) = standard_triples(&pair)[1].clone();
                let mut cache = IrrCache::default();
                let inst = build_pi_i(&pair, &l, &m, &v, &mut cache, BOUND).unwrap();
                let src = IContext::new(pair.clone(), inst.source.sub.clone(), &mut cache, BOUND).unwrap();
                let tgt = IContext::new(pair.clone(), inst.target.sub.clone(), &mut cache, BOUND).unwrap();
                Corruptible { inst, src, tgt }
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Rescaling `g_1` away from its top entry by any `c != 1` pushes some
    /// icanonical element off `B^i u {0}`, while `c = 1` reproduces the pass.
    #[test]
    fn corrupted_functional_is_caught(idx in 0usize..3, c in -3i64..4, e in -2i32..3) {
        let x = &corruptible()[idx];
        let scalar = RatFn::monomial(c, e);
        let bad = pi_with(&x.inst, &corrupt_functional(&x.inst.g, &scalar)).unwrap();
        let rep = x.inst.verify_with(&x.src, &x.tgt, &bad);
        let icb = rep.items.iter().find(|i| i.name == "icb-to-icb").unwrap();
        if c == 1 && e == 0 {
            prop_assert!(rep.pass(), "{:?}", rep.failures());
        } else {
            prop_assert!(icb.result.is_err(), "{} survives c = {}", x.inst.pair.name(), scalar);
        }
    }
}
