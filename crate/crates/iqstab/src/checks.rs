//! Registry of named verification checks and their JSON reports.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iqg::{IContext, IrrCache};
use crate::lemmas;
use crate::props;
use crate::rootdata::{admissible_pair, fmt_weight, AdmissiblePair, PairKind, Weight};
use crate::scalar::RatFn;
use crate::stability::{build_pi_i, corrupt_functional, pi_with, standard_triples};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub status: Status,
    pub params: BTreeMap<String, String>,
    pub witness: Option<String>,
    pub elapsed_ms: u64,
}

pub enum Outcome {
    Pass(String),
    Fail(String),
    Skipped(String),
}

type Runner = Box<dyn Fn(usize) -> Outcome + Send + Sync>;

pub struct Check {
    pub id: String,
    pub params: BTreeMap<String, String>,
    run: Runner,
}

impl Check {
    fn new(id: impl Into<String>, params: &[(&str, String)], run: impl Fn(usize) -> Outcome + Send + Sync + 'static) -> Check {
        Check { id: id.into(), params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(), run: Box::new(run) }
    }

    pub fn run(&self, bound: usize) -> CheckReport {
        let t = Instant::now();
        let out = (self.run)(bound);
        let (status, witness) = match out {
            Outcome::Pass(w) => (Status::Pass, (!w.is_empty()).then_some(w)),
            Outcome::Fail(w) => (Status::Fail, Some(w)),
            Outcome::Skipped(w) => (Status::Skipped, Some(w)),
        };
        CheckReport { check_id: self.id.clone(), status, params: self.params.clone(), witness, elapsed_ms: t.elapsed().as_millis() as u64 }
    }
}

fn from(r: std::result::Result<String, String>) -> Outcome {
    match r {
        Ok(w) => Outcome::Pass(w),
        Err(w) => Outcome::Fail(w),
    }
}

fn pair_params(kind: PairKind, n: usize) -> Vec<(&'static str, String)> {
    vec![("kind", kind.to_string()), ("n", n.to_string())]
}

fn pair_id(kind: PairKind, n: usize) -> String {
    if kind.is_parametric() {
        format!("{kind}:n={n}")
    } else {
        kind.to_string()
    }
}

/// Smallest fundamental weight usable as `nu` for the pair.
fn small_fundamental(pair: &AdmissiblePair) -> Option<Weight> {
    standard_triples(pair).into_iter().next().map(|(_, _, w)| w)
}

/// Runs one stability instance; size-bound overruns are skipped.
pub fn theorem_outcome(pair: &Arc<AdmissiblePair>, l: &[i32], m: &[i32], v: &[i32], bound: usize) -> Outcome {
    let mut cache = IrrCache::default();
    let inst = match build_pi_i(pair, l, m, v, &mut cache, bound) {
        Ok(i) => i,
        Err(Error::SizeBound { dim, bound }) => return Outcome::Skipped(format!("tensor of dimension {dim} exceeds size bound {bound}")),
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    match inst.verify(&mut cache, bound) {
        Ok(rep) if rep.pass() => {
            let hit = rep.crystal_map.iter().filter(|x| x.is_some()).count();
            Outcome::Pass(format!("dims {}->{}, {hit} icanonical elements survive", rep.source_dim, rep.target_dim))
        }
        Ok(rep) => Outcome::Fail(rep.failures().join("; ")),
        Err(Error::SizeBound { dim, bound }) => Outcome::Skipped(format!("module of dimension {dim} exceeds size bound {bound}")),
        Err(e) => Outcome::Fail(e.to_string()),
    }
}

/// Corrupting `g_m` must make some icanonical image leave `B^i u {0}`.
fn corrupt_g_outcome(pair: &Arc<AdmissiblePair>, l: &[i32], m: &[i32], v: &[i32], bound: usize) -> Outcome {
    let mut cache = IrrCache::default();
    let mut run = || -> Result<Outcome> {
        let inst = build_pi_i(pair, l, m, v, &mut cache, bound)?;
        let src = IContext::new(pair.clone(), inst.source.sub.clone(), &mut cache, bound)?;
        let tgt = IContext::new(pair.clone(), inst.target.sub.clone(), &mut cache, bound)?;
        let bad = pi_with(&inst, &corrupt_functional(&inst.g, &RatFn::from_int(2)))?;
        let rep = inst.verify_with(&src, &tgt, &bad);
        let a = rep.items.iter().find(|i| i.name == "icb-to-icb").map(|i| i.result.clone());
        Ok(match a {
            Some(Err(w)) => Outcome::Pass(format!("(a) fails as expected: {w}")),
            _ => Outcome::Fail("corrupted functional still maps icanonical elements to icanonical elements".into()),
        })
    };
    run().unwrap_or_else(|e| Outcome::Fail(e.to_string()))
}

/// Every registered check, in id order.
pub fn registry() -> Vec<Check> {
    let mut out: Vec<Check> = Vec::new();
    out.push(Check::new("lemma-calc-AII", &pair_params(PairKind::AII, 3), |b| from(lemmas::calc_aii(b))));
    for n in [2, 3] {
        out.push(Check::new(format!("lemma-calc-AIV:n={n}"), &pair_params(PairKind::AIV, n), move |b| from(lemmas::calc_aiv(n, b))));
        out.push(Check::new(format!("lemma-calc-BII:n={n}"), &pair_params(PairKind::BII, n), move |b| from(lemmas::calc_b1(PairKind::BII, n, b))));
    }
    out.push(Check::new("lemma-calc-DII:n=4", &pair_params(PairKind::DII, 4), |b| from(lemmas::calc_b1(PairKind::DII, 4, b))));
    for n in [3, 4] {
        out.push(Check::new(format!("lemma-calc-CII:n={n}"), &pair_params(PairKind::CII, n), move |b| from(lemmas::calc_cii(n, b))));
    }
    for kind in PairKind::ALL {
        for n in kind.test_ranks() {
            out.push(Check::new(format!("w0-{}", pair_id(kind, n)), &pair_params(kind, n), move |b| from(lemmas::w0_check(kind, n, b))));
        }
        let n = kind.min_rank();
        for m in [1, 2] {
            let mut p = pair_params(kind, n);
            p.push(("m", m.to_string()));
            out.push(Check::new(format!("g-{}:m={m}", pair_id(kind, n)), &p, move |b| from(lemmas::g_check(kind, n, m, b))));
        }
    }
    for (kind, n) in [(PairKind::AI, 1), (PairKind::AIII, 2), (PairKind::AIV, 2), (PairKind::AIV, 3)] {
        out.push(Check::new(format!("k-iso-{}", pair_id(kind, n)), &pair_params(kind, n), move |b| from(lemmas::k_iso_check(kind, n, b))));
    }
    for kind in PairKind::ALL {
        for n in kind.test_ranks() {
            let Ok(pair) = admissible_pair(kind, n) else { continue };
            let pair = Arc::new(pair);
            for (l, m, v) in standard_triples(&pair) {
                let id = format!("theorem-main:{}:lambda={},mu={},nu={}", pair.name(), fmt_weight(&l), fmt_weight(&m), fmt_weight(&v));
                let mut p = pair_params(kind, n);
                p.extend([("lambda", fmt_weight(&l)), ("mu", fmt_weight(&m)), ("nu", fmt_weight(&v))]);
                let pc = pair.clone();
                out.push(Check::new(id, &p, move |b| theorem_outcome(&pc, &l, &m, &v, b)));
            }
        }
    }
    for kind in PairKind::ALL {
        let n = kind.min_rank();
        let Ok(pair) = admissible_pair(kind, n) else { continue };
        let pair = Arc::new(pair);
        let Some(w) = small_fundamental(&pair) else { continue };
        let z = pair.datum.zero();
        let vp = pair.varpi.clone();
        let id = pair_id(kind, n);
        let p = pair_params(kind, n);
        let (pc, wc) = (pair.clone(), w.clone());
        out.push(Check::new(format!("prop-parabolic:{id}"), &p, move |b| from(props::parabolic_characterization(&pc, &wc, b))));
        let (pc, wc) = (pair.clone(), w.clone());
        out.push(Check::new(format!("prop-transport:{id}"), &p, move |b| from(props::transport_laws(&pc, &wc, &wc, b))));
        let (pc, wc) = (pair.clone(), w.clone());
        out.push(Check::new(format!("prop-hwe:{id}"), &p, move |b| from(props::hw_elements(&pc, &wc, &wc, b))));
        let (pc, wc) = (pair.clone(), w.clone());
        out.push(Check::new(format!("prop-g-b-mu:{id}"), &p, move |b| from(props::g_of_b_tensor_top(&pc, &wc, &wc, b))));
        let (pc, wc, zc, vc) = (pair.clone(), w.clone(), z.clone(), vp.clone());
        out.push(Check::new(format!("prop-g-triple:{id}"), &p, move |b| from(props::g_of_triple(&pc, &vc, &wc, &zc, b))));
        let (pc, wc, zc, vc) = (pair.clone(), w.clone(), z.clone(), vp.clone());
        out.push(Check::new(format!("prop-based-outer:{id}"), &p, move |b| from(props::based_outer(&pc, &vc, &wc, &zc, b))));
        let (l, m, v) = if kind == PairKind::FII { (z.clone(), z.clone(), w.clone()) } else { (w.clone(), z.clone(), w.clone()) };
        let pc = pair.clone();
        out.push(Check::new(format!("neg-corrupt-g1:{id}"), &p, move |b| corrupt_g_outcome(&pc, &l, &m, &v, b)));
    }
    out.push(Check::new("neg-corrupt-phi", &[], |b| from(props::corrupted_phi(b))));
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

/// Runs the checks whose ids match `selection` (a glob), sorted by id.
pub fn run_checks(selection: &str, parallel: usize, bound: usize) -> Result<Vec<CheckReport>> {
    let pat = glob::Pattern::new(selection).map_err(|e| Error::NoSuchCheck(format!("{selection}: {e}")))?;
    let chosen: Vec<Check> = registry().into_iter().filter(|c| pat.matches(&c.id)).collect();
    if chosen.is_empty() {
        return Err(Error::NoSuchCheck(selection.into()));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(parallel.max(1)).build().map_err(|e| Error::Internal(e.to_string()))?;
    let mut reports: Vec<CheckReport> = pool.install(|| chosen.par_iter().map(|c| c.run(bound)).collect());
    reports.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique() {
        let ids: Vec<String> = registry().into_iter().map(|c| c.id).collect();
        let set: std::collections::BTreeSet<&String> = ids.iter().collect();
        assert_eq!(set.len(), ids.len());
        assert_eq!(ids.iter().filter(|i| i.starts_with("theorem-main:")).count(), 31);
    }

    #[test]
    fn unknown_selection() {
        assert!(matches!(run_checks("nothing-*", 1, 100), Err(Error::NoSuchCheck(_))));
    }

    #[test]
    fn small_selection_runs() {
        let r = run_checks("lemma-calc-AIV:*", 2, crate::rep::DEFAULT_SIZE_BOUND).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| x.status == Status::Pass));
    }
}
