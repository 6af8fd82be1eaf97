//! Structural properties of parabolic components, transport and the
//! based submodules `V(w lambda, mu)`, each returning a witness.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::crystal::{extend_from_hw, parabolic, parabolic_by_weight, Transport};
use crate::error::Error;
use crate::gcb::{based_irreducible, based_tensor, based_tensor_of, suff_cond_lift};
use crate::linalg::SVec;
use crate::rootdata::{AdmissiblePair, Weight};
use crate::stability::PairModule;

type Check = std::result::Result<String, String>;

fn add(a: &[i32], b: &[i32]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

/// BFS component of `b_lambda` under `F_j`, `j` black, equals the weight
/// filter `{ b | wt b >= w_bullet lambda }`.
pub fn parabolic_characterization(pair: &AdmissiblePair, lambda: &[i32], bound: usize) -> Check {
    let datum = Arc::new(pair.datum.clone());
    let v = based_irreducible(&datum, lambda, bound).map_err(e)?;
    let mut bfs = v.crystal.parabolic_component(0, &pair.black);
    bfs.sort();
    let by_wt = parabolic_by_weight(&v.crystal, &datum, lambda, &pair.w_black);
    if bfs != by_wt {
        return Err(format!("BFS gives {} elements, weight filter {}", bfs.len(), by_wt.len()));
    }
    Ok(format!("{} elements", bfs.len()))
}

/// `pi . iota = id`, `iota(b_{w lambda}) = b_{w(lambda + tau nu)}`, the
/// weight shift by `w tau nu`, `phi_j` preserved and
/// `eps_j(iota b) = eps_j(b) + <h_j, nu>` for black `j`.
pub fn transport_laws(pair: &AdmissiblePair, lambda: &[i32], nu: &[i32], bound: usize) -> Check {
    let datum = Arc::new(pair.datum.clone());
    let tn = pair.tau_weight(nu);
    let v = based_irreducible(&datum, lambda, bound).map_err(e)?;
    let w = based_irreducible(&datum, &add(lambda, &tn), bound).map_err(e)?;
    let pc = parabolic(&v.crystal, 0, &pair.black).map_err(e)?;
    let pw = parabolic(&w.crystal, 0, &pair.black).map_err(e)?;
    let tr = Transport { src: &v.crystal, src_comp: &pc, tgt: &w.crystal, tgt_comp: &pw, black: pair.black.clone() };
    let shift = pair.theta_map(nu);
    if tr.iota(pc.lowest).map_err(e)? != pw.lowest {
        return Err("iota misses the lowest element".into());
    }
    for &b in &pc.elements {
        let c = tr.iota(b).map_err(e)?;
        if tr.pi(c).map_err(e)? != Some(b) {
            return Err(format!("pi(iota({})) != {}", v.label(b), v.label(b)));
        }
        if w.crystal.weights[c] != add(&v.crystal.weights[b], &shift) {
            return Err(format!("weight shift fails at {}", v.label(b)));
        }
        for &j in &pair.black {
            if w.crystal.phi[c][j] != v.crystal.phi[b][j] {
                return Err(format!("phi_{} changes at {}", j + 1, v.label(b)));
            }
            if w.crystal.eps[c][j] != v.crystal.eps[b][j] + datum.pairing(&unit_coweight(datum.rank, j), nu) {
                return Err(format!("eps_{} shift fails at {}", j + 1, v.label(b)));
            }
        }
    }
    Ok(format!("{} elements transported", pc.elements.len()))
}

fn unit_coweight(n: usize, j: usize) -> Vec<i32> {
    let mut h = vec![0; n];
    h[j] = 1;
    h
}

/// Highest weight elements of `B(w lambda, mu)` are `b (x) b_mu` with `b`
/// in the epsilon filter, at crystal and module level.
pub fn hw_elements(pair: &AdmissiblePair, lambda: &[i32], mu: &[i32], bound: usize) -> Check {
    let pm = PairModule::new(pair, lambda, mu, bound).map_err(e)?;
    let pred = pm.predicted_hw(mu);
    let act = pm.actual_hw();
    if pred != act {
        return Err(format!("predicted {pred:?}, found {act:?}"));
    }
    // module level: the hw vectors of the submodule sit exactly at these weights
    let hv = crate::gcb::hw_vectors(&pm.sub).map_err(e)?;
    let wts: BTreeSet<Weight> = hv.iter().map(|(h, _)| pm.sub.crystal.weights[*h].clone()).collect();
    let pw: BTreeSet<Weight> = pred.iter().map(|&a| pm.tensor.crystal.weights[a].clone()).collect();
    if wts != pw {
        return Err("highest weight vectors have the wrong weights".into());
    }
    Ok(format!("{} highest weight elements", act.len()))
}

/// `G(b' (x) b_mu) = G(b') (x) v_mu` for `b'` in `C_I(b_lambda)`.
pub fn g_of_b_tensor_top(pair: &AdmissiblePair, lambda: &[i32], mu: &[i32], bound: usize) -> Check {
    let pm = PairModule::new(pair, lambda, mu, bound).map_err(e)?;
    let d = pm.right.dim();
    for &b in &pm.comp.elements {
        let pure = pm.tensor.pure_vector(&[SVec::unit(b), SVec::unit(0)]);
        if pure != SVec::unit(b * d) {
            return Err(format!("G({}) (x) v_mu = {}", pm.left.label(b), pm.tensor.module.render(&pure)));
        }
    }
    Ok(format!("{} elements", pm.comp.elements.len()))
}

/// `G(b_nu (x) b' (x) b_mu) = v_nu (x) G(b') (x) v_mu` inside
/// `V(nu) (x) V(lambda) (x) V(mu)`.
pub fn g_of_triple(pair: &AdmissiblePair, nu: &[i32], lambda: &[i32], mu: &[i32], bound: usize) -> Check {
    let datum = Arc::new(pair.datum.clone());
    let t = based_tensor_of(&datum, &[nu.to_vec(), lambda.to_vec(), mu.to_vec()], bound).map_err(e)?;
    let (dl, dm) = (t.factors[1], t.factors[2]);
    let v = based_irreducible(&datum, lambda, bound).map_err(e)?;
    let pc = parabolic(&v.crystal, 0, &pair.black).map_err(e)?;
    for &b in &pc.elements {
        let pure = t.pure_vector(&[SVec::unit(0), SVec::unit(b), SVec::unit(0)]);
        if pure != SVec::unit(b * dm) {
            return Err(format!("v_nu (x) G({}) (x) v_mu = {}", v.label(b), t.module.render(&pure)));
        }
    }
    let _ = dl;
    Ok(format!("{} elements", pc.elements.len()))
}

/// `V(nu) (x) V(w lambda, mu)` is spanned by global basis vectors of
/// `V(nu) (x) V(lambda) (x) V(mu)`.
pub fn based_outer(pair: &AdmissiblePair, nu: &[i32], lambda: &[i32], mu: &[i32], bound: usize) -> Check {
    let datum = Arc::new(pair.datum.clone());
    let pm = PairModule::new(pair, lambda, mu, bound).map_err(e)?;
    let first = based_irreducible(&datum, nu, bound).map_err(e)?;
    let t = based_tensor(&based_tensor(&first, &pm.left).map_err(e)?, &pm.right).map_err(e)?;
    let block = pm.left.dim() * pm.right.dim();
    let mut support = BTreeSet::new();
    let mut count = 0;
    for a in 0..first.dim() {
        for &k in &pm.sub.ambient {
            let inner = pm.tensor.to_pure.apply(&SVec::unit(k));
            let mut pure = SVec::new();
            for (p, x) in first.to_pure.apply(&SVec::unit(a)).iter() {
                pure.axpy(x, &inner.reindex(|r| p * block + r));
            }
            let g = t.from_pure.apply(&pure);
            support.extend(g.iter().map(|(r, _)| r));
            count += 1;
        }
    }
    if support.len() != count {
        return Err(format!("subspace of dimension {count} meets {} global vectors", support.len()));
    }
    Ok(format!("dimension {count}"))
}

/// Swapping the images of two highest weight elements of equal weight in
/// the identity morphism of `V(w1)^(x)3` (type A1) must break the lifting
/// hypothesis.
pub fn corrupted_phi(bound: usize) -> Check {
    let datum = Arc::new(crate::rootdata::build_datum(crate::rootdata::Series::A, 1).map_err(e)?);
    let t = based_tensor_of(&datum, &[vec![1], vec![1], vec![1]], bound).map_err(e)?;
    let hws = t.crystal.hw_elements();
    let mut by_wt: BTreeMap<&Weight, Vec<usize>> = BTreeMap::new();
    for &h in &hws {
        by_wt.entry(&t.crystal.weights[h]).or_default().push(h);
    }
    let pair = by_wt.values().find(|v| v.len() >= 2).ok_or("no repeated highest weight")?;
    let (x, y) = (pair[0], pair[1]);
    let mut hw: BTreeMap<usize, Option<usize>> = hws.iter().map(|&h| (h, Some(h))).collect();
    hw.insert(x, Some(y));
    hw.insert(y, Some(x));
    let phi = extend_from_hw(&t.crystal, &t.crystal, &hw).map_err(e)?;
    match suff_cond_lift(&t, &t, &phi) {
        Err(Error::HypothesisFailed { i, b }) => Ok(format!("HypothesisFailed at i={i}, b={b}")),
        Err(other) => Err(format!("expected HypothesisFailed, got {other}")),
        Ok(_) => Err("corrupted morphism lifted".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::DEFAULT_SIZE_BOUND as B;
    use crate::rootdata::{admissible_pair, PairKind};

    #[test]
    fn properties_small() {
        for (kind, n) in [(PairKind::AII, 3), (PairKind::BII, 2), (PairKind::AIV, 3)] {
            let p = admissible_pair(kind, n).unwrap();
            let w = p.datum.fundamental(0);
            let z = p.datum.zero();
            parabolic_characterization(&p, &w, B).unwrap();
            transport_laws(&p, &w, &w, B).unwrap();
            hw_elements(&p, &w, &w, B).unwrap();
            g_of_b_tensor_top(&p, &w, &w, B).unwrap();
            g_of_triple(&p, &p.varpi, &w, &z, B).unwrap();
            based_outer(&p, &p.varpi, &w, &z, B).unwrap();
        }
    }

    #[test]
    fn corrupted_phi_is_caught() {
        corrupted_phi(B).unwrap();
    }
}
