//! The projections `pi^i: V(w(lambda + tau nu), mu + nu) -> V(w lambda, mu)`
//! and the check that they carry icanonical bases to icanonical bases.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::Zero;

use crate::crystal::{check_strict, extend_from_hw, parabolic, CrystalMap, ParabolicComponent, Transport};
use crate::error::{Error, Result};
use crate::gcb::{based_irreducible, based_tensor, submodule_generated, suff_cond_lift, Based};
use crate::iqg::{g_m, is_based_ihom, is_ui_linear, IContext, IrrCache};
use crate::linalg::{SVec, SpMat};
use crate::rootdata::{fmt_weight, AdmissiblePair, Weight};

fn add(a: &[i32], b: &[i32]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `V(lambda) (x) V(mu)` with the parabolic data of `B(lambda)` and the
/// based submodule `V(w lambda, mu)` generated by `G(b_{w lambda} (x) b_mu)`.
pub struct PairModule {
    pub left: Based,
    pub right: Based,
    pub comp: ParabolicComponent,
    pub tensor: Based,
    pub sub: Based,
    /// Position of `b_{w lambda} (x) b_mu` in `sub`.
    pub generator: usize,
}

impl PairModule {
    pub fn new(pair: &AdmissiblePair, lambda: &[i32], mu: &[i32], bound: usize) -> Result<PairModule> {
        let datum = Arc::new(pair.datum.clone());
        let left = based_irreducible(&datum, lambda, bound)?;
        let right = based_irreducible(&datum, mu, bound)?;
        let comp = parabolic(&left.crystal, 0, &pair.black)?;
        let tensor = based_tensor(&left, &right)?;
        let gen = comp.lowest * right.dim();
        let sub = submodule_generated(&tensor, &SVec::unit(gen))?;
        let generator = sub.ambient.iter().position(|&a| a == gen).ok_or_else(|| Error::Internal("generator missing from its span".into()))?;
        Ok(PairModule { left, right, comp, tensor, sub, generator })
    }

    /// Highest weight elements of `B(w lambda, mu)` predicted by the
    /// epsilon filter: `b (x) b_mu` for `b` in `C_{I;mu}(b_lambda)`.
    pub fn predicted_hw(&self, mu: &[i32]) -> BTreeSet<usize> {
        let d = self.right.dim();
        self.left.crystal.epsilon_filter(&self.comp.elements, mu).into_iter().map(|b| b * d).collect()
    }

    pub fn actual_hw(&self) -> BTreeSet<usize> {
        self.sub.crystal.hw_elements().into_iter().map(|h| self.sub.ambient[h]).collect()
    }
}

pub struct Instance {
    pub pair: Arc<AdmissiblePair>,
    pub lambda: Weight,
    pub mu: Weight,
    pub nu: Weight,
    pub m: usize,
    pub source: PairModule,
    pub target: PairModule,
    /// `V(m varpi) (x) V(lambda) (x) V(mu)`, nested from the left.
    pub triple: Based,
    pub phi: CrystalMap,
    /// `f` from `source.sub` into `triple`, global coordinates.
    pub f: SpMat,
    pub g: SpMat,
    /// `pi^i` from `source.sub` to `target.sub`, global coordinates.
    pub pi_i: SpMat,
}

/// Dimensions of the source tensor and the triple tensor.
pub fn instance_dims(pair: &AdmissiblePair, lambda: &[i32], mu: &[i32], nu: &[i32]) -> Result<(usize, usize)> {
    let dat = &pair.datum;
    for w in [lambda, mu, nu] {
        dat.check_dominant(w)?;
    }
    let m = pair.theta_weight(nu)?;
    let mv: Weight = pair.varpi.iter().map(|x| x * m as i32).collect();
    let l2 = add(lambda, &pair.tau_weight(nu));
    let m2 = add(mu, nu);
    let src = dat.weyl_dimension(&l2) * dat.weyl_dimension(&m2);
    let tri = dat.weyl_dimension(&mv) * dat.weyl_dimension(lambda) * dat.weyl_dimension(mu);
    Ok((src as usize, tri as usize))
}

/// The strict morphism `b (x) b_{mu+nu} -> b_{m varpi} (x) pi(b) (x) b_mu`
/// on highest weight elements, extended along lowering arrows.
pub fn stability_morphism(pair: &AdmissiblePair, source: &PairModule, target: &PairModule, triple: &Based) -> Result<CrystalMap> {
    let tr = Transport { src: &target.left.crystal, src_comp: &target.comp, tgt: &source.left.crystal, tgt_comp: &source.comp, black: pair.black.clone() };
    let ds = source.right.dim();
    let dmu = target.right.dim();
    let mut hw = BTreeMap::new();
    for h in source.sub.crystal.hw_elements() {
        let a = source.sub.ambient[h];
        if a % ds != 0 {
            return Err(Error::Internal(format!("highest weight element {} is not of the form b (x) b_mu", source.sub.label(h))));
        }
        let img = tr.pi(a / ds)?.map(|c| c * dmu);
        if let Some(t) = img {
            if triple.crystal.weights[t] != source.sub.crystal.weights[h] {
                return Err(Error::Internal(format!("phi changes the weight of {}", source.sub.label(h))));
            }
        }
        hw.insert(h, img);
    }
    let mut seen = BTreeSet::new();
    for t in hw.values().flatten() {
        if !seen.insert(*t) {
            return Err(Error::Internal(format!("phi is not injective on highest weight elements at {}", triple.label(*t))));
        }
    }
    let phi = extend_from_hw(&source.sub.crystal, &triple.crystal, &hw)?;
    check_strict(&source.sub.crystal, &triple.crystal, &phi).map_err(Error::Internal)?;
    Ok(phi)
}

/// `(g (x) id (x) id)` from the triple into `V(lambda) (x) V(mu)`,
/// landing in `target.sub`.
fn contract(triple: &Based, target: &PairModule, g: &SpMat, f: &SpMat) -> Result<SpMat> {
    let block = target.left.dim() * target.right.dim();
    let pos: BTreeMap<usize, usize> = target.sub.ambient.iter().enumerate().map(|(k, &a)| (a, k)).collect();
    let mut cols = Vec::with_capacity(f.ncols());
    for col in &f.cols {
        let pure = triple.to_pure.apply(col);
        let mut acc = SVec::new();
        for (p, x) in pure.iter() {
            let c = g.get(0, p / block);
            if !c.is_zero() {
                acc.add_term(p % block, &(x * &c));
            }
        }
        let glob = target.tensor.from_pure.apply(&acc);
        let mut out = SVec::new();
        for (k, x) in glob.iter() {
            let j = pos.get(&k).ok_or_else(|| Error::Internal(format!("image leaves V(w lambda, mu) at {}", target.tensor.label(k))))?;
            out.add_term(*j, x);
        }
        cols.push(out);
    }
    Ok(SpMat { nrows: target.sub.dim(), cols })
}

/// `f = suff_cond_lift(phi)` with its top-vector normalization.
pub fn build_f(pair: &Arc<AdmissiblePair>, lambda: &[i32], mu: &[i32], nu: &[i32], bound: usize) -> Result<(PairModule, PairModule, Based, CrystalMap, SpMat, usize)> {
    let (src_dim, tri_dim) = instance_dims(pair, lambda, mu, nu)?;
    for dim in [src_dim, tri_dim] {
        if dim > bound {
            return Err(Error::SizeBound { dim, bound });
        }
    }
    let m = pair.theta_weight(nu)?;
    let mv: Weight = pair.varpi.iter().map(|x| x * m as i32).collect();
    let source = PairModule::new(pair, &add(lambda, &pair.tau_weight(nu)), &add(mu, nu), bound)?;
    let target = PairModule::new(pair, lambda, mu, bound)?;
    let datum = Arc::new(pair.datum.clone());
    let first = based_irreducible(&datum, &mv, bound)?;
    let triple = based_tensor(&based_tensor(&first, &target.left)?, &target.right)?;
    let phi = stability_morphism(pair, &source, &target, &triple)?;
    let f = suff_cond_lift(&source.sub, &triple, &phi)?;
    let want = triple.pure_vector(&[SVec::unit(0), SVec::unit(target.comp.lowest), SVec::unit(0)]);
    if f.cols[source.generator] != want {
        return Err(Error::Internal("f misses the top vector normalization".into()));
    }
    Ok((source, target, triple, phi, f, m))
}

/// `pi^i = (g_m (x) id) f`.
pub fn build_pi_i(pair: &Arc<AdmissiblePair>, lambda: &[i32], mu: &[i32], nu: &[i32], cache: &mut IrrCache, bound: usize) -> Result<Instance> {
    let (source, target, triple, phi, f, m) = build_f(pair, lambda, mu, nu, bound)?;
    let (g, _) = g_m(pair, m, cache, bound)?;
    let pi_i = contract(&triple, &target, &g, &f)?;
    Ok(Instance { pair: pair.clone(), lambda: lambda.to_vec(), mu: mu.to_vec(), nu: nu.to_vec(), m, source, target, triple, phi, f, g, pi_i })
}

/// Outcome of one named property of an instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Item {
    pub name: &'static str,
    pub result: std::result::Result<(), String>,
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub items: Vec<Item>,
    /// Induced map on icanonical basis elements.
    pub crystal_map: CrystalMap,
    pub source_dim: usize,
    pub target_dim: usize,
}

impl TheoremReport {
    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.result.is_ok())
    }

    pub fn failures(&self) -> Vec<String> {
        self.items.iter().filter_map(|i| i.result.as_ref().err().map(|w| format!("{}: {w}", i.name))).collect()
    }
}

fn item(name: &'static str, ok: bool, witness: impl FnOnce() -> String) -> Item {
    Item { name, result: if ok { Ok(()) } else { Err(witness()) } }
}

impl Instance {
    pub fn key(&self) -> String {
        format!("{}:lambda={},mu={},nu={}", self.pair.name(), fmt_weight(&self.lambda), fmt_weight(&self.mu), fmt_weight(&self.nu))
    }

    /// Checks (a) icanonical elements go to icanonical elements or zero,
    /// (b) the kernel is spanned by the icanonical elements it contains,
    /// (c) the normalization, plus hw elements and `U^i`-linearity.
    pub fn verify(&self, cache: &mut IrrCache, bound: usize) -> Result<TheoremReport> {
        let src = IContext::new(self.pair.clone(), self.source.sub.clone(), cache, bound)?;
        let tgt = IContext::new(self.pair.clone(), self.target.sub.clone(), cache, bound)?;
        Ok(self.verify_with(&src, &tgt, &self.pi_i))
    }

    pub fn verify_with(&self, src: &IContext, tgt: &IContext, pi: &SpMat) -> TheoremReport {
        let mut items = Vec::new();
        let mu2 = add(&self.mu, &self.nu);
        let (pred, act) = (self.source.predicted_hw(&mu2), self.source.actual_hw());
        items.push(item("hw-elements", pred == act, || format!("predicted {} highest weight elements, found {}", pred.len(), act.len())));
        let pred_t = self.target.predicted_hw(&self.mu);
        let act_t = self.target.actual_hw();
        items.push(item("hw-elements-target", pred_t == act_t, || format!("predicted {} highest weight elements, found {}", pred_t.len(), act_t.len())));
        let norm = pi.cols[self.source.generator] == SVec::unit(self.target.generator);
        items.push(item("normalization", norm, || format!("pi(top) = {}", self.target.sub.module.render(&pi.cols[self.source.generator]))));
        let lin = is_ui_linear(src, tgt, pi);
        items.push(Item { name: "ui-linear", result: lin });
        let fi = tgt.icb_inv.compose(pi).compose(&src.icb);
        let mut cmap: CrystalMap = vec![None; fi.ncols()];
        let mut a_fail = None;
        for (b, col) in fi.cols.iter().enumerate() {
            let terms: Vec<(usize, &crate::scalar::RatFn)> = col.iter().collect();
            match terms.as_slice() {
                [] => {}
                [(r, x)] if x.is_one() => cmap[b] = Some(*r),
                _ => {
                    if a_fail.is_none() {
                        a_fail = Some(format!("pi(G^i({})) = {}", src.label(b), tgt.module().render(col)));
                    }
                }
            }
        }
        items.push(Item { name: "icb-to-icb", result: a_fail.clone().map_or(Ok(()), Err) });
        let zeros = fi.cols.iter().filter(|c| c.is_zero()).count();
        let rank = if a_fail.is_none() {
            cmap.iter().flatten().collect::<BTreeSet<_>>().len()
        } else {
            fi.block(&(0..fi.nrows).collect::<Vec<_>>(), &(0..fi.ncols()).collect::<Vec<_>>()).rank()
        };
        let kernel = fi.ncols() - rank;
        items.push(item("kernel-spanned", kernel == zeros, || format!("kernel has dimension {kernel}, {zeros} icanonical elements vanish")));
        let rep = is_based_ihom(src, tgt, pi);
        items.push(item("based-ihom", rep.pass(), || rep.failures().join("; ")));
        TheoremReport { items, crystal_map: cmap, source_dim: src.dim(), target_dim: tgt.dim() }
    }
}

/// The standard triples `(0,0,w)`, `(w,0,w)`, `(0,w,w)` for the smallest
/// fundamental weight `w` with `w + w_bullet tau w` a multiple of `varpi`.
pub fn standard_triples(pair: &AdmissiblePair) -> Vec<(Weight, Weight, Weight)> {
    let dat = &pair.datum;
    let z = dat.zero();
    let Some(w) = (0..pair.rank())
        .map(|i| dat.fundamental(i))
        .filter(|w| pair.theta_weight(w).is_ok())
        .min_by_key(|w| (dat.weyl_dimension(w), w.clone()))
    else {
        return vec![];
    };
    if pair.kind == crate::rootdata::PairKind::FII {
        return vec![(z.clone(), z, w)];
    }
    vec![(z.clone(), z.clone(), w.clone()), (w.clone(), z.clone(), w.clone()), (z, w.clone(), w)]
}

/// A functional agreeing with `g` at the top but rescaled elsewhere; used
/// as a negative control.
pub fn corrupt_functional(g: &SpMat, c: &crate::scalar::RatFn) -> SpMat {
    let mut out = g.clone();
    for k in 1..out.ncols() {
        out.cols[k] = out.cols[k].scale(c);
    }
    out
}

/// `pi^i` built from an arbitrary functional in place of `g_m`.
pub fn pi_with(inst: &Instance, g: &SpMat) -> Result<SpMat> {
    contract(&inst.triple, &inst.target, g, &inst.f)
}
