//! The coideal subalgebra side: `B_i` actions, the ibar involution
//! `psi^i = Upsilon . psi`, icanonical bases, invariant vectors and the
//! functionals `g_m`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::braid::t_w_matrices;
use crate::error::{Error, Result};
use crate::gcb::{apply_f_word, based_criterion, based_irreducible, based_tensor, block_inverse, chi, f_word_basis, hw_vector, kl_solve, span_map, Based, HomReport};
use crate::linalg::{Mat, SVec, SpMat};
use crate::rep::Module;
use crate::rootdata::{fmt_weight, AdmissiblePair, Weight};
use crate::scalar::RatFn;

/// `B_i` for every node, as matrices on `m`.
pub fn b_matrices(pair: &AdmissiblePair, m: &Module) -> Vec<SpMat> {
    let n = pair.rank();
    let white = pair.white();
    let (t, tinv) = if white.is_empty() { (SpMat::identity(m.dim()), SpMat::identity(m.dim())) } else { t_w_matrices(m, &pair.w_black) };
    (0..n)
        .map(|i| match &pair.varsigma[i] {
            None => m.f[i].clone(),
            Some(s) => {
                let corr = t.compose(&m.e[pair.tau[i]]).compose(&tinv).compose(&m.ki_matrix(i, -1)).scale(s);
                m.f[i].add(&corr)
            }
        })
        .collect()
}

/// Matrix of `K_h` on `m`.
pub fn k_matrix(m: &Module, h: &[i32]) -> SpMat {
    SpMat { nrows: m.dim(), cols: (0..m.dim()).map(|k| m.act_k(h, &SVec::unit(k))).collect() }
}

/// `Upsilon` on an irreducible in its global basis.  Since `U^i v_lambda`
/// is all of `V(lambda)` with `B`-words lifting `F`-words plus higher
/// weight terms, `psi^i(B_w v_lambda) = B_w v_lambda` pins down
/// `Upsilon bar(P) = P` for the matrix `P` of `B`-word vectors, solved one
/// weight at a time from the top.
pub fn upsilon_irreducible(v: &Based, bm: &[SpMat]) -> Result<SpMat> {
    let m = &v.module;
    let dim = m.dim();
    let words = f_word_basis(m, &SVec::unit(0));
    if words.len() != dim {
        return Err(Error::Internal("F-words do not span the irreducible".into()));
    }
    let mut by_wt: BTreeMap<Weight, Vec<usize>> = BTreeMap::new();
    let mut pcols = Vec::with_capacity(dim);
    for (k, (word, fv)) in words.iter().enumerate() {
        let mut pv = SVec::unit(0);
        for &i in word {
            pv = bm[i].apply(&pv);
        }
        by_wt.entry(m.weight_of(fv).unwrap()).or_default().push(k);
        pcols.push(pv);
    }
    let mut ups: Vec<Option<SVec>> = vec![None; dim];
    for nu in m.weights_by_height() {
        let rows = m.block(&nu).to_vec();
        let ks = &by_wt[&nu];
        let fm = SpMat { nrows: dim, cols: ks.iter().map(|&k| words[k].1.clone()).collect() }.block(&rows, &(0..ks.len()).collect::<Vec<_>>());
        // Upsilon on this block times bar(F-words) equals the corrected rhs
        let inv = fm.inverse().ok_or_else(|| Error::Internal("singular F-word block".into()))?;
        let inv = Mat::from_rows((0..ks.len()).map(|r| (0..ks.len()).map(|c| inv.get(r, c).bar()).collect()).collect());
        let mut rhs = Vec::with_capacity(ks.len());
        for &k in ks {
            let mut r = pcols[k].clone();
            for (j, x) in pcols[k].iter() {
                if m.weights[j] == nu {
                    continue;
                }
                let uj = ups[j].as_ref().ok_or_else(|| Error::TriangularityFailure(format!("B-word reaches unsolved weight {}", fmt_weight(&m.weights[j]))))?;
                r.axpy(&-x.bar(), uj);
            }
            rhs.push(r);
        }
        for (a, &row) in rows.iter().enumerate() {
            let mut col = SVec::new();
            for (kk, r) in rhs.iter().enumerate() {
                let c = inv.get(kk, a);
                if !c.is_zero() {
                    col.axpy(c, r);
                }
            }
            ups[row] = Some(col);
        }
    }
    Ok(SpMat { nrows: dim, cols: ups.into_iter().map(|x| x.unwrap()).collect() })
}

/// Irreducibles with their `Upsilon`, shared between modules.
#[derive(Default)]
pub struct IrrCache {
    map: BTreeMap<Weight, (Based, SpMat)>,
}

impl IrrCache {
    pub fn get(&mut self, pair: &AdmissiblePair, datum: &Arc<crate::rootdata::RootDatum>, lambda: &[i32], bound: usize) -> Result<&(Based, SpMat)> {
        if !self.map.contains_key(lambda) {
            let v = based_irreducible(datum, lambda, bound)?;
            let bm = b_matrices(pair, &v.module);
            let u = upsilon_irreducible(&v, &bm)?;
            self.map.insert(lambda.to_vec(), (v, u));
        }
        Ok(&self.map[lambda])
    }
}

/// `Upsilon` on a based module through its isotypic decomposition: with
/// `Phi: (+) V(lambda_k) -> M` a `U`-isomorphism, `Upsilon_M = Phi Upsilon Phi^-1`.
pub fn upsilon_transport(pair: &AdmissiblePair, m: &Based, cache: &mut IrrCache, bound: usize) -> Result<SpMat> {
    let dim = m.dim();
    let mut phi_cols: Vec<SVec> = Vec::with_capacity(dim);
    let mut ups_cols: Vec<SVec> = Vec::with_capacity(dim);
    let mut col_wts: Vec<Weight> = Vec::with_capacity(dim);
    for h in m.crystal.hw_elements() {
        let lambda = m.crystal.weights[h].clone();
        let vh = hw_vector(&m.module, &SVec::unit(h))?;
        let (v, uv) = cache.get(pair, m.datum(), &lambda, bound)?;
        let words = f_word_basis(&v.module, &SVec::unit(0));
        let src: Vec<SVec> = words.iter().map(|(_, x)| x.clone()).collect();
        let img: Vec<SVec> = words.iter().map(|(w, _)| apply_f_word(&m.module, w, &vh)).collect();
        let phi = span_map(&v.module, dim, &src, &img)?;
        let pu = phi.compose(uv);
        phi_cols.extend(phi.cols);
        ups_cols.extend(pu.cols);
        col_wts.extend(v.module.weights.iter().cloned());
    }
    if phi_cols.len() != dim {
        return Err(Error::Internal(format!("isotypic components have total dimension {}, expected {dim}", phi_cols.len())));
    }
    let phi = SpMat { nrows: dim, cols: phi_cols };
    let phi_inv = block_inverse(&m.module, &phi, &col_wts)?;
    Ok(SpMat { nrows: dim, cols: ups_cols }.compose(&phi_inv))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IbarPath {
    /// Weight-by-weight solve from `B`-word vectors on an irreducible.
    BWords,
    /// Isotypic transport from the irreducible constituents.
    Transport,
    /// The trivial module.
    Trivial,
}

impl std::fmt::Display for IbarPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IbarPath::BWords => "b-words",
            IbarPath::Transport => "transport",
            IbarPath::Trivial => "trivial",
        })
    }
}

/// A based module with its coideal structure, ibar involution and
/// icanonical basis.  `psi^i(v) = upsilon . bar(v)` in global coordinates.
#[derive(Clone, Debug)]
pub struct IContext {
    pub pair: Arc<AdmissiblePair>,
    pub based: Based,
    pub bmats: Vec<SpMat>,
    pub upsilon: SpMat,
    /// Columns are `G^i(b)` in global coordinates.
    pub icb: SpMat,
    pub icb_inv: SpMat,
    pub path: IbarPath,
}

/// Order used for triangular solves: height of weight, highest first.
fn height_order(m: &Module) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..m.dim()).collect();
    idx.sort_by_key(|&k| (-m.datum.height(&m.weights[k]), k));
    idx
}

fn unitriangular_inverse(p: &SpMat, order: &[usize]) -> SpMat {
    let mut inv: Vec<SVec> = vec![SVec::new(); p.ncols()];
    for &b in order {
        let mut x = SVec::unit(b);
        for (l, c) in p.cols[b].iter() {
            if l != b {
                x.axpy(&-c.clone(), &inv[l]);
            }
        }
        inv[b] = x;
    }
    SpMat { nrows: p.nrows, cols: inv }
}

impl IContext {
    pub fn new(pair: Arc<AdmissiblePair>, based: Based, cache: &mut IrrCache, bound: usize) -> Result<IContext> {
        let bmats = b_matrices(&pair, &based.module);
        let irreducible = based.lambda.is_some() && based.crystal.hw_elements() == vec![0];
        let (upsilon, path) = if based.dim() == 1 && based.module.weights[0].iter().all(|&x| x == 0) {
            (SpMat::identity(1), IbarPath::Trivial)
        } else if irreducible {
            (upsilon_irreducible(&based, &bmats)?, IbarPath::BWords)
        } else {
            (upsilon_transport(&pair, &based, cache, bound)?, IbarPath::Transport)
        };
        Self::assemble(pair, based, bmats, upsilon, path)
    }

    pub fn assemble(pair: Arc<AdmissiblePair>, based: Based, bmats: Vec<SpMat>, upsilon: SpMat, path: IbarPath) -> Result<IContext> {
        let order = height_order(&based.module);
        let icb = kl_solve(&upsilon, &[order.clone()])?;
        let icb_inv = unitriangular_inverse(&icb, &order);
        Ok(IContext { pair, based, bmats, upsilon, icb, icb_inv, path })
    }

    pub fn trivial(pair: Arc<AdmissiblePair>) -> IContext {
        let datum = Arc::new(pair.datum.clone());
        let based = Based::trivial(datum);
        let n = pair.rank();
        IContext {
            pair,
            based,
            bmats: vec![SpMat::zeros(1, 1); n],
            upsilon: SpMat::identity(1),
            icb: SpMat::identity(1),
            icb_inv: SpMat::identity(1),
            path: IbarPath::Trivial,
        }
    }

    pub fn dim(&self) -> usize {
        self.based.dim()
    }

    pub fn module(&self) -> &Module {
        &self.based.module
    }

    /// `psi^i(v)`.
    pub fn ibar(&self, v: &SVec) -> SVec {
        self.upsilon.apply(&v.bar())
    }

    /// Generators of `U^i` other than `K_h`: `E_j` (black) and every `B_i`.
    pub fn generators(&self) -> Vec<(String, SpMat)> {
        let mut out = Vec::new();
        for &j in &self.pair.black {
            out.push((format!("E{}", j + 1), self.module().e[j].clone()));
        }
        for (i, b) in self.bmats.iter().enumerate() {
            out.push((format!("B{}", i + 1), b.clone()));
        }
        out
    }

    pub fn k_generators(&self) -> Vec<(String, SpMat)> {
        self.pair.y_imath_basis().into_iter().map(|h| (format!("K{}", fmt_weight(&h)), k_matrix(self.module(), &h))).collect()
    }

    /// Checks `Upsilon` in `A`, `Upsilon bar(Upsilon) = 1`, and the
    /// intertwining identities; returns the first failure.
    pub fn check_ibar(&self) -> std::result::Result<(), String> {
        let u = &self.upsilon;
        if !u.all_in_a() {
            return Err("Upsilon has entries outside A".into());
        }
        if u.compose(&u.bar()) != SpMat::identity(self.dim()) {
            return Err("psi^i is not an involution".into());
        }
        for (name, x) in self.generators() {
            if u.compose(&x.bar()) != x.compose(u) {
                return Err(format!("psi^i does not intertwine {name}"));
            }
        }
        for (name, k) in self.k_generators() {
            if u.compose(&k) != k.compose(u) {
                return Err(format!("psi^i does not intertwine {name}"));
            }
        }
        Ok(())
    }

    /// `G^i(b)` congruent to `G(b)` mod `q^-1 L`, in `A`, and ibar fixed.
    pub fn check_icb(&self) -> std::result::Result<(), String> {
        for b in 0..self.dim() {
            let g = &self.icb.cols[b];
            for (r, x) in g.iter() {
                if r == b {
                    if !x.is_one() {
                        return Err(format!("G^i({}) has diagonal {x}", self.based.label(b)));
                    }
                } else if !(x.is_in_a() && x.is_in_qinv_ainf()) {
                    return Err(format!("G^i({}) has coefficient {x}", self.based.label(b)));
                }
            }
            if &self.ibar(g) != g {
                return Err(format!("G^i({}) is not ibar fixed", self.based.label(b)));
            }
        }
        Ok(())
    }

    pub fn label(&self, b: usize) -> &str {
        self.based.label(b)
    }
}

/// Checks that `f` (global coordinates) intertwines the `U^i` generators.
pub fn is_ui_linear(src: &IContext, tgt: &IContext, f: &SpMat) -> std::result::Result<(), String> {
    for ((name, x), (_, y)) in src.generators().iter().zip(tgt.generators()) {
        if f.compose(x) != y.compose(f) {
            return Err(format!("map does not intertwine {name}"));
        }
    }
    for ((name, x), (_, y)) in src.k_generators().iter().zip(tgt.k_generators()) {
        if f.compose(x) != y.compose(f) {
            return Err(format!("map does not intertwine {name}"));
        }
    }
    Ok(())
}

/// The four-bullet criterion in icanonical coordinates.
pub fn is_based_ihom(src: &IContext, tgt: &IContext, f: &SpMat) -> HomReport {
    let fi = tgt.icb_inv.compose(f).compose(&src.icb);
    let src_labels = src.based.crystal.labels.clone();
    let tgt_labels = tgt.based.crystal.labels.clone();
    // commuting with the ibar involutions is entrywise bar invariance in
    // icanonical coordinates
    based_criterion(&fi, &src_labels, &tgt_labels, &|b| {
        for (r, x) in fi.cols[b].iter() {
            if !x.is_bar_invariant() {
                return Err(format!("f(G^i({})) has coefficient {x} at G^i({})", src_labels[b], tgt_labels[r]));
            }
        }
        Ok(())
    })
}

/// The `U^i`-invariant line in `ctx`, normalized at the highest weight
/// vector: `E_j w = 0` (black), `B_i w = 0`, `K_h w = w`.
pub fn trivial_submodule(ctx: &IContext) -> Result<SVec> {
    let m = ctx.module();
    let ys = ctx.pair.y_imath_basis();
    let cols: Vec<usize> = (0..m.dim()).filter(|&k| ys.iter().all(|h| m.datum.pairing(h, &m.weights[k]) == 0)).collect();
    let mut rows: Vec<Vec<RatFn>> = Vec::new();
    for (_, x) in ctx.generators() {
        for r in 0..m.dim() {
            let row: Vec<RatFn> = cols.iter().map(|&c| x.get(r, c)).collect();
            if row.iter().any(|v| !v.is_zero()) {
                rows.push(row);
            }
        }
    }
    let ns = if rows.is_empty() { (0..cols.len()).map(|k| (0..cols.len()).map(|j| if j == k { RatFn::one() } else { RatFn::zero() }).collect()).collect() } else { Mat::from_rows(rows).nullspace() };
    if ns.len() != 1 {
        return Err(Error::WrongDimension(ns.len()));
    }
    let mut w = SVec::new();
    for (k, &c) in cols.iter().enumerate() {
        w.add_term(c, &ns[0][k]);
    }
    let top = w.get(0);
    if top.is_zero() {
        return Err(Error::Internal("invariant vector has no highest weight component".into()));
    }
    Ok(w.scale(&top.inv()))
}

/// `g_1`: the invariant functional on `V(varpi)` vanishing on the
/// orthogonal complement of `w_0`, with `g_1(v_varpi) = 1`.
pub fn g_one(ctx: &IContext) -> Result<SpMat> {
    let w0 = trivial_submodule(ctx)?;
    let form = ctx.based.form.as_ref().ok_or_else(|| Error::Internal("g_1 needs an irreducible".into()))?;
    let row = form.transpose().apply(&w0);
    let c = row.get(0);
    if c.is_zero() {
        return Err(Error::Internal("w_0 is orthogonal to the highest weight vector".into()));
    }
    let row = row.scale(&c.inv());
    let mut g = SpMat::zeros(1, ctx.dim());
    for (k, x) in row.iter() {
        g.cols[k].add_term(0, x);
    }
    Ok(g)
}

/// `g_m` on `V(m varpi)` with its context.
pub fn g_m(pair: &Arc<AdmissiblePair>, m: usize, cache: &mut IrrCache, bound: usize) -> Result<(SpMat, IContext)> {
    let datum = Arc::new(pair.datum.clone());
    let vp = pair.varpi.clone();
    let scaled = |k: usize| -> Weight { vp.iter().map(|x| x * k as i32).collect() };
    if m == 0 {
        return Ok((SpMat::identity(1), IContext::trivial(pair.clone())));
    }
    let v1 = based_irreducible(&datum, &vp, bound)?;
    let c1 = IContext::new(pair.clone(), v1.clone(), cache, bound)?;
    let g1 = g_one(&c1)?;
    if m == 1 {
        return Ok((g1, c1));
    }
    let (gprev, cprev) = g_m(pair, m - 1, cache, bound)?;
    let vm = based_irreducible(&datum, &scaled(m), bound)?;
    let t = based_tensor(&cprev.based, &v1)?;
    let ch = chi(&vm, &t)?;
    // (g_{m-1} (x) id) in pure coordinates, then through the global basis
    let dn = v1.dim();
    let mut cols = Vec::with_capacity(t.dim());
    for k in 0..t.dim() {
        let mut col = SVec::new();
        for (idx, x) in t.to_pure.cols[k].iter() {
            let (a, c) = (idx / dn, idx % dn);
            let ga = gprev.get(0, a);
            if !ga.is_zero() {
                col.add_term(c, &(x * &ga));
            }
        }
        cols.push(col);
    }
    let left = SpMat { nrows: dn, cols };
    let g = g1.compose(&left).compose(&ch);
    let cm = IContext::new(pair.clone(), vm, cache, bound)?;
    Ok((g, cm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::DEFAULT_SIZE_BOUND;
    use crate::rootdata::{admissible_pair, PairKind};

    fn ctx(kind: PairKind, n: usize, lambda: &[i32]) -> IContext {
        let pair = Arc::new(admissible_pair(kind, n).unwrap());
        let datum = Arc::new(pair.datum.clone());
        let b = based_irreducible(&datum, lambda, DEFAULT_SIZE_BOUND).unwrap();
        IContext::new(pair, b, &mut IrrCache::default(), DEFAULT_SIZE_BOUND).unwrap()
    }

    #[test]
    fn ai_vector_module() {
        let c = ctx(PairKind::AI, 1, &[1]);
        c.check_ibar().unwrap();
        c.check_icb().unwrap();
        // v_2 = B_1 v_1 and both global vectors are icanonical
        assert_eq!(c.bmats[0].apply(&SVec::unit(0)), SVec::unit(1));
        assert_eq!(c.icb, SpMat::identity(2));
    }

    #[test]
    fn ibar_on_irreducibles() {
        for (k, n, l) in [
            (PairKind::AI, 1, vec![2]),
            (PairKind::AII, 3, vec![0, 1, 0]),
            (PairKind::AIII, 2, vec![1, 1]),
            (PairKind::AIV, 3, vec![1, 0, 1]),
            (PairKind::BII, 2, vec![1, 0]),
            (PairKind::BII, 2, vec![0, 1]),
            (PairKind::CII, 3, vec![0, 1, 0]),
            (PairKind::DII, 4, vec![1, 0, 0, 0]),
        ] {
            let c = ctx(k, n, &l);
            c.check_ibar().unwrap_or_else(|e| panic!("{k} {l:?}: {e}"));
            c.check_icb().unwrap_or_else(|e| panic!("{k} {l:?}: {e}"));
        }
    }

    #[test]
    fn transport_matches_b_words_on_irreducible() {
        let pair = Arc::new(admissible_pair(PairKind::BII, 2).unwrap());
        let datum = Arc::new(pair.datum.clone());
        let b = based_irreducible(&datum, &[1, 1], DEFAULT_SIZE_BOUND).unwrap();
        let mut cache = IrrCache::default();
        let bm = b_matrices(&pair, &b.module);
        let direct = upsilon_irreducible(&b, &bm).unwrap();
        let mut shifted = b.clone();
        shifted.lambda = None;
        let via = upsilon_transport(&pair, &shifted, &mut cache, DEFAULT_SIZE_BOUND).unwrap();
        assert_eq!(direct, via);
    }

    #[test]
    fn tensor_contexts() {
        let pair = Arc::new(admissible_pair(PairKind::AI, 1).unwrap());
        let datum = Arc::new(pair.datum.clone());
        let v = based_irreducible(&datum, &[1], DEFAULT_SIZE_BOUND).unwrap();
        let w = based_irreducible(&datum, &[2], DEFAULT_SIZE_BOUND).unwrap();
        let t = based_tensor(&v, &w).unwrap();
        let c = IContext::new(pair, t, &mut IrrCache::default(), DEFAULT_SIZE_BOUND).unwrap();
        assert_eq!(c.path, IbarPath::Transport);
        c.check_ibar().unwrap();
        c.check_icb().unwrap();
    }

    #[test]
    fn g_functionals_small() {
        for (k, n) in [(PairKind::AI, 1), (PairKind::BII, 2), (PairKind::AII, 3)] {
            let pair = Arc::new(admissible_pair(k, n).unwrap());
            let mut cache = IrrCache::default();
            for m in 1..=2 {
                let (g, c) = g_m(&pair, m, &mut cache, DEFAULT_SIZE_BOUND).unwrap();
                assert!(g.get(0, 0).is_one());
                let triv = IContext::trivial(pair.clone());
                is_ui_linear(&c, &triv, &g).unwrap_or_else(|e| panic!("{k} m={m}: {e}"));
                let rep = is_based_ihom(&c, &triv, &g);
                assert!(rep.pass(), "{k} m={m}: {:?}", rep.failures());
                let mut want = vec![None; c.dim()];
                want[0] = Some(0);
                assert_eq!(rep.crystal_map, want);
            }
        }
    }
}
