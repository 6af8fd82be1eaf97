//! Closed-form identities on small modules: `B_i` actions on vector
//! modules, the `C_n` wedge tables, invariant vectors `w_0`, the
//! functionals `g_m` and the swap isomorphisms.

use std::sync::Arc;

use num_traits::One;

use crate::gcb::{based_irreducible, f_word_basis, apply_f_word, span_map, Based};
use crate::iqg::{g_m, is_based_ihom, is_ui_linear, trivial_submodule, IContext, IrrCache};
use crate::linalg::{SVec, SpMat};
use crate::rep::{Gen, Module};
use crate::rootdata::{admissible_pair, AdmissiblePair, PairKind, RootDatum, Weight};
use crate::scalar::{qint_f, RatFn};

type Check = std::result::Result<String, String>;

fn q(e: i32) -> RatFn {
    RatFn::q_pow(e)
}

fn qn(n: i32) -> RatFn {
    qint_f(n, 1)
}

fn pair(kind: PairKind, n: usize) -> std::result::Result<Arc<AdmissiblePair>, String> {
    admissible_pair(kind, n).map(Arc::new).map_err(|e| e.to_string())
}

fn irr(datum: &Arc<RootDatum>, lambda: &[i32], bound: usize) -> std::result::Result<Based, String> {
    based_irreducible(datum, lambda, bound).map_err(|e| e.to_string())
}

fn unique_at(m: &Module, wt: &[i32]) -> std::result::Result<usize, String> {
    match m.block(wt) {
        [k] => Ok(*k),
        other => Err(format!("weight {wt:?} has multiplicity {}", other.len())),
    }
}

fn neg(w: &[i32]) -> Weight {
    w.iter().map(|x| -x).collect()
}

/// Indices of `b_1, .., b_n` in a vector crystal, `b_{k+1} = F_k b_k`
/// (0-based nodes), and of the barred elements `b_{k bar}` of weight
/// `-wt(b_k)`.
struct VectorLabels {
    plain: Vec<usize>,
    barred: Vec<usize>,
}

fn vector_labels(v: &Based, n: usize) -> std::result::Result<VectorLabels, String> {
    let mut plain = vec![0];
    for k in 0..n.saturating_sub(1) {
        let next = v.crystal.f[k][*plain.last().unwrap()].ok_or("vector crystal path breaks")?;
        plain.push(next);
    }
    let barred = plain.iter().map(|&b| unique_at(&v.module, &neg(&v.crystal.weights[b]))).collect::<std::result::Result<_, _>>()?;
    Ok(VectorLabels { plain, barred })
}

fn expect_eq(m: &Module, lhs: &SVec, rhs: &SVec, what: &str) -> Check {
    if lhs == rhs {
        Ok(format!("{what}: {}", m.render(lhs)))
    } else {
        Err(format!("{what}: got {}, expected {}", m.render(lhs), m.render(rhs)))
    }
}

fn ctx(p: &Arc<AdmissiblePair>, lambda: &[i32], bound: usize) -> std::result::Result<IContext, String> {
    let datum = Arc::new(p.datum.clone());
    let b = irr(&datum, lambda, bound)?;
    IContext::new(p.clone(), b, &mut IrrCache::default(), bound).map_err(|e| e.to_string())
}

/// `B_2 v_{4,3} = q^2 v_{3,1}` in `V(varpi_2)`, type AII.
pub fn calc_aii(bound: usize) -> Check {
    let p = pair(PairKind::AII, 3)?;
    let c = ctx(&p, &[0, 1, 0], bound)?;
    let m = c.module();
    let v43 = unique_at(m, &[0, -1, 0])?;
    let v31 = unique_at(m, &[1, -1, 1])?;
    let lhs = c.bmats[1].apply(&SVec::unit(v43));
    expect_eq(m, &lhs, &SVec::unit(v31).scale(&q(2)), "B2 v43")
}

/// `B_n v_n = v_{n+1} + v_1` in `V(varpi_1)`, type AIV.
pub fn calc_aiv(n: usize, bound: usize) -> Check {
    let p = pair(PairKind::AIV, n)?;
    let c = ctx(&p, &p.datum.fundamental(0), bound)?;
    let m = c.module();
    let mut path = vec![0];
    for k in 0..n {
        path.push(c.based.crystal.f[k][*path.last().unwrap()].ok_or("vector path breaks")?);
    }
    let lhs = c.bmats[n - 1].apply(&SVec::unit(path[n - 1]));
    expect_eq(m, &lhs, &SVec::unit(path[n]).add(&SVec::unit(path[0])), "Bn vn")
}

/// `B_1 v_{1 bar} = q^e v_2` in `V(varpi_1)` (BII: `e = 2n-1`, DII: `e = n-1`).
pub fn calc_b1(kind: PairKind, n: usize, bound: usize) -> Check {
    let p = pair(kind, n)?;
    let c = ctx(&p, &p.datum.fundamental(0), bound)?;
    let m = c.module();
    let lab = vector_labels(&c.based, n)?;
    let e = match kind {
        PairKind::BII => 2 * n as i32 - 1,
        PairKind::DII => n as i32 - 1,
        _ => return Err(format!("no B_1 identity for {kind}")),
    };
    let lhs = c.bmats[0].apply(&SVec::unit(lab.barred[0]));
    expect_eq(m, &lhs, &SVec::unit(lab.plain[1]).scale(&q(e)), "B1 v1bar")
}

/// `V(varpi_1) (x) V(varpi_1)` of `C_n` in the pure basis with the wedge
/// vectors `v_{i,j}`.
pub struct CWedge {
    pub t: Module,
    pub d: usize,
    pub lab: VectorLabelsPub,
    pub v1: Based,
}

pub struct VectorLabelsPub {
    pub plain: Vec<usize>,
    pub barred: Vec<usize>,
}

impl CWedge {
    pub fn new(n: usize, bound: usize) -> std::result::Result<CWedge, String> {
        let datum = Arc::new(crate::rootdata::build_datum(crate::rootdata::Series::C, n).map_err(|e| e.to_string())?);
        let v1 = irr(&datum, &datum.fundamental(0), bound)?;
        let lab = vector_labels(&v1, n)?;
        let t = Module::tensor(&v1.module, &v1.module);
        Ok(CWedge { d: v1.dim(), t, lab: VectorLabelsPub { plain: lab.plain, barred: lab.barred }, v1 })
    }

    /// Index of `b_i` for `i` in `1..=n` (plain) or barred.
    pub fn idx(&self, i: usize, bar: bool) -> usize {
        if bar {
            self.lab.barred[i - 1]
        } else {
            self.lab.plain[i - 1]
        }
    }

    fn pure(&self, a: usize, b: usize) -> SVec {
        SVec::unit(a * self.d + b)
    }

    /// `v_{x,y} = x (x) y - q^-1 y (x) x` for indices `x, y`.
    pub fn wedge(&self, x: usize, y: usize) -> SVec {
        self.pure(x, y).sub(&self.pure(y, x).scale(&q(-1)))
    }

    /// `v_{k bar, k}` for `k` in `2..=n`.
    pub fn diag(&self, k: usize) -> SVec {
        let (kb, kk) = (self.idx(k, true), self.idx(k, false));
        let (jb, jj) = (self.idx(k - 1, true), self.idx(k - 1, false));
        let mut v = self.pure(kb, kk);
        v.axpy(&q(-1), &self.pure(jb, jj));
        v.axpy(&-q(-1), &self.pure(jj, jb));
        v.axpy(&-q(-2), &self.pure(kk, kb));
        v
    }

    /// `w'_0`.
    pub fn w0_prime(&self, n: usize) -> SVec {
        let mut w = self.diag(2).scale(&-qn(2).inv());
        for k in 3..=n {
            let sign = if (k - 3) % 2 == 0 { RatFn::one() } else { RatFn::from_int(-1) };
            let c = &sign * &(&qn((n - k + 1) as i32) * &qn(n as i32 - 2).inv());
            w.axpy(&c, &self.diag(k));
        }
        w
    }
}

/// The `F_i`/`E_i` tables on `v_{k bar, k}` in `V(varpi_2)` of `C_n`.
pub fn calc_cii(n: usize, bound: usize) -> Check {
    let w = CWedge::new(n, bound)?;
    let top = w.wedge(w.idx(2, false), w.idx(1, false));
    for i in 0..n {
        if !w.t.act(Gen::E, i, &top).is_zero() {
            return Err(format!("v_(2,1) is not highest weight (E{})", i + 1));
        }
    }
    let mut checked = 0;
    for i in 1..=n {
        for k in 2..=n {
            let coef = if k == i + 1 {
                Some(qn(2))
            } else if k == i + 2 || (k == i && i < n) {
                Some(RatFn::one())
            } else {
                None
            };
            let f_want = match (&coef, i < n) {
                (Some(c), true) => w.wedge(w.idx(i, true), w.idx(i + 1, false)).scale(c),
                _ => SVec::new(),
            };
            let e_want = match (&coef, i < n) {
                (Some(c), true) => w.wedge(w.idx(i + 1, true), w.idx(i, false)).scale(c),
                _ => SVec::new(),
            };
            let v = w.diag(k);
            let f_got = w.t.act(Gen::F, i - 1, &v);
            let e_got = w.t.act(Gen::E, i - 1, &v);
            if f_got != f_want {
                return Err(format!("F{i} v_(k̄,{k}) = {}, expected {}", w.t.render(&f_got), w.t.render(&f_want)));
            }
            if e_got != e_want {
                return Err(format!("E{i} v_(k̄,{k}) = {}, expected {}", w.t.render(&e_got), w.t.render(&e_want)));
            }
            checked += 2;
        }
    }
    Ok(format!("{checked} table entries on C{n}"))
}

/// Reference closed forms for `w_0`, where printed, in global coordinates of
/// `V(varpi)` (CII is compared after embedding into the tensor square).
fn closed_form(kind: PairKind, n: usize, c: &IContext) -> std::result::Result<Option<SVec>, String> {
    let m = c.module();
    let nn = n as i32;
    let v = match kind {
        PairKind::AII => {
            let low = unique_at(m, &[0, -1, 0])?;
            let mut w = SVec::unit(0);
            w.axpy(&-q(-2), &SVec::unit(low));
            Some(w)
        }
        PairKind::BII | PairKind::DII => {
            let lab = vector_labels(&c.based, n)?;
            let e = if kind == PairKind::BII { -2 * nn + 1 } else { -nn + 1 };
            let mut w = SVec::unit(0);
            w.axpy(&-q(e), &SVec::unit(lab.barred[0]));
            Some(w)
        }
        PairKind::FII => Some(fii_form(c, false)?),
        _ => None,
    };
    Ok(v)
}

/// The FII form with `b_0^1 = F_4 b_(-w3+2w4)` and `b_0^2 = F_3
/// b_(-w2+2w3-w4)`, or with the two zero-weight elements exchanged.
fn fii_form(c: &IContext, swap: bool) -> std::result::Result<SVec, String> {
    let m = c.module();
    let cr = &c.based.crystal;
    let mut b01 = cr.f[3][unique_at(m, &[0, 0, -1, 2])?].ok_or("F4 kills b_(-w3+2w4)")?;
    let mut b02 = cr.f[2][unique_at(m, &[0, -1, 2, -1])?].ok_or("F3 kills b_(-w2+2w3-w4)")?;
    if swap {
        std::mem::swap(&mut b01, &mut b02);
    }
    let low = unique_at(m, &[0, 0, 0, -1])?;
    let c0 = &(&q(-5) * &qn(2)) * &qn(3).inv();
    let mut w = SVec::unit(0);
    w.axpy(&-c0.clone(), &SVec::unit(b02));
    w.axpy(&(&c0 * &qn(2).inv()), &SVec::unit(b01));
    w.axpy(&q(-11), &SVec::unit(low));
    Ok(w)
}

/// Names of the `U^i` generators not killing `v`.
fn non_invariance(c: &IContext, v: &SVec) -> Vec<String> {
    let mut out: Vec<String> = c.generators().into_iter().filter(|(_, x)| !x.apply(v).is_zero()).map(|(n, _)| n).collect();
    out.extend(c.k_generators().into_iter().filter(|(_, x)| &x.apply(v) != v).map(|(n, _)| n));
    out
}

/// `U^i w_0` is a line, `w_0 in L` with `ev(w_0) = b_varpi`, and `w_0`
/// matches the printed closed form.
pub fn w0_check(kind: PairKind, n: usize, bound: usize) -> Check {
    let p = pair(kind, n)?;
    let c = ctx(&p, &p.varpi, bound)?;
    let w0 = trivial_submodule(&c).map_err(|e| e.to_string())?;
    for (k, x) in w0.iter() {
        if k != 0 && !x.is_in_qinv_ainf() {
            return Err(format!("w_0 leaves the lattice at {}: {x}", c.label(k)));
        }
    }
    let rendered = c.module().render(&w0);
    if kind == PairKind::CII {
        let w = CWedge::new(n, bound)?;
        let wp = w.w0_prime(n);
        for &j in &p.black {
            if !w.t.act(Gen::E, j, &wp).is_zero() || !w.t.act(Gen::F, j, &wp).is_zero() {
                return Err(format!("w'_0 is not killed by E{0}/F{0}", j + 1));
            }
        }
        let top = w.wedge(w.idx(2, false), w.idx(1, false));
        let words = f_word_basis(c.module(), &SVec::unit(0));
        let src: Vec<SVec> = words.iter().map(|(_, x)| x.clone()).collect();
        let img: Vec<SVec> = words.iter().map(|(wd, _)| apply_f_word(&w.t, wd, &top)).collect();
        let emb = span_map(c.module(), w.t.dim(), &src, &img).map_err(|e| e.to_string())?;
        let nn = n as i32;
        let coef = &(&q(-nn + 1) * &qn(2)) * &(&qn(nn - 2) * &qn(nn).inv());
        let mut want = top.clone();
        want.axpy(&-coef, &wp);
        want.axpy(&q(-2 * nn + 1), &w.wedge(w.idx(1, true), w.idx(2, true)));
        let got = emb.apply(&w0);
        if got != want {
            return Err(format!("embedded w_0 = {}, closed form {}", w.t.render(&got), w.t.render(&want)));
        }
        return Ok(rendered);
    }
    if let Some(want) = closed_form(kind, n, &c)? {
        if want != w0 {
            let mut msg = format!("w_0 = {rendered}, closed form {}", c.module().render(&want));
            let bad = non_invariance(&c, &want);
            if !bad.is_empty() {
                msg.push_str(&format!("; the closed form is not killed by {}", bad.join(", ")));
            }
            if kind == PairKind::FII && fii_form(&c, true)? == w0 {
                msg.push_str("; w_0 equals the closed form with b_0^1 and b_0^2 exchanged");
            }
            return Err(msg);
        }
    }
    Ok(rendered)
}

/// `g_m` exists, `g_m(v_{m varpi}) = 1`, is `U^i`-linear and based with
/// crystal map `delta_{b, b_{m varpi}}`.
pub fn g_check(kind: PairKind, n: usize, m: usize, bound: usize) -> Check {
    let p = pair(kind, n)?;
    let mut cache = IrrCache::default();
    let (g, c) = g_m(&p, m, &mut cache, bound).map_err(|e| e.to_string())?;
    if !g.get(0, 0).is_one() {
        return Err(format!("g_{m}(v_top) = {}", g.get(0, 0)));
    }
    let triv = IContext::trivial(p.clone());
    is_ui_linear(&c, &triv, &g)?;
    let rep = is_based_ihom(&c, &triv, &g);
    if !rep.pass() {
        return Err(rep.failures().join("; "));
    }
    let hits: Vec<usize> = (0..c.dim()).filter(|&b| rep.crystal_map[b].is_some()).collect();
    if hits != vec![0] {
        return Err(format!("induced crystal map is nonzero on {hits:?}"));
    }
    Ok(format!("dim V = {}", c.dim()))
}

/// The swap isomorphisms of AI, AIII and AIV: `U^i`-linear, based, and
/// involutive where source and target agree.
pub fn k_iso_check(kind: PairKind, n: usize, bound: usize) -> Check {
    let p = pair(kind, n)?;
    let datum = p.datum.clone();
    let (src, tgt, kmat) = match kind {
        PairKind::AI | PairKind::AIV => {
            let c = ctx(&p, &datum.fundamental(0), bound)?;
            let d = c.dim();
            let mut path = vec![0];
            for k in 0..n {
                path.push(c.based.crystal.f[k][*path.last().unwrap()].ok_or("vector path breaks")?);
            }
            let mut k = SpMat::identity(d);
            k.cols[path[0]] = SVec::unit(path[n]);
            k.cols[path[n]] = SVec::unit(path[0]);
            (c.clone(), c, k)
        }
        PairKind::AIII => {
            let c1 = ctx(&p, &[1, 0], bound)?;
            let c2 = ctx(&p, &[0, 1], bound)?;
            let mut k = SpMat::zeros(2, 2);
            k.cols[0] = SVec::unit(1);
            k.cols[1] = SVec::unit(0);
            (c1, c2, k)
        }
        _ => return Err(format!("no swap isomorphism for {kind}")),
    };
    is_ui_linear(&src, &tgt, &kmat)?;
    let rep = is_based_ihom(&src, &tgt, &kmat);
    if !rep.pass() {
        return Err(rep.failures().join("; "));
    }
    if kind != PairKind::AIII && kmat.compose(&kmat) != SpMat::identity(src.dim()) {
        return Err("K^2 != 1".into());
    }
    Ok(format!("K on {} dims", src.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::DEFAULT_SIZE_BOUND as B;

    #[test]
    fn calc_lemmas() {
        calc_aii(B).unwrap();
        for n in [2, 3] {
            calc_aiv(n, B).unwrap();
            calc_b1(PairKind::BII, n, B).unwrap();
        }
        calc_b1(PairKind::DII, 4, B).unwrap();
        calc_cii(3, B).unwrap();
        calc_cii(4, B).unwrap();
    }

    #[test]
    fn w0_small() {
        for (k, n) in [(PairKind::AI, 1), (PairKind::AII, 3), (PairKind::AIII, 2), (PairKind::AIV, 2), (PairKind::BII, 2), (PairKind::CII, 3), (PairKind::DII, 4)] {
            w0_check(k, n, B).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }

    #[test]
    fn swaps() {
        k_iso_check(PairKind::AI, 1, B).unwrap();
        k_iso_check(PairKind::AIII, 2, B).unwrap();
        k_iso_check(PairKind::AIV, 3, B).unwrap();
    }
}
