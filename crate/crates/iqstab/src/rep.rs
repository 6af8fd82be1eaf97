//! Integrable modules with explicit sparse generator actions.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::{independent_columns, Mat, SVec, SpMat};
use crate::rootdata::{fmt_weight, RootDatum, Weight};
use crate::scalar::{qfact_f, qint_f, RatFn};

pub const DEFAULT_SIZE_BOUND: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    E,
    F,
}

/// A weight-graded module with `E_i`, `F_i` given as sparse matrices.
#[derive(Clone, Debug)]
pub struct Module {
    pub datum: Arc<RootDatum>,
    pub weights: Vec<Weight>,
    pub labels: Vec<String>,
    pub e: Vec<SpMat>,
    pub f: Vec<SpMat>,
    pub by_weight: BTreeMap<Weight, Vec<usize>>,
}

fn group_by_weight(weights: &[Weight]) -> BTreeMap<Weight, Vec<usize>> {
    let mut m: BTreeMap<Weight, Vec<usize>> = BTreeMap::new();
    for (k, w) in weights.iter().enumerate() {
        m.entry(w.clone()).or_default().push(k);
    }
    m
}

impl Module {
    pub fn new(datum: Arc<RootDatum>, weights: Vec<Weight>, labels: Vec<String>, e: Vec<SpMat>, f: Vec<SpMat>) -> Self {
        let by_weight = group_by_weight(&weights);
        Module { datum, weights, labels, e, f, by_weight }
    }

    pub fn trivial(datum: Arc<RootDatum>) -> Self {
        let n = datum.rank;
        let w = datum.zero();
        Module::new(datum, vec![w], vec!["1".into()], vec![SpMat::zeros(1, 1); n], vec![SpMat::zeros(1, 1); n])
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn rank(&self) -> usize {
        self.datum.rank
    }

    pub fn gen(&self, g: Gen, i: usize) -> &SpMat {
        match g {
            Gen::E => &self.e[i],
            Gen::F => &self.f[i],
        }
    }

    pub fn act(&self, g: Gen, i: usize, v: &SVec) -> SVec {
        self.gen(g, i).apply(v)
    }

    /// `X^(a) v = X^a v / [a]_i!`.
    pub fn divided_power(&self, g: Gen, i: usize, a: u32, v: &SVec) -> SVec {
        let mut w = v.clone();
        for _ in 0..a {
            if w.is_zero() {
                return w;
            }
            w = self.act(g, i, &w);
        }
        if a > 1 {
            w = w.scale(&qfact_f(a, self.datum.d[i]).inv());
        }
        w
    }

    /// `K_h v` for a coweight `h` in the `h_i` basis.
    pub fn act_k(&self, h: &[i32], v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (k, x) in v.iter() {
            out.add_term(k, &(x * &RatFn::q_pow(self.datum.pairing(h, &self.weights[k]))));
        }
        out
    }

    /// `K_i^e` with `K_i = K_{d_i h_i}`.
    pub fn act_ki(&self, i: usize, e: i32, v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (k, x) in v.iter() {
            out.add_term(k, &(x * &RatFn::q_pow(e * self.datum.k_exp(i, &self.weights[k]))));
        }
        out
    }

    pub fn ki_matrix(&self, i: usize, e: i32) -> SpMat {
        SpMat {
            nrows: self.dim(),
            cols: (0..self.dim()).map(|k| SVec::unit(k).scale(&RatFn::q_pow(e * self.datum.k_exp(i, &self.weights[k])))).collect(),
        }
    }

    pub fn weight_of(&self, v: &SVec) -> Option<Weight> {
        let mut it = v.iter();
        let (k0, _) = it.next()?;
        let w = &self.weights[k0];
        if it.all(|(k, _)| &self.weights[k] == w) {
            Some(w.clone())
        } else {
            None
        }
    }

    pub fn block(&self, mu: &[i32]) -> &[usize] {
        self.by_weight.get(mu).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Weights sorted by height, highest first.
    pub fn weights_by_height(&self) -> Vec<Weight> {
        let mut ws: Vec<Weight> = self.by_weight.keys().cloned().collect();
        ws.sort_by(|a, b| self.datum.height(b).cmp(&self.datum.height(a)).then(a.cmp(b)));
        ws
    }

    pub fn tensor(m: &Module, n: &Module) -> Module {
        let dat = m.datum.clone();
        let (dm, dn) = (m.dim(), n.dim());
        let idx = |a: usize, b: usize| a * dn + b;
        let mut weights = Vec::with_capacity(dm * dn);
        let mut labels = Vec::with_capacity(dm * dn);
        for a in 0..dm {
            for b in 0..dn {
                weights.push(m.weights[a].iter().zip(&n.weights[b]).map(|(x, y)| x + y).collect());
                labels.push(format!("{}(x){}", m.labels[a], n.labels[b]));
            }
        }
        let mut e = Vec::new();
        let mut f = Vec::new();
        for i in 0..dat.rank {
            let mut ei = SpMat::zeros(dm * dn, dm * dn);
            let mut fi = SpMat::zeros(dm * dn, dm * dn);
            for a in 0..dm {
                let ka = dat.k_exp(i, &m.weights[a]);
                for b in 0..dn {
                    let kb = dat.k_exp(i, &n.weights[b]);
                    let col = idx(a, b);
                    // E(x y) = Ex y + K x Ey
                    for (a2, c) in m.e[i].cols[a].iter() {
                        ei.cols[col].add_term(idx(a2, b), c);
                    }
                    let s = RatFn::q_pow(ka);
                    for (b2, c) in n.e[i].cols[b].iter() {
                        ei.cols[col].add_term(idx(a, b2), &(c * &s));
                    }
                    // F(x y) = x Fy + Fx K^-1 y
                    for (b2, c) in n.f[i].cols[b].iter() {
                        fi.cols[col].add_term(idx(a, b2), c);
                    }
                    let s = RatFn::q_pow(-kb);
                    for (a2, c) in m.f[i].cols[a].iter() {
                        fi.cols[col].add_term(idx(a2, b), &(c * &s));
                    }
                }
            }
            e.push(ei);
            f.push(fi);
        }
        Module::new(dat, weights, labels, e, f)
    }

    /// Restriction to the span of the basis vectors `keep` (must be stable).
    pub fn restrict(&self, keep: &[usize]) -> Result<Module> {
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let map = |m: &SpMat| -> Result<SpMat> {
            let mut out = SpMat::zeros(keep.len(), keep.len());
            for (k, &i) in keep.iter().enumerate() {
                for (r, x) in m.cols[i].iter() {
                    let Some(&r2) = pos.get(&r) else {
                        return Err(Error::NotBasedSpan(format!("basis vector {i} leaves the span")));
                    };
                    out.cols[k].add_term(r2, x);
                }
            }
            Ok(out)
        };
        let e = self.e.iter().map(map).collect::<Result<Vec<_>>>()?;
        let f = self.f.iter().map(map).collect::<Result<Vec<_>>>()?;
        Ok(Module::new(
            self.datum.clone(),
            keep.iter().map(|&i| self.weights[i].clone()).collect(),
            keep.iter().map(|&i| self.labels[i].clone()).collect(),
            e,
            f,
        ))
    }

    /// Module in the basis given by the columns of `g` (with inverse `ginv`).
    pub fn change_basis(&self, g: &SpMat, ginv: &SpMat, labels: Vec<String>) -> Module {
        let conj = |m: &SpMat| ginv.compose(&m.compose(g));
        let weights = (0..g.ncols())
            .map(|k| self.weight_of(&g.cols[k]).expect("basis change must respect weights"))
            .collect();
        Module::new(self.datum.clone(), weights, labels, self.e.iter().map(conj).collect(), self.f.iter().map(conj).collect())
    }

    pub fn actions_in_a(&self) -> bool {
        self.e.iter().chain(&self.f).all(|m| m.all_in_a())
    }

    /// Checks weight compatibility, the `[E_i, F_j]` relations and the
    /// quantum Serre relations as matrix identities.
    pub fn check_relations(&self) -> std::result::Result<(), String> {
        let dat = &self.datum;
        let n = dat.rank;
        let dim = self.dim();
        for i in 0..n {
            let a = dat.alpha(i);
            for k in 0..dim {
                let up: Weight = self.weights[k].iter().zip(&a).map(|(x, y)| x + y).collect();
                let down: Weight = self.weights[k].iter().zip(&a).map(|(x, y)| x - y).collect();
                if self.e[i].cols[k].iter().any(|(r, _)| self.weights[r] != up) {
                    return Err(format!("E_{} breaks weights at {k}", i + 1));
                }
                if self.f[i].cols[k].iter().any(|(r, _)| self.weights[r] != down) {
                    return Err(format!("F_{} breaks weights at {k}", i + 1));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..dim {
                    let v = SVec::unit(k);
                    let lhs = self.act(Gen::E, i, &self.act(Gen::F, j, &v)).sub(&self.act(Gen::F, j, &self.act(Gen::E, i, &v)));
                    let want = if i == j {
                        let mu = &self.weights[k];
                        v.scale(&qint_f(mu[i], dat.d[i]))
                    } else {
                        SVec::new()
                    };
                    if lhs != want {
                        return Err(format!("[E_{}, F_{}] fails on basis vector {k}", i + 1, j + 1));
                    }
                }
                if i != j {
                    let m = (1 - dat.cartan[i][j]) as u32;
                    for g in [Gen::E, Gen::F] {
                        for k in 0..dim {
                            let v = SVec::unit(k);
                            let mut acc = SVec::new();
                            for r in 0..=m {
                                let s = m - r;
                                let w = self.divided_power(g, i, s, &v);
                                let w = self.act(g, j, &w);
                                let w = self.divided_power(g, i, r, &w);
                                let sign = if r % 2 == 0 { RatFn::one() } else { RatFn::from_int(-1) };
                                acc.axpy(&sign, &w);
                            }
                            if !acc.is_zero() {
                                return Err(format!("Serre relation ({g:?}, {}, {}) fails at {k}", i + 1, j + 1));
                            }
                        }
                    }
                }
            }
        }
        // integrability: nilpotence on every basis vector
        for i in 0..n {
            for g in [Gen::E, Gen::F] {
                for k in 0..dim {
                    let mut v = SVec::unit(k);
                    let mut steps = 0;
                    while !v.is_zero() {
                        v = self.act(g, i, &v);
                        steps += 1;
                        if steps > dim {
                            return Err(format!("{g:?}_{} not nilpotent", i + 1));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Text dump: header lines with labels and weights, then one line per
    /// nonzero matrix entry.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for k in 0..self.dim() {
            let _ = writeln!(s, "basis {k} label={} wt={}", self.labels[k], fmt_weight(&self.weights[k]));
        }
        for (g, mats) in [("E", &self.e), ("F", &self.f)] {
            for (i, m) in mats.iter().enumerate() {
                for (col, c) in m.cols.iter().enumerate() {
                    for (row, x) in c.iter() {
                        let _ = writeln!(s, "gen={g}_{} row={row} col={col} val={x}", i + 1);
                    }
                }
            }
        }
        s
    }

    pub fn render(&self, v: &SVec) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = v
            .iter()
            .map(|(k, x)| if x.is_one() { self.labels[k].clone() } else { format!("({x})*{}", self.labels[k]) })
            .collect();
        parts.join(" + ")
    }
}

/// `V(lambda)` in its construction basis of `F`-monomials, with the
/// contravariant form.
#[derive(Clone, Debug)]
pub struct HwModule {
    pub module: Module,
    pub lambda: Weight,
    pub top: usize,
    /// Gram matrix of the contravariant form (block diagonal by weight).
    pub gram: SpMat,
    /// Basis vector `k` equals `F_j` applied to basis vector `p`.
    pub parent: Vec<Option<(usize, usize)>>,
}

/// Builds `V(lambda)` by applying `F_j` level by level, keeping a candidate
/// iff it raises the rank of the Gram matrix of the contravariant form.
pub fn irreducible(datum: &Arc<RootDatum>, lambda: &[i32], bound: usize) -> Result<HwModule> {
    datum.check_dominant(lambda)?;
    let expect = datum.weyl_dimension(lambda) as usize;
    if expect > bound {
        return Err(Error::SizeBound { dim: expect, bound });
    }
    let n = datum.rank;
    let mut weights: Vec<Weight> = vec![lambda.to_vec()];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut e_cols: Vec<Vec<SVec>> = vec![vec![SVec::new()]; n];
    let mut f_cols: Vec<Vec<SVec>> = vec![Vec::new(); n];
    let mut gram_rows: Vec<SVec> = vec![SVec::unit(0)];
    let mut by_weight: BTreeMap<Weight, Vec<usize>> = BTreeMap::new();
    by_weight.insert(lambda.to_vec(), vec![0]);
    let mut level: Vec<Weight> = vec![lambda.to_vec()];

    let pair_with = |gram_rows: &Vec<SVec>, p: usize, x: &SVec| -> RatFn { gram_rows[p].dot(x) };

    while !level.is_empty() {
        // F_j on every vector of this level is resolved when the next level
        // is built; start with zero columns.
        let mut next: BTreeMap<Weight, Vec<(usize, usize)>> = BTreeMap::new();
        for mu in &level {
            for j in 0..n {
                let nu: Weight = mu.iter().zip(datum.alpha(j)).map(|(a, b)| a - b).collect();
                for &p in &by_weight[mu] {
                    next.entry(nu.clone()).or_default().push((j, p));
                }
            }
        }
        for fc in f_cols.iter_mut() {
            fc.resize(weights.len(), SVec::new());
        }
        let mut new_level = Vec::new();
        for (nu, mut cands) in next {
            cands.sort();
            // E-images of the candidates F_j v_p
            let e_img: Vec<Vec<SVec>> = cands
                .iter()
                .map(|&(j, p)| {
                    (0..n)
                        .map(|i| {
                            let mut out = SVec::new();
                            for (r, c) in e_cols[i][p].iter() {
                                out.axpy(c, &f_cols[j][r]);
                            }
                            if i == j {
                                out.add_term(p, &qint_f(weights[p][i], datum.d[i]));
                            }
                            out
                        })
                        .collect()
                })
                .collect();
            let c = cands.len();
            let mut gm = Mat::<RatFn>::zeros(c, c);
            for a in 0..c {
                let (j, p) = cands[a];
                let s = datum.d[j] * (1 - weights[p][j]);
                let pref = RatFn::q_pow(s);
                for b in a..c {
                    let x = &pref * &pair_with(&gram_rows, p, &e_img[b][j]);
                    gm.set(a, b, x.clone());
                    gm.set(b, a, x);
                }
            }
            let sel = independent_columns(&gm);
            if sel.is_empty() {
                continue;
            }
            let gs = gm.select_rows(&sel).select_cols(&sel);
            let rhs = gm.select_rows(&sel);
            let coords = gs.solve(&rhs).ok_or_else(|| Error::Internal("singular Gram block".into()))?;
            let base = weights.len();
            let mut ids = Vec::new();
            for (k, &s) in sel.iter().enumerate() {
                let (j, p) = cands[s];
                weights.push(nu.clone());
                parent.push(Some((j, p)));
                for i in 0..n {
                    e_cols[i].push(e_img[s][i].clone());
                }
                let mut row = SVec::new();
                for (l, _) in sel.iter().enumerate() {
                    row.add_term(base + l, gs.get(k, l));
                }
                gram_rows.push(row);
                ids.push(base + k);
            }
            for (a, &(j, p)) in cands.iter().enumerate() {
                let mut v = SVec::new();
                for (k, _) in sel.iter().enumerate() {
                    v.add_term(base + k, coords.get(k, a));
                }
                f_cols[j][p] = v;
            }
            by_weight.insert(nu.clone(), ids);
            new_level.push(nu);
            if weights.len() > bound {
                return Err(Error::SizeBound { dim: weights.len(), bound });
            }
        }
        level = new_level;
    }
    let dim = weights.len();
    if dim != expect {
        return Err(Error::Internal(format!("constructed dimension {dim} differs from Weyl dimension {expect}")));
    }
    for fc in f_cols.iter_mut() {
        fc.resize(dim, SVec::new());
    }
    let mk = |cols: Vec<SVec>| SpMat { nrows: dim, cols };
    let e: Vec<SpMat> = e_cols.into_iter().map(mk).collect();
    let f: Vec<SpMat> = f_cols.into_iter().map(mk).collect();
    let labels = (0..dim).map(|k| format!("u{k}")).collect();
    let module = Module::new(datum.clone(), weights, labels, e, f);
    Ok(HwModule { module, lambda: lambda.to_vec(), top: 0, gram: mk(gram_rows), parent })
}

impl HwModule {
    /// `(u, v)` for the contravariant form with `(v_lambda, v_lambda) = 1`.
    pub fn form(&self, u: &SVec, v: &SVec) -> RatFn {
        let gv = self.gram.apply(v);
        u.dot(&gv)
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }
}

/// `V(-lambda)`, realised as `V(-w_0 lambda)`; returns the module and the
/// index of the extremal vector of weight `-lambda`.
pub fn lowest_weight_module(datum: &Arc<RootDatum>, lambda: &[i32], bound: usize) -> Result<(HwModule, usize)> {
    datum.check_dominant(lambda)?;
    let dual = datum.neg_w0(lambda);
    let m = irreducible(datum, &dual, bound)?;
    let neg: Weight = lambda.iter().map(|x| -x).collect();
    let idx = *m.module.block(&neg).first().ok_or_else(|| Error::Internal("missing lowest weight".into()))?;
    Ok((m, idx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::rootdata::{build_datum, Series};

    fn dat(s: Series, n: usize) -> Arc<RootDatum> {
        Arc::new(build_datum(s, n).unwrap())
    }

    #[test]
    fn vector_representations() {
        for n in 1..=4 {
            let d = dat(Series::A, n);
            let v = irreducible(&d, &d.fundamental(0), DEFAULT_SIZE_BOUND).unwrap();
            assert_eq!(v.dim(), n + 1);
            v.module.check_relations().unwrap();
        }
    }

    #[test]
    fn weyl_dimension_agreement() {
        let cases: Vec<(Series, usize, Vec<i32>)> = vec![
            (Series::C, 3, vec![0, 1, 0]),
            (Series::B, 2, vec![1, 0]),
            (Series::B, 2, vec![0, 1]),
            (Series::B, 2, vec![1, 1]),
            (Series::D, 4, vec![1, 0, 0, 0]),
            (Series::A, 2, vec![2, 1]),
            (Series::A1xA1, 2, vec![1, 1]),
        ];
        for (s, n, l) in cases {
            let d = dat(s, n);
            let v = irreducible(&d, &l, DEFAULT_SIZE_BOUND).unwrap();
            assert_eq!(v.dim() as u64, d.weyl_dimension(&l));
            v.module.check_relations().unwrap();
        }
    }

    #[test]
    fn f4_minuscule_like() {
        let d = dat(Series::F4, 4);
        let v = irreducible(&d, &[0, 0, 0, 1], DEFAULT_SIZE_BOUND).unwrap();
        assert_eq!(v.dim(), 26);
        assert_eq!(v.module.block(&[0, 0, 0, 0]).len(), 2);
        v.module.check_relations().unwrap();
    }

    #[test]
    fn tensor_square_a1() {
        let d = dat(Series::A, 1);
        let v = irreducible(&d, &[1], DEFAULT_SIZE_BOUND).unwrap().module;
        let t = Module::tensor(&v, &v);
        assert_eq!(t.dim(), 4);
        let mut ws: Vec<i32> = t.weights.iter().map(|w| w[0]).collect();
        ws.sort();
        assert_eq!(ws, vec![-2, 0, 0, 2]);
        // F(v1 v1) = v1 v2 + q^-1 v2 v1
        let img = t.act(Gen::F, 0, &SVec::unit(0));
        assert_eq!(img.get(1), RatFn::one());
        assert_eq!(img.get(2), RatFn::q_pow(-1));
        t.check_relations().unwrap();
    }

    #[test]
    fn form_and_size_bound() {
        let d = dat(Series::A, 1);
        let v = irreducible(&d, &[2], DEFAULT_SIZE_BOUND).unwrap();
        assert_eq!(v.form(&SVec::unit(0), &SVec::unit(0)), RatFn::one());
        assert!(v.form(&SVec::unit(0), &SVec::unit(1)).is_zero());
        // F^(2) v = F^2 v / [2]
        let f2 = v.module.divided_power(Gen::F, 0, 2, &SVec::unit(0));
        let ff = v.module.act(Gen::F, 0, &v.module.act(Gen::F, 0, &SVec::unit(0)));
        assert_eq!(f2, ff.scale(&qint_f(2, 1).inv()));
        assert!(matches!(irreducible(&d, &[40000], 100), Err(Error::SizeBound { .. })));
        assert!(matches!(irreducible(&d, &[-1], 100), Err(Error::NotDominant(_))));
        let a2 = dat(Series::A, 2);
        let (m, idx) = lowest_weight_module(&a2, &[1, 0], 100).unwrap();
        assert_eq!(m.lambda, vec![0, 1]);
        assert_eq!(m.module.weights[idx], vec![-1, 0]);
    }
}
