//! Linear algebra over the scalar fields used here.
//!
//! Small dense matrices (weight blocks) go through [`Mat`]; module actions
//! are sparse column vectors ([`SVec`], [`SpMat`]) over `RatFn`.  Ranks are
//! selected modulo `2^61 - 1` at a random-looking point and then solved
//! exactly, so a modular pivot set is always a valid exact pivot set.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::{Fp, RatFn};

/// The operations the elimination routines need.
pub trait Field: Clone + PartialEq + Debug + Send + Sync {
    fn f_zero() -> Self;
    fn f_one() -> Self;
    fn f_is_zero(&self) -> bool;
    fn f_add(&self, o: &Self) -> Self;
    fn f_sub(&self, o: &Self) -> Self;
    fn f_mul(&self, o: &Self) -> Self;
    fn f_neg(&self) -> Self;
    fn f_inv(&self) -> Self;
    /// Pivot preference: smaller is better.
    fn f_cost(&self) -> usize {
        1
    }
}

impl Field for RatFn {
    fn f_zero() -> Self {
        RatFn::zero()
    }
    fn f_one() -> Self {
        RatFn::one()
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn f_add(&self, o: &Self) -> Self {
        self + o
    }
    fn f_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn f_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn f_neg(&self) -> Self {
        -self
    }
    fn f_inv(&self) -> Self {
        self.inv()
    }
    fn f_cost(&self) -> usize {
        self.weight()
    }
}

impl Field for BigRational {
    fn f_zero() -> Self {
        BigRational::zero()
    }
    fn f_one() -> Self {
        BigRational::one()
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn f_add(&self, o: &Self) -> Self {
        self + o
    }
    fn f_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn f_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn f_neg(&self) -> Self {
        -self
    }
    fn f_inv(&self) -> Self {
        self.recip()
    }
}

impl Field for Fp {
    fn f_zero() -> Self {
        Fp::zero()
    }
    fn f_one() -> Self {
        Fp::one()
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn f_add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn f_sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn f_mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn f_neg(&self) -> Self {
        -*self
    }
    fn f_inv(&self) -> Self {
        self.inv()
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat<F> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F>,
}

impl<F: Field> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![F::f_zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::f_one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<F> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c, "ragged rows");
        Mat { rows: r, cols: c, data }
    }

    pub fn from_cols(cols: &[Vec<F>], nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.f_is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.f_is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).f_add(&a.f_mul(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = F::f_zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.f_is_zero() && !b.f_is_zero() {
                        acc = acc.f_add(&a.f_mul(b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(idx.len(), self.cols);
        for (r, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m.set(r, j, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (c, &j) in idx.iter().enumerate() {
                m.set(i, c, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.f_is_zero())
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let best = (r..self.rows)
                .filter(|&i| !self.get(i, c).f_is_zero())
                .min_by_key(|&i| self.get(i, c).f_cost());
            let Some(p) = best else { continue };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).f_inv();
            for j in c..self.cols {
                let v = self.get(r, j).f_mul(&inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c).clone();
                if f.f_is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let x = self.get(r, j);
                    if x.f_is_zero() {
                        continue;
                    }
                    let v = self.get(i, j).f_sub(&f.f_mul(x));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right nullspace.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::f_zero(); self.cols];
                v[f] = F::f_one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = m.get(r, f).f_neg();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, F::f_one());
        }
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    /// Solves `self * X = rhs` for square invertible `self`.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "solve with non-square matrix");
        assert_eq!(self.rows, rhs.rows, "shape mismatch");
        let n = self.rows;
        let mut aug = Self::zeros(n, n + rhs.cols);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            for j in 0..rhs.cols {
                aug.set(i, n + j, rhs.get(i, j).clone());
            }
        }
        let piv = aug.rref();
        if piv.len() < n || (n > 0 && piv[n - 1] != n - 1) {
            return None;
        }
        let mut out = Self::zeros(n, rhs.cols);
        for i in 0..n {
            for j in 0..rhs.cols {
                out.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(out)
    }
}

/// Evaluation points for modular rank selection.
const POINTS: [u64; 4] = [1_234_567_890_123, 987_654_321_987, 31_415_926_535_897, 271_828_182_845];

fn eval_mat(m: &Mat<RatFn>) -> Option<Mat<Fp>> {
    'pt: for &a in &POINTS {
        let a = Fp::new(a);
        let mut data = Vec::with_capacity(m.data.len());
        for x in &m.data {
            match x.eval_mod(a) {
                Some(v) => data.push(v),
                None => continue 'pt,
            }
        }
        return Some(Mat { rows: m.rows, cols: m.cols, data });
    }
    None
}

/// Columns of `m` forming a maximal independent set, chosen greedily from the
/// left.  Falls back to exact elimination if every evaluation point is a pole.
pub fn independent_columns(m: &Mat<RatFn>) -> Vec<usize> {
    match eval_mat(m) {
        Some(mut e) => e.rref(),
        None => m.clone().rref(),
    }
}

pub fn independent_rows(m: &Mat<RatFn>) -> Vec<usize> {
    independent_columns(&m.transpose())
}

/// Solves `a x = b` for `a` of full column rank; `None` if inconsistent.
pub fn solve_overdetermined(a: &Mat<RatFn>, b: &Mat<RatFn>) -> Option<Mat<RatFn>> {
    let rows = independent_rows(a);
    if rows.len() < a.cols {
        return None;
    }
    let sq = a.select_rows(&rows);
    let x = sq.solve(&b.select_rows(&rows))?;
    if a.mul(&x) != *b {
        return None;
    }
    Some(x)
}

/// Sparse vector over `RatFn`, keyed by basis index.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SVec(pub BTreeMap<usize, RatFn>);

impl Debug for SVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

impl SVec {
    pub fn new() -> Self {
        SVec(BTreeMap::new())
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Self::new();
        v.0.insert(i, RatFn::one());
        v
    }

    pub fn from_dense(d: &[RatFn]) -> Self {
        SVec(d.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect())
    }

    pub fn to_dense(&self, n: usize) -> Vec<RatFn> {
        let mut d = vec![RatFn::zero(); n];
        for (&i, x) in &self.0 {
            d[i] = x.clone();
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> RatFn {
        self.0.get(&i).cloned().unwrap_or_else(RatFn::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &RatFn)> {
        self.0.iter().map(|(&i, x)| (i, x))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, i: usize, c: &RatFn) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&i) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.0.remove(&i);
                }
            }
            None => {
                self.0.insert(i, c.clone());
            }
        }
    }

    /// `self += c * o`.
    pub fn axpy(&mut self, c: &RatFn, o: &SVec) {
        if c.is_zero() {
            return;
        }
        let one = c.is_one();
        for (&i, x) in &o.0 {
            if one {
                self.add_term(i, x);
            } else {
                self.add_term(i, &(c * x));
            }
        }
    }

    pub fn scale(&self, c: &RatFn) -> SVec {
        if c.is_zero() {
            return SVec::new();
        }
        SVec(self.0.iter().map(|(&i, x)| (i, x * c)).collect())
    }

    pub fn neg(&self) -> SVec {
        SVec(self.0.iter().map(|(&i, x)| (i, -x)).collect())
    }

    pub fn add(&self, o: &SVec) -> SVec {
        let mut r = self.clone();
        r.axpy(&RatFn::one(), o);
        r
    }

    pub fn sub(&self, o: &SVec) -> SVec {
        let mut r = self.clone();
        r.axpy(&RatFn::from_int(-1), o);
        r
    }

    /// Coefficientwise bar.
    pub fn bar(&self) -> SVec {
        SVec(self.0.iter().map(|(&i, x)| (i, x.bar())).collect())
    }

    pub fn dot(&self, o: &SVec) -> RatFn {
        let mut acc = RatFn::zero();
        for (i, x) in &self.0 {
            if let Some(y) = o.0.get(i) {
                acc += &(x * y);
            }
        }
        acc
    }

    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> SVec {
        SVec(self.0.iter().filter(|(i, _)| keep(**i)).map(|(&i, x)| (i, x.clone())).collect())
    }

    pub fn reindex(&self, map: impl Fn(usize) -> usize) -> SVec {
        SVec(self.0.iter().map(|(&i, x)| (map(i), x.clone())).collect())
    }

    pub fn all_in_a(&self) -> bool {
        self.0.values().all(|x| x.is_in_a())
    }
}

/// Sparse matrix stored by columns.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct SpMat {
    pub nrows: usize,
    pub cols: Vec<SVec>,
}

impl SpMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SpMat { nrows, cols: vec![SVec::new(); ncols] }
    }

    pub fn identity(n: usize) -> Self {
        SpMat { nrows: n, cols: (0..n).map(SVec::unit).collect() }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn apply(&self, v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (j, c) in v.iter() {
            out.axpy(c, &self.cols[j]);
        }
        out
    }

    /// `self * o`.
    pub fn compose(&self, o: &SpMat) -> SpMat {
        assert_eq!(self.ncols(), o.nrows, "shape mismatch");
        SpMat { nrows: self.nrows, cols: o.cols.iter().map(|c| self.apply(c)).collect() }
    }

    pub fn add(&self, o: &SpMat) -> SpMat {
        SpMat { nrows: self.nrows, cols: self.cols.iter().zip(&o.cols).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &SpMat) -> SpMat {
        SpMat { nrows: self.nrows, cols: self.cols.iter().zip(&o.cols).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, c: &RatFn) -> SpMat {
        SpMat { nrows: self.nrows, cols: self.cols.iter().map(|x| x.scale(c)).collect() }
    }

    pub fn bar(&self) -> SpMat {
        SpMat { nrows: self.nrows, cols: self.cols.iter().map(|x| x.bar()).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> RatFn {
        self.cols[j].get(i)
    }

    pub fn transpose(&self) -> SpMat {
        let mut t = SpMat::zeros(self.ncols(), self.nrows);
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c.iter() {
                t.cols[i].0.insert(j, x.clone());
            }
        }
        t
    }

    pub fn all_in_a(&self) -> bool {
        self.cols.iter().all(|c| c.all_in_a())
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    /// Dense block with the given rows and columns.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Mat<RatFn> {
        let mut m = Mat::zeros(rows.len(), cols.len());
        let pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        for (c, &j) in cols.iter().enumerate() {
            for (i, x) in self.cols[j].iter() {
                if let Some(&r) = pos.get(&i) {
                    m.set(r, c, x.clone());
                }
            }
        }
        m
    }
}

/// Dense column of `m` restricted to `rows`.
pub fn svec_block(v: &SVec, rows: &[usize]) -> Vec<RatFn> {
    rows.iter().map(|&r| v.get(r)).collect()
}

/// Coefficients `c` with `sum c_k cols[k] = target`, zero on columns left
/// out of a maximal independent subset; `None` if `target` is not in the span.
pub fn express_in_span(cols: &[SVec], target: &SVec) -> Option<Vec<RatFn>> {
    let mut rows: Vec<usize> = cols.iter().flat_map(|c| c.iter().map(|(k, _)| k)).chain(target.iter().map(|(k, _)| k)).collect();
    rows.sort();
    rows.dedup();
    let mut out = vec![RatFn::zero(); cols.len()];
    if target.is_zero() {
        return Some(out);
    }
    let a = Mat::from_cols(&cols.iter().map(|c| svec_block(c, &rows)).collect::<Vec<_>>(), rows.len());
    let sel = independent_columns(&a);
    if sel.is_empty() {
        return None;
    }
    let b = Mat::from_cols(&[svec_block(target, &rows)], rows.len());
    let x = solve_overdetermined(&a.select_cols(&sel), &b)?;
    for (k, &j) in sel.iter().enumerate() {
        out[j] = x.get(k, 0).clone();
    }
    Some(out)
}

/// `a (x) I_n` acting on index `i * n + j`.
pub fn kron_identity(a: &SpMat, n: usize) -> SpMat {
    let mut cols = Vec::with_capacity(a.ncols() * n);
    for c in &a.cols {
        for j in 0..n {
            cols.push(c.reindex(|i| i * n + j));
        }
    }
    SpMat { nrows: a.nrows * n, cols }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn rational_inverse_and_nullspace() {
        let m = Mat::from_rows(vec![vec![r(2), r(1)], vec![r(4), r(3)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(2));
        let s = Mat::from_rows(vec![vec![r(1), r(2), r(3)], vec![r(2), r(4), r(6)]]);
        let ns = s.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(s.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn ratfn_solve_and_modular_selection() {
        let q = RatFn::q();
        let one = RatFn::one();
        let m = Mat::from_rows(vec![
            vec![q.clone(), one.clone(), &q + &one],
            vec![one.clone(), one.clone(), RatFn::from_int(2)],
        ]);
        // third column is the sum of the first two
        assert_eq!(independent_columns(&m), vec![0, 1]);
        let x = solve_overdetermined(&m.select_cols(&[0, 1]), &m.select_cols(&[2])).unwrap();
        assert_eq!(x.col(0), vec![one.clone(), one.clone()]);
        let bad = Mat::from_cols(&[vec![one.clone(), RatFn::zero()]], 2);
        let thin = Mat::from_cols(&[vec![one.clone(), one.clone()]], 2);
        assert!(solve_overdetermined(&thin, &bad).is_none());
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = Mat::from_rows(vec![vec![Fp::from_i64(1), Fp::from_i64(2)], vec![Fp::from_i64(2), Fp::from_i64(4)]]);
        assert!(m.inverse().is_none());
    }

    #[test]
    fn sparse_compose_matches_dense() {
        let q = RatFn::q();
        let mut a = SpMat::zeros(2, 2);
        a.cols[0].add_term(1, &q);
        a.cols[1].add_term(0, &RatFn::one());
        let b = a.compose(&a);
        assert_eq!(b.get(0, 0), q);
        assert_eq!(b.get(1, 1), q);
        assert!(b.get(1, 0).is_zero());
        assert_eq!(a.transpose().transpose(), a);
    }
}
