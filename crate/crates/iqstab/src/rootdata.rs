//! Cartan data, Weyl group actions and the registry of real rank one
//! admissible pairs.
//!
//! Weights live in fundamental-weight coordinates: `mu[i] = <h_i, mu>`.
//! Coweights live in the `h_i` basis.  The simple root `alpha_j` is column
//! `j` of the Cartan matrix `a[i][j] = <h_i, alpha_j>`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::RatFn;

pub type Weight = Vec<i32>;
pub type WeylWord = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    F4,
    A1xA1,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Series::A => "A",
            Series::B => "B",
            Series::C => "C",
            Series::D => "D",
            Series::F4 => "F4",
            Series::A1xA1 => "A1xA1",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootDatum {
    pub series: Series,
    pub rank: usize,
    pub cartan: Vec<Vec<i32>>,
    pub d: Vec<i32>,
    pos_roots: Vec<Vec<i64>>,
    two_rho_check: Vec<i64>,
    cartan_inv: Mat<BigRational>,
}

pub fn build_datum(series: Series, n: usize) -> Result<RootDatum> {
    let bad = || Error::UnsupportedType(format!("{series}{n}"));
    let (cartan, d) = match series {
        Series::A => {
            if n < 1 {
                return Err(bad());
            }
            (chain(n), vec![1; n])
        }
        Series::B => {
            if n < 2 {
                return Err(bad());
            }
            let mut a = chain(n);
            a[n - 1][n - 2] = -2;
            let mut d = vec![2; n];
            d[n - 1] = 1;
            (a, d)
        }
        Series::C => {
            if n < 3 {
                return Err(bad());
            }
            let mut a = chain(n);
            a[n - 2][n - 1] = -2;
            let mut d = vec![1; n];
            d[n - 1] = 2;
            (a, d)
        }
        Series::D => {
            if n < 4 {
                return Err(bad());
            }
            let mut a = chain(n);
            a[n - 2][n - 1] = 0;
            a[n - 1][n - 2] = 0;
            a[n - 3][n - 1] = -1;
            a[n - 1][n - 3] = -1;
            (a, vec![1; n])
        }
        Series::F4 => {
            if n != 4 {
                return Err(bad());
            }
            let mut a = chain(4);
            a[2][1] = -2;
            (a, vec![2, 2, 1, 1])
        }
        Series::A1xA1 => {
            if n != 2 {
                return Err(bad());
            }
            (vec![vec![2, 0], vec![0, 2]], vec![1, 1])
        }
    };
    RootDatum::new(series, cartan, d)
}

fn chain(n: usize) -> Vec<Vec<i32>> {
    let mut a = vec![vec![0; n]; n];
    for i in 0..n {
        a[i][i] = 2;
        if i + 1 < n {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    }
    a
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl RootDatum {
    fn new(series: Series, cartan: Vec<Vec<i32>>, d: Vec<i32>) -> Result<Self> {
        let n = cartan.len();
        let cm = Mat::from_rows(cartan.iter().map(|r| r.iter().map(|&x| rat(x as i64)).collect()).collect());
        let cartan_inv = cm.inverse().ok_or_else(|| Error::Internal("singular Cartan matrix".into()))?;
        let mut dat = RootDatum { series, rank: n, cartan, d, pos_roots: Vec::new(), two_rho_check: vec![0; n], cartan_inv };
        dat.pos_roots = dat.enumerate_positive_roots();
        let mut acc = vec![BigRational::zero(); n];
        for beta in &dat.pos_roots {
            let db = dat.norm_half(beta);
            for j in 0..n {
                acc[j] += rat(beta[j] * dat.d[j] as i64) / rat(db);
            }
        }
        for j in 0..n {
            if !acc[j].is_integer() {
                return Err(Error::Internal("non-integral 2rho check".into()));
            }
            dat.two_rho_check[j] = acc[j].to_integer().to_i64().unwrap();
        }
        Ok(dat)
    }

    /// `(beta, beta) / 2` for `beta` in root coordinates.
    fn norm_half(&self, beta: &[i64]) -> i64 {
        let n = self.rank;
        let mut s = 0;
        for i in 0..n {
            for j in 0..n {
                s += beta[i] * beta[j] * (self.d[i] * self.cartan[i][j]) as i64;
            }
        }
        s / 2
    }

    fn enumerate_positive_roots(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut queue = VecDeque::new();
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            seen.insert(e.clone());
            queue.push_back(e);
        }
        while let Some(b) = queue.pop_front() {
            for i in 0..n {
                let p: i64 = (0..n).map(|j| self.cartan[i][j] as i64 * b[j]).sum();
                let mut s = b.clone();
                s[i] -= p;
                if s.iter().all(|&x| x >= 0) && seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn name(&self) -> String {
        match self.series {
            Series::A1xA1 => "A1xA1".into(),
            Series::F4 => "F4".into(),
            s => format!("{s}{}", self.rank),
        }
    }

    pub fn zero(&self) -> Weight {
        vec![0; self.rank]
    }

    pub fn fundamental(&self, i: usize) -> Weight {
        let mut w = self.zero();
        w[i] = 1;
        w
    }

    pub fn alpha(&self, j: usize) -> Weight {
        (0..self.rank).map(|i| self.cartan[i][j]).collect()
    }

    /// Positive roots in simple-root coordinates.
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.pos_roots
    }

    pub fn is_dominant(&self, mu: &[i32]) -> bool {
        mu.iter().all(|&x| x >= 0)
    }

    pub fn check_dominant(&self, mu: &[i32]) -> Result<()> {
        if mu.len() != self.rank {
            return Err(Error::DimensionMismatch(format!("{mu:?} for rank {}", self.rank)));
        }
        if self.is_dominant(mu) {
            Ok(())
        } else {
            Err(Error::NotDominant(fmt_weight(mu)))
        }
    }

    pub fn reflect(&self, i: usize, mu: &[i32]) -> Weight {
        let k = mu[i];
        (0..self.rank).map(|r| mu[r] - k * self.cartan[r][i]).collect()
    }

    /// `w mu` for `w = s_{w[0]} ... s_{w[r-1]}`.
    pub fn apply_word(&self, w: &[usize], mu: &[i32]) -> Weight {
        let mut m = mu.to_vec();
        for &i in w.iter().rev() {
            m = self.reflect(i, &m);
        }
        m
    }

    /// Coweight reflection `s_i h = h - <h, alpha_i> h_i` in the `h` basis.
    pub fn reflect_coweight(&self, i: usize, h: &[i32]) -> Vec<i32> {
        let p: i32 = (0..self.rank).map(|j| h[j] * self.cartan[j][i]).sum();
        let mut out = h.to_vec();
        out[i] -= p;
        out
    }

    pub fn apply_word_coweight(&self, w: &[usize], h: &[i32]) -> Vec<i32> {
        let mut m = h.to_vec();
        for &i in w.iter().rev() {
            m = self.reflect_coweight(i, &m);
        }
        m
    }

    /// `<h, mu>` for a coweight in the `h` basis.
    pub fn pairing(&self, h: &[i32], mu: &[i32]) -> i32 {
        h.iter().zip(mu).map(|(a, b)| a * b).sum()
    }

    /// `<2 rho_check, mu>`: positive on every simple root, so it refines the
    /// dominance order.
    pub fn height(&self, mu: &[i32]) -> i64 {
        self.two_rho_check.iter().zip(mu).map(|(&a, &b)| a * b as i64).sum()
    }

    /// Coordinates of `mu` in the simple roots (rational in general).
    pub fn root_coords(&self, mu: &[i32]) -> Vec<BigRational> {
        let v: Vec<BigRational> = mu.iter().map(|&x| rat(x as i64)).collect();
        self.cartan_inv.mul_vec(&v)
    }

    /// `mu >= nu` in the dominance order.
    pub fn dominates(&self, mu: &[i32], nu: &[i32]) -> bool {
        let diff: Vec<i32> = mu.iter().zip(nu).map(|(a, b)| a - b).collect();
        self.root_coords(&diff).iter().all(|c| c.is_integer() && *c >= BigRational::zero())
    }

    pub fn weyl_dimension(&self, lambda: &[i32]) -> u64 {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for beta in &self.pos_roots {
            let mut a = 0i64;
            let mut b = 0i64;
            for j in 0..self.rank {
                a += beta[j] * self.d[j] as i64 * (lambda[j] as i64 + 1);
                b += beta[j] * self.d[j] as i64;
            }
            num *= a;
            den *= b;
        }
        (num / den).to_u64().expect("dimension overflow")
    }

    /// Reduced word for the longest element of the parabolic subgroup on
    /// `subset`: reflect the sum of the relevant fundamental weights while a
    /// coordinate in `subset` stays positive.
    pub fn longest_word(&self, subset: &[usize]) -> WeylWord {
        let mut mu = self.zero();
        for &j in subset {
            mu[j] = 1;
        }
        let mut word = Vec::new();
        while let Some(&j) = subset.iter().find(|&&j| mu[j] > 0) {
            mu = self.reflect(j, &mu);
            word.push(j);
        }
        word.reverse();
        word
    }

    pub fn w0(&self) -> WeylWord {
        let all: Vec<usize> = (0..self.rank).collect();
        self.longest_word(&all)
    }

    /// `-w_0 lambda`.
    pub fn neg_w0(&self, lambda: &[i32]) -> Weight {
        self.apply_word(&self.w0(), lambda).iter().map(|x| -x).collect()
    }

    pub fn q_i(&self, i: usize) -> RatFn {
        RatFn::q_pow(self.d[i])
    }

    /// Exponent of `q` by which `K_i` acts on weight `mu`.
    pub fn k_exp(&self, i: usize, mu: &[i32]) -> i32 {
        self.d[i] * mu[i]
    }
}

pub fn fmt_weight(mu: &[i32]) -> String {
    let mut parts = Vec::new();
    for (i, &c) in mu.iter().enumerate() {
        match c {
            0 => {}
            1 => parts.push(format!("w{}", i + 1)),
            -1 => parts.push(format!("-w{}", i + 1)),
            _ => parts.push(format!("{c}w{}", i + 1)),
        }
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = parts[0].clone();
    for p in &parts[1..] {
        if p.starts_with('-') {
            s.push_str(p);
        } else {
            s.push('+');
            s.push_str(p);
        }
    }
    s
}

/// Parses `0`, `w2`, `2w1+w3`, `w1-w2`, `wn` (the last node).
pub fn parse_weight(s: &str, rank: usize) -> Result<Weight> {
    let bad = || Error::DimensionMismatch(format!("cannot parse weight {s:?} for rank {rank}"));
    let mut w = vec![0; rank];
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t == "0" || t.is_empty() {
        return Ok(w);
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for ch in t.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(b) => (-1, b),
            None => (1, term.strip_prefix('+').unwrap_or(&term)),
        };
        let pos = body.find('w').ok_or_else(bad)?;
        let coef: i32 = if pos == 0 { 1 } else { body[..pos].parse().map_err(|_| bad())? };
        let idx = &body[pos + 1..];
        let i: usize = if idx == "n" { rank } else { idx.parse().map_err(|_| bad())? };
        if i == 0 || i > rank {
            return Err(bad());
        }
        w[i - 1] += sign * coef;
    }
    Ok(w)
}

/// Integer kernel of `m` (rows of length `n`), as a Z-basis.
pub fn integer_kernel(m: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    // Column operations on m, mirrored on the identity u.
    let mut a: Vec<Vec<i64>> = m.to_vec();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut col = 0;
    for row in 0..a.len() {
        if col == n {
            break;
        }
        loop {
            let nz: Vec<usize> = (col..n).filter(|&j| a[row][j] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&j| a[row][j].abs()).unwrap();
            swap_cols(&mut a, &mut u, col, p);
            let mut done = true;
            for j in col + 1..n {
                let f = a[row][j] / a[row][col];
                if f != 0 {
                    for r in a.iter_mut() {
                        r[j] -= f * r[col];
                    }
                    for r in u.iter_mut() {
                        r[j] -= f * r[col];
                    }
                }
                if a[row][j] != 0 {
                    done = false;
                }
            }
            if done {
                col += 1;
                break;
            }
        }
    }
    (col..n).map(|j| (0..n).map(|i| u[i][j]).collect()).collect()
}

fn swap_cols(a: &mut [Vec<i64>], u: &mut [Vec<i64>], i: usize, j: usize) {
    if i == j {
        return;
    }
    for r in a.iter_mut() {
        r.swap(i, j);
    }
    for r in u.iter_mut() {
        r.swap(i, j);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PairKind {
    AI,
    AII,
    AIII,
    AIV,
    BII,
    CII,
    DII,
    FII,
}

impl PairKind {
    pub const ALL: [PairKind; 8] =
        [PairKind::AI, PairKind::AII, PairKind::AIII, PairKind::AIV, PairKind::BII, PairKind::CII, PairKind::DII, PairKind::FII];

    /// Smallest admissible rank.
    pub fn min_rank(self) -> usize {
        match self {
            PairKind::AI => 1,
            PairKind::AII => 3,
            PairKind::AIII => 2,
            PairKind::AIV => 2,
            PairKind::BII => 2,
            PairKind::CII => 3,
            PairKind::DII => 4,
            PairKind::FII => 4,
        }
    }

    /// Ranks exercised by the verification suites.
    pub fn test_ranks(self) -> Vec<usize> {
        match self {
            PairKind::AIV => vec![2, 3],
            PairKind::BII => vec![2, 3],
            PairKind::CII => vec![3, 4],
            k => vec![k.min_rank()],
        }
    }

    pub fn is_parametric(self) -> bool {
        matches!(self, PairKind::AIV | PairKind::BII | PairKind::CII | PairKind::DII)
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for PairKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PairKind::ALL
            .iter()
            .copied()
            .find(|k| k.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnsupportedType(s.into()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissiblePair {
    pub kind: PairKind,
    pub datum: RootDatum,
    pub black: Vec<usize>,
    pub tau: Vec<usize>,
    /// `varsigma[i]` for white nodes, `None` on black nodes.
    pub varsigma: Vec<Option<RatFn>>,
    /// Always zero here; kept so the `B_i` formula reads as printed.
    pub kappa: Vec<Option<RatFn>>,
    pub varpi: Weight,
    pub w_black: WeylWord,
}

pub fn admissible_pair(kind: PairKind, n: usize) -> Result<AdmissiblePair> {
    let bad = || Error::UnsupportedType(format!("{kind} with n={n}"));
    let q = RatFn::q_pow;
    // nodes below are 0-based
    let (series, rank, black, tau, sigma, varpi): (Series, usize, Vec<usize>, Vec<usize>, Vec<(usize, RatFn)>, Vec<(usize, i32)>) =
        match kind {
            PairKind::AI => {
                if n != 1 {
                    return Err(bad());
                }
                (Series::A, 1, vec![], vec![0], vec![(0, q(-1))], vec![(0, 2)])
            }
            PairKind::AII => {
                if n != 3 {
                    return Err(bad());
                }
                (Series::A, 3, vec![0, 2], vec![0, 1, 2], vec![(1, q(1))], vec![(1, 1)])
            }
            PairKind::AIII => {
                if n != 2 && n != 1 {
                    return Err(bad());
                }
                (Series::A1xA1, 2, vec![], vec![1, 0], vec![(0, q(0)), (1, q(0))], vec![(0, 1), (1, 1)])
            }
            PairKind::AIV => {
                if n < 2 {
                    return Err(bad());
                }
                let tau = (0..n).map(|i| n - 1 - i).collect();
                let sign = if n % 2 == 0 { 1 } else { -1 };
                let sn = RatFn::from_int(sign) * q(n as i32 - 1);
                (Series::A, n, (1..n - 1).collect(), tau, vec![(0, q(0)), (n - 1, sn)], vec![(0, 1), (n - 1, 1)])
            }
            PairKind::BII => {
                if n < 2 {
                    return Err(bad());
                }
                (Series::B, n, (1..n).collect(), (0..n).collect(), vec![(0, q(2 * n as i32 - 3))], vec![(0, 1)])
            }
            PairKind::CII => {
                if n < 3 {
                    return Err(bad());
                }
                let black = std::iter::once(0).chain(2..n).collect();
                (Series::C, n, black, (0..n).collect(), vec![(1, q(n as i32 - 1))], vec![(1, 1)])
            }
            PairKind::DII => {
                if n < 4 {
                    return Err(bad());
                }
                let mut tau: Vec<usize> = (0..n).collect();
                if n % 2 == 0 {
                    tau.swap(n - 2, n - 1);
                }
                (Series::D, n, (1..n).collect(), tau, vec![(0, q(n as i32 - 2))], vec![(0, 1)])
            }
            PairKind::FII => {
                if n != 4 {
                    return Err(bad());
                }
                (Series::F4, 4, vec![0, 1, 2], (0..4).collect(), vec![(3, q(5))], vec![(3, 1)])
            }
        };
    let datum = build_datum(series, rank)?;
    let mut varsigma = vec![None; rank];
    let mut kappa = vec![None; rank];
    for (i, s) in sigma {
        varsigma[i] = Some(s);
        kappa[i] = Some(RatFn::zero());
    }
    let mut vp = datum.zero();
    for (i, c) in varpi {
        vp[i] = c;
    }
    let w_black = datum.longest_word(&black);
    Ok(AdmissiblePair { kind, datum, black, tau, varsigma, kappa, varpi: vp, w_black })
}

impl AdmissiblePair {
    pub fn rank(&self) -> usize {
        self.datum.rank
    }

    pub fn name(&self) -> String {
        if self.kind.is_parametric() {
            format!("{}:n={}", self.kind, self.rank())
        } else {
            self.kind.to_string()
        }
    }

    pub fn is_black(&self, i: usize) -> bool {
        self.black.contains(&i)
    }

    pub fn white(&self) -> Vec<usize> {
        (0..self.rank()).filter(|i| !self.is_black(*i)).collect()
    }

    pub fn tau_weight(&self, mu: &[i32]) -> Weight {
        let mut out = vec![0; mu.len()];
        for i in 0..mu.len() {
            out[self.tau[i]] = mu[i];
        }
        out
    }

    /// `w_bullet tau mu`.
    pub fn theta_map(&self, mu: &[i32]) -> Weight {
        self.datum.apply_word(&self.w_black, &self.tau_weight(mu))
    }

    pub fn w_black_weight(&self, mu: &[i32]) -> Weight {
        self.datum.apply_word(&self.w_black, mu)
    }

    /// `nu + w_bullet tau nu`.
    pub fn nu_plus_theta(&self, nu: &[i32]) -> Weight {
        let t = self.theta_map(nu);
        nu.iter().zip(&t).map(|(a, b)| a + b).collect()
    }

    /// `m` with `nu + w_bullet tau nu = m varpi`.
    pub fn theta_weight(&self, nu: &[i32]) -> Result<usize> {
        self.datum.check_dominant(nu)?;
        let s = self.nu_plus_theta(nu);
        let (k, &c) = self.varpi.iter().enumerate().find(|(_, &c)| c != 0).expect("varpi is nonzero");
        if s[k] % c != 0 {
            return Err(Error::NotMultipleOfVarpi(fmt_weight(&s)));
        }
        let m = s[k] / c;
        if m < 0 || self.varpi.iter().zip(&s).any(|(&v, &x)| v * m != x) {
            return Err(Error::NotMultipleOfVarpi(fmt_weight(&s)));
        }
        Ok(m as usize)
    }

    /// A Z-basis of `Y^i = { h : h + w_bullet tau h = 0 }`.
    pub fn y_imath_basis(&self) -> Vec<Vec<i32>> {
        let n = self.rank();
        // columns of (1 + w tau) on the h basis
        let mut m = vec![vec![0i64; n]; n];
        for j in 0..n {
            let mut e = vec![0; n];
            e[self.tau[j]] = 1;
            let img = self.datum.apply_word_coweight(&self.w_black, &e);
            for i in 0..n {
                m[i][j] = img[i] as i64 + i64::from(i == j);
            }
        }
        integer_kernel(&m, n).into_iter().map(|v| v.into_iter().map(|x| x as i32).collect()).collect()
    }

    /// `rho_check_bullet` coefficients in the `h` basis, doubled.
    pub fn two_rho_check_black(&self) -> Vec<i64> {
        if self.black.is_empty() {
            return vec![0; self.rank()];
        }
        let n = self.rank();
        let sub = sub_datum(&self.datum, &self.black);
        let mut out = vec![0i64; n];
        let t = sub.two_rho_check.clone();
        for (k, &j) in self.black.iter().enumerate() {
            out[j] = t[k];
        }
        out
    }

    /// Invariant checks; returns a description of the first failure.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.rank();
        let dat = &self.datum;
        for i in 0..n {
            if self.tau[self.tau[i]] != i {
                return Err(format!("tau^2 != id at {i}"));
            }
            if self.is_black(i) != self.is_black(self.tau[i]) {
                return Err(format!("tau does not preserve I_black at {i}"));
            }
            for j in 0..n {
                if dat.cartan[self.tau[i]][self.tau[j]] != dat.cartan[i][j] {
                    return Err(format!("tau does not preserve the Cartan matrix at ({i},{j})"));
                }
            }
        }
        for &j in &self.black {
            let img = self.w_black_weight(&dat.alpha(j));
            let want: Weight = dat.alpha(self.tau[j]).iter().map(|x| -x).collect();
            if img != want {
                return Err(format!("w_bullet(alpha_{}) != -alpha_tau", j + 1));
            }
        }
        let r = self.two_rho_check_black();
        for i in self.white() {
            if self.tau[i] == i {
                let p: i64 = (0..n).map(|k| r[k] * dat.cartan[k][i] as i64).sum();
                if p % 2 != 0 {
                    return Err(format!("<rho_check_bullet, alpha_{}> not integral", i + 1));
                }
            }
        }
        for i in 0..n {
            if let Err(e) = self.theta_weight(&dat.fundamental(i)) {
                return Err(format!("fundamental {}: {e}", i + 1));
            }
        }
        Ok(())
    }
}

/// Root datum of the Levi subdiagram on `nodes` (the Cartan submatrix).
fn sub_datum(dat: &RootDatum, nodes: &[usize]) -> RootDatum {
    let cartan: Vec<Vec<i32>> = nodes.iter().map(|&i| nodes.iter().map(|&j| dat.cartan[i][j]).collect()).collect();
    let d = nodes.iter().map(|&i| dat.d[i]).collect();
    RootDatum::new(dat.series, cartan, d).expect("Levi subdatum")
}

/// Number of positive roots of the parabolic subsystem on `nodes`.
pub fn parabolic_positive_roots(dat: &RootDatum, nodes: &[usize]) -> usize {
    if nodes.is_empty() {
        return 0;
    }
    sub_datum(dat, nodes).positive_roots().len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric_oracle(d: &RootDatum) -> bool {
        let n = d.rank;
        (0..n).all(|i| {
            d.cartan[i][i] == 2
                && (0..n).all(|j| i == j || d.cartan[i][j] <= 0)
                && (0..n).all(|j| d.d[i] * d.cartan[i][j] == d.d[j] * d.cartan[j][i])
        })
    }

    #[test]
    fn cartan_shapes() {
        let a3 = build_datum(Series::A, 3).unwrap();
        assert_eq!(a3.cartan[0][1], -1);
        assert_eq!(a3.cartan[1][2], -1);
        assert_eq!(a3.cartan[0][2], 0);
        assert_eq!(a3.d, vec![1, 1, 1]);
        let aa = build_datum(Series::A1xA1, 2).unwrap();
        assert_eq!(aa.cartan, vec![vec![2, 0], vec![0, 2]]);
        let f4 = build_datum(Series::F4, 4).unwrap();
        assert_eq!(f4.cartan[2][1], -2);
        for (s, n) in [(Series::A, 4), (Series::B, 3), (Series::C, 4), (Series::D, 5), (Series::F4, 4), (Series::A1xA1, 2)] {
            assert!(symmetric_oracle(&build_datum(s, n).unwrap()));
        }
        assert!(build_datum(Series::D, 3).is_err());
        assert!(build_datum(Series::F4, 3).is_err());
    }

    #[test]
    fn positive_root_counts() {
        let count = |s, n| build_datum(s, n).unwrap().positive_roots().len();
        assert_eq!(count(Series::A, 3), 6);
        assert_eq!(count(Series::B, 3), 9);
        assert_eq!(count(Series::C, 4), 16);
        assert_eq!(count(Series::D, 4), 12);
        assert_eq!(count(Series::F4, 4), 24);
    }

    #[test]
    fn weyl_dimensions() {
        let f4 = build_datum(Series::F4, 4).unwrap();
        assert_eq!(f4.weyl_dimension(&[0, 0, 0, 1]), 26);
        assert_eq!(f4.weyl_dimension(&[1, 0, 0, 0]), 52);
        assert_eq!(f4.weyl_dimension(&[0, 0, 0, 2]), 324);
        let c3 = build_datum(Series::C, 3).unwrap();
        assert_eq!(c3.weyl_dimension(&[0, 1, 0]), 14);
        let b3 = build_datum(Series::B, 3).unwrap();
        assert_eq!(b3.weyl_dimension(&[1, 0, 0]), 7);
        assert_eq!(b3.weyl_dimension(&[0, 0, 1]), 8);
        let d4 = build_datum(Series::D, 4).unwrap();
        assert_eq!(d4.weyl_dimension(&[1, 0, 0, 0]), 8);
    }

    #[test]
    fn longest_words() {
        let a3 = build_datum(Series::A, 3).unwrap();
        let w = a3.longest_word(&[0, 2]);
        assert_eq!(w.len(), 2);
        assert_eq!(a3.apply_word(&w, &[1, 1, 1]), a3.apply_word(&[0, 2], &[1, 1, 1]));
        assert!(a3.longest_word(&[]).is_empty());
        for n in [2, 3, 4] {
            let b = build_datum(Series::B, n).unwrap();
            let nodes: Vec<usize> = (1..n).collect();
            assert_eq!(b.longest_word(&nodes).len(), (n - 1) * (n - 1));
        }
        let f4 = build_datum(Series::F4, 4).unwrap();
        assert_eq!(f4.w0().len(), 24);
        assert_eq!(f4.neg_w0(&[0, 0, 0, 1]), vec![0, 0, 0, 1]);
        let a2 = build_datum(Series::A, 2).unwrap();
        assert_eq!(a2.neg_w0(&[1, 0]), vec![0, 1]);
    }

    #[test]
    fn registry_parameters() {
        let p = admissible_pair(PairKind::AI, 1).unwrap();
        assert!(p.black.is_empty());
        assert_eq!(p.varsigma[0], Some(RatFn::q_pow(-1)));
        assert_eq!(p.varpi, vec![2]);
        let p = admissible_pair(PairKind::CII, 3).unwrap();
        assert_eq!(p.varsigma[1], Some(RatFn::q_pow(2)));
        assert_eq!(p.varpi, vec![0, 1, 0]);
        for n in [2, 3, 4] {
            let p = admissible_pair(PairKind::AIV, n).unwrap();
            assert_eq!(p.varsigma[0], Some(RatFn::one()));
            let s = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(p.varsigma[n - 1], Some(RatFn::from_int(s) * RatFn::q_pow(n as i32 - 1)));
        }
        assert!(admissible_pair(PairKind::DII, 3).is_err());
        assert!(admissible_pair(PairKind::CII, 2).is_err());
    }

    #[test]
    fn registry_invariants_and_theta_tables() {
        for k in PairKind::ALL {
            for n in k.test_ranks().into_iter().chain([k.min_rank() + usize::from(k.is_parametric()) * 2]) {
                let p = admissible_pair(k, n).unwrap();
                p.check_invariants().unwrap_or_else(|e| panic!("{}: {e}", p.name()));
            }
        }
        let aii = admissible_pair(PairKind::AII, 3).unwrap();
        let m: Vec<usize> = (0..3).map(|i| aii.theta_weight(&aii.datum.fundamental(i)).unwrap()).collect();
        assert_eq!(m, vec![1, 2, 1]);
        let fii = admissible_pair(PairKind::FII, 4).unwrap();
        let m: Vec<usize> = (0..4).map(|i| fii.theta_weight(&fii.datum.fundamental(i)).unwrap()).collect();
        assert_eq!(m, vec![2, 4, 3, 2]);
        for n in [2, 3, 4] {
            let b = admissible_pair(PairKind::BII, n).unwrap();
            let m: Vec<usize> = (0..n).map(|i| b.theta_weight(&b.datum.fundamental(i)).unwrap()).collect();
            let mut want = vec![2; n];
            want[n - 1] = 1;
            assert_eq!(m, want);
        }
        for n in [3, 4] {
            let c = admissible_pair(PairKind::CII, n).unwrap();
            let m: Vec<usize> = (0..n).map(|i| c.theta_weight(&c.datum.fundamental(i)).unwrap()).collect();
            let mut want = vec![2; n];
            want[0] = 1;
            assert_eq!(m, want);
        }
        let d = admissible_pair(PairKind::DII, 4).unwrap();
        let m: Vec<usize> = (0..4).map(|i| d.theta_weight(&d.datum.fundamental(i)).unwrap()).collect();
        assert_eq!(m, vec![2, 2, 1, 1]);
        assert_eq!(aii.theta_weight(&[0, 0, 0]).unwrap(), 0);
        assert!(matches!(aii.theta_weight(&[-1, 0, 0]), Err(Error::NotDominant(_))));
    }

    #[test]
    fn y_imath() {
        let ai = admissible_pair(PairKind::AI, 1).unwrap();
        assert!(ai.y_imath_basis().is_empty());
        let aiii = admissible_pair(PairKind::AIII, 2).unwrap();
        let b = aiii.y_imath_basis();
        assert_eq!(b.len(), 1);
        assert!(b[0] == vec![1, -1] || b[0] == vec![-1, 1]);
        let aii = admissible_pair(PairKind::AII, 3).unwrap();
        let b = aii.y_imath_basis();
        assert_eq!(b.len(), 2);
        for h in &b {
            let img = aii.datum.apply_word_coweight(&aii.w_black, h);
            assert!(h.iter().zip(&img).all(|(a, c)| a + c == 0));
        }
    }

    #[test]
    fn weight_parsing() {
        assert_eq!(parse_weight("2w1+w3", 3).unwrap(), vec![2, 0, 1]);
        assert_eq!(parse_weight("wn", 4).unwrap(), vec![0, 0, 0, 1]);
        assert_eq!(parse_weight("w1-w2", 2).unwrap(), vec![1, -1]);
        assert_eq!(parse_weight("0", 2).unwrap(), vec![0, 0]);
        assert!(parse_weight("w5", 2).is_err());
        assert_eq!(fmt_weight(&[2, 0, -1]), "2w1-w3");
    }
}
