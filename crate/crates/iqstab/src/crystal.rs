//! Finite seminormal crystals: tensor products, components, parabolic
//! components and the transport maps between them.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rootdata::{fmt_weight, RootDatum, Weight};

/// Image of each element under a crystal morphism (`None` is `0`).
pub type CrystalMap = Vec<Option<usize>>;

#[derive(Clone, Debug, PartialEq)]
pub struct Crystal {
    pub rank: usize,
    pub weights: Vec<Weight>,
    pub labels: Vec<String>,
    pub e: Vec<Vec<Option<usize>>>,
    pub f: Vec<Vec<Option<usize>>>,
    pub eps: Vec<Vec<i32>>,
    pub phi: Vec<Vec<i32>>,
}

impl Crystal {
    /// Builds a seminormal crystal from its raising arrows.
    pub fn from_raising(rank: usize, weights: Vec<Weight>, labels: Vec<String>, e: Vec<Vec<Option<usize>>>) -> Result<Self> {
        let n = weights.len();
        let mut f = vec![vec![None; n]; rank];
        for i in 0..rank {
            for b in 0..n {
                if let Some(c) = e[i][b] {
                    if f[i][c].is_some() {
                        return Err(Error::Internal(format!("two raising arrows into {} along {}", labels[c], i + 1)));
                    }
                    f[i][c] = Some(b);
                }
            }
        }
        let mut eps = vec![vec![0; rank]; n];
        let mut phi = vec![vec![0; rank]; n];
        for i in 0..rank {
            for b in 0..n {
                let mut k = 0;
                let mut c = b;
                while let Some(d) = e[i][c] {
                    k += 1;
                    c = d;
                }
                eps[b][i] = k;
                let mut k = 0;
                let mut c = b;
                while let Some(d) = f[i][c] {
                    k += 1;
                    c = d;
                }
                phi[b][i] = k;
            }
        }
        Ok(Crystal { rank, weights, labels, e, f, eps, phi })
    }

    pub fn trivial(rank: usize) -> Self {
        Crystal {
            rank,
            weights: vec![vec![0; rank]],
            labels: vec!["b0".into()],
            e: vec![vec![None]; rank],
            f: vec![vec![None]; rank],
            eps: vec![vec![0; rank]],
            phi: vec![vec![0; rank]],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Checks the crystal axioms, including seminormality.
    pub fn check(&self, datum: &RootDatum) -> std::result::Result<(), String> {
        for b in 0..self.len() {
            for i in 0..self.rank {
                if let Some(c) = self.e[i][b] {
                    if self.f[i][c] != Some(b) {
                        return Err(format!("E/F mismatch at {} along {}", self.labels[b], i + 1));
                    }
                    let want: Weight = self.weights[b].iter().zip(datum.alpha(i)).map(|(x, y)| x + y).collect();
                    if self.weights[c] != want {
                        return Err(format!("E_{} breaks weight at {}", i + 1, self.labels[b]));
                    }
                }
                if let Some(c) = self.f[i][b] {
                    if self.e[i][c] != Some(b) {
                        return Err(format!("F/E mismatch at {} along {}", self.labels[b], i + 1));
                    }
                }
                if self.phi[b][i] - self.eps[b][i] != self.weights[b][i] {
                    return Err(format!("phi - eps != <h_{}, wt> at {}", i + 1, self.labels[b]));
                }
                let (mut k, mut c) = (0, b);
                while let Some(d) = self.e[i][c] {
                    k += 1;
                    c = d;
                }
                if k != self.eps[b][i] {
                    return Err(format!("eps_{} is not the string length at {}", i + 1, self.labels[b]));
                }
                let (mut k, mut c) = (0, b);
                while let Some(d) = self.f[i][c] {
                    k += 1;
                    c = d;
                }
                if k != self.phi[b][i] {
                    return Err(format!("phi_{} is not the string length at {}", i + 1, self.labels[b]));
                }
            }
        }
        Ok(())
    }

    /// Tensor product with index `b1 * |B2| + b2`.
    pub fn tensor(b1: &Crystal, b2: &Crystal) -> Crystal {
        let rank = b1.rank;
        let n2 = b2.len();
        let n = b1.len() * n2;
        let mut weights = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        let mut eps = Vec::with_capacity(n);
        let mut phi = Vec::with_capacity(n);
        let mut e = vec![vec![None; n]; rank];
        let mut f = vec![vec![None; n]; rank];
        for x in 0..b1.len() {
            for y in 0..n2 {
                let k = x * n2 + y;
                let (w1, w2) = (&b1.weights[x], &b2.weights[y]);
                weights.push(w1.iter().zip(w2).map(|(a, b)| a + b).collect());
                labels.push(format!("{}(x){}", b1.labels[x], b2.labels[y]));
                let mut ek = vec![0; rank];
                let mut pk = vec![0; rank];
                for i in 0..rank {
                    let (e1, p1) = (b1.eps[x][i], b1.phi[x][i]);
                    let (e2, p2) = (b2.eps[y][i], b2.phi[y][i]);
                    ek[i] = (e1 - w2[i]).max(e2);
                    pk[i] = p1.max(p2 + w1[i]);
                    e[i][k] = if e1 > p2 { b1.e[i][x].map(|x2| x2 * n2 + y) } else { b2.e[i][y].map(|y2| x * n2 + y2) };
                    f[i][k] = if e1 < p2 { b2.f[i][y].map(|y2| x * n2 + y2) } else { b1.f[i][x].map(|x2| x2 * n2 + y) };
                }
                eps.push(ek);
                phi.push(pk);
            }
        }
        Crystal { rank, weights, labels, e, f, eps, phi }
    }

    pub fn is_hw(&self, b: usize) -> bool {
        (0..self.rank).all(|i| self.e[i][b].is_none())
    }

    pub fn hw_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&b| self.is_hw(b)).collect()
    }

    /// Connected component of `b`, sorted.
    pub fn component(&self, b: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::from([b]);
        seen[b] = true;
        while let Some(c) = queue.pop_front() {
            out.push(c);
            for i in 0..self.rank {
                for d in [self.e[i][c], self.f[i][c]].into_iter().flatten() {
                    if !seen[d] {
                        seen[d] = true;
                        queue.push_back(d);
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for b in 0..self.len() {
            if !seen[b] {
                let c = self.component(b);
                for &x in &c {
                    seen[x] = true;
                }
                out.push(c);
            }
        }
        out
    }

    /// Elements reachable from `b` by `F_j`, `j` in `subset` (BFS order).
    pub fn parabolic_component(&self, b: usize, subset: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::from([b]);
        seen[b] = true;
        while let Some(c) = queue.pop_front() {
            out.push(c);
            for &j in subset {
                if let Some(d) = self.f[j][c] {
                    if !seen[d] {
                        seen[d] = true;
                        queue.push_back(d);
                    }
                }
            }
        }
        out
    }

    /// `{ b in comp | eps_i(b) <= <h_i, mu> for all i }`.
    pub fn epsilon_filter(&self, comp: &[usize], mu: &[i32]) -> Vec<usize> {
        comp.iter().copied().filter(|&b| (0..self.rank).all(|i| self.eps[b][i] <= mu[i])).collect()
    }

    /// The element of `comp` killed by every `F_j`, `j` in `subset`.
    pub fn lowest_in(&self, comp: &[usize], subset: &[usize]) -> Option<usize> {
        let mut it = comp.iter().copied().filter(|&b| subset.iter().all(|&j| self.f[j][b].is_none()));
        let b = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some(b)
    }

    /// A word `j_1 .. j_r` with `b = E_{j_1} .. E_{j_r} anchor`, found by BFS
    /// from `anchor` along raising arrows in `subset`, trying nodes in the
    /// given order.  The word is returned in application order.
    pub fn raising_word(&self, anchor: usize, b: usize, order: &[usize]) -> Option<Vec<usize>> {
        let mut prev: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        let mut queue = VecDeque::from([anchor]);
        let mut seen = vec![false; self.len()];
        seen[anchor] = true;
        while let Some(c) = queue.pop_front() {
            if c == b {
                let mut word = Vec::new();
                let mut x = c;
                while x != anchor {
                    let (p, j) = prev[&x];
                    word.push(j);
                    x = p;
                }
                word.reverse();
                return Some(word);
            }
            for &j in order {
                if let Some(d) = self.e[j][c] {
                    if !seen[d] {
                        seen[d] = true;
                        prev.insert(d, (c, j));
                        queue.push_back(d);
                    }
                }
            }
        }
        None
    }

    /// Applies raising operators in application order.
    pub fn apply_raising(&self, start: usize, word: &[usize]) -> Option<usize> {
        let mut c = start;
        for &j in word {
            c = self.e[j][c]?;
        }
        Some(c)
    }

    pub fn sub_crystal(&self, keep: &[usize]) -> Result<Crystal> {
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(k, &b)| (b, k)).collect();
        let remap = |x: Option<usize>| -> Result<Option<usize>> {
            match x {
                None => Ok(None),
                Some(c) => pos.get(&c).map(|&k| Some(k)).ok_or_else(|| Error::NotBasedSpan(format!("arrow leaves subset at {}", self.labels[c]))),
            }
        };
        let mut e = vec![Vec::with_capacity(keep.len()); self.rank];
        let mut f = vec![Vec::with_capacity(keep.len()); self.rank];
        for i in 0..self.rank {
            for &b in keep {
                e[i].push(remap(self.e[i][b])?);
                f[i].push(remap(self.f[i][b])?);
            }
        }
        Ok(Crystal {
            rank: self.rank,
            weights: keep.iter().map(|&b| self.weights[b].clone()).collect(),
            labels: keep.iter().map(|&b| self.labels[b].clone()).collect(),
            e,
            f,
            eps: keep.iter().map(|&b| self.eps[b].clone()).collect(),
            phi: keep.iter().map(|&b| self.phi[b].clone()).collect(),
        })
    }

    /// DOT rendering: node label is weight plus ordinal within the weight.
    pub fn to_dot(&self) -> String {
        let mut ord: BTreeMap<&Weight, usize> = BTreeMap::new();
        let mut s = String::from("digraph crystal {\n");
        for b in 0..self.len() {
            let k = ord.entry(&self.weights[b]).or_insert(0);
            let _ = writeln!(s, "  n{b} [label=\"{}#{}\"];", fmt_weight(&self.weights[b]), *k);
            *k += 1;
        }
        for i in 0..self.rank {
            for b in 0..self.len() {
                if let Some(c) = self.f[i][b] {
                    let _ = writeln!(s, "  n{b} -> n{c} [label=\"{}\"];", i + 1);
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Checks that `map` is a strict morphism: weights preserved and arrows
/// commute wherever the image is nonzero.
pub fn check_strict(src: &Crystal, tgt: &Crystal, map: &CrystalMap) -> std::result::Result<(), String> {
    for b in 0..src.len() {
        let Some(t) = map[b] else { continue };
        if src.weights[b] != tgt.weights[t] {
            return Err(format!("weight not preserved at {}", src.labels[b]));
        }
        for i in 0..src.rank {
            for (sa, ta) in [(&src.e, &tgt.e), (&src.f, &tgt.f)] {
                let lhs = sa[i][b].and_then(|c| map[c]);
                let rhs = ta[i][t];
                if lhs != rhs {
                    return Err(format!("arrow {} not preserved at {}", i + 1, src.labels[b]));
                }
            }
        }
    }
    Ok(())
}

/// Extends images of highest weight elements along lowering arrows.
pub fn extend_from_hw(src: &Crystal, tgt: &Crystal, hw_images: &BTreeMap<usize, Option<usize>>) -> Result<CrystalMap> {
    let mut map: CrystalMap = vec![None; src.len()];
    let mut done = vec![false; src.len()];
    for (&h, &img) in hw_images {
        let mut queue = VecDeque::from([(h, img)]);
        done[h] = true;
        map[h] = img;
        while let Some((c, t)) = queue.pop_front() {
            for i in 0..src.rank {
                if let Some(d) = src.f[i][c] {
                    if done[d] {
                        continue;
                    }
                    let td = match t {
                        None => None,
                        Some(t) => Some(tgt.f[i][t].ok_or_else(|| Error::Internal(format!("image of {} dies under F_{}", src.labels[c], i + 1)))?),
                    };
                    done[d] = true;
                    map[d] = td;
                    queue.push_back((d, td));
                }
            }
        }
    }
    if let Some(b) = done.iter().position(|x| !x) {
        return Err(Error::Internal(format!("element {} not reached from a highest weight element", src.labels[b])));
    }
    Ok(map)
}

/// `C_{I_bullet}(b_lambda)` inside `B(lambda)` together with its lowest
/// element `b_{w_bullet lambda}`.
#[derive(Clone, Debug)]
pub struct ParabolicComponent {
    pub elements: Vec<usize>,
    pub lowest: usize,
}

pub fn parabolic(b: &Crystal, top: usize, black: &[usize]) -> Result<ParabolicComponent> {
    let elements = b.parabolic_component(top, black);
    let lowest = b.lowest_in(&elements, black).ok_or_else(|| Error::Internal("parabolic component has no unique lowest element".into()))?;
    Ok(ParabolicComponent { elements, lowest })
}

/// The weight characterisation `{ b | wt(b) >= w_bullet lambda }` of the
/// parabolic component.
pub fn parabolic_by_weight(b: &Crystal, datum: &RootDatum, lambda: &[i32], w_black: &[usize]) -> Vec<usize> {
    let low = datum.apply_word(w_black, lambda);
    (0..b.len()).filter(|&x| datum.dominates(&b.weights[x], &low)).collect()
}

/// Transport between parabolic components along raising words anchored at
/// the lowest elements.
pub struct Transport<'a> {
    pub src: &'a Crystal,
    pub src_comp: &'a ParabolicComponent,
    pub tgt: &'a Crystal,
    pub tgt_comp: &'a ParabolicComponent,
    pub black: Vec<usize>,
}

impl Transport<'_> {
    fn image(&self, from: &Crystal, from_comp: &ParabolicComponent, to: &Crystal, to_comp: &ParabolicComponent, b: usize) -> Result<Option<usize>> {
        let fwd = self.black.clone();
        let mut rev = self.black.clone();
        rev.reverse();
        let mut out = None;
        for (k, order) in [fwd, rev].iter().enumerate() {
            let w = from
                .raising_word(from_comp.lowest, b, order)
                .ok_or_else(|| Error::Internal(format!("{} not in the parabolic component", from.labels[b])))?;
            let img = to.apply_raising(to_comp.lowest, &w);
            if k == 0 {
                out = img;
            } else if out != img {
                return Err(Error::IllDefinedTransport(from.labels[b].clone()));
            }
        }
        Ok(out)
    }

    /// `iota`: from `C(b_lambda)` into `C(b_{lambda + tau nu})`.
    pub fn iota(&self, b: usize) -> Result<usize> {
        self.image(self.src, self.src_comp, self.tgt, self.tgt_comp, b)?
            .ok_or_else(|| Error::IllDefinedTransport(format!("iota({}) vanishes", self.src.labels[b])))
    }

    /// `pi`: from `C(b_{lambda + tau nu})` back to `C(b_lambda)`, or `0`.
    pub fn pi(&self, b: usize) -> Result<Option<usize>> {
        self.image(self.tgt, self.tgt_comp, self.src, self.src_comp, b)
    }
}
