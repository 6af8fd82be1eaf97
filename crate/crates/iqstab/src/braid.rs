//! Lusztig's braid operators `T''_{i,1}` on integrable modules.

use num_traits::One;

use crate::linalg::{SVec, SpMat};
use crate::rep::{Gen, Module};
use crate::scalar::RatFn;

fn sign(k: i64) -> RatFn {
    if k % 2 == 0 {
        RatFn::one()
    } else {
        RatFn::from_int(-1)
    }
}

/// Splits `v` into weight components.
fn components(m: &Module, v: &SVec) -> Vec<SVec> {
    let mut parts: std::collections::BTreeMap<&Vec<i32>, SVec> = Default::default();
    for (k, x) in v.iter() {
        parts.entry(&m.weights[k]).or_default().add_term(k, x);
    }
    parts.into_values().collect()
}

/// The string of divided powers `X^(0) v, X^(1) v, ...` up to the first zero.
fn string(m: &Module, g: Gen, i: usize, v: &SVec) -> Vec<SVec> {
    let mut out = vec![v.clone()];
    let mut k = 1;
    loop {
        let w = m.act(g, i, out.last().unwrap()).scale(&crate::scalar::qint_f(k, m.datum.d[i]).inv());
        if w.is_zero() {
            return out;
        }
        out.push(w);
        k += 1;
    }
}

/// `T''_{i,1}(v) = sum_{-a+b-c=n} (-1)^b q_i^{-ac+b} E^(a) F^(b) E^(c) v`.
pub fn t_i(m: &Module, i: usize, v: &SVec) -> SVec {
    rank_one(m, i, v, false)
}

/// The inverse `T'_{i,-1}(v) = sum_{a-b+c=n} (-1)^b q_i^{ac-b} F^(a) E^(b) F^(c) v`.
pub fn t_i_inv(m: &Module, i: usize, v: &SVec) -> SVec {
    rank_one(m, i, v, true)
}

fn rank_one(m: &Module, i: usize, v: &SVec, inverse: bool) -> SVec {
    let di = m.datum.d[i];
    let (outer, inner) = if inverse { (Gen::F, Gen::E) } else { (Gen::E, Gen::F) };
    let mut out = SVec::new();
    for comp in components(m, v) {
        let k0 = comp.iter().next().unwrap().0;
        let n = m.weights[k0][i] as i64;
        for (c, vc) in string(m, outer, i, &comp).into_iter().enumerate() {
            for (b, vb) in string(m, inner, i, &vc).into_iter().enumerate() {
                let (b, c) = (b as i64, c as i64);
                // T: -a+b-c = n, T^-1: a-b+c = n
                let a = if inverse { n + b - c } else { b - c - n };
                if a < 0 {
                    continue;
                }
                let va = m.divided_power(outer, i, a as u32, &vb);
                if va.is_zero() {
                    continue;
                }
                let e = if inverse { a * c - b } else { -a * c + b };
                let coef = &sign(b) * &RatFn::q_pow(di * e as i32);
                out.axpy(&coef, &va);
            }
        }
    }
    out
}

pub fn t_i_matrix(m: &Module, i: usize, inverse: bool) -> SpMat {
    SpMat {
        nrows: m.dim(),
        cols: (0..m.dim()).map(|k| if inverse { t_i_inv(m, i, &SVec::unit(k)) } else { t_i(m, i, &SVec::unit(k)) }).collect(),
    }
}

/// `T_w = T_{i_1} ... T_{i_r}` for `w = s_{i_1} ... s_{i_r}` and its inverse.
pub fn t_w_matrices(m: &Module, w: &[usize]) -> (SpMat, SpMat) {
    let mut t = SpMat::identity(m.dim());
    let mut tinv = SpMat::identity(m.dim());
    for &i in w {
        t = t.compose(&t_i_matrix(m, i, false));
        tinv = t_i_matrix(m, i, true).compose(&tinv);
    }
    (t, tinv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::{irreducible, DEFAULT_SIZE_BOUND};
    use crate::rootdata::{build_datum, RootDatum, Series};
    use crate::scalar::qfact_f;
    use std::sync::Arc;

    fn module(s: Series, n: usize, l: &[i32]) -> Module {
        let d = Arc::new(build_datum(s, n).unwrap());
        irreducible(&d, l, DEFAULT_SIZE_BOUND).unwrap().module
    }

    fn dp(m: &Module, g: Gen, i: usize, a: u32) -> SpMat {
        let mut x = SpMat::identity(m.dim());
        for _ in 0..a {
            x = m.gen(g, i).compose(&x);
        }
        x.scale(&qfact_f(a, m.datum.d[i]).inv())
    }

    /// Algebra-side images of the generators under `T''_{i,1}`.
    fn t_on_gen(m: &Module, d: &RootDatum, i: usize, g: Gen, j: usize) -> SpMat {
        let ki = m.ki_matrix(i, 1);
        let kinv = m.ki_matrix(i, -1);
        if i == j {
            return match g {
                Gen::E => m.f[i].compose(&ki).scale(&RatFn::from_int(-1)),
                Gen::F => kinv.compose(&m.e[i]).scale(&RatFn::from_int(-1)),
            };
        }
        let top = -d.cartan[i][j] as u32;
        let mut acc = SpMat::zeros(m.dim(), m.dim());
        for r in 0..=top {
            let s = top - r;
            let term = match g {
                Gen::E => dp(m, Gen::E, i, s).compose(&m.e[j]).compose(&dp(m, Gen::E, i, r)).scale(&(&sign(r as i64) * &RatFn::q_pow(-d.d[i] * r as i32))),
                Gen::F => dp(m, Gen::F, i, r).compose(&m.f[j]).compose(&dp(m, Gen::F, i, s)).scale(&(&sign(r as i64) * &RatFn::q_pow(d.d[i] * r as i32))),
            };
            acc = acc.add(&term);
        }
        acc
    }

    #[test]
    fn rank_one_closed_form() {
        let m = module(Series::A, 1, &[1]);
        assert_eq!(t_i(&m, 0, &SVec::unit(0)), SVec::unit(1).scale(&RatFn::monomial(-1, 1)));
        assert_eq!(t_i(&m, 0, &SVec::unit(1)), SVec::unit(0));
        let triv = Module::trivial(m.datum.clone());
        assert_eq!(t_i_matrix(&triv, 0, false), SpMat::identity(1));
    }

    #[test]
    fn intertwining_oracle() {
        for (s, n, l) in [(Series::A, 2, vec![1, 0]), (Series::B, 2, vec![1, 0]), (Series::B, 2, vec![0, 1]), (Series::C, 3, vec![0, 1, 0])] {
            let m = module(s, n, &l);
            let d = m.datum.clone();
            for i in 0..n {
                let t = t_i_matrix(&m, i, false);
                let tinv = t_i_matrix(&m, i, true);
                assert_eq!(t.compose(&tinv), SpMat::identity(m.dim()));
                for j in 0..n {
                    for g in [Gen::E, Gen::F] {
                        let lhs = t.compose(m.gen(g, j));
                        let rhs = t_on_gen(&m, &d, i, g, j).compose(&t);
                        assert_eq!(lhs, rhs, "{s} T_{i} on {g:?}_{j}");
                    }
                }
                for k in 0..m.dim() {
                    let img = t.apply(&SVec::unit(k));
                    assert_eq!(m.weight_of(&img).unwrap(), d.reflect(i, &m.weights[k]));
                }
            }
        }
    }

    #[test]
    fn braid_relations() {
        for (s, n, l) in [(Series::A, 2, vec![1, 1]), (Series::B, 2, vec![1, 1]), (Series::D, 4, vec![1, 0, 0, 0]), (Series::F4, 4, vec![0, 0, 0, 1])] {
            let m = module(s, n, &l);
            let d = m.datum.clone();
            for i in 0..n {
                for j in i + 1..n {
                    let len = match d.cartan[i][j] * d.cartan[j][i] {
                        0 => 2,
                        1 => 3,
                        2 => 4,
                        _ => 6,
                    };
                    let w1: Vec<usize> = (0..len).map(|k| if k % 2 == 0 { i } else { j }).collect();
                    let w2: Vec<usize> = (0..len).map(|k| if k % 2 == 0 { j } else { i }).collect();
                    assert_eq!(t_w_matrices(&m, &w1).0, t_w_matrices(&m, &w2).0, "{s} braid {i} {j}");
                }
            }
        }
    }
}
