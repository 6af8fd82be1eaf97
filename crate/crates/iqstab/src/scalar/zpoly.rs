//! Integer Laurent polynomials, the storage layer behind [`RatFn`](super::RatFn).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::fp::Fp;

/// `sum_k c[k] q^(low + k)`; `c` has no zero at either end, and the zero
/// polynomial is the empty vector with `low == 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub(crate) struct ZPoly {
    pub low: i32,
    pub c: Vec<BigInt>,
}

impl ZPoly {
    pub fn zero() -> Self {
        ZPoly { low: 0, c: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(n: BigInt) -> Self {
        Self::monomial(n, 0)
    }

    pub fn monomial(coef: BigInt, e: i32) -> Self {
        if coef.is_zero() {
            Self::zero()
        } else {
            ZPoly { low: e, c: vec![coef] }
        }
    }

    pub fn from_parts(low: i32, c: Vec<BigInt>) -> Self {
        ZPoly { low, c }.trim()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.c.len() == 1 && self.c[0].is_one()
    }

    /// Constant in the sense of `q^0` only.
    pub fn is_constant(&self) -> bool {
        self.is_zero() || (self.low == 0 && self.c.len() == 1)
    }

    pub fn high(&self) -> i32 {
        self.low + self.c.len() as i32 - 1
    }

    pub fn lead(&self) -> &BigInt {
        self.c.last().expect("lead of zero polynomial")
    }

    pub fn coeff(&self, e: i32) -> BigInt {
        let k = e - self.low;
        if k < 0 || k as usize >= self.c.len() {
            BigInt::zero()
        } else {
            self.c[k as usize].clone()
        }
    }

    fn trim(mut self) -> Self {
        while matches!(self.c.last(), Some(x) if x.is_zero()) {
            self.c.pop();
        }
        let lead_zeros = self.c.iter().take_while(|x| x.is_zero()).count();
        if lead_zeros > 0 {
            self.c.drain(..lead_zeros);
            self.low += lead_zeros as i32;
        }
        if self.c.is_empty() {
            self.low = 0;
        }
        self
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.high().max(o.high());
        let mut c = vec![BigInt::zero(); (high - low + 1) as usize];
        for (k, x) in self.c.iter().enumerate() {
            c[(self.low - low) as usize + k] += x;
        }
        for (k, x) in o.c.iter().enumerate() {
            c[(o.low - low) as usize + k] += x;
        }
        ZPoly { low, c }.trim()
    }

    pub fn neg(&self) -> Self {
        ZPoly { low: self.low, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.c.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        ZPoly { low: self.low + o.low, c }.trim()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        ZPoly { low: self.low, c: self.c.iter().map(|x| x * k).collect() }
    }

    pub fn shift(&self, s: i32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        ZPoly { low: self.low + s, c: self.c.clone() }
    }

    /// `q -> q^-1`.
    pub fn bar(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.c.clone();
        c.reverse();
        ZPoly { low: -self.high(), c }
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for x in &self.c {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        ZPoly { low: self.low, c: self.c.iter().map(|x| x / k).collect() }
    }

    pub fn eval_mod(&self, a: Fp) -> Fp {
        let mut acc = Fp::zero();
        for x in self.c.iter().rev() {
            acc = acc * a + Fp::from_bigint(x);
        }
        acc * a.pow_i(self.low)
    }

    /// Shape as an ordinary polynomial (exponent offset dropped).
    fn as_poly(&self) -> ZPoly {
        ZPoly { low: 0, c: self.c.clone() }
    }

    fn degree(&self) -> usize {
        self.c.len() - 1
    }

    /// Primitive gcd in `Z[q]` of the polynomial shapes, positive leading
    /// coefficient.
    pub fn poly_gcd(a: &ZPoly, b: &ZPoly) -> ZPoly {
        let mut x = dense_primitive(a.c.clone());
        let mut y = dense_primitive(b.c.clone());
        if x.len() < y.len() {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_empty() {
            if y.len() == 1 {
                return ZPoly::one();
            }
            let r = dense_prem(x, &y);
            x = y;
            y = dense_primitive(r);
        }
        ZPoly { low: 0, c: x }
    }

    /// Exact quotient of the polynomial shape of `self` by `d` (a low-0
    /// polynomial dividing it); the exponent offset of `self` is kept.
    pub fn div_exact(&self, d: &ZPoly) -> ZPoly {
        let mut r = self.as_poly();
        let dd = d.degree();
        let ld = d.lead().clone();
        let n = r.degree();
        let mut quo = vec![BigInt::zero(); n - dd + 1];
        let mut work = r.c.clone();
        for k in (0..=(n - dd)).rev() {
            let top = &work[k + dd];
            if top.is_zero() {
                continue;
            }
            let (qk, rem) = top.div_rem(&ld);
            debug_assert!(rem.is_zero(), "inexact polynomial division");
            for (j, dj) in d.c.iter().enumerate() {
                work[k + j] -= &qk * dj;
            }
            quo[k] = qk;
        }
        debug_assert!(work.iter().all(|x| x.is_zero()), "inexact polynomial division");
        r.c = quo;
        r.low = self.low;
        r.trim()
    }
}

fn dense_trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while matches!(v.last(), Some(x) if x.is_zero()) {
        v.pop();
    }
    v
}

/// Strips the integer content and makes the leading coefficient positive.
/// Trailing (low-order) zeros are kept: only the top end is trimmed.
fn dense_primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let v = dense_trim(v);
    if v.is_empty() {
        return v;
    }
    let mut g = BigInt::zero();
    for x in &v {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    if v.last().unwrap().is_negative() {
        g = -g;
    }
    v.into_iter().map(|x| x / &g).collect()
}

/// Pseudo-remainder of `a` by `b` (dense, index = degree).
fn dense_prem(mut a: Vec<BigInt>, b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = b[db].clone();
    a = dense_trim(a);
    while a.len() > db {
        let da = a.len() - 1;
        let la = a[da].clone();
        for x in a.iter_mut() {
            *x *= &lb;
        }
        for (j, bj) in b.iter().enumerate() {
            a[da - db + j] -= &la * bj;
        }
        a = dense_trim(a);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(low: i32, c: &[i64]) -> ZPoly {
        ZPoly::from_parts(low, c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn trim_and_high() {
        let p = zp(-2, &[0, 0, 1, 2, 0]);
        assert_eq!(p.low, 0);
        assert_eq!(p.high(), 1);
    }

    #[test]
    fn gcd_of_products() {
        let a = zp(0, &[1, 1]); // 1+q
        let b = zp(0, &[-1, 0, 1]); // q^2-1
        let c = zp(0, &[2, 0, 3]);
        let g = ZPoly::poly_gcd(&a.mul(&c), &b.mul(&c));
        assert_eq!(g, a.mul(&c));
        let q = a.mul(&c).mul(&b).div_exact(&g);
        assert_eq!(q, b);
    }

    #[test]
    fn bar_reverses() {
        let p = zp(-1, &[1, 0, 3]);
        assert_eq!(p.bar(), zp(-1, &[3, 0, 1]));
        assert_eq!(p.bar().bar(), p);
    }
}
