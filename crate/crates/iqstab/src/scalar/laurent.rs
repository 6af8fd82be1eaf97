//! Laurent polynomials over `Q`, the ring `A = Q[q, q^-1]`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::RatFn;

/// Finite map from exponents of `q` to nonzero rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0)
    }

    pub fn q_pow(e: i32) -> Self {
        Self::monomial(BigRational::one(), e)
    }

    pub fn monomial(c: BigRational, e: i32) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(e, c);
        p
    }

    pub fn from_ints(terms: &[(i32, i64)]) -> Self {
        let mut p = LaurentPoly::zero();
        for &(e, c) in terms {
            p.add_term(e, BigRational::from_integer(BigInt::from(c)));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, e: i32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let v = self.coeffs.entry(e).or_insert_with(BigRational::zero);
        *v += c;
        if v.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn coeff(&self, e: i32) -> BigRational {
        self.coeffs.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &BigRational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn low(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn high(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn bar(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }

    /// Terms with exponent strictly below zero.
    pub fn negative_part(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.range(..0).map(|(e, c)| (*e, c.clone())).collect() }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * k)).collect() }
    }

    pub fn shift(&self, s: i32) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (e + s, c.clone())).collect() }
    }

    /// Substitution `q -> q^d`.
    pub fn dilate(&self, d: i32) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (e * d, c.clone())).collect() }
    }

    pub fn to_ratfn(&self) -> RatFn {
        RatFn::from_laurent(self)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        for (e, c) in &o.coeffs {
            r.add_term(*e, c.clone());
        }
        r
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        self + &(-o)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = LaurentPoly::zero();
        for (a, x) in &self.coeffs {
            for (b, y) in &o.coeffs {
                r.add_term(a + b, x * y);
            }
        }
        r
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_ratfn())
    }
}

/// The quantum integer `[n]_d = (q^(dn) - q^(-dn)) / (q^d - q^(-d))`.
pub fn qint(n: i32, d: i32) -> LaurentPoly {
    assert!(d > 0, "symmetrizer entries are positive");
    let mut p = LaurentPoly::zero();
    let (sign, m) = if n < 0 { (-1, -n) } else { (1, n) };
    for k in 0..m {
        p.add_term(d * (m - 1 - 2 * k), BigRational::from_integer(BigInt::from(sign)));
    }
    p
}

/// `[n]_d!`.
pub fn qfact(n: u32, d: i32) -> LaurentPoly {
    (1..=n as i32).fold(LaurentPoly::one(), |acc, k| &acc * &qint(k, d))
}

/// Quantum binomial `[n choose k]_d` for `n >= 0`, computed by the
/// q-Pascal rule so that it stays in `Z[q, q^-1]`.
pub fn qbinom(n: i32, k: i32, d: i32) -> LaurentPoly {
    if k < 0 || k > n || n < 0 {
        return LaurentPoly::zero();
    }
    // [n k] = q^{-d(n-k)} [n-1 k-1] + q^{dk} [n-1 k]
    let mut row = vec![LaurentPoly::one()];
    for m in 1..=n {
        let mut next = vec![LaurentPoly::one(); (m + 1) as usize];
        for j in 1..m {
            let a = row[(j - 1) as usize].shift(-d * (m - j));
            let b = row[j as usize].shift(d * j);
            next[j as usize] = &a + &b;
        }
        row = next;
    }
    row.swap_remove(k as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qint_small() {
        assert!(qint(0, 1).is_zero());
        assert_eq!(qint(2, 1), LaurentPoly::from_ints(&[(1, 1), (-1, 1)]));
        assert_eq!(qint(-3, 2), -&qint(3, 2));
    }

    #[test]
    fn qbinom_matches_factorials() {
        for n in 0..7 {
            for k in 0..=n {
                let lhs = qbinom(n, k, 2).to_ratfn();
                let rhs = qfact(n as u32, 2).to_ratfn()
                    / (qfact(k as u32, 2).to_ratfn() * qfact((n - k) as u32, 2).to_ratfn());
                assert_eq!(lhs, rhs, "n={n} k={k}");
            }
        }
    }
}
