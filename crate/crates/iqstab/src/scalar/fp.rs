//! Arithmetic modulo the Mersenne prime `2^61 - 1`.
//!
//! Used for rank selection: a minor that is nonzero after substituting a
//! random point for `q` and reducing mod `p` is nonzero over `Q(q)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

pub const P: u64 = (1 << 61) - 1;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fp(pub u64);

impl Fp {
    pub const fn zero() -> Self {
        Fp(0)
    }

    pub const fn one() -> Self {
        Fp(1)
    }

    pub fn new(x: u64) -> Self {
        Fp(x % P)
    }

    pub fn from_i64(x: i64) -> Self {
        let r = x.rem_euclid(P as i64);
        Fp(r as u64)
    }

    pub fn from_bigint(x: &BigInt) -> Self {
        if let Some(s) = x.to_i64() {
            return Self::from_i64(s);
        }
        let r = x.mod_floor(&BigInt::from(P));
        Fp(r.to_u64().expect("residue fits"))
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Integer power, negative exponents through the inverse.
    pub fn pow_i(self, e: i32) -> Self {
        if e >= 0 {
            self.pow(e as u64)
        } else {
            self.inv().pow((-(e as i64)) as u64)
        }
    }

    pub fn inv(self) -> Self {
        assert!(!self.is_zero(), "inverse of zero mod p");
        self.pow(P - 2)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        let s = self.0 + o.0;
        Fp(if s >= P { s - P } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        Fp(if self.0 >= o.0 { self.0 - o.0 } else { self.0 + P - o.0 })
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp(if self.0 == 0 { 0 } else { P - self.0 })
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        let w = self.0 as u128 * o.0 as u128;
        let lo = (w as u64) & P;
        let hi = (w >> 61) as u64;
        let s = lo + hi;
        Fp(if s >= P { s - P } else { s })
    }
}

impl Zero for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}
