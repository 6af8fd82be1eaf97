//! Elements of `Q(q)` in canonical form.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::fp::Fp;
use super::laurent::LaurentPoly;
use super::zpoly::ZPoly;
use super::ScalarError;

/// `num / den` with `num` an integer Laurent polynomial and `den` an integer
/// polynomial with nonzero, positive constant term, coprime to `num` in
/// `Q[q]`, and jointly content-free with `num`.  Equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: ZPoly,
    den: ZPoly,
}

impl RatFn {
    pub fn q() -> Self {
        Self::q_pow(1)
    }

    pub fn q_pow(e: i32) -> Self {
        RatFn { num: ZPoly::monomial(BigInt::one(), e), den: ZPoly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_bigint(BigInt::from(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        RatFn { num: ZPoly::constant(n), den: ZPoly::one() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::from_parts(ZPoly::constant(r.numer().clone()), ZPoly::constant(r.denom().clone()))
    }

    /// `c q^e`.
    pub fn monomial(c: i64, e: i32) -> Self {
        RatFn { num: ZPoly::monomial(BigInt::from(c), e), den: ZPoly::one() }
    }

    /// Integer Laurent polynomial `sum_k c[k] q^(low + k)`.
    pub fn from_coeffs(low: i32, c: &[i64]) -> Self {
        RatFn {
            num: ZPoly::from_parts(low, c.iter().map(|&x| BigInt::from(x)).collect()),
            den: ZPoly::one(),
        }
    }

    pub(crate) fn from_parts(num: ZPoly, den: ZPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut num = num;
        let mut den = den;
        if num.is_zero() {
            return RatFn::zero();
        }
        num = num.shift(-den.low);
        den = den.shift(-den.low);
        if !den.is_constant() {
            let g = ZPoly::poly_gcd(&num, &den);
            if !g.is_one() {
                num = num.div_exact(&g);
                den = den.div_exact(&g);
            }
        }
        Self::finish(num, den)
    }

    /// Content and sign normalization, assuming the gcd is already trivial
    /// and `den.low == 0`.
    fn finish(mut num: ZPoly, mut den: ZPoly) -> Self {
        let g = num.content().gcd(&den.content());
        if !g.is_one() {
            num = num.div_int(&g);
            den = den.div_int(&g);
        }
        if den.c[0].is_negative() {
            num = num.neg();
            den = den.neg();
        }
        RatFn { num, den }
    }

    /// Rough size used to choose pivots.
    pub fn weight(&self) -> usize {
        self.num.c.len() + self.den.c.len()
    }

    /// Bar-invariance `x = bar(x)`.
    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Membership in `A = Q[q, q^-1]`.
    pub fn is_in_a(&self) -> bool {
        self.den.is_constant()
    }

    /// Integer Laurent polynomial, i.e. membership in `Z[q, q^-1]`.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Regular at `q = oo`.
    pub fn is_in_ainf(&self) -> bool {
        self.num.is_zero() || self.num.high() <= self.den.high()
    }

    /// Membership in `q^-1 A_oo`.
    pub fn is_in_qinv_ainf(&self) -> bool {
        self.num.is_zero() || self.num.high() < self.den.high()
    }

    /// Degree at infinity: `deg num - deg den`; `None` for zero.
    pub fn degree(&self) -> Option<i32> {
        if self.num.is_zero() {
            None
        } else {
            Some(self.num.high() - self.den.high())
        }
    }

    pub fn ev_inf(&self) -> Result<BigRational, ScalarError> {
        if self.num.is_zero() {
            return Ok(BigRational::zero());
        }
        match self.num.high().cmp(&self.den.high()) {
            Ordering::Greater => Err(ScalarError::NotRegularAtInfinity(self.to_string())),
            Ordering::Less => Ok(BigRational::zero()),
            Ordering::Equal => Ok(BigRational::new(self.num.lead().clone(), self.den.lead().clone())),
        }
    }

    /// Leading coefficient of the expansion at `q = oo`.
    pub fn lead_inf(&self) -> BigRational {
        BigRational::new(self.num.lead().clone(), self.den.lead().clone())
    }

    pub fn bar(&self) -> Self {
        if self.num.is_zero() {
            return RatFn::zero();
        }
        if self.den.is_constant() {
            return RatFn { num: self.num.bar(), den: self.den.clone() };
        }
        let num = self.num.bar();
        let den = self.den.bar();
        let s = den.low;
        Self::finish(num.shift(-s), den.shift(-s))
    }

    /// Coefficients of `q^e` in the Laurent expansion at `q = oo` for all
    /// `e >= lo`, as a Laurent polynomial.
    pub fn truncated_expansion(&self, lo: i32) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        if self.num.is_zero() {
            return out;
        }
        if self.den.is_constant() {
            let d = &self.den.c[0];
            for (k, x) in self.num.c.iter().enumerate() {
                let e = self.num.low + k as i32;
                if e >= lo && !x.is_zero() {
                    out.add_term(e, BigRational::new(x.clone(), d.clone()));
                }
            }
            return out;
        }
        // Long division from the top: num / den with den read in q^-1.
        let dh = self.den.high();
        let ld = BigRational::from_integer(self.den.lead().clone());
        let mut rem: std::collections::BTreeMap<i32, BigRational> = self
            .num
            .c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| (self.num.low + k as i32, BigRational::from_integer(x.clone())))
            .collect();
        loop {
            let Some((&top, _)) = rem.iter().next_back() else { break };
            let e = top - dh;
            if e < lo {
                break;
            }
            let c = rem.remove(&top).unwrap() / &ld;
            for (k, x) in self.den.c.iter().enumerate().take(self.den.c.len() - 1) {
                if x.is_zero() {
                    continue;
                }
                let key = e + k as i32;
                let v = rem.entry(key).or_insert_with(BigRational::zero);
                *v -= &c * BigRational::from_integer(x.clone());
                if v.is_zero() {
                    rem.remove(&key);
                }
            }
            out.add_term(e, c);
        }
        out
    }

    /// The part of degree `>= 0` of the expansion at `q = oo`.
    pub fn nonneg_part(&self) -> LaurentPoly {
        self.truncated_expansion(0)
    }

    pub fn to_laurent(&self) -> Option<LaurentPoly> {
        if !self.is_in_a() {
            return None;
        }
        Some(self.truncated_expansion(i32::MIN / 2))
    }

    pub fn from_laurent(p: &LaurentPoly) -> Self {
        if p.is_zero() {
            return RatFn::zero();
        }
        let lcm = p.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let low = p.low().unwrap();
        let high = p.high().unwrap();
        let mut c = vec![BigInt::zero(); (high - low + 1) as usize];
        for (e, x) in p.terms() {
            c[(e - low) as usize] = (x * BigRational::from_integer(lcm.clone())).to_integer();
        }
        Self::finish(ZPoly::from_parts(low, c), ZPoly::constant(lcm))
    }

    /// Evaluation at `q = a` mod `p`; `None` when the denominator vanishes.
    pub fn eval_mod(&self, a: Fp) -> Option<Fp> {
        let d = self.den.eval_mod(a);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_mod(a) * d.inv())
        }
    }

    /// Coefficient of `q^e` of an element of `A`.
    pub fn coeff(&self, e: i32) -> BigRational {
        assert!(self.is_in_a(), "coefficient of a non-Laurent element");
        BigRational::new(self.num.coeff(e), self.den.c[0].clone())
    }

    pub fn inv(&self) -> Self {
        assert!(!self.num.is_zero(), "inverse of zero in Q(q)");
        Self::from_parts(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = RatFn::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    fn add_ref(&self, o: &Self) -> Self {
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            let num = self.num.add(&o.num);
            return RatFn { num, den: ZPoly::one() };
        }
        if self.den == o.den {
            let num = self.num.add(&o.num);
            if num.is_zero() {
                return RatFn::zero();
            }
            return Self::from_parts(num, self.den.clone());
        }
        if self.den.is_constant() && o.den.is_constant() {
            let a = &self.den.c[0];
            let b = &o.den.c[0];
            let l = a.lcm(b);
            let num = self.num.scale(&(&l / a)).add(&o.num.scale(&(&l / b)));
            if num.is_zero() {
                return RatFn::zero();
            }
            return Self::finish(num, ZPoly::constant(l));
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Self::from_parts(num, self.den.mul(&o.den))
    }

    fn mul_ref(&self, o: &Self) -> Self {
        if self.num.is_zero() || o.num.is_zero() {
            return RatFn::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFn { num: self.num.mul(&o.num), den: ZPoly::one() };
        }
        if self.den.is_constant() && o.den.is_constant() {
            return Self::finish(self.num.mul(&o.num), self.den.mul(&o.den));
        }
        Self::from_parts(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    fn fmt_poly(p: &ZPoly, f: &mut String) {
        let mut first = true;
        for k in (0..p.c.len()).rev() {
            let c = &p.c[k];
            if c.is_zero() {
                continue;
            }
            let e = p.low + k as i32;
            let neg = c.is_negative();
            let a = c.abs();
            if neg {
                f.push('-');
            } else if !first {
                f.push('+');
            }
            first = false;
            if e == 0 {
                f.push_str(&a.to_string());
                continue;
            }
            if !a.is_one() {
                f.push_str(&a.to_string());
            }
            f.push('q');
            if e != 1 {
                f.push('^');
                f.push_str(&e.to_string());
            }
        }
        if first {
            f.push('0');
        }
    }

    fn n_terms(p: &ZPoly) -> usize {
        p.c.iter().filter(|x| !x.is_zero()).count()
    }
}

impl fmt::Display for RatFn {
    /// Numerator and denominator shifted together so that the denominator is
    /// centered, e.g. `1/[2]` prints as `1/(q+q^-1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        if self.den.is_one() {
            Self::fmt_poly(&self.num, &mut s);
            return f.write_str(&s);
        }
        let shift = -(self.den.high().div_euclid(2));
        let num = self.num.shift(shift);
        let den = self.den.shift(shift);
        let wrap = |p: &ZPoly, s: &mut String| {
            let paren = Self::n_terms(p) > 1 || (p.low != 0 && !p.c[0].is_one());
            if paren {
                s.push('(');
            }
            Self::fmt_poly(p, s);
            if paren {
                s.push(')');
            }
        };
        wrap(&num, &mut s);
        s.push('/');
        wrap(&den, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Default for RatFn {
    fn default() -> Self {
        RatFn::zero()
    }
}

impl Zero for RatFn {
    fn zero() -> Self {
        RatFn { num: ZPoly::zero(), den: ZPoly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFn {
    fn one() -> Self {
        RatFn { num: ZPoly::one(), den: ZPoly::one() }
    }
}

impl From<i64> for RatFn {
    fn from(n: i64) -> Self {
        RatFn::from_int(n)
    }
}

impl From<&LaurentPoly> for RatFn {
    fn from(p: &LaurentPoly) -> Self {
        RatFn::from_laurent(p)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a RatFn> for &'a RatFn {
            type Output = RatFn;
            fn $m(self, o: &'a RatFn) -> RatFn {
                let f: fn(&RatFn, &RatFn) -> RatFn = $body;
                f(self, o)
            }
        }
        impl $tr<RatFn> for RatFn {
            type Output = RatFn;
            fn $m(self, o: RatFn) -> RatFn {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a RatFn> for RatFn {
            type Output = RatFn;
            fn $m(self, o: &'a RatFn) -> RatFn {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<RatFn> for &'a RatFn {
            type Output = RatFn;
            fn $m(self, o: RatFn) -> RatFn {
                self.$m(&o)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_ref(b));
binop!(Sub, sub, |a, b| a.add_ref(&-b));
binop!(Mul, mul, |a, b| a.mul_ref(b));
binop!(Div, div, |a, b| a.mul_ref(&b.inv()));

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den }
    }
}

impl AddAssign<&RatFn> for RatFn {
    fn add_assign(&mut self, o: &RatFn) {
        *self = self.add_ref(o);
    }
}

impl AddAssign for RatFn {
    fn add_assign(&mut self, o: RatFn) {
        *self = self.add_ref(&o);
    }
}

impl SubAssign<&RatFn> for RatFn {
    fn sub_assign(&mut self, o: &RatFn) {
        *self = self.add_ref(&-o);
    }
}

impl SubAssign for RatFn {
    fn sub_assign(&mut self, o: RatFn) {
        *self = self.add_ref(&-o);
    }
}

impl MulAssign<&RatFn> for RatFn {
    fn mul_assign(&mut self, o: &RatFn) {
        *self = self.mul_ref(o);
    }
}

impl Sum for RatFn {
    fn sum<I: Iterator<Item = RatFn>>(it: I) -> RatFn {
        it.fold(RatFn::zero(), |a, b| a + b)
    }
}

impl Product for RatFn {
    fn product<I: Iterator<Item = RatFn>>(it: I) -> RatFn {
        it.fold(RatFn::one(), |a, b| a * b)
    }
}
