//! Exact arithmetic in `A = Q[q, q^-1]` and `Q(q)`.

mod fp;
mod laurent;
mod ratfn;
mod zpoly;

pub use fp::Fp;
pub use laurent::{qbinom, qfact, qint, LaurentPoly};
pub use ratfn::RatFn;

/// The scalar field every module is defined over.
pub type Scalar = RatFn;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("not regular at q = infinity: {0}")]
    NotRegularAtInfinity(String),
}

/// `[n]_d` as a field element.
pub fn qint_f(n: i32, d: i32) -> RatFn {
    RatFn::from_laurent(&qint(n, d))
}

/// `[n]_d!` as a field element.
pub fn qfact_f(n: u32, d: i32) -> RatFn {
    RatFn::from_laurent(&qfact(n, d))
}

/// `[n choose k]_d` as a field element.
pub fn qbinom_f(n: i32, k: i32, d: i32) -> RatFn {
    RatFn::from_laurent(&qbinom(n, k, d))
}

#[cfg(test)]
mod props {
    use super::*;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn laurent() -> impl Strategy<Value = RatFn> {
        (-3i32..3, prop::collection::vec(-4i64..5, 0..4))
            .prop_map(|(low, c)| RatFn::from_coeffs(low, &c))
    }

    fn ratfn() -> impl Strategy<Value = RatFn> {
        (laurent(), laurent()).prop_map(|(a, b)| if b.is_zero() { a } else { a / b })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn field_laws(a in ratfn(), b in ratfn(), c in ratfn()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv(), RatFn::one());
            }
        }

        #[test]
        fn bar_is_an_algebra_involution(a in ratfn(), b in ratfn()) {
            prop_assert_eq!(a.bar().bar(), a.clone());
            prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
            prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
        }

        #[test]
        fn ainf_is_a_subring_and_ev_inf_a_homomorphism(a in ratfn(), b in ratfn()) {
            prop_assume!(a.is_in_ainf() && b.is_in_ainf());
            let s = &a + &b;
            let p = &a * &b;
            prop_assert!(s.is_in_ainf() && p.is_in_ainf());
            let (ea, eb) = (a.ev_inf().unwrap(), b.ev_inf().unwrap());
            prop_assert_eq!(s.ev_inf().unwrap(), &ea + &eb);
            prop_assert_eq!(p.ev_inf().unwrap(), ea * eb);
        }

        #[test]
        fn quantum_integers_are_bar_invariant(n in -20i32..=20, d in 1i32..4) {
            let x = qint_f(n, d);
            prop_assert_eq!(x.bar(), x.clone());
            prop_assert_eq!(qint_f(-n, d), -x);
        }

        #[test]
        fn expansion_reassembles(a in ratfn()) {
            // Truncating far enough below and clearing the tail recovers
            // `a` modulo q^lo A_oo.
            let lo = -12;
            let t = a.truncated_expansion(lo);
            let rest = &a - &t.to_ratfn();
            if let Some(d) = rest.degree() {
                prop_assert!(d < lo);
            }
        }
    }

    #[test]
    fn two_times_m_recurrence() {
        for m in 1..=20 {
            assert_eq!(&qint(2, 1) * &qint(m, 1), &qint(m + 1, 1) + &qint(m - 1, 1));
        }
    }

    #[test]
    fn qint_against_direct_quotient() {
        // [n]_d from (q^{dn} - q^{-dn}) / (q^d - q^{-d}) by field division.
        for d in 1..4 {
            for n in -8..=8 {
                let num = RatFn::q_pow(d * n) - RatFn::q_pow(-d * n);
                let den = RatFn::q_pow(d) - RatFn::q_pow(-d);
                assert_eq!(qint_f(n, d), num / den);
            }
        }
    }
}
