//! Solver-internal exact rational: an `i64` fraction while it fits, a
//! `BigRational` otherwise. Results are always in lowest terms with a
//! positive denominator, so equal values have equal representations.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Q {
    Small(i64, i64),
    Big(Rational),
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Q {
    pub(crate) const ZERO: Q = Q::Small(0, 1);
    pub(crate) const ONE: Q = Q::Small(1, 1);

    /// `n / d` with `d > 0`.
    fn frac(n: i128, d: i128) -> Q {
        debug_assert!(d > 0);
        let g = gcd(n.unsigned_abs(), d as u128) as i128;
        let (n, d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if fits(n) && fits(d) {
            Q::Small(n as i64, d as i64)
        } else {
            Q::Big(Rational::new_raw(BigInt::from(n), BigInt::from(d)))
        }
    }

    fn from_rational(r: Rational) -> Q {
        match (r.numer().to_i128(), r.denom().to_i128()) {
            (Some(n), Some(d)) if fits(n) && fits(d) => Q::Small(n as i64, d as i64),
            _ => Q::Big(r),
        }
    }

    pub(crate) fn from_big(r: &Rational) -> Q {
        Q::from_rational(r.clone())
    }

    pub(crate) fn to_big(&self) -> Rational {
        match self {
            Q::Small(n, d) => Rational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Q::Big(r) => r.clone(),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        matches!(self, Q::Small(0, _)) || matches!(self, Q::Big(r) if r.is_zero())
    }

    pub(crate) fn is_one(&self) -> bool {
        matches!(self, Q::Small(1, 1)) || matches!(self, Q::Big(r) if r.is_one())
    }

    pub(crate) fn is_positive(&self) -> bool {
        match self {
            Q::Small(n, _) => *n > 0,
            Q::Big(r) => r.is_positive(),
        }
    }

    pub(crate) fn neg(&self) -> Q {
        match self {
            Q::Small(n, d) => Q::Small(-n, *d),
            Q::Big(r) => Q::from_rational(-r),
        }
    }

    pub(crate) fn add(&self, other: &Q) -> Q {
        if let (Q::Small(a, b), Q::Small(c, d)) = (self, other) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if b == d {
                return Q::frac(a + c, b);
            }
            if let Some(n) = (a * d).checked_add(c * b) {
                return Q::frac(n, b * d);
            }
        }
        Q::from_rational(self.to_big() + other.to_big())
    }

    pub(crate) fn sub(&self, other: &Q) -> Q {
        self.add(&other.neg())
    }

    pub(crate) fn mul(&self, other: &Q) -> Q {
        if let (Q::Small(a, b), Q::Small(c, d)) = (self, other) {
            if *a == 0 || *c == 0 {
                return Q::ZERO;
            }
            return Q::frac(*a as i128 * *c as i128, *b as i128 * *d as i128);
        }
        Q::from_rational(self.to_big() * other.to_big())
    }

    /// # Panics
    /// On division by zero.
    pub(crate) fn div(&self, other: &Q) -> Q {
        assert!(!other.is_zero(), "division by zero");
        if let (Q::Small(a, b), Q::Small(c, d)) = (self, other) {
            let (n, den) = (*a as i128 * *d as i128, *b as i128 * *c as i128);
            return if den < 0 { Q::frac(-n, -den) } else { Q::frac(n, den) };
        }
        Q::from_rational(self.to_big() / other.to_big())
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Q) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Q) -> Ordering {
        match (self, other) {
            (Q::Small(a, b), Q::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}
