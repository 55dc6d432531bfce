//! Exact rationals, p-adic valuations and base-p digit sums.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Add;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision fraction, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// A validated prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub const TWO: Prime = Prime(2);

    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^e`, or `None` on `u64` overflow.
    pub fn checked_pow(self, e: u32) -> Option<u64> {
        self.0.checked_pow(e)
    }

    pub fn as_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^e` as an exact rational.
    pub fn rational_pow(self, e: u32) -> Rational {
        Rational::from_integer(num_traits::pow(self.as_bigint(), e as usize))
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A p-adic valuation. `Infinite` is the valuation of zero and nothing else.
///
/// The derived order puts every finite value below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl Add<i64> for Valuation {
    type Output = Valuation;

    fn add(self, rhs: i64) -> Valuation {
        match self {
            Valuation::Finite(a) => Valuation::Finite(a + rhs),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => v.fmt(f),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer. Zero has no finite valuation and
/// returns `None`.
pub fn nu_p_int(p: Prime, x: &BigInt) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    if p.get() == 2 {
        return x.trailing_zeros();
    }
    let p = BigUint::from(p.get());
    let mut m = x.magnitude().clone();
    let mut count = 0u64;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(count);
        }
        m = q;
        count += 1;
    }
}

/// p-adic valuation of a rational.
pub fn nu_p(p: Prime, x: &Rational) -> Valuation {
    match nu_p_int(p, x.numer()) {
        None => Valuation::Infinite,
        Some(num) => {
            let den = nu_p_int(p, x.denom()).expect("denominator is nonzero");
            Valuation::Finite(num as i64 - den as i64)
        }
    }
}

/// Base-`p` digits of `n`, least significant first. Zero has no digits.
pub fn digits(p: Prime, mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while n > 0 {
        out.push(n % p.get());
        n /= p.get();
    }
    out
}

/// Sum of the base-`p` digits of `n`.
pub fn alpha_p(p: Prime, n: u64) -> u64 {
    if p.get() == 2 {
        return n.count_ones() as u64;
    }
    digits(p, n).into_iter().sum()
}

/// `nu_p(n!)` via Legendre's digit-sum formula `(n - alpha_p(n)) / (p - 1)`.
pub fn legendre_valuation_factorial(p: Prime, n: u64) -> u64 {
    (n - alpha_p(p, n)) / (p.get() - 1)
}

/// Membership in the p-local integers `Z_(p)`.
pub fn is_p_local_integer(p: Prime, x: &Rational) -> bool {
    nu_p(p, x) >= Valuation::Finite(0)
}

/// Reduce a p-integral rational modulo `modulus` (a power of `p`). Returns
/// `None` when the denominator is not invertible.
pub fn reduce_mod(x: &Rational, modulus: u64) -> Option<u64> {
    if modulus == 1 {
        return Some(0);
    }
    let m = BigInt::from(modulus);
    let num = x.numer().mod_floor(&m);
    let den = x.denom().mod_floor(&m);
    let num = u64::try_from(num).ok()?;
    let den = u64::try_from(den).ok()?;
    let inv = mod_inverse(den, modulus)?;
    Some(mul_mod(num, inv, modulus))
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub(crate) fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Canonical representative in `[0, 2^bits)` of a 2-integral rational.
pub fn two_adic_residue(x: &Rational, bits: u32) -> Option<BigUint> {
    let modulus = BigInt::one() << bits;
    let den = x.denom().mod_floor(&modulus);
    let inv = den.modinv(&modulus)?;
    let r = (x.numer() * inv).mod_floor(&modulus);
    match r.sign() {
        Sign::Minus => None,
        _ => Some(r.magnitude().clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    // Trial division, independent of nu_p.
    fn trial_exponent(prime: u64, mut n: i64) -> i64 {
        let mut e = 0;
        while n % prime as i64 == 0 {
            n /= prime as i64;
            e += 1;
        }
        e
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(97).is_ok());
        assert_eq!(Prime::new(4), Err(Error::NotPrime(4)));
        assert_eq!(Prime::new(1), Err(Error::NotPrime(1)));
        assert_eq!(Prime::new(0), Err(Error::NotPrime(0)));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(nu_p(p(2), &q(24, 1)), Valuation::Finite(3));
        assert_eq!(nu_p(p(2), &q(0, 1)), Valuation::Infinite);
        let expected = trial_exponent(3, 28) - trial_exponent(3, 9);
        assert_eq!(expected, -2);
        assert_eq!(nu_p(p(3), &q(28, 9)), Valuation::Finite(expected));
    }

    #[test]
    fn digit_sums() {
        assert_eq!(alpha_p(p(2), 4), 1);
        assert_eq!(alpha_p(p(2), 7), 3);
        assert_eq!(alpha_p(p(3), 10), 2);
        assert_eq!(digits(p(3), 10), [1, 0, 1]);
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_valuation_factorial(p(2), 4), 3);
        assert_eq!(legendre_valuation_factorial(p(2), 0), 0);
        // 10! = 3628800 = 2^8 3^4 5^2 7
        assert_eq!(trial_exponent(3, 3_628_800), 4);
        assert_eq!(legendre_valuation_factorial(p(3), 10), 4);
    }

    #[test]
    fn local_integers() {
        assert!(is_p_local_integer(p(2), &q(3, 5)));
        assert!(!is_p_local_integer(p(2), &q(1, 2)));
        assert!(is_p_local_integer(p(3), &q(6, 2)));
        assert!(is_p_local_integer(p(5), &q(0, 1)));
    }

    #[test]
    fn residues() {
        assert_eq!(reduce_mod(&q(1, 2), 9), Some(5));
        assert_eq!(reduce_mod(&q(-1, 1), 9), Some(8));
        assert_eq!(reduce_mod(&q(1, 3), 9), None);
        assert_eq!(two_adic_residue(&q(-1, 3), 4), Some(BigUint::from(5u32)));
    }

    #[test]
    fn valuation_order() {
        assert!(Valuation::Finite(i64::MAX) < Valuation::Infinite);
        assert!(Valuation::Finite(-3) < Valuation::Finite(2));
        assert_eq!(Valuation::Finite(2) + Valuation::Infinite, Valuation::Infinite);
    }

    fn nonzero_rational() -> impl Strategy<Value = Rational> {
        (
            (-10_000i64..10_000).prop_filter("nonzero", |n| *n != 0),
            1i64..10_000,
        )
            .prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn valuation_is_multiplicative(x in nonzero_rational(), y in nonzero_rational(), pi in 0usize..3) {
            let prime = p([2, 3, 5][pi]);
            prop_assert_eq!(nu_p(prime, &(&x * &y)), nu_p(prime, &x) + nu_p(prime, &y));
        }

        #[test]
        fn valuation_is_ultrametric(x in nonzero_rational(), y in nonzero_rational(), pi in 0usize..3) {
            let prime = p([2, 3, 5][pi]);
            let (vx, vy) = (nu_p(prime, &x), nu_p(prime, &y));
            let vs = nu_p(prime, &(&x + &y));
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
        }
    }
}
