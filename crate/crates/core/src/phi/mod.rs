//! The generators `phi_n` and their digit monomials.
//!
//! `phi_n` is the image of `v1^{-(p^n-1)/(p-1)} t_n` in the semistable
//! polynomials, written in `w` with `u1/v1` mapped to `w^{p-1}`. It satisfies
//!
//! ```text
//! phi_1 = (w^{p-1} - 1)/p
//! phi_n = (w^{p^n-1} - p^{n-1} phi_{n-1}^p - ... - p phi_1^{p^{n-1}} - 1)/p^n
//! ```
//!
//! [`phi_family`] uses that recursion directly. [`phi_family_oracle`] rebuilds
//! the same polynomials from the Hazewinkel and right-unit formulas in
//! [`hazewinkel`] and shares no code path with it.

pub mod hazewinkel;

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::arith::{self, Prime, Rational};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::semistable;
use hazewinkel::{geometric, Var};

/// `phi_1..=phi_N` for one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiFamily {
    prime: Prime,
    polys: Vec<Poly>,
    af: Vec<i64>,
}

impl PhiFamily {
    fn new(prime: Prime, polys: Vec<Poly>) -> Self {
        let af = (1..=polys.len() as u32).map(|n| generator_af(prime, n)).collect();
        PhiFamily { prime, polys, af }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// `phi_n`, one-based.
    pub fn get(&self, n: usize) -> Option<&Poly> {
        n.checked_sub(1).and_then(|i| self.polys.get(i))
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    /// Filtration of `phi_1..=phi_N`.
    pub fn af(&self) -> &[i64] {
        &self.af
    }

    /// Grow the family to `phi_n` with the recursion.
    pub fn extend_to(&mut self, n: usize, max_degree: u64) -> Result<()> {
        check_degree(self.prime, n, max_degree)?;
        let p = self.prime;
        while self.polys.len() < n {
            let m = self.polys.len() as u32 + 1;
            let top = (p.get().pow(m) - 1) as usize;
            let mut num = &Poly::monomial(Rational::one(), top) - &Poly::one();
            for j in 1..m {
                let prev = &self.polys[(m - j - 1) as usize];
                let term = prev.pow(p.get().pow(j)).scale(&p.rational_pow(m - j));
                num = &num - &term;
            }
            let phi = num.scale(&(Rational::one() / p.rational_pow(m)));
            if p.get() == 2 && !semistable::is_semistable_2local(&phi) {
                return Err(Error::Inconsistent(format!("phi_{m} is not 2-locally semistable")));
            }
            self.polys.push(phi);
            self.af.push(generator_af(p, m));
        }
        Ok(())
    }
}

fn check_degree(p: Prime, n: usize, max_degree: u64) -> Result<()> {
    let degree = u32::try_from(n)
        .ok()
        .and_then(|n| p.checked_pow(n))
        .map(|d| d - 1);
    match degree {
        Some(d) if d <= max_degree => Ok(()),
        _ => Err(Error::Budget {
            what: "polynomial degree",
            required: (p.get() as u128)
                .checked_pow(n.min(u32::MAX as usize) as u32)
                .map_or(u128::MAX, |d| d - 1),
            limit: max_degree as u128,
        }),
    }
}

/// `phi_1..=phi_n` by the closed recursion. At `p = 2` every generator is
/// checked to be semistable as it is built.
pub fn phi_family(p: Prime, n: usize, max_degree: u64) -> Result<PhiFamily> {
    check_degree(p, n, max_degree)?;
    let mut fam = PhiFamily::new(p, Vec::new());
    fam.extend_to(n, max_degree)?;
    Ok(fam)
}

/// `phi_1..=phi_n` from the right-unit elimination in [`hazewinkel`].
pub fn phi_family_oracle(p: Prime, n: usize, max_degree: u64) -> Result<PhiFamily> {
    check_degree(p, n, max_degree)?;
    let sol = hazewinkel::solve_right_unit(p, n)?;
    let step = (p.get() - 1) as usize;
    let mut polys = Vec::with_capacity(n);
    for (m, t) in sol.t.iter().enumerate().skip(1) {
        // v1^{-d} t_m with t_m homogeneous of degree d in (v1, u1); each
        // u1^b v1^{d-b} becomes w1^b = w^{(p-1) b}.
        let d = geometric(p, m as u32);
        let mut coeffs = alloc::vec![Rational::zero(); step * d as usize + 1];
        for (mono, c) in t.terms() {
            let exp = |v: Var| mono.iter().find(|(x, _)| *x == v).map_or(0, |(_, e)| *e);
            let (a, b) = (exp(Var::V1), exp(Var::U1));
            if a + b != d {
                return Err(Error::Inconsistent(format!(
                    "t_{m} is not homogeneous of degree {d}"
                )));
            }
            coeffs[step * b as usize] += c;
        }
        polys.push(Poly::from_coeffs(coeffs));
    }
    Ok(PhiFamily::new(p, polys))
}

/// `-(p^n - 1)/(p - 1)`, the filtration of `phi_n`.
pub fn generator_af(p: Prime, n: u32) -> i64 {
    -(geometric(p, n) as i64)
}

/// Filtration of the digit monomial `m_k`; `alpha(k) - 2k` at `p = 2`.
pub fn monomial_af(p: Prime, k: u64) -> i64 {
    arith::digits(p, k)
        .iter()
        .enumerate()
        .map(|(i, &d)| d as i64 * generator_af(p, i as u32 + 1))
        .sum()
}

/// `w`-degree of `m_k`: `p k - alpha_p(k)`.
pub fn monomial_degree(p: Prime, k: u64) -> u64 {
    p.get() * k - arith::alpha_p(p, k)
}

/// Degree of `m_k` in `w1 = w^{p-1}`: `(p k - alpha_p(k)) / (p - 1)`.
pub fn monomial_degree_w1(p: Prime, k: u64) -> u64 {
    monomial_degree(p, k) / (p.get() - 1)
}

/// `m_k = prod_i phi_{i+1}^{k_i}` over the base-`p` digits `k_i` of `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiMonomial {
    pub index: u64,
    pub digits: Vec<u64>,
    pub poly: Poly,
}

impl PhiMonomial {
    pub fn degree(&self) -> u64 {
        self.poly.degree().unwrap_or(0) as u64
    }
}

/// Needs `phi_{i+1}` in `fam` for every nonzero digit position `i` of `k`.
pub fn phi_monomial(p: Prime, k: u64, fam: &PhiFamily) -> Result<PhiMonomial> {
    if fam.prime() != p {
        return Err(Error::OutOfRange {
            index: k,
            reason: format!("family is for p = {}, not {p}", fam.prime()),
        });
    }
    let digits = arith::digits(p, k);
    let mut poly = Poly::one();
    for (i, &d) in digits.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let phi = fam.get(i + 1).ok_or_else(|| Error::OutOfRange {
            index: k,
            reason: format!("needs phi_{} but the family stops at phi_{}", i + 1, fam.len()),
        })?;
        poly = &poly * &phi.pow(d);
    }
    Ok(PhiMonomial {
        index: k,
        digits,
        poly,
    })
}

/// Number of generators needed to form every `m_k` with `k <= n`.
pub fn generators_needed(p: Prime, n: u64) -> usize {
    arith::digits(p, n).len().max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semistable::{is_semistable_2local, is_semistable_plocal_residues};
    use crate::{Valuation, DEFAULT_BUDGET, DEFAULT_MAX_DEGREE};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn fam(prime: u64, n: usize) -> PhiFamily {
        phi_family(p(prime), n, DEFAULT_MAX_DEGREE).unwrap()
    }

    #[test]
    fn first_generators_at_two() {
        let f = fam(2, 3);
        assert_eq!(f.get(1).unwrap(), &Poly::from_integers(&[-1, 1]).scale(&q(1, 2)));
        assert_eq!(f.get(2).unwrap(), &Poly::from_integers(&[-3, 2, -1, 2]).scale(&q(1, 8)));
        assert_eq!(f.get(2).unwrap().evaluate(&q(3, 1)), q(6, 1));
        assert_eq!(f.get(2).unwrap().evaluate(&q(1, 1)), q(0, 1));
        // (3^7 - 4*6^2 - 2*1^4 - 1)/8
        assert_eq!(f.get(3).unwrap().evaluate(&q(3, 1)), q(255, 1));
        assert_eq!(f.af(), [-1, -3, -7]);
    }

    #[test]
    fn second_generator_at_three() {
        let f = fam(3, 2);
        let phi2 = f.get(2).unwrap();
        assert_eq!(phi2.evaluate(&q(2, 1)), q(28, 1));
        // w^8/9 - (w^2 - 1)^3/81 - 1/9 has constant term -8/81.
        assert_eq!(phi2.min_coeff_valuation(p(3)), Valuation::Finite(-4));
        assert_eq!(phi2.coeff(0), q(-8, 81));
    }

    #[test]
    fn degrees_and_support() {
        for (prime, n) in [(2u64, 6usize), (3, 3), (5, 2), (7, 2)] {
            let f = fam(prime, n);
            for m in 1..=n {
                let phi = f.get(m).unwrap();
                assert_eq!(phi.degree(), Some(prime.pow(m as u32) as usize - 1));
                assert!(phi.exponents_divisible_by(prime as usize - 1));
            }
        }
    }

    #[test]
    fn oracle_agrees() {
        for (prime, n) in [(2u64, 5usize), (3, 3), (5, 2)] {
            let a = fam(prime, n);
            let b = phi_family_oracle(p(prime), n, DEFAULT_MAX_DEGREE).unwrap();
            assert_eq!(a, b, "p = {prime}, N = {n}");
        }
    }

    #[test]
    fn degree_budget() {
        assert!(matches!(
            phi_family(p(7), 9, DEFAULT_MAX_DEGREE),
            Err(Error::Budget { required: 40_353_606, .. })
        ));
        assert!(matches!(
            phi_family_oracle(p(2), 13, DEFAULT_MAX_DEGREE),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn monomial_examples() {
        let f = fam(2, 3);
        let m0 = phi_monomial(p(2), 0, &f).unwrap();
        assert_eq!(m0.poly, Poly::one());
        let m3 = phi_monomial(p(2), 3, &f).unwrap();
        assert_eq!(m3.poly, f.get(1).unwrap() * f.get(2).unwrap());
        assert_eq!(m3.degree(), 4);
        let m5 = phi_monomial(p(2), 5, &f).unwrap();
        assert_eq!(m5.poly, f.get(1).unwrap() * f.get(3).unwrap());
        assert_eq!(m5.degree(), 8);
        assert!(matches!(phi_monomial(p(2), 8, &f), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn monomial_filtration() {
        assert_eq!(monomial_af(p(2), 1), -1);
        assert_eq!(monomial_af(p(2), 3), -4);
        assert_eq!(monomial_af(p(2), 0), 0);
        for k in 0..200u64 {
            assert_eq!(monomial_af(p(2), k), k.count_ones() as i64 - 2 * k as i64);
        }
        // 5 = 2 + 1*3 at p = 3: 2*(-1) + 1*(-4)
        assert_eq!(monomial_af(p(3), 5), -6);
    }

    #[test]
    fn monomial_degrees_increase() {
        for (prime, n, kmax) in [(2u64, 6usize, 63u64), (3, 3, 26)] {
            let f = fam(prime, n);
            let mut last = None;
            for k in 0..=kmax {
                let m = phi_monomial(p(prime), k, &f).unwrap();
                assert_eq!(m.degree(), monomial_degree(p(prime), k));
                assert_eq!(m.degree(), monomial_degree_w1(p(prime), k) * (prime - 1));
                assert!(last.is_none_or(|d| m.degree() > d));
                last = Some(m.degree());
            }
        }
    }

    #[test]
    fn integrality() {
        let f = fam(2, 6);
        for k in 0..=32 {
            let m = phi_monomial(p(2), k, &f).unwrap();
            assert!(is_semistable_2local(&m.poly), "m_{k}");
        }
        let f = fam(3, 2);
        for k in 0..9 {
            let m = phi_monomial(p(3), k, &f).unwrap();
            assert_eq!(is_semistable_plocal_residues(p(3), &m.poly, DEFAULT_BUDGET), Ok(true), "m_{k}");
        }
    }

    #[test]
    fn needed_generators() {
        assert_eq!(generators_needed(p(2), 16), 5);
        assert_eq!(generators_needed(p(2), 15), 4);
        assert_eq!(generators_needed(p(3), 3), 2);
        assert_eq!(generators_needed(p(3), 0), 1);
    }
}
