//! A small multivariate expression ring for the right-unit computation.
//!
//! The indeterminates are `v1`, `u1` (the right unit image of `v1`), the
//! logarithm coefficients `lambda_i` and the generators `t_i`. The Hazewinkel
//! generators are defined by `p lambda_n = sum_{0<=i<n} lambda_i v_{n-i}^{p^i}`
//! and the right unit acts by `eta_R(lambda_n) = sum_{0<=i<=n} lambda_i
//! t_{n-i}^{p^i}`. Killing `v_k` and `u_k` for `k >= 2` turns `eta_R(v_n)` into
//! a relation that is linear in `t_n` with coefficient `p`, which is solved
//! for `t_n` one index at a time.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::arith::{Prime, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    V1,
    U1,
    Lambda(usize),
    T(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::V1 => f.write_str("v1"),
            Var::U1 => f.write_str("u1"),
            Var::Lambda(i) => write!(f, "l{i}"),
            Var::T(i) => write!(f, "t{i}"),
        }
    }
}

/// Sorted `(variable, positive exponent)` pairs.
type Monomial = Vec<(Var, u64)>;

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            core::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// A polynomial over the rationals in the indeterminates [`Var`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HazewinkelExpr {
    terms: BTreeMap<Monomial, Rational>,
}

impl HazewinkelExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        HazewinkelExpr { terms }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn var(v: Var) -> Self {
        Self::term(Rational::one(), &[(v, 1)])
    }

    /// `c * prod v^e`. Repeated variables are combined.
    pub fn term(c: Rational, powers: &[(Var, u64)]) -> Self {
        let mono = powers
            .iter()
            .filter(|(_, e)| *e > 0)
            .fold(Vec::new(), |acc, &(v, e)| mul_monomials(&acc, &vec![(v, e)]));
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        HazewinkelExpr { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[(Var, u64)], &Rational)> + '_ {
        self.terms.iter().map(|(m, c)| (m.as_slice(), c))
    }

    fn add_term(&mut self, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        HazewinkelExpr {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Highest exponent of `v` in any term.
    pub fn degree_in(&self, v: Var) -> u64 {
        self.terms
            .keys()
            .filter_map(|m| m.iter().find(|(x, _)| *x == v).map(|(_, e)| *e))
            .max()
            .unwrap_or(0)
    }

    /// True if only variables from `allowed` occur.
    pub fn only_uses(&self, allowed: &[Var]) -> bool {
        self.terms
            .keys()
            .all(|m| m.iter().all(|(v, _)| allowed.contains(v)))
    }

    /// The coefficient of `v^e`, as an expression in the other variables.
    pub fn coefficient_of(&self, v: Var, e: u64) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let found = m.iter().find(|(x, _)| *x == v).map_or(0, |(_, k)| *k);
            if found == e {
                let rest: Monomial = m.iter().copied().filter(|(x, _)| *x != v).collect();
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Replace every occurrence of `v` by `value`.
    pub fn substitute(&self, v: Var, value: &HazewinkelExpr) -> Self {
        let mut powers: Vec<HazewinkelExpr> = vec![Self::one()];
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.iter().find(|(x, _)| *x == v).map_or(0, |(_, k)| *k) as usize;
            if e == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            while powers.len() <= e {
                let next = &powers[powers.len() - 1] * value;
                powers.push(next);
            }
            let rest: Monomial = m.iter().copied().filter(|(x, _)| *x != v).collect();
            for (pm, pc) in &powers[e].terms {
                out.add_term(mul_monomials(&rest, pm), c * pc);
            }
        }
        out
    }
}

impl<'a> Mul<&'a HazewinkelExpr> for &'a HazewinkelExpr {
    type Output = HazewinkelExpr;

    fn mul(self, rhs: &'a HazewinkelExpr) -> HazewinkelExpr {
        let mut out = HazewinkelExpr::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(mul_monomials(a, b), x * y);
            }
        }
        out
    }
}

impl<'a> Add<&'a HazewinkelExpr> for &'a HazewinkelExpr {
    type Output = HazewinkelExpr;

    fn add(self, rhs: &'a HazewinkelExpr) -> HazewinkelExpr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a HazewinkelExpr> for &'a HazewinkelExpr {
    type Output = HazewinkelExpr;

    fn sub(self, rhs: &'a HazewinkelExpr) -> HazewinkelExpr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &HazewinkelExpr {
    type Output = HazewinkelExpr;

    fn neg(self) -> HazewinkelExpr {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for HazewinkelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for (v, e) in m {
                if *e == 1 {
                    write!(f, "*{v}")?;
                } else {
                    write!(f, "*{v}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// `(p^n - 1)/(p - 1) = 1 + p + ... + p^{n-1}`
pub(crate) fn geometric(p: Prime, n: u32) -> u64 {
    (0..n).map(|i| p.get().pow(i)).sum()
}

fn rational_pow(p: Prime, e: u32) -> Rational {
    p.rational_pow(e)
}

/// Result of eliminating `t_1..t_N`.
#[derive(Clone, Debug)]
pub struct RightUnitSolution {
    pub prime: Prime,
    /// `lambda_0..=lambda_N` as expressions in `v1`.
    pub lambda: Vec<HazewinkelExpr>,
    /// `t_n` solved from its own relation, still written in `t_1..t_{n-1}`.
    /// Index 0 holds `t_0 = 1`.
    pub t_unreduced: Vec<HazewinkelExpr>,
    /// `t_n` as a polynomial in `v1` and `u1` alone. Index 0 holds `t_0 = 1`.
    pub t: Vec<HazewinkelExpr>,
}

/// The logarithm coefficients with `v_k = 0` for `k >= 2`, derived from the
/// Hazewinkel recursion and checked against `v1^{(p^n-1)/(p-1)} / p^n`.
pub fn lambda_values(p: Prime, n: usize) -> Result<Vec<HazewinkelExpr>> {
    let v = |k: usize| {
        if k == 1 {
            HazewinkelExpr::var(Var::V1)
        } else {
            HazewinkelExpr::zero()
        }
    };
    let inv_p = Rational::new(1.into(), p.as_bigint());
    let mut lambda = vec![HazewinkelExpr::one()];
    for m in 1..=n {
        let mut sum = HazewinkelExpr::zero();
        for (i, lam) in lambda.iter().enumerate().take(m) {
            let vk = v(m - i);
            if vk.is_zero() {
                continue;
            }
            sum = &sum + &(lam * &vk.pow(p.get().pow(i as u32)));
        }
        let value = sum.scale(&inv_p);
        let closed = HazewinkelExpr::term(
            Rational::one() / rational_pow(p, m as u32),
            &[(Var::V1, geometric(p, m as u32))],
        );
        if value != closed {
            return Err(Error::Inconsistent(format!(
                "lambda_{m} = {value}, expected {closed}"
            )));
        }
        lambda.push(value);
    }
    Ok(lambda)
}

/// `eta_R(lambda_j) = sum_{0<=i<=j} lambda_i t_{j-i}^{p^i}` with symbolic
/// `lambda_i` and `t_i` (`lambda_0 = t_0 = 1`).
pub fn right_unit_on_lambda(p: Prime, j: usize) -> HazewinkelExpr {
    let sym = |make: fn(usize) -> Var, i: usize| {
        if i == 0 {
            HazewinkelExpr::one()
        } else {
            HazewinkelExpr::var(make(i))
        }
    };
    (0..=j).fold(HazewinkelExpr::zero(), |acc, i| {
        let t = sym(Var::T, j - i).pow(p.get().pow(i as u32));
        &acc + &(&sym(Var::Lambda, i) * &t)
    })
}

/// `eta_R(v_n) - u_n` with `v_n` from the Hazewinkel recursion, `u_1` kept and
/// `u_k = 0` for `k >= 2`. Symbolic in `lambda` and `t`.
pub fn right_unit_relation(p: Prime, n: usize) -> HazewinkelExpr {
    let u = |k: usize| {
        if k == 1 {
            HazewinkelExpr::var(Var::U1)
        } else {
            HazewinkelExpr::zero()
        }
    };
    let p_rat = Rational::from_integer(p.as_bigint());
    let mut rel = right_unit_on_lambda(p, n).scale(&p_rat);
    for i in 1..n {
        let uk = u(n - i);
        if uk.is_zero() {
            continue;
        }
        let term = &right_unit_on_lambda(p, i) * &uk.pow(p.get().pow(i as u32));
        rel = &rel - &term;
    }
    &rel - &u(n)
}

/// Solve for `t_1..=t_N` in `E(1)_* BP<1>` tensored with the rationals.
pub fn solve_right_unit(p: Prime, n_max: usize) -> Result<RightUnitSolution> {
    let lambda = lambda_values(p, n_max)?;
    let p_rat = Rational::from_integer(p.as_bigint());
    let mut t = vec![HazewinkelExpr::one()];
    let mut t_unreduced = vec![HazewinkelExpr::one()];
    for n in 1..=n_max {
        let mut rel = right_unit_relation(p, n);
        for (i, lam) in lambda.iter().enumerate().skip(1).take(n) {
            rel = rel.substitute(Var::Lambda(i), lam);
        }
        let tn = Var::T(n);
        if rel.degree_in(tn) != 1 || rel.coefficient_of(tn, 1) != HazewinkelExpr::constant(p_rat.clone()) {
            return Err(Error::Inconsistent(format!(
                "relation {n} is not p*t_{n} + (terms without t_{n})"
            )));
        }
        let rest = rel.coefficient_of(tn, 0);
        let solved = rest.scale(&(-Rational::one() / &p_rat));
        let mut reduced = solved.clone();
        for j in (1..n).rev() {
            reduced = reduced.substitute(Var::T(j), &t[j]);
        }
        if !reduced.only_uses(&[Var::V1, Var::U1]) {
            return Err(Error::Inconsistent(format!(
                "t_{n} still involves other generators: {reduced}"
            )));
        }
        t_unreduced.push(solved);
        t.push(reduced);
    }
    let sol = RightUnitSolution {
        prime: p,
        lambda,
        t_unreduced,
        t,
    };
    for n in 1..=n_max {
        let residual = closed_relation_residual(&sol, n);
        if !residual.is_zero() {
            return Err(Error::Inconsistent(format!(
                "closed relation for t_{n} leaves {residual}"
            )));
        }
    }
    Ok(sol)
}

/// The closed form of the right-unit relation evaluated on a solution:
/// `p t_n + sum_{1<=i<=n} v1^{(p^i-1)/(p-1)} t_{n-i}^{p^i} / p^{i-1} - u1^{(p^n-1)/(p-1)} / p^{n-1}`.
/// Zero when the solution satisfies it.
pub fn closed_relation_residual(sol: &RightUnitSolution, n: usize) -> HazewinkelExpr {
    let p = sol.prime;
    let p_rat = Rational::from_integer(p.as_bigint());
    let mut lhs = sol.t[n].scale(&p_rat);
    for i in 1..=n {
        let coeff = Rational::one() / rational_pow(p, i as u32 - 1);
        let v = HazewinkelExpr::term(coeff, &[(Var::V1, geometric(p, i as u32))]);
        lhs = &lhs + &(&v * &sol.t[n - i].pow(p.get().pow(i as u32)));
    }
    let rhs = HazewinkelExpr::term(
        Rational::one() / rational_pow(p, n as u32 - 1),
        &[(Var::U1, geometric(p, n as u32))],
    );
    &lhs - &rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn v1() -> HazewinkelExpr {
        HazewinkelExpr::var(Var::V1)
    }

    fn u1() -> HazewinkelExpr {
        HazewinkelExpr::var(Var::U1)
    }

    #[test]
    fn substitution_and_coefficients() {
        let t1 = HazewinkelExpr::var(Var::T(1));
        let e = &(&t1 * &t1) + &(&v1() * &t1);
        let s = e.substitute(Var::T(1), &(&u1() - &v1()));
        // (u-v)^2 + v(u-v) = u^2 - uv
        let expected = &(&u1() * &u1()) - &(&u1() * &v1());
        assert_eq!(s, expected);
        assert_eq!(e.degree_in(Var::T(1)), 2);
        assert_eq!(e.coefficient_of(Var::T(1), 1), v1());
    }

    #[test]
    fn lambda_closed_form() {
        for p in [2, 3, 5] {
            let p = Prime::new(p).unwrap();
            let lam = lambda_values(p, 4).unwrap();
            assert_eq!(lam[1], v1().scale(&q(1, p.get() as i64)));
        }
    }

    #[test]
    fn first_generator() {
        for p in [2u64, 3, 5, 7] {
            let prime = Prime::new(p).unwrap();
            let sol = solve_right_unit(prime, 1).unwrap();
            let expected = (&u1() - &v1()).scale(&q(1, p as i64));
            assert_eq!(sol.t[1], expected);
        }
    }

    #[test]
    fn second_generator_matches_worked_example() {
        for p in [2u64, 3, 5] {
            let prime = Prime::new(p).unwrap();
            let sol = solve_right_unit(prime, 2).unwrap();
            let pi = p as i64;
            // (u1^{p+1} - v1^{p+1})/p^2 - v1 t1^p / p
            let t1 = HazewinkelExpr::var(Var::T(1));
            let worked = &(&u1().pow(p + 1) - &v1().pow(p + 1)).scale(&q(1, pi * pi))
                - &(&v1() * &t1.pow(p)).scale(&q(1, pi));
            assert_eq!(worked.substitute(Var::T(1), &sol.t[1]), sol.t[2], "p = {p}");
        }
    }

    #[test]
    fn relation_is_linear_in_the_new_generator() {
        let p = Prime::new(3).unwrap();
        let rel = right_unit_relation(p, 3);
        assert_eq!(rel.degree_in(Var::T(3)), 1);
        assert_eq!(rel.coefficient_of(Var::T(3), 1), HazewinkelExpr::constant(q(3, 1)));
    }
}
