//! Binomial polynomials, the semistable basis `g_n`, expansion in that basis
//! and p-local integrality tests for semistable numerical polynomials.
//!
//! A polynomial `f(w)` is p-local semistable when `f(k)` lies in `Z_(p)` for
//! every p-local unit `k`. At `p = 2` the `g_n` form a `Z_(2)`-basis of these,
//! so integrality is read off from the `g`-coordinates. At odd primes it is
//! decided by exhausting unit residues.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{self, is_p_local_integer, mul_mod, Prime, Rational, Valuation};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// `binom(x, n) = x(x-1)...(x-n+1)/n!`, written in the same variable as every
/// other [`Poly`].
pub fn binomial_poly(n: usize) -> Poly {
    let mut acc = Poly::one();
    for i in 0..n {
        acc = &acc * &Poly::linear_root(Rational::from_integer(i.into()));
    }
    acc.scale(&Rational::new(BigInt::one(), arith::factorial(n as u64)))
}

/// `g_n(w) = (w-1)(w-3)...(w-(2n-1)) / (2^n n!)`
pub fn g_poly(n: usize) -> Poly {
    GBasis::up_to(n).get(n).clone()
}

/// The polynomials `g_0..=g_d`, built incrementally from
/// `g_{j+1} = g_j * (w - (2j+1)) / (2(j+1))`.
#[derive(Clone, Debug)]
pub struct GBasis {
    polys: Vec<Poly>,
}

impl GBasis {
    pub fn up_to(d: usize) -> Self {
        let mut basis = GBasis {
            polys: alloc::vec![Poly::one()],
        };
        basis.extend_to(d);
        basis
    }

    pub fn extend_to(&mut self, d: usize) {
        while self.polys.len() <= d {
            let j = self.polys.len() - 1;
            let factor = Poly::linear_root(Rational::from_integer((2 * j + 1).into()))
                .scale(&Rational::new(BigInt::one(), BigInt::from(2 * (j + 1))));
            let next = &self.polys[j] * &factor;
            self.polys.push(next);
        }
    }

    pub fn get(&self, j: usize) -> &Poly {
        &self.polys[j]
    }

    pub fn max_index(&self) -> usize {
        self.polys.len() - 1
    }

    /// Coordinates of `f` in the `g`-basis by descending-degree elimination.
    /// `g_j` has degree `j` and leading coefficient `1/(2^j j!)`.
    pub fn expand(&mut self, f: &Poly) -> GExpansion {
        let Some(deg) = f.degree() else {
            return GExpansion::default();
        };
        self.extend_to(deg);
        let mut rest = f.clone().into_coeffs();
        let mut coeffs = BTreeMap::new();
        for j in (0..=deg).rev() {
            let top = &rest[j];
            if top.is_zero() {
                continue;
            }
            let g = self.polys[j].coeffs();
            let b = top / &g[j];
            for (i, gi) in g.iter().enumerate() {
                if !gi.is_zero() {
                    rest[i] -= &b * gi;
                }
            }
            debug_assert!(rest[j].is_zero());
            coeffs.insert(j, b);
        }
        GExpansion { coeffs }
    }

    /// `sum_j b_j g_j`
    pub fn recombine(&mut self, e: &GExpansion) -> Poly {
        if let Some(top) = e.max_index() {
            self.extend_to(top);
        }
        e.coeffs.iter().fold(Poly::zero(), |acc, (&j, b)| {
            &acc + &self.polys[j].scale(b)
        })
    }
}

/// Exact `g`-coordinates with finite support. Zero coordinates are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GExpansion {
    coeffs: BTreeMap<usize, Rational>,
}

impl GExpansion {
    pub fn from_map(coeffs: BTreeMap<usize, Rational>) -> Self {
        GExpansion {
            coeffs: coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn get(&self, j: usize) -> Rational {
        self.coeffs.get(&j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (usize, &Rational)> + '_ {
        self.coeffs.iter().map(|(&j, c)| (j, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn as_map(&self) -> &BTreeMap<usize, Rational> {
        &self.coeffs
    }

    /// Every coordinate lies in `Z_(2)`.
    pub fn is_2local_integral(&self) -> bool {
        self.coeffs.values().all(|c| is_p_local_integer(Prime::TWO, c))
    }
}

pub fn expand_in_g(f: &Poly) -> GExpansion {
    GBasis::up_to(f.degree().unwrap_or(0)).expand(f)
}

/// 2-local semistability via the `g`-coordinates.
pub fn is_semistable_2local(f: &Poly) -> bool {
    expand_in_g(f).is_2local_integral()
}

/// p-local semistability by exhausting unit residues.
///
/// With `e = max(0, -min nu_p(coeff))` the scaled polynomial `p^e f` has
/// p-integral coefficients, so its value modulo `p^e` depends only on the
/// residue of the argument. `f(k)` is p-integral for every unit `k` iff
/// `p^e f(k) = 0 mod p^e` on all units of `Z/p^e`.
///
/// Fails with [`Error::Budget`] when `p^e * (deg f + 1)` exceeds `budget`.
pub fn is_semistable_plocal_residues(p: Prime, f: &Poly, budget: u64) -> Result<bool> {
    let e = match f.min_coeff_valuation(p) {
        Valuation::Infinite => return Ok(true),
        Valuation::Finite(v) if v >= 0 => return Ok(true),
        Valuation::Finite(v) => (-v) as u32,
    };
    let terms = f.degree().unwrap_or(0) as u128 + 1;
    let required = (p.get() as u128)
        .checked_pow(e)
        .and_then(|m| m.checked_mul(terms))
        .unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(Error::Budget {
            what: "residue evaluations",
            required,
            limit: budget as u128,
        });
    }
    let modulus = p.checked_pow(e).expect("bounded by the budget check");
    let scale = p.rational_pow(e);
    let coeffs: Vec<u64> = f
        .coeffs()
        .iter()
        .map(|c| arith::reduce_mod(&(c * &scale), modulus).expect("p-integral after scaling"))
        .collect();
    let all_vanish = (1..modulus)
        .filter(|k| k % p.get() != 0)
        .all(|k| {
            coeffs
                .iter()
                .rev()
                .fold(0u64, |acc, &c| (mul_mod(acc, k, modulus) + c) % modulus)
                == 0
        });
    Ok(all_vanish)
}

/// Human readable coordinates, used in diagnostics.
pub fn describe(e: &GExpansion) -> alloc::string::String {
    let parts: Vec<_> = e
        .iter()
        .rev()
        .map(|(j, c)| alloc::format!("{c}*g{j}"))
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}
