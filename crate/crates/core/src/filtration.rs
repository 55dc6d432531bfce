//! A computable filtration weight on 2-local semistable polynomials.
//!
//! For `f = sum_j b_j g_j` the weight is
//!
//! ```text
//! W(f) = min_j ( nu_2(b_j) + alpha(j) - 2j )
//! ```
//!
//! which assigns `g_j` its Adams filtration `alpha(j) - 2j` and extends to
//! rational multiples by `W(f / 2^i) = W(f) - i`. Two polynomials are
//! congruent modulo higher filtration when they have the same weight and
//! their difference has strictly larger weight.
//!
//! Everything here is at `p = 2`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::arith::{self, nu_p, Prime, Rational, Valuation};
use crate::error::{Error, Result};
use crate::phi::{self, PhiFamily};
use crate::poly::Poly;
use crate::semistable::{GBasis, GExpansion};

/// `alpha(j) - 2j`, the weight of `g_j`.
pub fn g_weight(j: usize) -> i64 {
    j.count_ones() as i64 - 2 * j as i64
}

/// Weight of a `g`-expansion and the indices attaining it.
pub fn weight_of_expansion(e: &GExpansion) -> (Valuation, Vec<usize>) {
    let mut best = Valuation::Infinite;
    let mut argmin = Vec::new();
    for (j, b) in e.iter() {
        let w = nu_p(Prime::TWO, b) + g_weight(j);
        if w < best {
            best = w;
            argmin.clear();
        }
        if w == best {
            argmin.push(j);
        }
    }
    (best, argmin)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightReport {
    pub expansion: GExpansion,
    pub weight: Valuation,
    pub argmin: Vec<usize>,
}

pub fn weight(f: &Poly) -> WeightReport {
    Workspace::new(crate::DEFAULT_MAX_DEGREE).weight(f)
}

/// `W(a) = W(b)` and `W(a - b) > W(a)`; true when `a = b`.
pub fn congruent_mod_higher_af(a: &Poly, b: &Poly) -> bool {
    Workspace::new(crate::DEFAULT_MAX_DEGREE).congruence(a, b).pass
}

/// Witness of a congruence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Congruence {
    pub weight_lhs: Valuation,
    pub weight_rhs: Valuation,
    pub weight_diff: Valuation,
    pub pass: bool,
}

/// Cached `g_j`, `phi_n` and `m_k` shared by a batch of weight computations.
#[derive(Clone, Debug)]
pub struct Workspace {
    basis: GBasis,
    family: PhiFamily,
    monomials: BTreeMap<u64, Poly>,
    max_degree: u64,
}

impl Workspace {
    pub fn new(max_degree: u64) -> Self {
        Workspace {
            basis: GBasis::up_to(0),
            family: phi::phi_family(Prime::TWO, 0, max_degree).expect("empty family"),
            monomials: BTreeMap::new(),
            max_degree,
        }
    }

    pub fn expand(&mut self, f: &Poly) -> GExpansion {
        self.basis.expand(f)
    }

    pub fn weight(&mut self, f: &Poly) -> WeightReport {
        let expansion = self.basis.expand(f);
        let (weight, argmin) = weight_of_expansion(&expansion);
        WeightReport {
            expansion,
            weight,
            argmin,
        }
    }

    pub fn congruence(&mut self, a: &Poly, b: &Poly) -> Congruence {
        let weight_lhs = self.weight(a).weight;
        let weight_rhs = self.weight(b).weight;
        let weight_diff = self.weight(&(a - b)).weight;
        let pass = a == b || (weight_lhs == weight_rhs && weight_diff > weight_lhs);
        Congruence {
            weight_lhs,
            weight_rhs,
            weight_diff,
            pass,
        }
    }

    pub fn g(&mut self, j: usize) -> Poly {
        self.basis.extend_to(j);
        self.basis.get(j).clone()
    }

    pub fn phi(&mut self, n: usize) -> Result<Poly> {
        self.family.extend_to(n, self.max_degree)?;
        Ok(self.family.get(n).expect("just extended").clone())
    }

    /// The digit monomial `m_k = prod phi_{i+1}^{k_i}`.
    pub fn monomial(&mut self, k: u64) -> Result<Poly> {
        if let Some(m) = self.monomials.get(&k) {
            return Ok(m.clone());
        }
        let degree = phi::monomial_degree(Prime::TWO, k);
        if degree > self.max_degree {
            return Err(Error::Budget {
                what: "polynomial degree",
                required: degree as u128,
                limit: self.max_degree as u128,
            });
        }
        self.family
            .extend_to(phi::generators_needed(Prime::TWO, k), self.max_degree)?;
        let m = phi::phi_monomial(Prime::TWO, k, &self.family)?.poly;
        self.monomials.insert(k, m.clone());
        Ok(m)
    }
}

/// The congruences between `g_n`, powers of `phi_1` and the `phi` monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Claim {
    /// `phi_n = phi_1^{2^{n-1}} / 2^{2^{n-1}-1}`, for `2^{n-1} <= N`.
    PhiVsPhi1Power,
    /// `g_n = phi_1^n / n!`
    GVsPhi1Factorial,
    /// `g_n = phi_1^n / 2^{n - alpha(n)}`
    GVsPhi1TwoAdic,
    /// `g_{2^n} = phi_{n+1}`, for `2^n <= N`.
    GPowerOfTwoVsPhi,
    /// `g_n = g_1^{n_0} g_2^{n_1} g_4^{n_2} ...` over the binary digits of `n`.
    GVsDyadicGProduct,
    /// `g_n = phi_1^{n_0} phi_2^{n_1} ...`, i.e. `g_n = m_n`.
    GVsPhiMonomial,
}

impl Claim {
    pub const ALL: [Claim; 6] = [
        Claim::PhiVsPhi1Power,
        Claim::GVsPhi1Factorial,
        Claim::GVsPhi1TwoAdic,
        Claim::GPowerOfTwoVsPhi,
        Claim::GVsDyadicGProduct,
        Claim::GVsPhiMonomial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Claim::PhiVsPhi1Power => "phi_vs_phi1_power",
            Claim::GVsPhi1Factorial => "g_vs_phi1_factorial",
            Claim::GVsPhi1TwoAdic => "g_vs_phi1_two_adic",
            Claim::GPowerOfTwoVsPhi => "g_power_of_two_vs_phi",
            Claim::GVsDyadicGProduct => "g_vs_dyadic_g_product",
            Claim::GVsPhiMonomial => "g_vs_phi_monomial",
        }
    }

    pub fn from_name(name: &str) -> Option<Claim> {
        Claim::ALL.into_iter().find(|c| c.name() == name)
    }

    /// The indices `n` this claim is checked at for a bound `n_max`.
    pub fn indices(self, n_max: u64) -> Vec<u64> {
        match self {
            Claim::PhiVsPhi1Power => (1..64).take_while(|&n| 1u64 << (n - 1) <= n_max).collect(),
            Claim::GPowerOfTwoVsPhi => (0..63).take_while(|&n| 1u64 << n <= n_max).collect(),
            _ => (1..=n_max).collect(),
        }
    }

    /// Both sides of the congruence at index `n`.
    pub fn sides(self, n: u64, ws: &mut Workspace) -> Result<(Poly, Poly)> {
        let nn = n as usize;
        let two_pow = |e: u64| Rational::from_integer(BigInt::one() << e);
        Ok(match self {
            Claim::PhiVsPhi1Power => {
                let half = 1u64 << (n - 1);
                let rhs = ws.phi(1)?.pow(half).scale(&two_pow(half - 1).recip());
                (ws.phi(nn)?, rhs)
            }
            Claim::GVsPhi1Factorial => {
                let fact = Rational::from_integer(arith::factorial(n));
                (ws.g(nn), ws.phi(1)?.pow(n).scale(&fact.recip()))
            }
            Claim::GVsPhi1TwoAdic => {
                let e = n - n.count_ones() as u64;
                (ws.g(nn), ws.phi(1)?.pow(n).scale(&two_pow(e).recip()))
            }
            Claim::GPowerOfTwoVsPhi => (ws.g(1 << n), ws.phi(nn + 1)?),
            Claim::GVsDyadicGProduct => {
                let mut rhs = Poly::one();
                for i in 0..64 {
                    if n >> i & 1 == 1 {
                        rhs = &rhs * &ws.g(1 << i);
                    }
                }
                (ws.g(nn), rhs)
            }
            Claim::GVsPhiMonomial => (ws.g(nn), ws.monomial(n)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimCheck {
    pub claim: Claim,
    pub n: u64,
    pub witness: Congruence,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CongruenceReport {
    pub checks: Vec<ClaimCheck>,
}

impl CongruenceReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.witness.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClaimCheck> + '_ {
        self.checks.iter().filter(|c| !c.witness.pass)
    }

    pub fn for_claim(&self, claim: Claim) -> impl Iterator<Item = &ClaimCheck> + '_ {
        self.checks.iter().filter(move |c| c.claim == claim)
    }
}

/// Check every [`Claim`] at every applicable index up to `n_max`. Failed
/// congruences are reported, not raised; only resource limits error.
pub fn verify_congruences(n_max: u64, max_degree: u64) -> Result<CongruenceReport> {
    let mut ws = Workspace::new(max_degree);
    let mut checks = Vec::new();
    for claim in Claim::ALL {
        for n in claim.indices(n_max) {
            let (lhs, rhs) = claim.sides(n, &mut ws)?;
            checks.push(ClaimCheck {
                claim,
                n,
                witness: ws.congruence(&lhs, &rhs),
            });
        }
    }
    Ok(CongruenceReport { checks })
}

/// One reduction step: the weight of the residual before the step and the
/// indices whose monomials were subtracted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub weight: i64,
    pub indices: Vec<u64>,
}

/// Expansion of a semistable polynomial in the monomials `m_k` up to a
/// residual of weight at least `precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiExpansion {
    pub precision: u32,
    /// Exact accumulated coefficients; `f = sum coeffs[k] m_k + residual`.
    pub coeffs: BTreeMap<u64, Rational>,
    pub residual: Poly,
    pub residual_weight: Valuation,
    pub trace: Vec<TraceStep>,
}

impl PhiExpansion {
    /// Coefficients as representatives in `[0, 2^precision)`.
    pub fn reduced_coeffs(&self) -> BTreeMap<u64, BigUint> {
        self.coeffs
            .iter()
            .map(|(&k, c)| {
                let r = arith::two_adic_residue(c, self.precision)
                    .expect("coefficients of a semistable expansion are 2-integral");
                (k, r)
            })
            .collect()
    }

    /// `sum coeffs[k] m_k + residual`, which must reproduce the input.
    pub fn reconstruct(&self, ws: &mut Workspace) -> Result<Poly> {
        let mut acc = self.residual.clone();
        for (&k, c) in &self.coeffs {
            acc = &acc + &ws.monomial(k)?.scale(c);
        }
        Ok(acc)
    }
}

/// Greedy filtration-graded reduction: expand the residual in the `g`-basis,
/// subtract `b_j m_j` for every index `j` of minimal weight, repeat until the
/// residual has weight `>= precision`.
///
/// Each step replaces `b_j g_j` by `b_j m_j`, which agree modulo higher
/// filtration, so the weight must rise strictly. A step that fails to raise
/// it is reported as [`Error::WeightStalled`].
pub fn expand_in_phi(f: &Poly, precision: u32, max_degree: u64) -> Result<PhiExpansion> {
    let mut ws = Workspace::new(max_degree);
    expand_in_phi_with(&mut ws, f, precision)
}

pub fn expand_in_phi_with(ws: &mut Workspace, f: &Poly, precision: u32) -> Result<PhiExpansion> {
    let mut report = ws.weight(f);
    if !report.expansion.is_2local_integral() {
        return Err(Error::NotSemistable);
    }
    let target = Valuation::Finite(precision as i64);
    let mut residual = f.clone();
    let mut coeffs: BTreeMap<u64, Rational> = BTreeMap::new();
    let mut trace = Vec::new();
    while report.weight < target {
        let before = report.weight;
        let indices: Vec<u64> = report.argmin.iter().map(|&j| j as u64).collect();
        for &j in &indices {
            let b = report.expansion.get(j as usize);
            residual = &residual - &ws.monomial(j)?.scale(&b);
            let slot = coeffs.entry(j).or_insert_with(Rational::zero);
            *slot += b;
        }
        coeffs.retain(|_, c| !c.is_zero());
        trace.push(TraceStep {
            weight: before.finite().expect("finite below the target"),
            indices,
        });
        report = ws.weight(&residual);
        if report.weight <= before {
            return Err(Error::WeightStalled {
                step: trace.len(),
                before: format!("{before}"),
                after: format!("{}", report.weight),
            });
        }
    }
    Ok(PhiExpansion {
        precision,
        coeffs,
        residual,
        residual_weight: report.weight,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semistable::g_poly;
    use crate::DEFAULT_MAX_DEGREE;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn fin(v: i64) -> Valuation {
        Valuation::Finite(v)
    }

    fn phi(n: usize) -> Poly {
        Workspace::new(DEFAULT_MAX_DEGREE).phi(n).unwrap()
    }

    #[test]
    fn weight_examples() {
        let r = weight(&g_poly(2));
        assert_eq!((r.weight, r.argmin), (fin(-3), alloc::vec![2]));

        let r = weight(&phi(2));
        assert_eq!(r.expansion.get(3), q(12, 1));
        assert_eq!(r.expansion.get(2), q(17, 1));
        assert_eq!(r.expansion.get(1), q(6, 1));
        // min(2 + 2 - 6, 0 + 1 - 4, 1 + 1 - 2)
        assert_eq!(r.weight, fin(-3));

        assert_eq!(weight(&Poly::zero()).weight, Valuation::Infinite);
    }

    #[test]
    fn congruence_examples() {
        let (g2, p2) = (g_poly(2), phi(2));
        assert!(congruent_mod_higher_af(&g2, &p2));
        let d = weight(&(&g2 - &p2));
        assert_eq!(d.weight, fin(-2));
        assert_eq!(
            (d.expansion.get(3), d.expansion.get(2), d.expansion.get(1)),
            (q(-12, 1), q(-16, 1), q(-6, 1))
        );

        assert_eq!(g_poly(1), phi(1));
        assert!(congruent_mod_higher_af(&g_poly(1), &phi(1)));
        assert!(!congruent_mod_higher_af(&phi(1), &phi(1).scale(&q(2, 1))));
    }

    #[test]
    fn generator_and_monomial_weights() {
        let mut ws = Workspace::new(DEFAULT_MAX_DEGREE);
        for n in 1..=5u32 {
            let p = ws.phi(n as usize).unwrap();
            assert_eq!(ws.weight(&p).weight, fin(-((1 << n) - 1)));
        }
        for k in 0..=32u64 {
            let m = ws.monomial(k).unwrap();
            assert_eq!(ws.weight(&m).weight, fin(phi::monomial_af(Prime::TWO, k)), "m_{k}");
        }
    }

    #[test]
    fn claims_small() {
        let report = verify_congruences(1, DEFAULT_MAX_DEGREE).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.checks.len(), 6);

        let report = verify_congruences(2, DEFAULT_MAX_DEGREE).unwrap();
        let check = report
            .for_claim(Claim::GVsPhiMonomial)
            .find(|c| c.n == 2)
            .unwrap();
        assert_eq!(
            check.witness,
            Congruence {
                weight_lhs: fin(-3),
                weight_rhs: fin(-3),
                weight_diff: fin(-2),
                pass: true
            }
        );
    }

    #[test]
    fn claims_to_sixteen() {
        let report = verify_congruences(16, DEFAULT_MAX_DEGREE).unwrap();
        assert!(report.all_pass(), "{:?}", report.failures().collect::<Vec<_>>());
        assert_eq!(report.for_claim(Claim::PhiVsPhi1Power).count(), 5);
        assert_eq!(report.for_claim(Claim::GPowerOfTwoVsPhi).count(), 5);
        assert_eq!(report.for_claim(Claim::GVsPhiMonomial).count(), 16);
    }

    #[test]
    fn claim_names_round_trip() {
        for c in Claim::ALL {
            assert_eq!(Claim::from_name(c.name()), Some(c));
        }
        assert_eq!(Claim::from_name("nope"), None);
    }

    #[test]
    fn expand_basis_element() {
        // The first step subtracts b_2 m_2 with b_2 = 17, the g-coordinate, so
        // the residual is (-16)^s phi_2 and the coefficient 1 - (-16)^s.
        let e = expand_in_phi(&phi(2), 6, DEFAULT_MAX_DEGREE).unwrap();
        assert_eq!(e.coeffs.len(), 1);
        assert_eq!(e.coeffs[&2], q(4097, 1));
        assert_eq!(e.reduced_coeffs()[&2], BigUint::one());
        assert_eq!(e.residual, phi(2).scale(&q(-4096, 1)));
        assert_eq!(e.residual_weight, fin(9));
        let weights: Vec<i64> = e.trace.iter().map(|t| t.weight).collect();
        assert_eq!(weights, [-3, 1, 5]);
    }

    #[test]
    fn expand_phi1_squared() {
        let f = phi(1).pow(2);
        let mut ws = Workspace::new(DEFAULT_MAX_DEGREE);
        let e = expand_in_phi_with(&mut ws, &f, 4).unwrap();
        assert_eq!(e.trace[0], TraceStep { weight: -2, indices: alloc::vec![2] });
        assert_eq!(e.trace[1].weight, -1);
        // Residual after step 1 is -24 g3 - 32 g2 - 11 g1.
        let step1 = &f - &phi(2).scale(&q(2, 1));
        let r = ws.weight(&step1);
        assert_eq!(r.expansion.get(3), q(-24, 1));
        assert_eq!(r.expansion.get(2), q(-32, 1));
        assert_eq!(r.expansion.get(1), q(-11, 1));
        assert_eq!(r.weight, fin(-1));
        assert!(e.residual_weight >= fin(4));
        assert!(e.trace.windows(2).all(|w| w[0].weight < w[1].weight));
        assert_eq!(e.reconstruct(&mut ws).unwrap(), f);
    }

    #[test]
    fn expand_g2() {
        let e = expand_in_phi(&g_poly(2), 1, DEFAULT_MAX_DEGREE).unwrap();
        assert_eq!(e.reduced_coeffs()[&2], BigUint::one());
        assert_eq!(e.trace[0].indices, [2]);
        assert!(e.residual_weight >= fin(1));
    }

    #[test]
    fn expand_rejects_non_semistable() {
        let f = Poly::monomial(q(1, 2), 1);
        assert_eq!(expand_in_phi(&f, 3, DEFAULT_MAX_DEGREE), Err(Error::NotSemistable));
    }

    fn semistable_poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec((-6i64..6, prop_oneof![Just(1i64), Just(3), Just(5)]), 1..7)
            .prop_map(|cs| {
                let mut basis = GBasis::up_to(cs.len());
                let e = GExpansion::from_map(
                    cs.into_iter().enumerate().map(|(j, (n, d))| (j, q(n, d))).collect(),
                );
                basis.recombine(&e)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn weight_is_sound(f in semistable_poly(), g in semistable_poly(), c in -20i64..20) {
            let mut ws = Workspace::new(DEFAULT_MAX_DEGREE);
            let (wf, wg) = (ws.weight(&f).weight, ws.weight(&g).weight);
            prop_assert!(ws.weight(&(&f * &g)).weight >= wf + wg);
            prop_assert!(ws.weight(&(&f + &g)).weight >= wf.min(wg));
            prop_assert_eq!(ws.weight(&f.scale(&q(2, 1))).weight, wf + 1);
            prop_assume!(c != 0);
            let c = q(c, 1);
            prop_assert_eq!(ws.weight(&f.scale(&c)).weight, nu_p(Prime::TWO, &c) + wf);
        }

        #[test]
        fn expansion_reconstructs(f in semistable_poly(), precision in 1u32..6) {
            let mut ws = Workspace::new(DEFAULT_MAX_DEGREE);
            let e = expand_in_phi_with(&mut ws, &f, precision).unwrap();
            prop_assert_eq!(e.reconstruct(&mut ws).unwrap(), f);
            prop_assert!(e.residual_weight >= Valuation::Finite(precision as i64));
            prop_assert!(e.trace.windows(2).all(|w| w[0].weight < w[1].weight));
        }
    }
}
