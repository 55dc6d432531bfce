//! JSON documents emitted by the command line, and their conversions back to
//! the core types.
//!
//! Rationals are always strings (`"7"`, `"-3/8"`), never floats. Weights are
//! integers, or the string `"inf"` for the zero polynomial.

use std::collections::BTreeMap;
use std::fmt;

use coopbasis_core::filtration::{
    Claim, ClaimCheck, Congruence, CongruenceReport, PhiExpansion, TraceStep, WeightReport,
};
use coopbasis_core::margolis::{Combination, HomologyGroup, MargolisHomology, Primitive};
use coopbasis_core::semistable::GExpansion;
use coopbasis_core::{Poly, Rational, Valuation};
use num_bigint::BigUint;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

/// A rational serialized as `"num/den"` or `"num"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map(Q).map_err(de::Error::custom)
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let bad = || format!("`{s}` is not a rational");
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: num_bigint::BigInt = num.parse().map_err(|_| bad())?;
    let den: num_bigint::BigInt = den.parse().map_err(|_| bad())?;
    if den == 0u8.into() {
        return Err(format!("`{s}` has a zero denominator"));
    }
    Ok(Rational::new(num, den))
}

pub fn poly_to_strings(f: &Poly) -> Vec<Q> {
    f.coeffs().iter().cloned().map(Q).collect()
}

pub fn poly_from_strings(coeffs: &[String]) -> Result<Poly, String> {
    coeffs
        .iter()
        .map(|c| parse_rational(c))
        .collect::<Result<Vec<_>, _>>()
        .map(Poly::from_coeffs)
}

pub fn poly_from_q(coeffs: &[Q]) -> Poly {
    Poly::from_coeffs(coeffs.iter().map(|q| q.0.clone()).collect())
}

/// A weight serialized as an integer, or `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct W(pub Valuation);

impl Serialize for W {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Valuation::Finite(v) => s.serialize_i64(v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for W {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(W(Valuation::Finite(v))),
            Raw::Str(s) if s == "inf" => Ok(W(Valuation::Infinite)),
            Raw::Str(s) => Err(de::Error::custom(format!("weight `{s}` is neither an integer nor \"inf\""))),
        }
    }
}

impl fmt::Display for W {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn expansion_to_map(e: &GExpansion) -> BTreeMap<usize, Q> {
    e.iter().map(|(j, c)| (j, Q(c.clone()))).collect()
}

fn expansion_from_map(m: &BTreeMap<usize, Q>) -> GExpansion {
    GExpansion::from_map(m.iter().map(|(&j, q)| (j, q.0.clone())).collect())
}

/// One row of the `phi` or `g` tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRow {
    pub n: u64,
    pub degree: Option<usize>,
    pub af: i64,
    pub coefficients: Vec<Q>,
    pub display: String,
}

impl PolyRow {
    pub fn new(n: u64, af: i64, f: &Poly) -> Self {
        PolyRow {
            n,
            degree: f.degree(),
            af,
            coefficients: poly_to_strings(f),
            display: f.to_string(),
        }
    }

    pub fn poly(&self) -> Poly {
        poly_from_q(&self.coefficients)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTable {
    pub prime: u64,
    pub rows: Vec<PolyRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GExpansionDoc {
    pub input: Vec<Q>,
    pub coefficients: BTreeMap<usize, Q>,
}

impl GExpansionDoc {
    pub fn new(input: &Poly, e: &GExpansion) -> Self {
        GExpansionDoc {
            input: poly_to_strings(input),
            coefficients: expansion_to_map(e),
        }
    }

    pub fn expansion(&self) -> GExpansion {
        expansion_from_map(&self.coefficients)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDoc {
    pub input: Vec<Q>,
    pub weight: W,
    pub argmin: Vec<usize>,
    pub expansion: BTreeMap<usize, Q>,
}

impl WeightDoc {
    pub fn new(input: &Poly, r: &WeightReport) -> Self {
        WeightDoc {
            input: poly_to_strings(input),
            weight: W(r.weight),
            argmin: r.argmin.clone(),
            expansion: expansion_to_map(&r.expansion),
        }
    }

    pub fn report(&self) -> WeightReport {
        WeightReport {
            expansion: expansion_from_map(&self.expansion),
            weight: self.weight.0,
            argmin: self.argmin.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub weight: i64,
    pub indices: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiExpansionDoc {
    pub input: Vec<Q>,
    #[serde(rename = "M")]
    pub precision: u32,
    /// Coefficients reduced into `[0, 2^M)`, as decimal strings.
    pub coeffs: BTreeMap<u64, String>,
    pub exact_coeffs: BTreeMap<u64, Q>,
    pub residual: Vec<Q>,
    pub residual_weight: W,
    pub trace: Vec<TraceDoc>,
}

impl PhiExpansionDoc {
    pub fn new(input: &Poly, e: &PhiExpansion) -> Self {
        PhiExpansionDoc {
            input: poly_to_strings(input),
            precision: e.precision,
            coeffs: e.reduced_coeffs().into_iter().map(|(k, c)| (k, c.to_string())).collect(),
            exact_coeffs: e.coeffs.iter().map(|(&k, c)| (k, Q(c.clone()))).collect(),
            residual: poly_to_strings(&e.residual),
            residual_weight: W(e.residual_weight),
            trace: e
                .trace
                .iter()
                .map(|s| TraceDoc {
                    weight: s.weight,
                    indices: s.indices.clone(),
                })
                .collect(),
        }
    }

    pub fn expansion(&self) -> PhiExpansion {
        PhiExpansion {
            precision: self.precision,
            coeffs: self.exact_coeffs.iter().map(|(&k, q)| (k, q.0.clone())).collect(),
            residual: poly_from_q(&self.residual),
            residual_weight: self.residual_weight.0,
            trace: self
                .trace
                .iter()
                .map(|s| TraceStep {
                    weight: s.weight,
                    indices: s.indices.clone(),
                })
                .collect(),
        }
    }

    pub fn reduced(&self) -> Result<BTreeMap<u64, BigUint>, String> {
        self.coeffs
            .iter()
            .map(|(&k, c)| c.parse().map(|c| (k, c)).map_err(|_| format!("bad coefficient `{c}`")))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralityDoc {
    pub prime: u64,
    pub input: Vec<Q>,
    pub semistable: bool,
    /// `g-expansion` at `p = 2`, `residues` otherwise.
    pub method: String,
    pub min_coeff_valuation: W,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_expansion: Option<BTreeMap<usize, Q>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceDoc {
    pub claim: String,
    pub n: u64,
    pub weight_lhs: W,
    pub weight_rhs: W,
    pub weight_diff: W,
    pub pass: bool,
}

pub fn congruences_to_docs(r: &CongruenceReport) -> Vec<CongruenceDoc> {
    r.checks
        .iter()
        .map(|c| CongruenceDoc {
            claim: c.claim.name().to_string(),
            n: c.n,
            weight_lhs: W(c.witness.weight_lhs),
            weight_rhs: W(c.witness.weight_rhs),
            weight_diff: W(c.witness.weight_diff),
            pass: c.witness.pass,
        })
        .collect()
}

pub fn congruences_from_docs(docs: &[CongruenceDoc]) -> Result<CongruenceReport, String> {
    let checks = docs
        .iter()
        .map(|d| {
            let claim = Claim::from_name(&d.claim).ok_or_else(|| format!("unknown claim `{}`", d.claim))?;
            Ok(ClaimCheck {
                claim,
                n: d.n,
                witness: Congruence {
                    weight_lhs: d.weight_lhs.0,
                    weight_rhs: d.weight_rhs.0,
                    weight_diff: d.weight_diff.0,
                    pass: d.pass,
                },
            })
        })
        .collect::<Result<_, String>>()?;
    Ok(CongruenceReport { checks })
}

/// A named check in the `verify` report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckDoc {
    pub kind: String,
    pub item: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyDoc {
    pub prime: u64,
    pub max_n: u64,
    pub max_k: u64,
    pub pass: bool,
    pub checks: Vec<CheckDoc>,
    pub congruences: Vec<CongruenceDoc>,
}

/// One term `coefficient * monomial` of a homology representative.
pub type TermDoc = (u64, String);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDoc {
    pub degree: u64,
    pub dimension: usize,
    pub generators: Vec<Vec<TermDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyDoc {
    pub dimension: usize,
    pub groups: Vec<GroupDoc>,
}

impl HomologyDoc {
    pub fn new(h: &MargolisHomology) -> Self {
        HomologyDoc {
            dimension: h.total_dimension(),
            groups: h
                .groups
                .iter()
                .map(|g| GroupDoc {
                    degree: g.degree,
                    dimension: g.dimension,
                    generators: g
                        .generators
                        .iter()
                        .map(|c| c.iter().map(|(coef, m)| (*coef, m.to_string())).collect())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn homology(&self, primitive: Primitive) -> Result<MargolisHomology, String> {
        let groups = self
            .groups
            .iter()
            .map(|g| {
                let generators = g
                    .generators
                    .iter()
                    .map(|terms| {
                        terms
                            .iter()
                            .map(|(c, m)| m.parse().map(|m| (*c, m)))
                            .collect::<Result<Combination, String>>()
                    })
                    .collect::<Result<_, String>>()?;
                Ok(HomologyGroup {
                    degree: g.degree,
                    dimension: g.dimension,
                    generators,
                })
            })
            .collect::<Result<_, String>>()?;
        Ok(MargolisHomology { primitive, groups })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyPair {
    #[serde(rename = "Q0")]
    pub q0: HomologyDoc,
    #[serde(rename = "Q1")]
    pub q1: HomologyDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MargolisDoc {
    pub p: u64,
    pub k: u64,
    pub basis: Vec<String>,
    pub degrees: Vec<u64>,
    pub homology: HomologyPair,
    pub cover_rank: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings() {
        for s in ["0", "7", "-3/8", "12345678901234567890123/2"] {
            assert_eq!(Q(parse_rational(s).unwrap()).0.to_string(), s);
        }
        assert_eq!(parse_rational("4/8").unwrap().to_string(), "1/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(serde_json::to_string(&W(Valuation::Infinite)).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&W(Valuation::Finite(-3))).unwrap(), "-3");
        assert_eq!(serde_json::from_str::<W>("-3").unwrap(), W(Valuation::Finite(-3)));
        assert_eq!(serde_json::from_str::<W>("\"inf\"").unwrap(), W(Valuation::Infinite));
        assert!(serde_json::from_str::<W>("\"nan\"").is_err());
    }
}
