//! Command-line definitions and their implementations.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coopbasis_core::filtration::{self, verify_congruences, Workspace};
use coopbasis_core::margolis::{
    cover_rank, enumerate_m1, expected_q0_generator, expected_q1_generator, margolis_homology,
    Primitive,
};
use coopbasis_core::phi::{generators_needed, phi_family, phi_family_oracle, phi_monomial};
use coopbasis_core::semistable::{
    describe, expand_in_g, g_poly, is_semistable_2local, is_semistable_plocal_residues,
};
use coopbasis_core::{Error, Poly, Prime, DEFAULT_BUDGET, DEFAULT_MAX_DEGREE};

use crate::format::{
    congruences_to_docs, CheckDoc, GExpansionDoc, HomologyDoc, HomologyPair, IntegralityDoc,
    MargolisDoc, PhiExpansionDoc, PolyRow, PolyTable, VerifyDoc, WeightDoc,
};
use crate::parse::{parse_poly, ParseError};
use crate::render::{render, Format};

/// Exact computations with semistable numerical polynomials, the phi basis
/// of p-local K-theory cooperations, and Margolis homology of its weight
/// pieces.
#[derive(Debug, Parser)]
#[command(name = "coopbasis", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Cap on residue evaluations and enumerated monomials.
    #[arg(long, global = true, env = "COOPBASIS_BUDGET", default_value_t = DEFAULT_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Largest polynomial degree any computation may build.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DEGREE,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub max_degree: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Basis {
    G,
    Phi,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of phi_1..phi_n with degrees and Adams filtrations.
    Phi {
        #[arg(long, default_value = "2", value_parser = parse_prime)]
        prime: Prime,
        #[arg(long)]
        n: usize,
    },
    /// Table of g_0..g_n.
    G {
        #[arg(long)]
        n: usize,
    },
    /// Expand a polynomial in the g basis or in the phi monomials (2-local).
    Expand {
        #[arg(long, value_enum, default_value_t = Basis::G)]
        basis: Basis,
        /// Stop once the residual has filtration weight at least this.
        #[arg(long, default_value_t = 10)]
        precision: u32,
        /// Expression in `w`, or a JSON array of coefficient strings.
        poly: String,
    },
    /// Decide whether a polynomial is p-locally semistable; exits 1 if not.
    CheckIntegrality {
        #[arg(long, default_value = "2", value_parser = parse_prime)]
        prime: Prime,
        poly: String,
    },
    /// Filtration weight of a polynomial from its g-expansion.
    Weight { poly: String },
    /// Run the whole verification suite; exits 1 if anything fails.
    Verify {
        #[arg(long, default_value = "2", value_parser = parse_prime)]
        prime: Prime,
        #[arg(long, default_value_t = 16)]
        max_n: u64,
        #[arg(long, default_value_t = 12)]
        max_k: u64,
    },
    /// Basis and Margolis homology of the weight pieces M1(k).
    Margolis {
        #[arg(long, default_value = "2", value_parser = parse_prime)]
        prime: Prime,
        /// A single piece.
        #[arg(long, conflicts_with = "max_k", required_unless_present = "max_k")]
        k: Option<u64>,
        /// All pieces 0..=K.
        #[arg(long)]
        max_k: Option<u64>,
    },
}

fn parse_prime(s: &str) -> Result<Prime, String> {
    let p: u64 = s.parse().map_err(|e| format!("{e}"))?;
    Prime::new(p).map_err(|e| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// A mathematical verdict that the input fails, with diagnostics.
    #[error("{0}")]
    Failed(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for mathematical failures, 2 for usage and resource errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::NotSemistable | Error::WeightStalled { .. } | Error::Inconsistent(_))
            | CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

/// Rendered output and whether every check it reports passed.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    let done = |text: String| Ok(Outcome { text, pass: true });
    match &cli.command {
        Command::Phi { prime, n } => {
            let fam = phi_family(*prime, *n, g.max_degree)?;
            let rows = fam
                .polys()
                .iter()
                .zip(fam.af())
                .enumerate()
                .map(|(i, (f, &af))| PolyRow::new(i as u64 + 1, af, f))
                .collect();
            done(render(&PolyTable { prime: prime.get(), rows }, g.format))
        }
        Command::G { n } => {
            if *n as u64 > g.max_degree {
                return Err(Error::Budget {
                    what: "polynomial degree",
                    required: *n as u128,
                    limit: g.max_degree as u128,
                }
                .into());
            }
            let rows = (0..=*n)
                .map(|j| PolyRow::new(j as u64, filtration::g_weight(j), &g_poly(j)))
                .collect();
            done(render(&PolyTable { prime: 2, rows }, g.format))
        }
        Command::Expand { basis, precision, poly } => {
            let f = parse_poly(poly)?;
            check_degree(&f, g.max_degree)?;
            match basis {
                Basis::G => done(render(&GExpansionDoc::new(&f, &expand_in_g(&f)), g.format)),
                Basis::Phi => {
                    let mut ws = Workspace::new(g.max_degree);
                    match filtration::expand_in_phi_with(&mut ws, &f, *precision) {
                        Ok(e) => done(render(&PhiExpansionDoc::new(&f, &e), g.format)),
                        Err(Error::NotSemistable) => Err(CliError::Failed(format!(
                            "{f} is not 2-locally semistable; g-coordinates: {}",
                            describe(&expand_in_g(&f))
                        ))),
                        Err(e) => Err(e.into()),
                    }
                }
            }
        }
        Command::CheckIntegrality { prime, poly } => {
            let f = parse_poly(poly)?;
            check_degree(&f, g.max_degree)?;
            let doc = integrality(*prime, &f, g.budget)?;
            let pass = doc.semistable;
            Ok(Outcome {
                text: render(&doc, g.format),
                pass,
            })
        }
        Command::Weight { poly } => {
            let f = parse_poly(poly)?;
            check_degree(&f, g.max_degree)?;
            done(render(&WeightDoc::new(&f, &filtration::weight(&f)), g.format))
        }
        Command::Verify { prime, max_n, max_k } => {
            let doc = verify(*prime, *max_n, *max_k, g)?;
            let pass = doc.pass;
            Ok(Outcome {
                text: render(&doc, g.format),
                pass,
            })
        }
        Command::Margolis { prime, k, max_k } => {
            let ks = match (k, max_k) {
                (Some(k), _) => *k..=*k,
                (None, Some(m)) => 0..=*m,
                (None, None) => unreachable!("clap requires one of --k, --max-k"),
            };
            let docs = ks.map(|k| margolis_doc(*prime, k, g.budget)).collect::<Result<Vec<_>, _>>()?;
            let pass = docs.iter().all(|d| d.homology.q0.dimension == 1 && d.homology.q1.dimension == 1);
            Ok(Outcome {
                text: render(docs.as_slice(), g.format),
                pass,
            })
        }
    }
}

fn check_degree(f: &Poly, max_degree: u64) -> Result<(), CliError> {
    let d = f.degree().unwrap_or(0) as u64;
    if d > max_degree {
        return Err(Error::Budget {
            what: "polynomial degree",
            required: d as u128,
            limit: max_degree as u128,
        }
        .into());
    }
    Ok(())
}

pub fn integrality(p: Prime, f: &Poly, budget: u64) -> Result<IntegralityDoc, CliError> {
    let (semistable, method, g_expansion) = if p.get() == 2 {
        let e = expand_in_g(f);
        (is_semistable_2local(f), "g-expansion", Some(GExpansionDoc::new(f, &e).coefficients))
    } else {
        (is_semistable_plocal_residues(p, f, budget)?, "residues", None)
    };
    Ok(IntegralityDoc {
        prime: p.get(),
        input: crate::format::poly_to_strings(f),
        semistable,
        method: method.to_string(),
        min_coeff_valuation: crate::format::W(f.min_coeff_valuation(p)),
        g_expansion,
    })
}

pub fn margolis_doc(p: Prime, k: u64, budget: u64) -> Result<MargolisDoc, CliError> {
    let c = enumerate_m1(p, k, budget)?;
    Ok(MargolisDoc {
        p: p.get(),
        k,
        basis: c.basis().iter().map(|m| m.to_string()).collect(),
        degrees: c.degrees().to_vec(),
        homology: HomologyPair {
            q0: HomologyDoc::new(&margolis_homology(&c, Primitive::Q0)),
            q1: HomologyDoc::new(&margolis_homology(&c, Primitive::Q1)),
        },
        cover_rank: cover_rank(p, k),
    })
}

/// The verification suite:
///
/// - the phi recursion equals the right-unit elimination for every generator
///   needed by `m_k`, `k <= max_n`;
/// - every `m_k`, `k <= max_n`, is semistable (g-expansion at `p = 2`,
///   residues otherwise);
/// - at `p = 2`, every filtration congruence up to `max_n`;
/// - for `k <= max_k`, both differentials square to zero on `M1(k)`, both
///   homologies are one-dimensional, and the generators are the expected
///   monomials.
pub fn verify(p: Prime, max_n: u64, max_k: u64, g: &GlobalArgs) -> Result<VerifyDoc, CliError> {
    let mut checks = Vec::new();
    let mut check = |kind: &str, item: String, pass: bool, detail: String| {
        checks.push(CheckDoc {
            kind: kind.to_string(),
            item,
            pass,
            detail,
        })
    };

    let depth = generators_needed(p, max_n);
    let fam = phi_family(p, depth, g.max_degree)?;
    let same = match phi_family_oracle(p, depth, g.max_degree) {
        Ok(oracle) => oracle.polys() == fam.polys(),
        Err(Error::Inconsistent(_)) => false,
        Err(e) => return Err(e.into()),
    };
    check("oracle", format!("phi_1..phi_{depth}"), same, String::new());

    for k in 0..=max_n {
        let m = phi_monomial(p, k, &fam)?;
        let ok = if p.get() == 2 {
            is_semistable_2local(&m.poly)
        } else {
            is_semistable_plocal_residues(p, &m.poly, g.budget)?
        };
        check("integrality", format!("m_{k}"), ok, String::new());
    }

    let congruences = if p.get() == 2 {
        congruences_to_docs(&verify_congruences(max_n, g.max_degree)?)
    } else {
        Vec::new()
    };

    for k in 0..=max_k {
        let c = enumerate_m1(p, k, g.budget)?;
        for (q, expected) in [
            (Primitive::Q0, expected_q0_generator(p, k)),
            (Primitive::Q1, expected_q1_generator(p, k)),
        ] {
            let h = margolis_homology(&c, q);
            let generator = h.sole_generator();
            let matches = generator == Some(&vec![(1, expected.clone())]);
            let ok = c.squares_to_zero(q) && h.total_dimension() == 1 && matches;
            let detail = format!("dim {}, expected generator {expected}", h.total_dimension());
            check("margolis", format!("M1({k}) {q}"), ok, detail);
        }
    }

    let pass = checks.iter().all(|c| c.pass) && congruences.iter().all(|c| c.pass);
    Ok(VerifyDoc {
        prime: p.get(),
        max_n,
        max_k,
        pass,
        checks,
        congruences,
    })
}
