//! Output in the three supported formats. JSON is the full document; CSV and
//! the pretty table show the same rows in flattened form.

use clap::ValueEnum;
use serde::Serialize;

use crate::format::{
    GExpansionDoc, IntegralityDoc, MargolisDoc, PhiExpansionDoc, PolyTable, VerifyDoc, WeightDoc, Q,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flushing to memory")).expect("utf-8 input")
    }

    fn pretty(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> =
                cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out += &line(&rule);
        for row in &self.rows {
            out += &line(row);
        }
        out
    }
}

pub trait Document: Serialize {
    fn table(&self) -> Table;
}

pub fn render<D: Document + ?Sized>(doc: &D, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(doc).expect("documents serialize") + "\n",
        Format::Csv => doc.table().csv(),
        Format::Pretty => doc.table().pretty(),
    }
}

fn joined<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn q_str(q: &Q) -> String {
    q.0.to_string()
}

impl Document for PolyTable {
    fn table(&self) -> Table {
        let mut t = Table::new(&["n", "degree", "af", "polynomial"]);
        for r in &self.rows {
            let degree = r.degree.map_or_else(|| "-".to_string(), |d| d.to_string());
            t.push(vec![r.n.to_string(), degree, r.af.to_string(), r.display.clone()]);
        }
        t
    }
}

impl Document for GExpansionDoc {
    fn table(&self) -> Table {
        let mut t = Table::new(&["j", "coefficient"]);
        for (j, c) in self.coefficients.iter().rev() {
            t.push(vec![j.to_string(), q_str(c)]);
        }
        t
    }
}

impl Document for WeightDoc {
    fn table(&self) -> Table {
        let mut t = Table::new(&["j", "coefficient", "term_weight", "minimal"]);
        for (j, c) in self.expansion.iter().rev() {
            let w = coopbasis_core::arith::nu_p(coopbasis_core::Prime::TWO, &c.0)
                + coopbasis_core::filtration::g_weight(*j);
            t.push(vec![
                j.to_string(),
                q_str(c),
                w.to_string(),
                self.argmin.contains(j).to_string(),
            ]);
        }
        t.push(vec!["W".into(), String::new(), self.weight.to_string(), String::new()]);
        t
    }
}

impl Document for PhiExpansionDoc {
    fn table(&self) -> Table {
        let mut t = Table::new(&["kind", "index", "value", "detail"]);
        for (k, c) in &self.coeffs {
            let exact = self.exact_coeffs.get(k).map(q_str).unwrap_or_default();
            t.push(vec!["coefficient".into(), k.to_string(), c.clone(), exact]);
        }
        for (i, s) in self.trace.iter().enumerate() {
            t.push(vec!["step".into(), (i + 1).to_string(), s.weight.to_string(), joined(&s.indices)]);
        }
        let residual = crate::format::poly_from_q(&self.residual).to_string();
        t.push(vec!["residual".into(), String::new(), self.residual_weight.to_string(), residual]);
        t
    }
}

impl Document for IntegralityDoc {
    fn table(&self) -> Table {
        let mut t = Table::new(&["prime", "semistable", "method", "min_coeff_valuation"]);
        t.push(vec![
            self.prime.to_string(),
            self.semistable.to_string(),
            self.method.clone(),
            self.min_coeff_valuation.to_string(),
        ]);
        t
    }
}

impl Document for VerifyDoc {
    fn table(&self) -> Table {
        let mut t = Table::new(&["kind", "item", "pass", "detail"]);
        for c in &self.checks {
            t.push(vec![c.kind.clone(), c.item.clone(), c.pass.to_string(), c.detail.clone()]);
        }
        for c in &self.congruences {
            let detail = format!("W = {}, {}; W(diff) = {}", c.weight_lhs, c.weight_rhs, c.weight_diff);
            t.push(vec!["congruence".into(), format!("{} n={}", c.claim, c.n), c.pass.to_string(), detail]);
        }
        t.push(vec!["overall".into(), String::new(), self.pass.to_string(), String::new()]);
        t
    }
}

impl Document for [MargolisDoc] {
    fn table(&self) -> Table {
        let mut t = Table::new(&["p", "k", "monomials", "cover_rank", "Q0", "Q1"]);
        for d in self {
            let summary = |h: &crate::format::HomologyDoc| {
                let gens = h
                    .groups
                    .iter()
                    .flat_map(|g| &g.generators)
                    .map(|terms| {
                        terms
                            .iter()
                            .map(|(c, m)| if *c == 1 { m.clone() } else { format!("{c} {m}") })
                            .collect::<Vec<_>>()
                            .join(" + ")
                    })
                    .collect::<Vec<_>>()
                    .join("; ");
                format!("dim {}: {gens}", h.dimension)
            };
            t.push(vec![
                d.p.to_string(),
                d.k.to_string(),
                d.basis.len().to_string(),
                d.cover_rank.to_string(),
                summary(&d.homology.q0),
                summary(&d.homology.q1),
            ]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pretty_and_csv_layout() {
        let mut t = Table::new(&["a", "long"]);
        t.push(vec!["xyz".into(), "1, 2".into()]);
        assert_eq!(t.pretty(), "a    long\n---  ----\nxyz  1, 2\n");
        assert_eq!(t.csv(), "a,long\nxyz,\"1, 2\"\n");
    }
}
