use std::fmt::Write as _;

use entangle_core::catalog::{entries, CatalogEntry, CatalogState, Table};
use entangle_core::classify::{classify2, classify3, ClassifyConfig, FamilyLabel};
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct Row {
    pub name: String,
    pub table: Option<Table>,
    pub expected: FamilyLabel,
    pub got: Result<FamilyLabel, String>,
}

impl Row {
    pub fn ok(&self) -> bool {
        self.got.as_ref().is_ok_and(|g| g.same_class(&self.expected))
    }
}

fn check(e: CatalogEntry, cfg: &ClassifyConfig) -> Row {
    let got = match &e.state {
        CatalogState::Three(t) => classify3(t, cfg),
        CatalogState::Two(t) => classify2(t, cfg),
    };
    Row {
        name: e.name,
        table: e.table,
        expected: e.expected,
        got: got.map(|c| c.label).map_err(|err| err.to_string()),
    }
}

/// Classifies every catalog entry; rows come back in catalog order.
pub fn run(cfg: &ClassifyConfig) -> Vec<Row> {
    entries().into_par_iter().map(|e| check(e, cfg)).collect()
}

const FAMILIES: [&str; 7] = ["Sep", "sigma_2", "tau_2", "sigma_3", "tau_3", "sigma_4", "sigma_5"];

fn multirank(label: &FamilyLabel) -> String {
    format!("({})", label.multirank.iter().map(|r| r.to_string()).collect::<String>())
}

fn section(out: &mut String, title: &str, rows: &[&Row]) -> (usize, usize) {
    writeln!(out, "{title}").unwrap();
    writeln!(out, "  {:<8} {:<18} {:<17} {:<9} {:<5} result", "family", "cell", "state", "multirank", "rank").unwrap();
    let mut ordered: Vec<&Row> = rows.to_vec();
    ordered.sort_by_key(|r| FAMILIES.iter().position(|f| *f == r.expected.family()).unwrap_or(FAMILIES.len()));
    for r in &ordered {
        let rank = r.expected.tensor_rank.map_or("-".to_string(), |t| t.value.to_string());
        let verdict = if r.ok() { "ok" } else { "MISMATCH" };
        writeln!(
            out,
            "  {:<8} {:<18} {:<17} {:<9} {:<5} {verdict}",
            r.expected.family(),
            r.expected.cell.to_string(),
            r.name,
            multirank(&r.expected),
            rank
        )
        .unwrap();
        if !r.ok() {
            writeln!(out, "    expected: {}", r.expected).unwrap();
            match &r.got {
                Ok(g) => writeln!(out, "    got:      {g}").unwrap(),
                Err(e) => writeln!(out, "    error:    {e}").unwrap(),
            }
        }
    }
    let passed = rows.iter().filter(|r| r.ok()).count();
    (passed, rows.len())
}

/// Table-shaped summary plus one count line per section.
pub fn render(rows: &[Row]) -> String {
    let pick = |t: Option<Table>| rows.iter().filter(|r| r.table == t).collect::<Vec<_>>();
    let mut out = String::new();
    let three = section(&mut out, "three-qutrit table", &pick(Some(Table::ThreeQutrit)));
    let two = section(&mut out, "two-qutrit table", &pick(Some(Table::TwoQutrit)));
    let extra = section(&mut out, "further catalog states", &pick(None));
    writeln!(out, "three-qutrit cells: {}/{} pass", three.0, three.1).unwrap();
    writeln!(out, "two-qutrit cells: {}/{} pass", two.0, two.1).unwrap();
    writeln!(out, "further states: {}/{} pass", extra.0, extra.1).unwrap();
    out
}
