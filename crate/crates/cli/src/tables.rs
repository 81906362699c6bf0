//! The four magic-square style tables, checked against bundled golden files.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::{json, Value};
use titsforge::analyze::{analyze, AnalyzeOptions, Simplicity};
use titsforge::construct::{g_build, tits_build, LieSuperAlgebra, TitsOptions};
use titsforge::{Error, Field, Result};

use crate::descriptor::Descriptor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Magic,
    Rectangle,
    Magic3,
    Supermagic,
}

impl TableKind {
    pub const ALL: [TableKind; 4] = [TableKind::Magic, TableKind::Rectangle, TableKind::Magic3, TableKind::Supermagic];

    pub fn name(self) -> &'static str {
        match self {
            TableKind::Magic => "magic",
            TableKind::Rectangle => "rectangle",
            TableKind::Magic3 => "magic3",
            TableKind::Supermagic => "supermagic",
        }
    }

    pub fn golden_text(self) -> &'static str {
        match self {
            TableKind::Magic => include_str!("../golden/magic.json"),
            TableKind::Rectangle => include_str!("../golden/rectangle.json"),
            TableKind::Magic3 => include_str!("../golden/magic3.json"),
            TableKind::Supermagic => include_str!("../golden/supermagic.json"),
        }
    }

    /// Rejects fields on which the table is not defined.
    pub fn admit(self, f: Field) -> Result<()> {
        let p = f.characteristic();
        match self {
            TableKind::Magic | TableKind::Rectangle if p == 3 => Err(Error::Gating(format!(
                "table {} needs characteristic 0 or at least 5 (the Tits construction), got {}; use magic3 or supermagic",
                self.name(),
                f.name()
            ))),
            TableKind::Magic3 | TableKind::Supermagic if p != 3 => Err(Error::Gating(format!(
                "table {} needs characteristic 3, got {}",
                self.name(),
                f.name()
            ))),
            _ => Ok(()),
        }
    }
}

impl FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<TableKind> {
        TableKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown table {s:?}; expected magic, rectangle, magic3 or supermagic")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenCell {
    pub name: String,
    pub dims: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct Golden {
    pub construction: String,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    /// Characteristic a column is restricted to, if any.
    pub column_char: Vec<Option<u32>>,
    pub cells: Vec<Vec<Option<GoldenCell>>>,
}

impl Golden {
    pub fn load(kind: TableKind) -> Golden {
        let v: Value = serde_json::from_str(kind.golden_text()).expect("bundled golden file is JSON");
        let strings = |k: &str| -> Vec<String> {
            v[k].as_array().expect("golden list").iter().map(|s| s.as_str().expect("string").to_string()).collect()
        };
        let columns = strings("columns");
        let column_char = match v.get("column_characteristic") {
            Some(a) => a.as_array().expect("list").iter().map(|c| c.as_u64().map(|c| c as u32)).collect(),
            None => vec![None; columns.len()],
        };
        let cells = v["cells"]
            .as_array()
            .expect("cells")
            .iter()
            .map(|row| {
                row.as_array()
                    .expect("row")
                    .iter()
                    .map(|c| {
                        (!c.is_null()).then(|| GoldenCell {
                            name: c["name"].as_str().expect("name").to_string(),
                            dims: (c["dims"][0].as_u64().expect("dims") as usize, c["dims"][1].as_u64().expect("dims") as usize),
                        })
                    })
                    .collect()
            })
            .collect();
        Golden { construction: v["construction"].as_str().expect("construction").to_string(), rows: strings("rows"), columns, column_char, cells }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellStatus {
    Ok,
    /// Not defined over this field.
    Gated(String),
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct CellReport {
    pub row: usize,
    pub col: usize,
    pub name: String,
    pub command: String,
    pub expected: (usize, usize),
    pub status: CellStatus,
    pub dims: Option<(usize, usize)>,
    pub jacobi: Option<bool>,
    pub derived: Option<(usize, usize)>,
    pub simplicity: Option<Simplicity>,
    pub choices: Value,
}

impl CellReport {
    pub fn to_json(&self) -> Value {
        let mut o = json!({
            "row": self.row,
            "col": self.col,
            "name": self.name,
            "command": self.command,
            "expected": [self.expected.0, self.expected.1],
        });
        match &self.status {
            CellStatus::Ok => o["status"] = json!("ok"),
            CellStatus::Gated(m) => {
                o["status"] = json!("gated");
                o["gate"] = json!(m);
            }
            CellStatus::Failed(m) => {
                o["status"] = json!("failed");
                o["error"] = json!(m);
            }
        }
        if let Some(d) = self.dims {
            o["dims"] = json!([d.0, d.1]);
        }
        if let Some(j) = self.jacobi {
            o["jacobi"] = json!(if j { "pass" } else { "fail" });
        }
        if let Some(d) = self.derived {
            o["derived"] = json!([d.0, d.1]);
        }
        if let Some(s) = &self.simplicity {
            o["simple"] = json!(s.label());
            if let Simplicity::NotSimple(w) = s {
                o["ideal_dims"] = json!([w.dims.0, w.dims.1]);
            }
        }
        if !self.choices.is_null() {
            o["choices"] = self.choices.clone();
        }
        o
    }
}

#[derive(Clone, Debug)]
pub struct TableOptions {
    pub analysis: AnalyzeOptions,
    pub threads: usize,
}

impl Default for TableOptions {
    fn default() -> Self {
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
        TableOptions { analysis: AnalyzeOptions::default(), threads }
    }
}

#[derive(Clone, Debug)]
pub struct TableReport {
    pub kind: TableKind,
    pub field: Field,
    pub golden: Golden,
    pub seed: u64,
    pub cells: Vec<CellReport>,
}

impl TableReport {
    /// True when no cell failed; gated cells do not count as failures.
    pub fn ok(&self) -> bool {
        self.cells.iter().all(|c| !matches!(c.status, CellStatus::Failed(_)))
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.row == row && c.col == col)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "table": self.kind.name(),
            "field": self.field.name(),
            "construction": self.golden.construction,
            "seed": self.seed,
            "rows": self.golden.rows,
            "columns": self.golden.columns,
            "cells": self.cells.iter().map(CellReport::to_json).collect::<Vec<_>>(),
            "ok": self.ok(),
        })
    }

    pub fn to_text(&self) -> String {
        let g = &self.golden;
        let cell_text = |c: &CellReport| -> String {
            match (&c.status, c.dims) {
                (CellStatus::Gated(_), _) => "(gated)".to_string(),
                (CellStatus::Failed(_), Some(d)) => format!("{} ({}|{}) FAIL", c.name, d.0, d.1),
                (CellStatus::Failed(_), None) => format!("{} FAIL", c.name),
                (CellStatus::Ok, Some(d)) => {
                    let mark = match &c.simplicity {
                        Some(Simplicity::Simple) => "",
                        Some(Simplicity::NotSimple(_)) => " ns",
                        _ => " ?",
                    };
                    format!("{} ({}|{}){mark}", c.name, d.0, d.1)
                }
                (CellStatus::Ok, None) => c.name.clone(),
            }
        };
        let mut grid: Vec<Vec<String>> = vec![vec![String::new(); g.columns.len() + 1]; g.rows.len() + 1];
        grid[0][0] = format!("{} / {}", self.kind.name(), self.field.name());
        for (j, c) in g.columns.iter().enumerate() {
            grid[0][j + 1] = c.clone();
        }
        for (i, r) in g.rows.iter().enumerate() {
            grid[i + 1][0] = r.clone();
        }
        for c in &self.cells {
            grid[c.row + 1][c.col + 1] = cell_text(c);
        }
        let widths: Vec<usize> =
            (0..grid[0].len()).map(|j| grid.iter().map(|r| r[j].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in &grid {
            let line: Vec<String> =
                row.iter().zip(&widths).map(|(s, w)| format!("{s}{}", " ".repeat(w - s.chars().count()))).collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        for c in &self.cells {
            match &c.status {
                CellStatus::Gated(m) => {
                    let _ = writeln!(out, "[{},{}] gated: {m}", g.rows[c.row], g.columns[c.col]);
                }
                CellStatus::Failed(m) => {
                    let _ = writeln!(out, "[{},{}] FAILED: {m}", g.rows[c.row], g.columns[c.col]);
                }
                CellStatus::Ok => {}
            }
        }
        let count = |f: fn(&CellStatus) -> bool| self.cells.iter().filter(|c| f(&c.status)).count();
        let _ = writeln!(
            out,
            "{} cells: {} ok, {} gated, {} failed (seed {:#x}; ns = not simple)",
            self.cells.len(),
            count(|s| *s == CellStatus::Ok),
            count(|s| matches!(s, CellStatus::Gated(_))),
            count(|s| matches!(s, CellStatus::Failed(_))),
            self.seed
        );
        out
    }
}

pub fn build_command(construction: &str, a: &str, b: &str, f: Field) -> String {
    format!("titsforge build {construction} {a} {b} --field {}", f.name())
}

fn build_cell(construction: &str, row: &Descriptor, col: &Descriptor, f: Field) -> Result<LieSuperAlgebra> {
    match construction {
        "tits" => tits_build(&row.composition(f)?, &col.jordan(f)?, &TitsOptions::default()),
        "g" => g_build(&row.symmetric(f)?, &col.symmetric(f)?),
        other => Err(Error::Internal(format!("unknown construction {other} in golden file"))),
    }
}

fn run_cell(g: &Golden, f: Field, row: usize, col: usize, expect: &GoldenCell, opts: &AnalyzeOptions) -> CellReport {
    let command = build_command(&g.construction, &g.rows[row], &g.columns[col], f);
    let mut rep = CellReport {
        row,
        col,
        name: expect.name.clone(),
        command,
        expected: expect.dims,
        status: CellStatus::Ok,
        dims: None,
        jacobi: None,
        derived: None,
        simplicity: None,
        choices: Value::Null,
    };
    if let Some(p) = g.column_char[col] {
        if p != f.characteristic() {
            rep.status = CellStatus::Gated(format!("{} is only used in characteristic {p}", g.columns[col]));
            return rep;
        }
    }
    let parsed = g.rows[row].parse::<Descriptor>().and_then(|r| Ok((r, g.columns[col].parse::<Descriptor>()?)));
    let alg = parsed.and_then(|(r, c)| build_cell(&g.construction, &r, &c, f));
    let alg = match alg {
        Ok(a) => a,
        Err(e) => {
            rep.status = CellStatus::Failed(e.to_string());
            return rep;
        }
    };
    rep.dims = Some(alg.dims());
    rep.jacobi = Some(alg.jacobi().passes());
    rep.choices = alg.provenance().choices.clone();
    let mut problems = Vec::new();
    if alg.dims() != expect.dims {
        problems.push(format!("dims ({}|{}) differ from expected ({}|{})", alg.dims().0, alg.dims().1, expect.dims.0, expect.dims.1));
    }
    if !alg.jacobi().passes() {
        problems.push("Jacobi fails".to_string());
    }
    match analyze(alg.table(), opts) {
        Ok(r) => {
            rep.derived = Some(r.derived);
            rep.simplicity = r.simplicity.map(|s| s.0);
        }
        Err(e) => problems.push(e.to_string()),
    }
    if !problems.is_empty() {
        rep.status = CellStatus::Failed(problems.join("; "));
    }
    rep
}

/// Builds and analyses every cell of a table.
pub fn run_table(kind: TableKind, f: Field, opts: &TableOptions) -> Result<TableReport> {
    kind.admit(f)?;
    let golden = Golden::load(kind);
    let jobs: Vec<(usize, usize, GoldenCell)> = golden
        .cells
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().filter_map(move |(j, c)| c.clone().map(|c| (i, j, c))))
        .collect();
    let results: Mutex<Vec<Option<CellReport>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..opts.threads.max(1).min(jobs.len().max(1)) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some((i, j, c)) = jobs.get(k) else { break };
                let r = run_cell(&golden, f, *i, *j, c, &opts.analysis);
                results.lock().expect("no poisoned workers")[k] = Some(r);
            });
        }
    });
    let cells = results.into_inner().expect("no poisoned workers").into_iter().map(|c| c.expect("every job ran")).collect();
    Ok(TableReport { kind, field: f, seed: opts.analysis.seed, golden, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_files_are_consistent() {
        for k in TableKind::ALL {
            let g = Golden::load(k);
            assert_eq!(g.cells.len(), g.rows.len());
            for row in &g.cells {
                assert_eq!(row.len(), g.columns.len());
            }
            for d in g.rows.iter().chain(&g.columns) {
                d.parse::<Descriptor>().unwrap();
            }
        }
    }

    #[test]
    fn admissibility() {
        assert!(TableKind::Magic.admit(Field::Prime(3)).is_err());
        assert!(TableKind::Magic3.admit(Field::Rational).is_err());
        assert!(TableKind::Rectangle.admit(Field::Prime(5)).is_ok());
    }
}
