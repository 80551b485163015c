//! Flat tabular records rendered as CSV or JSON.
//!
//! Every command emits a [`Table`]: a header and rows of scalar cells. CSV and
//! JSON carry the same field names; JSON rows are flat objects.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde_json::{Map, Number, Value};

use crate::probe::{
    classify_point, HypothesesReport, LocalBoundReport, MartyGridReport, Thresholds,
};
use crate::schwarzian::IdentityReport;

/// Header of scan CSV output.
pub const SCAN_HEADER: [&str; 7] = ["re", "im", "sup_stat", "argmax_n", "growth_slope", "flags", "verdict"];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Str(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => format_g17(*x),
            Cell::Int(k) => k.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => Number::from_f64(*x).map_or_else(|| Value::String(format_g17(*x)), Value::Number),
            Cell::Int(k) => Value::from(*k),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Str(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn object(&self, row: &[Cell]) -> Value {
        let map: Map<String, Value> = self.header.iter().zip(row).map(|(k, c)| (k.to_string(), c.json())).collect();
        Value::Object(map)
    }

    /// A single row renders as one object, anything else as an array.
    pub fn to_json(&self) -> String {
        let value = if self.rows.len() == 1 {
            self.object(&self.rows[0])
        } else {
            Value::Array(self.rows.iter().map(|r| self.object(r)).collect())
        };
        let mut s = serde_json::to_string_pretty(&value).expect("JSON values serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed,
/// exponent notation outside `1e-4 <= |x| < 1e17`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mut s = strip_zeros(mantissa).to_string();
        let _ = write!(s, "e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
        s
    } else {
        let decimals = (16 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn complex_cells(z: Complex64) -> [Cell; 2] {
    [Cell::Float(z.re), Cell::Float(z.im)]
}

pub fn scan_table(report: &MartyGridReport, thresholds: &Thresholds) -> Table {
    let mut t = Table::new(SCAN_HEADER.to_vec());
    for p in &report.points {
        t.push(vec![
            Cell::Float(p.z.re),
            Cell::Float(p.z.im),
            Cell::Float(p.sup_stat),
            p.argmax_n.map_or(Cell::Empty, |n| Cell::Int(n as i64)),
            Cell::Float(p.growth_slope),
            Cell::Str(p.flags.to_string()),
            Cell::Str(classify_point(p, thresholds).as_str().to_string()),
        ]);
    }
    t
}

pub fn identity_table(check: &str, rep: &IdentityReport) -> Table {
    let mut t = Table::new(vec![
        "check", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_gap", "rel_gap", "tol_abs", "tol_rel", "pass",
    ]);
    let mut row = vec![Cell::Str(check.to_string())];
    row.extend(complex_cells(rep.lhs));
    row.extend(complex_cells(rep.rhs));
    row.extend([
        Cell::Float(rep.abs_gap),
        Cell::Float(rep.rel_gap),
        Cell::Float(rep.tolerance_used.abs),
        Cell::Float(rep.tolerance_used.rel),
        Cell::Bool(rep.pass),
    ]);
    t.push(row);
    t
}

/// One evaluation record: the jet, the Schwarzian (or the reason it is
/// undefined) and the spherical derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub family: String,
    pub n: f64,
    pub z: Complex64,
    pub jet: [Complex64; 4],
    pub schwarzian: Result<Complex64, String>,
    pub spherical: f64,
}

pub fn eval_table(rec: &EvalRecord) -> Table {
    let mut t = Table::new(vec![
        "family", "n", "z_re", "z_im", "v_re", "v_im", "d1_re", "d1_im", "d2_re", "d2_im", "d3_re", "d3_im",
        "schwarzian_re", "schwarzian_im", "schwarzian_error", "spherical",
    ]);
    let mut row = vec![Cell::Str(rec.family.clone()), Cell::Float(rec.n)];
    row.extend(complex_cells(rec.z));
    for c in rec.jet {
        row.extend(complex_cells(c));
    }
    match &rec.schwarzian {
        Ok(s) => row.extend([Cell::Float(s.re), Cell::Float(s.im), Cell::Empty]),
        Err(e) => row.extend([Cell::Empty, Cell::Empty, Cell::Str(e.clone())]),
    }
    row.push(Cell::Float(rec.spherical));
    t.push(row);
    t
}

pub fn bound_table(reports: &[LocalBoundReport]) -> Table {
    let mut t =
        Table::new(vec!["n", "k_estimate", "bound_rhs", "observed", "f_z0_re", "f_z0_im", "pass"]);
    for r in reports {
        let mut row = vec![Cell::Int(r.n as i64), Cell::Float(r.k_estimate), Cell::Float(r.bound_rhs)];
        row.push(Cell::Float(r.observed));
        row.extend(complex_cells(r.value_at_z0));
        row.push(Cell::Bool(r.pass));
        t.push(row);
    }
    t
}

/// Per-member rows followed by a family-wide row with `n = all`.
pub fn hypotheses_table(rep: &HypothesesReport) -> Table {
    let mut t = Table::new(vec![
        "n", "min_d1", "floor_pass", "m2", "m3", "sd_bound", "observed_max_sd", "bound_holds", "value_pass", "pass",
    ]);
    for (i, m) in rep.members.iter().enumerate() {
        let floor_pass = rep.floor.points.iter().all(|p| p.pass[i]);
        let value_pass = rep.value.values[i] <= rep.value.bound;
        t.push(vec![
            Cell::Int(m.n as i64),
            Cell::Float(m.min_d1),
            Cell::Bool(floor_pass),
            Cell::Float(m.m2),
            Cell::Float(m.m3),
            Cell::Float(m.sd_bound),
            Cell::Float(m.observed_max_sd),
            Cell::Bool(m.holds),
            Cell::Bool(value_pass),
            Cell::Bool(floor_pass && value_pass && m.holds),
        ]);
    }
    t.push(vec![
        Cell::Str("all".into()),
        Cell::Float(rep.floor.global_min_d1),
        Cell::Bool(rep.floor.all_pass),
        Cell::Float(rep.m2),
        Cell::Float(rep.m3),
        Cell::Float(rep.sd_bound),
        Cell::Float(rep.observed_max_sd),
        Cell::Bool(rep.bound_holds),
        Cell::Bool(rep.value.pass),
        Cell::Bool(rep.pass),
    ]);
    t
}
