//! Normative CSV output: fixed header, 12 significant digits.

use std::fmt::Write as _;

use trilevel::{ObservableRecord, Trajectory};

pub fn header() -> String {
    ObservableRecord::COLUMNS.join(",")
}

/// Scientific notation, 12 significant digits; `-0` is written as `0`.
pub fn format_value(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

pub fn format_row(rec: &ObservableRecord) -> String {
    let cells: Vec<String> = rec.values().iter().map(|&x| format_value(x)).collect();
    cells.join(",")
}

pub fn to_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(200 * (traj.len() + 1));
    out.push_str(&header());
    out.push('\n');
    for rec in &traj.observables {
        let _ = writeln!(out, "{}", format_row(rec));
    }
    out
}
