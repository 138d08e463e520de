//! CSV contract.
//!
//! Columns, in order (groups filtered by the scenario's `outputs`):
//! `step, time, E_1..E_n, Q_bath, F, I_SR, C, C_1..C_n,
//! AT_1, AT_1_status, .., AT_n, AT_n_status, AT_global, AT_global_status`.
//!
//! Numbers use fixed notation with 12 significant digits and a `.` decimal
//! point. An undefined apparent temperature is an empty cell, with the reason
//! in the status column (`ok`, `infinite`, `ground_nonpositive`,
//! `excited_nonpositive`). `I_SR` is empty for the master equation, which has
//! no bath state.

use std::fmt::Write as _;

use heatflow_core::thermo::{ApparentTemperature, ObservableSet};

use crate::config::Scenario;

/// Fixed-notation rendering with 12 significant digits.
pub fn fixed12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0.00000000000".to_string() } else { x.to_string() };
    }
    let render = |v: f64| {
        let decimals = (11 - v.abs().log10().floor() as i32).max(0) as usize;
        format!("{v:.decimals$}")
    };
    let first = render(x);
    // rounding can carry into a new leading digit (9.99… → 10.0…)
    let rounded: f64 = first.parse().expect("formatted float parses");
    let s = if rounded == 0.0 { first } else { render(rounded) };
    if s.bytes().all(|b| matches!(b, b'-' | b'0' | b'.')) {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// One CSV row: a recorded point of a trajectory.
#[derive(Debug, Clone)]
pub struct Row {
    pub step: usize,
    pub time: f64,
    pub obs: ObservableSet,
}

pub fn header(scenario: &Scenario) -> String {
    let n = scenario.spec.n();
    let mut cols = vec!["step".to_string(), "time".to_string()];
    if scenario.wants("E") {
        cols.extend((1..=n).map(|k| format!("E_{k}")));
    }
    for g in ["Q_bath", "F", "I_SR", "C"] {
        if scenario.wants(g) {
            cols.push(g.to_string());
        }
    }
    if scenario.wants("C_k") {
        cols.extend((1..=n).map(|k| format!("C_{k}")));
    }
    if scenario.wants("AT_k") {
        for k in 1..=n {
            cols.push(format!("AT_{k}"));
            cols.push(format!("AT_{k}_status"));
        }
    }
    if scenario.wants("AT_global") {
        cols.push("AT_global".into());
        cols.push("AT_global_status".into());
    }
    cols.join(",")
}

fn push_at(cells: &mut Vec<String>, at: &ApparentTemperature) {
    cells.push(at.value().map(fixed12).unwrap_or_default());
    cells.push(at.status().to_string());
}

pub fn render_row(scenario: &Scenario, row: &Row) -> String {
    let o = &row.obs;
    let mut cells = vec![row.step.to_string(), fixed12(row.time)];
    if scenario.wants("E") {
        cells.extend(o.energies.iter().copied().map(fixed12));
    }
    if scenario.wants("Q_bath") {
        cells.push(fixed12(o.bath_energy_change));
    }
    if scenario.wants("F") {
        cells.push(fixed12(o.free_energy));
    }
    if scenario.wants("I_SR") {
        cells.push(o.mutual_information.map(fixed12).unwrap_or_default());
    }
    if scenario.wants("C") {
        cells.push(fixed12(o.coherence));
    }
    if scenario.wants("C_k") {
        cells.extend(o.one_way.iter().copied().map(fixed12));
    }
    if scenario.wants("AT_k") {
        for at in &o.apparent_temperatures {
            push_at(&mut cells, at);
        }
    }
    if scenario.wants("AT_global") {
        push_at(&mut cells, &o.global_apparent_temperature);
    }
    cells.join(",")
}

pub fn render_csv(scenario: &Scenario, rows: &[Row]) -> String {
    let mut out = header(scenario);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", render_row(scenario, r));
    }
    out
}

/// A plain table with a header line and `,`-separated fixed12 cells.
pub fn render_table(columns: &[String], rows: &[(String, Vec<f64>)]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for (label, vals) in rows {
        out.push_str(label);
        for v in vals {
            out.push(',');
            out.push_str(&fixed12(*v));
        }
        out.push('\n');
    }
    out
}
