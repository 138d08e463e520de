//! The five subcommands, as library functions returning their report text.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use heatflow_core::collision::CollisionConfig;
use heatflow_core::model::system_hamiltonian;
use heatflow_core::thermo::{
    audit_resource_chain, coherence_measure, free_energy, mutual_information, InequalityAudit,
};
use heatflow_core::toys::{
    default_grid, phase_efficiency, scan_gradient_threshold, single_spin_rotation, temperature_gradient_threshold,
    two_spin_swap, ToyResult,
};
use rayon::prelude::*;

use crate::config::{Engine, Scenario, ScenarioConfig};
use crate::error::{numerical, CliError};
use crate::output::{fixed12, render_csv, render_table};
use crate::simulate::{collision_rows, collision_trajectory, energies, lindblad_rows, lindblad_trajectory, Summary};

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub engine: Option<Engine>,
}

/// Report text plus the files written.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub report: String,
    pub files: Vec<PathBuf>,
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn scenario(cfg: &ScenarioConfig, opts: &Options) -> Result<Scenario, CliError> {
    let mut cfg = cfg.clone();
    if let Some(e) = opts.engine {
        cfg.engine = e;
    }
    cfg.validate()
}

/// `run`: one CSV per engine, named `<name>_<engine>.csv`.
pub fn run(cfg: &ScenarioConfig, opts: &Options) -> Result<Outcome, CliError> {
    let scn = scenario(cfg, opts)?;
    let dir = opts.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut out = Outcome::default();
    if scn.engine.runs_collision() {
        let traj = collision_trajectory(&scn.spec, &scn.coherence, &scn.collision)?;
        let rows = collision_rows(&scn, &traj)?;
        out.files.push(write_file(&dir, &format!("{}_collision.csv", scn.name), &render_csv(&scn, &rows))?);
        let _ = writeln!(out.report, "{}", Summary::from_rows(&rows).describe(&format!("{} [collision]", scn.name)));
    }
    if scn.engine.runs_lindblad() {
        let traj = lindblad_trajectory(&scn.spec, &scn.coherence, &scn.collision)?;
        let rows = lindblad_rows(&scn, &traj)?;
        out.files.push(write_file(&dir, &format!("{}_lindblad.csv", scn.name), &render_csv(&scn, &rows))?);
        let _ = writeln!(out.report, "{}", Summary::from_rows(&rows).describe(&format!("{} [lindblad]", scn.name)));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    Lambda,
    Alpha,
    Tau,
    Order,
}

/// Parses `1.5`, `pi`, `0.5pi` or `-pi`.
pub fn parse_number(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::Parse(format!("cannot parse sweep value {s:?}"));
    match s.strip_suffix("pi") {
        Some("") => Ok(PI),
        Some("-") => Ok(-PI),
        Some(m) => m.parse::<f64>().map(|x| x * PI).map_err(|_| bad()),
        None => s.parse::<f64>().map_err(|_| bad()),
    }
}

/// Parses `1-2-3` into a 1-based order.
pub fn parse_order(s: &str) -> Result<Vec<usize>, CliError> {
    s.split('-')
        .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::Parse(format!("cannot parse order {s:?}"))))
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for i in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(i, n);
            out.push(p);
        }
    }
    out.sort();
    out
}

fn apply(cfg: &ScenarioConfig, axis: Axis, value: &str) -> Result<ScenarioConfig, CliError> {
    let mut c = cfg.clone();
    match axis {
        Axis::Lambda | Axis::Alpha if c.coherence.is_empty() => {
            return Err(CliError::Validation("the scenario has no coherence terms to sweep".into()));
        }
        Axis::Lambda => {
            let x = parse_number(value)?;
            c.coherence.iter_mut().for_each(|t| t.lambda = x);
        }
        Axis::Alpha => {
            let x = parse_number(value)?;
            c.coherence.iter_mut().for_each(|t| {
                t.alpha = Some(x);
                t.alpha_pi = None;
            });
        }
        Axis::Tau => c.tau = parse_number(value)?,
        Axis::Order => c.order = Some(parse_order(value)?),
    }
    Ok(c)
}

/// `sweep`: one row of terminal observables per value, in input order.
pub fn sweep(cfg: &ScenarioConfig, axis: Axis, values: &[String], opts: &Options) -> Result<Outcome, CliError> {
    let values: Vec<String> = if values.is_empty() && axis == Axis::Order {
        permutations(cfg.n).iter().map(|p| p.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("-")).collect()
    } else if values.is_empty() {
        return Err(CliError::Parse("sweep needs --values".into()));
    } else {
        values.to_vec()
    };
    let scenarios: Vec<Scenario> =
        values.iter().map(|v| scenario(&apply(cfg, axis, v)?, opts)).collect::<Result<_, _>>()?;
    let rows: Vec<(String, Vec<f64>)> = scenarios
        .par_iter()
        .zip(values.par_iter())
        .map(|(scn, v)| {
            let rows = if scn.engine == Engine::Lindblad {
                lindblad_rows(scn, &lindblad_trajectory(&scn.spec, &scn.coherence, &scn.collision)?)?
            } else {
                collision_rows(scn, &collision_trajectory(&scn.spec, &scn.coherence, &scn.collision)?)?
            };
            let s = Summary::from_rows(&rows);
            let mut vals = s.energy_changes.clone();
            vals.extend([s.heat_to_bath, s.free_energy_change, s.coherence_change]);
            Ok((v.clone(), vals))
        })
        .collect::<Result<_, CliError>>()?;
    let axis_name = match axis {
        Axis::Lambda => "lambda",
        Axis::Alpha => "alpha",
        Axis::Tau => "tau",
        Axis::Order => "order",
    };
    let mut cols = vec![axis_name.to_string()];
    cols.extend((1..=cfg.n).map(|k| format!("dE_{k}")));
    cols.extend(["Q_bath", "dF", "dC"].map(String::from));
    let table = render_table(&cols, &rows);
    let mut out = Outcome::default();
    match &opts.out {
        Some(dir) => out.files.push(write_file(dir, &format!("{}_sweep_{axis_name}.csv", cfg.name), &table)?),
        None => out.report = table,
    }
    Ok(out)
}

/// `audit`: every resource inequality of every collision. Fails with
/// [`CliError::AuditFailed`] after writing the report if any slack is below tolerance.
pub fn audit(cfg: &ScenarioConfig, opts: &Options) -> Result<Outcome, CliError> {
    let scn = scenario(cfg, opts)?;
    let traj = collision_trajectory(&scn.spec, &scn.coherence, &scn.collision)?;
    let mut audits: Vec<(usize, InequalityAudit)> = Vec::new();
    for c in 1..=traj.n_collisions() {
        for a in audit_resource_chain(&traj, &scn.spec, c).map_err(numerical)? {
            audits.push((c, a));
        }
    }
    let n = scn.spec.n();
    let h = system_hamiltonian(&scn.spec);
    let mut csv = String::from("collision,inequality,lhs,rhs,slack,status\n");
    for (c, a) in &audits {
        let status = if a.satisfied { "pass" } else { "FAIL" };
        let _ = writeln!(csv, "{c},{},{},{},{},{status}", a.label, fixed12(a.lhs), fixed12(a.rhs), fixed12(a.slack));
    }
    let failed = audits.iter().filter(|(_, a)| !a.satisfied).count();
    let worst = audits.iter().map(|(_, a)| a.slack).fold(f64::INFINITY, f64::min);

    let mut report = String::new();
    let _ = writeln!(
        report,
        "{}: {} inequalities over {} collisions, {failed} violated, min slack {worst:.3e}",
        scn.name,
        audits.len(),
        traj.n_collisions()
    );
    let (first, last) = (&traj.system_states[0], traj.final_system_state());
    let _ = writeln!(
        report,
        "coherence C: {:.6e} -> {:.6e}; free energy F: {:.6e} -> {:.6e}",
        coherence_measure(first, &h),
        coherence_measure(last, &h),
        free_energy(first, &h, scn.spec.bath_temperature()),
        free_energy(last, &h, scn.spec.bath_temperature()),
    );
    let end_of_first = traj.collision_states(1).map_err(numerical)?;
    let info = mutual_information(end_of_first.last().expect("nonempty"), &[n]).map_err(numerical)?;
    let _ = writeln!(report, "I(S:R) after the first collision: {info:.6e}");
    for (c, a) in audits.iter().filter(|(_, a)| !a.satisfied) {
        let _ = writeln!(report, "  violated in collision {c}: {} (slack {:.3e})", a.label, a.slack);
    }

    let mut out = Outcome { report, files: Vec::new() };
    if let Some(dir) = &opts.out {
        out.files.push(write_file(dir, &format!("{}_audit.csv", scn.name), &csv)?);
    } else {
        out.report.push_str(&csv);
    }
    if failed > 0 {
        // the report is still useful; the caller prints it before exiting
        eprint!("{}", out.report);
        return Err(CliError::AuditFailed(failed));
    }
    Ok(out)
}

/// Largest differences between the two engines at collision boundaries.
fn discrepancies(scn: &Scenario, cfg: &CollisionConfig) -> Result<Vec<f64>, CliError> {
    let (spec, coh) = (&scn.spec, &scn.coherence);
    let col = collision_trajectory(spec, coh, cfg)?;
    let lin = lindblad_trajectory(spec, coh, cfg)?;
    let h = system_hamiltonian(spec);
    let t_r = spec.bath_temperature();
    let n = spec.n();
    let mut worst = vec![0.0f64; n + 2];
    for (a, b) in col.system_states.iter().zip(&lin.states) {
        let (ea, eb) = (energies(a, spec)?, energies(b, spec)?);
        for k in 0..n {
            worst[k] = worst[k].max((ea[k] - eb[k]).abs());
        }
        worst[n] = worst[n].max((free_energy(a, &h, t_r) - free_energy(b, &h, t_r)).abs());
        worst[n + 1] = worst[n + 1].max((coherence_measure(a, &h) - coherence_measure(b, &h)).abs());
    }
    Ok(worst)
}

/// `compare`: collision engine vs master equation at `τ` and `τ/2` with `g²τ` fixed.
pub fn compare(cfg: &ScenarioConfig, opts: &Options) -> Result<Outcome, CliError> {
    let scn =
        scenario(&ScenarioConfig { engine: Engine::Both, ..cfg.clone() }, &Options { engine: None, ..opts.clone() })?;
    let base = scn.collision.clone();
    let half = CollisionConfig {
        tau: base.tau / 2.0,
        g: base.g * std::f64::consts::SQRT_2,
        n_collisions: base.n_collisions * 2,
        ..base.clone()
    };
    let (d1, d2) = rayon::join(|| discrepancies(&scn, &base), || discrepancies(&scn, &half));
    let (d1, d2) = (d1?, d2?);
    let n = scn.spec.n();
    let mut names: Vec<String> = (1..=n).map(|k| format!("E_{k}")).collect();
    names.extend(["F".to_string(), "C".to_string()]);
    let rows: Vec<(String, Vec<f64>)> = names
        .iter()
        .zip(d1.iter().zip(&d2))
        .map(|(name, (&a, &b))| (name.clone(), vec![a, b, if b > 0.0 { a / b } else { f64::NAN }]))
        .collect();
    let cols = ["observable", "max_diff_tau", "max_diff_half_tau", "ratio"].map(String::from);
    let mut table = render_table(&cols, &rows).replace("NaN", "");
    let e_max = |d: &[f64]| d[..n].iter().copied().fold(0.0, f64::max);
    let (m1, m2) = (e_max(&d1), e_max(&d2));
    let _ = writeln!(
        table,
        "# energies: max discrepancy {m1:.6e} at tau = {}, {m2:.6e} at tau/2; ratio {} (first order: 2)",
        base.tau,
        if m2 > 0.0 { format!("{:.4}", m1 / m2) } else { "n/a".into() }
    );
    let mut out = Outcome::default();
    match &opts.out {
        Some(dir) => {
            out.files.push(write_file(dir, &format!("{}_compare.csv", scn.name), &table)?);
            out.report = table.lines().last().unwrap_or_default().to_string() + "\n";
        }
        None => out.report = table,
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ToyName {
    SingleSpin,
    Swap,
    Phase,
    Gradient,
    All,
}

/// Optional toy parameters; missing ones are swept over the default grid.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToyParams {
    pub strength: Option<f64>,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub beta_s: Option<f64>,
    pub beta_m: Option<f64>,
}

fn toy_rows(name: ToyName, p: &ToyParams) -> Result<Vec<(String, f64, ToyResult)>, CliError> {
    let bad = |e: heatflow_core::Error| CliError::Validation(e.to_string());
    let grid = default_grid();
    let mut rows = Vec::new();
    match name {
        ToyName::SingleSpin => {
            for c in p.strength.map_or(grid.clone(), |c| vec![c]) {
                rows.push(("C".into(), c, single_spin_rotation(c).map_err(bad)?));
            }
        }
        ToyName::Swap => {
            for c in p.strength.map_or(grid.clone(), |c| vec![c]) {
                let s = two_spin_swap(c).map_err(bad)?;
                rows.push(("C".into(), c, s.heat));
                rows.push(("C".into(), c, ToyResult::new("two-spin work", 0.0, s.work)));
            }
        }
        ToyName::Phase => {
            let lambda = p.lambda.unwrap_or(0.3);
            let theta = p.theta.unwrap_or(PI / 4.0);
            let alphas = p.alpha.map_or(grid.iter().map(|x| 2.0 * PI * x).collect(), |a| vec![a]);
            for a in alphas {
                rows.push(("alpha".into(), a, phase_efficiency(lambda, a, theta).map_err(bad)?));
            }
        }
        ToyName::Gradient => {
            let bs = p.beta_s.unwrap_or(1.0);
            let bm = p.beta_m.unwrap_or(1.0 / 0.9);
            let theta = p.theta.unwrap_or(1e-3);
            let t = temperature_gradient_threshold(bs, bm, 1.0);
            let (lo, hi) = scan_gradient_threshold(bs, bm, 1.0, theta, 1e-9);
            rows.push(("theta".into(), theta, ToyResult::new("gradient threshold", t, 0.5 * (lo + hi))));
        }
        ToyName::All => {
            for n in [ToyName::SingleSpin, ToyName::Swap, ToyName::Phase, ToyName::Gradient] {
                rows.extend(toy_rows(n, p)?);
            }
        }
    }
    Ok(rows)
}

/// `toy`: analytic vs simulated values of the closed-form models.
pub fn toy(name: ToyName, params: &ToyParams, opts: &Options) -> Result<Outcome, CliError> {
    let rows = toy_rows(name, params)?;
    let mut table = String::from("toy,parameter,value,analytic,simulated,abs_error\n");
    for (pname, v, r) in &rows {
        let _ = writeln!(
            table,
            "{},{pname},{},{},{},{}",
            r.label,
            fixed12(*v),
            fixed12(r.analytic),
            fixed12(r.simulated),
            fixed12(r.abs_error)
        );
    }
    let mut out = Outcome::default();
    match &opts.out {
        Some(dir) => out.files.push(write_file(dir, "toys.csv", &table)?),
        None => out.report = table,
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_values() {
        assert_eq!(parse_number("pi").unwrap(), PI);
        assert_eq!(parse_number("-pi").unwrap(), -PI);
        assert_eq!(parse_number("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_number(" 2.5 ").unwrap(), 2.5);
        assert!(parse_number("x").is_err());
        assert_eq!(parse_order("3-2-1").unwrap(), vec![3, 2, 1]);
        assert!(parse_order("3,2").is_err());
    }

    #[test]
    fn permutations_are_complete_and_sorted() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![1, 2, 3]);
        assert_eq!(p[5], vec![3, 2, 1]);
    }
}
