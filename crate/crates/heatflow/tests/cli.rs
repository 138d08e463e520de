use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn scenario(name: &str) -> PathBuf {
    scenarios_dir().join(format!("{name}.cfg"))
}

fn heatflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatflow")).args(args).output().expect("binary runs")
}

fn run_to(dir: &Path, cfg: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap(), "--quiet"];
    args.extend_from_slice(extra);
    heatflow(&args)
}

fn write_cfg(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("scenario.cfg");
    fs::write(&p, body).unwrap();
    p
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Csv {
        let text = fs::read_to_string(path).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap().split(',').map(String::from).collect();
        Csv { header, rows: lines.map(|l| l.split(',').map(String::from).collect()).collect() }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let i = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }

    fn net(&self, name: &str) -> f64 {
        let c = self.column(name);
        c[c.len() - 1] - c[0]
    }
}

const SMALL: &str = r#"{
  "name": "small", "n": 2, "temperatures": [1.0, 1.0], "bath_temperature": 0.9,
  "coherence": [{ "p": 1, "q": 2, "lambda": 0.3, "alpha_pi": 1.0 }],
  "g": 20.0, "tau": 0.01, "collisions": 5
}"#;

#[test]
fn negative_coherence_later_spins_absorb_heat() {
    let tmp = TempDir::new().unwrap();
    let out = run_to(tmp.path(), &scenario("negative_coherence"), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = Csv::read(&tmp.path().join("negative_coherence_collision.csv"));
    assert_eq!(csv.rows.len(), 301);
    assert!(csv.net("E_1") < 0.0 && csv.net("E_2") > 0.0 && csv.net("E_3") > 0.0);
}

#[test]
fn temperature_gradient_hotter_absorbs_colder_releases() {
    let tmp = TempDir::new().unwrap();
    assert!(run_to(tmp.path(), &scenario("temperature_gradient"), &[]).status.success());
    let csv = Csv::read(&tmp.path().join("temperature_gradient_collision.csv"));
    assert!(csv.net("E_2") > 0.0 && csv.net("E_3") < 0.0);
}

#[test]
fn without_coherence_every_spin_relaxes_monotonically() {
    let tmp = TempDir::new().unwrap();
    assert!(run_to(tmp.path(), &scenario("no_coherence"), &[]).status.success());
    let csv = Csv::read(&tmp.path().join("no_coherence_collision.csv"));
    for k in 1..=3 {
        let e = csv.column(&format!("E_{k}"));
        assert!(e.windows(2).all(|w| w[1] <= w[0] + 1e-15), "E_{k}");
    }
    assert!(csv.column("Q_bath").windows(2).all(|w| w[1] >= w[0] - 1e-15));
}

#[test]
fn csv_contract() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(tmp.path(), SMALL);
    assert!(run_to(tmp.path(), &cfg, &["--engine", "both"]).status.success());
    let col = Csv::read(&tmp.path().join("small_collision.csv"));
    let expected =
        "step,time,E_1,E_2,Q_bath,F,I_SR,C,C_1,C_2,AT_1,AT_1_status,AT_2,AT_2_status,AT_global,AT_global_status";
    assert_eq!(col.header.join(","), expected);
    assert_eq!(col.rows.len(), 11);
    let times = col.column("time");
    assert!((times[1] - 0.005).abs() < 1e-15 && (times[10] - 0.05).abs() < 1e-15);
    for row in &col.rows {
        for cell in row {
            assert!(
                !cell.contains('e') || cell.ends_with("_status") || cell.chars().all(|c| c.is_alphabetic() || c == '_')
            );
        }
        let digits: String = row[2].chars().filter(|c| c.is_ascii_digit()).collect();
        assert_eq!(digits.trim_start_matches('0').len(), 12, "{}", row[2]);
    }
    let lin = Csv::read(&tmp.path().join("small_lindblad.csv"));
    assert_eq!(lin.header, col.header);
    assert_eq!(lin.rows.len(), 6);
    let i = lin.header.iter().position(|h| h == "I_SR").unwrap();
    assert!(lin.rows.iter().all(|r| r[i].is_empty()));
    // strong negative coherence drives the second spin's apparent temperature undefined
    let tmp2 = TempDir::new().unwrap();
    let cfg = write_cfg(tmp2.path(), &SMALL.replace("0.3", "1.0"));
    assert!(run_to(tmp2.path(), &cfg, &[]).status.success());
    let csv = Csv::read(&tmp2.path().join("small_collision.csv"));
    let s = csv.header.iter().position(|h| h == "AT_2_status").unwrap();
    assert_eq!(csv.rows[0][s], "excited_nonpositive");
    assert_eq!(csv.rows[0][s - 1], "");
}

#[test]
fn identical_configs_give_identical_bytes() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        assert!(run_to(dir.path(), &scenario("order_forward"), &["--engine", "both", "--seed", "7"]).status.success());
    }
    for f in ["order_forward_collision.csv", "order_forward_lindblad.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn output_selection() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        &SMALL.replace("\"collisions\": 5", "\"collisions\": 5, \"outputs\": [\"E\", \"AT_global\"]"),
    );
    assert!(run_to(tmp.path(), &cfg, &[]).status.success());
    let csv = Csv::read(&tmp.path().join("small_collision.csv"));
    assert_eq!(csv.header.join(","), "step,time,E_1,E_2,AT_global,AT_global_status");
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let code = |o: Output| o.status.code().unwrap();

    assert_eq!(code(heatflow(&["run", "--config", "/nonexistent.cfg", "--out", dir])), 2);
    let cfg = write_cfg(tmp.path(), "{ not json");
    assert_eq!(code(heatflow(&["run", "--config", cfg.to_str().unwrap(), "--out", dir])), 2);
    let cfg = write_cfg(tmp.path(), &SMALL.replace("\"g\"", "\"temperature_unit\": \"K\", \"g\""));
    let out = heatflow(&["run", "--config", cfg.to_str().unwrap(), "--out", dir]);
    assert_eq!(code(out), 2);
    assert!(!tmp.path().join("small_collision.csv").exists(), "nothing runs on a schema error");

    // coherence outside the positivity window is rejected before any audit
    let cfg = write_cfg(tmp.path(), &SMALL.replace("0.3", "1.5"));
    assert_eq!(code(heatflow(&["audit", "--config", cfg.to_str().unwrap()])), 3);
    let cfg = write_cfg(tmp.path(), &SMALL.replace("[1.0, 1.0]", "[1.0]"));
    assert_eq!(code(heatflow(&["run", "--config", cfg.to_str().unwrap(), "--out", dir])), 3);

    // rates far beyond what RK4 at τ/10 can resolve
    let cfg = write_cfg(tmp.path(), &SMALL.replace("\"g\": 20.0", "\"g\": 3000.0"));
    let out = heatflow(&["run", "--config", cfg.to_str().unwrap(), "--out", dir, "--engine", "lindblad"]);
    assert_eq!(code(out), 4);

    let cfg = write_cfg(tmp.path(), SMALL);
    assert_eq!(code(heatflow(&["run", "--config", cfg.to_str().unwrap(), "--out", dir, "--quiet"])), 0);
}

#[test]
fn alpha_sweep_orders_heat_to_bath() {
    let out = heatflow(&[
        "sweep",
        "--config",
        scenario("negative_coherence").to_str().unwrap(),
        "--axis",
        "alpha",
        "--values",
        "0,0.5pi,pi",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let q: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), ["0", "0.5pi", "pi"]);
    // baseline without coherence
    let tmp = TempDir::new().unwrap();
    assert!(run_to(tmp.path(), &scenario("no_coherence"), &[]).status.success());
    let q0 = Csv::read(&tmp.path().join("no_coherence_collision.csv")).net("Q_bath");
    assert!(q[0] > q0 && q0 > 0.0 && q[2] < 0.0, "{q:?} vs {q0}");
    assert!((q[1] - q0).abs() < 0.1 * q0, "{} vs {q0}", q[1]);
}

#[test]
fn lambda_sweep_crosses_the_reversal() {
    let tmp = TempDir::new().unwrap();
    let out = heatflow(&[
        "sweep",
        "--config",
        scenario("negative_coherence").to_str().unwrap(),
        "--axis",
        "lambda",
        "--values",
        "0,0.1,0.3,0.5",
        "--out",
        tmp.path().to_str().unwrap(),
        "--quiet",
    ]);
    assert!(out.status.success());
    let csv = Csv::read(&tmp.path().join("negative_coherence_sweep_lambda.csv"));
    let de2 = csv.column("dE_2");
    assert!(de2[0] < 0.0 && de2[3] > 0.0, "{de2:?}");
}

#[test]
fn order_sweep_covers_all_permutations_in_input_order() {
    let cfg = scenario("order_forward");
    let all = heatflow(&["sweep", "--config", cfg.to_str().unwrap(), "--axis", "order"]);
    assert!(all.status.success());
    assert_eq!(String::from_utf8(all.stdout).unwrap().lines().count(), 7);
    let two = heatflow(&["sweep", "--config", cfg.to_str().unwrap(), "--axis", "order", "--values", "3-2-1,1-2-3"]);
    let text = String::from_utf8(two.stdout).unwrap();
    let labels: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels, ["3-2-1", "1-2-3"]);
}

#[test]
fn audits_pass_on_bundled_resource_scenarios() {
    for name in ["no_coherence", "two_spin_cascade", "two_spin_simultaneous"] {
        let tmp = TempDir::new().unwrap();
        let out =
            heatflow(&["audit", "--config", scenario(name).to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let text = fs::read_to_string(tmp.path().join(format!("{name}_audit.csv"))).unwrap();
        assert!(text.lines().all(|l| l.split(',').count() == 6), "{text}");
        assert!(text.lines().skip(1).all(|l| l.ends_with(",pass")));
        assert!(String::from_utf8_lossy(&out.stdout).contains(", 0 violated"));
    }
}

#[test]
fn compare_reports_first_order_convergence() {
    let out = heatflow(&["compare", "--config", scenario("negative_coherence").to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let ratio: f64 =
        text.lines().last().unwrap().split("ratio ").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
    assert!((ratio - 2.0).abs() <= 0.4, "{text}");

    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        &fs::read_to_string(scenario("negative_coherence")).unwrap().replace("\"g\": 20.0", "\"g\": 0.0"),
    );
    let out = heatflow(&["compare", "--config", cfg.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1).filter(|l| !l.starts_with('#')) {
        let cells: Vec<&str> = line.split(',').collect();
        assert!(cells[1].parse::<f64>().unwrap() < 1e-12, "{line}");
    }
}

#[test]
fn toy_table() {
    let out = heatflow(&["toy", "swap", "--strength", "0.5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("two-spin heat,C,0.500000000000,0.500000000000,0.500000000000"), "{text}");
    let out = heatflow(&["toy"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 10 + 20 + 10 + 1);
    for line in text.lines().skip(1) {
        let err: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(err < 1e-7, "{line}");
    }
}
