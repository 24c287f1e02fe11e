//! End-to-end checks of the binary: exit codes, deterministic files, and
//! the documented report formats.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_omcav");

fn base_config(g_eff: f64) -> Value {
    json!({
        "units": "kappa",
        "params": {
            "omega_m": 100.0,
            "gamma_m": 4.0,
            "kappa": 1.0,
            "kappa0": 0.0,
            "g": 0.01,
            "delta0": 0.0,
            "pump": {"g_eff": g_eff}
        },
        "drive": {"eps_l": [1.0, 0.0], "eps_r": [1.0, 0.0], "x": 0.0},
        "sweep": {"x_min": -10.0, "x_max": 10.0, "points": 2001},
        "output": {"format": "csv"}
    })
}

fn write_config(dir: &TempDir, value: &Value) -> std::path::PathBuf {
    let path = dir.path().join("run.json");
    fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn parse_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn sweep_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &base_config(4.0));
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let r = run(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
}

#[test]
fn matched_coupling_sweep_shows_the_resonant_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &base_config(2.0));
    let out = dir.path().join("sweep.csv");
    let r = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let (header, rows) = parse_csv(&out);
    assert_eq!(
        header,
        vec![
            "x_over_kappa",
            "out_norm_L",
            "out_norm_R",
            "cavity_norm",
            "mech_norm",
            "phi_plus_norm",
            "phi_minus_norm"
        ]
    );
    assert_eq!(rows.len(), 2001);
    let mid = rows
        .iter()
        .find(|r| r[0] == 0.0)
        .expect("x = 0 on the grid");
    assert!(mid[1] < 1e-12 && mid[2] < 1e-12);
    assert!((mid[3] - 0.5).abs() < 1e-12);
    assert!((mid[4] - 0.5).abs() < 1e-12);
}

#[test]
fn strong_coupling_sweep_minima_sit_at_the_split_zeros() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &base_config(6.0));
    let out = dir.path().join("sweep.csv");
    let r = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let (_, rows) = parse_csv(&out);
    let expect = 32.0f64.sqrt();
    let grid_step = 20.0 / 2000.0;
    for sign in [-1.0, 1.0] {
        let min = rows
            .iter()
            .filter(|r| r[0] * sign > 0.0)
            .min_by(|a, b| a[1].partial_cmp(&b[1]).unwrap())
            .unwrap();
        assert!(
            (min[0] - sign * expect).abs() <= grid_step,
            "minimum at {} vs {}",
            min[0],
            sign * expect
        );
    }
}

#[test]
fn empty_cavity_two_point_sweep_matches_the_hand_formula() {
    // With G = 0 and equal probes, dc = 2 eps_L / (2 kappa - i x), so
    // out_L / eps_L = (2 kappa + i x) / (2 kappa - i x): unit magnitude at
    // every detuning.
    let dir = TempDir::new().unwrap();
    let mut value = base_config(0.0);
    value["sweep"] = json!({"x_min": -1.0, "x_max": 1.0, "points": 2});
    let cfg = write_config(&dir, &value);
    let out = dir.path().join("two.csv");
    let r = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let (_, rows) = parse_csv(&out);
    assert_eq!(rows.len(), 2);
    // |2 kappa + i x|^2 / |2 kappa - i x|^2 = (4 + x^2)/(4 + x^2) = 1.
    for (row, x) in rows.iter().zip([-1.0f64, 1.0]) {
        assert_eq!(row[0], x);
        assert!((row[1] - 1.0).abs() < 1e-12, "out_norm_L = {}", row[1]);
        assert!((row[2] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn dotted_set_overrides_the_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &base_config(4.0));
    let out = dir.path().join("short.csv");
    let r = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--set",
        "sweep.points=11",
    ]);
    assert!(r.status.success());
    let (_, rows) = parse_csv(&out);
    assert_eq!(rows.len(), 11);
}

#[test]
fn unknown_fields_are_config_errors() {
    let dir = TempDir::new().unwrap();
    let mut value = base_config(4.0);
    value["params"]["typo_field"] = json!(1.0);
    let cfg = write_config(&dir, &value);
    let r = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&r.stderr);
    assert!(stderr.starts_with("error: config:"), "stderr: {stderr}");
    assert_eq!(stderr.lines().count(), 1);
}

#[test]
fn unwritable_output_path_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &base_config(4.0));
    let r = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        "/nonexistent-dir/sweep.csv",
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).starts_with("error: config:"));
}

#[test]
fn ambiguous_pump_is_rejected() {
    let dir = TempDir::new().unwrap();
    let mut value = base_config(4.0);
    value["params"]["pump"] = json!({"g_eff": 4.0, "amplitude": [1.0, 0.0]});
    let cfg = write_config(&dir, &value);
    let r = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn ieit_report_below_threshold() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &base_config(1.9));
    let r = run(&["ieit", "--config", cfg.to_str().unwrap()]);
    assert!(r.status.success());
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.contains("exists: false"));
    assert!(stdout.contains("no IEIT: G < 2 kappa_eff"));
}

#[test]
fn ieit_report_with_verified_zeros() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &base_config(6.0));
    let r = run(&["ieit", "--config", cfg.to_str().unwrap()]);
    assert!(r.status.success());
    let stdout = String::from_utf8_lossy(&r.stdout);
    let field = |name: &str| -> f64 {
        stdout
            .lines()
            .find(|l| l.starts_with(name))
            .unwrap_or_else(|| panic!("missing {name} in {stdout}"))
            .split(": ")
            .nth(1)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(stdout.contains("exists: true"));
    assert!((field("x_plus_over_kappa") - 32.0f64.sqrt()).abs() < 1e-12);
    assert!((field("gamma_m_required_over_kappa") - 4.0).abs() < 1e-15);
    assert!(field("residual_out_plus") < 1e-12);
    assert!(field("residual_out_minus") < 1e-12);
}

#[test]
fn steady_lists_the_bistable_branches() {
    let dir = TempDir::new().unwrap();
    let mut value = base_config(4.0);
    value["params"]["omega_m"] = json!(50.0);
    value["params"]["g"] = json!(0.02);
    value["params"]["delta0"] = json!(50.0);
    value["params"]["pump"] = json!({"amplitude": [(2e8f64).sqrt(), 0.0]});
    let cfg = write_config(&dir, &value);
    let r = run(&["steady", "--config", cfg.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.contains("roots: 3"), "{stdout}");
    let stables: Vec<&str> = stdout
        .lines()
        .skip(2)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(stables, vec!["true", "false", "true"]);
}

#[test]
fn evolve_writes_a_trajectory() {
    let dir = TempDir::new().unwrap();
    let mut value = base_config(4.0);
    value["drive"]["x"] = json!(12.0f64.sqrt());
    value["evolve"] = json!({"mode": "rwa", "t_final": 5.0});
    let cfg = write_config(&dir, &value);
    let out = dir.path().join("traj.csv");
    let r = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let (header, rows) = parse_csv(&out);
    assert_eq!(
        header,
        vec!["t_kappa", "re_db", "im_db", "re_dc", "im_dc", "out_L_sq", "out_R_sq"]
    );
    assert!(rows.len() > 100);
    assert!(rows.iter().all(|r| r.iter().all(|v| v.is_finite())));
    assert_eq!(rows[0][0], 0.0);
    let last = rows.last().unwrap();
    assert!((last[0] - 5.0).abs() < 1e-9);

    // The full integrator runs through the same surface.
    let r = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--mode",
        "full",
        "--set",
        "evolve.t_final=1.0",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn oversized_step_is_a_numeric_failure() {
    let dir = TempDir::new().unwrap();
    let mut value = base_config(4.0);
    value["evolve"] = json!({"t_final": 5.0, "dt": 1.0});
    let cfg = write_config(&dir, &value);
    let r = run(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&r.stderr);
    assert!(stderr.starts_with("error: numeric:"), "stderr: {stderr}");
}

#[test]
fn qswitch_reports_a_closed_budget() {
    let dir = TempDir::new().unwrap();
    let mut value = base_config(4.0);
    value["drive"]["x"] = json!(12.0f64.sqrt());
    value["qswitch"] = json!({"t_switch": 15.0, "kappa_factor": 10.0});
    let cfg = write_config(&dir, &value);
    let out = dir.path().join("qswitch.csv");
    let r = run(&[
        "qswitch",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let stdout = String::from_utf8_lossy(&r.stdout);
    let budget: f64 = stdout
        .lines()
        .find(|l| l.starts_with("budget_residual"))
        .unwrap()
        .split(": ")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(budget < 1e-4, "budget residual {budget}");
    let (_, rows) = parse_csv(&out);
    assert!(rows.len() > 100);
}

#[test]
fn json_sweep_round_trips_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, &base_config(4.0));
    let out = dir.path().join("sweep.json");
    let r = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let text = fs::read_to_string(&out).unwrap();
    let parsed: Value = serde_json::from_str(&text).unwrap();
    let reemitted = omcav_cli::output::reemit_json_table(&parsed).unwrap();
    assert_eq!(text, reemitted);
}

#[test]
fn kappa_and_si_modes_emit_identical_columns() {
    let dir = TempDir::new().unwrap();
    let scale = 2.0 * std::f64::consts::PI * 1e6;
    let kappa_cfg = write_config(&dir, &base_config(6.0));

    let mut si = base_config(6.0);
    si["units"] = json!("si");
    si["params"]["omega_m"] = json!(100.0 * scale);
    si["params"]["gamma_m"] = json!(4.0 * scale);
    si["params"]["kappa"] = json!(scale);
    si["params"]["g"] = json!(0.01 * scale);
    si["params"]["pump"] = json!({"g_eff": 6.0 * scale});
    let si_path = dir.path().join("si.json");
    fs::write(&si_path, serde_json::to_string_pretty(&si).unwrap()).unwrap();

    let out_kappa = dir.path().join("kappa.csv");
    let out_si = dir.path().join("si.csv");
    let r1 = run(&[
        "sweep",
        "--config",
        kappa_cfg.to_str().unwrap(),
        "--out",
        out_kappa.to_str().unwrap(),
    ]);
    let r2 = run(&[
        "sweep",
        "--config",
        si_path.to_str().unwrap(),
        "--out",
        out_si.to_str().unwrap(),
    ]);
    assert!(r1.status.success() && r2.status.success());

    // The normalized columns agree to double precision; bitwise equality is
    // unreachable because decimal SI inputs are not exactly kappa-scalable.
    let (_, rows_kappa) = parse_csv(&out_kappa);
    let (_, rows_si) = parse_csv(&out_si);
    assert_eq!(rows_kappa.len(), rows_si.len());
    for (a, b) in rows_kappa.iter().zip(&rows_si) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{x} vs {y}");
        }
    }
}
