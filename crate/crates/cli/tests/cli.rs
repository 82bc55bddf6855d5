use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn levelcross(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levelcross"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_columns(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn feasibility_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = levelcross(
        &[
            "feasibility",
            "--family",
            "beta",
            "--beta",
            "2",
            "--delta",
            "0.01",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert_eq!(
        json(&dir.path().join("verdict.json"))["kind"],
        "FeasibleFiniteTime"
    );

    let o = levelcross(
        &["feasibility", "--family", "beta", "--beta", "0.5"],
        dir.path(),
    );
    assert_eq!(code(&o), 3);
    assert_eq!(
        json(&dir.path().join("verdict.json"))["kind"],
        "InfeasibleInfiniteTime"
    );

    let o = levelcross(
        &["feasibility", "--family", "beta", "--beta", "0"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert_eq!(
        json(&dir.path().join("verdict.json"))["kind"],
        "TriviallyAdiabatic"
    );

    let o = levelcross(&["feasibility", "--path", "missing.csv"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.csv"));
}

/// Table of `θ = 0.3 + Γ(2 + ½ sin(3 ln Γ))`, `B = Γ`: the drive wobbles on
/// every scale, so no power law describes the approach.
fn wobbling_table(path: &Path) {
    let mut text = String::from("gamma,b,theta,phi\n");
    text.push_str("0,0,0.3,0\n");
    for k in 0..=4000 {
        let g = 10f64.powf(-9.0 + 9.0 * k as f64 / 4000.0);
        let theta = 0.3 + g * (2.0 + 0.5 * (3.0 * g.ln()).sin());
        text.push_str(&format!("{g:e},{g:e},{theta:e},0\n"));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn ragged_approach_is_indeterminate() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("wobble.csv");
    wobbling_table(&table);
    let o = levelcross(
        &["feasibility", "--path", table.to_str().unwrap()],
        &dir.path().join("run"),
    );
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn table_paths_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("linear.csv");
    let mut text = String::from("gamma,b,theta,phi\n");
    for k in 0..=400 {
        let g = k as f64 / 400.0;
        text.push_str(&format!("{g},{g},{},0.5\n", 0.3 + g * g));
    }
    std::fs::write(&table, text).unwrap();
    let o = levelcross(
        &["feasibility", "--path", table.to_str().unwrap()],
        &dir.path().join("run"),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn schedule_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = levelcross(&["schedule", "--beta", "2", "--delta", "0.01"], dir.path());
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_columns(&dir.path().join("schedule.csv"));
    assert_eq!(header, ["t", "gamma", "b", "theta", "phi"]);
    let (first, last) = (&rows[0], rows.last().unwrap());
    let slope = (last[1] - first[1]) / (last[0] - first[0]);
    for r in &rows {
        assert!((r[1] - (first[1] + slope * (r[0] - first[0]))).abs() < 1e-6);
    }
    assert_eq!(
        json(&dir.path().join("schedule.json"))["reached_crossing"],
        true
    );

    let o = levelcross(&["schedule", "--beta", "1", "--t-max", "100"], dir.path());
    assert_eq!(code(&o), 0);
    let summary = json(&dir.path().join("schedule.json"));
    assert_eq!(summary["reached_crossing"], false);
    assert_eq!(summary["stop"], "TimeLimit");

    let o = levelcross(&["schedule", "--delta", "0"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn figure_bundles() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&levelcross(&["fig", "fig5"], dir.path())), 0);
    for name in [
        "gdot_vs_g.csv",
        "gamma_vs_t.csv",
        "lngamma_vs_t.csv",
        "fig5_summary.json",
        "config.json",
    ] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let cfg = json(&dir.path().join("config.json"));
    assert_eq!(
        (
            cfg["detuning"].as_f64(),
            cfg["omega0"].as_f64(),
            cfg["delta"].as_f64()
        ),
        (Some(1.0), Some(1.0), Some(0.01))
    );

    assert_eq!(
        code(&levelcross(
            &["fig", "fig1", "--steps", "4096", "--stride", "64"],
            dir.path()
        )),
        0
    );
    let summary = json(&dir.path().join("fig1_summary.json"));
    for case in ["half", "resonant", "double"] {
        let (header, rows) = csv_columns(&dir.path().join(format!("fig1_{case}.csv")));
        assert_eq!(header.len(), 7);
        assert_eq!(rows.len(), 65);
        let passed = summary[case]["spectral"]["passed"].as_bool().unwrap();
        assert_eq!(passed, case != "resonant");
    }

    assert_eq!(code(&levelcross(&["fig", "fig2"], dir.path())), 0);
    let (_, rows) = csv_columns(&dir.path().join("fig2_paths.csv"));
    let mut betas: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    betas.dedup();
    assert_eq!(betas, [0.5, 1.0, 2.0, 4.0]);

    assert_eq!(code(&levelcross(&["fig", "fig4"], dir.path())), 2);
}

#[test]
fn stirap_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = levelcross(
        &["stirap", "--mode", "alternative", "--tau-arc", "500"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let report = json(&dir.path().join("report.json"));
    assert!(report["final_p3"].as_f64().unwrap() > 0.99);
    assert!(report["spectral"]["passed"].as_bool().unwrap());

    let o = levelcross(&["stirap", "--mode", "gaussian"], dir.path());
    assert_eq!(code(&o), 0);
    let report = json(&dir.path().join("report.json"));
    assert_eq!(
        report["late_leg_feasibility"]["kind"],
        "InfeasibleInfiniteTime"
    );

    let o = levelcross(
        &["stirap", "--mode", "alternative", "--tau-arc", "1"],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn holonomy_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = levelcross(
        &["holonomy", "--loop", "spin-cone", "--theta0", "1.5708"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let h = json(&dir.path().join("holonomy.json"));
    let berry = h["berry_phase"].as_f64().unwrap();
    assert!((berry.abs() - std::f64::consts::PI).abs() < 1e-3, "{berry}");

    let o = levelcross(&["holonomy", "--loop", "stirap-dark"], dir.path());
    assert_eq!(code(&o), 0);
    let h = json(&dir.path().join("holonomy.json"));
    // |1⟩ is carried into |3⟩ up to sign
    let entry = &h["lab_operator"][2][0];
    let modulus = entry[0].as_f64().unwrap().hypot(entry[1].as_f64().unwrap());
    assert!((modulus - 1.0).abs() < 1e-6);
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| {
            (
                e.file_name().into_string().unwrap(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .filter(|(name, _)| name != "config.json")
        .collect();
    files.sort();
    files
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("c"),
    );
    let args = [
        "schedule", "--beta", "1.5", "--delta", "0.05", "--seed", "3",
    ];
    assert_eq!(code(&levelcross(&args, &a)), 0);
    assert_eq!(code(&levelcross(&args, &b)), 0);
    assert_eq!(read_dir_sorted(&a), read_dir_sorted(&b));

    // the resolved configuration alone repeats the run
    let cfg = a.join("config.json");
    let o = levelcross(&["schedule", "--config", cfg.to_str().unwrap()], &c);
    assert_eq!(code(&o), 0);
    assert_eq!(read_dir_sorted(&a), read_dir_sorted(&c));
    let (ca, cc) = (json(&cfg), json(&c.join("config.json")));
    assert_eq!(ca["beta"], cc["beta"]);
    assert_eq!(cc["seed"], 3);
}

#[test]
fn toml_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "beta = 0.5\ndelta = 0.02\n").unwrap();
    let o = levelcross(
        &["feasibility", "--config", cfg.to_str().unwrap()],
        &dir.path().join("x"),
    );
    assert_eq!(code(&o), 3);
    let o = levelcross(
        &[
            "feasibility",
            "--config",
            cfg.to_str().unwrap(),
            "--beta",
            "3",
        ],
        &dir.path().join("y"),
    );
    assert_eq!(code(&o), 0);
    let resolved = json(&dir.path().join("y").join("config.json"));
    assert_eq!(resolved["beta"], 3.0);
    assert_eq!(resolved["delta"], 0.02);

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let o = levelcross(
        &["feasibility", "--config", cfg.to_str().unwrap()],
        &dir.path().join("z"),
    );
    assert_eq!(code(&o), 2);
}
