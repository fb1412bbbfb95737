use std::path::Path;
use std::process::{Command, Output};

const SINGLE: &str = r#"{"type":"finite","terms":[[1,2]]}"#;
const UNSTABLE: &str = r#"{"type":"finite","terms":[[4,2]]}"#;
const FAMILY: &str = r#"{"type":"power_law","A":1,"B":1,"alpha":0.5,"beta":2,"N":1000}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voltspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn spectrum_single_term_three_modes() {
    let out = run(&["spectrum", "--kernel", SINGLE, "--modes", "1,2,3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("mode_index,a_n,kind,re,im,residual\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 9);
    assert_eq!(rows.iter().filter(|r| r[2] == "real").count(), 3);
    assert_eq!(rows.iter().filter(|r| r[2] == "pair").count(), 6);
    let first: f64 = rows[0][3].parse().unwrap();
    assert!((first + 1.754877666246693).abs() < 1e-12);
}

#[test]
fn spectrum_rows_meet_their_residual_bound() {
    let out = run(&[
        "spectrum",
        "--kernel",
        r#"{"type":"finite","terms":[[1,1],[0.5,4],[0.2,30]]}"#,
        "--a-grid",
        "1:10:4",
        "--theta",
        "0.5",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    for m in doc["modes"].as_array().unwrap() {
        let tol = m["residual_tol"].as_f64().unwrap();
        for z in m["zeros"].as_array().unwrap() {
            assert!(z["residual"].as_f64().unwrap() <= tol);
        }
        assert!(m["interlacing_violations"].as_array().unwrap().is_empty());
    }
}

#[test]
fn spectrum_tags_unstable_rows() {
    let out = run(&["spectrum", "--kernel", UNSTABLE, "--modes", "1"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&stdout(&out));
    let unstable: Vec<_> = rows.iter().filter(|r| r[2] == "unstable").collect();
    assert_eq!(unstable.len(), 1);
    let x: f64 = unstable[0][3].parse().unwrap();
    assert!((x - 0.6956207695598621).abs() < 1e-12);
}

#[test]
fn config_errors_exit_one() {
    assert_eq!(
        code(&run(&["spectrum", "--kernel", r#"{"type":"finite","#, "--modes", "1"])),
        1
    );
    assert_eq!(code(&run(&["spectrum", "--kernel", SINGLE])), 1);
    assert_eq!(code(&run(&["spectrum", "--kernel", SINGLE, "--modes", "0.5"])), 1);
    assert_eq!(code(&run(&["spectrum", "--kernel", SINGLE, "--a-grid", "1:2:0"])), 1);
    assert_eq!(
        code(&run(&["spectrum", "--kernel", "/no/such/file.json", "--modes", "1"])),
        1
    );
    assert_eq!(
        code(&run(&["spectrum", "--kernel", SINGLE, "--modes", "1", "--theta", "2"])),
        1
    );
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(
        code(&run(&["simulate", "--kernel", SINGLE, "--modes", "1", "--dt", "1"])),
        1
    );
}

#[test]
fn kernel_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    std::fs::write(&path, SINGLE).unwrap();
    let out = run(&["spectrum", "--kernel", path.to_str().unwrap(), "--modes", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(csv_rows(&stdout(&out)).len(), 3);
}

#[test]
fn classify_examples() {
    let doc = json(&run(&[
        "classify", "--kernel", SINGLE, "--modes", "1,2,3", "--theta", "0.7",
    ]));
    assert_eq!(doc["verdict"], "Stable");
    assert_eq!(doc["N0"], 0);

    let doc = json(&run(&["classify", "--kernel", UNSTABLE, "--modes", "1,2"]));
    assert_eq!(
        (doc["verdict"].as_str(), doc["N0"].as_u64()),
        (Some("Unstable"), Some(1))
    );

    let doc = json(&run(&[
        "classify", "--kernel", FAMILY, "--modes", "1", "--theta", "0.95",
    ]));
    assert_eq!(doc["regime"], "DivergeLeft");

    let log = r#"{"type":"power_law","A":1,"B":1,"alpha":1,"beta":1,"N":100}"#;
    let doc = json(&run(&["classify", "--kernel", log, "--modes", "1", "--theta", "0.3"]));
    assert_eq!(doc["regime"], "ApproachAxis");
    assert_eq!(doc["log_case"], true);

    let doc = json(&run(&[
        "classify", "--kernel", FAMILY, "--modes", "1", "--theta", "0.875",
    ]));
    assert_eq!(doc["regime"], "ConstantAbscissa");
    assert!((doc["theta_constant"].as_f64().unwrap() + 1.0262).abs() < 1e-3);
}

#[test]
fn asymptotics_finite_kernel_passes() {
    let out = run(&[
        "asymptotics",
        "--kernel",
        SINGLE,
        "--a-grid",
        "100:10:3",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["claims"].as_array().unwrap().len(), 2);
    assert_eq!(
        code(&run(&["asymptotics", "--kernel", SINGLE, "--a-grid", "100:10:1"])),
        1
    );
}

#[test]
fn asymptotics_family_reports_residue_diagnostic() {
    let out = run(&[
        "asymptotics",
        "--kernel",
        FAMILY,
        "--a-grid",
        "100:10:3",
        "--theta",
        "0.3",
        "--max-terms",
        "5000",
        "--format",
        "json",
    ]);
    let doc = json(&out);
    assert_eq!(doc["regime"], "ApproachAxis");
    assert_eq!(doc["residue"]["closed_form_sign_flipped"], true);
    assert!(doc["claims"][0]["name"] == "re_to_axis");
}

#[test]
fn oracle_check_default_suite_passes() {
    let out = run(&["oracle-check", "--seed", "11", "--count", "30"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 30);
    assert!(rows.iter().all(|r| r[9] == "true"));
}

#[test]
fn oracle_check_negative_control() {
    let out = run(&["oracle-check", "--seed", "11", "--count", "5", "--perturb", "1e-6"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn oracle_check_rejects_twenty_terms() {
    let terms: Vec<String> = (1..=20).map(|k| format!("[0.01,{k}]")).collect();
    let kernel = format!(r#"{{"type":"finite","terms":[{}]}}"#, terms.join(","));
    assert_eq!(code(&run(&["oracle-check", "--kernel", &kernel, "--modes", "1"])), 1);
}

#[test]
fn simulate_matches_abscissa() {
    let out = run(&[
        "simulate", "--kernel", SINGLE, "--modes", "1", "--dt", "1e-3", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let r = &json(&out)["modes"][0]["report"];
    assert!((r["fitted_rate"].as_f64().unwrap() / 2.0 + 0.1226).abs() < 0.05 * 0.1226);

    let out = run(&[
        "simulate", "--kernel", UNSTABLE, "--modes", "1", "--T", "20", "--dt", "1e-3",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("mode_index,t,u,v,E\n"));
}

#[test]
fn probe_examples() {
    assert_eq!(code(&run(&["probe", "--kernel", SINGLE, "--rays", "0"])), 0);
    let out = run(&["probe", "--kernel", FAMILY, "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["pass"], true);
    let bad = format!("{}", std::f64::consts::PI - 0.005 + 0.01);
    assert_eq!(
        code(&run(&["probe", "--kernel", SINGLE, "--delta", "0.01", "--rays", &bad])),
        1
    );
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn identical_config_gives_identical_files() {
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "spectrum",
            "--kernel",
            SINGLE,
            "--a-grid",
            "1:3:5",
            "--theta",
            "0.25",
            "--gnuplot",
        ],
        vec!["oracle-check", "--seed", "5", "--count", "10"],
        vec!["classify", "--kernel", FAMILY, "--modes", "1,4,9", "--theta", "0.5"],
        vec!["simulate", "--kernel", SINGLE, "--modes", "1", "--T", "50"],
        vec!["probe", "--kernel", FAMILY],
    ];
    for args in cases {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for dir in [&a, &b] {
            let mut full = args.clone();
            full.extend(["--out", dir.path().to_str().unwrap()]);
            assert_eq!(code(&run(&full)), 0, "{args:?}");
        }
        let (fa, fb) = (files(a.path()), files(b.path()));
        assert!(!fa.is_empty());
        assert_eq!(fa, fb, "{args:?}");
    }
}
