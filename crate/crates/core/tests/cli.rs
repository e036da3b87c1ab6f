use std::path::Path;
use std::process::{Command, Output};

fn ghz_star(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghz-star"))
        .env_remove("GHZ_STAR_WORKERS")
        .args(args)
        .output()
        .expect("run ghz-star")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const HEADER: &str = "sweep_param,sweep_value,shots,seed,rate_mean,rate_stderr,fid_mean,fid_stderr,\
analytic_rate_exact,analytic_rate_leading,analytic_fid_leading,analytic_fid_lower_bound";

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("params.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_perfect_links() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_end_nodes = 5\nq_link = 1\nq_bsm = 1\nshots = 1000\n");
    let out = ghz_star(&["simulate", "--protocol", "factory", "--config", &cfg, "--no-timestamp"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == HEADER));
    assert_eq!(data_rows(&text)[0][4], "1.0");

    let out = ghz_star(&["simulate", "--protocol", "switch", "--config", &cfg]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# generated_unix="));
    assert!(text.contains("# warmup_executions=1"));
    let row = &data_rows(&text)[0];
    let rate: f64 = row[4].parse().unwrap();
    assert!((0.45..=0.55).contains(&rate));
    assert!(row[8..].iter().all(String::is_empty));
}

#[test]
fn output_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_end_nodes = 3\nq_link = 0.5\nshots = 200\n");
    let path = dir.path().join("out.csv");
    let out = ghz_star(&[
        "simulate", "--config", &cfg, "--set", "seed=5", "--set", "p_link=0.9", "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let row = &data_rows(&std::fs::read_to_string(&path).unwrap())[0];
    assert_eq!((row[2].as_str(), row[3].as_str()), ("200", "5"));
    assert!(row[6].parse::<f64>().unwrap() < 1.0);
}

#[test]
fn config_errors_exit_one_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_end_nodes = 5\n");
    let out = ghz_star(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("q_link"));

    let cfg = write_config(dir.path(), "n_end_nodes = 5\nq_link = 0.1\np_memory = 0.9\n");
    let out = ghz_star(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("p_memory"));

    let out = ghz_star(&["simulate", "--config", "/nonexistent/params.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(ghz_star(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ghz_star(&["--help"]).status.code(), Some(0));
}

#[test]
fn analytic_json() {
    let out = ghz_star(&["analytic", "rate", "--set", "n_end_nodes=5", "--set", "q_link=0.01", "--set", "q_bsm=0.95"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.003389).abs() < 5e-7);
    assert_eq!(v["inputs"]["q_bsm"], 0.95);
    assert_eq!(v["mode"], "leading");

    let out = ghz_star(&["analytic", "g", "--set", "n_end_nodes=2", "--set", "q_link=0.01", "--positions", "1", "--rate", "0.01"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let out = ghz_star(&["analytic", "fidelity", "--set", "n_end_nodes=4", "--set", "q_link=0.1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let out = ghz_star(&["analytic", "order-stat", "--mode", "exact", "--index", "2", "--set", "n_end_nodes=2", "--set", "q_link=0.5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 8.0 / 3.0).abs() < 1e-12);

    let out = ghz_star(&["analytic", "fidelity", "--set", "n_end_nodes=30", "--set", "q_link=0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = ghz_star(&["analytic", "rate", "--mode", "lower-bound", "--set", "n_end_nodes=3", "--set", "q_link=0.1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_rows_and_chart() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("chart.svg");
    let out = ghz_star(&[
        "sweep", "--param", "n_end_nodes", "--values", "3,4,5,6,7,8", "--set", "q_link=0.01", "--set", "shots=3000",
        "--no-timestamp", "--svg", svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[0] == "n_end_nodes"));
    let rates: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(rates.windows(2).all(|w| w[1] < w[0]), "{rates:?}");
    let chart = std::fs::read_to_string(&svg).unwrap();
    assert!(chart.starts_with("<svg") && chart.contains("<circle") && chart.contains("<polyline"));
}

#[test]
fn sweep_errors() {
    let base = ["--set", "n_end_nodes=3", "--set", "q_link=0.1"];
    let mut args = vec!["sweep", "--param", "q_lnk", "--values", "0.1"];
    args.extend(base);
    assert_eq!(ghz_star(&args).status.code(), Some(1));
    let mut args = vec!["sweep", "--param", "q_link", "--values", ""];
    args.extend(base);
    assert_eq!(ghz_star(&args).status.code(), Some(1));
    let mut args = vec!["sweep", "--param", "q_link"];
    args.extend(base);
    assert_eq!(ghz_star(&args).status.code(), Some(1));
}

#[test]
fn identical_csv_for_any_worker_count() {
    let args = |w: &'static str| {
        vec![
            "--workers", w, "sweep", "--protocol", "factory", "--param", "q_link", "--values", "0.01,0.1",
            "--set", "n_end_nodes=4", "--set", "p_mem=0.999", "--set", "shots=1500", "--no-timestamp",
        ]
    };
    let one = stdout(&ghz_star(&args("1")));
    assert_eq!(one, stdout(&ghz_star(&args("3"))));
    let via_env = Command::new(env!("CARGO_BIN_EXE_ghz-star"))
        .env("GHZ_STAR_WORKERS", "5")
        .args(&args("1")[2..])
        .output()
        .unwrap();
    assert_eq!(one, stdout(&via_env));
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = ghz_star(&["verify", "--output", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["all_passed"], true);
    assert!(v["runtime_seconds"].as_f64().unwrap() > 0.0);
    assert!(v["checks"].as_array().unwrap().len() >= 10);

    let out = ghz_star(&["verify", "--inject-skew"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed.len(), 1);
    assert!(failed[0].contains("coefficient identity"));
}
