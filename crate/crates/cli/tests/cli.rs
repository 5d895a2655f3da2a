use std::path::PathBuf;
use std::process::{Command, Output};

use egfkit::gof::GofReport;
use egfkit_cli::datasets::{Dataset, FLOODS};
use egfkit_cli::DatasetReport;

fn egfkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_egfkit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("egfkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn egf_values_and_exit_codes() {
    let o = egfkit(&["egf", "--family", "exponential", "--params", "1", "--s", "2", "--weighted"]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).split_whitespace().next().unwrap().parse().unwrap();
    assert!((v - 0.25).abs() < 1e-12);

    let o = egfkit(&["egf", "--family", "paretoI", "--params", "3", "--s", "2", "--t", "5", "--weighted", "--residual"]);
    let fields: Vec<String> = stdout(&o).split_whitespace().map(String::from).collect();
    assert_eq!(fields.len(), 3);
    assert!((fields[0].parse::<f64>().unwrap() - 1.5).abs() < 1e-12);

    let o = egfkit(&["egf", "--family", "paretoI", "--params", "0.5", "--s", "1.2", "--weighted"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("(alpha+1)s"));
}

#[test]
fn gof_input_errors() {
    let empty = scratch("empty.txt", "");
    assert_eq!(egfkit(&["gof", "--input", empty.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(egfkit(&["gof", "--input", "/nonexistent/egfkit.txt"]).status.code(), Some(1));
    let small = scratch("small.txt", "0.3\n0.5\n0.9\n");
    assert_eq!(egfkit(&["gof", "--input", small.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(egfkit(&["gof"]).status.code(), Some(1));
}

#[test]
fn gof_report_round_trips_and_repeats() {
    let path = scratch("floods.txt", &Dataset::Floods.canonical_text());
    let args = ["gof", "--input", path.to_str().unwrap(), "--boot", "200", "--seed", "3"];
    let a = egfkit(&args);
    let b = egfkit(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let report: GofReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);

    let csv = scratch("floods.csv", &format!(
        "# exceedances\nid,value\n{}",
        FLOODS.iter().enumerate().map(|(i, v)| format!("{i},{v}\n")).collect::<String>()
    ));
    let c = egfkit(&["gof", "--input", csv.to_str().unwrap(), "--boot", "200", "--seed", "3"]);
    assert_eq!(c.stdout, a.stdout);
}

#[test]
fn datasets_json_round_trips() {
    let o = egfkit(&["datasets", "rayleigh", "--json", "--boot", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let r: DatasetReport = serde_json::from_str(&text).unwrap();
    assert_eq!(r.n, 15);
    assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", text);

    let plain = stdout(&egfkit(&["datasets", "floods", "--boot", "200"]));
    assert!(plain.contains("published vs computed"));
    assert!(plain.contains("1.0789") && plain.contains("1.0893"));
    assert_eq!(egfkit(&["datasets", "nowhere"]).status.code(), Some(1));
}

#[test]
fn simulate_is_repeatable_and_thread_independent() {
    let args = ["simulate", "--family", "weibull", "--param", "1.5", "--n", "10", "--reps", "50", "--seed", "1", "--boot", "100"];
    let a = egfkit(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, egfkit(&args).stdout);
    let one = Command::new(env!("CARGO_BIN_EXE_egfkit"))
        .args(args)
        .env("EGFKIT_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, one.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("statistic,n,rejection_rate,reps_used,skipped\n"));
    assert_eq!(text.lines().count(), 2);

    let out = std::env::temp_dir().join(format!("egfkit-cli-{}-sim.json", std::process::id()));
    let mut with_file: Vec<&str> = args.to_vec();
    with_file.extend(["--format", "json", "--output", out.to_str().unwrap()]);
    let o = egfkit(&with_file);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json[0]["generator"], "weibull:1.5");
}
