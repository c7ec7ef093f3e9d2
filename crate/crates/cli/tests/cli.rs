use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use biwave_cli::{parse_scenario, serialize_scenario};

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn biwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biwave"))
        .args(args)
        .env_remove("BIWAVE_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const EXAMPLE_AT_PI: &str = r#"
[params]
a = 1
b = 0.5
n = 1

[data]
phi1 = "sin(x1)"
phi2 = "cos(x1)"

[grid]
x = [{ values = [0] }]
t = { values = ["pi"] }

[task]
kind = "solve"
"#;

#[test]
fn solve_row_at_pi() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "s.toml", EXAMPLE_AT_PI);
    let out = biwave(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x1,t,u"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "0");
    assert!(row[1].starts_with("3.14159"));
    let u: f64 = row[2].parse().unwrap();
    assert!((u - 4.0 / 3.0).abs() < 1e-10, "{u}");
    assert!(lines.next().is_none());
}

#[test]
fn zero_oracle_compare_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[params]
a = 2
b = 1
n = 3

[grid]
x = [{ values = [0, 1] }, { values = [0] }, { values = [0.5] }]
t = { values = [0.5, 1] }

[task]
kind = "oracle-compare"
tolerance = 1e-12
"#;
    let path = write(&dir, "z.toml", text);
    let out = biwave(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(report["max_error"], 0.0);
    assert_eq!(report["passed"], true);
}

#[test]
fn tolerance_breach_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = EXAMPLE_AT_PI.replace("kind = \"solve\"", "kind = \"initial-check\"\ntolerance = 1e-12");
    let path = write(&dir, "b.toml", &text);
    let out = biwave(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
    // the same run passes at a looser flag tolerance
    let out = biwave(&["run", path.to_str().unwrap(), "--tolerance", "1e-3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.toml", &EXAMPLE_AT_PI.replace("b = 0.5", "b = 1"));
    let out = biwave(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate-speeds"));
    let out = biwave(&["run", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let empty = write(&dir, "empty.toml", "");
    assert_eq!(biwave(&["run", empty.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scenario_dir().join("even2-smoke.toml");
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}.csv"));
        let status = biwave(&[
            "run",
            scenario.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert_eq!(status.status.code(), Some(0));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn flags_override_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "s.toml", EXAMPLE_AT_PI);
    let out = biwave(&["run", path.to_str().unwrap(), "--quad-order", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = biwave(&["run", path.to_str().unwrap(), "--h-rel", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bundled_scenarios_round_trip() {
    let mut count = 0;
    for entry in std::fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        let s = parse_scenario(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let again = parse_scenario(&serialize_scenario(&s).unwrap()).unwrap();
        assert_eq!(again, s, "{}", path.display());
        count += 1;
    }
    assert_eq!(count, 5);
}
