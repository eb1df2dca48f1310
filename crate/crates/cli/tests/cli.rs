use std::path::PathBuf;
use std::process::{Command, Output};

fn fliess(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fliess")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fliess-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn shuffle_of_two_letters() {
    let a = scratch("a.txt", "x1\n");
    let b = scratch("b.txt", "x2\n");
    let o = fliess(&["shuffle", a.to_str().unwrap(), b.to_str().unwrap(), "--degree", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "x1 x2 + x2 x1");
}

#[test]
fn antipode_closed_form() {
    let o = fliess(&["antipode", "--word", "x0", "--out-index", "1", "--m", "2", "--algo", "cfree"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "-a^1_{x0} + a^1_{x1} a^1_e + a^1_{x2} a^2_e");
    for algo in ["left", "right"] {
        let other = fliess(&["antipode", "--word", "x0", "--m", "2", "--algo", algo]);
        assert_eq!(stdout(&other), stdout(&o));
    }
}

#[test]
fn verify_hopf_passes() {
    let o = fliess(&["verify", "hopf", "--degree", "5", "--m", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("coassociativity: 238/238"));
}

#[test]
fn verify_json_report() {
    let o = fliess(&["verify", "group", "--degree", "3", "--m", "1", "--format", "json"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["passed"], true);
    assert!(doc["checks"].as_array().unwrap().len() > 5);
}

#[test]
fn quasi_shuffle_signs() {
    let plus = fliess(&["qshuffle", "x1", "x1", "--theta", "+1"]);
    let minus = fliess(&["qshuffle", "x1", "x1", "--theta", "-1"]);
    assert_eq!(stdout(&plus), "x[1,1] + 2 x1 x1");
    assert_eq!(stdout(&minus), "-x[1,1] + 2 x1 x1");
}

#[test]
fn feedback_and_inverse() {
    assert_eq!(stdout(&fliess(&["feedback", "x1", "x1", "--degree", "5"])), "x1 + x0 x0 x1 + x0 x0 x0 x0 x1");
    let inv = fliess(&["invert", "x1", "--degree", "4", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&inv.stdout).unwrap();
    assert_eq!(doc["terms"][0]["word"], "x1");
    assert_eq!(doc["terms"][0]["coeff"][0], "-1");
}

#[test]
fn representation_commands() {
    let rep = scratch("star.json", r#"{"alphabet":["x0","x1"],"dim":1,"mu":{"x0":[["0"]],"x1":[["1"]]},"gamma":["1"],"lambda":[["1"]]}"#);
    let path = rep.to_str().unwrap();
    assert_eq!(stdout(&fliess(&["rep", "coeff", path, "--word", "x1 x1 x1"])), "1");
    assert_eq!(stdout(&fliess(&["rep", "coeff", path, "--word", "x0 x1"])), "0");
    let sq = fliess(&["rep", "shuffle", path, path, "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&sq.stdout).unwrap();
    assert_eq!(doc["mu"]["x1"][0][0], "2");
    let realized = stdout(&fliess(&["rep", "realize", path]));
    assert!(realized.starts_with("z(N) = (1 - u1(N))^-1 z(N-1)"), "{realized}");
    let signal = scratch("u.csv", "k,u0,u1\n1,1,1/10\n2,1,1/10\n3,1,1/10\n");
    let sim = fliess(&["simulate", path, signal.to_str().unwrap(), "--format", "csv"]);
    assert!(stdout(&sim).ends_with("3,1000/729"), "{}", stdout(&sim));
}

#[test]
fn discrete_evaluation_is_exact() {
    let signal = scratch("w.csv", "k,u0,u1\n1,1,2\n2,1,3\n");
    let o = fliess(&["eval-dt", "x1 + x1 x1", signal.to_str().unwrap()]);
    // S_x1(2) = 5, S_x1x1(2) = 2*2 + 3*5 = 19
    assert_eq!(stdout(&o), "24");
}

#[test]
fn continuous_evaluation() {
    let mut csv = String::from("k,t0,h,u0,u1\n");
    for k in 0..=1000 {
        csv.push_str(&format!("{k},0,0.001,1,1\n"));
    }
    let signal = scratch("c.csv", &csv);
    let o = fliess(&["eval-ct", "x1", signal.to_str().unwrap(), "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let y: f64 = doc["final"][0].as_str().unwrap().parse().unwrap();
    assert!((y - 1.0).abs() < 1e-9);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(fliess(&["nonsense"]).status.code(), Some(2));
    assert_eq!(fliess(&["qshuffle", "x1", "x1", "--theta", "2"]).status.code(), Some(2));
    assert_eq!(fliess(&["verify", "nosuch"]).status.code(), Some(2));
    assert_eq!(fliess(&["shuffle", "x1 +", "x2"]).status.code(), Some(2));
}

#[test]
fn degree_cap_is_enforced() {
    let o = Command::new(env!("CARGO_BIN_EXE_fliess"))
        .args(["shuffle", "x1", "x2", "--degree", "9"])
        .env("FLIESS_DEGREE_CAP", "8,6")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}
