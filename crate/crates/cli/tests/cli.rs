use std::process::{Command, Output};

fn gwforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwforge"))
        .args(args)
        .env_remove("GWFORGE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = gwforge(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn solve_reports_exact_extinction() {
    let s = stdout(&["solve", "--dist", r#"{"pmf":{"0":"1/4","2":"3/4"}}"#]);
    assert!(s.contains("q=1/3"), "{s}");
    assert!(s.contains("m=3/2"), "{s}");
    assert!(s.trim_end().ends_with("super-critical"), "{s}");

    let s = stdout(&["solve", "--dist", "sub-binary", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["result"]["q"], "1");
    assert_eq!(v["result"]["verdict"], "sub-critical");
    assert_eq!(v["config"]["dist"]["dist"], "sub-binary");
}

#[test]
fn dwass_small_case() {
    let s = stdout(&["dwass", "--dist", "critical-binary", "--n", "3"]);
    assert_eq!(s.trim(), "n=3 lhs=1/8 rhs=1/8 OK");
}

#[test]
fn kesten_samples_are_reproducible() {
    let args = ["sample", "--kind", "kesten", "--h", "2", "--seed", "7", "--reps", "3"];
    let a = stdout(&args);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines.len(), 3);
    for l in &lines {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["spine"].as_array().unwrap().len(), 2);
    }
    assert_eq!(a, stdout(&args));
    let mut with_threads = args.to_vec();
    with_threads.extend(["--threads", "1"]);
    assert_eq!(a, stdout(&with_threads));
}

#[test]
fn exit_codes() {
    assert_eq!(gwforge(&["solve", "--dist", "no-such-law"]).status.code(), Some(2));
    assert_eq!(gwforge(&["dwass", "--n", "0"]).status.code(), Some(2));
    assert_eq!(gwforge(&["solve", "--bogus"]).status.code(), Some(2));
    assert_eq!(gwforge(&["kesten-stigum", "--dist", "critical-binary"]).status.code(), Some(2));
    let exhausted = gwforge(&[
        "sample", "--kind", "conditioned", "--functional", "size", "--window", "301", "--max-rejections", "5",
    ]);
    assert_eq!(exhausted.status.code(), Some(3));
    assert!(!exhausted.stderr.is_empty());
    let truncated = gwforge(&["sample", "--kind", "gw", "--dist", "super-binary", "--seed", "3", "--reps", "20", "--cap-size", "50"]);
    assert_eq!(truncated.status.code(), Some(3));
}

#[test]
fn csv_tables_carry_config() {
    let s = stdout(&["law", "--kind", "restriction", "--h", "1", "--dist", "critical-binary"]);
    let mut lines = s.lines();
    assert!(lines.next().unwrap().starts_with("# gwforge"));
    let config = lines.next().unwrap().strip_prefix("# config ").unwrap();
    let v: serde_json::Value = serde_json::from_str(config).unwrap();
    assert_eq!(v["command"], "law");
    assert_eq!(v["h"], 1);
    let rows: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    // r_1 of a critical binary tree is {∅} or the cherry, each with mass 1/2
    assert_eq!(rows, vec!["\"0\",1,2", "\"2 0 0\",1,2"]);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("gwforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ratio.csv");
    let p = path.to_str().unwrap();
    let out = stdout(&["ratio", "--functional", "size", "--ns", "1,3,5", "--n1", "1", "--step", "2", "--out", p]);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\n1,0.25,1/4,1\n"), "{text}");
    assert!(text.contains("\n3,0.5,1/2,1\n"), "{text}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn derived_laws() {
    let s = stdout(&["derive", "--dist", "super-binary", "--law", "conjugate", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["result"]["pmf"]["0"], "3/4");
    assert_eq!(v["result"]["pmf"]["2"], "1/4");

    let s = stdout(&["classify", "--dist", "sub-binary", "--set", "0"]);
    assert!(s.contains("theta_c=5/4"), "{s}");
    assert!(s.trim_end().ends_with(" generic"), "{s}");

    let s = stdout(&["tilt", "--dist", "sub-binary", "--set", "0", "--theta", "5/4"]);
    assert!(s.contains("\n0,0.5,1/2\n") && s.contains("\n2,0.5,1/2\n"), "{s}");
}

#[test]
fn experiments_run_end_to_end() {
    let s = stdout(&["converge", "--functional", "height", "--window", "1+,2+,3+", "--h", "1"]);
    let data: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 4, "{s}");

    let s = stdout(&["condense", "--dist", "sub-binary", "--reps", "2000", "--seed", "1"]);
    assert!(s.contains("depth,count,expected"));
    assert_eq!(s, stdout(&["condense", "--dist", "sub-binary", "--reps", "2000", "--seed", "1"]));

    let s = stdout(&["kesten-stigum", "--dist", "super-binary", "--n", "6", "--reps", "4000"]);
    assert!(s.trim_end().ends_with("CONSISTENT"), "{s}");

    let s = stdout(&["sample", "--kind", "process", "--dist", "super-binary", "--n", "3", "--reps", "2"]);
    assert!(s.contains("rep,n,z,w\n0,0,1,1\n"), "{s}");
}
