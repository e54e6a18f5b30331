use std::io::Write;
use std::process::{Command, Output};

fn run_job(job: &str, config: &str, extra: &[&str]) -> Output {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(config.as_bytes()).unwrap();
    Command::new(env!("CARGO_BIN_EXE_hfb")).arg(job).arg("--config").arg(f.path()).args(extra).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn dims_job_reports_expected_dimensions() {
    let o = run_job("dims", r#"{"subcommand": "dims", "group": "sl(2)", "genus": 2, "n": 1}"#, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["dim_moduli_higgs"], 9);
    assert_eq!(v["result"]["hitchin_base_dim"], 5);
    assert_eq!(v["result"]["fiber_dim"], 4);
    assert_eq!(v["passed"], true);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["checks"].as_array().unwrap().iter().all(|c| !c["provenance"].as_str().unwrap().is_empty()));
}

#[test]
fn gaudin_job_brackets_are_zero() {
    let o = run_job("gaudin", r#"{"subcommand": "gaudin", "group": "sl(2)", "points": [1, 2, 4], "seed": 7}"#, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let table = v["result"]["commutativity"]["table"].as_array().unwrap();
    assert!(!table.is_empty());
    assert!(table.iter().flat_map(|r| r.as_array().unwrap()).all(|x| x == "0"));
    assert_eq!(v["seed"], 7);
}

#[test]
fn unbalanced_residues_exit_two() {
    let cfg = r#"{"subcommand": "defo", "group": "sl2", "points": [1, 2, 3],
                  "residues": [[[1, 0], [0, -1]], [[0, 1], [0, 0]], [[0, 0], [1, 0]]]}"#;
    let o = run_job("defo", cfg, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("holomorphy"), "{}", stderr(&o));
}

#[test]
fn malformed_config_names_the_field() {
    let o = run_job("dims", "{\"subcommand\": \"dims\",\n \"group\": \"sl2\",\n \"genus\": \"two\"}", &[]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("genus") && e.contains("line 3"), "{e}");
}

#[test]
fn mismatched_job_is_rejected() {
    let o = run_job("gaudin", r#"{"subcommand": "dims", "group": "sl2", "n": 1, "genus": 1}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let cfg = r#"{"subcommand": "spectral", "group": "gl(2)", "points": [1, 2, 4], "seed": 3}"#;
    let a = run_job("spectral", cfg, &[]);
    let b = run_job("spectral", cfg, &[]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let c = run_job("spectral", cfg, &["--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn grid_as_csv() {
    let cfg = r#"{"subcommand": "dims", "grid": {"groups": ["sl2", "gl3"], "genus": [1, 2], "n": [1, 2, 3]}}"#;
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let o = run_job("dims", cfg, &["--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 12);
    assert!(lines[0].starts_with("group,genus,n,dim_moduli_higgs"));
    assert!(lines[1].starts_with("sl(2),1,1,3,"));
}

#[test]
fn non_subalgebra_framing_exits_two() {
    // span{e, f} is not closed under the bracket
    let cfg = r#"{"subcommand": "defo", "group": "sl2", "points": [1, 2, 4],
                  "framing": [{"custom": [[[0, 1], [0, 0]], [[0, 0], [1, 0]]]}]}"#;
    let o = run_job("defo", cfg, &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
