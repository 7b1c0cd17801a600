use std::path::Path;
use std::process::{Command, Output};

fn dqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn compile_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let mut full = vec!["compile"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &p]);
    let o = dqc(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

fn report(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).expect("report is JSON")
}

#[test]
fn compile_prints_expected_tallies() {
    let cases: [(&[&str], &str); 3] = [
        (&["--gate", "gcz", "--n", "6", "--nodes", "3", "--strategy", "fanout"], "tally: 2 ghz(3), 2 ep"),
        (&["--gate", "gms", "--n", "4", "--theta", "pi/2", "--strategy", "pairwise"], "tally: 12 ep"),
        (&["--gate", "gcz", "--n", "4", "--nodes", "2", "--qudit"], "tally: 1 ep_d(4)"),
    ];
    let dir = tempfile::tempdir().unwrap();
    for (args, expected) in cases {
        let mut full = vec!["compile"];
        full.extend_from_slice(args);
        let out = dir.path().join("c.json");
        full.extend_from_slice(&["--out", out.to_str().unwrap()]);
        let o = dqc(&full);
        assert!(o.status.success());
        assert_eq!(stdout(&o).lines().next().unwrap(), expected);
        let text = std::fs::read_to_string(&out).unwrap();
        let c = dqc_core::DistCircuit::from_json(&text).unwrap();
        assert!(dqc_core::validate(&c).is_empty());
    }
}

#[test]
fn compiled_fanout_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let rz = ["--target-gate", "rz", "--theta", "pi/5"];
    // All targets remote, then two qubits per node so the control has a local target.
    let shapes: [&[&str]; 2] = [&["--n", "4"], &["--n", "6", "--nodes", "3"]];
    for (i, shape) in shapes.into_iter().enumerate() {
        let mut args = vec!["--gate", "fanout"];
        args.extend_from_slice(shape);
        args.extend_from_slice(&rz);
        let p = compile_to(dir.path(), &format!("f{i}.json"), &args);
        let mut v = vec!["verify", "--circuit", &p, "--oracle", "fanout", "--inputs", "basis+random:5"];
        v.extend_from_slice(&rz);
        let o = dqc(&v);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        let r = report(&o);
        assert_eq!(r["passed"], true);
        assert_eq!(r["seed"], 20_240_917);
        assert_eq!(r["inputs"], (1u64 << shape[1].parse::<u32>().unwrap()) + 5);
    }
}

#[test]
fn dcnot_basis_inputs_cover_four_branches_each() {
    let dir = tempfile::tempdir().unwrap();
    let p = compile_to(dir.path(), "d.json", &["--gate", "fanout", "--n", "2"]);
    let o = dqc(&["verify", "--circuit", &p, "--oracle", "fanout", "--inputs", "basis"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r["inputs"], 4);
    assert_eq!(r["branches"], 16);
}

#[test]
fn corrupted_circuit_exits_one_and_lists_failures() {
    let dir = tempfile::tempdir().unwrap();
    let p = compile_to(dir.path(), "d.json", &["--gate", "fanout", "--n", "2"]);
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let ins = v["instructions"].as_array_mut().unwrap();
    let last_cond = ins.iter().rposition(|i| i["kind"] == "CondGate").unwrap();
    ins.remove(last_cond);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();

    let bad = bad.to_str().unwrap();

    // The dropped correction is a Z on the control, a pure phase on every
    // basis input, so only superposed inputs expose it.
    let basis_only = dqc(&["verify", "--circuit", bad, "--oracle", "fanout", "--inputs", "basis"]);
    assert_eq!(basis_only.status.code(), Some(0));

    let o = dqc(&["verify", "--circuit", bad, "--oracle", "fanout", "--inputs", "basis+random:5"]);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&o);
    assert_eq!(r["passed"], false);
    let failures = r["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    assert!(failures.iter().all(|f| !f["outcomes"].as_array().unwrap().is_empty()));
}

#[test]
fn verification_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = compile_to(dir.path(), "g.json", &["--gate", "gms", "--n", "3", "--theta", "pi/3", "--strategy", "fanout"]);
    let args = ["verify", "--circuit", &p, "--oracle", "gms", "--theta", "pi/3", "--inputs", "random:4", "--seed", "7"];
    let a = dqc(&args);
    let b = dqc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dqc(&["compile", "--gate", "gcz", "--n", "5", "--nodes", "2"]).status.code(), Some(2));
    assert_eq!(dqc(&["compile", "--gate", "gcz", "--n", "6", "--nodes", "2", "--qudit"]).status.code(), Some(2));
    assert_eq!(dqc(&["compile", "--gate", "gms", "--n", "4", "--strategy", "bogus"]).status.code(), Some(2));
    assert_eq!(dqc(&["compile", "--gate", "gms", "--n", "4", "--theta", "pi/zero"]).status.code(), Some(2));
    assert_eq!(dqc(&["estimate", "--n", "5..3", "--nodes", "2"]).status.code(), Some(2));
    assert_eq!(dqc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dqc(&["verify", "--circuit", "/nonexistent.json", "--oracle", "gcz"]).status.code(), Some(2));
}

#[test]
fn register_cap_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let p = compile_to(dir.path(), "d.json", &["--gate", "fanout", "--n", "2"]);
    let o = Command::new(env!("CARGO_BIN_EXE_dqc"))
        .args(["verify", "--circuit", &p, "--oracle", "fanout"])
        .env("DQC_MAX_DIM", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"), "{}", String::from_utf8_lossy(&o.stderr));
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(|r| r.unwrap()).collect()
}

#[test]
fn estimate_rows() {
    let o = dqc(&["estimate", "--n", "6", "--nodes", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(&r[col("pairwise_ep")], "12");
    assert_eq!(&r[col("fanout_ghz")], "2");
    assert_eq!(&r[col("fanout_ghz_arities")], "3:2");
    assert_eq!(&r[col("fanout_ep")], "2");
    assert_eq!(&r[col("qudit_ghz")], "1");
    assert_eq!(&r[col("qudit_ep")], "1");
}

#[test]
fn estimate_pairwise_column_is_quadratic_and_gain_linear() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    let o = dqc(&["estimate", "--n", "4..12", "--per-node", "1", "--epsilon", "1.5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 9);
    let pw: Vec<i64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    let second: Vec<i64> = pw.windows(3).map(|w| w[2] - 2 * w[1] + w[0]).collect();
    assert!(second.iter().all(|d| *d == second[0]), "{second:?}");
    let gain: Vec<f64> = rows.iter().map(|r| r[16].parse().unwrap()).collect();
    for (i, g) in gain.iter().enumerate() {
        assert!((g - ((4 + i) as f64 - 1.5)).abs() < 1e-12);
    }
}

#[test]
fn identities_all_pass() {
    let o = dqc(&["identities"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["CZ4 = H4-conj CSUM4", "LMS conditional form", "H4·H4_dag = I"] {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap_or_else(|| panic!("{name} missing"));
        assert!(line.ends_with("PASS"), "{line}");
    }
}

#[test]
fn simulate_lists_branches_with_unit_total_probability() {
    let dir = tempfile::tempdir().unwrap();
    let p = compile_to(dir.path(), "q.json", &["--gate", "gcz", "--n", "4", "--nodes", "2", "--qudit"]);
    let o = dqc(&["simulate", "--circuit", &p, "--basis", "1111"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let branches = v.as_array().unwrap();
    let total: f64 = branches.iter().map(|b| b["probability"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);
    // GCZ on |1111> has six CZ pairs, so the phase is +1.
    for b in branches {
        let amps = b["amplitudes"].as_array().unwrap();
        assert_eq!(amps.len(), 1);
        assert_eq!(amps[0]["index"], 15);
        assert!((amps[0]["re"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
}
