use std::process::{Command, Output};

fn curvint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn verify_args<'a>(out: &'a str, seed: &'a str) -> Vec<&'a str> {
    vec![
        "verify",
        "--dim",
        "3",
        "--k1",
        "1",
        "--k2",
        "-1",
        "--prop",
        "all",
        "--samples",
        "20",
        "--seed",
        seed,
        "--out",
        out,
    ]
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    assert!(curvint(&verify_args(a, "42")).status.success());
    assert!(curvint(&verify_args(b, "42")).status.success());
    let (ja, jb) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(ja, jb);

    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["spec"]["dim"], 3);
    assert_eq!(v["overall_pass"], true);
    assert_eq!(v["system"], "all");
    let check = &v["checks"][0];
    for key in [
        "id",
        "proposition",
        "paper_ref",
        "points",
        "skipped",
        "max_normalized_residual",
        "rank",
        "pass",
        "seed",
    ] {
        assert!(check.get(key).is_some(), "missing {key}");
    }
    assert_eq!(check["seed"], 42);
}

#[test]
fn exit_code_follows_overall_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let out = out.to_str().unwrap();
    let args = [
        "verify",
        "--dim",
        "3",
        "--k1",
        "1",
        "--k2",
        "-1",
        "--prop",
        "1",
        "--samples",
        "10",
        "--tol",
        "1e-300",
        "--out",
        out,
    ];
    let run = curvint(&args);
    assert_eq!(run.status.code(), Some(1));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["overall_pass"], false);

    let run = curvint(&[
        "verify", "--dim", "2", "--k1", "0", "--k2", "1", "--prop", "2", "--out", out,
    ]);
    assert_eq!(run.status.code(), Some(0));
}

#[test]
fn system_filter_rejects_mismatched_proposition() {
    let run = curvint(&[
        "verify", "--dim", "2", "--k1", "0", "--k2", "1", "--prop", "4", "--system", "kc",
    ]);
    assert!(!run.status.success());
    let run = curvint(&[
        "verify", "--dim", "2", "--k1", "0", "--k2", "1", "--system", "sw",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(v["system"], "sw");
}

#[test]
fn simulate_writes_full_precision_csv() {
    let run = curvint(&[
        "simulate",
        "--dim",
        "3",
        "--k1",
        "-1",
        "--k2",
        "1",
        "--system",
        "sw",
        "--beta0",
        "0.2",
        "--beta",
        "0.01,0.01,0.01",
        "--q0",
        "0.7,0.7,1.0",
        "--p0",
        "0.05,0.05,-0.02",
        "--dt",
        "1e-3",
        "--steps",
        "20",
        "--stride",
        "5",
    ]);
    assert!(run.status.success());
    let text = String::from_utf8(run.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,r,theta,phi3,p_r,p_theta,p_phi3,H,Q^(2),Q^(3),Q_(2),I01,I02,I03"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first.len(), 14);
    // 17 significant digits: d.dddddddddddddddde±x
    let mantissa = first[1].split('e').next().unwrap();
    assert_eq!(mantissa.replace(['.', '-'], "").len(), 17);
    assert_eq!(first[1].parse::<f64>().unwrap(), 0.7);
}

#[test]
fn simulate_reports_singularity_with_partial_output() {
    let run = curvint(&[
        "simulate", "--dim", "2", "--k1", "0", "--k2", "1", "--system", "free", "--q0", "0.01,0.5",
        "--p0", "-1,0", "--steps", "100", "--method", "rk4",
    ]);
    assert_eq!(run.status.code(), Some(1));
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.lines().count() > 2);
    assert!(String::from_utf8(run.stderr)
        .unwrap()
        .contains("singularity"));
}

#[test]
fn brackets_certificate_and_golden() {
    let dir = tempfile::tempdir().unwrap();
    let golden = dir.path().join("g.txt");
    let run = curvint(&[
        "brackets",
        "--exact",
        "--dim",
        "4",
        "--golden",
        golden.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let v: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(v["overall_pass"], true);
    let text = std::fs::read_to_string(golden).unwrap();
    assert!(text.contains("# dim=4 pairs_checked=45 failures=0"));
}

#[test]
fn map_prints_ambient_point() {
    let run = curvint(&[
        "map",
        "--dim",
        "2",
        "--k1",
        "0",
        "--k2",
        "1",
        "--coords",
        "2,0",
        "--with-momenta",
        "1,0",
    ]);
    assert!(run.status.success());
    let v: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    let x: Vec<f64> = serde_json::from_value(v["ambient"].clone()).unwrap();
    assert_eq!(x, vec![1.0, 2.0, 0.0]);
    assert!(v["ambient_momenta"].is_array());
}
