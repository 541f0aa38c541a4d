//! CLI contracts: byte-stable outputs, CSV shapes, validation exit codes.

use std::path::PathBuf;
use std::process::Command;

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("accredia-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> (Option<i32>, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_accredia"))
        .args(args)
        .output()
        .expect("binary launches");
    (
        output.status.code(),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

const ACCREDIT_CONFIG: &str = r#"{
    "hamiltonian": [{"coeff": 1.0, "pauli": "ZZ"}],
    "t": 1.0, "eps": 0.05, "theta": 0.1, "alpha": 0.9,
    "seed": 3, "parallelism": 2
}"#;

#[test]
fn identical_config_and_seed_give_byte_identical_json() {
    let dir = scratch_dir("determinism");
    let config = dir.join("cfg.json");
    std::fs::write(&config, ACCREDIT_CONFIG).unwrap();

    for sub in ["a", "b"] {
        let (code, _, err) = run(&[
            "accredit",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.join(sub).to_str().unwrap(),
            "--no-timestamp",
        ]);
        assert_eq!(code, Some(0), "{err}");
    }
    let a = std::fs::read(dir.join("a/accredit_result.json")).unwrap();
    let b = std::fs::read(dir.join("b/accredit_result.json")).unwrap();
    assert_eq!(a, b);

    // A different seed on the command line overrides the file and changes
    // the output.
    let (code, _, _) = run(&[
        "accredit",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.join("c").to_str().unwrap(),
        "--no-timestamp",
        "--seed",
        "4",
    ]);
    assert_eq!(code, Some(0));
    let c = std::fs::read(dir.join("c/accredit_result.json")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn csvs_have_headers_and_one_record_per_point() {
    let dir = scratch_dir("csv");
    let config = dir.join("cfg.json");
    std::fs::write(&config, ACCREDIT_CONFIG).unwrap();
    let (code, _, err) = run(&[
        "accredit",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, Some(0), "{err}");

    let summary = std::fs::read_to_string(dir.join("accredit_summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "run,epsilon_vd,true_nu");
    assert_eq!(lines.len(), 2);

    let executions = std::fs::read_to_string(dir.join("executions.csv")).unwrap();
    let lines: Vec<&str> = executions.lines().collect();
    assert_eq!(lines[0], "execution_id,kind,position,outcome,passed");
    // 601 traps + 1 target shot.
    assert_eq!(lines.len(), 1 + 602);

    let bench_config = dir.join("bench.json");
    std::fs::write(
        &bench_config,
        r#"{"hamiltonian": [{"coeff": 1.0, "pauli": "ZZ"}], "t": 0.5, "m_values": [8, 16, 32]}"#,
    )
    .unwrap();
    let (code, _, err) = run(&[
        "invert-bench",
        "--config",
        bench_config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, Some(0), "{err}");
    let bench = std::fs::read_to_string(dir.join("invert_bench.csv")).unwrap();
    let lines: Vec<&str> = bench.lines().collect();
    assert_eq!(lines[0], "eps,m,choi_distance,diamond_lower,diamond_upper");
    assert_eq!(lines.len(), 4);
}

#[test]
fn validation_errors_name_the_field_and_exit_nonzero() {
    let dir = scratch_dir("validation");
    let config = dir.join("bad_theta.json");
    std::fs::write(
        &config,
        r#"{
            "hamiltonian": [{"coeff": 1.0, "pauli": "ZZ"}],
            "t": 1.0, "eps": 0.05, "theta": 1.5, "alpha": 0.9
        }"#,
    )
    .unwrap();
    let (code, _, err) = run(&[
        "accredit",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, Some(2), "{err}");
    assert!(err.contains("theta"), "{err}");

    // Unknown fields are rejected.
    let config = dir.join("unknown.json");
    std::fs::write(
        &config,
        r#"{
            "hamiltonian": [{"coeff": 1.0, "pauli": "ZZ"}],
            "t": 1.0, "eps": 0.05, "theta": 0.1, "alpha": 0.9,
            "typo_field": 1
        }"#,
    )
    .unwrap();
    let (code, _, err) = run(&[
        "accredit",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, Some(2), "{err}");
    assert!(err.contains("typo_field"), "{err}");

    // Capacity violations exit with their own code and name the limit.
    let word = "Z".repeat(12);
    let config = dir.join("too_big.json");
    std::fs::write(
        &config,
        format!(
            r#"{{"hamiltonian": [{{"coeff": 1.0, "pauli": "{word}"}}],
                 "t": 1.0, "eps": 0.05, "theta": 0.1, "alpha": 0.9}}"#
        ),
    )
    .unwrap();
    let (code, _, err) = run(&[
        "accredit",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, Some(3), "{err}");
    assert!(err.contains("limit"), "{err}");
}

#[test]
fn env_var_overrides_the_dense_limit() {
    let dir = scratch_dir("env");
    let config = dir.join("five_qubits.json");
    std::fs::write(
        &config,
        r#"{
            "hamiltonian": [{"coeff": 1.0, "pauli": "ZZZZZ"}],
            "t": 0.2, "eps": 0.05, "theta": 0.3, "alpha": 0.8
        }"#,
    )
    .unwrap();
    // Five qubits fit the default limit but not a lowered one.
    let output = Command::new(env!("CARGO_BIN_EXE_accredia"))
        .args([
            "accredit",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
        ])
        .env("ACCREDIA_MAX_QUBITS", "4")
        .output()
        .expect("binary launches");
    assert_eq!(output.status.code(), Some(3));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("limit is 4"), "{err}");
}

#[test]
fn twirl_check_reports_zero_for_zz() {
    let dir = scratch_dir("twirl");
    let file = dir.join("h.json");
    std::fs::write(&file, r#"[{"coeff": 1.0, "pauli": "ZZ"}]"#).unwrap();
    let (code, out, _) = run(&["twirl-check", "--hamiltonian", file.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    assert!(out.contains("residual = 0"), "{out}");

    let (code, out, _) = run(&[
        "twirl-check",
        "--hamiltonian",
        file.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code, Some(0));
    let value: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(value["residual"], 0.0);
    assert_eq!(value["group_order"], 2);
}

#[test]
fn trap_audit_emits_the_full_table() {
    let dir = scratch_dir("audit");
    let config = dir.join("audit.json");
    std::fs::write(
        &config,
        r#"{"hamiltonian": [{"coeff": 1.0, "pauli": "ZZ"}], "t": 1.0, "eps": 0.05}"#,
    )
    .unwrap();
    let (code, out, err) = run(&[
        "trap-audit",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, Some(0), "{err}");
    assert!(out.contains("minimum detection probability: 0.5"), "{out}");

    let table = std::fs::read_to_string(dir.join("trap_audit.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "error,detection_probability");
    assert_eq!(lines.len(), 16, "15 non-identity words plus the header");
}
