//! End-to-end checks of the command-line interface.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_siglab"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .args(["--out-dir", dir.to_str().unwrap()])
        .output()
        .expect("spawn siglab")
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn signature_of_constant_paths_is_unit() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "paths.csv",
        "path,t,x1,x2\n0,0.0,1.5,2.0\n0,0.5,1.5,2.0\n0,1.0,1.5,2.0\n1,0.0,0.0,0.0\n1,1.0,1.0,1.0\n",
    );
    let out = run_in(
        dir.path(),
        &[
            "signature",
            "--input",
            input.to_str().unwrap(),
            "--convention",
            "ito",
            "--order",
            "4",
        ],
    );
    assert!(out.status.success(), "{:?}", out);
    let text = fs::read_to_string(dir.path().join("signature.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    // 31 quoted word labels for d = 2, K = 4, plus the path id column.
    assert_eq!(header.matches('"').count(), 62);
    let row0: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row0.len(), 32);
    assert_eq!(row0[1], "1e0");
    for v in &row0[2..] {
        assert_eq!(*v, "0e0");
    }
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn signature_conventions_share_first_order_columns() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "paths.csv",
        "t,x1,x2\n0.0,0.0,0.0\n0.25,0.3,-0.2\n0.5,0.1,0.4\n1.0,-0.4,0.9\n",
    );
    for conv in ["ito", "stratonovich"] {
        let sub = dir.path().join(conv);
        fs::create_dir_all(&sub).unwrap();
        let out = run_in(
            &sub,
            &[
                "signature",
                "--input",
                input.to_str().unwrap(),
                "--convention",
                conv,
                "--order",
                "3",
            ],
        );
        assert!(out.status.success());
    }
    let read_row = |conv: &str| -> Vec<String> {
        let text = fs::read_to_string(dir.path().join(conv).join("signature.csv")).unwrap();
        text.lines().nth(1).unwrap().split(',').map(str::to_string).collect()
    };
    let ito = read_row("ito");
    let strat = read_row("stratonovich");
    // Columns 2..=3 hold the order-1 components.
    assert_eq!(ito[2], strat[2]);
    assert_eq!(ito[3], strat[3]);
}

#[test]
fn malformed_csv_reports_line_number_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.csv", "t,x1\n0.0,1.0\noops,2.0\n");
    let out = run_in(
        dir.path(),
        &[
            "signature",
            "--input",
            input.to_str().unwrap(),
            "--convention",
            "ito",
            "--order",
            "2",
        ],
    );
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "stderr: {}", err);
    let parsed: serde_json::Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    assert!(parsed["error"].is_string());
}

#[test]
fn simulate_is_reproducible_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "sim.toml",
        "n_paths = 2\n[process]\nkind = \"ou\"\nkappas = [1.0]\nd = 2\nrho = 0.3\nt_end = 1.0\nsteps = 50\n",
    );
    let a_dir = dir.path().join("a");
    let b_dir = dir.path().join("b");
    for d in [&a_dir, &b_dir] {
        fs::create_dir_all(d).unwrap();
        let out = run_in(
            d,
            &["simulate", "--config", config.to_str().unwrap(), "--seed", "7"],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(a_dir.join("paths.csv")).unwrap();
    let b = fs::read(b_dir.join("paths.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn corr_identity_for_uncorrelated_ito_bm() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "corr.toml",
        "convention = \"ito\"\nmax_order = 3\nmethod = \"analytic\"\n[process]\nkind = \"brownian\"\nd = 2\nrho = 0.0\n",
    );
    let out = run_in(dir.path(), &["corr", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("corr.json")).unwrap()).unwrap();
    let values = json["values"].as_array().unwrap();
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.as_array().unwrap().iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert_eq!(v.as_f64().unwrap(), expect);
        }
    }
    assert!(dir.path().join("corr_long.csv").exists());
}

#[test]
fn irrep_reproduces_the_failing_example() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "irrep.toml",
        r#"active = [[1], [2], [1, 1], [1, 2], [2, 1], [2, 2]]
signs = [1, 1, 1, 1, 1, -1]

[corr]
convention = "stratonovich"
max_order = 4
method = "analytic"

[corr.process]
kind = "brownian"
d = 2
rho = 0.0
"#,
    );
    let out = run_in(dir.path(), &["irrep", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("irrep.json")).unwrap()).unwrap();
    assert_eq!(json["verdict"], "FAIL");
    let norm = json["condition_i_norm"].as_f64().unwrap();
    assert!((norm - 1.01).abs() < 0.01, "norm = {}", norm);
}

#[test]
fn bounds_sufficient_value() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "bounds.toml",
        "theorem = \"ito\"\nrho = 0.1\nsigma_noise = 0.01\nq_max = 3\np = 31\nn_samples = 1000.0\nlambda_n = 0.1\n",
    );
    let out = run_in(dir.path(), &["bounds", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("bounds.json")).unwrap())
            .unwrap();
    assert_eq!(json["sufficient_bound"].as_f64().unwrap(), 0.2);
    assert!(json["p_min"].is_number());
}

#[test]
fn consistency_rate_is_thread_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "cons.toml",
        "kind = { kind = \"brownian\" }\nd = 2\nrho = 0.0\nconvention = \"ito\"\nmax_order = 3\nq = 2\nn_train = 40\nreps = 12\nbatches = 3\nseed = 5\n",
    );
    let run_with = |threads: &str, sub: &str| -> serde_json::Value {
        let d = dir.path().join(sub);
        fs::create_dir_all(&d).unwrap();
        let out = run_in(
            &d,
            &[
                "consistency",
                "--config",
                config.to_str().unwrap(),
                "--threads",
                threads,
            ],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        serde_json::from_str(&fs::read_to_string(d.join("consistency.json")).unwrap()).unwrap()
    };
    let one = run_with("1", "one");
    let two = run_with("2", "two");
    assert_eq!(one["summary"]["rate"], two["summary"]["rate"]);
    assert_eq!(one["summary"]["batch_rates"], two["summary"]["batch_rates"]);
}

#[test]
fn schema_violation_exits_nonzero_with_json_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "bad.toml", "convention = \"ito\"\n");
    let out = run_in(dir.path(), &["corr", "--config", config.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    let parsed: serde_json::Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    let msg = parsed["error"].as_str().unwrap();
    assert!(msg.contains("process"), "error message: {}", msg);
    // No partial outputs left behind.
    assert!(!dir.path().join("corr.csv").exists());
    assert!(!dir.path().join("corr.json").exists());
}

#[test]
fn shipped_example_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let text = fs::read_to_string(&path).unwrap();
        let parsed: std::result::Result<toml::Value, _> = toml::from_str(&text);
        assert!(parsed.is_ok(), "unparseable config {}", path.display());
    }
}
