use std::fs;
use std::path::Path;
use std::process::Command;

use vbq_cli::{dispatch, exit};

fn write_config(dir: &Path, n: usize, extra: &str) -> std::path::PathBuf {
    let path = dir.join("case.toml");
    fs::write(
        &path,
        format!(
            r#"
[grid]
n = {n}

[params]
epsilon = 1.0

[time]
mode = "fixed"
dt = 0.01
t_end = 0.1

[initial]
family = "random_bandlimited"
kmax = 3
decay = 5.0
seed = 11

[output]
every_steps = 5
{extra}
"#
        ),
    )
    .unwrap();
    path
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["vbq"];
    argv.extend_from_slice(args);
    let code = dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn info_echoes_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 32, "");
    let (code, out, _) = call(&["info", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, exit::OK);
    for needle in ["N=32", "epsilon=1", "alpha=1", "beta=1", "dt=1e-2", "dealias_cutoff=10"] {
        assert!(out.contains(needle), "missing {needle} in {out}");
    }
}

#[test]
fn oracle_check_passes() {
    let (code, out, _) = call(&["oracle-check"]);
    assert_eq!(code, exit::OK, "{out}");
    assert!(out.contains("cases=50"));
}

#[test]
fn odd_grid_is_a_config_error_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 31, "");
    let out_dir = dir.path().join("out");
    let (code, _, err) = call(&["run", "--config", cfg.to_str().unwrap(), "--output", out_dir.to_str().unwrap()]);
    assert_eq!(code, exit::CONFIG);
    assert!(err.starts_with("error class=config key=grid.n"), "{err}");
    assert_eq!(err.lines().count(), 1);
    assert!(!out_dir.exists());
}

#[test]
fn unknown_key_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 32, "colour = \"red\"");
    let (code, _, err) = call(&["info", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, exit::CONFIG);
    assert!(err.contains("colour"), "{err}");
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let (code, _, err) = call(&["frobnicate"]);
    assert_eq!(code, exit::USAGE);
    assert!(err.starts_with("error class=usage"));
}

#[test]
fn missing_config_file_is_config_error() {
    let (code, _, err) = call(&["info", "--config", "/nonexistent/case.toml"]);
    assert_eq!(code, exit::CONFIG, "{err}");
    assert!(err.contains("key=--config"));
}

#[test]
fn run_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 16, "");
    let a = dir.path().join("a");
    let (code, out, err) = call(&["run", "--config", cfg.to_str().unwrap(), "--output", a.to_str().unwrap()]);
    assert_eq!(code, exit::OK, "{err}");
    assert!(out.starts_with("run complete t=0.1"));
    assert_eq!(fs::read_to_string(a.join("diagnostics.ndjson")).unwrap().lines().count(), 3);

    let longer = fs::read_to_string(&cfg).unwrap().replace("t_end = 0.1", "t_end = 0.2");
    let cfg2 = dir.path().join("longer.toml");
    fs::write(&cfg2, longer).unwrap();
    let b = dir.path().join("b");
    let ckpt = a.join("checkpoint.bin");
    let (code, out, err) = call(&[
        "run",
        "--config",
        cfg2.to_str().unwrap(),
        "--output",
        b.to_str().unwrap(),
        "--resume",
        ckpt.to_str().unwrap(),
    ]);
    assert_eq!(code, exit::OK, "{err}");
    assert!(out.starts_with("run complete t=0.2"));
}

#[test]
fn corrupt_checkpoint_is_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 16, "");
    let bad = dir.path().join("bad.bin");
    fs::write(&bad, b"NOTACHECKPOINT__________________").unwrap();
    let (code, _, err) = call(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        dir.path().join("o").to_str().unwrap(),
        "--resume",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code, exit::FORMAT, "{err}");
}

#[test]
fn seed_override_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 16, "");
    let run = |seed: &str, name: &str| {
        let o = dir.path().join(name);
        let (code, _, err) = call(&["run", "--config", cfg.to_str().unwrap(), "--output", o.to_str().unwrap(), "--seed", seed]);
        assert_eq!(code, exit::OK, "{err}");
        fs::read(o.join("diagnostics.ndjson")).unwrap()
    };
    let a = run("5", "a");
    let b = run("5", "b");
    let c = run("6", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn sweep_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 16, "\n[sweep]\nepsilons = [0.2, 0.1, 0.05]");
    let o = dir.path().join("sweep");
    let (code, out, err) = call(&["sweep", "--config", cfg.to_str().unwrap(), "--output", o.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(code, exit::OK, "{err}");
    assert!(out.contains("mean_rate="));
    let text = fs::read_to_string(o.join("sweep.ndjson")).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().last().unwrap().contains("\"kind\":\"summary\""));
}

#[test]
fn sweep_rejects_cfl_mode() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 16, "");
    let text = fs::read_to_string(&cfg).unwrap().replace("mode = \"fixed\"", "mode = \"cfl\"");
    fs::write(&cfg, text).unwrap();
    let (code, _, err) = call(&["sweep", "--config", cfg.to_str().unwrap(), "--output", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code, exit::CONFIG);
    assert!(err.contains("key=time.mode"));
}

#[test]
fn regimes_writes_one_line_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 16, "\n[regimes]\ncells = [[1.0, 1.0], [1.0, 0.5]]");
    let o = dir.path().join("reg");
    let (code, out, err) = call(&["regimes", "--config", cfg.to_str().unwrap(), "--output", o.to_str().unwrap()]);
    assert_eq!(code, exit::OK, "{err}");
    assert!(out.contains("label=proven") && out.contains("label=conjectural"));
    assert_eq!(fs::read_to_string(o.join("regimes.ndjson")).unwrap().lines().count(), 2);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_vbq");
    let status = Command::new(bin).arg("oracle-check").arg("--cases").arg("3").output().unwrap();
    assert_eq!(status.status.code(), Some(exit::OK));
    let status = Command::new(bin).arg("info").output().unwrap();
    assert_eq!(status.status.code(), Some(exit::USAGE));
    let status = Command::new(bin).args(["oracle-check", "--n", "64"]).output().unwrap();
    assert_eq!(status.status.code(), Some(exit::PRECONDITION));
}
