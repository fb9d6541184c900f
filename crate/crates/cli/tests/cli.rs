use std::path::PathBuf;
use std::process::{Command, Output};

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name)
}

fn dynscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynscope"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .unwrap()
}

fn last_line(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .last()
        .unwrap_or_default()
        .to_string()
}

#[test]
fn buggy_model_exits_one_with_counterexample() {
    let m = model("list_buggy.dal");
    let o = dynscope(&["check", m.to_str().unwrap(), "--scope", "3", "--unroll", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(last_line(&o).starts_with("COUNTEREXAMPLE"), "{}", last_line(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(!text.contains('\x1b'), "NO_COLOR output has escapes");
}

#[test]
fn fixed_model_exits_zero() {
    let m = model("list_fixed.dal");
    let o = dynscope(&["check", m.to_str().unwrap(), "--assert", "removeLastCorrect"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(last_line(&o).starts_with("VALID"));
}

#[test]
fn vacuity_warning_at_small_unroll() {
    let m = model("list_fixed.dal");
    let o = dynscope(&["check", m.to_str().unwrap(), "--unroll", "1"]);
    let all = format!(
        "{}{}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(all.contains("warning:") && all.contains("still iterate"), "{all}");
}

#[test]
fn missing_file_is_an_error() {
    let o = dynscope(&["check", "/nonexistent/model.dal"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(last_line(&o).starts_with("ERROR"));
}

#[test]
fn syntax_error_is_reported_with_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.dal");
    std::fs::write(
        &p,
        "sig A {}\nassertCorrectness t[x: A] { pre { x = } program { skip } post { true } }\n",
    )
    .unwrap();
    let o = dynscope(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(last_line(&o).starts_with("ERROR"));
    assert!(
        String::from_utf8_lossy(&o.stderr).contains(":2:"),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn bad_bounds_and_unknown_assertions_are_errors() {
    let m = model("list_buggy.dal");
    for extra in [
        &["--scope", "0"][..],
        &["--assert", "nosuch"],
        &["--bitwidth", "40"],
        &["--solver", "magic"],
    ] {
        let mut args = vec!["check", m.to_str().unwrap()];
        args.extend_from_slice(extra);
        let o = dynscope(&args);
        assert_eq!(o.status.code(), Some(2), "{extra:?}");
        assert!(last_line(&o).starts_with("ERROR"), "{extra:?}");
    }
}

#[test]
fn version_and_help() {
    let o = dynscope(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains(env!("CARGO_PKG_VERSION")));
    let o = dynscope(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn output_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let (t, c, s) = (
        dir.path().join("t.json"),
        dir.path().join("c.sexp"),
        dir.path().join("m.json"),
    );
    let m = model("list_buggy.dal");
    let o = dynscope(&[
        "check",
        m.to_str().unwrap(),
        "--trace-json",
        t.to_str().unwrap(),
        "--dump-circuit",
        c.to_str().unwrap(),
        "--dump-map",
        s.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let trace: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&t).unwrap()).unwrap();
    assert_eq!(trace["assertion"], "removeLastCorrect");
    assert!(!std::fs::read_to_string(&c).unwrap().is_empty());
    serde_json::from_str::<serde_json::Value>(&std::fs::read_to_string(&s).unwrap()).unwrap();
}

#[cfg(unix)]
fn script(dir: &std::path::Path, body: &str) -> PathBuf {
    use std::os::unix::fs::PermissionsExt;
    let p = dir.join("solver.sh");
    std::fs::write(&p, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&p, std::fs::Permissions::from_mode(0o755)).unwrap();
    p
}

#[cfg(unix)]
#[test]
fn external_solver_verdicts_are_used_and_models_rechecked() {
    let dir = tempfile::tempdir().unwrap();
    let m = model("list_fixed.dal");
    let unsat = script(dir.path(), "echo 's UNSATISFIABLE'; exit 20");
    let o = dynscope(&[
        "check",
        m.to_str().unwrap(),
        "--solver",
        &format!("dimacs:{}", unsat.display()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let bogus = script(dir.path(), "echo 's SATISFIABLE'; echo 'v 0'; exit 10");
    let o = dynscope(&[
        "check",
        m.to_str().unwrap(),
        "--solver",
        &format!("dimacs:{}", bogus.display()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(last_line(&o).starts_with("ERROR"));
}
