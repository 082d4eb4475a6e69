use std::path::Path;
use std::process::{Command, Output};

use alexdb_core::demo;
use alexdb_core::storage::load;
use alexdb_core::versioning::reconstruct_version;

fn alexdb(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alexdb"))
        .current_dir(dir)
        .args(args)
        .env_remove("ALEXDB_SIZE_GUARD")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stores() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let o = alexdb(dir.path(), &["demo", "."]);
    assert!(o.status.success());
    dir
}

#[test]
fn validate_clean_and_broken() {
    let d = stores();
    let ok = alexdb(d.path(), &["validate", "demo"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok).trim(), "ok");
    let bad = alexdb(d.path(), &["validate", "broken"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("not continuous at (B, c1)"));
    let csv = alexdb(d.path(), &["--format", "csv", "validate", "broken"]);
    assert!(stdout(&csv).starts_with("rule,detail\nCFK,"));
}

#[test]
fn merge_reports_the_linear_dag_conflict() {
    let d = stores();
    let o = alexdb(d.path(), &["merge", "help", "halo", "--rule", "linear-dag"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("space: 6 elements, 6 pairs"));
    assert!(out.contains("consistency linear-dag"));
    let unknown = alexdb(d.path(), &["merge", "help", "halo", "--rule", "spelling"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn reconstruct_writes_the_version() {
    let d = stores();
    let o = alexdb(
        d.path(),
        &["reconstruct", "textstore", "--version", "v1", "--out", "v1"],
    );
    assert_eq!(o.status.code(), Some(0));
    let written = load(d.path().join("v1")).unwrap();
    let space = reconstruct_version(&written, "v1").unwrap();
    assert_eq!(demo::read_text(&space).unwrap(), "help");
    let expected = reconstruct_version(&demo::text_store(), "v1").unwrap();
    assert_eq!(
        (space.id_set(), space.relation()),
        (expected.id_set(), expected.relation())
    );
    // two heads and no version
    assert_eq!(alexdb(d.path(), &["reconstruct", "textstore"]).status.code(), Some(2));
}

#[test]
fn queries() {
    let d = stores();
    let run = |args: &[&str]| stdout(&alexdb(d.path(), args)).trim().to_string();
    assert_eq!(run(&["dim", "f2"]), "3");
    assert!(run(&["slice", "lineland", "--t", "0.5"]).starts_with("space: 3 elements"));
    assert_eq!(run(&["path", "demo", "A", "A", "--region", "A"]), "Yes");
    assert_eq!(run(&["path", "demo", "A", "B", "--region", "A,B"]), "No");
    assert_eq!(run(&["versions-with-path", "textstore", "1", "5"]), "{v0, v2}");
    assert_eq!(
        run(&["versions-with-path", "textstore", "1", "5", "--monotone"]),
        "{v0, v2}"
    );
    assert!(run(&["telescope", "demo"]).starts_with("space: 36 elements"));
    assert!(run(&["telescope", "demo", "--join", "vertex-only"]).starts_with("space: 22 elements"));
}

#[test]
fn eval_and_bindings() {
    let d = stores();
    let o = alexdb(d.path(), &["eval", "--store", ".", "dim(load(\"f2\"))"]);
    assert_eq!(stdout(&o).trim(), "3");
    let o = alexdb(
        d.path(),
        &[
            "eval",
            "--bind",
            "R={A, B, e1}",
            "path(load(\"demo\"), A, B, region=@R)",
        ],
    );
    assert_eq!(stdout(&o).trim(), "Yes");
    let o = alexdb(d.path(), &["eval", "--format", "csv", "closure(load(\"f1\"), {e})"]);
    assert_eq!(stdout(&o), "id\ne\nu\nv\n");
}

#[test]
fn export_round_trips() {
    let d = stores();
    assert!(alexdb(d.path(), &["export", "textstore", "--out", "copy"])
        .status
        .success());
    assert_eq!(load(d.path().join("copy")).unwrap(), demo::text_store());
    assert_eq!(alexdb(d.path(), &["export", "textstore"]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let d = stores();
    let code = |args: &[&str]| alexdb(d.path(), args).status.code();
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["eval", "dim(load(\"f2\")"]), Some(2));
    assert_eq!(code(&["eval", "dim(3)"]), Some(2));
    assert_eq!(code(&["dim", "nowhere"]), Some(1));
    assert_eq!(code(&["path", "demo", "A", "B", "--region", "A"]), Some(1));
    let o = alexdb(d.path(), &["eval", "dim(load(\"f2\")"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error at 14"));
}

#[test]
fn size_guard_from_the_environment() {
    let d = stores();
    let run = |guard: &str| {
        Command::new(env!("CARGO_BIN_EXE_alexdb"))
            .current_dir(d.path())
            .args(["eval", "check(gen(load(\"demo\")))"])
            .env("ALEXDB_SIZE_GUARD", guard)
            .output()
            .unwrap()
    };
    assert!(stdout(&run("2")).contains("monotonicity unchecked"));
    assert!(stdout(&run("100")).contains(", monotonic"));
    assert_eq!(run("lots").status.code(), Some(2));
}
