use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_eulerforge"));
    c.env_remove("EULERFORGE_PRECISION_BITS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate(dir: &Path, theorem: &str, degree: u32) -> PathBuf {
    let path = dir.join(format!("{theorem}.json"));
    let o = run(&[
        "generate",
        "--theorem",
        theorem,
        "--degree",
        &degree.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn load(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn find<'a>(catalog: &'a Value, id: &str) -> &'a Value {
    catalog["identities"]
        .as_array()
        .unwrap()
        .iter()
        .find(|i| i["id"] == id)
        .unwrap_or_else(|| panic!("{id} missing"))
}

#[test]
fn generate_prints_known_right_sides() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "generate",
        "--theorem",
        "gauss",
        "--degree",
        "3",
        "--out",
        dir.path().join("g.json").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.lines()
            .any(|l| l.starts_with("gauss:a1b1 ") && l.ends_with("=  π²/4")),
        "{text}"
    );

    let b = generate(dir.path(), "bailey", 2);
    let ac = find(&load(&b), "bailey:a1c1").clone();
    assert_eq!(ac["weight"], "W2");
    let o = run(&["export", b.to_str().unwrap()]);
    assert!(stdout(&o).contains("\\frac{H_k}{k\\,2^k} = \\frac{\\pi^2}{12}"));
}

#[test]
fn generate_all_at_degree_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "all", 1);
    let ids: Vec<String> = load(&path)["identities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["id"].as_str().unwrap().to_string())
        .collect();
    assert!(!ids.is_empty());
    assert!(
        ids.iter()
            .all(|id| id.ends_with(":b1") || id.ends_with(":a1")),
        "{ids:?}"
    );
}

#[test]
fn verify_clean_and_corrupted_catalogs() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "bailey", 2);
    let report = dir.path().join("report.json");
    let o = run(&[
        "verify",
        path.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let records = load(&report);
    assert!(records
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["verdict"] == "pass"));

    // ln 2 -> 2 ln 2 on the first identity
    let mut cat = load(&path);
    cat["identities"][0]["rhs"][0]["coefficient"] = "2".into();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&cat).unwrap()).unwrap();
    let o = run(&[
        "verify",
        bad.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let records = load(&report);
    let r = &records[0];
    assert_eq!(r["id"], "bailey:a1");
    assert_eq!(r["verdict"], "fail");
    assert!(r["abs_diff"]
        .as_str()
        .unwrap()
        .starts_with("0.69314718055994530941"));
    assert!(stdout(&o).contains("fail 1"));
}

#[test]
fn verify_gauss_defaults_and_update() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "gauss", 2);
    let o = run(&["verify", path.to_str().unwrap(), "--update"]);
    assert_eq!(o.status.code(), Some(0));
    let cat = load(&path);
    assert_eq!(find(&cat, "gauss:a1b1")["status"]["state"], "verified");
    assert_eq!(
        cat["reports"].as_array().unwrap().len(),
        cat["identities"].as_array().unwrap().len()
    );
}

#[test]
fn verify_empty_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    fs::write(&path, r#"{"format_version": 1, "identities": []}"#).unwrap();
    let report = dir.path().join("r.json");
    let o = run(&[
        "verify",
        path.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(load(&report), Value::Array(vec![]));
}

#[test]
fn precision_env_and_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "bailey", 1);
    let o = bin()
        .args(["verify", path.to_str().unwrap()])
        .env("EULERFORGE_PRECISION_BITS", "32")
        .output()
        .unwrap();
    // every identity is rejected by the precision check
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precision 32 bits"));

    let missing = run(&["verify", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "not json").unwrap();
    assert_eq!(
        run(&["export", garbage.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["generate", "--theorem", "euler", "--degree", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn combine_appends_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "gauss", 3);
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"parents": {"gauss:a1b1c1": "1", "gauss:a1b2": "-1"}, "simplify": true}"#,
    )
    .unwrap();
    let out = dir.path().join("combined.json");
    let o = run(&[
        "combine",
        "--spec",
        spec.to_str().unwrap(),
        "--catalog",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let before = load(&path)["identities"].as_array().unwrap().len();
    let cat = load(&out);
    let ids = cat["identities"].as_array().unwrap();
    assert_eq!(ids.len(), before + 1);
    let last = ids.last().unwrap();
    assert_eq!(last["provenance"]["kind"], "combination");
    assert_eq!(last["denom_exponent"], 2);
    let latex = stdout(&run(&["export", out.to_str().unwrap()]));
    assert!(latex.contains("% combination of (1) gauss:a1b1c1 + (-1) gauss:a1b2"));

    // unknown parent
    fs::write(&spec, r#"{"parents": {"gauss:zz": "1"}}"#).unwrap();
    let o = run(&[
        "combine",
        "--spec",
        spec.to_str().unwrap(),
        "--catalog",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "watson", 3);
    let exported = dir.path().join("exported.json");
    let o = run(&[
        "export",
        path.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        exported.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(
        fs::read_to_string(&path).unwrap(),
        fs::read_to_string(&exported).unwrap()
    );
    let plain = stdout(&run(&[
        "export",
        path.to_str().unwrap(),
        "--pi-form",
        "false",
    ]));
    assert!(plain.contains("\\zeta(2)"));
    assert!(!plain.contains("\\pi"));
}

#[test]
fn corpus_check_and_printed_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("printed.json");
    let o = run(&["corpus", "--check", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("7 allowlisted, 0 mismatched"));
    let cat = load(&path);
    assert_eq!(
        find(&cat, "printed:gauss:a1b1")["provenance"]["kind"],
        "printed"
    );
    assert_eq!(run(&["corpus"]).status.code(), Some(2));
}

#[test]
fn printed_typo_is_reported_not_failed() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "wang", 3);
    let report = dir.path().join("r.json");
    let o = run(&[
        "verify",
        path.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("discrepancy wang:b2d1"), "{text}");
    let records = load(&report);
    let printed = records
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["id"] == "printed:wang:b2d1")
        .unwrap();
    assert_eq!(printed["verdict"], "fail");
    let derived = records
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["id"] == "derived:wang:b2d1")
        .unwrap();
    assert_eq!(derived["verdict"], "pass");
}
