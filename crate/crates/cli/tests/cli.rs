use std::path::Path;
use std::process::{Command, Output};

fn quiddity(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quiddity"))
        .env("QUIDDITY_CACHE_DIR", cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(cache: &Path, args: &[&str]) -> String {
    let o = quiddity(cache, args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

#[test]
fn documented_examples() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path();
    assert_eq!(ok(c, &["of", "8:1-3,5-7"]), "1,2,1,2,1,2,1,2\n");
    assert_eq!(ok(c, &["formula", "catalan", "0"]), "1\n");
    assert_eq!(ok(c, &["formula", "kirkman-cayley", "4", "2"]), "9\n");
    assert_eq!(
        ok(c, &["count", "--n", "8", "--m", "3", "--ell", "3"]),
        "36\n"
    );
    assert_eq!(
        ok(c, &["quiddities", "--n", "8", "--m", "3", "--ell", "3"]),
        "34\n"
    );
    assert_eq!(ok(c, &["cf", "eval", "1,2,1,1"]), "7/5\n");
    assert_eq!(ok(c, &["cf", "eval", "--hj", "2,2,3"]), "7/5\n");
    assert_eq!(
        ok(c, &["cf", "convert", "7/5"]),
        "rational 7/5\nregular 1,2,1,1\nhj 2,2,3\n"
    );
    assert_eq!(ok(c, &["modular", "classify", "1,1,1"]), "-Id\n");
    assert_eq!(ok(c, &["modular", "classify", "2,2"]), "neither\n");
    assert_eq!(ok(c, &["surgery", "canon", "8:1-7,3-5"]), "8:1-3,5-7\n");
    assert_eq!(
        ok(c, &["surgery", "apply", "8:1-3,5-7", "1-3,5-7"]),
        "8:1-7,3-5\n"
    );
}

#[test]
fn table_matches_formula_listing() {
    let dir = tempfile::tempdir().unwrap();
    let table = ok(dir.path(), &["table", "--max-n", "14"]);
    assert_eq!(table, ok(dir.path(), &["formula", "quiddity-3p"]));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "n,m,value");
    assert_eq!(lines[1], "0,0,1");
    assert!(lines.contains(&"14,11,2288132"));
    assert!(lines.contains(&"14,2,40"));
    assert_eq!(lines.len(), 42);
}

#[test]
fn count_table_lines_up_with_formula() {
    let dir = tempfile::tempdir().unwrap();
    let rows = ok(dir.path(), &["count", "--n", "7"]);
    assert_eq!(rows, "n,m,value\n5,1,1\n5,2,14\n5,3,56\n5,4,84\n5,5,42\n");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path();
    let crossing = quiddity(c, &["of", "8:1-5,3-7"]);
    assert_eq!(crossing.status.code(), Some(1));
    let msg = String::from_utf8(crossing.stderr).unwrap();
    assert_eq!(msg.lines().count(), 1, "{msg}");
    assert!(msg.contains("3-7"));
    assert_eq!(
        quiddity(c, &["formula", "fuss", "5", "2"]).status.code(),
        Some(1)
    );
    assert_eq!(
        quiddity(c, &["surgery", "apply", "8:1-3,5-7", "1-3,3-5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(quiddity(c, &["nonsense"]).status.code(), Some(2));
    assert_eq!(quiddity(c, &["count"]).status.code(), Some(2));
    assert_eq!(
        quiddity(c, &["formula", "nope", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        quiddity(c, &["formula", "catalan", "1", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        quiddity(c, &["count", "--n", "8", "--ell", "2", "--sizes", "3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path();
    let runs: &[&[&str]] = &[
        &["count", "--n", "9", "--csv"],
        &["quiddities", "--n", "9", "--ell", "3"],
        &["count", "--n", "10", "--sizes", "3,4", "--json"],
        &["table", "--max-n", "9"],
        &["formula", "ell-periodic", "8", "3", "2"],
    ];
    for args in runs {
        let fresh = ok(c, args);
        let warm = ok(c, args);
        let mut bypass = args.to_vec();
        bypass.push("--no-cache");
        assert_eq!(fresh, warm, "{args:?}");
        assert_eq!(fresh, ok(c, &bypass), "{args:?}");
    }
    assert!(c.join("count.csv").exists());
    assert!(c.join("quiddities.csv").exists());
}

#[test]
fn poisoned_cache_is_visible_and_bypassable() {
    // A hit is returned verbatim, so --no-cache is the check against a stale store.
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path();
    ok(c, &["count", "--n", "6", "--m", "2"]);
    let path = c.join("count.csv");
    let text = std::fs::read_to_string(&path)
        .unwrap()
        .replace(",9\n", ",10\n");
    std::fs::write(&path, text).unwrap();
    assert_eq!(ok(c, &["count", "--n", "6", "--m", "2"]), "10\n");
    assert_eq!(
        ok(c, &["count", "--n", "6", "--m", "2", "--no-cache"]),
        "9\n"
    );
}

#[test]
fn explicit_cache_dir_wins() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    ok(
        env_dir.path(),
        &[
            "count",
            "--n",
            "7",
            "--m",
            "2",
            "--cache-dir",
            flag_dir.path().to_str().unwrap(),
        ],
    );
    assert!(flag_dir.path().join("count.csv").exists());
    assert!(!env_dir.path().join("count.csv").exists());
}

#[test]
fn structured_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path();
    let classes: serde_json::Value =
        serde_json::from_str(&ok(c, &["classes", "--n", "8", "--m", "3", "--ell", "3"])).unwrap();
    let map = classes.as_object().unwrap();
    assert_eq!(map.len(), 34);
    assert_eq!(
        map["1,2,1,2,1,2,1,2"],
        serde_json::json!(["8:1-3,5-7", "8:1-7,3-5"])
    );

    let class: serde_json::Value =
        serde_json::from_str(&ok(c, &["surgery", "class", "8:1-7,3-5"])).unwrap();
    assert_eq!(class["maximally_open"], "8:1-3,5-7");
    assert_eq!(class["members"].as_array().unwrap().len(), 2);

    let series: serde_json::Value =
        serde_json::from_str(&ok(c, &["series", "q", "--order", "6"])).unwrap();
    let term = series
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["n"] == 6 && t["m"] == 3)
        .unwrap();
    assert_eq!(term["coeff"], "34");

    let report: serde_json::Value =
        serde_json::from_str(&ok(c, &["modular", "verify", "--n", "6"])).unwrap();
    assert_eq!(report["converse_missing"], serde_json::json!([]));
    assert_eq!(report["converse_extra"], serde_json::json!([]));
    assert_eq!(report["forward_failures"], serde_json::json!([]));

    let listed = ok(c, &["enumerate", "--n", "6", "--m", "2"]);
    assert_eq!(listed.lines().count(), 9);
    assert_eq!(
        ok(c, &["enumerate", "--n", "6", "--max-results", "4"])
            .lines()
            .count(),
        4
    );
    let json: Vec<String> =
        serde_json::from_str(&ok(c, &["enumerate", "--n", "6", "--m", "2", "--json"])).unwrap();
    assert_eq!(json.join("\n") + "\n", listed);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path();
    for args in [
        &["enumerate", "--n", "9", "--ell", "3"][..],
        &["classes", "--n", "9", "--m", "4", "--reports"],
    ] {
        assert_eq!(ok(c, args), ok(c, args));
    }
}

#[test]
fn verify_all_fast_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["verify-all", "fast"]);
    assert!(out.lines().all(|l| l.starts_with("PASS ")), "{out}");
    assert!(out.lines().count() >= 10);
}
