use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const FAST: &[&str] = &[
    "--walks-total",
    "120",
    "--walk-length",
    "20",
    "--epochs",
    "2",
];

fn areasim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_areasim"))
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = areasim(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Small synthetic city, ingested into `ing/`.
fn ingested() -> TempDir {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "synth",
            "--out",
            "city",
            "--n-zips",
            "12",
            "--transitions-per-period",
            "600",
            "--seed",
            "4",
        ],
    );
    ok(
        d,
        &[
            "ingest",
            "--venues",
            "city/venues.csv",
            "--transitions",
            "city/transitions.csv",
            "--zipmap",
            "city/zipmap.csv",
            "--out",
            "ing",
        ],
    );
    tmp
}

fn embedded() -> TempDir {
    let tmp = ingested();
    let mut args = vec!["embed", "--input", "ing", "--out", "emb", "--deterministic"];
    args.extend_from_slice(FAST);
    ok(tmp.path(), &args);
    tmp
}

#[test]
fn missing_input_file_exits_2_and_names_the_path() {
    let tmp = TempDir::new().unwrap();
    let out = areasim(
        tmp.path(),
        &[
            "ingest",
            "--venues",
            "nope/venues.csv",
            "--transitions",
            "t.csv",
            "--zipmap",
            "z.csv",
            "--out",
            "o",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("nope/venues.csv"), "{}", stderr(&out));
}

#[test]
fn bad_flag_values_are_usage_errors() {
    let tmp = TempDir::new().unwrap();
    for args in [
        &["synth", "--out", "o", "--period", "brunch"][..],
        &["synth", "--out", "o", "--attribute", "sideways"][..],
        &["synth", "--out", "o", "--p", "0"][..],
        &["synth"][..],
    ] {
        let out = areasim(tmp.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn malformed_input_reports_line_and_exits_2() {
    let tmp = ingested();
    let d = tmp.path();
    let path = d.join("city/transitions.csv");
    let mut text = fs::read_to_string(&path).unwrap();
    text.push_str("v10001-000,v10001-001,2018-13,morning,1\n");
    fs::write(&path, text).unwrap();
    let out = areasim(
        d,
        &[
            "ingest",
            "--venues",
            "city/venues.csv",
            "--transitions",
            "city/transitions.csv",
            "--zipmap",
            "city/zipmap.csv",
            "--out",
            "ing2",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));
}

#[test]
fn ingest_resolves_every_synthetic_venue_and_reruns_identically() {
    let tmp = ingested();
    let d = tmp.path();
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("ing/ingest_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["venues_unresolved"], 0);
    assert_eq!(report["meta"]["seed"], 0);
    ok(
        d,
        &[
            "ingest",
            "--venues",
            "city/venues.csv",
            "--transitions",
            "city/transitions.csv",
            "--zipmap",
            "city/zipmap.csv",
            "--out",
            "ing_again",
        ],
    );
    for f in [
        "zip_transitions.csv",
        "zips.csv",
        "category_venue.csv",
        "category_checkin.csv",
        "ingest_report.json",
    ] {
        assert_eq!(
            fs::read(d.join("ing").join(f)).unwrap(),
            fs::read(d.join("ing_again").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn build_net_writes_one_network_per_period() {
    let tmp = ingested();
    let d = tmp.path();
    ok(d, &["build-net", "--input", "ing", "--out", "net"]);
    for p in ["overnight", "morning", "midday", "afternoon", "night"] {
        let text = fs::read_to_string(d.join(format!("net/network_{p}.tsv"))).unwrap();
        assert!(text.starts_with("# areasim "));
        assert!(text.contains(&format!("period: {p}")));
    }
    ok(
        d,
        &[
            "build-net",
            "--input",
            "ing",
            "--out",
            "net1",
            "--period",
            "night",
        ],
    );
    assert!(d.join("net1/network_night.tsv").exists());
    assert!(!d.join("net1/network_morning.tsv").exists());
}

#[test]
fn embed_writes_one_file_per_active_period_deterministically() {
    let tmp = embedded();
    let d = tmp.path();
    let mut args = vec![
        "embed",
        "--input",
        "ing",
        "--out",
        "emb2",
        "--deterministic",
    ];
    args.extend_from_slice(FAST);
    ok(d, &args);
    for p in ["overnight", "morning", "midday", "afternoon", "night"] {
        let f = format!("embedding_{p}.txt");
        let a = fs::read(d.join("emb").join(&f)).unwrap();
        assert_eq!(a, fs::read(d.join("emb2").join(&f)).unwrap(), "{f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("emb/embed_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["periods"].as_object().unwrap().len(), 5);
    assert_eq!(report["periods"]["morning"]["seed"], 1);
}

#[test]
fn compare_writes_one_k_sweep_row_per_k() {
    let tmp = embedded();
    let d = tmp.path();
    ok(
        d,
        &[
            "compare",
            "--input",
            "ing",
            "--embeddings",
            "emb",
            "--out",
            "cmp",
            "--k",
            "3",
            "--k-max",
            "7",
        ],
    );
    let sweep = fs::read_to_string(d.join("cmp/jaccard_by_k_morning.csv")).unwrap();
    let rows: Vec<&str> = sweep
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    let ks: Vec<&str> = rows.iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(ks, ["1", "2", "3", "4", "5", "6", "7"]);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("cmp/compare_morning.json")).unwrap())
            .unwrap();
    assert_eq!(report["k"], 3);
    assert_eq!(report["n_pairs"], 66);
    assert!(d.join("cmp/category_vs_checkin.json").exists());
}

#[test]
fn cross_period_matrix_is_symmetric_with_unit_diagonal() {
    let tmp = embedded();
    let d = tmp.path();
    ok(d, &["cross-period", "--embeddings", "emb", "--out", "cp"]);
    let text = fs::read_to_string(d.join("cp/cross_period.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[i], 1.0);
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, rows[j][i]);
        }
    }
}

#[test]
fn cross_period_names_the_missing_period() {
    let tmp = embedded();
    let d = tmp.path();
    fs::remove_file(d.join("emb/embedding_midday.txt")).unwrap();
    let out = areasim(d, &["cross-period", "--embeddings", "emb", "--out", "cp"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("midday"), "{}", stderr(&out));
    let out = areasim(
        d,
        &[
            "cross-period",
            "--embeddings",
            "emb",
            "--out",
            "cp",
            "--period",
            "night",
        ],
    );
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn command_line_overrides_config_file() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("run.toml"),
        "seed = 7\ncity = \"gotham\"\nn_zips = 11\n",
    )
    .unwrap();
    ok(d, &["synth", "--config", "run.toml", "--out", "a"]);
    ok(
        d,
        &["synth", "--config", "run.toml", "--out", "b", "--seed", "9"],
    );
    let a = fs::read_to_string(d.join("a/communities.csv")).unwrap();
    let b = fs::read_to_string(d.join("b/communities.csv")).unwrap();
    assert!(
        a.starts_with("# areasim ") && a.contains("city=gotham seed=7 "),
        "{a}"
    );
    assert!(b.contains("city=gotham seed=9 "), "{b}");
    assert_eq!(a.lines().count(), 2 + 11);

    fs::write(d.join("bad.toml"), "sneed = 7\n").unwrap();
    let out = areasim(d, &["synth", "--config", "bad.toml", "--out", "c"]);
    assert_eq!(out.status.code(), Some(2));
    let out = areasim(d, &["synth", "--config", "missing.toml", "--out", "c"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing.toml"));
}
