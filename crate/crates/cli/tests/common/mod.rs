#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn toy(name: &str) -> PathBuf {
    data_dir().join("toy").join(name)
}

pub fn golden_path(name: &str) -> PathBuf {
    data_dir().join("golden").join(name)
}

/// Runs the binary with a clean `EVOVERLAP_*` environment plus `env`.
pub fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_evoverlap"));
    for (key, _) in std::env::vars() {
        if key.starts_with("EVOVERLAP_") {
            cmd.env_remove(key);
        }
    }
    cmd.args(args).envs(env.iter().copied());
    cmd.output().expect("binary runs")
}

pub fn run(args: &[&str]) -> Output {
    run_with_env(args, &[])
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// `score` over the bundled toy corpus: two mock systems, scored against
/// the human references (`reference`) or the article events (`source`).
pub fn score_toy(mode: &str, format: &str, jobs: usize, extra: &[&str]) -> Output {
    let refs = if mode == "reference" { "references.jsonl" } else { "articles.jsonl" };
    let (a, b, r) = (toy("system_alpha.jsonl"), toy("system_beta.jsonl"), toy(refs));
    let jobs = jobs.to_string();
    let mut args = vec![
        "score",
        "--candidates",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--references",
        r.to_str().unwrap(),
        "--mode",
        mode,
        "--format",
        format,
        "--jobs",
        &jobs,
    ];
    args.extend_from_slice(extra);
    run(&args)
}

pub const GOLDEN_RUNS: [(&str, &str, &str); 4] = [
    ("reference", "tsv", "reference.tsv"),
    ("reference", "json", "reference.json"),
    ("source", "tsv", "source.tsv"),
    ("source", "json", "source.json"),
];

/// Rewrites the golden files when `UPDATE_GOLDEN=1`.
pub fn maybe_update_golden() {
    if std::env::var("UPDATE_GOLDEN").as_deref() != Ok("1") {
        return;
    }
    for (mode, format, file) in GOLDEN_RUNS {
        let out = score_toy(mode, format, 1, &[]);
        assert!(out.status.success(), "{}", stderr(&out));
        std::fs::write(golden_path(file), &out.stdout).unwrap();
    }
}
