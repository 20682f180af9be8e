use std::path::Path;
use std::process::{Command, Output};

fn fqlab(args: &[&str]) -> Output {
    fqlab_env(args, &[])
}

fn fqlab_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fqlab"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

#[test]
fn count_example() {
    let o = fqlab(&["count", "--q", "3", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3");
    let o = fqlab(&["count", "--p", "2", "--k", "3", "--n", "4"]);
    assert_eq!(stdout(&o).trim(), "1008");
}

#[test]
fn factor_example() {
    let o = fqlab(&["factor", "--q", "5", "--poly", "1,0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("splitting_type: 2-0"), "{out}");
    assert!(out.contains("irreducible: false"));
    let o = fqlab(&["factor", "--q", "7", "--poly", "1,0,1"]);
    assert!(stdout(&o).contains("splitting_type: 0-1"));
    let o = fqlab(&["factor", "--q", "5", "--poly", "1,2,1"]);
    let out = stdout(&o);
    assert!(out.contains("splitting_type: 2-0") && out.contains("squarefree: false") && out.contains("discriminant: 0"));
}

#[test]
fn stats_example() {
    let o = fqlab(&["stats", "--q", "101", "--n", "2", "--set", "squares", "--mode", "exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["totals"]["tuples"], 2601);
    let irred: f64 = doc["rows"][1]["empirical"].as_str().unwrap().parse().unwrap();
    assert_eq!(doc["rows"][1]["s"], "0-1");
    assert!((irred - 0.5).abs() < 0.05);
}

#[test]
fn golden_documents() {
    let args = ["stats", "--q", "5", "--n", "2", "--set", "uniform", "--mode", "exhaustive"];
    assert_eq!(stdout(&fqlab(&args)), golden("stats_q5_uniform_n2.json"));
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let mut with_csv = args.to_vec();
    with_csv.extend(["--csv", csv.to_str().unwrap()]);
    assert_eq!(fqlab(&with_csv).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), golden("stats_q5_uniform_n2.csv"));
}

#[test]
fn csv_headers() {
    let o = fqlab(&["scan", "dichotomy", "--set", "squares", "--qs", "5,7"]);
    assert_eq!(stdout(&o).lines().next(), Some("q,size,ratio,class"));
    let o = fqlab(&["irreg", "squares", "--qs", "5,9"]);
    assert_eq!(stdout(&o).lines().next(), Some("q,irregularity,bound,margin,min_frequency,frequency_bound,holds"));
    let o = fqlab(&["irreg", "gauss", "--q", "9"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("beta,re,im,abs"));
    let dir = tempfile::tempdir().unwrap();
    let fit = dir.path().join("fit.csv");
    let o = fqlab(&["scan", "scaling", "--n", "2", "--set", "uniform", "--qmin", "11", "--qmax", "60", "--fit-out", fit.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("q,s,count,empirical,predicted,delta,sqrtq_delta,paper_delta"));
    let fit = std::fs::read_to_string(fit).unwrap();
    assert_eq!(fit.lines().next(), Some("s,points,max_sqrtq_delta,median_sqrtq_delta,slope,intercept,exact_points"));
    assert_eq!(fit.lines().count(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(fqlab(&["nope"]).status.code(), Some(2));
    assert_eq!(fqlab(&["count", "--q", "6", "--n", "2"]).status.code(), Some(2));
    assert_eq!(fqlab(&["stats", "--n", "2"]).status.code(), Some(2));
    assert_eq!(fqlab(&["factor", "--q", "5", "--poly", "1,2"]).status.code(), Some(2));
    assert_eq!(
        fqlab(&["stats", "--q", "7", "--n", "3", "--mode", "exhaustive", "--budget", "10"]).status.code(),
        Some(2)
    );
    assert_eq!(fqlab(&["stats", "--q", "7", "--n", "2", "--mode", "montecarlo", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(fqlab_env(&["count", "--q", "3", "--n", "2"], &[("FQLAB_THREADS", "many")]).status.code(), Some(2));
    assert_eq!(fqlab(&["--help"]).status.code(), Some(0));
    // A bound that cannot hold: exit 1.
    let o = fqlab(&["scan", "scaling", "--n", "2", "--set", "squares", "--qs", "101,103,107,109,113", "--max-sqrtq-delta", "0.001"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(fqlab(&["verify", "--suite", "class-equation"]).status.code(), Some(0));
}

#[test]
fn config_file_and_rerun_from_document() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("out/result.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"field":{{"p":3,"k":2}},"n":3,"sets":["squares"],"mode":{{"type":"montecarlo","samples":70000,"seed":17}},
               "output":{{"json":{:?}}}}}"#,
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    assert_eq!(fqlab(&["stats", "--config", cfg.to_str().unwrap()]).status.code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    // Flags override config keys; the override lands in the manifest.
    let other = dir.path().join("other.json");
    let o = fqlab(&["stats", "--config", cfg.to_str().unwrap(), "--seed", "18", "--out", other.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let other: serde_json::Value = serde_json::from_slice(&std::fs::read(&other).unwrap()).unwrap();
    assert_eq!(other["manifest"]["config"]["mode"]["seed"], 18);
    // Re-running from the result document reproduces it byte for byte.
    let copy = dir.path().join("copy.json");
    std::fs::copy(&out, &copy).unwrap();
    std::fs::remove_file(&out).unwrap();
    let o = fqlab_env(&["stats", "--config", copy.to_str().unwrap()], &[("FQLAB_THREADS", "5")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), first);
    let doc: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(doc["manifest"]["seed"], 17);
    assert_eq!(doc["manifest"]["prng"], "chacha8/splitmix64-shard-seeds/multiply-shift-index");
    assert_eq!(doc["q"], 9);
}

#[test]
fn thread_count_does_not_change_documents() {
    for args in [
        &["stats", "--q", "31", "--n", "3", "--set", "squares", "--mode", "exhaustive"][..],
        &["stats", "--q", "27", "--n", "4", "--set", "uniform", "--mode", "montecarlo", "--samples", "200000", "--seed", "4"][..],
    ] {
        let base = fqlab_env(args, &[("FQLAB_THREADS", "1")]);
        assert_eq!(base.status.code(), Some(0));
        for t in ["2", "7", "0"] {
            assert_eq!(fqlab_env(args, &[("FQLAB_THREADS", t)]).stdout, base.stdout, "FQLAB_THREADS={t}");
        }
    }
}
