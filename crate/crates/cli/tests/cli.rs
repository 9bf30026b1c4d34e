use cbesov::csv::{parse_results_csv, parse_table};
use cbesov::manifest::verify;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cbesov"));
    c.env_remove("CBESOV_OUT_ROOT");
    c
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn run(config: &Path, out: &Path) -> Output {
    bin()
        .args(["run", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn compare(a: &Path, b: &Path, tol: Option<&str>) -> Output {
    let mut c = bin();
    c.arg("compare").arg(a).arg(b);
    if let Some(t) = tol {
        c.args(["--tol", t]);
    }
    c.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn cutoff_runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"schema_version":1,"mode":"cutoffs"}"#,
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run(&cfg, &a).status.success());
    assert!(run(&cfg, &b).status.success());
    let ta = std::fs::read(a.join("profiles.csv")).unwrap();
    assert_eq!(ta, std::fs::read(b.join("profiles.csv")).unwrap());
    let t = parse_table(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert_eq!(t.header, ["r", "psi", "phi", "rho"]);
    assert_eq!(t.rows.len(), 401);
    verify(&a).unwrap();
    let o = compare(&a, &b, None);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn invalid_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"schema_version":1,"mode":"cutoffs","typo":1}"#,
    );
    let o = run(&cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("schema"), "{}", stderr(&o));
    let cfg = write_config(
        dir.path(),
        "k.json",
        r#"{"schema_version":1,"mode":"data","construction":{"n":3,"k":20,"eps":0.02}}"#,
    );
    assert_eq!(run(&cfg, &dir.path().join("out2")).status.code(), Some(2));
}

#[test]
fn explain_names() {
    let o = bin().args(["explain", "A11"]).output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("eta eps k^(1/q)"));
    let o = bin().args(["explain", "U4"]).output().unwrap();
    assert!(String::from_utf8_lossy(&o.stdout).contains("Delta_j U4 = 0"));
    let o = bin().args(["explain", "bogus"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("A211_12"));
}

#[test]
fn runs_at_different_q_differ_and_modes_must_match() {
    let dir = tempfile::tempdir().unwrap();
    let mk = |q: u32| {
        let json = format!(
            r#"{{"schema_version":1,"mode":"iterate","construction":{{"n":3,"k":32,"eps":0.02,"q":{q}}}}}"#
        );
        let cfg = write_config(dir.path(), &format!("q{q}.json"), &json);
        let out = dir.path().join(format!("q{q}"));
        let o = run(&cfg, &out);
        assert!(o.status.success(), "{}", stderr(&o));
        out
    };
    let (a, b) = (mk(1), mk(2));
    let rows = parse_results_csv(&std::fs::read_to_string(a.join("results.csv")).unwrap()).unwrap();
    assert!(rows.iter().any(|r| r.quantity == "S" && r.j.is_none()));
    let o = compare(&a, &b, None);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stdout).contains(":aggregate:"));
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"schema_version":1,"mode":"cutoffs"}"#,
    );
    let c = dir.path().join("c");
    assert!(run(&cfg, &c).status.success());
    let o = compare(&a, &c, None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mismatch"));
}

#[test]
fn data_run_lists_both_components() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "d.json",
        r#"{"schema_version":1,"mode":"data","construction":{"n":3,"k":32,"eps":0.02}}"#,
    );
    let out = dir.path().join("d");
    assert!(run(&cfg, &out).status.success());
    let rows =
        parse_results_csv(&std::fs::read_to_string(out.join("results.csv")).unwrap()).unwrap();
    for name in ["u1", "u2"] {
        let agg = rows
            .iter()
            .find(|r| r.quantity == name && r.j.is_none())
            .unwrap();
        assert!(agg.aggregate > 0.0);
    }
}

#[test]
fn quadrature_node_counts_agree() {
    let dir = tempfile::tempdir().unwrap();
    let mk = |m: u32| {
        let json = format!(
            r#"{{"schema_version":1,"mode":"iterate","construction":{{"n":3,"k":16,"eps":0.02,"nodes":{m}}}}}"#
        );
        let cfg = write_config(dir.path(), &format!("m{m}.json"), &json);
        let out = dir.path().join(format!("m{m}"));
        let o = run(&cfg, &out);
        assert!(o.status.success(), "{}", stderr(&o));
        out
    };
    let (a, b) = (mk(32), mk(48));
    let r = cbesov::compare::compare_runs(&a, &b, 1e-7).unwrap();
    assert!(r.max_rel["results.csv:aggregate"] < 1e-7, "{:?}", r.max_rel);
}

#[test]
fn quadrature_refusal_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "r.json",
        r#"{"schema_version":1,"mode":"iterate","construction":{"n":3,"k":16,"eps":0.02,"eta":100.0,"nodes":2}}"#,
    );
    let o = run(&cfg, &dir.path().join("r"));
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("second_iterate"));
}

#[test]
fn sweep_writes_plot_and_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.json",
        r#"{"schema_version":1,"mode":"sweep","plot":true,
            "construction":{"n":3,"ks":[16,32,48],"eps":0.02,"q":1,"norms":false}}"#,
    );
    let root = dir.path().join("root");
    let o = bin()
        .env("CBESOV_OUT_ROOT", &root)
        .args(["run", "--threads", "2", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let out = root.join("sweep");
    let m = verify(&out).unwrap();
    assert!(m.summary.contains_key("fitted_exponent"));
    assert!(m.file("plot.svg").is_some());
    let rows =
        parse_results_csv(&std::fs::read_to_string(out.join("results.csv")).unwrap()).unwrap();
    assert_eq!(
        rows.iter()
            .filter(|r| r.quantity == "S" && r.j.is_none())
            .count(),
        3
    );
}

#[test]
fn small_oracle_run_flags_the_iterate_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "o.json",
        r#"{"schema_version":1,"mode":"oracle","oracle":{"k":4,"points":256,"length":12.566370614359172}}"#,
    );
    let out = dir.path().join("o");
    let o = run(&cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = parse_table(&std::fs::read_to_string(out.join("comparison.csv")).unwrap()).unwrap();
    let row = t
        .rows
        .iter()
        .find(|r| r[0] == "second_iterate_rel_error")
        .unwrap();
    assert_eq!(row[4], "true");
    verify(&out).unwrap();
}
