//! End-to-end runs of the `homord` binary, with golden files for the
//! deterministic outputs. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use homord::format::{chain_from_json, from_text};

fn homord(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homord"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(actual, expected, "golden {name} differs");
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        Fixture { _dir: dir, root }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn graph_chain(&self) -> PathBuf {
        let out = self.path("chain.json");
        let o = homord(&["build", "--class", "graph", "--sat", "2", "--cap", "64", "--seed", "7", "--out", p(&out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        out
    }
}

#[test]
fn build_writes_a_valid_chain() {
    let f = Fixture::new();
    let path = f.graph_chain();
    let chain = chain_from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(*chain.saturation().last().unwrap(), 2);
    assert_eq!(chain.seed(), Some(7));
    let again = f.path("again.json");
    homord(&["build", "--class", "graph", "--sat", "2", "--cap", "64", "--seed", "7", "--out", p(&again)]);
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn build_text_golden() {
    let o = homord(&["build", "--class", "graph", "--sat", "1", "--cap", "40", "--seed", "4", "--text"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    from_text(&text).unwrap();
    golden("build_graph_sat1_seed4.txt", &text);
}

#[test]
fn build_reports_infeasible_cap() {
    let o = homord(&["build", "--class", "graph", "--sat", "3", "--cap", "8"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn sample_csv_golden() {
    let f = Fixture::new();
    let chain = f.graph_chain();
    let out = f.path("samples.csv");
    let o = homord(&[
        "sample", "--sampler", "uniform", "--in", p(&chain), "--n", "5", "--seed", "7", "--points", "0,3,5",
        "--out", p(&out),
    ]);
    assert_eq!(code(&o), 0);
    golden("sample_uniform_seed7.csv", &std::fs::read_to_string(&out).unwrap());
}

#[test]
fn cro_report_golden() {
    let f = Fixture::new();
    let report = f.path("report.json");
    let o = homord(&["cro", "--class", "graph", "--n", "3", "--report", p(&report)]);
    assert_eq!(code(&o), 0);
    golden("cro_graph_3.json", &std::fs::read_to_string(&report).unwrap());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["nullspaceDim"], 2);
    assert_eq!(v["uniformFeasible"], true);
}

#[test]
fn cro_shrinkage_and_linear_orders() {
    let o = homord(&["cro", "--class", "graph", "--n", "4", "--shrink-from", "3", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["shrinkage"]["shrinks"], true);
    let o = homord(&["cro", "--class", "linear-order", "--n", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["diracSolutions"].as_array().unwrap().len(), 2);
}

#[test]
fn orbits_json_lists_blocks() {
    let f = Fixture::new();
    let out = f.path("paley.json");
    homord(&["build", "--class", "graph", "--paley", "13", "--out", p(&out)]);
    let o = homord(&["orbits", "--in", p(&out), "--k", "2", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["blocks"].as_array().unwrap().len(), 2);
    let o = homord(&["orbits", "--in", p(&out), "--level", "0", "--k", "1", "--fix", "0", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["blocks"], serde_json::json!([[[0]], [[1]]]));
}

#[test]
fn acl_verdicts_and_expectations() {
    let f = Fixture::new();
    let paley = f.path("paley.json");
    homord(&["build", "--class", "graph", "--paley", "5,13", "--out", p(&paley)]);
    let o = homord(&["acl", "--in", p(&paley), "--a", "0", "--b", "1", "--expect", "growing"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let inv = f.path("inv.json");
    homord(&["build", "--class", "involution-order", "--size", "8", "--levels", "4,8,16", "--seed", "3", "--out", p(&inv)]);
    let o = homord(&["acl", "--in", p(&inv), "--a", "1", "--b", "0", "--expect", "algebraic-over-a"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = homord(&["acl", "--in", p(&inv), "--a", "1", "--b", "0", "--expect", "growing"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn tau_path_found_and_missing() {
    let f = Fixture::new();
    let chain = f.graph_chain();
    let o = homord(&["tau-path", "--in", p(&chain), "--a", "0", "--b", "5", "--tau", "edge", "--avoid", "1,2", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["found"], true);
    let k2 = f.path("k2.txt");
    std::fs::write(&k2, "sig E:2\nsize 2\nprops E symmetric irreflexive\nrel E 0 1\nrel E 1 0\n").unwrap();
    let o = homord(&["tau-path", "--in", p(&k2), "--a", "0", "--b", "1", "--tau", "edge"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("no path"));
}

#[test]
fn estimate_exit_status_follows_expectation() {
    let f = Fixture::new();
    let chain = f.graph_chain();
    let base = ["estimate", "--sampler", "uniform", "--in", p(&chain), "--points", "0,1", "--n", "20000"];
    let ok = homord(&[&base[..], &["--expect", "0.5"]].concat());
    assert_eq!(code(&ok), 0);
    let bad = homord(&[&base[..], &["--expect", "0.9"]].concat());
    assert_eq!(code(&bad), 1);
}

#[test]
fn statistical_suites() {
    let f = Fixture::new();
    let f2 = f.path("f2.json");
    homord(&["build", "--class", "f2:3", "--out", p(&f2)]);
    let pairs = homord(&[
        "test", "--suite", "independence", "--in", p(&f2), "--sampler", "dual", "--pairs", "1,2", "--pairs", "2,3",
        "--n", "20000",
    ]);
    assert_eq!(code(&pairs), 0, "{}", stdout(&pairs));
    let triple = homord(&[
        "test", "--suite", "joint-independence", "--in", p(&f2), "--sampler", "dual", "--tuples", "1,2,3", "--n",
        "20000", "--expect", "fail",
    ]);
    assert_eq!(code(&triple), 0, "{}", stdout(&triple));
    let chain = f.graph_chain();
    let mono = homord(&["test", "--suite", "monotone", "--in", p(&chain), "--sampler", "decoupled", "--n", "2000"]);
    assert_eq!(code(&mono), 1);
    let iid = homord(&["test", "--suite", "shift-ergodicity", "--sequence", "iid", "--n", "5000", "--json"]);
    assert_eq!(code(&iid), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&iid)).unwrap();
    assert_eq!(v["name"], "shift-ergodicity");
}

#[test]
fn exchangeability_checks_types() {
    let f = Fixture::new();
    let lo = f.path("lo.json");
    homord(&["build", "--class", "linear-order", "--size", "6", "--out", p(&lo)]);
    let ok = homord(&[
        "test", "--suite", "exchangeability", "--in", p(&lo), "--sampler", "uniform", "--pairs", "0,1/2,3", "--n",
        "20000",
    ]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    let mismatch = homord(&[
        "test", "--suite", "exchangeability", "--in", p(&lo), "--sampler", "uniform", "--pairs", "0,1/3,2",
    ]);
    assert_eq!(code(&mismatch), 2);
}

#[test]
fn config_file_supplies_flags() {
    let f = Fixture::new();
    let conf = f.path("run.conf");
    std::fs::write(&conf, "# defaults\nseed = 7\nsat = 2\ncap = 64\n").unwrap();
    let a = homord(&["build", "--class", "graph", "--config", p(&conf)]);
    let b = homord(&["build", "--class", "graph", "--sat", "2", "--cap", "64", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let c = homord(&["build", "--class", "graph", "--seed", "8", "--config", p(&conf)]);
    assert_ne!(stdout(&c), stdout(&a));
}

#[test]
fn bad_input_is_an_error() {
    let f = Fixture::new();
    let bad = f.path("bad.txt");
    std::fs::write(&bad, "sig E:2\nsize two\n").unwrap();
    let o = homord(&["orbits", "--in", p(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
