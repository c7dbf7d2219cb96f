use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use tenseq::executor::{cnot, hadamard, Circuit};
use tenseq::graph::{read_gr, write_gr};
use tenseq::{Graph, TensorNetwork};

fn tenseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tenseq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = tenseq(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_regular_graphs_are_cubic_and_connected() {
    let dir = TempDir::new().unwrap();
    ok(&[
        "generate",
        "regular",
        "--r",
        "3",
        "--n",
        "10",
        "--count",
        "25",
        "--seed",
        "1",
        "--out",
        p(dir.path()),
    ]);
    let manifest = json(&dir.path().join("manifest.json"));
    let entries = manifest["instances"].as_array().unwrap();
    assert_eq!(entries.len(), 25);
    for e in entries {
        let text = std::fs::read_to_string(dir.path().join(e["path"].as_str().unwrap())).unwrap();
        let g = read_gr(&text).unwrap();
        assert!(g.is_regular(3) && g.is_connected() && g.n() == 10);
        assert!(e["provenance"]["seed"].is_u64());
    }
}

#[test]
fn generate_is_idempotent() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        ok(&[
            "generate",
            "qaoa",
            "--r",
            "3",
            "--n",
            "8",
            "--count",
            "3",
            "--numeric",
            "--seed",
            "4",
            "--out",
            p(d.path()),
        ]);
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for name in names {
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?} differs");
    }
}

#[test]
fn generate_mera_reports_unique_classes() {
    let dir = TempDir::new().unwrap();
    let out = ok(&[
        "generate",
        "mera",
        "--d",
        "1",
        "--levels",
        "3",
        "--ops",
        "1",
        "--out",
        p(dir.path()),
    ]);
    let brief: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(brief["instances"], 8);
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["summary"]["total"], 8);
    assert_eq!(manifest["summary"]["unique"], 3);
    assert_eq!(manifest["instances"].as_array().unwrap().len(), 8);
}

#[test]
fn generate_rejects_bad_parameters() {
    let dir = TempDir::new().unwrap();
    let out = tenseq(&["generate", "regular", "--r", "3", "--n", "9", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let out = tenseq(&["generate", "mera", "--d", "3", "--levels", "2", "--ops", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_k5_graph() {
    let dir = TempDir::new().unwrap();
    let gr = dir.path().join("k5.gr");
    std::fs::write(&gr, write_gr(&Graph::complete(5))).unwrap();
    let out = ok(&["solve", p(&gr), "--algorithm", "exact", "--out", p(dir.path())]);
    let rec: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(rec["status"], "optimal");
    assert_eq!(rec["width"], 4);
    assert!(dir.path().join("k5.exact.td").exists());
    let lines = std::fs::read_to_string(dir.path().join("results.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 1);
}

#[test]
fn solve_cycle_network_writes_sequence() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("c6.json");
    std::fs::write(&path, TensorNetwork::from_graph(&Graph::cycle(6)).to_json()).unwrap();
    let out = ok(&["solve", p(&path), "--format", "csv", "--out", p(dir.path())]);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("c6,exact,0,optimal,2,"), "{row}");
    let seq = json(&dir.path().join("c6.exact.seq.json"));
    assert_eq!(seq["complexity"], 2);
    assert_eq!(seq["optimal"], true);
}

#[test]
fn solve_missing_instance_exits_2() {
    let out = tenseq(&["solve", "/nonexistent/x.gr"]);
    assert_eq!(out.status.code(), Some(2));
}

fn hard_network(dir: &Path) -> std::path::PathBuf {
    ok(&[
        "generate",
        "qaoa",
        "--r",
        "3",
        "--n",
        "100",
        "--count",
        "3",
        "--seed",
        "7",
        "--out",
        p(dir),
    ]);
    dir.join("qaoa_r3_n100_p1_s7.json")
}

#[test]
fn solve_timeout_exits_1_with_bound() {
    let dir = TempDir::new().unwrap();
    let path = hard_network(dir.path());
    let out = tenseq(&["solve", p(&path), "--timeout", "0.001", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["status"], "timeout-with-bound");
    assert!(rec["width"].as_u64().unwrap() >= rec["lower_bound"].as_u64().unwrap());
}

#[test]
fn convert_chain_never_widens_and_checks_hash() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(&[
        "generate",
        "qaoa",
        "--r",
        "3",
        "--n",
        "8",
        "--count",
        "2",
        "--out",
        p(d),
    ]);
    let inst = d.join("qaoa_r3_n8_p1_s0.json");
    ok(&["solve", p(&inst), "--algorithm", "min-degree", "--out", p(d)]);
    let td = d.join("qaoa_r3_n8_p1_s0.min-degree.td");
    let width_of = |stderr: &[u8]| -> (usize, usize) {
        let s = String::from_utf8_lossy(stderr);
        let line = s.lines().find(|l| l.starts_with("width")).unwrap().to_string();
        let nums: Vec<usize> = line.split(' ').filter_map(|t| t.parse().ok()).collect();
        (nums[0], nums[1])
    };
    let steps = [
        (td.clone(), "eo", d.join("a.eo.json")),
        (d.join("a.eo.json"), "sequence", d.join("a.seq.json")),
        (d.join("a.seq.json"), "td", d.join("b.td")),
        (d.join("b.td"), "sequence", d.join("b.seq.json")),
        (d.join("b.seq.json"), "eo", d.join("b.eo.json")),
        (d.join("b.eo.json"), "td", d.join("c.td")),
    ];
    for (from, to, out) in &steps {
        let o = tenseq(&["convert", p(from), "--instance", p(&inst), "--to", to, "--out", p(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let (before, after) = width_of(&o.stderr);
        assert!(after <= before, "{from:?} -> {to}: {before} -> {after}");
    }
    let other = d.join("qaoa_r3_n8_p1_s1.json");
    let o = tenseq(&["convert", p(&td), "--instance", p(&other), "--to", "eo"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("refusing"));
}

#[test]
fn contract_bell_network() {
    let dir = TempDir::new().unwrap();
    let mut circ = Circuit::zeros(2);
    circ.gate1(0, hadamard(), "h");
    circ.gate2(0, 1, cnot(), "cx");
    circ.project_all(&[0, 0]);
    let path = dir.path().join("bell.json");
    std::fs::write(&path, circ.to_network().unwrap().to_json()).unwrap();
    let report: Value = serde_json::from_str(&ok(&["contract", p(&path), "--end-to-end"])).unwrap();
    let amp = report["amplitude"].as_array().unwrap();
    assert!((amp[0].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert!(amp[1].as_f64().unwrap().abs() < 1e-12);
    assert!(report["max_rank"].as_u64().unwrap() <= 3);
    assert_eq!(report["max_degree"], report["complexity"]);
}

#[test]
fn contract_with_sequence_and_oracle() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(&[
        "generate",
        "qaoa",
        "--r",
        "3",
        "--n",
        "8",
        "--numeric",
        "--seed",
        "2",
        "--out",
        p(d),
    ]);
    let inst = d.join("qaoa_r3_n8_p1_s2.json");
    ok(&["solve", p(&inst), "--out", p(d)]);
    let seq = d.join("qaoa_r3_n8_p1_s2.exact.seq.json");
    let report: Value = serde_json::from_str(&ok(&["contract", p(&inst), "--sequence", p(&seq), "--oracle"])).unwrap();
    assert!(report["oracle"]["diff"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["max_degree"], json(&seq)["complexity"]);

    let other = d.join("c.json");
    std::fs::write(&other, TensorNetwork::from_graph(&Graph::cycle(3)).to_json()).unwrap();
    let o = tenseq(&["contract", p(&other), "--sequence", p(&seq)]);
    assert_eq!(o.status.code(), Some(2));
}

fn non_timing(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn bench_rows_aggregate_and_reproduce() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let gen = d.join("gen");
    ok(&[
        "generate",
        "regular",
        "--r",
        "3",
        "--n",
        "12",
        "--count",
        "6",
        "--seed",
        "3",
        "--out",
        p(&gen),
    ]);
    let manifest = gen.join("manifest.json");
    let run = |out: &str, jobs: &str| {
        ok(&[
            "bench",
            p(&manifest),
            "--algorithms",
            "exact,min-fill,min-degree",
            "--jobs",
            jobs,
            "--seed",
            "5",
            "--timeout",
            "60",
            "--out",
            p(&d.join(out)),
        ])
    };
    let printed = run("a", "4");
    run("b", "1");
    let a = std::fs::read_to_string(d.join("a/results.csv")).unwrap();
    let b = std::fs::read_to_string(d.join("b/results.csv")).unwrap();
    assert_eq!(a.lines().count(), 1 + 18);
    assert_eq!(non_timing(&a), non_timing(&b));
    assert_eq!(printed, std::fs::read_to_string(d.join("a/aggregate.csv")).unwrap());

    // statistics recomputed from the raw rows
    let widths: Vec<f64> = a
        .lines()
        .skip(1)
        .filter(|l| l.contains(",exact,"))
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    let mean = widths.iter().sum::<f64>() / widths.len() as f64;
    let agg: Value = json(&d.join("a/aggregate.json"));
    let exact = agg
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["algorithm"] == "exact")
        .unwrap();
    assert_eq!(exact["samples"], 6);
    assert!((exact["mean"].as_f64().unwrap() - mean).abs() < 1e-12);
    assert_eq!(std::fs::read_dir(d.join("a/artifacts")).unwrap().count(), 18 * 2);
}

#[test]
fn bench_short_timeouts_keep_bounds() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    hard_network(d);
    let manifest = d.join("manifest.json");
    for out in ["a", "b"] {
        ok(&[
            "bench",
            p(&manifest),
            "--algorithms",
            "exact,min-fill,min-degree",
            "--timeout",
            "0.001",
            "--exclusive",
            "--seed",
            "1",
            "--out",
            p(&d.join(out)),
        ]);
    }
    let a = std::fs::read_to_string(d.join("a/results.csv")).unwrap();
    let b = std::fs::read_to_string(d.join("b/results.csv")).unwrap();
    assert_eq!(non_timing(&a), non_timing(&b));
    for line in a.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[3], "timeout-with-bound");
        assert!(f[4].parse::<usize>().is_ok());
        assert!(f[5].parse::<f64>().unwrap() <= 1.0 + 100.0);
    }
    let agg: Value = json(&d.join("a/aggregate.json"));
    assert_eq!(a.lines().count(), 1 + 9);
    for row in agg.as_array().unwrap() {
        assert_eq!(row["samples"], 0);
        assert_eq!(row["timeouts"], 3);
    }
}

#[test]
fn bench_records_failures_without_aborting() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(d.join("ok.gr"), write_gr(&Graph::cycle(5))).unwrap();
    std::fs::write(d.join("bad.gr"), "p tw 2 1\n1 3\n").unwrap();
    std::fs::write(
        d.join("manifest.json"),
        r#"{"instances":[{"id":"bad","path":"bad.gr"},{"id":"ok","path":"ok.gr"},{"id":"gone","path":"gone.gr"}]}"#,
    )
    .unwrap();
    ok(&["bench", p(&d.join("manifest.json")), "--out", p(&d.join("o"))]);
    let csv = std::fs::read_to_string(d.join("o/results.csv")).unwrap();
    let status: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(status, ["error", "optimal", "error"]);
}

#[test]
fn bench_external_solver() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(d.join("c4.gr"), write_gr(&Graph::cycle(4))).unwrap();
    std::fs::write(d.join("manifest.json"), r#"{"instances":[{"id":"c4","path":"c4.gr"}]}"#).unwrap();
    ok(&[
        "bench",
        p(&d.join("manifest.json")),
        "--algorithms",
        "",
        "--solver-cmd",
        "cat > /dev/null; printf 's td 2 3 4\\nb 1 1 2 3\\nb 2 1 3 4\\n1 2\\n'",
        "--out",
        p(&d.join("o")),
    ]);
    let csv = std::fs::read_to_string(d.join("o/results.csv")).unwrap();
    assert!(
        csv.lines().nth(1).unwrap().starts_with("c4,external,0,heuristic,2,"),
        "{csv}"
    );
}
