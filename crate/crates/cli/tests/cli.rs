use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output};
use std::thread;

use tempfile::TempDir;

const TABLE1: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/table1.csv");

fn qgeval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgeval"))
        .args(args)
        .env_remove("QGEVAL_BRIDGE_ADDR")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = qgeval(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

const WORKED: &str = r#"{"id":"q1","system":"A","passage":"DCU is in Glasnevin.","question":"address of DCU","answer":"Glasnevin","reference":"What is the address of DCU?"}
{"id":"q2","system":"B","passage":"DCU is in Glasnevin.","question":"What is the address of","answer":"Glasnevin","reference":"What is the address of DCU?"}
"#;

#[test]
fn metrics_worked_example() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "items.jsonl", WORKED);
    let out = dir.path().join("out");
    ok(&["--out", out.to_str().unwrap(), "metrics", &input]);
    let rows = csv_rows(&out.join("metrics_items.csv"));
    let col = |name: &str| rows[0].iter().position(|c| c == name).unwrap();
    let val = |r: usize, name: &str| format!("{:.1}", rows[r][col(name)].parse::<f64>().unwrap());
    assert_eq!((val(1, "BLEU1"), val(2, "BLEU1")), ("36.8".into(), "81.9".into()));
    assert_eq!((val(1, "ROUGE-L"), val(2, "ROUGE-L")), ("66.7".into(), "90.9".into()));
    assert_eq!(csv_rows(&out.join("metrics_systems.csv")).len(), 3);
}

#[test]
fn metrics_empty_and_identity() {
    let dir = TempDir::new().unwrap();
    let empty = write(dir.path(), "empty.jsonl", "");
    let out = dir.path().join("e");
    ok(&["--out", out.to_str().unwrap(), "metrics", &empty]);
    assert_eq!(fs::read_to_string(out.join("metrics_items.csv")).unwrap().lines().count(), 1);

    let same = r#"{"id":"1","system":"S","passage":"p","question":"Where was the battle fought?","answer":"a","reference":"Where was the battle fought?"}
{"id":"2","system":"S","passage":"p","question":"Who wrote the first report?","answer":"a","reference":"Who wrote the first report?"}
{"id":"3","system":"S","passage":"p","question":"no reference here","answer":"a"}
"#;
    let input = write(dir.path(), "same.jsonl", same);
    let out = dir.path().join("s");
    ok(&["--out", out.to_str().unwrap(), "metrics", &input]);
    let rows = csv_rows(&out.join("metrics_items.csv"));
    assert_eq!(rows.len(), 3, "unreferenced item skipped");
    for r in &rows[1..] {
        for (name, v) in rows[0].iter().zip(r).skip(2) {
            let v: f64 = v.parse().unwrap();
            if name == "METEOR" {
                assert!(v > 95.0 && v < 100.0);
            } else {
                assert!((v - 100.0).abs() < 1e-9, "{name} {v}");
            }
        }
    }
}

#[test]
fn malformed_jsonl_reports_line() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "bad.jsonl", &format!("{}{{not json\n", WORKED.lines().next().unwrap().to_owned() + "\n"));
    let out = qgeval(&["--out", dir.path().to_str().unwrap(), "metrics", &input]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn qascore_mock_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "items.jsonl", WORKED);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        ok(&["--seed", "9", "--out", out.to_str().unwrap(), "qascore", &input]);
    }
    for f in ["qascore_items.csv", "qascore_systems.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    let u = dir.path().join("u");
    ok(&["--out", u.to_str().unwrap(), "--aggregation", "sum", "qascore", "--mock-mode", "uniform", &input]);
    // vocabulary: <unk> plus 8 distinct words of passages, questions and answers
    let rows = csv_rows(&u.join("qascore_items.csv"));
    let total: f64 = rows[1][3].parse().unwrap();
    assert!((total - (1.0f64 / 9.0).ln()).abs() < 1e-12, "{total}");
}

#[test]
fn bridge_errors_and_success() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "items.jsonl", WORKED);
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let dead = listener.local_addr().unwrap().to_string();
    drop(listener);
    let out = qgeval(&["--model", "bridge", "--bridge-addr", &dead, "--out", dir.path().to_str().unwrap(), "qascore", &input]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains(&dead));

    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let server = thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut w = stream;
        let mut line = String::new();
        while reader.read_line(&mut line).unwrap() > 0 {
            let req: serde_json::Value = serde_json::from_str(&line).unwrap();
            let words: Vec<&str> = req["answer"].as_str().unwrap().split_whitespace().collect();
            let resp = serde_json::json!({"id": req["id"], "words": words, "word_logliks": vec![-0.5; words.len()]});
            writeln!(w, "{resp}").unwrap();
            line.clear();
        }
    });
    let out_dir = dir.path().join("bridge");
    let out = Command::new(env!("CARGO_BIN_EXE_qgeval"))
        .args(["--model", "bridge", "--out", out_dir.to_str().unwrap(), "qascore", &input])
        .env("QGEVAL_BRIDGE_ADDR", &addr)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    server.join().unwrap();
    let rows = csv_rows(&out_dir.join("qascore_systems.csv"));
    assert_eq!(rows[1], ["A", "1", "-0.5"]);
}

fn hit_corpus(passages: usize, systems: usize) -> String {
    let mut out = String::new();
    for p in 0..passages {
        for s in 0..systems {
            let name = if s == 0 { "Human".to_string() } else { format!("S{s}") };
            let q = format!("what did system {s} ask about passage {p} today ?");
            let passage = format!("passage {p} talks about topic number {p} at some length here");
            out.push_str(&serde_json::json!({"id": format!("{p}-{s}"), "system": name, "passage": passage, "question": q, "answer": "topic"}).to_string());
            out.push('\n');
        }
    }
    out
}

#[test]
fn hits_build_composition_and_determinism() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "items.jsonl", &hit_corpus(3, 11));
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        ok(&["--seed", "5", "--out", out.to_str().unwrap(), "hits", "build", &input]);
    }
    let text = fs::read_to_string(a.join("hits.jsonl")).unwrap();
    assert_eq!(text, fs::read_to_string(b.join("hits.jsonl")).unwrap());
    let hits: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(hits.len(), 3);
    for h in &hits {
        let items = h["items"].as_array().unwrap();
        assert_eq!(items.len(), 20);
        let count = |k: &str| items.iter().filter(|i| i["kind"] == k).count();
        assert_eq!((count("ORD"), count("BADREF"), count("REPEAT")), (11, 6, 3));
        assert!(items.iter().all(|i| i.get("pair_of").is_some()));
    }

    let short = write(dir.path(), "short.jsonl", &hit_corpus(2, 10));
    let out = qgeval(&["--out", dir.path().to_str().unwrap(), "hits", "build", &short]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_two_runs_and_overlap() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&["--seed", "7", "--out", d, "simulate", "--run", "one"]);
    ok(&["--seed", "7", "--out", d, "simulate", "--run", "two"]);
    let r1 = dir.path().join("r1");
    let r1b = dir.path().join("r1b");
    let r2 = dir.path().join("r2");
    let one = dir.path().join("ratings_one.jsonl");
    let two = dir.path().join("ratings_two.jsonl");
    ok(&["--out", r1.to_str().unwrap(), "analyze", one.to_str().unwrap()]);
    ok(&["--out", r1b.to_str().unwrap(), "analyze", one.to_str().unwrap()]);
    ok(&["--out", r2.to_str().unwrap(), "analyze", two.to_str().unwrap(), "--metrics", TABLE1]);
    for f in ["report.json", "sigmatrix.csv", "heatmap.svg"] {
        assert_eq!(fs::read(r1.join(f)).unwrap(), fs::read(r1b.join(f)).unwrap(), "{f}");
    }
    let overlap: f64 = ok(&["overlap", r1.join("sigmatrix.csv").to_str().unwrap(), r2.join("sigmatrix.csv").to_str().unwrap()])
        .trim()
        .parse()
        .unwrap();
    assert!(overlap >= 0.9, "{overlap}");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(r2.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["systems"]["systems"].as_array().unwrap().len(), 11);
    assert!(report["correlation"]["metrics"].as_array().unwrap().len() >= 7);
    assert!(report["qc"]["report"].as_object().unwrap().len() > 100);
}

#[test]
fn analyze_all_workers_fail() {
    let dir = TempDir::new().unwrap();
    let mut text = String::new();
    for w in 0..3 {
        for (kind, item, pair) in [("ORD", "h/A/ORD", None), ("BADREF", "h/A/BADREF", Some("h/A/ORD"))] {
            let rec = serde_json::json!({"worker_id": format!("w{w}"), "hit_id": "h", "item_id": item, "system": "A", "kind": kind, "pair_of": pair, "scores": {"relevancy": 50.0}});
            text.push_str(&format!("{rec}\n"));
        }
    }
    let input = write(dir.path(), "ratings.jsonl", &text);
    let out = qgeval(&["--out", dir.path().to_str().unwrap(), "analyze", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn correlate_table1() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&["--out", dir.path().to_str().unwrap(), "correlate", TABLE1]);
    assert!(stdout.contains("QAScore\t11\t0.864\t0.827\t0.709"), "{stdout}");
    assert!(stdout.contains("METEOR\t10\t0.801\t0.612\t0.511"));
    assert!(stdout.contains("williams\tMETEOR > Q-BLEU1\tn=10\tp=0.249"));
    assert!(dir.path().join("correlation.json").exists());
}

#[test]
fn test_subcommands() {
    let r: serde_json::Value = serde_json::from_str(&ok(&["test", "rank-sum", "--x", "4,5,6", "--y", "1,2,3"])).unwrap();
    assert_eq!(r["p_value"], 0.05);
    let s: serde_json::Value =
        serde_json::from_str(&ok(&["test", "signed-rank", "--x", "5,6,7", "--y", "1,1,1", "--alternative", "two-sided"])).unwrap();
    assert_eq!(s["p_value"], 0.25);
    let w: serde_json::Value =
        serde_json::from_str(&ok(&["test", "williams", "--r12", "0.3", "--r13", "0.6", "--r23", "0.6", "--n", "12"])).unwrap();
    assert_eq!(w["p_value"], 0.5);
    assert_eq!(qgeval(&["test", "signed-rank", "--x", "1,2", "--y", "1"]).status.code(), Some(1));
    assert_eq!(qgeval(&["test", "signed-rank", "--x", "1,2", "--y", "1,2"]).status.code(), Some(2));
    assert_eq!(qgeval(&["test", "williams", "--r12", "2", "--r13", "0.6", "--r23", "0.6", "--n", "12"]).status.code(), Some(1));
}
