use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn layercake(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_layercake"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, name: &str, seed: u64, n: usize, m: usize) -> PathBuf {
    let p = dir.path().join(name);
    let out = layercake(&[
        "gen",
        "--seed",
        &seed.to_string(),
        "--n",
        &n.to_string(),
        "--m",
        &m.to_string(),
        "--cells",
        "3",
        "--out",
        path_str(&p),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

fn uniform_layer(w: &str) -> String {
    format!(r#"{{"breakpoints": ["0", "1"], "values": ["{w}"]}}"#)
}

fn write_doc(dir: &TempDir, name: &str, m: usize, agents: &[String]) -> PathBuf {
    let layers = vec![r#"{"lo": "0", "hi": "1"}"#; m].join(", ");
    let text = format!(
        r#"{{"version": "layercake-instance/1", "layers": [{layers}], "agents": [{}]}}"#,
        agents.join(", ")
    );
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn golden_2x2(dir: &TempDir) -> PathBuf {
    let a = format!("[{}, {}]", uniform_layer("3/4"), uniform_layer("1/4"));
    let b = r#"[{"breakpoints": ["0", "1/2", "1"], "values": ["1", "0"]},
               {"breakpoints": ["0", "1/2", "1"], "values": ["0", "1"]}]"#
        .to_string();
    write_doc(dir, "golden.json", 2, &[a, b])
}

fn json(p: &Path) -> Value {
    serde_json::from_slice(&fs::read(p).unwrap()).unwrap()
}

#[test]
fn gen_is_deterministic() {
    let a = layercake(&["gen", "--seed", "1", "--n", "2", "--m", "2", "--cells", "3"]);
    let b = layercake(&["gen", "--seed", "1", "--n", "2", "--m", "2", "--cells", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["agents"].as_array().unwrap().len(), 2);
}

#[test]
fn solve_prop_six_layers_with_report() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "six.json", 6, 6, 6);
    let out = dir.path().join("alloc.json");
    let svg = dir.path().join("alloc.svg");
    let run = layercake(&[
        "solve",
        "--protocol",
        "prop",
        "--in",
        path_str(&inst),
        "--out",
        path_str(&out),
        "--verify",
        "--count-queries",
        "--render",
        path_str(&svg),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let doc = json(&out);
    assert_eq!(doc["protocol"], "prop");
    assert_eq!(doc["certificate"], "proportional");
    assert_eq!(doc["report"]["proportional"], true);
    assert_eq!(doc["report"]["structural"]["contiguous"], true);
    assert_eq!(doc["queries"].as_array().unwrap().len(), 6);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let check = layercake(&["verify", "--in", path_str(&inst), "--alloc", path_str(&out)]);
    assert!(check.status.success());
    let report: Value = serde_json::from_slice(&check.stdout).unwrap();
    assert_eq!(report["proportional"], true);
}

#[test]
fn unsupported_shape_exit_code() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "five.json", 5, 5, 5);
    let out = dir.path().join("alloc.json");
    let run = layercake(&[
        "solve",
        "--protocol",
        "prop",
        "--in",
        path_str(&inst),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(run.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn envy_free_render_shows_cuts() {
    let dir = TempDir::new().unwrap();
    let shared = format!("[{}, {}]", uniform_layer("3/4"), uniform_layer("1/4"));
    let inst = write_doc(&dir, "ef.json", 2, &[shared.clone(), shared.clone(), shared]);
    let out = dir.path().join("alloc.json");
    let svg = dir.path().join("ef.svg");
    let run = layercake(&[
        "solve",
        "--protocol",
        "ef3x2",
        "--in",
        path_str(&inst),
        "--out",
        path_str(&out),
        "--verify",
        "--render",
        path_str(&svg),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let svg = fs::read_to_string(&svg).unwrap();
    for cut in [">1/3<", ">2/3<", ">7/9<"] {
        assert!(svg.contains(cut), "missing {cut}");
    }
    let cuts: Vec<(String, String)> = json(&out)["cuts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["name"].as_str().unwrap().into(), c["at"].as_str().unwrap().into()))
        .collect();
    assert!(cuts.contains(&("c".into(), "7/9".into())));
}

#[test]
fn invalid_instance_exit_code() {
    let dir = TempDir::new().unwrap();
    let ok = format!("[{}, {}]", uniform_layer("1/2"), uniform_layer("1/2"));
    let short = format!("[{}, {}]", uniform_layer("1/2"), uniform_layer("2/5"));
    let inst = write_doc(&dir, "bad.json", 2, &[ok, short]);
    let out = dir.path().join("alloc.json");
    let run = layercake(&[
        "solve",
        "--protocol",
        "exact2x2",
        "--in",
        path_str(&inst),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(run.status.code(), Some(2));
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("agent 1") && err.contains("9/10"), "{err}");
}

#[test]
fn wrong_protocol_shape_is_a_validation_failure() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "three.json", 1, 3, 3);
    let out = dir.path().join("alloc.json");
    let run = layercake(&[
        "solve",
        "--protocol",
        "exact2x2",
        "--in",
        path_str(&inst),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn tampered_allocation_is_a_violation() {
    let dir = TempDir::new().unwrap();
    let inst = golden_2x2(&dir);
    let out = dir.path().join("alloc.json");
    let run = layercake(&[
        "solve",
        "--protocol",
        "exact2x2",
        "--in",
        path_str(&inst),
        "--out",
        path_str(&out),
    ]);
    assert!(run.status.success());
    // hand both layers to the first agent
    let mut doc = json(&out);
    let whole = serde_json::json!([[{"lo": "0", "hi": "1"}], [{"lo": "0", "hi": "1"}]]);
    doc["pieces"] = serde_json::json!([whole, [[], []]]);
    fs::write(&out, serde_json::to_string(&doc).unwrap()).unwrap();
    let check = layercake(&["verify", "--in", path_str(&inst), "--alloc", path_str(&out)]);
    assert_eq!(check.status.code(), Some(4));
    let report: Value = serde_json::from_slice(&check.stdout).unwrap();
    assert_eq!(report["exact"], false);
    assert_eq!(report["witnesses"]["proportional"], serde_json::json!([1]));
}

#[test]
fn oracle_finds_golden_knives() {
    let dir = TempDir::new().unwrap();
    let inst = golden_2x2(&dir);
    let run = layercake(&["oracle", "--in", path_str(&inst), "--grid", "16"]);
    assert!(run.status.success());
    let doc: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(
        (doc["deficiency"].as_str(), doc["x"].as_str(), doc["y"].as_str()),
        (Some("0"), Some("1/4"), Some("3/4"))
    );
    let big = layercake(&["oracle", "--in", path_str(&inst), "--grid", "65"]);
    assert_eq!(big.status.code(), Some(2));
}

#[test]
fn solve_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let inst = golden_2x2(&dir);
    let outs: Vec<Vec<u8>> = (0..2)
        .map(|k| {
            let out = dir.path().join(format!("run{k}.json"));
            let run = layercake(&[
                "solve",
                "--protocol",
                "exact2x2",
                "--in",
                path_str(&inst),
                "--out",
                path_str(&out),
                "--verify",
                "--count-queries",
            ]);
            assert!(run.status.success());
            fs::read(&out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
}
