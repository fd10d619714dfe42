use std::path::PathBuf;

use intfloer::cli::run;
use intfloer::complex::parse_complex;
use serde_json::Value;

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str], stdin: &str) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("intfloer").chain(args.iter().copied());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("intfloer-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn torus(m: usize) -> String {
    let o = cli(&["gen", "torus", "--m", &m.to_string()], "");
    assert_eq!(o.code, 0, "{}", o.err);
    o.out
}

const TWO_STEP: &str = r#"{
  "sigma_maslov": 4, "lambda": "1", "r": "0",
  "generators": [
    {"id": "x", "action": "3", "maslov": 0},
    {"id": "y", "action": "1", "maslov": 5}
  ],
  "edges": [["x", "y"]]
}"#;

#[test]
fn torus_cohomology_rows() {
    let o = cli(&["cohom"], &torus(2));
    assert_eq!(o.code, 0);
    assert_eq!(o.out, "-2\t1\n-1\t2\n0\t1\n");
}

#[test]
fn generated_torus_round_trips() {
    let text = torus(3);
    let c = parse_complex(&text).unwrap();
    assert_eq!(c.to_json(), text);
    assert_eq!(cli(&["validate"], &text).out, "ok\n");
}

#[test]
fn validate_names_the_rule() {
    let bad = r#"{"sigma_maslov": 4, "lambda": "1/2", "r": "0",
      "generators": [{"id": "x", "action": "1", "maslov": 0}, {"id": "y", "action": "1/2", "maslov": 2}],
      "edges": [["x", "y"]]}"#;
    let o = cli(&["validate"], bad);
    assert_eq!(o.code, 1);
    assert!(o.out.starts_with("shift-not-integral\t"), "{}", o.out);

    let rising = r#"{"sigma_maslov": 4, "lambda": "1/2", "r": "0",
      "generators": [{"id": "x", "action": "1/2", "maslov": 0}, {"id": "y", "action": "1", "maslov": 1}],
      "edges": [["x", "y"]]}"#;
    let o = cli(&["validate"], rising);
    assert_eq!(o.code, 1);
    assert!(o.out.starts_with("action-monotonicity\t"), "{}", o.out);
    // commands that need a valid complex refuse it
    assert_eq!(cli(&["cohom"], rising).code, 2);
}

#[test]
fn malformed_json_reports_position() {
    let o = cli(&["cohom"], "{\n  \"sigma_maslov\": 4,\n  \"lambda\": ]\n}");
    assert_eq!(o.code, 2);
    assert!(o.err.contains("line 3"), "{}", o.err);
    assert!(o.err.contains("column"), "{}", o.err);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cli(&["frobnicate"], "").code, 2);
    assert_eq!(cli(&["audin"], "").code, 2);
    assert_eq!(cli(&["--help"], "").code, 0);
}

#[test]
fn pages_of_a_long_differential() {
    // x -> y has grade gap 5 = 1 + 1·4, so it survives to page 1 and dies on page 2
    assert_eq!(cli(&["kl"], TWO_STEP).out, "2\n");
    let o = cli(&["pages", "--tsv", "--max-k", "2"], TWO_STEP);
    assert_eq!(o.code, 0);
    assert_eq!(o.out, "1\t0\t0\t1\t1\n1\t5\t1\t1\t0\n");
    let o = cli(&["pages", "--max-k", "2"], TWO_STEP);
    let v: Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(v["k_stable"], 2);
    assert_eq!(v["pages"][0]["cells"].as_array().unwrap().len(), 2);
    assert_eq!(v["pages"][1]["cells"].as_array().unwrap().len(), 0);
    assert_eq!(cli(&["hf"], TWO_STEP).out, "0\t0\n1\t0\n2\t0\n3\t0\n");
    assert_eq!(cli(&["poly", "--k", "1"], TWO_STEP).out, cli(&["poly"], TWO_STEP).out);
    assert_eq!(cli(&["poly", "--infinity"], TWO_STEP).out, "0\n");
}

#[test]
fn oracle_and_recursion_agree_on_fixtures() {
    for text in [torus(3), TWO_STEP.to_string()] {
        let o = cli(&["oracle"], &text);
        assert_eq!(o.code, 0, "{}", o.out);
        assert!(o.out.lines().all(|l| l.ends_with("\tmatch")));
        assert!(o.out.ends_with("inf\tmatch\n"));
        assert_eq!(cli(&["recursion"], &text).out, "ok\n");
    }
}

#[test]
fn output_is_deterministic() {
    let text = torus(4);
    for args in [&["pages"][..], &["pages", "--tsv"], &["hf", "--filtration"], &["cohom"]] {
        assert_eq!(cli(args, &text).out, cli(args, &text).out);
    }
    assert_eq!(torus(4), text);
    assert_eq!(cli(&["audin", "--m", "7"], "").out, cli(&["audin", "--m", "7"], "").out);
}

#[test]
fn audin_for_the_plane() {
    let o = cli(&["audin", "--m", "2"], "");
    assert_eq!(o.code, 0);
    let v: Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(v["m"], 2);
    assert_eq!(v["verdict"], 2);
    let table = cli(&["audin", "--m", "2", "--table"], "");
    assert_eq!(table.code, 0);
    assert!(!table.out.is_empty());
}

#[test]
fn decomposition_and_binomials() {
    let o = cli(&["decomp", "--m", "4", "--sigma", "4", "--k", "1"], "");
    assert_eq!(o.code, 1);
    let v: Value = serde_json::from_str(&o.out).unwrap();
    assert!(v["witness"].is_null());
    assert_eq!(v["certificate"]["descending_rescan_agrees"], true);

    // 1 + t^2 + t^3 + t^5 = (1 + t^2)(1 + t^3) with Σ = 1, k = 1
    let o = cli(&["decomp", "--coeffs", "1,0,1,1,0,1", "--sigma", "1", "--k", "1"], "");
    assert_eq!(o.code, 0, "{}", o.out);
    let v: Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(v["witness"].as_array().unwrap().len(), 1);

    assert_eq!(cli(&["binom", "--m", "4", "--n", "2"], "").out, "3\n");
}

#[test]
fn maslov_verbs() {
    let half_turn: Vec<Vec<Vec<f64>>> = (0..16)
        .map(|i| {
            let t = std::f64::consts::PI * i as f64 / 16.0;
            vec![vec![t.cos()], vec![t.sin()]]
        })
        .collect();
    let path = serde_json::json!({"m": 1, "closed": true, "samples": half_turn}).to_string();
    let p = scratch("half_turn.json", &path);
    let p = p.to_str().unwrap();
    assert_eq!(cli(&["maslov", "index", p], "").out, "1\n");
    assert_eq!(cli(&["maslov", "kunneth", p, p], "").out, "2\n");

    let o = cli(&["maslov", "monotone", "--class", "1/2:2", "--class", "3/2:6"], "");
    assert_eq!(o.code, 0, "{}", o.err);
    let v: Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(v["Sigma"], 2);
    assert_eq!(v["lambda"], "1/4");
    let o = cli(&["maslov", "monotone", "--class", "1:2", "--class", "1:4"], "");
    assert_eq!(o.code, 1);

    assert_eq!(cli(&["maslov", "lift", "--a", "1/2", "--r", "3/4", "--sigma", "2"], "").out, "5/2\t1\n");
}

#[test]
fn mapcheck_identity_and_homotopy() {
    let text = torus(2);
    let src = scratch("torus2.json", &text);
    let c = parse_complex(&text).unwrap();
    let entries: Vec<[String; 2]> = c.generators().iter().map(|g| [g.id.clone(), g.id.clone()]).collect();
    let id = scratch("identity.json", &serde_json::json!({ "entries": entries }).to_string());
    let zero = scratch("zero.json", r#"{"entries": []}"#);
    let (s, i, z) = (src.to_str().unwrap(), id.to_str().unwrap(), zero.to_str().unwrap());

    let o = cli(&["mapcheck", s, s, i, "--pages", "2"], "");
    assert_eq!(o.code, 0, "{}", o.err);
    assert_eq!(o.out, "ok\n1\tiso\n2\tiso\n");

    // identity and zero differ on cohomology, so no homotopy can connect them
    let o = cli(&["mapcheck", s, s, i, "--other", z, "--homotopy", z], "");
    assert_eq!(o.code, 1);
}

#[test]
fn quantum_torus_is_acyclic() {
    let matching = r#"{"edges": [{"from": [], "to": [1], "shift": 1}, {"from": [2], "to": [1, 2], "shift": 1}]}"#;
    let q = scratch("matching.json", matching);
    let o = cli(&["gen", "torus", "--m", "2", "--sigma", "2", "--quantum", q.to_str().unwrap()], "");
    assert_eq!(o.code, 0, "{}", o.err);
    assert!(o.err.contains("warning"), "Σ = 2 is outside the theory and should warn");
    assert_eq!(cli(&["hf"], &o.out).out, "0\t0\n1\t0\n");
    assert_eq!(cli(&["kl"], &o.out).out, "2\n");
    assert_eq!(cli(&["recursion", "--balance"], &o.out).out, "true\n");
}
