use std::path::PathBuf;

use liedim::dimsub::counterexample_presentation;
use liedim::fplie::left_normed_sum;
use liedim_cli::{parse_presentation, run, ParseError, EXIT_INPUT, EXIT_OK};
use num_bigint::BigInt;
use proptest::prelude::*;
use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("liedim").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn invoke_json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--json", "-"]);
    let (code, out, err) = invoke(&full);
    let v: Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}\n{out}\n{err}"));
    (code, v)
}

const COUNTEREXAMPLE: &str = "gens: x1 x2 x3 x4;
rel: 4*x1 + 2*[x4,x3] + [x4,x2];
rel: 16*x2 + 4*[x4,x3] - [x4,x1];
rel: 64*x3 - 4*[x4,x2] - 2*[x4,x1];
class: 4;";

#[test]
fn parses_cyclic_ring() {
    let (p, w) = parse_presentation("gens: x; rel: 4*x;").unwrap();
    assert!(w.is_empty());
    assert_eq!(p.num_generators(), 1);
    assert_eq!(
        p.relators(),
        &[p.ctx().generator(0).scale(&BigInt::from(4))]
    );
    assert_eq!(
        p.nilpotent_quotient().unwrap().invariants().to_string(),
        "Z/4"
    );
}

#[test]
fn parses_counterexample() {
    let (p, _) = parse_presentation(COUNTEREXAMPLE).unwrap();
    assert_eq!(p, counterexample_presentation(4));
}

#[test]
fn parses_left_normed_list() {
    let (p, _) = parse_presentation("gens: x y; rel: [x,y,y] - [y,x];").unwrap();
    let expected = left_normed_sum(p.ctx(), &[(1, &[0, 1, 1]), (-1, &[1, 0])]);
    assert_eq!(p.relators(), &[expected]);
}

#[test]
fn nested_bracket_arguments() {
    let (p, _) =
        parse_presentation("gens: x y z; rel: [x + 2y, [y,z]] - ([x,[y,z]] + 2[y,[y,z]]);")
            .unwrap();
    assert!(p.relators().is_empty());
}

#[test]
fn error_positions() {
    let cases: [(&str, (usize, usize)); 4] = [
        ("gens: x y;\nrel: 3*x +;", (2, 11)),
        ("gens: x;\n\n  rel: [x, x;", (3, 13)),
        ("gens: x y;\nrel: x y;", (2, 8)),
        ("gens: x;\nclass 3;", (2, 7)),
    ];
    for (text, (line, col)) in cases {
        match parse_presentation(text) {
            Err(ParseError::Syntax { pos, expected, .. }) => {
                assert_eq!((pos.line, pos.col), (line, col), "{text:?}");
                assert!(!expected.is_empty());
            }
            other => panic!("{text:?}: {other:?}"),
        }
    }
    match parse_presentation("gens: x;\nrel: 2*[x, yy];") {
        Err(ParseError::Undeclared { pos, name }) => {
            assert_eq!((pos.line, pos.col, name.as_str()), (2, 12, "yy"))
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_presentation("gens: x; gens: y;"),
        Err(ParseError::Repeated { .. })
    ));
}

fn term() -> impl Strategy<Value = String> {
    let leaf = prop::sample::select(vec!["a", "b", "c"]).prop_map(str::to_string);
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop::collection::vec(inner, 2..=3).prop_map(|args| format!("[{}]", args.join(",")))
    })
}

fn expr() -> impl Strategy<Value = String> {
    prop::collection::vec((-40i64..=40, term()), 1..=4).prop_map(|ts| {
        ts.iter()
            .map(|(c, t)| format!("{c}*{t}"))
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn source_round_trip(rels in prop::collection::vec(expr(), 0..=3), class in 1usize..=4) {
        let text = format!("gens: a b c;\nclass: {class};\ncap: 6;\n{}", rels.iter().map(|r| format!("rel: {r};\n")).collect::<String>());
        let (p, _) = parse_presentation(&text).unwrap();
        let printed = p.to_source();
        let (q, w) = parse_presentation(&printed).unwrap();
        prop_assert!(w.is_empty());
        prop_assert_eq!(&p, &q);
        prop_assert_eq!(printed, q.to_source());
    }
}

#[test]
fn verify_counterexample_passes() {
    let (code, out, _) = invoke(&["verify-counterexample"]);
    assert_eq!(code, EXIT_OK);
    assert!(
        out.contains("Z + (Z/256)^3 + (Z/16)^2 + Z/8 + Z/4 + Z/2"),
        "{out}"
    );
    assert!(out.contains("delta_4/gamma_4 = Z/2"));
    let (code, v) = invoke_json(&["verify-counterexample"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        v["results"]["auxiliary_invariants"]["torsion"],
        serde_json::json!(["2", "4", "8", "16", "16", "256", "256", "256"])
    );
    assert_eq!(v["results"]["auxiliary_invariants"]["free_rank"], 1);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"a in delta_4") && names.contains(&"a not in gamma_4"));
    assert_eq!(v["passed"], true);
}

#[test]
fn dimquot_trivial_cases() {
    let (code, v) = invoke_json(&["dimquot", &data("abelian.lie"), "-n", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["results"]["quotient"]["display"], "0");
    let (code, v) = invoke_json(&["dimquot", &data("counterexample.lie"), "-n", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["results"]["quotient"]["display"], "0");
    assert_eq!(v["presentation"]["class_cap"], 3);
}

#[test]
fn dimquot_counterexample_degree_four() {
    let (code, v) = invoke_json(&["dimquot", &data("counterexample.lie"), "-n", "4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        v["results"]["quotient"]["torsion"],
        serde_json::json!(["2"])
    );
    let delta = &v["results"]["delta"];
    assert_eq!(
        delta["hnf"].as_array().unwrap().len(),
        delta["rank"].as_u64().unwrap() as usize
    );
    assert_eq!(
        delta["ambient"].as_u64().unwrap() as usize,
        v["results"]["hall_basis"].as_array().unwrap().len()
    );
}

#[test]
fn cap_assoc_does_not_change_delta() {
    let (_, a) = invoke_json(&[
        "dimquot",
        &data("counterexample.lie"),
        "-n",
        "3",
        "--cap-assoc",
        "3",
    ]);
    let (_, b) = invoke_json(&[
        "dimquot",
        &data("counterexample.lie"),
        "-n",
        "3",
        "--cap-assoc",
        "5",
    ]);
    assert_eq!(a["results"]["delta"], b["results"]["delta"]);
    let (code, _, err) = invoke(&[
        "dimquot",
        &data("counterexample.lie"),
        "-n",
        "4",
        "--cap-assoc",
        "2",
    ]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("error"));
}

#[test]
fn other_subcommands_succeed() {
    for args in [
        vec![
            "nilquot".to_string(),
            data("counterexample.lie"),
            "--cap".into(),
            "3".into(),
        ],
        vec!["preabelian".to_string(), data("counterexample.lie")],
        vec!["fox".to_string(), data("fox2.lie"), "-n".into(), "1".into()],
        vec![
            "sjogren".to_string(),
            data("fox2.lie"),
            "-n".into(),
            "2".into(),
        ],
        vec![
            "check".to_string(),
            data("abelian.lie"),
            "--seed".into(),
            "5".into(),
        ],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, out, err) = invoke(&args);
        assert_eq!(code, EXIT_OK, "{args:?}\n{out}\n{err}");
    }
}

#[test]
fn preabelian_reports_divisors() {
    let (_, v) = invoke_json(&["preabelian", &data("counterexample.lie")]);
    assert_eq!(
        v["results"]["divisors"],
        serde_json::json!(["4", "16", "64", "0"])
    );
}

#[test]
fn exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.lie");
    std::fs::write(&bad, "gens: x;\nrel: 2*y;\n").unwrap();
    let bad = bad.to_string_lossy().into_owned();
    let (code, out, err) = invoke(&["nilquot", &bad]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty());
    assert!(err.contains("2:8") && err.contains("undeclared"), "{err}");

    let missing = dir
        .path()
        .join("missing.lie")
        .to_string_lossy()
        .into_owned();
    assert_eq!(invoke(&["dimquot", &missing, "-n", "2"]).0, EXIT_INPUT);
    assert_eq!(invoke(&["dimquot", &data("abelian.lie")]).0, EXIT_INPUT);
    assert_eq!(
        invoke(&["dimquot", &data("abelian.lie"), "-n", "0"]).0,
        EXIT_INPUT
    );
    assert_eq!(
        invoke(&["sjogren", &data("abelian.lie"), "-n", "0"]).0,
        EXIT_INPUT
    );
    assert_eq!(invoke(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(invoke(&["--help"]).0, EXIT_OK);
}

#[test]
fn zero_relator_warns_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("z.lie");
    std::fs::write(&f, "gens: x y;\nrel: [x,y] + [y,x];\nrel: 3x;\n").unwrap();
    let (code, out, err) = invoke(&["nilquot", &f.to_string_lossy()]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("warning"), "{err}");
    assert!(out.contains("Z/3"), "{out}");
}

#[test]
fn sjogren_raises_lie_cap() {
    let (code, v) = invoke_json(&["sjogren", &data("fox2.lie"), "-n", "2", "--cap", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["presentation"]["lie_cap"], 3);
    assert_eq!(v["results"]["equal"], true);
}

#[test]
fn json_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("r{k}.json"));
        let p = path.to_string_lossy().into_owned();
        let (code, _, _) = invoke(&[
            "check",
            &data("counterexample.lie"),
            "--cap",
            "4",
            "--seed",
            "11",
            "--json",
            &p,
        ]);
        assert_eq!(code, EXIT_OK);
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(v["timing_ms"].as_f64().unwrap() >= 0.0);
        v.as_object_mut().unwrap().remove("timing_ms");
        v["command"] = Value::Null;
        seen.push(v);
    }
    assert_eq!(seen[0], seen[1]);
    assert_eq!(seen[0]["schema"], "v1");
    assert_eq!(seen[0]["seed"], 11);
    assert_eq!(seen[0]["input_sha256"].as_str().unwrap().len(), 64);
}
