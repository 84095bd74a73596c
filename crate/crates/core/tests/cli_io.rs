//! End-to-end checks of the file formats and the command-line surface:
//! domain-spec parsing, CSV/JSON output shape, byte-level determinism, and
//! certificate re-validation.

use markgeo::cli::{
    cmd_convexity, cmd_distance, cmd_figure, cmd_functional, parse_domain_spec,
    revalidate_certificate,
};
use markgeo::markowitz::ChainBudget;
use std::process::Command;

const DIAMOND_SPEC: &str = r#"{
  "schema": 1,
  "ambient": { "p": 1, "q": 1 },
  "kind": "diamond",
  "params": { "a": [-1.0, 0.0], "b": [1.0, 0.0] }
}"#;

fn budget() -> ChainBudget {
    ChainBudget {
        seeds: 8,
        refine_iters: 80,
        ..ChainBudget::default()
    }
}

#[test]
fn functional_csv_shape_and_determinism() {
    let d = parse_domain_spec(DIAMOND_SPEC).unwrap();
    let a = cmd_functional(&d, 8, 4, 7).unwrap();
    let b = cmd_functional(&d, 8, 4, 7).unwrap();
    assert_eq!(a, b, "identical (spec, seed) must be byte-identical");
    let c = cmd_functional(&d, 8, 4, 8).unwrap();
    assert_ne!(a, c, "different seeds must differ");
    let mut lines = a.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, "x0,x1,v0,v1,F");
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        for f in &fields {
            let v: f64 = f.parse().unwrap();
            assert!(v.is_finite());
            // 17 significant digits survive a parse/format round trip.
            assert_eq!(format!("{:.16e}", v), *f);
        }
        rows += 1;
    }
    assert_eq!(rows, 8 * 4);
}

#[test]
fn distance_json_revalidates() {
    let d = parse_domain_spec(DIAMOND_SPEC).unwrap();
    let doc = cmd_distance(&d, &[-0.2, 0.1], &[0.3, -0.25], &budget()).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&doc).unwrap();
    assert_eq!(parsed["schema"], 1);
    assert_eq!(parsed["status"], "ok");
    let lower = parsed["lower"].as_f64().unwrap();
    let upper = parsed["upper"].as_f64().unwrap();
    assert!(lower <= upper + 1e-9);
    let rescored = revalidate_certificate(&d, &doc).unwrap();
    assert!(
        (rescored - upper).abs() <= 1e-12 * (1.0 + upper),
        "re-scored certificate {rescored} vs reported {upper}"
    );
    // Same inputs, same bytes.
    let again = cmd_distance(&d, &[-0.2, 0.1], &[0.3, -0.25], &budget()).unwrap();
    assert_eq!(doc, again);
}

#[test]
fn spec_error_cases() {
    assert!(parse_domain_spec("{ not json").is_err());
    let wrong_schema = DIAMOND_SPEC.replace("\"schema\": 1", "\"schema\": 2");
    assert!(parse_domain_spec(&wrong_schema).is_err());
    let bad_kind = DIAMOND_SPEC.replace("\"diamond\"", "\"dodecahedron\"");
    assert!(parse_domain_spec(&bad_kind).is_err());
    let bad_sig = DIAMOND_SPEC.replace("\"p\": 1, \"q\": 1", "\"p\": 2, \"q\": 2");
    assert!(parse_domain_spec(&bad_sig).is_err());
}

#[test]
fn boolean_spec_composes() {
    let spec = r#"{
      "schema": 1,
      "ambient": { "p": 1, "q": 1 },
      "boolean": {
        "op": "intersection",
        "children": [
          { "kind": "diamond", "params": { "a": [-1.0, 0.0], "b": [1.0, 0.0] } },
          { "kind": "half_space_future",
            "params": { "base": [0.0, 0.0], "normal": [1.0, 0.0] } }
        ]
      }
    }"#;
    let d = parse_domain_spec(spec).unwrap();
    assert!(d.contains(&[0.3, 0.0]));
    assert!(!d.contains(&[-0.3, 0.0]));
    assert!(!d.contains(&[0.3, 0.8]));
}

#[test]
fn figures_render_and_unknown_id_fails() {
    for id in [
        "ball-levelsets",
        "slit-degeneracy",
        "hb-bilipschitz",
        "diamond-pinch",
    ] {
        let out = cmd_figure(id, 8, 0, 4).unwrap();
        assert!(out.lines().count() > 2, "figure {id} produced no rows");
    }
    assert!(cmd_figure("not-a-figure", 8, 0, 4).is_err());
    assert!(cmd_figure("ball-levelsets", 4, 0, 4).is_err());
}

#[test]
fn convexity_json_shape() {
    let d = parse_domain_spec(DIAMOND_SPEC).unwrap();
    let doc = cmd_convexity(&d, 0).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&doc).unwrap();
    assert_eq!(parsed["verdict"], "likely_conformally_convex");
    assert!(parsed["samples"].as_array().unwrap().len() > 0);
}

#[test]
fn binary_round_trip_is_deterministic() {
    let exe = env!("CARGO_BIN_EXE_markgeo");
    let dir = std::env::temp_dir().join("markgeo-cli-io-test");
    std::fs::create_dir_all(&dir).unwrap();
    let spec_path = dir.join("diamond.json");
    std::fs::write(&spec_path, DIAMOND_SPEC).unwrap();
    let run = || {
        let out = Command::new(exe)
            .args([
                "distance",
                "--domain",
                spec_path.to_str().unwrap(),
                "--seed",
                "3",
                "--budget-m",
                "3",
                "--x=-0.2,0.1",
                "--y=0.3,-0.25",
            ])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    assert_eq!(run(), run());
}
