use oigraph::cli::{run, EXIT_BUDGET, EXIT_OK, EXIT_USAGE};
use oigraph::graph::GraphJson;
use oigraph::OiGraph;

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(std::iter::once("oigraph").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn json(args: &[&str]) -> serde_json::Value {
    let (code, text) = call(args);
    assert_eq!(code, EXIT_OK, "{args:?}");
    serde_json::from_str(&text).unwrap()
}

#[test]
fn build_reports_vertex_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let (code, text) = call(&["build", "--nu", "2", "--delta", "0", "--field", "3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(text.starts_with("210 vertices, 873 edges, 24 loops"), "{text}");
    let doc: GraphJson = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(OiGraph::from_json(&doc).unwrap().len(), 210);

    let path = dir.path().join("g.dot");
    let (code, text) = call(&["build", "--nu", "1", "--delta", "1", "--disc", "z", "--field", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(text.starts_with("26 vertices"));
    assert!(std::fs::read_to_string(&path).unwrap().contains("graph oi {"));
}

#[test]
fn build_rejects_even_characteristic() {
    assert_eq!(call(&["build", "--nu", "1", "--delta", "0", "--field", "2"]).0, EXIT_USAGE);
}

#[test]
fn classify_dimension_one() {
    let rows = json(&["classify", "--nu", "2", "--field", "3", "--dim", "1", "--no-header"]);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().map(|r| r["count"].as_u64().unwrap()).sum::<u64>(), 40);
}

#[test]
fn classify_csv() {
    let (code, text) = call(&["classify", "--nu", "2", "--field", "3", "--dim", "1", "--format", "csv", "--no-header"]);
    assert_eq!(code, EXIT_OK);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let counts: u64 = reader.records().map(|r| r.unwrap()[5].parse::<u64>().unwrap()).sum();
    assert_eq!(counts, 40);
}

#[test]
fn diameter_of_plane_graph_is_infinite() {
    let rows = json(&["diameter", "--nu", "1", "--field", "3", "--no-header"]);
    assert_eq!(rows[0]["diameter"], "infinite");
    let rows = json(&["diameter", "--nu", "1", "--delta", "1", "--field", "3", "--no-header"]);
    assert_eq!(rows[0]["diameter"], "4");
}

#[test]
fn aut_methods() {
    assert_eq!(json(&["aut", "--method", "formula", "--nu", "1", "--field", "9", "--no-header"])[0]["order"], "768");
    assert_eq!(json(&["aut", "--method", "search", "--nu", "1", "--field", "5", "--no-header"])[0]["order"], "16");
    assert_eq!(json(&["aut", "--method", "generated", "--nu", "1", "--delta", "1", "--field", "3", "--no-header"])[0]["order"], "24");
    let uncovered = json(&["aut", "--method", "formula", "--nu", "2", "--delta", "2", "--field", "3", "--no-header"]);
    assert_eq!(uncovered[0]["covered"], false);
}

#[test]
fn header_is_optional() {
    let with = json(&["aut", "--method", "formula", "--nu", "1", "--field", "3"]);
    assert_eq!(with["header"]["tool"], "oigraph");
    assert_eq!(with["result"][0]["order"], "4");
}

#[test]
fn output_does_not_depend_on_threads() {
    let args = ["orbits", "--on", "edges", "--nu", "2", "--field", "3", "--no-header"];
    let (_, one) = call(&[&args[..], &["--threads", "1"]].concat());
    let (_, four) = call(&[&args[..], &["--threads", "4"]].concat());
    let (_, again) = call(&args);
    assert_eq!(one, four);
    assert_eq!(one, again);
    assert_eq!(serde_json::from_str::<serde_json::Value>(&one).unwrap().as_array().unwrap().len(), 24);
}

#[test]
fn usage_and_budget_exit_codes() {
    assert_eq!(call(&["verify", "--suite", "nightly"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["build", "--nu", "2", "--field", "3", "--budget", "10"]).0, EXIT_BUDGET);
    assert_eq!(call(&["aut", "--method", "search", "--nu", "2", "--field", "3", "--budget", "100"]).0, EXIT_BUDGET);
}
