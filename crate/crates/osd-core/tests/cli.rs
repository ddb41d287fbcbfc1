// End-to-end checks of the command line binary: exit codes, output shapes,
// and determinism of the machine-readable reports.

use std::path::PathBuf;
use std::process::{Command, Output};

const FIBONACCI: &str = "a -> ab\nb -> a\n";
const THUE_MORSE: &str = "a -> ab\nb -> ba\n";
const RESHUFFLED_FIBONACCI: &str = "a -> aab\nb -> ba\n";
const NON_PRIMITIVE: &str = "a -> ab\nb -> b\n";

fn osd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osd"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be utf-8")
}

fn rule_file(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).expect("rule file should be writable");
    path
}

fn path_str(path: &PathBuf) -> &str {
    path.to_str().expect("temp path should be utf-8")
}

#[test]
fn analyze_reports_the_fibonacci_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let rule = rule_file(&dir, "fib.rule", FIBONACCI);
    let out = osd(&["analyze", path_str(&rule)]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let line = |key: &str| {
        text.lines()
            .find(|l| l.starts_with(key))
            .unwrap_or_else(|| panic!("missing `{key}` line in:\n{text}"))
            .to_owned()
    };
    assert!(line("pure point").ends_with("true"));
    assert!(line("char poly").ends_with("x^2 - x - 1"));
    assert!(line("osd").contains("1 (exact, bounds [1, 1])"));
    assert!(line("boundary dim").ends_with("0"));
}

#[test]
fn analyze_json_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let rule = rule_file(&dir, "fib.rule", FIBONACCI);
    let first = osd(&["analyze", path_str(&rule), "--json"]);
    let second = osd(&["analyze", path_str(&rule), "--json"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "json reports differ between runs");

    let v: serde_json::Value = serde_json::from_slice(&first.stdout).expect("valid json");
    assert_eq!(v["pure_point"], serde_json::json!(true));
    assert_eq!(v["lambda"]["decimal"], serde_json::json!(1.61803398875));
    assert_eq!(v["osd"]["value"], serde_json::json!(1.0));
    assert_eq!(v["osd"]["exact"], serde_json::json!(true));
    assert_eq!(v["window"]["boundary_dim"], serde_json::json!(0.0));
    assert_eq!(v["pair_graph_size"], serde_json::json!(3));
}

#[test]
fn analyze_flags_a_non_primitive_rule() {
    let dir = tempfile::tempdir().unwrap();
    let rule = rule_file(&dir, "np.rule", NON_PRIMITIVE);
    let out = osd(&["analyze", path_str(&rule)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("primitive"));

    let out = osd(&["analyze", path_str(&rule), "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid json");
    assert_eq!(v["error"]["code"], serde_json::json!(2));
}

#[test]
fn analyze_reports_parse_and_io_failures() {
    let dir = tempfile::tempdir().unwrap();
    let rule = rule_file(&dir, "bad.rule", "a -> ab\nb => a\n");
    let out = osd(&["analyze", path_str(&rule)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"));

    let missing = dir.path().join("nonexistent.rule");
    let out = osd(&["analyze", path_str(&missing)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_respects_the_pair_cap() {
    let dir = tempfile::tempdir().unwrap();
    let rule = rule_file(&dir, "rfib.rule", RESHUFFLED_FIBONACCI);
    let out = osd(&["analyze", path_str(&rule), "--max-pairs", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("cap"));
}

#[test]
fn analyze_marks_spectra_that_are_not_pure_point() {
    let dir = tempfile::tempdir().unwrap();
    let rule = rule_file(&dir, "tm.rule", THUE_MORSE);
    let out = osd(&["analyze", path_str(&rule), "--json"]);
    assert_eq!(out.status.code(), Some(0), "not pure point is still a successful analysis");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid json");
    assert_eq!(v["pure_point"], serde_json::json!(false));
    assert_eq!(v["osd"]["value"], serde_json::json!("infinite"));
}

#[test]
fn graph_writes_the_expected_dot_file() {
    let expected = "digraph balanced_pairs {\n\
                    \x20 rankdir=LR;\n\
                    \x20 n0 [label=\"a|a\", shape=box];\n\
                    \x20 n1 [label=\"b|b\", shape=box];\n\
                    \x20 n2 [label=\"ab|ba\", shape=ellipse];\n\
                    \x20 n0 -> n0 [label=\"1\"];\n\
                    \x20 n0 -> n1 [label=\"1\"];\n\
                    \x20 n1 -> n0 [label=\"1\"];\n\
                    \x20 n2 -> n0 [label=\"1\"];\n\
                    \x20 n2 -> n2 [label=\"1\"];\n\
                    }\n";

    let dir = tempfile::tempdir().unwrap();
    let rule = rule_file(&dir, "fib.rule", FIBONACCI);
    let out = osd(&["graph", path_str(&rule)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), expected);

    let dot = dir.path().join("fib.dot");
    let out = osd(&["graph", path_str(&rule), "--dot", path_str(&dot)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&dot).unwrap(), expected);
}

#[test]
fn oracle_writes_the_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let rule = rule_file(&dir, "fib.rule", FIBONACCI);
    let csv = dir.path().join("fib.csv");
    let out = osd(&["oracle", path_str(&rule), "--csv", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("estimated log lambda_dc"));

    let rows = std::fs::read_to_string(&csv).unwrap();
    let mut lines = rows.lines();
    assert_eq!(lines.next(), Some("n,total_length,discrepancy_length,density"));
    assert_eq!(lines.count(), 26, "one row per iteration step");

    let out = osd(&["oracle", path_str(&rule), "--iterations", "2"]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn corpus_filter_selects_single_entries() {
    let out = osd(&["corpus", "--only", "fibonacci"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));

    let out = osd(&["corpus", "--only", "constant_length"]);
    assert_eq!(out.status.code(), Some(5), "stored reference rows for this entry do not match");
    assert!(stdout(&out).contains("FAIL"));

    let out = osd(&["corpus", "--only", "nonesuch"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn corpus_json_rows_are_structured() {
    let out = osd(&["corpus", "--only", "fibonacci", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid json");
    let rows = v["rows"].as_array().expect("rows array");
    assert!(!rows.is_empty());
    for row in rows {
        assert_eq!(row["entry"], serde_json::json!("fibonacci"));
        assert_eq!(row["pass"], serde_json::json!(true));
        assert!(row["check"].is_string());
    }
}

#[test]
fn product_adds_factor_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let fib = rule_file(&dir, "fib.rule", FIBONACCI);
    let out = osd(&["product", path_str(&fib), path_str(&fib)]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let line = text
        .lines()
        .find(|l| l.starts_with("product osd"))
        .unwrap_or_else(|| panic!("missing product line in:\n{text}"));
    assert!(line.ends_with('2'), "fibonacci squared as a product: {line}");

    let tm = rule_file(&dir, "tm.rule", THUE_MORSE);
    let out = osd(&["product", path_str(&fib), path_str(&tm)]);
    assert_eq!(out.status.code(), Some(4), "factor without a finite dimension");
}

#[test]
fn help_and_usage_errors() {
    let out = osd(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("analyze"));

    let out = osd(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn printed_rules_parse_back_identically() {
    use osd_core::corpus;
    use osd_core::parse::{parse_rule, print_rule};
    for text in [
        corpus::FIBONACCI,
        corpus::FIBONACCI_SQUARED,
        corpus::RESHUFFLED_FIBONACCI,
        corpus::TRIBONACCI,
        corpus::RESHUFFLED_TRIBONACCI,
        corpus::PLASTIC,
        corpus::TERNARY,
        corpus::CONSTANT_LENGTH,
        corpus::THUE_MORSE,
    ] {
        let rule = parse_rule(text).expect("corpus rules parse");
        let printed = print_rule(&rule);
        let reparsed = parse_rule(&printed).expect("printed form parses");
        assert_eq!(rule, reparsed, "round trip changed the rule for {text}");
    }
}
