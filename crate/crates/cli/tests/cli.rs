use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn regopen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regopen")).args(args).output().expect("binary runs")
}

fn json_out(args: &[&str]) -> Value {
    let out = regopen(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

/// `"p/q"` or `"p"` as a numerator/denominator pair.
fn frac(v: &Value) -> (i128, i128) {
    let s = v.as_str().expect("rational string");
    match s.split_once('/') {
        Some((p, q)) => (p.parse().unwrap(), q.parse().unwrap()),
        None => (s.parse().unwrap(), 1),
    }
}

fn le(a: (i128, i128), b: (i128, i128)) -> bool {
    a.0 * b.1 <= b.0 * a.1
}

fn lt(a: (i128, i128), b: (i128, i128)) -> bool {
    a.0 * b.1 < b.0 * a.1
}

const LEBESGUE_UNIT: &str = r#"{"rule":"lebesgue","ambient":{"kind":"open","a":"0","b":"1"}}"#;
const IDENTITY: &str = r#"{"breakpoints":["0","1"],"values":["0","1"]}"#;

#[test]
fn join_of_adjacent_intervals_fills_the_gap() {
    let v = json_out(&["algebra", "join", r#"{"intervals":[["0","1"]]}"#, r#"{"intervals":[["1","2"]]}"#]);
    assert_eq!(v["intervals"], serde_json::json!([["0", "2"]]));
    assert_eq!(v["ambient"]["kind"], "full");
}

#[test]
fn negation_and_boundary() {
    let set = r#"{"ambient":{"kind":"open","a":"0","b":"1"},"intervals":[["0","1/2"]]}"#;
    let v = json_out(&["algebra", "neg", set]);
    assert_eq!(v["intervals"], serde_json::json!([["1/2", "1"]]));
    let v = json_out(&["algebra", "boundary", set]);
    assert_eq!(v["points"], serde_json::json!(["1/2"]));
    let v = json_out(&["algebra", "subset", set, r#"{"intervals":[["0","3/4"]]}"#]);
    assert_eq!(v["result"], true);
}

#[test]
fn integrate_identity_within_tolerance() {
    let v = json_out(&["integrate", "--credence", LEBESGUE_UNIT, "--fn", IDENTITY, "--eps", "1/100"]);
    let value = frac(&v["value"]);
    assert!(le((49, 100), value) && le(value, (1, 2)), "{value:?}");
    assert_eq!(v["exact"], "1/2");
    assert!(v["decimal"].as_str().unwrap().starts_with("0.49"));
}

#[test]
fn trace_rows_increase_to_the_reported_value() {
    let out = regopen(&["integrate", "--credence", LEBESGUE_UNIT, "--fn", IDENTITY, "--eps", "1/20", "--trace", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,value"));
    let rows: Vec<(i128, (i128, i128))> = lines
        .map(|l| {
            let (n, v) = l.split_once(',').unwrap();
            (n.parse().unwrap(), frac(&Value::String(v.into())))
        })
        .collect();
    assert_eq!(rows.last().unwrap().0, 20);
    assert!(rows.windows(2).all(|w| le(w[0].1, w[1].1)));
    // floor(n x)/n integrates to (n-1)/(2n)
    assert_eq!(rows.last().unwrap().1, (19, 40));
}

#[test]
fn bayes_partition_check() {
    let v = json_out(&[
        "expect",
        "--credence",
        LEBESGUE_UNIT,
        "--fn",
        IDENTITY,
        "--set",
        r#"{"intervals":[["0","1/2"]]}"#,
        "--partition",
        r#"[{"intervals":[["0","1/8"],["1/4","1/2"]]},{"intervals":[["1/8","1/4"]]}]"#,
    ]);
    assert_eq!(v["exact"], "1/4");
    assert_eq!(v["bayes"], "1/4");
    assert_eq!(v["partition_consistent"], true);
}

#[test]
fn pushforward_and_change_of_variables() {
    let map = r#"{"breakpoints":["0","1"],"values":["1","0"],"codomain":{"kind":"open","a":"0","b":"1"}}"#;
    let v = json_out(&[
        "pushforward",
        "--map",
        map,
        "--credence",
        r#"{"rule":"point_mass","x":"1/4","side":"right","ambient":{"kind":"open","a":"0","b":"1"}}"#,
        "--fn",
        IDENTITY,
        "--set",
        r#"{"intervals":[["1/2","1"]]}"#,
    ]);
    // a decreasing map sends the right germ at 1/4 to a left germ at 3/4
    assert_eq!(v["credence"]["rule"], "point_mass");
    assert_eq!(v["credence"]["x"], "3/4");
    assert_eq!(v["credence"]["side"], "left");
    assert_eq!(v["change_of_variables"]["lhs_exact"], "3/4");
    assert_eq!(v["change_of_variables"]["rhs_exact"], "3/4");
}

#[test]
fn liminal_decomposition_shares() {
    let mu = r#"{"ambient":{"kind":"closed","a":"-1","b":"1"},"rule":"mixture","parts":[
        {"w":"1/2","of":{"rule":"lebesgue"}},
        {"w":"1/6","of":{"rule":"point_mass","x":"0","side":"left"}},
        {"w":"1/3","of":{"rule":"point_mass","x":"0","side":"right"}}]}"#;
    let v = json_out(&["liminal", "decompose", "--credence", mu]);
    let expected: Value = serde_json::from_str(
        r#"{"lebesgue_weight":"1/2","atoms":[{"x":"0","mass":"1/2","left":"1/3","right":"2/3"}]}"#,
    )
    .unwrap();
    assert_eq!(v, expected);
}

#[test]
fn stone_report_on_a_two_generator_algebra() {
    let gens = r#"{"ambient":{"kind":"open","a":"0","b":"1"},"generators":[{"intervals":[["0","1/2"]]},{"intervals":[["1/4","3/4"]]}]}"#;
    let emit = tmp("stone.json");
    let v = json_out(&["stone", "--generators", gens, "--credence", LEBESGUE_UNIT, "--emit", emit.to_str().unwrap()]);
    assert_eq!(v["atoms"].as_array().unwrap().len(), 4);
    assert_eq!(v["weights"], serde_json::json!(["1/4", "1/4", "1/4", "1/4"]));
    assert_eq!(v["report"]["elements_checked"], 16);
    assert_eq!(v["report"]["passed"], true);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(emit).unwrap()).unwrap();
    assert_eq!(written, v);
}

#[test]
fn oracle_table_and_empty_failures() {
    let emit = tmp("oracle_failures.json");
    let out = regopen(&["oracle", "--max-points", "4", "--checks", "baire,stone,algebra", "--emit", emit.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let counts: Vec<&str> = text.lines().skip(2).map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(counts, ["1", "4", "29", "355"]);
    assert_eq!(std::fs::read_to_string(emit).unwrap().trim(), "[]");
}

#[test]
fn cantor_report_matches_closed_form() {
    for depth in [8usize, 20] {
        let v = json_out(&["cantor", "--depth", &depth.to_string(), "--ratios", "quarter"]);
        let two_n = 1i128 << depth;
        assert_eq!(frac(&v["measure"]), (two_n - 1, 2 * two_n));
        assert_eq!(v["L_plus_R"], v["measure"]);
        assert!(lt(frac(&v["gap"]), (1, two_n)));
    }
    let csv = tmp("cantor.csv");
    let out = regopen(&["cantor", "--depth", "5", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = std::fs::read_to_string(csv).unwrap();
    assert_eq!(rows.lines().count(), 7);
    assert!(rows.lines().nth(2).unwrap().starts_with("1,1/4,"));
}

#[test]
fn nocredence_stays_below_one() {
    let v = json_out(&["nocredence", "--cdf", IDENTITY, "--depth", "10"]);
    let m = frac(&v["measure"]);
    assert!(m.0 < m.1);
    assert_eq!(v["L_plus_R"], v["measure"]);
    assert_eq!(v["set"]["intervals"].as_array().unwrap().len(), 10);
}

#[test]
fn output_is_deterministic() {
    let args = ["--decimals", "6", "integrate", "--credence", LEBESGUE_UNIT, "--fn", IDENTITY, "--eps", "1/7"];
    assert_eq!(regopen(&args).stdout, regopen(&args).stdout);
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(regopen(&["algebra", "join", r#"{"intervals":[["1","0"]]}"#]).status.code(), Some(2));
    assert_eq!(regopen(&["algebra", "neg", "{not json"]).status.code(), Some(2));
    assert_eq!(regopen(&["integrate", "--credence", LEBESGUE_UNIT, "--fn", IDENTITY, "--bogus"]).status.code(), Some(2));
    assert_eq!(regopen(&["cantor", "--depth", "3", "--ratios", "1/2,2"]).status.code(), Some(2));
    assert_eq!(regopen(&["oracle", "--checks", "nonsense"]).status.code(), Some(2));
}

#[test]
fn quick_selftest_passes() {
    let out = regopen(&["selftest", "--quick"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 13);
}
