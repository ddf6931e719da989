use super::*;

fn scenario_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn load(name: &str) -> Scenario {
    let bytes = std::fs::read(scenario_path(name)).unwrap();
    parse_scenario(&bytes).unwrap()
}

#[test]
fn bundled_main_parses_and_runs() {
    let s = load("main.json");
    assert_eq!(s.name(), "main");
    let report = run(&s).unwrap();
    assert_eq!(report.blowups, 5);
    assert_eq!(report.chains.len(), 3);
    assert_eq!(report.k2_ambient, -5);
    assert_eq!(report.b2_ambient, 15);
    assert_eq!(report.chains[0].coeffs, vec![7, 3, 2, 2, 2, 2]);
    assert_eq!(report.k2_contracted, "2");
    assert_eq!(report.boundary_h1_display, "Z/4 + Z/4 + Z/72");
    assert_eq!(report.h1_blowdown_display.as_deref(), Some("Z/4"));
    assert!(!report.membership_certificates[0].in_image);
    assert!(report.pass, "failing checks: {:?}", report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
}

#[test]
fn all_bundled_scenarios_pass() {
    let cases = [
        ("main.json", "Z/4", 3),
        ("main_prime.json", "Z/4", 4),
        ("variant_6_2.json", "Z/4", 4),
        ("appendix.json", "Z/2 + Z/2", 3),
    ];
    for (file, h1, chains) in cases {
        let report = run(&load(file)).unwrap();
        assert_eq!(report.chains.len(), chains, "{file}");
        assert_eq!(report.k2_contracted, "2", "{file}");
        assert_eq!(report.h1_blowdown_display.as_deref(), Some(h1), "{file}");
        assert!(
            report.pass,
            "{file} failing checks: {:?}",
            report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
        );
        assert_eq!(report.provenance.figure, 0, "{file}");
        assert_eq!(report.provenance.asserted, 0, "{file}");
    }
}

#[test]
fn assumptions_and_annotations_are_surfaced() {
    let report = run(&load("main.json")).unwrap();
    let names: Vec<&str> = report.assumptions.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, vec!["global_smoothing", "surgery_model"]);
    assert_eq!(report.annotations.len(), 2);
    assert!(report.annotations[0].contains("nef"));
    assert!(report.annotations[1].contains("K^2 = 2 > 0"));
    let text = report.render_text(false);
    assert!(text.contains("assumption global_smoothing:"));
    assert!(text.contains("annotation: "));

    // no nef certificate on a strict-failure list still reports nef-on-list
    // annotations, since zero degrees keep nefness
    let report = run(&load("variant_6_2.json")).unwrap();
    assert_eq!(report.annotations.len(), 2);
}

#[test]
fn report_json_is_deterministic() {
    let s = load("main.json");
    let a = run(&s).unwrap().to_json();
    let b = run(&load("main.json")).unwrap().to_json();
    assert_eq!(a, b);
    assert!(a.ends_with('\n'));
}

#[test]
fn empty_chain_list_reports_ambient_k2() {
    let text = r#"{
        "schema": 1,
        "name": "empty",
        "surface": {"name": "S", "k2": -3, "b2": 5, "h1": []},
        "curves": [],
        "expected": {}
    }"#;
    let s = parse_scenario_str(text).unwrap();
    let report = run(&s).unwrap();
    assert!(report.pass);
    assert_eq!(report.k2_contracted, "-3");
    assert_eq!(report.h1_blowdown_display.as_deref(), Some("0"));
}

#[test]
fn unknown_chain_curve_is_a_schema_error() {
    let text = r#"{
        "schema": 1,
        "name": "bad",
        "surface": {"name": "S", "k2": 0, "b2": 10, "h1": [2]},
        "curves": [{"name": "A", "self_int": -4}],
        "chains": [{"name": "C1", "curves": ["A", "B"]}]
    }"#;
    let err = parse_scenario_str(text).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("chains[0].curves[1]"), "got: {msg}");
    assert!(msg.contains("unknown curve 'B'"), "got: {msg}");
}

#[test]
fn syntax_and_version_errors() {
    assert!(matches!(
        parse_scenario_str("{ not json"),
        Err(ScenarioError::Json(_))
    ));
    let err = parse_scenario_str(
        r#"{"schema": 2, "name": "x", "surface": {"name": "S", "k2": 0, "b2": 0, "h1": []}, "curves": []}"#,
    )
    .unwrap_err();
    assert!(err.to_string().contains("unsupported schema version"));
}

#[test]
fn figure_data_needs_a_note_and_is_counted() {
    let missing = r#"{
        "schema": 1,
        "name": "fig",
        "surface": {"name": "S", "k2": 0, "b2": 10, "h1": [2]},
        "curves": [{"name": "A", "self_int": -2}, {"name": "B", "self_int": -2}],
        "points": [{"name": "p", "branches": [["A",1],["B",1]], "provenance": "figure"}]
    }"#;
    let err = parse_scenario_str(missing).unwrap_err();
    assert!(err.to_string().contains("points[0].note"));

    let tagged = r#"{
        "schema": 1,
        "name": "fig",
        "surface": {"name": "S", "k2": 0, "b2": 10, "h1": [2]},
        "curves": [{"name": "A", "self_int": -2}, {"name": "B", "self_int": -2}],
        "points": [{"name": "p", "branches": [["A",1],["B",1]], "provenance": "figure", "note": "diagram-only crossing"}]
    }"#;
    let report = run(&parse_scenario_str(tagged).unwrap()).unwrap();
    assert_eq!(report.provenance.figure, 1);
    assert_eq!(report.provenance.flagged, vec!["point p (figure)".to_string()]);
}

#[test]
fn chains_sharing_a_curve_are_rejected() {
    let text = r#"{
        "schema": 1,
        "name": "overlap",
        "surface": {"name": "S", "k2": 0, "b2": 10, "h1": [2]},
        "curves": [{"name": "A", "self_int": -4}],
        "chains": [{"name": "C1", "curves": ["A"]}, {"name": "C2", "curves": ["A"]}]
    }"#;
    let err = parse_scenario_str(text).unwrap_err();
    assert!(err.to_string().contains("two chains"));
}

#[test]
fn membership_element_length_is_checked() {
    let text = r#"{
        "schema": 1,
        "name": "m",
        "surface": {"name": "S", "k2": 0, "b2": 10, "h1": [2]},
        "curves": [{"name": "A", "self_int": -4}],
        "chains": [{"name": "C1", "curves": ["A"]}],
        "membership_checks": [{"name": "x", "element": [1, 0], "expect_in_image": false}]
    }"#;
    let err = parse_scenario_str(text).unwrap_err();
    assert!(err.to_string().contains("membership_checks[0].element"));
}

#[test]
fn mismatched_expected_value_fails_the_report() {
    let text = r#"{
        "schema": 1,
        "name": "wrong",
        "surface": {"name": "S", "k2": 0, "b2": 10, "h1": [2]},
        "curves": [{"name": "A", "self_int": -4}],
        "chains": [{"name": "C1", "curves": ["A"]}],
        "expected": {"chains": [{"p": 5, "q": 1, "class_t": null}]}
    }"#;
    let report = run(&parse_scenario_str(text).unwrap()).unwrap();
    assert!(!report.pass);
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    assert!(failed.contains(&"chains[0].p"));
    assert!(failed.contains(&"chains[0].class_t"));
}

#[test]
fn replay_errors_carry_the_stage() {
    let text = r#"{
        "schema": 1,
        "name": "badblowup",
        "surface": {"name": "S", "k2": 0, "b2": 10, "h1": [2]},
        "curves": [{"name": "A", "self_int": -2}],
        "blowups": [{"at": "nowhere", "name": "e1"}]
    }"#;
    let err = run(&parse_scenario_str(text).unwrap()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("stage 'blowups'"), "got: {msg}");
    assert!(msg.contains("nowhere"), "got: {msg}");
}

#[test]
fn graph_export_of_replayed_configuration() {
    let s = load("main.json");
    let cfg = replayed_configuration(&s).unwrap();
    let dot = cfg.dual_graph_dot();
    assert!(dot.starts_with("graph dual {"));
    assert!(dot.contains("\"E16\" [label=\"E16 (-7)\"]"));
    assert!(dot.contains("\"E16\" -- \"E2\"") || dot.contains("\"E2\" -- \"E16\""));
}

#[test]
fn text_rendering_mentions_key_results() {
    let report = run(&load("main.json")).unwrap();
    let text = report.render_text(false);
    assert!(text.contains("h1_blowdown: Z/4"));
    assert!(text.contains("k2 contracted = 2"));
    assert!(text.contains("result: PASS"));
    assert!(!text.contains('\x1b'));
    let colored = report.render_text(true);
    assert!(colored.contains("\x1b[32m"));
}
