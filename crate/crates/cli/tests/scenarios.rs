use dnlab::lab::{run_scenario, ScenarioConfig, ScenarioName};

fn run(name: ScenarioName, n: usize) -> dnlab::Summary {
    let cfg = ScenarioConfig::from_json(&format!(r#"{{"scenario": "{name}", "grid": {{"n": {n}}}, "seed": 1}}"#)).unwrap();
    run_scenario(&cfg.validate().unwrap()).unwrap().summary
}

#[test]
fn small_grid_scenarios_pass() {
    // the second-linearization levels start at (n + 3) / 4 nodes, pre-asymptotic below 33
    for (name, n) in [
        (ScenarioName::Convergence, 65),
        (ScenarioName::RigidityT1, 65),
        (ScenarioName::Cascade, 65),
        (ScenarioName::SecondLinearization, 129),
        (ScenarioName::Saturation, 65),
    ] {
        let s = run(name, n);
        let failed: Vec<_> = s.assertions.iter().filter(|a| !a.passed).collect();
        assert!(s.passed, "{name}: {failed:?}");
        assert!(s.divergence_audit.fields > 0, "{name}");
    }
}

#[test]
fn summary_reports_every_assertion_with_provenance() {
    let s = run(ScenarioName::Convergence, 33);
    let names: Vec<&str> = s.assertions.iter().map(|a| a.name.as_str()).collect();
    assert!(names.contains(&"manufactured-order") && names.contains(&"divergence-audit"));
    let json = serde_json::to_value(&s).unwrap();
    assert!(json["assertions"].as_array().unwrap().iter().all(|a| a["provenance"].is_string()));
}

#[test]
fn counterexample_distances_are_at_solver_precision() {
    let cfg = ScenarioConfig::from_json(
        r#"{"scenario": "counterexample", "grid": {"n": 33}, "params": {"random_count": 4, "amplitudes": [1, 100]}}"#,
    )
    .unwrap();
    let s = run_scenario(&cfg.validate().unwrap()).unwrap().summary;
    assert!(s.passed, "{:?}", s.assertions);
    assert!(s.metrics["max_dn_distance"].as_f64().unwrap() < 1e-8);
}
