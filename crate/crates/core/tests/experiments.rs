use serde_json::json;

use nl4s::experiments::{
    closed_form_norms, config_hash, rerun, sweep, NormInflationConfig, RunPlan, SlopeFit, Study,
};
use nl4s::ErrorKind;

#[test]
fn closed_form_inflation_slope_on_the_short_grid_is_frozen() {
    let cfg = NormInflationConfig::default();
    let times = [4.0, 8.0, 16.0, 32.0];
    let norms = closed_form_norms(&cfg, &times).unwrap();
    let expected = [1.51856, 1.58652, 1.68897, 1.79152];
    for (n, e) in norms.iter().zip(expected) {
        assert!((n - e).abs() < 1e-5, "{norms:?}");
    }
    let fit = SlopeFit::loglog(&times, &norms).unwrap();
    assert!((fit.slope - 0.0805721578).abs() < 1e-9, "{}", fit.slope);
}

#[test]
fn studies_are_deterministic() {
    for study in [Study::Conservation, Study::SmallDispersion, Study::InitialNormScaling] {
        let a = study.run(json!({})).unwrap();
        let b = study.run(json!({})).unwrap();
        assert_eq!(a, b, "{study}");
        assert_eq!(rerun(&a).unwrap(), a, "{study}");
    }
}

#[test]
fn config_hash_ignores_key_order() {
    let a = config_hash("conservation", &json!({"nu": 3.0, "t_end": 1.0})).unwrap();
    let b = config_hash("conservation", &json!({"t_end": 1.0, "nu": 3.0})).unwrap();
    let c = config_hash("conservation", &json!({"t_end": 1.0, "nu": 5.0})).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn default_configs_round_trip_through_toml() {
    for study in Study::ALL {
        let text = study.default_config_toml();
        let plan = RunPlan::from_config_text(study, &text).unwrap();
        assert_eq!(plan.points().len(), 1, "{study}");
    }
}

#[test]
fn sweep_isolates_invalid_points() {
    let plan = RunPlan::from_toml(
        "study = \"norm-inflation\"\nworkers = 2\n[base]\nsolve = false\n[axes]\ngamma = [0.05, 0.5]\n",
    )
    .unwrap();
    let results = sweep(&plan).unwrap();
    assert_eq!(results.len(), 2);
    assert!(results[0].record.is_some());
    assert_eq!(results[1].error_kind, Some(ErrorKind::Config.name().to_string()));
}
