use qcqp_hull_web::{analyze_js, decompose_at_js, example_problem_js, plot_grid_js};
use serde_json::Value;

fn example1() -> String {
    example_problem_js("example1", 0)
}

#[test]
fn analysis_round_trips_through_json() {
    let r: Value = serde_json::from_str(&analyze_js(&example1())).unwrap();
    assert_eq!(r["hull_guaranteed"], Value::Bool(true));
    assert_eq!(r["assumption1"], "pass");
}

#[test]
fn grid_marks_infeasible_points_null() {
    let g: Value = serde_json::from_str(&plot_grid_js(&example1(), -4.0, 4.0, 3)).unwrap();
    let d = g["tmin_d"].as_array().unwrap();
    let h = g["tmin_hull"].as_array().unwrap();
    assert_eq!(d.len(), 9);
    // centre of the 3×3 grid is the origin
    assert_eq!(d[4].as_f64(), Some(0.0));
    assert_eq!(h[4].as_f64(), Some(0.0));
    // (4, 0) violates x₁² − x₂² ≤ 5 but stays in the hull projection
    assert!(d[5].is_null());
    assert!(h[5].as_f64().is_some());
}

#[test]
fn clicked_point_decomposes_into_two_epigraph_points() {
    let c: Value = serde_json::from_str(&decompose_at_js(&example1(), 4.0, 2.0, 0.0)).unwrap();
    assert!((c["point"]["t"].as_f64().unwrap() - 33.5).abs() < 1e-9);
    assert_eq!(c["points"].as_array().unwrap().len(), 2);
}

#[test]
fn errors_are_reported_as_json() {
    let e: Value = serde_json::from_str(&analyze_js("{}")).unwrap();
    assert!(e["error"].is_string());
    let e: Value = serde_json::from_str(&example_problem_js("nope", 0)).unwrap();
    assert!(e["error"].is_string());
}
