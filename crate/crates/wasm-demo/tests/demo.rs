use serde_json::{json, Value};
use stabpairs_wasm_demo::{descent_curve, mahler, polytope};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn binary(degree: u32, terms: Value) -> Value {
    json!({"schema": "v1", "shape": {"kind": "vector", "cols": 2}, "degree": degree, "terms": terms})
}

#[test]
fn polytope_of_a_ternary_quadric() {
    // x0 x1 + x2^2: two monomials, both vertices.
    let q = json!({"schema": "v1", "shape": {"kind": "vector", "cols": 3}, "degree": 2,
        "terms": [{"exp": [1, 1, 0], "c": "1"}, {"exp": [0, 0, 2], "c": "1"}]});
    let out = parse(&polytope(&q.to_string()).unwrap());
    let mut points: Vec<Vec<i64>> = serde_json::from_value(out["points"].clone()).unwrap();
    points.sort();
    assert_eq!(points, vec![vec![0, 0, 2], vec![1, 1, 0]]);
    assert_eq!(out["vertices"].as_array().unwrap().len(), 2);
    assert_eq!(out["degree"], 2);
}

#[test]
fn errors_come_back_as_strings() {
    assert!(polytope("{").unwrap_err().contains("JSON"));
    assert!(mahler(&binary(1, json!([])).to_string(), 0.0, 1000, 0).is_err());
}

#[test]
fn mahler_of_a_monomial() {
    // log |x^2|_0 on P^1 is -(2/2)(1/1) = -1 from the harmonic-sum formula for monomials.
    let f = binary(2, json!([{"exp": [2, 0], "c": "1"}]));
    let est = parse(&mahler(&f.to_string(), 0.0, 100_000, 11).unwrap());
    let (v, se) = (est["log_value"].as_f64().unwrap(), est["stderr"].as_f64().unwrap());
    assert!((v + 1.0).abs() <= 4.0 * se, "{v} ± {se}");
    assert_eq!(mahler(&f.to_string(), 0.0, 5000, 3).unwrap(), mahler(&f.to_string(), 0.0, 5000, 3).unwrap());
}

#[test]
fn descent_curve_reaches_the_closed_orbit_minimum() {
    // (1, xy): the orbit of xy is closed and its smallest squared norm is 1! 1! / 3! = 1/6.
    let pair = json!({"schema": "v1", "norm": "l2",
        "v": binary(0, json!([{"exp": [0, 0], "c": "1"}])),
        "w": binary(2, json!([{"exp": [1, 1], "c": "1"}]))});
    let out = parse(&descent_curve(&pair.to_string(), 2, 2000, 5).unwrap());
    assert_eq!(out["torus_semistable"], true);
    assert!((out["inf_estimate"].as_f64().unwrap() - (1.0f64 / 6.0).ln()).abs() < 1e-6, "{out}");
    let runs = out["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    for r in runs {
        let vals: Vec<f64> = serde_json::from_value(r["values"].clone()).unwrap();
        assert!(vals.windows(2).all(|w| w[1] <= w[0]), "accepted steps never increase the objective");
    }
}

#[test]
fn descent_curve_of_an_unstable_pair_falls() {
    let pair = json!({"schema": "v1", "norm": "l2",
        "v": binary(1, json!([{"exp": [1, 0], "c": "1"}])),
        "w": binary(2, json!([{"exp": [2, 0], "c": "1"}]))});
    let out = parse(&descent_curve(&pair.to_string(), 1, 300, 0).unwrap());
    assert_eq!(out["torus_semistable"], false);
    let vals: Vec<f64> = serde_json::from_value(out["runs"][0]["values"].clone()).unwrap();
    assert!(vals.last().unwrap() < &(vals[0] - 5.0), "{vals:?}");
}
