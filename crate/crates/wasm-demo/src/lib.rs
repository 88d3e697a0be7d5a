//! Browser bindings for three `stabpairs` operations. Inputs and outputs are JSON strings in the
//! same `v1` formats the command-line tool reads.

use serde_json::{json, Value};
use stabpairs::descent::{descend, DescentOptions};
use stabpairs::json::{pair_from_json, polynomial_from_json, polytope_to_json, rep_vector_from_json};
use stabpairs::lattice::{rep_degree, weight_polytope};
use stabpairs::norms::lp_norm;
use stabpairs::pair::torus_semistable;
use wasm_bindgen::prelude::*;

fn parse(text: &str) -> Result<Value, String> {
    serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))
}

/// Support, vertices and degree of the weight polytope of a polynomial or tensor.
#[wasm_bindgen]
pub fn polytope(input: &str) -> Result<String, String> {
    let e = rep_vector_from_json(&parse(input)?).map_err(|e| e.to_string())?;
    let p = weight_polytope(&e).map_err(|e| e.to_string())?;
    let mut out = polytope_to_json(&p);
    out["degree"] = json!(rep_degree(&e));
    Ok(out.to_string())
}

/// Monte Carlo estimate of `log |P|_p` over the sphere; `p = 0` gives the Mahler measure.
#[wasm_bindgen]
pub fn mahler(input: &str, p: f64, samples: usize, seed: u64) -> Result<String, String> {
    let f = polynomial_from_json(&parse(input)?).map_err(|e| e.to_string())?;
    let est = lp_norm(&f.to_float(), p, samples, seed).map_err(|e| e.to_string())?;
    serde_json::to_string(&est).map_err(|e| e.to_string())
}

/// Objective value after each accepted step of every restart of the norm-ratio descent.
#[wasm_bindgen]
pub fn descent_curve(input: &str, restarts: usize, max_iters: usize, seed: u64) -> Result<String, String> {
    let pair = pair_from_json(&parse(input)?).map_err(|e| e.to_string())?;
    let torus = torus_semistable(&pair).map_err(|e| e.to_string())?;
    let opts = DescentOptions { restarts, max_iters, seed, ..Default::default() };
    let out = descend(&pair, &opts);
    let runs: Vec<Value> = out
        .runs
        .iter()
        .map(|r| json!({"restart": r.restart, "end": r.end, "values": r.values, "final_grad_norm": r.final_grad_norm}))
        .collect();
    Ok(json!({
        "torus_semistable": torus.semistable,
        "inf_estimate": out.inf_estimate,
        "runs": runs,
    })
    .to_string())
}
