//! JSON encoding of inputs and results, schema `v1`.
//!
//! Exact scalars are strings `"p/q"` (decimals are accepted on input) or objects
//! `{"re": "...", "im": "..."}`; bare integers are accepted on input.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::group::{CMatrix, ExactGroupElement};
use crate::lattice::{ExactRepVector, LatticePolytope, RepVector, SlotKind, TensorVector};
use crate::pair::Pair;
use crate::poly::{ExactPolynomial, HomogeneousPolynomial, VariableShape};
use crate::scalar::{format_rational, parse_rational, Coeff, Exact};
use crate::variety::RationalCurve;

pub const SCHEMA: &str = "v1";

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::schema(format!("missing field \"{key}\"")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| Error::schema(format!("{what} must be a nonnegative integer")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::schema(format!("{what} must be an array")))
}

/// Reject documents carrying a schema tag other than `v1`.
pub fn check_schema(v: &Value) -> Result<()> {
    match v.get("schema") {
        None => Ok(()),
        Some(Value::String(s)) if s == SCHEMA => Ok(()),
        Some(other) => Err(Error::schema(format!("unsupported schema {other}"))),
    }
}

fn parse_real(v: &Value) -> Result<num_rational::BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(crate::scalar::rational(n.as_i64().unwrap(), 1)),
        _ => Err(Error::schema(format!("expected a rational string, got {v}"))),
    }
}

pub fn parse_exact(v: &Value) -> Result<Exact> {
    match v {
        Value::Object(_) => {
            let re = v.get("re").map(parse_real).transpose()?.unwrap_or_else(|| crate::scalar::rational(0, 1));
            let im = v.get("im").map(parse_real).transpose()?.unwrap_or_else(|| crate::scalar::rational(0, 1));
            Ok(Exact::new(re, im))
        }
        Value::Array(a) if a.len() == 2 => Ok(Exact::new(parse_real(&a[0])?, parse_real(&a[1])?)),
        _ => Ok(Exact::new(parse_real(v)?, crate::scalar::rational(0, 1))),
    }
}

pub fn exact_to_json(c: &Exact) -> Value {
    if c.im == crate::scalar::rational(0, 1) {
        Value::String(format_rational(&c.re))
    } else {
        json!({"re": format_rational(&c.re), "im": format_rational(&c.im)})
    }
}

pub fn complex_to_json(c: &Complex64) -> Value {
    json!([c.re, c.im])
}

fn term_coefficient(t: &Value) -> Result<Exact> {
    match t.get("c") {
        Some(c) => parse_exact(c),
        None => parse_exact(&json!({"re": t.get("re").cloned().unwrap_or(json!("0")), "im": t.get("im").cloned().unwrap_or(json!("0"))})),
    }
}

/// `{"shape": {...}, "degree": d, "terms": [{"exp": [...], "re": "...", "im": "..."}]}`.
pub fn polynomial_from_json(v: &Value) -> Result<ExactPolynomial> {
    check_schema(v)?;
    let shape: VariableShape =
        serde_json::from_value(field(v, "shape")?.clone()).map_err(|e| Error::schema(format!("shape: {e}")))?;
    let degree = as_usize(field(v, "degree")?, "degree")? as u32;
    let mut terms = Vec::new();
    for t in as_array(field(v, "terms")?, "terms")? {
        let exp: Vec<u32> = as_array(field(t, "exp")?, "exp")?
            .iter()
            .map(|e| as_usize(e, "exponent").map(|x| x as u32))
            .collect::<Result<_>>()?;
        terms.push((exp, term_coefficient(t)?));
    }
    HomogeneousPolynomial::new(shape, degree, terms).map_err(|e| match e {
        Error::Precondition(m) => Error::schema(m),
        other => other,
    })
}

pub fn polynomial_to_json<C: Coeff>(p: &HomogeneousPolynomial<C>) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .iter()
        .map(|(e, c)| {
            let mut m = Map::new();
            m.insert("exp".into(), json!(e));
            m.insert("c".into(), coeff_to_json(c));
            Value::Object(m)
        })
        .collect();
    json!({"shape": p.shape(), "degree": p.degree(), "terms": terms})
}

fn coeff_to_json<C: Coeff>(c: &C) -> Value {
    // Exact coefficients keep their rational form.
    if let Some(e) = (c as &dyn std::any::Any).downcast_ref::<Exact>() {
        exact_to_json(e)
    } else {
        complex_to_json(&c.to_c64())
    }
}

/// A polynomial object, or a tensor `{"n": .., "slots": [..], "coords": [{"index": [..], "c": ..}]}`.
pub fn rep_vector_from_json(v: &Value) -> Result<ExactRepVector> {
    if v.get("slots").is_some() {
        let n = as_usize(field(v, "n")?, "n")?;
        let slots: Vec<SlotKind> =
            serde_json::from_value(field(v, "slots")?.clone()).map_err(|e| Error::schema(format!("slots: {e}")))?;
        let mut coords = Vec::new();
        for t in as_array(field(v, "coords")?, "coords")? {
            let idx: Vec<usize> =
                as_array(field(t, "index")?, "index")?.iter().map(|e| as_usize(e, "index")).collect::<Result<_>>()?;
            coords.push((idx, term_coefficient(t)?));
        }
        Ok(RepVector::Tensor(TensorVector::new(n, slots, coords)?))
    } else {
        Ok(RepVector::Polynomial(polynomial_from_json(v)?))
    }
}

pub fn rep_vector_to_json<C: Coeff>(v: &RepVector<C>) -> Value {
    match v {
        RepVector::Polynomial(p) => polynomial_to_json(p),
        RepVector::Tensor(t) => {
            let coords: Vec<Value> =
                t.coords().iter().map(|(k, c)| json!({"index": k, "c": coeff_to_json(c)})).collect();
            json!({"n": t.group_size(), "slots": t.slots(), "coords": coords})
        }
    }
}

/// `{"v": .., "w": .., "norm": "l2"}`.
pub fn pair_from_json(v: &Value) -> Result<Pair> {
    check_schema(v)?;
    if let Some(n) = v.get("norm") {
        if n != "l2" {
            return Err(Error::schema("only the \"l2\" norm is supported for pairs"));
        }
    }
    Pair::exact(rep_vector_from_json(field(v, "v")?)?, rep_vector_from_json(field(v, "w")?)?)
}

pub fn pair_to_json(p: &Pair) -> Value {
    match p.exact_parts() {
        Some((v, w)) => json!({"v": rep_vector_to_json(v), "w": rep_vector_to_json(w), "norm": "l2"}),
        None => json!({"v": rep_vector_to_json(p.v()), "w": rep_vector_to_json(p.w()), "norm": "l2"}),
    }
}

/// `{"N": N, "d": d, "gamma": [[c_0, ..., c_d], ...]}` with `c_i` the coefficient of `s^(d-i) t^i`.
pub fn curve_from_json(v: &Value) -> Result<RationalCurve> {
    check_schema(v)?;
    let n = as_usize(field(v, "N")?, "N")?;
    let d = as_usize(field(v, "d")?, "d")?;
    let gamma: Vec<Vec<Exact>> = as_array(field(v, "gamma")?, "gamma")?
        .iter()
        .map(|row| as_array(row, "gamma row")?.iter().map(parse_exact).collect())
        .collect::<Result<_>>()?;
    if gamma.len() != n + 1 || gamma.iter().any(|g| g.len() != d + 1) {
        return Err(Error::schema("gamma must have N+1 rows of d+1 coefficients"));
    }
    RationalCurve::new(gamma)
}

pub fn curve_to_json(c: &RationalCurve) -> Value {
    let gamma: Vec<Vec<Value>> = c.coefficients().iter().map(|g| g.iter().map(exact_to_json).collect()).collect();
    json!({"N": c.ambient(), "d": c.degree(), "gamma": gamma})
}

fn matrix_rows(v: &Value) -> Result<Vec<Vec<Exact>>> {
    let rows = match v.get("entries") {
        Some(e) => e,
        None => v,
    };
    let rows: Vec<Vec<Exact>> = as_array(rows, "entries")?
        .iter()
        .map(|r| as_array(r, "matrix row")?.iter().map(parse_exact).collect())
        .collect::<Result<_>>()?;
    let n = rows.len();
    if n < 2 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::schema("group element must be a square matrix of size at least 2"));
    }
    Ok(rows)
}

/// An exact element of SL(n) given as rows, either bare or under `"entries"`.
pub fn sigma_from_json(v: &Value) -> Result<ExactGroupElement> {
    let rows = matrix_rows(v)?;
    let n = rows.len();
    ExactGroupElement::new(n, rows.into_iter().flatten().collect())
}

/// A double-precision matrix rescaled to determinant one.
pub fn float_sigma_from_json(v: &Value) -> Result<CMatrix> {
    let rows = matrix_rows(v)?;
    let n = rows.len();
    let m = CMatrix::from_fn(n, n, |i, j| rows[i][j].to_c64());
    crate::group::normalize_det(&m)
}

pub fn cmatrix_to_json(m: &CMatrix) -> Value {
    let rows: Vec<Vec<Value>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| complex_to_json(&m[(i, j)])).collect()).collect();
    Value::Array(rows.into_iter().map(Value::Array).collect())
}

pub fn polytope_to_json(p: &LatticePolytope) -> Value {
    json!({"points": p.points(), "vertices": p.vertex_points()})
}

pub fn lambda_from_json(v: &Value) -> Result<Vec<i64>> {
    as_array(v, "lambda")?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| Error::schema("lambda entries must be integers")))
        .collect()
}

/// Wrap a result with the schema tag and the command name.
pub fn envelope(command: &str, result: Value) -> Value {
    json!({"schema": SCHEMA, "command": command, "result": result})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_round_trip() {
        let v = json!({"shape": {"kind": "vector", "cols": 2}, "degree": 2,
            "terms": [{"exp": [2, 0], "c": "1/2"}, {"exp": [1, 1], "re": "-3", "im": "1"}]});
        let p = polynomial_from_json(&v).unwrap();
        let back = polynomial_from_json(&polynomial_to_json(&p)).unwrap();
        assert_eq!(p, back);
        assert_eq!(polynomial_to_json(&p)["terms"][1]["c"], json!("1/2"));
    }

    #[test]
    fn schema_errors() {
        let bad = json!({"shape": {"kind": "vector", "cols": 2}, "degree": 2, "terms": [{"exp": [1, 0], "c": "1"}]});
        assert!(matches!(polynomial_from_json(&bad), Err(Error::Schema(_))));
        assert!(matches!(check_schema(&json!({"schema": "v2"})), Err(Error::Schema(_))));
        assert!(matches!(parse_exact(&json!(0.5)), Err(Error::Schema(_))));
    }

    #[test]
    fn curve_round_trip() {
        let c = RationalCurve::rational_normal(3).unwrap();
        assert_eq!(curve_from_json(&curve_to_json(&c)).unwrap(), c);
    }
}
