//! Loading JSON arguments from files, stdin or inline text.

use std::io::Read;

use num_complex::Complex64;
use serde_json::Value;
use stabpairs::group::{normalize_det, CMatrix, ExactGroupElement};
use stabpairs::json::{check_schema, curve_from_json, float_sigma_from_json, pair_from_json, parse_exact, polynomial_from_json, rep_vector_from_json, sigma_from_json};
use stabpairs::lattice::ExactRepVector;
use stabpairs::pair::Pair;
use stabpairs::poly::ExactPolynomial;
use stabpairs::scalar::{Coeff, Exact};
use stabpairs::variety::RationalCurve;
use stabpairs::{Error, Result};

/// `-` reads stdin, text starting with `{` or `[` is parsed inline, anything else is a path.
pub fn load(arg: &str) -> Result<Value> {
    let text = if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::schema(format!("stdin: {e}")))?;
        s
    } else if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::schema(format!("{arg}: {e}")))?
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::schema(format!("{arg}: {e}")))?;
    check_schema(&v)?;
    Ok(v)
}

/// The value given by flag or positional argument; both or neither is a schema error.
pub fn pick<'a>(flag: &'a Option<String>, positional: &'a Option<String>, name: &str) -> Result<&'a str> {
    match (flag, positional) {
        (Some(f), None) | (None, Some(f)) => Ok(f),
        (Some(_), Some(_)) => Err(Error::schema(format!("give {name} either as a flag or as a file argument, not both"))),
        (None, None) => Err(Error::schema(format!("missing {name}"))),
    }
}

pub fn poly(arg: &str) -> Result<ExactPolynomial> {
    polynomial_from_json(&load(arg)?)
}

pub fn rep(arg: &str) -> Result<ExactRepVector> {
    rep_vector_from_json(&load(arg)?)
}

pub fn pair(arg: &str) -> Result<Pair> {
    pair_from_json(&load(arg)?)
}

pub fn curve(arg: &str) -> Result<RationalCurve> {
    curve_from_json(&load(arg)?)
}

pub fn exact_sigma(arg: &str) -> Result<ExactGroupElement> {
    sigma_from_json(&load(arg)?)
}

/// A double-precision group element rescaled to determinant one; the identity when absent.
pub fn float_sigma(arg: Option<&str>, n: usize) -> Result<CMatrix> {
    match arg {
        Some(a) => {
            let v = load(a)?;
            // Float entries are accepted here, unlike in exact inputs.
            match float_matrix(&v) {
                Some(m) => normalize_det(&m),
                None => float_sigma_from_json(&v),
            }
            .and_then(|m| {
                if m.nrows() != n {
                    Err(Error::precondition(format!("σ has size {}, expected {n}", m.nrows())))
                } else {
                    Ok(m)
                }
            })
        }
        None => Ok(CMatrix::identity(n, n)),
    }
}

fn float_matrix(v: &Value) -> Option<CMatrix> {
    let rows = v.get("entries").unwrap_or(v).as_array()?;
    let n = rows.len();
    let mut out = CMatrix::zeros(n, n);
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array()?;
        if r.len() != n {
            return None;
        }
        for (j, x) in r.iter().enumerate() {
            out[(i, j)] = float_scalar(x)?;
        }
    }
    Some(out)
}

fn float_scalar(v: &Value) -> Option<Complex64> {
    match v {
        Value::Number(n) => Some(Complex64::new(n.as_f64()?, 0.0)),
        Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number) => {
            Some(Complex64::new(a[0].as_f64()?, a[1].as_f64()?))
        }
        _ => parse_exact(v).ok().map(|c| c.to_c64()),
    }
}

pub fn exact_point(arg: &str) -> Result<Vec<Exact>> {
    let v = load(arg)?;
    let a = v.as_array().ok_or_else(|| Error::schema("point must be an array"))?;
    a.iter().map(parse_exact).collect()
}

pub fn float_point(arg: &str) -> Result<Vec<Complex64>> {
    let v = load(arg)?;
    let a = v.as_array().ok_or_else(|| Error::schema("point must be an array"))?;
    a.iter().map(|x| float_scalar(x).ok_or_else(|| Error::schema(format!("bad scalar {x}")))).collect()
}

pub fn exact_matrix(arg: &str) -> Result<Vec<Vec<Exact>>> {
    let v = load(arg)?;
    let rows = v.get("entries").unwrap_or(&v).as_array().ok_or_else(|| Error::schema("matrix must be an array of rows"))?;
    rows.iter()
        .map(|r| r.as_array().ok_or_else(|| Error::schema("matrix row must be an array"))?.iter().map(parse_exact).collect())
        .collect()
}

/// `[1, -1]`, `1,-1` or a path to a JSON array.
pub fn integer_list(arg: &str) -> Result<Vec<i64>> {
    let t = arg.trim();
    if !t.starts_with('[') && t.split(',').all(|s| s.trim().parse::<i64>().is_ok()) {
        return Ok(t.split(',').map(|s| s.trim().parse().unwrap()).collect());
    }
    stabpairs::json::lambda_from_json(&load(arg)?)
}
