//! JSON wire formats.
//!
//! Algebras carry plain integer fields. Diagram entries are integers.
//! Homomorphism data uses breakpoint lists whose rationals are either
//! integer numbers or `"p/q"` strings; outputs follow the same rule.
//! Matrices and possibly large integers are emitted as strings to
//! avoid 64-bit truncation in transport.

use crate::algebra::{validate_algebra, DirectSumAlgebra};
use crate::intertwine::InductiveSystem;
use crate::kk::{canonicalize, DiagramEntry, KKClass, KKDiagram};
use crate::lift::LiftCertificate;
use crate::matrix::IntMatrix;
use crate::pl::PlPath;
use crate::spectral::{HomomorphismData, PairData};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("{context}: expected {expected}")]
    Shape {
        context: String,
        expected: &'static str,
    },
    #[error("{context}: {message}")]
    Invalid { context: String, message: String },
}

fn shape(context: &str, expected: &'static str) -> WireError {
    WireError::Shape {
        context: context.to_string(),
        expected,
    }
}

fn invalid(context: &str, message: impl ToString) -> WireError {
    WireError::Invalid {
        context: context.to_string(),
        message: message.to_string(),
    }
}

fn get<'v>(v: &'v Value, key: &str, context: &str) -> Result<&'v Value, WireError> {
    v.get(key)
        .ok_or_else(|| invalid(context, format!("missing field '{key}'")))
}

fn as_array<'v>(v: &'v Value, context: &str) -> Result<&'v Vec<Value>, WireError> {
    v.as_array().ok_or_else(|| shape(context, "an array"))
}

fn as_u64(v: &Value, context: &str) -> Result<u64, WireError> {
    v.as_u64()
        .ok_or_else(|| shape(context, "a nonnegative integer"))
}

pub fn parse_bigint(v: &Value, context: &str) -> Result<BigInt, WireError> {
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    if let Some(s) = v.as_str() {
        return BigInt::from_str(s).map_err(|e| invalid(context, e));
    }
    Err(shape(context, "an integer (number or decimal string)"))
}

pub fn parse_rational(v: &Value, context: &str) -> Result<BigRational, WireError> {
    if let Some(i) = v.as_i64() {
        return Ok(BigRational::from_integer(BigInt::from(i)));
    }
    if let Some(s) = v.as_str() {
        let mut parts = s.splitn(2, '/');
        let num = parts
            .next()
            .ok_or_else(|| shape(context, "a rational 'p/q'"))?;
        let numerator = BigInt::from_str(num.trim()).map_err(|e| invalid(context, e))?;
        let denominator = match parts.next() {
            Some(d) => BigInt::from_str(d.trim()).map_err(|e| invalid(context, e))?,
            None => BigInt::one(),
        };
        if denominator.is_zero() {
            return Err(invalid(context, "zero denominator"));
        }
        return Ok(BigRational::new(numerator, denominator));
    }
    Err(shape(context, "a rational (integer number or 'p/q' string)"))
}

pub fn emit_rational(r: &BigRational) -> Value {
    if r.denom().is_one() {
        if let Some(i) = r.numer().to_i64() {
            return json!(i);
        }
    }
    if r.denom().is_one() {
        json!(r.numer().to_string())
    } else {
        json!(format!("{}/{}", r.numer(), r.denom()))
    }
}

pub fn emit_bigint(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => json!(i),
        None => json!(v.to_string()),
    }
}

/// Matrices travel as arrays of integer strings.
pub fn emit_matrix(m: &IntMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            Value::Array(
                (0..m.cols())
                    .map(|j| json!(m.at(i, j).to_string()))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

// ---------------------------------------------------------------------------
// Algebras
// ---------------------------------------------------------------------------

pub fn parse_algebra(v: &Value) -> Result<DirectSumAlgebra, WireError> {
    let context = "algebra";
    let summands = as_array(get(v, "summands", context)?, context)?;
    let mut raw = Vec::new();
    for (i, s) in summands.iter().enumerate() {
        let ctx = format!("algebra summand {i}");
        let r = match s.get("r") {
            Some(rv) => as_u64(rv, &ctx)?,
            None => 1,
        };
        let m0 = as_u64(get(s, "m0", &ctx)?, &ctx)?;
        let m = as_u64(get(s, "m", &ctx)?, &ctx)?;
        let m1 = as_u64(get(s, "m1", &ctx)?, &ctx)?;
        raw.push((r, m0, m, m1));
    }
    validate_algebra(&raw).map_err(|e| invalid(context, e))
}

pub fn emit_algebra(a: &DirectSumAlgebra) -> Value {
    json!({
        "summands": a
            .summands()
            .iter()
            .map(|b| json!({"r": b.r(), "m0": b.m0(), "m": b.m(), "m1": b.m1()}))
            .collect::<Vec<_>>()
    })
}

// ---------------------------------------------------------------------------
// Diagrams
// ---------------------------------------------------------------------------

pub fn parse_diagram(
    v: &Value,
    source: &DirectSumAlgebra,
    target: &DirectSumAlgebra,
) -> Result<KKDiagram, WireError> {
    let context = "diagram";
    let rows = as_array(get(v, "blocks", context)?, context)?;
    let mut entries = Vec::new();
    for (j, row) in rows.iter().enumerate() {
        let row = as_array(row, &format!("diagram target row {j}"))?;
        let mut out = Vec::new();
        for (i, e) in row.iter().enumerate() {
            let ctx = format!("diagram entry (target {j}, source {i})");
            out.push(DiagramEntry {
                a: parse_bigint(get(e, "a", &ctx)?, &ctx)?,
                b: parse_bigint(get(e, "b", &ctx)?, &ctx)?,
                c: parse_bigint(get(e, "c", &ctx)?, &ctx)?,
                d: parse_bigint(get(e, "d", &ctx)?, &ctx)?,
                s: parse_bigint(get(e, "s", &ctx)?, &ctx)?,
            });
        }
        entries.push(out);
    }
    KKDiagram::new(source.clone(), target.clone(), entries).map_err(|e| invalid(context, e))
}

pub fn emit_diagram(d: &KKDiagram) -> Value {
    json!({
        "blocks": d
            .entries()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        json!({
                            "a": emit_bigint(&e.a),
                            "b": emit_bigint(&e.b),
                            "c": emit_bigint(&e.c),
                            "d": emit_bigint(&e.d),
                            "s": emit_bigint(&e.s),
                        })
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    })
}

pub fn emit_class(class: &KKClass) -> Value {
    json!({
        "canonical": class
            .canonical()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|coords| coords.iter().map(emit_bigint).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>(),
        "representative": emit_diagram(class.representative()),
    })
}

// ---------------------------------------------------------------------------
// Homomorphism data
// ---------------------------------------------------------------------------

fn parse_path(v: &Value, context: &str) -> Result<PlPath, WireError> {
    let pts = as_array(v, context)?;
    let mut out = Vec::new();
    for (k, p) in pts.iter().enumerate() {
        let ctx = format!("{context} breakpoint {k}");
        let pair = as_array(p, &ctx)?;
        if pair.len() != 2 {
            return Err(shape(&ctx, "a [t, value] pair"));
        }
        out.push((
            parse_rational(&pair[0], &ctx)?,
            parse_rational(&pair[1], &ctx)?,
        ));
    }
    PlPath::new(out).map_err(|e| invalid(context, e))
}

fn emit_path(p: &PlPath) -> Value {
    Value::Array(
        p.points()
            .iter()
            .map(|(t, v)| Value::Array(vec![emit_rational(t), emit_rational(v)]))
            .collect(),
    )
}

pub fn parse_hom_data(
    v: &Value,
    source: &DirectSumAlgebra,
    target: &DirectSumAlgebra,
) -> Result<HomomorphismData, WireError> {
    let context = "homomorphism data";
    let rows = as_array(get(v, "blocks", context)?, context)?;
    let mut blocks = Vec::new();
    for (j, row) in rows.iter().enumerate() {
        let row = as_array(row, &format!("data target row {j}"))?;
        let mut out = Vec::new();
        for (i, e) in row.iter().enumerate() {
            let ctx = format!("data block (target {j}, source {i})");
            let s0 = as_u64(get(e, "s0", &ctx)?, &ctx)?;
            let s1 = as_u64(get(e, "s1", &ctx)?, &ctx)?;
            let paths = as_array(get(e, "paths", &ctx)?, &ctx)?
                .iter()
                .enumerate()
                .map(|(k, p)| parse_path(p, &format!("{ctx} path {k}")))
                .collect::<Result<Vec<_>, _>>()?;
            out.push(PairData { s0, s1, paths });
        }
        blocks.push(out);
    }
    HomomorphismData::new(source.clone(), target.clone(), blocks)
        .map_err(|e| invalid(context, e))
}

pub fn emit_hom_data(h: &HomomorphismData) -> Value {
    json!({
        "blocks": h
            .blocks()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|pd| {
                        json!({
                            "s0": pd.s0,
                            "s1": pd.s1,
                            "paths": pd.paths.iter().map(emit_path).collect::<Vec<_>>(),
                        })
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    })
}

// ---------------------------------------------------------------------------
// Systems, seeds, profiles
// ---------------------------------------------------------------------------

pub fn parse_system(v: &Value) -> Result<InductiveSystem, WireError> {
    let context = "system";
    let stages = as_array(get(v, "stages", context)?, context)?
        .iter()
        .map(parse_algebra)
        .collect::<Result<Vec<_>, _>>()?;
    let raw = as_array(get(v, "connecting", context)?, context)?;
    if raw.len() + 1 != stages.len() {
        return Err(invalid(
            context,
            "need exactly one connecting datum per consecutive stage pair",
        ));
    }
    let connecting = raw
        .iter()
        .enumerate()
        .map(|(i, c)| parse_hom_data(c, &stages[i], &stages[i + 1]))
        .collect::<Result<Vec<_>, _>>()?;
    InductiveSystem::new(stages, connecting).map_err(|e| invalid(context, e))
}

pub fn emit_system(s: &InductiveSystem) -> Value {
    json!({
        "stages": s.stages().iter().map(emit_algebra).collect::<Vec<_>>(),
        "connecting": s.connecting().iter().map(emit_hom_data).collect::<Vec<_>>(),
    })
}

/// One class per shared stage, as diagrams `A_t -> B_t`.
pub fn parse_seed(
    v: &Value,
    system_a: &InductiveSystem,
    system_b: &InductiveSystem,
) -> Result<Vec<KKClass>, WireError> {
    let context = "seed";
    let raw = as_array(get(v, "classes", context)?, context)?;
    raw.iter()
        .enumerate()
        .map(|(t, d)| {
            let a = system_a
                .stage(t)
                .map_err(|e| invalid(context, e))?;
            let b = system_b
                .stage(t)
                .map_err(|e| invalid(context, e))?;
            Ok(canonicalize(&parse_diagram(d, a, b)?))
        })
        .collect()
}

pub fn parse_profiles(v: &Value) -> Result<Vec<PlPath>, WireError> {
    let context = "profiles";
    as_array(get(v, "profiles", context)?, context)?
        .iter()
        .enumerate()
        .map(|(k, p)| parse_path(p, &format!("profile {k}")))
        .collect()
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

pub fn emit_certificate(cert: &LiftCertificate) -> Value {
    json!({
        "shifted_representative": emit_diagram(&cert.shifted_representative),
        "shifts": cert
            .shifts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| json!([emit_bigint(&s.u1), emit_bigint(&s.u2)]))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>(),
        "unital": cert.unital,
    })
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in pairs {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}
