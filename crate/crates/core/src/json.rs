//! JSON encoding of parameters, distributions and results.
//!
//! Exact scalars are written as `"p/q"` strings and floats as numbers;
//! documents carry a `"mode"` tag. Irrational values from the quadratic
//! extension are written as strings `"r+s*sqrt(d)"`. Distribution values are
//! objects keyed by strings of symbols with the first node leftmost, or plain
//! arrays in index order.

use serde_json::{json, Map, Value};

use crate::coords::{index_key, key_index, CoordSystem, Distribution};
use crate::error::{Error, Result};
use crate::invariants::InvariantReport;
use crate::membership::{MembershipCertificate, Witness};
use crate::multistate::{ColumnRecovery, Identification, MultistateDistribution, MultistateParams};
use crate::params::{BirationalParams, LinearParams, StochasticParams};
use crate::recover::{Guard, RecoveryOutcome, StratumParams};
use crate::scalar::{Scalar, Tolerance};

fn mode<S: Scalar>() -> &'static str {
    if S::EXACT {
        "exact"
    } else {
        "float"
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

fn scalar_vec<S: Scalar>(v: &Value, what: &str) -> Result<Vec<S>> {
    array(v, what)?.iter().map(S::from_json).collect()
}

fn pair<S: Scalar>(v: &Value, what: &str) -> Result<[S; 2]> {
    let xs = scalar_vec::<S>(v, what)?;
    <[S; 2]>::try_from(xs).map_err(|xs| Error::Parse(format!("{what} must have 2 entries, got {}", xs.len())))
}

fn matrix2<S: Scalar>(v: &Value, what: &str) -> Result<[[S; 2]; 2]> {
    let rows = array(v, what)?;
    if rows.len() != 2 {
        return Err(Error::Parse(format!("{what} must have 2 rows, got {}", rows.len())));
    }
    Ok([pair(&rows[0], what)?, pair(&rows[1], what)?])
}

fn usize_field(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("\"{key}\" must be a non-negative integer")))
}

fn row<S: Scalar>(xs: &[S]) -> Value {
    Value::Array(xs.iter().map(Scalar::to_json).collect())
}

fn mat<S: Scalar>(m: &[[S; 2]; 2]) -> Value {
    json!([row(&m[0]), row(&m[1])])
}

pub fn params_to_json<S: Scalar>(theta: &StochasticParams<S>) -> Value {
    json!({
        "mode": mode::<S>(),
        "pi": row(theta.pi()),
        "T": mat(theta.transition()),
        "E": mat(theta.emission()),
    })
}

pub fn params_from_json<S: Scalar>(v: &Value, tol: &Tolerance) -> Result<StochasticParams<S>> {
    StochasticParams::new(
        pair(field(v, "pi")?, "pi")?,
        matrix2(field(v, "T")?, "T")?,
        matrix2(field(v, "E")?, "E")?,
        tol,
    )
}

pub fn linear_to_json<S: Scalar>(p: &LinearParams<S>) -> Value {
    json!({"mode": mode::<S>(), "a0": p.a0.to_json(), "b": p.b.to_json(), "c0": p.c0.to_json(), "u": p.u.to_json(), "v0": p.v0.to_json()})
}

pub fn linear_from_json<S: Scalar>(v: &Value) -> Result<LinearParams<S>> {
    let f = |k: &str| field(v, k).and_then(S::from_json);
    Ok(LinearParams::new(f("a0")?, f("b")?, f("c0")?, f("u")?, f("v0")?))
}

pub fn birational_to_json<S: Scalar>(p: &BirationalParams<S>) -> Value {
    json!({"mode": mode::<S>(), "a": p.a.to_json(), "b": p.b.to_json(), "c": p.c.to_json(), "u": p.u.to_json(), "v": p.v.to_json()})
}

pub fn birational_from_json<S: Scalar>(v: &Value) -> Result<BirationalParams<S>> {
    let f = |k: &str| field(v, k).and_then(S::from_json);
    Ok(BirationalParams::new(f("a")?, f("b")?, f("c")?, f("u")?, f("v")?))
}

/// Any of the three parameterizations, told apart by their keys.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyParams<S> {
    Stochastic(StochasticParams<S>),
    Linear(LinearParams<S>),
    Birational(BirationalParams<S>),
}

pub fn any_params_from_json<S: Scalar>(v: &Value, tol: &Tolerance) -> Result<AnyParams<S>> {
    if v.get("pi").is_some() {
        Ok(AnyParams::Stochastic(params_from_json(v, tol)?))
    } else if v.get("a0").is_some() {
        Ok(AnyParams::Linear(linear_from_json(v)?))
    } else if v.get("a").is_some() {
        Ok(AnyParams::Birational(birational_from_json(v)?))
    } else {
        Err(Error::Parse("parameters need keys pi/T/E, a0/b/c0/u/v0 or a/b/c/u/v".into()))
    }
}

pub fn distribution_to_json<S: Scalar>(d: &Distribution<S>) -> Value {
    let values: Map<String, Value> =
        d.values().iter().enumerate().map(|(i, x)| (index_key(d.n(), i), x.to_json())).collect();
    json!({"mode": mode::<S>(), "n": d.n(), "system": d.system().name(), "values": values})
}

pub fn distribution_from_json<S: Scalar>(v: &Value) -> Result<Distribution<S>> {
    let n = usize_field(v, "n")?;
    let system = match v.get("system") {
        Some(s) => CoordSystem::parse(s.as_str().ok_or_else(|| Error::Parse("\"system\" must be a string".into()))?)?,
        None => CoordSystem::Probability,
    };
    if n == 0 || n > crate::coords::MAX_NODES {
        return Err(Error::Parse(format!("n = {n} outside 1..={}", crate::coords::MAX_NODES)));
    }
    let values = match field(v, "values")? {
        Value::Array(xs) => xs.iter().map(S::from_json).collect::<Result<Vec<_>>>()?,
        Value::Object(map) => {
            let mut out: Vec<Option<S>> = vec![None; 1 << n];
            for (key, x) in map {
                if key.len() != n {
                    return Err(Error::Parse(format!("key {key:?} does not have {n} symbols")));
                }
                out[key_index(key)?] = Some(S::from_json(x)?);
            }
            out.into_iter()
                .enumerate()
                .map(|(i, x)| x.ok_or_else(|| Error::Parse(format!("missing value for {}", index_key(n, i)))))
                .collect::<Result<Vec<_>>>()?
        }
        _ => return Err(Error::Parse("\"values\" must be an object or an array".into())),
    };
    Distribution::new(n, system, values).map_err(|e| Error::Parse(e.to_string()))
}

pub fn multistate_params_to_json<S: Scalar>(p: &MultistateParams<S>) -> Value {
    json!({
        "mode": mode::<S>(),
        "pi": row(p.pi()),
        "T": mat(p.transition()),
        "E": [row(&p.emission()[0]), row(&p.emission()[1])],
    })
}

pub fn multistate_params_from_json<S: Scalar>(v: &Value, tol: &Tolerance) -> Result<MultistateParams<S>> {
    let e = array(field(v, "E")?, "E")?;
    if e.len() != 2 {
        return Err(Error::Parse(format!("E must have 2 rows, got {}", e.len())));
    }
    MultistateParams::new(
        pair(field(v, "pi")?, "pi")?,
        matrix2(field(v, "T")?, "T")?,
        [scalar_vec(&e[0], "E")?, scalar_vec(&e[1], "E")?],
        tol,
    )
}

fn symbol_key(symbols: &[usize]) -> String {
    symbols.iter().map(|&s| char::from_digit(s as u32, 36).expect("k ≤ 36")).collect()
}

pub fn multistate_distribution_to_json<S: Scalar>(d: &MultistateDistribution<S>) -> Value {
    let values: Value = if d.k() <= 36 {
        let map: Map<String, Value> =
            d.values().iter().enumerate().map(|(i, x)| (symbol_key(&d.symbols(i)), x.to_json())).collect();
        Value::Object(map)
    } else {
        row(d.values())
    };
    json!({"mode": mode::<S>(), "n": d.n(), "k": d.k(), "values": values})
}

pub fn multistate_distribution_from_json<S: Scalar>(v: &Value, k_override: Option<usize>) -> Result<MultistateDistribution<S>> {
    let n = usize_field(v, "n")?;
    let k = match (k_override, v.get("k")) {
        (Some(k), _) => k,
        (None, Some(_)) => usize_field(v, "k")?,
        (None, None) => return Err(Error::Parse("missing field \"k\"".into())),
    };
    let len = k.checked_pow(n as u32).filter(|&l| l <= 1 << crate::coords::MAX_NODES);
    let len = len.ok_or_else(|| Error::Parse(format!("{k}^{n} strings is too many")))?;
    let values = match field(v, "values")? {
        Value::Array(xs) => xs.iter().map(S::from_json).collect::<Result<Vec<_>>>()?,
        Value::Object(map) => {
            let mut out: Vec<Option<S>> = vec![None; len];
            for (key, x) in map {
                let digits: Option<Vec<usize>> = key.chars().map(|c| c.to_digit(36).map(|d| d as usize)).collect();
                let digits = digits.filter(|d| d.len() == n && d.iter().all(|&s| s < k));
                let digits = digits.ok_or_else(|| Error::Parse(format!("bad key {key:?} for n = {n}, k = {k}")))?;
                out[digits.iter().fold(0, |acc, &s| acc * k + s)] = Some(S::from_json(x)?);
            }
            out.into_iter()
                .enumerate()
                .map(|(i, x)| x.ok_or_else(|| Error::Parse(format!("missing value for string #{i}"))))
                .collect::<Result<Vec<_>>>()?
        }
        _ => return Err(Error::Parse("\"values\" must be an object or an array".into())),
    };
    MultistateDistribution::new(n, k, values).map_err(|e| Error::Parse(e.to_string()))
}

fn guards_to_json<S: Scalar>(guards: &[Guard<S>]) -> Value {
    Value::Array(
        guards
            .iter()
            .map(|g| json!({"name": g.name, "value": g.value.to_json(), "vanished": g.vanished}))
            .collect(),
    )
}

pub fn stratum_params_to_json<S: Scalar>(p: &StratumParams<S>) -> Value {
    match p {
        StratumParams::Generic(eta) => birational_to_json(eta),
        StratumParams::Equilibrium(e) => {
            json!({"a": e.a.to_json(), "b": e.b.to_json(), "u": e.u.to_json(), "v": e.v.to_json()})
        }
        StratumParams::Binid(b) => json!({"alpha": b.alpha.to_json(), "beta": b.beta.to_json()}),
        StratumParams::Biid { u } => json!({"u": u.to_json()}),
    }
}

pub fn outcome_to_json<S: Scalar>(o: &RecoveryOutcome<S>) -> Value {
    json!({
        "mode": mode::<S>(),
        "stratum": o.stratum.name(),
        "params": o.params.as_ref().map_or(Value::Null, stratum_params_to_json),
        "verified": o.verified,
        "guards": guards_to_json(&o.guards),
        "near_degenerate": o.near_degenerate,
        "rejected": o.rejected.iter().map(|(s, i)| json!({"stratum": s.name(), "index": i})).collect::<Vec<_>>(),
    })
}

fn witness_to_json<S: Scalar>(w: &Witness<S>) -> Value {
    match w {
        Witness::NegativeV { v } => json!({"kind": "negative_v", "v": v.to_json()}),
        Witness::NonStochasticEntry { entry, value } => {
            json!({"kind": "non_stochastic_entry", "entry": entry, "value": value.to_json()})
        }
        Witness::ForwardMismatch { index, key, expected, found } => json!({
            "kind": "forward_mismatch",
            "index": index,
            "key": key,
            "expected": expected.to_json(),
            "found": found.to_json(),
        }),
        Witness::Exhausted { attempts } => json!({
            "kind": "exhausted",
            "attempts": attempts.iter().map(|a| json!({"stratum": a.stratum.name(), "reason": a.reason})).collect::<Vec<_>>(),
        }),
    }
}

pub fn certificate_to_json<S: Scalar>(c: &MembershipCertificate<S>) -> Value {
    json!({
        "mode": mode::<S>(),
        "verdict": c.verdict.name(),
        "theta": c.theta.as_ref().map_or(Value::Null, params_to_json),
        "stratum": c.stratum.map_or(Value::Null, |s| Value::String(s.name().into())),
        "eta": c.eta.as_ref().map_or(Value::Null, birational_to_json),
        "submodel": c.submodel.as_ref().map_or(Value::Null, stratum_params_to_json),
        "witness": c.witness.as_ref().map_or(Value::Null, witness_to_json),
        "guards": guards_to_json(&c.guards),
        "near_degenerate": c.near_degenerate,
    })
}

pub fn report_to_json<S: Scalar>(r: &InvariantReport<S>) -> Value {
    json!({
        "mode": mode::<S>(),
        "all_vanish": r.all_vanish,
        "max_abs": r.max_abs,
        "values": r.values.iter().map(|v| json!({
            "name": v.name,
            "offset": v.offset,
            "value": v.value.to_json(),
            "scale": v.scale,
            "vanished": v.vanished,
        })).collect::<Vec<_>>(),
    })
}

pub fn identification_to_json<S: Scalar>(id: &Identification<S>) -> Value {
    let columns: Vec<Value> = id
        .columns
        .iter()
        .map(|c| match c {
            ColumnRecovery::Informative(eta) => json!({"kind": "informative", "eta": birational_to_json(eta)}),
            ColumnRecovery::Degenerate { u } => json!({"kind": "degenerate", "u": u.to_json()}),
        })
        .collect();
    json!({
        "mode": mode::<S>(),
        "params": multistate_params_to_json(&id.params),
        "reference_symbol": id.reference,
        "columns": columns,
        "row_sum_defect": row(&id.row_sum_defect),
        "reproduces": id.reproduces,
    })
}
