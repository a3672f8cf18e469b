//! External JSON formats for behaviors, inequalities and membership
//! certificates.
//!
//! Exact entries are written as `"num"`/`"den"` integers (decimal strings
//! when they do not fit in 64 bits); float entries as `"value"`. Entries
//! are listed exhaustively in table order.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::behavior::{Behavior, DeterministicStrategy, Inequality, Scenario, Sense};
use crate::causal::JointDistribution;
use crate::error::{Error, Result};
use crate::polytope::{Certificate, LfExtension, MembershipResult, PolytopeKind};
use crate::scalar::{Field, Rational, Scalar};

/// Scalars with a JSON entry encoding.
pub trait JsonScalar: Scalar {
    fn write(&self, obj: &mut Map<String, Value>);
    fn read(obj: &Map<String, Value>) -> Result<Self>;
}

fn int_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(n.to_string()),
    }
}

fn int_field(obj: &Map<String, Value>, key: &str) -> Result<BigInt> {
    match obj.get(key) {
        Some(Value::Number(n)) => {
            if let Some(v) = n.as_i64() {
                Ok(BigInt::from(v))
            } else if let Some(v) = n.as_u64() {
                Ok(BigInt::from(v))
            } else {
                Err(Error::Parse(format!("'{key}' must be an integer, got {n}")))
            }
        }
        Some(Value::String(s)) => {
            BigInt::from_str(s).map_err(|e| Error::Parse(format!("'{key}' = {s:?}: {e}")))
        }
        Some(v) => Err(Error::Parse(format!("'{key}' must be an integer, got {v}"))),
        None => Err(Error::Parse(format!("missing field '{key}'"))),
    }
}

fn index_field(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| Error::Parse(format!("missing or non-integer index '{key}'")))
}

impl JsonScalar for Rational {
    fn write(&self, obj: &mut Map<String, Value>) {
        obj.insert("num".into(), int_value(self.numer()));
        obj.insert("den".into(), int_value(self.denom()));
    }

    fn read(obj: &Map<String, Value>) -> Result<Self> {
        let num = int_field(obj, "num")?;
        let den = int_field(obj, "den")?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rational::new(num, den))
    }
}

impl JsonScalar for f64 {
    fn write(&self, obj: &mut Map<String, Value>) {
        obj.insert("value".into(), Value::from(*self));
    }

    /// Accepts `"value"`, or an exact `"num"`/`"den"` pair.
    fn read(obj: &Map<String, Value>) -> Result<Self> {
        match obj.get("value") {
            Some(v) => v.as_f64().ok_or_else(|| Error::Parse(format!("'value' must be a number, got {v}"))),
            None => Ok(Rational::read(obj)?.to_f64_lossy()),
        }
    }
}

pub fn scenario_to_value(sc: &Scenario) -> Value {
    json!({ "x": sc.x_count, "y": sc.y_count, "a": sc.a_count, "b": sc.b_count })
}

pub fn scenario_from_value(v: &Value) -> Result<Scenario> {
    let obj = as_object(v, "scenario")?;
    Scenario::new(
        index_field(obj, "x")?,
        index_field(obj, "y")?,
        index_field(obj, "a")?,
        index_field(obj, "b")?,
    )
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Parse(format!("{what} must be a JSON object")))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Parse(format!("missing field '{key}'")))
}

fn table_to_value<T: JsonScalar>(sc: &Scenario, table: &[T]) -> Value {
    let entries = sc
        .entries()
        .zip(table)
        .map(|((a, b, x, y), v)| {
            let mut obj = Map::new();
            obj.insert("a".into(), a.into());
            obj.insert("b".into(), b.into());
            obj.insert("x".into(), x.into());
            obj.insert("y".into(), y.into());
            v.write(&mut obj);
            Value::Object(obj)
        })
        .collect();
    Value::Array(entries)
}

fn table_from_value<T: JsonScalar>(sc: &Scenario, v: &Value, what: &str) -> Result<Vec<T>> {
    let items = v.as_array().ok_or_else(|| Error::Parse(format!("'{what}' must be an array")))?;
    let mut slots: Vec<Option<T>> = vec![None; sc.len()];
    for item in items {
        let obj = as_object(item, "table entry")?;
        let (a, b, x, y) =
            (index_field(obj, "a")?, index_field(obj, "b")?, index_field(obj, "x")?, index_field(obj, "y")?);
        if !sc.contains(a, b, x, y) {
            return Err(Error::OutOfRange(format!("entry (a={a}, b={b}, x={x}, y={y}) outside scenario {sc}")));
        }
        let slot = &mut slots[sc.index(a, b, x, y)];
        if slot.is_some() {
            return Err(Error::DuplicateEntry { a, b, x, y });
        }
        *slot = Some(T::read(obj)?);
    }
    sc.entries()
        .zip(slots)
        .map(|((a, b, x, y), s)| s.ok_or(Error::MissingEntry { a, b, x, y }))
        .collect()
}

pub fn behavior_to_value<T: JsonScalar>(b: &Behavior<T>) -> Value {
    json!({ "scenario": scenario_to_value(b.scenario()), "p": table_to_value(b.scenario(), b.table()) })
}

pub fn behavior_from_value<T: JsonScalar>(v: &Value) -> Result<Behavior<T>> {
    let obj = as_object(v, "behavior")?;
    let sc = scenario_from_value(field(obj, "scenario")?)?;
    Behavior::from_table(sc, table_from_value(&sc, field(obj, "p")?, "p")?)
}

pub fn behavior_to_string<T: JsonScalar>(b: &Behavior<T>) -> String {
    pretty(&behavior_to_value(b))
}

pub fn behavior_from_str<T: JsonScalar>(s: &str) -> Result<Behavior<T>> {
    behavior_from_value(&serde_json::from_str(s)?)
}

fn sense_from_str(s: &str) -> Result<Sense> {
    match s {
        "<=" | "le" => Ok(Sense::Le),
        ">=" | "ge" => Ok(Sense::Ge),
        _ => Err(Error::Parse(format!("sense must be \"<=\" or \">=\", got {s:?}"))),
    }
}

pub fn inequality_to_value<T: JsonScalar>(ineq: &Inequality<T>) -> Value {
    let mut bound = Map::new();
    ineq.bound.write(&mut bound);
    json!({
        "scenario": scenario_to_value(&ineq.scenario),
        "coeffs": table_to_value(&ineq.scenario, &ineq.coeffs),
        "bound": Value::Object(bound),
        "sense": ineq.sense.symbol(),
    })
}

pub fn inequality_from_value<T: JsonScalar>(v: &Value) -> Result<Inequality<T>> {
    let obj = as_object(v, "inequality")?;
    let sc = scenario_from_value(field(obj, "scenario")?)?;
    let coeffs = table_from_value(&sc, field(obj, "coeffs")?, "coeffs")?;
    let bound = T::read(as_object(field(obj, "bound")?, "bound")?)?;
    let sense = match obj.get("sense") {
        Some(Value::String(s)) => sense_from_str(s)?,
        Some(v) => return Err(Error::Parse(format!("sense must be a string, got {v}"))),
        None => Sense::Le,
    };
    Inequality::new(sc, coeffs, bound, sense)
}

pub fn inequality_to_string<T: JsonScalar>(ineq: &Inequality<T>) -> String {
    pretty(&inequality_to_value(ineq))
}

pub fn inequality_from_str<T: JsonScalar>(s: &str) -> Result<Inequality<T>> {
    inequality_from_value(&serde_json::from_str(s)?)
}

pub fn inequalities_to_string<T: JsonScalar>(list: &[Inequality<T>]) -> String {
    pretty(&Value::Array(list.iter().map(inequality_to_value).collect()))
}

/// Accepts a single inequality object or an array of them.
pub fn inequalities_from_str<T: JsonScalar>(s: &str) -> Result<Vec<Inequality<T>>> {
    let v: Value = serde_json::from_str(s)?;
    match &v {
        Value::Array(items) => items.iter().map(inequality_from_value).collect(),
        _ => Ok(vec![inequality_from_value(&v)?]),
    }
}

pub fn extension_to_value(e: &LfExtension) -> Value {
    let q = e
        .q
        .iter()
        .map(|&((a, b, c, d, x, y), ref v)| {
            let mut obj = Map::new();
            for (k, i) in [("a", a), ("b", b), ("c", c), ("d", d), ("x", x), ("y", y)] {
                obj.insert(k.into(), i.into());
            }
            v.write(&mut obj);
            Value::Object(obj)
        })
        .collect();
    json!({ "scenario": scenario_to_value(&e.scenario), "q": Value::Array(q) })
}

pub fn extension_from_value(v: &Value) -> Result<LfExtension> {
    let obj = as_object(v, "extension")?;
    let scenario = scenario_from_value(field(obj, "scenario")?)?;
    let items = field(obj, "q")?.as_array().ok_or_else(|| Error::Parse("'q' must be an array".into()))?;
    let q = items
        .iter()
        .map(|item| {
            let o = as_object(item, "extension entry")?;
            let idx = (
                index_field(o, "a")?,
                index_field(o, "b")?,
                index_field(o, "c")?,
                index_field(o, "d")?,
                index_field(o, "x")?,
                index_field(o, "y")?,
            );
            Ok((idx, Rational::read(o)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LfExtension { scenario, q })
}

pub fn membership_to_value(kind: PolytopeKind, r: &MembershipResult) -> Value {
    let certificate = match &r.certificate {
        Certificate::Decomposition(ws) => {
            let weights: Vec<Value> = ws
                .iter()
                .map(|(s, w)| {
                    let mut obj = Map::new();
                    obj.insert("alice".into(), json!(s.alice_map));
                    obj.insert("bob".into(), json!(s.bob_map));
                    w.write(&mut obj);
                    Value::Object(obj)
                })
                .collect();
            json!({ "type": "decomposition", "weights": weights })
        }
        Certificate::Extension(e) => json!({ "type": "extension", "extension": extension_to_value(e) }),
        Certificate::NoSignalling => json!({ "type": "no_signalling" }),
        Certificate::Separating(ineq) => json!({ "type": "separating", "inequality": inequality_to_value(ineq) }),
    };
    json!({ "kind": kind.name(), "inside": r.inside, "certificate": certificate })
}

pub fn membership_from_value(v: &Value) -> Result<(PolytopeKind, MembershipResult)> {
    let obj = as_object(v, "membership result")?;
    let kind: PolytopeKind = field(obj, "kind")?
        .as_str()
        .ok_or_else(|| Error::Parse("'kind' must be a string".into()))?
        .parse()?;
    let inside = field(obj, "inside")?.as_bool().ok_or_else(|| Error::Parse("'inside' must be a boolean".into()))?;
    let cert = as_object(field(obj, "certificate")?, "certificate")?;
    let certificate = match field(cert, "type")?.as_str() {
        Some("decomposition") => {
            let items =
                field(cert, "weights")?.as_array().ok_or_else(|| Error::Parse("'weights' must be an array".into()))?;
            let ws = items
                .iter()
                .map(|item| {
                    let o = as_object(item, "weight")?;
                    let alice: Vec<usize> = serde_json::from_value(field(o, "alice")?.clone())?;
                    let bob: Vec<usize> = serde_json::from_value(field(o, "bob")?.clone())?;
                    Ok((DeterministicStrategy::new(alice, bob), Rational::read(o)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Certificate::Decomposition(ws)
        }
        Some("extension") => Certificate::Extension(extension_from_value(field(cert, "extension")?)?),
        Some("no_signalling") => Certificate::NoSignalling,
        Some("separating") => Certificate::Separating(inequality_from_value(field(cert, "inequality")?)?),
        other => return Err(Error::Parse(format!("unknown certificate type {other:?}"))),
    };
    Ok((kind, MembershipResult { inside, certificate }))
}

/// `{"variables":[{"name","card"}],"p":[...]}` with entries in row-major
/// order, first variable most significant.
pub fn joint_to_value<T: JsonScalar + Field>(d: &JointDistribution<T>) -> Value {
    let vars: Vec<Value> = d.names().iter().zip(d.cards()).map(|(n, c)| json!({ "name": n, "card": c })).collect();
    let p: Vec<Value> = d
        .table()
        .iter()
        .map(|v| {
            let mut obj = Map::new();
            v.write(&mut obj);
            Value::Object(obj)
        })
        .collect();
    json!({ "variables": vars, "p": p })
}

pub fn joint_from_value<T: JsonScalar + Field>(v: &Value) -> Result<JointDistribution<T>> {
    let obj = as_object(v, "distribution")?;
    let vars = field(obj, "variables")?.as_array().ok_or_else(|| Error::Parse("'variables' must be an array".into()))?;
    let mut names = Vec::with_capacity(vars.len());
    let mut cards = Vec::with_capacity(vars.len());
    for var in vars {
        let o = as_object(var, "variable")?;
        names.push(field(o, "name")?.as_str().ok_or_else(|| Error::Parse("'name' must be a string".into()))?.to_string());
        cards.push(index_field(o, "card")?);
    }
    let p = field(obj, "p")?.as_array().ok_or_else(|| Error::Parse("'p' must be an array".into()))?;
    let table = p.iter().map(|e| T::read(as_object(e, "probability")?)).collect::<Result<Vec<T>>>()?;
    JointDistribution::new(names, cards, table)
}

/// `{"num","den"}` object for a single rational.
pub fn rational_to_value(r: &Rational) -> Value {
    let mut obj = Map::new();
    r.write(&mut obj);
    Value::Object(obj)
}

pub fn rational_from_value(v: &Value) -> Result<Rational> {
    Rational::read(as_object(v, "rational")?)
}

/// Pretty-printed JSON with a trailing newline.
pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn behavior_round_trip() {
        let pr = Behavior::<Rational>::pr_box(Scenario::binary(2, 2)).unwrap();
        let s = behavior_to_string(&pr);
        assert!(s.contains("\"num\": 1") && s.contains("\"den\": 2"));
        assert_eq!(behavior_from_str::<Rational>(&s).unwrap(), pr);
    }

    #[test]
    fn big_integers_use_strings() {
        let big = Rational::new(BigInt::from(7), BigInt::from(10).pow(30));
        let v = rational_to_value(&big);
        assert!(v["den"].is_string());
        assert_eq!(rational_from_value(&v).unwrap(), big);
    }

    #[test]
    fn missing_and_duplicate_entries() {
        let pr = Behavior::<Rational>::pr_box(Scenario::binary(2, 2)).unwrap();
        let mut v = behavior_to_value(&pr);
        let first = v["p"][0].clone();
        v["p"].as_array_mut().unwrap().pop();
        assert!(matches!(behavior_from_value::<Rational>(&v), Err(Error::MissingEntry { .. })));
        v["p"].as_array_mut().unwrap().push(first);
        assert!(matches!(behavior_from_value::<Rational>(&v), Err(Error::DuplicateEntry { .. })));
    }

    #[test]
    fn inequality_round_trip() {
        let chsh = Inequality::<Rational>::chsh(Scenario::binary(3, 3), (2, 3), (1, 3)).unwrap();
        let back: Inequality<Rational> = inequality_from_str(&inequality_to_string(&chsh)).unwrap();
        assert_eq!(back, chsh);
        let ge = Inequality::new(chsh.scenario, chsh.coeffs.clone(), rat(-3, 7), Sense::Ge).unwrap();
        assert_eq!(inequality_from_str::<Rational>(&inequality_to_string(&ge)).unwrap(), ge);
    }

    #[test]
    fn float_entries_are_bit_exact() {
        let sc = Scenario::binary(2, 2);
        let b = Behavior::from_fn(sc, |a, b, x, y| (a * 7 + b * 3 + x + y) as f64 / 97.0 + 1e-17);
        let back: Behavior<f64> = behavior_from_str(&behavior_to_string(&b)).unwrap();
        assert!(b.table().iter().zip(back.table()).all(|(p, q)| p.to_bits() == q.to_bits()));
    }

    #[test]
    fn joint_round_trip() {
        let g = crate::causal::bell_dag(2).unwrap();
        let d = crate::causal::random_markov(&g, 3).unwrap();
        let back: JointDistribution<Rational> = joint_from_value(&joint_to_value(&d)).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn float_reader_accepts_exact_entries() {
        let v = json!({ "num": 1, "den": 4 });
        assert_eq!(f64::read(v.as_object().unwrap()).unwrap(), 0.25);
        assert_eq!(rational_from_value(&json!({ "num": -6, "den": 4 })).unwrap(), rat(-3, 2));
    }
}
