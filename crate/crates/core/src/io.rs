//! JSON documents for instances and positions.
//!
//! ```json
//! {"tasks": 2, "agents": [{"id": "X", "eff": [4, 7]}, {"id": "Y", "eff_str": ["5", "5"]}],
//!  "threshold": 3}
//! ```
//!
//! Efficiencies may be written as decimals (`0.25`); the whole instance is
//! then rescaled by the smallest power of ten making every value integral and
//! `scale_pow10` records the exponent. Position files add `picked_a`,
//! `picked_b` (agent id lists), `to_move` and optionally `first`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{DraftError, Result};
use crate::instance::{Agent, Instance, Player, Position};

const MAX_SCALE_POW10: i64 = 30;

/// Decimal literal as `mantissa * 10^exp`.
fn parse_decimal(s: &str) -> Option<(BigInt, i64)> {
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int}{frac}");
    let mut m = BigInt::parse_bytes(if all.is_empty() { b"0" } else { all.as_bytes() }, 10)?;
    if neg {
        m = -m;
    }
    Some((m, exp - frac.len() as i64))
}

fn pow10(k: i64) -> BigInt {
    BigInt::from(10u32).pow(k as u32)
}

struct RawAgent {
    id: String,
    eff: Vec<(BigInt, i64)>,
}

fn number_literal(v: &Value, at: &str) -> Result<(BigInt, i64)> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(DraftError::parse(at, "expected a number")),
    };
    parse_decimal(&text).ok_or_else(|| DraftError::parse(at, format!("malformed number {text:?}")))
}

fn parse_agents(doc: &Map<String, Value>, tasks: usize) -> Result<Vec<RawAgent>> {
    let agents = match doc.get("agents") {
        Some(Value::Array(a)) => a,
        Some(_) => return Err(DraftError::parse("agents", "expected an array")),
        None => return Err(DraftError::parse("agents", "missing field")),
    };
    let mut out = Vec::with_capacity(agents.len());
    for (k, a) in agents.iter().enumerate() {
        let at = format!("agents[{k}]");
        let obj = a
            .as_object()
            .ok_or_else(|| DraftError::parse(&at, "expected an object"))?;
        let id = match obj.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            Some(_) => return Err(DraftError::parse(format!("{at}.id"), "expected a string")),
            None => return Err(DraftError::parse(format!("{at}.id"), "missing field")),
        };
        let (field, list) = match (obj.get("eff"), obj.get("eff_str")) {
            (Some(e), None) => ("eff", e),
            (None, Some(e)) => ("eff_str", e),
            (Some(_), Some(_)) => {
                return Err(DraftError::parse(&at, "give either eff or eff_str, not both"))
            }
            (None, None) => return Err(DraftError::parse(&at, "missing eff")),
        };
        let list = list
            .as_array()
            .ok_or_else(|| DraftError::parse(format!("{at}.{field}"), "expected an array"))?;
        if list.len() != tasks {
            return Err(DraftError::parse(
                format!("{at}.{field}"),
                format!("agent {id:?} has {} entries, expected {tasks}", list.len()),
            ));
        }
        let mut eff = Vec::with_capacity(tasks);
        for (j, v) in list.iter().enumerate() {
            let at = format!("{at}.{field}[{j}]");
            if field == "eff_str" && !v.is_string() {
                return Err(DraftError::parse(at, "expected a decimal string"));
            }
            let (m, e) = number_literal(v, &at)?;
            if m.is_negative() {
                return Err(DraftError::parse(at, "efficiencies must be nonnegative"));
            }
            eff.push((m, e));
        }
        out.push(RawAgent { id, eff });
    }
    Ok(out)
}

fn instance_from_map(doc: &Map<String, Value>) -> Result<Instance> {
    let tasks = doc
        .get("tasks")
        .and_then(Value::as_u64)
        .ok_or_else(|| DraftError::parse("tasks", "expected a positive integer"))?;
    if tasks == 0 {
        return Err(DraftError::parse("tasks", "expected a positive integer"));
    }
    let tasks = tasks as usize;
    let raw = parse_agents(doc, tasks)?;
    let base_scale = match doc.get("scale_pow10") {
        None => 0,
        Some(v) => v
            .as_u64()
            .filter(|&s| s as i64 <= MAX_SCALE_POW10)
            .ok_or_else(|| DraftError::parse("scale_pow10", "expected a small nonnegative integer"))?
            as i64,
    };
    let threshold = doc
        .get("threshold")
        .map(|v| number_literal(v, "threshold"))
        .transpose()?;

    // Smallest rescaling that makes every efficiency and the threshold integral.
    let extra = raw
        .iter()
        .flat_map(|a| a.eff.iter())
        .chain(threshold.iter())
        .filter(|(m, _)| !m.is_zero())
        .map(|(_, e)| -e)
        .max()
        .unwrap_or(0)
        .max(0);
    if base_scale + extra > MAX_SCALE_POW10 {
        return Err(DraftError::parse(
            "agents",
            format!("decimal precision beyond 10^-{MAX_SCALE_POW10} is not supported"),
        ));
    }
    let rescale = |(m, e): &(BigInt, i64)| -> BigInt {
        let k = e + extra;
        if m.is_zero() {
            BigInt::zero()
        } else if k >= 0 {
            m * pow10(k)
        } else {
            // Unreachable: `extra` covers every negative exponent.
            m / pow10(-k)
        }
    };

    let agents = raw
        .iter()
        .map(|a| {
            let eff = a
                .eff
                .iter()
                .map(|x| rescale(x).to_biguint().expect("nonnegative checked above"))
                .collect();
            Agent::new(a.id.clone(), eff)
        })
        .collect();
    let mut inst = Instance::new(tasks, agents).map_err(|e| match e {
        DraftError::DuplicateId(id) => DraftError::parse("agents", format!("duplicate id {id:?}")),
        other => other,
    })?;
    inst.threshold = threshold.as_ref().map(rescale);
    inst.scale_pow10 = (base_scale + extra) as u32;
    Ok(inst)
}

fn parse_value(text: &[u8]) -> Result<Map<String, Value>> {
    let v: Value = serde_json::from_slice(text).map_err(|e| {
        DraftError::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    match v {
        Value::Object(m) => Ok(m),
        _ => Err(DraftError::parse("document", "expected a JSON object")),
    }
}

pub fn parse_instance(text: &[u8]) -> Result<Instance> {
    instance_from_map(&parse_value(text)?)
}

/// A big integer as a plain JSON number.
pub fn big_json(x: &BigInt) -> Value {
    // Numbers survive verbatim thanks to serde_json's arbitrary precision.
    serde_json::from_str(&x.to_string()).expect("integer literal is valid JSON")
}

/// `serialize_with` helpers that write big integers as plain JSON numbers.
pub mod big {
    use num_bigint::{BigInt, BigUint};
    use serde::ser::Error;
    use serde::{Serialize, Serializer};

    fn number<S: Serializer>(text: String, s: S) -> Result<S::Ok, S::Error> {
        let n: serde_json::Number = text.parse().map_err(S::Error::custom)?;
        n.serialize(s)
    }

    pub fn int<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        number(v.to_string(), s)
    }

    pub fn uint<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        number(v.to_string(), s)
    }

    pub fn opt_int<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => int(v, s),
            None => s.serialize_none(),
        }
    }
}

pub fn instance_to_value(instance: &Instance) -> Value {
    let wide = instance
        .agents()
        .iter()
        .flat_map(|a| a.eff.iter())
        .any(|x| x.to_u64().is_none());
    let agents: Vec<Value> = instance
        .agents()
        .iter()
        .map(|a| {
            if wide {
                json!({"id": a.id, "eff_str": a.eff.iter().map(BigUint::to_string).collect::<Vec<_>>()})
            } else {
                json!({"id": a.id, "eff": a.eff.iter().map(|x| x.to_u64().unwrap()).collect::<Vec<_>>()})
            }
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("tasks".into(), json!(instance.tasks()));
    doc.insert("agents".into(), Value::Array(agents));
    if let Some(s) = &instance.threshold {
        doc.insert("threshold".into(), big_json(s));
    }
    if instance.scale_pow10 > 0 {
        doc.insert("scale_pow10".into(), json!(instance.scale_pow10));
    }
    Value::Object(doc)
}

pub fn serialize_instance(instance: &Instance) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&instance_to_value(instance)).unwrap();
    out.push(b'\n');
    out
}

fn id_list(doc: &Map<String, Value>, key: &str, inst: &Instance) -> Result<BTreeSet<usize>> {
    let Some(v) = doc.get(key) else {
        return Ok(BTreeSet::new());
    };
    let arr = v
        .as_array()
        .ok_or_else(|| DraftError::parse(key, "expected an array of agent ids"))?;
    let mut out = BTreeSet::new();
    for (k, id) in arr.iter().enumerate() {
        let at = format!("{key}[{k}]");
        let id = id
            .as_str()
            .ok_or_else(|| DraftError::parse(&at, "expected a string"))?;
        let idx = inst
            .index_of(id)
            .ok_or_else(|| DraftError::parse(&at, format!("unknown agent id {id:?}")))?;
        if !out.insert(idx) {
            return Err(DraftError::parse(at, format!("agent {id:?} listed twice")));
        }
    }
    Ok(out)
}

fn player_field(doc: &Map<String, Value>, key: &str) -> Result<Option<Player>> {
    match doc.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => s.parse().map(Some).map_err(|_| {
            DraftError::parse(key, format!("expected \"alice\" or \"bob\", got {s:?}"))
        }),
        Some(_) => Err(DraftError::parse(key, "expected \"alice\" or \"bob\"")),
    }
}

/// Reads a position document; a plain instance document is its starting
/// position with Alice to move.
pub fn parse_position(text: &[u8]) -> Result<Position> {
    let doc = parse_value(text)?;
    let inst = instance_from_map(&doc)?;
    let a = id_list(&doc, "picked_a", &inst)?;
    let b = id_list(&doc, "picked_b", &inst)?;
    let first = player_field(&doc, "first")?.unwrap_or(Player::Alice);
    let to_move = match player_field(&doc, "to_move")? {
        Some(p) => p,
        None => {
            let (mine, theirs) = match first {
                Player::Alice => (a.len(), b.len()),
                Player::Bob => (b.len(), a.len()),
            };
            if mine > theirs {
                first.other()
            } else {
                first
            }
        }
    };
    Position::new(inst, a, b, first, to_move)
}

pub fn position_to_value(position: &Position) -> Value {
    let inst = position.instance();
    let ids = |set: &BTreeSet<usize>| -> Vec<String> {
        set.iter().map(|&k| inst.agent(k).id.clone()).collect()
    };
    let mut doc = instance_to_value(inst);
    let map = doc.as_object_mut().unwrap();
    map.insert("picked_a".into(), json!(ids(position.picked_a())));
    map.insert("picked_b".into(), json!(ids(position.picked_b())));
    map.insert("to_move".into(), json!(position.to_move().as_str()));
    if position.first() != Player::Alice {
        map.insert("first".into(), json!(position.first().as_str()));
    }
    doc
}

pub fn serialize_position(position: &Position) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&position_to_value(position)).unwrap();
    out.push(b'\n');
    out
}

/// Renders a score in the instance's original units (undoing decimal rescaling).
pub fn format_score(value: &BigInt, scale_pow10: u32) -> String {
    if scale_pow10 == 0 {
        return value.to_string();
    }
    let digits = value.magnitude().to_str_radix(10);
    let k = scale_pow10 as usize;
    let padded = format!("{digits:0>width$}", width = k + 1);
    let (int, frac) = padded.split_at(padded.len() - k);
    let sign = if value.sign() == Sign::Minus { "-" } else { "" };
    format!("{sign}{int}.{frac}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DOC: &str = r#"{"tasks": 2, "agents": [
        {"id": "X", "eff": [4, 7]}, {"id": "Y", "eff": [5, 5]}, {"id": "Z", "eff": [0, 4]}]}"#;

    #[test]
    fn parses_canonical_document() {
        let inst = parse_instance(DOC.as_bytes()).unwrap();
        assert_eq!(inst.tasks(), 2);
        assert_eq!(inst.len(), 3);
        assert_eq!(inst.agent(0).eff, vec![BigUint::from(4u32), BigUint::from(7u32)]);
        assert_eq!(inst.threshold, None);
    }

    #[test]
    fn round_trip_is_canonical() {
        let inst = parse_instance(DOC.as_bytes()).unwrap();
        let once = serialize_instance(&inst);
        let again = serialize_instance(&parse_instance(&once).unwrap());
        assert_eq!(once, again);
    }

    #[test]
    fn rejects_bad_documents() {
        let neg = r#"{"tasks": 2, "agents": [{"id": "a", "eff": [-1, 0]}]}"#;
        let err = parse_instance(neg.as_bytes()).unwrap_err();
        assert_eq!(
            err,
            DraftError::parse("agents[0].eff[0]", "efficiencies must be nonnegative")
        );
        let ragged = r#"{"tasks": 2, "agents": [{"id": "a", "eff": [1]}]}"#;
        assert!(matches!(parse_instance(ragged.as_bytes()), Err(DraftError::Parse { .. })));
        let dup = r#"{"tasks": 1, "agents": [{"id": "a", "eff": [1]}, {"id": "a", "eff": [2]}]}"#;
        assert!(matches!(parse_instance(dup.as_bytes()), Err(DraftError::Parse { .. })));
        let junk = r#"{"tasks": 1, "agents": [}"#;
        match parse_instance(junk.as_bytes()) {
            Err(DraftError::Parse { at, .. }) => assert!(at.starts_with("line 1")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_instance(br#"{"tasks": 0, "agents": []}"#).is_err());
    }

    #[test]
    fn big_and_decimal_values() {
        let doc = r#"{"tasks": 1, "agents": [{"id": "a", "eff_str": ["123456789012345678901234567890"]}],
                      "threshold": 5}"#;
        let inst = parse_instance(doc.as_bytes()).unwrap();
        assert_eq!(inst.agent(0).eff[0].to_string(), "123456789012345678901234567890");
        let text = String::from_utf8(serialize_instance(&inst)).unwrap();
        assert!(text.contains("eff_str"));
        assert_eq!(parse_instance(text.as_bytes()).unwrap(), inst);

        let doc = r#"{"tasks": 2, "agents": [{"id": "a", "eff": [0.5, 1.25]}, {"id": "b", "eff": [2, 0]}]}"#;
        let inst = parse_instance(doc.as_bytes()).unwrap();
        assert_eq!(inst.scale_pow10, 2);
        assert_eq!(inst.agent(0).eff, vec![BigUint::from(50u32), BigUint::from(125u32)]);
        assert_eq!(inst.agent(1).eff[0], BigUint::from(200u32));
        assert_eq!(format_score(&BigInt::from(-125), 2), "-1.25");
        assert_eq!(format_score(&BigInt::from(5), 2), "0.05");
    }

    #[test]
    fn position_documents() {
        let doc = r#"{"tasks": 2, "agents": [
            {"id": "X", "eff": [4, 7]}, {"id": "Y", "eff": [5, 5]}, {"id": "Z", "eff": [0, 4]}],
            "picked_a": ["X"], "picked_b": [], "to_move": "bob"}"#;
        let p = parse_position(doc.as_bytes()).unwrap();
        assert_eq!(p.to_move(), Player::Bob);
        let back = parse_position(&serialize_position(&p)).unwrap();
        assert_eq!(back, p);
        let bad = doc.replace("\"bob\"", "\"alice\"");
        assert!(parse_position(bad.as_bytes()).is_err());
        let unknown = doc.replace("[\"X\"]", "[\"Q\"]");
        assert!(matches!(parse_position(unknown.as_bytes()), Err(DraftError::Parse { .. })));
    }

    proptest! {
        #[test]
        fn serialize_parse_identity(rows in prop::collection::vec(prop::collection::vec(0u64..1000, 3), 0..6),
                                    threshold in prop::option::of(-5i64..50)) {
            let refs: Vec<&[u64]> = rows.iter().map(|r| r.as_slice()).collect();
            let mut inst = Instance::from_rows(3, &refs).unwrap();
            inst.threshold = threshold.map(BigInt::from);
            prop_assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
        }
    }
}
