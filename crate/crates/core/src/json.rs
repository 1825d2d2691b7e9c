//! JSON encoding of sets, credences, functions and maps.
//!
//! Rationals travel as strings (`"3/4"`, `"2"`), infinities as `"inf"` and
//! `"-inf"`. An object without an `"ambient"` field lives on the full line,
//! except inside a mixture, where parts inherit the enclosing ambient.

use serde_json::{json, Map, Value};

use crate::credence::{Credence, DensityPiece, End, Rule, Side};
use crate::elementary::{Ambient, AmbientKind, ElementarySet};
use crate::error::{Error, Result};
use crate::liminal::Decomposition;
use crate::maps::MonotoneAffineMap;
use crate::piecewise::PiecewiseAffine;
use crate::scalar::{Extended, Scalar};
use crate::stone::FiniteAlgebra;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn scalar_to_json<S: Scalar>(x: &S) -> Value {
    Value::String(x.to_string())
}

pub fn extended_to_json<S: Scalar>(x: &Extended<S>) -> Value {
    Value::String(x.to_string())
}

fn as_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
        other => Err(perr(format!("expected a rational string, got {other}"))),
    }
}

pub fn scalar_from_json<S: Scalar>(v: &Value) -> Result<S> {
    S::parse(&as_text(v)?)
}

pub fn extended_from_json<S: Scalar>(v: &Value) -> Result<Extended<S>> {
    Extended::parse(&as_text(v)?)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| perr(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field(v, key)?.as_array().ok_or_else(|| perr(format!("field {key:?} must be an array")))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?.as_str().ok_or_else(|| perr(format!("field {key:?} must be a string")))
}

fn scalars<S: Scalar>(v: &Value, key: &str) -> Result<Vec<S>> {
    array(v, key)?.iter().map(scalar_from_json).collect()
}

pub fn ambient_to_json<S: Scalar>(a: &Ambient<S>) -> Value {
    let kind = match a.kind() {
        AmbientKind::FullLine => return json!({"kind": "full"}),
        AmbientKind::Open => "open",
        AmbientKind::Closed => "closed",
    };
    json!({"kind": kind, "a": extended_to_json(a.lo()), "b": extended_to_json(a.hi())})
}

pub fn ambient_from_json<S: Scalar>(v: &Value) -> Result<Ambient<S>> {
    match str_field(v, "kind")? {
        "full" => Ok(Ambient::full_line()),
        "open" => Ambient::open(extended_from_json(field(v, "a")?)?, extended_from_json(field(v, "b")?)?),
        "closed" => Ambient::closed(scalar_from_json(field(v, "a")?)?, scalar_from_json(field(v, "b")?)?),
        k => Err(perr(format!("unknown ambient kind {k:?}"))),
    }
}

/// The `"ambient"` field of `v`, or `inherited`, or the full line.
fn ambient_or<S: Scalar>(v: &Value, inherited: Option<&Ambient<S>>) -> Result<Ambient<S>> {
    match (v.get("ambient"), inherited) {
        (Some(a), _) => ambient_from_json(a),
        (None, Some(a)) => Ok(a.clone()),
        (None, None) => Ok(Ambient::full_line()),
    }
}

fn intervals_from_json<S: Scalar>(v: &Value, ambient: &Ambient<S>) -> Result<ElementarySet<S>> {
    let list = v.as_array().ok_or_else(|| perr("intervals must be an array"))?;
    let mut raw = Vec::with_capacity(list.len());
    for pair in list {
        match pair.as_array().map(Vec::as_slice) {
            Some([lo, hi]) => raw.push((extended_from_json(lo)?, extended_from_json(hi)?)),
            _ => return Err(perr(format!("interval must be a two-element array, got {pair}"))),
        }
    }
    ElementarySet::regularize(raw, ambient)
}

pub fn set_to_json<S: Scalar>(e: &ElementarySet<S>) -> Value {
    let ivs: Vec<Value> =
        e.intervals().iter().map(|iv| json!([extended_to_json(&iv.lo), extended_to_json(&iv.hi)])).collect();
    json!({"ambient": ambient_to_json(e.ambient()), "intervals": ivs})
}

/// Intervals are regularized, so touching or overlapping input is accepted.
pub fn set_from_json<S: Scalar>(v: &Value, inherited: Option<&Ambient<S>>) -> Result<ElementarySet<S>> {
    let ambient = ambient_or(v, inherited)?;
    intervals_from_json(field(v, "intervals")?, &ambient)
}

/// Either a bare array of sets or `{"ambient":…, "generators":[…]}`.
pub fn sets_from_json<S: Scalar>(v: &Value, inherited: Option<&Ambient<S>>) -> Result<(Ambient<S>, Vec<ElementarySet<S>>)> {
    let (ambient, list) = match v {
        Value::Array(list) => (inherited.cloned().unwrap_or_else(Ambient::full_line), list),
        _ => (ambient_or(v, inherited)?, array(v, "generators")?),
    };
    let sets = list.iter().map(|s| set_from_json(s, Some(&ambient))).collect::<Result<Vec<_>>>()?;
    Ok((ambient, sets))
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn end_name(e: End) -> &'static str {
    match e {
        End::NegInf => "-inf",
        End::PosInf => "inf",
        End::AmbientLeft => "left",
        End::AmbientRight => "right",
    }
}

pub fn credence_to_json<S: Scalar>(mu: &Credence<S>) -> Value {
    let mut obj = rule_to_json(mu.rule());
    obj.insert("ambient".into(), ambient_to_json(mu.ambient()));
    Value::Object(obj)
}

fn rule_to_json<S: Scalar>(rule: &Rule<S>) -> Map<String, Value> {
    let v = match rule {
        Rule::Lebesgue => json!({"rule": "lebesgue"}),
        Rule::PointMass { x, side } => json!({"rule": "point_mass", "x": scalar_to_json(x), "side": side_name(*side)}),
        Rule::EndMass(e) => json!({"rule": "end_mass", "end": end_name(*e)}),
        Rule::AtomTable { algebra, weights } => json!({
            "rule": "atom_table",
            "atoms": algebra.atoms().iter().map(|a| set_to_json(a)["intervals"].clone()).collect::<Vec<_>>(),
            "weights": weights.iter().map(scalar_to_json).collect::<Vec<_>>(),
        }),
        Rule::Density(pieces) => json!({
            "rule": "density",
            "pieces": pieces
                .iter()
                .map(|p| json!({"lo": scalar_to_json(&p.lo), "hi": scalar_to_json(&p.hi), "mass": scalar_to_json(&p.mass)}))
                .collect::<Vec<_>>(),
        }),
        Rule::Mixture(parts) => json!({
            "rule": "mixture",
            "parts": parts
                .iter()
                .map(|(w, c)| json!({"w": scalar_to_json(w), "of": Value::Object(rule_to_json(c.rule()))}))
                .collect::<Vec<_>>(),
        }),
    };
    match v {
        Value::Object(m) => m,
        _ => unreachable!(),
    }
}

pub fn credence_from_json<S: Scalar>(v: &Value, inherited: Option<&Ambient<S>>) -> Result<Credence<S>> {
    let ambient = ambient_or(v, inherited)?;
    match str_field(v, "rule")? {
        "lebesgue" => Credence::lebesgue(&ambient),
        "point_mass" => {
            let side = match str_field(v, "side")? {
                "left" => Side::Left,
                "right" => Side::Right,
                s => return Err(perr(format!("side must be \"left\" or \"right\", got {s:?}"))),
            };
            Credence::point_mass(&ambient, scalar_from_json(field(v, "x")?)?, side)
        }
        "end_mass" => {
            let end = match str_field(v, "end")? {
                "-inf" => End::NegInf,
                "inf" | "+inf" => End::PosInf,
                "left" => End::AmbientLeft,
                "right" => End::AmbientRight,
                s => return Err(perr(format!("unknown end {s:?}"))),
            };
            Credence::end_mass(&ambient, end)
        }
        "atom_table" => {
            let cells = array(v, "atoms")?
                .iter()
                .map(|a| match a {
                    Value::Array(_) => intervals_from_json(a, &ambient),
                    _ => set_from_json(a, Some(&ambient)),
                })
                .collect::<Result<Vec<_>>>()?;
            let algebra = FiniteAlgebra::from_atoms(&cells, &ambient)?;
            // from_atoms may reorder cells, so weights are matched by set.
            let given = scalars::<S>(v, "weights")?;
            if given.len() != cells.len() {
                return Err(perr("atoms and weights differ in length"));
            }
            let weights = algebra
                .atoms()
                .iter()
                .map(|a| cells.iter().position(|c| c == a).map(|i| given[i].clone()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| perr("atom table cells are not the algebra atoms"))?;
            Credence::atom_table(algebra, weights)
        }
        "density" => {
            let pieces = array(v, "pieces")?
                .iter()
                .map(|p| {
                    Ok(DensityPiece {
                        lo: scalar_from_json(field(p, "lo")?)?,
                        hi: scalar_from_json(field(p, "hi")?)?,
                        mass: scalar_from_json(field(p, "mass")?)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Credence::density(&ambient, pieces)
        }
        "mixture" => {
            let parts = array(v, "parts")?
                .iter()
                .map(|p| Ok((scalar_from_json(field(p, "w")?)?, credence_from_json(field(p, "of")?, Some(&ambient))?)))
                .collect::<Result<Vec<_>>>()?;
            Credence::mixture(parts)
        }
        r => Err(perr(format!("unknown rule {r:?}"))),
    }
}

pub fn function_to_json<S: Scalar>(g: &PiecewiseAffine<S>) -> Value {
    json!({
        "breakpoints": g.breakpoints().iter().map(scalar_to_json).collect::<Vec<_>>(),
        "values": g.values().iter().map(scalar_to_json).collect::<Vec<_>>(),
    })
}

pub fn function_from_json<S: Scalar>(v: &Value) -> Result<PiecewiseAffine<S>> {
    PiecewiseAffine::new(scalars(v, "breakpoints")?, scalars(v, "values")?)
}

/// A function plus `"codomain"` and an optional `"domain"` of `"open"`
/// (default) or `"closed"`.
pub fn map_from_json<S: Scalar>(v: &Value) -> Result<MonotoneAffineMap<S>> {
    let graph = function_from_json(v)?;
    let codomain = ambient_from_json(field(v, "codomain")?)?;
    let closed = match v.get("domain").map(|d| d.as_str()) {
        None | Some(Some("open")) => false,
        Some(Some("closed")) => true,
        _ => return Err(perr("domain must be \"open\" or \"closed\"")),
    };
    MonotoneAffineMap::new(graph, codomain, closed)
}

pub fn map_to_json<S: Scalar>(phi: &MonotoneAffineMap<S>) -> Value {
    let mut v = function_to_json(phi.graph());
    let closed = phi.domain().kind() == AmbientKind::Closed;
    v["codomain"] = ambient_to_json(phi.codomain());
    v["domain"] = json!(if closed { "closed" } else { "open" });
    v
}

pub fn decomposition_to_json<S: Scalar>(d: &Decomposition<S>) -> Value {
    let atoms: Vec<Value> = d
        .borel
        .atoms
        .iter()
        .map(|a| {
            let (left, right) = match d.rule.at(&a.x) {
                Some(s) => (scalar_to_json(&s.left), scalar_to_json(&s.right)),
                None => (Value::Null, Value::Null),
            };
            json!({"x": scalar_to_json(&a.x), "mass": scalar_to_json(&a.mass), "left": left, "right": right})
        })
        .collect();
    json!({"lebesgue_weight": scalar_to_json(&d.borel.lebesgue_weight), "atoms": atoms})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::q;
    use crate::Rational as Q;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn set_round_trip() {
        let v = parse(r#"{"ambient":{"kind":"open","a":"0","b":"1"},"intervals":[["0","1/2"],["3/4","1"]]}"#);
        let e: ElementarySet<Q> = set_from_json(&v, None).unwrap();
        assert_eq!(e.intervals().len(), 2);
        assert_eq!(set_to_json(&e), v);
    }

    #[test]
    fn join_example() {
        let a: ElementarySet<Q> = set_from_json(&parse(r#"{"intervals":[["0","1"]]}"#), None).unwrap();
        let b: ElementarySet<Q> = set_from_json(&parse(r#"{"intervals":[["1","2"]]}"#), None).unwrap();
        let j = a.join(&b).unwrap();
        assert_eq!(set_to_json(&j)["intervals"], parse(r#"[["0","2"]]"#));
        assert_eq!(set_to_json(&j)["ambient"], parse(r#"{"kind":"full"}"#));
    }

    #[test]
    fn credence_round_trips() {
        for s in [
            r#"{"rule":"point_mass","x":"0","side":"right","ambient":{"kind":"open","a":"-1","b":"1"}}"#,
            r#"{"rule":"lebesgue","ambient":{"kind":"closed","a":"0","b":"2"}}"#,
            r#"{"rule":"end_mass","end":"inf","ambient":{"kind":"full"}}"#,
            r#"{"rule":"density","pieces":[{"lo":"0","hi":"1/2","mass":"1"}],"ambient":{"kind":"open","a":"0","b":"1"}}"#,
            r#"{"rule":"mixture","ambient":{"kind":"open","a":"-1","b":"1"},"parts":[{"w":"1/2","of":{"rule":"lebesgue"}},{"w":"1/2","of":{"rule":"point_mass","x":"0","side":"left"}}]}"#,
        ] {
            let v = parse(s);
            let mu: Credence<Q> = credence_from_json(&v, None).unwrap();
            assert_eq!(credence_to_json(&mu), v, "{s}");
            assert_eq!(credence_from_json::<Q>(&credence_to_json(&mu), None).unwrap(), mu);
        }
    }

    #[test]
    fn atom_table_matches_weights_by_cell() {
        let v = parse(
            r#"{"rule":"atom_table","ambient":{"kind":"open","a":"0","b":"1"},"atoms":[[["1/2","1"]],[["0","1/2"]]],"weights":["1/4","3/4"]}"#,
        );
        let mu: Credence<Q> = credence_from_json(&v, None).unwrap();
        let left = ElementarySet::from_pairs(&[(q(0, 1), q(1, 2))], mu.ambient()).unwrap();
        assert_eq!(mu.eval(&left).unwrap(), q(3, 4));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(set_from_json::<Q>(&parse(r#"{"intervals":[["1","0"]]}"#), None).is_err());
        assert!(set_from_json::<Q>(&parse(r#"{"intervals":[["x","1"]]}"#), None).is_err());
        assert!(credence_from_json::<Q>(&parse(r#"{"rule":"nope"}"#), None).is_err());
        assert!(credence_from_json::<Q>(&parse(r#"{"rule":"point_mass","x":"0","side":"up"}"#), None).is_err());
    }

    #[test]
    fn map_parse() {
        let v = parse(r#"{"breakpoints":["0","1"],"values":["0","2"],"codomain":{"kind":"open","a":"0","b":"2"}}"#);
        let phi: MonotoneAffineMap<Q> = map_from_json(&v).unwrap();
        assert_eq!(phi.apply(&q(1, 2)), q(1, 1));
        assert_eq!(map_from_json::<Q>(&map_to_json(&phi)).unwrap(), phi);
    }
}
