//! JSON payloads: degrees, curves, polynomials.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use trop_refine::lattice::{validate_degree, DegreeSpec, LatticeVector};
use trop_refine::tropcurve::{check_balancing, check_geometry, BoundedEdge, EdgeRef, End, MarkedPoint};
use trop_refine::{Error, LaurentPoly, ParamTropicalCurve, Point, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeDto {
    pub vectors: Vec<[i64; 2]>,
}

impl DegreeDto {
    pub fn from_spec(d: &DegreeSpec) -> Self {
        DegreeDto { vectors: d.vectors().iter().map(|v| [v.x, v.y]).collect() }
    }

    pub fn lattice_vectors(&self) -> Result<Vec<LatticeVector>, Error> {
        self.vectors
            .iter()
            .enumerate()
            .map(|(i, &[x, y])| {
                if x == 0 && y == 0 {
                    Err(Error::Parse(format!("vectors[{i}] is the zero vector")))
                } else {
                    Ok(LatticeVector::new(x, y))
                }
            })
            .collect()
    }

    pub fn to_spec(&self, require_even: bool) -> Result<DegreeSpec, Error> {
        validate_degree(&self.lattice_vectors()?, require_even)
    }
}

pub fn parse_degree(text: &str) -> Result<DegreeDto, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("degree: {e}")))
}

fn q_to_string(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn q_from_str(s: &str) -> Result<Q, Error> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
    let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

fn point_dto(p: &Point) -> [String; 2] {
    [q_to_string(&p.x), q_to_string(&p.y)]
}

fn point_from(p: &[String; 2]) -> Result<Point, Error> {
    Ok(Point::new(q_from_str(&p[0])?, q_from_str(&p[1])?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDto {
    pub from: usize,
    pub to: usize,
    pub weight: i64,
    pub direction: [i64; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndDto {
    pub vertex: usize,
    pub vector: [i64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "index")]
pub enum EdgeRefDto {
    Bounded(usize),
    End(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkedDto {
    pub edge: EdgeRefDto,
    pub position: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDto {
    pub vertices: Vec<[String; 2]>,
    pub edges: Vec<EdgeDto>,
    pub ends: Vec<EndDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked: Option<MarkedDto>,
}

impl CurveDto {
    pub fn from_curve(t: &ParamTropicalCurve) -> Self {
        CurveDto {
            vertices: t.vertices.iter().map(point_dto).collect(),
            edges: t
                .edges
                .iter()
                .map(|e| EdgeDto { from: e.from, to: e.to, weight: e.weight, direction: [e.direction.x, e.direction.y] })
                .collect(),
            ends: t.ends.iter().map(|e| EndDto { vertex: e.vertex, vector: [e.vector.x, e.vector.y], label: e.label }).collect(),
            marked: t.marked.as_ref().map(|m| MarkedDto {
                edge: match m.edge {
                    EdgeRef::Bounded(i) => EdgeRefDto::Bounded(i),
                    EdgeRef::End(i) => EdgeRefDto::End(i),
                },
                position: point_dto(&m.position),
            }),
        }
    }

    /// Rebuilds the curve and checks geometry and balancing.
    pub fn to_curve(&self) -> Result<ParamTropicalCurve, Error> {
        let t = ParamTropicalCurve {
            vertices: self.vertices.iter().map(point_from).collect::<Result<_, _>>()?,
            edges: self
                .edges
                .iter()
                .map(|e| BoundedEdge {
                    from: e.from,
                    to: e.to,
                    weight: e.weight,
                    direction: LatticeVector::new(e.direction[0], e.direction[1]),
                })
                .collect(),
            ends: self
                .ends
                .iter()
                .map(|e| End { vertex: e.vertex, vector: LatticeVector::new(e.vector[0], e.vector[1]), label: e.label })
                .collect(),
            marked: match &self.marked {
                None => None,
                Some(m) => Some(MarkedPoint {
                    edge: match m.edge {
                        EdgeRefDto::Bounded(i) => EdgeRef::Bounded(i),
                        EdgeRefDto::End(i) => EdgeRef::End(i),
                    },
                    position: point_from(&m.position)?,
                }),
            },
        };
        check_geometry(&t)?;
        check_balancing(&t).map_err(|v| Error::InvalidCurve(format!("unbalanced: {}", v.reason)))?;
        Ok(t)
    }
}

/// A curve file holds one curve object or an array of them.
pub fn parse_curves(text: &str) -> Result<Vec<CurveDto>, Error> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("curve: {e}")))?;
    let one = |v: Value| serde_json::from_value::<CurveDto>(v).map_err(|e| Error::Parse(format!("curve: {e}")));
    match v {
        Value::Array(items) => items.into_iter().map(one).collect(),
        other => Ok(vec![one(other)?]),
    }
}

/// `{"canonical": "...", "terms": {"<half exponent>": coeff}}`. Coefficients
/// that do not fit an i64 are written as decimal strings.
pub fn poly_to_json(p: &LaurentPoly) -> Value {
    let mut terms = Map::new();
    for (h, c) in p.terms() {
        let v = match i64::try_from(c) {
            Ok(n) => Value::from(n),
            Err(_) => Value::String(c.to_string()),
        };
        terms.insert(h.to_string(), v);
    }
    let mut m = Map::new();
    m.insert("canonical".into(), Value::String(p.to_canonical_string()));
    m.insert("terms".into(), Value::Object(terms));
    Value::Object(m)
}

pub fn poly_from_json(v: &Value) -> Result<LaurentPoly, Error> {
    let bad = |m: &str| Error::Parse(format!("polynomial: {m}"));
    let obj = v.as_object().ok_or_else(|| bad("expected an object"))?;
    if let Some(k) = obj.keys().find(|k| *k != "canonical" && *k != "terms") {
        return Err(bad(&format!("unknown field {k:?}")));
    }
    let terms = obj.get("terms").and_then(Value::as_object).ok_or_else(|| bad("missing terms map"))?;
    let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
    for (k, c) in terms {
        let h: i64 = k.parse().map_err(|_| bad(&format!("bad half exponent {k:?}")))?;
        let c = match c {
            Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| bad("non-integer coefficient"))?,
            Value::String(s) => BigInt::from_str(s).map_err(|_| bad("non-integer coefficient"))?,
            _ => return Err(bad("non-integer coefficient")),
        };
        *acc.entry(h).or_default() += c;
    }
    let p = acc.into_iter().fold(LaurentPoly::zero(), |p, (h, c)| p + LaurentPoly::monomial(c, h));
    if let Some(s) = obj.get("canonical") {
        let s = s.as_str().ok_or_else(|| bad("canonical is not a string"))?;
        if LaurentPoly::parse(s)? != p {
            return Err(bad("canonical string disagrees with terms"));
        }
    }
    Ok(p)
}
