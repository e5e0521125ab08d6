//! JSON documents (schema tag `pingpong/1`) for certificates and tables.

use serde_json::{json, Map, Value};

use crate::certificate::{PingPongTable, TableEntry, WanderingCertificate};
use crate::error::{Error, Result};
use crate::model::{BoundaryModel, CertKind};
use crate::pipeline::IndependentSetCertificate;
use crate::presentation::GroupPresentation;

pub const SCHEMA: &str = "pingpong/1";

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?.as_str().ok_or_else(|| Error::Parse(format!("field {key:?} must be a string")))
}

pub fn check_schema(v: &Value) -> Result<()> {
    match v.get("schema").and_then(Value::as_str) {
        None | Some(SCHEMA) => Ok(()),
        Some(other) => Err(Error::Parse(format!("unsupported schema {other:?}"))),
    }
}

pub fn read_group(v: &Value) -> Result<GroupPresentation> {
    check_schema(v)?;
    GroupPresentation::from_json(&field(v, "group")?.to_string())
}

pub fn cert_kind_to_json<M: BoundaryModel>(m: &M, kind: &CertKind<M::Region>) -> Value {
    match kind {
        CertKind::InfiniteOrder { omega_minus, omega_plus } => {
            json!({"omegaMinus": m.region_to_json(omega_minus), "omegaPlus": m.region_to_json(omega_plus)})
        }
        CertKind::FiniteOrder { order, omega } => json!({"order": order, "omega": m.region_to_json(omega)}),
    }
}

pub fn cert_kind_from_json<M: BoundaryModel>(m: &M, v: &Value) -> Result<CertKind<M::Region>> {
    if let Some(order) = v.get("order") {
        let order = order.as_u64().ok_or_else(|| Error::Parse("order must be a positive integer".into()))?;
        return Ok(CertKind::FiniteOrder { order, omega: m.region_from_json(field(v, "omega")?)? });
    }
    Ok(CertKind::InfiniteOrder {
        omega_minus: m.region_from_json(field(v, "omegaMinus")?)?,
        omega_plus: m.region_from_json(field(v, "omegaPlus")?)?,
    })
}

pub fn wandering_to_json<M: BoundaryModel>(m: &M, p: &GroupPresentation, c: &WanderingCertificate<M>) -> Value {
    json!({
        "schema": SCHEMA,
        "group": p.to_json(),
        "word": m.alphabet().format_word(&c.word),
        "element": m.format_element(&c.gamma),
        "cert": cert_kind_to_json(m, &c.kind),
        "sigma": m.region_to_json(&c.sigma(m)),
    })
}

pub fn wandering_from_json<M: BoundaryModel>(m: &M, v: &Value) -> Result<WanderingCertificate<M>> {
    check_schema(v)?;
    let word = m.alphabet().parse_word(str_field(v, "word")?)?;
    Ok(WanderingCertificate::new(m, word, cert_kind_from_json(m, field(v, "cert")?)?))
}

/// A ping-pong table document, with the optional witness region.
#[derive(Clone, Debug)]
pub struct TableDocument<M: BoundaryModel> {
    pub table: PingPongTable<M>,
    pub witness: Option<M::Region>,
}

pub fn table_to_json<M: BoundaryModel>(
    m: &M,
    p: &GroupPresentation,
    table: &PingPongTable<M>,
    witness: Option<&M::Region>,
) -> Value {
    let al = m.alphabet();
    let entries: Vec<Value> = table
        .entries
        .iter()
        .map(|e| {
            json!({
                "word": al.format_word(&e.word),
                "element": m.format_element(&e.alpha),
                "omega": m.region_to_json(&e.omega),
                "cert": cert_kind_to_json(m, &e.cert.kind),
            })
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("schema".into(), json!(SCHEMA));
    doc.insert("group".into(), p.to_json());
    doc.insert("entries".into(), Value::Array(entries));
    doc.insert("basepoint".into(), json!(m.format_point(&table.basepoint)));
    if let Some(w) = witness {
        doc.insert("witness".into(), m.region_to_json(w));
    }
    Value::Object(doc)
}

pub fn table_from_json<M: BoundaryModel>(m: &M, v: &Value) -> Result<TableDocument<M>> {
    check_schema(v)?;
    let al = m.alphabet();
    let entries = field(v, "entries")?
        .as_array()
        .ok_or_else(|| Error::Parse("entries must be an array".into()))?
        .iter()
        .map(|e| {
            let word = al.parse_word(str_field(e, "word")?)?;
            let cert = WanderingCertificate::new(m, word.clone(), cert_kind_from_json(m, field(e, "cert")?)?);
            Ok(TableEntry { alpha: m.evaluate(&word), word, omega: m.region_from_json(field(e, "omega")?)?, cert })
        })
        .collect::<Result<Vec<_>>>()?;
    let basepoint = m.parse_point(str_field(v, "basepoint")?)?;
    let witness = v.get("witness").map(|w| m.region_from_json(w)).transpose()?;
    Ok(TableDocument { table: PingPongTable { entries, basepoint }, witness })
}

pub fn independent_set_to_json<M: BoundaryModel>(
    m: &M,
    p: &GroupPresentation,
    cert: &IndependentSetCertificate<M>,
) -> Value {
    let al = m.alphabet();
    let mut doc = table_to_json(m, p, &cert.table, Some(&cert.witness));
    let classes: Vec<Value> = cert
        .classes
        .iter()
        .map(|c| {
            json!({
                "key": c.key,
                "representative": al.format_word(&c.representative),
                "delta": al.format_word(&c.delta),
                "conjugate": al.format_word(&c.conjugate),
            })
        })
        .collect();
    let obj = doc.as_object_mut().expect("object");
    obj.insert("classes".into(), Value::Array(classes));
    obj.insert("transcript".into(), json!(cert.transcript));
    doc
}

/// Conjugacy bookkeeping of a certificate document: every listed class must
/// satisfy `conjugate = delta⁻¹·representative·delta` as words.
pub fn check_class_records<M: BoundaryModel>(m: &M, v: &Value) -> Result<Option<String>> {
    let Some(classes) = v.get("classes").and_then(Value::as_array) else { return Ok(None) };
    let al = m.alphabet();
    let entries = field(v, "entries")?.as_array().ok_or_else(|| Error::Parse("entries must be an array".into()))?;
    if classes.len() != entries.len() {
        return Ok(Some("class records do not match the table entries".into()));
    }
    for (i, (c, e)) in classes.iter().zip(entries).enumerate() {
        let rep = al.parse_word(str_field(c, "representative")?)?;
        let delta = al.parse_word(str_field(c, "delta")?)?;
        let conj = al.parse_word(str_field(c, "conjugate")?)?;
        let word = al.parse_word(str_field(e, "word")?)?;
        if al.conjugate(&rep, &delta) != conj || conj != word {
            return Ok(Some(format!("class {}: recorded conjugate is not δ⁻¹·γ·δ", i + 1)));
        }
    }
    Ok(None)
}
