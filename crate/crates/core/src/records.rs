//! The shared structured text format.
//!
//! One JSON-shaped format (UTF-8; objects, arrays, strings, booleans, and
//! small structural integers) carries every record the CLI reads or writes:
//! algebras, elements, partitions, set functions, groups, labeled
//! partitions, certificates, and witnesses. Rationals are canonical `"p/q"`
//! strings, big integers decimal strings. Emission is canonical — keys
//! sorted, values reduced, one trailing newline — so identical inputs
//! produce byte-identical outputs.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::algebra::{Elem, FiniteAlgebra, PartitionOfUnity, VeeMonoidHom};
use crate::error::{Error, Result};
use crate::pathology::{ChristensenWitness, DominationCertificate, KelleyMeasure};
use crate::pugroup::{cx, CxRat, GElem, GroupKind, GroupOracle, LengthFn, PUFunc, PosTypeFn};
use crate::rational::{format_rational, parse_nonneg_rational, parse_rational};
use crate::submeasure::{Repr, SetFunc};

/// Canonical one-line rendering: sorted keys, newline-terminated.
pub fn canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        Error::InvalidInput(format!(
            "malformed record at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn as_object<'v>(v: &'v Value, what: &str) -> Result<&'v Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::InvalidInput(format!("{what} must be an object")))
}

fn as_array<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| Error::InvalidInput(format!("{what} must be an array")))
}

fn as_str<'v>(v: &'v Value, what: &str) -> Result<&'v str> {
    v.as_str().ok_or_else(|| Error::InvalidInput(format!("{what} must be a string")))
}

fn field<'v>(obj: &'v Map<String, Value>, key: &str, what: &str) -> Result<&'v Value> {
    obj.get(key).ok_or_else(|| Error::InvalidInput(format!("{what} is missing field {key:?}")))
}

fn rational_value(r: &BigRational) -> Value {
    Value::String(format_rational(r))
}

fn bigint_value(n: &BigInt) -> Value {
    Value::String(n.to_string())
}

fn parse_bigint(v: &Value, what: &str) -> Result<BigInt> {
    let s = as_str(v, what)?;
    s.parse::<BigInt>().map_err(|_| Error::InvalidInput(format!("{what}: bad integer {s:?}")))
}

// ---------------------------------------------------------------- algebras

pub fn algebra_to_value(algebra: &FiniteAlgebra) -> Value {
    json!({ "atoms": algebra.atom_names() })
}

pub fn algebra_from_value(v: &Value) -> Result<Arc<FiniteAlgebra>> {
    let obj = as_object(v, "algebra record")?;
    let atoms = as_array(field(obj, "atoms", "algebra record")?, "atoms")?;
    let names = atoms
        .iter()
        .map(|a| Ok(as_str(a, "atom name")?.to_string()))
        .collect::<Result<Vec<_>>>()?;
    FiniteAlgebra::new(names)
}

// ---------------------------------------------------------------- elements

/// Elements serialize as atom-name arrays, sorted lexicographically.
pub fn elem_to_value(e: &Elem) -> Value {
    let mut names = e.atom_names();
    names.sort();
    json!(names)
}

pub fn elem_from_value(algebra: &Arc<FiniteAlgebra>, v: &Value) -> Result<Elem> {
    let names = as_array(v, "element")?
        .iter()
        .map(|a| Ok(as_str(a, "atom name")?.to_string()))
        .collect::<Result<Vec<_>>>()?;
    Elem::from_atom_names(algebra, &names)
}

pub fn partition_to_value(p: &PartitionOfUnity) -> Value {
    Value::Array(p.cells().iter().map(elem_to_value).collect())
}

pub fn partition_from_value(algebra: &Arc<FiniteAlgebra>, v: &Value) -> Result<PartitionOfUnity> {
    let cells = as_array(v, "partition")?
        .iter()
        .map(|c| elem_from_value(algebra, c))
        .collect::<Result<Vec<_>>>()?;
    PartitionOfUnity::new(algebra, cells)
}

// ------------------------------------------------------------ set functions

/// Emits a set-function record. The algebra's atoms are always included, so
/// every emitted record parses without context.
pub fn setfunc_to_value(phi: &SetFunc) -> Value {
    let atoms = json!(phi.algebra().atom_names());
    match phi.repr() {
        Repr::Table(values) => {
            let mut map = Map::new();
            for (mask, v) in values.iter().enumerate() {
                map.insert(mask.to_string(), rational_value(v));
            }
            json!({ "kind": "table", "atoms": atoms, "values": Value::Object(map) })
        }
        Repr::CoverCount { family, unit_cost } => {
            let mut fam: Vec<&Elem> = family.iter().collect();
            fam.sort_by_key(|e| e.mask());
            json!({
                "kind": "cover",
                "atoms": atoms,
                "family": fam.iter().map(|e| elem_to_value(e)).collect::<Vec<_>>(),
                "unit_cost": rational_value(unit_cost),
            })
        }
        Repr::AtomMeasure(weights) => {
            json!({ "kind": "measure", "atoms": atoms, "weights": weights_to_value(phi.algebra(), weights) })
        }
        Repr::MaxOf(components) => {
            let of: Vec<Value> = components
                .iter()
                .map(
                    |w| json!({ "kind": "measure", "weights": weights_to_value(phi.algebra(), w) }),
                )
                .collect();
            json!({ "kind": "max", "atoms": atoms, "of": of })
        }
        Repr::Pullback { outer, hom } => {
            let mut table = Map::new();
            for (mask, image) in hom.table().iter().enumerate() {
                let img = Elem::from_mask(hom.target(), *image).expect("in range");
                table.insert(mask.to_string(), elem_to_value(&img));
            }
            json!({
                "kind": "pullback",
                "atoms": atoms,
                "outer": setfunc_to_value(outer),
                "hom": { "table": Value::Object(table) },
            })
        }
    }
}

fn weights_to_value(algebra: &Arc<FiniteAlgebra>, weights: &[BigRational]) -> Value {
    let mut map = Map::new();
    for (name, w) in algebra.atom_names().iter().zip(weights) {
        map.insert(name.clone(), rational_value(w));
    }
    Value::Object(map)
}

fn weights_from_value(algebra: &Arc<FiniteAlgebra>, v: &Value) -> Result<Vec<BigRational>> {
    let obj = as_object(v, "weights")?;
    let mut weights = vec![crate::rational::zero(); algebra.atom_count()];
    for (name, val) in obj {
        let idx = algebra
            .atom_index(name)
            .ok_or_else(|| Error::InvalidInput(format!("weights: unknown atom {name:?}")))?;
        weights[idx] = parse_nonneg_rational(as_str(val, "weight")?)?;
    }
    Ok(weights)
}

/// Parses a set-function record. The atom list is taken from the record's
/// `atoms` field when present; for `cover`, `measure`, and `max` records it
/// can be inferred (sorted lexicographically) from the member sets or weight
/// keys. `table` and `pullback` records always need `atoms`.
pub fn setfunc_from_value(v: &Value) -> Result<SetFunc> {
    setfunc_from_value_impl(v, None)
}

/// Parses a set-function record against a context algebra; a record carrying
/// its own `atoms` must agree with the context exactly.
pub fn setfunc_from_value_in(algebra: &Arc<FiniteAlgebra>, v: &Value) -> Result<SetFunc> {
    setfunc_from_value_impl(v, Some(algebra))
}

fn setfunc_from_value_impl(v: &Value, context: Option<&Arc<FiniteAlgebra>>) -> Result<SetFunc> {
    let obj = as_object(v, "set-function record")?;
    let kind = as_str(field(obj, "kind", "set-function record")?, "kind")?;
    let own = match obj.get("atoms") {
        Some(atoms) => Some(algebra_from_value(&json!({ "atoms": atoms }))?),
        None => None,
    };
    let algebra = match (own, context) {
        (Some(a), Some(ctx)) => {
            if &a != ctx {
                return Err(Error::AlgebraMismatch {
                    context: "record atoms differ from the context algebra".into(),
                });
            }
            Some(a)
        }
        (Some(a), None) => Some(a),
        (None, Some(ctx)) => Some(Arc::clone(ctx)),
        (None, None) => None,
    };
    match kind {
        "table" => {
            let algebra = algebra.ok_or_else(|| {
                Error::InvalidInput("table records need an explicit atoms field".into())
            })?;
            let values_obj = as_object(field(obj, "values", "table record")?, "values")?;
            let mut values = vec![crate::rational::zero(); algebra.size()];
            let mut seen = vec![false; algebra.size()];
            for (key, val) in values_obj {
                let mask: usize = key
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("values: bad mask key {key:?}")))?;
                if mask >= algebra.size() {
                    return Err(Error::InvalidInput(format!("values: mask {mask} out of range")));
                }
                values[mask] = parse_nonneg_rational(as_str(val, "table value")?)?;
                seen[mask] = true;
            }
            if let Some(missing) = seen.iter().position(|s| !s) {
                return Err(Error::InvalidInput(format!(
                    "values: mask {missing} is missing (tables must be total)"
                )));
            }
            SetFunc::from_table(&algebra, values)
        }
        "cover" => {
            let family_vals = as_array(field(obj, "family", "cover record")?, "family")?;
            let algebra = match algebra {
                Some(a) => a,
                None => infer_algebra_from_sets(family_vals)?,
            };
            let family = family_vals
                .iter()
                .map(|f| elem_from_value(&algebra, f))
                .collect::<Result<Vec<_>>>()?;
            let unit_cost = parse_nonneg_rational(as_str(
                field(obj, "unit_cost", "cover record")?,
                "unit_cost",
            )?)?;
            SetFunc::cover_count(&algebra, family, unit_cost)
        }
        "measure" => {
            let weights_val = field(obj, "weights", "measure record")?;
            let algebra = match algebra {
                Some(a) => a,
                None => infer_algebra_from_keys(weights_val)?,
            };
            let weights = weights_from_value(&algebra, weights_val)?;
            SetFunc::atom_measure(&algebra, weights)
        }
        "max" => {
            let of = as_array(field(obj, "of", "max record")?, "of")?;
            if of.is_empty() {
                return Err(Error::InvalidInput("max record needs at least one component".into()));
            }
            let algebra = match algebra {
                Some(a) => a,
                None => {
                    let first = as_object(&of[0], "max component")?;
                    infer_algebra_from_keys(field(first, "weights", "max component")?)?
                }
            };
            let mut components = Vec::new();
            for comp in of {
                let cobj = as_object(comp, "max component")?;
                if let Some(k) = cobj.get("kind") {
                    if as_str(k, "component kind")? != "measure" {
                        return Err(Error::InvalidInput(
                            "max components must be measure records".into(),
                        ));
                    }
                }
                components
                    .push(weights_from_value(&algebra, field(cobj, "weights", "max component")?)?);
            }
            SetFunc::max_of(&algebra, components)
        }
        "pullback" => {
            let algebra = algebra.ok_or_else(|| {
                Error::InvalidInput("pullback records need an explicit atoms field".into())
            })?;
            let outer = setfunc_from_value(field(obj, "outer", "pullback record")?)?;
            let hom_obj = as_object(field(obj, "hom", "pullback record")?, "hom")?;
            let table_obj = as_object(field(hom_obj, "table", "hom")?, "hom table")?;
            let mut table = vec![u32::MAX; algebra.size()];
            for (key, val) in table_obj {
                let mask: usize = key
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("hom table: bad key {key:?}")))?;
                if mask >= algebra.size() {
                    return Err(Error::InvalidInput(format!(
                        "hom table: mask {mask} out of range"
                    )));
                }
                table[mask] = elem_from_value(outer.algebra(), val)?.mask();
            }
            if let Some(missing) = table.iter().position(|&t| t == u32::MAX) {
                return Err(Error::InvalidInput(format!(
                    "hom table: mask {missing} is missing (tables must be total)"
                )));
            }
            let hom = VeeMonoidHom::new(&algebra, outer.algebra(), table)?;
            SetFunc::pullback(outer, hom)
        }
        other => Err(Error::InvalidInput(format!("unknown set-function kind {other:?}"))),
    }
}

fn infer_algebra_from_sets(sets: &[Value]) -> Result<Arc<FiniteAlgebra>> {
    let mut names: Vec<String> = Vec::new();
    for s in sets {
        for a in as_array(s, "family member")? {
            let name = as_str(a, "atom name")?.to_string();
            if !names.contains(&name) {
                names.push(name);
            }
        }
    }
    names.sort();
    FiniteAlgebra::new(names)
}

fn infer_algebra_from_keys(weights: &Value) -> Result<Arc<FiniteAlgebra>> {
    let obj = as_object(weights, "weights")?;
    FiniteAlgebra::new(obj.keys().cloned().collect())
}

// ---------------------------------------------------------------- groups

pub fn group_to_value(group: &GroupOracle) -> Value {
    let mut out = match group.kind() {
        GroupKind::Table { elements, mul, inv, .. } => {
            let k = elements.len();
            let rows: Vec<Value> = (0..k)
                .map(|i| Value::Array((0..k).map(|j| json!(mul[i * k + j])).collect()))
                .collect();
            json!({
                "kind": "table",
                "elements": elements,
                "mul": rows,
                "inv": inv,
            })
        }
        GroupKind::Cyclic { order } => json!({ "kind": "cyclic", "order": order }),
        GroupKind::Integers => json!({ "kind": "int" }),
        GroupKind::RationalsAdd => json!({ "kind": "rational-add" }),
    };
    if let Some(LengthFn::Table(values)) = group.declared_length() {
        let mut map = Map::new();
        for (i, v) in values.iter().enumerate() {
            map.insert(group.format_elem(&GElem::Idx(i)), rational_value(v));
        }
        out.as_object_mut().expect("object").insert("length".into(), Value::Object(map));
    }
    out
}

pub fn group_from_value(v: &Value) -> Result<Arc<GroupOracle>> {
    let obj = as_object(v, "group record")?;
    let kind = as_str(field(obj, "kind", "group record")?, "kind")?;
    let group = match kind {
        "table" => {
            let elements = as_array(field(obj, "elements", "group record")?, "elements")?
                .iter()
                .map(|e| Ok(as_str(e, "element name")?.to_string()))
                .collect::<Result<Vec<_>>>()?;
            let k = elements.len();
            let rows = as_array(field(obj, "mul", "group record")?, "mul")?;
            if rows.len() != k {
                return Err(Error::InvalidInput("mul table has wrong row count".into()));
            }
            let mut mul = Vec::with_capacity(k * k);
            for row in rows {
                let row = as_array(row, "mul row")?;
                if row.len() != k {
                    return Err(Error::InvalidInput("mul table has a ragged row".into()));
                }
                for entry in row {
                    let idx = entry
                        .as_u64()
                        .ok_or_else(|| Error::InvalidInput("mul entry must be an index".into()))?;
                    mul.push(
                        u32::try_from(idx)
                            .map_err(|_| Error::InvalidInput("mul entry out of range".into()))?,
                    );
                }
            }
            let inv = as_array(field(obj, "inv", "group record")?, "inv")?
                .iter()
                .map(|entry| {
                    let idx = entry
                        .as_u64()
                        .ok_or_else(|| Error::InvalidInput("inv entry must be an index".into()))?;
                    u32::try_from(idx)
                        .map_err(|_| Error::InvalidInput("inv entry out of range".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            GroupOracle::from_cayley_table(elements, mul, inv)?
        }
        "cyclic" => {
            let order = field(obj, "order", "group record")?
                .as_u64()
                .ok_or_else(|| Error::InvalidInput("order must be a positive integer".into()))?;
            GroupOracle::cyclic(order as usize)?
        }
        "int" => GroupOracle::integers(),
        "rational-add" => GroupOracle::rationals_additive(),
        other => return Err(Error::InvalidInput(format!("unknown group kind {other:?}"))),
    };
    if let Some(length_val) = obj.get("length") {
        let lobj = as_object(length_val, "length")?;
        let k = group.order().ok_or_else(|| {
            Error::InvalidInput("length tables are for finite groups only".into())
        })?;
        let mut values = vec![crate::rational::zero(); k];
        let mut seen = vec![false; k];
        for (name, val) in lobj {
            let g = group.parse_elem(name)?;
            let GElem::Idx(i) = g else { unreachable!("finite kinds index") };
            values[i] = parse_nonneg_rational(as_str(val, "length value")?)?;
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidInput("length table must be total".into()));
        }
        return group.with_length(LengthFn::Table(values));
    }
    Ok(group)
}

// ------------------------------------------------------- labeled partitions

/// `{"group": ..., "labels": {"<label>": ["p"], ...}}`.
pub fn pufunc_to_value(a: &PUFunc) -> Value {
    json!({
        "group": group_to_value(a.group()),
        "labels": labels_to_value(a),
    })
}

pub fn labels_to_value(a: &PUFunc) -> Value {
    let mut map = Map::new();
    for (g, img) in a.label_map() {
        map.insert(a.group().format_elem(g), elem_to_value(img));
    }
    Value::Object(map)
}

pub fn pufunc_from_value(algebra: &Arc<FiniteAlgebra>, v: &Value) -> Result<PUFunc> {
    let obj = as_object(v, "labeled-partition record")?;
    let group = group_from_value(field(obj, "group", "labeled-partition record")?)?;
    labels_from_value(algebra, &group, field(obj, "labels", "labeled-partition record")?)
}

/// Parses a bare label map against a context algebra and group.
pub fn labels_from_value(
    algebra: &Arc<FiniteAlgebra>,
    group: &Arc<GroupOracle>,
    v: &Value,
) -> Result<PUFunc> {
    let obj = as_object(v, "labels")?;
    let mut pairs = Vec::new();
    for (name, img) in obj {
        pairs.push((group.parse_elem(name)?, elem_from_value(algebra, img)?));
    }
    PUFunc::new(algebra, group, pairs)
}

// ----------------------------------------------------------- certificates

pub fn domination_to_value(
    phi: &SetFunc,
    cert: &DominationCertificate,
    kappa: Option<&BigRational>,
    verified: bool,
) -> Value {
    let mut primal = Map::new();
    for (name, w) in phi.algebra().atom_names().iter().zip(&cert.primal) {
        primal.insert(name.clone(), rational_value(w));
    }
    let dual: Vec<Value> = cert
        .dual
        .iter()
        .map(|(set, y)| json!({ "set": elem_to_value(set), "y": rational_value(y) }))
        .collect();
    let mut out = json!({
        "M": rational_value(&cert.value),
        "primal": Value::Object(primal),
        "dual": dual,
        "dual_cost": rational_value(&cert.dual_cost),
        "verified": verified,
    });
    if let Some(k) = kappa {
        out.as_object_mut().expect("object").insert("kappa".into(), rational_value(k));
    }
    out
}

pub fn domination_from_value(phi: &SetFunc, v: &Value) -> Result<DominationCertificate> {
    let obj = as_object(v, "certificate record")?;
    let value = parse_rational(as_str(field(obj, "M", "certificate")?, "M")?)?;
    let primal_obj = as_object(field(obj, "primal", "certificate")?, "primal")?;
    let algebra = phi.algebra();
    let mut primal = vec![crate::rational::zero(); algebra.atom_count()];
    for (name, val) in primal_obj {
        let idx = algebra
            .atom_index(name)
            .ok_or_else(|| Error::InvalidInput(format!("primal: unknown atom {name:?}")))?;
        primal[idx] = parse_rational(as_str(val, "primal weight")?)?;
    }
    let mut dual = Vec::new();
    for entry in as_array(field(obj, "dual", "certificate")?, "dual")? {
        let eobj = as_object(entry, "dual entry")?;
        let set = elem_from_value(algebra, field(eobj, "set", "dual entry")?)?;
        let y = parse_rational(as_str(field(eobj, "y", "dual entry")?, "y")?)?;
        dual.push((set, y));
    }
    let dual_cost = match obj.get("dual_cost") {
        Some(dc) => parse_rational(as_str(dc, "dual_cost")?)?,
        None => value.clone(),
    };
    Ok(DominationCertificate { value, primal, dual, dual_cost })
}

pub fn kelley_to_value(phi: &SetFunc, km: &KelleyMeasure, verified: bool) -> Value {
    let names = phi.algebra().atom_names();
    let order: Vec<Value> = km.order.iter().map(|&i| json!(names[i])).collect();
    let mut nu = Map::new();
    for (name, w) in names.iter().zip(&km.nu) {
        nu.insert(name.clone(), rational_value(w));
    }
    json!({
        "order": order,
        "nu": Value::Object(nu),
        "total": rational_value(&km.nu.iter().sum()),
        "verified": verified,
    })
}

pub fn witness_to_value(
    phi: &SetFunc,
    witness: Option<&ChristensenWitness>,
    bound: Option<(&BigRational, &BigRational)>,
) -> Value {
    let Some(w) = witness else {
        return json!({ "witness": Value::Null });
    };
    let sets: Vec<Value> = w
        .sets
        .iter()
        .map(|(set, mult)| json!({ "set": elem_to_value(set), "count": bigint_value(mult) }))
        .collect();
    let mut out = json!({
        "witness": {
            "epsilon": rational_value(&w.epsilon),
            "m": bigint_value(&w.m),
            "sets": sets,
            "partition": partition_to_value(&w.partition),
            "min_coverage": bigint_value(&w.min_coverage),
        },
        "verified": true,
    });
    if let Some((m_val, limit)) = bound {
        out.as_object_mut().expect("object").insert(
            "mass_bound".into(),
            json!({ "M": rational_value(m_val), "limit": rational_value(limit) }),
        );
    }
    let _ = phi;
    out
}

pub fn witness_from_value(phi: &SetFunc, v: &Value) -> Result<Option<ChristensenWitness>> {
    let obj = as_object(v, "witness record")?;
    let w = field(obj, "witness", "witness record")?;
    if w.is_null() {
        return Ok(None);
    }
    let wobj = as_object(w, "witness")?;
    let algebra = phi.algebra();
    let epsilon = parse_rational(as_str(field(wobj, "epsilon", "witness")?, "epsilon")?)?;
    let m = parse_bigint(field(wobj, "m", "witness")?, "m")?;
    let mut sets = Vec::new();
    for entry in as_array(field(wobj, "sets", "witness")?, "sets")? {
        let eobj = as_object(entry, "witness set")?;
        let set = elem_from_value(algebra, field(eobj, "set", "witness set")?)?;
        let count = parse_bigint(field(eobj, "count", "witness set")?, "count")?;
        sets.push((set, count));
    }
    let partition = partition_from_value(algebra, field(wobj, "partition", "witness")?)?;
    let min_coverage = parse_bigint(field(wobj, "min_coverage", "witness")?, "min_coverage")?;
    Ok(Some(ChristensenWitness { epsilon, m, sets, partition, min_coverage }))
}

// ------------------------------------------------------ positive-type data

/// Complex scalars serialize as `"re"` or `["re", "im"]`.
pub fn complex_to_value(z: &CxRat) -> Value {
    use num_traits::Zero;
    if z.im.is_zero() {
        rational_value(&z.re)
    } else {
        json!([format_rational(&z.re), format_rational(&z.im)])
    }
}

pub fn complex_from_value(v: &Value) -> Result<CxRat> {
    match v {
        Value::String(s) => Ok(cx(parse_rational(s)?, crate::rational::zero())),
        Value::Array(parts) if parts.len() == 2 => Ok(cx(
            parse_rational(as_str(&parts[0], "real part")?)?,
            parse_rational(as_str(&parts[1], "imaginary part")?)?,
        )),
        _ => Err(Error::InvalidInput("complex scalar must be \"re\" or [\"re\",\"im\"]".into())),
    }
}

/// `{"values": {"<element>": <complex>, ...}}` against a context group.
pub fn postype_from_value(group: &Arc<GroupOracle>, v: &Value) -> Result<PosTypeFn> {
    let obj = as_object(v, "positive-type record")?;
    let values_obj = as_object(field(obj, "values", "positive-type record")?, "values")?;
    let k = group
        .order()
        .ok_or_else(|| Error::precondition("positive-type functions need a finite group"))?;
    let mut values: Vec<Option<CxRat>> = vec![None; k];
    for (name, val) in values_obj {
        let g = group.parse_elem(name)?;
        let GElem::Idx(i) = g else { unreachable!("finite kinds index") };
        values[i] = Some(complex_from_value(val)?);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                Error::InvalidInput(format!(
                    "values: element {} is missing",
                    group.format_elem(&GElem::Idx(i))
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PosTypeFn::new(group, values)
}

/// A labeled map of group elements `{"g": "h", ...}` plus a target group,
/// used for arbitrary relabelings.
pub fn label_map_from_value(
    source: &Arc<GroupOracle>,
    target: &Arc<GroupOracle>,
    v: &Value,
) -> Result<BTreeMap<GElem, GElem>> {
    let obj = as_object(v, "label map")?;
    let mut map = BTreeMap::new();
    for (from, to) in obj {
        map.insert(source.parse_elem(from)?, target.parse_elem(as_str(to, "target label")?)?);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathology::{copoints, max_dominated_measure};
    use crate::rational::{rat, rat_int};

    #[test]
    fn algebra_round_trip() {
        let alg = FiniteAlgebra::new(vec!["p".into(), "q".into(), "r".into()]).unwrap();
        let v = algebra_to_value(&alg);
        assert_eq!(canonical_string(&v), "{\"atoms\":[\"p\",\"q\",\"r\"]}\n");
        let back = algebra_from_value(&v).unwrap();
        assert_eq!(back, alg);
    }

    #[test]
    fn setfunc_round_trips() {
        let funcs = vec![
            copoints(3).unwrap(),
            SetFunc::atom_measure(
                &FiniteAlgebra::numbered(3).unwrap(),
                vec![rat(1, 2), rat(1, 3), rat(1, 6)],
            )
            .unwrap(),
            SetFunc::max_of(
                &FiniteAlgebra::numbered(2).unwrap(),
                vec![vec![rat_int(1), rat_int(0)], vec![rat_int(0), rat_int(1)]],
            )
            .unwrap(),
        ];
        for phi in funcs {
            let v = setfunc_to_value(&phi);
            let back = setfunc_from_value(&v).unwrap();
            assert_eq!(back.algebra(), phi.algebra());
            for m in 0..phi.algebra().size() as u32 {
                assert_eq!(back.eval_mask(m), phi.eval_mask(m), "mask {m}");
            }
            // Canonical emission is stable.
            assert_eq!(canonical_string(&v), canonical_string(&setfunc_to_value(&back)));
        }
    }

    #[test]
    fn pullback_record_round_trip() {
        use crate::algebra::{quotient_by_ideal, Ideal};
        let alg = FiniteAlgebra::new(vec!["p".into(), "q".into(), "r".into()]).unwrap();
        let ideal = Ideal::generated_by_atoms(&alg, &[2]).unwrap();
        let (quot, theta) = quotient_by_ideal(&alg, &ideal).unwrap();
        let outer = SetFunc::atom_measure(&quot, vec![rat(1, 2), rat(1, 2)]).unwrap();
        let phi = SetFunc::pullback(outer, theta).unwrap();
        let v = setfunc_to_value(&phi);
        let back = setfunc_from_value(&v).unwrap();
        for m in 0..8u32 {
            assert_eq!(back.eval_mask(m), phi.eval_mask(m));
        }
        // Records without atoms are rejected for this kind.
        let mut stripped = v.clone();
        stripped.as_object_mut().unwrap().remove("atoms");
        assert!(setfunc_from_value(&stripped).is_err());
    }

    #[test]
    fn setfunc_parses_without_atoms_field() {
        let v: Value = serde_json::from_str(
            r#"{"kind":"cover","family":[["b","c"],["a","c"],["a","b"]],"unit_cost":"1"}"#,
        )
        .unwrap();
        let phi = setfunc_from_value(&v).unwrap();
        assert_eq!(phi.algebra().atom_names(), &["a", "b", "c"]);
        assert_eq!(phi.total(), rat_int(2));
        let m: Value =
            serde_json::from_str(r#"{"kind":"measure","weights":{"x":"1/3","y":"2/3"}}"#).unwrap();
        let mu = setfunc_from_value(&m).unwrap();
        assert_eq!(mu.total(), rat_int(1));
    }

    #[test]
    fn table_record_requires_totality_and_zero() {
        let missing: Value =
            serde_json::from_str(r#"{"kind":"table","atoms":["p"],"values":{"0":"0"}}"#).unwrap();
        assert!(setfunc_from_value(&missing).is_err());
        let bad_zero: Value =
            serde_json::from_str(r#"{"kind":"table","atoms":["p"],"values":{"0":"1","1":"1"}}"#)
                .unwrap();
        let err = setfunc_from_value(&bad_zero).unwrap_err();
        assert!(err.to_string().contains("φ(0)"));
    }

    #[test]
    fn group_round_trips() {
        let z4 = GroupOracle::cyclic(4).unwrap();
        let v = group_to_value(&z4);
        assert_eq!(group_from_value(&v).unwrap(), z4);
        let s3 = GroupOracle::symmetric(3).unwrap();
        let v = group_to_value(&s3);
        assert_eq!(group_from_value(&v).unwrap(), s3);
        let z4l = z4.with_length(GroupOracle::cyclic_word_length(4)).unwrap();
        let v = group_to_value(&z4l);
        assert_eq!(group_from_value(&v).unwrap(), z4l);
        let z = GroupOracle::integers();
        assert_eq!(group_from_value(&group_to_value(&z)).unwrap(), z);
    }

    #[test]
    fn pufunc_record_round_trip() {
        let alg = FiniteAlgebra::new(vec!["p".into(), "q".into(), "r".into()]).unwrap();
        let z4 = GroupOracle::cyclic(4).unwrap();
        let a = PUFunc::new(
            &alg,
            &z4,
            [
                (GElem::Idx(1), Elem::from_atom_names(&alg, &["p"]).unwrap()),
                (GElem::Idx(3), Elem::from_atom_names(&alg, &["q", "r"]).unwrap()),
            ],
        )
        .unwrap();
        let v = pufunc_to_value(&a);
        let back = pufunc_from_value(&alg, &v).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn certificate_round_trip_replays() {
        let phi = copoints(3).unwrap();
        let cert = max_dominated_measure(&phi).unwrap();
        let kappa = rat(3, 4);
        let v = domination_to_value(&phi, &cert, Some(&kappa), true);
        let text = canonical_string(&v);
        assert!(text.contains("\"M\":\"3/2\""));
        assert!(text.contains("\"kappa\":\"3/4\""));
        let parsed = domination_from_value(&phi, &parse_value(&text).unwrap()).unwrap();
        crate::pathology::verify_domination_certificate(&phi, &parsed).unwrap();
        assert_eq!(parsed.value, cert.value);
    }

    #[test]
    fn witness_none_and_some() {
        let phi = copoints(3).unwrap();
        let none = witness_to_value(&phi, None, None);
        assert_eq!(canonical_string(&none), "{\"witness\":null}\n");
        assert!(witness_from_value(&phi, &none).unwrap().is_none());
        let alg = FiniteAlgebra::numbered(3).unwrap();
        let zero = SetFunc::zero_func(&alg);
        let w = crate::pathology::christensen_witness(&zero, &rat(1, 2)).unwrap().unwrap();
        let v = witness_to_value(&zero, Some(&w), None);
        let back = witness_from_value(&zero, &v).unwrap().unwrap();
        crate::pathology::verify_witness(&zero, &back).unwrap();
    }

    #[test]
    fn complex_scalars() {
        let z = cx(rat(1, 2), rat(-1, 3));
        let v = complex_to_value(&z);
        assert_eq!(complex_from_value(&v).unwrap(), z);
        let real = cx(rat_int(2), rat_int(0));
        assert_eq!(complex_to_value(&real), Value::String("2".into()));
        assert_eq!(complex_from_value(&Value::String("2".into())).unwrap(), real);
    }
}
