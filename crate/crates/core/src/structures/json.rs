//! JSON encoding of signatures and structures. Object keys come out sorted
//! and relation tuples are listed in lexicographic order of element names,
//! so equal structures serialize to identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

use super::signature::{ConstantSymbol, FunctionSymbol, RelationProp, RelationSymbol, Signature};
use super::structure::FiniteStructure;

pub fn signature_to_json(sig: &Signature) -> Value {
    let sort = |s: &usize| Value::String(sig.sorts()[*s].clone());
    let relations: Vec<Value> = sig
        .relations()
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("name".into(), json!(r.name));
            m.insert("arity".into(), Value::Array(r.arity.iter().map(sort).collect()));
            if !r.props.is_empty() {
                m.insert("props".into(), serde_json::to_value(&r.props).expect("props serialize"));
            }
            Value::Object(m)
        })
        .collect();
    let functions: Vec<Value> = sig
        .functions()
        .iter()
        .map(|f| {
            json!({
                "name": f.name,
                "inputs": f.inputs.iter().map(sort).collect::<Vec<_>>(),
                "output": sort(&f.output),
            })
        })
        .collect();
    let constants: Vec<Value> =
        sig.constants().iter().map(|c| json!({"name": c.name, "sort": sort(&c.sort)})).collect();
    json!({
        "sorts": sig.sorts(),
        "relations": relations,
        "functions": functions,
        "constants": constants,
    })
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Json(format!("missing field `{key}`")))
}

fn string(v: &Value) -> Result<String> {
    v.as_str().map(str::to_owned).ok_or_else(|| Error::Json(format!("expected a string, got {v}")))
}

fn array(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Json(format!("expected an array, got {v}")))
}

fn optional_array<'a>(v: &'a Value, key: &str) -> Result<&'a [Value]> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(&[]),
        Some(a) => Ok(array(a)?.as_slice()),
    }
}

pub fn signature_from_json(v: &Value) -> Result<Signature> {
    let sorts: Vec<String> = array(field(v, "sorts")?)?.iter().map(string).collect::<Result<_>>()?;
    let sort = |x: &Value| -> Result<usize> {
        let name = string(x)?;
        sorts.iter().position(|s| *s == name).ok_or_else(|| Error::Signature(format!("undeclared sort `{name}`")))
    };
    let mut relations = Vec::new();
    for r in optional_array(v, "relations")? {
        let props: Vec<RelationProp> = match r.get("props") {
            None => vec![],
            Some(p) => serde_json::from_value(p.clone())?,
        };
        relations.push(RelationSymbol {
            name: string(field(r, "name")?)?,
            arity: array(field(r, "arity")?)?.iter().map(sort).collect::<Result<_>>()?,
            props,
        });
    }
    let mut functions = Vec::new();
    for f in optional_array(v, "functions")? {
        functions.push(FunctionSymbol {
            name: string(field(f, "name")?)?,
            inputs: array(field(f, "inputs")?)?.iter().map(sort).collect::<Result<_>>()?,
            output: sort(field(f, "output")?)?,
        });
    }
    let mut constants = Vec::new();
    for c in optional_array(v, "constants")? {
        constants.push(ConstantSymbol { name: string(field(c, "name")?)?, sort: sort(field(c, "sort")?)? });
    }
    Signature::new(sorts, relations, functions, constants)
}

pub fn structure_to_json(s: &FiniteStructure) -> Value {
    let sig = s.signature();
    let name = |x: usize| s.name(x).to_owned();
    let mut carrier = Map::new();
    for (i, sort) in sig.sorts().iter().enumerate() {
        carrier.insert(sort.clone(), Value::Array(s.sort_range(i).map(|x| Value::String(name(x))).collect()));
    }
    let mut relations = Map::new();
    for (r, sym) in sig.relations().iter().enumerate() {
        let tuples: BTreeSet<Vec<String>> =
            s.relation(r).iter().map(|t| t.iter().map(|&x| name(x)).collect()).collect();
        relations.insert(sym.name.clone(), json!(tuples));
    }
    let mut functions = Map::new();
    for (f, sym) in sig.functions().iter().enumerate() {
        let mut table = BTreeMap::new();
        for (idx, &y) in s.function_table(f).iter().enumerate() {
            let key = s.table_args(f, idx).iter().map(|&x| name(x)).collect::<Vec<_>>().join(",");
            table.insert(key, name(y));
        }
        functions.insert(sym.name.clone(), json!(table));
    }
    let mut constants = Map::new();
    for (c, sym) in sig.constants().iter().enumerate() {
        constants.insert(sym.name.clone(), Value::String(name(s.constants()[c])));
    }
    let mut out = Map::new();
    out.insert("signature".into(), signature_to_json(sig));
    out.insert("carrier".into(), Value::Object(carrier));
    out.insert("relations".into(), Value::Object(relations));
    if !sig.functions().is_empty() {
        out.insert("functions".into(), Value::Object(functions));
    }
    if !sig.constants().is_empty() {
        out.insert("constants".into(), Value::Object(constants));
    }
    Value::Object(out)
}

pub fn structure_from_json(v: &Value) -> Result<FiniteStructure> {
    let sig = Arc::new(signature_from_json(field(v, "signature")?)?);
    let carrier = field(v, "carrier")?;
    let mut names = Vec::new();
    let mut sizes = Vec::new();
    for sort in sig.sorts() {
        let elems = match carrier.get(sort) {
            Some(e) => array(e)?.iter().map(string).collect::<Result<Vec<_>>>()?,
            None => vec![],
        };
        sizes.push(elems.len());
        names.extend(elems);
    }
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let elem = |n: &str| -> Result<usize> {
        index.get(n).copied().ok_or_else(|| Error::Structure(format!("unknown element `{n}`")))
    };
    let empty = Value::Object(Map::new());
    let rels = v.get("relations").unwrap_or(&empty);
    let mut relations = Vec::new();
    for sym in sig.relations() {
        let mut set = BTreeSet::new();
        if let Some(ts) = rels.get(&sym.name) {
            for t in array(ts)? {
                let tuple = array(t)?.iter().map(|x| elem(&string(x)?)).collect::<Result<Vec<_>>>()?;
                set.insert(tuple);
            }
        }
        relations.push(set);
    }
    let fns = v.get("functions").unwrap_or(&empty);
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &n| {
            let o = *acc;
            *acc += n;
            Some(o)
        })
        .collect();
    let mut functions = Vec::new();
    for sym in sig.functions() {
        let size: usize = sym.inputs.iter().map(|&s| sizes[s]).product();
        let mut table = vec![usize::MAX; size];
        let entries = fns
            .get(&sym.name)
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Structure(format!("missing table for `{}`", sym.name)))?;
        for (key, out) in entries {
            let args: Vec<usize> =
                if sym.inputs.is_empty() { vec![] } else { key.split(',').map(elem).collect::<Result<_>>()? };
            if args.len() != sym.inputs.len() {
                return Err(Error::Structure(format!("`{}`: bad argument key `{key}`", sym.name)));
            }
            let mut idx = 0;
            for (&a, &s) in args.iter().zip(&sym.inputs) {
                if a < offsets[s] || a >= offsets[s] + sizes[s] {
                    return Err(Error::Structure(format!("`{}`: argument of wrong sort", sym.name)));
                }
                idx = idx * sizes[s] + (a - offsets[s]);
            }
            table[idx] = elem(&string(out)?)?;
        }
        if table.contains(&usize::MAX) {
            return Err(Error::Structure(format!("`{}`: function table is not total", sym.name)));
        }
        functions.push(table);
    }
    let consts = v.get("constants").unwrap_or(&empty);
    let mut constants = Vec::new();
    for sym in sig.constants() {
        let c = consts.get(&sym.name).ok_or_else(|| Error::Structure(format!("missing constant `{}`", sym.name)))?;
        constants.push(elem(&string(c)?)?);
    }
    FiniteStructure::new(sig, sizes, Some(names), relations, functions, constants)
}

/// Canonical serialization: pretty-printed with sorted keys.
pub fn structure_to_string(s: &FiniteStructure) -> String {
    serde_json::to_string_pretty(&structure_to_json(s)).expect("json values serialize")
}

pub fn structure_from_str(text: &str) -> Result<FiniteStructure> {
    structure_from_json(&serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::builders::{boolean_algebra, cyclic_group, graph, linear_order};

    #[test]
    fn roundtrip_preserves_structures() {
        for s in [graph(4, &[(0, 1), (2, 3)]), linear_order(3), boolean_algebra(2), cyclic_group(4)] {
            let text = structure_to_string(&s);
            let back = structure_from_str(&text).unwrap();
            assert_eq!(back, s);
            assert_eq!(structure_to_string(&back), text);
        }
    }

    #[test]
    fn reads_hand_written_graph() {
        let text = r#"{
            "signature": {"sorts": ["V"], "relations": [{"name": "E", "arity": ["V", "V"], "props": ["symmetric", "irreflexive"]}]},
            "carrier": {"V": ["a", "b", "c"]},
            "relations": {"E": [["a","b"],["b","a"],["b","c"],["c","b"]]}
        }"#;
        let s = structure_from_str(text).unwrap();
        assert!(s.is_isomorphic(&graph(3, &[(0, 1), (1, 2)])));
        assert_eq!(s.name(2), "c");
    }

    #[test]
    fn rejects_unknown_elements() {
        let text = r#"{"signature": {"sorts": ["V"], "relations": [{"name": "E", "arity": ["V", "V"]}]},
            "carrier": {"V": ["a"]}, "relations": {"E": [["a","z"]]}}"#;
        assert!(structure_from_str(text).is_err());
    }
}
