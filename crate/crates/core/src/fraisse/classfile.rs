//! User classes loaded from JSON.
//!
//! ```json
//! {
//!   "name": "triangle_free",
//!   "signature": { "sorts": ["V"], "relations": [{"name": "E", "arity": ["V", "V"], "props": ["symmetric", "irreflexive"]}] },
//!   "forbidden": [ <structure>, ... ],
//!   "size_cap": 5
//! }
//! ```
//!
//! Instead of `signature` and `forbidden`, a file may name a built-in class
//! under `base` and only add a `size_cap`.

use std::sync::Arc;

use serde_json::Value;

use super::class::FraisseClass;
use crate::error::{Error, Result};
use crate::structures::json::{signature_from_json, structure_from_json};

pub fn class_from_json(v: &Value) -> Result<FraisseClass> {
    let obj = v.as_object().ok_or_else(|| Error::ClassFile("expected a JSON object".into()))?;
    let cap = match obj.get("size_cap") {
        None | Some(Value::Null) => None,
        Some(c) => Some(
            c.as_u64()
                .filter(|&c| c > 0)
                .ok_or_else(|| Error::ClassFile("`size_cap` must be a positive integer".into()))? as usize,
        ),
    };
    let class = if let Some(base) = obj.get("base") {
        if obj.contains_key("signature") || obj.contains_key("forbidden") {
            return Err(Error::ClassFile("`base` excludes `signature` and `forbidden`".into()));
        }
        let base = base.as_str().ok_or_else(|| Error::ClassFile("`base` must be a class name".into()))?;
        FraisseClass::builtin(base)?
    } else {
        let name = obj.get("name").and_then(Value::as_str).unwrap_or("custom");
        let sig = Arc::new(signature_from_json(
            obj.get("signature").ok_or_else(|| Error::ClassFile("missing `signature`".into()))?,
        )?);
        let mut forbidden = Vec::new();
        if let Some(list) = obj.get("forbidden") {
            let list = list.as_array().ok_or_else(|| Error::ClassFile("`forbidden` must be an array".into()))?;
            for f in list {
                let mut f = f.clone();
                // forbidden structures may omit the signature they share with the class
                if let Some(m) = f.as_object_mut() {
                    m.entry("signature").or_insert_with(|| obj["signature"].clone());
                }
                forbidden.push(structure_from_json(&f)?);
            }
        }
        FraisseClass::custom(name, sig, forbidden)?
    };
    Ok(match cap {
        Some(c) => class.truncated(c),
        None => class,
    })
}

pub fn class_from_str(text: &str) -> Result<FraisseClass> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::ClassFile(e.to_string()))?;
    class_from_json(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::builders::graph;

    const TRIANGLE_FREE: &str = r#"{
        "name": "triangle_free",
        "signature": {"sorts": ["V"], "relations": [{"name": "E", "arity": ["V", "V"], "props": ["symmetric", "irreflexive"]}]},
        "forbidden": [{"carrier": {"V": ["a", "b", "c"]},
                       "relations": {"E": [["a","b"],["b","a"],["b","c"],["c","b"],["a","c"],["c","a"]]}}]
    }"#;

    #[test]
    fn forbidden_substructures() {
        let c = class_from_str(TRIANGLE_FREE).unwrap();
        assert_eq!(c.name(), "triangle_free");
        assert!(c.contains(&graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])));
        assert!(!c.contains(&graph(4, &[(0, 1), (1, 2), (2, 0)])));
    }

    #[test]
    fn base_with_cap() {
        let c = class_from_str(r#"{"base": "sets", "size_cap": 3}"#).unwrap();
        assert_eq!(c.name(), "sets_le_3");
        assert_eq!(c.members(10).len(), 4);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(matches!(class_from_str("[1]"), Err(Error::ClassFile(_))));
        assert!(matches!(class_from_str(r#"{"base": "nope"}"#), Err(Error::UnknownClass(_))));
        assert!(class_from_str(r#"{"base": "sets", "size_cap": 0}"#).is_err());
        assert!(class_from_str("{").is_err());
    }
}
