use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Extra axioms a binary relation symbol is known to satisfy. They are
/// enforced on structures and let the free-completion amalgam search
/// enumerate unordered pairs instead of ordered ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationProp {
    Symmetric,
    Irreflexive,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: Vec<usize>,
    pub props: Vec<RelationProp>,
}

impl RelationSymbol {
    pub fn is_symmetric(&self) -> bool {
        self.props.contains(&RelationProp::Symmetric)
    }

    pub fn is_irreflexive(&self) -> bool {
        self.props.contains(&RelationProp::Irreflexive)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionSymbol {
    pub name: String,
    pub inputs: Vec<usize>,
    pub output: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstantSymbol {
    pub name: String,
    pub sort: usize,
}

/// A finite multi-sorted signature. Sorts are referred to by index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    sorts: Vec<String>,
    relations: Vec<RelationSymbol>,
    functions: Vec<FunctionSymbol>,
    constants: Vec<ConstantSymbol>,
}

impl Signature {
    pub fn new(
        sorts: Vec<String>,
        relations: Vec<RelationSymbol>,
        functions: Vec<FunctionSymbol>,
        constants: Vec<ConstantSymbol>,
    ) -> Result<Self> {
        if sorts.is_empty() {
            return Err(Error::Signature("at least one sort is required".into()));
        }
        let mut names = BTreeSet::new();
        for s in &sorts {
            if !names.insert(s.clone()) {
                return Err(Error::Signature(format!("duplicate sort `{s}`")));
            }
        }
        let mut symbols = BTreeSet::new();
        let n = sorts.len();
        let check = |ss: &[usize], what: &str| -> Result<()> {
            if ss.iter().any(|&s| s >= n) {
                return Err(Error::Signature(format!("`{what}` refers to an undeclared sort")));
            }
            Ok(())
        };
        for r in &relations {
            check(&r.arity, &r.name)?;
            if (r.is_symmetric() || r.is_irreflexive()) && (r.arity.len() != 2 || r.arity[0] != r.arity[1]) {
                return Err(Error::Signature(format!(
                    "`{}`: symmetric/irreflexive require a homogeneous binary relation",
                    r.name
                )));
            }
            if !symbols.insert(r.name.clone()) {
                return Err(Error::Signature(format!("duplicate symbol `{}`", r.name)));
            }
        }
        for f in &functions {
            check(&f.inputs, &f.name)?;
            check(&[f.output], &f.name)?;
            if !symbols.insert(f.name.clone()) {
                return Err(Error::Signature(format!("duplicate symbol `{}`", f.name)));
            }
        }
        for c in &constants {
            check(&[c.sort], &c.name)?;
            if !symbols.insert(c.name.clone()) {
                return Err(Error::Signature(format!("duplicate symbol `{}`", c.name)));
            }
        }
        Ok(Signature { sorts, relations, functions, constants })
    }

    /// One sort, one symmetric irreflexive binary relation `E`.
    pub fn graph() -> Self {
        Signature::new(
            vec!["V".into()],
            vec![RelationSymbol {
                name: "E".into(),
                arity: vec![0, 0],
                props: vec![RelationProp::Symmetric, RelationProp::Irreflexive],
            }],
            vec![],
            vec![],
        )
        .unwrap()
    }

    /// One sort, one binary relation `lt`.
    pub fn order() -> Self {
        Signature::new(
            vec!["P".into()],
            vec![RelationSymbol { name: "lt".into(), arity: vec![0, 0], props: vec![RelationProp::Irreflexive] }],
            vec![],
            vec![],
        )
        .unwrap()
    }

    /// One sort, nothing else.
    pub fn pure_set() -> Self {
        Signature::new(vec!["X".into()], vec![], vec![], vec![]).unwrap()
    }

    /// Binary `meet`, `join`, unary `not`, constants `bot`, `top`.
    pub fn boolean_algebra() -> Self {
        Signature::new(
            vec!["B".into()],
            vec![],
            vec![
                FunctionSymbol { name: "meet".into(), inputs: vec![0, 0], output: 0 },
                FunctionSymbol { name: "join".into(), inputs: vec![0, 0], output: 0 },
                FunctionSymbol { name: "not".into(), inputs: vec![0], output: 0 },
            ],
            vec![ConstantSymbol { name: "bot".into(), sort: 0 }, ConstantSymbol { name: "top".into(), sort: 0 }],
        )
        .unwrap()
    }

    /// Binary `mul` and constant `e`.
    pub fn group() -> Self {
        Signature::new(
            vec!["G".into()],
            vec![],
            vec![FunctionSymbol { name: "mul".into(), inputs: vec![0, 0], output: 0 }],
            vec![ConstantSymbol { name: "e".into(), sort: 0 }],
        )
        .unwrap()
    }

    pub fn sorts(&self) -> &[String] {
        &self.sorts
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn functions(&self) -> &[FunctionSymbol] {
        &self.functions
    }

    pub fn constants(&self) -> &[ConstantSymbol] {
        &self.constants
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty() && self.constants.is_empty()
    }

    pub fn sort_index(&self, name: &str) -> Option<usize> {
        self.sorts.iter().position(|s| s == name)
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|f| f.name == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c.name == name)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sorts[{}]", self.sorts.join(","))?;
        for r in &self.relations {
            let props: Vec<_> = r.props.iter().map(|p| format!("{p:?}")).collect();
            write!(f, ";rel {}({:?}){}", r.name, r.arity, props.join(""))?;
        }
        for g in &self.functions {
            write!(f, ";fn {}({:?})->{}", g.name, g.inputs, g.output)?;
        }
        for c in &self.constants {
            write!(f, ";const {}:{}", c.name, c.sort)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_names_across_kinds() {
        let err = Signature::new(
            vec!["S".into()],
            vec![RelationSymbol { name: "f".into(), arity: vec![0], props: vec![] }],
            vec![FunctionSymbol { name: "f".into(), inputs: vec![0], output: 0 }],
            vec![],
        );
        assert!(err.is_err());
    }

    #[test]
    fn rejects_undeclared_sort() {
        let err = Signature::new(
            vec!["S".into()],
            vec![RelationSymbol { name: "R".into(), arity: vec![0, 1], props: vec![] }],
            vec![],
            vec![],
        );
        assert!(err.is_err());
    }

    #[test]
    fn builtins_are_valid() {
        assert!(Signature::graph().is_relational());
        assert!(!Signature::group().is_relational());
        assert_ne!(Signature::graph(), Signature::order());
    }
}
