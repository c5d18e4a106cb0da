use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use itertools::Itertools;

use crate::error::{Error, Result};

use super::canon::{canonical_labeling, CanonicalLabel};
use super::signature::Signature;

/// A finite multi-sorted model. Elements are flat indices `0..len()`,
/// grouped by sort in signature order, so sort `s` occupies
/// `offset(s)..offset(s) + sort_size(s)`.
#[derive(Clone)]
pub struct FiniteStructure {
    signature: Arc<Signature>,
    sort_sizes: Vec<usize>,
    offsets: Vec<usize>,
    elem_sort: Vec<usize>,
    names: Vec<String>,
    relations: Vec<BTreeSet<Vec<usize>>>,
    functions: Vec<Vec<usize>>,
    constants: Vec<usize>,
    canon: OnceLock<CanonicalLabel>,
}

impl FiniteStructure {
    /// Builds and validates a structure. `functions[i]` is the dense table
    /// of the i-th function symbol indexed by [`FiniteStructure::table_index`].
    pub fn new(
        signature: Arc<Signature>,
        sort_sizes: Vec<usize>,
        names: Option<Vec<String>>,
        relations: Vec<BTreeSet<Vec<usize>>>,
        functions: Vec<Vec<usize>>,
        constants: Vec<usize>,
    ) -> Result<Self> {
        if sort_sizes.len() != signature.sorts().len() {
            return Err(Error::Structure("one carrier size per sort is required".into()));
        }
        let mut offsets = Vec::with_capacity(sort_sizes.len());
        let mut elem_sort = Vec::new();
        let mut acc = 0;
        for (s, &n) in sort_sizes.iter().enumerate() {
            offsets.push(acc);
            acc += n;
            elem_sort.extend(std::iter::repeat_n(s, n));
        }
        let names = match names {
            Some(ns) => {
                if ns.len() != acc {
                    return Err(Error::Structure("one name per element is required".into()));
                }
                let distinct: BTreeSet<_> = ns.iter().collect();
                if distinct.len() != ns.len() {
                    return Err(Error::Structure("element names must be unique".into()));
                }
                ns
            }
            None => (0..acc).map(|i| i.to_string()).collect(),
        };
        let s = FiniteStructure {
            signature,
            sort_sizes,
            offsets,
            elem_sort,
            names,
            relations,
            functions,
            constants,
            canon: OnceLock::new(),
        };
        s.validate()?;
        Ok(s)
    }

    /// Single-sorted relational structure on `n` elements.
    pub fn relational(signature: Arc<Signature>, n: usize, relations: Vec<BTreeSet<Vec<usize>>>) -> Result<Self> {
        FiniteStructure::new(signature, vec![n], None, relations, vec![], vec![])
    }

    fn validate(&self) -> Result<()> {
        let sig = &self.signature;
        if self.relations.len() != sig.relations().len() {
            return Err(Error::Structure("one table per relation symbol is required".into()));
        }
        for (r, tuples) in sig.relations().iter().zip(&self.relations) {
            for t in tuples {
                if t.len() != r.arity.len() {
                    return Err(Error::Structure(format!("`{}`: tuple of wrong length", r.name)));
                }
                for (&x, &s) in t.iter().zip(&r.arity) {
                    if x >= self.len() || self.elem_sort[x] != s {
                        return Err(Error::Structure(format!("`{}`: tuple entry of wrong sort", r.name)));
                    }
                }
                if r.is_irreflexive() && t[0] == t[1] {
                    return Err(Error::Structure(format!("`{}` must be irreflexive", r.name)));
                }
                if r.is_symmetric() && !tuples.contains(&vec![t[1], t[0]]) {
                    return Err(Error::Structure(format!("`{}` must be symmetric", r.name)));
                }
            }
        }
        if self.functions.len() != sig.functions().len() {
            return Err(Error::Structure("one table per function symbol is required".into()));
        }
        for (i, f) in sig.functions().iter().enumerate() {
            let size: usize = f.inputs.iter().map(|&s| self.sort_sizes[s]).product();
            if self.functions[i].len() != size {
                return Err(Error::Structure(format!("`{}`: function table is not total", f.name)));
            }
            for &y in &self.functions[i] {
                if y >= self.len() || self.elem_sort[y] != f.output {
                    return Err(Error::Structure(format!("`{}`: value of wrong sort", f.name)));
                }
            }
        }
        if self.constants.len() != sig.constants().len() {
            return Err(Error::Structure("one value per constant is required".into()));
        }
        for (c, &x) in sig.constants().iter().zip(&self.constants) {
            if x >= self.len() || self.elem_sort[x] != c.sort {
                return Err(Error::Structure(format!("constant `{}` of wrong sort", c.name)));
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.elem_sort.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elem_sort.is_empty()
    }

    pub fn sort_sizes(&self) -> &[usize] {
        &self.sort_sizes
    }

    pub fn offset(&self, sort: usize) -> usize {
        self.offsets[sort]
    }

    pub fn sort_of(&self, x: usize) -> usize {
        self.elem_sort[x]
    }

    pub fn sort_range(&self, sort: usize) -> std::ops::Range<usize> {
        self.offsets[sort]..self.offsets[sort] + self.sort_sizes[sort]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.len() {
            return Err(Error::Structure("one name per element is required".into()));
        }
        self.names = names;
        Ok(self)
    }

    pub fn relation(&self, r: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[r]
    }

    pub fn relations(&self) -> &[BTreeSet<Vec<usize>>] {
        &self.relations
    }

    pub fn function_table(&self, f: usize) -> &[usize] {
        &self.functions[f]
    }

    pub fn constants(&self) -> &[usize] {
        &self.constants
    }

    pub fn holds(&self, r: usize, tuple: &[usize]) -> bool {
        self.relations[r].contains(tuple)
    }

    /// Mixed-radix position of an argument tuple in a function table.
    pub fn table_index(&self, f: usize, args: &[usize]) -> usize {
        let sym = &self.signature.functions()[f];
        let mut idx = 0;
        for (&a, &s) in args.iter().zip(&sym.inputs) {
            idx = idx * self.sort_sizes[s] + (a - self.offsets[s]);
        }
        idx
    }

    /// Inverse of [`FiniteStructure::table_index`].
    pub fn table_args(&self, f: usize, mut idx: usize) -> Vec<usize> {
        let sym = &self.signature.functions()[f];
        let mut args = vec![0; sym.inputs.len()];
        for (i, &s) in sym.inputs.iter().enumerate().rev() {
            let n = self.sort_sizes[s];
            args[i] = self.offsets[s] + idx % n;
            idx /= n;
        }
        args
    }

    pub fn apply(&self, f: usize, args: &[usize]) -> usize {
        self.functions[f][self.table_index(f, args)]
    }

    /// Smallest subset containing `seed` and closed under functions and constants.
    pub fn closure(&self, seed: &[usize]) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = seed.iter().copied().collect();
        set.extend(self.constants.iter().copied());
        let fns = self.signature.functions();
        if fns.is_empty() {
            return set;
        }
        loop {
            let mut added = Vec::new();
            for (fi, f) in fns.iter().enumerate() {
                let pools: Vec<Vec<usize>> = f
                    .inputs
                    .iter()
                    .map(|&s| set.iter().copied().filter(|&x| self.elem_sort[x] == s).collect())
                    .collect();
                if f.inputs.is_empty() {
                    added.push(self.apply(fi, &[]));
                    continue;
                }
                for args in pools.into_iter().multi_cartesian_product() {
                    let y = self.apply(fi, &args);
                    if !set.contains(&y) {
                        added.push(y);
                    }
                }
            }
            let before = set.len();
            set.extend(added);
            if set.len() == before {
                return set;
            }
        }
    }

    /// The substructure on a closed subset, elements kept in increasing
    /// order, together with the inclusion map.
    pub fn induced(&self, subset: &BTreeSet<usize>) -> Result<(FiniteStructure, Vec<usize>)> {
        let incl: Vec<usize> = subset.iter().copied().collect();
        let mut back = vec![usize::MAX; self.len()];
        for (i, &x) in incl.iter().enumerate() {
            back[x] = i;
        }
        let mut sizes = vec![0; self.sort_sizes.len()];
        for &x in &incl {
            sizes[self.elem_sort[x]] += 1;
        }
        let relations = self
            .relations
            .iter()
            .map(|ts| {
                ts.iter()
                    .filter(|t| t.iter().all(|&x| back[x] != usize::MAX))
                    .map(|t| t.iter().map(|&x| back[x]).collect())
                    .collect()
            })
            .collect();
        let mut sub = FiniteStructure {
            signature: self.signature.clone(),
            sort_sizes: sizes.clone(),
            offsets: vec![],
            elem_sort: vec![],
            names: incl.iter().map(|&x| self.names[x].clone()).collect(),
            relations,
            functions: vec![],
            constants: vec![],
            canon: OnceLock::new(),
        };
        let mut acc = 0;
        for (s, &n) in sizes.iter().enumerate() {
            sub.offsets.push(acc);
            acc += n;
            sub.elem_sort.extend(std::iter::repeat_n(s, n));
        }
        for (fi, _) in self.signature.functions().iter().enumerate() {
            let size: usize = self.signature.functions()[fi].inputs.iter().map(|&s| sizes[s]).product();
            let mut table = Vec::with_capacity(size);
            for idx in 0..size {
                let args: Vec<usize> = sub.table_args(fi, idx).iter().map(|&a| incl[a]).collect();
                let y = back[self.apply(fi, &args)];
                if y == usize::MAX {
                    return Err(Error::Structure("subset is not closed under functions".into()));
                }
                table.push(y);
            }
            sub.functions.push(table);
        }
        for &c in &self.constants {
            if back[c] == usize::MAX {
                return Err(Error::Structure("subset does not contain the constants".into()));
            }
            sub.constants.push(back[c]);
        }
        Ok((sub, incl))
    }

    /// Renames elements along a sort-preserving bijection `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> FiniteStructure {
        let mut inv = vec![0; perm.len()];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let relations =
            self.relations.iter().map(|ts| ts.iter().map(|t| t.iter().map(|&x| perm[x]).collect()).collect()).collect();
        let mut out = FiniteStructure {
            signature: self.signature.clone(),
            sort_sizes: self.sort_sizes.clone(),
            offsets: self.offsets.clone(),
            elem_sort: self.elem_sort.clone(),
            names: inv.iter().map(|&o| self.names[o].clone()).collect(),
            relations,
            functions: vec![],
            constants: self.constants.iter().map(|&c| perm[c]).collect(),
            canon: OnceLock::new(),
        };
        for fi in 0..self.functions.len() {
            let size = self.functions[fi].len();
            let table = (0..size)
                .map(|idx| {
                    let args: Vec<usize> = out.table_args(fi, idx).iter().map(|&a| inv[a]).collect();
                    perm[self.apply(fi, &args)]
                })
                .collect();
            out.functions.push(table);
        }
        out
    }

    /// Canonical encoding; equal exactly for isomorphic structures.
    pub fn canonical_label(&self) -> &CanonicalLabel {
        self.canon.get_or_init(|| canonical_labeling(self, &[]).0)
    }

    /// Isomorphic copy with elements in canonical order.
    pub fn canonical_copy(&self) -> FiniteStructure {
        let (_, perm) = canonical_labeling(self, &[]);
        self.relabel(&perm)
    }

    pub fn is_isomorphic(&self, other: &FiniteStructure) -> bool {
        self.canonical_label() == other.canonical_label()
    }
}

impl PartialEq for FiniteStructure {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature
            && self.sort_sizes == other.sort_sizes
            && self.relations == other.relations
            && self.functions == other.functions
            && self.constants == other.constants
    }
}

impl Eq for FiniteStructure {}

impl fmt::Debug for FiniteStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Structure(n={}", self.len())?;
        for (r, ts) in self.signature.relations().iter().zip(&self.relations) {
            write!(f, ", {}={:?}", r.name, ts)?;
        }
        if !self.functions.is_empty() {
            write!(f, ", functions")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::builders::{graph, group_from_table};

    #[test]
    fn validation_catches_asymmetric_edges() {
        let sig = Arc::new(Signature::graph());
        let rel: BTreeSet<Vec<usize>> = [vec![0, 1]].into_iter().collect();
        assert!(FiniteStructure::relational(sig, 2, vec![rel]).is_err());
    }

    #[test]
    fn closure_of_relational_is_seed() {
        let g = graph(4, &[(0, 1), (1, 2)]);
        assert_eq!(g.closure(&[2, 0]), [0, 2].into_iter().collect());
    }

    #[test]
    fn closure_in_cyclic_group() {
        let n = 6;
        let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let g = group_from_table(&table, 0);
        assert_eq!(g.closure(&[2]).len(), 3);
        assert_eq!(g.closure(&[1]).len(), 6);
        let (sub, incl) = g.induced(&g.closure(&[3])).unwrap();
        assert_eq!(sub.len(), 2);
        assert_eq!(incl, vec![0, 3]);
    }

    #[test]
    fn relabel_roundtrip_preserves_isomorphism_type() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let h = g.relabel(&[3, 1, 0, 2]);
        assert_ne!(g, h);
        assert!(g.is_isomorphic(&h));
    }
}
