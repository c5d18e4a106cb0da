use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};

use super::canon::{pointed_label, CanonicalLabel};
use super::structure::FiniteStructure;

/// An injective map that preserves and reflects relations and commutes with
/// functions and constants. `map[x]` is the image of source element `x`.
#[derive(Clone)]
pub struct Embedding {
    source: Arc<FiniteStructure>,
    target: Arc<FiniteStructure>,
    map: Vec<usize>,
}

impl Embedding {
    /// Validating constructor.
    pub fn new(source: Arc<FiniteStructure>, target: Arc<FiniteStructure>, map: Vec<usize>) -> Result<Self> {
        if source.signature() != target.signature() {
            return Err(Error::SignatureMismatch);
        }
        if map.len() != source.len() {
            return Err(Error::Embedding("map length differs from source size".into()));
        }
        if let Some(reason) = violation(&source, &target, &map) {
            return Err(Error::Embedding(reason));
        }
        Ok(Embedding { source, target, map })
    }

    pub(crate) fn new_unchecked(source: Arc<FiniteStructure>, target: Arc<FiniteStructure>, map: Vec<usize>) -> Self {
        Embedding { source, target, map }
    }

    pub fn identity(s: Arc<FiniteStructure>) -> Self {
        let map = (0..s.len()).collect();
        Embedding { source: s.clone(), target: s, map }
    }

    pub fn source(&self) -> &Arc<FiniteStructure> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteStructure> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn image(&self) -> BTreeSet<usize> {
        self.map.iter().copied().collect()
    }

    pub fn is_iso(&self) -> bool {
        self.source.len() == self.target.len()
    }

    /// Label of the target pointed by the image tuple; equal for two
    /// embeddings into the same target iff they differ by an automorphism.
    pub fn pointed_label(&self) -> CanonicalLabel {
        pointed_label(&self.target, &self.map)
    }

    /// Re-checks every embedding invariant from scratch.
    pub fn check(&self) -> Result<()> {
        match violation(&self.source, &self.target, &self.map) {
            Some(r) => Err(Error::Embedding(r)),
            None => Ok(()),
        }
    }
}

impl PartialEq for Embedding {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map && same(&self.source, &other.source) && same(&self.target, &other.target)
    }
}

impl Eq for Embedding {}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({} -> {}, {:?})", self.source.len(), self.target.len(), self.map)
    }
}

fn same(a: &Arc<FiniteStructure>, b: &Arc<FiniteStructure>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn violation(a: &FiniteStructure, b: &FiniteStructure, map: &[usize]) -> Option<String> {
    let mut seen = BTreeSet::new();
    for (x, &y) in map.iter().enumerate() {
        if y >= b.len() {
            return Some(format!("image of {x} out of range"));
        }
        if a.sort_of(x) != b.sort_of(y) {
            return Some(format!("image of {x} has the wrong sort"));
        }
        if !seen.insert(y) {
            return Some("map is not injective".into());
        }
    }
    for (r, sym) in a.signature().relations().iter().enumerate() {
        let pools: Vec<Vec<usize>> = sym.arity.iter().map(|&s| a.sort_range(s).collect()).collect();
        for t in pools.into_iter().multi_cartesian_product() {
            let img: Vec<usize> = t.iter().map(|&x| map[x]).collect();
            if a.holds(r, &t) != b.holds(r, &img) {
                return Some(format!("relation `{}` not preserved and reflected", sym.name));
            }
        }
    }
    for (f, sym) in a.signature().functions().iter().enumerate() {
        for idx in 0..a.function_table(f).len() {
            let args = a.table_args(f, idx);
            let img: Vec<usize> = args.iter().map(|&x| map[x]).collect();
            if map[a.function_table(f)[idx]] != b.apply(f, &img) {
                return Some(format!("function `{}` not preserved", sym.name));
            }
        }
    }
    for (c, sym) in a.signature().constants().iter().enumerate() {
        if map[a.constants()[c]] != b.constants()[c] {
            return Some(format!("constant `{}` not preserved", sym.name));
        }
    }
    None
}

/// `g ∘ f`: first `f`, then `g`.
pub fn compose(f: &Embedding, g: &Embedding) -> Result<Embedding> {
    if !same(&f.target, &g.source) {
        return Err(Error::Composition("target of the first map is not the source of the second".into()));
    }
    let map = f.map.iter().map(|&x| g.map[x]).collect();
    Ok(Embedding { source: f.source.clone(), target: g.target.clone(), map })
}

struct Matcher<'a> {
    a: &'a FiniteStructure,
    b: &'a FiniteStructure,
    rows: Vec<(usize, Vec<usize>, usize)>,
    rows_of: Vec<Vec<usize>>,
    const_of: Vec<Option<usize>>,
    map: Vec<usize>,
    used: Vec<bool>,
}

const UNSET: usize = usize::MAX;

impl<'a> Matcher<'a> {
    fn new(a: &'a FiniteStructure, b: &'a FiniteStructure) -> Self {
        let mut rows = Vec::new();
        let mut rows_of = vec![Vec::new(); a.len()];
        for f in 0..a.signature().functions().len() {
            for idx in 0..a.function_table(f).len() {
                let args = a.table_args(f, idx);
                let out = a.function_table(f)[idx];
                let id = rows.len();
                let mut touched: Vec<usize> = args.iter().copied().chain([out]).collect();
                touched.sort_unstable();
                touched.dedup();
                for x in touched {
                    rows_of[x].push(id);
                }
                rows.push((f, args, out));
            }
        }
        let mut const_of = vec![None; a.len()];
        for (c, &x) in a.constants().iter().enumerate() {
            const_of[x] = Some(b.constants()[c]);
        }
        Matcher { a, b, rows, rows_of, const_of, map: vec![UNSET; a.len()], used: vec![false; b.len()] }
    }

    /// Whether assigning `x ↦ y` (already written into `map`) is consistent
    /// with everything assigned so far.
    fn consistent(&self, x: usize) -> bool {
        let (a, b, map) = (self.a, self.b, &self.map);
        if let Some(c) = self.const_of[x] {
            if map[x] != c {
                return false;
            }
        }
        for &row in &self.rows_of[x] {
            let (f, args, out) = &self.rows[row];
            if map[*out] == UNSET || args.iter().any(|&z| map[z] == UNSET) {
                continue;
            }
            let img: Vec<usize> = args.iter().map(|&z| map[z]).collect();
            if b.apply(*f, &img) != map[*out] {
                return false;
            }
        }
        for (r, sym) in a.signature().relations().iter().enumerate() {
            let pools: Vec<Vec<usize>> =
                sym.arity.iter().map(|&s| a.sort_range(s).filter(|&z| map[z] != UNSET).collect()).collect();
            if pools.iter().any(|p| p.is_empty()) {
                continue;
            }
            for t in pools.into_iter().multi_cartesian_product() {
                if !t.contains(&x) {
                    continue;
                }
                let img: Vec<usize> = t.iter().map(|&z| map[z]).collect();
                if a.holds(r, &t) != b.holds(r, &img) {
                    return false;
                }
            }
        }
        true
    }

    /// A row whose arguments are mapped but whose output is not.
    fn forced(&self) -> Option<(usize, usize)> {
        for (f, args, out) in &self.rows {
            if self.map[*out] == UNSET && args.iter().all(|&z| self.map[z] != UNSET) {
                let img: Vec<usize> = args.iter().map(|&z| self.map[z]).collect();
                return Some((*out, self.b.apply(*f, &img)));
            }
        }
        None
    }

    fn assign(&mut self, x: usize, y: usize) -> bool {
        if self.used[y] || self.a.sort_of(x) != self.b.sort_of(y) {
            return false;
        }
        self.map[x] = y;
        if self.consistent(x) {
            self.used[y] = true;
            true
        } else {
            self.map[x] = UNSET;
            false
        }
    }

    fn unassign(&mut self, x: usize) {
        self.used[self.map[x]] = false;
        self.map[x] = UNSET;
    }

    /// Depth-first search; `visit` returns `false` to stop.
    fn run(&mut self, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if let Some((x, y)) = self.forced() {
            if !self.assign(x, y) {
                return true;
            }
            let go = self.run(visit);
            self.unassign(x);
            return go;
        }
        let Some(x) = self.map.iter().position(|&m| m == UNSET) else {
            return visit(&self.map);
        };
        for y in self.b.sort_range(self.a.sort_of(x)) {
            if self.assign(x, y) {
                let go = self.run(visit);
                self.unassign(x);
                if !go {
                    return false;
                }
            }
        }
        true
    }
}

/// Calls `visit` on every embedding map `a → b` extending the partial
/// assignment `fixed`, until it returns `false`.
pub fn for_each_embedding(
    a: &FiniteStructure,
    b: &FiniteStructure,
    fixed: &[(usize, usize)],
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> Result<()> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch);
    }
    for &(x, y) in fixed {
        if x >= a.len() || y >= b.len() {
            return Err(Error::OutOfRange(format!("fixed pair ({x}, {y})")));
        }
    }
    let mut m = Matcher::new(a, b);
    for &(x, y) in fixed {
        if m.map[x] != UNSET {
            if m.map[x] != y {
                return Ok(());
            }
            continue;
        }
        if !m.assign(x, y) {
            return Ok(());
        }
    }
    m.run(visit);
    Ok(())
}

/// All embedding maps `a → b` extending `fixed`, sorted lexicographically.
pub fn embedding_maps(a: &FiniteStructure, b: &FiniteStructure, fixed: &[(usize, usize)]) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for_each_embedding(a, b, fixed, &mut |m| {
        out.push(m.to_vec());
        true
    })?;
    out.sort();
    Ok(out)
}

/// Every embedding `a → b`, in lexicographic order of the maps.
pub fn enumerate_embeddings(a: &Arc<FiniteStructure>, b: &Arc<FiniteStructure>) -> Result<Vec<Embedding>> {
    Ok(embedding_maps(a, b, &[])?.into_iter().map(|map| Embedding::new_unchecked(a.clone(), b.clone(), map)).collect())
}

/// First embedding in lexicographic order, if any.
pub fn find_embedding(
    a: &FiniteStructure,
    b: &FiniteStructure,
    fixed: &[(usize, usize)],
) -> Result<Option<Vec<usize>>> {
    // without functions the search visits maps in lexicographic order
    if a.signature().functions().is_empty() {
        let mut first = None;
        for_each_embedding(a, b, fixed, &mut |m| {
            first = Some(m.to_vec());
            false
        })?;
        return Ok(first);
    }
    Ok(embedding_maps(a, b, fixed)?.into_iter().next())
}

pub fn embeds(a: &FiniteStructure, b: &FiniteStructure) -> bool {
    let mut found = false;
    let _ = for_each_embedding(a, b, &[], &mut |_| {
        found = true;
        false
    });
    found
}

/// One representative per orbit of `Aut(b)` on the embeddings `a → b`,
/// chosen lexicographically least, in lexicographic order.
pub fn embeddings_up_to_target_aut(a: &FiniteStructure, b: &FiniteStructure) -> Result<Vec<Vec<usize>>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for m in embedding_maps(a, b, &[])? {
        if seen.insert(pointed_label(b, &m)) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Smallest substructure of `b` containing `seed`, with its inclusion.
pub fn generated_substructure(b: &Arc<FiniteStructure>, seed: &[usize]) -> Result<(Arc<FiniteStructure>, Embedding)> {
    if let Some(&x) = seed.iter().find(|&&x| x >= b.len()) {
        return Err(Error::OutOfRange(format!("seed element {x}")));
    }
    let (sub, incl) = b.induced(&b.closure(seed))?;
    let sub = Arc::new(sub);
    Ok((sub.clone(), Embedding::new_unchecked(sub, b.clone(), incl)))
}

/// Isomorphism type of a tuple: the label of the substructure it generates,
/// pointed by the tuple. Two tuples of the same length have equal types iff
/// the map between them extends to an isomorphism of generated substructures.
pub fn tuple_type(s: &FiniteStructure, tuple: &[usize]) -> CanonicalLabel {
    let (sub, incl) = s.induced(&s.closure(tuple)).expect("closures are closed");
    let mut back = vec![usize::MAX; s.len()];
    for (i, &x) in incl.iter().enumerate() {
        back[x] = i;
    }
    let points: Vec<usize> = tuple.iter().map(|&x| back[x]).collect();
    pointed_label(&sub, &points)
}
