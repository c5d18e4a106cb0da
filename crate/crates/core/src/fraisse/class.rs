use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::structures::builders::{
    atoms, boolean_algebra, boolean_algebra_signature, cyclic_group, dihedral_group, direct_product, graph,
    graph_signature, group_signature, linear_order, order_signature, pure_set, quaternion_group, set_signature,
    symmetric_group,
};
use crate::structures::{
    embeddings_up_to_target_aut, embeds, pointed_label, CanonicalLabel, FiniteStructure, Signature,
};

/// How amalgams are searched for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmalgamStrategy {
    /// Identify new elements pairwise, then complete the free tuples.
    FreeCompletion,
    /// Interleave linear orders gap by gap.
    Shuffle,
    /// Fiber products of atom sets (Boolean algebras).
    Atoms,
    /// Search groups up to a size bound; `None` means `|B₁|·|B₂|`.
    Identification { bound: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    Sets,
    Graphs,
    Forests,
    CompleteOrEdgeless,
    GraphsWithEdge,
    Orders,
    BooleanAlgebras,
    Groups,
    Custom,
}

/// A one-point extension `S ⊆ T`: `T` is generated by the image of `S`
/// and the element `new`.
#[derive(Debug, Clone)]
pub struct Extension {
    pub structure: Arc<FiniteStructure>,
    pub embedding: Vec<usize>,
    pub new: usize,
    pub label: CanonicalLabel,
}

type Cache = Arc<Mutex<BTreeMap<usize, Arc<Vec<Arc<FiniteStructure>>>>>>;

/// A class of finite structures closed under isomorphism, with a
/// membership test, an enumerator and an amalgam strategy.
#[derive(Clone)]
pub struct FraisseClass {
    name: String,
    signature: Arc<Signature>,
    pub(crate) kind: Kind,
    size_cap: Option<usize>,
    forbidden: Vec<Arc<FiniteStructure>>,
    strategy: AmalgamStrategy,
    cache: Cache,
}

impl fmt::Debug for FraisseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FraisseClass({})", self.name)
    }
}

pub const BUILTIN_CLASSES: &[&str] = &[
    "sets",
    "graphs",
    "linear_orders",
    "boolean_algebras",
    "groups_small",
    "forests",
    "complete_or_edgeless",
    "graphs_with_edge",
];

/// Largest order in the group catalogue.
pub const GROUP_CATALOGUE_MAX: usize = 8;

impl FraisseClass {
    fn make(name: &str, signature: Arc<Signature>, kind: Kind, strategy: AmalgamStrategy) -> Self {
        FraisseClass {
            name: name.into(),
            signature,
            kind,
            size_cap: None,
            forbidden: vec![],
            strategy,
            cache: Arc::default(),
        }
    }

    pub fn sets() -> Self {
        Self::make("sets", set_signature(), Kind::Sets, AmalgamStrategy::FreeCompletion)
    }

    pub fn graphs() -> Self {
        Self::make("graphs", graph_signature(), Kind::Graphs, AmalgamStrategy::FreeCompletion)
    }

    /// Acyclic graphs; hereditary but without amalgamation.
    pub fn forests() -> Self {
        Self::make("forests", graph_signature(), Kind::Forests, AmalgamStrategy::FreeCompletion)
    }

    /// Graphs that are complete or edgeless; hereditary but without joint embedding.
    pub fn complete_or_edgeless() -> Self {
        Self::make("complete_or_edgeless", graph_signature(), Kind::CompleteOrEdgeless, AmalgamStrategy::FreeCompletion)
    }

    /// Graphs with at least one edge; not hereditary.
    pub fn graphs_with_edge() -> Self {
        Self::make("graphs_with_edge", graph_signature(), Kind::GraphsWithEdge, AmalgamStrategy::FreeCompletion)
    }

    pub fn linear_orders() -> Self {
        Self::make("linear_orders", order_signature(), Kind::Orders, AmalgamStrategy::Shuffle)
    }

    /// Finite Boolean algebras with at least one atom, measured by atom count.
    pub fn boolean_algebras() -> Self {
        Self::make("boolean_algebras", boolean_algebra_signature(), Kind::BooleanAlgebras, AmalgamStrategy::Atoms)
    }

    pub fn groups_small() -> Self {
        Self::make("groups_small", group_signature(), Kind::Groups, AmalgamStrategy::Identification { bound: None })
    }

    /// Built-in class by registry name.
    pub fn builtin(name: &str) -> Result<Self> {
        Ok(match name {
            "sets" => Self::sets(),
            "graphs" => Self::graphs(),
            "linear_orders" => Self::linear_orders(),
            "boolean_algebras" => Self::boolean_algebras(),
            "groups_small" => Self::groups_small(),
            "forests" => Self::forests(),
            "complete_or_edgeless" => Self::complete_or_edgeless(),
            "graphs_with_edge" => Self::graphs_with_edge(),
            _ => return Err(Error::UnknownClass(name.into())),
        })
    }

    /// Relational class of all structures omitting the `forbidden` ones as
    /// induced substructures.
    pub fn custom(name: &str, signature: Arc<Signature>, forbidden: Vec<FiniteStructure>) -> Result<Self> {
        if !signature.is_relational() {
            return Err(Error::ClassFile("user classes must have a relational signature".into()));
        }
        if forbidden.iter().any(|f| f.signature() != &signature) {
            return Err(Error::ClassFile("forbidden structure over a different signature".into()));
        }
        let mut c = Self::make(name, signature, Kind::Custom, AmalgamStrategy::FreeCompletion);
        c.forbidden = forbidden.into_iter().map(Arc::new).collect();
        Ok(c)
    }

    /// The subclass of members of measure at most `cap`.
    pub fn truncated(&self, cap: usize) -> Self {
        let mut c = self.clone();
        c.name = format!("{}_le_{cap}", self.name);
        c.size_cap = Some(self.size_cap.map_or(cap, |old| old.min(cap)));
        c.cache = Arc::default();
        c
    }

    pub fn with_strategy(mut self, strategy: AmalgamStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn strategy(&self) -> AmalgamStrategy {
        self.strategy
    }

    pub fn size_cap(&self) -> Option<usize> {
        self.size_cap
    }

    /// Size used for all bounds: atom count for Boolean algebras, carrier
    /// size otherwise.
    pub fn measure(&self, s: &FiniteStructure) -> usize {
        match self.kind {
            Kind::BooleanAlgebras => atoms(s).len(),
            _ => s.len(),
        }
    }

    pub fn contains(&self, s: &FiniteStructure) -> bool {
        if s.signature() != &self.signature {
            return false;
        }
        let base = match self.kind {
            Kind::Sets | Kind::Graphs => true,
            Kind::Forests => is_forest(s),
            Kind::CompleteOrEdgeless => {
                let e = s.relation(0).len();
                e == 0 || e == s.len() * s.len().saturating_sub(1)
            }
            Kind::GraphsWithEdge => !s.relation(0).is_empty(),
            Kind::Orders => is_strict_linear_order(s),
            Kind::BooleanAlgebras => is_boolean_algebra(s),
            Kind::Groups => is_group(s),
            Kind::Custom => self.forbidden.iter().all(|f| !embeds(f, s)),
        };
        base && self.size_cap.is_none_or(|cap| self.measure(s) <= cap)
    }

    /// All members of measure at most `n`, one per isomorphism type, ordered
    /// by measure then canonical label.
    pub fn members(&self, n: usize) -> Arc<Vec<Arc<FiniteStructure>>> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(&n) {
            return v.clone();
        }
        let n_eff = self.size_cap.map_or(n, |cap| cap.min(n));
        let raw: Vec<FiniteStructure> = match self.kind {
            Kind::Sets => (0..=n_eff).map(pure_set).collect(),
            Kind::Orders => (0..=n_eff).map(linear_order).collect(),
            Kind::BooleanAlgebras => (1..=n_eff).map(boolean_algebra).collect(),
            Kind::Groups => group_catalogue().into_iter().filter(|g| g.len() <= n_eff).collect(),
            Kind::Graphs | Kind::Forests | Kind::CompleteOrEdgeless | Kind::GraphsWithEdge => {
                all_graphs(n_eff).into_iter().filter(|g| self.contains(g)).collect()
            }
            Kind::Custom => self.hereditary_members(n_eff),
        };
        let mut keyed: Vec<(usize, CanonicalLabel, FiniteStructure)> = raw
            .into_iter()
            .filter(|s| self.contains(s))
            .map(|s| (self.measure(&s), s.canonical_label().clone(), s))
            .collect();
        keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        keyed.dedup_by(|a, b| a.1 == b.1);
        let out = Arc::new(keyed.into_iter().map(|(_, _, s)| Arc::new(s)).collect::<Vec<_>>());
        self.cache.lock().expect("cache lock").insert(n, out.clone());
        out
    }

    fn hereditary_members(&self, n: usize) -> Vec<FiniteStructure> {
        let empty = FiniteStructure::new(
            self.signature.clone(),
            vec![0; self.signature.sorts().len()],
            None,
            vec![BTreeSet::new(); self.signature.relations().len()],
            vec![],
            vec![],
        )
        .expect("empty relational structure");
        let mut layer = vec![empty];
        let mut all = layer.clone();
        for _ in 0..n {
            let mut next: BTreeMap<CanonicalLabel, FiniteStructure> = BTreeMap::new();
            for s in &layer {
                for sort in 0..self.signature.sorts().len() {
                    for (t, _, _) in raw_relational_extensions(s, sort) {
                        if self.contains(&t) {
                            next.entry(t.canonical_label().clone()).or_insert(t);
                        }
                    }
                }
            }
            layer = next.into_values().collect();
            all.extend(layer.iter().cloned());
        }
        all
    }

    /// One-point extensions of `s` inside the class, one per isomorphism
    /// type over `s`, ordered by pointed canonical label.
    pub fn one_point_extensions(&self, s: &FiniteStructure) -> Vec<Extension> {
        let mut found: BTreeMap<CanonicalLabel, Extension> = BTreeMap::new();
        if self.signature.functions().is_empty() {
            for sort in 0..self.signature.sorts().len() {
                for (t, emb, new) in raw_relational_extensions(s, sort) {
                    if !self.contains(&t) {
                        continue;
                    }
                    let label = pointed_label(&t, &emb);
                    found.entry(label.clone()).or_insert(Extension {
                        structure: Arc::new(t),
                        embedding: emb,
                        new,
                        label,
                    });
                }
            }
        } else {
            let limit = match self.kind {
                Kind::BooleanAlgebras => 2 * self.measure(s),
                _ => GROUP_CATALOGUE_MAX,
            };
            for t in self.members(limit).iter() {
                if t.len() <= s.len() {
                    continue;
                }
                for emb in embeddings_up_to_target_aut(s, t).unwrap_or_default() {
                    let mut seed = emb.clone();
                    let generator = (0..t.len()).find(|&x| {
                        seed.push(x);
                        let all = t.closure(&seed).len() == t.len();
                        seed.pop();
                        all
                    });
                    if let Some(new) = generator {
                        let label = pointed_label(t, &emb);
                        found.entry(label.clone()).or_insert(Extension {
                            structure: t.clone(),
                            embedding: emb,
                            new,
                            label,
                        });
                    }
                }
            }
        }
        found.into_values().collect()
    }
}

/// Every structure obtained from `s` by adding one element of `sort`
/// together with any set of tuples through it. Returns the structure, the
/// inclusion of `s` and the new element.
pub(crate) fn raw_relational_extensions(s: &FiniteStructure, sort: usize) -> Vec<(FiniteStructure, Vec<usize>, usize)> {
    let sig = s.signature().clone();
    let mut sizes = s.sort_sizes().to_vec();
    sizes[sort] += 1;
    let shift: Vec<usize> = (0..s.len()).map(|x| x + usize::from(s.sort_of(x) > sort)).collect();
    let new = s.offset(sort) + s.sort_sizes()[sort];
    let n = s.len() + 1;
    let mut elem_sort = vec![0; n];
    {
        let mut acc = 0;
        for (so, &k) in sizes.iter().enumerate() {
            for i in 0..k {
                elem_sort[acc + i] = so;
            }
            acc += k;
        }
    }
    let base: Vec<BTreeSet<Vec<usize>>> =
        s.relations().iter().map(|ts| ts.iter().map(|t| t.iter().map(|&x| shift[x]).collect()).collect()).collect();
    // each unit is a group of tuples added or omitted together
    let mut units: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
    for (r, sym) in sig.relations().iter().enumerate() {
        let pools: Vec<Vec<usize>> =
            sym.arity.iter().map(|&so| (0..n).filter(|&x| elem_sort[x] == so).collect()).collect();
        let mut seen = BTreeSet::new();
        for t in pools.into_iter().multi_cartesian_product() {
            if !t.contains(&new) || (sym.is_irreflexive() && t[0] == t[1]) || seen.contains(&t) {
                continue;
            }
            let mut group = vec![t.clone()];
            if sym.is_symmetric() && t[0] != t[1] {
                group.push(vec![t[1], t[0]]);
            }
            for g in &group {
                seen.insert(g.clone());
            }
            units.push((r, group));
        }
    }
    assert!(units.len() < 24, "too many free tuples for a one-point extension");
    let mut out = Vec::with_capacity(1 << units.len());
    for mask in 0u32..(1 << units.len()) {
        let mut rels = base.clone();
        for (i, (r, group)) in units.iter().enumerate() {
            if mask >> i & 1 == 1 {
                rels[*r].extend(group.iter().cloned());
            }
        }
        let t = FiniteStructure::new(sig.clone(), sizes.clone(), None, rels, vec![], vec![]).expect("valid extension");
        out.push((t, shift.clone(), new));
    }
    out
}

/// All graphs on at most `n` vertices up to isomorphism.
pub(crate) fn all_graphs(n: usize) -> Vec<FiniteStructure> {
    let mut layer = vec![graph(0, &[])];
    let mut all = layer.clone();
    for _ in 0..n {
        let mut next: BTreeMap<CanonicalLabel, FiniteStructure> = BTreeMap::new();
        for g in &layer {
            for (t, _, _) in raw_relational_extensions(g, 0) {
                next.entry(t.canonical_label().clone()).or_insert(t);
            }
        }
        layer = next.into_values().collect();
        all.extend(layer.iter().cloned());
    }
    all
}

/// Groups of order at most 8, one per isomorphism type.
pub fn group_catalogue() -> Vec<FiniteStructure> {
    let c = cyclic_group;
    let mut gs: Vec<FiniteStructure> = (1..=8).map(c).collect();
    gs.push(direct_product(&c(2), &c(2)));
    gs.push(direct_product(&c(4), &c(2)));
    gs.push(direct_product(&direct_product(&c(2), &c(2)), &c(2)));
    gs.push(symmetric_group(3));
    gs.push(dihedral_group(4));
    gs.push(quaternion_group());
    gs
}

fn is_forest(g: &FiniteStructure) -> bool {
    // a graph is a forest iff every component has one edge fewer than vertices
    let n = g.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for t in g.relation(0).iter().filter(|t| t[0] < t[1]) {
        let (a, b) = (find(&mut parent, t[0]), find(&mut parent, t[1]));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

fn is_strict_linear_order(s: &FiniteStructure) -> bool {
    let n = s.len();
    let lt = |a: usize, b: usize| s.holds(0, &[a, b]);
    (0..n).all(|a| !lt(a, a))
        && (0..n).all(|a| (0..n).all(|b| a == b || lt(a, b) != lt(b, a)))
        && (0..n).all(|a| (0..n).all(|b| !lt(a, b) || (0..n).all(|c| !lt(b, c) || lt(a, c))))
}

fn is_boolean_algebra(s: &FiniteStructure) -> bool {
    let k = atoms(s).len();
    k >= 1
        && k < usize::BITS as usize
        && s.len() == 1 << k
        && s.canonical_label() == boolean_algebra(k).canonical_label()
}

pub(crate) fn is_group(s: &FiniteStructure) -> bool {
    let n = s.len();
    if n == 0 {
        return false;
    }
    let e = s.constants()[0];
    let m = |a: usize, b: usize| s.apply(0, &[a, b]);
    (0..n).all(|a| m(a, e) == a && m(e, a) == a)
        && (0..n).all(|a| (0..n).any(|b| m(a, b) == e))
        && (0..n).all(|a| {
            (0..n).all(|b| {
                let ab = m(a, b);
                (0..n).all(|c| m(ab, c) == m(a, m(b, c)))
            })
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_counts_match_known_sequence() {
        // non-isomorphic graphs on 0..=5 vertices: 1, 1, 2, 4, 11, 34
        let g = FraisseClass::graphs();
        let counts: Vec<usize> = (0..=5).map(|k| g.members(5).iter().filter(|s| s.len() == k).count()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 11, 34]);
    }

    #[test]
    fn forests_and_other_subclasses() {
        let f = FraisseClass::forests();
        let counts: Vec<usize> = (0..=4).map(|k| f.members(4).iter().filter(|s| s.len() == k).count()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 6]);
        assert_eq!(FraisseClass::complete_or_edgeless().members(3).len(), 1 + 1 + 2 + 2);
        assert!(FraisseClass::graphs_with_edge().members(1).is_empty());
    }

    #[test]
    fn group_catalogue_is_complete_up_to_order_eight() {
        let gs = FraisseClass::groups_small().members(8);
        // number of groups of order 1..=8: 1,1,1,2,1,2,1,5
        let counts: Vec<usize> = (1..=8).map(|n| gs.iter().filter(|g| g.len() == n).count()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 1, 2, 1, 5]);
    }

    #[test]
    fn membership_is_isomorphism_invariant() {
        let c = FraisseClass::linear_orders();
        let o = linear_order(4);
        assert!(c.contains(&o.relabel(&[2, 0, 3, 1])));
        assert!(!c.contains(&graph(2, &[(0, 1)])));
        let b = FraisseClass::boolean_algebras();
        assert!(b.contains(&boolean_algebra(2).relabel(&[3, 1, 2, 0])));
        assert!(!b.contains(&boolean_algebra(0)));
        assert_eq!(b.measure(&boolean_algebra(3)), 3);
    }

    #[test]
    fn one_point_extensions_of_a_vertex() {
        let g = FraisseClass::graphs();
        assert_eq!(g.one_point_extensions(&graph(1, &[])).len(), 2);
        assert_eq!(g.one_point_extensions(&graph(2, &[])).len(), 4);
        let o = FraisseClass::linear_orders();
        assert_eq!(o.one_point_extensions(&linear_order(2)).len(), 3);
        let s = FraisseClass::sets();
        assert_eq!(s.one_point_extensions(&pure_set(3)).len(), 1);
    }

    #[test]
    fn boolean_algebra_extensions_split_atoms() {
        // over two atoms: split the first, the second, or both
        let b = FraisseClass::boolean_algebras();
        assert_eq!(b.one_point_extensions(&boolean_algebra(2)).len(), 3);
        assert_eq!(b.one_point_extensions(&boolean_algebra(1)).len(), 1);
    }

    #[test]
    fn custom_class_forbidding_triangles() {
        let k3 = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let c = FraisseClass::custom("triangle_free", graph_signature(), vec![k3]).unwrap();
        assert_eq!(c.members(3).len(), 1 + 1 + 2 + 3);
        let t = c.truncated(2);
        assert_eq!(t.members(3).len(), 4);
    }
}
