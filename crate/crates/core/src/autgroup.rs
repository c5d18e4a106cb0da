//! Finite permutation groups, stabilizers, orbits and coset arrows.
//!
//! Groups are materialized as sorted element lists; the identity is the
//! least permutation and has index 0. Composition is `(p∘q)(x) = p(q(x))`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use itertools::Itertools;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::structures::{embedding_maps, FiniteStructure};

/// Largest group the enumerator will materialize.
pub const MAX_ORDER: usize = 100_000;
/// Largest group whose subgroup lattice is enumerated.
pub const MAX_LATTICE_ORDER: usize = 200;

#[derive(Debug, Clone)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<usize>,
    elements: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl PartialEq for PermutationGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl Eq for PermutationGroup {}

fn is_permutation(p: &[usize], degree: usize) -> bool {
    let mut seen = vec![false; degree];
    p.len() == degree && p.iter().all(|&x| x < degree && !std::mem::replace(&mut seen[x], true))
}

fn compose_maps(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&x| p[x]).collect()
}

impl PermutationGroup {
    fn from_sorted(degree: usize, mut elements: Vec<Vec<usize>>) -> Self {
        elements.sort();
        elements.dedup();
        let index = elements.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let mut g = PermutationGroup { degree, generators: vec![], elements, index };
        g.generators = g.greedy_generators();
        g
    }

    /// The group generated by `gens` acting on `0..degree`.
    pub fn generated(degree: usize, gens: &[Vec<usize>]) -> Result<Self> {
        if let Some(p) = gens.iter().find(|p| !is_permutation(p, degree)) {
            return Err(Error::OutOfRange(format!("{p:?} is not a permutation of {degree} points")));
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut seen: BTreeSet<Vec<usize>> = [identity.clone()].into_iter().collect();
        let mut queue = VecDeque::from([identity]);
        while let Some(p) = queue.pop_front() {
            for g in gens {
                let q = compose_maps(g, &p);
                if seen.insert(q.clone()) {
                    if seen.len() > MAX_ORDER {
                        return Err(Error::Overflow(format!("group order exceeds {MAX_ORDER}")));
                    }
                    queue.push_back(q);
                }
            }
        }
        Ok(Self::from_sorted(degree, seen.into_iter().collect()))
    }

    /// The full symmetric group on `degree` points.
    pub fn symmetric(degree: usize) -> Self {
        Self::from_sorted(degree, (0..degree).permutations(degree).collect())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &[usize] {
        &self.elements[i]
    }

    /// Indices of a small generating set, chosen greedily in element order.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn index_of(&self, p: &[usize]) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Index of `elements[i] ∘ elements[j]`.
    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.index[&compose_maps(&self.elements[i], &self.elements[j])]
    }

    pub fn inverse(&self, i: usize) -> usize {
        let mut inv = vec![0; self.degree];
        for (x, &y) in self.elements[i].iter().enumerate() {
            inv[y] = x;
        }
        self.index[&inv]
    }

    /// `h g h⁻¹`.
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.compose(self.compose(h, g), self.inverse(h))
    }

    pub fn apply(&self, g: usize, x: usize) -> usize {
        self.elements[g][x]
    }

    fn closure(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = [0].into_iter().collect();
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.compose(g, x);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        set
    }

    fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span: BTreeSet<usize> = [0].into_iter().collect();
        for i in 0..self.order() {
            if span.len() == self.order() {
                break;
            }
            if !span.contains(&i) {
                gens.push(i);
                span = self.closure(&gens);
            }
        }
        gens
    }

    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "order": self.order(),
            "generators": self.generators.iter().map(|&g| &self.elements[g]).collect::<Vec<_>>(),
        })
    }
}

/// The automorphism group of `s`.
pub fn automorphisms(s: &FiniteStructure) -> PermutationGroup {
    let maps = embedding_maps(s, s, &[]).expect("a structure shares its own signature");
    PermutationGroup::from_sorted(s.len(), maps)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Descriptor {
    #[serde(rename = "stab")]
    Stabilizer(Vec<usize>),
    #[serde(rename = "elements")]
    Explicit,
}

/// A subgroup of a materialized group, held as a set of element indices.
#[derive(Debug, Clone)]
pub struct SubgroupHandle {
    parent: Arc<PermutationGroup>,
    descriptor: Descriptor,
    elements: BTreeSet<usize>,
}

impl PartialEq for SubgroupHandle {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && same_parent(&self.parent, &other.parent)
    }
}

impl Eq for SubgroupHandle {}

fn same_parent(a: &Arc<PermutationGroup>, b: &Arc<PermutationGroup>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn check_parents(a: &SubgroupHandle, b: &SubgroupHandle) -> Result<()> {
    if same_parent(&a.parent, &b.parent) {
        Ok(())
    } else {
        Err(Error::DifferentParents)
    }
}

/// Elements fixing every entry of `t`.
pub fn pointwise_stabilizer(g: &Arc<PermutationGroup>, t: &[usize]) -> Result<SubgroupHandle> {
    if let Some(&x) = t.iter().find(|&&x| x >= g.degree()) {
        return Err(Error::OutOfRange(format!("point {x} outside a carrier of {}", g.degree())));
    }
    let elements = (0..g.order()).filter(|&i| t.iter().all(|&x| g.apply(i, x) == x)).collect();
    Ok(SubgroupHandle { parent: g.clone(), descriptor: Descriptor::Stabilizer(t.to_vec()), elements })
}

impl SubgroupHandle {
    /// A subgroup given by element indices; the set must be a subgroup.
    pub fn explicit(g: &Arc<PermutationGroup>, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        let elements: BTreeSet<usize> = elements.into_iter().collect();
        if elements.iter().any(|&x| x >= g.order()) {
            return Err(Error::OutOfRange("element index outside the group".into()));
        }
        let closed = elements.contains(&0)
            && elements.iter().all(|&x| elements.contains(&g.inverse(x)))
            && elements.iter().all(|&x| elements.iter().all(|&y| elements.contains(&g.compose(x, y))));
        if !closed {
            return Err(Error::Structure("element set is not a subgroup".into()));
        }
        Ok(SubgroupHandle { parent: g.clone(), descriptor: Descriptor::Explicit, elements })
    }

    /// The subgroup generated by the given element indices.
    pub fn generated(g: &Arc<PermutationGroup>, gens: &[usize]) -> Self {
        SubgroupHandle { parent: g.clone(), descriptor: Descriptor::Explicit, elements: g.closure(gens) }
    }

    pub fn whole(g: &Arc<PermutationGroup>) -> Self {
        SubgroupHandle { parent: g.clone(), descriptor: Descriptor::Explicit, elements: (0..g.order()).collect() }
    }

    pub fn trivial(g: &Arc<PermutationGroup>) -> Self {
        SubgroupHandle { parent: g.clone(), descriptor: Descriptor::Explicit, elements: [0].into_iter().collect() }
    }

    pub fn parent(&self) -> &Arc<PermutationGroup> {
        &self.parent
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn elements(&self) -> &BTreeSet<usize> {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.contains(&g)
    }

    pub fn is_subset(&self, other: &SubgroupHandle) -> bool {
        self.elements.is_subset(&other.elements)
    }

    /// `h U h⁻¹`; a stabilizer of `t` becomes the stabilizer of `h(t)`.
    pub fn conjugate_by(&self, h: usize) -> SubgroupHandle {
        let g = &self.parent;
        let elements = self.elements.iter().map(|&x| g.conjugate(x, h)).collect();
        let descriptor = match &self.descriptor {
            Descriptor::Stabilizer(t) => Descriptor::Stabilizer(t.iter().map(|&x| g.apply(h, x)).collect()),
            Descriptor::Explicit => Descriptor::Explicit,
        };
        SubgroupHandle { parent: g.clone(), descriptor, elements }
    }

    pub fn intersection(&self, other: &SubgroupHandle) -> Result<SubgroupHandle> {
        check_parents(self, other)?;
        Ok(SubgroupHandle {
            parent: self.parent.clone(),
            descriptor: Descriptor::Explicit,
            elements: self.elements.intersection(&other.elements).copied().collect(),
        })
    }

    /// The left coset `aU` as a sorted element list.
    pub fn left_coset(&self, a: usize) -> Vec<usize> {
        let mut c: Vec<usize> = self.elements.iter().map(|&u| self.parent.compose(a, u)).collect();
        c.sort_unstable();
        c
    }

    pub fn to_json(&self) -> Value {
        match &self.descriptor {
            Descriptor::Stabilizer(t) => json!({ "stab": t, "order": self.order() }),
            Descriptor::Explicit => json!({
                "elements": self.elements.iter().map(|&i| self.parent.element(i)).collect::<Vec<_>>(),
            }),
        }
    }
}

/// One orbit on tuples, represented by its least tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub representative: Vec<usize>,
    pub size: usize,
}

fn orbits_of(g: &PermutationGroup, tuples: impl Iterator<Item = Vec<usize>>) -> Vec<Orbit> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for t in tuples {
        if seen.contains(&t) {
            continue;
        }
        let orbit: BTreeSet<Vec<usize>> = (0..g.order()).map(|h| t.iter().map(|&x| g.apply(h, x)).collect()).collect();
        out.push(Orbit { representative: t, size: orbit.len() });
        seen.extend(orbit);
    }
    out
}

/// Orbits on all `k`-tuples of points, in order of representatives.
pub fn orbits(g: &PermutationGroup, k: usize) -> Vec<Orbit> {
    if k == 0 {
        return orbits_of(g, std::iter::once(vec![]));
    }
    orbits_of(g, (0..k).map(|_| 0..g.degree()).multi_cartesian_product())
}

/// Orbits on `k`-tuples of distinct points.
pub fn orbits_distinct(g: &PermutationGroup, k: usize) -> Vec<Orbit> {
    orbits_of(g, (0..g.degree()).permutations(k))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum BaseFailure {
    /// The intersection of two members contains no member.
    Intersection { first: usize, second: usize },
    /// Conjugating a member by an element leaves the base.
    Conjugation { member: usize, by: usize },
}

/// Checks that `base` is closed under conjugation and that every pairwise
/// intersection contains a member. Containment of the identity and
/// inverse-closure hold for any family of subgroups.
pub fn check_algebraic_base(g: &Arc<PermutationGroup>, base: &[SubgroupHandle]) -> Result<(bool, Option<BaseFailure>)> {
    if base.iter().any(|u| !same_parent(u.parent(), g)) {
        return Err(Error::DifferentParents);
    }
    let sets: BTreeSet<&BTreeSet<usize>> = base.iter().map(|u| &u.elements).collect();
    for (i, u) in base.iter().enumerate() {
        for (j, v) in base.iter().enumerate().skip(i) {
            let meet: BTreeSet<usize> = u.elements.intersection(&v.elements).copied().collect();
            if !base.iter().any(|w| w.elements.is_subset(&meet)) {
                return Ok((false, Some(BaseFailure::Intersection { first: i, second: j })));
            }
        }
    }
    for (i, u) in base.iter().enumerate() {
        for h in 0..g.order() {
            if !sets.contains(&u.conjugate_by(h).elements) {
                return Ok((false, Some(BaseFailure::Conjugation { member: i, by: h })));
            }
        }
    }
    Ok((true, None))
}

/// An arrow `G/U → G/V`, `xU ↦ xaV`, stored with the least valid
/// representative of `aV`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetArrow {
    pub source: SubgroupHandle,
    pub target: SubgroupHandle,
    pub representative: usize,
}

fn valid_rep(u: &SubgroupHandle, v: &SubgroupHandle, a: usize) -> bool {
    let g = u.parent();
    u.elements.iter().all(|&x| v.contains(g.conjugate(x, a)))
}

/// All arrows `G/U → G/V`: one per coset `aV` containing an element `a`
/// with `U ⊆ a⁻¹Va`, in order of representatives.
pub fn hom_cosets(u: &SubgroupHandle, v: &SubgroupHandle) -> Result<Vec<CosetArrow>> {
    check_parents(u, v)?;
    let g = u.parent();
    let mut by_coset: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for a in 0..g.order() {
        if valid_rep(u, v, a) {
            by_coset.entry(v.left_coset(a)).or_insert(a);
        }
    }
    let mut reps: Vec<usize> = by_coset.into_values().collect();
    reps.sort_unstable();
    Ok(reps.into_iter().map(|a| CosetArrow { source: u.clone(), target: v.clone(), representative: a }).collect())
}

impl CosetArrow {
    /// `U = a⁻¹Va`.
    pub fn is_iso(&self) -> bool {
        let g = self.source.parent();
        let a_inv = g.inverse(self.representative);
        let conj: BTreeSet<usize> = self.target.elements.iter().map(|&x| g.conjugate(x, a_inv)).collect();
        conj == self.source.elements
    }

    /// `self` followed by `next`, with representative `b·a`.
    pub fn then(&self, next: &CosetArrow) -> Result<CosetArrow> {
        if self.target != next.source {
            return Err(Error::Composition("arrow targets and sources differ".into()));
        }
        let g = self.source.parent();
        let rep = g.compose(next.representative, self.representative);
        let w = &next.target;
        let least = w
            .left_coset(rep)
            .into_iter()
            .find(|&c| valid_rep(&self.source, w, c))
            .ok_or_else(|| Error::Composition("composite has no valid representative".into()))?;
        Ok(CosetArrow { source: self.source.clone(), target: w.clone(), representative: least })
    }
}

pub fn is_iso_arrow(arr: &CosetArrow) -> bool {
    arr.is_iso()
}

/// Whether some `g` has `gUg⁻¹ = V`.
pub fn transitive_gsets_isomorphic(u: &SubgroupHandle, v: &SubgroupHandle) -> Result<bool> {
    check_parents(u, v)?;
    if u.order() != v.order() {
        return Ok(false);
    }
    Ok((0..u.parent().order()).any(|h| u.conjugate_by(h).elements == v.elements))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoubleCosets {
    pub count: usize,
    pub representatives: Vec<usize>,
    pub sizes: Vec<usize>,
}

/// The partition of `G` into double cosets `HgH`.
pub fn double_cosets(g: &PermutationGroup, h: &SubgroupHandle) -> DoubleCosets {
    let mut seen = vec![false; g.order()];
    let (mut reps, mut sizes) = (Vec::new(), Vec::new());
    for x in 0..g.order() {
        if seen[x] {
            continue;
        }
        let mut size = 0;
        for &a in &h.elements {
            for &b in &h.elements {
                let y = g.compose(g.compose(a, x), b);
                if !std::mem::replace(&mut seen[y], true) {
                    size += 1;
                }
            }
        }
        reps.push(x);
        sizes.push(size);
    }
    DoubleCosets { count: reps.len(), representatives: reps, sizes }
}

/// Number of orbits of `H` acting by left multiplication on `G/H`.
pub fn orbits_on_cosets(g: &PermutationGroup, h: &SubgroupHandle) -> usize {
    let cosets: BTreeSet<Vec<usize>> = (0..g.order()).map(|x| h.left_coset(x)).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut count = 0;
    for c in &cosets {
        if seen.contains(c) {
            continue;
        }
        count += 1;
        for &a in &h.elements {
            seen.insert(h.left_coset(g.compose(a, c[0])));
        }
    }
    count
}

/// Every subgroup, ordered by order then elements.
pub fn all_subgroups(g: &Arc<PermutationGroup>) -> Result<Vec<SubgroupHandle>> {
    if g.order() > MAX_LATTICE_ORDER {
        return Err(Error::Overflow(format!("subgroup lattice of a group of order {}", g.order())));
    }
    let n = g.order();
    let table: Vec<usize> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| g.compose(a, b)).collect();
    let close = |gens: &[usize]| {
        let mut set = BTreeSet::from([0]);
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &a in gens {
                let y = table[a * n + x];
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        set
    };
    let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::from([close(&[])]);
    let mut queue: VecDeque<(BTreeSet<usize>, Vec<usize>)> = VecDeque::from([(close(&[]), vec![])]);
    while let Some((h, gens)) = queue.pop_front() {
        for x in 0..n {
            if h.contains(&x) {
                continue;
            }
            let mut with = gens.clone();
            with.push(x);
            let k = close(&with);
            if found.insert(k.clone()) {
                queue.push_back((k, with));
            }
        }
    }
    let mut subs: Vec<BTreeSet<usize>> = found.into_iter().collect();
    subs.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    Ok(subs
        .into_iter()
        .map(|elements| SubgroupHandle { parent: g.clone(), descriptor: Descriptor::Explicit, elements })
        .collect())
}

/// Decides completeness of `g` as a discrete group.
///
/// A family picks a left coset `a_U` of every subgroup `U` such that
/// `a_U ⊆ a_V` whenever `U ⊆ V`, and `a_U` meets `a_{hUh⁻¹}` for every `h`.
/// The group is complete iff every family is `(gU)_U` for exactly one `g`.
pub fn is_complete_discrete(g: &Arc<PermutationGroup>) -> Result<bool> {
    let subs = all_subgroups(g)?;
    let cosets: Vec<Vec<Vec<usize>>> = subs
        .iter()
        .map(|u| (0..g.order()).map(|x| u.left_coset(x)).collect::<BTreeSet<_>>().into_iter().collect())
        .collect();
    let conj_index: Vec<Vec<usize>> = subs
        .iter()
        .map(|u| {
            (0..g.order())
                .map(|h| {
                    let c = u.conjugate_by(h);
                    subs.iter().position(|w| w.elements == c.elements).expect("conjugates are subgroups")
                })
                .collect()
        })
        .collect();
    let mut families: Vec<Vec<usize>> = Vec::new();
    let mut choice: Vec<usize> = Vec::new();
    search_families(&subs, &cosets, &conj_index, &mut choice, &mut families);
    // each family must come from exactly one element
    let mut from_elements = BTreeSet::new();
    for x in 0..g.order() {
        let fam: Vec<usize> = subs
            .iter()
            .enumerate()
            .map(|(i, u)| cosets[i].iter().position(|c| *c == u.left_coset(x)).expect("coset of x"))
            .collect();
        if !from_elements.insert(fam) {
            return Ok(false);
        }
    }
    Ok(families.len() == from_elements.len() && families.iter().all(|f| from_elements.contains(f)))
}

fn search_families(
    subs: &[SubgroupHandle],
    cosets: &[Vec<Vec<usize>>],
    conj: &[Vec<usize>],
    choice: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let i = choice.len();
    if i == subs.len() {
        out.push(choice.clone());
        return;
    }
    'next: for (c, coset) in cosets[i].iter().enumerate() {
        for j in 0..i {
            let other = &cosets[j][choice[j]];
            if subs[j].is_subset(&subs[i]) && !other.iter().all(|x| coset.binary_search(x).is_ok()) {
                continue 'next;
            }
            let conjugate = conj[i].contains(&j);
            if conjugate && !other.iter().any(|x| coset.binary_search(x).is_ok()) {
                continue 'next;
            }
        }
        choice.push(c);
        search_families(subs, cosets, conj, choice, out);
        choice.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::builders::{cyclic_group, direct_product, graph, pure_set};

    fn s3() -> Arc<PermutationGroup> {
        Arc::new(PermutationGroup::symmetric(3))
    }

    fn idx(g: &PermutationGroup, p: &[usize]) -> usize {
        g.index_of(p).unwrap()
    }

    /// `⟨(a b)⟩` in zero-based points.
    fn transposition(g: &Arc<PermutationGroup>, a: usize, b: usize) -> SubgroupHandle {
        let mut p: Vec<usize> = (0..g.degree()).collect();
        p.swap(a, b);
        SubgroupHandle::generated(g, &[idx(g, &p)])
    }

    #[test]
    fn automorphism_group_orders() {
        assert_eq!(automorphisms(&graph(3, &[(0, 1), (1, 2), (0, 2)])).order(), 6);
        assert_eq!(automorphisms(&graph(3, &[(0, 1), (1, 2)])).order(), 2);
        assert_eq!(automorphisms(&pure_set(4)).order(), 24);
        let v4 = direct_product(&cyclic_group(2), &cyclic_group(2));
        assert_eq!(automorphisms(&v4).order(), 6);
    }

    #[test]
    fn identity_is_first_and_inverses_work() {
        let g = PermutationGroup::symmetric(4);
        assert_eq!(g.element(0), &[0, 1, 2, 3]);
        for i in 0..g.order() {
            assert_eq!(g.compose(i, g.inverse(i)), 0);
        }
        assert_eq!(SubgroupHandle::generated(&Arc::new(g.clone()), g.generators()).order(), 24);
    }

    #[test]
    fn stabilizers() {
        let s4 = Arc::new(PermutationGroup::symmetric(4));
        let st = pointwise_stabilizer(&s4, &[0, 1]).unwrap();
        assert_eq!(st.order(), 2);
        assert!(st.contains(idx(&s4, &[0, 1, 3, 2])));
        assert_eq!(pointwise_stabilizer(&s4, &[]).unwrap().order(), 24);
        assert!(pointwise_stabilizer(&s4, &[4]).is_err());
        let v4 = direct_product(&cyclic_group(2), &cyclic_group(2));
        let aut = Arc::new(automorphisms(&v4));
        assert_eq!(pointwise_stabilizer(&aut, &[1]).unwrap().order(), 2);
    }

    #[test]
    fn orbit_counts() {
        let c5 = automorphisms(&graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]));
        assert_eq!(orbits(&c5, 1).len(), 1);
        assert_eq!(orbits_distinct(&c5, 2).len(), 2);
        assert_eq!(orbits(&c5, 2).len(), 3);
        let trivial = automorphisms(&graph(3, &[(0, 1), (1, 2)]));
        assert_eq!(orbits(&trivial, 0).len(), 1);
        let rigid = PermutationGroup::generated(4, &[]).unwrap();
        assert_eq!(orbits(&rigid, 1).len(), 4);
    }

    #[test]
    fn algebraic_bases() {
        let g = s3();
        let stabs: Vec<SubgroupHandle> =
            (0..=3).flat_map(|k| (0..3).permutations(k)).map(|t| pointwise_stabilizer(&g, &t).unwrap()).collect();
        assert_eq!(check_algebraic_base(&g, &stabs).unwrap(), (true, None));
        let (ok, why) = check_algebraic_base(&g, &[transposition(&g, 0, 1)]).unwrap();
        assert!(!ok);
        assert!(matches!(why, Some(BaseFailure::Conjugation { .. })));
        assert!(check_algebraic_base(&g, &[SubgroupHandle::whole(&g)]).unwrap().0);
        let other = Arc::new(PermutationGroup::symmetric(3));
        let foreign = SubgroupHandle::whole(&Arc::new(PermutationGroup::symmetric(2)));
        assert!(matches!(check_algebraic_base(&other, &[foreign]), Err(Error::DifferentParents)));
    }

    #[test]
    fn coset_arrows_in_s3() {
        let g = s3();
        let (u, v) = (transposition(&g, 0, 1), transposition(&g, 0, 2));
        assert_eq!(hom_cosets(&u, &u).unwrap().len(), 1);
        assert_eq!(hom_cosets(&SubgroupHandle::trivial(&g), &u).unwrap().len(), 3);
        let arrows = hom_cosets(&u, &v).unwrap();
        assert_eq!(arrows.len(), 2);
        assert!(arrows.iter().all(is_iso_arrow));
        let id = &hom_cosets(&u, &u).unwrap()[0];
        assert_eq!(id.representative, 0);
        assert!(id.is_iso());
    }

    #[test]
    fn proper_containment_is_not_iso() {
        let s4 = Arc::new(PermutationGroup::symmetric(4));
        let u = SubgroupHandle::generated(&s4, &[idx(&s4, &[1, 0, 2, 3])]);
        let v = SubgroupHandle::generated(&s4, &[idx(&s4, &[1, 0, 2, 3]), idx(&s4, &[0, 1, 3, 2])]);
        let arrows = hom_cosets(&u, &v).unwrap();
        let at_e = arrows.iter().find(|a| a.representative == 0).unwrap();
        assert!(!at_e.is_iso());
    }

    #[test]
    fn conjugacy_of_isotropy_groups() {
        let g = s3();
        let (u, v) = (transposition(&g, 0, 1), transposition(&g, 0, 2));
        let rot = SubgroupHandle::generated(&g, &[idx(&g, &[1, 2, 0])]);
        assert!(transitive_gsets_isomorphic(&u, &v).unwrap());
        assert!(!transitive_gsets_isomorphic(&u, &rot).unwrap());
        assert!(transitive_gsets_isomorphic(&u, &u).unwrap());
    }

    #[test]
    fn double_coset_counts() {
        let g = s3();
        let h = transposition(&g, 0, 1);
        let d = double_cosets(&g, &h);
        assert_eq!(d.count, 2);
        let mut sizes = d.sizes.clone();
        sizes.sort();
        assert_eq!(sizes, vec![2, 4]);
        assert_eq!(double_cosets(&g, &SubgroupHandle::trivial(&g)).count, 6);
        assert_eq!(double_cosets(&g, &SubgroupHandle::whole(&g)).count, 1);
    }

    #[test]
    fn completeness_of_small_discrete_groups() {
        let trivial = Arc::new(PermutationGroup::generated(1, &[]).unwrap());
        assert!(is_complete_discrete(&trivial).unwrap());
        assert!(is_complete_discrete(&s3()).unwrap());
        let v4 = Arc::new(PermutationGroup::generated(4, &[vec![1, 0, 3, 2], vec![2, 3, 0, 1]]).unwrap());
        assert_eq!(v4.order(), 4);
        assert!(is_complete_discrete(&v4).unwrap());
        assert_eq!(all_subgroups(&s3()).unwrap().len(), 6);
        assert!(is_complete_discrete(&Arc::new(PermutationGroup::symmetric(6))).is_err());
    }

    #[test]
    fn arrow_composition_stays_valid() {
        let g = Arc::new(PermutationGroup::symmetric(4));
        let subs = all_subgroups(&g).unwrap();
        let picks = [&subs[0], &subs[1], &subs[5], &subs[12]];
        for u in picks {
            for v in picks {
                for w in picks {
                    for f in hom_cosets(u, v).unwrap() {
                        for h in hom_cosets(v, w).unwrap() {
                            let c = f.then(&h).unwrap();
                            assert!(valid_rep(u, w, c.representative));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn stabilizers_conjugate_along_the_action() {
        let g = Arc::new(automorphisms(&graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])));
        for t in (0..5).permutations(2) {
            let st = pointwise_stabilizer(&g, &t).unwrap();
            for h in 0..g.order() {
                let moved: Vec<usize> = t.iter().map(|&x| g.apply(h, x)).collect();
                assert_eq!(pointwise_stabilizer(&g, &moved).unwrap(), st.conjugate_by(h));
            }
        }
    }

    #[test]
    fn double_cosets_match_orbits_on_cosets() {
        let g = Arc::new(PermutationGroup::symmetric(4));
        for h in all_subgroups(&g).unwrap() {
            assert_eq!(double_cosets(&g, &h).count, orbits_on_cosets(&g, &h));
        }
    }
}
