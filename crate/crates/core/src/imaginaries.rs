//! Functorial equivalence relations on representables, atomic completeness
//! and the realization of subgroups from `(c, R)` data.
//!
//! A relation on `Hom(c, −)` is stored over a [`FiniteCategory`] as one
//! class id per arrow, for every object of the category. Ids are assigned
//! by first occurrence, so two relations are equal iff their tables are.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::autgroup::{all_subgroups, automorphisms, PermutationGroup, SubgroupHandle};
use crate::category::FiniteCategory;
use crate::error::{Error, Result};
use crate::fraisse::FraisseClass;
use crate::structures::json::structure_to_json;
use crate::structures::FiniteStructure;

/// Cap on seed pairs tried by [`atomic_complete_check`] for one base object.
pub const MAX_SEEDS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RepresentableRelation {
    base: usize,
    /// `classes[e][f]`: class of the arrow `hom(base, e)[f]`.
    classes: Vec<Vec<usize>>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            y = std::mem::replace(&mut self.0[y], r);
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.0[a.max(b)] = a.min(b);
        true
    }

    fn classes(mut self) -> Vec<usize> {
        let roots: Vec<usize> = (0..self.0.len()).map(|x| self.find(x)).collect();
        first_occurrence(&roots)
    }
}

fn first_occurrence(ids: &[usize]) -> Vec<usize> {
    let mut seen = BTreeMap::new();
    ids.iter()
        .map(|&r| {
            let next = seen.len();
            *seen.entry(r).or_insert(next)
        })
        .collect()
}

impl RepresentableRelation {
    pub fn diagonal(cat: &FiniteCategory, c: usize) -> Self {
        let classes = (0..cat.len()).map(|e| (0..cat.hom(c, e).len()).collect()).collect();
        RepresentableRelation { base: c, classes }
    }

    pub fn total(cat: &FiniteCategory, c: usize) -> Self {
        let classes = (0..cat.len()).map(|e| vec![0; cat.hom(c, e).len()]).collect();
        RepresentableRelation { base: c, classes }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn classes(&self, e: usize) -> &[usize] {
        &self.classes[e]
    }

    /// Whether arrows `f, g ∈ hom(base, e)` are related.
    pub fn related(&self, e: usize, f: usize, g: usize) -> bool {
        self.classes[e][f] == self.classes[e][g]
    }

    pub fn is_diagonal(&self) -> bool {
        self.classes.iter().all(|c| c.iter().enumerate().all(|(i, &x)| i == x))
    }

    /// Every pair related by `other` is related here.
    pub fn contains(&self, other: &RepresentableRelation) -> bool {
        self.base == other.base
            && self.classes.iter().zip(&other.classes).all(|(mine, theirs)| {
                let mut map = BTreeMap::new();
                theirs.iter().zip(mine).all(|(&t, &m)| *map.entry(t).or_insert(m) == m)
            })
    }

    /// Related pairs stay related under post-composition.
    pub fn is_functorial(&self, cat: &FiniteCategory) -> bool {
        let c = self.base;
        (0..cat.len()).all(|e| {
            let n = cat.hom(c, e).len();
            (0..n).all(|f| {
                (f + 1..n).filter(|&g| self.related(e, f, g)).all(|g| {
                    (0..cat.len()).all(|e2| {
                        (0..cat.hom(e, e2).len())
                            .all(|t| self.related(e2, cat.compose(c, e, e2, f, t), cat.compose(c, e, e2, g, t)))
                    })
                })
            })
        })
    }

    /// The least functorial equivalence relation containing every seed
    /// pair `(e, f, g)` with `f, g ∈ hom(base, e)`.
    pub fn close(cat: &FiniteCategory, c: usize, seeds: &[(usize, usize, usize)]) -> Self {
        let mut uf: Vec<UnionFind> = (0..cat.len()).map(|e| UnionFind::new(cat.hom(c, e).len())).collect();
        for &(e, f, g) in seeds {
            if f == g {
                continue;
            }
            for (e2, u) in uf.iter_mut().enumerate() {
                for t in 0..cat.hom(e, e2).len() {
                    u.union(cat.compose(c, e, e2, f, t), cat.compose(c, e, e2, g, t));
                }
            }
        }
        RepresentableRelation { base: c, classes: uf.into_iter().map(UnionFind::classes).collect() }
    }

    /// Pairs tying each arrow to the first arrow of its class.
    fn generating_pairs(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (e, cls) in self.classes.iter().enumerate() {
            let mut first = BTreeMap::new();
            for (f, &k) in cls.iter().enumerate() {
                match first.get(&k) {
                    Some(&f0) => out.push((e, f0, f)),
                    None => {
                        first.insert(k, f);
                    }
                }
            }
        }
        out
    }

    /// `{"base": structure, "family": {object: [[arrow indices]...]}}`
    /// listing the non-singleton classes over each object.
    pub fn to_json(&self, cat: &FiniteCategory) -> Value {
        let mut family = serde_json::Map::new();
        for (e, cls) in self.classes.iter().enumerate() {
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (f, &k) in cls.iter().enumerate() {
                groups.entry(k).or_default().push(f);
            }
            let groups: Vec<Vec<usize>> = groups.into_values().filter(|g| g.len() > 1).collect();
            if !groups.is_empty() {
                family.insert(object_label(cat, e), json!(groups));
            }
        }
        json!({ "base": structure_to_json(cat.object(self.base)), "family": family })
    }
}

/// Object key that sorts in category order.
pub fn object_label(cat: &FiniteCategory, e: usize) -> String {
    format!("{e:03}:{}", cat.object(e).canonical_label().digest())
}

/// Smallest functorial equivalence relation containing `(t∘h, t∘k)` for
/// every `t` out of `e`.
pub fn generated_relation(cat: &FiniteCategory, c: usize, e: usize, h: usize, k: usize) -> RepresentableRelation {
    RepresentableRelation::close(cat, c, &[(e, h, k)])
}

/// Adds every pair `(χ, ξ)` over `e` such that `(t∘χ, t∘ξ)` is related for
/// some `t: e → e′`, re-closed until stable. In a truncated category the
/// raw formula need not be transitive, hence the fixpoint.
pub fn jat_closure(cat: &FiniteCategory, r: &RepresentableRelation) -> RepresentableRelation {
    let c = r.base;
    let mut cur = r.clone();
    loop {
        let mut seeds = cur.generating_pairs();
        for e in 0..cat.len() {
            let n = cat.hom(c, e).len();
            for f in 0..n {
                for g in f + 1..n {
                    if cur.related(e, f, g) {
                        continue;
                    }
                    let merged = (0..cat.len()).any(|e2| {
                        (0..cat.hom(e, e2).len())
                            .any(|t| cur.related(e2, cat.compose(c, e, e2, f, t), cat.compose(c, e, e2, g, t)))
                    });
                    if merged {
                        seeds.push((e, f, g));
                    }
                }
            }
        }
        let next = RepresentableRelation::close(cat, c, &seeds);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// An arrow `m: d → base` with `f∘m = g∘m ⟺ (f, g) ∈ R` for all `f, g`.
pub fn find_separating_arrow(cat: &FiniteCategory, r: &RepresentableRelation) -> Option<(usize, usize)> {
    let c = r.base;
    (0..cat.len()).flat_map(|d| (0..cat.hom(d, c).len()).map(move |m| (d, m))).find(|&(d, m)| {
        let m = &cat.hom(d, c)[m];
        (0..cat.len()).all(|e| {
            let homs = cat.hom(c, e);
            (0..homs.len()).all(|f| {
                (f + 1..homs.len()).all(|g| {
                    let equal = m.iter().all(|&x| homs[f][x] == homs[g][x]);
                    equal == r.related(e, f, g)
                })
            })
        })
    })
}

/// A closed relation with no separating arrow.
#[derive(Debug, Clone)]
pub struct AtomWitness {
    pub base: Arc<FiniteStructure>,
    pub seed_target: Arc<FiniteStructure>,
    pub h: Vec<usize>,
    pub k: Vec<usize>,
    pub relation: RepresentableRelation,
}

impl AtomWitness {
    /// Whether the seed is an automorphism pair `(id, σ)` with `σ` an
    /// involution other than the identity.
    pub fn is_swap(&self) -> bool {
        let id: Vec<usize> = (0..self.base.len()).collect();
        self.seed_target.len() == self.base.len()
            && self.h == id
            && self.k != id
            && self.k.iter().enumerate().all(|(x, &y)| self.k[y] == x)
    }

    pub fn to_json(&self, cat: &FiniteCategory) -> Value {
        json!({
            "base": structure_to_json(&self.base),
            "seed": { "target": structure_to_json(&self.seed_target), "h": self.h, "k": self.k },
            "swap": self.is_swap(),
            "relation": self.relation.to_json(cat),
        })
    }
}

#[derive(Debug, Clone)]
pub struct AtomicCompleteness {
    pub complete: bool,
    pub witnesses: Vec<AtomWitness>,
    /// Distinct closed relations examined.
    pub relations: usize,
    pub category: FiniteCategory,
}

impl AtomicCompleteness {
    pub fn to_json(&self) -> Value {
        json!({
            "atomically_complete": self.complete,
            "relations": self.relations,
            "objects": self.category.len(),
            "witnesses": self.witnesses.iter().map(|w| w.to_json(&self.category)).collect::<Vec<_>>(),
        })
    }
}

/// Atomic completeness over members of measure at most `2 * size_bound`.
/// Bases `c` and seed targets `e` have measure at most `size_bound`; each
/// candidate relation is generated by one pair `h ≠ k` in `hom(c, e)` and
/// then J_at-closed.
pub fn atomic_complete_check(class: &FraisseClass, size_bound: usize) -> Result<AtomicCompleteness> {
    let cat = FiniteCategory::from_class(class, 2 * size_bound, &[])?;
    let small: Vec<usize> = (0..cat.len()).filter(|&i| class.measure(cat.object(i)) <= size_bound).collect();
    atomic_complete_check_in(cat, &small)
}

/// [`atomic_complete_check`] with an explicit list of small objects.
pub fn atomic_complete_check_in(cat: FiniteCategory, small: &[usize]) -> Result<AtomicCompleteness> {
    let mut witnesses = Vec::new();
    let mut relations = 0;
    for &c in small {
        let seeds: Vec<(usize, usize, usize)> = small
            .iter()
            .flat_map(|&e| {
                let n = cat.hom(c, e).len();
                (0..n).flat_map(move |h| (h + 1..n).map(move |k| (e, h, k)))
            })
            .collect();
        if seeds.len() > MAX_SEEDS {
            return Err(Error::Overflow(format!("{} seed pairs on one base object", seeds.len())));
        }
        let closed: Vec<RepresentableRelation> =
            seeds.par_iter().map(|&(e, h, k)| jat_closure(&cat, &generated_relation(&cat, c, e, h, k))).collect();
        let mut seen = BTreeSet::from([RepresentableRelation::diagonal(&cat, c)]);
        for ((e, h, k), r) in seeds.into_iter().zip(closed) {
            if !seen.insert(r.clone()) {
                continue;
            }
            if find_separating_arrow(&cat, &r).is_none() {
                witnesses.push(AtomWitness {
                    base: cat.object(c).clone(),
                    seed_target: cat.object(e).clone(),
                    h: cat.hom(c, e)[h].clone(),
                    k: cat.hom(c, e)[k].clone(),
                    relation: r,
                });
            }
        }
        relations += seen.len();
    }
    Ok(AtomicCompleteness { complete: witnesses.is_empty(), witnesses, relations, category: cat })
}

/// `{z ∈ Aut(u) : ξ = χ∘f and z∘ξ = χ∘g for some (f, g) ∈ R_e, χ: e → u}`,
/// as automorphism maps.
pub fn realized_subgroup(cat: &FiniteCategory, u: usize, xi: usize, r: &RepresentableRelation) -> BTreeSet<Vec<usize>> {
    let c = r.base;
    let xi_map = &cat.hom(c, u)[xi];
    let auts = cat.hom(u, u);
    let mut out = BTreeSet::new();
    for e in 0..cat.len() {
        let homs = cat.hom(c, e);
        for chi in cat.hom(e, u) {
            for f in (0..homs.len()).filter(|&f| homs[f].iter().map(|&x| chi[x]).eq(xi_map.iter().copied())) {
                for g in (0..homs.len()).filter(|&g| r.related(e, f, g)) {
                    let target: Vec<usize> = homs[g].iter().map(|&x| chi[x]).collect();
                    for z in auts {
                        if xi_map.iter().map(|&x| z[x]).eq(target.iter().copied()) {
                            out.insert(z.clone());
                        }
                    }
                }
            }
        }
    }
    out
}

/// A `(c, ξ, R)` triple realizing a subgroup.
#[derive(Debug, Clone)]
pub struct Realization {
    pub base: usize,
    pub xi: usize,
    pub relation: RepresentableRelation,
}

impl Realization {
    pub fn to_json(&self, cat: &FiniteCategory, u: usize) -> Value {
        json!({
            "base": structure_to_json(cat.object(self.base)),
            "xi": cat.hom(self.base, u)[self.xi],
            "diagonal": self.relation.is_diagonal(),
            "relation": self.relation.to_json(cat),
        })
    }
}

fn check_aut_group(cat: &FiniteCategory, u: usize, g: &PermutationGroup) -> Result<()> {
    let auts = cat.hom(u, u);
    if g.degree() != cat.object(u).len() || g.elements() != auts {
        return Err(Error::ClassMismatch("subgroup must live in the automorphism group of the object".into()));
    }
    Ok(())
}

/// Candidate closed relations on `hom(c, −)`: diagonal, total, then each
/// single generated pair, deduplicated in that order.
pub fn candidate_relations(cat: &FiniteCategory, c: usize) -> Vec<RepresentableRelation> {
    let mut out = vec![RepresentableRelation::diagonal(cat, c), RepresentableRelation::total(cat, c)];
    let mut seen: BTreeSet<RepresentableRelation> = out.iter().cloned().collect();
    for e in 0..cat.len() {
        let n = cat.hom(c, e).len();
        for h in 0..n {
            for k in h + 1..n {
                let r = jat_closure(cat, &generated_relation(cat, c, e, h, k));
                if seen.insert(r.clone()) {
                    out.push(r);
                }
            }
        }
    }
    out
}

/// Searches objects `c`, arrows `ξ: c → u` and closed relations `R` for
/// one whose realized subgroup is exactly `U`.
pub fn subgroup_realization(cat: &FiniteCategory, u: usize, subgroup: &SubgroupHandle) -> Result<Option<Realization>> {
    let g = subgroup.parent();
    check_aut_group(cat, u, g)?;
    let want: BTreeSet<Vec<usize>> = subgroup.elements().iter().map(|&i| g.element(i).to_vec()).collect();
    for c in 0..cat.len() {
        let candidates = candidate_relations(cat, c);
        for xi in 0..cat.hom(c, u).len() {
            for r in &candidates {
                if realized_subgroup(cat, u, xi, r) == want {
                    return Ok(Some(Realization { base: c, xi, relation: r.clone() }));
                }
            }
        }
    }
    Ok(None)
}

/// One object of `C/u` up to isomorphism: an object and the image of its
/// arrow.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SliceClass {
    pub object: usize,
    pub image: BTreeSet<usize>,
}

#[derive(Debug, Clone)]
pub struct FImage {
    pub group: Arc<PermutationGroup>,
    /// Distinct pointwise stabilizers, in subgroup lattice order.
    pub image: Vec<SubgroupHandle>,
    pub missing: Vec<SubgroupHandle>,
    pub slice_classes: usize,
    /// Distinct slice classes sharing a stabilizer.
    pub collisions: Vec<(SliceClass, SliceClass)>,
}

impl FImage {
    pub fn bijective(&self) -> bool {
        self.collisions.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "aut_order": self.group.order(),
            "image": self.image.iter().map(|s| s.order()).collect::<Vec<_>>(),
            "missing": self.missing.iter().map(SubgroupHandle::to_json).collect::<Vec<_>>(),
            "slice_classes": self.slice_classes,
            "collisions": self.collisions,
            "bijective": self.bijective(),
        })
    }
}

/// Pointwise stabilizers `I_χ` of all arrows `χ` into `u`, the subgroups
/// of `Aut(u)` that are not of this form, and slice classes whose
/// stabilizers coincide.
pub fn image_of_f_subgroups(cat: &FiniteCategory, u: usize) -> Result<FImage> {
    let group = Arc::new(automorphisms(cat.object(u)));
    let subgroups = all_subgroups(&group)?;
    let mut by_stabilizer: BTreeMap<BTreeSet<usize>, SliceClass> = BTreeMap::new();
    let mut collisions = Vec::new();
    let mut slice = BTreeSet::new();
    for c in 0..cat.len() {
        for chi in cat.hom(c, u) {
            let class = SliceClass { object: c, image: chi.iter().copied().collect() };
            if !slice.insert(class.clone()) {
                continue;
            }
            let stab: BTreeSet<usize> =
                (0..group.order()).filter(|&z| chi.iter().all(|&x| group.apply(z, x) == x)).collect();
            match by_stabilizer.get(&stab) {
                Some(prev) => collisions.push((prev.clone(), class)),
                None => {
                    by_stabilizer.insert(stab, class);
                }
            }
        }
    }
    let (image, missing) = subgroups.into_iter().partition(|s| by_stabilizer.contains_key(s.elements()));
    Ok(FImage { group, image, missing, slice_classes: slice.len(), collisions })
}

/// The category of subgroups of a finite group, one object per
/// isomorphism type, ordered by size.
pub fn subgroup_category(g: &FiniteStructure) -> Result<FiniteCategory> {
    if g.len() > 16 {
        return Err(Error::Overflow(format!("subgroup scan of a group of order {}", g.len())));
    }
    let e = g.constants()[0];
    let mut found: Vec<FiniteStructure> = Vec::new();
    for mask in 0u32..(1 << g.len()) {
        let set: BTreeSet<usize> = (0..g.len()).filter(|&i| mask >> i & 1 == 1).collect();
        if !set.contains(&e) || g.closure(&set.iter().copied().collect::<Vec<_>>()) != set {
            continue;
        }
        let (sub, _) = g.induced(&set)?;
        if !found.iter().any(|f| f.is_isomorphic(&sub)) {
            found.push(sub);
        }
    }
    found.sort_by(|a, b| (a.len(), a.canonical_label()).cmp(&(b.len(), b.canonical_label())));
    FiniteCategory::new(found.into_iter().map(Arc::new).collect())
}

/// Data of the imaginaries counterexample in finite groups: homomorphisms
/// `h, k: ℤ/m → ℤ/m` given by multipliers and `l, n: ℤ/m → (ℤ/m)²` given
/// by multiplier pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CyclicInstance {
    pub modulus: u64,
    pub h: u64,
    pub k: u64,
    pub l: (u64, u64),
    pub n: (u64, u64),
}

impl CyclicInstance {
    pub const STANDARD: CyclicInstance = CyclicInstance { modulus: 15, h: 1, k: 2, l: (1, 3), n: (5, 1) };
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclicReport {
    pub embeddings: bool,
    /// Size of the equalizer of `h` and `k`.
    pub equalizer: u64,
    /// `l∘m = n∘m` for the arrow `m` out of the equalizer.
    pub lm_equals_nm: bool,
    /// Multiplicative order of `k·h⁻¹`.
    pub ratio_order: u64,
    /// Pairs `(p, q)` with `r^p·l(1) = r^q·n(1)`.
    pub solutions: Vec<(u64, u64)>,
    pub confirmed: bool,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Checks the instance step by step: all four maps are injective, the
/// equalizer of `h, k` is trivial so `l∘m = n∘m`, and no power of the
/// ratio `r = k·h⁻¹` carries `l(1)` to a power-multiple of `n(1)`. The last
/// condition is necessary for `(l, n)` to be related by the relation
/// generated by `(h, k)`; when all hold, `m` cannot separate that relation.
pub fn z15_counterexample_verify(inst: &CyclicInstance) -> CyclicReport {
    let m = inst.modulus;
    let unit = |a: u64| gcd(a % m, m) == 1;
    let pair_injective = |(a, b): (u64, u64)| gcd(gcd(a % m, b % m), m) == 1;
    let embeddings = unit(inst.h) && unit(inst.k) && pair_injective(inst.l) && pair_injective(inst.n);
    let equalizer = (0..m).filter(|&x| inst.h * x % m == inst.k * x % m).count() as u64;
    let eq: Vec<u64> = (0..m).filter(|&x| inst.h * x % m == inst.k * x % m).collect();
    let lm_equals_nm = eq.iter().all(|&x| (inst.l.0 * x % m, inst.l.1 * x % m) == (inst.n.0 * x % m, inst.n.1 * x % m));
    let (ratio_order, solutions) = match (1..m).find(|&y| inst.h * y % m == 1) {
        Some(h_inv) if embeddings => {
            let r = inst.k * h_inv % m;
            let order = (1..=m).find(|&t| (0..t).fold(1, |acc, _| acc * r % m) == 1).unwrap_or(m);
            let pow = |p: u64| (0..p).fold(1, |acc, _| acc * r % m);
            let mut sols = Vec::new();
            for p in 0..order {
                for q in 0..order {
                    let lhs = (pow(p) * inst.l.0 % m, pow(p) * inst.l.1 % m);
                    let rhs = (pow(q) * inst.n.0 % m, pow(q) * inst.n.1 % m);
                    if lhs == rhs {
                        sols.push((p, q));
                    }
                }
            }
            (order, sols)
        }
        _ => (0, vec![]),
    };
    let confirmed = embeddings && equalizer == 1 && lm_equals_nm && ratio_order > 0 && solutions.is_empty();
    CyclicReport { embeddings, equalizer, lm_equals_nm, ratio_order, solutions, confirmed }
}
