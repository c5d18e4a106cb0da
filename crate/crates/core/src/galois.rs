//! Stabilizer containment for arrows into the limit, decided by splitting
//! amalgams, and the checks built on it.
//!
//! An automorphism of the limit fixing `ā` and moving `b` exists iff two
//! copies of `⟨āb⟩` amalgamate over `⟨ā⟩` with the copies of `b` kept
//! apart. The search is exact for exhaustive amalgam strategies and
//! three-valued otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::autgroup::{automorphisms, double_cosets, orbits, pointwise_stabilizer, PermutationGroup};
use crate::category::FiniteCategory;
use crate::error::{Error, Result};
use crate::fraisse::{search, Amalgam, Chain, Coverage, FraisseClass, Span};
use crate::report::Report;
use crate::structures::{
    embedding_maps, find_embedding, pointed_label, tuple_type, CanonicalLabel, Embedding, FiniteStructure,
};

/// Largest stage built by [`verify_galois_property`].
pub const GALOIS_CARRIER_LIMIT: usize = 16;

/// An arrow `c → Aₙ` into a stage of a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowToLimit {
    pub source: Arc<FiniteStructure>,
    pub stage: usize,
    pub map: Vec<usize>,
}

impl ArrowToLimit {
    pub fn new(chain: &Chain, source: Arc<FiniteStructure>, stage: usize, map: Vec<usize>) -> Result<Self> {
        let target = chain
            .stages
            .get(stage)
            .ok_or_else(|| Error::OutOfRange(format!("stage {stage} of a chain with {}", chain.stages.len())))?;
        Embedding::new(source.clone(), target.structure.clone(), map.clone())?;
        Ok(ArrowToLimit { source, stage, map })
    }

    /// The same arrow composed with the inclusion into stage `to`.
    pub fn push(&self, chain: &Chain, to: usize) -> ArrowToLimit {
        assert!(to >= self.stage, "arrows only push forward");
        let incl = chain.inclusion(self.stage, to);
        ArrowToLimit { source: self.source.clone(), stage: to, map: self.map.iter().map(|&x| incl[x]).collect() }
    }

    pub fn normalized(&self, chain: &Chain) -> ArrowToLimit {
        self.push(chain, chain.stages.len() - 1)
    }

    fn to_json(&self) -> Value {
        json!({
            "source": self.source.canonical_label().digest(),
            "source_size": self.source.len(),
            "stage": self.stage,
            "map": self.map,
        })
    }
}

/// All arrows from members of measure at most `n` into stage `stage`.
pub fn arrows_into(chain: &Chain, n: usize, stage: usize) -> Result<Vec<ArrowToLimit>> {
    let target = &chain.stages[stage].structure;
    let mut out = Vec::new();
    for m in chain.class.members(n).iter() {
        for map in embedding_maps(m, target, &[])? {
            out.push(ArrowToLimit { source: m.clone(), stage, map });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub enum Split {
    /// Two copies of `⟨āb⟩` over `⟨ā⟩` with distinct images of `b`.
    Witness(Amalgam),
    /// No such amalgam exists.
    Never,
    /// The amalgam search was cut short.
    Inconclusive,
}

/// Whether `b` splits over `⟨base⟩`, both taken inside `ambient`.
pub fn splits_over(class: &FraisseClass, ambient: &FiniteStructure, base: &[usize], b: usize) -> Result<Split> {
    if b >= ambient.len() || base.iter().any(|&x| x >= ambient.len()) {
        return Err(Error::OutOfRange(format!("element outside a carrier of {}", ambient.len())));
    }
    let a_set = ambient.closure(base);
    if a_set.contains(&b) {
        return Ok(Split::Never);
    }
    let mut seed = base.to_vec();
    seed.push(b);
    let (bigger, incl) = ambient.induced(&ambient.closure(&seed))?;
    let pos = |x: usize| incl.binary_search(&x).expect("⟨ā⟩ ⊆ ⟨āb⟩");
    let (smaller, a_incl) = ambient.induced(&a_set)?;
    let f: Vec<usize> = a_incl.iter().map(|&x| pos(x)).collect();
    let bigger = Arc::new(bigger);
    let span = Span { apex: Arc::new(smaller), left: bigger.clone(), f: f.clone(), right: bigger, g: f };
    let bb = pos(b);
    let mut found = None;
    let coverage = search(class, &span, &mut |d| {
        if d.left[bb] != d.right[bb] {
            found = Some(d);
            false
        } else {
            true
        }
    })?;
    Ok(match (found, coverage) {
        (Some(d), _) => Split::Witness(d),
        (None, Coverage::Exhaustive) => Split::Never,
        (None, Coverage::Bounded) => Split::Inconclusive,
    })
}

/// Memoized splitting decisions, keyed by the type of `āb`.
pub struct SplitOracle<'a> {
    class: &'a FraisseClass,
    cache: Mutex<BTreeMap<CanonicalLabel, Option<bool>>>,
}

impl<'a> SplitOracle<'a> {
    pub fn new(class: &'a FraisseClass) -> Self {
        SplitOracle { class, cache: Mutex::default() }
    }

    /// `Some(true)` if `b` splits over `⟨base⟩`, `None` if undecided.
    pub fn splits(&self, ambient: &FiniteStructure, base: &[usize], b: usize) -> Result<Option<bool>> {
        let mut t = base.to_vec();
        t.push(b);
        let key = tuple_type(ambient, &t);
        if let Some(&v) = self.cache.lock().expect("oracle lock").get(&key) {
            return Ok(v);
        }
        let v = match splits_over(self.class, ambient, base, b)? {
            Split::Witness(_) => Some(true),
            Split::Never => Some(false),
            Split::Inconclusive => None,
        };
        self.cache.lock().expect("oracle lock").insert(key, v);
        Ok(v)
    }

    /// `I_ξ ⊆ I_χ`: no element of the image of `χ` splits over the image
    /// of `ξ`. Both arrows must live in `ambient`.
    pub fn stabilizer_subset(&self, ambient: &FiniteStructure, xi: &[usize], chi: &[usize]) -> Result<Option<bool>> {
        let mut undecided = false;
        for &y in chi {
            match self.splits(ambient, xi, y)? {
                Some(true) => return Ok(Some(false)),
                Some(false) => {}
                None => undecided = true,
            }
        }
        Ok(if undecided { None } else { Some(true) })
    }
}

/// `I_ξ ⊆ I_χ` for arrows into the chain; `None` when undecided.
pub fn stabilizer_subset(chain: &Chain, xi: &ArrowToLimit, chi: &ArrowToLimit) -> Result<Option<bool>> {
    let (xi, chi) = (xi.normalized(chain), chi.normalized(chain));
    SplitOracle::new(&chain.class).stabilizer_subset(&chain.last().structure, &xi.map, &chi.map)
}

/// Factorization `χ = ξ∘f`, found by scanning all of `Hom(c, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub map: Option<Vec<usize>>,
    pub unique: bool,
}

fn factor_maps(c: &FiniteStructure, d: &FiniteStructure, chi: &[usize], xi: &[usize]) -> Result<Factorization> {
    let hits: Vec<Vec<usize>> = embedding_maps(c, d, &[])?
        .into_iter()
        .filter(|f| f.iter().enumerate().all(|(x, &y)| xi[y] == chi[x]))
        .collect();
    Ok(Factorization { unique: hits.len() == 1, map: hits.into_iter().next() })
}

pub fn factor(chain: &Chain, chi: &ArrowToLimit, xi: &ArrowToLimit) -> Result<Factorization> {
    let (chi, xi) = (chi.normalized(chain), xi.normalized(chain));
    factor_maps(&chi.source, &xi.source, &chi.map, &xi.map)
}

/// Builds up to `rounds` rounds, stopping early once a stage would exceed
/// `limit` elements.
pub fn bounded_chain(class: &FraisseClass, rounds: usize, limit: usize) -> Result<Chain> {
    let mut chain = Chain::new(class)?;
    for _ in 0..rounds {
        match chain.grow(None, Some(limit)) {
            Ok(_) => {}
            Err(Error::Overflow(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(chain)
}

/// Checks `I_ξ ⊆ I_χ ⟺ χ = ξ∘f for a unique f` over every pair of arrows
/// from members of measure at most `size_bound` into the last stage of a
/// chain grown for up to `stage_bound` rounds.
pub fn verify_galois_property(class: &FraisseClass, size_bound: usize, stage_bound: usize) -> Result<Report> {
    let chain = bounded_chain(class, stage_bound, GALOIS_CARRIER_LIMIT)?;
    let last = chain.stages.len() - 1;
    let top = chain.last().structure.clone();
    let arrows = arrows_into(&chain, size_bound, last)?;
    let oracle = SplitOracle::new(class);
    // points of the top stage that split over each ξ, or None if undecided
    let splits: Vec<Vec<Option<bool>>> = arrows
        .par_iter()
        .map(|xi| (0..top.len()).map(|y| oracle.splits(&top, &xi.map, y)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let sources: Vec<Arc<FiniteStructure>> = arrows.iter().map(|a| a.source.clone()).dedup_by(Arc::ptr_eq).collect();
    let source_of = |a: &ArrowToLimit| sources.iter().position(|s| Arc::ptr_eq(s, &a.source)).expect("listed source");
    let homs: Vec<Vec<Vec<Vec<usize>>>> = sources
        .iter()
        .map(|c| sources.iter().map(|d| embedding_maps(c, d, &[])).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<(Option<bool>, Factorization)>> = arrows
        .par_iter()
        .enumerate()
        .map(|(i, xi)| {
            arrows
                .iter()
                .map(|chi| {
                    let mut subset = Some(true);
                    for &y in &chi.map {
                        match splits[i][y] {
                            Some(true) => {
                                subset = Some(false);
                                break;
                            }
                            Some(false) => {}
                            None => subset = None,
                        }
                    }
                    let hits: Vec<&Vec<usize>> = homs[source_of(chi)][source_of(xi)]
                        .iter()
                        .filter(|f| f.iter().enumerate().all(|(x, &y)| xi.map[y] == chi.map[x]))
                        .collect();
                    let fac = Factorization { unique: hits.len() == 1, map: hits.first().map(|f| f.to_vec()) };
                    (subset, fac)
                })
                .collect()
        })
        .collect();
    let mut report = Report::new("galois_correspondence");
    let mut agreements = 0;
    for (i, row) in rows.iter().enumerate() {
        for (j, (subset, fac)) in row.iter().enumerate() {
            report.cases += 1;
            let case = || json!({ "xi": arrows[i].to_json(), "chi": arrows[j].to_json() });
            let factors = fac.map.is_some() && fac.unique;
            match subset {
                None => report.inconclusive.push(case()),
                Some(s) if *s == factors => agreements += 1,
                Some(s) => {
                    let mut v = case();
                    v["stabilizer_subset"] = json!(s);
                    v["factorization"] = json!(fac);
                    report.violations.push(v);
                }
            }
        }
    }
    Ok(report
        .detail("class", class.name())
        .detail("size_bound", size_bound)
        .detail("stage", last)
        .detail("stage_size", top.len())
        .detail("arrows", arrows.len())
        .detail("agreements", agreements))
}

/// Outcome of a strict monomorphism check with all quantifiers bounded.
#[derive(Debug, Clone)]
pub struct StrictMono {
    pub holds: bool,
    /// An arrow `g: e → d` meeting the hypothesis without factoring
    /// uniquely through `f`.
    pub witness: Option<(Arc<FiniteStructure>, Vec<usize>)>,
    pub bounded: bool,
}

/// Whether `f: c → d` is a strict monomorphism among members of measure at
/// most `bound`: every `g: e → d` coequalized by all pairs `h, k: d → z`
/// with `h∘f = k∘f` factors uniquely through `f`.
pub fn strict_mono_bounded(class: &FraisseClass, f: &Embedding, bound: usize) -> Result<StrictMono> {
    let cat = FiniteCategory::from_class(class, bound, &[f.source().clone(), f.target().clone()])?;
    let locate = |s: &FiniteStructure| {
        cat.position(s).ok_or_else(|| Error::OutOfRange("arrow ends must be members within the bound".into()))
    };
    let (c, d) = (locate(f.source())?, locate(f.target())?);
    let index = cat.arrow_index(c, d, f.map()).expect("embeddings between objects are arrows");
    Ok(strict_mono_in(&cat, c, d, index))
}

/// [`strict_mono_bounded`] for arrow `hom(c, d)[f]` of a finite category.
pub fn strict_mono_in(cat: &FiniteCategory, c: usize, d: usize, f: usize) -> StrictMono {
    let fm = &cat.hom(c, d)[f];
    let mut pairs: Vec<(&[usize], &[usize])> = Vec::new();
    for z in 0..cat.len() {
        let homs = cat.hom(d, z);
        for (h, k) in homs.iter().cartesian_product(homs) {
            if fm.iter().all(|&x| h[x] == k[x]) {
                pairs.push((h, k));
            }
        }
    }
    // the identity of d is the most demanding test, so it goes first
    let id: Vec<usize> = (0..cat.object(d).len()).collect();
    let candidates = std::iter::once((d, id.clone()))
        .chain((0..cat.len()).flat_map(|e| cat.hom(e, d).iter().map(move |g| (e, g.clone()))));
    let mut seen = BTreeSet::new();
    for (e, g) in candidates {
        if !seen.insert((e, g.clone())) {
            continue;
        }
        if !pairs.iter().all(|(h, k)| g.iter().all(|&x| h[x] == k[x])) {
            continue;
        }
        let factorizations = cat.hom(e, c).iter().filter(|t| t.iter().map(|&x| fm[x]).eq(g.iter().copied())).count();
        if factorizations != 1 {
            return StrictMono { holds: false, witness: Some((cat.object(e).clone(), g)), bounded: true };
        }
    }
    StrictMono { holds: true, witness: None, bounded: true }
}

/// First arrow of the category that is not a strict monomorphism, as
/// `(c, d, index)`.
pub fn first_non_strict(cat: &FiniteCategory) -> Option<(usize, usize, usize)> {
    (0..cat.len())
        .flat_map(|c| (0..cat.len()).map(move |d| (c, d)))
        .flat_map(|(c, d)| (0..cat.hom(c, d).len()).map(move |f| (c, d, f)))
        .find(|&(c, d, f)| !strict_mono_in(cat, c, d, f).holds)
}

/// Whether some automorphism of the limit carries `e1` to `e2`.
///
/// Both arrows are pushed to the last stage. With one stage the partial
/// isomorphism must extend to an automorphism of it; otherwise every point
/// of the stage where the later arrow lives needs a matching point in the
/// last stage, in both directions.
pub fn conjugate_in_limit(chain: &Chain, e1: &ArrowToLimit, e2: &ArrowToLimit) -> Result<bool> {
    if e1.source != e2.source {
        return Ok(false);
    }
    let (a, b) = (e1.normalized(chain), e2.normalized(chain));
    let top = &chain.last().structure;
    if chain.stages.len() == 1 {
        let fixed: Vec<(usize, usize)> = a.map.iter().copied().zip(b.map.iter().copied()).collect();
        return Ok(find_embedding(top, top, &fixed)?.is_some());
    }
    let s = e1.stage.max(e2.stage).min(chain.stages.len() - 2);
    let points = chain.inclusion(s, chain.stages.len() - 1);
    let extends = |from: &[usize], to: &[usize]| {
        points.iter().all(|&w| {
            let mut t = from.to_vec();
            t.push(w);
            let want = tuple_type(top, &t);
            let mut u = to.to_vec();
            u.push(0);
            (0..top.len()).any(|w2| {
                *u.last_mut().expect("non-empty") = w2;
                tuple_type(top, &u) == want
            })
        })
    };
    Ok(extends(&a.map, &b.map) && extends(&b.map, &a.map))
}

/// Largest measure of a member generated by `k` elements.
fn generated_measure(class: &FraisseClass, k: usize) -> usize {
    match class.signature().functions().is_empty() {
        true => k,
        false if class.signature().sorts()[0] == "B" => 1 << k.min(4),
        false => crate::fraisse::GROUP_CATALOGUE_MAX,
    }
}

/// Members that can be generated by `k` elements.
fn generated_members(class: &FraisseClass, k: usize) -> Arc<Vec<Arc<FiniteStructure>>> {
    class.members(generated_measure(class, k))
}

/// Pointed isomorphism types `(M, ā)` with `M = ⟨ā⟩` and `|ā| = k`, each
/// with its structure.
fn pointed_types(class: &FraisseClass, k: usize) -> BTreeMap<CanonicalLabel, Arc<FiniteStructure>> {
    let mut out = BTreeMap::new();
    for m in generated_members(class, k).iter() {
        for t in (0..k).map(|_| 0..m.len()).multi_cartesian_product().chain((k == 0).then(Vec::new)) {
            if m.closure(&t).len() == m.len() {
                out.entry(pointed_label(m, &t)).or_insert_with(|| m.clone());
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitCorrespondence {
    pub k: usize,
    pub orbit_count: usize,
    pub pointed_classes: usize,
    pub equal: bool,
}

/// Number of conjugacy classes of `k`-tuples realized in `stage`: the
/// pointed types whose structure embeds there.
fn realized_types(types: &BTreeMap<CanonicalLabel, Arc<FiniteStructure>>, stage: &FiniteStructure) -> usize {
    types.values().filter(|m| find_embedding(m, stage, &[]).ok().flatten().is_some()).count()
}

/// Chain used for orbit counting at tuple length `k`. In a relational
/// class extension problems of size `k - 1` already realize every
/// `k`-point type; otherwise the cap is the largest `k`-generated member,
/// and stages past [`GALOIS_CARRIER_LIMIT`] elements overflow.
pub fn orbit_chain(class: &FraisseClass, k: usize, rounds: usize) -> Result<Chain> {
    if class.signature().functions().is_empty() {
        return Chain::build_capped(class, rounds, k.saturating_sub(1).max(1), None);
    }
    Chain::build_capped(class, rounds, generated_measure(class, k).max(1), Some(GALOIS_CARRIER_LIMIT))
}

/// Orbits of the automorphism group on `k`-tuples, counted as realized
/// types in the last stage, against all pointed types of the class.
pub fn orbit_type_correspondence(class: &FraisseClass, k: usize, stage_bound: usize) -> Result<OrbitCorrespondence> {
    let chain = orbit_chain(class, k, stage_bound)?;
    let types = pointed_types(class, k);
    let orbit_count = realized_types(&types, &chain.last().structure);
    Ok(OrbitCorrespondence { k, orbit_count, pointed_classes: types.len(), equal: orbit_count == types.len() })
}

/// Orbit counts for `k = 1..=k_max` at stages `stage_bound` and
/// `stage_bound + 1`; the counts must agree with the pointed types and
/// with each other. Classes with a largest object also get a double coset
/// cross-check on its automorphism group.
pub fn coherence_check(class: &FraisseClass, k_max: usize, stage_bound: usize) -> Result<Report> {
    let chain = orbit_chain(class, k_max, stage_bound + 1)?;
    let (s, t) = (&chain.stages[stage_bound].structure, &chain.stages[stage_bound + 1].structure);
    let mut report = Report::new("coherence");
    let (mut at_s, mut at_t, mut types_n) = (vec![], vec![], vec![]);
    for k in 1..=k_max {
        let types = pointed_types(class, k);
        let (a, b) = (realized_types(&types, s), realized_types(&types, t));
        report.cases += 1;
        if a != b || b != types.len() {
            report.violations.push(json!({ "k": k, "stage": a, "next_stage": b, "pointed_classes": types.len() }));
        }
        at_s.push(a);
        at_t.push(b);
        types_n.push(types.len());
    }
    let mut report = report
        .detail("class", class.name())
        .detail("orbit_counts", &at_t)
        .detail("previous_stage_counts", &at_s)
        .detail("pointed_classes", &types_n)
        .detail("stable", at_s == at_t)
        .detail("stages", [stage_bound, stage_bound + 1])
        .detail("stage_sizes", [s.len(), t.len()]);
    if let Some(top) = discrete_reduction_class(class)? {
        let g = Arc::new(automorphisms(&top));
        report = report.detail("aut_order", g.order());
        let mut checked = 0;
        for k in 1..=k_max {
            for orbit in orbits(&g, k) {
                let (dc, oc) = double_coset_cross_check(&g, &orbit.representative)?;
                checked += 1;
                if dc != oc {
                    report.violations.push(json!({ "tuple": orbit.representative, "double_cosets": dc, "orbits": oc }));
                }
            }
        }
        report = report.detail("double_coset_checks", checked);
    }
    Ok(report)
}

/// `|H\G/H|` and the number of `H`-orbits on `G·ā`, for `H` the stabilizer
/// of `ā`.
pub fn double_coset_cross_check(g: &Arc<PermutationGroup>, tuple: &[usize]) -> Result<(usize, usize)> {
    let h = pointwise_stabilizer(g, tuple)?;
    let orbit: BTreeSet<Vec<usize>> = (0..g.order()).map(|x| tuple.iter().map(|&p| g.apply(x, p)).collect()).collect();
    let mut seen = BTreeSet::new();
    let mut count = 0;
    for t in &orbit {
        if seen.contains(t) {
            continue;
        }
        count += 1;
        for &x in h.elements() {
            seen.insert(t.iter().map(|&p| g.apply(x, p)).collect::<Vec<_>>());
        }
    }
    Ok((double_cosets(g, &h).count, count))
}

/// Arrows from non-empty members of measure at most `size_bound` into the
/// last stage none of whose image points split over the empty
/// substructure. This is a necessary condition only.
pub fn galois_objects(chain: &Chain, size_bound: usize) -> Result<Vec<ArrowToLimit>> {
    let last = chain.stages.len() - 1;
    let top = &chain.last().structure;
    let oracle = SplitOracle::new(&chain.class);
    let mut out = Vec::new();
    for arrow in arrows_into(chain, size_bound, last)? {
        if arrow.source.is_empty() {
            continue;
        }
        let mut fixed = true;
        for &y in &arrow.map {
            if oracle.splits(top, &[], y)? != Some(false) {
                fixed = false;
                break;
            }
        }
        if fixed {
            out.push(arrow);
        }
    }
    Ok(out)
}

/// Whether `f ∈ hom(c, u)` is a Galois object over `u`: each automorphism
/// `z` of `u` has exactly one automorphism `s` of `c` with `z∘f = f∘s`.
pub fn is_galois_discrete(cat: &FiniteCategory, c: usize, u: usize, f: usize) -> bool {
    let fm = &cat.hom(c, u)[f];
    let auts_c: Vec<&Vec<usize>> = cat.hom(c, c).iter().collect();
    cat.hom(u, u)
        .iter()
        .all(|z| auts_c.iter().filter(|s| fm.iter().enumerate().all(|(x, &y)| z[y] == fm[s[x]])).count() == 1)
}

/// An object `c` all of whose outgoing arrows are isomorphisms and which
/// receives an arrow from every object.
pub fn discrete_reduction(cat: &FiniteCategory) -> Option<usize> {
    (0..cat.len()).find(|&c| {
        (0..cat.len()).all(|e| {
            let out_isos = cat.hom(c, e).is_empty() || cat.object(e).len() == cat.object(c).len();
            out_isos && !cat.hom(e, c).is_empty()
        })
    })
}

/// [`discrete_reduction`] for a class with a size cap; classes without one
/// have no largest object.
pub fn discrete_reduction_class(class: &FraisseClass) -> Result<Option<Arc<FiniteStructure>>> {
    let Some(cap) = class.size_cap() else { return Ok(None) };
    let cat = FiniteCategory::from_class(class, cap, &[])?;
    Ok(discrete_reduction(&cat).map(|c| cat.object(c).clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::builders::{boolean_algebra, cyclic_group, direct_product, graph, pure_set};

    fn arrow(chain: &Chain, src: FiniteStructure, map: Vec<usize>) -> ArrowToLimit {
        ArrowToLimit::new(chain, Arc::new(src), chain.stages.len() - 1, map).unwrap()
    }

    #[test]
    fn splitting_in_graphs() {
        let g = FraisseClass::graphs();
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        match splits_over(&g, &tri, &[0, 1], 2).unwrap() {
            Split::Witness(d) => assert!(!d.structure.holds(0, &[d.left[2], d.right[2]])),
            other => panic!("expected a witness, got {other:?}"),
        }
        assert!(matches!(splits_over(&g, &tri, &[0, 1], 1).unwrap(), Split::Never));
    }

    #[test]
    fn complement_lies_in_the_generated_subalgebra() {
        let b = FraisseClass::boolean_algebras();
        let b2 = boolean_algebra(2);
        // element 1 is the first atom, 2 its complement
        assert!(matches!(splits_over(&b, &b2, &[1], 2).unwrap(), Split::Never));
    }

    #[test]
    fn stabilizers_and_factorizations_in_a_graph_stage() {
        let chain = Chain::build(&FraisseClass::graphs(), 2, None, None).unwrap();
        let top = &chain.last().structure;
        let (a, b) = edges_of(top)[0];
        let c = (0..top.len()).find(|&x| x != a && x != b).unwrap();
        let edge = arrow(&chain, graph(2, &[(0, 1)]), vec![a, b]);
        let vertex = arrow(&chain, graph(1, &[]), vec![a]);
        let other = arrow(&chain, graph(1, &[]), vec![c]);
        assert_eq!(stabilizer_subset(&chain, &edge, &vertex).unwrap(), Some(true));
        assert_eq!(stabilizer_subset(&chain, &edge, &other).unwrap(), Some(false));
        let fac = factor(&chain, &vertex, &edge).unwrap();
        assert_eq!(fac, Factorization { map: Some(vec![0]), unique: true });
        let own = factor(&chain, &vertex, &vertex).unwrap();
        assert_eq!(own, Factorization { map: Some(vec![0]), unique: true });
        assert_eq!(factor(&chain, &other, &edge).unwrap().map, None);
    }

    fn edges_of(g: &FiniteStructure) -> Vec<(usize, usize)> {
        crate::structures::builders::edges(g)
    }

    #[test]
    fn complement_is_fixed_with_its_atom() {
        let chain = Chain::build(&FraisseClass::boolean_algebras(), 1, None, None).unwrap();
        let top = &chain.last().structure;
        let (bot, top_el) = (top.constants()[0], top.constants()[1]);
        let x = (0..top.len()).find(|&e| e != bot && e != top_el).unwrap();
        let not_x = top.apply(2, &[x]);
        let oracle = SplitOracle::new(&chain.class);
        assert_eq!(oracle.stabilizer_subset(top, &[x], &[not_x]).unwrap(), Some(true));
    }

    #[test]
    fn galois_property_on_small_graphs() {
        let r = verify_galois_property(&FraisseClass::graphs(), 2, 2).unwrap();
        assert!(r.cases > 0);
        assert!(r.violations.is_empty(), "{}", r.to_text());
    }

    #[test]
    fn strict_monos() {
        let sets = FraisseClass::sets();
        let f = Embedding::new(Arc::new(pure_set(1)), Arc::new(pure_set(2)), vec![0]).unwrap();
        assert!(strict_mono_bounded(&sets, &f, 5).unwrap().holds);
        let small = sets.truncated(3);
        let f = Embedding::new(Arc::new(pure_set(2)), Arc::new(pure_set(3)), vec![0, 1]).unwrap();
        let r = strict_mono_bounded(&small, &f, 3).unwrap();
        assert!(!r.holds);
        let (e, g) = r.witness.unwrap();
        assert_eq!((e.len(), g), (3, vec![0, 1, 2]));
        let groups = FraisseClass::groups_small();
        let z4 = cyclic_group(4);
        let f = Embedding::new(Arc::new(cyclic_group(2)), Arc::new(z4), vec![0, 2]).unwrap();
        assert!(strict_mono_bounded(&groups, &f, 8).unwrap().holds);
    }

    #[test]
    fn vertices_are_conjugate_in_a_graph_chain() {
        let chain = Chain::build(&FraisseClass::graphs(), 3, None, None).unwrap();
        let v = |x| ArrowToLimit::new(&chain, Arc::new(graph(1, &[])), 1, vec![x]).unwrap();
        assert!(conjugate_in_limit(&chain, &v(0), &v(0)).unwrap());
        let a2 = &chain.stages[2].structure;
        let (a, b) = edges_of(a2)[0];
        let e1 = ArrowToLimit::new(&chain, Arc::new(graph(2, &[(0, 1)])), 2, vec![a, b]).unwrap();
        let e2 = ArrowToLimit::new(&chain, Arc::new(graph(2, &[(0, 1)])), 2, vec![b, a]).unwrap();
        assert!(conjugate_in_limit(&chain, &e1, &e2).unwrap());
    }

    #[test]
    fn orbit_counts_match_small_oracles() {
        for (class, k, want) in
            [(FraisseClass::sets(), 2, 2), (FraisseClass::graphs(), 2, 3), (FraisseClass::linear_orders(), 2, 3)]
        {
            let r = orbit_type_correspondence(&class, k, 3).unwrap();
            assert_eq!((r.orbit_count, r.pointed_classes), (want, want), "{}", class.name());
        }
    }

    #[test]
    fn random_graph_has_no_galois_objects() {
        let chain = Chain::build(&FraisseClass::graphs(), 2, None, None).unwrap();
        assert!(galois_objects(&chain, 2).unwrap().is_empty());
    }

    #[test]
    fn discrete_galois_objects_in_v4() {
        let v4 = direct_product(&cyclic_group(2), &cyclic_group(2));
        let cat =
            FiniteCategory::new(vec![Arc::new(cyclic_group(1)), Arc::new(cyclic_group(2)), Arc::new(v4)]).unwrap();
        assert!(is_galois_discrete(&cat, 2, 2, cat.identity(2)));
        assert!((0..3).all(|f| !is_galois_discrete(&cat, 1, 2, f)));
        assert_eq!(discrete_reduction(&cat), Some(2));
    }

    #[test]
    fn discrete_reductions_of_set_classes() {
        let top = discrete_reduction_class(&FraisseClass::sets().truncated(4)).unwrap().unwrap();
        assert_eq!(top.len(), 4);
        assert!(discrete_reduction_class(&FraisseClass::sets()).unwrap().is_none());
    }

    #[test]
    fn double_cosets_count_orbits_on_the_orbit() {
        let g = Arc::new(automorphisms(&pure_set(4)));
        for t in [vec![], vec![0], vec![0, 1], vec![0, 1, 2]] {
            let (dc, oc) = double_coset_cross_check(&g, &t).unwrap();
            assert_eq!(dc, oc);
        }
    }
}
