//! Staged approximations `A₀ ⊆ A₁ ⊆ …` of the limit of a class.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use itertools::Itertools;
use serde::Serialize;
use serde_json::{json, Value};

use super::amalgam::{amalgamate_one, Span};
use super::class::{Extension, FraisseClass};
use crate::error::{Error, Result};
use crate::structures::json::structure_to_json;
use crate::structures::{canonical_labeling, find_embedding, tuple_type, CanonicalLabel, FiniteStructure};

/// Default number of extension rounds.
pub const DEFAULT_ROUNDS: usize = 3;

/// One extension problem `S ⊆ T` handled while building a stage.
#[derive(Debug, Clone, Serialize)]
pub struct ExtensionRecord {
    /// Carrier of `S` inside the previous stage.
    pub base: Vec<usize>,
    /// Digest of the extension's pointed label.
    pub extension: String,
    /// Embedding of `T` into the new stage.
    pub witness: Vec<usize>,
    /// Whether new elements had to be added.
    pub added: bool,
}

#[derive(Debug, Clone)]
pub struct LimitStage {
    pub class_name: String,
    pub index: usize,
    pub structure: Arc<FiniteStructure>,
    /// Inclusion of the previous stage, absent at index 0.
    pub inclusion: Option<Vec<usize>>,
    pub extension_log: Vec<ExtensionRecord>,
}

impl LimitStage {
    pub fn to_json(&self) -> Value {
        json!({
            "class": self.class_name,
            "index": self.index,
            "size": self.structure.len(),
            "inclusion": self.inclusion,
            "realized": self.extension_log.len(),
            "added": self.extension_log.iter().filter(|r| r.added).count(),
            "structure": structure_to_json(&self.structure),
        })
    }
}

/// An increasing chain of stages of one class.
#[derive(Debug, Clone)]
pub struct Chain {
    pub class: FraisseClass,
    pub stages: Vec<LimitStage>,
}

impl Chain {
    /// Chain holding only `A₀`, the least member of least measure.
    pub fn new(class: &FraisseClass) -> Result<Self> {
        let first = (0..=16)
            .find_map(|n| class.members(n).first().cloned())
            .ok_or_else(|| Error::ClassMismatch(format!("`{}` has no small members", class.name())))?;
        let stage = LimitStage {
            class_name: class.name().into(),
            index: 0,
            structure: first,
            inclusion: None,
            extension_log: vec![],
        };
        Ok(Chain { class: class.clone(), stages: vec![stage] })
    }

    /// Single-stage chain on a given member.
    pub fn from_structure(class: &FraisseClass, s: FiniteStructure) -> Result<Self> {
        if !class.contains(&s) {
            return Err(Error::ClassMismatch(format!("structure is not a member of `{}`", class.name())));
        }
        let stage = LimitStage {
            class_name: class.name().into(),
            index: 0,
            structure: Arc::new(s),
            inclusion: None,
            extension_log: vec![],
        };
        Ok(Chain { class: class.clone(), stages: vec![stage] })
    }

    /// Runs `rounds` rounds; `bound` fixes the problem size, otherwise
    /// round `i` uses `i + 1`.
    pub fn build(
        class: &FraisseClass,
        rounds: usize,
        bound: Option<usize>,
        carrier_limit: Option<usize>,
    ) -> Result<Self> {
        let mut chain = Chain::new(class)?;
        for _ in 0..rounds {
            chain.grow(bound, carrier_limit)?;
        }
        Ok(chain)
    }

    /// Like [`Chain::build`] with the default schedule, but no round uses a
    /// bound above `cap`.
    pub fn build_capped(class: &FraisseClass, rounds: usize, cap: usize, carrier_limit: Option<usize>) -> Result<Self> {
        let mut chain = Chain::new(class)?;
        for r in 0..rounds {
            chain.grow(Some((r + 1).min(cap)), carrier_limit)?;
        }
        Ok(chain)
    }

    pub fn grow(&mut self, bound: Option<usize>, carrier_limit: Option<usize>) -> Result<&LimitStage> {
        let last = self.last();
        let b = bound.unwrap_or(last.index + 1);
        let next = extend_stage(&self.class, last, b, carrier_limit)?;
        self.stages.push(next);
        Ok(self.last())
    }

    pub fn last(&self) -> &LimitStage {
        self.stages.last().expect("chains are non-empty")
    }

    /// Composite inclusion `A_i → A_j` for `i ≤ j`.
    pub fn inclusion(&self, i: usize, j: usize) -> Vec<usize> {
        let mut map: Vec<usize> = (0..self.stages[i].structure.len()).collect();
        for stage in &self.stages[i + 1..=j] {
            let incl = stage.inclusion.as_ref().expect("later stages have inclusions");
            map = map.iter().map(|&x| incl[x]).collect();
        }
        map
    }

    pub fn to_json(&self) -> Value {
        json!({
            "class": self.class.name(),
            "stages": self.stages.iter().map(LimitStage::to_json).collect::<Vec<_>>(),
        })
    }
}

struct Problem {
    label: CanonicalLabel,
    subset: Vec<usize>,
    /// `S` as a canonical copy; `to_canon[i]` is the canonical index of
    /// `subset[i]`.
    to_canon: Vec<usize>,
}

/// Extension problems of `a`: generated substructures of measure at most
/// `bound`, in (label, carrier) order.
fn problems(class: &FraisseClass, a: &FiniteStructure, bound: usize) -> Result<Vec<Problem>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for k in 0..=bound.min(a.len()) {
        for seed in (0..a.len()).combinations(k) {
            let closed = a.closure(&seed);
            if !seen.insert(closed.clone()) {
                continue;
            }
            let (sub, incl) = a.induced(&closed)?;
            if class.measure(&sub) > bound {
                continue;
            }
            let (label, perm) = canonical_labeling(&sub, &[]);
            out.push(Problem { label, subset: incl, to_canon: perm });
        }
    }
    out.sort_by(|p, q| (&p.label, &p.subset).cmp(&(&q.label, &q.subset)));
    Ok(out)
}

/// Builds `A_{n+1}` from `A_n`: every one-point extension of every problem
/// substructure gets an embedding over it, added by amalgamation when the
/// growing stage does not realize it yet.
pub fn extend_stage(
    class: &FraisseClass,
    stage: &LimitStage,
    bound: usize,
    carrier_limit: Option<usize>,
) -> Result<LimitStage> {
    let a = &stage.structure;
    let mut w = a.clone();
    let mut incl: Vec<usize> = (0..a.len()).collect();
    let mut memo: BTreeMap<CanonicalLabel, (Arc<FiniteStructure>, Vec<Extension>)> = BTreeMap::new();
    let mut log = Vec::new();
    for p in problems(class, a, bound)? {
        let (canon, exts) = memo.entry(p.label.clone()).or_insert_with(|| {
            let (sub, _) = a.induced(&p.subset.iter().copied().collect()).expect("closed subset");
            let (_, perm) = canonical_labeling(&sub, &[]);
            let canon = Arc::new(sub.relabel(&perm));
            let exts = class.one_point_extensions(&canon);
            (canon, exts)
        });
        let canon = canon.clone();
        // position in W of each canonical element of S
        let mut in_w = vec![0; canon.len()];
        for (i, &c) in p.to_canon.iter().enumerate() {
            in_w[c] = incl[p.subset[i]];
        }
        for ext in exts.iter() {
            let fixed: Vec<(usize, usize)> = ext.embedding.iter().zip(&in_w).map(|(&t, &x)| (t, x)).collect();
            let (witness, added) = match find_embedding(&ext.structure, &w, &fixed)? {
                Some(m) => (m, false),
                None => {
                    let span = Span {
                        apex: canon.clone(),
                        left: w.clone(),
                        f: in_w.clone(),
                        right: ext.structure.clone(),
                        g: ext.embedding.clone(),
                    };
                    let d = amalgamate_one(class, &span)?;
                    if let Some(limit) = carrier_limit {
                        if d.structure.len() > limit {
                            return Err(Error::Overflow(format!(
                                "stage {} of `{}` exceeds {limit} elements",
                                stage.index + 1,
                                class.name()
                            )));
                        }
                    }
                    incl = incl.iter().map(|&x| d.left[x]).collect();
                    in_w = in_w.iter().map(|&x| d.left[x]).collect();
                    w = d.structure;
                    (d.right, true)
                }
            };
            log.push(ExtensionRecord { base: p.subset.clone(), extension: ext.label.digest(), witness, added });
        }
    }
    Ok(LimitStage {
        class_name: class.name().into(),
        index: stage.index + 1,
        structure: w,
        inclusion: Some(incl),
        extension_log: log,
    })
}

/// Every member of measure at most `k` embeds into the chain.
pub fn is_universal_upto(chain: &Chain, k: usize) -> bool {
    let top = &chain.last().structure;
    chain.class.members(k).iter().all(|m| find_embedding(m, top, &[]).ok().flatten().is_some())
}

/// A partial isomorphism `ā ↦ b̄` that could not be extended by `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomogeneityWitness {
    pub stage: usize,
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    /// The point with no image, if the failure is a forth step.
    pub point: Option<usize>,
}

fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=k.min(n)).flat_map(move |len| (0..n).permutations(len))
}

/// Back-and-forth criterion at tuple length `k`.
///
/// A one-stage chain passes iff every type-preserving map between tuples
/// of length at most `k` extends to an automorphism. A longer chain passes
/// iff for each earlier stage `A_i`, tuples `ā, b̄` of equal type and
/// `c ∈ A_i`, some `d` in the last stage gives `āc` and `b̄d` equal types.
pub fn is_ultrahomogeneous_upto(chain: &Chain, k: usize) -> (bool, Option<HomogeneityWitness>) {
    if chain.stages.len() == 1 {
        let s = &chain.stages[0].structure;
        let by_type = tuples_by_type(s, k);
        for group in by_type.values() {
            for from in group {
                for to in group {
                    let fixed: Vec<(usize, usize)> = from.iter().copied().zip(to.iter().copied()).collect();
                    if find_embedding(s, s, &fixed).ok().flatten().is_none() {
                        let w = HomogeneityWitness { stage: 0, from: from.clone(), to: to.clone(), point: None };
                        return (false, Some(w));
                    }
                }
            }
        }
        return (true, None);
    }
    let last = chain.stages.len() - 1;
    let top = &chain.last().structure;
    for i in 0..last {
        let s = &chain.stages[i].structure;
        let up = chain.inclusion(i, last);
        for group in tuples_by_type(s, k).values() {
            for from in group {
                for c in 0..s.len() {
                    let mut ac: Vec<usize> = from.iter().map(|&x| up[x]).collect();
                    ac.push(up[c]);
                    let want = tuple_type(top, &ac);
                    for to in group {
                        let mut bd: Vec<usize> = to.iter().map(|&x| up[x]).collect();
                        bd.push(0);
                        let found = (0..top.len()).any(|d| {
                            *bd.last_mut().expect("non-empty") = d;
                            tuple_type(top, &bd) == want
                        });
                        if !found {
                            let w = HomogeneityWitness { stage: i, from: from.clone(), to: to.clone(), point: Some(c) };
                            return (false, Some(w));
                        }
                    }
                }
            }
        }
    }
    (true, None)
}

fn tuples_by_type(s: &FiniteStructure, k: usize) -> BTreeMap<CanonicalLabel, Vec<Vec<usize>>> {
    let mut by_type: BTreeMap<CanonicalLabel, Vec<Vec<usize>>> = BTreeMap::new();
    for t in tuples(s.len(), k) {
        by_type.entry(tuple_type(s, &t)).or_default().push(t);
    }
    by_type
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::builders::{edges, graph};
    use crate::structures::embeds;

    fn cycle(n: usize) -> FiniteStructure {
        let e: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        graph(n, &e)
    }

    #[test]
    fn first_graph_stages() {
        let g = FraisseClass::graphs();
        let mut chain = Chain::new(&g).unwrap();
        assert_eq!(chain.last().structure.len(), 0);
        chain.grow(Some(1), None).unwrap();
        assert_eq!(chain.last().structure.len(), 1);
        chain.grow(Some(2), None).unwrap();
        let a2 = &chain.last().structure;
        let (v, rest) = (chain.inclusion(1, 2)[0], (0..a2.len()).filter(|&x| x != chain.inclusion(1, 2)[0]));
        let adj: BTreeSet<bool> = rest.map(|x| a2.holds(0, &[v, x])).collect();
        assert_eq!(adj, [false, true].into_iter().collect());
    }

    #[test]
    fn sets_grow_by_one_when_bound_allows() {
        let s = FraisseClass::sets();
        let chain = Chain::build(&s, 3, None, None).unwrap();
        let sizes: Vec<usize> = chain.stages.iter().map(|st| st.structure.len()).collect();
        assert_eq!(sizes, vec![0, 1, 2, 3]);
    }

    #[test]
    fn inclusions_are_embeddings_and_stages_are_members() {
        for (class, rounds) in
            [(FraisseClass::graphs(), 3), (FraisseClass::linear_orders(), 3), (FraisseClass::boolean_algebras(), 2)]
        {
            let chain = Chain::build(&class, rounds, None, None).unwrap();
            for (i, st) in chain.stages.iter().enumerate() {
                assert!(class.contains(&st.structure));
                if i > 0 {
                    let prev = &chain.stages[i - 1].structure;
                    let incl = st.inclusion.clone().unwrap();
                    crate::structures::Embedding::new(prev.clone(), st.structure.clone(), incl).unwrap();
                }
            }
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let a = Chain::build(&FraisseClass::graphs(), 3, Some(3), None).unwrap();
        let b = Chain::build(&FraisseClass::graphs(), 3, Some(3), None).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn graph_chain_is_universal_and_homogeneous() {
        let chain = Chain::build(&FraisseClass::graphs(), 3, Some(3), None).unwrap();
        assert!(is_universal_upto(&chain, 3));
        assert!(is_universal_upto(&chain, 0));
        assert!(is_ultrahomogeneous_upto(&chain, 2).0);
        // independent check: every graph on three vertices occurs
        for e in 0..8u32 {
            let es: Vec<(usize, usize)> = [(0, 1), (0, 2), (1, 2)]
                .into_iter()
                .enumerate()
                .filter(|(i, _)| e >> i & 1 == 1)
                .map(|(_, p)| p)
                .collect();
            assert!(embeds(&graph(3, &es), &chain.last().structure));
        }
    }

    #[test]
    fn five_cycle_is_two_homogeneous() {
        let chain = Chain::from_structure(&FraisseClass::graphs(), cycle(5)).unwrap();
        assert!(is_ultrahomogeneous_upto(&chain, 2).0);
    }

    #[test]
    fn path_is_not_one_homogeneous() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let chain = Chain::from_structure(&FraisseClass::graphs(), p3.clone()).unwrap();
        let (ok, w) = is_ultrahomogeneous_upto(&chain, 1);
        assert!(!ok);
        let w = w.unwrap();
        let degree = |x: usize| edges(&p3).iter().filter(|&&(a, b)| a == x || b == x).count();
        assert_eq!(w.from.len(), 1);
        assert_ne!(degree(w.from[0]), degree(w.to[0]));
    }

    #[test]
    fn truncated_class_has_no_members_beyond_its_cap() {
        let g2 = FraisseClass::graphs().truncated(2);
        let chain = Chain::build(&g2, 1, None, None).unwrap();
        assert!(is_universal_upto(&chain, 1));
        assert!(!is_universal_upto(&chain, 2));
        assert_eq!(is_universal_upto(&chain, 3), is_universal_upto(&chain, 2));
        // a vertex has an adjacent and a non-adjacent extension, which need three vertices together
        assert!(Chain::build(&g2, 2, None, None).is_err());
    }

    #[test]
    fn forest_chain_eventually_needs_a_missing_amalgam() {
        let err = Chain::build(&FraisseClass::forests(), 5, Some(3), None).unwrap_err();
        assert!(matches!(err, Error::AmalgamFailure(_) | Error::Overflow(_)), "{err}");
    }
}
