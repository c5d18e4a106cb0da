//! Bounded checks of the hereditary, joint embedding and amalgamation
//! properties.

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;

use super::amalgam::{find_amalgam, search, Coverage, Span};
use super::class::FraisseClass;
use crate::error::{Error, Result};
use crate::structures::{embeddings_up_to_target_aut, find_embedding, FiniteStructure};

/// Outcome of a bounded axiom check.
#[derive(Debug, Clone)]
pub struct AxiomCheck<W> {
    pub holds: bool,
    pub witness: Option<W>,
    /// Cases the search could neither confirm nor refute.
    pub inconclusive: usize,
    pub cases: usize,
}

#[derive(Debug, Clone)]
pub struct HpWitness {
    pub member: Arc<FiniteStructure>,
    pub seed: Vec<usize>,
    pub substructure: Arc<FiniteStructure>,
}

#[derive(Debug, Clone)]
pub struct JepWitness {
    pub first: Arc<FiniteStructure>,
    pub second: Arc<FiniteStructure>,
}

fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange("size bound must be at least 1".into()));
    }
    Ok(())
}

/// Every substructure generated by a non-empty subset of a member of
/// measure at most `n` is a member.
pub fn check_hp(class: &FraisseClass, n: usize) -> Result<AxiomCheck<HpWitness>> {
    require_positive(n)?;
    let mut cases = 0;
    for m in class.members(n).iter() {
        let mut seen = BTreeSet::new();
        for k in 1..=m.len() {
            for seed in (0..m.len()).combinations(k) {
                let closed = m.closure(&seed);
                if !seen.insert(closed.clone()) {
                    continue;
                }
                cases += 1;
                let (sub, _) = m.induced(&closed)?;
                if !class.contains(&sub) {
                    let witness = HpWitness { member: m.clone(), seed, substructure: Arc::new(sub) };
                    return Ok(AxiomCheck { holds: false, witness: Some(witness), inconclusive: 0, cases });
                }
            }
        }
    }
    Ok(AxiomCheck { holds: true, witness: None, inconclusive: 0, cases })
}

/// Every pair of members of measure at most `n` embeds jointly into a
/// member of measure at most `2n`.
pub fn check_jep(class: &FraisseClass, n: usize) -> Result<AxiomCheck<JepWitness>> {
    require_positive(n)?;
    let members = class.members(n);
    let mut cases = 0;
    let mut inconclusive = 0;
    for (i, m1) in members.iter().enumerate() {
        for m2 in members.iter().skip(i) {
            cases += 1;
            let (base, incl1) = m1.induced(&m1.closure(&[]))?;
            let base = Arc::new(base);
            let joint = match find_embedding(&base, m2, &[])? {
                None => (None, Coverage::Exhaustive),
                Some(incl2) => {
                    let span = Span { apex: base, left: m1.clone(), f: incl1, right: m2.clone(), g: incl2 };
                    let mut found = None;
                    let cov = search(class, &span, &mut |d| {
                        if class.measure(&d.structure) <= 2 * n {
                            found = Some(d);
                            false
                        } else {
                            true
                        }
                    })?;
                    (found, cov)
                }
            };
            match joint {
                (Some(_), _) => {}
                (None, Coverage::Bounded) => inconclusive += 1,
                (None, Coverage::Exhaustive) => {
                    let witness = JepWitness { first: m1.clone(), second: m2.clone() };
                    return Ok(AxiomCheck { holds: false, witness: Some(witness), inconclusive, cases });
                }
            }
        }
    }
    Ok(AxiomCheck { holds: true, witness: None, inconclusive, cases })
}

/// Every span `B₁ ← A → B₂` of members of measure at most `n` has an
/// amalgam. Spans are visited by apex, then by left leg, then by right
/// leg, each ordered by measure and canonical label; embeddings are taken
/// up to automorphisms of their targets.
pub fn check_ap(class: &FraisseClass, n: usize) -> Result<AxiomCheck<Span>> {
    require_positive(n)?;
    let members = class.members(n);
    let mut cases = 0;
    let mut inconclusive = 0;
    for a in members.iter() {
        let mut legs: Vec<(Arc<FiniteStructure>, Vec<usize>)> = Vec::new();
        for b in members.iter() {
            for e in embeddings_up_to_target_aut(a, b)? {
                legs.push((b.clone(), e));
            }
        }
        for (i, (b1, f)) in legs.iter().enumerate() {
            for (b2, g) in legs.iter().skip(i) {
                cases += 1;
                let span = Span { apex: a.clone(), left: b1.clone(), f: f.clone(), right: b2.clone(), g: g.clone() };
                match find_amalgam(class, &span)? {
                    (Some(_), _) => {}
                    (None, Coverage::Bounded) => inconclusive += 1,
                    (None, Coverage::Exhaustive) => {
                        return Ok(AxiomCheck { holds: false, witness: Some(span), inconclusive, cases })
                    }
                }
            }
        }
    }
    Ok(AxiomCheck { holds: true, witness: None, inconclusive, cases })
}
