//! Amalgam search for spans `B₁ ←f– A –g→ B₂`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use itertools::Itertools;
use serde::Serialize;

use super::class::{is_group, AmalgamStrategy, FraisseClass, Kind};
use crate::error::{Error, Result};
use crate::structures::builders::{atoms, boolean_algebra, group_from_table, linear_order};
use crate::structures::json::structure_to_json;
use crate::structures::{embedding_maps, pointed_label, CanonicalLabel, Embedding, FiniteStructure};

/// A completed square: `left: B₁ → D`, `right: B₂ → D` with
/// `left∘f = right∘g`.
#[derive(Debug, Clone)]
pub struct Amalgam {
    pub structure: Arc<FiniteStructure>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Amalgam {
    /// Label of `D` pointed by the images of `B₁` then `B₂`; equal for two
    /// amalgams iff they are isomorphic over the span.
    pub fn label(&self) -> CanonicalLabel {
        let points: Vec<usize> = self.left.iter().chain(&self.right).copied().collect();
        pointed_label(&self.structure, &points)
    }
}

/// A span of embeddings with a common source.
#[derive(Debug, Clone)]
pub struct Span {
    pub apex: Arc<FiniteStructure>,
    pub left: Arc<FiniteStructure>,
    pub f: Vec<usize>,
    pub right: Arc<FiniteStructure>,
    pub g: Vec<usize>,
}

impl Span {
    pub fn new(f: &Embedding, g: &Embedding) -> Result<Self> {
        if f.source().as_ref() != g.source().as_ref() {
            return Err(Error::Composition("span legs must share their source".into()));
        }
        Ok(Span {
            apex: f.source().clone(),
            left: f.target().clone(),
            f: f.map().to_vec(),
            right: g.target().clone(),
            g: g.map().to_vec(),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "apex": structure_to_json(&self.apex),
            "left": structure_to_json(&self.left),
            "f": self.f,
            "right": structure_to_json(&self.right),
            "g": self.g,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coverage {
    /// Every amalgam up to isomorphism over the span was visited.
    Exhaustive,
    /// A size bound cut the search short.
    Bounded,
}

/// Result of [`amalgamate`].
#[derive(Debug, Clone)]
pub struct AmalgamSet {
    pub amalgams: Vec<Amalgam>,
    pub coverage: Coverage,
}

fn check_span(class: &FraisseClass, span: &Span) -> Result<()> {
    for (what, s) in [("apex", &span.apex), ("left", &span.left), ("right", &span.right)] {
        if !class.contains(s) {
            return Err(Error::ClassMismatch(format!("{what} of the span is not a member of `{}`", class.name())));
        }
    }
    Ok(())
}

/// All amalgams of the span in the class, up to isomorphism over the span,
/// ordered by their pointed labels.
pub fn amalgamate(class: &FraisseClass, f: &Embedding, g: &Embedding) -> Result<AmalgamSet> {
    amalgamate_span(class, &Span::new(f, g)?)
}

pub fn amalgamate_span(class: &FraisseClass, span: &Span) -> Result<AmalgamSet> {
    check_span(class, span)?;
    let mut found: BTreeMap<CanonicalLabel, Amalgam> = BTreeMap::new();
    let coverage = search(class, span, &mut |d| {
        found.entry(d.label()).or_insert(d);
        true
    })?;
    Ok(AmalgamSet { amalgams: found.into_values().collect(), coverage })
}

/// First amalgam found, if any; `Bounded` coverage with `None` means the
/// search was inconclusive.
pub fn find_amalgam(class: &FraisseClass, span: &Span) -> Result<(Option<Amalgam>, Coverage)> {
    check_span(class, span)?;
    let mut first = None;
    let coverage = search(class, span, &mut |d| {
        first = Some(d);
        false
    })?;
    Ok((first, coverage))
}

/// Visits amalgams until `visit` returns `false`.
pub(crate) fn search(class: &FraisseClass, span: &Span, visit: &mut dyn FnMut(Amalgam) -> bool) -> Result<Coverage> {
    let mut filtered = |d: Amalgam| if class.contains(&d.structure) { visit(d) } else { true };
    match class.strategy() {
        AmalgamStrategy::FreeCompletion => free_completion(span, &mut filtered).map(|_| Coverage::Exhaustive),
        AmalgamStrategy::Shuffle => {
            shuffle(span, &mut filtered);
            Ok(Coverage::Exhaustive)
        }
        AmalgamStrategy::Atoms => atom_products(span, &mut filtered).map(|_| Coverage::Exhaustive),
        AmalgamStrategy::Identification { bound } => {
            let bound = bound.unwrap_or(span.left.len() * span.right.len());
            identification(class, span, bound, &mut filtered)
        }
    }
}

/// A single deterministic amalgam, preferring the smallest natural one:
/// no extra tuples, new points leftmost in their gap, minimal atom
/// splitting, or the permutation product.
pub fn amalgamate_one(class: &FraisseClass, span: &Span) -> Result<Amalgam> {
    let preferred = match class.strategy() {
        AmalgamStrategy::FreeCompletion => Some(disjoint_free(span)),
        AmalgamStrategy::Shuffle => first_shuffle(span),
        AmalgamStrategy::Atoms => Some(staircase(span)),
        AmalgamStrategy::Identification { bound } => {
            let bound = bound.unwrap_or(span.left.len() * span.right.len());
            permutation_product(span, bound.max(span.left.len() * span.right.len()))
        }
    };
    if let Some(d) = preferred {
        if class.contains(&d.structure) {
            return Ok(d);
        }
    }
    match find_amalgam(class, span)? {
        (Some(d), _) => Ok(d),
        (None, _) => Err(Error::AmalgamFailure(format!(
            "no amalgam in `{}` for a span over {} elements into {} and {}; span: {}",
            class.name(),
            span.apex.len(),
            span.left.len(),
            span.right.len(),
            span.to_json()
        ))),
    }
}

struct Layout {
    sizes: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
    len: usize,
}

/// Places `B₁` and the unmatched new elements of `B₂` into a sort-grouped
/// carrier. `matching[j]` is the `B₁` element identified with new element
/// `new2[j]`, if any.
fn layout(span: &Span, new2: &[usize], matching: &[Option<usize>]) -> Layout {
    let (b1, b2) = (&span.left, &span.right);
    let sorts = b1.sort_sizes().len();
    // items: B₁ elements then unmatched B₂ elements, each tagged with its sort
    let mut items: Vec<(usize, bool, usize)> = (0..b1.len()).map(|x| (b1.sort_of(x), false, x)).collect();
    for (j, &y) in new2.iter().enumerate() {
        if matching[j].is_none() {
            items.push((b2.sort_of(y), true, y));
        }
    }
    items.sort();
    let mut sizes = vec![0; sorts];
    let mut left = vec![usize::MAX; b1.len()];
    let mut right = vec![usize::MAX; b2.len()];
    for (d, &(s, from_right, x)) in items.iter().enumerate() {
        sizes[s] += 1;
        if from_right {
            right[x] = d;
        } else {
            left[x] = d;
        }
    }
    for (&x1, &x2) in span.f.iter().zip(&span.g) {
        right[x2] = left[x1];
    }
    for (j, &y) in new2.iter().enumerate() {
        if let Some(x) = matching[j] {
            right[y] = left[x];
        }
    }
    Layout { sizes, left, right, len: items.len() }
}

fn new_elements(b: &FiniteStructure, image: &[usize]) -> Vec<usize> {
    let img: BTreeSet<usize> = image.iter().copied().collect();
    (0..b.len()).filter(|x| !img.contains(x)).collect()
}

/// Relations forced by the two sides, or `None` if they disagree.
fn forced_relations(span: &Span, lay: &Layout) -> Option<Vec<BTreeSet<Vec<usize>>>> {
    let (b1, b2) = (&span.left, &span.right);
    let mut inv_left = vec![usize::MAX; lay.len];
    let mut inv_right = vec![usize::MAX; lay.len];
    for (x, &d) in lay.left.iter().enumerate() {
        inv_left[d] = x;
    }
    for (y, &d) in lay.right.iter().enumerate() {
        inv_right[d] = y;
    }
    let mut rels = Vec::new();
    for r in 0..b1.signature().relations().len() {
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        for t in b1.relation(r) {
            let dt: Vec<usize> = t.iter().map(|&x| lay.left[x]).collect();
            if dt.iter().all(|&d| inv_right[d] != usize::MAX) {
                let back: Vec<usize> = dt.iter().map(|&d| inv_right[d]).collect();
                if !b2.holds(r, &back) {
                    return None;
                }
            }
            set.insert(dt);
        }
        for t in b2.relation(r) {
            let dt: Vec<usize> = t.iter().map(|&y| lay.right[y]).collect();
            if dt.iter().all(|&d| inv_left[d] != usize::MAX) {
                let back: Vec<usize> = dt.iter().map(|&d| inv_left[d]).collect();
                if !b1.holds(r, &back) {
                    return None;
                }
            }
            set.insert(dt);
        }
        rels.push(set);
    }
    Some(rels)
}

fn elem_sorts(sizes: &[usize]) -> Vec<usize> {
    sizes.iter().enumerate().flat_map(|(s, &n)| std::iter::repeat_n(s, n)).collect()
}

/// Tuple groups over `D` that lie in neither side's image.
fn free_units(span: &Span, lay: &Layout) -> Vec<(usize, Vec<Vec<usize>>)> {
    let in_left: BTreeSet<usize> = lay.left.iter().copied().collect();
    let in_right: BTreeSet<usize> = lay.right.iter().copied().collect();
    let sorts = elem_sorts(&lay.sizes);
    let mut units = Vec::new();
    for (r, sym) in span.left.signature().relations().iter().enumerate() {
        let pools: Vec<Vec<usize>> =
            sym.arity.iter().map(|&s| (0..lay.len).filter(|&d| sorts[d] == s).collect()).collect();
        let mut seen = BTreeSet::new();
        for t in pools.into_iter().multi_cartesian_product() {
            if t.iter().all(|d| in_left.contains(d)) || t.iter().all(|d| in_right.contains(d)) {
                continue;
            }
            if (sym.is_irreflexive() && t[0] == t[1]) || seen.contains(&t) {
                continue;
            }
            let mut group = vec![t.clone()];
            if sym.is_symmetric() && t[0] != t[1] {
                group.push(vec![t[1], t[0]]);
            }
            for x in &group {
                seen.insert(x.clone());
            }
            units.push((r, group));
        }
    }
    units
}

const MAX_FREE_UNITS: usize = 24;

fn free_completion(span: &Span, visit: &mut dyn FnMut(Amalgam) -> bool) -> Result<()> {
    let (b1, b2) = (&span.left, &span.right);
    let new1 = new_elements(b1, &span.f);
    let new2 = new_elements(b2, &span.g);
    let mut matching = vec![None; new2.len()];
    let mut used = vec![false; b1.len()];
    matchings(span, &new1, &new2, 0, &mut matching, &mut used, &mut |m| {
        let lay = layout(span, &new2, m);
        let Some(base) = forced_relations(span, &lay) else {
            return Ok(true);
        };
        let units = free_units(span, &lay);
        if units.len() > MAX_FREE_UNITS {
            return Err(Error::Overflow(format!("{} free tuple groups in an amalgam", units.len())));
        }
        for mask in 0u64..(1 << units.len()) {
            let mut rels = base.clone();
            for (i, (r, group)) in units.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    rels[*r].extend(group.iter().cloned());
                }
            }
            let d = FiniteStructure::new(b1.signature().clone(), lay.sizes.clone(), None, rels, vec![], vec![])?;
            let a = Amalgam { structure: Arc::new(d), left: lay.left.clone(), right: lay.right.clone() };
            if !visit(a) {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok(())
}

type MatchVisit<'a> = dyn FnMut(&[Option<usize>]) -> Result<bool> + 'a;

/// Partial matchings between new elements of the two sides, sort by sort.
/// The empty matching comes first.
fn matchings(
    span: &Span,
    new1: &[usize],
    new2: &[usize],
    j: usize,
    matching: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    visit: &mut MatchVisit<'_>,
) -> Result<bool> {
    if j == new2.len() {
        return visit(matching);
    }
    matching[j] = None;
    if !matchings(span, new1, new2, j + 1, matching, used, visit)? {
        return Ok(false);
    }
    for &x in new1 {
        if used[x] || span.left.sort_of(x) != span.right.sort_of(new2[j]) {
            continue;
        }
        used[x] = true;
        matching[j] = Some(x);
        let go = matchings(span, new1, new2, j + 1, matching, used, visit)?;
        used[x] = false;
        matching[j] = None;
        if !go {
            return Ok(false);
        }
    }
    Ok(true)
}

fn disjoint_free(span: &Span) -> Amalgam {
    let new2 = new_elements(&span.right, &span.g);
    let matching = vec![None; new2.len()];
    let lay = layout(span, &new2, &matching);
    let rels = forced_relations(span, &lay).expect("disjoint layouts never conflict");
    let d = FiniteStructure::new(span.left.signature().clone(), lay.sizes.clone(), None, rels, vec![], vec![])
        .expect("valid free amalgam");
    Amalgam { structure: Arc::new(d), left: lay.left, right: lay.right }
}

/// Elements of an order sorted increasingly.
fn sorted_by_rank(s: &FiniteStructure) -> Vec<usize> {
    let mut v: Vec<usize> = (0..s.len()).collect();
    v.sort_by_key(|&x| (0..s.len()).filter(|&y| s.holds(0, &[y, x])).count());
    v
}

/// New elements of `b` grouped by the gap between consecutive images of
/// the apex they fall into.
fn gaps(b: &FiniteStructure, image: &[usize]) -> Vec<Vec<usize>> {
    let img: BTreeSet<usize> = image.iter().copied().collect();
    let mut out = vec![Vec::new()];
    for x in sorted_by_rank(b) {
        if img.contains(&x) {
            out.push(Vec::new());
        } else {
            out.last_mut().expect("non-empty").push(x);
        }
    }
    out
}

#[derive(Clone, Copy)]
enum Step {
    L(usize),
    R(usize),
    Both(usize, usize),
}

fn merges(l: &[usize], r: &[usize]) -> Vec<Vec<Step>> {
    if l.is_empty() {
        return vec![r.iter().map(|&y| Step::R(y)).collect()];
    }
    if r.is_empty() {
        return vec![l.iter().map(|&x| Step::L(x)).collect()];
    }
    let mut out = Vec::new();
    for (head, rest_l, rest_r) in
        [(Step::R(r[0]), l, &r[1..]), (Step::L(l[0]), &l[1..], r), (Step::Both(l[0], r[0]), &l[1..], &r[1..])]
    {
        for mut tail in merges(rest_l, rest_r) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn build_shuffle(span: &Span, choice: &[Vec<Step>]) -> Amalgam {
    let (b1, b2) = (&span.left, &span.right);
    let apex_order = sorted_by_rank(&span.apex);
    let mut left = vec![usize::MAX; b1.len()];
    let mut right = vec![usize::MAX; b2.len()];
    let mut pos = 0;
    for (gap, steps) in choice.iter().enumerate() {
        for s in steps {
            match *s {
                Step::L(x) => left[x] = pos,
                Step::R(y) => right[y] = pos,
                Step::Both(x, y) => {
                    left[x] = pos;
                    right[y] = pos;
                }
            }
            pos += 1;
        }
        if gap < apex_order.len() {
            let a = apex_order[gap];
            left[span.f[a]] = pos;
            right[span.g[a]] = pos;
            pos += 1;
        }
    }
    Amalgam { structure: Arc::new(linear_order(pos)), left, right }
}

fn shuffle(span: &Span, visit: &mut dyn FnMut(Amalgam) -> bool) {
    let g1 = gaps(&span.left, &span.f);
    let g2 = gaps(&span.right, &span.g);
    let options: Vec<Vec<Vec<Step>>> = g1.iter().zip(&g2).map(|(l, r)| merges(l, r)).collect();
    for choice in options.into_iter().multi_cartesian_product() {
        if !visit(build_shuffle(span, &choice)) {
            return;
        }
    }
}

fn first_shuffle(span: &Span) -> Option<Amalgam> {
    let g1 = gaps(&span.left, &span.f);
    let g2 = gaps(&span.right, &span.g);
    let choice: Vec<Vec<Step>> = g1.iter().zip(&g2).map(|(l, r)| merges(l, r).swap_remove(0)).collect();
    Some(build_shuffle(span, &choice))
}

/// Atom of `a` below which atom `p` of `b` lies, along the embedding `e`.
fn parents(b: &FiniteStructure, a: &FiniteStructure, e: &[usize]) -> Vec<(usize, usize)> {
    let aa = atoms(a);
    atoms(b)
        .into_iter()
        .map(|p| {
            let parent = aa
                .iter()
                .position(|&x| b.apply(0, &[p, e[x]]) == p)
                .expect("every atom lies below the image of exactly one atom");
            (p, parent)
        })
        .collect()
}

fn atom_amalgam(span: &Span, rel: &[(usize, usize)]) -> Amalgam {
    let (b1, b2) = (&span.left, &span.right);
    let d = boolean_algebra(rel.len());
    let mask = |b: &FiniteStructure, x: usize, first: bool| -> usize {
        rel.iter()
            .enumerate()
            .filter(|(_, &(p, q))| {
                let atom = if first { p } else { q };
                b.apply(0, &[atom, x]) == atom
            })
            .map(|(i, _)| 1 << i)
            .sum()
    };
    let left = (0..b1.len()).map(|x| mask(b1, x, true)).collect();
    let right = (0..b2.len()).map(|y| mask(b2, y, false)).collect();
    Amalgam { structure: Arc::new(d), left, right }
}

fn atom_products(span: &Span, visit: &mut dyn FnMut(Amalgam) -> bool) -> Result<()> {
    let p1 = parents(&span.left, &span.apex, &span.f);
    let p2 = parents(&span.right, &span.apex, &span.g);
    let pairs: Vec<(usize, usize)> =
        p1.iter().flat_map(|&(p, a)| p2.iter().filter(move |&&(_, b)| a == b).map(move |&(q, _)| (p, q))).collect();
    if pairs.len() > MAX_FREE_UNITS {
        return Err(Error::Overflow(format!("{} candidate atoms in an amalgam", pairs.len())));
    }
    for mask in 1u64..(1 << pairs.len()) {
        let rel: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect();
        let onto1 = p1.iter().all(|&(p, _)| rel.iter().any(|&(x, _)| x == p));
        let onto2 = p2.iter().all(|&(q, _)| rel.iter().any(|&(_, y)| y == q));
        if onto1 && onto2 && !visit(atom_amalgam(span, &rel)) {
            break;
        }
    }
    Ok(())
}

/// Minimal surjective pairing of atoms above each apex atom.
fn staircase(span: &Span) -> Amalgam {
    let p1 = parents(&span.left, &span.apex, &span.f);
    let p2 = parents(&span.right, &span.apex, &span.g);
    let mut rel = Vec::new();
    for a in 0..atoms(&span.apex).len() {
        let l: Vec<usize> = p1.iter().filter(|x| x.1 == a).map(|x| x.0).collect();
        let r: Vec<usize> = p2.iter().filter(|x| x.1 == a).map(|x| x.0).collect();
        for i in 0..l.len().max(r.len()) {
            rel.push((l[i.min(l.len() - 1)], r[i.min(r.len() - 1)]));
        }
    }
    atom_amalgam(span, &rel)
}

fn identification(
    class: &FraisseClass,
    span: &Span,
    bound: usize,
    visit: &mut dyn FnMut(Amalgam) -> bool,
) -> Result<Coverage> {
    if class.kind != Kind::Groups {
        return Err(Error::ClassMismatch("identification search is only defined for groups".into()));
    }
    let (b1, b2) = (&span.left, &span.right);
    let limit = bound.min(super::class::GROUP_CATALOGUE_MAX);
    let mut exhaustive = bound <= super::class::GROUP_CATALOGUE_MAX;
    for d in FraisseClass::groups_small().members(limit).iter() {
        let lefts = embedding_maps(b1, d, &[])?;
        for l in &lefts {
            let fixed: Vec<(usize, usize)> = span.g.iter().zip(&span.f).map(|(&y, &x)| (y, l[x])).collect();
            for r in embedding_maps(b2, d, &fixed)? {
                let seed: Vec<usize> = l.iter().chain(&r).copied().collect();
                if d.closure(&seed).len() != d.len() {
                    continue;
                }
                if !visit(Amalgam { structure: d.clone(), left: l.clone(), right: r }) {
                    return Ok(Coverage::Exhaustive);
                }
            }
        }
    }
    match permutation_product(span, bound) {
        Some(d) if d.structure.len() > super::class::GROUP_CATALOGUE_MAX => {
            if !visit(d) {
                return Ok(Coverage::Exhaustive);
            }
        }
        Some(_) => {}
        None => exhaustive = false,
    }
    Ok(if exhaustive { Coverage::Exhaustive } else { Coverage::Bounded })
}

/// Least element of each right coset `A·r`.
fn right_coset_reps(b: &FiniteStructure, sub: &[usize]) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    for x in 0..b.len() {
        if seen.contains(&x) {
            continue;
        }
        reps.push(x);
        for &a in sub {
            seen.insert(b.apply(0, &[a, x]));
        }
    }
    reps
}

/// Neumann's permutation product: both groups act on `A × S₁ × S₂` where
/// `Sᵢ` are right transversals of the apex. Returns `None` when the
/// generated group exceeds `bound`.
pub(crate) fn permutation_product(span: &Span, bound: usize) -> Option<Amalgam> {
    let (a, b1, b2) = (&span.apex, &span.left, &span.right);
    if !is_group(a) || !is_group(b1) || !is_group(b2) {
        return None;
    }
    let s1 = right_coset_reps(b1, &span.f);
    let s2 = right_coset_reps(b2, &span.g);
    let (na, n1, n2) = (a.len(), s1.len(), s2.len());
    let point = |x: usize, i: usize, j: usize| (x * n1 + i) * n2 + j;
    // decompose b ∈ Bₖ as f(x)·s for the apex element x and representative s
    let split = |b: &FiniteStructure, emb: &[usize], reps: &[usize], y: usize| -> (usize, usize) {
        for (x, &fx) in emb.iter().enumerate() {
            for (i, &s) in reps.iter().enumerate() {
                if b.apply(0, &[fx, s]) == y {
                    return (x, i);
                }
            }
        }
        unreachable!("cosets cover the group")
    };
    let degree = na * n1 * n2;
    let perm1 = |h: usize| -> Vec<usize> {
        let mut p = vec![0; degree];
        for x in 0..na {
            for (i, &s) in s1.iter().enumerate() {
                let y = b1.apply(0, &[h, b1.apply(0, &[span.f[x], s])]);
                let (x2, i2) = split(b1, &span.f, &s1, y);
                for j in 0..n2 {
                    p[point(x, i, j)] = point(x2, i2, j);
                }
            }
        }
        p
    };
    let perm2 = |h: usize| -> Vec<usize> {
        let mut p = vec![0; degree];
        for x in 0..na {
            for (j, &s) in s2.iter().enumerate() {
                let y = b2.apply(0, &[h, b2.apply(0, &[span.g[x], s])]);
                let (x2, j2) = split(b2, &span.g, &s2, y);
                for i in 0..n1 {
                    p[point(x, i, j)] = point(x2, i, j2);
                }
            }
        }
        p
    };
    let l: Vec<Vec<usize>> = (0..b1.len()).map(perm1).collect();
    let r: Vec<Vec<usize>> = (0..b2.len()).map(perm2).collect();
    let id: Vec<usize> = (0..degree).collect();
    let mut elems: BTreeSet<Vec<usize>> = [id].into_iter().collect();
    let mut frontier: Vec<Vec<usize>> = elems.iter().cloned().collect();
    let gens: Vec<&Vec<usize>> = l.iter().chain(&r).collect();
    while let Some(p) = frontier.pop() {
        for g in &gens {
            let q: Vec<usize> = p.iter().map(|&x| g[x]).collect();
            if elems.insert(q.clone()) {
                if elems.len() > bound {
                    return None;
                }
                frontier.push(q);
            }
        }
    }
    let list: Vec<Vec<usize>> = elems.into_iter().collect();
    let index = |p: &Vec<usize>| list.binary_search(p).expect("closed under products");
    let table: Vec<Vec<usize>> =
        list.iter().map(|p| list.iter().map(|q| index(&q.iter().map(|&x| p[x]).collect())).collect()).collect();
    let d = group_from_table(&table, 0);
    let left = l.iter().map(index).collect();
    let right = r.iter().map(index).collect();
    Some(Amalgam { structure: Arc::new(d), left, right })
}
