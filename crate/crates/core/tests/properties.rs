use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use galoiswb::autgroup::automorphisms;
use galoiswb::category::FiniteCategory;
use galoiswb::fraisse::{amalgamate_one, Chain, FraisseClass, Span};
use galoiswb::galois::{strict_mono_bounded, SplitOracle};
use galoiswb::imaginaries::{
    generated_relation, image_of_f_subgroups, jat_closure, subgroup_category, RepresentableRelation,
};
use galoiswb::structures::builders::{cyclic_group, direct_product, graph, pure_set};
use galoiswb::structures::find_embedding;
use galoiswb::{Embedding, FiniteStructure};
use proptest::prelude::*;

fn arb_graph(max: usize) -> impl Strategy<Value = FiniteStructure> {
    (1..=max).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let k = pairs.len();
        proptest::collection::vec(any::<bool>(), k).prop_map(move |mask| {
            let e: Vec<(usize, usize)> = pairs.iter().zip(&mask).filter(|(_, &m)| m).map(|(p, _)| *p).collect();
            graph(n, &e)
        })
    })
}

fn arb_perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn graph_chain() -> &'static Chain {
    static CHAIN: OnceLock<Chain> = OnceLock::new();
    CHAIN.get_or_init(|| Chain::build(&FraisseClass::graphs(), 3, Some(3), None).unwrap())
}

fn sets_category() -> &'static FiniteCategory {
    static CAT: OnceLock<FiniteCategory> = OnceLock::new();
    CAT.get_or_init(|| FiniteCategory::from_class(&FraisseClass::sets().truncated(3), 3, &[]).unwrap())
}

/// A seed `(e, h, k)` over base `c`, picked by raw indices.
fn seed(cat: &FiniteCategory, c: usize, raw: (usize, usize, usize)) -> Option<(usize, usize, usize)> {
    let e = raw.0 % cat.len();
    let n = cat.hom(c, e).len();
    (n > 0).then(|| (e, raw.1 % n, raw.2 % n))
}

fn seeds(cat: &FiniteCategory, c: usize, raw: &[(usize, usize, usize)]) -> Vec<(usize, usize, usize)> {
    raw.iter().filter_map(|&r| seed(cat, c, r)).collect()
}

fn arb_raw() -> impl Strategy<Value = Vec<(usize, usize, usize)>> {
    proptest::collection::vec((0..64usize, 0..64usize, 0..64usize), 0..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_label_is_invariant((g, p) in arb_graph(6).prop_flat_map(|g| { let n = g.len(); (Just(g), arb_perm(n)) })) {
        let h = g.relabel(&p);
        prop_assert_eq!(g.canonical_label(), h.canonical_label());
        prop_assert!(g.is_isomorphic(&h));
        let m = find_embedding(&g, &h, &[]).unwrap().expect("isomorphic copies embed");
        prop_assert!(Embedding::new(Arc::new(g.clone()), Arc::new(h.clone()), m).unwrap().is_iso());
    }

    #[test]
    fn graph_amalgams_commute(b1 in arb_graph(4), b2 in arb_graph(4), pick in proptest::collection::vec(any::<bool>(), 4)) {
        let subset: BTreeSet<usize> = (0..b1.len()).filter(|&i| pick[i]).collect();
        let (a, f) = b1.induced(&subset).unwrap();
        let g = find_embedding(&a, &b2, &[]).unwrap();
        prop_assume!(g.is_some());
        let g = g.unwrap();
        let span = Span { apex: Arc::new(a), left: Arc::new(b1), f: f.clone(), right: Arc::new(b2), g: g.clone() };
        let d = amalgamate_one(&FraisseClass::graphs(), &span).unwrap();
        prop_assert!(Embedding::new(span.left.clone(), d.structure.clone(), d.left.clone()).is_ok());
        prop_assert!(Embedding::new(span.right.clone(), d.structure.clone(), d.right.clone()).is_ok());
        for x in 0..span.apex.len() {
            prop_assert_eq!(d.left[f[x]], d.right[g[x]]);
        }
    }

    /// In the random graph algebraic closure is trivial, so `I_ξ ⊆ I_χ`
    /// exactly when the image of `χ` lies in the image of `ξ`.
    #[test]
    fn stabilizer_inclusion_matches_images(
        xi in proptest::collection::vec(0..11usize, 0..3),
        chi in proptest::collection::vec(0..11usize, 0..3),
        psi in proptest::collection::vec(0..11usize, 0..3),
    ) {
        let chain = graph_chain();
        let top = &chain.last().structure;
        let n = top.len();
        let (xi, chi, psi): (Vec<usize>, Vec<usize>, Vec<usize>) =
            (xi.iter().map(|x| x % n).collect(), chi.iter().map(|x| x % n).collect(), psi.iter().map(|x| x % n).collect());
        let oracle = SplitOracle::new(&chain.class);
        let sub = |a: &[usize], b: &[usize]| oracle.stabilizer_subset(top, a, b).unwrap();
        let set = |t: &[usize]| t.iter().copied().collect::<BTreeSet<_>>();
        prop_assert_eq!(sub(&xi, &xi), Some(true));
        prop_assert_eq!(sub(&xi, &chi), Some(set(&chi).is_subset(&set(&xi))));
        if sub(&xi, &chi) == Some(true) && sub(&chi, &psi) == Some(true) {
            prop_assert_eq!(sub(&xi, &psi), Some(true));
        }
    }

    #[test]
    fn jat_closure_is_a_closure(c in 0..4usize, raw1 in arb_raw(), raw2 in arb_raw()) {
        let cat = sets_category();
        let c = c % cat.len();
        let s1 = seeds(cat, c, &raw1);
        let s2: Vec<_> = s1.iter().copied().chain(seeds(cat, c, &raw2)).collect();
        let (r1, r2) = (RepresentableRelation::close(cat, c, &s1), RepresentableRelation::close(cat, c, &s2));
        prop_assert!(r2.contains(&r1));
        let (j1, j2) = (jat_closure(cat, &r1), jat_closure(cat, &r2));
        prop_assert!(j1.contains(&r1));
        prop_assert!(j2.contains(&j1));
        prop_assert_eq!(jat_closure(cat, &j1), j1.clone());
        prop_assert!(j1.is_functorial(cat));
    }

    #[test]
    fn generated_relation_is_least(c in 0..4usize, first in (0..64usize, 0..64usize, 0..64usize), raw in arb_raw()) {
        let cat = sets_category();
        let c = c % cat.len();
        prop_assume!(seed(cat, c, first).is_some());
        let (e, h, k) = seed(cat, c, first).unwrap();
        let g = generated_relation(cat, c, e, h, k);
        prop_assert!(g.related(e, h, k));
        prop_assert!(g.is_functorial(cat));
        let mut all = seeds(cat, c, &raw);
        all.push((e, h, k));
        prop_assert!(RepresentableRelation::close(cat, c, &all).contains(&g));
        prop_assert!(RepresentableRelation::diagonal(cat, c).contains(&g) == (h == k));
    }

    /// Enlarging the ambient category never turns a strict mono into a
    /// non-strict one among sets.
    #[test]
    fn strict_mono_monotone_in_bound(a in 0..3usize, extra in 0..2usize, p in arb_perm(4)) {
        let b = a + extra;
        let map: Vec<usize> = p.into_iter().filter(|&x| x < b).take(a).collect();
        let f = Embedding::new(Arc::new(pure_set(a)), Arc::new(pure_set(b)), map).unwrap();
        let verdicts: Vec<bool> =
            (b.max(1)..=5).map(|n| strict_mono_bounded(&FraisseClass::sets(), &f, n).unwrap().holds).collect();
        prop_assert!(verdicts.windows(2).all(|w| w[0] <= w[1]), "{:?}", verdicts);
        prop_assert!(*verdicts.last().unwrap());
    }
}

/// Stabilizers of the arrows into the top object of a subgroup category,
/// computed straight from the multiplication table.
fn brute_stabilizers(g: &FiniteStructure, cat: &FiniteCategory, u: usize) -> BTreeSet<BTreeSet<Vec<usize>>> {
    let n = g.len();
    let mul = |a: usize, b: usize| g.apply(0, &[a, b]);
    let mut auts = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    permute(&mut p, 0, &mut |p| {
        if (0..n).all(|a| (0..n).all(|b| p[mul(a, b)] == mul(p[a], p[b]))) {
            auts.push(p.to_vec());
        }
    });
    (0..cat.len())
        .flat_map(|c| cat.hom(c, u).iter())
        .map(|m| auts.iter().filter(|s| m.iter().all(|&x| s[x] == x)).cloned().collect())
        .collect()
}

fn permute(p: &mut Vec<usize>, i: usize, visit: &mut dyn FnMut(&[usize])) {
    if i == p.len() {
        visit(p);
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permute(p, i + 1, visit);
        p.swap(i, j);
    }
}

#[test]
fn subgroup_category_stabilizers_match_brute_force() {
    for g in [cyclic_group(4), direct_product(&cyclic_group(2), &cyclic_group(2)), cyclic_group(6)] {
        let cat = subgroup_category(&g).unwrap();
        let u = cat.len() - 1;
        let img = image_of_f_subgroups(&cat, u).unwrap();
        assert_eq!(img.group.order(), automorphisms(cat.object(u)).order());
        let got: BTreeSet<BTreeSet<Vec<usize>>> =
            img.image.iter().map(|s| s.elements().iter().map(|&i| img.group.element(i).to_vec()).collect()).collect();
        assert_eq!(got, brute_stabilizers(cat.object(u), &cat, u));
    }
}
