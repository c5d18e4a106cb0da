//! Constructors for the concrete structures used by the built-in classes.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use super::signature::Signature;
use super::structure::FiniteStructure;

fn shared(cell: &'static OnceLock<Arc<Signature>>, make: fn() -> Signature) -> Arc<Signature> {
    cell.get_or_init(|| Arc::new(make())).clone()
}

pub fn graph_signature() -> Arc<Signature> {
    static S: OnceLock<Arc<Signature>> = OnceLock::new();
    shared(&S, Signature::graph)
}

pub fn order_signature() -> Arc<Signature> {
    static S: OnceLock<Arc<Signature>> = OnceLock::new();
    shared(&S, Signature::order)
}

pub fn set_signature() -> Arc<Signature> {
    static S: OnceLock<Arc<Signature>> = OnceLock::new();
    shared(&S, Signature::pure_set)
}

pub fn boolean_algebra_signature() -> Arc<Signature> {
    static S: OnceLock<Arc<Signature>> = OnceLock::new();
    shared(&S, Signature::boolean_algebra)
}

pub fn group_signature() -> Arc<Signature> {
    static S: OnceLock<Arc<Signature>> = OnceLock::new();
    shared(&S, Signature::group)
}

/// Simple graph on `0..n`; each edge is given once.
pub fn graph(n: usize, edges: &[(usize, usize)]) -> FiniteStructure {
    let mut e = BTreeSet::new();
    for &(a, b) in edges {
        e.insert(vec![a, b]);
        e.insert(vec![b, a]);
    }
    FiniteStructure::relational(graph_signature(), n, vec![e]).expect("valid graph")
}

/// Edge list of a graph, each edge once with `a < b`.
pub fn edges(g: &FiniteStructure) -> Vec<(usize, usize)> {
    g.relation(0).iter().filter(|t| t[0] < t[1]).map(|t| (t[0], t[1])).collect()
}

/// The chain `0 < 1 < … < n-1`.
pub fn linear_order(n: usize) -> FiniteStructure {
    let lt = (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect();
    FiniteStructure::relational(order_signature(), n, vec![lt]).expect("valid order")
}

/// Linear order in which element `i` has rank `rank[i]`.
pub fn linear_order_by_rank(rank: &[usize]) -> FiniteStructure {
    linear_order(rank.len()).relabel(rank)
}

pub fn pure_set(n: usize) -> FiniteStructure {
    FiniteStructure::relational(set_signature(), n, vec![]).expect("valid set")
}

/// Power-set algebra on `atoms` atoms; element `i` is the bitmask `i`.
pub fn boolean_algebra(atoms: usize) -> FiniteStructure {
    let n = 1usize << atoms;
    let full = n - 1;
    let meet = (0..n).flat_map(|a| (0..n).map(move |b| a & b)).collect();
    let join = (0..n).flat_map(|a| (0..n).map(move |b| a | b)).collect();
    let not = (0..n).map(|a| full & !a).collect();
    FiniteStructure::new(boolean_algebra_signature(), vec![n], None, vec![], vec![meet, join, not], vec![0, full])
        .expect("valid boolean algebra")
}

/// Atoms of a Boolean algebra: minimal elements above `bot`.
pub fn atoms(b: &FiniteStructure) -> Vec<usize> {
    let bot = b.constants()[0];
    let below = |x: usize, y: usize| b.apply(0, &[x, y]) == x;
    (0..b.len()).filter(|&x| x != bot && (0..b.len()).all(|y| y == bot || y == x || !below(y, x))).collect()
}

/// Group from a Cayley table `table[a][b] = a·b`.
pub fn group_from_table(table: &[Vec<usize>], identity: usize) -> FiniteStructure {
    let mul = table.iter().flatten().copied().collect();
    FiniteStructure::new(group_signature(), vec![table.len()], None, vec![], vec![mul], vec![identity])
        .expect("valid group table")
}

pub fn cyclic_group(n: usize) -> FiniteStructure {
    let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    group_from_table(&table, 0)
}

/// Direct product; the pair `(x, y)` has index `x * |h| + y`.
pub fn direct_product(g: &FiniteStructure, h: &FiniteStructure) -> FiniteStructure {
    let (n, m) = (g.len(), h.len());
    let table: Vec<Vec<usize>> = (0..n * m)
        .map(|p| (0..n * m).map(|q| g.apply(0, &[p / m, q / m]) * m + h.apply(0, &[p % m, q % m])).collect())
        .collect();
    group_from_table(&table, g.constants()[0] * m + h.constants()[0])
}

/// Group whose elements are the given permutations, closed under composition
/// `(p∘q)(x) = p(q(x))`. Elements are sorted, so the identity comes first.
pub fn permutation_group(gens: &[Vec<usize>], degree: usize) -> FiniteStructure {
    let id: Vec<usize> = (0..degree).collect();
    let mut elems: BTreeSet<Vec<usize>> = [id].into_iter().collect();
    let mut frontier: Vec<Vec<usize>> = elems.iter().cloned().collect();
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q: Vec<usize> = p.iter().map(|&x| g[x]).collect();
            if elems.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    let list: Vec<Vec<usize>> = elems.into_iter().collect();
    let index = |p: &Vec<usize>| list.binary_search(p).expect("closed");
    let table: Vec<Vec<usize>> =
        list.iter().map(|p| list.iter().map(|q| index(&q.iter().map(|&x| p[x]).collect())).collect()).collect();
    group_from_table(&table, 0)
}

pub fn symmetric_group(n: usize) -> FiniteStructure {
    if n < 2 {
        return cyclic_group(1);
    }
    let swap: Vec<usize> = (0..n).map(|i| if i < 2 { 1 - i } else { i }).collect();
    let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    permutation_group(&[swap, cycle], n)
}

pub fn dihedral_group(n: usize) -> FiniteStructure {
    let rot: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let refl: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
    permutation_group(&[rot, refl], n)
}

/// Quaternion group as a subgroup of permutations of its own 8 elements.
pub fn quaternion_group() -> FiniteStructure {
    // elements ±1, ±i, ±j, ±k encoded as sign*4 + unit index
    let unit_mul = |a: usize, b: usize| -> (bool, usize) {
        const T: [[(bool, usize); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        T[a][b]
    };
    let table: Vec<Vec<usize>> = (0..8)
        .map(|x| {
            (0..8)
                .map(|y| {
                    let (neg, u) = unit_mul(x % 4, y % 4);
                    let sign = (x / 4 + y / 4 + neg as usize) % 2;
                    sign * 4 + u
                })
                .collect()
        })
        .collect();
    group_from_table(&table, 0)
}

/// Inverse of an element of a group structure.
pub fn group_inverse(g: &FiniteStructure, x: usize) -> usize {
    let e = g.constants()[0];
    (0..g.len()).find(|&y| g.apply(0, &[x, y]) == e).expect("group element has an inverse")
}
