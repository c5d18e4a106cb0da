//! Exact canonical labeling by individualization and refinement.
//!
//! The canonical form of a structure is the lexicographically least
//! encoding over all leaves of the search tree; a leaf is a discrete ordered
//! partition reached by repeatedly individualizing an element of the first
//! non-singleton cell and refining to an equitable partition. Two leaves with
//! equal encodings yield an automorphism, which prunes sibling branches in
//! the same orbit.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::structure::FiniteStructure;

/// Canonical encoding of a (possibly pointed) structure. Equal labels mean
/// isomorphic structures (isomorphic over the points, when pointed).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalLabel {
    pub signature: String,
    pub code: Vec<u32>,
}

impl CanonicalLabel {
    /// Short stable textual digest, used as an object key in reports.
    pub fn digest(&self) -> String {
        // FNV-1a over the code words and signature bytes
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.signature.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        for &w in &self.code {
            for b in w.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        format!("{h:016x}")
    }
}

enum Incidence {
    Rel { r: u32, pos: u32, tuple: usize },
    Fun { f: u32, pos: u32, row: usize },
    Out { f: u32, row: usize },
    Const { c: u32 },
}

struct Refiner<'a> {
    s: &'a FiniteStructure,
    rel_tuples: Vec<Vec<usize>>,
    rel_of: Vec<u32>,
    fn_rows: Vec<(u32, Vec<usize>, usize)>,
    incid: Vec<Vec<Incidence>>,
}

impl<'a> Refiner<'a> {
    fn new(s: &'a FiniteStructure) -> Self {
        let n = s.len();
        let mut incid: Vec<Vec<Incidence>> = (0..n).map(|_| Vec::new()).collect();
        let mut rel_tuples = Vec::new();
        let mut rel_of = Vec::new();
        for (r, ts) in s.relations().iter().enumerate() {
            for t in ts {
                let id = rel_tuples.len();
                for (pos, &x) in t.iter().enumerate() {
                    incid[x].push(Incidence::Rel { r: r as u32, pos: pos as u32, tuple: id });
                }
                rel_tuples.push(t.clone());
                rel_of.push(r as u32);
            }
        }
        let mut fn_rows = Vec::new();
        for f in 0..s.signature().functions().len() {
            let table = s.function_table(f);
            for (idx, &out) in table.iter().enumerate() {
                let args = s.table_args(f, idx);
                let row = fn_rows.len();
                for (pos, &x) in args.iter().enumerate() {
                    incid[x].push(Incidence::Fun { f: f as u32, pos: pos as u32, row });
                }
                incid[out].push(Incidence::Out { f: f as u32, row });
                fn_rows.push((f as u32, args, out));
            }
        }
        for (c, &x) in s.constants().iter().enumerate() {
            incid[x].push(Incidence::Const { c: c as u32 });
        }
        Refiner { s, rel_tuples, rel_of, fn_rows, incid }
    }

    fn signature_of(&self, x: usize, color: &[u32]) -> Vec<Vec<u32>> {
        let mut sig: Vec<Vec<u32>> = self.incid[x]
            .iter()
            .map(|inc| match *inc {
                Incidence::Rel { r, pos, tuple } => {
                    let mut v = vec![0, r, pos];
                    v.extend(self.rel_tuples[tuple].iter().map(|&y| color[y]));
                    v
                }
                Incidence::Fun { f, pos, row } => {
                    let (_, args, out) = &self.fn_rows[row];
                    let mut v = vec![1, f, pos];
                    v.extend(args.iter().map(|&y| color[y]));
                    v.push(color[*out]);
                    v
                }
                Incidence::Out { f, row } => {
                    let (_, args, _) = &self.fn_rows[row];
                    let mut v = vec![2, f];
                    v.extend(args.iter().map(|&y| color[y]));
                    v
                }
                Incidence::Const { c } => vec![3, c],
            })
            .collect();
        sig.sort_unstable();
        sig
    }

    /// Refines an ordered partition to the coarsest equitable refinement.
    fn refine(&self, mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let n = self.s.len();
        let mut color = vec![0u32; n];
        loop {
            for (i, c) in cells.iter().enumerate() {
                for &x in c {
                    color[x] = i as u32;
                }
            }
            let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
            for c in &cells {
                if c.len() == 1 {
                    next.push(c.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<Vec<u32>>, usize)> =
                    c.iter().map(|&x| (self.signature_of(x, &color), x)).collect();
                keyed.sort();
                let mut start = 0;
                for i in 1..=keyed.len() {
                    if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                        next.push(keyed[start..i].iter().map(|(_, x)| *x).collect());
                        start = i;
                    }
                }
            }
            // restore deterministic order inside each cell
            for c in next.iter_mut() {
                c.sort_unstable();
            }
            let changed = next.len() != cells.len();
            cells = next;
            if !changed {
                return cells;
            }
        }
    }

    fn encode(&self, perm: &[usize], points: &[usize]) -> Vec<u32> {
        let s = self.s;
        let mut inv = vec![0; perm.len()];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let mut code: Vec<u32> = s.sort_sizes().iter().map(|&n| n as u32).collect();
        code.push(points.len() as u32);
        code.extend(points.iter().map(|&p| perm[p] as u32));
        for r in 0..s.relations().len() {
            let mut ts: Vec<Vec<u32>> = self
                .rel_tuples
                .iter()
                .zip(&self.rel_of)
                .filter(|(_, &ri)| ri as usize == r)
                .map(|(t, _)| t.iter().map(|&x| perm[x] as u32).collect())
                .collect();
            ts.sort_unstable();
            code.push(ts.len() as u32);
            for t in ts {
                code.extend(t);
            }
        }
        for f in 0..s.signature().functions().len() {
            let size = s.function_table(f).len();
            for idx in 0..size {
                let args: Vec<usize> = s.table_args(f, idx).iter().map(|&a| inv[a]).collect();
                code.push(perm[s.apply(f, &args)] as u32);
            }
        }
        code.extend(s.constants().iter().map(|&c| perm[c] as u32));
        code
    }
}

struct Search<'a> {
    refiner: Refiner<'a>,
    points: Vec<usize>,
    best: Option<(Vec<u32>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(&mut self, cells: Vec<Vec<usize>>, prefix: &mut Vec<usize>) {
        let cells = self.refiner.refine(cells);
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            let mut perm = vec![0; self.refiner.s.len()];
            for (i, c) in cells.iter().enumerate() {
                perm[c[0]] = i;
            }
            let code = self.refiner.encode(&perm, &self.points);
            match &self.best {
                None => self.best = Some((code, perm)),
                Some((b, bp)) => match code.cmp(b) {
                    Ordering::Less => self.best = Some((code, perm)),
                    Ordering::Equal => {
                        let mut binv = vec![0; bp.len()];
                        for (old, &new) in bp.iter().enumerate() {
                            binv[new] = old;
                        }
                        let auto: Vec<usize> = perm.iter().map(|&l| binv[l]).collect();
                        if auto.iter().enumerate().any(|(i, &j)| i != j) {
                            self.automorphisms.push(auto);
                        }
                    }
                    Ordering::Greater => {}
                },
            }
            return;
        };
        let cell = cells[target].clone();
        let mut tried: Vec<usize> = Vec::new();
        for &x in &cell {
            if self.same_orbit_as_tried(x, &tried, prefix) {
                continue;
            }
            tried.push(x);
            let mut next = cells.clone();
            let rest: Vec<usize> = cell.iter().copied().filter(|&y| y != x).collect();
            next.splice(target..=target, [vec![x], rest]);
            prefix.push(x);
            self.run(next, prefix);
            prefix.pop();
        }
    }

    fn same_orbit_as_tried(&self, x: usize, tried: &[usize], prefix: &[usize]) -> bool {
        if tried.is_empty() {
            return false;
        }
        let gens: Vec<&Vec<usize>> = self.automorphisms.iter().filter(|a| prefix.iter().all(|&p| a[p] == p)).collect();
        if gens.is_empty() {
            return false;
        }
        // orbit of x under the pointwise stabilizer of the prefix
        let mut seen = vec![false; self.refiner.s.len()];
        let mut stack = vec![x];
        seen[x] = true;
        while let Some(y) = stack.pop() {
            if tried.contains(&y) {
                return true;
            }
            for g in &gens {
                let z = g[y];
                if !seen[z] {
                    seen[z] = true;
                    stack.push(z);
                }
            }
        }
        false
    }
}

/// Canonical label of `s` pointed by `points` (empty for the plain form)
/// and the relabeling `perm[old] = new` that produces the canonical copy.
pub fn canonical_labeling(s: &FiniteStructure, points: &[usize]) -> (CanonicalLabel, Vec<usize>) {
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for sort in 0..s.sort_sizes().len() {
        let range = s.sort_range(sort);
        let mut firsts: Vec<usize> = Vec::new();
        for &p in points {
            if range.contains(&p) && !firsts.contains(&p) {
                firsts.push(p);
            }
        }
        for &p in &firsts {
            cells.push(vec![p]);
        }
        let rest: Vec<usize> = range.filter(|x| !firsts.contains(x)).collect();
        if !rest.is_empty() {
            cells.push(rest);
        }
    }
    let mut search =
        Search { refiner: Refiner::new(s), points: points.to_vec(), best: None, automorphisms: Vec::new() };
    search.run(cells, &mut Vec::new());
    let (code, perm) = search.best.expect("search visits at least one leaf");
    (CanonicalLabel { signature: s.signature().to_string(), code }, perm)
}

/// Canonical label of a structure with a distinguished tuple of elements.
pub fn pointed_label(s: &FiniteStructure, points: &[usize]) -> CanonicalLabel {
    canonical_labeling(s, points).0
}
