//! Seeded random trees and deletion orders for tests, stress runs and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::forest::{EdgeId, Forest};

/// Random recursive tree on `n` vertices with every degree at most
/// `max_degree` (>= 2), vertex ids and edge order shuffled.
pub fn random_tree<R: Rng>(n: usize, max_degree: usize, rng: &mut R) -> Forest {
    assert!(max_degree >= 2 || n <= 2, "degree cap below 2 cannot span {n} vertices");
    let mut deg = vec![0usize; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let j = loop {
            let j = rng.gen_range(0..i);
            if deg[j] < max_degree {
                break j;
            }
        };
        deg[i] += 1;
        deg[j] += 1;
        edges.push((j, i));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges: Vec<_> = edges.into_iter().map(|(a, b)| (perm[a], perm[b])).collect();
    edges.shuffle(rng);
    Forest::new(n, edges).expect("attachment process builds a tree")
}

/// Same as [`random_tree`] but retried until the maximum degree is exactly `delta`.
pub fn random_tree_with_delta<R: Rng>(n: usize, delta: usize, rng: &mut R) -> Forest {
    loop {
        let f = random_tree(n, delta, rng);
        if f.delta() == delta {
            return f;
        }
    }
}

pub fn random_order<R: Rng>(m: usize, rng: &mut R) -> Vec<EdgeId> {
    let mut order: Vec<EdgeId> = (0..m).collect();
    order.shuffle(rng);
    order
}

/// Deletes the most balanced cuts first: edges sorted by the size of the
/// smaller side they cut off in the original tree, largest first.
pub fn balanced_order(forest: &Forest) -> Vec<EdgeId> {
    let n = forest.vertex_count();
    let mut parent_edge = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut comp_size = vec![0usize; n];
    for comp in forest.components() {
        let r = comp[0];
        let start = order.len();
        seen[r] = true;
        order.push(r);
        let mut i = start;
        while i < order.len() {
            let x = order[i];
            for &e in forest.incident(x) {
                let y = forest.other_end(e, x);
                if !seen[y] {
                    seen[y] = true;
                    parent_edge[y] = e;
                    order.push(y);
                }
            }
            i += 1;
        }
        for &v in &comp {
            comp_size[v] = comp.len();
        }
    }
    let mut below = vec![1usize; n];
    let mut cut = vec![0usize; forest.edge_count()];
    for &x in order.iter().rev() {
        let e = parent_edge[x];
        if e != usize::MAX {
            cut[e] = below[x].min(comp_size[x] - below[x]);
            let p = forest.other_end(e, x);
            below[p] += below[x];
        }
    }
    let mut edges: Vec<EdgeId> = (0..forest.edge_count()).collect();
    edges.sort_by_key(|&e| (std::cmp::Reverse(cut[e]), e));
    edges
}
