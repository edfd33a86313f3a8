use std::collections::VecDeque;

use edgegame::random::random_tree;
use edgegame::{Forest, LcaError, LcaIndex};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Parent and depth by BFS from the smallest vertex of each tree.
fn bfs_parents(f: &Forest) -> (Vec<Option<usize>>, Vec<usize>) {
    let n = f.vertex_count();
    let mut parent = vec![None; n];
    let mut depth = vec![0; n];
    let mut seen = vec![false; n];
    for r in 0..n {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let mut q = VecDeque::from([r]);
        while let Some(x) = q.pop_front() {
            for &e in f.incident(x) {
                let y = f.other_end(e, x);
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    depth[y] = depth[x] + 1;
                    q.push_back(y);
                }
            }
        }
    }
    (parent, depth)
}

fn naive_lca(parent: &[Option<usize>], depth: &[usize], mut u: usize, mut v: usize) -> Option<usize> {
    while depth[u] > depth[v] {
        u = parent[u]?;
    }
    while depth[v] > depth[u] {
        v = parent[v]?;
    }
    while u != v {
        u = parent[u]?;
        v = parent[v]?;
    }
    Some(u)
}

/// Second vertex of the BFS path from `v` to `w`.
fn bfs_next(f: &Forest, v: usize, w: usize) -> usize {
    let mut prev = vec![usize::MAX; f.vertex_count()];
    prev[w] = w;
    let mut q = VecDeque::from([w]);
    while let Some(x) = q.pop_front() {
        for &e in f.incident(x) {
            let y = f.other_end(e, x);
            if prev[y] == usize::MAX {
                prev[y] = x;
                q.push_back(y);
            }
        }
    }
    prev[v]
}

fn tree(seed: u64, n: usize, cap: usize) -> Forest {
    random_tree(n, cap, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lca_matches_walk_up(seed in any::<u64>(), n in 1usize..=60, cap in 2usize..=6) {
        let f = tree(seed, n, cap);
        let idx = LcaIndex::build(&f);
        let (parent, depth) = bfs_parents(&f);
        for u in 0..n {
            prop_assert_eq!(idx.depth(u), depth[u]);
            for v in 0..n {
                let expect = naive_lca(&parent, &depth, u, v).unwrap();
                prop_assert_eq!(idx.lca(u, v).unwrap(), expect);
                prop_assert!(idx.is_ancestor(expect, u) && idx.is_ancestor(expect, v));
            }
        }
    }

    #[test]
    fn next_on_path_matches_bfs(seed in any::<u64>(), n in 2usize..=60, cap in 2usize..=6) {
        let f = tree(seed, n, cap);
        let idx = LcaIndex::build(&f);
        for v in 0..n {
            for w in 0..n {
                if v != w {
                    let next = idx.next_on_path(v, w).unwrap();
                    prop_assert_eq!(next, bfs_next(&f, v, w));
                    prop_assert!(idx.edge_between(v, next).is_some());
                }
            }
        }
    }
}

#[test]
fn separate_trees_are_rejected() {
    let f = Forest::new(5, vec![(0, 1), (1, 2), (3, 4)]).unwrap();
    let idx = LcaIndex::build(&f);
    assert_eq!(idx.lca(2, 4), Err(LcaError::DifferentComponents(2, 4)));
    assert_eq!(idx.lca(3, 4), Ok(3));
    assert_eq!(idx.next_on_path(2, 2), Err(LcaError::SameVertex));
}

#[test]
fn path_example() {
    // 0-1-2-3-4 rooted at 0
    let idx = LcaIndex::build(&Forest::path(5));
    assert_eq!(idx.lca(3, 4), Ok(3));
    assert_eq!(idx.next_on_path(4, 0), Ok(3));
    assert_eq!(idx.next_on_path(1, 4), Ok(2));
}
