//! Constant-time lowest common ancestor and path-step queries on the original forest.
//!
//! Each tree is rooted at its smallest vertex. LCA is a range-minimum query
//! over the depth sequence of the Euler tour; the RMQ uses 64-wide blocks,
//! a sparse table over block minima and a per-position bitmask of the
//! in-block minimum stack, so preprocessing is linear and queries do a
//! constant number of table lookups.
//!
//! The step from `v` towards a descendant `w` is found among the children of
//! `v` by preorder interval, which is constant time on bounded-degree trees.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::LcaError;
use crate::forest::{EdgeId, Forest, Vertex};

const NONE: usize = usize::MAX;
const BLOCK: usize = 64;

#[derive(Debug)]
pub struct LcaIndex {
    root: Vec<Vertex>,
    parent: Vec<Vertex>,
    parent_edge: Vec<EdgeId>,
    depth: Vec<usize>,
    pre: Vec<usize>,
    subtree: Vec<usize>,
    child_start: Vec<usize>,
    children: Vec<Vertex>,
    first: Vec<usize>,
    rmq: EulerRmq,
    queries: AtomicU64,
}

impl LcaIndex {
    pub fn build(forest: &Forest) -> Self {
        let n = forest.vertex_count();
        let mut root = vec![NONE; n];
        let mut parent = vec![NONE; n];
        let mut parent_edge = vec![NONE; n];
        let mut depth = vec![0; n];
        let mut pre = vec![NONE; n];
        let mut subtree = vec![1; n];
        let mut first = vec![NONE; n];
        let mut euler = Vec::with_capacity(2 * n);
        let mut order = Vec::with_capacity(n);

        // (vertex, index of the next incident edge to try)
        let mut stack: Vec<(Vertex, usize)> = Vec::new();
        for r in 0..n {
            if root[r] != NONE {
                continue;
            }
            root[r] = r;
            pre[r] = order.len();
            order.push(r);
            first[r] = euler.len();
            euler.push(r);
            stack.push((r, 0));
            while let Some(top) = stack.last_mut() {
                let (v, i) = *top;
                let inc = forest.incident(v);
                if i < inc.len() {
                    top.1 += 1;
                    let e = inc[i];
                    let w = forest.other_end(e, v);
                    if w == parent[v] && e == parent_edge[v] {
                        continue;
                    }
                    root[w] = r;
                    parent[w] = v;
                    parent_edge[w] = e;
                    depth[w] = depth[v] + 1;
                    pre[w] = order.len();
                    order.push(w);
                    first[w] = euler.len();
                    euler.push(w);
                    stack.push((w, 0));
                } else {
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        subtree[p] += subtree[v];
                        euler.push(p);
                    }
                }
            }
        }

        // Children grouped per parent in preorder.
        let mut child_start = vec![0; n + 1];
        for &v in &order {
            if parent[v] != NONE {
                child_start[parent[v] + 1] += 1;
            }
        }
        for i in 0..n {
            child_start[i + 1] += child_start[i];
        }
        let mut fill = child_start.clone();
        let mut children = vec![0; n.saturating_sub(1)];
        for &v in &order {
            if parent[v] != NONE {
                children[fill[parent[v]]] = v;
                fill[parent[v]] += 1;
            }
        }

        let rmq = EulerRmq::new(euler, &depth);
        Self { root, parent, parent_edge, depth, pre, subtree, child_start, children, first, rmq, queries: AtomicU64::new(0) }
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    /// Root of the tree containing `v`.
    pub fn root(&self, v: Vertex) -> Vertex {
        self.root[v]
    }

    pub fn depth(&self, v: Vertex) -> usize {
        self.depth[v]
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        (self.parent[v] != NONE).then_some(self.parent[v])
    }

    /// Edge to the parent, `None` at a root.
    pub fn parent_edge(&self, v: Vertex) -> Option<EdgeId> {
        (self.parent_edge[v] != NONE).then_some(self.parent_edge[v])
    }

    /// Preorder number of `v`; terminals sorted by it follow the Euler tour.
    pub fn preorder(&self, v: Vertex) -> usize {
        self.pre[v]
    }

    pub fn is_ancestor(&self, a: Vertex, v: Vertex) -> bool {
        self.root[a] == self.root[v] && self.pre[a] <= self.pre[v] && self.pre[v] < self.pre[a] + self.subtree[a]
    }

    /// Number of `lca`/`next_on_path` calls so far.
    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn lca(&self, u: Vertex, v: Vertex) -> Result<Vertex, LcaError> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        if self.root[u] != self.root[v] {
            return Err(LcaError::DifferentComponents(u, v));
        }
        Ok(self.lca_unchecked(u, v))
    }

    fn lca_unchecked(&self, u: Vertex, v: Vertex) -> Vertex {
        let (a, b) = (self.first[u], self.first[v]);
        self.rmq.argmin(a.min(b), a.max(b))
    }

    /// The neighbour of `v` on the unique path from `v` to `w`.
    pub fn next_on_path(&self, v: Vertex, w: Vertex) -> Result<Vertex, LcaError> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        if v == w {
            return Err(LcaError::SameVertex);
        }
        if self.root[v] != self.root[w] {
            return Err(LcaError::DifferentComponents(v, w));
        }
        if !self.is_ancestor(v, w) {
            return Ok(self.parent[v]);
        }
        let kids = &self.children[self.child_start[v]..self.child_start[v + 1]];
        // last child whose preorder number is <= pre[w]
        let idx = kids.partition_point(|&c| self.pre[c] <= self.pre[w]) - 1;
        Ok(kids[idx])
    }

    /// Id of the edge joining two adjacent vertices.
    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        if self.parent[v] == u {
            Some(self.parent_edge[v])
        } else if self.parent[u] == v {
            Some(self.parent_edge[u])
        } else {
            None
        }
    }
}

/// Linear-space RMQ over the depth sequence of an Euler tour.
#[derive(Debug)]
struct EulerRmq {
    tour: Vec<Vertex>,
    key: Vec<u32>,
    masks: Vec<u64>,
    sparse: Vec<Vec<u32>>,
}

impl EulerRmq {
    fn new(tour: Vec<Vertex>, depth: &[usize]) -> Self {
        let key: Vec<u32> = tour.iter().map(|&v| depth[v] as u32).collect();
        let len = key.len();
        let mut masks = vec![0u64; len];
        let mut stack: Vec<usize> = Vec::with_capacity(BLOCK);
        for start in (0..len).step_by(BLOCK) {
            stack.clear();
            let mut cur = 0u64;
            for i in start..(start + BLOCK).min(len) {
                while let Some(&top) = stack.last() {
                    if key[top] > key[i] {
                        cur &= !(1u64 << (top - start));
                        stack.pop();
                    } else {
                        break;
                    }
                }
                stack.push(i);
                cur |= 1u64 << (i - start);
                masks[i] = cur;
            }
        }

        let blocks = len.div_ceil(BLOCK);
        let mut level0 = Vec::with_capacity(blocks);
        for b in 0..blocks {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(len) - 1;
            level0.push((start + masks[end].trailing_zeros() as usize) as u32);
        }
        let mut sparse = vec![level0];
        let mut span = 1;
        while 2 * span <= blocks {
            let prev = sparse.last().unwrap();
            let next: Vec<u32> = (0..=blocks - 2 * span)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + span]);
                    if key[b as usize] < key[a as usize] {
                        b
                    } else {
                        a
                    }
                })
                .collect();
            sparse.push(next);
            span *= 2;
        }
        Self { tour, key, masks, sparse }
    }

    fn in_block(&self, l: usize, r: usize) -> usize {
        let start = l - l % BLOCK;
        let m = self.masks[r] & (!0u64 << (l - start));
        start + m.trailing_zeros() as usize
    }

    fn better(&self, a: usize, b: usize) -> usize {
        if self.key[b] < self.key[a] {
            b
        } else {
            a
        }
    }

    /// Vertex of minimum depth on tour positions `l..=r`.
    fn argmin(&self, l: usize, r: usize) -> Vertex {
        let (bl, br) = (l / BLOCK, r / BLOCK);
        let idx = if bl == br {
            self.in_block(l, r)
        } else {
            let mut best = self.better(self.in_block(l, bl * BLOCK + BLOCK - 1), self.in_block(br * BLOCK, r));
            if bl + 1 < br {
                let (a, b) = (bl + 1, br - 1);
                let lvl = (usize::BITS - 1 - (b - a + 1).leading_zeros()) as usize;
                let row = &self.sparse[lvl];
                best = self.better(best, row[a] as usize);
                best = self.better(best, row[b + 1 - (1 << lvl)] as usize);
            }
            best
        };
        self.tour[idx]
    }
}
