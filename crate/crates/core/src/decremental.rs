//! Online edge deletion on a forest with component-name queries.
//!
//! [`Variant::Baseline`] stores a component label on every vertex. When an
//! edge is removed both halves are traversed in lock-step and the traversal
//! stops as soon as one half is exhausted; only that (smaller) half gets a
//! fresh label, so a vertex is relabelled at most `log2 n` times.
//!
//! [`Variant::TwoLevel`] first groups the vertices of each tree into connected
//! clusters of at least `ceil(log2(n) / 2)` vertices (greedy postorder
//! accumulation). Labels live on cluster *fragments*: a deletion inside a
//! cluster splits one fragment locally (smaller half gets a new fragment id),
//! and every deletion then runs the smaller-half race on the graph of
//! fragments joined by surviving inter-cluster edges. `find` is two array
//! lookups: vertex to fragment, fragment to label.

use serde::{Deserialize, Serialize};

use crate::error::DecrementalError;
use crate::forest::{EdgeId, Forest, Vertex};

pub type Label = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Baseline,
    TwoLevel,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(Self::Baseline),
            "two-level" | "two_level" => Ok(Self::TwoLevel),
            other => Err(format!("unknown variant {other:?} (expected baseline or two-level)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub deletions: u64,
    /// Label writes: vertices for the baseline; fragments plus in-cluster
    /// vertex moves for the two-level variant.
    pub relabels: u64,
    pub micro_relabels: u64,
    pub macro_relabels: u64,
    /// Nodes expanded by the lock-step traversals.
    pub traversal_steps: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitReport {
    /// Vertices (baseline) or fragments (two-level) on the relabelled side.
    pub smaller_side_size: usize,
    pub new_label: Label,
    /// The endpoint of the deleted edge whose side now carries `new_label`.
    pub relabelled_endpoint: Vertex,
    /// The other endpoint; its side kept the previous label.
    pub kept_endpoint: Vertex,
}

#[derive(Clone, Debug)]
pub struct DecrementalForest {
    edges: Vec<(Vertex, Vertex)>,
    adj_start: Vec<usize>,
    adj: Vec<EdgeId>,
    deleted: Vec<bool>,
    next_label: Label,
    counters: Counters,
    stamps: Stamps,
    inner: Inner,
}

#[derive(Clone, Debug)]
enum Inner {
    Baseline { label: Vec<Label> },
    TwoLevel(TwoLevel),
}

#[derive(Clone, Debug)]
struct TwoLevel {
    cluster: Vec<usize>,
    cluster_count: usize,
    cluster_size_bound: usize,
    frag: Vec<usize>,
    frags: Vec<Fragment>,
    /// Position of an inter-cluster edge in the boundary list of each endpoint's fragment.
    bpos: Vec<[usize; 2]>,
    frag_stamps: Stamps,
}

#[derive(Clone, Debug)]
struct Fragment {
    label: Label,
    boundary: Vec<EdgeId>,
}

impl DecrementalForest {
    pub fn new(forest: &Forest, variant: Variant) -> Self {
        let n = forest.vertex_count();
        let edges = forest.edges().to_vec();
        let mut adj_start = vec![0; n + 1];
        for v in 0..n {
            adj_start[v + 1] = adj_start[v] + forest.degree(v);
        }
        let adj: Vec<EdgeId> = (0..n).flat_map(|v| forest.incident(v).iter().copied()).collect();

        let trees = forest.components();
        let mut tree_label = vec![0; n];
        for (i, comp) in trees.iter().enumerate() {
            for &v in comp {
                tree_label[v] = i as Label;
            }
        }
        let next_label = trees.len() as Label;

        let mut this = Self {
            deleted: vec![false; edges.len()],
            edges,
            adj_start,
            adj,
            next_label,
            counters: Counters::default(),
            stamps: Stamps::new(n),
            inner: Inner::Baseline { label: Vec::new() },
        };
        this.inner = match variant {
            Variant::Baseline => Inner::Baseline { label: tree_label },
            Variant::TwoLevel => Inner::TwoLevel(TwoLevel::build(&this, &tree_label)),
        };
        this
    }

    pub fn variant(&self) -> Variant {
        match self.inner {
            Inner::Baseline { .. } => Variant::Baseline,
            Inner::TwoLevel(_) => Variant::TwoLevel,
        }
    }

    pub fn find(&self, v: Vertex) -> Label {
        match &self.inner {
            Inner::Baseline { label } => label[v],
            Inner::TwoLevel(t) => t.frags[t.frag[v]].label,
        }
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn is_deleted(&self, e: EdgeId) -> bool {
        self.deleted[e]
    }

    /// Number of top-level nodes (clusters) of the two-level structure;
    /// the vertex count for the baseline.
    pub fn macro_node_count(&self) -> usize {
        match &self.inner {
            Inner::Baseline { label } => label.len(),
            Inner::TwoLevel(t) => t.cluster_count,
        }
    }

    /// Minimum cluster size used by the two-level variant.
    pub fn cluster_size_bound(&self) -> Option<usize> {
        match &self.inner {
            Inner::Baseline { .. } => None,
            Inner::TwoLevel(t) => Some(t.cluster_size_bound),
        }
    }

    fn incident(&self, v: Vertex) -> &[EdgeId] {
        &self.adj[self.adj_start[v]..self.adj_start[v + 1]]
    }

    fn other_end(&self, e: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn delete_edge(&mut self, u: Vertex, v: Vertex) -> Result<SplitReport, DecrementalError> {
        let e = self.incident(u).iter().copied().find(|&e| self.other_end(e, u) == v).ok_or(DecrementalError::NotAnEdge(u, v))?;
        self.delete_edge_id(e)
    }

    pub fn delete_edge_id(&mut self, e: EdgeId) -> Result<SplitReport, DecrementalError> {
        if self.deleted[e] {
            return Err(DecrementalError::EdgeAlreadyDeleted(e));
        }
        self.deleted[e] = true;
        self.counters.deletions += 1;
        match self.inner {
            Inner::Baseline { .. } => Ok(self.delete_baseline(e)),
            Inner::TwoLevel(_) => Ok(self.delete_two_level(e)),
        }
    }

    fn fresh_label(&mut self) -> Label {
        let l = self.next_label;
        self.next_label += 1;
        l
    }

    fn delete_baseline(&mut self, e: EdgeId) -> SplitReport {
        let (u, v) = self.edges[e];
        let mut stamps = std::mem::take(&mut self.stamps);
        let race = race(u, v, &mut stamps, |x, out| {
            for &f in self.incident(x) {
                if !self.deleted[f] {
                    out.push(self.other_end(f, x));
                }
            }
        });
        self.stamps = stamps;
        self.counters.traversal_steps += race.steps;

        let u_side_smaller = race.first_is_smaller();
        let (side, relabelled, kept) = if u_side_smaller { (race.a, u, v) } else { (race.b, v, u) };
        let new_label = self.fresh_label();
        let Inner::Baseline { label } = &mut self.inner else { unreachable!() };
        for &x in &side {
            label[x] = new_label;
        }
        self.counters.relabels += side.len() as u64;
        SplitReport { smaller_side_size: side.len(), new_label, relabelled_endpoint: relabelled, kept_endpoint: kept }
    }

    fn delete_two_level(&mut self, e: EdgeId) -> SplitReport {
        let (u, v) = self.edges[e];
        let Inner::TwoLevel(mut t) = std::mem::replace(&mut self.inner, Inner::Baseline { label: Vec::new() }) else { unreachable!() };

        let (fu, fv) = if t.cluster[u] != t.cluster[v] {
            t.detach_boundary(e, &self.edges);
            (t.frag[u], t.frag[v])
        } else {
            // Split the fragment inside its cluster; the smaller half moves to a new fragment.
            let mut stamps = std::mem::take(&mut self.stamps);
            let race = race(u, v, &mut stamps, |x, out| {
                for &f in self.incident(x) {
                    if !self.deleted[f] {
                        let y = self.other_end(f, x);
                        if t.cluster[y] == t.cluster[x] {
                            out.push(y);
                        }
                    }
                }
            });
            self.stamps = stamps;
            self.counters.traversal_steps += race.steps;
            let (side, mover) = if race.first_is_smaller() { (race.a, u) } else { (race.b, v) };
            let old = t.frag[mover];
            let new_frag = t.frags.len();
            t.frags.push(Fragment { label: t.frags[old].label, boundary: Vec::new() });
            let mut crossing = Vec::new();
            for &x in &side {
                crossing.clear();
                crossing.extend(
                    self.incident(x).iter().copied().filter(|&f| !self.deleted[f] && t.cluster[self.other_end(f, x)] != t.cluster[x]),
                );
                for &f in &crossing {
                    t.detach_boundary(f, &self.edges);
                }
                t.frag[x] = new_frag;
                for &f in &crossing {
                    t.attach_boundary(f, &self.edges);
                }
            }
            self.counters.micro_relabels += side.len() as u64;
            self.counters.relabels += side.len() as u64;
            (t.frag[u], t.frag[v])
        };

        // Smaller-half race on the fragment graph.
        t.frag_stamps.grow(t.frags.len());
        let mut stamps = std::mem::take(&mut t.frag_stamps);
        let race = race(fu, fv, &mut stamps, |f, out| {
            for &b in &t.frags[f].boundary {
                let (x, y) = self.edges[b];
                out.push(if t.frag[x] == f { t.frag[y] } else { t.frag[x] });
            }
        });
        t.frag_stamps = stamps;
        self.counters.traversal_steps += race.steps;
        let (side, relabelled, kept) = if race.first_is_smaller() { (race.a, u, v) } else { (race.b, v, u) };
        let new_label = self.fresh_label();
        for &f in &side {
            t.frags[f].label = new_label;
        }
        self.counters.macro_relabels += side.len() as u64;
        self.counters.relabels += side.len() as u64;
        self.inner = Inner::TwoLevel(t);
        SplitReport { smaller_side_size: side.len(), new_label, relabelled_endpoint: relabelled, kept_endpoint: kept }
    }
}

impl TwoLevel {
    fn build(df: &DecrementalForest, tree_label: &[Label]) -> Self {
        let n = tree_label.len();
        let bound = cluster_size_bound(n);

        // Postorder of each tree via an explicit stack.
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = Vec::new();
        for r in 0..n {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            stack.push(r);
            while let Some(x) = stack.pop() {
                order.push(x);
                for &e in df.incident(x) {
                    let y = df.other_end(e, x);
                    if !seen[y] {
                        seen[y] = true;
                        parent[y] = x;
                        stack.push(y);
                    }
                }
            }
        }

        // `order` lists every parent before its children; reversed, it is a valid bottom-up order.
        let mut pending = vec![1usize; n];
        let mut closed = vec![false; n];
        for &x in order.iter().rev() {
            if pending[x] >= bound {
                closed[x] = true;
            } else if parent[x] != usize::MAX {
                pending[parent[x]] += pending[x];
            }
        }
        let mut cluster = vec![0; n];
        let mut cluster_count = 0;
        for &x in &order {
            if closed[x] || parent[x] == usize::MAX {
                cluster[x] = cluster_count;
                cluster_count += 1;
            } else {
                cluster[x] = cluster[parent[x]];
            }
        }

        let mut frags: Vec<Fragment> = vec![Fragment { label: 0, boundary: Vec::new() }; cluster_count];
        for x in 0..n {
            frags[cluster[x]].label = tree_label[x];
        }
        let mut t = Self {
            frag: cluster.clone(),
            cluster,
            cluster_count,
            cluster_size_bound: bound,
            frags,
            bpos: vec![[usize::MAX; 2]; df.edges.len()],
            frag_stamps: Stamps::new(cluster_count),
        };
        for (e, &(a, b)) in df.edges.iter().enumerate() {
            if t.cluster[a] != t.cluster[b] {
                t.attach_boundary(e, &df.edges);
            }
        }
        t
    }

    fn attach_boundary(&mut self, e: EdgeId, edges: &[(Vertex, Vertex)]) {
        let (a, b) = edges[e];
        for (slot, x) in [a, b].into_iter().enumerate() {
            let list = &mut self.frags[self.frag[x]].boundary;
            self.bpos[e][slot] = list.len();
            list.push(e);
        }
    }

    fn detach_boundary(&mut self, e: EdgeId, edges: &[(Vertex, Vertex)]) {
        let (a, b) = edges[e];
        for (slot, x) in [a, b].into_iter().enumerate() {
            let pos = self.bpos[e][slot];
            let f = self.frag[x];
            let list = &mut self.frags[f].boundary;
            list.swap_remove(pos);
            if let Some(&moved) = list.get(pos) {
                let mslot = if self.frag[edges[moved].0] == f { 0 } else { 1 };
                self.bpos[moved][mslot] = pos;
            }
            self.bpos[e][slot] = usize::MAX;
        }
    }
}

/// `ceil(log2(n) / 2)`, at least 1.
pub fn cluster_size_bound(n: usize) -> usize {
    let lg = if n <= 1 { 0.0 } else { (n as f64).log2() };
    ((lg / 2.0).ceil() as usize).max(1)
}

#[derive(Clone, Debug, Default)]
struct Stamps {
    mark: Vec<u64>,
    epoch: u64,
}

impl Stamps {
    fn new(n: usize) -> Self {
        Self { mark: vec![0; n], epoch: 0 }
    }

    fn grow(&mut self, n: usize) {
        if self.mark.len() < n {
            self.mark.resize(n, 0);
        }
    }
}

struct Race {
    a: Vec<usize>,
    b: Vec<usize>,
    a_done: bool,
    b_done: bool,
    steps: u64,
}

impl Race {
    /// Whether the side grown from the first start is the one to relabel.
    /// Equal sizes go to the side holding the smaller node id.
    fn first_is_smaller(&self) -> bool {
        match (self.a_done, self.b_done) {
            (true, false) => true,
            (false, true) => false,
            _ => match self.a.len().cmp(&self.b.len()) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => self.a.iter().min() < self.b.iter().min(),
            },
        }
    }
}

/// Lock-step traversal from `a` and `b` in a forest where they are now
/// disconnected. Stops once one side is exhausted and the other side is
/// known to be strictly larger (or is exhausted too).
fn race(a: usize, b: usize, stamps: &mut Stamps, neighbours: impl Fn(usize, &mut Vec<usize>)) -> Race {
    stamps.epoch += 1;
    let (ma, mb) = (2 * stamps.epoch, 2 * stamps.epoch + 1);
    stamps.mark[a] = ma;
    stamps.mark[b] = mb;
    let mut sides = [vec![a], vec![b]];
    let mut stacks = [vec![a], vec![b]];
    let marks = [ma, mb];
    let mut buf = Vec::new();
    let mut steps = 0;

    let mut expand = |i: usize, sides: &mut [Vec<usize>; 2], stacks: &mut [Vec<usize>; 2], stamps: &mut Stamps| {
        if let Some(x) = stacks[i].pop() {
            steps += 1;
            buf.clear();
            neighbours(x, &mut buf);
            for &y in &buf {
                if stamps.mark[y] != marks[i] {
                    stamps.mark[y] = marks[i];
                    sides[i].push(y);
                    stacks[i].push(y);
                }
            }
        }
    };

    loop {
        for i in 0..2 {
            if stacks[i].is_empty() {
                // side i is complete; grow the other past it or to completion
                let j = 1 - i;
                while !stacks[j].is_empty() && sides[j].len() <= sides[i].len() {
                    expand(j, &mut sides, &mut stacks, stamps);
                }
                let [sa, sb] = sides;
                let (a_done, b_done) = if i == 0 { (true, stacks[1].is_empty()) } else { (stacks[0].is_empty(), true) };
                return Race { a: sa, b: sb, a_done, b_done, steps };
            }
            expand(i, &mut sides, &mut stacks, stamps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn both() -> [Variant; 2] {
        [Variant::Baseline, Variant::TwoLevel]
    }

    #[test]
    fn single_component_at_start() {
        for var in both() {
            let df = DecrementalForest::new(&Forest::path(3), var);
            assert_eq!(df.find(0), df.find(1));
            assert_eq!(df.find(1), df.find(2));
        }
    }

    #[test]
    fn two_disjoint_edges() {
        for var in both() {
            let f = Forest::parse("4\n0 1\n2 3").unwrap();
            let df = DecrementalForest::new(&f, var);
            assert_eq!(df.find(0), df.find(1));
            assert_ne!(df.find(1), df.find(2));
        }
    }

    #[test]
    fn path_split_relabels_smaller_side() {
        let mut df = DecrementalForest::new(&Forest::path(3), Variant::Baseline);
        let before = df.find(1);
        let rep = df.delete_edge(0, 1).unwrap();
        assert_eq!(rep.smaller_side_size, 1);
        assert_eq!(rep.relabelled_endpoint, 0);
        assert_eq!(df.find(0), rep.new_label);
        assert_eq!(df.find(1), before);
        assert_eq!(df.find(2), before);
        assert_eq!(df.counters().relabels, 1);
    }

    #[test]
    fn star_leaf_split() {
        let mut df = DecrementalForest::new(&Forest::star(4), Variant::Baseline);
        let rep = df.delete_edge(0, 3).unwrap();
        assert_eq!(rep.relabelled_endpoint, 3);
        assert_eq!(rep.smaller_side_size, 1);
        assert_ne!(df.find(3), df.find(0));
        assert_eq!(df.find(1), df.find(0));
    }

    #[test]
    fn tie_goes_to_side_with_smaller_vertex() {
        // 2 - 0 - 1 - 3 : deleting (0,1) leaves {0,2} and {1,3}
        let f = Forest::new(4, vec![(0, 2), (0, 1), (1, 3)]).unwrap();
        let mut df = DecrementalForest::new(&f, Variant::Baseline);
        let rep = df.delete_edge(1, 0).unwrap();
        assert_eq!(rep.relabelled_endpoint, 0);
        assert_eq!(rep.smaller_side_size, 2);
    }

    #[test]
    fn double_delete_errors() {
        for var in both() {
            let mut df = DecrementalForest::new(&Forest::path(4), var);
            df.delete_edge_id(1).unwrap();
            assert_eq!(df.delete_edge_id(1), Err(DecrementalError::EdgeAlreadyDeleted(1)));
            assert_eq!(df.delete_edge(2, 1), Err(DecrementalError::EdgeAlreadyDeleted(1)));
            assert_eq!(df.delete_edge(0, 3), Err(DecrementalError::NotAnEdge(0, 3)));
        }
    }

    #[test]
    fn all_singletons_after_full_deletion() {
        for var in both() {
            let f = Forest::path(40);
            let mut df = DecrementalForest::new(&f, var);
            for e in (0..39).rev() {
                df.delete_edge_id(e).unwrap();
            }
            let mut labels: Vec<_> = (0..40).map(|v| df.find(v)).collect();
            labels.sort_unstable();
            labels.dedup();
            assert_eq!(labels.len(), 40);
        }
    }

    #[test]
    fn cluster_bound_values() {
        assert_eq!(cluster_size_bound(1), 1);
        assert_eq!(cluster_size_bound(4096), 6);
        assert_eq!(cluster_size_bound(1000), 5);
    }
}
