//! The immutable original forest the game is played on.

use std::collections::HashSet;
use std::fmt;

use crate::error::ForestError;

pub type Vertex = usize;
pub type EdgeId = usize;

/// An undirected forest with dense, stable edge ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adjacency: Vec<Vec<EdgeId>>,
    delta: usize,
}

impl Forest {
    /// Builds a forest, rejecting out-of-range endpoints, self loops,
    /// parallel edges and cycles.
    pub fn new(n: usize, edges: Vec<(Vertex, Vertex)>) -> Result<Self, ForestError> {
        let mut seen = HashSet::with_capacity(edges.len());
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(ForestError::BadVertexIndex { edge: id, vertex: u.max(v), n });
            }
            if u == v {
                return Err(ForestError::CycleDetected { edge: id });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(ForestError::DuplicateEdge { edge: id, u, v });
            }
        }

        let mut dsu = Dsu::new(n);
        for (id, &(u, v)) in edges.iter().enumerate() {
            if !dsu.union(u, v) {
                return Err(ForestError::CycleDetected { edge: id });
            }
        }

        let mut adjacency = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push(id);
            adjacency[v].push(id);
        }
        let delta = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self { n, edges, adjacency, delta })
    }

    /// Parses the tree file format: first token `n`, then one `u v` pair per edge.
    pub fn parse(text: &str) -> Result<Self, ForestError> {
        let mut lines = text.lines().map(str::trim).enumerate().filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or(ForestError::Parse { line: 1, msg: "missing vertex count".into() })?;
        let n: usize = header.parse().map_err(|_| ForestError::Parse { line: 1, msg: format!("bad vertex count {header:?}") })?;
        let mut edges = Vec::new();
        for (idx, line) in lines {
            let mut toks = line.split_whitespace();
            let mut next = || -> Result<usize, ForestError> {
                let tok = toks.next().ok_or_else(|| ForestError::Parse { line: idx + 1, msg: "expected two vertices".into() })?;
                tok.parse().map_err(|_| ForestError::Parse { line: idx + 1, msg: format!("bad vertex {tok:?}") })
            };
            let (u, v) = (next()?, next()?);
            if toks.next().is_some() {
                return Err(ForestError::Parse { line: idx + 1, msg: "trailing tokens".into() });
            }
            edges.push((u, v));
        }
        Self::new(n, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Maximum vertex degree.
    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e]
    }

    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn other_end(&self, e: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// FNV-1a over the canonical text form; identifies the forest in traces.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.to_string().bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }

    /// Vertex sets of the connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            stack.push(s);
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &e in &self.adjacency[u] {
                    let w = self.other_end(e, u);
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect()).expect("a path is a tree")
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i)).collect()).expect("a star is a tree")
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n)?;
        for (u, v) in &self.edges {
            write!(f, "\n{u} {v}")?;
        }
        Ok(())
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_path() {
        let f = Forest::parse("3\n0 1\n1 2").unwrap();
        assert_eq!(f.vertex_count(), 3);
        assert_eq!(f.edge_count(), 2);
        assert_eq!(f.delta(), 2);
    }

    #[test]
    fn parses_star() {
        let f = Forest::parse("5\n0 1\n0 2\n0 3\n0 4").unwrap();
        assert_eq!(f.delta(), 4);
        assert_eq!(f.degree(0), 4);
        assert_eq!(f, Forest::star(4));
    }

    #[test]
    fn rejects_triangle() {
        assert!(matches!(Forest::parse("3\n0 1\n1 2\n2 0"), Err(ForestError::CycleDetected { edge: 2 })));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Forest::parse("2\n0 2"), Err(ForestError::BadVertexIndex { .. })));
        assert!(matches!(Forest::parse("3\n0 1\n1 0"), Err(ForestError::DuplicateEdge { .. })));
        assert!(matches!(Forest::parse("3\n0 x"), Err(ForestError::Parse { .. })));
        assert!(matches!(Forest::parse(""), Err(ForestError::Parse { .. })));
    }

    #[test]
    fn forest_with_isolated_vertices() {
        let f = Forest::parse("5\n0 1\n3 4\n").unwrap();
        assert_eq!(f.components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
        assert_eq!(f.delta(), 1);
    }

    #[test]
    fn display_round_trips() {
        let f = Forest::star(4);
        assert_eq!(Forest::parse(&f.to_string()).unwrap(), f);
    }
}
