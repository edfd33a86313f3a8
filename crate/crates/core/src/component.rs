//! Induced-subtree analytics for one component of the split game forest.
//!
//! A component is a maximal set of vertices joined by uncoloured edges,
//! together with a copy of every coloured edge touching it. Its induced
//! subtree is the union of those coloured leaf edges and the uncoloured
//! paths between their attachment vertices. Everything here is computed
//! from the coloured-leaf list alone (at most `Δ + 1` entries) with a
//! constant number of LCA queries.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::decremental::Label;
use crate::error::ClassifyError;
use crate::forest::{EdgeId, Forest, Vertex};
use crate::game::Colour;
use crate::lca::LcaIndex;

/// Read access to edge colours (0 = uncoloured).
pub trait ColourOf {
    fn colour_of(&self, e: EdgeId) -> Colour;
}

impl ColourOf for [Colour] {
    fn colour_of(&self, e: EdgeId) -> Colour {
        self[e]
    }
}

impl ColourOf for Vec<Colour> {
    fn colour_of(&self, e: EdgeId) -> Colour {
        self[e]
    }
}

/// A colouring with one extra edge coloured, for scoring candidate moves.
pub struct Overlay<'a> {
    pub base: &'a [Colour],
    pub edge: EdgeId,
    pub colour: Colour,
}

impl ColourOf for Overlay<'_> {
    fn colour_of(&self, e: EdgeId) -> Colour {
        if e == self.edge {
            self.colour
        } else {
            self.base[e]
        }
    }
}

/// A coloured edge as seen from one of the components it borders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColouredLeaf {
    pub edge: EdgeId,
    /// Endpoint of `edge` inside the component.
    pub attach: Vertex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub base: Vertex,
    pub gamma: usize,
    pub matched: Vec<EdgeId>,
    pub unmatched: Vec<EdgeId>,
    pub colours_present: Vec<Colour>,
    pub relevant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentView {
    pub label: Label,
    pub x: usize,
    pub base_nodes: Vec<Vertex>,
    pub colours_present: Vec<Colour>,
    /// Present only when there is exactly one base node.
    pub classification: Option<Classification>,
    pub has_uncoloured: bool,
    pub s_ok: bool,
    pub m_ok: bool,
}

impl ComponentView {
    pub fn star_like(&self) -> bool {
        self.base_nodes.len() == 1
    }

    pub fn gamma(&self) -> Option<usize> {
        self.classification.as_ref().map(|c| c.gamma)
    }

    pub fn unmatched_count(&self) -> usize {
        self.classification.as_ref().map_or(0, |c| c.unmatched.len())
    }

    pub fn relevant(&self) -> bool {
        self.classification.as_ref().is_some_and(|c| c.relevant)
    }

    pub fn base(&self) -> Option<Vertex> {
        self.classification.as_ref().map(|c| c.base)
    }
}

/// Vertices of degree at least three in the induced subtree.
///
/// Terminals are sorted in preorder; the LCAs of preorder-adjacent terminals
/// are exactly the branching vertices of their Steiner tree, so the virtual
/// tree on terminals plus those LCAs carries every candidate.
pub fn base_nodes(leaves: &[ColouredLeaf], lca: &LcaIndex) -> Vec<Vertex> {
    if leaves.len() < 3 {
        return Vec::new();
    }
    // (vertex, coloured edges attached there)
    let mut terminals: Vec<(Vertex, usize)> = Vec::with_capacity(leaves.len());
    for leaf in leaves {
        match terminals.iter_mut().find(|(v, _)| *v == leaf.attach) {
            Some(t) => t.1 += 1,
            None => terminals.push((leaf.attach, 1)),
        }
    }
    terminals.sort_unstable_by_key(|&(v, _)| lca.preorder(v));

    let mut nodes: Vec<(Vertex, usize)> = terminals.clone();
    for pair in terminals.windows(2) {
        let w = lca.lca(pair[0].0, pair[1].0).expect("terminals of one component share a tree");
        if !nodes.iter().any(|&(v, _)| v == w) {
            nodes.push((w, 0));
        }
    }
    nodes.sort_unstable_by_key(|&(v, _)| lca.preorder(v));

    let mut degree = vec![0usize; nodes.len()];
    let mut stack: Vec<usize> = Vec::with_capacity(nodes.len());
    for i in 0..nodes.len() {
        while let Some(&top) = stack.last() {
            if lca.is_ancestor(nodes[top].0, nodes[i].0) {
                break;
            }
            stack.pop();
        }
        if let Some(&top) = stack.last() {
            degree[top] += 1;
            degree[i] += 1;
        }
        stack.push(i);
    }

    let mut bases: Vec<Vertex> = nodes.iter().zip(&degree).filter(|(&(_, coloured), &d)| d + coloured >= 3).map(|(&(v, _), _)| v).collect();
    bases.sort_unstable();
    bases
}

pub fn colours_present<C: ColourOf + ?Sized>(leaves: &[ColouredLeaf], colour: &C) -> Vec<Colour> {
    leaves.iter().map(|l| colour.colour_of(l.edge)).collect::<BTreeSet<_>>().into_iter().collect()
}

/// Matched/unmatched split around the unique base node `base`.
pub fn classify<C: ColourOf + ?Sized>(
    leaves: &[ColouredLeaf],
    base_nodes: &[Vertex],
    forest: &Forest,
    colour: &C,
) -> Result<Classification, ClassifyError> {
    let &[base] = base_nodes else {
        return Err(ClassifyError::NoUniqueBaseNode(base_nodes.len()));
    };
    let at_base: BTreeSet<Colour> = leaves.iter().filter(|l| l.attach == base).map(|l| colour.colour_of(l.edge)).collect();
    let gamma = leaves.iter().filter(|l| l.attach == base).count();
    let (mut matched, mut unmatched) = (Vec::new(), Vec::new());
    for l in leaves {
        if l.attach == base || at_base.contains(&colour.colour_of(l.edge)) {
            matched.push(l.edge);
        } else {
            unmatched.push(l.edge);
        }
    }
    matched.sort_unstable();
    unmatched.sort_unstable();
    Ok(Classification {
        base,
        gamma,
        matched,
        unmatched,
        colours_present: colours_present(leaves, colour),
        relevant: forest.degree(base) == forest.delta(),
    })
}

/// At most `max(3 - γ, 0)` unmatched edges.
pub fn check_m(gamma: usize, unmatched: usize) -> bool {
    unmatched <= 3usize.saturating_sub(gamma)
}

pub fn view<C: ColourOf + ?Sized>(
    label: Label,
    leaves: &[ColouredLeaf],
    has_uncoloured: bool,
    forest: &Forest,
    lca: &LcaIndex,
    colour: &C,
) -> ComponentView {
    let base_nodes = base_nodes(leaves, lca);
    let classification = classify(leaves, &base_nodes, forest, colour).ok();
    let s_ok = leaves.len() < 3 || base_nodes.len() == 1;
    let m_ok = match &classification {
        Some(c) if c.relevant => check_m(c.gamma, c.unmatched.len()),
        _ => true,
    };
    ComponentView {
        label,
        x: leaves.len(),
        colours_present: colours_present(leaves, colour),
        base_nodes,
        classification,
        has_uncoloured,
        s_ok,
        m_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(edge: EdgeId, attach: Vertex) -> ColouredLeaf {
        ColouredLeaf { edge, attach }
    }

    /// Spider: centre 0 with legs 0-1-2, 0-3-4, 0-5-6, extra leaf 7 at 0.
    fn spider() -> Forest {
        Forest::new(8, vec![(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6), (0, 7)]).unwrap()
    }

    #[test]
    fn spider_centre_is_the_base() {
        let f = spider();
        let idx = LcaIndex::build(&f);
        // coloured far edges (1,2), (3,4), (5,6) attached at 1, 3, 5
        let leaves = [leaf(1, 1), leaf(3, 3), leaf(5, 5)];
        assert_eq!(base_nodes(&leaves, &idx), vec![0]);
    }

    #[test]
    fn two_leaves_have_no_base() {
        let f = spider();
        let idx = LcaIndex::build(&f);
        assert!(base_nodes(&[leaf(1, 1), leaf(3, 3)], &idx).is_empty());
    }

    #[test]
    fn all_incident_at_centre() {
        let f = Forest::star(4);
        let idx = LcaIndex::build(&f);
        let leaves = [leaf(0, 0), leaf(1, 0), leaf(2, 0)];
        assert_eq!(base_nodes(&leaves, &idx), vec![0]);
        let colour = vec![1, 2, 3, 0];
        let c = classify(&leaves, &[0], &f, &colour).unwrap();
        assert_eq!(c.gamma, 3);
        assert!(c.unmatched.is_empty());
        assert!(c.relevant);
    }

    #[test]
    fn distant_edge_sharing_a_base_colour_is_matched() {
        let f = spider();
        // two coloured edges at 0: (0,5) colour 1 attached at 0, (0,7) colour 2; far (1,2) colour 2
        let leaves = [leaf(4, 0), leaf(6, 0), leaf(1, 1)];
        let colour = vec![0, 2, 0, 0, 1, 0, 2];
        let c = classify(&leaves, &[0], &f, &colour).unwrap();
        assert_eq!(c.gamma, 2);
        assert_eq!(c.matched, vec![1, 4, 6]);
        assert!(c.unmatched.is_empty());
    }

    #[test]
    fn distant_edges_with_new_colours_are_unmatched() {
        let f = spider();
        let leaves = [leaf(6, 0), leaf(1, 1), leaf(3, 3)];
        let colour = vec![0, 2, 0, 3, 0, 0, 1];
        let c = classify(&leaves, &[0], &f, &colour).unwrap();
        assert_eq!(c.gamma, 1);
        assert_eq!(c.unmatched, vec![1, 3]);
        assert_eq!(c.colours_present, vec![1, 2, 3]);
    }

    #[test]
    fn classify_needs_unique_base() {
        let f = Forest::path(3);
        assert_eq!(classify(&[], &[], &f, &[0u8, 0][..]), Err(ClassifyError::NoUniqueBaseNode(0)));
        assert_eq!(classify(&[], &[0, 1], &f, &[0u8, 0][..]), Err(ClassifyError::NoUniqueBaseNode(2)));
    }

    #[test]
    fn condition_m_formula() {
        assert!(check_m(2, 1));
        assert!(!check_m(3, 1));
        assert!(check_m(4, 0));
        assert!(check_m(0, 3));
        assert!(!check_m(0, 4));
    }

    #[test]
    fn two_base_nodes_detected() {
        // 0 - 1 - 2 path with pendant pairs: leaves at 0 (two) and 2 (two)
        let f = Forest::new(7, vec![(0, 1), (1, 2), (0, 3), (0, 4), (2, 5), (2, 6)]).unwrap();
        let idx = LcaIndex::build(&f);
        let leaves = [leaf(2, 0), leaf(3, 0), leaf(4, 2), leaf(5, 2)];
        assert_eq!(base_nodes(&leaves, &idx), vec![0, 2]);
        let v = view(0, &leaves, true, &f, &idx, &[0u8, 0, 1, 2, 1, 2][..]);
        assert!(!v.s_ok);
        assert!(v.m_ok);
        assert!(v.classification.is_none());
    }
}
