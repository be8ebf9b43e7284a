//! Delayed decomposition trees.
//!
//! Starting from the whole vertex range, each level refines the previous
//! partition into consecutive intervals: a part that is a module of the
//! graph splits into two halves, any other part splits into its maximal
//! consecutive runs of vertices with identical neighborhoods outside the
//! part, and singletons persist. The construction stops one level after
//! the partition stabilizes, so every leaf keeps a parent with exactly one
//! child.
//!
//! The point of the tree is the family of node graphs: for a node `x`, the
//! grandchildren of `x` carry an edge exactly when they hang under distinct
//! children of `x` and some (equivalently, by uniformity, every) pair of
//! their vertices is adjacent. Expanding all node graphs back to vertex
//! pairs reproduces the original graph, each edge coming from the unique
//! node whose grandchildren first separate its endpoints.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Interval, OrderedGraph};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DelayedError {
    EmptyGraph,
}

impl fmt::Display for DelayedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DelayedError::EmptyGraph => write!(f, "cannot decompose a graph with no vertices"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DelayedNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub interval: Interval,
    pub depth: usize,
}

#[derive(Clone)]
pub struct DelayedTree {
    graph: OrderedGraph,
    nodes: Vec<DelayedNode>,
    levels: Vec<Vec<usize>>,
}

/// Maximal runs of consecutive vertices of `iv` whose neighborhoods outside
/// `iv` coincide. For an interval that is not a module this always yields at
/// least two runs; for a module it would yield one.
pub fn local_module_partition(g: &OrderedGraph, iv: Interval) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut start = iv.lo;
    for u in iv.lo..iv.hi - 1 {
        if !agree_outside(g, u, u + 1, iv) {
            out.push(Interval { lo: start, hi: u + 1 });
            start = u + 1;
        }
    }
    out.push(Interval { lo: start, hi: iv.hi });
    out
}

fn agree_outside(g: &OrderedGraph, u: usize, v: usize, iv: Interval) -> bool {
    (0..g.n())
        .filter(|&w| !iv.contains(w))
        .all(|w| g.has_edge(u, w) == g.has_edge(v, w))
}

impl DelayedTree {
    pub fn build(g: &OrderedGraph) -> Result<DelayedTree, DelayedError> {
        let n = g.n();
        if n == 0 {
            return Err(DelayedError::EmptyGraph);
        }
        let mut nodes = vec![DelayedNode {
            id: 0,
            parent: None,
            children: Vec::new(),
            interval: Interval { lo: 0, hi: n },
            depth: 0,
        }];
        let mut levels = vec![vec![0usize]];
        loop {
            let current = levels.last().unwrap().clone();
            let stable = current
                .iter()
                .all(|&id| nodes[id].interval.is_singleton());
            let depth = levels.len();
            let mut next = Vec::new();
            for &id in &current {
                let iv = nodes[id].interval;
                let child_intervals = if iv.is_singleton() {
                    vec![iv]
                } else {
                    let verts: Vec<usize> = iv.iter().collect();
                    if g.is_module(&verts).expect("interval vertices are in range") {
                        let mid = (iv.lo + iv.hi + 1) / 2;
                        vec![
                            Interval { lo: iv.lo, hi: mid },
                            Interval { lo: mid, hi: iv.hi },
                        ]
                    } else {
                        local_module_partition(g, iv)
                    }
                };
                for civ in child_intervals {
                    let cid = nodes.len();
                    nodes.push(DelayedNode {
                        id: cid,
                        parent: Some(id),
                        children: Vec::new(),
                        interval: civ,
                        depth,
                    });
                    nodes[id].children.push(cid);
                    next.push(cid);
                }
            }
            levels.push(next);
            if stable {
                break;
            }
        }
        Ok(DelayedTree {
            graph: g.clone(),
            nodes,
            levels,
        })
    }

    pub fn graph(&self) -> &OrderedGraph {
        &self.graph
    }

    pub fn node(&self, id: usize) -> &DelayedNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Node ids level by level; the last two levels carry the same
    /// partition into singletons.
    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    /// Number of refinement steps until stability, counting the duplicated
    /// final level.
    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        self.nodes[id].children.is_empty()
    }

    /// Grandchildren of `x` in interval order.
    pub fn grandchildren(&self, x: usize) -> Vec<usize> {
        self.nodes[x]
            .children
            .iter()
            .flat_map(|&c| self.nodes[c].children.iter().copied())
            .collect()
    }

    /// Graph on the grandchildren of `x`: an edge joins grandchildren under
    /// distinct children of `x` whose vertex ranges are adjacent in the
    /// underlying graph. Cross adjacency between such grandchildren is
    /// all-or-nothing, so a single representative pair decides it.
    pub fn node_graph(&self, x: usize) -> OrderedGraph {
        let gc = self.grandchildren(x);
        OrderedGraph::from_fn(gc.len(), |a, b| {
            let na = &self.nodes[gc[a]];
            let nb = &self.nodes[gc[b]];
            na.parent != nb.parent && self.graph.has_edge(na.interval.lo, nb.interval.lo)
        })
    }

    fn push_expanded_edges(&self, x: usize, out: &mut Vec<(usize, usize)>) {
        let gc = self.grandchildren(x);
        let ng = self.node_graph(x);
        for (a, b) in ng.edges() {
            let ia = self.nodes[gc[a]].interval;
            let ib = self.nodes[gc[b]].interval;
            for u in ia.iter() {
                for v in ib.iter() {
                    out.push((u, v));
                }
            }
        }
    }

    /// Expands every node graph back to vertex pairs. Equals the original
    /// graph: each edge is produced exactly once, by the node whose
    /// grandchild intervals first separate its endpoints.
    pub fn realize(&self) -> OrderedGraph {
        let mut edges = Vec::new();
        for x in 0..self.nodes.len() {
            self.push_expanded_edges(x, &mut edges);
        }
        OrderedGraph::from_edges(self.graph.n(), edges).expect("expanded pairs are valid edges")
    }

    /// Splits the expanded edges by node depth parity: (odd levels, even
    /// levels). Together they partition the edge set of the graph.
    pub fn odd_even_split(&self) -> (OrderedGraph, OrderedGraph) {
        let mut odd = Vec::new();
        let mut even = Vec::new();
        for x in 0..self.nodes.len() {
            let out = if self.nodes[x].depth % 2 == 1 {
                &mut odd
            } else {
                &mut even
            };
            self.push_expanded_edges(x, out);
        }
        let n = self.graph.n();
        (
            OrderedGraph::from_edges(n, odd).expect("expanded pairs are valid edges"),
            OrderedGraph::from_edges(n, even).expect("expanded pairs are valid edges"),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn intervals(tree: &DelayedTree, level: usize) -> Vec<(usize, usize)> {
        tree.levels()[level]
            .iter()
            .map(|&id| {
                let iv = tree.node(id).interval;
                (iv.lo, iv.hi)
            })
            .collect()
    }

    #[test]
    fn five_cycle_tree_matches_the_worked_example() {
        let g = gen::cycle(5);
        let tree = DelayedTree::build(&g).unwrap();
        assert_eq!(tree.height(), 3);
        assert_eq!(intervals(&tree, 0), vec![(0, 5)]);
        assert_eq!(intervals(&tree, 1), vec![(0, 3), (3, 5)]);
        assert_eq!(
            intervals(&tree, 2),
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
        );
        assert_eq!(intervals(&tree, 3), intervals(&tree, 2));

        let root_graph = tree.node_graph(tree.root());
        let root_edges: Vec<(usize, usize)> = root_graph.edges().collect();
        assert_eq!(root_edges, vec![(1, 4), (2, 3)]);

        let left = tree.levels()[1][0];
        let left_edges: Vec<(usize, usize)> = tree.node_graph(left).edges().collect();
        assert_eq!(left_edges, vec![(0, 1), (0, 2)]);

        let right = tree.levels()[1][1];
        let right_edges: Vec<(usize, usize)> = tree.node_graph(right).edges().collect();
        assert_eq!(right_edges, vec![(0, 1)]);

        assert_eq!(tree.realize(), g);
        let (odd, even) = tree.odd_even_split();
        let odd_edges: Vec<(usize, usize)> = odd.edges().collect();
        let even_edges: Vec<(usize, usize)> = even.edges().collect();
        assert_eq!(odd_edges, vec![(0, 1), (0, 2), (3, 4)]);
        assert_eq!(even_edges, vec![(1, 4), (2, 3)]);
        assert!(g.edge_union_cover(&[&odd, &even]).unwrap());
        assert_eq!(odd.edge_count() + even.edge_count(), g.edge_count());
    }

    #[test]
    fn single_vertex_gives_a_two_node_chain() {
        let g = OrderedGraph::edgeless(1);
        let tree = DelayedTree::build(&g).unwrap();
        assert_eq!(tree.len(), 2);
        assert_eq!(tree.height(), 1);
        assert_eq!(tree.node(1).parent, Some(0));
        assert!(tree.is_leaf(1));
        assert!(!tree.is_leaf(0));
        assert_eq!(tree.realize(), g);
        assert!(DelayedTree::build(&OrderedGraph::edgeless(0)).is_err());
    }

    #[test]
    fn complete_graph_splits_by_halves() {
        let g = gen::complete(4);
        let tree = DelayedTree::build(&g).unwrap();
        assert_eq!(intervals(&tree, 1), vec![(0, 2), (2, 4)]);
        assert_eq!(tree.realize(), g);
        // root node graph joins exactly the cousin pairs
        let rg = tree.node_graph(tree.root());
        let edges: Vec<(usize, usize)> = rg.edges().collect();
        assert_eq!(edges, vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
    }

    #[test]
    fn midpoint_puts_the_extra_vertex_left() {
        let g = OrderedGraph::edgeless(5);
        let tree = DelayedTree::build(&g).unwrap();
        assert_eq!(intervals(&tree, 1), vec![(0, 3), (3, 5)]);
        assert_eq!(intervals(&tree, 2), vec![(0, 2), (2, 3), (3, 4), (4, 5)]);
        assert_eq!(tree.realize(), g);
    }

    #[test]
    fn non_module_intervals_split_into_at_least_two_runs() {
        for seed in 0..30 {
            let g = gen::gnp(10, 0.4, seed).unwrap();
            let tree = DelayedTree::build(&g).unwrap();
            for id in 0..tree.len() {
                let node = tree.node(id);
                if node.interval.is_singleton() || tree.is_leaf(id) {
                    continue;
                }
                let verts: Vec<usize> = node.interval.iter().collect();
                if !g.is_module(&verts).unwrap() {
                    assert!(node.children.len() >= 2, "seed {seed} node {id}");
                }
            }
        }
    }

    #[test]
    fn expansion_round_trips_on_random_graphs() {
        for seed in 0..40 {
            let g = gen::gnp(14, 0.35, 1000 + seed).unwrap();
            let tree = DelayedTree::build(&g).unwrap();
            assert_eq!(tree.realize(), g, "seed {seed}");
            let (odd, even) = tree.odd_even_split();
            assert!(g.edge_union_cover(&[&odd, &even]).unwrap(), "seed {seed}");
            assert_eq!(
                odd.edge_count() + even.edge_count(),
                g.edge_count(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn cousin_cross_adjacency_is_all_or_nothing() {
        for seed in 0..25 {
            let g = gen::gnp(12, 0.5, 2000 + seed).unwrap();
            let tree = DelayedTree::build(&g).unwrap();
            for x in 0..tree.len() {
                let gc = tree.grandchildren(x);
                for (ai, &a) in gc.iter().enumerate() {
                    for &b in &gc[ai + 1..] {
                        if tree.node(a).parent == tree.node(b).parent {
                            continue;
                        }
                        let ia = tree.node(a).interval;
                        let ib = tree.node(b).interval;
                        let mut count = 0usize;
                        for u in ia.iter() {
                            for v in ib.iter() {
                                count += g.has_edge(u, v) as usize;
                            }
                        }
                        assert!(
                            count == 0 || count == ia.len() * ib.len(),
                            "seed {seed} node {x}: cousins {a} {b} mixed adjacency"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn levels_refine_downward() {
        for seed in 0..10 {
            let g = gen::gnp(11, 0.3, 3000 + seed).unwrap();
            let tree = DelayedTree::build(&g).unwrap();
            for level in tree.levels() {
                // each level is an interval partition of the vertex range
                let mut next_lo = 0;
                for &id in level {
                    let iv = tree.node(id).interval;
                    assert_eq!(iv.lo, next_lo);
                    next_lo = iv.hi;
                }
                assert_eq!(next_lo, g.n());
            }
            // children tile their parent exactly
            for id in 0..tree.len() {
                let node = tree.node(id);
                if node.children.is_empty() {
                    continue;
                }
                let mut next_lo = node.interval.lo;
                for &c in &node.children {
                    assert_eq!(tree.node(c).interval.lo, next_lo);
                    next_lo = tree.node(c).interval.hi;
                }
                assert_eq!(next_lo, node.interval.hi);
            }
        }
    }
}
