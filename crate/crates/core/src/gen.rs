//! Deterministic graph family generators.
//!
//! Random families are seeded explicitly; the same seed always produces the
//! same graph, independent of platform.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{GraphError, IntervalPartition, OrderedGraph};

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum GenError {
    InvalidProbability(f64),
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::InvalidProbability(p) => write!(f, "edge probability {p} not in [0, 1]"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Family {
    /// Second shift graph: vertices are pairs `(i, j)` with `1 <= i < j <= n`,
    /// edges join `(i, j)` to `(j, k)`.
    Shift2 { n: usize },
    Cycle { n: usize },
    Path { n: usize },
    Complete { n: usize },
    Gnp { n: usize, p: f64, seed: u64 },
    RandomCograph { n: usize, seed: u64 },
}

pub fn generate(family: Family) -> Result<OrderedGraph, GenError> {
    match family {
        Family::Shift2 { n } => Ok(shift2(n)),
        Family::Cycle { n } => Ok(cycle(n)),
        Family::Path { n } => Ok(path(n)),
        Family::Complete { n } => Ok(complete(n)),
        Family::Gnp { n, p, seed } => gnp(n, p, seed),
        Family::RandomCograph { n, seed } => Ok(random_cograph(n, seed)),
    }
}

/// Vertex labels of `shift2(n)` in vertex order: pairs `(i, j)` sorted by
/// `(j, i)`, so that the pairs with a common second coordinate are
/// consecutive.
pub fn shift2_labels(n: usize) -> Vec<(usize, usize)> {
    let mut labels = Vec::new();
    for j in 2..=n {
        for i in 1..j {
            labels.push((i, j));
        }
    }
    labels
}

pub fn shift2(n: usize) -> OrderedGraph {
    let labels = shift2_labels(n);
    OrderedGraph::from_fn(labels.len(), |a, b| {
        let (i, j) = labels[a];
        let (k, l) = labels[b];
        j == k || l == i
    })
}

/// Interval partition of `shift2(n)` grouping vertices by second coordinate.
pub fn shift2_parts(n: usize) -> Result<IntervalPartition, GraphError> {
    let sizes: Vec<usize> = (2..=n).map(|j| j - 1).collect();
    IntervalPartition::from_sizes(&sizes)
}

/// Cycle visiting vertices in the order `0, 1, n-1, n-2, ..., 2`.
///
/// For n = 5 this is the five-cycle with edges AB, AC, BE, CD, DE whose
/// decomposition tree is pinned down in the delayed-tree tests.
pub fn cycle(n: usize) -> OrderedGraph {
    if n < 3 {
        return path(n);
    }
    let mut seq = Vec::with_capacity(n);
    seq.push(0);
    seq.push(1);
    for v in (2..n).rev() {
        seq.push(v);
    }
    let edges = (0..n).map(|i| (seq[i], seq[(i + 1) % n]));
    let edges: Vec<(usize, usize)> = edges
        .map(|(u, v)| if u < v { (u, v) } else { (v, u) })
        .collect();
    OrderedGraph::from_edges(n, edges).expect("cycle edges are in range")
}

pub fn path(n: usize) -> OrderedGraph {
    OrderedGraph::from_fn(n, |u, v| v == u + 1)
}

pub fn complete(n: usize) -> OrderedGraph {
    OrderedGraph::from_fn(n, |_, _| true)
}

pub fn gnp(n: usize, p: f64, seed: u64) -> Result<OrderedGraph, GenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenError::InvalidProbability(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(OrderedGraph::from_fn(n, |_, _| rng.random_bool(p)))
}

/// Binary cotree over a consecutive vertex interval.
#[derive(Clone, Debug)]
pub enum Cotree {
    Leaf(usize),
    /// `join` is true for a series node (all cross edges present).
    Node {
        join: bool,
        left: Box<Cotree>,
        right: Box<Cotree>,
    },
}

impl Cotree {
    pub fn leaves(&self) -> Vec<usize> {
        match self {
            Cotree::Leaf(v) => [*v].into(),
            Cotree::Node { left, right, .. } => {
                let mut l = left.leaves();
                l.extend(right.leaves());
                l
            }
        }
    }

    pub fn realize(&self, n: usize) -> OrderedGraph {
        let mut edges = Vec::new();
        self.collect_edges(&mut edges);
        OrderedGraph::from_edges(n, edges).expect("cotree leaves are in range")
    }

    fn collect_edges(&self, out: &mut Vec<(usize, usize)>) {
        if let Cotree::Node { join, left, right } = self {
            left.collect_edges(out);
            right.collect_edges(out);
            if *join {
                for u in left.leaves() {
                    for v in right.leaves() {
                        out.push((u.min(v), u.max(v)));
                    }
                }
            }
        }
    }
}

/// Random binary cotree on the consecutive interval `lo..hi`.
pub fn random_cotree(n: usize, seed: u64) -> Option<Cotree> {
    if n == 0 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Some(build_cotree(0, n, &mut rng))
}

fn build_cotree(lo: usize, hi: usize, rng: &mut ChaCha8Rng) -> Cotree {
    if hi - lo == 1 {
        return Cotree::Leaf(lo);
    }
    let split = rng.random_range(lo + 1..hi);
    let join = rng.random_bool(0.5);
    Cotree::Node {
        join,
        left: Box::new(build_cotree(lo, split, rng)),
        right: Box::new(build_cotree(split, hi, rng)),
    }
}

/// Cograph whose modules are consecutive intervals, from a random binary
/// cotree.
pub fn random_cograph(n: usize, seed: u64) -> OrderedGraph {
    match random_cotree(n, seed) {
        None => OrderedGraph::edgeless(0),
        Some(t) => t.realize(n),
    }
}

/// Graph built by letting each vertex see all of its predecessors or none.
///
/// Every prefix-suffix zone of the adjacency matrix has constant columns, so
/// the identity order witnesses 2-almost-mixed freeness.
pub fn random_threshold(n: usize, seed: u64) -> OrderedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dominating: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    OrderedGraph::from_fn(n, |_, v| dominating[v])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift2_five_matches_fixture() {
        let labels = shift2_labels(5);
        assert_eq!(labels.len(), 10);
        assert_eq!(labels[0], (1, 2));
        assert_eq!(labels[3], (1, 4));
        assert_eq!(labels[9], (4, 5));
        let g = shift2(5);
        assert_eq!(g.n(), 10);
        assert_eq!(g.edge_count(), 10); // one edge per triple i < j < k
        assert!(g.has_edge(0, 2)); // (1,2)-(2,3)
        assert!(!g.has_edge(0, 1)); // (1,2)-(1,3)
        let parts = shift2_parts(5).unwrap();
        assert_eq!(parts.bounds(), &[0, 1, 3, 6, 10]);
    }

    #[test]
    fn shift2_is_triangle_free() {
        for n in 2..=8 {
            let g = shift2(n);
            let m = g.n();
            for a in 0..m {
                for b in a + 1..m {
                    if !g.has_edge(a, b) {
                        continue;
                    }
                    for c in b + 1..m {
                        assert!(
                            !(g.has_edge(a, c) && g.has_edge(b, c)),
                            "triangle {a},{b},{c} in shift2({n})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn cycle_five_is_the_pinned_ordering() {
        let g = cycle(5);
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 1), (0, 2), (1, 4), (2, 3), (3, 4)]
        );
    }

    #[test]
    fn small_cycles_and_paths() {
        assert_eq!(cycle(3).edge_count(), 3);
        assert_eq!(cycle(4).edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(cycle(2).edge_count(), 1);
        assert_eq!(path(4).edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(path(0).n(), 0);
        assert_eq!(complete(4).edge_count(), 6);
        // every vertex of a cycle has degree 2
        for n in 3..10 {
            let g = cycle(n);
            assert!((0..n).all(|v| g.degree(v) == 2), "cycle({n})");
        }
    }

    #[test]
    fn gnp_is_seeded_and_validates() {
        let a = gnp(12, 0.4, 7).unwrap();
        let b = gnp(12, 0.4, 7).unwrap();
        assert_eq!(a, b);
        let c = gnp(12, 0.4, 8).unwrap();
        assert_ne!(a, c);
        assert_eq!(gnp(6, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(gnp(6, 1.0, 1).unwrap().edge_count(), 15);
        assert!(gnp(6, 1.5, 1).is_err());
        assert!(gnp(6, -0.1, 1).is_err());
    }

    fn has_induced_p4(g: &OrderedGraph) -> bool {
        let n = g.n();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut quad = [a, b, c, d];
                        quad.sort_unstable();
                        if quad.windows(2).any(|w| w[0] == w[1]) {
                            continue;
                        }
                        if g.has_edge(a, b)
                            && g.has_edge(b, c)
                            && g.has_edge(c, d)
                            && !g.has_edge(a, c)
                            && !g.has_edge(a, d)
                            && !g.has_edge(b, d)
                        {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn random_cographs_are_p4_free_and_seeded() {
        for seed in 0..20 {
            let g = random_cograph(9, seed);
            assert!(!has_induced_p4(&g), "seed {seed}");
        }
        assert_eq!(random_cograph(9, 3), random_cograph(9, 3));
    }

    #[test]
    fn threshold_graphs_have_nested_neighborhoods() {
        for seed in 0..10 {
            let g = random_threshold(10, seed);
            // each vertex sees all or none of its predecessors
            for v in 1..10 {
                let prior = (0..v).filter(|&u| g.has_edge(u, v)).count();
                assert!(prior == 0 || prior == v);
            }
        }
    }
}
