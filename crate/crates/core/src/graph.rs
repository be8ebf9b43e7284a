//! Ordered graphs with dense bit-row adjacency, plus the interval and
//! coloring types shared across the crate.
//!
//! Vertices are `0..n` and the vertex order is always the index order;
//! reorderings are explicit via [`OrderedGraph::apply_order`].

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::BitRow;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphError {
    VertexOutOfRange { v: usize, n: usize },
    SelfLoop { v: usize },
    NotStrictlyIncreasing,
    NotAPermutation,
    LengthMismatch { expected: usize, got: usize },
    EmptyInterval,
    NotAPartition,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::VertexOutOfRange { v, n } => {
                write!(f, "vertex {v} out of range for graph on {n} vertices")
            }
            GraphError::SelfLoop { v } => write!(f, "self loop at vertex {v}"),
            GraphError::NotStrictlyIncreasing => write!(f, "vertex list not strictly increasing"),
            GraphError::NotAPermutation => write!(f, "order is not a permutation"),
            GraphError::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            GraphError::EmptyInterval => write!(f, "interval is empty"),
            GraphError::NotAPartition => write!(f, "parts do not partition the vertex range"),
        }
    }
}

/// Half-open vertex interval `lo..hi`, always nonempty.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Result<Self, GraphError> {
        if lo >= hi {
            return Err(GraphError::EmptyInterval);
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo
    }

    pub fn is_singleton(&self) -> bool {
        self.len() == 1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.lo <= v && v < self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.lo..self.hi
    }
}

/// Partition of `0..n` into consecutive nonempty intervals.
///
/// Stored as boundary positions `0 = b_0 < b_1 < ... < b_k = n`; part `i`
/// is `b_i..b_{i+1}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntervalPartition {
    bounds: Vec<usize>,
}

impl IntervalPartition {
    /// Builds from interior cut positions (strictly increasing, in `1..n`).
    pub fn from_cuts(n: usize, cuts: &[usize]) -> Result<Self, GraphError> {
        let mut bounds = Vec::with_capacity(cuts.len() + 2);
        bounds.push(0);
        for &c in cuts {
            if c <= *bounds.last().unwrap() || c >= n {
                return Err(GraphError::NotAPartition);
            }
            bounds.push(c);
        }
        if n == 0 {
            return Err(GraphError::EmptyInterval);
        }
        bounds.push(n);
        Ok(IntervalPartition { bounds })
    }

    pub fn from_sizes(sizes: &[usize]) -> Result<Self, GraphError> {
        if sizes.is_empty() || sizes.iter().any(|&s| s == 0) {
            return Err(GraphError::NotAPartition);
        }
        let mut bounds = Vec::with_capacity(sizes.len() + 1);
        bounds.push(0usize);
        for &s in sizes {
            bounds.push(bounds.last().unwrap() + s);
        }
        Ok(IntervalPartition { bounds })
    }

    pub fn from_intervals(ivs: &[Interval]) -> Result<Self, GraphError> {
        if ivs.is_empty() || ivs[0].lo != 0 {
            return Err(GraphError::NotAPartition);
        }
        let mut bounds = vec![0];
        for iv in ivs {
            if iv.lo != *bounds.last().unwrap() || iv.hi <= iv.lo {
                return Err(GraphError::NotAPartition);
            }
            bounds.push(iv.hi);
        }
        Ok(IntervalPartition { bounds })
    }

    pub fn whole(n: usize) -> Result<Self, GraphError> {
        Self::from_cuts(n, &[])
    }

    pub fn singletons(n: usize) -> Result<Self, GraphError> {
        Self::from_sizes(&vec![1; n])
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total number of elements partitioned.
    pub fn n(&self) -> usize {
        *self.bounds.last().unwrap()
    }

    pub fn part(&self, i: usize) -> Interval {
        Interval {
            lo: self.bounds[i],
            hi: self.bounds[i + 1],
        }
    }

    pub fn parts(&self) -> impl Iterator<Item = Interval> + '_ {
        (0..self.len()).map(|i| self.part(i))
    }

    /// Index of the part containing `v`.
    pub fn part_of(&self, v: usize) -> usize {
        debug_assert!(v < self.n());
        match self.bounds.binary_search(&v) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    /// True if every part of `self` lies inside a part of `other`.
    pub fn refines(&self, other: &IntervalPartition) -> bool {
        self.n() == other.n() && other.bounds.iter().all(|b| self.bounds.contains(b))
    }

    /// Merges consecutive parts into `groups.len()` coarser parts; `groups`
    /// gives the number of original parts per merged part.
    pub fn coarsen(&self, groups: &[usize]) -> Result<Self, GraphError> {
        if groups.iter().sum::<usize>() != self.len() || groups.iter().any(|&g| g == 0) {
            return Err(GraphError::NotAPartition);
        }
        let mut bounds = vec![0];
        let mut at = 0;
        for &g in groups {
            at += g;
            bounds.push(self.bounds[at]);
        }
        Ok(IntervalPartition { bounds })
    }
}

/// Simple graph on vertices `0..n` in a fixed order.
#[derive(Clone, PartialEq, Eq)]
pub struct OrderedGraph {
    n: usize,
    rows: Vec<BitRow>,
}

impl fmt::Debug for OrderedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrderedGraph(n={}, edges=", self.n)?;
        f.debug_list().entries(self.edges()).finish()?;
        write!(f, ")")
    }
}

impl OrderedGraph {
    pub fn edgeless(n: usize) -> Self {
        OrderedGraph {
            n,
            rows: (0..n).map(|_| BitRow::new(n)).collect(),
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::edgeless(n);
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { v });
            }
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange { v: u.max(v), n });
            }
            g.rows[u].insert(v);
            g.rows[v].insert(u);
        }
        Ok(g)
    }

    /// Builds from a predicate on ordered pairs `u < v`.
    pub fn from_fn(n: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::edgeless(n);
        for u in 0..n {
            for v in u + 1..n {
                if adjacent(u, v) {
                    g.rows[u].insert(v);
                    g.rows[v].insert(u);
                }
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.rows[u].contains(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count()
    }

    pub fn neighbors(&self, v: usize) -> &BitRow {
        &self.rows[v]
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count()).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, lexicographic.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.rows[u].iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Induced subgraph on a strictly increasing vertex list.
    pub fn induced_subgraph(&self, vs: &[usize]) -> Result<OrderedGraph, GraphError> {
        for w in vs.windows(2) {
            if w[0] >= w[1] {
                return Err(GraphError::NotStrictlyIncreasing);
            }
        }
        if let Some(&last) = vs.last() {
            if last >= self.n {
                return Err(GraphError::VertexOutOfRange { v: last, n: self.n });
            }
        }
        Ok(OrderedGraph::from_fn(vs.len(), |i, j| {
            self.has_edge(vs[i], vs[j])
        }))
    }

    pub fn induced_on_interval(&self, iv: Interval) -> Result<OrderedGraph, GraphError> {
        let vs: Vec<usize> = iv.iter().collect();
        self.induced_subgraph(&vs)
    }

    /// Relabels so that new vertex `i` is old vertex `order[i]`.
    pub fn apply_order(&self, order: &[usize]) -> Result<OrderedGraph, GraphError> {
        if order.len() != self.n {
            return Err(GraphError::LengthMismatch {
                expected: self.n,
                got: order.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &v in order {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { v, n: self.n });
            }
            if seen[v] {
                return Err(GraphError::NotAPermutation);
            }
            seen[v] = true;
        }
        Ok(OrderedGraph::from_fn(self.n, |i, j| {
            self.has_edge(order[i], order[j])
        }))
    }

    pub fn complement(&self) -> OrderedGraph {
        OrderedGraph::from_fn(self.n, |u, v| !self.has_edge(u, v))
    }

    /// True if every vertex outside `xs` sees all of `xs` or none of it.
    pub fn is_module(&self, xs: &[usize]) -> Result<bool, GraphError> {
        let set = self.to_bitrow(xs)?;
        let size = set.count();
        for y in 0..self.n {
            if set.contains(y) {
                continue;
            }
            let hits = self.rows[y].intersection_count(&set);
            if hits != 0 && hits != size {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True if every vertex of `ys` outside `xs` sees all of `xs` or none.
    pub fn is_module_wrt(&self, xs: &[usize], ys: &[usize]) -> Result<bool, GraphError> {
        let set = self.to_bitrow(xs)?;
        let size = set.count();
        for &y in ys {
            if y >= self.n {
                return Err(GraphError::VertexOutOfRange { v: y, n: self.n });
            }
            if set.contains(y) {
                continue;
            }
            let hits = self.rows[y].intersection_count(&set);
            if hits != 0 && hits != size {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True iff the edge set of `self` equals the union of the edge sets of
    /// `parts` (all on the same vertex count).
    pub fn edge_union_cover(&self, parts: &[&OrderedGraph]) -> Result<bool, GraphError> {
        for p in parts {
            if p.n != self.n {
                return Err(GraphError::LengthMismatch {
                    expected: self.n,
                    got: p.n,
                });
            }
        }
        for u in 0..self.n {
            for v in u + 1..self.n {
                let union = parts.iter().any(|p| p.has_edge(u, v));
                if union != self.has_edge(u, v) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Connected components as sorted vertex lists, ordered by minimum vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for w in self.rows[v].iter() {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    fn to_bitrow(&self, xs: &[usize]) -> Result<BitRow, GraphError> {
        let mut set = BitRow::new(self.n);
        for &x in xs {
            if x >= self.n {
                return Err(GraphError::VertexOutOfRange { v: x, n: self.n });
            }
            set.insert(x);
        }
        Ok(set)
    }
}

/// Vertex coloring; `palette` is the number of distinct colors used.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Coloring {
    colors: Vec<usize>,
    palette: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>) -> Self {
        let mut distinct: Vec<usize> = colors.clone();
        distinct.sort_unstable();
        distinct.dedup();
        Coloring {
            colors,
            palette: distinct.len(),
        }
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    /// Renumbers colors to `0..palette` in order of first occurrence by value.
    pub fn normalized(&self) -> Coloring {
        let mut sorted: Vec<usize> = self.colors.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let map: BTreeMap<usize, usize> = sorted.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        Coloring::new(self.colors.iter().map(|c| map[c]).collect())
    }

    /// First improperly colored edge in lexicographic order, if any.
    pub fn first_violation(&self, g: &OrderedGraph) -> Option<(usize, usize)> {
        g.edges().find(|&(u, v)| self.colors[u] == self.colors[v])
    }

    pub fn is_proper(&self, g: &OrderedGraph) -> bool {
        self.colors.len() == g.n() && self.first_violation(g).is_none()
    }
}

/// Pairs two colorings pointwise and renumbers the occurring pairs densely.
///
/// Proper for any graph whose edge set is covered by the union of the two
/// graphs the inputs properly color.
pub fn product_coloring(c1: &Coloring, c2: &Coloring) -> Result<Coloring, GraphError> {
    if c1.len() != c2.len() {
        return Err(GraphError::LengthMismatch {
            expected: c1.len(),
            got: c2.len(),
        });
    }
    let mut pairs: Vec<(usize, usize)> = c1
        .colors
        .iter()
        .zip(&c2.colors)
        .map(|(&a, &b)| (a, b))
        .collect();
    let assigned = pairs.clone();
    pairs.sort_unstable();
    pairs.dedup();
    let index: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    Ok(Coloring::new(assigned.into_iter().map(|p| index[&p]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Five-cycle in the order whose decomposition tree is exercised across
    // the crate: edges AB, AC, BE, CD, DE on vertices A..E = 0..4.
    fn c5() -> OrderedGraph {
        OrderedGraph::from_edges(5, [(0, 1), (0, 2), (1, 4), (2, 3), (3, 4)]).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(matches!(
            OrderedGraph::from_edges(3, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            OrderedGraph::from_edges(3, [(1, 1)]),
            Err(GraphError::SelfLoop { .. })
        ));
        let g = c5();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edge_count(), 5);
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(0, 3));
    }

    #[test]
    fn edges_are_lexicographic() {
        let g = c5();
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 1), (0, 2), (1, 4), (2, 3), (3, 4)]
        );
    }

    #[test]
    fn induced_subgraph_of_c5_prefix_is_a_path() {
        let g = c5();
        let h = g.induced_subgraph(&[0, 1, 2]).unwrap();
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
        assert!(g.induced_subgraph(&[1, 0]).is_err());
        assert!(g.induced_subgraph(&[0, 0]).is_err());
    }

    #[test]
    fn module_checks_on_c5() {
        let g = c5();
        // B sees E but A does not, so the first half is not a module.
        assert!(!g.is_module(&[0, 1, 2]).unwrap());
        assert!(g.is_module(&[0, 1, 2, 3, 4]).unwrap());
        assert!(g.is_module(&[2]).unwrap());
        // With respect to {D} alone, {D,E}'s outside view of {A,B} is empty.
        assert!(g.is_module_wrt(&[0, 1], &[3]).unwrap());
        assert!(!g.is_module_wrt(&[0, 1], &[4]).unwrap());
    }

    #[test]
    fn module_iff_all_outside_singletons_agree() {
        let g = c5();
        for mask in 1u32..(1 << 5) {
            let xs: Vec<usize> = (0..5).filter(|&v| mask >> v & 1 == 1).collect();
            let whole = g.is_module(&xs).unwrap();
            let pointwise = (0..5)
                .filter(|v| !xs.contains(v))
                .all(|y| g.is_module_wrt(&xs, &[y]).unwrap());
            assert_eq!(whole, pointwise, "xs={xs:?}");
        }
    }

    #[test]
    fn apply_order_round_trips() {
        let g = c5();
        let order = [2, 0, 4, 1, 3];
        let h = g.apply_order(&order).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(h.has_edge(i, j), g.has_edge(order[i], order[j]));
            }
        }
        let mut inverse = [0; 5];
        for (i, &v) in order.iter().enumerate() {
            inverse[v] = i;
        }
        assert_eq!(h.apply_order(&inverse).unwrap(), g);
        assert!(g.apply_order(&[0, 0, 1, 2, 3]).is_err());
        assert!(g.apply_order(&[0, 1]).is_err());
    }

    #[test]
    fn edge_union_cover_detects_missing_and_extra() {
        let g = c5();
        let odd = OrderedGraph::from_edges(5, [(0, 1), (0, 2), (3, 4)]).unwrap();
        let even = OrderedGraph::from_edges(5, [(1, 4), (2, 3)]).unwrap();
        assert!(g.edge_union_cover(&[&odd, &even]).unwrap());
        assert!(!g.edge_union_cover(&[&odd]).unwrap());
        let extra = OrderedGraph::from_edges(5, [(0, 4)]).unwrap();
        assert!(!g.edge_union_cover(&[&odd, &even, &extra]).unwrap());
    }

    #[test]
    fn components_of_disconnected_graph() {
        let g = OrderedGraph::from_edges(6, [(0, 3), (1, 4)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 3], vec![1, 4], vec![2], vec![5]]);
    }

    #[test]
    fn interval_partition_basics() {
        let p = IntervalPartition::from_cuts(10, &[3, 7]).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.part(1), Interval { lo: 3, hi: 7 });
        assert_eq!(p.part_of(0), 0);
        assert_eq!(p.part_of(3), 1);
        assert_eq!(p.part_of(9), 2);
        assert!(IntervalPartition::from_cuts(10, &[7, 3]).is_err());
        assert!(IntervalPartition::from_cuts(10, &[10]).is_err());
        let q = IntervalPartition::singletons(10).unwrap();
        assert!(q.refines(&p));
        assert!(!p.refines(&q));
    }

    #[test]
    fn coarsen_merges_consecutive_parts() {
        let p = IntervalPartition::from_sizes(&[2, 3, 1, 4]).unwrap();
        let c = p.coarsen(&[2, 2]).unwrap();
        assert_eq!(c.bounds(), &[0, 5, 10]);
        assert!(p.coarsen(&[3, 2]).is_err());
    }

    #[test]
    fn coloring_palette_and_properness() {
        let g = c5();
        let c = Coloring::new(vec![0, 1, 1, 0, 2]);
        assert_eq!(c.palette(), 3);
        assert!(c.is_proper(&g));
        let bad = Coloring::new(vec![0, 1, 1, 0, 0]);
        assert_eq!(bad.first_violation(&g), Some((3, 4)));
        let sparse = Coloring::new(vec![7, 3, 7]);
        assert_eq!(sparse.normalized().colors(), &[1, 0, 1]);
    }

    #[test]
    fn product_coloring_is_dense_and_proper_on_union() {
        let odd = OrderedGraph::from_edges(5, [(0, 1), (0, 2), (3, 4)]).unwrap();
        let even = OrderedGraph::from_edges(5, [(1, 4), (2, 3)]).unwrap();
        let g = c5();
        let c1 = Coloring::new(vec![0, 1, 1, 0, 1]);
        let c2 = Coloring::new(vec![0, 0, 0, 1, 1]);
        assert!(c1.is_proper(&odd));
        assert!(c2.is_proper(&even));
        let prod = product_coloring(&c1, &c2).unwrap();
        assert!(prod.is_proper(&g));
        assert!(prod.palette() <= c1.palette() * c2.palette());
    }
}
