//! Substitution trees: rooted trees whose internal nodes carry a graph on
//! their ordered children.
//!
//! The realization has one vertex per leaf (numbered left to right) and an
//! edge between two leaves exactly when the children of their closest common
//! ancestor that lie on the two root paths are adjacent in that ancestor's
//! node graph. This generalizes modular substitution: substituting a graph
//! for a vertex is a two-level tree.
//!
//! Depth counts, for each node, how many strict ancestors are not isolated
//! in their own parent's node graph. The root has no parent, so it never
//! counts toward depth; that convention lives in [`SubstTree::is_isolated`]
//! alone. It is the one under which `omega_dp(root) >= depth + 1` holds for
//! every tree (an all-edgeless tree has clique number 1 and must have depth
//! 0) and under which the clique witness construction can always take the
//! parent of a counted ancestor.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::delayed::DelayedTree;
use crate::gen::Cotree;
use crate::graph::{Coloring, Interval, OrderedGraph};
use crate::oracles;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubstError {
    /// A node graph's vertex count differs from the node's child count.
    GraphSizeMismatch {
        children: usize,
        graph: usize,
    },
    /// An internal node was given a child id that does not exist yet.
    UnknownChild {
        child: usize,
    },
    /// A node was attached to two parents.
    ChildReused {
        child: usize,
    },
    /// An internal node was given no children.
    NoChildren,
    MissingRoot,
    RootIsAttached,
    /// A node other than the root has no parent.
    UnattachedNode {
        node: usize,
    },
    /// Two internal siblings are adjacent in the node graph of `node`.
    NotIndependent {
        node: usize,
    },
    /// The palette supplied for `node` is missing, sized wrong, or improper.
    ImproperPalette {
        node: usize,
    },
    PaletteCountMismatch {
        expected: usize,
        got: usize,
    },
    /// A leaf restriction was asked for an empty or invalid vertex set.
    BadVertexSet,
}

impl fmt::Display for SubstError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubstError::GraphSizeMismatch { children, graph } => write!(
                f,
                "node graph has {graph} vertices but the node has {children} children"
            ),
            SubstError::UnknownChild { child } => write!(f, "unknown child id {child}"),
            SubstError::ChildReused { child } => write!(f, "node {child} already has a parent"),
            SubstError::NoChildren => write!(f, "internal nodes need at least one child"),
            SubstError::MissingRoot => write!(f, "root id is out of range"),
            SubstError::RootIsAttached => write!(f, "designated root has a parent"),
            SubstError::UnattachedNode { node } => write!(f, "node {node} is not attached"),
            SubstError::NotIndependent { node } => {
                write!(f, "two internal siblings are adjacent under node {node}")
            }
            SubstError::ImproperPalette { node } => {
                write!(f, "palette for node {node} is not a proper coloring")
            }
            SubstError::PaletteCountMismatch { expected, got } => {
                write!(f, "expected {expected} palettes, got {got}")
            }
            SubstError::BadVertexSet => write!(f, "vertex set is empty or not strictly increasing"),
        }
    }
}

/// One node of a substitution tree.
#[derive(Debug, Clone)]
pub struct SubstNode {
    pub parent: Option<usize>,
    /// Ordered children; empty exactly for leaves.
    pub children: Vec<usize>,
    /// Graph on the children (vertex i = i-th child); 0 vertices for leaves.
    pub graph: OrderedGraph,
    /// Realization vertices below this node, a run of consecutive leaf ranks.
    pub span: Interval,
}

impl SubstNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// The realization vertex of a leaf node.
    pub fn vertex(&self) -> Option<usize> {
        if self.is_leaf() {
            Some(self.span.lo)
        } else {
            None
        }
    }
}

/// Builds a tree bottom up; children must be created before their parent,
/// so child ids are always smaller than parent ids.
#[derive(Debug, Default)]
pub struct SubstTreeBuilder {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    graphs: Vec<OrderedGraph>,
}

impl SubstTreeBuilder {
    pub fn new() -> Self {
        SubstTreeBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn leaf(&mut self) -> usize {
        self.parent.push(None);
        self.children.push(Vec::new());
        self.graphs.push(OrderedGraph::edgeless(0));
        self.parent.len() - 1
    }

    pub fn internal(
        &mut self,
        children: Vec<usize>,
        graph: OrderedGraph,
    ) -> Result<usize, SubstError> {
        if children.is_empty() {
            return Err(SubstError::NoChildren);
        }
        if graph.n() != children.len() {
            return Err(SubstError::GraphSizeMismatch {
                children: children.len(),
                graph: graph.n(),
            });
        }
        for &c in &children {
            if c >= self.parent.len() {
                return Err(SubstError::UnknownChild { child: c });
            }
            if self.parent[c].is_some() {
                return Err(SubstError::ChildReused { child: c });
            }
        }
        let id = self.parent.len();
        for &c in &children {
            self.parent[c] = Some(id);
        }
        self.parent.push(None);
        self.children.push(children);
        self.graphs.push(graph);
        Ok(id)
    }

    pub fn finish(self, root: usize) -> Result<SubstTree, SubstError> {
        let len = self.parent.len();
        if root >= len {
            return Err(SubstError::MissingRoot);
        }
        if self.parent[root].is_some() {
            return Err(SubstError::RootIsAttached);
        }
        for v in 0..len {
            if v != root && self.parent[v].is_none() {
                return Err(SubstError::UnattachedNode { node: v });
            }
        }
        // Parent ids exceed child ids, so parent chains strictly increase and
        // end at the unique parentless node: the structure is a tree on root.
        let mut spans = vec![(0usize, 0usize); len];
        let mut leaves = Vec::new();
        let mut next = 0usize;
        let mut stack = vec![(root, false)];
        while let Some((x, processed)) = stack.pop() {
            if processed {
                let first = self.children[x][0];
                let last = *self.children[x].last().expect("internal nodes have children");
                spans[x] = (spans[first].0, spans[last].1);
            } else if self.children[x].is_empty() {
                spans[x] = (next, next + 1);
                leaves.push(x);
                next += 1;
            } else {
                stack.push((x, true));
                for &c in self.children[x].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        let nodes = self
            .parent
            .into_iter()
            .zip(self.children)
            .zip(self.graphs)
            .enumerate()
            .map(|(x, ((parent, children), graph))| SubstNode {
                parent,
                children,
                graph,
                span: Interval::new(spans[x].0, spans[x].1).expect("every node spans a leaf"),
            })
            .collect();
        Ok(SubstTree {
            nodes,
            root,
            leaves,
        })
    }
}

/// Per-node isolation flags and depths.
#[derive(Debug, Clone)]
pub struct DepthInfo {
    /// True when the node is isolated in its parent's node graph. The root
    /// carries `true`: it has no parent, so it never counts toward depth.
    pub isolated: Vec<bool>,
    /// Number of non-isolated strict ancestors, per node.
    pub depth: Vec<usize>,
    /// Maximum depth over the leaves.
    pub tree_depth: usize,
    /// Leftmost leaf node attaining `tree_depth`.
    pub deepest_leaf: usize,
}

#[derive(Debug, Clone)]
pub struct SubstTree {
    nodes: Vec<SubstNode>,
    root: usize,
    /// Leaf node ids in left-to-right order; index = realization vertex.
    leaves: Vec<usize>,
}

impl SubstTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of realization vertices.
    pub fn n(&self) -> usize {
        self.leaves.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, id: usize) -> &SubstNode {
        &self.nodes[id]
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        self.nodes[id].is_leaf()
    }

    /// Leaf node ids in vertex order.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    /// Realizes the tree: vertex per leaf, edges by the closest-ancestor rule.
    ///
    /// Every leaf pair is counted at its closest common ancestor, so pushing
    /// the expanded span pairs of each node graph edge covers each edge once.
    pub fn realize(&self) -> OrderedGraph {
        let mut edges = Vec::new();
        for node in &self.nodes {
            for (i, j) in node.graph.edges() {
                let a = self.nodes[node.children[i]].span;
                let b = self.nodes[node.children[j]].span;
                for u in a.iter() {
                    for v in b.iter() {
                        edges.push((u, v));
                    }
                }
            }
        }
        OrderedGraph::from_edges(self.leaves.len(), edges).expect("spans are disjoint")
    }

    /// True when no node graph joins two internal children.
    pub fn is_independent(&self) -> bool {
        self.first_dependent_node().is_none()
    }

    fn first_dependent_node(&self) -> Option<usize> {
        for (x, node) in self.nodes.iter().enumerate() {
            for (i, j) in node.graph.edges() {
                let a = &self.nodes[node.children[i]];
                let b = &self.nodes[node.children[j]];
                if !a.is_leaf() && !b.is_leaf() {
                    return Some(x);
                }
            }
        }
        None
    }

    /// True when the node does not count toward the depth of its descendants.
    ///
    /// A non-root node is isolated exactly when it has no neighbor in its
    /// parent's node graph. The root has no parent and is treated as
    /// isolated; this is the only place that convention is encoded.
    pub fn is_isolated(&self, id: usize) -> bool {
        match self.nodes[id].parent {
            None => true,
            Some(p) => {
                let pos = self.child_position(p, id);
                self.nodes[p].graph.degree(pos) == 0
            }
        }
    }

    fn child_position(&self, parent: usize, child: usize) -> usize {
        self.nodes[parent]
            .children
            .iter()
            .position(|&c| c == child)
            .expect("child lists match parent pointers")
    }

    pub fn depth_info(&self) -> DepthInfo {
        let len = self.nodes.len();
        let isolated: Vec<bool> = (0..len).map(|x| self.is_isolated(x)).collect();
        let mut depth = vec![0usize; len];
        let mut stack = vec![self.root];
        while let Some(x) = stack.pop() {
            let step = usize::from(!isolated[x]);
            for &c in &self.nodes[x].children {
                depth[c] = depth[x] + step;
                stack.push(c);
            }
        }
        let mut tree_depth = 0;
        let mut deepest_leaf = self.leaves[0];
        for &l in &self.leaves {
            if depth[l] > tree_depth {
                tree_depth = depth[l];
                deepest_leaf = l;
            }
        }
        DepthInfo {
            isolated,
            depth,
            tree_depth,
            deepest_leaf,
        }
    }

    /// Returns `tree depth + 1` vertices forming a clique of the realization.
    ///
    /// Follows the witness construction: take a deepest leaf, walk its
    /// counted ancestors y, pick for each a neighbor w of y in the parent's
    /// node graph, and take the leftmost leaf below each w. The clique is
    /// checked against the realization before returning.
    pub fn clique_witness(&self) -> Vec<usize> {
        let info = self.depth_info();
        let x = info.deepest_leaf;
        let mut picks = vec![self.nodes[x].span.lo];
        // Strict ancestors of x; the root is isolated by convention, so
        // every counted ancestor has a parent to pick the neighbor from.
        let mut ancestor = self.nodes[x].parent;
        while let Some(y) = ancestor {
            if !info.isolated[y] {
                let z = self.nodes[y].parent.expect("counted ancestors are not the root");
                let pos = self.child_position(z, y);
                let w_pos = self.nodes[z]
                    .graph
                    .neighbors(pos)
                    .iter()
                    .next()
                    .expect("non-isolated children have a neighbor");
                let w = self.nodes[z].children[w_pos];
                picks.push(self.nodes[w].span.lo);
            }
            ancestor = self.nodes[y].parent;
        }
        picks.sort_unstable();
        let g = self.realize();
        assert_eq!(picks.len(), info.tree_depth + 1, "one pick per counted ancestor");
        for a in 0..picks.len() {
            for b in a + 1..picks.len() {
                assert!(
                    g.has_edge(picks[a], picks[b]),
                    "witness vertices are pairwise adjacent"
                );
            }
        }
        picks
    }

    /// Exact clique number of every subtree's realization.
    ///
    /// A maximum clique of a substitution picks a clique of the node graph
    /// and, inside each picked child, a maximum clique of that child, so the
    /// subtree value is the maximum weight clique of the node graph with
    /// child weights equal to the child values. Leaves weigh 1.
    pub fn omega_dp(&self) -> Vec<usize> {
        let mut omega = vec![1usize; self.nodes.len()];
        // Children precede parents in id order.
        for x in 0..self.nodes.len() {
            if self.nodes[x].is_leaf() {
                continue;
            }
            let weights: Vec<usize> = self.nodes[x].children.iter().map(|&c| omega[c]).collect();
            omega[x] = weighted_max_clique(&self.nodes[x].graph, &weights);
        }
        omega
    }

    /// Colors the realization of an independent tree with
    /// `c(v) = (depth(v), palette_of_parent(v))`, densely renumbered.
    ///
    /// `palettes` holds one coloring per node id; entries for leaves are
    /// ignored. Uses at most `(tree depth + 1) * max palette size` colors.
    pub fn color_independent(&self, palettes: &[Coloring]) -> Result<Coloring, SubstError> {
        if palettes.len() != self.nodes.len() {
            return Err(SubstError::PaletteCountMismatch {
                expected: self.nodes.len(),
                got: palettes.len(),
            });
        }
        if let Some(node) = self.first_dependent_node() {
            return Err(SubstError::NotIndependent { node });
        }
        let mut max_palette = 1usize;
        for (x, node) in self.nodes.iter().enumerate() {
            if node.is_leaf() {
                continue;
            }
            if !palettes[x].is_proper(&node.graph) {
                return Err(SubstError::ImproperPalette { node: x });
            }
            max_palette = max_palette.max(palettes[x].palette());
        }
        let info = self.depth_info();
        let mut colors = vec![0usize; self.leaves.len()];
        for &l in &self.leaves {
            let v = self.nodes[l].span.lo;
            match self.nodes[l].parent {
                None => colors[v] = 0,
                Some(z) => {
                    let pos = self.child_position(z, l);
                    colors[v] = info.depth[l] * max_palette + palettes[z].color(pos);
                }
            }
        }
        let coloring = Coloring::new(colors).normalized();
        assert!(
            coloring.is_proper(&self.realize()),
            "independent trees admit the depth pair coloring"
        );
        Ok(coloring)
    }

    /// Restricts the tree to a strictly increasing, nonempty set of
    /// realization vertices. Nodes with no kept leaf are dropped, node
    /// graphs are induced on the surviving children, and single-child
    /// chains are kept as they are.
    ///
    /// The realization of the restriction equals the induced subgraph of
    /// the original realization on `keep`.
    pub fn restrict_to_leaves(&self, keep: &[usize]) -> Result<SubstRestriction, SubstError> {
        if keep.is_empty()
            || keep.windows(2).any(|w| w[0] >= w[1])
            || keep[keep.len() - 1] >= self.leaves.len()
        {
            return Err(SubstError::BadVertexSet);
        }
        let mut kept_vertex = vec![false; self.leaves.len()];
        for &v in keep {
            kept_vertex[v] = true;
        }
        let mut new_id: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut builder = SubstTreeBuilder::new();
        let mut node_map = Vec::new();
        let mut kept_children = Vec::new();
        for (old, node) in self.nodes.iter().enumerate() {
            if node.is_leaf() {
                if kept_vertex[node.span.lo] {
                    new_id[old] = Some(builder.leaf());
                    node_map.push(old);
                    kept_children.push(Vec::new());
                }
                continue;
            }
            let mut kids = Vec::new();
            let mut positions = Vec::new();
            for (pos, &c) in node.children.iter().enumerate() {
                if let Some(nc) = new_id[c] {
                    kids.push(nc);
                    positions.push(pos);
                }
            }
            if kids.is_empty() {
                continue;
            }
            let graph = node
                .graph
                .induced_subgraph(&positions)
                .expect("positions are strictly increasing");
            new_id[old] = Some(builder.internal(kids, graph)?);
            node_map.push(old);
            kept_children.push(positions);
        }
        let root = new_id[self.root].expect("kept leaves have the root above them");
        let tree = builder.finish(root)?;
        Ok(SubstRestriction {
            tree,
            node_map,
            kept_children,
            vertex_map: keep.to_vec(),
        })
    }

    /// Colors the realization by the substitution-closure recursion.
    ///
    /// Connected components are colored separately with shared color
    /// indices, so the total equals the worst component. A connected graph
    /// is handled by tree depth: depth 0 realizes a single node graph on
    /// leaf children; depth 1 splits the top children into X (subtree
    /// clique number at most the square root of the whole, by integer
    /// comparison) and Y, coloring each side as a product of a base
    /// coloring with recursive subtree colorings, sides on disjoint
    /// palettes; depth 2 and beyond takes the heavy nodes
    /// X = {x : 2 omega(G_x) > omega(G)}, colors the independent
    /// decomposition on X united with its children via
    /// [`SubstTree::color_independent`], buckets the substituted subtrees
    /// dyadically by clique number, and gives each bucket a disjoint
    /// palette of product colors.
    ///
    /// The result is verified proper and reported next to the budget
    /// `omega^(2k+3)`, where `k` is the exponent claimed for the base
    /// coloring procedure.
    pub fn color_substitution<B: NodeGraphColorer + ?Sized>(
        &self,
        base: &mut B,
        k: u32,
    ) -> Result<SubstColoring, SubstError> {
        let view = View::whole(self);
        let coloring = color_subst_view(&view, base)?;
        let omega = self.omega_dp()[self.root];
        let budget = (omega as u128).pow(2 * k + 3);
        assert!(
            coloring.is_proper(&self.realize()),
            "substitution coloring is proper"
        );
        Ok(SubstColoring { coloring, budget })
    }
}

/// A restriction of a tree to a leaf subset, with maps back to the source.
#[derive(Debug, Clone)]
pub struct SubstRestriction {
    pub tree: SubstTree,
    /// New node id to old node id.
    pub node_map: Vec<usize>,
    /// New node id to the kept positions in the old child list.
    pub kept_children: Vec<Vec<usize>>,
    /// New vertex to old vertex.
    pub vertex_map: Vec<usize>,
}

/// Result of the substitution-closure coloring.
#[derive(Debug, Clone)]
pub struct SubstColoring {
    pub coloring: Coloring,
    /// `omega^(2k+3)` for the tree's clique number.
    pub budget: u128,
}

impl SubstColoring {
    pub fn colors_used(&self) -> usize {
        self.coloring.palette()
    }
}

/// Supplies proper colorings of node graphs, or of their induced subgraphs
/// when the recursion has discarded some children.
///
/// `node` is the node id in the tree the coloring was requested for and
/// `keep` lists the child positions of that node that survive, so stateful
/// colorers can recover which graph they are looking at. `graph` is the
/// node graph induced on `keep`.
pub trait NodeGraphColorer {
    fn color_node_graph(
        &mut self,
        node: usize,
        keep: &[usize],
        graph: &OrderedGraph,
    ) -> Result<Coloring, SubstError>;
}

/// Colors node graphs exactly when small, greedily otherwise.
#[derive(Debug, Default)]
pub struct ExactNodeColorer;

impl NodeGraphColorer for ExactNodeColorer {
    fn color_node_graph(
        &mut self,
        _node: usize,
        _keep: &[usize],
        graph: &OrderedGraph,
    ) -> Result<Coloring, SubstError> {
        match oracles::exact_chromatic_number(graph) {
            Ok((_, coloring)) => Ok(coloring),
            Err(_) => Ok(greedy_coloring(graph)),
        }
    }
}

fn greedy_coloring(g: &OrderedGraph) -> Coloring {
    let mut colors = vec![0usize; g.n()];
    for v in 0..g.n() {
        let mut used = vec![false; v + 1];
        for u in g.neighbors(v).iter() {
            if u < v {
                used[colors[u]] = true;
            }
        }
        colors[v] = (0..).find(|&c| !used[c]).expect("some color is free");
    }
    Coloring::new(colors)
}

fn weighted_max_clique(g: &OrderedGraph, weights: &[usize]) -> usize {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]));
    let mut best = 0;
    let mut chosen = Vec::new();
    extend_weighted(g, weights, &order, 0, 0, &mut chosen, &mut best);
    best
}

fn extend_weighted(
    g: &OrderedGraph,
    weights: &[usize],
    cand: &[usize],
    start: usize,
    current: usize,
    chosen: &mut Vec<usize>,
    best: &mut usize,
) {
    if current > *best {
        *best = current;
    }
    let rest: usize = cand[start..].iter().map(|&v| weights[v]).sum();
    if current + rest <= *best {
        return;
    }
    for i in start..cand.len() {
        let v = cand[i];
        if chosen.iter().any(|&u| !g.has_edge(u, v)) {
            continue;
        }
        chosen.push(v);
        extend_weighted(g, weights, cand, i + 1, current + weights[v], chosen, best);
        chosen.pop();
    }
}

/// A tree slice that remembers, for every node, the node id and child
/// positions of the tree `color_substitution` was originally called on, so
/// base colorers always see original coordinates.
struct View<'a> {
    tree: &'a SubstTree,
    node_map: Vec<usize>,
    keep_map: Vec<Vec<usize>>,
}

/// An owned restriction of a view.
struct OwnedView {
    tree: SubstTree,
    node_map: Vec<usize>,
    keep_map: Vec<Vec<usize>>,
}

impl<'a> View<'a> {
    fn whole(tree: &'a SubstTree) -> View<'a> {
        let node_map = (0..tree.len()).collect();
        let keep_map = (0..tree.len())
            .map(|x| (0..tree.node(x).children.len()).collect())
            .collect();
        View {
            tree,
            node_map,
            keep_map,
        }
    }

    fn of(owned: &'a OwnedView) -> View<'a> {
        View {
            tree: &owned.tree,
            node_map: owned.node_map.clone(),
            keep_map: owned.keep_map.clone(),
        }
    }

    /// Restricts to a vertex subset, composing the coordinate maps.
    /// Returns the owned view and the map from new to old vertices.
    fn restricted(&self, keep: &[usize]) -> Result<(OwnedView, Vec<usize>), SubstError> {
        let r = self.tree.restrict_to_leaves(keep)?;
        let node_map: Vec<usize> = r.node_map.iter().map(|&o| self.node_map[o]).collect();
        let keep_map: Vec<Vec<usize>> = r
            .node_map
            .iter()
            .zip(&r.kept_children)
            .map(|(&o, kp)| kp.iter().map(|&p| self.keep_map[o][p]).collect())
            .collect();
        Ok((
            OwnedView {
                tree: r.tree,
                node_map,
                keep_map,
            },
            r.vertex_map,
        ))
    }

    fn color_base<B: NodeGraphColorer + ?Sized>(
        &self,
        base: &mut B,
        node: usize,
        positions: &[usize],
    ) -> Result<Coloring, SubstError> {
        let graph = self
            .tree
            .node(node)
            .graph
            .induced_subgraph(positions)
            .expect("positions are strictly increasing");
        let keep: Vec<usize> = positions.iter().map(|&p| self.keep_map[node][p]).collect();
        let coloring = base.color_node_graph(self.node_map[node], &keep, &graph)?;
        if !coloring.is_proper(&graph) {
            return Err(SubstError::ImproperPalette {
                node: self.node_map[node],
            });
        }
        Ok(coloring.normalized())
    }
}

fn color_subst_view<B: NodeGraphColorer + ?Sized>(
    view: &View<'_>,
    base: &mut B,
) -> Result<Coloring, SubstError> {
    let t = view.tree;
    let n = t.n();
    if n == 1 {
        return Ok(Coloring::new(vec![0]));
    }
    let g = t.realize();
    let comps = g.components();
    if comps.len() > 1 {
        // Shared color indices across components: counts are maxed.
        let mut colors = vec![0usize; n];
        for comp in comps {
            let mut comp = comp;
            comp.sort_unstable();
            let (sub, vmap) = view.restricted(&comp)?;
            let c = color_subst_view(&View::of(&sub), base)?;
            for (i, &v) in vmap.iter().enumerate() {
                colors[v] = c.color(i);
            }
        }
        let coloring = Coloring::new(colors).normalized();
        assert!(coloring.is_proper(&g), "component colorings share no edges");
        return Ok(coloring);
    }
    let omegas = t.omega_dp();
    let omega = omegas[t.root()];
    if omega <= 1 {
        return Ok(Coloring::new(vec![0; n]).normalized());
    }
    let info = t.depth_info();
    let coloring = match info.tree_depth {
        0 => color_depth_zero(view, base, &info)?,
        1 => color_depth_one(view, base, &omegas, omega)?,
        _ => color_deep(view, base, &omegas, omega)?,
    };
    assert!(coloring.is_proper(&g), "every recursion level is proper");
    Ok(coloring.normalized())
}

/// Depth 0: every node graph edge joins two leaf children, so the graph is
/// a disjoint union of node graphs induced on leaf children. Those blocks
/// share color indices.
fn color_depth_zero<B: NodeGraphColorer + ?Sized>(
    view: &View<'_>,
    base: &mut B,
    info: &DepthInfo,
) -> Result<Coloring, SubstError> {
    let t = view.tree;
    let _ = info;
    let mut colors = vec![0usize; t.n()];
    for x in 0..t.len() {
        let node = t.node(x);
        if node.is_leaf() {
            continue;
        }
        let positions: Vec<usize> = node
            .children
            .iter()
            .enumerate()
            .filter(|(_, &c)| t.is_leaf(c))
            .map(|(p, _)| p)
            .collect();
        if positions.is_empty() {
            continue;
        }
        let alpha = view.color_base(base, x, &positions)?;
        for (slot, &p) in positions.iter().enumerate() {
            let v = t.node(node.children[p]).span.lo;
            colors[v] = alpha.color(slot);
        }
    }
    Ok(Coloring::new(colors))
}

/// Depth 1: at the first branching node, children split into X (subtree
/// clique number squared at most the whole clique number) and Y. Each side
/// is the product of a base coloring of the induced node graph with
/// recursive colorings of the child subtrees; the sides use disjoint
/// palettes.
fn color_depth_one<B: NodeGraphColorer + ?Sized>(
    view: &View<'_>,
    base: &mut B,
    omegas: &[usize],
    omega: usize,
) -> Result<Coloring, SubstError> {
    let t = view.tree;
    assert!(omega >= 2, "depth 1 forces an edge in the realization");
    let mut top = t.root();
    while t.node(top).children.len() == 1 {
        top = t.node(top).children[0];
    }
    assert!(!t.is_leaf(top), "a branching node exists when n >= 2");
    let children = &t.node(top).children;
    let mut sides: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (p, &c) in children.iter().enumerate() {
        let w = omegas[c];
        if w * w <= omega {
            sides[0].push(p);
        } else {
            sides[1].push(p);
        }
    }
    let mut colors = vec![0usize; t.n()];
    let mut offset = 0usize;
    for side in sides.iter().filter(|s| !s.is_empty()) {
        let alpha = view.color_base(base, top, side)?;
        let mut subs = Vec::with_capacity(side.len());
        let mut max_sub = 1usize;
        for &p in side {
            let span = t.node(children[p]).span;
            let keeps: Vec<usize> = span.iter().collect();
            let (sub, vmap) = view.restricted(&keeps)?;
            let c = color_subst_view(&View::of(&sub), base)?;
            max_sub = max_sub.max(c.palette());
            subs.push((vmap, c));
        }
        for (slot, (vmap, c)) in subs.iter().enumerate() {
            for (i, &v) in vmap.iter().enumerate() {
                colors[v] = offset + alpha.color(slot) * max_sub + c.color(i);
            }
        }
        offset += alpha.palette() * max_sub;
    }
    Ok(Coloring::new(colors))
}

/// Depth 2 and beyond: the heavy nodes X = {x : 2 omega(G_x) > omega} form
/// a subtree; the tree on X and its children realizes an independent
/// decomposition H whose leaves stand for the substituted subtrees. Those
/// subtrees are bucketed dyadically by clique number and each bucket is
/// colored by the product of a `color_independent` coloring of its slice of
/// H with recursive subtree colorings, buckets on disjoint palettes.
fn color_deep<B: NodeGraphColorer + ?Sized>(
    view: &View<'_>,
    base: &mut B,
    omegas: &[usize],
    omega: usize,
) -> Result<Coloring, SubstError> {
    let t = view.tree;
    assert!(omega >= 3, "depth 2 forces a triangle in the realization");
    let heavy: Vec<bool> = (0..t.len()).map(|x| 2 * omegas[x] > omega).collect();
    assert!(heavy[t.root()], "the root subtree is the whole graph");

    // Build H = realize(T[X united with children of X]).
    let mut new_id: Vec<Option<usize>> = vec![None; t.len()];
    let mut builder = SubstTreeBuilder::new();
    let mut local = Vec::new();
    for x in 0..t.len() {
        let in_h = heavy[x]
            || t.node(x)
                .parent
                .is_some_and(|p| heavy[p]);
        if !in_h {
            continue;
        }
        if heavy[x] {
            let kids: Vec<usize> = t.node(x)
                .children
                .iter()
                .map(|&c| new_id[c].expect("children of heavy nodes are kept"))
                .collect();
            new_id[x] = Some(builder.internal(kids, t.node(x).graph.clone())?);
        } else {
            new_id[x] = Some(builder.leaf());
        }
        local.push(x);
    }
    let h_root = new_id[t.root()].expect("the root is heavy");
    let h_tree = builder.finish(h_root)?;
    assert!(
        h_tree.is_independent(),
        "two adjacent heavy siblings would exceed the clique number"
    );
    let h_view_node_map: Vec<usize> = local.iter().map(|&o| view.node_map[o]).collect();
    let h_view_keep_map: Vec<Vec<usize>> = local.iter().map(|&o| view.keep_map[o].clone()).collect();
    let h_owned = OwnedView {
        tree: h_tree,
        node_map: h_view_node_map,
        keep_map: h_view_keep_map,
    };
    // H vertex -> node of the current tree it stands for.
    let h_leaf_node: Vec<usize> = h_owned
        .tree
        .leaves()
        .iter()
        .map(|&l| local[l])
        .collect();

    // Dyadic buckets by subtree clique number: bucket j holds the leaves
    // with omega / 2^(j+1) < omega_i <= omega / 2^j, j in 1..=floor(log2).
    let m = omega.ilog2() as usize;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
    for (hv, &y) in h_leaf_node.iter().enumerate() {
        let wi = omegas[y];
        assert!(2 * wi <= omega, "H leaves are light");
        let j = (omega / wi).ilog2() as usize;
        assert!((1..=m).contains(&j), "every light subtree lands in a bucket");
        buckets[j].push(hv);
    }

    let h_view = View::of(&h_owned);
    let mut colors = vec![0usize; t.n()];
    let mut offset = 0usize;
    for bucket in buckets.iter().filter(|b| !b.is_empty()) {
        let (hj_owned, hj_vmap) = h_view.restricted(bucket)?;
        let hj_view = View::of(&hj_owned);
        // Base palettes for the internal nodes of this slice of H.
        let mut palettes = vec![Coloring::new(Vec::new()); hj_owned.tree.len()];
        for x in 0..hj_owned.tree.len() {
            if hj_owned.tree.is_leaf(x) {
                continue;
            }
            let all: Vec<usize> = (0..hj_owned.tree.node(x).children.len()).collect();
            palettes[x] = hj_view.color_base(base, x, &all)?;
        }
        let hj_coloring = hj_owned.tree.color_independent(&palettes)?;
        // Recursive colorings of the substituted subtrees, shared palette.
        let mut subs = Vec::with_capacity(bucket.len());
        let mut max_sub = 1usize;
        for &hv in &hj_vmap {
            let y = h_leaf_node[hv];
            let keeps: Vec<usize> = t.node(y).span.iter().collect();
            let (sub, vmap) = view.restricted(&keeps)?;
            let c = color_subst_view(&View::of(&sub), base)?;
            max_sub = max_sub.max(c.palette());
            subs.push((vmap, c));
        }
        for (slot, _) in hj_vmap.iter().enumerate() {
            let (vmap, c) = &subs[slot];
            for (i, &v) in vmap.iter().enumerate() {
                colors[v] = offset + hj_coloring.color(slot) * max_sub + c.color(i);
            }
        }
        offset += hj_coloring.palette() * max_sub;
    }
    Ok(Coloring::new(colors))
}

/// A substitution tree derived from a delayed decomposition tree, with the
/// delayed node each substitution node came from (`None` for the synthetic
/// root of the odd tree).
#[derive(Debug, Clone)]
pub struct DelayedSubstTree {
    pub tree: SubstTree,
    pub delayed_node: Vec<Option<usize>>,
}

/// Splits a delayed decomposition tree into its odd and even substitution
/// trees.
///
/// The kept-parity nodes become substitution nodes whose children are their
/// former grandchildren and whose node graph is the delayed tree's g(x);
/// parity-ending nodes (no grandchildren, hence singletons) become leaves.
/// The odd tree gets a synthetic edgeless root over the depth-1 nodes.
/// Realizing the pair gives exactly the odd/even edge split.
pub fn delayed_to_subst_trees(t: &DelayedTree) -> (DelayedSubstTree, DelayedSubstTree) {
    let mut even_builder = SubstTreeBuilder::new();
    let mut even_map = Vec::new();
    let even_root = parity_subtree(t, t.root(), &mut even_builder, &mut even_map);
    let even = DelayedSubstTree {
        tree: even_builder
            .finish(even_root)
            .expect("delayed trees are well formed"),
        delayed_node: even_map,
    };

    let mut odd_builder = SubstTreeBuilder::new();
    let mut odd_map = Vec::new();
    let kids: Vec<usize> = t
        .node(t.root())
        .children
        .iter()
        .map(|&c| parity_subtree(t, c, &mut odd_builder, &mut odd_map))
        .collect();
    let graph = OrderedGraph::edgeless(kids.len());
    let odd_root = odd_builder
        .internal(kids, graph)
        .expect("the root has children for n >= 1");
    odd_map.push(None);
    let odd = DelayedSubstTree {
        tree: odd_builder
            .finish(odd_root)
            .expect("delayed trees are well formed"),
        delayed_node: odd_map,
    };
    (odd, even)
}

fn parity_subtree(
    t: &DelayedTree,
    x: usize,
    builder: &mut SubstTreeBuilder,
    map: &mut Vec<Option<usize>>,
) -> usize {
    let grandchildren = t.grandchildren(x);
    if grandchildren.is_empty() {
        debug_assert_eq!(t.node(x).interval.len(), 1, "parity leaves are singletons");
        let id = builder.leaf();
        map.push(Some(x));
        return id;
    }
    let kids: Vec<usize> = grandchildren
        .iter()
        .map(|&gc| parity_subtree(t, gc, builder, map))
        .collect();
    let id = builder
        .internal(kids, t.node_graph(x))
        .expect("grandchildren are fresh nodes");
    map.push(Some(x));
    id
}

/// Builds the substitution tree of a cotree: binary internal nodes whose
/// node graph is an edge for series nodes and edgeless for parallel nodes.
pub fn from_cotree(cotree: &Cotree) -> SubstTree {
    let mut builder = SubstTreeBuilder::new();
    let root = cotree_subtree(cotree, &mut builder);
    builder.finish(root).expect("cotrees are well formed")
}

fn cotree_subtree(cotree: &Cotree, builder: &mut SubstTreeBuilder) -> usize {
    match cotree {
        Cotree::Leaf(_) => builder.leaf(),
        Cotree::Node { join, left, right } => {
            let l = cotree_subtree(left, builder);
            let r = cotree_subtree(right, builder);
            let graph = if *join {
                crate::gen::complete(2)
            } else {
                OrderedGraph::edgeless(2)
            };
            builder
                .internal(vec![l, r], graph)
                .expect("children are fresh nodes")
        }
    }
}

/// Random substitution tree with 1 to `max_leaves` leaves.
pub fn random_subst_tree(max_leaves: usize, seed: u64) -> SubstTree {
    random_tree(max_leaves, seed, false)
}

/// Random substitution tree whose node graphs never join two internal
/// children.
pub fn random_independent_tree(max_leaves: usize, seed: u64) -> SubstTree {
    random_tree(max_leaves, seed, true)
}

fn random_tree(max_leaves: usize, seed: u64, independent: bool) -> SubstTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_leaves.max(1));
    let mut builder = SubstTreeBuilder::new();
    let root = random_subtree(&mut builder, &mut rng, n, independent);
    builder.finish(root).expect("generated trees are well formed")
}

fn random_subtree(
    builder: &mut SubstTreeBuilder,
    rng: &mut ChaCha8Rng,
    n: usize,
    independent: bool,
) -> usize {
    if n == 1 {
        let leaf = builder.leaf();
        if rng.random_bool(0.15) {
            // Occasional unary node: an isolated single-child frame.
            return builder
                .internal(vec![leaf], OrderedGraph::edgeless(1))
                .expect("fresh leaf");
        }
        return leaf;
    }
    let k = rng.random_range(2..=n.min(4));
    let mut cuts = Vec::new();
    while cuts.len() < k - 1 {
        let c = rng.random_range(1..n);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(n);
    let kids: Vec<usize> = cuts
        .windows(2)
        .map(|w| random_subtree(builder, rng, w[1] - w[0], independent))
        .collect();
    let mut edges = Vec::new();
    for u in 0..k {
        for v in u + 1..k {
            let leaf_involved =
                builder.children[kids[u]].is_empty() || builder.children[kids[v]].is_empty();
            if (!independent || leaf_involved) && rng.random_bool(0.5) {
                edges.push((u, v));
            }
        }
    }
    let graph = OrderedGraph::from_edges(k, edges).expect("edges are in range");
    builder.internal(kids, graph).expect("children are fresh")
}
