//! Recursive coloring of graphs whose adjacency matrix, under the supplied
//! vertex order, has no d-almost mixed minor. The pipeline peels endpoint
//! classes until the interior is a module, decomposes the interior with a
//! delayed tree, and colors each node graph through local module frames:
//! mixed-pair classes, arrow orientations, left/right splits, and quotients
//! of right-module pieces colored recursively at d - 1.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::delayed::{local_module_partition, DelayedError, DelayedTree};
use crate::graph::{
    product_coloring, Coloring, GraphError, Interval, IntervalPartition, OrderedGraph,
};
use crate::matrix::{MatrixError, TriMatrix, ZoneOracle};
use crate::oracles::OracleError;
use crate::rmp::{
    is_pair_amf, lift_quotient_coloring, quotient, transversal_minor, validate_rmp,
    PairAmfReport, RMPartition, RmpError,
};
use crate::subst::{delayed_to_subst_trees, NodeGraphColorer, SubstError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AmfError {
    TooSmall { n: usize },
    InvalidParameter { d: usize },
    NotCograph,
    HasAlmostMixedMinor { d: usize },
    MixedPairInClass { i: usize, j: usize },
    Subst(SubstError),
    Rmp(RmpError),
    Graph(GraphError),
    Matrix(MatrixError),
    Delayed(DelayedError),
    Oracle(OracleError),
}

impl fmt::Display for AmfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmfError::TooSmall { n } => write!(f, "need at least two vertices, got {n}"),
            AmfError::InvalidParameter { d } => write!(f, "parameter d = {d} must be at least 2"),
            AmfError::NotCograph => write!(f, "graph is not a cograph"),
            AmfError::HasAlmostMixedMinor { d } => {
                write!(f, "adjacency matrix has a {d}-almost mixed minor")
            }
            AmfError::MixedPairInClass { i, j } => {
                write!(f, "local modules {i} and {j} of one class form a mixed pair")
            }
            AmfError::Subst(e) => write!(f, "{e}"),
            AmfError::Rmp(e) => write!(f, "{e}"),
            AmfError::Graph(e) => write!(f, "{e}"),
            AmfError::Matrix(e) => write!(f, "{e}"),
            AmfError::Delayed(e) => write!(f, "{e}"),
            AmfError::Oracle(e) => write!(f, "{e}"),
        }
    }
}

impl From<SubstError> for AmfError {
    fn from(e: SubstError) -> Self {
        AmfError::Subst(e)
    }
}

impl From<RmpError> for AmfError {
    fn from(e: RmpError) -> Self {
        AmfError::Rmp(e)
    }
}

impl From<GraphError> for AmfError {
    fn from(e: GraphError) -> Self {
        AmfError::Graph(e)
    }
}

impl From<MatrixError> for AmfError {
    fn from(e: MatrixError) -> Self {
        AmfError::Matrix(e)
    }
}

impl From<DelayedError> for AmfError {
    fn from(e: DelayedError) -> Self {
        AmfError::Delayed(e)
    }
}

impl From<OracleError> for AmfError {
    fn from(e: OracleError) -> Self {
        AmfError::Oracle(e)
    }
}

/// An ordered graph claimed to have no `d`-almost mixed minor.
#[derive(Debug, Clone)]
pub struct AmfInstance {
    pub graph: OrderedGraph,
    pub d: usize,
    /// Set when the absence of a `d`-almost mixed minor was exhaustively
    /// verified on construction.
    pub certified: bool,
}

impl AmfInstance {
    pub fn new(graph: OrderedGraph, d: usize) -> Self {
        AmfInstance {
            graph,
            d,
            certified: false,
        }
    }

    /// Verifies exhaustively that the adjacency matrix has no `d`-almost
    /// mixed minor before accepting the instance.
    pub fn certify(graph: OrderedGraph, d: usize) -> Result<Self, AmfError> {
        let m = TriMatrix::adjacency(&graph);
        if m.find_almost_mixed_minor(d)?.is_some() {
            return Err(AmfError::HasAlmostMixedMinor { d });
        }
        Ok(AmfInstance {
            graph,
            d,
            certified: true,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideTag {
    Neglected,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Backward,
}

/// Interval analysis used to color one node graph: local modules, the
/// stripped graph, mixed pairs, their coloring into classes, per-module
/// left/right tags and pairwise arrow orientations.
#[derive(Debug, Clone)]
pub struct LocalModuleFrame {
    pub interval: Interval,
    /// Local modules L_1..L_k as intervals of the host graph.
    pub modules: Vec<Interval>,
    /// The interval's induced graph minus intra-module edges, on interval
    /// coordinates 0..interval.len().
    pub stripped: OrderedGraph,
    /// Graph on [k] with an edge for every mixed module pair.
    pub mixed_pairs: OrderedGraph,
    /// Proper coloring of `mixed_pairs` by degeneracy-order greedy.
    pub classes: Coloring,
    pub tags: Vec<SideTag>,
    /// forward[i][j] for i < j: every vertex of L_j is uniform on L_i.
    pub forward: Vec<Vec<bool>>,
    /// backward[i][j] for i < j: every vertex of L_i is uniform on L_j.
    pub backward: Vec<Vec<bool>>,
}

impl LocalModuleFrame {
    pub fn build(g: &OrderedGraph, iv: Interval) -> Result<Self, AmfError> {
        let (modules, stripped) = strip_local_module_edges(g, iv)?;
        let m = TriMatrix::adjacency(g);
        let zones = ZoneOracle::new(&m);
        let (mixed_pairs, classes) = mixed_pairs_from_zones(&zones, &modules);
        let (forward, backward) = orientation_tables(&zones, &modules);
        let vertices: Vec<usize> = iv.iter().collect();
        let tags = if g.is_module(&vertices)? {
            vec![SideTag::Neglected; modules.len()]
        } else {
            classify_left_right(g, iv, &modules)
        };
        Ok(LocalModuleFrame {
            interval: iv,
            modules,
            stripped,
            mixed_pairs,
            classes,
            tags,
            forward,
            backward,
        })
    }

    pub fn module_count(&self) -> usize {
        self.modules.len()
    }

    fn local_range(&self, i: usize) -> (usize, usize) {
        (
            self.modules[i].lo - self.interval.lo,
            self.modules[i].hi - self.interval.lo,
        )
    }
}

/// Splits the interior vertices by their adjacency to the first and last
/// vertex: index 2a + b holds the vertices with (adjacent to first) = a and
/// (adjacent to last) = b.
pub fn split_by_endpoints(g: &OrderedGraph) -> Result<[Vec<usize>; 4], AmfError> {
    let n = g.n();
    if n < 2 {
        return Err(AmfError::TooSmall { n });
    }
    let mut classes: [Vec<usize>; 4] = Default::default();
    for v in 1..n - 1 {
        let a = g.has_edge(0, v) as usize;
        let b = g.has_edge(v, n - 1) as usize;
        classes[2 * a + b].push(v);
    }
    Ok(classes)
}

/// Partitions the interval into local modules (midpoint halves when the
/// interval is a module) and removes all edges inside each module. The
/// returned graph lives on interval coordinates.
pub fn strip_local_module_edges(
    g: &OrderedGraph,
    iv: Interval,
) -> Result<(Vec<Interval>, OrderedGraph), AmfError> {
    if iv.hi > g.n() {
        return Err(AmfError::Graph(GraphError::VertexOutOfRange {
            v: iv.hi,
            n: g.n(),
        }));
    }
    let vertices: Vec<usize> = iv.iter().collect();
    let modules = if iv.len() == 1 {
        vec![iv]
    } else if g.is_module(&vertices)? {
        let mid = (iv.lo + iv.hi + 1) / 2;
        vec![Interval::new(iv.lo, mid)?, Interval::new(mid, iv.hi)?]
    } else {
        local_module_partition(g, iv)
    };
    let offset = iv.lo;
    let module_of: Vec<usize> = {
        let mut m = vec![0usize; iv.len()];
        for (i, part) in modules.iter().enumerate() {
            for v in part.iter() {
                m[v - offset] = i;
            }
        }
        m
    };
    let stripped = OrderedGraph::from_fn(iv.len(), |u, v| {
        module_of[u] != module_of[v] && g.has_edge(u + offset, v + offset)
    });
    Ok((modules, stripped))
}

/// Graph on the module indices with an edge for every pair whose zone of the
/// host adjacency matrix is mixed, together with a degeneracy-order greedy
/// coloring of that graph.
pub fn mixed_pair_graph(g: &OrderedGraph, modules: &[Interval]) -> (OrderedGraph, Coloring) {
    let m = TriMatrix::adjacency(g);
    let zones = ZoneOracle::new(&m);
    mixed_pairs_from_zones(&zones, modules)
}

fn mixed_pairs_from_zones(
    zones: &ZoneOracle,
    modules: &[Interval],
) -> (OrderedGraph, Coloring) {
    let k = modules.len();
    let r = OrderedGraph::from_fn(k, |i, j| zones.mixed(modules[i], modules[j]));
    let classes = degeneracy_coloring(&r);
    (r, classes)
}

fn orientation_tables(
    zones: &ZoneOracle,
    modules: &[Interval],
) -> (Vec<Vec<bool>>, Vec<Vec<bool>>) {
    let k = modules.len();
    let mut forward = vec![vec![false; k]; k];
    let mut backward = vec![vec![false; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            // columns constant means every vertex of the later module is
            // uniform on the earlier one
            forward[i][j] = zones.vertical(modules[i], modules[j]);
            backward[i][j] = zones.horizontal(modules[i], modules[j]);
        }
    }
    (forward, backward)
}

fn degeneracy_coloring(g: &OrderedGraph) -> Coloring {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| deg[v])
            .expect("a vertex remains");
        removed[v] = true;
        order.push(v);
        for u in g.neighbors(v).iter() {
            if !removed[u] {
                deg[u] -= 1;
            }
        }
    }
    let mut colors = vec![usize::MAX; n];
    for &v in order.iter().rev() {
        let mut used = vec![false; n + 1];
        for u in g.neighbors(v).iter() {
            if colors[u] != usize::MAX {
                used[colors[u]] = true;
            }
        }
        colors[v] = (0..=n).find(|&c| !used[c]).expect("a color is free");
    }
    Coloring::new(colors)
}

/// Tags each local module beyond the first as left or right depending on
/// whether some vertex before the interval distinguishes it from its
/// predecessor. Callers pass genuine local module partitions of non-module
/// intervals; for those, a module tagged right always has a distinguisher
/// after the interval, which is asserted.
pub fn classify_left_right(
    g: &OrderedGraph,
    iv: Interval,
    modules: &[Interval],
) -> Vec<SideTag> {
    let mut tags = vec![SideTag::Neglected; modules.len()];
    for i in 1..modules.len() {
        let prev_last = modules[i - 1].hi - 1;
        let first = modules[i].lo;
        let split_by = |j: usize| g.has_edge(j, prev_last) != g.has_edge(j, first);
        if (0..iv.lo).any(split_by) {
            tags[i] = SideTag::Left;
        } else {
            tags[i] = SideTag::Right;
            assert!(
                (iv.hi..g.n()).any(split_by),
                "adjacent local modules are distinguished outside the interval"
            );
        }
    }
    tags
}

/// Splits the class's stripped subgraph into the two orientation graphs on
/// the class vertices (in stripped-graph order): the first keeps edges of
/// pairs where the earlier module is uniform for the later one, the second
/// keeps edges of pairs oriented the other way. Their edge union is the
/// class subgraph.
pub fn arrow_split(
    frame: &LocalModuleFrame,
    class: &[usize],
) -> Result<(OrderedGraph, OrderedGraph), AmfError> {
    for (a, &i) in class.iter().enumerate() {
        for &j in &class[a + 1..] {
            if frame.mixed_pairs.has_edge(i, j) {
                return Err(AmfError::MixedPairInClass { i, j });
            }
        }
    }
    let mut vmap = Vec::new();
    let mut gid = Vec::new();
    for &i in class {
        let (lo, hi) = frame.local_range(i);
        for v in lo..hi {
            vmap.push(v);
            gid.push(i);
        }
    }
    let build = |table: &Vec<Vec<bool>>| {
        OrderedGraph::from_fn(vmap.len(), |u, v| {
            let (a, b) = (gid[u].min(gid[v]), gid[u].max(gid[v]));
            a != b && table[a][b] && frame.stripped.has_edge(vmap[u], vmap[v])
        })
    };
    Ok((build(&frame.forward), build(&frame.backward)))
}

/// A right-module piece: one orientation of one side of one class, with the
/// partition into local modules and the map back to stripped-graph vertices.
#[derive(Debug, Clone)]
pub struct RmpPiece {
    pub graph: OrderedGraph,
    pub parts: RMPartition,
    /// Module indices in piece part order.
    pub modules: Vec<usize>,
    /// Stripped-graph vertex behind each piece vertex.
    pub vertices: Vec<usize>,
}

/// Restricts one orientation of the class to the modules of one side. With
/// the backward orientation the part order is reversed so the later parts
/// are again the uniform ones. The result passes right-module validation.
pub fn build_rmp_piece(
    frame: &LocalModuleFrame,
    class: &[usize],
    orientation: Orientation,
    side: SideTag,
) -> Result<RmpPiece, AmfError> {
    for (a, &i) in class.iter().enumerate() {
        for &j in &class[a + 1..] {
            if frame.mixed_pairs.has_edge(i, j) {
                return Err(AmfError::MixedPairInClass { i, j });
            }
        }
    }
    let chosen: Vec<usize> = class
        .iter()
        .copied()
        .filter(|&i| i > 0 && frame.tags[i] == side)
        .collect();
    let ranges: Vec<(usize, usize)> = (0..frame.module_count())
        .map(|i| frame.local_range(i))
        .collect();
    let table = match orientation {
        Orientation::Forward => &frame.forward,
        Orientation::Backward => &frame.backward,
    };
    let (graph, parts, vertices, modules) = piece_from_groups(
        &frame.stripped,
        &ranges,
        &chosen,
        |a, b| table[a][b],
        orientation == Orientation::Backward,
    );
    let piece = RmpPiece {
        graph,
        parts,
        modules,
        vertices,
    };
    if let Some(v) = validate_rmp(&piece.graph, &piece.parts)? {
        return Err(AmfError::Rmp(RmpError::Invalid(v)));
    }
    Ok(piece)
}

/// Shared piece constructor over any host graph whose vertices come in
/// consecutive group ranges: keeps the chosen groups (reversed on request)
/// and only the edges of group pairs the orientation predicate allows.
fn piece_from_groups(
    host: &OrderedGraph,
    ranges: &[(usize, usize)],
    chosen: &[usize],
    allow: impl Fn(usize, usize) -> bool,
    reverse: bool,
) -> (OrderedGraph, RMPartition, Vec<usize>, Vec<usize>) {
    let order: Vec<usize> = if reverse {
        chosen.iter().rev().copied().collect()
    } else {
        chosen.to_vec()
    };
    let mut vmap = Vec::new();
    let mut gid = Vec::new();
    let mut sizes = Vec::new();
    for &g in &order {
        let (lo, hi) = ranges[g];
        sizes.push(hi - lo);
        for v in lo..hi {
            vmap.push(v);
            gid.push(g);
        }
    }
    let graph = OrderedGraph::from_fn(vmap.len(), |u, v| {
        let (a, b) = (gid[u].min(gid[v]), gid[u].max(gid[v]));
        a != b && allow(a, b) && host.has_edge(vmap[u], vmap[v])
    });
    let parts = if sizes.is_empty() {
        RMPartition::Unordered(Vec::new())
    } else {
        RMPartition::Ordered(IntervalPartition::from_sizes(&sizes).expect("sizes are positive"))
    };
    (graph, parts, vmap, order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClaimReport {
    pub checked: usize,
    pub exhaustive: bool,
    pub violations: usize,
}

/// Enumerates transversal minors of the piece (exhaustively up to `budget`
/// choices, sampled beyond that, always including the full-part choice) and
/// counts those whose adjacency matrix has a (d-1)-almost mixed minor. Any
/// violation falsifies the reduction step and means an implementation bug.
/// Pieces at d = 2 are excluded: a 1-almost mixed minor always exists.
pub fn check_reduction_claim(piece: &RmpPiece, d: usize, budget: usize, seed: u64) -> ClaimReport {
    if d <= 2 || piece.parts.len() == 0 {
        return ClaimReport {
            checked: 0,
            exhaustive: true,
            violations: 0,
        };
    }
    let k = piece.parts.len();
    let part_vs: Vec<Vec<usize>> = (0..k).map(|i| piece.parts.part_vertices(i)).collect();
    let total: u128 = part_vs
        .iter()
        .map(|p| (1u128 << p.len()) - 1)
        .product();
    let mut checked = 0usize;
    let mut violations = 0usize;
    let exhaustive = total <= budget as u128;
    let mut run = |masks: &[u64]| {
        let chosen: Vec<(usize, Vec<usize>)> = masks
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                let w: Vec<usize> = part_vs[i]
                    .iter()
                    .enumerate()
                    .filter(|(pos, _)| m >> pos & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                (i, w)
            })
            .collect();
        let minor = transversal_minor(&piece.graph, &piece.parts, &chosen)
            .expect("choices are valid subsets");
        let m = TriMatrix::adjacency(&minor);
        if m.find_almost_mixed_minor(d - 1)
            .expect("adjacency matrices are square")
            .is_some()
        {
            violations += 1;
        }
        checked += 1;
    };
    if exhaustive {
        let mut masks: Vec<u64> = vec![1; k];
        loop {
            run(&masks);
            let mut i = k;
            loop {
                if i == 0 {
                    return ClaimReport {
                        checked,
                        exhaustive,
                        violations,
                    };
                }
                i -= 1;
                let cap = (1u64 << part_vs[i].len()) - 1;
                if masks[i] < cap {
                    masks[i] += 1;
                    for m in masks[i + 1..].iter_mut() {
                        *m = 1;
                    }
                    break;
                }
            }
        }
    } else {
        let full: Vec<u64> = part_vs
            .iter()
            .map(|p| (1u64 << p.len()) - 1)
            .collect();
        run(&full);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 1..budget {
            let masks: Vec<u64> = part_vs
                .iter()
                .map(|p| rng.random_range(1..=(1u64 << p.len()) - 1))
                .collect();
            run(&masks);
        }
        ClaimReport {
            checked,
            exhaustive,
            violations,
        }
    }
}

/// Checks that the piece together with its part order is 2d-almost mixed
/// free. A failure falsifies the final claim and means an implementation
/// bug.
pub fn check_2d_claim(piece: &RmpPiece, d: usize) -> Result<PairAmfReport, AmfError> {
    Ok(is_pair_amf(&piece.graph, &piece.parts, 2 * d)?)
}

/// Exact coloring of a cograph with omega colors: components share a
/// palette, co-components of a connected graph stack disjoint palettes.
pub fn color_cograph(g: &OrderedGraph) -> Result<Coloring, AmfError> {
    let n = g.n();
    let mut colors = vec![0usize; n];
    if n > 0 {
        let all: Vec<usize> = (0..n).collect();
        cograph_rec(g, &all, &mut colors)?;
    }
    let c = Coloring::new(colors);
    assert!(c.is_proper(g), "cograph coloring is proper");
    Ok(c)
}

fn cograph_rec(g: &OrderedGraph, vs: &[usize], colors: &mut [usize]) -> Result<usize, AmfError> {
    if vs.len() == 1 {
        colors[vs[0]] = 0;
        return Ok(1);
    }
    let sub = g.induced_subgraph(vs)?;
    let comps = sub.components();
    if comps.len() > 1 {
        let mut palette = 0;
        for comp in comps {
            let mut cvs: Vec<usize> = comp.iter().map(|&i| vs[i]).collect();
            cvs.sort_unstable();
            palette = palette.max(cograph_rec(g, &cvs, colors)?);
        }
        return Ok(palette);
    }
    let cocomps = sub.complement().components();
    if cocomps.len() == 1 {
        return Err(AmfError::NotCograph);
    }
    let mut palette = 0;
    for comp in cocomps {
        let mut cvs: Vec<usize> = comp.iter().map(|&i| vs[i]).collect();
        cvs.sort_unstable();
        let p = cograph_rec(g, &cvs, colors)?;
        for &v in &cvs {
            colors[v] += palette;
        }
        palette += p;
    }
    Ok(palette)
}

#[derive(Debug, Clone, Copy)]
pub struct ColorAmfOptions {
    /// Re-verify the reduction and 2d claims on every small enough piece.
    pub verify_claims: bool,
    /// Transversal minor enumeration budget per piece.
    pub claim_budget: usize,
    pub seed: u64,
}

impl Default for ColorAmfOptions {
    fn default() -> Self {
        ColorAmfOptions {
            verify_claims: false,
            claim_budget: 48,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmfNodeReport {
    /// Delayed tree node behind the frame, when there is one.
    pub node: Option<usize>,
    pub local_modules: usize,
    pub mixed_pair_classes: usize,
    pub palette: usize,
}

#[derive(Debug, Clone)]
pub struct AmfAccounting {
    pub levels: Vec<AmfNodeReport>,
    pub total_palette: usize,
    pub omega: usize,
    pub proper: bool,
}

/// Colors the instance and machine-verifies properness. d = 2 instances are
/// cographs and get exactly omega colors; d >= 3 runs the full recursion.
pub fn color_amf(
    inst: &AmfInstance,
    opts: &ColorAmfOptions,
) -> Result<(Coloring, AmfAccounting), AmfError> {
    if inst.d < 2 {
        return Err(AmfError::InvalidParameter { d: inst.d });
    }
    let g = &inst.graph;
    let mut levels = Vec::new();
    let coloring = color_amf_rec(g, inst.d, opts, &mut levels)?;
    assert!(coloring.is_proper(g), "amf coloring is proper");
    let omega = if g.n() == 0 {
        0
    } else {
        crate::oracles::exact_clique_number(g)?.0
    };
    let accounting = AmfAccounting {
        levels,
        total_palette: coloring.palette(),
        omega,
        proper: true,
    };
    Ok((coloring, accounting))
}

fn color_amf_rec(
    g: &OrderedGraph,
    d: usize,
    opts: &ColorAmfOptions,
    reports: &mut Vec<AmfNodeReport>,
) -> Result<Coloring, AmfError> {
    let n = g.n();
    if n <= 2 {
        return Ok(Coloring::new((0..n).collect()));
    }
    if d == 2 {
        return color_cograph(g);
    }
    let interior: Vec<usize> = (1..n - 1).collect();
    let coloring = if g.is_module(&interior)? {
        let inner_graph = g.induced_on_interval(Interval::new(1, n - 1)?)?;
        let inner = color_by_delayed_tree(&inner_graph, d, opts, reports)?;
        let palette = inner.palette();
        let mut colors = vec![0usize; n];
        for v in 1..n - 1 {
            colors[v] = inner.color(v - 1);
        }
        colors[0] = palette;
        colors[n - 1] = palette + 1;
        Coloring::new(colors)
    } else {
        let classes = split_by_endpoints(g)?;
        let mut colors = vec![0usize; n];
        let mut offset = 0usize;
        for class in classes.iter() {
            if class.is_empty() {
                continue;
            }
            let sub = g.induced_subgraph(class)?;
            let sc = color_amf_rec(&sub, d, opts, reports)?.normalized();
            for (idx, &v) in class.iter().enumerate() {
                colors[v] = offset + sc.color(idx);
            }
            offset += sc.palette();
        }
        colors[0] = offset;
        colors[n - 1] = offset + 1;
        Coloring::new(colors)
    };
    assert!(coloring.is_proper(g), "each recursion level is proper");
    Ok(coloring)
}

fn color_by_delayed_tree(
    g: &OrderedGraph,
    d: usize,
    opts: &ColorAmfOptions,
    reports: &mut Vec<AmfNodeReport>,
) -> Result<Coloring, AmfError> {
    let tree = DelayedTree::build(g)?;
    let m = TriMatrix::adjacency(g);
    let zones = ZoneOracle::new(&m);
    let (odd, even) = delayed_to_subst_trees(&tree);
    let mut colorings = Vec::with_capacity(2);
    for part in [&odd, &even] {
        let mut colorer = AmfNodeColorer {
            tree: &tree,
            map: &part.delayed_node,
            zones: &zones,
            d,
            opts,
            reports: &mut *reports,
            err: None,
        };
        let outcome = part.tree.color_substitution(&mut colorer, 1);
        if let Some(e) = colorer.err.take() {
            return Err(e);
        }
        colorings.push(outcome?.coloring);
    }
    let product = product_coloring(&colorings[0], &colorings[1])?;
    assert!(
        product.is_proper(g),
        "parity split colorings combine to a proper coloring"
    );
    Ok(product.normalized())
}

struct AmfNodeColorer<'a> {
    tree: &'a DelayedTree,
    map: &'a [Option<usize>],
    zones: &'a ZoneOracle,
    d: usize,
    opts: &'a ColorAmfOptions,
    reports: &'a mut Vec<AmfNodeReport>,
    err: Option<AmfError>,
}

impl NodeGraphColorer for AmfNodeColorer<'_> {
    fn color_node_graph(
        &mut self,
        node: usize,
        keep: &[usize],
        graph: &OrderedGraph,
    ) -> Result<Coloring, SubstError> {
        match self.try_color(node, keep) {
            Ok(c) => {
                assert!(c.is_proper(graph), "frame coloring restricts properly");
                Ok(c)
            }
            Err(e) => {
                self.err = Some(e);
                Err(SubstError::ImproperPalette { node })
            }
        }
    }
}

impl AmfNodeColorer<'_> {
    fn try_color(&mut self, node: usize, keep: &[usize]) -> Result<Coloring, AmfError> {
        let Some(x) = self.map[node] else {
            // synthetic root over the odd side, its node graph is edgeless
            return Ok(Coloring::new(vec![0; keep.len()]));
        };
        let full = self.color_frame(x)?;
        let colors = keep.iter().map(|&p| full.color(p)).collect();
        Ok(Coloring::new(colors).normalized())
    }

    fn color_frame(&mut self, x: usize) -> Result<Coloring, AmfError> {
        let node = self.tree.node(x);
        let children = node.children.clone();
        let k = children.len();
        let sizes: Vec<usize> = children
            .iter()
            .map(|&c| self.tree.node(c).children.len())
            .collect();
        let total: usize = sizes.iter().sum();
        let mut ranges = Vec::with_capacity(k);
        let mut at = 0usize;
        for &s in &sizes {
            ranges.push((at, at + s));
            at += s;
        }
        let full_graph = self.tree.node_graph(x);
        assert_eq!(full_graph.n(), total, "node graph covers the grandchildren");
        if k == 1 {
            assert_eq!(full_graph.edge_count(), 0, "lone groups have no cousins");
            self.reports.push(AmfNodeReport {
                node: Some(x),
                local_modules: 1,
                mixed_pair_classes: 1,
                palette: 1,
            });
            return Ok(Coloring::new(vec![0; total]));
        }
        let vertices: Vec<usize> = node.interval.iter().collect();
        if self.tree.graph().is_module(&vertices)? {
            assert_eq!(k, 2, "module intervals split at the midpoint");
            let mut colors = vec![0usize; total];
            for r in ranges[1].0..ranges[1].1 {
                colors[r] = 1;
            }
            let c = Coloring::new(colors);
            assert!(c.is_proper(&full_graph), "half split colors a module frame");
            self.reports.push(AmfNodeReport {
                node: Some(x),
                local_modules: 2,
                mixed_pair_classes: 1,
                palette: c.palette(),
            });
            return Ok(c);
        }
        let modules: Vec<Interval> = children
            .iter()
            .map(|&c| self.tree.node(c).interval)
            .collect();
        let (mixed_pairs, classes) = mixed_pairs_from_zones(self.zones, &modules);
        let (forward, backward) = orientation_tables(self.zones, &modules);
        let tags = classify_left_right(self.tree.graph(), node.interval, &modules);
        let mut colors = vec![0usize; total];
        let mut offset = 0usize;
        for class_color in 0..classes.palette() {
            let members: Vec<usize> = (0..k)
                .filter(|&i| classes.color(i) == class_color)
                .collect();
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    assert!(
                        !mixed_pairs.has_edge(i, j),
                        "pairs sharing a class are never mixed"
                    );
                    assert!(
                        forward[i][j] || backward[i][j],
                        "non-mixed pairs carry an orientation"
                    );
                }
            }
            let used = self.color_class(
                &full_graph,
                &ranges,
                &tags,
                &forward,
                &backward,
                &members,
                offset,
                &mut colors,
            )?;
            offset += used;
        }
        let c = Coloring::new(colors);
        assert!(c.is_proper(&full_graph), "assembled frame coloring is proper");
        self.reports.push(AmfNodeReport {
            node: Some(x),
            local_modules: k,
            mixed_pair_classes: classes.palette(),
            palette: c.palette(),
        });
        Ok(c)
    }

    #[allow(clippy::too_many_arguments)]
    fn color_class(
        &mut self,
        full_graph: &OrderedGraph,
        ranges: &[(usize, usize)],
        tags: &[SideTag],
        forward: &[Vec<bool>],
        backward: &[Vec<bool>],
        members: &[usize],
        offset: usize,
        colors: &mut [usize],
    ) -> Result<usize, AmfError> {
        let neglected = members.contains(&0);
        let active: Vec<usize> = members.iter().copied().filter(|&i| i > 0).collect();
        let active_ranks: Vec<usize> = active
            .iter()
            .flat_map(|&i| ranges[i].0..ranges[i].1)
            .collect();
        let mut factors = Vec::with_capacity(2);
        for orientation in [Orientation::Forward, Orientation::Backward] {
            let table = match orientation {
                Orientation::Forward => forward,
                Orientation::Backward => backward,
            };
            let mut rank_color = vec![usize::MAX; full_graph.n()];
            let mut side_offset = 0usize;
            for side in [SideTag::Right, SideTag::Left] {
                let sel: Vec<usize> = active
                    .iter()
                    .copied()
                    .filter(|&i| tags[i] == side)
                    .collect();
                if sel.is_empty() {
                    continue;
                }
                let (piece_graph, parts, vmap, _) = piece_from_groups(
                    full_graph,
                    ranges,
                    &sel,
                    |a, b| table[a][b],
                    orientation == Orientation::Backward,
                );
                if let Some(v) = validate_rmp(&piece_graph, &parts)? {
                    return Err(AmfError::Rmp(RmpError::Invalid(v)));
                }
                let q = quotient(&piece_graph, &parts)?;
                let qc = color_amf_rec(&q, self.d - 1, self.opts, self.reports)?.normalized();
                let lifted = lift_quotient_coloring(&piece_graph, &parts, &qc)?;
                if self.opts.verify_claims && parts.len() <= 6 && piece_graph.n() <= 14 {
                    let piece = RmpPiece {
                        graph: piece_graph.clone(),
                        parts: parts.clone(),
                        modules: sel.clone(),
                        vertices: vmap.clone(),
                    };
                    let reduction = check_reduction_claim(
                        &piece,
                        self.d,
                        self.opts.claim_budget,
                        self.opts.seed,
                    );
                    assert_eq!(
                        reduction.violations, 0,
                        "transversal minors lose one almost mixed level"
                    );
                    let wide = check_2d_claim(&piece, self.d)?;
                    assert!(wide.holds, "pieces stay almost mixed free at twice d");
                }
                for (pv, &rank) in vmap.iter().enumerate() {
                    rank_color[rank] = side_offset + lifted.color(pv);
                }
                side_offset += qc.palette();
            }
            let factor: Vec<usize> = active_ranks.iter().map(|&r| rank_color[r]).collect();
            assert!(
                factor.iter().all(|&c| c != usize::MAX),
                "sides cover every active rank"
            );
            factors.push(Coloring::new(factor));
        }
        let prod = product_coloring(&factors[0], &factors[1])?.normalized();
        for (idx, &rank) in active_ranks.iter().enumerate() {
            colors[rank] = offset + prod.color(idx);
        }
        let mut palette = prod.palette();
        if neglected {
            for r in ranges[0].0..ranges[0].1 {
                colors[r] = offset + palette;
            }
            palette += 1;
        }
        Ok(palette)
    }
}
