//! Right-module partitions: ordered stable partitions where each part is a
//! module with respect to every later part. Provides validation, quotients,
//! transversal minors, coloring lifts, the two phi bound recurrences, and the
//! almost-mixed-free quotient clique check.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Coloring, GraphError, Interval, IntervalPartition, OrderedGraph};
use crate::matrix::{for_each_composition, TriMatrix, ZoneOracle};
use crate::oracles::{exact_clique_number, OracleError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmpViolation {
    /// Two adjacent vertices share a part.
    UnstablePart { part: usize, u: usize, v: usize },
    /// `witness` in part `j` sees some but not all of part `i`, i < j.
    NotAModule { i: usize, j: usize, witness: usize },
}

impl fmt::Display for RmpViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RmpViolation::UnstablePart { part, u, v } => {
                write!(f, "part {part} contains the edge {u}-{v}")
            }
            RmpViolation::NotAModule { i, j, witness } => {
                write!(f, "vertex {witness} of part {j} splits part {i}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RmpError {
    NotAPartition,
    Invalid(RmpViolation),
    OrderedPartsRequired,
    UnknownPart { part: usize },
    EmptyChoice { part: usize },
    ChoiceOutsidePart { part: usize, vertex: usize },
    ChoicesNotIncreasing,
    ImproperColoring { u: usize, v: usize },
    NotAlmostMixedFree { d: usize },
    Oracle(OracleError),
    Graph(GraphError),
}

impl fmt::Display for RmpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RmpError::NotAPartition => write!(f, "parts do not partition the vertex set"),
            RmpError::Invalid(v) => write!(f, "not a right-module partition: {v}"),
            RmpError::OrderedPartsRequired => {
                write!(f, "operation needs consecutive interval parts")
            }
            RmpError::UnknownPart { part } => write!(f, "no part with index {part}"),
            RmpError::EmptyChoice { part } => {
                write!(f, "chosen subset of part {part} is empty")
            }
            RmpError::ChoiceOutsidePart { part, vertex } => {
                write!(f, "vertex {vertex} does not belong to part {part}")
            }
            RmpError::ChoicesNotIncreasing => {
                write!(f, "chosen part indices must strictly increase")
            }
            RmpError::ImproperColoring { u, v } => {
                write!(f, "quotient coloring repeats a color on the edge {u}-{v}")
            }
            RmpError::NotAlmostMixedFree { d } => {
                write!(f, "pair is not {d}-almost-mixed-free")
            }
            RmpError::Oracle(e) => write!(f, "{e}"),
            RmpError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl From<OracleError> for RmpError {
    fn from(e: OracleError) -> Self {
        RmpError::Oracle(e)
    }
}

impl From<GraphError> for RmpError {
    fn from(e: GraphError) -> Self {
        RmpError::Graph(e)
    }
}

/// Ordered list of parts. The ordered flavor keeps each part as a consecutive
/// interval of the vertex order; the unordered flavor allows arbitrary
/// disjoint vertex sets, still in a fixed list order.
#[derive(Debug, Clone)]
pub enum RMPartition {
    Ordered(IntervalPartition),
    Unordered(Vec<Vec<usize>>),
}

impl RMPartition {
    pub fn singletons(n: usize) -> Result<Self, GraphError> {
        Ok(RMPartition::Ordered(IntervalPartition::singletons(n)?))
    }

    pub fn len(&self) -> usize {
        match self {
            RMPartition::Ordered(p) => p.len(),
            RMPartition::Unordered(parts) => parts.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_ordered(&self) -> bool {
        matches!(self, RMPartition::Ordered(_))
    }

    pub fn intervals(&self) -> Option<&IntervalPartition> {
        match self {
            RMPartition::Ordered(p) => Some(p),
            RMPartition::Unordered(_) => None,
        }
    }

    pub fn part_vertices(&self, i: usize) -> Vec<usize> {
        match self {
            RMPartition::Ordered(p) => p.part(i).iter().collect(),
            RMPartition::Unordered(parts) => parts[i].clone(),
        }
    }

    /// Maps each vertex of `0..n` to its part index, failing unless the parts
    /// are nonempty and partition exactly that range.
    pub fn part_map(&self, n: usize) -> Result<Vec<usize>, RmpError> {
        let mut map = vec![usize::MAX; n];
        for i in 0..self.len() {
            let vs = self.part_vertices(i);
            if vs.is_empty() {
                return Err(RmpError::NotAPartition);
            }
            for v in vs {
                if v >= n || map[v] != usize::MAX {
                    return Err(RmpError::NotAPartition);
                }
                map[v] = i;
            }
        }
        if map.iter().any(|&x| x == usize::MAX) {
            return Err(RmpError::NotAPartition);
        }
        Ok(map)
    }
}

/// Checks that every part is stable and that each part is a module with
/// respect to every later part. Returns the first violation found, scanning
/// stability by part and the module condition by (later part, vertex).
pub fn validate_rmp(
    g: &OrderedGraph,
    p: &RMPartition,
) -> Result<Option<RmpViolation>, RmpError> {
    let map = p.part_map(g.n())?;
    let k = p.len();
    let mut sizes = vec![0usize; k];
    for &i in &map {
        sizes[i] += 1;
    }
    for i in 0..k {
        let vs = p.part_vertices(i);
        for (a, &u) in vs.iter().enumerate() {
            for &v in &vs[a + 1..] {
                if g.has_edge(u, v) {
                    return Ok(Some(RmpViolation::UnstablePart {
                        part: i,
                        u: u.min(v),
                        v: u.max(v),
                    }));
                }
            }
        }
    }
    for j in 1..k {
        for w in p.part_vertices(j) {
            let mut hits = vec![0usize; k];
            for u in g.neighbors(w).iter() {
                hits[map[u]] += 1;
            }
            for i in 0..j {
                if hits[i] > 0 && hits[i] < sizes[i] {
                    return Ok(Some(RmpViolation::NotAModule { i, j, witness: w }));
                }
            }
        }
    }
    Ok(None)
}

pub fn is_valid_rmp(g: &OrderedGraph, p: &RMPartition) -> bool {
    matches!(validate_rmp(g, p), Ok(None))
}

/// One vertex per part, parts adjacent iff any edge runs between them.
pub fn quotient(g: &OrderedGraph, p: &RMPartition) -> Result<OrderedGraph, RmpError> {
    if let Some(v) = validate_rmp(g, p)? {
        return Err(RmpError::Invalid(v));
    }
    let map = p.part_map(g.n())?;
    let mut edges = Vec::new();
    for (u, v) in g.edges() {
        let (a, b) = (map[u], map[v]);
        edges.push((a.min(b), a.max(b)));
    }
    Ok(OrderedGraph::from_edges(p.len(), edges)?)
}

/// Picks a nonempty subset of each chosen part, parts in strictly increasing
/// index order, and returns the graph on the choices with an edge wherever
/// any edge runs between the two subsets. Does not require a valid
/// right-module partition; callers wanting the quotient semantics pass every
/// part in full.
pub fn transversal_minor(
    g: &OrderedGraph,
    p: &RMPartition,
    chosen: &[(usize, Vec<usize>)],
) -> Result<OrderedGraph, RmpError> {
    let map = p.part_map(g.n())?;
    for pair in chosen.windows(2) {
        if pair[0].0 >= pair[1].0 {
            return Err(RmpError::ChoicesNotIncreasing);
        }
    }
    for (i, w) in chosen {
        if *i >= p.len() {
            return Err(RmpError::UnknownPart { part: *i });
        }
        if w.is_empty() {
            return Err(RmpError::EmptyChoice { part: *i });
        }
        for &v in w {
            if v >= g.n() || map[v] != *i {
                return Err(RmpError::ChoiceOutsidePart { part: *i, vertex: v });
            }
        }
    }
    let ell = chosen.len();
    let mut edges = Vec::new();
    for a in 0..ell {
        for b in a + 1..ell {
            let cross = chosen[a]
                .1
                .iter()
                .any(|&u| chosen[b].1.iter().any(|&v| g.has_edge(u, v)));
            if cross {
                edges.push((a, b));
            }
        }
    }
    Ok(OrderedGraph::from_edges(ell, edges)?)
}

/// Colors each vertex by its part's quotient color. Parts are stable and
/// cross edges force distinct quotient colors, so the lift stays proper and
/// uses exactly the quotient palette.
pub fn lift_quotient_coloring(
    g: &OrderedGraph,
    p: &RMPartition,
    qc: &Coloring,
) -> Result<Coloring, RmpError> {
    let q = quotient(g, p)?;
    if qc.len() != q.n() {
        return Err(RmpError::Graph(GraphError::LengthMismatch {
            expected: q.n(),
            got: qc.len(),
        }));
    }
    if let Some((u, v)) = qc.first_violation(&q) {
        return Err(RmpError::ImproperColoring { u, v });
    }
    let map = p.part_map(g.n())?;
    let lifted = Coloring::new((0..g.n()).map(|v| qc.color(map[v])).collect());
    assert!(lifted.is_proper(g), "lift of a proper quotient coloring is proper");
    assert_eq!(lifted.palette(), qc.palette(), "lifting preserves the palette");
    Ok(lifted)
}

/// Exact value of the product-form recurrence
/// `phi(w, h) = phi(w-1, h) * (phi(w, h-1) + 1) + 1` with
/// `phi(x, 1) = phi(1, y) = 1`. Values grow doubly exponentially.
pub fn phi_h(w: usize, h: usize) -> BigUint {
    assert!(w >= 1 && h >= 1, "phi_h needs positive arguments");
    let one = BigUint::from(1u32);
    let mut table = vec![vec![one.clone(); h + 1]; w + 1];
    for wi in 2..=w {
        for hi in 2..=h {
            let prev = &table[wi][hi - 1] + &one;
            table[wi][hi] = &table[wi - 1][hi] * &prev + &one;
        }
    }
    table[w][h].clone()
}

/// Exact value of the additive recurrence
/// `phi(w, d) = phi(w-1, d) + phi(w, d-1) + 1` with `phi(_, 1) = 0` and
/// `phi(1, d) = 1` for d >= 2. The shifted values `phi + 1` satisfy the plain
/// Pascal recurrence with border values 1 and 2, so
/// `phi + 1 <= 2 * C(w + d - 2, d - 1)`, which is asserted on every call.
pub fn phi_amf(w: usize, d: usize) -> u64 {
    assert!(w >= 1 && d >= 1, "phi_amf needs positive arguments");
    let mut table = vec![vec![0u64; d + 1]; w + 1];
    for di in 2..=d {
        table[1][di] = 1;
    }
    for wi in 2..=w {
        for di in 2..=d {
            table[wi][di] = table[wi - 1][di] + table[wi][di - 1] + 1;
        }
    }
    let value = table[w][d];
    let cap = 2 * binomial(w + d - 2, d - 1);
    assert!(
        (value as u128) + 1 <= cap,
        "phi_amf({w}, {d}) = {value} beats the binomial cap {cap}"
    );
    value
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] += row[j - 1];
        }
    }
    row[k]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairAmfReport {
    pub holds: bool,
    /// Fewer parts than groups, so the scan was empty.
    pub vacuous: bool,
}

/// Decides whether the pair is `d`-almost-mixed-free: no coarsening of the
/// parts into `d` consecutive groups turns every off-diagonal zone of the
/// adjacency matrix mixed. Exhausts all C(k-1, d-1) coarsenings. With d = 1
/// the off-diagonal is empty, so any coarsening qualifies and the answer is
/// false whenever one exists.
pub fn is_pair_amf(
    g: &OrderedGraph,
    p: &RMPartition,
    d: usize,
) -> Result<PairAmfReport, RmpError> {
    assert!(d >= 1, "group count must be positive");
    let Some(parts) = p.intervals() else {
        return Err(RmpError::OrderedPartsRequired);
    };
    if parts.n() != g.n() {
        return Err(RmpError::NotAPartition);
    }
    let k = parts.len();
    if k < d {
        return Ok(PairAmfReport {
            holds: true,
            vacuous: true,
        });
    }
    let m = TriMatrix::adjacency(g);
    let oracle = ZoneOracle::new(&m);
    let bounds = parts.bounds();
    let no_minor = for_each_composition(k, d, |cuts| {
        let mut vb = Vec::with_capacity(d + 1);
        vb.push(0);
        for &c in cuts {
            vb.push(bounds[c]);
        }
        vb.push(bounds[k]);
        let mut all_mixed = true;
        'zones: for a in 0..d {
            for b in 0..d {
                if a == b {
                    continue;
                }
                let rows = Interval::new(vb[a], vb[a + 1]).expect("groups are nonempty");
                let cols = Interval::new(vb[b], vb[b + 1]).expect("groups are nonempty");
                if !oracle.mixed(rows, cols) {
                    all_mixed = false;
                    break 'zones;
                }
            }
        }
        !all_mixed
    });
    Ok(PairAmfReport {
        holds: no_minor,
        vacuous: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotientBoundReport {
    pub omega_g: usize,
    pub omega_quotient: usize,
    pub phi: u64,
    pub power: u128,
    pub bound_holds: bool,
}

/// Verifies the clique bound on the quotient of a `d`-almost-mixed-free
/// pair: omega of the quotient is at most both `phi_amf(omega, d)` and
/// `omega^d`. A violation would falsify the bound lemma and panics.
pub fn check_amf_quotient_bound(
    g: &OrderedGraph,
    p: &RMPartition,
    d: usize,
) -> Result<QuotientBoundReport, RmpError> {
    let report = is_pair_amf(g, p, d)?;
    if !report.holds {
        return Err(RmpError::NotAlmostMixedFree { d });
    }
    let q = quotient(g, p)?;
    let (omega_g, _) = exact_clique_number(g)?;
    let (omega_quotient, _) = exact_clique_number(&q)?;
    let phi = phi_amf(omega_g, d);
    let power = (omega_g as u128).pow(d as u32);
    let bound_holds = (omega_quotient as u64) <= phi && (omega_quotient as u128) <= power;
    assert!(
        bound_holds,
        "quotient clique number {omega_quotient} beats phi_amf({omega_g}, {d}) = {phi} or {omega_g}^{d}"
    );
    Ok(QuotientBoundReport {
        omega_g,
        omega_quotient,
        phi,
        power,
        bound_holds,
    })
}

/// Samples a graph together with a valid ordered right-module partition:
/// random consecutive parts, no edges inside a part, and each vertex of a
/// later part either dominating or avoiding each earlier part by coin flip.
pub fn random_ordered_rmp(n: usize, seed: u64) -> (OrderedGraph, RMPartition) {
    assert!(n >= 1, "need at least one vertex");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cuts = Vec::new();
    for c in 1..n {
        if rng.random_bool(0.45) {
            cuts.push(c);
        }
    }
    let parts = IntervalPartition::from_cuts(n, &cuts).expect("cuts are strictly increasing");
    let mut edges = Vec::new();
    for j in 1..parts.len() {
        for v in parts.part(j).iter() {
            for i in 0..j {
                if rng.random_bool(0.5) {
                    for u in parts.part(i).iter() {
                        edges.push((u, v));
                    }
                }
            }
        }
    }
    let g = OrderedGraph::from_edges(n, edges).expect("generated edges are in range");
    (g, RMPartition::Ordered(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{complete, cycle, path, shift2, shift2_parts};
    use crate::oracles::exact_chromatic_number;
    use std::collections::BTreeSet;

    fn s52() -> (OrderedGraph, RMPartition) {
        let parts = shift2_parts(5).unwrap();
        (shift2(5), RMPartition::Ordered(parts))
    }

    #[test]
    fn the_shift_fixture_is_a_valid_right_module_partition() {
        let (g, p) = s52();
        assert_eq!(validate_rmp(&g, &p).unwrap(), None);
        assert!(is_valid_rmp(&g, &p));
    }

    #[test]
    fn degenerate_partitions_validate_as_expected() {
        let c5 = cycle(5);
        let singles = RMPartition::singletons(5).unwrap();
        assert_eq!(validate_rmp(&c5, &singles).unwrap(), None);

        let k2 = complete(2);
        let whole = RMPartition::Ordered(IntervalPartition::whole(2).unwrap());
        assert_eq!(
            validate_rmp(&k2, &whole).unwrap(),
            Some(RmpViolation::UnstablePart { part: 0, u: 0, v: 1 })
        );

        let lone_edge = OrderedGraph::from_edges(3, vec![(0, 1)]).unwrap();
        let split = RMPartition::Unordered(vec![vec![0, 2], vec![1]]);
        assert_eq!(
            validate_rmp(&lone_edge, &split).unwrap(),
            Some(RmpViolation::NotAModule { i: 0, j: 1, witness: 1 })
        );

        let not_cover = RMPartition::Unordered(vec![vec![0], vec![1]]);
        assert_eq!(validate_rmp(&c5, &not_cover), Err(RmpError::NotAPartition));
    }

    #[test]
    fn quotient_collapses_the_shift_fixture_to_a_clique() {
        let (g, p) = s52();
        assert_eq!(quotient(&g, &p).unwrap(), complete(4));
    }

    #[test]
    fn quotient_handles_the_trivial_partitions() {
        let c5 = cycle(5);
        let singles = RMPartition::singletons(5).unwrap();
        assert_eq!(quotient(&c5, &singles).unwrap(), c5);

        let empty = OrderedGraph::edgeless(6);
        let p = RMPartition::Ordered(IntervalPartition::from_sizes(&[2, 2, 2]).unwrap());
        assert_eq!(quotient(&empty, &p).unwrap(), OrderedGraph::edgeless(3));

        let k2 = complete(2);
        let whole = RMPartition::Ordered(IntervalPartition::whole(2).unwrap());
        assert_eq!(
            quotient(&k2, &whole),
            Err(RmpError::Invalid(RmpViolation::UnstablePart { part: 0, u: 0, v: 1 }))
        );
    }

    #[test]
    fn full_part_transversals_recover_the_quotient() {
        let (g, p) = s52();
        let full: Vec<(usize, Vec<usize>)> = (0..p.len())
            .map(|i| (i, p.part_vertices(i)))
            .collect();
        assert_eq!(transversal_minor(&g, &p, &full).unwrap(), quotient(&g, &p).unwrap());

        for seed in 0..20 {
            let (g, p) = random_ordered_rmp(2 + (seed as usize % 9), seed);
            let full: Vec<(usize, Vec<usize>)> = (0..p.len())
                .map(|i| (i, p.part_vertices(i)))
                .collect();
            assert_eq!(
                transversal_minor(&g, &p, &full).unwrap(),
                quotient(&g, &p).unwrap()
            );
        }
    }

    #[test]
    fn the_shift_fixture_diagonal_is_a_path() {
        let (g, p) = s52();
        let chosen = vec![(0, vec![0]), (1, vec![2]), (2, vec![5]), (3, vec![9])];
        assert_eq!(transversal_minor(&g, &p, &chosen).unwrap(), path(4));
    }

    #[test]
    fn the_shift_fixture_realizes_every_labeled_four_vertex_graph() {
        let (g, p) = s52();
        let mut masks = BTreeSet::new();
        let parts: Vec<Vec<usize>> = (0..4).map(|i| p.part_vertices(i)).collect();
        let mut subsets: Vec<Vec<Vec<usize>>> = Vec::new();
        for vs in &parts {
            let mut options = Vec::new();
            for bits in 1u32..1 << vs.len() {
                let w: Vec<usize> = vs
                    .iter()
                    .enumerate()
                    .filter(|(pos, _)| bits >> pos & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                options.push(w);
            }
            subsets.push(options);
        }
        for a in &subsets[0] {
            for b in &subsets[1] {
                for c in &subsets[2] {
                    for d in &subsets[3] {
                        let chosen = vec![
                            (0, a.clone()),
                            (1, b.clone()),
                            (2, c.clone()),
                            (3, d.clone()),
                        ];
                        let m = transversal_minor(&g, &p, &chosen).unwrap();
                        let mut mask = 0u32;
                        let mut bit = 0;
                        for x in 0..4 {
                            for y in x + 1..4 {
                                if m.has_edge(x, y) {
                                    mask |= 1 << bit;
                                }
                                bit += 1;
                            }
                        }
                        masks.insert(mask);
                    }
                }
            }
        }
        assert_eq!(masks.len(), 64);
    }

    #[test]
    fn one_vertex_transversals_of_the_fixture_are_forests() {
        let (g, p) = s52();
        for a in 0..1 {
            for b in 1..3 {
                for c in 3..6 {
                    for d in 6..10 {
                        let chosen = vec![
                            (0, vec![a]),
                            (1, vec![b]),
                            (2, vec![c]),
                            (3, vec![d]),
                        ];
                        let m = transversal_minor(&g, &p, &chosen).unwrap();
                        let components = m.components().len();
                        assert_eq!(m.edge_count() + components, m.n(), "cycle in a transversal");
                    }
                }
            }
        }
    }

    #[test]
    fn transversal_minor_rejects_bad_choices() {
        let (g, p) = s52();
        assert_eq!(
            transversal_minor(&g, &p, &[(1, vec![])]),
            Err(RmpError::EmptyChoice { part: 1 })
        );
        assert_eq!(
            transversal_minor(&g, &p, &[(0, vec![1])]),
            Err(RmpError::ChoiceOutsidePart { part: 0, vertex: 1 })
        );
        assert_eq!(
            transversal_minor(&g, &p, &[(2, vec![3]), (2, vec![4])]),
            Err(RmpError::ChoicesNotIncreasing)
        );
        assert_eq!(
            transversal_minor(&g, &p, &[(7, vec![0])]),
            Err(RmpError::UnknownPart { part: 7 })
        );
    }

    #[test]
    fn lifting_a_quotient_coloring_stays_proper() {
        let (g, p) = s52();
        let q = quotient(&g, &p).unwrap();
        let (chi, qc) = exact_chromatic_number(&q).unwrap();
        assert_eq!(chi, 4);
        let lifted = lift_quotient_coloring(&g, &p, &qc).unwrap();
        assert!(lifted.is_proper(&g));
        assert_eq!(lifted.palette(), 4);

        let bad = Coloring::new(vec![0; 4]);
        assert_eq!(
            lift_quotient_coloring(&g, &p, &bad),
            Err(RmpError::ImproperColoring { u: 0, v: 1 })
        );
    }

    #[test]
    fn random_lifts_stay_proper_and_keep_the_palette() {
        for seed in 0..150 {
            let (g, p) = random_ordered_rmp(2 + (seed as usize % 11), seed);
            let q = quotient(&g, &p).unwrap();
            let (_, qc) = exact_chromatic_number(&q).unwrap();
            let lifted = lift_quotient_coloring(&g, &p, &qc).unwrap();
            assert!(lifted.is_proper(&g), "seed {seed}");
            assert_eq!(lifted.palette(), qc.palette(), "seed {seed}");
        }
    }

    #[test]
    fn random_partitions_always_validate() {
        for seed in 0..300 {
            let (g, p) = random_ordered_rmp(1 + (seed as usize % 12), seed);
            assert_eq!(validate_rmp(&g, &p).unwrap(), None, "seed {seed}");
        }
    }

    #[test]
    fn phi_h_matches_the_pinned_values() {
        assert_eq!(phi_h(1, 5), BigUint::from(1u32));
        assert_eq!(phi_h(4, 1), BigUint::from(1u32));
        assert_eq!(phi_h(2, 2), BigUint::from(3u32));
        assert_eq!(phi_h(3, 2), BigUint::from(7u32));
        assert_eq!(phi_h(4, 2), BigUint::from(15u32));
        assert_eq!(phi_h(3, 3), BigUint::from(41u32));
    }

    #[test]
    fn phi_h_is_monotone_in_each_argument() {
        let vals: Vec<Vec<BigUint>> = (1..=12)
            .map(|w| (1..=12).map(|h| phi_h(w, h)).collect())
            .collect();
        for w in 0..12 {
            for h in 0..12 {
                if w + 1 < 12 {
                    assert!(vals[w][h] <= vals[w + 1][h]);
                }
                if h + 1 < 12 {
                    assert!(vals[w][h] <= vals[w][h + 1]);
                }
            }
        }
    }

    #[test]
    fn phi_amf_matches_the_pinned_values() {
        for w in 1..=6 {
            assert_eq!(phi_amf(w, 1), 0);
        }
        for d in 2..=6 {
            assert_eq!(phi_amf(1, d), 1);
        }
        assert_eq!(phi_amf(2, 2), 2);
        assert_eq!(phi_amf(2, 3), 4);
        assert_eq!(phi_amf(3, 2), 3);
        assert_eq!(phi_amf(3, 3), 8);
    }

    #[test]
    fn phi_amf_is_monotone_and_under_the_binomial_cap() {
        for w in 1..=12usize {
            for d in 1..=12usize {
                let v = phi_amf(w, d);
                if w > 1 {
                    assert!(phi_amf(w - 1, d) <= v);
                }
                if d > 1 {
                    assert!(phi_amf(w, d - 1) <= v);
                }
                if w <= 10 && d <= 10 {
                    assert!((v as u128) + 1 <= 2 * binomial(w + d - 2, d - 1));
                }
            }
        }
    }

    #[test]
    fn pair_amf_scan_handles_every_group_count() {
        let (g, p) = s52();
        let vac = is_pair_amf(&g, &p, 5).unwrap();
        assert!(vac.holds && vac.vacuous);

        let d1 = is_pair_amf(&g, &p, 1).unwrap();
        assert!(!d1.holds && !d1.vacuous);

        let d4 = is_pair_amf(&g, &p, 4).unwrap();
        assert!(d4.holds && !d4.vacuous, "the one-vertex part thins every coarsening");

        let d2 = is_pair_amf(&g, &p, 2).unwrap();
        assert!(!d2.holds && !d2.vacuous, "cut after the third part is all mixed");

        let unordered = RMPartition::Unordered(vec![(0..10).collect()]);
        assert_eq!(
            is_pair_amf(&shift2(5), &unordered, 2),
            Err(RmpError::OrderedPartsRequired)
        );
    }

    #[test]
    fn random_pairs_obey_the_quotient_bound() {
        let mut held = 0usize;
        let mut nonvacuous = 0usize;
        for seed in 0..150 {
            let n = 2 + (seed as usize % 9);
            let (g, p) = random_ordered_rmp(n, seed);
            for d in 2..=3 {
                let report = is_pair_amf(&g, &p, d).unwrap();
                if !report.holds {
                    continue;
                }
                held += 1;
                if !report.vacuous {
                    nonvacuous += 1;
                }
                let bound = check_amf_quotient_bound(&g, &p, d).unwrap();
                assert!(bound.bound_holds);
                assert!(bound.omega_quotient as u64 <= bound.phi);
                assert!(bound.omega_quotient as u128 <= bound.power);
            }
        }
        assert!(held >= 50, "only {held} instances held");
        assert!(nonvacuous >= 20, "only {nonvacuous} nonvacuous instances held");
    }

    #[test]
    fn the_bound_check_requires_an_amf_pair() {
        let (g, p) = s52();
        assert_eq!(
            check_amf_quotient_bound(&g, &p, 2),
            Err(RmpError::NotAlmostMixedFree { d: 2 })
        );
    }
}
