//! Exact brute-force references: chromatic number, clique number, modular
//! primality, exhaustive graph enumeration, and minimum mixed-freeness
//! parameters over all vertex orderings.
//!
//! Everything here is independent of the constructive algorithms in the
//! other modules so that those can be validated against these answers.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Coloring, OrderedGraph};
use crate::matrix::{for_each_composition, TriMatrix, ZoneOracle};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OracleError {
    Empty,
    TooLarge { n: usize, max: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Empty => write!(f, "graph has no vertices"),
            OracleError::TooLarge { n, max } => {
                write!(f, "{n} vertices exceed the oracle bound {max}")
            }
        }
    }
}

pub const CLIQUE_MAX: usize = 40;
pub const CHROMATIC_MAX: usize = 25;
pub const ORDER_SEARCH_MAX: usize = 8;
pub const ENUMERATE_MAX: usize = 7;

/// Maximum clique size with a witness, by branch and bound over bitmasks.
pub fn exact_clique_number(g: &OrderedGraph) -> Result<(usize, Vec<usize>), OracleError> {
    let n = g.n();
    if n > CLIQUE_MAX {
        return Err(OracleError::TooLarge { n, max: CLIQUE_MAX });
    }
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| {
            let mut mask = 0u64;
            for u in g.neighbors(v).iter() {
                mask |= 1 << u;
            }
            mask
        })
        .collect();
    let mut best_size = 0usize;
    let mut best_set = 0u64;
    let all = if n == 64 { !0 } else { (1u64 << n) - 1 };
    extend_clique(&adj, all, 0, 0, &mut best_size, &mut best_set);
    let witness: Vec<usize> = (0..n).filter(|&v| best_set & (1 << v) != 0).collect();
    Ok((best_size, witness))
}

fn extend_clique(
    adj: &[u64],
    mut cand: u64,
    cur: u64,
    size: usize,
    best_size: &mut usize,
    best_set: &mut u64,
) {
    if size > *best_size {
        *best_size = size;
        *best_set = cur;
    }
    while cand != 0 {
        if size + cand.count_ones() as usize <= *best_size {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        cand &= !(1u64 << v);
        extend_clique(adj, cand & adj[v], cur | (1 << v), size + 1, best_size, best_set);
    }
}

/// Exact chromatic number with an optimal proper coloring, by iterative
/// k-colorability between the clique lower bound and a greedy upper bound.
pub fn exact_chromatic_number(g: &OrderedGraph) -> Result<(usize, Coloring), OracleError> {
    let n = g.n();
    if n > CHROMATIC_MAX {
        return Err(OracleError::TooLarge { n, max: CHROMATIC_MAX });
    }
    if n == 0 {
        return Ok((0, Coloring::new(Vec::new())));
    }
    let (lb, _) = exact_clique_number(g).expect("chromatic bound is under the clique bound");
    let greedy = dsatur(g);
    let ub = greedy.palette();
    if lb == ub {
        return Ok((ub, greedy));
    }
    for k in lb..ub {
        if let Some(colors) = k_color(g, k) {
            return Ok((k, Coloring::new(colors)));
        }
    }
    Ok((ub, greedy))
}

/// Greedy coloring in saturation order: a proper coloring, not necessarily
/// optimal.
pub fn dsatur(g: &OrderedGraph) -> Coloring {
    let n = g.n();
    let mut colors: Vec<Option<usize>> = vec![None; n];
    for _ in 0..n {
        let v = select_dsatur(g, &colors).expect("an uncolored vertex remains");
        let mut c = 0;
        while g.neighbors(v).iter().any(|u| colors[u] == Some(c)) {
            c += 1;
        }
        colors[v] = Some(c);
    }
    Coloring::new(colors.into_iter().map(|c| c.unwrap()).collect())
}

/// Uncolored vertex with the most distinctly colored neighbors; ties break
/// to higher degree, then lower index.
fn select_dsatur(g: &OrderedGraph, colors: &[Option<usize>]) -> Option<usize> {
    let mut best: Option<(usize, usize, usize)> = None;
    for v in 0..g.n() {
        if colors[v].is_some() {
            continue;
        }
        let mut seen = Vec::new();
        for u in g.neighbors(v).iter() {
            if let Some(c) = colors[u] {
                if !seen.contains(&c) {
                    seen.push(c);
                }
            }
        }
        let key = (seen.len(), g.degree(v));
        match best {
            Some((s, d, _)) if (s, d) >= key => {}
            _ => best = Some((key.0, key.1, v)),
        }
    }
    best.map(|(_, _, v)| v)
}

fn k_color(g: &OrderedGraph, k: usize) -> Option<Vec<usize>> {
    if k == 0 {
        return if g.n() == 0 { Some(Vec::new()) } else { None };
    }
    let mut colors: Vec<Option<usize>> = vec![None; g.n()];
    if k_color_rec(g, k, &mut colors, 0) {
        Some(colors.into_iter().map(|c| c.unwrap()).collect())
    } else {
        None
    }
}

fn k_color_rec(g: &OrderedGraph, k: usize, colors: &mut [Option<usize>], used: usize) -> bool {
    let v = match select_dsatur(g, colors) {
        Some(v) => v,
        None => return true,
    };
    // introducing at most one fresh color breaks color-permutation symmetry
    let cap = k.min(used + 1);
    for c in 0..cap {
        if g.neighbors(v).iter().any(|u| colors[u] == Some(c)) {
            continue;
        }
        colors[v] = Some(c);
        if k_color_rec(g, k, colors, used.max(c + 1)) {
            return true;
        }
        colors[v] = None;
    }
    false
}

/// True when the graph has no module `S` with `1 < |S| < n`. Modules here
/// are arbitrary vertex sets whose members all look alike from outside.
pub fn is_prime(g: &OrderedGraph) -> bool {
    let n = g.n();
    for u in 0..n {
        for v in u + 1..n {
            if module_closure_size(g, u, v) < n {
                return false;
            }
        }
    }
    true
}

/// Size of the smallest module containing both `u` and `v`: any outside
/// vertex distinguishing two members must be absorbed, to a fixpoint.
fn module_closure_size(g: &OrderedGraph, u: usize, v: usize) -> usize {
    let n = g.n();
    let mut in_set = vec![false; n];
    in_set[u] = true;
    in_set[v] = true;
    let mut size = 2;
    let mut grew = true;
    while grew {
        grew = false;
        for w in 0..n {
            if in_set[w] {
                continue;
            }
            let inside_neighbors = g.neighbors(w).iter().filter(|&x| in_set[x]).count();
            if inside_neighbors > 0 && inside_neighbors < size {
                in_set[w] = true;
                size += 1;
                grew = true;
            }
        }
    }
    size
}

/// Graph on `n` vertices whose edge set is given by `mask` over the
/// lexicographic pair order (0,1), (0,2), ..., (n-2, n-1).
pub fn graph_from_mask(n: usize, mask: u64) -> OrderedGraph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask & (1u64 << bit) != 0 {
                edges.push((u, v));
            }
            bit += 1;
        }
    }
    OrderedGraph::from_edges(n, edges).expect("lexicographic pairs are valid edges")
}

/// All labelled graphs on `n` vertices in mask order.
pub fn enumerate_graphs(n: usize) -> Result<impl Iterator<Item = OrderedGraph>, OracleError> {
    if n > ENUMERATE_MAX {
        return Err(OracleError::TooLarge { n, max: ENUMERATE_MAX });
    }
    let bits = n * (n.saturating_sub(1)) / 2;
    Ok((0..1u64 << bits).map(move |mask| graph_from_mask(n, mask)))
}

/// Lexicographic permutation successor; false once `perm` is the last one.
pub fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

fn amm_exists(oracle: &ZoneOracle, n: usize, d: usize) -> bool {
    if d == 1 {
        return true; // a single block has no off-diagonal zones
    }
    if 2 * d > n {
        return false; // some block would be too thin to host a mixed zone
    }
    let mut found = false;
    for_each_composition(n, d, |cuts| {
        let p = crate::graph::IntervalPartition::from_cuts(n, cuts).unwrap();
        if (0..d).all(|i| p.part(i).len() >= 2) {
            let ok = (0..d).all(|i| {
                (0..d).all(|j| i == j || oracle.mixed(p.part(i), p.part(j)))
            });
            if ok {
                found = true;
                return false;
            }
        }
        true
    });
    found
}

fn mixed_minor_exists(oracle: &ZoneOracle, n: usize, d: usize) -> bool {
    if d == 1 {
        // the whole adjacency matrix of a graph with >= 2 vertices is mixed
        // thanks to the * diagonal
        return n >= 2;
    }
    if 2 * d > n {
        return false;
    }
    let full = crate::graph::Interval { lo: 0, hi: n };
    let mut col_parts: Vec<crate::graph::IntervalPartition> = Vec::new();
    for_each_composition(n, d, |cuts| {
        let p = crate::graph::IntervalPartition::from_cuts(n, cuts).unwrap();
        if (0..d).all(|j| oracle.mixed(full, p.part(j))) {
            col_parts.push(p);
        }
        true
    });
    if col_parts.is_empty() {
        return false;
    }
    let mut found = false;
    for_each_composition(n, d, |cuts| {
        let rp = crate::graph::IntervalPartition::from_cuts(n, cuts).unwrap();
        if (0..d).any(|i| !oracle.mixed(rp.part(i), full)) {
            return true;
        }
        for cp in &col_parts {
            let ok = (0..d).all(|i| (0..d).all(|j| oracle.mixed(rp.part(i), cp.part(j))));
            if ok {
                found = true;
                return false;
            }
        }
        true
    });
    found
}

/// Least `d` such that the ordering avoids a `d`-almost-mixed minor,
/// given an already built oracle for the ordered adjacency matrix.
fn amf_value(oracle: &ZoneOracle, n: usize) -> usize {
    for d in (2..=n / 2).rev() {
        if amm_exists(oracle, n, d) {
            return d + 1;
        }
    }
    2
}

fn mixed_free_value(oracle: &ZoneOracle, n: usize) -> usize {
    for d in (2..=n / 2).rev() {
        if mixed_minor_exists(oracle, n, d) {
            return d + 1;
        }
    }
    if n >= 2 {
        2
    } else {
        1
    }
}

enum OrderParameter {
    AlmostMixed,
    Mixed,
}

/// Minimum over all vertex orderings of the least `d` whose minor the
/// ordered adjacency matrix avoids. Searches permutations in lexicographic
/// order, skipping reversals (`perm[0] < perm[n-1]`), and returns the first
/// ordering attaining the minimum.
fn min_order_parameter(
    g: &OrderedGraph,
    which: OrderParameter,
) -> Result<(usize, Vec<usize>), OracleError> {
    let n = g.n();
    if n == 0 {
        return Err(OracleError::Empty);
    }
    if n > ORDER_SEARCH_MAX {
        return Err(OracleError::TooLarge { n, max: ORDER_SEARCH_MAX });
    }
    let floor = match which {
        OrderParameter::AlmostMixed => 2,
        OrderParameter::Mixed => {
            if n >= 2 {
                2
            } else {
                1
            }
        }
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(usize, Vec<usize>)> = None;
    loop {
        if n < 2 || perm[0] < perm[n - 1] {
            let h = g.apply_order(&perm).expect("permutation is valid");
            let a = TriMatrix::adjacency(&h);
            let oracle = ZoneOracle::new(&a);
            let improved = match &best {
                None => true,
                Some((bf, _)) => {
                    // values are 1 + (largest d with a minor), and minors are
                    // downward closed in d, so improving on bf means having
                    // no (bf - 1)-minor
                    let dstar = bf - 1;
                    dstar >= 1
                        && match which {
                            OrderParameter::AlmostMixed => !amm_exists(&oracle, n, dstar),
                            OrderParameter::Mixed => !mixed_minor_exists(&oracle, n, dstar),
                        }
                }
            };
            if improved {
                let value = match which {
                    OrderParameter::AlmostMixed => amf_value(&oracle, n),
                    OrderParameter::Mixed => mixed_free_value(&oracle, n),
                };
                debug_assert!(best.as_ref().map_or(true, |(bf, _)| value < *bf));
                best = Some((value, perm.clone()));
            }
            if best.as_ref().unwrap().0 == floor {
                break;
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best.expect("at least one ordering was scored"))
}

/// Least `d >= 2` such that some vertex ordering is `d`-almost-mixed-free,
/// with the first such ordering in the search order.
pub fn min_amf(g: &OrderedGraph) -> Result<(usize, Vec<usize>), OracleError> {
    min_order_parameter(g, OrderParameter::AlmostMixed)
}

/// Least `d` such that some vertex ordering is `d`-mixed-free, with the
/// first such ordering in the search order.
pub fn min_mixed_free(g: &OrderedGraph) -> Result<(usize, Vec<usize>), OracleError> {
    min_order_parameter(g, OrderParameter::Mixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn clique_numbers_of_known_graphs() {
        let (w, witness) = exact_clique_number(&gen::cycle(5)).unwrap();
        assert_eq!(w, 2);
        assert_eq!(witness.len(), 2);
        assert_eq!(exact_clique_number(&gen::complete(5)).unwrap().0, 5);
        assert_eq!(exact_clique_number(&gen::shift2(6)).unwrap().0, 2);
        assert_eq!(exact_clique_number(&gen::path(1)).unwrap().0, 1);
        let (w0, set0) = exact_clique_number(&OrderedGraph::edgeless(0)).unwrap();
        assert_eq!((w0, set0.len()), (0, 0));
    }

    #[test]
    fn clique_witness_is_a_clique() {
        for seed in 0..20 {
            let g = gen::gnp(12, 0.5, seed).unwrap();
            let (w, witness) = exact_clique_number(&g).unwrap();
            assert_eq!(witness.len(), w);
            for (i, &u) in witness.iter().enumerate() {
                for &v in &witness[i + 1..] {
                    assert!(g.has_edge(u, v));
                }
            }
        }
    }

    #[test]
    fn chromatic_numbers_of_known_graphs() {
        assert_eq!(exact_chromatic_number(&gen::cycle(5)).unwrap().0, 3);
        assert_eq!(exact_chromatic_number(&gen::cycle(6)).unwrap().0, 2);
        assert_eq!(exact_chromatic_number(&gen::cycle(7)).unwrap().0, 3);
        assert_eq!(exact_chromatic_number(&gen::complete(4)).unwrap().0, 4);
        assert_eq!(exact_chromatic_number(&gen::path(6)).unwrap().0, 2);
        assert_eq!(exact_chromatic_number(&OrderedGraph::edgeless(5)).unwrap().0, 1);
        assert_eq!(exact_chromatic_number(&OrderedGraph::edgeless(0)).unwrap().0, 0);
    }

    #[test]
    fn chromatic_witness_is_proper_and_tight() {
        for seed in 0..20 {
            let g = gen::gnp(10, 0.4, 100 + seed).unwrap();
            let (chi, coloring) = exact_chromatic_number(&g).unwrap();
            assert!(coloring.is_proper(&g));
            assert_eq!(coloring.palette(), chi);
            let (w, _) = exact_clique_number(&g).unwrap();
            assert!(chi >= w);
            assert!(chi <= dsatur(&g).palette());
        }
    }

    #[test]
    fn primality_of_small_graphs() {
        assert!(is_prime(&gen::cycle(5)));
        assert!(is_prime(&gen::path(4)));
        assert!(!is_prime(&gen::cycle(4)));
        assert!(!is_prime(&gen::complete(3)));
        assert!(!is_prime(&gen::path(3)));
        assert!(!is_prime(&OrderedGraph::edgeless(4)));
        // two disjoint edges: each edge is a module
        let g = OrderedGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(!is_prime(&g));
    }

    #[test]
    fn enumeration_counts_and_masks() {
        assert_eq!(enumerate_graphs(3).unwrap().count(), 8);
        assert_eq!(enumerate_graphs(4).unwrap().count(), 64);
        assert!(enumerate_graphs(8).is_err());
        let edge_counts: Vec<usize> = enumerate_graphs(3)
            .unwrap()
            .map(|g| g.edge_count())
            .collect();
        assert_eq!(edge_counts.iter().filter(|&&c| c == 0).count(), 1);
        assert_eq!(edge_counts.iter().filter(|&&c| c == 1).count(), 3);
        assert_eq!(edge_counts.iter().filter(|&&c| c == 3).count(), 1);
        // mask round trip
        let g = graph_from_mask(4, 0b101001);
        let mut mask = 0u64;
        let mut bit = 0;
        for u in 0..4 {
            for v in u + 1..4 {
                if g.has_edge(u, v) {
                    mask |= 1 << bit;
                }
                bit += 1;
            }
        }
        assert_eq!(mask, 0b101001);
    }

    #[test]
    fn permutation_successor_is_lexicographic() {
        let mut p = vec![0, 1, 2];
        let mut seen = vec![p.clone()];
        while next_permutation(&mut p) {
            seen.push(p.clone());
        }
        assert_eq!(seen.len(), 6);
        for w in seen.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(seen.last().unwrap(), &vec![2, 1, 0]);
    }

    #[test]
    fn min_amf_of_known_graphs() {
        // the five-cycle is not a cograph, and no 3-block almost mixed
        // minor fits in five vertices, so every ordering scores exactly 3
        let (d, order) = min_amf(&gen::cycle(5)).unwrap();
        assert_eq!(d, 3);
        assert_eq!(order, vec![0, 1, 2, 3, 4]);

        let (d, order) = min_amf(&gen::path(4)).unwrap();
        assert_eq!(d, 3);
        assert_eq!(order, vec![0, 1, 2, 3]);

        // complete graphs have constant off-diagonal zones everywhere
        assert_eq!(min_amf(&gen::complete(4)).unwrap(), (2, vec![0, 1, 2, 3]));
        assert_eq!(min_amf(&OrderedGraph::edgeless(4)).unwrap().0, 2);
        assert_eq!(min_amf(&gen::path(1)).unwrap(), (2, vec![0]));
        assert!(min_amf(&OrderedGraph::edgeless(0)).is_err());
    }

    #[test]
    fn threshold_graphs_are_two_amf_in_identity_order() {
        for seed in 0..10 {
            let g = gen::random_threshold(6, seed);
            let (d, order) = min_amf(&g).unwrap();
            assert_eq!(d, 2, "threshold graph seed {seed}");
            assert_eq!(order, vec![0, 1, 2, 3, 4, 5]);
        }
    }

    #[test]
    fn min_mixed_free_brackets_min_amf() {
        assert_eq!(min_mixed_free(&gen::path(1)).unwrap(), (1, vec![0]));
        for (name, g) in [
            ("c5", gen::cycle(5)),
            ("p4", gen::path(4)),
            ("k4", gen::complete(4)),
            ("2k2", OrderedGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap()),
        ] {
            let (mf, _) = min_mixed_free(&g).unwrap();
            let (amf, _) = min_amf(&g).unwrap();
            assert!(mf <= amf, "{name}: {mf} > {amf}");
            assert!(amf <= 2 * mf, "{name}: {amf} > 2 * {mf}");
        }
    }
}
