//! Exhaustive and randomized exploration of continuous self-maps.
//!
//! Deciding whether an image has the approximate fixed point property is a
//! constraint search: assign an image vertex to each vertex in sorted
//! order, subject to continuity (adjacent vertices get equal-or-adjacent
//! images) and, for the AFPP question, the extra constraint that no vertex
//! may land within one step of itself. A completed assignment is then a
//! continuous self-map with no approximate fixed point — a witness that
//! the property fails. Exhausting the space without one proves it holds.
//!
//! Vertex index sets are stored as `u128` bitmasks, which caps the engine
//! at 128 vertices — far beyond the practical limit for exhaustive search,
//! and checked explicitly rather than assumed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lattice::{AdjacencyRule, DigitalImage, Point};
use crate::maps::DigitalMap;

/// Resource limits for a search, plus the seed for randomized runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    /// Refuse images with more vertices than this before searching at all.
    pub max_vertices: usize,
    /// Abort after this many candidate assignments have been tried.
    pub max_nodes: u64,
    /// Seed for randomized exploration; exhaustive search ignores it.
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_vertices: 14, max_nodes: 100_000_000, seed: 0 }
    }
}

/// Errors from the search entry points.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("budget limits must be positive")]
    InvalidBudget,
    #[error("image has {len} vertices, over the budget's limit of {max}")]
    TooManyVertices { len: usize, max: usize },
    #[error("image has {len} vertices, over the engine's hard cap of 128")]
    EngineCapacity { len: usize },
    #[error("node budget exhausted after {nodes_explored} assignments")]
    BudgetExceeded { nodes_explored: u64 },
}

/// The answer to an AFPP question, with enough context to audit it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AfppVerdict {
    /// Whether every continuous self-map has an approximate fixed point.
    pub holds: bool,
    /// When the property fails: the first (in canonical assignment order)
    /// continuous self-map with no approximate fixed point.
    pub witness: Option<DigitalMap>,
    /// Candidate assignments tried before the answer was known.
    pub nodes_explored: u64,
    /// True when the whole space was ruled out; a failing verdict stops at
    /// its witness instead, so this mirrors `holds`.
    pub exhaustive: bool,
}

/// Tally of an enumeration run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// Continuous self-maps delivered to the consumer.
    pub count: u64,
    pub nodes_explored: u64,
    /// True when the consumer stopped the run early.
    pub halted: bool,
}

fn full_mask(n: usize) -> u128 {
    if n >= 128 {
        !0
    } else {
        (1u128 << n) - 1
    }
}

fn above_mask(k: usize) -> u128 {
    if k >= 128 {
        0
    } else {
        !0u128 << k
    }
}

/// Per-vertex open adjacency and closed neighborhood bitmasks.
fn masks(image: &DigitalImage) -> (Vec<u128>, Vec<u128>) {
    let n = image.len();
    let mut adj = vec![0u128; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if image.adjacent_idx(i, j) {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    let nstar: Vec<u128> = (0..n).map(|i| adj[i] | (1 << i)).collect();
    (adj, nstar)
}

/// Depth-first assignment search with forward checking.
///
/// Variables are domain vertices in sorted order; values are codomain
/// vertex indices, tried ascending. Assigning `f(i) = v` narrows every
/// later neighbor `j` of `i` to the closed neighborhood of `v`, so any
/// completed assignment is continuous by construction and solutions arrive
/// in canonical (lexicographic image table) order.
struct Dfs<'a, F: FnMut(&[usize]) -> bool> {
    n: usize,
    adj: &'a [u128],
    nstar: &'a [u128],
    domains: Vec<u128>,
    assignment: Vec<usize>,
    trail: Vec<(usize, u128)>,
    nodes: u64,
    max_nodes: u64,
    halted: bool,
    on_solution: F,
}

impl<F: FnMut(&[usize]) -> bool> Dfs<'_, F> {
    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (j, old) = self.trail.pop().expect("trail entries above the mark");
            self.domains[j] = old;
        }
    }

    /// Narrows later neighbors of `var` to the closed neighborhood of `v`;
    /// false when some neighbor's domain empties.
    fn forward_check(&mut self, var: usize, v: usize) -> bool {
        let mut future = self.adj[var] & above_mask(var + 1);
        while future != 0 {
            let j = future.trailing_zeros() as usize;
            future &= future - 1;
            let old = self.domains[j];
            let new = old & self.nstar[v];
            if new != old {
                self.trail.push((j, old));
                self.domains[j] = new;
                if new == 0 {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, depth: usize) -> Result<(), SearchError> {
        if depth == self.n {
            if !(self.on_solution)(&self.assignment) {
                self.halted = true;
            }
            return Ok(());
        }
        let mut values = self.domains[depth];
        while values != 0 {
            let v = values.trailing_zeros() as usize;
            values &= values - 1;
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(SearchError::BudgetExceeded { nodes_explored: self.nodes });
            }
            let mark = self.trail.len();
            if self.forward_check(depth, v) {
                self.assignment[depth] = v;
                self.run(depth + 1)?;
            }
            self.undo_to(mark);
            if self.halted {
                return Ok(());
            }
        }
        Ok(())
    }
}

fn check_budget(image: &DigitalImage, budget: &SearchBudget) -> Result<(), SearchError> {
    if budget.max_vertices == 0 || budget.max_nodes == 0 {
        return Err(SearchError::InvalidBudget);
    }
    let len = image.len();
    if len > budget.max_vertices {
        return Err(SearchError::TooManyVertices { len, max: budget.max_vertices });
    }
    if len > 128 {
        return Err(SearchError::EngineCapacity { len });
    }
    Ok(())
}

fn map_from_assignment(image: &DigitalImage, assignment: &[usize]) -> DigitalMap {
    DigitalMap::new(image.clone(), image.clone(), assignment.to_vec())
        .expect("assignments index the image's own vertices")
}

/// Decides whether `image` has the approximate fixed point property by
/// searching for a continuous self-map with no approximate fixed point.
///
/// The verdict is exact: `holds` is only reported after the whole space is
/// ruled out, and a failing verdict carries the first witness found in
/// canonical order, so reruns are reproducible. Exceeding the node budget
/// is an error, never a verdict.
pub fn decide_afpp(image: &DigitalImage, budget: &SearchBudget) -> Result<AfppVerdict, SearchError> {
    check_budget(image, budget)?;
    let n = image.len();
    let (adj, nstar) = masks(image);
    let full = full_mask(n);
    let domains: Vec<u128> = (0..n).map(|i| full & !nstar[i]).collect();

    // A vertex adjacent-or-equal to everything is an approximate fixed
    // point of every self-map; no search needed.
    if domains.iter().any(|&d| d == 0) {
        return Ok(AfppVerdict { holds: true, witness: None, nodes_explored: 0, exhaustive: true });
    }

    let mut witness: Option<Vec<usize>> = None;
    let mut dfs = Dfs {
        n,
        adj: &adj,
        nstar: &nstar,
        domains,
        assignment: vec![0; n],
        trail: Vec::new(),
        nodes: 0,
        max_nodes: budget.max_nodes,
        halted: false,
        on_solution: |a: &[usize]| {
            witness = Some(a.to_vec());
            false
        },
    };
    dfs.run(0)?;
    let nodes_explored = dfs.nodes;
    drop(dfs);
    match witness {
        Some(a) => Ok(AfppVerdict {
            holds: false,
            witness: Some(map_from_assignment(image, &a)),
            nodes_explored,
            exhaustive: false,
        }),
        None => Ok(AfppVerdict { holds: true, witness: None, nodes_explored, exhaustive: true }),
    }
}

/// Enumerates every continuous self-map of `image` in canonical order,
/// feeding each to `consumer`; a `false` return stops the run early.
pub fn enumerate_continuous_self_maps(
    image: &DigitalImage,
    budget: &SearchBudget,
    mut consumer: impl FnMut(&DigitalMap) -> bool,
) -> Result<Enumeration, SearchError> {
    check_budget(image, budget)?;
    let n = image.len();
    let (adj, nstar) = masks(image);
    let mut count = 0u64;
    let mut dfs = Dfs {
        n,
        adj: &adj,
        nstar: &nstar,
        domains: vec![full_mask(n); n],
        assignment: vec![0; n],
        trail: Vec::new(),
        nodes: 0,
        max_nodes: budget.max_nodes,
        halted: false,
        on_solution: |a: &[usize]| {
            count += 1;
            consumer(&map_from_assignment(image, a))
        },
    };
    dfs.run(0)?;
    let (nodes_explored, halted) = (dfs.nodes, dfs.halted);
    drop(dfs);
    Ok(Enumeration { count, nodes_explored, halted })
}

/// A pseudorandom continuous self-map of `image`, reproducible from the
/// seed.
///
/// Runs the same forward-checking search with value order shuffled per
/// vertex and keeps the first completed assignment, so the result is
/// biased toward nothing in particular but is always continuous. On
/// images beyond the engine's reach it degrades to the constant map onto
/// the least vertex, which is continuous on any image.
pub fn random_continuous_self_map(image: &DigitalImage, seed: u64) -> DigitalMap {
    let n = image.len();
    let least = &image.vertices()[0];
    let fallback = || {
        DigitalMap::constant(image, image, least).expect("least vertex is in the image")
    };
    if n > 128 {
        return fallback();
    }
    let (adj, nstar) = masks(image);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut domains = vec![full_mask(n); n];
    let mut assignment = vec![0usize; n];
    let mut nodes = 0u64;
    const SAMPLE_NODE_CAP: u64 = 1_000_000;

    fn rec(
        depth: usize,
        n: usize,
        adj: &[u128],
        nstar: &[u128],
        domains: &mut Vec<u128>,
        assignment: &mut Vec<usize>,
        rng: &mut ChaCha8Rng,
        nodes: &mut u64,
    ) -> Option<bool> {
        if depth == n {
            return Some(true);
        }
        let mut values: Vec<usize> = {
            let mut mask = domains[depth];
            let mut v = Vec::new();
            while mask != 0 {
                v.push(mask.trailing_zeros() as usize);
                mask &= mask - 1;
            }
            v
        };
        values.shuffle(rng);
        for v in values {
            *nodes += 1;
            if *nodes > SAMPLE_NODE_CAP {
                return None; // give up; caller falls back
            }
            let mut saved: Vec<(usize, u128)> = Vec::new();
            let mut dead = false;
            let mut future = adj[depth] & above_mask(depth + 1);
            while future != 0 {
                let j = future.trailing_zeros() as usize;
                future &= future - 1;
                let old = domains[j];
                let new = old & nstar[v];
                if new != old {
                    saved.push((j, old));
                    domains[j] = new;
                    if new == 0 {
                        dead = true;
                        break;
                    }
                }
            }
            if !dead {
                assignment[depth] = v;
                match rec(depth + 1, n, adj, nstar, domains, assignment, rng, nodes) {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => return None,
                }
            }
            for (j, old) in saved.into_iter().rev() {
                domains[j] = old;
            }
        }
        Some(false)
    }

    match rec(0, n, &adj, &nstar, &mut domains, &mut assignment, &mut rng, &mut nodes) {
        Some(true) => map_from_assignment(image, &assignment),
        // The identity map means a solution always exists, so only the node
        // cap lands here.
        _ => fallback(),
    }
}

/// A small pseudorandom digital image, reproducible from the seed: a
/// lattice point cloud, an explicit random graph, or a normal product of
/// two tiny intervals. Intended as fodder for cross-checking search
/// results against independent oracles.
pub fn random_image(seed: u64) -> DigitalImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match rng.random_range(0..3u32) {
        0 => {
            // Point cloud in a small cube under lattice adjacency. One
            // dimension only offers five distinct coordinates, so cap the
            // cloud size below the sample space.
            let dim = rng.random_range(1..=3usize);
            let count = rng.random_range(1..=if dim == 1 { 5usize } else { 6 });
            let u = rng.random_range(1..=dim);
            let mut points = std::collections::BTreeSet::new();
            while points.len() < count {
                let coords: Vec<i64> = (0..dim).map(|_| rng.random_range(-2..=2)).collect();
                points.insert(Point::new(coords));
            }
            DigitalImage::new(points.into_iter().collect(), AdjacencyRule::Cu(u))
                .expect("generated points share a dimension")
        }
        1 => {
            // Random graph on 1-D points with explicit adjacency.
            let count = rng.random_range(1..=6usize);
            let points: Vec<Point> = (0..count as i64).map(|i| Point::new(vec![i])).collect();
            let mut edges = Vec::new();
            for i in 0..count {
                for j in (i + 1)..count {
                    if rng.random_bool(0.5) {
                        edges.push((i, j));
                    }
                }
            }
            DigitalImage::from_edges(points, &edges).expect("edges index generated points")
        }
        _ => {
            // Normal product of two short intervals (at most 6 vertices).
            let a = rng.random_range(0..=2i64);
            let b = rng.random_range(0..=1i64);
            let left = crate::lattice::make_box(&[(0, a)], 1).expect("valid interval");
            let right = crate::lattice::make_box(&[(0, b)], 1).expect("valid interval");
            crate::products::np_product(&left, &right).image().clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_box;
    use crate::maps::approximate_fixed_points;

    fn p<const N: usize>(coords: [i64; N]) -> Point {
        Point::from(coords)
    }

    fn default_budget() -> SearchBudget {
        SearchBudget::default()
    }

    #[test]
    fn three_point_path_has_17_continuous_self_maps() {
        let line = make_box(&[(0, 2)], 1).unwrap();
        let mut tables = Vec::new();
        let run = enumerate_continuous_self_maps(&line, &default_budget(), |f| {
            tables.push(f.table().to_vec());
            true
        })
        .unwrap();
        assert_eq!(run.count, 17);
        assert!(!run.halted);
        // Canonical order: image tables ascend lexicographically.
        assert_eq!(tables[0], vec![0, 0, 0]);
        assert_eq!(tables[1], vec![0, 0, 1]);
        assert_eq!(tables[2], vec![0, 1, 0]);
        assert_eq!(tables.last().unwrap(), &vec![2, 2, 2]);
        let mut sorted = tables.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 17, "all enumerated maps are distinct");
        assert_eq!(sorted, tables);
    }

    #[test]
    fn unit_interval_has_4_continuous_self_maps() {
        let line = make_box(&[(0, 1)], 1).unwrap();
        let run =
            enumerate_continuous_self_maps(&line, &default_budget(), |_| true).unwrap();
        assert_eq!(run.count, 4);
    }

    #[test]
    fn singleton_has_exactly_the_identity() {
        let dot = DigitalImage::new(vec![p([3])], AdjacencyRule::Cu(1)).unwrap();
        let run = enumerate_continuous_self_maps(&dot, &default_budget(), |f| {
            assert_eq!(f, &DigitalMap::identity(&dot));
            true
        })
        .unwrap();
        assert_eq!(run.count, 1);
    }

    #[test]
    fn enumeration_stops_when_the_consumer_says_so() {
        let line = make_box(&[(0, 2)], 1).unwrap();
        let mut seen = 0;
        let run = enumerate_continuous_self_maps(&line, &default_budget(), |_| {
            seen += 1;
            seen < 3
        })
        .unwrap();
        assert_eq!(run.count, 3);
        assert!(run.halted);
    }

    #[test]
    fn every_enumerated_map_is_continuous() {
        let square = make_box(&[(0, 1), (0, 1)], 1).unwrap();
        let run = enumerate_continuous_self_maps(&square, &default_budget(), |f| {
            assert!(f.is_continuous(), "enumerated map {f} must be continuous");
            true
        })
        .unwrap();
        assert!(run.count > 0);
    }

    #[test]
    fn unit_interval_holds_without_search() {
        // Both vertices are adjacent-or-equal to everything, so every
        // self-map trivially has an approximate fixed point.
        let line = make_box(&[(0, 1)], 1).unwrap();
        let verdict = decide_afpp(&line, &default_budget()).unwrap();
        assert!(verdict.holds);
        assert!(verdict.exhaustive);
        assert_eq!(verdict.nodes_explored, 0);
        assert_eq!(verdict.witness, None);
    }

    #[test]
    fn longer_interval_holds_after_real_search() {
        let line = make_box(&[(0, 4)], 1).unwrap();
        let verdict = decide_afpp(&line, &default_budget()).unwrap();
        assert!(verdict.holds);
        assert!(verdict.exhaustive);
        assert!(verdict.nodes_explored > 0, "no instant-win shortcut applies here");
    }

    #[test]
    fn two_far_points_fail_via_the_swap() {
        let pair = DigitalImage::new(vec![p([0]), p([5])], AdjacencyRule::Cu(1)).unwrap();
        let verdict = decide_afpp(&pair, &default_budget()).unwrap();
        assert!(!verdict.holds);
        assert!(!verdict.exhaustive);
        let witness = verdict.witness.unwrap();
        assert!(witness.is_continuous());
        assert_eq!(approximate_fixed_points(&witness).unwrap(), vec![]);
        assert_eq!(witness.apply(&p([0])).unwrap(), &p([5]));
        assert_eq!(witness.apply(&p([5])).unwrap(), &p([0]));
    }

    #[test]
    fn four_cycle_fails_via_the_antipodal_map() {
        let square = make_box(&[(0, 1), (0, 1)], 1).unwrap();
        let verdict = decide_afpp(&square, &default_budget()).unwrap();
        assert!(!verdict.holds);
        let witness = verdict.witness.unwrap();
        for (x, fx) in witness.pairs() {
            let expected: Vec<i64> = x.coords().iter().map(|c| 1 - c).collect();
            assert_eq!(fx.coords(), expected, "witness should be the antipodal map");
        }
    }

    #[test]
    fn verdicts_are_deterministic() {
        let square = make_box(&[(0, 1), (0, 1)], 1).unwrap();
        let a = decide_afpp(&square, &default_budget()).unwrap();
        let b = decide_afpp(&square, &default_budget()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn budget_violations_are_errors_not_verdicts() {
        let line = make_box(&[(0, 6)], 1).unwrap();
        let starved = SearchBudget { max_nodes: 5, ..Default::default() };
        assert!(matches!(
            decide_afpp(&line, &starved),
            Err(SearchError::BudgetExceeded { nodes_explored: 6 })
        ));

        let narrow = SearchBudget { max_vertices: 3, ..Default::default() };
        assert_eq!(
            decide_afpp(&line, &narrow),
            Err(SearchError::TooManyVertices { len: 7, max: 3 })
        );

        let broken = SearchBudget { max_nodes: 0, ..Default::default() };
        assert_eq!(decide_afpp(&line, &broken), Err(SearchError::InvalidBudget));
    }

    #[test]
    fn sampling_is_seeded_and_always_continuous() {
        let grid = make_box(&[(0, 3), (0, 3)], 1).unwrap();
        let a = random_continuous_self_map(&grid, 42);
        let b = random_continuous_self_map(&grid, 42);
        assert_eq!(a, b);
        for seed in 0..20 {
            let f = random_continuous_self_map(&grid, seed);
            assert!(f.is_continuous(), "seed {seed} produced a discontinuous map");
        }
        let distinct: std::collections::BTreeSet<Vec<usize>> =
            (0..20).map(|s| random_continuous_self_map(&grid, s).table().to_vec()).collect();
        assert!(distinct.len() > 1, "twenty seeds should not all collide");
    }

    #[test]
    fn random_images_are_reproducible_and_searchable() {
        for seed in 0..40 {
            let image = random_image(seed);
            assert_eq!(image, random_image(seed));
            assert!(image.len() <= 6);
            let verdict = decide_afpp(&image, &default_budget()).unwrap();
            if let Some(w) = verdict.witness {
                assert!(w.is_continuous());
                assert!(approximate_fixed_points(&w).unwrap().is_empty());
            }
        }
    }
}
