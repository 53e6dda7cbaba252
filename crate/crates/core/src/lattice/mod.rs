//! Points on the integer lattice, adjacency rules, and digital images.
//!
//! Everything downstream builds on [`DigitalImage`]: a finite, non-empty set
//! of [`Point`]s of uniform dimension together with an [`AdjacencyRule`]
//! that decides which pairs of its points are adjacent. Vertices are kept
//! sorted lexicographically, which fixes the iteration order used for
//! "first match" guarantees throughout the crate: neighborhoods, paths,
//! search witnesses, and enumeration order all derive from it.

mod tree;

pub use tree::{enumerate_trees, TreeStructure};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Errors from constructing or querying lattice data.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("points have different dimensions ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("adjacency parameter u={u} out of range for dimension {dim} (need 1 <= u <= dim)")]
    UOutOfRange { u: usize, dim: usize },
    #[error("a digital image must contain at least one point")]
    EmptyImage,
    #[error("interval {index} is empty ({lo} > {hi})")]
    EmptyInterval { index: usize, lo: i64, hi: i64 },
    #[error("a box needs at least one interval")]
    NoIntervals,
    #[error("point {point} is not a vertex of the image")]
    VertexNotInImage { point: Point },
    #[error("edge endpoint {point} is not a vertex of the image")]
    EdgeEndpointMissing { point: Point },
    #[error("edge index {index} out of range for {len} vertices")]
    EdgeIndexOutOfRange { index: usize, len: usize },
    #[error("adjacency is irreflexive; loop at {point} rejected")]
    LoopEdge { point: Point },
    #[error("product split at {split} invalid for dimension {dim}")]
    BadSplit { split: usize, dim: usize },
    #[error("image is not a tree (must be connected with |V| - 1 edges)")]
    NotATree,
}

/// A point of `Z^n` for some `n >= 1`.
///
/// Ordering is lexicographic on coordinates; since every context compares
/// points of equal dimension, this is a total order with no surprises.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(Vec<i64>);

impl Point {
    /// Creates a point from its coordinates.
    ///
    /// # Panics
    ///
    /// Panics if `coords` is empty; zero-dimensional points are never
    /// meaningful here.
    pub fn new(coords: Vec<i64>) -> Self {
        assert!(!coords.is_empty(), "a point needs at least one coordinate");
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// Splits into the first `at` coordinates and the rest.
    ///
    /// # Panics
    ///
    /// Panics unless `1 <= at < dim`, since both halves must be points.
    pub fn split(&self, at: usize) -> (Point, Point) {
        assert!(at >= 1 && at < self.dim(), "split must leave both halves non-empty");
        let (a, b) = self.0.split_at(at);
        (Point(a.to_vec()), Point(b.to_vec()))
    }

    /// Concatenates coordinates, e.g. `(1, 2) ++ (3)` is `(1, 2, 3)`.
    pub fn concat(&self, other: &Point) -> Point {
        let mut coords = self.0.clone();
        coords.extend_from_slice(&other.0);
        Point(coords)
    }
}

impl From<&[i64]> for Point {
    fn from(coords: &[i64]) -> Self {
        Point::new(coords.to_vec())
    }
}

impl<const N: usize> From<[i64; N]> for Point {
    fn from(coords: [i64; N]) -> Self {
        Point::new(coords.to_vec())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Tests `c_u`-adjacency of two lattice points.
///
/// `x` and `y` are `c_u`-adjacent when they are distinct, at most `u`
/// coordinates differ, and every differing coordinate differs by exactly 1.
/// In the plane, `u = 1` is 4-adjacency and `u = 2` is 8-adjacency.
pub fn cu_adjacent(x: &Point, y: &Point, u: usize) -> Result<bool, LatticeError> {
    if x.dim() != y.dim() {
        return Err(LatticeError::DimensionMismatch { left: x.dim(), right: y.dim() });
    }
    if u < 1 || u > x.dim() {
        return Err(LatticeError::UOutOfRange { u, dim: x.dim() });
    }
    Ok(cu_adjacent_coords(x.coords(), y.coords(), u))
}

fn cu_adjacent_coords(x: &[i64], y: &[i64], u: usize) -> bool {
    let mut differing = 0usize;
    for (a, b) in x.iter().zip(y) {
        match a.abs_diff(*b) {
            0 => {}
            1 => differing += 1,
            _ => return false,
        }
    }
    differing >= 1 && differing <= u
}

/// How a digital image decides adjacency of its points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdjacencyRule {
    /// Lattice adjacency `c_u`: at most `u` coordinates differ, each by
    /// exactly 1.
    Cu(usize),
    /// An explicit symmetric edge set; pairs are stored normalized with the
    /// smaller endpoint first.
    Explicit(Arc<BTreeSet<(Point, Point)>>),
    /// The normal product of two rules acting on the first `split`
    /// coordinates and the remaining ones respectively. Two points are
    /// adjacent when they differ, and each half is either equal or adjacent
    /// under its factor's rule.
    Np { left: Box<AdjacencyRule>, right: Box<AdjacencyRule>, split: usize },
}

impl AdjacencyRule {
    /// Builds an explicit rule from an edge list, normalizing pair order
    /// and rejecting loops.
    pub fn explicit(
        edges: impl IntoIterator<Item = (Point, Point)>,
    ) -> Result<AdjacencyRule, LatticeError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a.dim() != b.dim() {
                return Err(LatticeError::DimensionMismatch { left: a.dim(), right: b.dim() });
            }
            if a == b {
                return Err(LatticeError::LoopEdge { point: a });
            }
            let pair = if a < b { (a, b) } else { (b, a) };
            set.insert(pair);
        }
        Ok(AdjacencyRule::Explicit(Arc::new(set)))
    }

    /// Checks the rule's internal parameters against a point dimension.
    fn validate(&self, dim: usize) -> Result<(), LatticeError> {
        match self {
            AdjacencyRule::Cu(u) => {
                if *u < 1 || *u > dim {
                    return Err(LatticeError::UOutOfRange { u: *u, dim });
                }
            }
            AdjacencyRule::Explicit(edges) => {
                for (a, _) in edges.iter() {
                    if a.dim() != dim {
                        return Err(LatticeError::DimensionMismatch { left: a.dim(), right: dim });
                    }
                }
            }
            AdjacencyRule::Np { left, right, split } => {
                if *split < 1 || *split >= dim {
                    return Err(LatticeError::BadSplit { split: *split, dim });
                }
                left.validate(*split)?;
                right.validate(dim - *split)?;
            }
        }
        Ok(())
    }

    /// Adjacency on raw coordinate slices of equal, already-validated
    /// dimension.
    fn adjacent_coords(&self, x: &[i64], y: &[i64]) -> bool {
        match self {
            AdjacencyRule::Cu(u) => cu_adjacent_coords(x, y, *u),
            AdjacencyRule::Explicit(edges) => {
                if x == y {
                    return false;
                }
                let a = Point(x.to_vec());
                let b = Point(y.to_vec());
                let pair = if a < b { (a, b) } else { (b, a) };
                edges.contains(&pair)
            }
            AdjacencyRule::Np { left, right, split } => {
                let (xl, xr) = x.split_at(*split);
                let (yl, yr) = y.split_at(*split);
                let left_eq = xl == yl;
                let right_eq = xr == yr;
                if left_eq && right_eq {
                    return false;
                }
                (left_eq || left.adjacent_coords(xl, yl))
                    && (right_eq || right.adjacent_coords(xr, yr))
            }
        }
    }
}

/// A finite digital image: sorted vertices plus an adjacency rule.
///
/// The optional name is a display label only and is ignored by equality.
#[derive(Debug, Clone)]
pub struct DigitalImage {
    vertices: Arc<Vec<Point>>,
    rule: AdjacencyRule,
    name: Option<String>,
}

impl PartialEq for DigitalImage {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.rule == other.rule
    }
}

impl Eq for DigitalImage {}

impl DigitalImage {
    /// Creates an image from a vertex list (deduplicated and sorted) and a
    /// rule. Rejects empty vertex sets, mixed dimensions, out-of-range rule
    /// parameters, and explicit edges whose endpoints are not vertices.
    pub fn new(vertices: Vec<Point>, rule: AdjacencyRule) -> Result<Self, LatticeError> {
        let image = Self::with_unchecked_rule(vertices, rule)?;
        image.rule.validate(image.dim())?;
        if let AdjacencyRule::Explicit(edges) = &image.rule {
            for (a, b) in edges.iter() {
                for p in [a, b] {
                    if !image.contains(p) {
                        return Err(LatticeError::EdgeEndpointMissing { point: p.clone() });
                    }
                }
            }
        }
        Ok(image)
    }

    /// Creates an image with an explicit rule given by index pairs into
    /// `vertices` (in the order passed, before sorting).
    pub fn from_edges(
        vertices: Vec<Point>,
        edges: &[(usize, usize)],
    ) -> Result<Self, LatticeError> {
        let mut pairs = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            for index in [i, j] {
                if index >= vertices.len() {
                    return Err(LatticeError::EdgeIndexOutOfRange { index, len: vertices.len() });
                }
            }
            pairs.push((vertices[i].clone(), vertices[j].clone()));
        }
        Self::new(vertices, AdjacencyRule::explicit(pairs)?)
    }

    /// Shared constructor body that skips explicit-edge endpoint checks;
    /// used by `subimage`, where edges may mention dropped vertices.
    fn with_unchecked_rule(
        mut vertices: Vec<Point>,
        rule: AdjacencyRule,
    ) -> Result<Self, LatticeError> {
        if vertices.is_empty() {
            return Err(LatticeError::EmptyImage);
        }
        let dim = vertices[0].dim();
        for p in &vertices {
            if p.dim() != dim {
                return Err(LatticeError::DimensionMismatch { left: dim, right: p.dim() });
            }
        }
        vertices.sort();
        vertices.dedup();
        Ok(DigitalImage { vertices: Arc::new(vertices), rule, name: None })
    }

    /// Attaches a display name.
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// The image on `keep` (which must be a non-empty subset of the
    /// vertices) with the adjacency rule inherited unchanged.
    pub fn subimage(&self, keep: &[Point]) -> Result<Self, LatticeError> {
        for p in keep {
            if !self.contains(p) {
                return Err(LatticeError::VertexNotInImage { point: p.clone() });
            }
        }
        Self::with_unchecked_rule(keep.to_vec(), self.rule.clone())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Always false: images are non-empty by construction. Present to keep
    /// clippy's len-without-is-empty lint honest.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn rule(&self) -> &AdjacencyRule {
        &self.rule
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Position of `p` in the sorted vertex list, if present.
    pub fn index_of(&self, p: &Point) -> Option<usize> {
        if p.dim() != self.dim() {
            return None;
        }
        self.vertices.binary_search(p).ok()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.index_of(p).is_some()
    }

    /// Adjacency of two points under this image's rule. Points of the wrong
    /// dimension are simply not adjacent to anything.
    pub fn adjacent(&self, x: &Point, y: &Point) -> bool {
        x.dim() == self.dim()
            && y.dim() == self.dim()
            && self.rule.adjacent_coords(x.coords(), y.coords())
    }

    /// Adjacent or equal — the reflexive closure used by continuity and
    /// approximate fixed points.
    pub fn adjacent_or_equal(&self, x: &Point, y: &Point) -> bool {
        x == y || self.adjacent(x, y)
    }

    /// Adjacency by vertex index.
    pub fn adjacent_idx(&self, i: usize, j: usize) -> bool {
        self.rule.adjacent_coords(self.vertices[i].coords(), self.vertices[j].coords())
    }

    /// Open neighborhood: vertices adjacent to `x`, excluding `x` itself.
    pub fn open_neighborhood(&self, x: &Point) -> Result<Vec<Point>, LatticeError> {
        self.neighborhood_impl(x, false)
    }

    /// Closed neighborhood: `x` together with its adjacent vertices.
    pub fn closed_neighborhood(&self, x: &Point) -> Result<Vec<Point>, LatticeError> {
        self.neighborhood_impl(x, true)
    }

    fn neighborhood_impl(&self, x: &Point, closed: bool) -> Result<Vec<Point>, LatticeError> {
        if !self.contains(x) {
            return Err(LatticeError::VertexNotInImage { point: x.clone() });
        }
        Ok(self
            .vertices
            .iter()
            .filter(|v| if closed { self.adjacent_or_equal(x, v) } else { self.adjacent(x, v) })
            .cloned()
            .collect())
    }

    /// All adjacent index pairs `(i, j)` with `i < j`, in sorted order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.adjacent_idx(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Whether every pair of vertices is joined by a path of adjacent
    /// vertices. Single-vertex images are connected.
    pub fn is_connected(&self) -> bool {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !seen[j] && self.adjacent_idx(i, j) {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == n
    }

    /// Shortest path from `a` to `b` as a vertex sequence, or `None` when
    /// they lie in different components. Among shortest paths, returns the
    /// lexicographically least under the sorted vertex order, so the result
    /// is deterministic. A path from a vertex to itself is `[a]`.
    pub fn find_path(&self, a: &Point, b: &Point) -> Result<Option<Vec<Point>>, LatticeError> {
        let ai = self
            .index_of(a)
            .ok_or_else(|| LatticeError::VertexNotInImage { point: a.clone() })?;
        let bi = self
            .index_of(b)
            .ok_or_else(|| LatticeError::VertexNotInImage { point: b.clone() })?;
        let n = self.len();
        // Distances to b, then walk greedily from a picking the least next
        // vertex that still shortens the distance: that yields the lex-least
        // shortest path without materializing alternatives.
        let mut dist = vec![usize::MAX; n];
        dist[bi] = 0;
        let mut queue = std::collections::VecDeque::from([bi]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if dist[j] == usize::MAX && self.adjacent_idx(i, j) {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        if dist[ai] == usize::MAX {
            return Ok(None);
        }
        let mut path = vec![self.vertices[ai].clone()];
        let mut here = ai;
        while here != bi {
            let next = (0..n)
                .find(|&j| dist[j] + 1 == dist[here] && self.adjacent_idx(here, j))
                .expect("a vertex at finite distance has a neighbor one step closer");
            path.push(self.vertices[next].clone());
            here = next;
        }
        Ok(Some(path))
    }

    /// A tree is a connected image with exactly `|V| - 1` adjacent pairs.
    pub fn is_tree(&self) -> bool {
        self.edge_count() == self.len() - 1 && self.is_connected()
    }
}

/// The axis-aligned box `Π [lo_i, hi_i]` under `c_u` adjacency.
///
/// Every interval must be non-empty (`lo <= hi`) and `u` must satisfy
/// `1 <= u <= bounds.len()`.
pub fn make_box(bounds: &[(i64, i64)], u: usize) -> Result<DigitalImage, LatticeError> {
    if bounds.is_empty() {
        return Err(LatticeError::NoIntervals);
    }
    for (index, &(lo, hi)) in bounds.iter().enumerate() {
        if lo > hi {
            return Err(LatticeError::EmptyInterval { index, lo, hi });
        }
    }
    let mut vertices = Vec::new();
    let mut coords: Vec<i64> = bounds.iter().map(|&(lo, _)| lo).collect();
    'outer: loop {
        vertices.push(Point::new(coords.clone()));
        // Odometer with the last coordinate fastest: emits in lex order.
        for i in (0..coords.len()).rev() {
            if coords[i] < bounds[i].1 {
                coords[i] += 1;
                continue 'outer;
            }
            coords[i] = bounds[i].0;
        }
        break;
    }
    DigitalImage::new(vertices, AdjacencyRule::Cu(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p<const N: usize>(coords: [i64; N]) -> Point {
        Point::from(coords)
    }

    #[test]
    fn cu_counts_differing_coordinates() {
        // 4-adjacency joins axis neighbors only; 8-adjacency adds diagonals.
        let origin = p([0, 0]);
        let side = p([1, 0]);
        let diagonal = p([1, 1]);
        assert!(cu_adjacent(&origin, &side, 1).unwrap());
        assert!(!cu_adjacent(&origin, &diagonal, 1).unwrap());
        assert!(cu_adjacent(&origin, &diagonal, 2).unwrap());
        assert!(!cu_adjacent(&origin, &p([2, 0]), 2).unwrap());
        assert!(!cu_adjacent(&origin, &p([1, 2]), 2).unwrap());
    }

    #[test]
    fn cu_is_irreflexive() {
        assert!(!cu_adjacent(&p([3, 4]), &p([3, 4]), 2).unwrap());
    }

    #[test]
    fn cu_rejects_bad_arguments() {
        assert_eq!(
            cu_adjacent(&p([0]), &p([0, 1]), 1),
            Err(LatticeError::DimensionMismatch { left: 1, right: 2 })
        );
        assert_eq!(
            cu_adjacent(&p([0, 0]), &p([1, 0]), 0),
            Err(LatticeError::UOutOfRange { u: 0, dim: 2 })
        );
        assert_eq!(
            cu_adjacent(&p([0, 0]), &p([1, 0]), 3),
            Err(LatticeError::UOutOfRange { u: 3, dim: 2 })
        );
    }

    proptest! {
        #[test]
        fn cu_is_symmetric_and_irreflexive(
            (x, y, u) in (1usize..=4).prop_flat_map(|len| (
                proptest::collection::vec(-3i64..=3, len),
                proptest::collection::vec(-3i64..=3, len),
                1usize..=len,
            )),
        ) {
            let a = Point::new(x);
            let b = Point::new(y);
            prop_assert_eq!(
                cu_adjacent(&a, &b, u).unwrap(),
                cu_adjacent(&b, &a, u).unwrap()
            );
            prop_assert!(!cu_adjacent(&a, &a, u).unwrap());
        }
    }

    #[test]
    fn points_order_lexicographically() {
        let mut pts = vec![p([1, 0]), p([0, 2]), p([0, 1]), p([1, -1])];
        pts.sort();
        assert_eq!(pts, vec![p([0, 1]), p([0, 2]), p([1, -1]), p([1, 0])]);
    }

    #[test]
    fn point_split_and_concat_are_inverse() {
        let q = p([1, 2, 3]);
        let (a, b) = q.split(2);
        assert_eq!(a, p([1, 2]));
        assert_eq!(b, p([3]));
        assert_eq!(a.concat(&b), q);
    }

    #[test]
    fn image_sorts_and_dedupes_vertices() {
        let image =
            DigitalImage::new(vec![p([2]), p([0]), p([1]), p([0])], AdjacencyRule::Cu(1)).unwrap();
        assert_eq!(image.vertices(), &[p([0]), p([1]), p([2])]);
        assert_eq!(image.len(), 3);
        assert_eq!(image.index_of(&p([1])), Some(1));
        assert!(!image.contains(&p([5])));
    }

    #[test]
    fn image_rejects_invalid_input() {
        assert_eq!(
            DigitalImage::new(vec![], AdjacencyRule::Cu(1)),
            Err(LatticeError::EmptyImage)
        );
        assert_eq!(
            DigitalImage::new(vec![p([0]), p([0, 1])], AdjacencyRule::Cu(1)),
            Err(LatticeError::DimensionMismatch { left: 1, right: 2 })
        );
        assert_eq!(
            DigitalImage::new(vec![p([0, 0])], AdjacencyRule::Cu(3)),
            Err(LatticeError::UOutOfRange { u: 3, dim: 2 })
        );
        let dangling = AdjacencyRule::explicit([(p([0]), p([9]))]).unwrap();
        assert_eq!(
            DigitalImage::new(vec![p([0]), p([1])], dangling),
            Err(LatticeError::EdgeEndpointMissing { point: p([9]) })
        );
    }

    #[test]
    fn explicit_rule_normalizes_and_rejects_loops() {
        let rule = AdjacencyRule::explicit([(p([1]), p([0]))]).unwrap();
        let image = DigitalImage::new(vec![p([0]), p([1])], rule).unwrap();
        assert!(image.adjacent(&p([0]), &p([1])));
        assert!(image.adjacent(&p([1]), &p([0])));
        assert_eq!(
            AdjacencyRule::explicit([(p([2]), p([2]))]),
            Err(LatticeError::LoopEdge { point: p([2]) })
        );
    }

    #[test]
    fn from_edges_indexes_the_input_order() {
        let image = DigitalImage::from_edges(vec![p([5]), p([0])], &[(0, 1)]).unwrap();
        assert!(image.adjacent(&p([5]), &p([0])));
        assert_eq!(
            DigitalImage::from_edges(vec![p([0])], &[(0, 1)]),
            Err(LatticeError::EdgeIndexOutOfRange { index: 1, len: 1 })
        );
    }

    #[test]
    fn neighborhoods_are_sorted_and_validated() {
        let image = make_box(&[(0, 2), (0, 2)], 1).unwrap();
        let center = p([1, 1]);
        assert_eq!(
            image.open_neighborhood(&center).unwrap(),
            vec![p([0, 1]), p([1, 0]), p([1, 2]), p([2, 1])]
        );
        let closed = image.closed_neighborhood(&center).unwrap();
        assert_eq!(closed.len(), 5);
        assert!(closed.contains(&center));
        assert_eq!(
            image.open_neighborhood(&p([9, 9])),
            Err(LatticeError::VertexNotInImage { point: p([9, 9]) })
        );
    }

    #[test]
    fn closed_neighborhood_of_center_under_c2_is_whole_3x3_square() {
        let image = make_box(&[(-1, 1), (-1, 1)], 2).unwrap();
        let closed = image.closed_neighborhood(&p([0, 0])).unwrap();
        assert_eq!(closed, image.vertices().to_vec());
    }

    #[test]
    fn make_box_enumerates_the_product_of_intervals() {
        let image = make_box(&[(0, 1), (3, 4)], 1).unwrap();
        assert_eq!(image.vertices(), &[p([0, 3]), p([0, 4]), p([1, 3]), p([1, 4])]);
        assert_eq!(image.edge_count(), 4);
        assert_eq!(
            make_box(&[(0, 1), (5, 2)], 1),
            Err(LatticeError::EmptyInterval { index: 1, lo: 5, hi: 2 })
        );
        assert_eq!(make_box(&[], 1), Err(LatticeError::NoIntervals));
    }

    #[test]
    fn unit_square_under_c2_is_complete() {
        let image = make_box(&[(0, 1), (0, 1)], 2).unwrap();
        assert_eq!(image.edge_count(), 6);
    }

    #[test]
    fn connectivity_and_paths() {
        let interval = make_box(&[(0, 4)], 1).unwrap();
        assert!(interval.is_connected());
        let path = interval.find_path(&p([0]), &p([4])).unwrap().unwrap();
        assert_eq!(path, vec![p([0]), p([1]), p([2]), p([3]), p([4])]);
        assert_eq!(interval.find_path(&p([2]), &p([2])).unwrap().unwrap(), vec![p([2])]);

        let split = DigitalImage::new(vec![p([0]), p([1]), p([5])], AdjacencyRule::Cu(1)).unwrap();
        assert!(!split.is_connected());
        assert_eq!(split.find_path(&p([0]), &p([5])).unwrap(), None);
        assert!(matches!(
            split.find_path(&p([0]), &p([7])),
            Err(LatticeError::VertexNotInImage { .. })
        ));
    }

    #[test]
    fn find_path_prefers_the_lexicographically_least_route() {
        // The unit square under c_1 has two shortest routes between opposite
        // corners; the one through (0, 1) sorts first.
        let square = make_box(&[(0, 1), (0, 1)], 1).unwrap();
        let path = square.find_path(&p([0, 0]), &p([1, 1])).unwrap().unwrap();
        assert_eq!(path, vec![p([0, 0]), p([0, 1]), p([1, 1])]);
    }

    #[test]
    fn tree_recognition() {
        let path = make_box(&[(0, 3)], 1).unwrap();
        assert!(path.is_tree());
        let square = make_box(&[(0, 1), (0, 1)], 1).unwrap();
        assert!(!square.is_tree()); // a 4-cycle
        let disconnected =
            DigitalImage::new(vec![p([0]), p([2])], AdjacencyRule::Cu(1)).unwrap();
        assert!(!disconnected.is_tree());
        let singleton = DigitalImage::new(vec![p([7])], AdjacencyRule::Cu(1)).unwrap();
        assert!(singleton.is_tree());
    }

    #[test]
    fn subimage_inherits_the_rule() {
        let square = make_box(&[(0, 1), (0, 1)], 2).unwrap();
        let corner_pair = square.subimage(&[p([0, 0]), p([1, 1])]).unwrap();
        assert_eq!(corner_pair.len(), 2);
        assert!(corner_pair.adjacent(&p([0, 0]), &p([1, 1])));
        assert_eq!(
            square.subimage(&[p([5, 5])]),
            Err(LatticeError::VertexNotInImage { point: p([5, 5]) })
        );
        assert_eq!(square.subimage(&[]), Err(LatticeError::EmptyImage));
    }

    #[test]
    fn np_rule_matches_componentwise_definition() {
        // Points of Z^2 = Z x Z with c_1 on each factor: the normal product
        // is adjacency in one or both halves, equality elsewhere.
        let rule = AdjacencyRule::Np {
            left: Box::new(AdjacencyRule::Cu(1)),
            right: Box::new(AdjacencyRule::Cu(1)),
            split: 1,
        };
        let image = DigitalImage::new(
            make_box(&[(0, 1), (0, 1)], 1).unwrap().vertices().to_vec(),
            rule,
        )
        .unwrap();
        assert!(image.adjacent(&p([0, 0]), &p([0, 1])));
        assert!(image.adjacent(&p([0, 0]), &p([1, 0])));
        assert!(image.adjacent(&p([0, 0]), &p([1, 1])));
        assert!(!image.adjacent(&p([0, 0]), &p([0, 0])));
    }

    #[test]
    fn np_rule_validates_split_and_factors() {
        let bad_split = AdjacencyRule::Np {
            left: Box::new(AdjacencyRule::Cu(1)),
            right: Box::new(AdjacencyRule::Cu(1)),
            split: 2,
        };
        assert_eq!(
            DigitalImage::new(vec![p([0, 0])], bad_split),
            Err(LatticeError::BadSplit { split: 2, dim: 2 })
        );
        let bad_factor = AdjacencyRule::Np {
            left: Box::new(AdjacencyRule::Cu(2)),
            right: Box::new(AdjacencyRule::Cu(1)),
            split: 1,
        };
        assert_eq!(
            DigitalImage::new(vec![p([0, 0])], bad_factor),
            Err(LatticeError::UOutOfRange { u: 2, dim: 1 })
        );
    }

    #[test]
    fn names_do_not_affect_equality() {
        let a = make_box(&[(0, 1)], 1).unwrap();
        let b = make_box(&[(0, 1)], 1).unwrap().named("unit interval");
        assert_eq!(a, b);
        assert_eq!(b.name(), Some("unit interval"));
    }

    #[test]
    fn display_formats_points_as_tuples() {
        assert_eq!(p([3]).to_string(), "(3)");
        assert_eq!(p([-1, 2]).to_string(), "(-1, 2)");
    }
}
