//! Digitally continuous maps between images.
//!
//! A map is *digitally continuous* when it sends adjacent domain points to
//! equal or adjacent codomain points; connectedness is preserved but
//! nothing stops a continuous map from collapsing or folding the image.
//! An *approximate fixed point* of a self-map is a point moved at most one
//! adjacency step, i.e. `f(x)` equal or adjacent to `x`.

use std::fmt;

use thiserror::Error;

use crate::lattice::{DigitalImage, LatticeError, Point};
use crate::products::ProductImage;

/// Errors from constructing or combining maps.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("table has {got} entries for {expected} domain vertices")]
    TableLength { expected: usize, got: usize },
    #[error("table entry {index} out of range for {len} codomain vertices")]
    TableEntryOutOfRange { index: usize, len: usize },
    #[error("point {point} is not in the domain")]
    PointNotInDomain { point: Point },
    #[error("image point {point} is not in the codomain")]
    PointNotInCodomain { point: Point },
    #[error("domain point {point} is assigned twice")]
    DuplicateAssignment { point: Point },
    #[error("no assignment for domain point {point}")]
    MissingAssignment { point: Point },
    #[error("inner codomain and outer domain differ; maps do not compose")]
    ComposeMismatch,
    #[error("map is not a self-map (domain and codomain differ)")]
    NotSelfMap,
    #[error("codomain is not a sub-image of the domain")]
    NotSubImage,
    #[error("projection factor must be 1 (base) or 2 (fiber), got {factor}")]
    BadFactorIndex { factor: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A total map between two digital images, stored as an index table from
/// domain vertex order to codomain vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitalMap {
    domain: DigitalImage,
    codomain: DigitalImage,
    table: Vec<usize>,
}

impl DigitalMap {
    /// Builds a map from an index table: `table[i]` is the codomain index
    /// of the image of the `i`-th domain vertex.
    pub fn new(
        domain: DigitalImage,
        codomain: DigitalImage,
        table: Vec<usize>,
    ) -> Result<Self, MapError> {
        if table.len() != domain.len() {
            return Err(MapError::TableLength { expected: domain.len(), got: table.len() });
        }
        for &t in &table {
            if t >= codomain.len() {
                return Err(MapError::TableEntryOutOfRange { index: t, len: codomain.len() });
            }
        }
        Ok(DigitalMap { domain, codomain, table })
    }

    /// Builds a map from `(source, image)` point pairs; every domain vertex
    /// must appear exactly once and every image must lie in the codomain.
    pub fn from_pairs(
        domain: DigitalImage,
        codomain: DigitalImage,
        pairs: &[(Point, Point)],
    ) -> Result<Self, MapError> {
        let mut table = vec![usize::MAX; domain.len()];
        for (source, image) in pairs {
            let si = domain
                .index_of(source)
                .ok_or_else(|| MapError::PointNotInDomain { point: source.clone() })?;
            let ti = codomain
                .index_of(image)
                .ok_or_else(|| MapError::PointNotInCodomain { point: image.clone() })?;
            if table[si] != usize::MAX {
                return Err(MapError::DuplicateAssignment { point: source.clone() });
            }
            table[si] = ti;
        }
        if let Some(i) = table.iter().position(|&t| t == usize::MAX) {
            return Err(MapError::MissingAssignment { point: domain.vertices()[i].clone() });
        }
        DigitalMap::new(domain, codomain, table)
    }

    /// Builds a map by evaluating `f` at every domain vertex; the images
    /// must land in the codomain.
    pub fn from_fn(
        domain: DigitalImage,
        codomain: DigitalImage,
        mut f: impl FnMut(&Point) -> Point,
    ) -> Result<Self, MapError> {
        let mut table = Vec::with_capacity(domain.len());
        for v in domain.vertices() {
            let image = f(v);
            let ti = codomain
                .index_of(&image)
                .ok_or(MapError::PointNotInCodomain { point: image })?;
            table.push(ti);
        }
        DigitalMap::new(domain, codomain, table)
    }

    /// The identity self-map.
    pub fn identity(image: &DigitalImage) -> Self {
        DigitalMap {
            domain: image.clone(),
            codomain: image.clone(),
            table: (0..image.len()).collect(),
        }
    }

    /// The map sending every domain vertex to `value`.
    pub fn constant(
        domain: &DigitalImage,
        codomain: &DigitalImage,
        value: &Point,
    ) -> Result<Self, MapError> {
        let ti = codomain
            .index_of(value)
            .ok_or_else(|| MapError::PointNotInCodomain { point: value.clone() })?;
        Ok(DigitalMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            table: vec![ti; domain.len()],
        })
    }

    pub fn domain(&self) -> &DigitalImage {
        &self.domain
    }

    pub fn codomain(&self) -> &DigitalImage {
        &self.codomain
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// The image of `x`.
    pub fn apply(&self, x: &Point) -> Result<&Point, MapError> {
        let i = self
            .domain
            .index_of(x)
            .ok_or_else(|| MapError::PointNotInDomain { point: x.clone() })?;
        Ok(&self.codomain.vertices()[self.table[i]])
    }

    /// The image of the `i`-th domain vertex, as a codomain index.
    pub fn apply_idx(&self, i: usize) -> usize {
        self.table[i]
    }

    /// `(source, image)` pairs in domain vertex order.
    pub fn pairs(&self) -> impl Iterator<Item = (&Point, &Point)> {
        self.domain
            .vertices()
            .iter()
            .zip(self.table.iter().map(|&t| &self.codomain.vertices()[t]))
    }

    pub fn is_self_map(&self) -> bool {
        self.domain == self.codomain
    }

    /// The first adjacent domain pair (in vertex order) whose images are
    /// neither equal nor adjacent, if any.
    pub fn continuity_violation(&self) -> Option<(Point, Point)> {
        let n = self.domain.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.domain.adjacent_idx(i, j) {
                    let fi = self.table[i];
                    let fj = self.table[j];
                    if fi != fj && !self.codomain.adjacent_idx(fi, fj) {
                        return Some((
                            self.domain.vertices()[i].clone(),
                            self.domain.vertices()[j].clone(),
                        ));
                    }
                }
            }
        }
        None
    }

    /// Whether adjacent points always map to equal or adjacent points.
    pub fn is_continuous(&self) -> bool {
        self.continuity_violation().is_none()
    }

    /// The same assignments on the sub-image spanned by `keep`, which must
    /// be a non-empty subset of the domain's vertices.
    pub fn restrict(&self, keep: &[Point]) -> Result<DigitalMap, MapError> {
        let sub = self.domain.subimage(keep)?;
        let table = sub
            .vertices()
            .iter()
            .map(|v| self.table[self.domain.index_of(v).expect("sub-image vertex")])
            .collect();
        DigitalMap::new(sub, self.codomain.clone(), table)
    }
}

impl fmt::Display for DigitalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (source, image)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{source} -> {image}")?;
        }
        write!(f, "}}")
    }
}

/// `g` after `f`: the composite sending `x` to `g(f(x))`. The codomain of
/// `f` must equal the domain of `g`.
///
/// Composition preserves continuity, and the search and construction code
/// leans on that freely.
pub fn compose(g: &DigitalMap, f: &DigitalMap) -> Result<DigitalMap, MapError> {
    if f.codomain != g.domain {
        return Err(MapError::ComposeMismatch);
    }
    let table = f.table.iter().map(|&i| g.table[i]).collect();
    DigitalMap::new(f.domain.clone(), g.codomain.clone(), table)
}

/// The projection of a normal product onto its base (`factor = 1`) or
/// fiber (`factor = 2`). Projections of normal products are always
/// continuous: adjacency in the product already demands each half be equal
/// or adjacent.
pub fn projection(product: &ProductImage, factor: usize) -> Result<DigitalMap, MapError> {
    let (target, pick): (&DigitalImage, fn(&Point, usize) -> Point) = match factor {
        1 => (product.base(), |p, split| p.split(split).0),
        2 => (product.fiber(), |p, split| p.split(split).1),
        _ => return Err(MapError::BadFactorIndex { factor }),
    };
    let split = product.split();
    DigitalMap::from_fn(product.image().clone(), target.clone(), |p| pick(p, split))
}

/// Whether `r` is a retraction: a continuous map onto a sub-image of its
/// domain that fixes that sub-image pointwise.
///
/// The codomain must have the domain's vertices and adjacency restricted
/// to its point set; otherwise the question is ill-posed and an error is
/// returned.
pub fn is_retraction(r: &DigitalMap) -> Result<bool, MapError> {
    let sub = r.codomain.vertices();
    for v in sub {
        if !r.domain.contains(v) {
            return Err(MapError::NotSubImage);
        }
    }
    for (i, a) in sub.iter().enumerate() {
        for b in &sub[(i + 1)..] {
            if r.codomain.adjacent(a, b) != r.domain.adjacent(a, b) {
                return Err(MapError::NotSubImage);
            }
        }
    }
    if !r.is_continuous() {
        return Ok(false);
    }
    for v in sub {
        if r.apply(v)? != v {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All approximate fixed points of a self-map: vertices `x` with `f(x)`
/// equal or adjacent to `x`, in vertex order.
pub fn approximate_fixed_points(f: &DigitalMap) -> Result<Vec<Point>, MapError> {
    if !f.is_self_map() {
        return Err(MapError::NotSelfMap);
    }
    Ok(f.pairs()
        .filter(|(x, fx)| f.domain.adjacent_or_equal(x, fx))
        .map(|(x, _)| x.clone())
        .collect())
}
