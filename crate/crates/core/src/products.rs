//! Normal products of digital images.
//!
//! The normal product of `(X, κ)` and `(Y, λ)` lives on the point set
//! `X × Y` (coordinates concatenated) and joins two distinct points exactly
//! when each half is equal or adjacent under its factor's rule. For full
//! lattice rules this reproduces lattice adjacency one dimension up:
//! building `c_m` on `Z^m` with `c_n` on `Z^n` yields `c_(m+n)`. For
//! under-full rules the two can genuinely differ, which is what
//! [`np_equals_cu`] measures.

use thiserror::Error;

use crate::lattice::{AdjacencyRule, DigitalImage, LatticeError, Point};

/// Errors from product construction and comparison.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProductError {
    #[error("{side} factor does not use lattice (c_u) adjacency")]
    NotCuRule { side: &'static str },
    #[error("cube dimension must be at least 1")]
    BadCubeDimension,
    #[error("cube side length {n} is negative")]
    NegativeSide { n: i64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A normal product, keeping the factors alongside the combined image so
/// projections and factor lookups stay cheap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductImage {
    base: DigitalImage,
    fiber: DigitalImage,
    image: DigitalImage,
    split: usize,
}

impl ProductImage {
    pub fn base(&self) -> &DigitalImage {
        &self.base
    }

    pub fn fiber(&self) -> &DigitalImage {
        &self.fiber
    }

    /// The product as an ordinary digital image; its rule is
    /// [`AdjacencyRule::Np`] splitting at [`split`](Self::split).
    pub fn image(&self) -> &DigitalImage {
        &self.image
    }

    /// How many leading coordinates belong to the base factor.
    pub fn split(&self) -> usize {
        self.split
    }
}

/// Forms the normal product of two images.
pub fn np_product(base: &DigitalImage, fiber: &DigitalImage) -> ProductImage {
    let mut vertices = Vec::with_capacity(base.len() * fiber.len());
    for a in base.vertices() {
        for b in fiber.vertices() {
            vertices.push(a.concat(b));
        }
    }
    let rule = AdjacencyRule::Np {
        left: Box::new(base.rule().clone()),
        right: Box::new(fiber.rule().clone()),
        split: base.dim(),
    };
    let image = DigitalImage::new(vertices, rule)
        .expect("factor images are valid, so their product is");
    ProductImage { base: base.clone(), fiber: fiber.clone(), image, split: base.dim() }
}

/// One vertex pair on which the normal product and lattice adjacency
/// disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpCuDiscrepancy {
    pub left: Point,
    pub right: Point,
    pub np_adjacent: bool,
    pub cu_adjacent: bool,
}

/// Outcome of comparing a normal product against `c_u` adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpCuComparison {
    /// The `u` the product was compared against: the sum of the factors'
    /// parameters.
    pub expected_u: usize,
    pub equal: bool,
    /// The first disagreeing pair in vertex order, when not equal.
    pub discrepancy: Option<NpCuDiscrepancy>,
}

/// Compares the normal product of two lattice-adjacency images against
/// `c_(u_x + u_y)` on the same point set, pair by pair.
///
/// Both factors must use `c_u` rules. Equality is guaranteed when each
/// factor's `u` equals its dimension; under-full factors may or may not
/// agree, and the first counterexample pair is reported when they do not.
pub fn np_equals_cu(x: &DigitalImage, y: &DigitalImage) -> Result<NpCuComparison, ProductError> {
    let ux = match x.rule() {
        AdjacencyRule::Cu(u) => *u,
        _ => return Err(ProductError::NotCuRule { side: "left" }),
    };
    let uy = match y.rule() {
        AdjacencyRule::Cu(u) => *u,
        _ => return Err(ProductError::NotCuRule { side: "right" }),
    };
    let expected_u = ux + uy;
    let product = np_product(x, y);
    let image = product.image();
    let n = image.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = &image.vertices()[i];
            let b = &image.vertices()[j];
            let np = image.adjacent_idx(i, j);
            let cu = crate::lattice::cu_adjacent(a, b, expected_u)
                .expect("product points share a dimension that expected_u cannot exceed");
            if np != cu {
                return Ok(NpCuComparison {
                    expected_u,
                    equal: false,
                    discrepancy: Some(NpCuDiscrepancy {
                        left: a.clone(),
                        right: b.clone(),
                        np_adjacent: np,
                        cu_adjacent: cu,
                    }),
                });
            }
        }
    }
    Ok(NpCuComparison { expected_u, equal: true, discrepancy: None })
}

/// Checks that attaching a cube one axis at a time agrees with attaching
/// it whole: `NP(NP(κ, c_k), c_1)` versus `NP(κ, c_(k+1))` on
/// `X × [0, n]^(k+1)`, compared pairwise as adjacency relations.
///
/// This re-association holds for every image `X`, which is what lets the
/// product constructions peel one cube axis per step.
pub fn np_assoc_check(x: &DigitalImage, k: usize, n: i64) -> Result<bool, ProductError> {
    if k == 0 {
        return Err(ProductError::BadCubeDimension);
    }
    if n < 0 {
        return Err(ProductError::NegativeSide { n });
    }
    let cube_k = crate::lattice::make_box(&vec![(0, n); k], k)?;
    let cube_k1 = crate::lattice::make_box(&vec![(0, n); k + 1], k + 1)?;
    let line = crate::lattice::make_box(&[(0, n)], 1)?;

    let nested = np_product(np_product(x, &cube_k).image(), &line);
    let flat = np_product(x, &cube_k1);

    let left = nested.image();
    let right = flat.image();
    debug_assert_eq!(left.vertices(), right.vertices());
    let count = left.len();
    for i in 0..count {
        for j in (i + 1)..count {
            if left.adjacent_idx(i, j) != right.adjacent_idx(i, j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
