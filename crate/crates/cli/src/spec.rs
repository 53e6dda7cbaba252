//! JSON descriptions of digital images and maps.
//!
//! An image file holds a single [`ImageSpec`] value: a tree of nodes that is
//! elaborated into a concrete [`DigitalImage`] by [`ImageSpec::to_image`].
//! Four node kinds exist:
//!
//! ```json
//! {"box": {"bounds": [[0, 2], [0, 1]], "u": 1}}
//! {"graph": {"vertices": [[0], [1], [2]], "edges": [[0, 1], [1, 2]]}}
//! {"tree": {"edges": [[0, 1], [1, 2]], "root": 0}}
//! {"product": {"left": ..., "right": ...}}
//! ```
//!
//! A `box` node is the grid product of integer intervals under a `c_u` rule.
//! A `graph` node lists explicit vertices (coordinate arrays) and edges as
//! index pairs into the vertex list.  A `tree` node names its vertices by
//! integer ids; the ids become 1-dimensional points, and elaboration fails
//! unless the edge set actually forms a tree.  A `product` node combines two
//! sub-images under the normal product adjacency.
//!
//! A map file is a JSON array of pairs `[[domain-point], [image-point]]`,
//! parsed by [`parse_map_pairs`].  All numbers are integers; no floats appear
//! anywhere in the formats.

use afpp_core::{make_box, np_product, DigitalImage, LatticeError, Point};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// A serializable description of how to build a digital image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageSpec {
    /// Grid product of intervals `[lo, hi]` under the `c_u` rule.
    Box { bounds: Vec<(i64, i64)>, u: usize },
    /// Explicit vertex list with edges given as index pairs.
    Graph {
        vertices: Vec<Vec<i64>>,
        edges: Vec<(usize, usize)>,
    },
    /// Tree on integer vertex ids with a distinguished root.
    Tree { edges: Vec<(i64, i64)>, root: i64 },
    /// Normal product of two sub-images.
    Product {
        left: Box<ImageSpec>,
        right: Box<ImageSpec>,
    },
}

/// Problems turning JSON input into images and maps.
#[derive(Debug, Error)]
pub enum SpecError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph node has a vertex with no coordinates")]
    EmptyVertex,
    #[error("tree node edges do not form a tree")]
    NotATree,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl ImageSpec {
    /// Parses a spec from JSON text.
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Elaborates the spec into a concrete image.
    pub fn to_image(&self) -> Result<DigitalImage, SpecError> {
        match self {
            ImageSpec::Box { bounds, u } => Ok(make_box(bounds, *u)?),
            ImageSpec::Graph { vertices, edges } => {
                if vertices.iter().any(Vec::is_empty) {
                    return Err(SpecError::EmptyVertex);
                }
                let points: Vec<Point> =
                    vertices.iter().map(|v| Point::new(v.clone())).collect();
                Ok(DigitalImage::from_edges(points, edges)?)
            }
            ImageSpec::Tree { edges, root } => {
                let mut ids: BTreeSet<i64> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
                ids.insert(*root);
                let points: Vec<Point> = ids.iter().map(|&id| Point::new(vec![id])).collect();
                let index_edges: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|&(a, b)| {
                        (
                            ids.iter().position(|&id| id == a).expect("id from edge set"),
                            ids.iter().position(|&id| id == b).expect("id from edge set"),
                        )
                    })
                    .collect();
                let image = DigitalImage::from_edges(points, &index_edges)?;
                if !image.is_tree() {
                    return Err(SpecError::NotATree);
                }
                Ok(image)
            }
            ImageSpec::Product { left, right } => {
                let base = left.to_image()?;
                let fiber = right.to_image()?;
                Ok(np_product(&base, &fiber).image().clone())
            }
        }
    }

    /// The root vertex a tree node designates, if this is a tree node.
    pub fn tree_root(&self) -> Option<Point> {
        match self {
            ImageSpec::Tree { root, .. } => Some(Point::new(vec![*root])),
            _ => None,
        }
    }
}

/// Parses a map file: a JSON array of `[[domain-point], [image-point]]` pairs.
pub fn parse_map_pairs(text: &str) -> Result<Vec<(Point, Point)>, SpecError> {
    let raw: Vec<(Vec<i64>, Vec<i64>)> = serde_json::from_str(text)?;
    if raw.iter().any(|(a, b)| a.is_empty() || b.is_empty()) {
        return Err(SpecError::EmptyVertex);
    }
    Ok(raw
        .into_iter()
        .map(|(a, b)| (Point::new(a), Point::new(b)))
        .collect())
}

/// Serializes a table of point pairs in the map-file format.
pub fn map_pairs_to_json(pairs: &[(Point, Point)]) -> String {
    let raw: Vec<(Vec<i64>, Vec<i64>)> = pairs
        .iter()
        .map(|(a, b)| (a.coords().to_vec(), b.coords().to_vec()))
        .collect();
    serde_json::to_string(&raw).expect("map tables are plain data")
}
