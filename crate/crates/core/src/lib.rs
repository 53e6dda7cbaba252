//! Digital topology on integer lattices: images, continuous maps, normal
//! products, and approximate fixed points.
//!
//! A *digital image* is a finite set of lattice points together with a
//! symmetric, irreflexive adjacency relation. The central question this
//! crate answers is whether an image has the *approximate fixed point
//! property* (AFPP): does every digitally continuous self-map move some
//! point by at most one adjacency step?
//!
//! The crate is split by how that question is attacked:
//!
//! * [`lattice`] — points, adjacency rules, images, and tree shapes;
//! * [`maps`] — digitally continuous maps and operations on them;
//! * [`products`] — the normal product of two images and its interaction
//!   with lattice adjacency;
//! * [`search`] — exhaustive and randomized exploration of continuous
//!   self-maps, including an AFPP decision procedure;
//! * [`constructive`] — direct approximate-fixed-point constructions for
//!   trees, products, and boxes that avoid exhaustive search entirely.

pub mod constructive;
pub mod lattice;
pub mod maps;
pub mod products;
pub mod search;

pub use lattice::{
    cu_adjacent, make_box, AdjacencyRule, DigitalImage, LatticeError, Point, TreeStructure,
};
pub use maps::{DigitalMap, MapError};
pub use products::{np_product, ProductError, ProductImage};
pub use search::{decide_afpp, AfppVerdict, SearchBudget, SearchError};
