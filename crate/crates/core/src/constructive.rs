//! Direct construction of approximate fixed points, no search required.
//!
//! Where [`crate::search`] proves AFPP by exhausting a map space, this
//! module locates an approximate fixed point of one given map in
//! polynomial time, for the image families where a constructive argument
//! exists:
//!
//! * **trees** — repeatedly collapse a leaf onto its neighbor, solve on
//!   the smaller tree, and lift the answer back ([`tree_afp`]);
//! * **products `X × [0,k]^n`** — peel the cube one axis and one slice at
//!   a time, reducing to a caller-supplied finder for `X`
//!   ([`product_afp`]);
//! * **axis-aligned boxes** — combine the two: treat the first interval
//!   as the base and the remaining axes as a (padded) cube
//!   ([`box_afp`]).
//!
//! All three lean on one extension step ([`builder_step`]): if removing a
//! single vertex `x0` leaves a retract whose retraction target dominates
//! `x0`'s neighborhood, then an approximate fixed point of the collapsed
//! map lifts to one of the original map. Every public entry point
//! verifies its answer against the input map before returning it, so a
//! bug here can produce an error but never a wrong point.

use thiserror::Error;

use crate::lattice::{make_box, DigitalImage, LatticeError, Point, TreeStructure};
use crate::maps::{compose, is_retraction, DigitalMap, MapError};
use crate::products::np_product;

/// Errors from the constructive finders.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructiveError {
    #[error("map is not continuous: adjacent pair {from}, {to} maps to non-adjacent images")]
    NotContinuous { from: Point, to: Point },
    #[error("map is not a self-map")]
    NotSelfMap,
    #[error("map's domain is not the expected image")]
    WrongDomain,
    #[error("retraction's domain is not the extended image")]
    RetractionDomainMismatch,
    #[error("retraction's codomain is not the extended image minus the removed vertex")]
    BaseMismatch,
    #[error("map does not fix its codomain pointwise or is not continuous onto it")]
    NotARetraction,
    #[error("closed neighborhood of the removed vertex is not contained in its target's: {vertex} escapes")]
    HypothesisViolated { vertex: Point },
    #[error("{point} is not an approximate fixed point of the collapsed map")]
    NotAnAfpOfCollapsedMap { point: Point },
    #[error("no approximate fixed point exists for this map")]
    NoApproximateFixedPoint,
    #[error("base finder is for a different image than the product's base factor")]
    FinderImageMismatch,
    #[error("base finder returned {point}, which is not an approximate fixed point")]
    FinderReturnedNonAfp { point: Point },
    #[error("cube dimension must be at least 1")]
    BadCubeDimension,
    #[error("cube side length {n} is negative")]
    NegativeSide { n: i64 },
    #[error("internal check failed: constructed point {point} is not an approximate fixed point")]
    VerificationFailed { point: Point },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Anything that can hand back an approximate fixed point for continuous
/// self-maps of one particular image.
pub trait AfpFinder {
    /// The image whose self-maps this finder accepts.
    fn image(&self) -> &DigitalImage;

    /// An approximate fixed point of `f`, which must be a continuous
    /// self-map of [`image`](Self::image).
    fn find_afp(&self, f: &DigitalMap) -> Result<Point, ConstructiveError>;
}

fn require_continuous_self_map(
    expected: &DigitalImage,
    f: &DigitalMap,
) -> Result<(), ConstructiveError> {
    if f.domain() != f.codomain() {
        return Err(ConstructiveError::NotSelfMap);
    }
    if f.domain() != expected {
        return Err(ConstructiveError::WrongDomain);
    }
    if let Some((from, to)) = f.continuity_violation() {
        return Err(ConstructiveError::NotContinuous { from, to });
    }
    Ok(())
}

fn verify_afp(f: &DigitalMap, point: Point) -> Result<Point, ConstructiveError> {
    let image = f.apply(&point)?;
    if f.domain().adjacent_or_equal(&point, image) {
        Ok(point)
    } else {
        Err(ConstructiveError::VerificationFailed { point })
    }
}

/// Scans the vertices in order and returns the first approximate fixed
/// point. Works on any image, cannot miss one when it exists, and fails
/// honestly with [`ConstructiveError::NoApproximateFixedPoint`] when none
/// does.
#[derive(Debug, Clone)]
pub struct ExhaustiveAfpFinder {
    image: DigitalImage,
}

impl ExhaustiveAfpFinder {
    pub fn new(image: &DigitalImage) -> Self {
        ExhaustiveAfpFinder { image: image.clone() }
    }
}

impl AfpFinder for ExhaustiveAfpFinder {
    fn image(&self) -> &DigitalImage {
        &self.image
    }

    fn find_afp(&self, f: &DigitalMap) -> Result<Point, ConstructiveError> {
        require_continuous_self_map(&self.image, f)?;
        f.pairs()
            .find(|(x, fx)| self.image.adjacent_or_equal(x, fx))
            .map(|(x, _)| x.clone())
            .ok_or(ConstructiveError::NoApproximateFixedPoint)
    }
}

/// One vertex removed from an image, with a retraction back onto the rest
/// whose target dominates the removed vertex's neighborhood. This is the
/// configuration under which approximate fixed points lift from the
/// smaller image to the larger one — see [`builder_step`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuilderInstance {
    extended: DigitalImage,
    removed: Point,
    retraction: DigitalMap,
}

impl BuilderInstance {
    /// Validates the whole configuration: `removed` is a vertex of
    /// `extended`, `retraction` retracts `extended` onto exactly
    /// `extended` minus `removed`, and the closed neighborhood of
    /// `removed` is contained in that of its retraction target.
    pub fn new(
        extended: DigitalImage,
        removed: Point,
        retraction: DigitalMap,
    ) -> Result<Self, ConstructiveError> {
        if !extended.contains(&removed) {
            return Err(LatticeError::VertexNotInImage { point: removed }.into());
        }
        if retraction.domain() != &extended {
            return Err(ConstructiveError::RetractionDomainMismatch);
        }
        let base: Vec<Point> =
            extended.vertices().iter().filter(|p| **p != removed).cloned().collect();
        if retraction.codomain().vertices() != base.as_slice() {
            return Err(ConstructiveError::BaseMismatch);
        }
        if !is_retraction(&retraction)? {
            return Err(ConstructiveError::NotARetraction);
        }
        let target = retraction.apply(&removed)?.clone();
        for v in extended.closed_neighborhood(&removed)? {
            if !extended.adjacent_or_equal(&v, &target) {
                return Err(ConstructiveError::HypothesisViolated { vertex: v });
            }
        }
        Ok(BuilderInstance { extended, removed, retraction })
    }

    pub fn extended(&self) -> &DigitalImage {
        &self.extended
    }

    pub fn removed(&self) -> &Point {
        &self.removed
    }

    pub fn retraction(&self) -> &DigitalMap {
        &self.retraction
    }

    /// The image retracted onto: `extended` minus `removed`.
    pub fn base(&self) -> &DigitalImage {
        self.retraction.codomain()
    }
}

/// Lifts an approximate fixed point one vertex extension.
///
/// `f` is a continuous self-map of the instance's extended image and `y`
/// an approximate fixed point of the collapsed map `r ∘ f` restricted to
/// the base. If `f(y)` stays in the base, `y` itself already works;
/// otherwise `f(y)` is the removed vertex and the retraction target takes
/// over: its image under `f` is trapped in the removed vertex's
/// neighborhood, which the hypothesis folds back onto the target.
pub fn builder_step(
    instance: &BuilderInstance,
    f: &DigitalMap,
    y: &Point,
) -> Result<Point, ConstructiveError> {
    require_continuous_self_map(&instance.extended, f)?;
    if !instance.base().contains(y) {
        return Err(LatticeError::VertexNotInImage { point: y.clone() }.into());
    }
    let fy = f.apply(y)?;
    let collapsed = instance.retraction.apply(fy)?;
    if !instance.extended.adjacent_or_equal(y, collapsed) {
        return Err(ConstructiveError::NotAnAfpOfCollapsedMap { point: y.clone() });
    }
    let result = if *fy == instance.removed {
        instance.retraction.apply(&instance.removed)?.clone()
    } else {
        y.clone()
    };
    verify_afp(f, result)
}

/// Finds approximate fixed points on a tree by leaf collapsing.
///
/// Construction precomputes the collapse ladder — each rung removes the
/// least remaining leaf onto its unique neighbor, which is exactly a
/// [`builder_step`] configuration — so repeated queries against the same
/// tree only pay per-map costs.
#[derive(Debug, Clone)]
pub struct TreeAfpFinder {
    tree: TreeStructure,
    /// Vertex indices `(removed leaf, its neighbor at removal time)` in
    /// collapse order; the root is never removed.
    ladder: Vec<(usize, usize)>,
}

impl TreeAfpFinder {
    pub fn new(tree: &TreeStructure) -> Self {
        let image = tree.image();
        let n = image.len();
        let root = image.index_of(tree.root()).expect("root is a vertex of its own tree");
        let mut alive = vec![true; n];
        let mut ladder = Vec::with_capacity(n.saturating_sub(1));
        for leaf in &tree.pruning_order()[..n - 1] {
            let w = image.index_of(leaf).expect("pruning order lists vertices");
            let neighbor = (0..n)
                .find(|&j| alive[j] && j != w && image.adjacent_idx(w, j))
                .expect("a non-root vertex of a live tree has a neighbor");
            alive[w] = false;
            ladder.push((w, neighbor));
        }
        debug_assert!(alive[root]);
        TreeAfpFinder { tree: tree.clone(), ladder }
    }

    pub fn tree(&self) -> &TreeStructure {
        &self.tree
    }
}

impl AfpFinder for TreeAfpFinder {
    fn image(&self) -> &DigitalImage {
        self.tree.image()
    }

    fn find_afp(&self, f: &DigitalMap) -> Result<Point, ConstructiveError> {
        let image = self.tree.image();
        require_continuous_self_map(image, f)?;

        // Walk down the ladder: collapsing rung (w -> p) rewrites every
        // image value w to p, giving the collapsed self-map of the smaller
        // tree. Keep each stage's table for the climb back up.
        let mut stages: Vec<Vec<usize>> = vec![f.table().to_vec()];
        for &(w, p) in &self.ladder {
            let next: Vec<usize> =
                stages.last().unwrap().iter().map(|&v| if v == w { p } else { v }).collect();
            stages.push(next);
        }

        // Only the root remains at the bottom, mapped to itself: the
        // trivial approximate fixed point. Climb back up, each rung being
        // one extension step: keep y unless the stage map sent it to the
        // removed leaf, in which case the leaf's neighbor takes over.
        let root = image.index_of(self.tree.root()).expect("root is a vertex");
        let mut y = root;
        for (stage, &(w, p)) in self.ladder.iter().enumerate().rev() {
            if stages[stage][y] == w {
                y = p;
            }
        }
        verify_afp(f, image.vertices()[y].clone())
    }
}

/// An approximate fixed point of a continuous self-map of a tree.
///
/// One-shot form of [`TreeAfpFinder`]; the result is deterministic for a
/// given rooted tree and map.
pub fn tree_afp(tree: &TreeStructure, f: &DigitalMap) -> Result<Point, ConstructiveError> {
    TreeAfpFinder::new(tree).find_afp(f)
}

/// The image `x × [0,k]^levels` built one interval factor at a time.
fn tower_image(x: &DigitalImage, levels: usize, k: i64) -> DigitalImage {
    let mut image = x.clone();
    for _ in 0..levels {
        let line = make_box(&[(0, k)], 1).expect("side length is validated non-negative");
        image = np_product(&image, &line).image().clone();
    }
    image
}

fn tower_find(
    x: &DigitalImage,
    base: &dyn AfpFinder,
    levels: usize,
    k: i64,
    f: &DigitalMap,
) -> Result<Point, ConstructiveError> {
    if levels == 0 {
        let y = base.find_afp(f)?;
        // The finder is caller-supplied; trust nothing.
        let fy = f.apply(&y)?;
        if !x.adjacent_or_equal(&y, fy) {
            return Err(ConstructiveError::FinderReturnedNonAfp { point: y });
        }
        return Ok(y);
    }
    attach_interval(x, base, levels, k, k, f)
}

/// Handles `f` on `inner × [0, height]` where `inner = x × [0,k]^(levels-1)`:
/// collapse the top slice vertex by vertex (each a builder step), recurse
/// on the shorter interval, and lift the answer back through the steps.
fn attach_interval(
    x: &DigitalImage,
    base: &dyn AfpFinder,
    levels: usize,
    k: i64,
    height: i64,
    f: &DigitalMap,
) -> Result<Point, ConstructiveError> {
    let inner = tower_image(x, levels - 1, k);

    if height == 0 {
        // inner × {0} is a copy of inner: strip the coordinate, solve
        // there, and glue it back on.
        let zero = Point::new(vec![0]);
        let mut table = Vec::with_capacity(inner.len());
        for v in inner.vertices() {
            let fv = f.apply(&v.concat(&zero))?;
            let (z, _) = fv.split(fv.dim() - 1);
            table.push(inner.index_of(&z).expect("images stay in the zero slice"));
        }
        let projected = DigitalMap::new(inner.clone(), inner.clone(), table)?;
        let y = tower_find(x, base, levels - 1, k, &projected)?;
        return Ok(y.concat(&zero));
    }

    // Remove the top-slice vertices one at a time, clamping each onto the
    // slice below. The clamp target's closed neighborhood dominates the
    // removed vertex's (same inner condition, wider interval window), so
    // each removal is a valid extension step.
    let top = Point::new(vec![height]);
    let clamp_to = Point::new(vec![height - 1]);
    let mut chain: Vec<(BuilderInstance, DigitalMap)> = Vec::with_capacity(inner.len());
    let mut current = f.clone();
    for xv in inner.vertices() {
        let removed = xv.concat(&top);
        let target = xv.concat(&clamp_to);
        let domain = current.domain().clone();
        let rest: Vec<Point> =
            domain.vertices().iter().filter(|p| **p != removed).cloned().collect();
        let sub = domain.subimage(&rest)?;
        let r = DigitalMap::from_fn(domain.clone(), sub, |p| {
            if *p == removed {
                target.clone()
            } else {
                p.clone()
            }
        })?;
        let next = compose(&r, &current.restrict(&rest)?)?;
        let instance = BuilderInstance::new(domain, removed, r)?;
        chain.push((instance, current));
        current = next;
    }

    let mut y = attach_interval(x, base, levels, k, height - 1, &current)?;
    for (instance, stage_map) in chain.iter().rev() {
        y = builder_step(instance, stage_map, &y)?;
    }
    Ok(y)
}

/// An approximate fixed point of `f : X × [0,side]^cube_dim → itself`,
/// given a finder for the base factor `x`.
///
/// The cube is peeled one axis at a time (re-associating the product) and
/// each axis one slice at a time, so the only search happens inside the
/// caller's base finder. The map's domain may carry any adjacency rule
/// that agrees pairwise with the normal product of `x` and the cube —
/// in particular `c_u` for full-parameter lattice boxes.
pub fn product_afp(
    x: &DigitalImage,
    cube_dim: usize,
    side: i64,
    f: &DigitalMap,
    base: &dyn AfpFinder,
) -> Result<Point, ConstructiveError> {
    if cube_dim == 0 {
        return Err(ConstructiveError::BadCubeDimension);
    }
    if side < 0 {
        return Err(ConstructiveError::NegativeSide { n: side });
    }
    if base.image() != x {
        return Err(ConstructiveError::FinderImageMismatch);
    }
    if f.domain() != f.codomain() {
        return Err(ConstructiveError::NotSelfMap);
    }

    // The internal recursion works on the left-nested product; accept any
    // domain with the same vertices and the same adjacency, and re-seat
    // the map's table on the nested image (vertex order is shared, both
    // being sorted).
    let nested = tower_image(x, cube_dim, side);
    if f.domain().vertices() != nested.vertices() {
        return Err(ConstructiveError::WrongDomain);
    }
    for i in 0..nested.len() {
        for j in (i + 1)..nested.len() {
            if f.domain().adjacent_idx(i, j) != nested.adjacent_idx(i, j) {
                return Err(ConstructiveError::WrongDomain);
            }
        }
    }
    if let Some((from, to)) = f.continuity_violation() {
        return Err(ConstructiveError::NotContinuous { from, to });
    }
    let reseated = DigitalMap::new(nested.clone(), nested, f.table().to_vec())?;

    let y = tower_find(x, base, cube_dim, side, &reseated)?;
    verify_afp(f, y)
}

/// An approximate fixed point of a continuous self-map of the box
/// `Π [lo_i, hi_i]` under full lattice adjacency `c_v`.
///
/// The box is translated to the origin, its first interval serves as the
/// base factor, and the remaining axes are padded up to a common length
/// so the product construction applies; the padding is harmless because
/// the map is extended by a retraction and the answer folds back through
/// it.
pub fn box_afp(bounds: &[(i64, i64)], f: &DigitalMap) -> Result<Point, ConstructiveError> {
    let v = bounds.len();
    let expected = make_box(bounds, v.max(1))?;
    require_continuous_self_map(&expected, f)?;

    let lows: Vec<i64> = bounds.iter().map(|&(lo, _)| lo).collect();
    let lengths: Vec<i64> = bounds.iter().map(|&(lo, hi)| hi - lo).collect();
    let translate = |p: &Point, sign: i64| -> Point {
        Point::new(
            p.coords().iter().zip(&lows).map(|(c, lo)| c + sign * lo).collect(),
        )
    };

    if v == 1 {
        // An interval always has an approximate fixed point on the scan:
        // the displacement f(t) - t changes sign or hits ±1 somewhere.
        return f
            .pairs()
            .find(|(t, ft)| expected.adjacent_or_equal(t, ft))
            .map(|(t, _)| t.clone())
            .ok_or(ConstructiveError::NoApproximateFixedPoint);
    }

    // Translate to the origin, pad the non-base axes to a common cube,
    // and extend the map by clamping back onto the real box.
    let pad = *lengths[1..].iter().max().expect("v >= 2 has trailing axes");
    let mut padded_bounds = vec![(0, lengths[0])];
    padded_bounds.extend(std::iter::repeat_n((0, pad), v - 1));
    let padded = make_box(&padded_bounds, v)?;

    let clamp = |p: &Point| -> Point {
        Point::new(
            p.coords()
                .iter()
                .enumerate()
                .map(|(i, &c)| c.min(lengths[i]))
                .collect(),
        )
    };
    let extended = DigitalMap::from_fn(padded.clone(), padded.clone(), |p| {
        let inside = translate(&clamp(p), 1);
        translate(f.apply(&inside).expect("clamped point is in the box"), -1)
    })?;

    let interval = make_box(&[(0, lengths[0])], 1)?;
    let finder = ExhaustiveAfpFinder::new(&interval);
    let y_padded = product_afp(&interval, v - 1, pad, &extended, &finder)?;

    // Fold the padding away and undo the translation; retractions preserve
    // the approximate fixed point relation.
    let y = translate(&clamp(&y_padded), 1);
    verify_afp(f, y)
}
