//! An unpruned brute-force oracle, independent of the search engine.
//!
//! Everything here walks the full table space `|X|^|X|` with a plain
//! odometer and filters with the map predicates — no bitmask domains, no
//! forward checking, no pruning.  It exists so the optimized search can be
//! cross-checked against an implementation too simple to share its bugs.

use afpp_core::maps::{self, DigitalMap};
use afpp_core::DigitalImage;

/// Hard cap on image size: `9^9` tables is already past what anyone wants to
/// wait for, and the oracle is only ever pointed at tiny images.
pub const MAX_ORACLE_VERTICES: usize = 9;

/// Calls `visit` on every self-map table of an `n`-vertex image, in
/// lexicographic order.  Tables are value vectors: `table[i]` is the index
/// the `i`-th vertex is sent to.
pub fn for_each_table(n: usize, mut visit: impl FnMut(&[usize])) {
    assert!(n <= MAX_ORACLE_VERTICES, "oracle limited to tiny images");
    if n == 0 {
        return;
    }
    let mut table = vec![0usize; n];
    loop {
        visit(&table);
        // Odometer increment, least significant digit last.
        let mut pos = n;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            table[pos] += 1;
            if table[pos] < n {
                break;
            }
            table[pos] = 0;
        }
    }
}

/// All continuous self-map tables of `image`, in lexicographic order.
pub fn continuous_tables(image: &DigitalImage) -> Vec<Vec<usize>> {
    let mut found = Vec::new();
    for_each_table(image.len(), |table| {
        let map = DigitalMap::new(image.clone(), image.clone(), table.to_vec())
            .expect("odometer emits well-formed tables");
        if map.is_continuous() {
            found.push(table.to_vec());
        }
    });
    found
}

/// Brute-force fixed point property decision: returns whether every
/// continuous self-map admits an approximate fixed point, along with every
/// continuous table that has none (the full witness set).
pub fn brute_force_afpp(image: &DigitalImage) -> (bool, Vec<Vec<usize>>) {
    let mut witnesses = Vec::new();
    for_each_table(image.len(), |table| {
        let map = DigitalMap::new(image.clone(), image.clone(), table.to_vec())
            .expect("odometer emits well-formed tables");
        if !map.is_continuous() {
            return;
        }
        let afps = maps::approximate_fixed_points(&map).expect("self-map by construction");
        if afps.is_empty() {
            witnesses.push(table.to_vec());
        }
    });
    (witnesses.is_empty(), witnesses)
}
