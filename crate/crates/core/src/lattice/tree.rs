//! Rooted tree structure over a digital image, plus enumeration of all
//! tree shapes of a given size.

use std::collections::VecDeque;

use super::{AdjacencyRule, DigitalImage, LatticeError, Point};

/// A digital image that is a tree, rooted at a chosen vertex, with the
/// derived data the pruning arguments need: parents, leaves, and a
/// deterministic order in which leaves can be removed one at a time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeStructure {
    image: DigitalImage,
    root_idx: usize,
    parent: Vec<Option<usize>>,
    leaves: Vec<Point>,
    pruning_order: Vec<Point>,
}

impl TreeStructure {
    /// Roots `image` at `root`. Fails unless the image is a tree and the
    /// root is one of its vertices.
    pub fn new(image: &DigitalImage, root: &Point) -> Result<Self, LatticeError> {
        let root_idx = image
            .index_of(root)
            .ok_or_else(|| LatticeError::VertexNotInImage { point: root.clone() })?;
        if !image.is_tree() {
            return Err(LatticeError::NotATree);
        }
        let n = image.len();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root_idx] = true;
        let mut queue = VecDeque::from([root_idx]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !seen[j] && image.adjacent_idx(i, j) {
                    seen[j] = true;
                    parent[j] = Some(i);
                    queue.push_back(j);
                }
            }
        }

        let degree = |alive: &[bool], i: usize| -> usize {
            (0..n).filter(|&j| alive[j] && j != i && image.adjacent_idx(i, j)).count()
        };

        // Leaves of the rooted tree: childless non-root vertices. In a
        // single-vertex tree the root itself counts, so pruning still has a
        // starting point.
        let leaves: Vec<Point> = if n == 1 {
            vec![image.vertices()[root_idx].clone()]
        } else {
            let alive = vec![true; n];
            (0..n)
                .filter(|&i| i != root_idx && degree(&alive, i) == 1)
                .map(|i| image.vertices()[i].clone())
                .collect()
        };

        // Remove the least current leaf (never the root) until only the
        // root remains, recording the removal order.
        let mut alive = vec![true; n];
        let mut pruning_order = Vec::with_capacity(n);
        for _ in 1..n {
            let next = (0..n)
                .find(|&i| alive[i] && i != root_idx && degree(&alive, i) == 1)
                .expect("a tree with more than one live vertex has a non-root leaf");
            alive[next] = false;
            pruning_order.push(image.vertices()[next].clone());
        }
        pruning_order.push(image.vertices()[root_idx].clone());

        Ok(TreeStructure { image: image.clone(), root_idx, parent, leaves, pruning_order })
    }

    pub fn image(&self) -> &DigitalImage {
        &self.image
    }

    pub fn root(&self) -> &Point {
        &self.image.vertices()[self.root_idx]
    }

    /// The parent of `v` in the rooted tree; `None` for the root itself.
    pub fn parent(&self, v: &Point) -> Option<&Point> {
        let i = self.image.index_of(v)?;
        self.parent[i].map(|j| &self.image.vertices()[j])
    }

    /// Childless non-root vertices (the root itself for a singleton tree),
    /// sorted.
    pub fn leaves(&self) -> &[Point] {
        &self.leaves
    }

    /// All vertices ordered so that each is a leaf of the tree remaining
    /// when its predecessors are removed; the root comes last.
    pub fn pruning_order(&self) -> &[Point] {
        &self.pruning_order
    }
}

/// All trees on `n` vertices, one image per isomorphism class, each
/// realized as an explicit-adjacency image on the points `(0) .. (n-1)`.
///
/// The result is deterministic: classes are keyed by a canonical form and
/// the first representative found (in Prüfer-sequence order) is kept.
/// Counts for `n = 1..=7` are 1, 1, 1, 2, 3, 6, 11.
pub fn enumerate_trees(n: usize) -> Vec<DigitalImage> {
    let line_points = |n: usize| (0..n as i64).map(|i| Point::new(vec![i])).collect::<Vec<_>>();
    match n {
        0 => return Vec::new(),
        1 => {
            return vec![
                DigitalImage::new(line_points(1), AdjacencyRule::explicit([]).unwrap()).unwrap(),
            ]
        }
        2 => return vec![DigitalImage::from_edges(line_points(2), &[(0, 1)]).unwrap()],
        _ => {}
    }

    // Every labeled tree on n >= 3 vertices decodes from a unique Prüfer
    // sequence in [0, n)^(n-2); walking sequences in lex order and keeping
    // the first labeled tree in each isomorphism class gives a stable
    // enumeration. Classes are recognized by a canonical string computed
    // from the tree's center.
    let mut classes: std::collections::BTreeMap<String, Vec<(usize, usize)>> =
        std::collections::BTreeMap::new();
    let mut seq = vec![0usize; n - 2];
    loop {
        let edges = decode_pruefer(&seq, n);
        classes.entry(canonical_form(n, &edges)).or_insert_with(|| edges.clone());

        let mut i = seq.len();
        loop {
            if i == 0 {
                let points = line_points(n);
                return classes
                    .into_values()
                    .map(|edges| DigitalImage::from_edges(points.clone(), &edges).unwrap())
                    .collect();
            }
            i -= 1;
            if seq[i] + 1 < n {
                seq[i] += 1;
                break;
            }
            seq[i] = 0;
        }
    }
}

fn decode_pruefer(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&i| degree[i] == 1).expect("decode always has a leaf");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let mut last = (0..n).filter(|&i| degree[i] == 1);
    let a = last.next().unwrap();
    let b = last.next().unwrap();
    edges.push((a, b));
    edges
}

/// Canonical string for an unlabeled tree: root at the center (for two
/// centers, compare both and bracket the pair), then recursively bracket
/// sorted child forms.
fn canonical_form(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }

    // Peel leaves layer by layer; the last one or two vertices standing
    // are the center.
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut frontier: Vec<usize> = (0..n).filter(|&i| degree[i] <= 1).collect();
    while remaining > 2 {
        let mut next = Vec::new();
        for &leaf in &frontier {
            alive[leaf] = false;
            remaining -= 1;
            for &nb in &adj[leaf] {
                if alive[nb] {
                    degree[nb] -= 1;
                    if degree[nb] == 1 {
                        next.push(nb);
                    }
                }
            }
        }
        frontier = next;
    }
    let centers: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();

    fn shape(adj: &[Vec<usize>], v: usize, banned: usize) -> String {
        let mut kids: Vec<String> = adj[v]
            .iter()
            .filter(|&&c| c != banned)
            .map(|&c| shape(adj, c, v))
            .collect();
        kids.sort();
        format!("({})", kids.concat())
    }

    match centers.as_slice() {
        [c] => shape(&adj, *c, *c),
        [c1, c2] => {
            let a = shape(&adj, *c1, *c2);
            let b = shape(&adj, *c2, *c1);
            if a <= b {
                format!("[{a}{b}]")
            } else {
                format!("[{b}{a}]")
            }
        }
        _ => unreachable!("peeling always leaves one or two centers"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_box;

    fn p1(x: i64) -> Point {
        Point::new(vec![x])
    }

    #[test]
    fn roots_a_path_and_reads_off_parents() {
        let path = make_box(&[(0, 3)], 1).unwrap();
        let tree = TreeStructure::new(&path, &p1(0)).unwrap();
        assert_eq!(tree.root(), &p1(0));
        assert_eq!(tree.parent(&p1(0)), None);
        assert_eq!(tree.parent(&p1(1)), Some(&p1(0)));
        assert_eq!(tree.parent(&p1(3)), Some(&p1(2)));
        assert_eq!(tree.leaves(), &[p1(3)]);
        assert_eq!(tree.pruning_order(), &[p1(3), p1(2), p1(1), p1(0)]);
    }

    #[test]
    fn star_rooted_at_center_has_all_other_vertices_as_leaves() {
        // Star with center 0 and spokes 1..=3.
        let star = DigitalImage::from_edges(
            (0..4).map(p1).collect(),
            &[(0, 1), (0, 2), (0, 3)],
        )
        .unwrap();
        let tree = TreeStructure::new(&star, &p1(0)).unwrap();
        assert_eq!(tree.leaves(), &[p1(1), p1(2), p1(3)]);
        assert_eq!(tree.pruning_order(), &[p1(1), p1(2), p1(3), p1(0)]);

        // Rooted at a spoke instead, the center is internal.
        let tilted = TreeStructure::new(&star, &p1(1)).unwrap();
        assert_eq!(tilted.leaves(), &[p1(2), p1(3)]);
        assert_eq!(tilted.parent(&p1(0)), Some(&p1(1)));
        assert_eq!(tilted.pruning_order(), &[p1(2), p1(3), p1(0), p1(1)]);
    }

    #[test]
    fn singleton_tree_is_its_own_leaf() {
        let single = DigitalImage::new(vec![p1(5)], AdjacencyRule::Cu(1)).unwrap();
        let tree = TreeStructure::new(&single, &p1(5)).unwrap();
        assert_eq!(tree.leaves(), &[p1(5)]);
        assert_eq!(tree.pruning_order(), &[p1(5)]);
    }

    #[test]
    fn rejects_non_trees_and_missing_roots() {
        let square = make_box(&[(0, 1), (0, 1)], 1).unwrap();
        assert_eq!(
            TreeStructure::new(&square, &Point::new(vec![0, 0])),
            Err(LatticeError::NotATree)
        );
        let path = make_box(&[(0, 2)], 1).unwrap();
        assert_eq!(
            TreeStructure::new(&path, &p1(9)),
            Err(LatticeError::VertexNotInImage { point: p1(9) })
        );
    }

    #[test]
    fn pruning_order_always_removes_a_current_leaf() {
        let star = DigitalImage::from_edges(
            (0..5).map(p1).collect(),
            &[(0, 1), (1, 2), (1, 3), (3, 4)],
        )
        .unwrap();
        let tree = TreeStructure::new(&star, &p1(2)).unwrap();
        let order = tree.pruning_order();
        assert_eq!(order.len(), 5);
        assert_eq!(order.last(), Some(&p1(2)));
        let mut remaining: Vec<Point> = star.vertices().to_vec();
        for v in &order[..order.len() - 1] {
            let degree = remaining
                .iter()
                .filter(|w| star.adjacent(v, w))
                .count();
            assert_eq!(degree, 1, "{v} should be a leaf when removed");
            remaining.retain(|w| w != v);
        }
    }

    #[test]
    fn tree_counts_match_the_known_sequence() {
        let expected = [1usize, 1, 1, 2, 3, 6, 11];
        for (i, &want) in expected.iter().enumerate() {
            let n = i + 1;
            let trees = enumerate_trees(n);
            assert_eq!(trees.len(), want, "tree count at n = {n}");
            for t in &trees {
                assert_eq!(t.len(), n);
                assert!(t.is_tree());
            }
        }
        assert!(enumerate_trees(0).is_empty());
    }

    #[test]
    fn enumerated_trees_are_pairwise_non_isomorphic() {
        // Distinct canonical forms guarantee non-isomorphism; recompute
        // them from the emitted images to close the loop.
        let trees = enumerate_trees(6);
        let mut forms: Vec<String> =
            trees.iter().map(|t| canonical_form(t.len(), &t.edges())).collect();
        forms.sort();
        forms.dedup();
        assert_eq!(forms.len(), trees.len());
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = enumerate_trees(7);
        let b = enumerate_trees(7);
        assert_eq!(a, b);
    }
}
