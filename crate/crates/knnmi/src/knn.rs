//! Spatial index for k-th-nearest-neighbour distances and strict radius
//! counts under the maximum norm.
//!
//! Queries are always issued for a member point (by id) and exclude the point
//! itself. Correctness is defined by exact agreement with a brute-force scan;
//! the tests enforce that bit for bit. One-dimensional subspaces use a sorted
//! array with binary-search counting, higher dimensions a kd-tree with
//! bounding-box pruning.

use crate::error::{Error, Result};

const LEAF_SIZE: usize = 16;

/// Max-norm (Chebyshev) distance. Every distance in this module and in the
/// brute-force oracles must go through this exact fold.
#[inline]
pub fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
    let mut d = 0.0f64;
    for (x, y) in a.iter().zip(b.iter()) {
        d = d.max((x - y).abs());
    }
    d
}

#[derive(Debug)]
struct TreeNode {
    start: u32,
    end: u32,
    /// Children node ids; None for a leaf.
    children: Option<(u32, u32)>,
    bb_lo: Vec<f64>,
    bb_hi: Vec<f64>,
}

#[derive(Debug)]
enum IndexKind {
    /// d == 1: values sorted ascending.
    Sorted { vals: Vec<f64> },
    /// d >= 2: kd-tree over point-major coordinates in tree order.
    Tree { coords: Vec<f64>, nodes: Vec<TreeNode>, root: u32 },
}

/// Immutable index over an m x d point set; safe for concurrent queries.
#[derive(Debug)]
pub struct SpatialIndex {
    dim: usize,
    len: usize,
    /// Tree position -> original point id.
    ids: Vec<u32>,
    /// Original point id -> tree position.
    pos_of_id: Vec<u32>,
    kind: IndexKind,
}

impl SpatialIndex {
    /// Build an index over the point set given as d columns of length m.
    pub fn from_columns(cols: &[&[f64]]) -> Result<SpatialIndex> {
        let d = cols.len();
        if d == 0 {
            return Err(Error::EmptyData("index needs at least one dimension".into()));
        }
        let m = cols[0].len();
        if m == 0 {
            return Err(Error::EmptyData("index needs at least one point".into()));
        }
        for col in cols {
            if col.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "columns of length {} and {}",
                    m,
                    col.len()
                )));
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue { row: i, col: "<index input>".into() });
            }
        }

        if d == 1 {
            let mut order: Vec<u32> = (0..m as u32).collect();
            let col = cols[0];
            order.sort_by(|&a, &b| {
                col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b))
            });
            let vals: Vec<f64> = order.iter().map(|&i| col[i as usize]).collect();
            let mut pos_of_id = vec![0u32; m];
            for (pos, &id) in order.iter().enumerate() {
                pos_of_id[id as usize] = pos as u32;
            }
            return Ok(SpatialIndex {
                dim: 1,
                len: m,
                ids: order,
                pos_of_id,
                kind: IndexKind::Sorted { vals },
            });
        }

        // Point-major copy for cache-friendly leaf scans.
        let mut pts = vec![0.0f64; m * d];
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                pts[i * d + j] = v;
            }
        }
        let mut ids: Vec<u32> = (0..m as u32).collect();
        let mut nodes = Vec::new();
        let root = build_tree(&pts, d, &mut ids, 0, m, &mut nodes);
        let mut coords = vec![0.0f64; m * d];
        for (pos, &id) in ids.iter().enumerate() {
            coords[pos * d..(pos + 1) * d]
                .copy_from_slice(&pts[id as usize * d..(id as usize + 1) * d]);
        }
        let mut pos_of_id = vec![0u32; m];
        for (pos, &id) in ids.iter().enumerate() {
            pos_of_id[id as usize] = pos as u32;
        }
        Ok(SpatialIndex { dim: d, len: m, ids, pos_of_id, kind: IndexKind::Tree { coords, nodes, root } })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of an indexed point.
    fn point(&self, pos: usize) -> &[f64] {
        match &self.kind {
            IndexKind::Sorted { vals } => std::slice::from_ref(&vals[pos]),
            IndexKind::Tree { coords, .. } => &coords[pos * self.dim..(pos + 1) * self.dim],
        }
    }

    /// Max-norm distance from point `id` to its k-th nearest other point.
    /// Requires 1 <= k <= m-1.
    pub fn kth_neighbor_distance(&self, id: usize, k: usize) -> Result<f64> {
        if k == 0 || k >= self.len {
            return Err(Error::BadNeighborCount { k, n: self.len });
        }
        let pos = self.pos_of_id[id] as usize;
        match &self.kind {
            IndexKind::Sorted { vals } => Ok(kth_sorted(vals, pos, k)),
            IndexKind::Tree { coords, nodes, root } => {
                let q = &coords[pos * self.dim..(pos + 1) * self.dim];
                let mut best = BoundedMaxHeap::new(k);
                knn_visit(coords, nodes, self.dim, *root, q, pos, &mut best);
                Ok(best.worst())
            }
        }
    }

    /// Number of indexed points, excluding `id` itself, at max-norm distance
    /// strictly less than `radius`.
    pub fn count_within(&self, id: usize, radius: f64) -> usize {
        if radius <= 0.0 {
            return 0;
        }
        let pos = self.pos_of_id[id] as usize;
        match &self.kind {
            IndexKind::Sorted { vals } => {
                let q = vals[pos];
                // Monotone predicates reproduce |v - q| < radius exactly:
                // fl(v - q) = -fl(q - v) and IEEE subtraction is monotone.
                let lo = vals.partition_point(|&v| (q - v) >= radius);
                let hi = vals.partition_point(|&v| (v - q) < radius);
                hi - lo - 1 // self is always inside for radius > 0
            }
            IndexKind::Tree { coords, nodes, root } => {
                let q = &coords[pos * self.dim..(pos + 1) * self.dim];
                count_visit(coords, nodes, self.dim, *root, q, pos, radius)
            }
        }
    }

    /// Original ids in tree order (used by tests).
    #[cfg(test)]
    fn ids(&self) -> &[u32] {
        &self.ids
    }
}

/// Sorted 1-D k-th neighbour: expand left/right from the query position.
fn kth_sorted(vals: &[f64], pos: usize, k: usize) -> f64 {
    let q = vals[pos];
    let mut left = pos;
    let mut right = pos + 1;
    let mut dist = 0.0f64;
    for _ in 0..k {
        let dl = if left > 0 { Some((q - vals[left - 1]).abs()) } else { None };
        let dr = if right < vals.len() { Some((vals[right] - q).abs()) } else { None };
        dist = match (dl, dr) {
            (Some(a), Some(b)) => {
                if a <= b {
                    left -= 1;
                    a
                } else {
                    right += 1;
                    b
                }
            }
            (Some(a), None) => {
                left -= 1;
                a
            }
            (None, Some(b)) => {
                right += 1;
                b
            }
            (None, None) => unreachable!("k < m guarantees a neighbour"),
        };
    }
    dist
}

fn build_tree(
    pts: &[f64],
    d: usize,
    ids: &mut [u32],
    start: usize,
    end: usize,
    nodes: &mut Vec<TreeNode>,
) -> u32 {
    let mut bb_lo = vec![f64::INFINITY; d];
    let mut bb_hi = vec![f64::NEG_INFINITY; d];
    for &id in &ids[start..end] {
        let p = &pts[id as usize * d..(id as usize + 1) * d];
        for a in 0..d {
            bb_lo[a] = bb_lo[a].min(p[a]);
            bb_hi[a] = bb_hi[a].max(p[a]);
        }
    }
    let mut axis = 0;
    let mut extent = -1.0f64;
    for a in 0..d {
        let e = bb_hi[a] - bb_lo[a];
        if e > extent {
            extent = e;
            axis = a;
        }
    }
    let node_id = nodes.len() as u32;
    nodes.push(TreeNode { start: start as u32, end: end as u32, children: None, bb_lo, bb_hi });
    if end - start > LEAF_SIZE && extent > 0.0 {
        let mid = (start + end) / 2;
        ids[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts[a as usize * d + axis]
                .total_cmp(&pts[b as usize * d + axis])
                .then(a.cmp(&b))
        });
        let left = build_tree(pts, d, ids, start, mid, nodes);
        let right = build_tree(pts, d, ids, mid, end, nodes);
        nodes[node_id as usize].children = Some((left, right));
    }
    node_id
}

/// Smallest possible max-norm distance from q to any point inside the box.
#[inline]
fn min_dist_to_box(q: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut d = 0.0f64;
    for a in 0..q.len() {
        let excess = (lo[a] - q[a]).max(q[a] - hi[a]);
        if excess > d {
            d = excess;
        }
    }
    d
}

/// Largest possible max-norm distance from q to any point inside the box.
#[inline]
fn max_dist_to_box(q: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut d = 0.0f64;
    for a in 0..q.len() {
        let far = (q[a] - lo[a]).max(hi[a] - q[a]);
        if far > d {
            d = far;
        }
    }
    d
}

/// Fixed-capacity max-heap over distances; tracks the k smallest seen.
struct BoundedMaxHeap {
    k: usize,
    heap: Vec<f64>,
}

impl BoundedMaxHeap {
    fn new(k: usize) -> BoundedMaxHeap {
        BoundedMaxHeap { k, heap: Vec::with_capacity(k) }
    }

    fn full(&self) -> bool {
        self.heap.len() == self.k
    }

    /// Current k-th smallest distance (+inf until k points have been seen).
    fn worst(&self) -> f64 {
        if self.full() {
            self.heap[0]
        } else {
            f64::INFINITY
        }
    }

    fn push(&mut self, d: f64) {
        if !self.full() {
            self.heap.push(d);
            let mut i = self.heap.len() - 1;
            while i > 0 {
                let parent = (i - 1) / 2;
                if self.heap[parent] < self.heap[i] {
                    self.heap.swap(parent, i);
                    i = parent;
                } else {
                    break;
                }
            }
        } else if d < self.heap[0] {
            self.heap[0] = d;
            let mut i = 0;
            loop {
                let (l, r) = (2 * i + 1, 2 * i + 2);
                let mut largest = i;
                if l < self.k && self.heap[l] > self.heap[largest] {
                    largest = l;
                }
                if r < self.k && self.heap[r] > self.heap[largest] {
                    largest = r;
                }
                if largest == i {
                    break;
                }
                self.heap.swap(i, largest);
                i = largest;
            }
        }
    }
}

fn knn_visit(
    coords: &[f64],
    nodes: &[TreeNode],
    d: usize,
    node_id: u32,
    q: &[f64],
    q_pos: usize,
    best: &mut BoundedMaxHeap,
) {
    let node = &nodes[node_id as usize];
    if best.full() && min_dist_to_box(q, &node.bb_lo, &node.bb_hi) >= best.worst() {
        return;
    }
    match node.children {
        None => {
            for pos in node.start as usize..node.end as usize {
                if pos == q_pos {
                    continue;
                }
                let dist = chebyshev(q, &coords[pos * d..(pos + 1) * d]);
                best.push(dist);
            }
        }
        Some((left, right)) => {
            let dl = min_dist_to_box(q, &nodes[left as usize].bb_lo, &nodes[left as usize].bb_hi);
            let dr =
                min_dist_to_box(q, &nodes[right as usize].bb_lo, &nodes[right as usize].bb_hi);
            let (first, second) = if dl <= dr { (left, right) } else { (right, left) };
            knn_visit(coords, nodes, d, first, q, q_pos, best);
            knn_visit(coords, nodes, d, second, q, q_pos, best);
        }
    }
}

fn count_visit(
    coords: &[f64],
    nodes: &[TreeNode],
    d: usize,
    node_id: u32,
    q: &[f64],
    q_pos: usize,
    radius: f64,
) -> usize {
    let node = &nodes[node_id as usize];
    if min_dist_to_box(q, &node.bb_lo, &node.bb_hi) >= radius {
        return 0;
    }
    let (start, end) = (node.start as usize, node.end as usize);
    if max_dist_to_box(q, &node.bb_lo, &node.bb_hi) < radius {
        let self_inside = (start..end).contains(&q_pos) as usize;
        return end - start - self_inside;
    }
    match node.children {
        None => {
            let mut count = 0;
            for pos in start..end {
                if pos == q_pos {
                    continue;
                }
                if chebyshev(q, &coords[pos * d..(pos + 1) * d]) < radius {
                    count += 1;
                }
            }
            count
        }
        Some((left, right)) => {
            count_visit(coords, nodes, d, left, q, q_pos, radius)
                + count_visit(coords, nodes, d, right, q, q_pos, radius)
        }
    }
}
