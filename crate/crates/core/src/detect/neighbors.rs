//! Exact nearest-neighbor queries over a feature frame.
//!
//! A kd-tree with a hard exactness contract: query results are identical to
//! an exhaustive O(n²) scan, including the tie rule (smaller squared
//! distance first, then smaller record index).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::data::FeatureFrame;

const LEAF_SIZE: usize = 16;

#[derive(Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Euclidean kd-tree over the rows of a [`FeatureFrame`].
pub struct NeighborIndex<'a> {
    frame: &'a FeatureFrame,
    nodes: Vec<Node>,
    order: Vec<u32>,
    root: usize,
}

#[derive(PartialEq)]
struct Candidate {
    d2: f64,
    idx: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // larger (d2, idx) = worse neighbor = greater
        self.d2
            .total_cmp(&other.d2)
            .then_with(|| self.idx.cmp(&other.idx))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> NeighborIndex<'a> {
    pub fn new(frame: &'a FeatureFrame) -> Self {
        let n = frame.n_records();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::new();
        let root = build(frame, &mut nodes, &mut order, 0, n);
        NeighborIndex {
            frame,
            nodes,
            order,
            root,
        }
    }

    /// The `k` nearest neighbors of record `query`, self excluded, as
    /// `(index, squared_distance)` sorted ascending by `(distance, index)`.
    pub fn k_nearest(&self, query: usize, k: usize) -> Vec<(usize, f64)> {
        assert!(k < self.frame.n_records(), "k must be below n");
        let q = self.frame.row(query);
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        self.knn_descend(self.root, q, query as u32, k, &mut heap);
        let mut result: Vec<Candidate> = heap.into_vec();
        result.sort_unstable_by(|a, b| a.cmp(b));
        result
            .into_iter()
            .map(|c| (c.idx as usize, c.d2))
            .collect()
    }

    /// All records within squared distance `max_d2` of `query` (inclusive),
    /// self excluded, sorted ascending by `(distance, index)`.
    pub fn within_sq(&self, query: usize, max_d2: f64) -> Vec<(usize, f64)> {
        let q = self.frame.row(query);
        let mut result = Vec::new();
        self.range_descend(self.root, q, query as u32, max_d2, &mut result);
        result.sort_unstable_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        result
    }

    fn knn_descend(
        &self,
        node: usize,
        q: &[f64],
        skip: u32,
        k: usize,
        heap: &mut BinaryHeap<Candidate>,
    ) {
        match &self.nodes[node] {
            Node::Leaf { start, end } => {
                for &idx in &self.order[*start..*end] {
                    if idx == skip {
                        continue;
                    }
                    let d2 = squared_distance(q, self.frame.row(idx as usize));
                    let cand = Candidate { d2, idx };
                    if heap.len() < k {
                        heap.push(cand);
                    } else if cand < *heap.peek().expect("heap non-empty") {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let delta = q[*dim] - value;
                let (near, far) = if delta < 0.0 {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.knn_descend(near, q, skip, k, heap);
                let plane_d2 = delta * delta;
                let prune = heap.len() == k
                    && plane_d2 > heap.peek().expect("heap non-empty").d2;
                if !prune {
                    self.knn_descend(far, q, skip, k, heap);
                }
            }
        }
    }

    fn range_descend(
        &self,
        node: usize,
        q: &[f64],
        skip: u32,
        max_d2: f64,
        out: &mut Vec<(usize, f64)>,
    ) {
        match &self.nodes[node] {
            Node::Leaf { start, end } => {
                for &idx in &self.order[*start..*end] {
                    if idx == skip {
                        continue;
                    }
                    let d2 = squared_distance(q, self.frame.row(idx as usize));
                    if d2 <= max_d2 {
                        out.push((idx as usize, d2));
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let delta = q[*dim] - value;
                let (near, far) = if delta < 0.0 {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.range_descend(near, q, skip, max_d2, out);
                if delta * delta <= max_d2 {
                    self.range_descend(far, q, skip, max_d2, out);
                }
            }
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        sum += d * d;
    }
    sum
}

fn build(
    frame: &FeatureFrame,
    nodes: &mut Vec<Node>,
    order: &mut [u32],
    start: usize,
    end: usize,
) -> usize {
    let len = end - start;
    if len <= LEAF_SIZE {
        nodes.push(Node::Leaf { start, end });
        return nodes.len() - 1;
    }

    // split on the dimension with the widest spread in this segment
    let p = frame.n_features();
    let mut dim = 0;
    let mut best_spread = f64::NEG_INFINITY;
    for j in 0..p {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &idx in order[start..end].iter() {
            let v = frame.value(idx as usize, j);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let spread = hi - lo;
        if spread > best_spread {
            best_spread = spread;
            dim = j;
        }
    }
    if best_spread <= 0.0 {
        // all points identical in every dimension
        nodes.push(Node::Leaf { start, end });
        return nodes.len() - 1;
    }

    let mid = len / 2;
    order[start..end].select_nth_unstable_by(mid, |&a, &b| {
        frame
            .value(a as usize, dim)
            .total_cmp(&frame.value(b as usize, dim))
            .then_with(|| a.cmp(&b))
    });
    let value = frame.value(order[start + mid] as usize, dim);

    let node_slot = nodes.len();
    nodes.push(Node::Leaf { start, end }); // placeholder
    let left = build(frame, nodes, order, start, start + mid);
    let right = build(frame, nodes, order, start + mid, end);
    nodes[node_slot] = Node::Split {
        dim,
        value,
        left,
        right,
    };
    node_slot
}
