//! Bounding-volume hierarchy over an indexed set of primitives.
//!
//! Nodes split at the median of the longest axis of the primitive centres;
//! leaves hold at most [`LEAF_SIZE`] primitives.

use crate::geometry::{Aabb, Point3};

pub const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf { bbox: Aabb, start: usize, end: usize },
    Inner { bbox: Aabb, left: usize, right: usize },
}

impl Node {
    fn bbox(&self) -> &Aabb {
        match self {
            Node::Leaf { bbox, .. } | Node::Inner { bbox, .. } => bbox,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AabbTree {
    nodes: Vec<Node>,
    items: Vec<usize>,
}

impl AabbTree {
    /// Builds a tree over primitives given by their bounding boxes; the
    /// primitive id is its position in `boxes`.
    pub fn build(boxes: &[Aabb]) -> AabbTree {
        let mut tree = AabbTree { nodes: Vec::new(), items: (0..boxes.len()).collect() };
        if !boxes.is_empty() {
            let n = boxes.len();
            tree.build_node(boxes, 0, n);
        }
        tree
    }

    fn build_node(&mut self, boxes: &[Aabb], start: usize, end: usize) -> usize {
        let bbox = self.items[start..end]
            .iter()
            .fold(Aabb::EMPTY, |b, &i| b.union(boxes[i]));
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { bbox, start, end });
            return id;
        }
        self.nodes.push(Node::Leaf { bbox, start, end });
        let centres = Aabb::from_points(self.items[start..end].iter().map(|&i| boxes[i].centre()));
        let ext = centres.extent();
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let mid = (start + end) / 2;
        self.items[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            boxes[a].centre()[axis].total_cmp(&boxes[b].centre()[axis]).then(a.cmp(&b))
        });
        let left = self.build_node(boxes, start, mid);
        let right = self.build_node(boxes, mid, end);
        self.nodes[id] = Node::Inner { bbox, left, right };
        id
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn bbox(&self) -> Aabb {
        self.nodes.first().map(|n| *n.bbox()).unwrap_or(Aabb::EMPTY)
    }

    /// Visits every primitive whose node boxes pass `test`. Output is sorted
    /// and deduplicated so query results do not depend on tree layout.
    pub fn query<F: Fn(&Aabb) -> bool>(&self, test: F) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !test(node.bbox()) {
                continue;
            }
            match *node {
                Node::Leaf { start, end, .. } => out.extend_from_slice(&self.items[start..end]),
                Node::Inner { left, right, .. } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn query_box(&self, b: &Aabb) -> Vec<usize> {
        self.query(|n| n.overlaps(b))
    }

    pub fn query_segment(&self, a: Point3, b: Point3, pad: f64) -> Vec<usize> {
        self.query(|n| n.inflate(pad).hits_segment(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_query_matches_linear_scan() {
        let boxes: Vec<Aabb> = (0..200)
            .map(|i| {
                let f = i as f64;
                let c = Point3::new((f * 0.37).sin(), (f * 0.71).cos(), (f * 0.13).sin());
                Aabb::around(c, 0.05)
            })
            .collect();
        let tree = AabbTree::build(&boxes);
        let q = Aabb::around(Point3::new(0.2, 0.1, -0.1), 0.4);
        let mut expect: Vec<usize> = (0..boxes.len()).filter(|&i| boxes[i].overlaps(&q)).collect();
        expect.sort_unstable();
        let got: Vec<usize> = tree.query_box(&q).into_iter().filter(|&i| boxes[i].overlaps(&q)).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn empty_tree() {
        let tree = AabbTree::build(&[]);
        assert!(tree.is_empty());
        assert!(tree.query_box(&Aabb::around(Point3::ZERO, 1.0)).is_empty());
    }
}
