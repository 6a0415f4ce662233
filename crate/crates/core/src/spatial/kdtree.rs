//! Exact nearest-neighbor and range index over a static point set.

use crate::error::{Error, Result};
use crate::geom::{Aabb, Vec3};
use crate::scalar::Scalar;

const LEAF_SIZE: usize = 16;

#[derive(Clone, Debug)]
enum Node<T> {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: T,
        left: usize,
        right: usize,
    },
}

/// Static kd-tree. Queries return indices into the original point sequence.
///
/// `nearest` is exact: it returns the Euclidean argmin, breaking distance ties
/// toward the lowest index.
#[derive(Clone, Debug)]
pub struct NnIndex<T = f64> {
    points: Vec<Vec3<T>>,
    order: Vec<usize>,
    nodes: Vec<Node<T>>,
    bounds: Aabb<T>,
}

impl<T: Scalar> NnIndex<T> {
    pub fn build(points: Vec<Vec3<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("cannot index an empty point set"));
        }
        let bounds = Aabb::from_points(points.iter().copied());
        let mut idx = Self {
            order: (0..points.len()).collect(),
            points,
            nodes: Vec::new(),
            bounds,
        };
        let n = idx.order.len();
        idx.build_node(0, n);
        Ok(idx)
    }

    pub fn from_cloud(cloud: &crate::cloud::LabeledPointCloud<T>) -> Result<Self> {
        Self::build(cloud.positions().collect())
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let b = Aabb::from_points(self.order[start..end].iter().map(|&i| self.points[i]));
        let axis = b.longest_axis();
        if b.extent().axis(axis) <= T::zero() {
            // All points coincide.
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mid = start + (end - start) / 2;
        let pts = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts[a]
                .axis(axis)
                .partial_cmp(&pts[b].axis(axis))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let value = self.points[self.order[mid]].axis(axis);
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> Vec3<T> {
        self.points[i]
    }

    pub fn points(&self) -> &[Vec3<T>] {
        &self.points
    }

    pub fn bounds(&self) -> Aabb<T> {
        self.bounds
    }

    /// Closest point `(index, distance)`.
    pub fn nearest(&self, q: Vec3<T>) -> (usize, T) {
        let mut best = (usize::MAX, T::infinity());
        self.nearest_rec(0, q, &mut best);
        (best.0, best.1.sqrt())
    }

    fn nearest_rec(&self, node: usize, q: Vec3<T>, best: &mut (usize, T)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let d2 = q.distance_squared(self.points[i]);
                    if d2 < best.1 || (d2 == best.1 && i < best.0) {
                        *best = (i, d2);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q.axis(axis) - value;
                let (near, far) = if diff < T::zero() {
                    (left, right)
                } else {
                    (right, left)
                };
                self.nearest_rec(near, q, best);
                // Visit on equality: the far side may hold a lower-index tie.
                if diff * diff <= best.1 {
                    self.nearest_rec(far, q, best);
                }
            }
        }
    }

    /// Indices within `radius` (inclusive), ascending.
    pub fn within_radius(&self, c: Vec3<T>, radius: T) -> Vec<usize> {
        let mut out = Vec::new();
        self.radius_rec(0, c, radius * radius, &mut out);
        out.sort_unstable();
        out
    }

    fn radius_rec(&self, node: usize, c: Vec3<T>, r2: T, out: &mut Vec<usize>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                out.extend(
                    self.order[start..end]
                        .iter()
                        .copied()
                        .filter(|&i| c.distance_squared(self.points[i]) <= r2),
                );
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = c.axis(axis) - value;
                let (near, far) = if diff < T::zero() {
                    (left, right)
                } else {
                    (right, left)
                };
                self.radius_rec(near, c, r2, out);
                if diff * diff <= r2 {
                    self.radius_rec(far, c, r2, out);
                }
            }
        }
    }

    /// Indices inside the closed cylinder around the axis through `axis_point`
    /// with unit direction `dir`, ascending.
    pub fn within_cylinder(
        &self,
        axis_point: Vec3<T>,
        dir: Vec3<T>,
        radius: T,
        half_depth: T,
    ) -> Vec<usize> {
        let reach = (radius * radius + half_depth * half_depth).sqrt();
        let mut cand = self.within_radius(axis_point, reach);
        cand.retain(|&i| in_cylinder(self.points[i], axis_point, dir, radius, half_depth));
        cand
    }
}

/// Closed-cylinder membership test shared by the index and its oracles.
#[inline]
pub fn in_cylinder<T: Scalar>(
    p: Vec3<T>,
    axis_point: Vec3<T>,
    dir: Vec3<T>,
    radius: T,
    half_depth: T,
) -> bool {
    let rel = p - axis_point;
    let along = rel.dot(dir);
    if along.abs() > half_depth {
        return false;
    }
    let radial2 = rel.norm_squared() - along * along;
    radial2 <= radius * radius
}
