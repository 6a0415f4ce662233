//! Bounding volume hierarchy over a [`ClassedMesh`] for nearest-hit ray casting.

use crate::geom::{Aabb, Vec3};
use crate::mesh::ClassedMesh;
use crate::scalar::Scalar;
use crate::taxonomy::SemanticClass;

/// Hits closer than this (meters) are ignored, so a ray never hits its emitter.
pub const MIN_RAY_T: f64 = 1e-6;

const LEAF_SIZE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit<T = f64> {
    pub t: T,
    pub triangle: usize,
    pub class: SemanticClass,
}

#[derive(Clone, Debug)]
struct Node<T> {
    bounds: Aabb<T>,
    /// Leaf when `count > 0`: triangles `order[start..start + count]`.
    start: usize,
    count: usize,
    left: usize,
    right: usize,
}

#[derive(Clone, Debug)]
pub struct Bvh<T = f64> {
    mesh: ClassedMesh<T>,
    order: Vec<usize>,
    nodes: Vec<Node<T>>,
}

/// Watertight ray/triangle test (Woop, Benthin and Wald 2013).
///
/// Returns the ray parameter of the intersection when it is greater than
/// `t_min`. Rays parallel to the triangle plane never hit.
pub fn intersect_triangle<T: Scalar>(
    origin: Vec3<T>,
    dir: Vec3<T>,
    [a, b, c]: [Vec3<T>; 3],
    t_min: T,
) -> Option<T> {
    let d = dir.to_array();
    let kz = if d[0].abs() >= d[1].abs() && d[0].abs() >= d[2].abs() {
        0
    } else if d[1].abs() >= d[2].abs() {
        1
    } else {
        2
    };
    let mut kx = (kz + 1) % 3;
    let mut ky = (kx + 1) % 3;
    if d[kz] < T::zero() {
        std::mem::swap(&mut kx, &mut ky);
    }
    let sx = d[kx] / d[kz];
    let sy = d[ky] / d[kz];
    let sz = T::one() / d[kz];

    let a = (a - origin).to_array();
    let b = (b - origin).to_array();
    let c = (c - origin).to_array();
    let ax = a[kx] - sx * a[kz];
    let ay = a[ky] - sy * a[kz];
    let bx = b[kx] - sx * b[kz];
    let by = b[ky] - sy * b[kz];
    let cx = c[kx] - sx * c[kz];
    let cy = c[ky] - sy * c[kz];

    let u = cx * by - cy * bx;
    let v = ax * cy - ay * cx;
    let w = bx * ay - by * ax;
    let zero = T::zero();
    if (u < zero || v < zero || w < zero) && (u > zero || v > zero || w > zero) {
        return None;
    }
    let det = u + v + w;
    if det == zero {
        return None;
    }
    let tz = u * (sz * a[kz]) + v * (sz * b[kz]) + w * (sz * c[kz]);
    let t = tz / det;
    if t.is_finite() && t > t_min {
        Some(t)
    } else {
        None
    }
}

impl<T: Scalar> Bvh<T> {
    pub fn build(mesh: ClassedMesh<T>) -> Self {
        let n = mesh.triangles.len();
        let mut bvh = Self {
            mesh,
            order: (0..n).collect(),
            nodes: Vec::new(),
        };
        if n > 0 {
            let centroids: Vec<Vec3<T>> = bvh
                .mesh
                .triangles
                .iter()
                .map(|t| {
                    let [a, b, c] = bvh.mesh.corners(t);
                    (a + b + c) / T::lit(3.0)
                })
                .collect();
            bvh.build_node(0, n, &centroids);
        }
        bvh
    }

    fn padded_bounds(&self, start: usize, end: usize) -> Aabb<T> {
        let mut b = Aabb::empty();
        for &i in &self.order[start..end] {
            for p in self.mesh.corners(&self.mesh.triangles[i]) {
                b.grow(p);
            }
        }
        // Pad so rounding in the slab test never culls a boundary hit.
        let scale = b
            .min
            .x
            .abs()
            .max(b.min.y.abs())
            .max(b.min.z.abs())
            .max(b.max.x.abs().max(b.max.y.abs()).max(b.max.z.abs()));
        let pad = scale * T::epsilon() * T::lit(64.0) + T::min_positive_value().sqrt();
        b.min = b.min - Vec3::splat(pad);
        b.max += Vec3::splat(pad);
        b
    }

    fn build_node(&mut self, start: usize, end: usize, centroids: &[Vec3<T>]) -> usize {
        let id = self.nodes.len();
        let bounds = self.padded_bounds(start, end);
        self.nodes.push(Node {
            bounds,
            start,
            count: end - start,
            left: 0,
            right: 0,
        });
        if end - start <= LEAF_SIZE {
            return id;
        }
        let cb = Aabb::from_points(self.order[start..end].iter().map(|&i| centroids[i]));
        let axis = cb.longest_axis();
        if cb.extent().axis(axis) <= T::zero() {
            return id;
        }
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            centroids[a]
                .axis(axis)
                .partial_cmp(&centroids[b].axis(axis))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let left = self.build_node(start, mid, centroids);
        let right = self.build_node(mid, end, centroids);
        let node = &mut self.nodes[id];
        node.count = 0;
        node.left = left;
        node.right = right;
        id
    }

    pub fn mesh(&self) -> &ClassedMesh<T> {
        &self.mesh
    }

    /// Nearest hit along a unit-length `dir` with `t > MIN_RAY_T`; equal-`t`
    /// hits resolve to the lowest triangle index.
    pub fn raycast(&self, origin: Vec3<T>, dir: Vec3<T>) -> Option<Hit<T>> {
        if self.nodes.is_empty() {
            return None;
        }
        let t_min = T::lit(MIN_RAY_T);
        let mut best: Option<(T, usize)> = None;
        let mut stack = vec![0usize];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            let limit = best.map_or(T::infinity(), |b| b.0);
            match slab(&node.bounds, origin, dir) {
                Some(near) if near <= limit => {}
                _ => continue,
            }
            if node.count > 0 {
                for &ti in &self.order[node.start..node.start + node.count] {
                    let tri = self.mesh.corners(&self.mesh.triangles[ti]);
                    if let Some(t) = intersect_triangle(origin, dir, tri, t_min) {
                        let better = match best {
                            None => true,
                            Some((bt, bi)) => t < bt || (t == bt && ti < bi),
                        };
                        if better {
                            best = Some((t, ti));
                        }
                    }
                }
            } else {
                let (l, r) = (node.left, node.right);
                let dl = slab(&self.nodes[l].bounds, origin, dir);
                let dr = slab(&self.nodes[r].bounds, origin, dir);
                // Push the farther child first so the nearer is popped next.
                match (dl, dr) {
                    (Some(a), Some(b)) if a <= b => {
                        stack.push(r);
                        stack.push(l);
                    }
                    (Some(_), Some(_)) => {
                        stack.push(l);
                        stack.push(r);
                    }
                    (Some(_), None) => stack.push(l),
                    (None, Some(_)) => stack.push(r),
                    (None, None) => {}
                }
            }
        }
        best.map(|(t, triangle)| Hit {
            t,
            triangle,
            class: self.mesh.triangles[triangle].class,
        })
    }
}

/// Entry distance of the ray into the box (clamped at 0), or `None` on miss.
fn slab<T: Scalar>(b: &Aabb<T>, o: Vec3<T>, d: Vec3<T>) -> Option<T> {
    let mut t0 = T::zero();
    let mut t1 = T::infinity();
    for a in 0..3 {
        let (lo, hi, oa, da) = (b.min.axis(a), b.max.axis(a), o.axis(a), d.axis(a));
        if da == T::zero() {
            if oa < lo || oa > hi {
                return None;
            }
            continue;
        }
        let inv = T::one() / da;
        let mut ta = (lo - oa) * inv;
        let mut tb = (hi - oa) * inv;
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return None;
        }
    }
    Some(t0)
}

/// Linear scan over every triangle; the reference the BVH must agree with.
pub fn raycast_brute_force<T: Scalar>(
    mesh: &ClassedMesh<T>,
    origin: Vec3<T>,
    dir: Vec3<T>,
) -> Option<Hit<T>> {
    let t_min = T::lit(MIN_RAY_T);
    let mut best: Option<(T, usize)> = None;
    for (i, tri) in mesh.triangles.iter().enumerate() {
        if let Some(t) = intersect_triangle(origin, dir, mesh.corners(tri), t_min) {
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, i));
            }
        }
    }
    best.map(|(t, triangle)| Hit {
        t,
        triangle,
        class: mesh.triangles[triangle].class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Triangle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single(z: f64) -> ClassedMesh<f64> {
        let v = vec![
            Vec3::new(-1.0, -1.0, z),
            Vec3::new(1.0, -1.0, z),
            Vec3::new(0.0, 1.0, z),
        ];
        ClassedMesh::new(
            v,
            vec![Triangle {
                v: [0, 1, 2],
                class: SemanticClass::RoofSurface,
            }],
        )
        .unwrap()
        .0
    }

    #[test]
    fn straight_up_hits_at_ten() {
        let bvh = Bvh::build(single(10.0));
        let h = bvh.raycast(Vec3::zero(), Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(h.t, 10.0);
        assert_eq!(h.class, SemanticClass::RoofSurface);
        assert!(bvh
            .raycast(Vec3::zero(), Vec3::new(0.0, 0.0, -1.0))
            .is_none());
    }

    #[test]
    fn parallel_ray_misses() {
        let bvh = Bvh::build(single(10.0));
        assert!(bvh
            .raycast(Vec3::new(-5.0, 0.0, 10.0), Vec3::new(1.0, 0.0, 0.0))
            .is_none());
        assert!(bvh
            .raycast(Vec3::zero(), Vec3::new(1.0, 0.0, 0.0))
            .is_none());
    }

    #[test]
    fn emitter_on_surface_is_ignored() {
        let bvh = Bvh::build(single(0.0));
        assert!(bvh
            .raycast(Vec3::zero(), Vec3::new(0.0, 0.0, 1.0))
            .is_none());
    }

    #[test]
    fn shared_edge_is_watertight() {
        // Two triangles sharing the diagonal of a unit square; rays through
        // the diagonal must hit one of them.
        let v = vec![
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 1.0),
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(0.0, 1.0, 1.0),
        ];
        let tris = vec![
            Triangle {
                v: [0, 1, 2],
                class: SemanticClass::Door,
            },
            Triangle {
                v: [0, 2, 3],
                class: SemanticClass::Window,
            },
        ];
        let bvh = Bvh::build(ClassedMesh::new(v, tris).unwrap().0);
        for i in 1..100 {
            let s = i as f64 / 100.0;
            let h = bvh.raycast(Vec3::new(s, s, 0.0), Vec3::new(0.0, 0.0, 1.0));
            assert_eq!(h.map(|h| h.triangle), Some(0), "s={s}");
        }
    }

    fn random_mesh(rng: &mut ChaCha8Rng, n: usize) -> ClassedMesh<f64> {
        let mut v = Vec::new();
        let mut t = Vec::new();
        for i in 0..n {
            let c = Vec3::new(
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            );
            for _ in 0..3 {
                v.push(
                    c + Vec3::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    ),
                );
            }
            t.push(Triangle {
                v: [3 * i, 3 * i + 1, 3 * i + 2],
                class: SemanticClass::from_id(rng.gen_range(1..=12)).unwrap(),
            });
        }
        ClassedMesh::new(v, t).unwrap().0
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mesh = random_mesh(&mut rng, 200);
        let bvh = Bvh::build(mesh.clone());
        let mut hits = 0;
        for _ in 0..1000 {
            let o = Vec3::new(
                rng.gen_range(-8.0..8.0),
                rng.gen_range(-8.0..8.0),
                rng.gen_range(-8.0..8.0),
            );
            let d = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
            .normalized()
            .unwrap();
            let a = bvh.raycast(o, d);
            assert_eq!(a, raycast_brute_force(&mesh, o, d));
            hits += a.is_some() as usize;
        }
        assert!(hits > 100, "{hits}");
    }
}
