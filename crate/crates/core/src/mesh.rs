//! Triangle soups with a semantic class per triangle.

use crate::error::{Error, Result};
use crate::geom::{Aabb, Vec3};
use crate::scalar::Scalar;
use crate::taxonomy::SemanticClass;

/// Triangles at or below this area (m²) are treated as degenerate.
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub v: [usize; 3],
    pub class: SemanticClass,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassedMesh<T = f64> {
    pub vertices: Vec<Vec3<T>>,
    pub triangles: Vec<Triangle>,
}

impl<T: Scalar> ClassedMesh<T> {
    /// Validates indices and drops degenerate triangles, returning how many
    /// were dropped.
    pub fn new(vertices: Vec<Vec3<T>>, triangles: Vec<Triangle>) -> Result<(Self, usize)> {
        let n = vertices.len();
        if let Some((i, t)) = triangles
            .iter()
            .enumerate()
            .find(|(_, t)| t.v.iter().any(|&v| v >= n))
        {
            return Err(Error::parse(
                format!("triangle {i}"),
                format!("vertex index out of range in {:?} ({n} vertices)", t.v),
            ));
        }
        let mut mesh = Self {
            vertices,
            triangles,
        };
        let before = mesh.triangles.len();
        let keep: Vec<Triangle> = mesh
            .triangles
            .iter()
            .copied()
            .filter(|t| mesh.triangle_area(t).to_f64_lossless() > MIN_TRIANGLE_AREA)
            .collect();
        mesh.triangles = keep;
        let dropped = before - mesh.triangles.len();
        Ok((mesh, dropped))
    }

    #[inline]
    pub fn corners(&self, t: &Triangle) -> [Vec3<T>; 3] {
        [
            self.vertices[t.v[0]],
            self.vertices[t.v[1]],
            self.vertices[t.v[2]],
        ]
    }

    pub fn triangle_area(&self, t: &Triangle) -> T {
        let [a, b, c] = self.corners(t);
        (b - a).cross(c - a).norm() * T::lit(0.5)
    }

    pub fn total_area(&self) -> T {
        self.triangles
            .iter()
            .fold(T::zero(), |acc, t| acc + self.triangle_area(t))
    }

    pub fn bounds(&self) -> Aabb<T> {
        Aabb::from_points(self.triangles.iter().flat_map(|t| self.corners(t)))
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

/// Distance from `p` to the closed triangle `abc`.
pub fn point_triangle_distance<T: Scalar>(p: Vec3<T>, [a, b, c]: [Vec3<T>; 3]) -> T {
    // Region classification after Ericson, "Real-Time Collision Detection".
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= T::zero() && d2 <= T::zero() {
        return p.distance(a);
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= T::zero() && d4 <= d3 {
        return p.distance(b);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= T::zero() && d1 >= T::zero() && d3 <= T::zero() {
        let v = d1 / (d1 - d3);
        return p.distance(a + ab * v);
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= T::zero() && d5 <= d6 {
        return p.distance(c);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= T::zero() && d2 >= T::zero() && d6 <= T::zero() {
        let w = d2 / (d2 - d6);
        return p.distance(a + ac * w);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= T::zero() && (d4 - d3) >= T::zero() && (d5 - d6) >= T::zero() {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return p.distance(b + (c - b) * w);
    }
    let denom = T::one() / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    p.distance(a + ab * v + ac * w)
}
