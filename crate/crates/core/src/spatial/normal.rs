//! Local surface normals from neighborhood covariance.

use crate::geom::{symmetric_eigen3, Vec3};
use crate::scalar::Scalar;
use crate::spatial::NnIndex;

/// Normal at `at` from all indexed points within `scale` meters.
///
/// The smallest-eigenvalue eigenvector of the neighborhood covariance,
/// oriented so that z >= 0 (then y >= 0, then x >= 0 on ties). `None` when
/// fewer than three neighbors exist or they are collinear.
pub fn estimate_normal<T: Scalar>(index: &NnIndex<T>, at: Vec3<T>, scale: T) -> Option<Vec3<T>> {
    let nb = index.within_radius(at, scale);
    normal_from_points(nb.iter().map(|&i| index.point(i)))
}

pub fn normal_from_points<T: Scalar, I>(pts: I) -> Option<Vec3<T>>
where
    I: Iterator<Item = Vec3<T>> + Clone,
{
    let mut n = 0usize;
    let mut sum = Vec3::zero();
    for p in pts.clone() {
        sum += p;
        n += 1;
    }
    if n < 3 {
        return None;
    }
    let mean = sum / T::from_usize(n)?;
    let mut c = [[T::zero(); 3]; 3];
    for p in pts {
        let d = (p - mean).to_array();
        for i in 0..3 {
            for j in i..3 {
                c[i][j] = c[i][j] + d[i] * d[j];
            }
        }
    }
    c[1][0] = c[0][1];
    c[2][0] = c[0][2];
    c[2][1] = c[1][2];

    let (vals, vecs) = symmetric_eigen3(c);
    let tol = T::epsilon() * T::lit(256.0);
    if !(vals[2] > T::zero()) || vals[1] <= vals[2] * tol {
        return None;
    }
    let v = vecs[0].normalized()?;
    Some(orient(v))
}

/// Components at or below this magnitude count as ties in the sign rule, so
/// near-vertical surfaces (noisy walls) orient consistently by y, then x.
pub const ORIENTATION_TIE_TOLERANCE: f64 = 0.1;

/// Sign rule: z >= 0, then y >= 0, then x >= 0.
pub fn orient<T: Scalar>(v: Vec3<T>) -> Vec3<T> {
    let tie = T::lit(ORIENTATION_TIE_TOLERANCE);
    let flip = if v.z.abs() > tie {
        v.z < T::zero()
    } else if v.y.abs() > tie {
        v.y < T::zero()
    } else {
        v.x < T::zero()
    };
    if flip {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn angle(a: Vec3<f64>, b: Vec3<f64>) -> f64 {
        a.cross(b).norm().atan2(a.dot(b))
    }

    fn grid_on_plane(f: impl Fn(f64, f64) -> Vec3<f64>) -> Vec<Vec3<f64>> {
        let mut v = Vec::new();
        for i in -5..=5 {
            for j in -5..=5 {
                v.push(f(i as f64 * 0.05, j as f64 * 0.07));
            }
        }
        v
    }

    #[test]
    fn plane_z0() {
        let idx = NnIndex::build(grid_on_plane(|a, b| Vec3::new(a, b, 0.0))).unwrap();
        let n = estimate_normal(&idx, Vec3::zero(), 0.2).unwrap();
        assert_eq!(n, Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn plane_x_plus_z() {
        let idx = NnIndex::build(grid_on_plane(|a, b| Vec3::new(a, b, -a))).unwrap();
        let n = estimate_normal(&idx, Vec3::zero(), 0.3).unwrap();
        let want = Vec3::new(1.0, 0.0, 1.0) / 2f64.sqrt();
        assert!(angle(n, want) < 1e-9, "{n:?}");
    }

    #[test]
    fn plane_x_minus_z() {
        let idx = NnIndex::build(grid_on_plane(|a, b| Vec3::new(a, b, a))).unwrap();
        let n = estimate_normal(&idx, Vec3::zero(), 0.3).unwrap();
        let want = Vec3::new(-1.0, 0.0, 1.0) / 2f64.sqrt();
        assert!(angle(n, want) < 1e-9, "{n:?}");
        assert!(
            (n.x + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8
                && (n.z - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8
        );
    }

    #[test]
    fn collinear_has_no_normal() {
        let idx = NnIndex::build(vec![Vec3::zero(), Vec3::new(1.0, 1.0, 0.0)]).unwrap();
        assert!(estimate_normal(&idx, Vec3::zero(), 5.0).is_none());
        let line: Vec<_> = (0..20)
            .map(|i| Vec3::new(i as f64 * 0.1, i as f64 * 0.2, 0.0))
            .collect();
        let idx = NnIndex::build(line).unwrap();
        assert!(estimate_normal(&idx, Vec3::zero(), 10.0).is_none());
    }

    #[test]
    fn sign_rule_ties() {
        assert_eq!(orient(Vec3::new(0.0, -1.0, 0.0)), Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(orient(Vec3::new(-1.0, 0.0, 0.0)), Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(
            orient(Vec3::new(1.0, 1.0, -1.0)),
            Vec3::new(-1.0, -1.0, 1.0)
        );
        // A wall normal with a tiny negative z still orients by x.
        assert_eq!(
            orient(Vec3::new(0.999, 0.0, -0.03)),
            Vec3::new(0.999, 0.0, -0.03)
        );
    }
}
