//! Labeled point clouds.

use std::collections::BTreeMap;

use crate::geom::{Aabb, Vec3};
use crate::scalar::Scalar;
use crate::taxonomy::SemanticClass;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabeledPoint<T = f64> {
    pub pos: Vec3<T>,
    pub class: SemanticClass,
}

impl<T: Scalar> LabeledPoint<T> {
    pub fn new(x: T, y: T, z: T, class: SemanticClass) -> Self {
        Self {
            pos: Vec3::new(x, y, z),
            class,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabeledPointCloud<T = f64> {
    pub points: Vec<LabeledPoint<T>>,
    /// Free-text provenance, e.g. which frame the coordinates live in.
    pub frame_note: String,
}

impl<T: Scalar> LabeledPointCloud<T> {
    pub fn new(points: Vec<LabeledPoint<T>>) -> Self {
        Self {
            points,
            frame_note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.frame_note = note.into();
        self
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> impl ExactSizeIterator<Item = Vec3<T>> + '_ {
        self.points.iter().map(|p| p.pos)
    }

    pub fn bounds(&self) -> Aabb<T> {
        Aabb::from_points(self.positions())
    }

    /// Rigidly shifts every point by `v`.
    pub fn translated(&self, v: Vec3<T>) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| LabeledPoint {
                    pos: p.pos + v,
                    class: p.class,
                })
                .collect(),
            frame_note: self.frame_note.clone(),
        }
    }

    /// Per-class sub-clouds; every class is a key, classes without points
    /// map to empty clouds. Relative point order is kept within each class.
    pub fn partition_by_class(&self) -> BTreeMap<SemanticClass, LabeledPointCloud<T>> {
        let mut out: BTreeMap<_, _> = SemanticClass::ALL
            .iter()
            .map(|&c| {
                (
                    c,
                    LabeledPointCloud {
                        points: Vec::new(),
                        frame_note: self.frame_note.clone(),
                    },
                )
            })
            .collect();
        for p in &self.points {
            out.get_mut(&p.class)
                .expect("all classes present")
                .points
                .push(*p);
        }
        out
    }

    /// Points of a single class.
    pub fn class_subset(&self, class: SemanticClass) -> LabeledPointCloud<T> {
        LabeledPointCloud {
            points: self
                .points
                .iter()
                .filter(|p| p.class == class)
                .copied()
                .collect(),
            frame_note: self.frame_note.clone(),
        }
    }

    pub fn class_counts(&self) -> BTreeMap<SemanticClass, usize> {
        let mut m = BTreeMap::new();
        for p in &self.points {
            *m.entry(p.class).or_insert(0) += 1;
        }
        m
    }

    /// Converts the coordinate type.
    pub fn cast<U: Scalar>(&self) -> LabeledPointCloud<U> {
        LabeledPointCloud {
            points: self
                .points
                .iter()
                .map(|p| LabeledPoint {
                    pos: Vec3::from_f64(p.pos.to_f64()),
                    class: p.class,
                })
                .collect(),
            frame_note: self.frame_note.clone(),
        }
    }
}

impl<T: Scalar> FromIterator<LabeledPoint<T>> for LabeledPointCloud<T> {
    fn from_iter<I: IntoIterator<Item = LabeledPoint<T>>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn partition_small() {
        let c: LabeledPointCloud = [1u8, 1, 6]
            .iter()
            .enumerate()
            .map(|(i, &id)| {
                LabeledPoint::new(i as f64, 0.0, 0.0, SemanticClass::from_id(id).unwrap())
            })
            .collect();
        let parts = c.partition_by_class();
        assert_eq!(parts.len(), 12);
        assert_eq!(parts[&SemanticClass::RoadSurface].len(), 2);
        assert_eq!(parts[&SemanticClass::WallSurface].len(), 1);
        assert!(parts[&SemanticClass::Door].is_empty());
    }

    #[test]
    fn partition_empty() {
        let c = LabeledPointCloud::<f64>::default();
        assert!(c.partition_by_class().values().all(|p| p.is_empty()));
    }

    #[test]
    fn partition_counts_match_tally() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c: LabeledPointCloud<f32> = (0..10_000)
            .map(|_| {
                let id = rng.gen_range(1..=12u8);
                LabeledPoint::new(
                    rng.gen(),
                    rng.gen(),
                    rng.gen(),
                    SemanticClass::from_id(id).unwrap(),
                )
            })
            .collect();
        let mut tally = [0usize; 13];
        for p in &c.points {
            tally[p.class.id() as usize] += 1;
        }
        let parts = c.partition_by_class();
        assert_eq!(parts.values().map(|p| p.len()).sum::<usize>(), 10_000);
        for (cls, sub) in &parts {
            assert_eq!(sub.len(), tally[cls.id() as usize]);
            assert!(sub.points.iter().all(|p| p.class == *cls));
        }
    }
}
