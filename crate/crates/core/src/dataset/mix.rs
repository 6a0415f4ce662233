use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cloud::LabeledPointCloud;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioMix {
    /// Share of real points in `[0, 1]`.
    pub real_fraction: f64,
    pub target_count: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Real,
    Synthetic,
}

/// `len` consecutive output points starting at `start` share `source`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceRun {
    pub source: Provenance,
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixMetadata {
    pub spec: RatioMix,
    pub real_count: usize,
    pub synthetic_count: usize,
    pub real_source_size: usize,
    pub synthetic_source_size: usize,
    /// Set when a source had fewer points than requested and was sampled with replacement.
    pub real_with_replacement: bool,
    pub synthetic_with_replacement: bool,
    pub provenance: Vec<ProvenanceRun>,
}

impl MixMetadata {
    /// Per-point source, expanded from the runs.
    pub fn provenance_mask(&self) -> Vec<Provenance> {
        self.provenance
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.source, r.len))
            .collect()
    }
}

impl RatioMix {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.real_fraction) {
            return Err(Error::config(
                "mix.real_fraction",
                format!("must lie in [0, 1], got {}", self.real_fraction),
            ));
        }
        if self.target_count == 0 {
            return Err(Error::config("mix.target_count", "must be positive"));
        }
        Ok(())
    }

    /// Number of real points, rounding half up.
    pub fn real_count(&self) -> usize {
        ((self.target_count as f64 * self.real_fraction + 0.5).floor() as usize)
            .min(self.target_count)
    }
}

/// `k` source indices: without replacement in ascending order when the
/// source is large enough, otherwise `k` independent draws.
fn draw(
    rng: &mut ChaCha8Rng,
    n: usize,
    k: usize,
    what: &'static str,
) -> Result<(Vec<usize>, bool)> {
    if k == 0 {
        return Ok((Vec::new(), false));
    }
    if n == 0 {
        return Err(Error::EmptyInput(what));
    }
    if k <= n {
        let mut v = index::sample(rng, n, k).into_vec();
        v.sort_unstable();
        Ok((v, false))
    } else {
        Ok(((0..k).map(|_| rng.gen_range(0..n)).collect(), true))
    }
}

/// Real points followed by synthetic points in the requested proportion.
pub fn mix<T: Scalar>(
    real: &LabeledPointCloud<T>,
    synthetic: &LabeledPointCloud<T>,
    spec: &RatioMix,
) -> Result<(LabeledPointCloud<T>, MixMetadata)> {
    spec.validate()?;
    let nr = spec.real_count();
    let ns = spec.target_count - nr;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (ri, real_rep) = draw(&mut rng, real.len(), nr, "real cloud")?;
    let (si, syn_rep) = draw(&mut rng, synthetic.len(), ns, "synthetic cloud")?;

    let mut points = Vec::with_capacity(spec.target_count);
    points.extend(ri.iter().map(|&i| real.points[i]));
    points.extend(si.iter().map(|&i| synthetic.points[i]));
    let provenance = [(Provenance::Real, 0, nr), (Provenance::Synthetic, nr, ns)]
        .into_iter()
        .filter(|r| r.2 > 0)
        .map(|(source, start, len)| ProvenanceRun { source, start, len })
        .collect();
    let note = format!("mix of {} real and {} synthetic points", nr, ns);
    let meta = MixMetadata {
        spec: *spec,
        real_count: nr,
        synthetic_count: ns,
        real_source_size: real.len(),
        synthetic_source_size: synthetic.len(),
        real_with_replacement: real_rep,
        synthetic_with_replacement: syn_rep,
        provenance,
    };
    Ok((LabeledPointCloud::new(points).with_note(note), meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::LabeledPoint;
    use crate::taxonomy::SemanticClass;

    fn cloud(n: usize, class: SemanticClass) -> LabeledPointCloud {
        (0..n)
            .map(|i| LabeledPoint::new(i as f64, 0.0, 0.0, class))
            .collect()
    }

    fn spec(f: f64, n: usize) -> RatioMix {
        RatioMix {
            real_fraction: f,
            target_count: n,
            seed: 3,
        }
    }

    #[test]
    fn rounding_half_up() {
        assert_eq!(spec(0.75, 10).real_count(), 8);
        assert_eq!(spec(0.5, 10_000).real_count(), 5000);
        assert_eq!(spec(0.25, 10).real_count(), 3);
        assert_eq!(spec(1.0, 7).real_count(), 7);
        assert_eq!(spec(0.0, 7).real_count(), 0);
    }

    #[test]
    fn counts_and_provenance() {
        let (r, s) = (
            cloud(100, SemanticClass::Door),
            cloud(100, SemanticClass::Window),
        );
        let (out, meta) = mix(&r, &s, &spec(0.75, 10)).unwrap();
        assert_eq!(out.class_counts()[&SemanticClass::Door], 8);
        assert_eq!(out.class_counts()[&SemanticClass::Window], 2);
        let mask = meta.provenance_mask();
        assert_eq!(mask.iter().filter(|p| **p == Provenance::Real).count(), 8);
        assert!(!meta.real_with_replacement);
    }

    #[test]
    fn all_real_ignores_empty_synthetic() {
        let (out, meta) = mix(
            &cloud(50, SemanticClass::Door),
            &LabeledPointCloud::default(),
            &spec(1.0, 20),
        )
        .unwrap();
        assert_eq!(out.len(), 20);
        assert_eq!(
            meta.provenance,
            vec![ProvenanceRun {
                source: Provenance::Real,
                start: 0,
                len: 20
            }]
        );
    }

    #[test]
    fn small_source_uses_replacement() {
        let (out, meta) = mix(
            &cloud(3, SemanticClass::Door),
            &cloud(3, SemanticClass::Window),
            &spec(0.5, 10),
        )
        .unwrap();
        assert_eq!(out.len(), 10);
        assert!(meta.real_with_replacement && meta.synthetic_with_replacement);
    }

    #[test]
    fn without_replacement_has_distinct_points() {
        let (out, _) = mix(
            &cloud(100, SemanticClass::Door),
            &cloud(100, SemanticClass::Window),
            &spec(0.5, 200),
        )
        .unwrap();
        let mut xs: Vec<(u8, i64)> = out
            .points
            .iter()
            .map(|p| (p.class.id(), p.pos.x as i64))
            .collect();
        xs.sort();
        xs.dedup();
        assert_eq!(xs.len(), 200);
    }

    #[test]
    fn seeded() {
        let (r, s) = (
            cloud(1000, SemanticClass::Door),
            cloud(1000, SemanticClass::Window),
        );
        assert_eq!(
            mix(&r, &s, &spec(0.5, 100)).unwrap(),
            mix(&r, &s, &spec(0.5, 100)).unwrap()
        );
        assert_ne!(
            mix(&r, &s, &spec(0.5, 100)).unwrap().0,
            mix(
                &r,
                &s,
                &RatioMix {
                    seed: 4,
                    ..spec(0.5, 100)
                }
            )
            .unwrap()
            .0
        );
    }

    #[test]
    fn errors() {
        let c = cloud(5, SemanticClass::Door);
        assert!(mix(&c, &c, &spec(0.5, 0)).is_err());
        assert!(mix(&c, &c, &spec(1.5, 10)).is_err());
        assert!(matches!(
            mix(&c, &LabeledPointCloud::default(), &spec(0.5, 10)),
            Err(Error::EmptyInput(_))
        ));
    }
}
