//! Synthetic 2-D datasets inside the open unit square.
//!
//! Generation is deterministic in [`SyntheticSpec::seed`]; see [`crate::rng`]
//! for the exact random-number recipe. A candidate point that falls outside
//! `(0,1)^2` is discarded and redrawn, so every shape is truncated to the
//! square rather than clipped onto its border.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::DataSet;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Redraws allowed per point before a spec is declared infeasible.
const MAX_REDRAWS: usize = 10_000;

/// Centre of the dense pair in [`Shape::MultiScaleGaussians`] (x coordinate).
pub const MULTI_SCALE_DENSE_X: f64 = 0.25;
/// Centre of the sparse cluster in [`Shape::MultiScaleGaussians`].
pub const MULTI_SCALE_SPARSE_CENTER: (f64, f64) = (0.68, 0.5);
/// Centre of the rings in [`Shape::RingsWithNoise`].
pub const RING_CENTER: (f64, f64) = (0.5, 0.5);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Two interleaved half circles of radius `radius`.
    ///
    /// The upper arc is centred at `(a, b)`, the lower one at
    /// `(a + radius, b + radius - separation)`, so the tips of each arc sit
    /// `separation` away from the other arc. The pair is centred in the unit
    /// square. Angles are stratified (one uniform draw per equal-width slot)
    /// and each coordinate gets Gaussian jitter of std `jitter`.
    ///
    /// With `jitter <= 0.01`, at least 25 points per arc and
    /// `separation >= 0.2` the ground-truth labelling is consistent under the
    /// Euclidean metric.
    TwoMoon {
        radius: f64,
        separation: f64,
        jitter: f64,
    },
    /// Two small dense Gaussians stacked vertically at x = 0.25 with centres
    /// `dense_gap` apart, plus one wide Gaussian centred at (0.68, 0.5).
    /// Clusters 0 and 1 are dense, cluster 2 sparse.
    MultiScaleGaussians {
        dense_std: f64,
        sparse_std: f64,
        dense_gap: f64,
    },
    /// Concentric rings around (0.5, 0.5), one cluster per radius (radius 0
    /// gives a Gaussian blob). Angles are stratified as for `TwoMoon`.
    RingsWithNoise { radii: Vec<f64>, jitter: f64 },
    /// Isotropic Gaussians with explicit centres and standard deviations.
    GaussianMixture {
        centers: Vec<(f64, f64)>,
        std_devs: Vec<f64>,
    },
}

/// Parameters for [`generate`].
///
/// `noise_count` points drawn uniformly from the square are appended as one
/// extra cluster labelled `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub shape: Shape,
    pub samples_per_cluster: Vec<usize>,
    pub noise_count: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Two moons with radius 0.25, separation 0.2, jitter 0.01.
    pub fn two_moon(per_moon: usize, seed: u64) -> Self {
        Self {
            shape: Shape::TwoMoon {
                radius: 0.25,
                separation: 0.2,
                jitter: 0.01,
            },
            samples_per_cluster: vec![per_moon; 2],
            noise_count: 0,
            seed,
        }
    }

    /// Dense pair of 50 points each (std 0.012, centres 0.1 apart) next to a
    /// sparse cluster of 100 points (std 0.07).
    pub fn multi_scale(seed: u64) -> Self {
        Self {
            shape: Shape::MultiScaleGaussians {
                dense_std: 0.012,
                sparse_std: 0.07,
                dense_gap: 0.1,
            },
            samples_per_cluster: vec![50, 50, 100],
            noise_count: 0,
            seed,
        }
    }

    /// Two rings of radius 0.12 and 0.35 with jitter 0.01.
    pub fn rings(per_ring: usize, noise_count: usize, seed: u64) -> Self {
        Self {
            shape: Shape::RingsWithNoise {
                radii: vec![0.12, 0.35],
                jitter: 0.01,
            },
            samples_per_cluster: vec![per_ring; 2],
            noise_count,
            seed,
        }
    }

    pub fn gaussian_mixture(
        centers: Vec<(f64, f64)>,
        std_devs: Vec<f64>,
        samples_per_cluster: Vec<usize>,
        seed: u64,
    ) -> Self {
        Self {
            shape: Shape::GaussianMixture { centers, std_devs },
            samples_per_cluster,
            noise_count: 0,
            seed,
        }
    }

    /// Total number of points the spec produces.
    pub fn total(&self) -> usize {
        self.samples_per_cluster.iter().sum::<usize>() + self.noise_count
    }

    /// Same spec with cluster sizes rescaled to reach roughly `n` points.
    pub fn scaled_to(&self, n: usize) -> Self {
        let base: usize = self.samples_per_cluster.iter().sum();
        let mut spec = self.clone();
        let k = spec.samples_per_cluster.len();
        let noise = if self.total() == 0 {
            0
        } else {
            self.noise_count * n / self.total()
        };
        let budget = n.saturating_sub(noise).max(k);
        let mut assigned = 0;
        for (i, s) in spec.samples_per_cluster.iter_mut().enumerate() {
            *s = if i + 1 == k {
                budget - assigned
            } else {
                (*s * budget / base.max(1)).max(1)
            };
            assigned += *s;
        }
        spec.noise_count = noise;
        spec
    }

    fn validate(&self) -> Result<()> {
        let k = self.samples_per_cluster.len();
        if k == 0 {
            return Err(Error::InvalidSpec("no clusters requested".into()));
        }
        if let Some(i) = self.samples_per_cluster.iter().position(|&s| s < 1) {
            return Err(Error::InvalidSpec(format!("cluster {i} has no samples")));
        }
        let expect = |want: usize, what: &str| {
            if k == want {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "{what} needs {want} cluster sizes, got {k}"
                )))
            }
        };
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "{what} must be finite and >= 0"
                )))
            }
        };
        match &self.shape {
            Shape::TwoMoon {
                radius,
                separation,
                jitter,
            } => {
                expect(2, "two-moon")?;
                positive(*radius, "radius")?;
                positive(*separation, "separation")?;
                positive(*jitter, "jitter")?;
                if 3.0 * radius >= 1.0 || radius + separation >= 1.0 {
                    return Err(Error::InvalidSpec(
                        "two-moon does not fit the unit square".into(),
                    ));
                }
            }
            Shape::MultiScaleGaussians {
                dense_std,
                sparse_std,
                dense_gap,
            } => {
                expect(3, "multi-scale")?;
                positive(*dense_std, "dense_std")?;
                positive(*sparse_std, "sparse_std")?;
                positive(*dense_gap, "dense_gap")?;
            }
            Shape::RingsWithNoise { radii, jitter } => {
                expect(radii.len(), "rings")?;
                positive(*jitter, "jitter")?;
                for &r in radii {
                    positive(r, "radius")?;
                    if r >= 0.5 {
                        return Err(Error::InvalidSpec(format!(
                            "ring radius {r} leaves the unit square"
                        )));
                    }
                }
            }
            Shape::GaussianMixture { centers, std_devs } => {
                expect(centers.len(), "gaussian mixture")?;
                if std_devs.len() != k {
                    return Err(Error::InvalidSpec("one std dev per centre required".into()));
                }
                for &(x, y) in centers {
                    if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
                        return Err(Error::InvalidSpec(format!(
                            "centre ({x}, {y}) outside the unit square"
                        )));
                    }
                }
                for &s in std_devs {
                    positive(s, "std dev")?;
                }
            }
        }
        Ok(())
    }
}

fn inside(p: (f64, f64)) -> bool {
    p.0 > 0.0 && p.0 < 1.0 && p.1 > 0.0 && p.1 < 1.0
}

fn draw(
    rng: &mut SeededRng,
    mut sample: impl FnMut(&mut SeededRng) -> (f64, f64),
) -> Result<(f64, f64)> {
    for _ in 0..MAX_REDRAWS {
        let p = sample(rng);
        if inside(p) {
            return Ok(p);
        }
    }
    Err(Error::InvalidSpec(
        "could not place a point inside the unit square; shrink the spread".into(),
    ))
}

/// Generates a labelled dataset from `spec`.
pub fn generate(spec: &SyntheticSpec) -> Result<DataSet> {
    spec.validate()?;
    let mut rng = SeededRng::new(spec.seed);
    let mut coords = Vec::with_capacity(spec.total() * 2);
    let mut labels = Vec::with_capacity(spec.total());
    let mut push = |p: (f64, f64), label: usize| {
        coords.push(p.0);
        coords.push(p.1);
        labels.push(label);
    };

    match &spec.shape {
        Shape::TwoMoon {
            radius,
            separation,
            jitter,
        } => {
            let r = *radius;
            let upper = (0.5 - 0.5 * r, 0.5 - 0.5 * (r - separation));
            let lower = (upper.0 + r, upper.1 + r - separation);
            for (label, &count) in spec.samples_per_cluster.iter().enumerate() {
                let (center, sign) = if label == 0 {
                    (upper, 1.0)
                } else {
                    (lower, -1.0)
                };
                for i in 0..count {
                    let p = draw(&mut rng, |rng| {
                        let t = std::f64::consts::PI * (i as f64 + rng.uniform()) / count as f64;
                        (
                            center.0 + sign * r * t.cos() + rng.normal(0.0, *jitter),
                            center.1 + sign * r * t.sin() + rng.normal(0.0, *jitter),
                        )
                    })?;
                    push(p, label);
                }
            }
        }
        Shape::MultiScaleGaussians {
            dense_std,
            sparse_std,
            dense_gap,
        } => {
            let centers = [
                (MULTI_SCALE_DENSE_X, 0.5 + 0.5 * dense_gap),
                (MULTI_SCALE_DENSE_X, 0.5 - 0.5 * dense_gap),
                MULTI_SCALE_SPARSE_CENTER,
            ];
            let stds = [*dense_std, *dense_std, *sparse_std];
            for (label, &count) in spec.samples_per_cluster.iter().enumerate() {
                for _ in 0..count {
                    let p = draw(&mut rng, |rng| {
                        (
                            rng.normal(centers[label].0, stds[label]),
                            rng.normal(centers[label].1, stds[label]),
                        )
                    })?;
                    push(p, label);
                }
            }
        }
        Shape::RingsWithNoise { radii, jitter } => {
            for (label, &count) in spec.samples_per_cluster.iter().enumerate() {
                let r = radii[label];
                for i in 0..count {
                    let p = draw(&mut rng, |rng| {
                        let t = std::f64::consts::TAU * (i as f64 + rng.uniform()) / count as f64;
                        (
                            RING_CENTER.0 + r * t.cos() + rng.normal(0.0, *jitter),
                            RING_CENTER.1 + r * t.sin() + rng.normal(0.0, *jitter),
                        )
                    })?;
                    push(p, label);
                }
            }
        }
        Shape::GaussianMixture { centers, std_devs } => {
            for (label, &count) in spec.samples_per_cluster.iter().enumerate() {
                let (cx, cy) = centers[label];
                for _ in 0..count {
                    let p = draw(&mut rng, |rng| {
                        (
                            rng.normal(cx, std_devs[label]),
                            rng.normal(cy, std_devs[label]),
                        )
                    })?;
                    push(p, label);
                }
            }
        }
    }

    let noise_label = spec.samples_per_cluster.len();
    for _ in 0..spec.noise_count {
        let p = draw(&mut rng, |rng| (rng.uniform(), rng.uniform()))?;
        push(p, noise_label);
    }

    let n = labels.len();
    let points = Array2::from_shape_vec((n, 2), coords).expect("two coordinates per point");
    let name = match spec.shape {
        Shape::TwoMoon { .. } => "two_moon",
        Shape::MultiScaleGaussians { .. } => "multi_scale",
        Shape::RingsWithNoise { .. } => "rings",
        Shape::GaussianMixture { .. } => "gaussian_mixture",
    };
    DataSet::new(format!("{name}-{}", spec.seed), points, Some(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_specs() -> Vec<SyntheticSpec> {
        vec![
            SyntheticSpec::two_moon(25, 7),
            SyntheticSpec::multi_scale(3),
            SyntheticSpec::rings(80, 40, 5),
            SyntheticSpec::gaussian_mixture(
                vec![(0.2, 0.2), (0.8, 0.3), (0.5, 0.8)],
                vec![0.08, 0.08, 0.08],
                vec![67, 67, 66],
                11,
            ),
        ]
    }

    #[test]
    fn two_moon_fifty_points() {
        let ds = generate(&SyntheticSpec::two_moon(25, 7)).unwrap();
        assert_eq!(ds.n(), 50);
        assert_eq!(ds.num_classes(), Some(2));
    }

    #[test]
    fn gaussian_mixture_two_hundred_points() {
        let ds = generate(&all_specs()[3]).unwrap();
        assert_eq!(ds.n(), 200);
        assert_eq!(ds.num_classes(), Some(3));
    }

    #[test]
    fn deterministic_and_inside_unit_square() {
        for spec in all_specs() {
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(a, b);
            assert!(a.points().iter().all(|&v| v > 0.0 && v < 1.0));
        }
    }

    #[test]
    fn noise_gets_its_own_label() {
        let ds = generate(&SyntheticSpec::rings(30, 10, 1)).unwrap();
        assert_eq!(ds.n(), 70);
        assert_eq!(ds.num_classes(), Some(3));
        assert!(ds.labels().unwrap()[60..].iter().all(|&l| l == 2));
    }

    #[test]
    fn empty_cluster_is_invalid() {
        let mut spec = SyntheticSpec::two_moon(25, 1);
        spec.samples_per_cluster = vec![25, 0];
        assert!(matches!(generate(&spec), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn wrong_cluster_count_is_invalid() {
        let mut spec = SyntheticSpec::two_moon(25, 1);
        spec.samples_per_cluster = vec![25, 25, 25];
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn different_seeds_differ() {
        let a = generate(&SyntheticSpec::two_moon(25, 1)).unwrap();
        let b = generate(&SyntheticSpec::two_moon(25, 2)).unwrap();
        assert_ne!(a.points(), b.points());
    }

    #[test]
    fn scaled_spec_hits_requested_size() {
        let spec = SyntheticSpec::multi_scale(1).scaled_to(1000);
        assert_eq!(spec.total(), 1000);
        assert_eq!(generate(&spec).unwrap().n(), 1000);
    }
}
