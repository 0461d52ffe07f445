use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    /// Eight isotropic Gaussians evenly spaced on a circle.
    GaussianMixture8,
    /// Uniform on the dark squares of a 4×4 board.
    Checkerboard,
    TwoMoons,
}

/// A normalized 2D point cloud: zero mean and unit per-axis variance.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset2D {
    pub points: Vec<Point>,
    pub kind: DatasetKind,
    pub seed: u64,
}

fn raw_point(kind: DatasetKind, rng: &mut ChaCha8Rng) -> Point {
    match kind {
        DatasetKind::GaussianMixture8 => {
            let k = rng.random_range(0..8) as f64;
            let angle = 2.0 * PI * k / 8.0;
            let nx: f64 = rng.sample(StandardNormal);
            let ny: f64 = rng.sample(StandardNormal);
            [2.0 * angle.cos() + 0.1 * nx, 2.0 * angle.sin() + 0.1 * ny]
        }
        DatasetKind::Checkerboard => loop {
            let x: f64 = rng.random_range(-2.0..2.0);
            let y: f64 = rng.random_range(-2.0..2.0);
            if (x.floor() as i64 + y.floor() as i64).rem_euclid(2) == 0 {
                break [x, y];
            }
        },
        DatasetKind::TwoMoons => {
            let angle = rng.random_range(0.0..PI);
            let nx: f64 = rng.sample(StandardNormal);
            let ny: f64 = rng.sample(StandardNormal);
            let (x, y) = if rng.random_bool(0.5) {
                (angle.cos(), angle.sin())
            } else {
                (1.0 - angle.cos(), 0.5 - angle.sin())
            };
            [x + 0.05 * nx, y + 0.05 * ny]
        }
    }
}

/// Centers to zero mean; rescales each axis to unit variance when `n >= 2`
/// and the axis is not constant.
fn normalize(points: &mut [Point]) {
    let n = points.len() as f64;
    for axis in 0..2 {
        let mean = points.iter().map(|p| p[axis]).sum::<f64>() / n;
        points.iter_mut().for_each(|p| p[axis] -= mean);
        if points.len() >= 2 {
            let var = points.iter().map(|p| p[axis] * p[axis]).sum::<f64>() / n;
            if var > 0.0 {
                let inv = 1.0 / var.sqrt();
                points.iter_mut().for_each(|p| p[axis] *= inv);
            }
        }
    }
}

/// Generates `n` normalized points. Deterministic in `(kind, n, seed)`.
pub fn make_dataset(kind: DatasetKind, n: usize, seed: u64) -> Result<Dataset2D> {
    if n == 0 {
        return Err(Error::domain("dataset size must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Point> = (0..n).map(|_| raw_point(kind, &mut rng)).collect();
    normalize(&mut points);
    Ok(Dataset2D { points, kind, seed })
}

impl Dataset2D {
    /// Splits off the last `n_holdout` points as a held-out reference set.
    pub fn split_holdout(mut self, n_holdout: usize) -> Result<(Dataset2D, Vec<Point>)> {
        if n_holdout >= self.points.len() {
            return Err(Error::domain(format!(
                "holdout {n_holdout} leaves no training points out of {}",
                self.points.len()
            )));
        }
        let held = self.points.split_off(self.points.len() - n_holdout);
        Ok((self, held))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(points: &[Point]) -> ([f64; 2], [f64; 2]) {
        let n = points.len() as f64;
        let mut mean = [0.0; 2];
        let mut var = [0.0; 2];
        for a in 0..2 {
            mean[a] = points.iter().map(|p| p[a]).sum::<f64>() / n;
            var[a] = points.iter().map(|p| (p[a] - mean[a]).powi(2)).sum::<f64>() / n;
        }
        (mean, var)
    }

    #[test]
    fn normalized_and_deterministic() {
        for kind in [DatasetKind::GaussianMixture8, DatasetKind::Checkerboard, DatasetKind::TwoMoons] {
            let d = make_dataset(kind, 4096, 7).unwrap();
            assert_eq!(d.len(), 4096);
            let (mean, var) = moments(&d.points);
            for a in 0..2 {
                assert!(mean[a].abs() < 0.05);
                assert!((var[a] - 1.0).abs() < 1e-12);
            }
            assert!(d.points.iter().all(|p| p[0].is_finite() && p[1].is_finite()));
            assert_eq!(make_dataset(kind, 4096, 7).unwrap(), d);
            assert_ne!(make_dataset(kind, 4096, 8).unwrap().points, d.points);
        }
    }

    #[test]
    fn single_point_is_centered_only() {
        let d = make_dataset(DatasetKind::Checkerboard, 1, 0).unwrap();
        assert_eq!(d.points, vec![[0.0, 0.0]]);
    }

    #[test]
    fn empty_rejected() {
        assert!(make_dataset(DatasetKind::TwoMoons, 0, 1).is_err());
    }

    #[test]
    fn mixture_has_eight_modes() {
        let d = make_dataset(DatasetKind::GaussianMixture8, 2000, 3).unwrap();
        let mut seen = [false; 8];
        for p in &d.points {
            let k = ((p[1].atan2(p[0]) / (2.0 * PI) * 8.0).round() as i64).rem_euclid(8);
            seen[k as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn holdout_split() {
        let d = make_dataset(DatasetKind::TwoMoons, 100, 1).unwrap();
        let (train, held) = d.clone().split_holdout(30).unwrap();
        assert_eq!(train.len(), 70);
        assert_eq!(held.len(), 30);
        assert_eq!(held[0], d.points[70]);
        assert!(d.split_holdout(100).is_err());
    }
}
