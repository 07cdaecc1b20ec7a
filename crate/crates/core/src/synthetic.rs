//! Seeded synthetic streams used by the examples, tests and experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::metric::Point;

/// Uniformly random unit vector.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Points at a uniformly random direction and a radius drawn uniformly from
/// `[0, 1]`; with probability `outlier_prob` a point is instead placed on the
/// sphere of radius `outlier_radius`. Arrivals run from 1.
pub fn ball_with_outliers(n: usize, dim: usize, outlier_radius: f64, outlier_prob: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=n as u64)
        .map(|t| {
            let dir = random_direction(&mut rng, dim);
            let r = if rng.random::<f64>() < outlier_prob {
                outlier_radius
            } else {
                rng.random::<f64>()
            };
            Point::new(t, dir.into_iter().map(|x| x * r).collect()).expect("finite")
        })
        .collect()
}

/// `clusters` Gaussian blobs with centers uniform in `[-spread, spread]^dim`
/// and unit standard deviation; each point picks a blob uniformly.
pub fn gaussian_blobs(n: usize, dim: usize, clusters: usize, spread: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..clusters.max(1))
        .map(|_| (0..dim).map(|_| rng.random_range(-spread..=spread)).collect())
        .collect();
    (1..=n as u64)
        .map(|t| {
            let c = &centers[rng.random_range(0..centers.len())];
            let coords = c
                .iter()
                .map(|&x| x + Distribution::<f64>::sample(&StandardNormal, &mut rng))
                .collect();
            Point::new(t, coords).expect("finite")
        })
        .collect()
}

/// Points uniform in `[0, side]^dim`.
pub fn uniform_cube(n: usize, dim: usize, side: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=n as u64)
        .map(|t| {
            let coords = (0..dim).map(|_| rng.random::<f64>() * side).collect();
            Point::new(t, coords).expect("finite")
        })
        .collect()
}

/// Points on an integer grid `{0, .., levels - 1}^dim`, so duplicates and
/// ties are frequent.
pub fn integer_grid(n: usize, dim: usize, levels: u32, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=n as u64)
        .map(|t| {
            let coords = (0..dim).map(|_| rng.random_range(0..levels.max(1)) as f64).collect();
            Point::new(t, coords).expect("finite")
        })
        .collect()
}
