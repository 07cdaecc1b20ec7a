//! Points, distances, windows and the parameter bundle shared by the engine.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A stream element: 1-based arrival index plus coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    arrival: u64,
    coords: Vec<f64>,
}

impl Point {
    /// Builds a point, rejecting NaN and infinite coordinates.
    pub fn new(arrival: u64, coords: Vec<f64>) -> Result<Self> {
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { arrival, coords })
    }

    pub fn arrival(&self) -> u64 {
        self.arrival
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Same coordinates, different arrival index.
    pub fn with_arrival(&self, arrival: u64) -> Self {
        Self {
            arrival,
            coords: self.coords.clone(),
        }
    }

    /// A point is active at time `t` iff it arrived within the last `window_len` steps.
    pub fn is_active(&self, t: u64, window_len: u64) -> bool {
        self.arrival + window_len > t
    }
}

/// A distance function over coordinate slices.
///
/// Implementations must be a metric: non-negative, symmetric, zero exactly on
/// equal inputs and satisfy the triangle inequality. Callers guarantee equal
/// slice lengths.
pub trait Metric: Clone + Send + Sync {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64;

    fn between(&self, p: &Point, q: &Point) -> f64 {
        self.distance(p.coords(), q.coords())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Euclidean;

impl Metric for Euclidean {
    #[inline]
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// Euclidean distance with a dimension check.
pub fn dist(p: &Point, q: &Point) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(Euclidean.between(p, q))
}

/// Distance from `p` to the closest point of `centers` (infinity if empty).
pub fn dist_to_set<M: Metric>(metric: &M, p: &Point, centers: &[Point]) -> f64 {
    centers
        .iter()
        .map(|c| metric.between(p, c))
        .fold(f64::INFINITY, f64::min)
}

/// Clustering radius of `window` w.r.t. `centers` after discarding the `z`
/// largest point-to-center distances. With `z = 0` this is the plain radius.
pub fn radius_excluding(centers: &[Point], window: &[Point], z: usize) -> Result<f64> {
    radius_excluding_with(&Euclidean, centers, window, z)
}

pub fn radius_excluding_with<M: Metric>(
    metric: &M,
    centers: &[Point],
    window: &[Point],
    z: usize,
) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    if window.len() <= z {
        return Err(Error::WindowTooSmall {
            needed: z,
            have: window.len(),
        });
    }
    let mut d: Vec<f64> = window
        .iter()
        .map(|p| dist_to_set(metric, p, centers))
        .collect();
    // the (z+1)-th largest distance
    let idx = d.len() - 1 - z;
    let (_, kth, _) = d.select_nth_unstable_by(idx, f64::total_cmp);
    Ok(*kth)
}

/// Window length, number of centers, outlier budget and the two accuracy knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamParams {
    pub window_len: u64,
    pub k: usize,
    pub z: usize,
    /// Histogram slack; `0` keeps exact histograms.
    pub lambda: f64,
    /// Ratio of the guess ladder minus one, in `(0, 1]`.
    pub beta: f64,
}

impl StreamParams {
    pub fn new(window_len: u64, k: usize, z: usize, lambda: f64, beta: f64) -> Result<Self> {
        let p = Self {
            window_len,
            k,
            z,
            lambda,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParams("k must be positive".into()));
        }
        if (self.k + self.z + 1) as u64 > self.window_len {
            return Err(Error::InvalidParams(format!(
                "k + z + 1 = {} exceeds window length {}",
                self.k + self.z + 1,
                self.window_len
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParams("lambda must be finite and >= 0".into()));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidParams("beta must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// The exact last-`N` window, used by the baselines and by test oracles.
#[derive(Debug, Clone)]
pub struct ExactWindow {
    window_len: u64,
    t: u64,
    points: VecDeque<Point>,
}

impl ExactWindow {
    pub fn new(window_len: u64) -> Self {
        Self {
            window_len,
            t: 0,
            points: VecDeque::new(),
        }
    }

    pub fn push(&mut self, p: Point) -> Result<()> {
        if p.arrival() <= self.t {
            return Err(Error::OutOfOrder {
                last: self.t,
                got: p.arrival(),
            });
        }
        if let Some(first) = self.points.front() {
            if first.dim() != p.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: p.dim(),
                });
            }
        }
        self.t = p.arrival();
        self.points.push_back(p);
        while let Some(front) = self.points.front() {
            if front.is_active(self.t, self.window_len) {
                break;
            }
            self.points.pop_front();
        }
        Ok(())
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> {
        self.points.iter()
    }

    pub fn as_slice(&mut self) -> &[Point] {
        self.points.make_contiguous()
    }

    pub fn to_vec(&self) -> Vec<Point> {
        self.points.iter().cloned().collect()
    }
}
