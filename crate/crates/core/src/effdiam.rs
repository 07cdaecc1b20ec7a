//! Alpha-effective diameter of the window: the smallest distance `d` such
//! that at least `alpha |W|^2` ordered pairs (self-pairs included) are within
//! `d`. The streaming sketch runs the `k = 1, z = 0` ladder with a second,
//! much finer layer of attraction points; the fine proxies of the selected
//! guess, weighted by their histograms, sandwich the true value.
//!
//! Precision of the fine layer: with `delta = eps * eta / (2 (1 + beta))`
//! and attraction threshold `delta * gamma / 2`, every window point is within
//! `delta * gamma_hat <= delta * 2 (1 + beta) r*_1 <= eps * eta * Delta_W / 2`
//! of its proxy, which is at most `eps / 2` times the effective diameter
//! whenever that is at least `eta` times the full diameter.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::coreset::{GuessLadder, LadderMode, LayerPolicy, LayerSpec, SearchStrategy, WeightedPoint};
use crate::error::{Error, Result};
use crate::metric::{Euclidean, Metric, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffDiameterConfig {
    pub window_len: u64,
    pub alpha: f64,
    pub epsilon: f64,
    /// Assumed lower bound on effective diameter / diameter.
    pub eta: f64,
    pub lambda: f64,
    pub beta: f64,
    /// Bound on attraction points and on orphans of every fine layer.
    pub fine_cap: usize,
    pub mode: LadderMode,
}

impl EffDiameterConfig {
    pub fn new(window_len: u64, alpha: f64, epsilon: f64, eta: f64) -> Self {
        Self {
            window_len,
            alpha,
            epsilon,
            eta,
            lambda: 0.5,
            beta: 0.5,
            fine_cap: 4096,
            mode: LadderMode::Oblivious,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad("eta must lie in (0, 1]");
        }
        if self.fine_cap == 0 {
            return bad("fine_cap must be positive");
        }
        if self.window_len < 2 {
            return bad("window length must be at least 2");
        }
        Ok(())
    }

    /// Precision of the fine layer.
    pub fn fine_delta(&self) -> f64 {
        self.epsilon * self.eta / (2.0 * (1.0 + self.beta))
    }

    fn layers(&self) -> Vec<LayerSpec> {
        vec![
            LayerSpec::validation(1),
            LayerSpec {
                radius_factor: self.fine_delta() / 2.0,
                cap: self.fine_cap,
                policy: LayerPolicy::Fine,
            },
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffDiameterEstimate {
    /// `raw_lower / (1 + eps)`.
    pub lower: f64,
    /// `raw_upper / (1 - eps)`, infinite when `eps >= 1`.
    pub upper: f64,
    /// Coreset effective diameter at `alpha / (1 + lambda)^2`.
    pub raw_lower: f64,
    /// Coreset effective diameter at `alpha`; the value usually reported.
    pub raw_upper: f64,
    pub coreset_size: usize,
    pub gamma_hat: f64,
    /// The coreset weights never reached the pair threshold.
    pub threshold_saturated: bool,
    /// The fine layer of the selected guess has dropped proxies of points
    /// still in the window (cap overflow or partial reconstruction).
    pub fine_saturated: bool,
}

impl EffDiameterEstimate {
    pub fn saturated(&self) -> bool {
        self.threshold_saturated || self.fine_saturated
    }
}

/// Streaming effective-diameter estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffDiameterSketch<M = Euclidean> {
    config: EffDiameterConfig,
    ladder: GuessLadder<M>,
}

impl EffDiameterSketch<Euclidean> {
    pub fn new(config: EffDiameterConfig) -> Result<Self> {
        Self::with_metric(config, Euclidean)
    }
}

impl<M: Metric> EffDiameterSketch<M> {
    pub fn with_metric(config: EffDiameterConfig, metric: M) -> Result<Self> {
        config.validate()?;
        let ladder = GuessLadder::new(
            config.window_len,
            config.lambda,
            config.beta,
            config.layers(),
            config.mode,
            metric,
        )?;
        Ok(Self { config, ladder })
    }

    pub fn config(&self) -> &EffDiameterConfig {
        &self.config
    }

    pub fn ladder(&self) -> &GuessLadder<M> {
        &self.ladder
    }

    pub fn update(&mut self, p: &Point) -> Result<()> {
        self.ladder.update(p)
    }

    pub fn memory_floats(&self) -> usize {
        self.ladder.memory_floats()
    }

    /// The fine coreset of the guess selected by the validation layer.
    pub fn fine_coreset(&self) -> Result<(Vec<WeightedPoint>, f64, bool)> {
        let c = self.ladder.extract_layer(SearchStrategy::Linear, 1)?;
        let incomplete = match c.exponent {
            Some(e) => !self.ladder.slot(e).expect("selected guess exists")[1]
                .coverage_complete(self.ladder.t(), self.config.window_len),
            None => false,
        };
        Ok((c.points, c.gamma_hat, incomplete))
    }

    pub fn estimate(&self) -> Result<EffDiameterEstimate> {
        let (points, gamma_hat, fine_saturated) = self.fine_coreset()?;
        let n = self.ladder.window_size();
        let cfg = &self.config;
        let (raw_upper, sat_hi) = coreset_effective_diameter_with(self.ladder.metric(), &points, cfg.alpha, n);
        let shrunk = cfg.alpha / (1.0 + cfg.lambda).powi(2);
        let (raw_lower, sat_lo) = coreset_effective_diameter_with(self.ladder.metric(), &points, shrunk, n);
        let upper = if cfg.epsilon < 1.0 {
            raw_upper / (1.0 - cfg.epsilon)
        } else {
            f64::INFINITY
        };
        Ok(EffDiameterEstimate {
            lower: raw_lower / (1.0 + cfg.epsilon),
            upper,
            raw_lower,
            raw_upper,
            coreset_size: points.len(),
            gamma_hat,
            threshold_saturated: sat_hi || sat_lo,
            fine_saturated,
        })
    }
}

/// `ceil(alpha n^2)`, shielded from float noise just above an integer.
fn pair_threshold(alpha: f64, n: usize) -> u128 {
    let x = alpha * (n as f64) * (n as f64);
    let m = (x - 1e-9 * x.max(1.0)).ceil().max(1.0);
    m as u128
}

fn unordered_distances<M: Metric>(metric: &M, window: &[Point]) -> Vec<f64> {
    let mut d = Vec::with_capacity(window.len() * window.len().saturating_sub(1) / 2);
    for (i, a) in window.iter().enumerate() {
        for b in &window[i + 1..] {
            d.push(metric.between(a, b));
        }
    }
    d
}

/// Exact effective diameter of a window by pair enumeration.
pub fn exact_effective_diameter(window: &[Point], alpha: f64) -> Result<f64> {
    exact_effective_diameter_with(&Euclidean, window, alpha)
}

pub fn exact_effective_diameter_with<M: Metric>(metric: &M, window: &[Point], alpha: f64) -> Result<f64> {
    let n = window.len();
    if n == 0 {
        return Err(Error::InvalidParams("empty window".into()));
    }
    let m = pair_threshold(alpha, n).min((n * n) as u128);
    if m <= n as u128 {
        return Ok(0.0);
    }
    // the n self-pairs come first; unordered pairs count twice
    let idx = (m - n as u128).div_ceil(2) as usize - 1;
    let mut d = unordered_distances(metric, window);
    let (_, v, _) = d.select_nth_unstable_by(idx, f64::total_cmp);
    Ok(*v)
}

/// Effective diameter of a weighted coreset relative to a window of
/// `window_size` points. Returns the value and whether the threshold was
/// out of reach (in which case the largest coreset distance is returned).
pub fn coreset_effective_diameter(points: &[WeightedPoint], alpha: f64, window_size: u64) -> (f64, bool) {
    coreset_effective_diameter_with(&Euclidean, points, alpha, window_size)
}

pub fn coreset_effective_diameter_with<M: Metric>(
    metric: &M,
    points: &[WeightedPoint],
    alpha: f64,
    window_size: u64,
) -> (f64, bool) {
    let need = alpha * (window_size as f64) * (window_size as f64);
    let mut cum: f64 = points.iter().map(|p| (p.weight as f64).powi(2)).sum();
    let mut pairs = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            pairs.push((metric.between(&a.point, &b.point), 2.0 * a.weight as f64 * b.weight as f64));
        }
    }
    if cum >= need {
        return (0.0, false);
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(d, w) in &pairs {
        cum += w;
        if cum >= need {
            return (d, false);
        }
    }
    (pairs.last().map_or(0.0, |p| p.0), true)
}

/// Bucketed sequential baseline: distances are counted in geometric buckets
/// `[d_min (1 + step)^i, d_min (1 + step)^(i + 1))` from the smallest positive
/// distance; returns the upper edge of the bucket where the cumulative pair
/// count reaches `ceil(alpha |W|^2)`, so the result is within a factor
/// `1 + step` above the exact value.
pub fn eff_sequential(window: &[Point], alpha: f64, step: f64) -> Result<f64> {
    eff_sequential_with(&Euclidean, window, alpha, step)
}

pub fn eff_sequential_with<M: Metric>(metric: &M, window: &[Point], alpha: f64, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidParams("bucket step must be positive".into()));
    }
    let n = window.len();
    if n == 0 {
        return Err(Error::InvalidParams("empty window".into()));
    }
    let m = pair_threshold(alpha, n).min((n * n) as u128);
    let d = unordered_distances(metric, window);
    let zero = d.iter().filter(|&&x| x == 0.0).count() as u128;
    let mut cum = n as u128 + 2 * zero;
    if cum >= m {
        return Ok(0.0);
    }
    let d_min = d.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
    let base = 1.0 + step;
    let edge = |i: i64| d_min * base.powi(i as i32);
    let mut buckets: BTreeMap<i64, u128> = BTreeMap::new();
    for &x in d.iter().filter(|&&x| x > 0.0) {
        let mut i = ((x / d_min).ln() / base.ln()).floor() as i64;
        while i > 0 && edge(i) > x {
            i -= 1;
        }
        while edge(i + 1) <= x {
            i += 1;
        }
        *buckets.entry(i).or_default() += 2;
    }
    for (i, c) in buckets {
        cum += c;
        if cum >= m {
            return Ok(edge(i + 1));
        }
    }
    unreachable!("every pair lands in a bucket")
}
