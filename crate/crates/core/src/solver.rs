//! Weighted outliers clustering on a coreset, the end-to-end query, the
//! sequential baselines and an exhaustive oracle for small windows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coreset::{CoresetLadder, SearchStrategy, WeightedPoint};
use crate::error::{Error, Result};
use crate::metric::{dist_to_set, radius_excluding_with, Euclidean, Metric, Point};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub centers: Vec<Point>,
    /// Weight left uncovered at `rho_min` (approximate weights for coresets,
    /// point counts for the baselines).
    pub uncovered_weight: u64,
    pub rho_min: f64,
    /// `radius_excluding(centers, window, z)` when a window was supplied.
    pub achieved_radius: Option<f64>,
    pub coreset_size: usize,
    pub gamma_hat: Option<f64>,
}

/// Result of one `outliers_cluster` run: indices into the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub centers: Vec<usize>,
    pub uncovered: Vec<usize>,
    pub uncovered_weight: u64,
}

/// Greedy weighted cover. Each round picks, among `candidates()`, the point
/// whose `(1 + 2 eps) rho` ball holds the most uncovered weight (first one on
/// ties), then marks everything within `(3 + 4 eps) rho` of it as covered.
fn greedy_cover<D, W, C>(n: usize, dist: D, weight: W, k: usize, rho: f64, eps: f64, mut candidates: C) -> Clustering
where
    D: Fn(usize, usize) -> f64,
    W: Fn(usize) -> u64,
    C: FnMut() -> Vec<usize>,
{
    let inner = (1.0 + 2.0 * eps) * rho;
    let outer = (3.0 + 4.0 * eps) * rho;
    let mut uncovered = vec![true; n];
    let mut remaining = n;
    let mut centers = Vec::with_capacity(k);
    while centers.len() < k && remaining > 0 {
        let mut best: Option<(usize, u64)> = None;
        for r in candidates() {
            let ball: u64 = (0..n)
                .filter(|&v| uncovered[v] && dist(v, r) <= inner)
                .map(&weight)
                .sum();
            if best.is_none_or(|(_, w)| ball > w) {
                best = Some((r, ball));
            }
        }
        let Some((x, _)) = best else { break };
        centers.push(x);
        for v in 0..n {
            if uncovered[v] && dist(v, x) <= outer {
                uncovered[v] = false;
                remaining -= 1;
            }
        }
    }
    let uncovered: Vec<usize> = (0..n).filter(|&v| uncovered[v]).collect();
    let uncovered_weight = uncovered.iter().map(|&v| weight(v)).sum();
    Clustering {
        centers,
        uncovered,
        uncovered_weight,
    }
}

/// Weighted outliers clustering on a coreset with at most `k` centers.
pub fn outliers_cluster(points: &[WeightedPoint], k: usize, rho: f64, eps: f64) -> Clustering {
    outliers_cluster_with(&Euclidean, points, k, rho, eps)
}

pub fn outliers_cluster_with<M: Metric>(
    metric: &M,
    points: &[WeightedPoint],
    k: usize,
    rho: f64,
    eps: f64,
) -> Clustering {
    let n = points.len();
    let all: Vec<usize> = (0..n).collect();
    greedy_cover(
        n,
        |a, b| metric.between(&points[a].point, &points[b].point),
        |i| points[i].weight,
        k,
        rho,
        eps,
        || all.clone(),
    )
}

/// `0`, then `rho_0 * step^i` for `i = 0, 1, ...` until the value passes
/// `ceiling` (the first value at or above `ceiling` is included). The leading
/// zero catches windows made of at most `k` distinct locations plus `z` others.
fn geometric_grid(rho_0: f64, step: f64, ceiling: f64) -> Vec<f64> {
    let mut grid = vec![0.0, rho_0];
    let mut i = 1;
    while *grid.last().unwrap() < ceiling {
        grid.push(rho_0 * step.powi(i));
        i += 1;
    }
    grid
}

/// Index of the first grid value for which `ok` holds, linear or bisected.
fn search_grid<F: FnMut(f64) -> bool>(grid: &[f64], search: SearchStrategy, mut ok: F) -> Option<usize> {
    match search {
        SearchStrategy::Linear => grid.iter().position(|&r| ok(r)),
        SearchStrategy::Binary => {
            let last = grid.len().checked_sub(1)?;
            if !ok(grid[last]) {
                return None;
            }
            let (mut lo, mut hi) = (0, last);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if ok(grid[mid]) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            Some(lo)
        }
    }
}

fn pairwise_extremes<M: Metric>(metric: &M, points: &[Point]) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d = metric.between(a, b);
            if d > 0.0 {
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
    }
    (hi > 0.0).then_some((lo, hi))
}

fn achieved<M: Metric>(metric: &M, centers: &[Point], window: Option<&[Point]>, z: usize) -> Result<Option<f64>> {
    match window {
        None => Ok(None),
        Some(w) if w.len() <= z => Ok(Some(0.0)),
        Some(w) => radius_excluding_with(metric, centers, w, z).map(Some),
    }
}

/// Query path of the sliding algorithm: extract the coreset, then search the
/// smallest `rho` on a `(1 + beta)` grid for which weighted outliers
/// clustering with `eps = 4 (1 + beta)` leaves at most `z` weight uncovered.
pub fn compute_solution<M: Metric>(
    ladder: &CoresetLadder<M>,
    search: SearchStrategy,
    window: Option<&[Point]>,
) -> Result<SolveOutcome> {
    compute_solution_with_eps(ladder, search, None, window)
}

/// As [`compute_solution`], with an explicit `eps` instead of `4 (1 + beta)`.
pub fn compute_solution_with_eps<M: Metric>(
    ladder: &CoresetLadder<M>,
    search: SearchStrategy,
    eps: Option<f64>,
    window: Option<&[Point]>,
) -> Result<SolveOutcome> {
    let params = *ladder.params();
    let inner = ladder.ladder();
    let metric = inner.metric();
    let coreset = ladder.extract_coreset(search)?;
    let eps = eps.unwrap_or(4.0 * (1.0 + params.beta));
    let step = 1.0 + params.beta;

    let coreset_points: Vec<Point> = coreset.points.iter().map(|w| w.point.clone()).collect();
    let extremes = pairwise_extremes(metric, &coreset_points);
    let floor = inner
        .rho_floor()
        .or(extremes.map(|(lo, _)| lo / 2.0))
        .unwrap_or(1.0);
    let ceiling = inner
        .rho_ceiling()
        .or(extremes.map(|(_, hi)| hi))
        .unwrap_or(floor)
        .max(floor);

    let grid = geometric_grid(floor, step, ceiling);
    let mut last = None;
    let hit = search_grid(&grid, search, |rho| {
        let c = outliers_cluster_with(metric, &coreset.points, params.k, rho, eps);
        let ok = c.uncovered_weight <= params.z as u64;
        last = Some(rho);
        ok
    });
    let Some(i) = hit else {
        return Err(Error::GridExhausted {
            last_rho: last.unwrap_or(floor),
        });
    };
    let rho = grid[i];
    let c = outliers_cluster_with(metric, &coreset.points, params.k, rho, eps);
    let centers: Vec<Point> = c.centers.iter().map(|&j| coreset.points[j].point.clone()).collect();
    let achieved_radius = achieved(metric, &centers, window, params.z)?;
    Ok(SolveOutcome {
        centers,
        uncovered_weight: c.uncovered_weight,
        rho_min: rho,
        achieved_radius,
        coreset_size: coreset.len(),
        gamma_hat: coreset.exponent.map(|_| coreset.gamma_hat),
    })
}

/// Exact `r*_{k,z}` by enumerating every k-subset of the window as centers.
/// Guarded to `|W| <= 40` and `k <= 4`.
pub fn brute_force_optimum(window: &[Point], k: usize, z: usize) -> Result<(Vec<Point>, f64)> {
    brute_force_optimum_with(&Euclidean, window, k, z)
}

pub fn brute_force_optimum_with<M: Metric>(
    metric: &M,
    window: &[Point],
    k: usize,
    z: usize,
) -> Result<(Vec<Point>, f64)> {
    let n = window.len();
    if n > 40 || k > 4 {
        return Err(Error::OracleTooLarge { n, k });
    }
    if n == 0 || k == 0 {
        return Err(Error::InvalidParams("oracle needs a non-empty window and k >= 1".into()));
    }
    if z + 1 >= n {
        return Ok((vec![window[0].clone()], 0.0));
    }
    let d: Vec<Vec<f64>> = window
        .iter()
        .map(|a| window.iter().map(|b| metric.between(a, b)).collect())
        .collect();
    let k = k.min(n);
    let mut best = (f64::INFINITY, Vec::new());
    let mut combo = Vec::with_capacity(k);
    let mut nearest = vec![vec![f64::INFINITY; n]; k + 1];
    let mut scratch = vec![0.0; n];
    enumerate(0, n, k, &d, &mut combo, &mut nearest, &mut scratch, z, &mut best);
    let centers = best.1.iter().map(|&i| window[i].clone()).collect();
    Ok((centers, best.0))
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    start: usize,
    n: usize,
    k: usize,
    d: &[Vec<f64>],
    combo: &mut Vec<usize>,
    nearest: &mut [Vec<f64>],
    scratch: &mut [f64],
    z: usize,
    best: &mut (f64, Vec<usize>),
) {
    let depth = combo.len();
    if depth == k {
        scratch.copy_from_slice(&nearest[depth]);
        let idx = n - 1 - z;
        let (_, r, _) = scratch.select_nth_unstable_by(idx, f64::total_cmp);
        if *r < best.0 {
            *best = (*r, combo.clone());
        }
        return;
    }
    for c in start..=n - (k - depth) {
        let (head, tail) = nearest.split_at_mut(depth + 1);
        for (v, slot) in tail[0].iter_mut().enumerate() {
            *slot = head[depth][v].min(d[c][v]);
        }
        combo.push(c);
        enumerate(c + 1, n, k, d, combo, nearest, scratch, z, best);
        combo.pop();
    }
}

/// Farthest-first traversal starting from the first window point.
pub fn gonzalez(window: &[Point], k: usize) -> Vec<Point> {
    gonzalez_with(&Euclidean, window, k)
}

pub fn gonzalez_with<M: Metric>(metric: &M, window: &[Point], k: usize) -> Vec<Point> {
    if k >= window.len() {
        return window.to_vec();
    }
    if k == 0 {
        return Vec::new();
    }
    let mut centers = vec![0usize];
    let mut nearest: Vec<f64> = window.iter().map(|p| metric.between(p, &window[0])).collect();
    while centers.len() < k {
        let (far, _) = nearest
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        centers.push(far);
        for (i, p) in window.iter().enumerate() {
            nearest[i] = nearest[i].min(metric.between(p, &window[far]));
        }
    }
    centers.into_iter().map(|i| window[i].clone()).collect()
}

/// Charikar et al.'s greedy on the raw window (unit weights, `eps = 0`),
/// searching `rho` on a geometric grid of ratio `step` between the window's
/// minimum and maximum positive pairwise distances.
pub fn charikar(window: &[Point], k: usize, z: usize, step: f64) -> Result<SolveOutcome> {
    charikar_with(&Euclidean, window, k, z, step, SearchStrategy::Linear, None)
}

/// Sampled variant: every center is chosen among a Bernoulli sample of the
/// window of expected size `sample_size`.
pub fn samp_charikar(
    window: &[Point],
    k: usize,
    z: usize,
    step: f64,
    sample_size: usize,
    seed: u64,
) -> Result<SolveOutcome> {
    charikar_with(
        &Euclidean,
        window,
        k,
        z,
        step,
        SearchStrategy::Linear,
        Some((sample_size, seed)),
    )
}

pub fn charikar_with<M: Metric>(
    metric: &M,
    window: &[Point],
    k: usize,
    z: usize,
    step: f64,
    search: SearchStrategy,
    sampling: Option<(usize, u64)>,
) -> Result<SolveOutcome> {
    if !(step > 1.0) {
        return Err(Error::InvalidParams("grid step must exceed 1".into()));
    }
    let n = window.len();
    if n == 0 {
        return Err(Error::InvalidParams("empty window".into()));
    }
    let Some((lo, hi)) = pairwise_extremes(metric, window) else {
        return Ok(SolveOutcome {
            centers: vec![window[0].clone()],
            uncovered_weight: 0,
            rho_min: 0.0,
            achieved_radius: achieved(metric, &window[..1], Some(window), z)?,
            coreset_size: n,
            gamma_hat: None,
        });
    };
    let grid = geometric_grid(lo, step, hi);
    let run = |grid_index: usize, rho: f64| -> Clustering {
        let dist = |a: usize, b: usize| metric.between(&window[a], &window[b]);
        match sampling {
            Some((size, seed)) if size < n => {
                let p = size as f64 / n as f64;
                        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(grid_index as u64));
                greedy_cover(n, dist, |_| 1, k, rho, 0.0, || {
                    let mut s: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < p).collect();
                    if s.is_empty() {
                        s.push(rng.random_range(0..n));
                    }
                    s
                })
            }
            _ => greedy_cover(n, dist, |_| 1, k, rho, 0.0, || (0..n).collect()),
        }
    };
    let index_of = |rho: f64| grid.iter().position(|&g| g == rho).unwrap_or(0);
    let hit = search_grid(&grid, search, |rho| run(index_of(rho), rho).uncovered_weight <= z as u64)
        .ok_or(Error::GridExhausted { last_rho: hi })?;
    let c = run(hit, grid[hit]);
    let centers: Vec<Point> = c.centers.iter().map(|&i| window[i].clone()).collect();
    Ok(SolveOutcome {
        achieved_radius: achieved(metric, &centers, Some(window), z)?,
        centers,
        uncovered_weight: c.uncovered_weight,
        rho_min: grid[hit],
        coreset_size: n,
        gamma_hat: None,
    })
}

/// Whether every point of `window` other than at most `budget` lies within `radius` of `centers`.
pub fn covered_count<M: Metric>(metric: &M, centers: &[Point], window: &[Point], radius: f64) -> usize {
    window
        .iter()
        .filter(|p| dist_to_set(metric, p, centers) <= radius)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1(t: u64, x: f64) -> Point {
        Point::new(t, vec![x]).unwrap()
    }

    fn line(xs: &[f64]) -> Vec<Point> {
        xs.iter().enumerate().map(|(i, &x)| p1(i as u64 + 1, x)).collect()
    }

    fn wp(x: f64, w: u64) -> WeightedPoint {
        WeightedPoint { point: p1(1, x), weight: w }
    }

    #[test]
    fn outliers_cluster_example() {
        let t = vec![wp(0.0, 5), wp(10.0, 5), wp(100.0, 1)];
        let c = outliers_cluster(&t, 2, 1.0, 0.0);
        assert_eq!(c.centers, vec![0, 1]);
        assert_eq!(c.uncovered, vec![2]);
        assert_eq!(c.uncovered_weight, 1);
    }

    #[test]
    fn outliers_cluster_large_rho_covers_all() {
        let t = vec![wp(0.0, 1), wp(3.0, 2), wp(7.0, 1)];
        let c = outliers_cluster(&t, 5, 7.0, 0.0);
        assert_eq!(c.centers.len(), 1);
        assert!(c.uncovered.is_empty());
    }

    #[test]
    fn outliers_cluster_k_zero() {
        let t = vec![wp(0.0, 1), wp(3.0, 2)];
        let c = outliers_cluster(&t, 0, 1.0, 0.0);
        assert!(c.centers.is_empty());
        assert_eq!(c.uncovered_weight, 3);
    }

    #[test]
    fn outliers_cluster_deterministic_ties() {
        let t = vec![wp(0.0, 1), wp(10.0, 1), wp(20.0, 1)];
        let a = outliers_cluster(&t, 1, 1.0, 0.0);
        let b = outliers_cluster(&t, 1, 1.0, 0.0);
        assert_eq!(a, b);
        assert_eq!(a.centers, vec![0]);
    }

    #[test]
    fn brute_force_examples() {
        let w = line(&[0.0, 1.0, 2.0, 100.0]);
        let (c, r) = brute_force_optimum(&w, 1, 1).unwrap();
        assert_eq!(r, 1.0);
        assert_eq!(c[0].coords(), &[1.0]);
        let (_, r) = brute_force_optimum(&w, 2, 0).unwrap();
        assert_eq!(r, 1.0);
        let (_, r) = brute_force_optimum(&w, 1, 3).unwrap();
        assert_eq!(r, 0.0);
        assert!(matches!(
            brute_force_optimum(&line(&[0.0; 41]), 1, 0),
            Err(Error::OracleTooLarge { .. })
        ));
        assert!(brute_force_optimum(&w, 5, 0).is_err());
    }

    #[test]
    fn gonzalez_examples() {
        let w = line(&[0.0, 1.0, 9.0, 10.0]);
        let c = gonzalez(&w, 2);
        let xs: Vec<f64> = c.iter().map(|p| p.coords()[0]).collect();
        assert_eq!(xs, vec![0.0, 10.0]);
        assert_eq!(gonzalez(&w, 7).len(), 4);
    }

    #[test]
    fn charikar_examples() {
        let w = line(&[0.0, 1.0, 2.0, 100.0]);
        let s = charikar(&w, 1, 1, 1.5).unwrap();
        assert!(s.achieved_radius.unwrap() <= 3.0);
        let s = charikar(&w, 1, 4, 1.5).unwrap();
        assert_eq!(s.rho_min, 0.0);
        let s = charikar(&line(&[0.0, 0.0, 3.0, 3.0]), 2, 0, 1.5).unwrap();
        assert_eq!(s.achieved_radius, Some(0.0));
    }

    #[test]
    fn samp_charikar_degenerates_to_charikar() {
        let w = line(&[0.0, 1.0, 2.0, 100.0, 50.0, 51.0, 3.0]);
        let a = charikar(&w, 2, 1, 1.5).unwrap();
        let b = samp_charikar(&w, 2, 1, 1.5, 7, 42).unwrap();
        assert_eq!(a, b);
        let c = samp_charikar(&w, 2, 1, 1.5, 3, 42).unwrap();
        let d = samp_charikar(&w, 2, 1, 1.5, 3, 42).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn grid_search_binary_matches_linear_on_monotone() {
        let grid = geometric_grid(1.0, 1.5, 100.0);
        assert!(*grid.last().unwrap() >= 100.0);
        let lin = search_grid(&grid, SearchStrategy::Linear, |r| r > 17.0);
        let bin = search_grid(&grid, SearchStrategy::Binary, |r| r > 17.0);
        assert_eq!(lin, bin);
    }
}
