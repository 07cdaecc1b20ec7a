mod common;

use common::*;
use rand::Rng;
use sliding_kcenter::{CoresetLadder, Point, SearchStrategy, StreamParams};

fn params(window_len: u64, k: usize, z: usize, lambda: f64, beta: f64) -> StreamParams {
    StreamParams {
        window_len,
        k,
        z,
        lambda,
        beta,
    }
}

fn fixed_for(stream: &[Point], p: StreamParams) -> CoresetLadder {
    let (lo, hi) = distance_range(stream);
    CoresetLadder::fixed(p, lo, hi).unwrap()
}

#[test]
fn shadow_simulator_agrees_with_ladder() {
    for seed in 0..40 {
        shadow_check(seed, 60, 6).unwrap();
    }
}

#[test]
fn coreset_covers_window_within_bound() {
    for seed in 100..160u64 {
        let mut r = rng(seed);
        let window_len = r.random_range(6..=24u64);
        let k = r.random_range(1..=3);
        let z = r.random_range(0..=3);
        if (k + z + 1) as u64 > window_len {
            continue;
        }
        let beta = [0.5, 1.0][r.random_range(0..2)];
        let stream = random_stream(&mut r, 2 * window_len as usize, 2);
        let mut ladder = fixed_for(&stream, params(window_len, k, z, 0.5, beta));
        for p in &stream {
            ladder.update(p).unwrap();
        }
        let t = stream.len() as u64;
        let w = active(&stream, t, window_len);
        let c = ladder.extract_coreset(SearchStrategy::Linear).unwrap();
        let tp: Vec<Point> = c.points.iter().map(|x| x.point.clone()).collect();
        let r_star = optimum(&w, k, z);
        let worst = w.iter().map(|p| dist_to(p, &tp)).fold(0.0, f64::max);
        assert!(worst <= 4.0 * (1.0 + beta) * r_star + 1e-9, "seed {seed}: {worst} vs r* {r_star}");
        assert!(c.len() <= 2 * (k + z + 1));
        let total = c.total_weight();
        assert!(total <= w.len() as u64 && (total as f64) * 1.5 >= w.len() as f64);
        if w.len() <= 12 && k + z <= 4 {
            let r_kz = optimum(&w, k + z, 0);
            assert!(c.gamma_hat <= (1.0 + beta) * r_kz + 1e-9, "seed {seed}");
        }
    }
}

#[test]
fn binary_search_agrees_when_predicate_is_monotone() {
    let mut disagreements = 0;
    let mut monotone_runs = 0;
    for seed in 200..260u64 {
        let mut r = rng(seed);
        let window_len = r.random_range(8..=40u64);
        let stream = random_stream(&mut r, 2 * window_len as usize, 2);
        let mut ladder = fixed_for(&stream, params(window_len, 2, 2, 0.5, 0.5));
        for p in &stream {
            ladder.update(p).unwrap();
        }
        let inner = ladder.ladder();
        let flags: Vec<bool> = inner.slots().map(|(_, s)| s[0].qualifies(inner.metric(), 4)).collect();
        let monotone = flags.windows(2).all(|w| !w[0] || w[1]);
        let lin = ladder.extract_coreset(SearchStrategy::Linear).unwrap();
        let bin = ladder.extract_coreset(SearchStrategy::Binary).unwrap();
        if monotone {
            monotone_runs += 1;
            assert_eq!(lin.exponent, bin.exponent, "seed {seed}");
        } else if lin.exponent != bin.exponent {
            disagreements += 1;
        }
    }
    assert!(monotone_runs > 0);
    eprintln!("non-monotone instances where binary search differed: {disagreements}");
}

#[test]
fn memory_stays_within_structural_bounds() {
    let mut r = rng(7);
    let window_len = 500;
    let (k, z, lambda) = (3, 2, 0.5);
    let stream = random_stream(&mut r, 2000, 3);
    let mut ladder = fixed_for(&stream, params(window_len, k, z, lambda, 0.5));
    let kz1 = k + z + 1;
    let per_hist = 2 * ((window_len as f64).ln() / (1.0 + lambda).ln()).ceil() as usize + 2;
    for p in &stream {
        ladder.update(p).unwrap();
        let l = ladder.ladder();
        assert!(l.stored_points() <= 3 * kz1 * l.len());
        assert!(l.histogram_entries() <= l.len() * 2 * kz1 * per_hist);
    }
}

#[test]
fn snapshot_restores_mid_stream() {
    let mut r = rng(9);
    let stream = random_stream(&mut r, 300, 2);
    let p = params(50, 2, 3, 0.5, 0.5);
    let mut a = CoresetLadder::oblivious(p).unwrap();
    for q in &stream[..150] {
        a.update(q).unwrap();
    }
    let mut b = CoresetLadder::from_snapshot(&a.to_snapshot().unwrap()).unwrap();
    for q in &stream[150..] {
        a.update(q).unwrap();
        b.update(q).unwrap();
    }
    assert_eq!(a, b);
    assert_eq!(
        a.extract_coreset(SearchStrategy::Linear).unwrap(),
        b.extract_coreset(SearchStrategy::Linear).unwrap()
    );
}
