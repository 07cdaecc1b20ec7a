mod common;

use common::ExactCounter;
use proptest::prelude::*;
use sliding_kcenter::Histogram;

/// Replays `pattern` (true = an assigned point arrives) from time `start`
/// and checks the estimate against exact counting after every step.
fn replay(window_len: u64, lambda: f64, start: u64, pattern: &[bool]) -> Result<(), TestCaseError> {
    let mut h = Histogram::new(start);
    let mut exact = ExactCounter { stamps: vec![start] };
    for (i, &arrives) in pattern.iter().enumerate() {
        let t = start + 1 + i as u64;
        h.expire_entry(t, window_len);
        if arrives {
            h.bump_and_trim(t, lambda).unwrap();
            exact.stamps.push(t);
        }
        let w = exact.weight(t, window_len);
        if h.is_empty() {
            prop_assert_eq!(w, 0);
            break;
        }
        let est = h.weight_estimate().unwrap();
        prop_assert!(est <= w && (est as f64) * (1.0 + lambda) >= w as f64, "t={} est={} w={}", t, est, w);
        let size = (t - start + 1).min(window_len);
        prop_assert!(h.check_invariants(size, lambda).is_ok(), "{:?}", h.check_invariants(size, lambda));
    }
    Ok(())
}

proptest! {
    #[test]
    fn trimmed_estimate_within_factor(
        window_len in 1u64..300,
        lambda in prop_oneof![Just(0.1), Just(0.5), Just(1.0), 0.01f64..2.0],
        start in 1u64..50,
        pattern in proptest::collection::vec(prop::bool::weighted(0.7), 0..600),
    ) {
        replay(window_len, lambda, start, &pattern)?;
    }

    #[test]
    fn exact_mode_matches_counter(
        window_len in 1u64..100,
        pattern in proptest::collection::vec(any::<bool>(), 0..300),
    ) {
        let mut h = Histogram::new(1);
        let mut exact = ExactCounter { stamps: vec![1] };
        for (i, &arrives) in pattern.iter().enumerate() {
            let t = 2 + i as u64;
            h.expire_entry(t, window_len);
            if arrives {
                h.bump_and_trim(t, 0.0).unwrap();
                exact.stamps.push(t);
            }
            if h.is_empty() {
                break;
            }
            prop_assert_eq!(h.weight_estimate().unwrap(), exact.weight(t, window_len));
        }
    }
}

/// Direct iteration of `c_0 = n`, `c_{i+1} = min(c_i - 1, ceil(c_i / (1 + lambda)))`.
fn recurrence(t: u64, n: u64, lambda: f64) -> Vec<(u64, u64)> {
    let mut out = vec![(t - n, n)];
    let mut c = n;
    while c > 1 {
        c = (c - 1).min((c as f64 / (1.0 + lambda)).ceil() as u64);
        out.push((t - c, c));
    }
    out
}

#[test]
fn synthetic_window_matches_recurrence() {
    for &(n, lambda) in &[(10u64, 0.5), (1000, 0.1), (1, 0.5), (2, 1.0), (777, 0.3)] {
        let t = n + 17;
        let h = Histogram::synthetic_full_window(t, n, lambda);
        let got: Vec<(u64, u64)> = h.entries().iter().map(|e| (e.timestamp, e.count)).collect();
        assert_eq!(got, recurrence(t, n, lambda));
        h.check_invariants(n, lambda).unwrap();
    }
}

#[test]
fn synthetic_window_then_updates_stays_valid() {
    let (n, lambda) = (200u64, 0.25);
    let mut h = Histogram::synthetic_full_window(300, n, lambda);
    for t in 300..900 {
        h.expire_entry(t, n);
        if t % 3 != 0 {
            h.bump_and_trim(t, lambda).unwrap();
        }
        if h.is_empty() {
            break;
        }
        h.check_invariants(n, lambda).unwrap();
    }
}
