//! Trimmed `(timestamp, count)` lists that estimate how many window points a
//! proxy stands for.
//!
//! Entry `(t_i, c_i)` records that `c_i` points assigned to the proxy arrived
//! at or after `t_i`. Timestamps strictly increase and counts strictly
//! decrease along the list. After every bump, intermediate entries are
//! dropped so that any two entries two apart differ by more than a factor
//! `1 + lambda`; the first count then over-approximates the true weight by at
//! most that factor, using `O(log_{1+lambda} N)` entries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub timestamp: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    entries: Vec<Entry>,
}

impl Histogram {
    /// A fresh histogram for a point that only represents itself.
    pub fn new(t: u64) -> Self {
        Self {
            entries: vec![Entry {
                timestamp: t,
                count: 1,
            }],
        }
    }

    /// Builds a histogram from raw pairs; timestamps must increase and counts decrease.
    pub fn from_entries(pairs: &[(u64, u64)]) -> Result<Self> {
        for w in pairs.windows(2) {
            if w[0].0 >= w[1].0 || w[0].1 <= w[1].1 {
                return Err(Error::Precondition(format!(
                    "histogram entries not monotone: {:?} then {:?}",
                    w[0], w[1]
                )));
            }
        }
        if pairs.iter().any(|&(_, c)| c == 0) {
            return Err(Error::Precondition("zero count".into()));
        }
        Ok(Self {
            entries: pairs
                .iter()
                .map(|&(timestamp, count)| Entry { timestamp, count })
                .collect(),
        })
    }

    /// The trimmed version of the exact list `{(t-n, n), ..., (t-1, 1)}`:
    /// counts follow `c_0 = n`, `c_{i+1} = min(c_i - 1, ceil(c_i / (1 + lambda)))`
    /// down to 1, each placed at timestamp `t - c_i`.
    pub fn synthetic_full_window(t: u64, n: u64, lambda: f64) -> Self {
        assert!(n >= 1 && n <= t, "synthetic histogram needs 1 <= n <= t");
        let mut entries = Vec::new();
        let mut c = n;
        loop {
            entries.push(Entry {
                timestamp: t - c,
                count: c,
            });
            if c == 1 {
                break;
            }
            let shrunk = (c as f64 / (1.0 + lambda)).ceil() as u64;
            c = (c - 1).min(shrunk.max(1));
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first_timestamp(&self) -> Option<u64> {
        self.entries.first().map(|e| e.timestamp)
    }

    /// Records one more assigned point arriving at `t`, then trims.
    pub fn bump_and_trim(&mut self, t: u64, lambda: f64) -> Result<()> {
        if let Some(last) = self.entries.last() {
            if t <= last.timestamp {
                return Err(Error::OutOfOrder {
                    last: last.timestamp,
                    got: t,
                });
            }
        }
        for e in &mut self.entries {
            e.count = e.count.checked_add(1).ok_or(Error::Overflow)?;
        }
        self.entries.push(Entry {
            timestamp: t,
            count: 1,
        });

        let l = &self.entries;
        let m = l.len();
        if m <= 2 {
            return Ok(());
        }
        let factor = 1.0 + lambda;
        let mut kept = Vec::with_capacity(m);
        kept.push(l[0]);
        let mut last = 0;
        for i in 1..m - 1 {
            if l[last].count as f64 > factor * l[i + 1].count as f64 {
                kept.push(l[i]);
                last = i;
            }
        }
        kept.push(l[m - 1]);
        self.entries = kept;
        Ok(())
    }

    /// Drops the entry stamped exactly `t - window_len`, the point that expires at `t`.
    pub fn expire_entry(&mut self, t: u64, window_len: u64) {
        if t < window_len {
            return;
        }
        let stale = t - window_len;
        // only the head can carry the expiring timestamp
        if self.entries.first().map(|e| e.timestamp) == Some(stale) {
            self.entries.remove(0);
        }
    }

    /// Approximate weight: the count of the oldest surviving entry.
    pub fn weight_estimate(&self) -> Result<u64> {
        self.entries
            .first()
            .map(|e| e.count)
            .ok_or(Error::EmptyHistogram)
    }

    /// Checks the structural guarantees of a trimmed histogram for window
    /// length `n`. The length bound is only meaningful for `lambda > 0`.
    pub fn check_invariants(&self, n: u64, lambda: f64) -> std::result::Result<(), String> {
        let e = &self.entries;
        let factor = 1.0 + lambda;
        if let Some(last) = e.last() {
            if last.count != 1 {
                return Err(format!("last count is {}, expected 1", last.count));
            }
        }
        for (i, x) in e.iter().enumerate() {
            if x.count > n {
                return Err(format!("entry {i} count {} exceeds {n}", x.count));
            }
        }
        for (i, w) in e.windows(2).enumerate() {
            if w[0].timestamp >= w[1].timestamp || w[0].count <= w[1].count {
                return Err(format!("entries {i},{} not monotone", i + 1));
            }
            let (a, b) = (w[0].count as f64, w[1].count as f64);
            if !(a <= factor * b || w[0].count == w[1].count + 1) {
                return Err(format!("adjacent entries {i},{} too far apart: {a} vs {b}", i + 1));
            }
        }
        for (i, w) in e.windows(3).enumerate() {
            if !(w[0].count as f64 > factor * w[2].count as f64) {
                return Err(format!(
                    "entries {i},{} too close: {} vs {}",
                    i + 2,
                    w[0].count,
                    w[2].count
                ));
            }
        }
        if lambda > 0.0 {
            let bound = 2 * log_ceil(n, factor) + 2;
            if e.len() > bound {
                return Err(format!("length {} exceeds bound {bound}", e.len()));
            }
        }
        Ok(())
    }
}

/// `ceil(log_base(n))` for `n >= 1`, computed by repeated multiplication.
pub(crate) fn log_ceil(n: u64, base: f64) -> usize {
    let mut k = 0;
    let mut acc = 1.0;
    while acc < n as f64 {
        acc *= base;
        k += 1;
    }
    k
}
