//! The trimmed (timestamp, count) histogram behind every proxy weight: its
//! first count stays within a factor 1 + lambda of the true number of
//! window points while only a logarithmic number of entries is kept.

use sliding_kcenter::Histogram;

fn main() -> sliding_kcenter::Result<()> {
    let (window_len, lambda) = (1000u64, 0.25);
    let mut h = Histogram::new(1);
    let mut arrivals = vec![1u64];
    for t in 2..=5000u64 {
        h.expire_entry(t, window_len);
        // the proxy absorbs two points out of three
        if t % 3 != 0 {
            h.bump_and_trim(t, lambda)?;
            arrivals.push(t);
        }
        if t % 1000 == 0 {
            let exact = arrivals.iter().filter(|&&a| a + window_len > t).count();
            println!(
                "t={t}: estimate {} exact {exact} entries {}",
                h.weight_estimate()?,
                h.len()
            );
        }
    }
    let seeded = Histogram::synthetic_full_window(5000, window_len, lambda);
    println!("synthetic full-window histogram has {} entries", seeded.len());
    Ok(())
}
