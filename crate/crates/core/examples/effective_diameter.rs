//! Estimates the 0.9-effective diameter of a sliding window over points in
//! the unit ball with rare far outliers, next to the exact value and the
//! bucketed sequential baseline.

use sliding_kcenter::effdiam::{eff_sequential, exact_effective_diameter};
use sliding_kcenter::synthetic::ball_with_outliers;
use sliding_kcenter::{EffDiameterConfig, EffDiameterSketch, ExactWindow};

fn main() -> sliding_kcenter::Result<()> {
    let outlier_radius = 10.0;
    let cfg = EffDiameterConfig::new(1500, 0.9, 0.5, 1.0 / (2.0 * outlier_radius));
    let mut sketch = EffDiameterSketch::new(cfg)?;
    let mut window = ExactWindow::new(cfg.window_len);

    println!("{:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>6}", "t", "lower", "value", "upper", "exact", "buckets", "size");
    for p in ball_with_outliers(7500, 3, outlier_radius, 0.001, 11) {
        let t = p.arrival();
        sketch.update(&p)?;
        window.push(p)?;
        if t % 1500 == 0 {
            let e = sketch.estimate()?;
            let w = window.to_vec();
            println!(
                "{t:>6} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>6}{}",
                e.lower,
                e.raw_upper,
                e.upper,
                exact_effective_diameter(&w, cfg.alpha)?,
                eff_sequential(&w, cfg.alpha, 0.01)?,
                e.coreset_size,
                if e.saturated() { "  (saturated)" } else { "" }
            );
        }
    }
    Ok(())
}
