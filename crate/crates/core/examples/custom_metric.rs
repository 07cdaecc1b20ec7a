//! Any metric can drive the ladder; here the Manhattan distance.

use serde::{Deserialize, Serialize};
use sliding_kcenter::solver::compute_solution;
use sliding_kcenter::synthetic::integer_grid;
use sliding_kcenter::{CoresetLadder, LadderMode, Metric, SearchStrategy, StreamParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Manhattan;

impl Metric for Manhattan {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    }
}

fn main() -> sliding_kcenter::Result<()> {
    let params = StreamParams {
        window_len: 300,
        k: 4,
        z: 3,
        lambda: 0.5,
        beta: 0.5,
    };
    let mut ladder = CoresetLadder::with_metric(params, LadderMode::Oblivious, Manhattan)?;
    for p in integer_grid(2000, 3, 20, 9) {
        ladder.update(&p)?;
    }
    let s = compute_solution(&ladder, SearchStrategy::Linear, None)?;
    println!("centers:");
    for c in &s.centers {
        println!("  {:?}", c.coords());
    }
    println!("rho = {}, coreset of {} points", s.rho_min, s.coreset_size);
    Ok(())
}
