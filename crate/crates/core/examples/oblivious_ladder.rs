//! Runs the ladder without any bounds on the pairwise distances: the guess
//! range follows the stream as the spread of the data grows.

use sliding_kcenter::solver::compute_solution;
use sliding_kcenter::synthetic::uniform_cube;
use sliding_kcenter::{CoresetLadder, Point, SearchStrategy, StreamParams};

fn main() -> sliding_kcenter::Result<()> {
    let params = StreamParams {
        window_len: 500,
        k: 3,
        z: 5,
        lambda: 0.5,
        beta: 0.5,
    };
    let mut ladder = CoresetLadder::oblivious(params)?;

    // three phases with growing scale
    let mut t = 0;
    for (phase, side) in [1.0, 100.0, 10_000.0].into_iter().enumerate() {
        for p in uniform_cube(1500, 3, side, phase as u64) {
            t += 1;
            ladder.update(&Point::new(t, p.coords().to_vec())?)?;
        }
        let l = ladder.ladder();
        let exps: Vec<i32> = l.slots().map(|(e, _)| e).collect();
        let s = compute_solution(&ladder, SearchStrategy::Linear, None)?;
        println!(
            "t={t:>5} side={side:>7}: d_t={:.4} D_t={:.1} guesses {}..={} ({}), gamma_hat={:.3}, rho={:.3}",
            l.d_t().unwrap_or(0.0),
            l.big_d_t().unwrap_or(0.0),
            exps.first().unwrap(),
            exps.last().unwrap(),
            exps.len(),
            s.gamma_hat.unwrap_or(0.0),
            s.rho_min
        );
    }
    Ok(())
}
