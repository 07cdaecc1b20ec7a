//! Clusters a stream of Gaussian blobs with a few far outliers, querying the
//! sliding window every 2000 points and comparing against the sequential
//! baseline run on the full window.

use sliding_kcenter::solver::{charikar, compute_solution};
use sliding_kcenter::synthetic::gaussian_blobs;
use sliding_kcenter::{CoresetLadder, ExactWindow, Point, SearchStrategy, StreamParams};

fn main() -> sliding_kcenter::Result<()> {
    let params = StreamParams {
        window_len: 1000,
        k: 5,
        z: 10,
        lambda: 0.5,
        beta: 0.5,
    };
    let mut ladder = CoresetLadder::fixed(params, 0.01, 1e4)?;
    let mut window = ExactWindow::new(params.window_len);

    let mut stream = gaussian_blobs(8000, 2, 5, 40.0, 7);
    // plant an outlier every 150 points
    for p in stream.iter_mut().filter(|p| p.arrival() % 150 == 0) {
        *p = Point::new(p.arrival(), vec![5000.0, -5000.0 + p.arrival() as f64])?;
    }

    println!("{:>6} {:>10} {:>10} {:>8} {:>12}", "t", "sliding", "charikar", "coreset", "memory");
    for p in &stream {
        ladder.update(p)?;
        window.push(p.clone())?;
        if p.arrival() % 2000 == 0 {
            let w = window.to_vec();
            let ours = compute_solution(&ladder, SearchStrategy::Linear, Some(&w))?;
            let base = charikar(&w, params.k, params.z, 1.0 + params.beta)?;
            println!(
                "{:>6} {:>10.3} {:>10.3} {:>8} {:>12}",
                p.arrival(),
                ours.achieved_radius.unwrap(),
                base.achieved_radius.unwrap(),
                ours.coreset_size,
                ladder.memory_floats()
            );
        }
    }
    Ok(())
}
