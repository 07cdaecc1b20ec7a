//! Drives the experiment harness on a synthetic stream with injected
//! outliers and prints the metrics file for two algorithms.

use sliding_kcenter::experiment::{inject_outliers, run_on, Algorithm, ExperimentConfig, InjectProb};
use sliding_kcenter::synthetic::gaussian_blobs;
use sliding_kcenter::LadderMode;

fn main() -> sliding_kcenter::Result<()> {
    for algorithm in [Algorithm::Sliding, Algorithm::Gon] {
        let cfg = ExperimentConfig {
            query_every: 1000,
            inject_prob: InjectProb::Auto,
            mode: LadderMode::Oblivious,
            seed: 3,
            ..ExperimentConfig::new(algorithm, 2000, 5, 10)
        };
        let base = gaussian_blobs(6000, 4, 5, 30.0, 1).into_iter().map(Ok);
        let stream = inject_outliers(base, cfg.injection_probability(), 5000.0, cfg.seed);
        let mut out = Vec::new();
        let summary = run_on(&cfg, stream, &mut out)?;
        print!("{}", String::from_utf8_lossy(&out));
        println!(
            "# {} queries, median update {} ns, median query {} ns\n",
            summary.rows.len(),
            summary.median_update_ns,
            summary.median_query_ns
        );
    }
    Ok(())
}
