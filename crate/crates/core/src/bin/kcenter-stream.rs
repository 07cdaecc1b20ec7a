use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Parser;
use sliding_kcenter::experiment::{run_experiment, Algorithm, ExperimentConfig, InjectProb};
use sliding_kcenter::{LadderMode, SearchStrategy};

/// Streams a point file through a sliding-window clustering algorithm and
/// writes one metrics row per query.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// Input file: one point per line, comma- or whitespace-separated.
    #[arg(long)]
    input: PathBuf,
    /// Metrics file to write.
    #[arg(long)]
    output: PathBuf,
    /// sliding, charikar, samp-charikar, gon, eff-sliding or eff-sequential.
    #[arg(long, default_value = "sliding")]
    algorithm: Algorithm,
    #[arg(long)]
    window_len: u64,
    #[arg(short, long, default_value_t = 10)]
    k: usize,
    #[arg(short, long, default_value_t = 10)]
    z: usize,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.01)]
    eta: f64,
    /// fixed or oblivious.
    #[arg(long, default_value = "fixed")]
    mode: String,
    #[arg(long, default_value_t = 0.01)]
    d_min: f64,
    #[arg(long, default_value_t = 1e4)]
    d_max: f64,
    #[arg(long, default_value_t = 10_000)]
    query_every: u64,
    /// A probability, or "auto" for z / (2 N).
    #[arg(long, default_value = "0")]
    inject_prob: InjectProb,
    #[arg(long, default_value_t = 100.0)]
    outlier_scale: f64,
    /// Diameter of the input; pre-scanned when omitted and injection is on.
    #[arg(long)]
    diameter: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    sample_size: usize,
    #[arg(long, default_value_t = 4096)]
    fine_cap: usize,
    #[arg(long, default_value_t = 0.01)]
    bucket_step: f64,
    /// Bisect the guess and radius searches instead of scanning them.
    #[arg(long)]
    binary_search: bool,
}

fn main() -> anyhow::Result<()> {
    let a = Args::parse();
    let mode = match a.mode.as_str() {
        "fixed" => LadderMode::Fixed {
            d_min: a.d_min,
            d_max: a.d_max,
        },
        "oblivious" => LadderMode::Oblivious,
        other => bail!("unknown mode '{other}' (expected fixed or oblivious)"),
    };
    let cfg = ExperimentConfig {
        input: a.input,
        output: a.output,
        algorithm: a.algorithm,
        window_len: a.window_len,
        k: a.k,
        z: a.z,
        lambda: a.lambda,
        beta: a.beta,
        alpha: a.alpha,
        epsilon: a.epsilon,
        eta: a.eta,
        mode,
        query_every: a.query_every,
        inject_prob: a.inject_prob,
        outlier_scale: a.outlier_scale,
        diameter: a.diameter,
        seed: a.seed,
        sample_size: a.sample_size,
        fine_cap: a.fine_cap,
        bucket_step: a.bucket_step,
        search: if a.binary_search {
            SearchStrategy::Binary
        } else {
            SearchStrategy::Linear
        },
    };
    let summary = run_experiment(&cfg).with_context(|| format!("running {}", cfg.algorithm))?;
    eprintln!(
        "{} points, {} queries, median update {} ns, median query {} ns",
        summary.points,
        summary.rows.len(),
        summary.median_update_ns,
        summary.median_query_ns
    );
    Ok(())
}
