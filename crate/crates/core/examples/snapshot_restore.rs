//! Serializes the whole ladder mid-stream, restores it and checks that the
//! restored copy keeps producing identical coresets.

use sliding_kcenter::synthetic::gaussian_blobs;
use sliding_kcenter::{CoresetLadder, SearchStrategy, StreamParams};

fn main() -> sliding_kcenter::Result<()> {
    let params = StreamParams {
        window_len: 400,
        k: 4,
        z: 4,
        lambda: 0.5,
        beta: 0.5,
    };
    let stream = gaussian_blobs(3000, 3, 4, 25.0, 2);
    let mut live = CoresetLadder::oblivious(params)?;
    for p in &stream[..1500] {
        live.update(p)?;
    }
    let snapshot = live.to_snapshot()?;
    println!("snapshot: {} bytes", snapshot.len());

    let mut restored: CoresetLadder = CoresetLadder::from_snapshot(&snapshot)?;
    for p in &stream[1500..] {
        live.update(p)?;
        restored.update(p)?;
    }
    let a = live.extract_coreset(SearchStrategy::Linear)?;
    let b = restored.extract_coreset(SearchStrategy::Linear)?;
    println!("coresets identical after 1500 more points: {}", a == b);
    Ok(())
}
