//! Sliding-window k-center clustering with outliers, in memory independent
//! of the window length.
//!
//! The engine keeps, for a geometric ladder of radius guesses, a handful of
//! attraction / representative / orphan points per guess. Each stored proxy
//! carries a trimmed `(timestamp, count)` histogram that estimates how many
//! window points it stands for within a factor `1 + lambda`. At query time a
//! weighted coreset of size `O(k + z)` is extracted and clustered with a
//! weighted variant of Charikar's greedy algorithm.
//!
//! The same machinery, run with `k = 1, z = 0` and a second, finer layer of
//! attraction points, yields lower and upper estimates of the
//! alpha-effective diameter of the window.
//!
//! Sequential baselines (`charikar`, sampled `charikar`, `gonzalez`, bucketed
//! effective diameter) and exhaustive oracles live next to the streaming
//! code so that every guarantee can be cross-checked on small windows.

pub mod coreset;
pub mod effdiam;
mod error;
pub mod experiment;
pub mod histogram;
pub mod metric;
pub mod solver;
pub mod synthetic;

pub use coreset::{
    CoresetLadder, GuessLadder, GuessState, LadderMode, LayerPolicy, LayerSpec, SearchStrategy,
    WeightedCoreset, WeightedPoint,
};

pub use effdiam::{EffDiameterConfig, EffDiameterEstimate, EffDiameterSketch};
pub use error::{Error, Result};
pub use histogram::Histogram;
pub use metric::{dist, radius_excluding, Euclidean, ExactWindow, Metric, Point, StreamParams};
pub use solver::SolveOutcome;
