//! Per-guess attraction / representative / orphan sets, the guess ladder that
//! owns them, and weighted coreset extraction.
//!
//! For a guess `gamma`, attraction points are pairwise more than `2 gamma`
//! apart. Every arrival is either attracted by the oldest attraction point
//! within `2 gamma` (and becomes its representative, inheriting and bumping
//! the histogram) or becomes a new attraction point. When an attraction point
//! expires or is evicted its representative turns into an orphan, which keeps
//! its histogram until it expires itself.
//!
//! The ladder runs one such state per guess `(1 + beta)^i`. In fixed mode the
//! exponent range is derived from user bounds on the minimum and maximum
//! pairwise distance. In oblivious mode it follows `[d_t / 2, 2 D_t]`, where
//! `d_t` is the minimum positive distance among the last `k + z + 1` points
//! and `D_t` the largest distance from the first stream point; guesses that
//! enter the range are seeded so that they match what a full run would hold.

use std::collections::{BTreeMap, VecDeque};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::metric::{Euclidean, Metric, Point, StreamParams};

const SNAPSHOT_VERSION: u32 = 1;

/// A coreset point with its approximate weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub point: Point,
    pub weight: u64,
}

/// A stored proxy (representative or orphan) and its histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proxy {
    pub point: Point,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attraction {
    pub point: Point,
    pub rep: Proxy,
}

/// How a layer reacts when it holds more attraction points than its cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerPolicy {
    /// Evict the oldest attraction point; once the cap is reached, drop every
    /// orphan older than the oldest attraction point. A guess in that state
    /// is never selected, so nothing observable is lost.
    Validation,
    /// Evict the oldest attraction point and bound the orphans by the cap,
    /// dropping the oldest. Dropped proxies are remembered through
    /// [`GuessState::coverage_horizon`].
    Fine,
}

/// Shape of one layer of a guess: attraction threshold `radius_factor * gamma`,
/// size cap and overflow policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub radius_factor: f64,
    pub cap: usize,
    pub policy: LayerPolicy,
}

impl LayerSpec {
    /// The k-center layer: threshold `2 gamma`, cap `k + z + 1`.
    pub fn validation(k_plus_z: usize) -> Self {
        Self {
            radius_factor: 2.0,
            cap: k_plus_z + 1,
            policy: LayerPolicy::Validation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SearchStrategy {
    #[default]
    Linear,
    /// Assumes the searched predicate is monotone in the guess.
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessState {
    gamma: f64,
    radius: f64,
    cap: usize,
    policy: LayerPolicy,
    attractions: Vec<Attraction>,
    orphans: Vec<Proxy>,
    evictions: u64,
    coverage_horizon: Option<u64>,
}

impl GuessState {
    pub fn new(gamma: f64, spec: &LayerSpec) -> Self {
        Self {
            gamma,
            radius: spec.radius_factor * gamma,
            cap: spec.cap,
            policy: spec.policy,
            attractions: Vec::new(),
            orphans: Vec::new(),
            evictions: 0,
            coverage_horizon: None,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Attraction threshold of this layer.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Attraction points, oldest first.
    pub fn attractions(&self) -> &[Attraction] {
        &self.attractions
    }

    pub fn orphans(&self) -> &[Proxy] {
        &self.orphans
    }

    pub fn representatives(&self) -> impl Iterator<Item = &Proxy> {
        self.attractions.iter().map(|a| &a.rep)
    }

    /// Representatives followed by orphans.
    pub fn proxies(&self) -> impl Iterator<Item = &Proxy> {
        self.representatives().chain(self.orphans.iter())
    }

    /// Number of attraction points evicted on overflow so far.
    pub fn evictions(&self) -> u64 {
        self.evictions
    }

    /// Newest arrival whose proxy may have been discarded (fine layers only).
    /// Coverage is complete again once this arrival has left the window.
    pub fn coverage_horizon(&self) -> Option<u64> {
        self.coverage_horizon
    }

    pub fn coverage_complete(&self, t: u64, window_len: u64) -> bool {
        self.coverage_horizon
            .is_none_or(|h| h + window_len <= t)
    }

    pub(crate) fn mark_incomplete(&mut self, arrival: u64) {
        self.coverage_horizon = Some(self.coverage_horizon.map_or(arrival, |h| h.max(arrival)));
    }

    pub fn stored_points(&self) -> usize {
        2 * self.attractions.len() + self.orphans.len()
    }

    pub fn histogram_entries(&self) -> usize {
        self.proxies().map(|p| p.histogram.len()).sum()
    }

    /// Expiry sweep for time `t`: expired attraction points hand their
    /// representatives to the orphans, expired orphans go away and the entry
    /// stamped `t - window_len` is cut from every histogram.
    pub fn expire(&mut self, t: u64, window_len: u64) {
        let mut i = 0;
        while i < self.attractions.len() {
            if self.attractions[i].point.is_active(t, window_len) {
                i += 1;
            } else {
                let a = self.attractions.remove(i);
                self.orphans.push(a.rep);
            }
        }
        self.orphans.retain(|o| o.point.is_active(t, window_len));
        for proxy in self
            .orphans
            .iter_mut()
            .chain(self.attractions.iter_mut().map(|a| &mut a.rep))
        {
            proxy.histogram.expire_entry(t, window_len);
        }
        self.orphans.retain(|o| !o.histogram.is_empty());
        if self.policy == LayerPolicy::Fine {
            self.enforce_orphan_cap();
        }
    }

    /// Handles the arrival of `p` at time `t` (after [`expire`](Self::expire)).
    pub fn process<M: Metric>(&mut self, metric: &M, p: &Point, t: u64, lambda: f64) -> Result<()> {
        // attractions are kept oldest first, so the first hit has minimum TTL
        let hit = self
            .attractions
            .iter()
            .position(|a| metric.between(p, &a.point) <= self.radius);
        match hit {
            None => self.insert_attraction(metric, p, t),
            Some(i) => {
                let rep = &mut self.attractions[i].rep;
                rep.histogram.bump_and_trim(t, lambda)?;
                rep.point = p.clone();
                Ok(())
            }
        }
    }

    /// Adds `p` as a new attraction point representing itself, then enforces the cap.
    pub fn insert_attraction<M: Metric>(&mut self, metric: &M, p: &Point, t: u64) -> Result<()> {
        if let Some(a) = self
            .attractions
            .iter()
            .find(|a| metric.between(p, &a.point) <= self.radius)
        {
            return Err(Error::Precondition(format!(
                "point {} is within {} of attraction point {}",
                p.arrival(),
                self.radius,
                a.point.arrival()
            )));
        }
        self.attractions.push(Attraction {
            point: p.clone(),
            rep: Proxy {
                point: p.clone(),
                histogram: Histogram::new(t),
            },
        });
        if self.attractions.len() > self.cap {
            let evicted = self.attractions.remove(0);
            self.orphans.push(evicted.rep);
            self.evictions += 1;
        }
        match self.policy {
            LayerPolicy::Validation => {
                if self.attractions.len() + 1 > self.cap {
                    let oldest = self.attractions[0].point.arrival();
                    self.orphans.retain(|o| o.point.arrival() >= oldest);
                }
            }
            LayerPolicy::Fine => self.enforce_orphan_cap(),
        }
        Ok(())
    }

    fn enforce_orphan_cap(&mut self) {
        while self.orphans.len() > self.cap {
            let (idx, _) = self
                .orphans
                .iter()
                .enumerate()
                .min_by_key(|(_, o)| o.point.arrival())
                .expect("non-empty");
            let dropped = self.orphans.remove(idx);
            self.mark_incomplete(dropped.point.arrival());
        }
    }

    /// Whether this guess can serve a coreset for `k + z` centers: at most
    /// `k + z` attraction points, and a greedy `2 gamma`-separated pass over
    /// attraction points, orphans and representatives picks at most `k + z`.
    pub fn qualifies<M: Metric>(&self, metric: &M, k_plus_z: usize) -> bool {
        if self.attractions.len() > k_plus_z {
            return false;
        }
        let threshold = 2.0 * self.gamma;
        let mut chosen: Vec<&Point> = Vec::with_capacity(k_plus_z + 1);
        let candidates = self
            .attractions
            .iter()
            .map(|a| &a.point)
            .chain(self.orphans.iter().map(|o| &o.point))
            .chain(self.attractions.iter().map(|a| &a.rep.point));
        for p in candidates {
            if chosen.iter().all(|c| metric.between(p, c) > threshold) {
                chosen.push(p);
                if chosen.len() > k_plus_z {
                    return false;
                }
            }
        }
        true
    }

    /// Representatives and orphans weighted by their histogram estimates.
    pub fn weighted_proxies(&self) -> Result<Vec<WeightedPoint>> {
        self.proxies()
            .map(|p| {
                Ok(WeightedPoint {
                    point: p.point.clone(),
                    weight: p.histogram.weight_estimate()?,
                })
            })
            .collect()
    }

    fn seeded(gamma: f64, spec: &LayerSpec, anchor: Point, rep: Proxy) -> Self {
        let mut s = Self::new(gamma, spec);
        s.attractions.push(Attraction { point: anchor, rep });
        s
    }
}

/// The extracted coreset `T` together with the guess it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedCoreset {
    pub points: Vec<WeightedPoint>,
    /// Selected guess; `0` while the oblivious ladder is still buffering.
    pub gamma_hat: f64,
    pub exponent: Option<i32>,
    pub t: u64,
}

impl WeightedCoreset {
    pub fn total_weight(&self) -> u64 {
        self.points.iter().map(|w| w.weight).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LadderMode {
    Fixed { d_min: f64, d_max: f64 },
    Oblivious,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Tracker {
    buffer_len: usize,
    first: Option<Point>,
    recent: VecDeque<Point>,
    d_t: Option<f64>,
    big_d: f64,
    built: bool,
}

/// The outcome of the guess search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    /// The oblivious ladder has not been built yet; the window is tracked exactly.
    WarmUp,
    Guess(i32),
}

/// One guess state per layer for every exponent of the ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessLadder<M = Euclidean> {
    window_len: u64,
    lambda: f64,
    beta: f64,
    layers: Vec<LayerSpec>,
    mode: LadderMode,
    metric: M,
    t: u64,
    dim: Option<usize>,
    slots: BTreeMap<i32, Vec<GuessState>>,
    tracker: Option<Tracker>,
}

impl<M: Metric> GuessLadder<M> {
    /// `layers[0]` decides which guess is selected; its cap minus one is the
    /// `k + z` of the qualification test and the oblivious buffer holds `cap` points.
    pub fn new(
        window_len: u64,
        lambda: f64,
        beta: f64,
        layers: Vec<LayerSpec>,
        mode: LadderMode,
        metric: M,
    ) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParams("at least one layer required".into()));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParams("beta must lie in (0, 1]".into()));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParams("lambda must be finite and >= 0".into()));
        }
        if layers.iter().any(|l| l.cap == 0 || !(l.radius_factor > 0.0)) {
            return Err(Error::InvalidParams("layer caps and radii must be positive".into()));
        }
        if layers[0].cap as u64 > window_len {
            return Err(Error::InvalidParams(format!(
                "k + z + 1 = {} exceeds window length {window_len}",
                layers[0].cap
            )));
        }
        let mut ladder = Self {
            window_len,
            lambda,
            beta,
            layers,
            mode,
            metric,
            t: 0,
            dim: None,
            slots: BTreeMap::new(),
            tracker: None,
        };
        match mode {
            LadderMode::Fixed { d_min, d_max } => {
                if !(d_min > 0.0 && d_min < d_max && d_max.is_finite()) {
                    return Err(Error::InvalidParams("fixed mode needs 0 < d_min < d_max".into()));
                }
                let lo = ladder.floor_exp(d_min);
                let hi = ladder.ceil_exp(d_max);
                for e in lo..=hi {
                    let states = ladder.fresh_layers(e);
                    ladder.slots.insert(e, states);
                }
            }
            LadderMode::Oblivious => {
                ladder.tracker = Some(Tracker {
                    buffer_len: ladder.layers[0].cap,
                    first: None,
                    recent: VecDeque::new(),
                    d_t: None,
                    big_d: 0.0,
                    built: false,
                });
            }
        }
        Ok(ladder)
    }

    pub fn gamma(&self, exponent: i32) -> f64 {
        (1.0 + self.beta).powi(exponent)
    }

    fn floor_exp(&self, x: f64) -> i32 {
        (x.ln() / (1.0 + self.beta).ln()).floor() as i32
    }

    fn ceil_exp(&self, x: f64) -> i32 {
        (x.ln() / (1.0 + self.beta).ln()).ceil() as i32
    }

    fn fresh_layers(&self, exponent: i32) -> Vec<GuessState> {
        let gamma = self.gamma(exponent);
        self.layers.iter().map(|l| GuessState::new(gamma, l)).collect()
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn window_len(&self) -> u64 {
        self.window_len
    }

    /// `|W| = min(t, N)`.
    pub fn window_size(&self) -> u64 {
        self.t.min(self.window_len)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mode(&self) -> LadderMode {
        self.mode
    }

    pub fn metric(&self) -> &M {
        &self.metric
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn k_plus_z(&self) -> usize {
        self.layers[0].cap - 1
    }

    /// Minimum positive distance among the recent buffer (oblivious mode).
    pub fn d_t(&self) -> Option<f64> {
        self.tracker.as_ref().and_then(|tr| tr.d_t)
    }

    /// Largest distance from the first stream point seen so far (oblivious mode).
    pub fn big_d_t(&self) -> Option<f64> {
        self.tracker.as_ref().map(|tr| tr.big_d)
    }

    pub fn is_built(&self) -> bool {
        self.tracker.as_ref().is_none_or(|tr| tr.built)
    }

    /// Guess exponents with their per-layer states, ascending.
    pub fn slots(&self) -> impl Iterator<Item = (i32, &[GuessState])> {
        self.slots.iter().map(|(e, s)| (*e, s.as_slice()))
    }

    pub fn slot(&self, exponent: i32) -> Option<&[GuessState]> {
        self.slots.get(&exponent).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Points retained by the oblivious tracker (first point plus recent buffer).
    pub fn recent_points(&self) -> Vec<Point> {
        self.tracker
            .as_ref()
            .map(|tr| tr.recent.iter().cloned().collect())
            .unwrap_or_default()
    }

    pub fn stored_points(&self) -> usize {
        let slots: usize = self
            .slots
            .values()
            .flat_map(|s| s.iter())
            .map(GuessState::stored_points)
            .sum();
        let tracker = self
            .tracker
            .as_ref()
            .map_or(0, |tr| tr.recent.len() + usize::from(tr.first.is_some()));
        slots + tracker
    }

    pub fn histogram_entries(&self) -> usize {
        self.slots
            .values()
            .flat_map(|s| s.iter())
            .map(GuessState::histogram_entries)
            .sum()
    }

    /// Memory gauge in floats: every stored point costs `dim` floats, every
    /// histogram entry two, every guess state one (its gamma) and the
    /// oblivious tracker two more (`d_t`, `D_t`).
    pub fn memory_floats(&self) -> usize {
        let dim = self.dim.unwrap_or(0);
        let states: usize = self.slots.values().map(Vec::len).sum();
        self.stored_points() * dim
            + 2 * self.histogram_entries()
            + states
            + if self.tracker.is_some() { 2 } else { 0 }
    }

    /// Feeds the next stream point; its arrival must be exactly `t + 1`.
    pub fn update(&mut self, p: &Point) -> Result<()> {
        if p.arrival() != self.t + 1 {
            return Err(Error::OutOfOrder {
                last: self.t,
                got: p.arrival(),
            });
        }
        match self.dim {
            Some(d) if d != p.dim() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.dim(),
                })
            }
            _ => self.dim = Some(p.dim()),
        }
        if self.tracker.is_some() {
            self.maintain_oblivious_ladder(p)?;
        }
        self.process_point(p)
    }

    fn process_point(&mut self, p: &Point) -> Result<()> {
        let t = p.arrival();
        self.t = t;
        for states in self.slots.values_mut() {
            for s in states.iter_mut() {
                s.expire(t, self.window_len);
                s.process(&self.metric, p, t, self.lambda)?;
            }
        }
        Ok(())
    }

    fn maintain_oblivious_ladder(&mut self, p: &Point) -> Result<()> {
        let t = p.arrival();
        let metric = self.metric.clone();
        let tr = self.tracker.as_mut().expect("oblivious mode");
        let first = tr.first.get_or_insert_with(|| p.clone()).clone();
        tr.big_d = tr.big_d.max(metric.between(&first, p));
        let previous: Vec<Point> = tr.recent.iter().cloned().collect();
        tr.recent.push_back(p.clone());
        if tr.recent.len() > tr.buffer_len {
            tr.recent.pop_front();
        }
        if t as usize <= tr.buffer_len {
            return Ok(());
        }
        let mut min_pos: Option<f64> = None;
        for (i, a) in tr.recent.iter().enumerate() {
            for b in tr.recent.iter().skip(i + 1) {
                let d = metric.between(a, b);
                if d > 0.0 {
                    min_pos = Some(min_pos.map_or(d, |m: f64| m.min(d)));
                }
            }
        }
        tr.d_t = min_pos.or(tr.d_t).or((tr.big_d > 0.0).then_some(tr.big_d));
        let Some(d_t) = tr.d_t else {
            // every point so far coincides with the first one
            return Ok(());
        };
        let big_d = tr.big_d;
        let was_built = tr.built;
        tr.built = true;

        let lo = self.floor_exp(d_t / 2.0);
        let hi = self.ceil_exp(2.0 * big_d).max(lo);

        if !was_built {
            if t - 1 <= previous.len() as u64 {
                // the buffer still holds the whole history: replay it exactly
                for e in lo..=hi {
                    let states = self.replayed_layers(e, &previous, false)?;
                    self.slots.insert(e, states);
                }
            } else {
                for e in lo..=hi {
                    let states = self.seeded_high_layers(e, t, &first, &previous);
                    self.slots.insert(e, states);
                }
            }
            return Ok(());
        }

        let old_min = self.slots.keys().next().copied();
        let old_max = self.slots.keys().next_back().copied();
        self.slots.retain(|e, _| (lo..=hi).contains(e));
        for e in lo..=hi {
            if self.slots.contains_key(&e) {
                continue;
            }
            let below = old_min.is_some_and(|m| e < m);
            let states = if below || old_max.is_none() {
                self.replayed_layers(e, &previous, true)?
            } else {
                debug_assert!(old_max.is_some_and(|m| e > m));
                self.seeded_high_layers(e, t, &first, &previous)
            };
            self.slots.insert(e, states);
        }
        Ok(())
    }

    /// States a full run would hold had the stream started with `history`.
    fn replayed_layers(&self, exponent: i32, history: &[Point], partial: bool) -> Result<Vec<GuessState>> {
        let mut states = self.fresh_layers(exponent);
        for q in history {
            for s in states.iter_mut() {
                s.expire(q.arrival(), self.window_len);
                s.process(&self.metric, q, q.arrival(), self.lambda)?;
            }
        }
        if partial {
            if let Some(last) = history.last() {
                for s in states.iter_mut().filter(|s| s.policy == LayerPolicy::Fine) {
                    s.mark_incomplete(last.arrival());
                }
            }
        }
        Ok(states)
    }

    /// A guess above every pairwise distance seen so far: one attraction
    /// point at the start of the window (a placeholder that expires right
    /// away once the window is full) whose representative is `p_{t-1}`,
    /// carrying the trimmed histogram of the whole window.
    fn seeded_high_layers(&self, exponent: i32, t: u64, first: &Point, previous: &[Point]) -> Vec<GuessState> {
        let gamma = self.gamma(exponent);
        let n_active = (t - 1).min(self.window_len);
        let anchor = first.with_arrival(t - n_active);
        let last = previous.last().expect("buffer is non-empty after warm-up");
        let histogram = Histogram::synthetic_full_window(t, n_active, self.lambda);
        self.layers
            .iter()
            .map(|spec| {
                let mut s = GuessState::seeded(
                    gamma,
                    spec,
                    anchor.clone(),
                    Proxy {
                        point: last.clone(),
                        histogram: histogram.clone(),
                    },
                );
                if spec.policy == LayerPolicy::Fine {
                    s.mark_incomplete(t - 1);
                }
                s
            })
            .collect()
    }

    /// Smallest qualifying guess (by `layers[0]`), or [`Selection::WarmUp`].
    pub fn select_guess(&self, search: SearchStrategy) -> Result<Selection> {
        if !self.is_built() {
            return Ok(Selection::WarmUp);
        }
        let kz = self.k_plus_z();
        let exps: Vec<i32> = self.slots.keys().copied().collect();
        let ok = |e: &i32| self.slots[e][0].qualifies(&self.metric, kz);
        let found = match search {
            SearchStrategy::Linear => exps.iter().find(|e| ok(e)).copied(),
            SearchStrategy::Binary => {
                if exps.last().is_some_and(ok) {
                    let (mut lo, mut hi) = (0usize, exps.len() - 1);
                    while lo < hi {
                        let mid = (lo + hi) / 2;
                        if ok(&exps[mid]) {
                            hi = mid;
                        } else {
                            lo = mid + 1;
                        }
                    }
                    Some(exps[lo])
                } else {
                    None
                }
            }
        };
        found
            .map(Selection::Guess)
            .ok_or(Error::NoQualifyingGuess { t: self.t })
    }

    /// The exact window while the oblivious ladder is still buffering.
    fn warm_up_coreset(&self) -> Vec<WeightedPoint> {
        let tr = self.tracker.as_ref().expect("warm-up only in oblivious mode");
        if self.t as usize <= tr.buffer_len {
            tr.recent
                .iter()
                .map(|p| WeightedPoint {
                    point: p.clone(),
                    weight: 1,
                })
                .collect()
        } else {
            // all points so far are identical
            tr.recent
                .back()
                .map(|p| WeightedPoint {
                    point: p.clone(),
                    weight: self.window_size(),
                })
                .into_iter()
                .collect()
        }
    }

    /// Weighted coreset read from layer `layer` of the selected guess.
    pub fn extract_layer(&self, search: SearchStrategy, layer: usize) -> Result<WeightedCoreset> {
        match self.select_guess(search)? {
            Selection::WarmUp => Ok(WeightedCoreset {
                points: self.warm_up_coreset(),
                gamma_hat: 0.0,
                exponent: None,
                t: self.t,
            }),
            Selection::Guess(e) => Ok(WeightedCoreset {
                points: self.slots[&e][layer].weighted_proxies()?,
                gamma_hat: self.gamma(e),
                exponent: Some(e),
                t: self.t,
            }),
        }
    }

    /// Lower end of the radius search: `d_min` in fixed mode, `d_t / 2` in oblivious mode.
    pub fn rho_floor(&self) -> Option<f64> {
        match self.mode {
            LadderMode::Fixed { d_min, .. } => Some(d_min),
            LadderMode::Oblivious => self.d_t().map(|d| d / 2.0),
        }
    }

    /// Upper end of the radius search: `d_max` in fixed mode, `2 D_t` in oblivious mode.
    pub fn rho_ceiling(&self) -> Option<f64> {
        match self.mode {
            LadderMode::Fixed { d_max, .. } => Some(d_max),
            LadderMode::Oblivious => self.big_d_t().filter(|d| *d > 0.0).map(|d| 2.0 * d),
        }
    }
}

impl<M: Metric + Serialize + DeserializeOwned> GuessLadder<M> {
    /// Versioned JSON snapshot of the complete state.
    pub fn to_snapshot(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Out<'a, M> {
            version: u32,
            ladder: &'a GuessLadder<M>,
        }
        serde_json::to_string(&Out {
            version: SNAPSHOT_VERSION,
            ladder: self,
        })
        .map_err(|e| Error::Snapshot(e.to_string()))
    }

    pub fn from_snapshot(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct In<M> {
            version: u32,
            ladder: GuessLadder<M>,
        }
        let parsed: In<M> = serde_json::from_str(s).map_err(|e| Error::Snapshot(e.to_string()))?;
        if parsed.version != SNAPSHOT_VERSION {
            return Err(Error::Snapshot(format!(
                "unsupported snapshot version {}",
                parsed.version
            )));
        }
        Ok(parsed.ladder)
    }
}

/// Sliding-window k-center with z outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoresetLadder<M = Euclidean> {
    params: StreamParams,
    ladder: GuessLadder<M>,
}

impl CoresetLadder<Euclidean> {
    /// Guess range fixed by known bounds on the pairwise distances of the stream.
    pub fn fixed(params: StreamParams, d_min: f64, d_max: f64) -> Result<Self> {
        Self::with_metric(params, LadderMode::Fixed { d_min, d_max }, Euclidean)
    }

    /// Guess range tracked from the stream itself.
    pub fn oblivious(params: StreamParams) -> Result<Self> {
        Self::with_metric(params, LadderMode::Oblivious, Euclidean)
    }
}

impl<M: Metric> CoresetLadder<M> {
    pub fn with_metric(params: StreamParams, mode: LadderMode, metric: M) -> Result<Self> {
        params.validate()?;
        let ladder = GuessLadder::new(
            params.window_len,
            params.lambda,
            params.beta,
            vec![LayerSpec::validation(params.k + params.z)],
            mode,
            metric,
        )?;
        Ok(Self { params, ladder })
    }

    pub fn params(&self) -> &StreamParams {
        &self.params
    }

    pub fn ladder(&self) -> &GuessLadder<M> {
        &self.ladder
    }

    pub fn update(&mut self, p: &Point) -> Result<()> {
        self.ladder.update(p)
    }

    pub fn t(&self) -> u64 {
        self.ladder.t()
    }

    pub fn extract_coreset(&self, search: SearchStrategy) -> Result<WeightedCoreset> {
        self.ladder.extract_layer(search, 0)
    }

    pub fn memory_floats(&self) -> usize {
        self.ladder.memory_floats()
    }
}

impl<M: Metric + Serialize + DeserializeOwned> CoresetLadder<M> {
    pub fn to_snapshot(&self) -> Result<String> {
        serde_json::to_string(&(SNAPSHOT_VERSION, self)).map_err(|e| Error::Snapshot(e.to_string()))
    }

    pub fn from_snapshot(s: &str) -> Result<Self> {
        let (version, me): (u32, Self) =
            serde_json::from_str(s).map_err(|e| Error::Snapshot(e.to_string()))?;
        if version != SNAPSHOT_VERSION {
            return Err(Error::Snapshot(format!("unsupported snapshot version {version}")));
        }
        Ok(me)
    }
}
