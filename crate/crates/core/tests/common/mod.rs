//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sliding_kcenter::{CoresetLadder, Euclidean, Metric, Point, StreamParams};

pub fn d(a: &Point, b: &Point) -> f64 {
    Euclidean.between(a, b)
}

pub fn dist_to(p: &Point, set: &[Point]) -> f64 {
    set.iter().map(|c| d(p, c)).fold(f64::INFINITY, f64::min)
}

/// `r_C(W)` after dropping the `z` farthest points, by full sort.
pub fn radius_without(centers: &[Point], window: &[Point], z: usize) -> f64 {
    let mut ds: Vec<f64> = window.iter().map(|p| dist_to(p, centers)).collect();
    ds.sort_by(f64::total_cmp);
    if z >= ds.len() {
        return 0.0;
    }
    ds[ds.len() - 1 - z]
}

/// Exact `r*_{k,z}` by trying every k-subset (of size min(k, |W|)).
pub fn optimum(window: &[Point], k: usize, z: usize) -> f64 {
    fn rec(w: &[Point], k: usize, z: usize, start: usize, chosen: &mut Vec<Point>, best: &mut f64) {
        if chosen.len() == k {
            *best = best.min(radius_without(chosen, w, z));
            return;
        }
        for i in start..w.len() {
            chosen.push(w[i].clone());
            rec(w, k, z, i + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(window, k.min(window.len()), z, 0, &mut Vec::new(), &mut best);
    best
}

/// Seeded random 1-3 dimensional stream mixing a few clusters, sparse far
/// points and exact duplicates.
pub fn random_stream(rng: &mut ChaCha8Rng, len: usize, dim: usize) -> Vec<Point> {
    let centers: Vec<Vec<f64>> = (0..rng.random_range(1..=4))
        .map(|_| (0..dim).map(|_| rng.random_range(-50.0..50.0)).collect())
        .collect();
    let mut out: Vec<Point> = Vec::with_capacity(len);
    for t in 1..=len as u64 {
        let roll: f64 = rng.random();
        let coords: Vec<f64> = if roll < 0.05 {
            (0..dim).map(|_| rng.random_range(-1000.0..1000.0)).collect()
        } else if roll < 0.1 && !out.is_empty() {
            out[rng.random_range(0..out.len())].coords().to_vec()
        } else {
            let c = &centers[rng.random_range(0..centers.len())];
            c.iter().map(|x| x + rng.random_range(-3.0..3.0)).collect()
        };
        out.push(Point::new(t, coords).unwrap());
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smallest and largest positive pairwise distance of a stream.
pub fn distance_range(points: &[Point]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let x = d(a, b);
            if x > 0.0 {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
    }
    (lo, hi)
}

pub fn active(stream: &[Point], t: u64, window_len: u64) -> Vec<Point> {
    stream
        .iter()
        .filter(|p| p.arrival() <= t && p.arrival() + window_len > t)
        .cloned()
        .collect()
}

/// A histogram that never trims: the arrival of every assigned point.
#[derive(Debug, Clone, Default)]
pub struct ExactCounter {
    pub stamps: Vec<u64>,
}

impl ExactCounter {
    pub fn weight(&self, t: u64, window_len: u64) -> u64 {
        self.stamps.iter().filter(|&&s| s + window_len > t).count() as u64
    }
}

#[derive(Debug, Clone)]
pub struct Group {
    pub rep: Point,
    pub members: Vec<Point>,
    pub orphan: bool,
    pub alive: bool,
}

/// Brute-force re-simulation of one guess: every point remembers the group
/// it joined, so its proxy is always known exactly.
#[derive(Debug, Clone)]
pub struct ShadowGuess {
    pub gamma: f64,
    pub cap: usize,
    pub window_len: u64,
    pub attractions: Vec<(Point, usize)>,
    pub groups: Vec<Group>,
}

impl ShadowGuess {
    pub fn new(gamma: f64, k_plus_z: usize, window_len: u64) -> Self {
        Self {
            gamma,
            cap: k_plus_z + 1,
            window_len,
            attractions: Vec::new(),
            groups: Vec::new(),
        }
    }

    fn live(&self, p: &Point, t: u64) -> bool {
        p.arrival() + self.window_len > t
    }

    pub fn push(&mut self, p: &Point) {
        let t = p.arrival();
        let n = self.window_len;
        let mut kept = Vec::new();
        for (a, g) in self.attractions.drain(..) {
            if a.arrival() + n > t {
                kept.push((a, g));
            } else {
                self.groups[g].orphan = true;
            }
        }
        self.attractions = kept;
        for g in self.groups.iter_mut().filter(|g| g.orphan && g.alive) {
            if g.rep.arrival() + n <= t {
                g.alive = false;
            }
        }
        let hit = self
            .attractions
            .iter()
            .find(|(a, _)| d(a, p) <= 2.0 * self.gamma)
            .map(|(_, g)| *g);
        match hit {
            Some(g) => {
                self.groups[g].rep = p.clone();
                self.groups[g].members.push(p.clone());
            }
            None => {
                self.groups.push(Group {
                    rep: p.clone(),
                    members: vec![p.clone()],
                    orphan: false,
                    alive: true,
                });
                self.attractions.push((p.clone(), self.groups.len() - 1));
                if self.attractions.len() > self.cap {
                    let (_, g) = self.attractions.remove(0);
                    self.groups[g].orphan = true;
                }
                if self.attractions.len() >= self.cap {
                    let oldest = self.attractions[0].0.arrival();
                    for g in self.groups.iter_mut().filter(|g| g.orphan && g.alive) {
                        if g.rep.arrival() < oldest {
                            g.alive = false;
                        }
                    }
                }
            }
        }
    }

    /// Live groups: representatives first (attraction order), then orphans
    /// by creation order.
    pub fn live_groups(&self) -> impl Iterator<Item = &Group> {
        self.groups.iter().filter(|g| g.alive)
    }

    /// For every active point, its proxy (if its group survives).
    pub fn proxies(&self, t: u64) -> Vec<(Point, Option<Point>)> {
        let mut out = Vec::new();
        for g in &self.groups {
            for m in g.members.iter().filter(|m| self.live(m, t)) {
                out.push((m.clone(), g.alive.then(|| g.rep.clone())));
            }
        }
        out
    }

    /// Exact number of active points each live group stands for, keyed by
    /// the representative's arrival.
    pub fn exact_weights(&self, t: u64) -> Vec<(u64, u64)> {
        self.live_groups()
            .map(|g| {
                let w = g.members.iter().filter(|m| self.live(m, t)).count() as u64;
                (g.rep.arrival(), w)
            })
            .collect()
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs the shadow simulator next to the ladder and compares every guess
/// after every step.
pub fn shadow_check(seed: u64, max_window: u64, max_kz: usize) -> Result<usize, String> {
    let mut r = rng(seed);
    let window_len = r.random_range(4..=max_window);
    let kz = r.random_range(1..=max_kz).min(window_len as usize - 1);
    let k = r.random_range(1..=kz);
    let lambda = [0.1, 0.5, 1.0][r.random_range(0..3)];
    let dim = r.random_range(1..=3);
    let stream = random_stream(&mut r, 3 * window_len as usize, dim);
    let (lo, hi) = distance_range(&stream);
    let p = StreamParams {
        window_len,
        k,
        z: kz - k,
        lambda,
        beta: 0.5,
    };
    let mut ladder = CoresetLadder::fixed(p, lo, hi).map_err(|e| e.to_string())?;
    let mut checked = 0;
    let mut shadows: Vec<(i32, ShadowGuess)> = ladder
        .ladder()
        .slots()
        .map(|(e, s)| (e, ShadowGuess::new(s[0].gamma(), kz, window_len)))
        .collect();

    for p in &stream {
        ladder.update(p).unwrap();
        let t = p.arrival();
        for (e, shadow) in shadows.iter_mut() {
            shadow.push(p);
            let real = &ladder.ladder().slot(*e).unwrap()[0];
            let gamma = real.gamma();

            let a_real: Vec<u64> = real.attractions().iter().map(|a| a.point.arrival()).collect();
            let a_shadow: Vec<u64> = shadow.attractions.iter().map(|(a, _)| a.arrival()).collect();
            ensure(a_real == a_shadow, || format!("seed {seed} t {t} guess {e}: attraction sets differ"))?;
            for (i, a) in real.attractions().iter().enumerate() {
                for b in &real.attractions()[i + 1..] {
                    ensure(d(&a.point, &b.point) > 2.0 * gamma, || format!("seed {seed} t {t}: attraction points too close"))?;
                }
            }
            ensure(
                real.attractions().len() <= kz + 1 && real.orphans().len() <= kz + 1,
                || format!("seed {seed} t {t} guess {e}: set sizes exceed k + z + 1"),
            )?;

            let mut w_real: Vec<(u64, u64)> = real
                .weighted_proxies()
                .unwrap()
                .into_iter()
                .map(|w| (w.point.arrival(), w.weight))
                .collect();
            let mut w_exact = shadow.exact_weights(t);
            w_real.sort();
            w_exact.sort();
            ensure(w_real.len() == w_exact.len(), || format!("seed {seed} t {t} guess {e}: proxy sets differ"))?;
            for ((ra, est), (sa, w)) in w_real.iter().zip(&w_exact) {
                ensure(ra == sa, || format!("seed {seed} t {t} guess {e}: proxy sets differ"))?;
                ensure(*est <= *w && (*est as f64) * (1.0 + lambda) >= *w as f64, || {
                    format!("seed {seed} t {t} guess {e}: estimate {est} vs weight {w}")
                })?;
            }

            if real.attractions().len() <= kz {
                for (q, proxy) in shadow.proxies(t) {
                    let Some(proxy) = proxy else {
                        return Err(format!("seed {seed} t {t}: point {} lost its proxy", q.arrival()));
                    };
                    ensure(d(&q, &proxy) <= 4.0 * gamma, || {
                        format!("seed {seed} t {t} guess {e}: point {} is far from its proxy", q.arrival())
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}
