//! Experiment driver: dataset ingestion, synthetic outlier injection, the
//! query schedule and the metrics file.
//!
//! Metrics file layout (schema version 1): a first line
//! `# kcenter-stream metrics v1`, then a comma-separated header and one row
//! per query. Columns:
//!
//! | column | meaning |
//! |---|---|
//! | `timestep` | arrival index of the last point fed before the query |
//! | `algorithm` | algorithm name |
//! | `window_size` | points in the window |
//! | `radius` | radius excluding the `z` farthest points (k-center algorithms) |
//! | `eff_lower`, `eff_upper` | sandwich bounds (`eff-sliding`) |
//! | `eff_value` | reported effective diameter (`eff-sliding`, `eff-sequential`) |
//! | `memory_floats` | memory gauge, see below |
//! | `coreset_size` | size of the structure queried |
//! | `uncovered_count` | window points outside the algorithm's cover radius: `3 rho` for the Charikar baselines, `(3 + 4 eps) rho + 4 gamma_hat` for `sliding` |
//! | `saturated` | 1 when the effective-diameter estimate is flagged |
//! | `update_time_ns` | median update time since the previous row |
//! | `query_time_ns` | wall-clock time of the query |
//!
//! Memory gauge: every stored point costs `dim` floats, every histogram entry
//! two, every guess state one, and the oblivious tracker two. Baselines that
//! keep the whole window report `window_size * dim`. Empty cells mean "not
//! applicable". The two timing columns are the only nondeterministic ones.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coreset::{CoresetLadder, LadderMode, SearchStrategy};
use crate::effdiam::{eff_sequential, EffDiameterConfig, EffDiameterSketch};
use crate::error::{Error, Result};
use crate::metric::{dist_to_set, radius_excluding, Euclidean, ExactWindow, Metric, Point, StreamParams};
use crate::solver::{charikar_with, compute_solution, gonzalez};
use crate::synthetic::random_direction;

pub const METRICS_VERSION: &str = "# kcenter-stream metrics v1";

pub const METRICS_HEADER: &str = "timestep,algorithm,window_size,radius,eff_lower,eff_upper,eff_value,memory_floats,coreset_size,uncovered_count,saturated,update_time_ns,query_time_ns";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    Sliding,
    Charikar,
    SampCharikar,
    Gon,
    EffSliding,
    EffSequential,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Sliding,
        Algorithm::Charikar,
        Algorithm::SampCharikar,
        Algorithm::Gon,
        Algorithm::EffSliding,
        Algorithm::EffSequential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sliding => "sliding",
            Algorithm::Charikar => "charikar",
            Algorithm::SampCharikar => "samp-charikar",
            Algorithm::Gon => "gon",
            Algorithm::EffSliding => "eff-sliding",
            Algorithm::EffSequential => "eff-sequential",
        }
    }

    fn is_kcenter(self) -> bool {
        !matches!(self, Algorithm::EffSliding | Algorithm::EffSequential)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown algorithm '{s}'")))
    }
}

/// Probability of injecting an outlier after each point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InjectProb {
    /// `z / (2 N)`: `z / 2` injected points per window in expectation.
    Auto,
    Fixed(f64),
}

impl FromStr for InjectProb {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(InjectProb::Auto);
        }
        s.parse::<f64>()
            .map(InjectProb::Fixed)
            .map_err(|_| Error::InvalidParams(format!("bad injection probability '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub algorithm: Algorithm,
    pub window_len: u64,
    pub k: usize,
    pub z: usize,
    pub lambda: f64,
    pub beta: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub mode: LadderMode,
    pub query_every: u64,
    pub inject_prob: InjectProb,
    pub outlier_scale: f64,
    /// Diameter of the base dataset; estimated by a pre-scan when absent.
    pub diameter: Option<f64>,
    pub seed: u64,
    pub sample_size: usize,
    pub fine_cap: usize,
    /// Bucket ratio minus one for `eff-sequential`.
    pub bucket_step: f64,
    pub search: SearchStrategy,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, window_len: u64, k: usize, z: usize) -> Self {
        Self {
            input: PathBuf::new(),
            output: PathBuf::new(),
            algorithm,
            window_len,
            k,
            z,
            lambda: 0.5,
            beta: 0.5,
            alpha: 0.9,
            epsilon: 0.5,
            eta: 0.01,
            mode: LadderMode::Fixed {
                d_min: 0.01,
                d_max: 1e4,
            },
            query_every: 10_000,
            inject_prob: InjectProb::Fixed(0.0),
            outlier_scale: 100.0,
            diameter: None,
            seed: 0,
            sample_size: 1000,
            fine_cap: 4096,
            bucket_step: 0.01,
            search: SearchStrategy::Linear,
        }
    }

    pub fn stream_params(&self) -> StreamParams {
        StreamParams {
            window_len: self.window_len,
            k: self.k,
            z: self.z,
            lambda: self.lambda,
            beta: self.beta,
        }
    }

    pub fn eff_config(&self) -> EffDiameterConfig {
        EffDiameterConfig {
            window_len: self.window_len,
            alpha: self.alpha,
            epsilon: self.epsilon,
            eta: self.eta,
            lambda: self.lambda,
            beta: self.beta,
            fine_cap: self.fine_cap,
            mode: self.mode,
        }
    }

    pub fn injection_probability(&self) -> f64 {
        match self.inject_prob {
            InjectProb::Auto => self.z as f64 / (2.0 * self.window_len as f64),
            InjectProb::Fixed(p) => p,
        }
    }

    /// Checks everything that can be checked before the stream is opened.
    pub fn validate(&self) -> Result<()> {
        if self.query_every == 0 {
            return Err(Error::InvalidParams("query_every must be positive".into()));
        }
        if self.window_len == 0 {
            return Err(Error::InvalidParams("window length must be positive".into()));
        }
        let p = self.injection_probability();
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams("injection probability must lie in [0, 1]".into()));
        }
        if !(self.outlier_scale.is_finite() && self.outlier_scale >= 0.0) {
            return Err(Error::InvalidParams("outlier scale must be finite and >= 0".into()));
        }
        if let LadderMode::Fixed { d_min, d_max } = self.mode {
            if !(d_min > 0.0 && d_min < d_max) {
                return Err(Error::InvalidParams("fixed mode needs 0 < d_min < d_max".into()));
            }
        }
        match self.algorithm {
            a if a.is_kcenter() => self.stream_params().validate()?,
            Algorithm::EffSliding => self.eff_config().validate()?,
            _ => {
                if !(self.alpha > 0.0 && self.alpha < 1.0) {
                    return Err(Error::InvalidParams("alpha must lie in (0, 1)".into()));
                }
                if !(self.bucket_step > 0.0) {
                    return Err(Error::InvalidParams("bucket step must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

/// Lazily parses one point per line: comma- and/or whitespace-separated
/// reals. Blank lines are skipped; a first line that does not parse is taken
/// as a header. Points get consecutive arrivals starting at 1.
pub struct Ingest<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    next_arrival: u64,
    dim: Option<usize>,
    seen_content: bool,
}

impl<R: BufRead> Ingest<R> {
    pub fn new(reader: R) -> Self {
        Self {
            lines: reader.lines(),
            line_no: 0,
            next_arrival: 1,
            dim: None,
            seen_content: false,
        }
    }
}

fn parse_row(line: &str) -> std::result::Result<Vec<f64>, String> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|f| !f.is_empty())
        .map(|f| match f.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            Ok(_) => Err(format!("non-finite value '{f}'")),
            Err(_) => Err(format!("not a number: '{f}'")),
        })
        .collect()
}

impl<R: BufRead> Iterator for Ingest<R> {
    type Item = Result<Point>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let first = !self.seen_content;
            self.seen_content = true;
            let coords = match parse_row(&line) {
                Ok(c) => c,
                Err(_) if first => continue,
                Err(msg) => {
                    return Some(Err(Error::Parse {
                        line: self.line_no,
                        msg,
                    }))
                }
            };
            match self.dim {
                Some(d) if d != coords.len() => {
                    return Some(Err(Error::Parse {
                        line: self.line_no,
                        msg: format!("expected {d} fields, found {}", coords.len()),
                    }))
                }
                _ => self.dim = Some(coords.len()),
            }
            let p = Point::new(self.next_arrival, coords).expect("finite by construction");
            self.next_arrival += 1;
            return Some(Ok(p));
        }
    }
}

pub fn ingest(path: &Path) -> Result<Ingest<BufReader<File>>> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(Ingest::new(BufReader::new(f)))
}

/// Lower bound within a factor 2 of the diameter: the farthest point from
/// the farthest point from the first one. Two passes over `points`.
pub fn two_sweep_diameter<I, F>(mut points: F) -> Result<f64>
where
    F: FnMut() -> Result<I>,
    I: Iterator<Item = Result<Point>>,
{
    let mut it = points()?;
    let Some(first) = it.next().transpose()? else {
        return Ok(0.0);
    };
    let mut far = (0.0, first.clone());
    for p in it {
        let p = p?;
        let d = Euclidean.between(&first, &p);
        if d > far.0 {
            far = (d, p);
        }
    }
    let mut diameter = far.0;
    for p in points()? {
        diameter = diameter.max(Euclidean.between(&far.1, &p?));
    }
    Ok(diameter)
}

/// After each point, with probability `prob`, emits an extra point of norm
/// `norm` in a uniformly random direction. Arrivals are renumbered from 1.
pub struct InjectOutliers<I> {
    inner: I,
    prob: f64,
    norm: f64,
    rng: ChaCha8Rng,
    pending: Option<Point>,
    next_arrival: u64,
}

pub fn inject_outliers<I>(inner: I, prob: f64, norm: f64, seed: u64) -> InjectOutliers<I>
where
    I: Iterator<Item = Result<Point>>,
{
    InjectOutliers {
        inner,
        prob,
        norm,
        rng: ChaCha8Rng::seed_from_u64(seed),
        pending: None,
        next_arrival: 1,
    }
}

impl<I: Iterator<Item = Result<Point>>> Iterator for InjectOutliers<I> {
    type Item = Result<Point>;

    fn next(&mut self) -> Option<Self::Item> {
        let p = match self.pending.take() {
            Some(p) => p,
            None => {
                let p = match self.inner.next()? {
                    Ok(p) => p,
                    Err(e) => return Some(Err(e)),
                };
                if self.prob > 0.0 && self.rng.random::<f64>() < self.prob {
                    let dir = random_direction(&mut self.rng, p.dim());
                    let coords = dir.into_iter().map(|x| x * self.norm).collect();
                    self.pending = Some(Point::new(0, coords).expect("finite"));
                }
                p
            }
        };
        let out = p.with_arrival(self.next_arrival);
        self.next_arrival += 1;
        Some(Ok(out))
    }
}

/// One metrics row; `None` renders as an empty cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub timestep: u64,
    pub algorithm: Algorithm,
    pub window_size: u64,
    pub radius: Option<f64>,
    pub eff_lower: Option<f64>,
    pub eff_upper: Option<f64>,
    pub eff_value: Option<f64>,
    pub memory_floats: usize,
    pub coreset_size: usize,
    pub uncovered_count: Option<usize>,
    pub saturated: bool,
    pub update_time_ns: u64,
    pub query_time_ns: u64,
}

fn cell<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl MetricsRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.timestep,
            self.algorithm,
            self.window_size,
            cell(&self.radius),
            cell(&self.eff_lower),
            cell(&self.eff_upper),
            cell(&self.eff_value),
            self.memory_floats,
            self.coreset_size,
            cell(&self.uncovered_count),
            u8::from(self.saturated),
            self.update_time_ns,
            self.query_time_ns,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub points: u64,
    pub rows: Vec<MetricsRow>,
    pub median_update_ns: u64,
    pub median_query_ns: u64,
}

fn median(v: &mut [u64]) -> u64 {
    if v.is_empty() {
        return 0;
    }
    let mid = v.len() / 2;
    *v.select_nth_unstable(mid).1
}

/// Whether a query is due after the point with arrival `t`: at `t = N` and
/// every `query_every` steps after.
pub fn query_due(t: u64, window_len: u64, query_every: u64) -> bool {
    t >= window_len && (t - window_len) % query_every == 0
}

enum Engine {
    Sliding(Box<CoresetLadder>),
    Eff(Box<EffDiameterSketch>),
    Window,
}

fn uncovered(centers: &[Point], window: &[Point], radius: f64) -> usize {
    window
        .iter()
        .filter(|p| dist_to_set(&Euclidean, p, centers) > radius)
        .count()
}

/// Runs the configured algorithm over `stream`, writing the metrics file to `out`.
pub fn run_on<I, W>(cfg: &ExperimentConfig, stream: I, out: W) -> Result<RunSummary>
where
    I: IntoIterator<Item = Result<Point>>,
    W: Write,
{
    cfg.validate()?;
    let mut out = BufWriter::new(out);
    writeln!(out, "{METRICS_VERSION}")?;
    writeln!(out, "{METRICS_HEADER}")?;

    let mut engine = match cfg.algorithm {
        Algorithm::Sliding => Engine::Sliding(Box::new(CoresetLadder::with_metric(
            cfg.stream_params(),
            cfg.mode,
            Euclidean,
        )?)),
        Algorithm::EffSliding => Engine::Eff(Box::new(EffDiameterSketch::new(cfg.eff_config())?)),
        _ => Engine::Window,
    };
    // the exact window is kept by the harness for scoring and for the baselines
    let mut window = ExactWindow::new(cfg.window_len);
    let mut rows = Vec::new();
    let mut update_times = Vec::new();
    let mut all_updates = Vec::new();
    let mut query_times = Vec::new();
    let mut t = 0;

    for p in stream {
        let p = p?;
        t = p.arrival();
        let start = Instant::now();
        match &mut engine {
            Engine::Sliding(l) => l.update(&p)?,
            Engine::Eff(s) => s.update(&p)?,
            Engine::Window => {}
        }
        window.push(p)?;
        let elapsed = start.elapsed().as_nanos() as u64;
        update_times.push(elapsed);

        if !query_due(t, cfg.window_len, cfg.query_every) {
            continue;
        }
        let w = window.as_slice();
        let dim = w[0].dim();
        let start = Instant::now();
        let mut row = MetricsRow {
            timestep: t,
            algorithm: cfg.algorithm,
            window_size: w.len() as u64,
            radius: None,
            eff_lower: None,
            eff_upper: None,
            eff_value: None,
            memory_floats: w.len() * dim,
            coreset_size: w.len(),
            uncovered_count: None,
            saturated: false,
            update_time_ns: 0,
            query_time_ns: 0,
        };
        let mut scored: Option<(Vec<Point>, f64)> = None;
        match (&engine, cfg.algorithm) {
            (Engine::Sliding(l), _) => {
                let s = compute_solution(l, cfg.search, None)?;
                row.memory_floats = l.memory_floats();
                row.coreset_size = s.coreset_size;
                // a point is served if its proxy is: proxy cover radius plus proxy distance
                let eps = 4.0 * (1.0 + cfg.beta);
                let gamma = s.gamma_hat.unwrap_or(0.0);
                scored = Some((s.centers, (3.0 + 4.0 * eps) * s.rho_min + 4.0 * gamma));
            }
            (Engine::Eff(s), _) => {
                let e = s.estimate()?;
                row.memory_floats = s.memory_floats();
                row.coreset_size = e.coreset_size;
                row.eff_lower = Some(e.lower);
                row.eff_upper = Some(e.upper);
                row.eff_value = Some(e.raw_upper);
                row.saturated = e.saturated();
            }
            (Engine::Window, Algorithm::Charikar | Algorithm::SampCharikar) => {
                let sampling = (cfg.algorithm == Algorithm::SampCharikar)
                    .then_some((cfg.sample_size, cfg.seed.wrapping_add(t)));
                let s = charikar_with(&Euclidean, w, cfg.k, cfg.z, 1.0 + cfg.beta, cfg.search, sampling)?;
                scored = Some((s.centers, 3.0 * s.rho_min));
            }
            (Engine::Window, Algorithm::Gon) => {
                let centers = gonzalez(w, cfg.k);
                row.radius = Some(radius_excluding(&centers, w, cfg.z.min(w.len() - 1))?);
            }
            (Engine::Window, _) => {
                row.eff_value = Some(eff_sequential(w, cfg.alpha, cfg.bucket_step)?);
            }
        }
        let query_ns = start.elapsed().as_nanos() as u64;
        if let Some((centers, cover)) = scored {
            row.radius = Some(radius_excluding(&centers, w, cfg.z.min(w.len() - 1))?);
            row.uncovered_count = Some(uncovered(&centers, w, cover));
        }
        row.query_time_ns = query_ns;
        row.update_time_ns = median(&mut update_times);
        all_updates.append(&mut update_times);
        query_times.push(query_ns);
        writeln!(out, "{}", row.to_csv())?;
        rows.push(row);
    }
    out.flush()?;
    all_updates.append(&mut update_times);
    Ok(RunSummary {
        points: t,
        median_update_ns: median(&mut all_updates),
        median_query_ns: median(&mut query_times),
        rows,
    })
}

/// Reads `cfg.input`, injects outliers if requested and writes `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let prob = cfg.injection_probability();
    let norm = if prob > 0.0 {
        let diameter = match cfg.diameter {
            Some(d) => d,
            None => two_sweep_diameter(|| ingest(&cfg.input))?,
        };
        cfg.outlier_scale * diameter
    } else {
        0.0
    };
    let stream = inject_outliers(ingest(&cfg.input)?, prob, norm, cfg.seed);
    let out = File::create(&cfg.output).map_err(|e| Error::Io(format!("{}: {e}", cfg.output.display())))?;
    run_on(cfg, stream, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Vec<Result<Point>> {
        Ingest::new(s.as_bytes()).collect()
    }

    #[test]
    fn ingest_examples() {
        let pts: Vec<Point> = parse("1.0,2.0\n3.0,4.0").into_iter().map(|r| r.unwrap()).collect();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].coords(), &[3.0, 4.0]);
        assert_eq!(pts[1].arrival(), 2);
        assert!(parse("").is_empty());
        let pts = parse("x,y\n1 2\n\n3\t4\n");
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(Result::is_ok));
    }

    #[test]
    fn ingest_errors_carry_line_numbers() {
        let r = parse("1,2\n3,NaN\n");
        assert!(matches!(r[1], Err(Error::Parse { line: 2, .. })));
        let r = parse("1,2\n3\n");
        assert!(matches!(r[1], Err(Error::Parse { line: 2, .. })));
        let r = parse("1,2\n3,abc\n");
        assert!(matches!(r[1], Err(Error::Parse { line: 2, .. })));
    }

    fn grid_stream(n: u64) -> Vec<Result<Point>> {
        (1..=n).map(|t| Point::new(t, vec![t as f64, 0.0])).collect()
    }

    #[test]
    fn injection_examples() {
        let none: Vec<Point> = inject_outliers(grid_stream(50).into_iter(), 0.0, 10.0, 1)
            .map(|p| p.unwrap())
            .collect();
        let base: Vec<Point> = grid_stream(50).into_iter().map(|p| p.unwrap()).collect();
        assert_eq!(none, base);
        let all: Vec<Point> = inject_outliers(grid_stream(50).into_iter(), 1.0, 10.0, 1)
            .map(|p| p.unwrap())
            .collect();
        assert_eq!(all.len(), 100);
        assert!(all.iter().enumerate().all(|(i, p)| p.arrival() == i as u64 + 1));
        for p in all.iter().skip(1).step_by(2) {
            let norm = p.coords().iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn query_schedule() {
        let cfg = ExperimentConfig {
            query_every: 5,
            ..ExperimentConfig::new(Algorithm::Sliding, 5, 1, 1)
        };
        let s = run_on(&cfg, grid_stream(10), Vec::new()).unwrap();
        assert_eq!(s.rows.iter().map(|r| r.timestep).collect::<Vec<_>>(), vec![5, 10]);
    }

    #[test]
    fn gon_memory_is_whole_window() {
        let cfg = ExperimentConfig {
            query_every: 3,
            ..ExperimentConfig::new(Algorithm::Gon, 6, 2, 1)
        };
        let s = run_on(&cfg, grid_stream(12), Vec::new()).unwrap();
        assert!(s.rows.iter().all(|r| r.memory_floats == 12));
    }

    #[test]
    fn config_errors_before_streaming() {
        let mut cfg = ExperimentConfig::new(Algorithm::Sliding, 5, 3, 3);
        assert!(cfg.validate().is_err());
        cfg.z = 1;
        cfg.mode = LadderMode::Fixed { d_min: 2.0, d_max: 1.0 };
        assert!(cfg.validate().is_err());
        assert!("nope".parse::<Algorithm>().is_err());
        assert_eq!("samp-charikar".parse::<Algorithm>().unwrap(), Algorithm::SampCharikar);
        assert_eq!("auto".parse::<InjectProb>().unwrap(), InjectProb::Auto);
    }
}
