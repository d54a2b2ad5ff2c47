//! Monte Carlo sweeps over `(n, C)`, threshold fits, the density-gap demo,
//! configuration parsing, and CSV/SVG output.
//!
//! Every trial draws from streams keyed by `(master_seed, n, C, trial)`, so
//! results do not depend on the number of worker threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::bounds::simple_connectivity_radius;
use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::generator::generate_graph;
use crate::model::{sample_points, Kernel};
use crate::rng::{domain, stream_key, CounterRng};
use crate::stats::{wilson_interval, Proportion, Z95};
use crate::temporal::{is_temporally_connected, longest_increasing_walk, temporal_reach};
use crate::unionfind::is_connected;

pub const DEFAULT_C_GRID: [f64; 9] = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];

pub const SWEEP_CSV_HEADER: &str = "n,d,C,r,trials,temp_conn,simple_conn,typ_source,typ_pair,mean_walk,ci_lo,ci_hi";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Generate,
    Analyze,
    Sweep,
    Percolate,
    Bounds,
    Couple,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "generate" => Mode::Generate,
            "analyze" => Mode::Analyze,
            "sweep" => Mode::Sweep,
            "percolate" => Mode::Percolate,
            "bounds" => Mode::Bounds,
            "couple" => Mode::Couple,
            other => return Err(Error::param("mode", format!("unknown mode `{other}`"))),
        })
    }
}

/// Parse `hard`, `alpha:<a>` or `soft:<a>,<b>`.
pub fn parse_kernel(spec: &str, d: usize) -> Result<Kernel> {
    let bad = || Error::param("kernel", format!("expected hard, alpha:<a> or soft:<a>,<b>, got `{spec}`"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    match spec.split_once(':') {
        None if spec == "hard" => Ok(Kernel::Hard),
        Some(("alpha", a)) => Kernel::alpha_hard(num(a)?),
        Some(("soft", rest)) => {
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            Kernel::soft_tail(num(a)?, num(b)?, d)
        }
        _ => Err(bad()),
    }
}

/// Settings shared by every mode. Missing keys take the defaults of
/// [`ExperimentConfig::default`], except `seed`, which must be given.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub d: usize,
    pub n: Vec<u64>,
    pub kernel: String,
    pub c_grid: Vec<f64>,
    pub r: Option<f64>,
    pub trials: u64,
    pub seed: Option<u64>,
    pub eps: f64,
    pub t: f64,
    pub c: f64,
    pub alpha: f64,
    pub workers: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: None,
            d: 2,
            n: vec![1000],
            kernel: "hard".into(),
            c_grid: DEFAULT_C_GRID.to_vec(),
            r: None,
            trials: 100,
            seed: None,
            eps: 0.2,
            t: 0.01,
            c: 8.0,
            alpha: 1.0,
            workers: 1,
            out: PathBuf::from("out"),
        }
    }
}

/// Parse flat `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str, path: &Path) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            reason: format!("expected key=value, got `{line}`"),
        })?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

fn parse_list<T: std::str::FromStr>(name: &'static str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| Error::param(name, format!("bad list entry `{s}`"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(name: &'static str, v: &str) -> Result<T> {
    v.trim().parse::<T>().map_err(|_| Error::param(name, format!("cannot parse `{v}`")))
}

impl ExperimentConfig {
    /// Apply `key -> value` settings on top of `self`.
    pub fn apply(mut self, pairs: &BTreeMap<String, String>) -> Result<Self> {
        for (k, v) in pairs {
            match k.as_str() {
                "mode" => self.mode = Some(v.parse()?),
                "d" => self.d = parse_one("d", v)?,
                "n" => self.n = parse_list("n", v)?,
                "kernel" => self.kernel = v.clone(),
                "c-grid" => self.c_grid = parse_list("c-grid", v)?,
                "r" => self.r = Some(parse_one("r", v)?),
                "trials" => self.trials = parse_one("trials", v)?,
                "seed" => self.seed = Some(parse_one("seed", v)?),
                "eps" => self.eps = parse_one("eps", v)?,
                "t" => self.t = parse_one("t", v)?,
                "c" => self.c = parse_one("c", v)?,
                "alpha" => self.alpha = parse_one("alpha", v)?,
                "workers" => self.workers = parse_one("workers", v)?,
                "out" => self.out = PathBuf::from(v),
                other => return Err(Error::InvalidParameter { name: "config", reason: format!("unknown key `{other}`") }),
            }
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::param("d", "must be at least 2"));
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return Err(Error::param("n", "need at least one positive n"));
        }
        if self.c_grid.is_empty() || self.c_grid.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(Error::param("c-grid", "need positive finite values"));
        }
        if self.c_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("c-grid", "must be strictly increasing"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        if self.seed.is_none() {
            return Err(Error::param("seed", "a master seed is required"));
        }
        if self.workers == 0 {
            return Err(Error::param("workers", "must be at least 1"));
        }
        parse_kernel(&self.kernel, self.d)?;
        Ok(())
    }

    pub fn kernel(&self) -> Result<Kernel> {
        parse_kernel(&self.kernel, self.d)
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::param("seed", "a master seed is required"))
    }
}

/// Seed of trial `trial` at grid point `(n, C)`.
pub fn trial_seed(master: u64, n: u64, c: f64, trial: u64) -> u64 {
    stream_key(stream_key(master, n, c.to_bits()), domain::TRIAL, trial)
}

/// Indicators measured on one graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub temporally_connected: bool,
    pub simply_connected: bool,
    /// A uniformly chosen vertex reaches every vertex.
    pub typical_source: bool,
    /// The same vertex reaches a second uniformly chosen vertex.
    pub typical_pair: bool,
    pub longest_walk: usize,
}

/// Sample and measure one graph with `n` uniform points.
pub fn run_trial(n: usize, d: usize, kernel: &Kernel, r: f64, seed: u64) -> Result<TrialOutcome> {
    let pts = sample_points(n, d, &mut CounterRng::new(seed, domain::POINTS, 0))?;
    let g = generate_graph(&pts, kernel, r, seed)?;
    let net = g.network();
    let mut pick = CounterRng::new(seed, domain::PICK, 0);
    let (typical_source, typical_pair) = if n >= 2 {
        let s = pick.next_index(n);
        let mut v = pick.next_index(n - 1);
        if v >= s {
            v += 1;
        }
        let reach = temporal_reach(net, s)?;
        (reach.reaches_all(), reach.reachable[v])
    } else {
        (true, true)
    };
    // a failed probe source already rules out temporal connectivity
    let temporally_connected = typical_source && is_temporally_connected(net);
    Ok(TrialOutcome {
        temporally_connected,
        simply_connected: is_connected(net),
        typical_source,
        typical_pair,
        longest_walk: longest_increasing_walk(net),
    })
}

/// One `(n, C)` grid point. Rows with `r > 1/2` are skipped: `trials = 0` and
/// every statistic is NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub d: usize,
    pub c: f64,
    pub r: f64,
    pub trials: u64,
    pub temp_conn: f64,
    pub simple_conn: f64,
    pub typ_source: f64,
    pub typ_pair: f64,
    pub mean_walk: f64,
    /// Wilson interval of `temp_conn`.
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl SweepRow {
    pub fn skipped(&self) -> bool {
        self.trials == 0
    }

    /// Number of temporally connected trials.
    pub fn temp_conn_count(&self) -> u64 {
        (self.temp_conn * self.trials as f64).round() as u64
    }

    fn from_outcomes(n: u64, d: usize, c: f64, r: f64, outs: &[TrialOutcome]) -> Self {
        let trials = outs.len() as u64;
        let count = |f: fn(&TrialOutcome) -> bool| outs.iter().filter(|o| f(o)).count() as u64;
        let frac = |k: u64| k as f64 / trials as f64;
        let tc = count(|o| o.temporally_connected);
        let (ci_lo, ci_hi) = wilson_interval(tc, trials, Z95);
        let walk_sum: u64 = outs.iter().map(|o| o.longest_walk as u64).sum();
        Self {
            n,
            d,
            c,
            r,
            trials,
            temp_conn: frac(tc),
            simple_conn: frac(count(|o| o.simply_connected)),
            typ_source: frac(count(|o| o.typical_source)),
            typ_pair: frac(count(|o| o.typical_pair)),
            mean_walk: walk_sum as f64 / trials as f64,
            ci_lo,
            ci_hi,
        }
    }

    fn skipped_row(n: u64, d: usize, c: f64, r: f64) -> Self {
        let nan = f64::NAN;
        Self { n, d, c, r, trials: 0, temp_conn: nan, simple_conn: nan, typ_source: nan, typ_pair: nan, mean_walk: nan, ci_lo: nan, ci_hi: nan }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn rows_for(&self, n: u64) -> Vec<&SweepRow> {
        let mut rows: Vec<&SweepRow> = self.rows.iter().filter(|r| r.n == n && !r.skipped()).collect();
        rows.sort_by(|a, b| a.c.total_cmp(&b.c));
        rows
    }
}

/// Run `trials` graphs at every `(n, C)` with `r = C n^{-1/(d+1)}` on a pool of
/// `cfg.workers` threads.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let kernel = cfg.kernel()?;
    let master = cfg.seed()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::param("workers", e.to_string()))?;
    let mut rows = Vec::new();
    for &n in &cfg.n {
        for &c in &cfg.c_grid {
            let r = c * (n as f64).powf(-1.0 / (cfg.d as f64 + 1.0));
            if r > 0.5 {
                rows.push(SweepRow::skipped_row(n, cfg.d, c, r));
                continue;
            }
            let outs: Vec<TrialOutcome> = pool.install(|| {
                (0..cfg.trials)
                    .into_par_iter()
                    .map(|k| run_trial(n as usize, cfg.d, &kernel, r, trial_seed(master, n, c, k)))
                    .collect::<Result<_>>()
            })?;
            rows.push(SweepRow::from_outcomes(n, cfg.d, c, r, &outs));
        }
    }
    Ok(SweepResult { rows })
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        let fields = [
            r.n.to_string(),
            r.d.to_string(),
            g17(r.c),
            g17(r.r),
            r.trials.to_string(),
            g17(r.temp_conn),
            g17(r.simple_conn),
            g17(r.typ_source),
            g17(r.typ_pair),
            g17(r.mean_walk),
            g17(r.ci_lo),
            g17(r.ci_hi),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_sweep_csv(text: &str) -> Result<SweepResult> {
    let path = PathBuf::from("<sweep csv>");
    let err = |line: usize, reason: String| Error::Parse { path: path.clone(), line, reason };
    let mut lines = text.lines();
    if lines.next() != Some(SWEEP_CSV_HEADER) {
        return Err(err(1, "unexpected header".into()));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 12 {
            return Err(err(i + 2, format!("expected 12 fields, found {}", f.len())));
        }
        let real = |k: usize| f[k].parse::<f64>().map_err(|_| err(i + 2, format!("bad number `{}`", f[k])));
        let int = |k: usize| f[k].parse::<u64>().map_err(|_| err(i + 2, format!("bad integer `{}`", f[k])));
        rows.push(SweepRow {
            n: int(0)?,
            d: int(1)? as usize,
            c: real(2)?,
            r: real(3)?,
            trials: int(4)?,
            temp_conn: real(5)?,
            simple_conn: real(6)?,
            typ_source: real(7)?,
            typ_pair: real(8)?,
            mean_walk: real(9)?,
            ci_lo: real(10)?,
            ci_hi: real(11)?,
        });
    }
    Ok(SweepResult { rows })
}

pub fn emit_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, sweep_csv(result))?;
    Ok(())
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Temporal (solid) and simple (dashed) connectivity fractions against `C`, one colour per `n`.
pub fn svg_plot(result: &SweepResult) -> String {
    let (w, h, m) = (640.0, 420.0, 50.0);
    let rows: Vec<&SweepRow> = result.rows.iter().filter(|r| !r.skipped()).collect();
    let c_max = rows.iter().map(|r| r.c).fold(0.0, f64::max).max(1e-9);
    let x = |c: f64| m + (w - 2.0 * m) * c / c_max;
    let y = |f: f64| h - m - (h - 2.0 * m) * f;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<line x1="{m}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, h - m, w - m, h - m);
    let _ = writeln!(s, r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{}" stroke="black"/>"#, h - m);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">C</text>"#, w / 2.0, h - 12.0);
    let _ = writeln!(s, r#"<text x="14" y="{}" font-size="14" transform="rotate(-90 14 {})">fraction connected</text>"#, h / 2.0, h / 2.0);
    for tick in [0.0, 0.5, 1.0] {
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{tick}</text>"#, m - 6.0, y(tick) + 4.0);
    }
    let mut ns: Vec<u64> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for (i, &n) in ns.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let these = result.rows_for(n);
        for (field, dash) in [(0usize, ""), (1, r#" stroke-dasharray="5,4""#)] {
            let pts: Vec<String> = these
                .iter()
                .map(|r| format!("{:.2},{:.2}", x(r.c), y(if field == 0 { r.temp_conn } else { r.simple_conn })))
                .collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="2"{dash} points="{}"/>"#, pts.join(" "));
        }
        for r in &these {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{colour}"/>"#, x(r.c), y(r.temp_conn));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" fill="{colour}">n = {n}</text>"#, w - m - 90.0, m + 16.0 * i as f64);
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_svg_plot(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, svg_plot(result))?;
    Ok(())
}

/// Crossing of the temporal-connectivity fraction through 1/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdFit {
    pub n: u64,
    pub c50: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

fn clamped_logit(k: u64, trials: u64) -> f64 {
    let p = (k as f64 + 0.5) / (trials as f64 + 1.0);
    (p / (1.0 - p)).ln()
}

/// Crossing point from `(C, successes, trials)` sorted by `C`.
fn crossing(points: &[(f64, u64, u64)]) -> Option<f64> {
    let above = |&(_, k, t): &(f64, u64, u64)| 2 * k > t;
    let below = |&(_, k, t): &(f64, u64, u64)| 2 * k < t;
    let Some(j) = points.iter().position(above) else {
        return half_plateau(points);
    };
    let Some(i) = points[..j].iter().rposition(below) else {
        return half_plateau(&points[..j]);
    };
    if j > i + 1 {
        // rows exactly at one half between the bracket
        return Some(0.5 * (points[i + 1].0 + points[j - 1].0));
    }
    let (c0, l0) = (points[i].0, clamped_logit(points[i].1, points[i].2));
    let (c1, l1) = (points[j].0, clamped_logit(points[j].1, points[j].2));
    Some(c0 + (c1 - c0) * (0.0 - l0) / (l1 - l0))
}

fn half_plateau(points: &[(f64, u64, u64)]) -> Option<f64> {
    let halves: Vec<f64> = points.iter().filter(|p| 2 * p.1 == p.2).map(|p| p.0).collect();
    match (halves.first(), halves.last()) {
        (Some(a), Some(b)) => Some(0.5 * (a + b)),
        _ => None,
    }
}

pub const BOOTSTRAP_REPS: u64 = 1000;

/// Logit-scale interpolation between the grid points bracketing 1/2, with a
/// percentile bootstrap over resampled trials.
pub fn fit_threshold(sweep: &SweepResult, n: u64, seed: u64) -> Result<ThresholdFit> {
    let points: Vec<(f64, u64, u64)> = sweep.rows_for(n).iter().map(|r| (r.c, r.temp_conn_count(), r.trials)).collect();
    let no_bracket = |reason: &str| Error::NoBracket { n, reason: reason.into() };
    if points.is_empty() {
        return Err(no_bracket("no rows for this n"));
    }
    let c50 = crossing(&points).ok_or_else(|| {
        if points.iter().all(|p| 2 * p.1 < p.2) {
            no_bracket("every fraction is below 1/2")
        } else {
            no_bracket("every fraction is above 1/2")
        }
    })?;
    let mut reps: Vec<f64> = (0..BOOTSTRAP_REPS)
        .into_par_iter()
        .filter_map(|b| {
            let mut rng = CounterRng::new(seed, domain::BOOTSTRAP, stream_key(n, b, 0));
            let resampled: Vec<(f64, u64, u64)> = points
                .iter()
                .map(|&(c, k, t)| {
                    let p = k as f64 / t as f64;
                    let k2 = (0..t).filter(|_| rng.next_f64() < p).count() as u64;
                    (c, k2, t)
                })
                .collect();
            crossing(&resampled)
        })
        .collect();
    reps.sort_by(f64::total_cmp);
    let (lo, hi) = if reps.is_empty() {
        (points[0].0, points[points.len() - 1].0)
    } else {
        let q = |f: f64| reps[((f * (reps.len() - 1) as f64).round() as usize).min(reps.len() - 1)];
        (q(0.025), q(0.975))
    };
    Ok(ThresholdFit { n, c50, ci_lo: lo.min(c50), ci_hi: hi.max(c50) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub d: usize,
    /// `(n, C50, r50)` per fit.
    pub points: Vec<(u64, f64, f64)>,
    pub slope: f64,
    /// 95% band of the slope (Student t); NaN with only two points of freedom.
    pub slope_lo: f64,
    pub slope_hi: f64,
    pub c50_ratio: f64,
    pub pass: bool,
}

pub const SLOPE_TOLERANCE: f64 = 0.05;
pub const MAX_C50_RATIO: f64 = 1.25;

/// Log-log slope of `r50 = C50 n^{-1/(d+1)}` against `n`, and the spread of `C50`.
pub fn scaling_check(fits: &[ThresholdFit], d: usize) -> Result<ScalingReport> {
    if fits.len() < 3 {
        return Err(Error::param("fits", "need at least three values of n"));
    }
    let n_min = fits.iter().map(|f| f.n).min().unwrap_or(0) as f64;
    let n_max = fits.iter().map(|f| f.n).max().unwrap_or(0) as f64;
    if n_max < 4.0 * n_min {
        return Err(Error::param("fits", "values of n must span at least a factor of 4"));
    }
    let e = 1.0 / (d as f64 + 1.0);
    let points: Vec<(u64, f64, f64)> = fits.iter().map(|f| (f.n, f.c50, f.c50 * (f.n as f64).powf(-e))).collect();
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.2.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let (slope_lo, slope_hi) = if k > 2.0 {
        let se = (resid / (k - 2.0) / sxx).sqrt();
        let tq = StudentsT::new(0.0, 1.0, k - 2.0).map(|t| t.inverse_cdf(0.975)).unwrap_or(f64::NAN);
        (slope - tq * se, slope + tq * se)
    } else {
        (f64::NAN, f64::NAN)
    };
    let cmax = points.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    let cmin = points.iter().map(|p| p.1).fold(f64::MAX, f64::min);
    let c50_ratio = cmax / cmin;
    let pass = (slope + e).abs() <= SLOPE_TOLERANCE && c50_ratio <= MAX_C50_RATIO;
    Ok(ScalingReport { d, points, slope, slope_lo, slope_hi, c50_ratio, pass })
}

#[derive(Clone, Copy, Debug)]
pub struct GapReport {
    pub n: u64,
    pub r: f64,
    pub simple: Proportion,
    pub temporal: Proportion,
}

impl GapReport {
    /// Simple connectivity at least 0.9 while temporal connectivity is at most 0.1.
    pub fn gap_shown(&self) -> bool {
        self.simple.estimate >= 0.9 && self.temporal.estimate <= 0.1
    }
}

/// Connectivity fractions of the hard-kernel graph at radius `r`.
pub fn connectivity_at_radius(n: u64, d: usize, r: f64, trials: u64, seed: u64) -> Result<GapReport> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let outs: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|k| run_trial(n as usize, d, &Kernel::Hard, r, trial_seed(seed, n, r, k)))
        .collect::<Result<_>>()?;
    let count = |f: fn(&TrialOutcome) -> bool| outs.iter().filter(|o| f(o)).count() as u64;
    Ok(GapReport {
        n,
        r,
        simple: Proportion::new(count(|o| o.simply_connected), trials),
        temporal: Proportion::new(count(|o| o.temporally_connected), trials),
    })
}

/// Connectivity fractions at twice the simple-connectivity radius.
pub fn gap_demo(n: u64, d: usize, trials: u64, seed: u64) -> Result<GapReport> {
    connectivity_at_radius(n, d, 2.0 * simple_connectivity_radius(n, d), trials, seed)
}
