//! Parameter sweeps over `(n, β, i, m)` emitting one metrics row per point.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::construction::build::{build_profiles, construct_from_profiles, Construction, Scheme, DEFAULT_MC_TRIALS};
use crate::construction::partition::{strong_sets, ConstructionParams, IndexPartition, ProfileSet};
use crate::construction::path::make_path;
use crate::error::{Error, Result};
use crate::eval::bounds::{bler_upper_bound, leakage_upper_bound};
use crate::rng::{derive_seed, Component};
use crate::session::{run_session_with, SessionConfig};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

/// Corner parameter `i` of the path `0^i 1^N 0^{N-i}`, possibly relative to `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathParam {
    Index(usize),
    /// `i = N`.
    #[default]
    Full,
    /// `i = N·num/den`, which must be an integer.
    Fraction(usize, usize),
}

impl PathParam {
    pub fn resolve(&self, n: u32) -> Result<usize> {
        let len = 1usize << n;
        match *self {
            PathParam::Index(i) => Ok(i),
            PathParam::Full => Ok(len),
            PathParam::Fraction(num, den) => {
                if den == 0 || num > den || (len * num) % den != 0 {
                    return Err(Error::InvalidInput(format!(
                        "path fraction {num}/{den} not integral at N = {len}"
                    )));
                }
                Ok(len * num / den)
            }
        }
    }
}

impl fmt::Display for PathParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathParam::Index(i) => write!(f, "{i}"),
            PathParam::Full => write!(f, "N"),
            PathParam::Fraction(a, b) => write!(f, "{a}/{b}"),
        }
    }
}

impl FromStr for PathParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("path parameter {s:?}: expected an integer, N, or a/b"));
        let s = s.trim();
        if s == "N" {
            return Ok(PathParam::Full);
        }
        if let Some((a, b)) = s.split_once('/') {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            return Ok(PathParam::Fraction(a, b));
        }
        s.parse().map(PathParam::Index).map_err(|_| bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub n: u32,
    pub beta: f64,
    pub path: PathParam,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub channel: ChannelParams,
    pub ns: Vec<u32>,
    pub betas: Vec<f64>,
    pub paths: Vec<PathParam>,
    pub ms: Vec<usize>,
    /// Sessions per point for the empirical block error rate; 0 skips it.
    pub trials: u64,
    pub scheme: Scheme,
    pub mc_trials: u64,
    pub seed: u64,
    /// Fill `wall_time`; off by default so output is reproducible.
    pub timing: bool,
}

impl SweepGrid {
    pub fn new(channel: ChannelParams) -> Self {
        Self {
            channel,
            ns: vec![],
            betas: vec![],
            paths: vec![PathParam::Full],
            ms: vec![1],
            trials: 0,
            scheme: Scheme::Strong,
            mc_trials: DEFAULT_MC_TRIALS,
            seed: 0,
            timing: false,
        }
    }

    /// Grid points in output order: `n` outermost, then `β`, path, `m`.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &n in &self.ns {
            for &beta in &self.betas {
                for &path in &self.paths {
                    for &m in &self.ms {
                        out.push(GridPoint { n, beta, path, m });
                    }
                }
            }
        }
        out
    }
}

/// One CSV row. Missing values serialize as empty fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub n: u32,
    pub beta: f64,
    pub m: usize,
    pub path_i: Option<usize>,
    /// Bits.
    pub leakage_bound: Option<f64>,
    pub bler_bound: Option<f64>,
    pub empirical_bler: Option<f64>,
    pub bler_ci_low: Option<f64>,
    pub bler_ci_high: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub sum_rate: Option<f64>,
    pub trials: u64,
    /// Seconds.
    pub wall_time: Option<f64>,
    /// `ok`, or the error that stopped the point.
    pub status: String,
}

pub const CSV_COLUMNS: [&str; 15] = [
    "n",
    "beta",
    "m",
    "path_i",
    "leakage_bound",
    "bler_bound",
    "empirical_bler",
    "bler_ci_low",
    "bler_ci_high",
    "r1",
    "r2",
    "sum_rate",
    "trials",
    "wall_time",
    "status",
];

impl MetricsRow {
    fn empty(p: &GridPoint) -> Self {
        Self {
            n: p.n,
            beta: p.beta,
            m: p.m,
            path_i: None,
            leakage_bound: None,
            bler_bound: None,
            empirical_bler: None,
            bler_ci_low: None,
            bler_ci_high: None,
            r1: None,
            r2: None,
            sum_rate: None,
            trials: 0,
            wall_time: None,
            status: "ok".into(),
        }
    }
}

/// Wilson score interval at 95% for `failures` out of `trials`.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if failures == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// Session failures out of `trials` independent sessions on `c`.
pub fn empirical_failures(c: &Construction, scheme: Scheme, trials: u64, seed: u64) -> Result<u64> {
    let outcomes: Vec<Result<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut cfg = SessionConfig::new(c.params.clone(), c.m, derive_seed(seed, Component::Session, t));
            cfg.scheme = scheme;
            run_session_with(&cfg, c).map(|tr| !tr.success)
        })
        .collect();
    let mut failures = 0;
    for o in outcomes {
        failures += o? as u64;
    }
    Ok(failures)
}

fn fill_bounds(
    row: &mut MetricsRow,
    p: &impl IndexPartition,
    params: &ConstructionParams,
    profiles: &ProfileSet,
    m: usize,
) {
    row.leakage_bound = leakage_upper_bound(&profiles.eve, &params.path, p, m).ok();
    row.bler_bound = bler_upper_bound(&profiles.legit, p, m).ok();
}

fn evaluate(grid: &SweepGrid, point: &GridPoint, seed: u64, row: &mut MetricsRow) -> Result<()> {
    let i = point.path.resolve(point.n)?;
    row.path_i = Some(i);
    let params = ConstructionParams::new(point.n, point.beta, grid.channel, make_path(i, point.n)?)?;
    let profiles = build_profiles(&params, grid.mc_trials, seed)?;
    if grid.scheme == Scheme::Strong {
        // Bounds stay available when the chained partition is infeasible.
        let raw = strong_sets(&params, &profiles)?;
        fill_bounds(row, &raw, &params, &profiles, point.m);
    }
    let c = construct_from_profiles(&params, grid.scheme, point.m, profiles)?;
    fill_bounds(row, &c.partition, &c.params, &c.profiles, point.m);
    row.r1 = Some(c.rates.r1);
    row.r2 = Some(c.rates.r2);
    row.sum_rate = Some(c.rates.sum_rate);
    if grid.trials > 0 {
        let failures = empirical_failures(
            &c,
            grid.scheme,
            grid.trials,
            derive_seed(seed, Component::Session, u64::MAX >> 8),
        )?;
        let (lo, hi) = wilson_interval(failures, grid.trials);
        row.trials = grid.trials;
        row.empirical_bler = Some(failures as f64 / grid.trials as f64);
        row.bler_ci_low = Some(lo);
        row.bler_ci_high = Some(hi);
    }
    Ok(())
}

pub fn evaluate_point(grid: &SweepGrid, index: usize, point: &GridPoint) -> MetricsRow {
    let start = Instant::now();
    let mut row = MetricsRow::empty(point);
    if let Err(e) = evaluate(
        grid,
        point,
        derive_seed(grid.seed, Component::SweepPoint, index as u64),
        &mut row,
    ) {
        row.status = e.to_string();
    }
    if grid.timing {
        row.wall_time = Some(start.elapsed().as_secs_f64());
    }
    row
}

/// Evaluates every grid point; failures are recorded in the row's status.
pub fn run_sweep(grid: &SweepGrid) -> Vec<MetricsRow> {
    let points = grid.points();
    points
        .par_iter()
        .enumerate()
        .map(|(k, p)| evaluate_point(grid, k, p))
        .collect()
}

pub fn write_csv<W: std::io::Write>(rows: &[MetricsRow], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidInput(format!("writing csv: {e}"));
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("writing csv: {e}")))
}

pub fn sweep_csv(grid: &SweepGrid) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&run_sweep(grid), &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SweepGrid {
        SweepGrid::new(ChannelParams::new(0.2, 0.3, 0.4).unwrap())
    }

    #[test]
    fn empty_grid_is_header_only() {
        let csv = sweep_csv(&base()).unwrap();
        assert_eq!(csv, format!("{}\n", CSV_COLUMNS.join(",")));
    }

    #[test]
    fn path_param_parsing() {
        assert_eq!("N".parse::<PathParam>().unwrap(), PathParam::Full);
        assert_eq!("7".parse::<PathParam>().unwrap(), PathParam::Index(7));
        assert_eq!("1/2".parse::<PathParam>().unwrap().resolve(3).unwrap(), 4);
        assert!("1/3".parse::<PathParam>().unwrap().resolve(3).is_err());
        assert!("x".parse::<PathParam>().is_err());
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.03699).abs() < 1e-4, "{hi}");
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
    }

    #[test]
    fn failing_point_is_recorded_in_row() {
        let mut s = base();
        s.ns = vec![8, 10];
        s.betas = vec![0.3];
        s.paths = vec![PathParam::Index(1000), PathParam::Full];
        let rows = run_sweep(&s);
        assert_eq!(rows.len(), 4);
        assert!(rows[0].status.contains("invalid input"));
        assert!(rows[0].leakage_bound.is_none());
        // Chaining is infeasible here; bounds come from the raw sets.
        assert!(rows[1].leakage_bound.is_some());
        for r in &rows {
            if let Some(b) = r.bler_bound {
                assert!((0.0..=1.0).contains(&b));
            }
        }
    }

    #[test]
    fn csv_is_deterministic() {
        let mut s = base();
        s.channel = ChannelParams::new(0.5, 0.3, 0.6).unwrap();
        s.ns = vec![8];
        s.betas = vec![0.3];
        s.trials = 20;
        s.seed = 11;
        let a = sweep_csv(&s).unwrap();
        assert_eq!(a, sweep_csv(&s).unwrap());
        assert_eq!(a.lines().count(), 2);
    }
}
