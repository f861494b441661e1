//! Spread and survival statistics: σ of a distribution, ensemble means,
//! log-log slopes, decoherence times and stretched-exponential fits.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coin::CoinKind;
use crate::engine::ProbabilityGrid;
use crate::error::{Error, Result};

/// Local log-log slope at or below which the walk counts as decohered:
/// midway between ballistic (1) and diffusive (1/2) spreading.
pub const DECOHERENCE_SLOPE: f64 = 0.75;

/// Default sliding-window width, in steps, for local slopes.
pub const DEFAULT_WINDOW: usize = 15;

/// Survival values closer than this to 0 or 1 are left out of a KWW fit.
pub const KWW_EPSILON: f64 = 1e-6;

/// Slack allowed when checking that a survival series never increases.
const MONOTONE_SLACK: f64 = 1e-12;

/// How σ treats absorbed probability.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum SigmaMode {
    /// Spread of the surviving walkers, `P / ΣP`.
    #[default]
    Conditional,
    /// Spread of the decaying distribution `P` as is.
    Raw,
}

impl SigmaMode {
    pub fn name(self) -> &'static str {
        match self {
            SigmaMode::Conditional => "conditional",
            SigmaMode::Raw => "raw",
        }
    }

    pub fn other(self) -> SigmaMode {
        match self {
            SigmaMode::Conditional => SigmaMode::Raw,
            SigmaMode::Raw => SigmaMode::Conditional,
        }
    }
}

impl fmt::Display for SigmaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SigmaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conditional" => Ok(SigmaMode::Conditional),
            "raw" => Ok(SigmaMode::Raw),
            _ => Err(Error::InvalidConfig(format!("unknown sigma mode `{s}`"))),
        }
    }
}

impl Serialize for SigmaMode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for SigmaMode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Zeroth, first and second position moments of a (possibly decayed)
/// distribution, accumulated in lattice order.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct Moments {
    pub mass: f64,
    pub sum_m: f64,
    pub sum_n: f64,
    pub sum_r2: f64,
}

impl Moments {
    #[inline]
    pub fn add(&mut self, m: i64, n: i64, p: f64) {
        let (m, n) = (m as f64, n as f64);
        self.mass += p;
        self.sum_m += p * m;
        self.sum_n += p * n;
        self.sum_r2 += p * (m * m + n * n);
    }

    pub fn of_grid(grid: &ProbabilityGrid) -> Moments {
        let mut acc = Moments::default();
        for (m, n, p) in grid.nonzero() {
            acc.add(m, n, p);
        }
        acc
    }

    /// Mean position `(⟨m⟩, ⟨n⟩)` of the surviving walkers.
    pub fn mean(&self) -> Option<(f64, f64)> {
        (self.mass > 0.0).then(|| (self.sum_m / self.mass, self.sum_n / self.mass))
    }

    /// `σ² = Σ P̃ (m² + n²) − (Σ P̃ m)² − (Σ P̃ n)²` with `P̃ = P / ΣP`
    /// (conditional) or `P̃ = P` (raw).
    pub fn sigma(&self, mode: SigmaMode) -> Option<f64> {
        let scale = match mode {
            SigmaMode::Conditional => {
                if self.mass <= 0.0 {
                    return None;
                }
                1.0 / self.mass
            }
            SigmaMode::Raw => 1.0,
        };
        let (mean_m, mean_n) = (self.sum_m * scale, self.sum_n * scale);
        let var = self.sum_r2 * scale - mean_m * mean_m - mean_n * mean_n;
        Some(var.max(0.0).sqrt())
    }
}

/// Standard deviation of the position distribution; `None` in conditional
/// mode when nothing survives.
pub fn sigma_of(grid: &ProbabilityGrid, mode: SigmaMode) -> Option<f64> {
    Moments::of_grid(grid).sigma(mode)
}

/// Provenance of a [`SigmaSeries`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    /// `None` for the classical baseline.
    pub coin: Option<CoinKind>,
    pub density: f64,
    pub ensemble_size: usize,
    pub seed: u64,
    pub mode: SigmaMode,
}

/// `σ(t)` for `t = 1..=T`, with the number of ensemble members that still
/// had surviving probability at each `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaSeries {
    values: Vec<Option<f64>>,
    survivors: Vec<usize>,
    meta: SeriesMeta,
}

impl SigmaSeries {
    pub fn new(values: Vec<Option<f64>>, survivors: Vec<usize>, meta: SeriesMeta) -> Self {
        assert_eq!(values.len(), survivors.len());
        SigmaSeries {
            values,
            survivors,
            meta,
        }
    }

    /// One walk: a member survives at `t` exactly when `σ(t)` is defined.
    pub fn single(values: Vec<Option<f64>>, meta: SeriesMeta) -> Self {
        let survivors = values.iter().map(|v| v.is_some() as usize).collect();
        SigmaSeries::new(values, survivors, meta)
    }

    /// From plain values, all defined. Mostly useful for synthetic input.
    pub fn from_values(values: &[f64], meta: SeriesMeta) -> Self {
        SigmaSeries::single(values.iter().copied().map(Some).collect(), meta)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn survivors(&self) -> &[usize] {
        &self.survivors
    }

    pub fn meta(&self) -> &SeriesMeta {
        &self.meta
    }

    /// `σ(t)`, `t ≥ 1`.
    pub fn at(&self, t: usize) -> Option<f64> {
        t.checked_sub(1).and_then(|i| self.values.get(i).copied().flatten())
    }

    /// `t,sigma,survivors` rows; an undefined σ is an empty field.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,sigma,survivors")?;
        for (i, (v, s)) in self.values.iter().zip(&self.survivors).enumerate() {
            match v {
                Some(v) => writeln!(out, "{},{},{}", i + 1, crate::fmt17(*v), s)?,
                None => writeln!(out, "{},,{}", i + 1, s)?,
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R, meta: SeriesMeta) -> Result<Self> {
        let mut values = Vec::new();
        let mut survivors = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<sigma series>", e))?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line == "t,sigma,survivors") {
                continue;
            }
            let bad = || Error::Parse {
                what: "sigma csv",
                line: lineno + 1,
                detail: line.to_string(),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 || f[0].parse::<usize>().ok() != Some(values.len() + 1) {
                return Err(bad());
            }
            values.push(if f[1].is_empty() {
                None
            } else {
                Some(f[1].parse::<f64>().map_err(|_| bad())?)
            });
            survivors.push(f[2].parse::<usize>().map_err(|_| bad())?);
        }
        Ok(SigmaSeries::new(values, survivors, meta))
    }
}

/// Pointwise mean `⟨σ⟩(t) = (1/M) Σ_r σ_r(t)` over members whose `σ_r(t)`
/// is defined, summed in member order.
pub fn ensemble_sigma(runs: &[SigmaSeries]) -> Result<SigmaSeries> {
    let first = runs.first().ok_or(Error::EmptyEnsemble)?;
    for run in runs {
        if run.len() != first.len() {
            return Err(Error::EnsembleMismatch(format!(
                "lengths {} and {}",
                first.len(),
                run.len()
            )));
        }
        let (a, b) = (&first.meta, &run.meta);
        if a.coin != b.coin || a.density != b.density || a.mode != b.mode || a.seed != b.seed {
            return Err(Error::EnsembleMismatch("metadata differs".into()));
        }
    }
    let mut values = Vec::with_capacity(first.len());
    let mut survivors = Vec::with_capacity(first.len());
    for i in 0..first.len() {
        let (mut sum, mut count) = (0.0, 0usize);
        for run in runs {
            if let Some(v) = run.values[i] {
                sum += v;
                count += 1;
            }
        }
        values.push((count > 0).then(|| sum / count as f64));
        survivors.push(count);
    }
    let meta = SeriesMeta {
        ensemble_size: runs.len(),
        ..first.meta.clone()
    };
    Ok(SigmaSeries::new(values, survivors, meta))
}

/// Least-squares line `y = slope·x + intercept`; returns
/// `(slope, intercept, rms residual)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    (slope, intercept, (ss / n).sqrt())
}

/// Slope of `log σ` against `log t` over `t ∈ [t1, t2]`.
pub fn loglog_slope(series: &SigmaSeries, t1: usize, t2: usize) -> Result<f64> {
    if t1 < 1 || t2 > series.len() || t2 < t1 || t2 - t1 + 1 < 5 {
        return Err(Error::InsufficientData(format!(
            "window [{t1}, {t2}] on a series of length {} (need ≥ 5 points)",
            series.len()
        )));
    }
    let mut xs = Vec::with_capacity(t2 - t1 + 1);
    let mut ys = Vec::with_capacity(t2 - t1 + 1);
    for t in t1..=t2 {
        match series.at(t) {
            Some(s) if s > 0.0 => {
                xs.push((t as f64).ln());
                ys.push(s.ln());
            }
            _ => {
                return Err(Error::InsufficientData(format!(
                    "σ({t}) is not positive"
                )))
            }
        }
    }
    Ok(fit_line(&xs, &ys).0)
}

/// Local slopes over sliding windows of `width` steps, keyed by the window
/// centre `t`.
pub fn local_slopes(series: &SigmaSeries, width: usize) -> Result<Vec<(usize, f64)>> {
    if width < 5 {
        return Err(Error::InsufficientData(format!("window width {width} < 5")));
    }
    if series.len() < width {
        return Err(Error::InsufficientData(format!(
            "series of length {} shorter than one window of {width}",
            series.len()
        )));
    }
    let half = width / 2;
    (1..=series.len() + 1 - width)
        .map(|start| {
            let slope = loglog_slope(series, start, start + width - 1)?;
            Ok((start + half, slope))
        })
        .collect()
}

/// Earliest window centre `t` at which the local log-log slope has dropped
/// to [`DECOHERENCE_SLOPE`] or below and stays there for every centre in
/// `(t, t + width]`. `None` when the walk never decoheres in the series.
pub fn decoherence_time(series: &SigmaSeries, window_width: usize) -> Result<Option<usize>> {
    decoherence_time_at(series, window_width, DECOHERENCE_SLOPE)
}

pub fn decoherence_time_at(series: &SigmaSeries, window_width: usize, threshold: f64) -> Result<Option<usize>> {
    let slopes = local_slopes(series, window_width)?;
    for (i, &(t, s)) in slopes.iter().enumerate() {
        if s > threshold {
            continue;
        }
        let persists = slopes[i + 1..]
            .iter()
            .take_while(|(u, _)| *u <= t + window_width)
            .all(|&(_, s)| s <= threshold);
        if persists {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Stretched exponential `S(t) = exp(−(t/τ)^β)`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KwwFit {
    pub tau: f64,
    pub beta: f64,
    /// RMS residual of the line fit in `(log t, log(−log S))` coordinates.
    pub residual: f64,
    /// Number of points used.
    pub points: usize,
}

/// `exp(−(t/τ)^β)` for `t = 1..=steps`.
pub fn kww_generate(tau: f64, beta: f64, steps: usize) -> Vec<f64> {
    (1..=steps)
        .map(|t| (-(t as f64 / tau).powf(beta)).exp())
        .collect()
}

/// Fits a stretched exponential to `survival[i] = S(i + 1)` by linear
/// regression of `log(−log S)` on `log t`. Points within [`KWW_EPSILON`] of
/// 0 or 1 are skipped.
pub fn kww_fit(survival: &[f64]) -> Result<KwwFit> {
    for (i, &s) in survival.iter().enumerate() {
        if !(s > 0.0 && s <= 1.0 + MONOTONE_SLACK) {
            return Err(Error::InvalidSurvival(format!("S({}) = {s} outside (0, 1]", i + 1)));
        }
    }
    if let Some(i) = survival.windows(2).position(|w| w[1] > w[0] + MONOTONE_SLACK) {
        return Err(Error::InvalidSurvival(format!("S increases at t = {}", i + 2)));
    }
    if survival.iter().all(|&s| s >= 1.0) {
        return Err(Error::NothingAbsorbed);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = survival
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > KWW_EPSILON && s < 1.0 - KWW_EPSILON)
        .map(|(i, &s)| (((i + 1) as f64).ln(), (-s.ln()).ln()))
        .unzip();
    if xs.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "{} usable survival points (need ≥ 5)",
            xs.len()
        )));
    }
    let (beta, intercept, residual) = fit_line(&xs, &ys);
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::InvalidSurvival(format!("fitted exponent {beta} is not positive")));
    }
    Ok(KwwFit {
        tau: (-intercept / beta).exp(),
        beta,
        residual,
        points: xs.len(),
    })
}
