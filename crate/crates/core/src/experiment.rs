//! Sweeps over `(coin, density, ensemble member)` and their on-disk outputs.
//!
//! Member `r` of every `(coin, p)` ensemble walks on
//! `generate_traps(T + 1, p, seed, r)`; nothing else in a member is random.
//! Members run in parallel, but every reduction (mean σ, mean survival, mean
//! snapshot grids) folds member results in index order, so outputs are
//! bit-identical for any thread count.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::{coin_matrix, initial_state, CoinKind};
use crate::engine::{measure, ProbabilityGrid, WalkerState};
use crate::error::{Error, Result};
use crate::stats::{
    decoherence_time, ensemble_sigma, kww_fit, KwwFit, SeriesMeta, SigmaMode, SigmaSeries, DEFAULT_WINDOW,
};
use crate::traps::generate_traps;

/// Trap densities of the reference figure set.
pub const REFERENCE_DENSITIES: [f64; 5] = [0.0, 0.01, 0.1, 0.25, 0.5];
pub const REFERENCE_STEPS: usize = 100;
pub const REFERENCE_ENSEMBLE: usize = 250;

/// Members simulated per parallel batch; bounds peak memory when snapshots
/// are kept.
const BATCH_PER_THREAD: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub coins: Vec<CoinKind>,
    pub densities: Vec<f64>,
    pub steps: usize,
    /// Ensemble size `M`.
    pub ensemble: usize,
    pub seed: u64,
    pub sigma_mode: SigmaMode,
    pub out_dir: PathBuf,
    /// Times at which ensemble-mean probability grids are written.
    pub snapshot_at: Vec<usize>,
    /// Worker threads; `None` uses every available core.
    pub threads: Option<usize>,
    pub emit_svg: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig::reference_preset()
    }
}

impl SweepConfig {
    /// Three coins, `p ∈ {0, 0.01, 0.1, 0.25, 0.5}`, `T = 100`, `M = 250`.
    pub fn reference_preset() -> Self {
        SweepConfig {
            coins: CoinKind::ALL.to_vec(),
            densities: REFERENCE_DENSITIES.to_vec(),
            steps: REFERENCE_STEPS,
            ensemble: REFERENCE_ENSEMBLE,
            seed: 1,
            sigma_mode: SigmaMode::Conditional,
            out_dir: PathBuf::from("results"),
            snapshot_at: vec![REFERENCE_STEPS],
            threads: None,
            emit_svg: false,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_reader(BufReader::new(file))?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.steps < 1 {
            return bad("steps must be at least 1".into());
        }
        if self.ensemble < 1 {
            return bad("ensemble size must be at least 1".into());
        }
        if self.coins.is_empty() {
            return bad("no coins selected".into());
        }
        if self.densities.is_empty() {
            return bad("no densities selected".into());
        }
        if let Some(p) = self.densities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("density {p} outside [0, 1]"));
        }
        if let Some(t) = self.snapshot_at.iter().find(|&&t| t > self.steps) {
            return bad(format!("snapshot time {t} beyond {} steps", self.steps));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }
}

/// Token used for a density in file names: `0`, `0.01`, `0.25`, ...
pub fn density_label(p: f64) -> String {
    format!("p{p}")
}

pub fn sigma_file_name(coin: CoinKind, p: f64) -> String {
    format!("sigma_{coin}_{}.csv", density_label(p))
}

pub fn survival_file_name(coin: CoinKind, p: f64) -> String {
    format!("survival_{coin}_{}.csv", density_label(p))
}

pub fn snapshot_file_name(coin: CoinKind, p: f64, t: usize) -> String {
    format!("snapshot_{coin}_{}_t{t}.csv", density_label(p))
}

/// Everything one ensemble member contributes.
#[derive(Clone, Debug)]
pub struct MemberResult {
    /// `σ(t)` for `t = 1..=T` in the selected mode, then in the other one.
    pub sigma: Vec<Option<f64>>,
    pub sigma_alt: Vec<Option<f64>>,
    /// `S(t)` for `t = 0..=T`.
    pub survival: Vec<f64>,
    pub snapshots: Vec<ProbabilityGrid>,
}

/// Walks member `r` of the `(coin, p)` ensemble.
pub fn run_member(
    coin: CoinKind,
    density: f64,
    steps: usize,
    seed: u64,
    r: u64,
    mode: SigmaMode,
    snapshot_at: &[usize],
) -> Result<MemberResult> {
    let half_width = steps + 1;
    let mask = generate_traps(half_width, density, seed, r)?;
    let matrix = coin_matrix(coin);
    let mut state = WalkerState::at_origin(half_width, initial_state(coin));

    let mut out = MemberResult {
        sigma: Vec::with_capacity(steps),
        sigma_alt: Vec::with_capacity(steps),
        survival: Vec::with_capacity(steps + 1),
        snapshots: Vec::with_capacity(snapshot_at.len()),
    };
    let observe = |state: &WalkerState, out: &mut MemberResult| {
        let moments = state.moments();
        out.survival.push(moments.mass);
        if state.time() > 0 {
            out.sigma.push(moments.sigma(mode));
            out.sigma_alt.push(moments.sigma(mode.other()));
        }
        if snapshot_at.contains(&state.time()) {
            out.snapshots.push(measure(state));
        }
    };
    observe(&state, &mut out);
    for _ in 0..steps {
        state.step(&matrix, &mask)?;
        observe(&state, &mut out);
    }
    Ok(out)
}

/// Ensemble aggregate for one `(coin, p)`.
#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub coin: CoinKind,
    pub density: f64,
    /// `⟨σ⟩(t)` in the selected mode and in the other mode.
    pub sigma: SigmaSeries,
    pub sigma_alt: SigmaSeries,
    /// Mean survival `S(t)`, `t = 0..=T`.
    pub survival: Vec<f64>,
    /// Ensemble-mean probability grids, one per distinct requested snapshot
    /// time within the run, in increasing time.
    pub snapshots: Vec<ProbabilityGrid>,
}

/// Parameters of one ensemble.
#[derive(Clone, Debug)]
pub struct EnsembleSpec<'a> {
    pub coin: CoinKind,
    pub density: f64,
    pub steps: usize,
    pub ensemble: usize,
    pub seed: u64,
    pub mode: SigmaMode,
    pub snapshot_at: &'a [usize],
}

/// Runs every member of an ensemble on `pool` and reduces in member order.
pub fn run_ensemble(spec: &EnsembleSpec<'_>, pool: &rayon::ThreadPool) -> Result<EnsembleResult> {
    let steps = spec.steps;
    let mut snapshot_times: Vec<usize> = spec.snapshot_at.iter().copied().filter(|&t| t <= steps).collect();
    snapshot_times.sort_unstable();
    snapshot_times.dedup();
    let meta = |mode| SeriesMeta {
        coin: Some(spec.coin),
        density: spec.density,
        ensemble_size: 1,
        seed: spec.seed,
        mode,
    };

    let mut sigma_runs = Vec::with_capacity(spec.ensemble);
    let mut alt_runs = Vec::with_capacity(spec.ensemble);
    let mut survival_sum = vec![0.0; steps + 1];
    let mut snapshot_sum: Vec<ProbabilityGrid> =
        snapshot_times.iter().map(|&t| ProbabilityGrid::zeros(steps + 1, t)).collect();

    let batch = (pool.current_num_threads() * BATCH_PER_THREAD).max(1);
    let mut next = 0usize;
    while next < spec.ensemble {
        let end = (next + batch).min(spec.ensemble);
        let members: Vec<Result<MemberResult>> = pool.install(|| {
            (next..end)
                .into_par_iter()
                .map(|r| {
                    run_member(
                        spec.coin,
                        spec.density,
                        steps,
                        spec.seed,
                        r as u64,
                        spec.mode,
                        &snapshot_times,
                    )
                })
                .collect()
        });
        for member in members {
            let member = member?;
            for (acc, s) in survival_sum.iter_mut().zip(&member.survival) {
                *acc += s;
            }
            for (acc, grid) in snapshot_sum.iter_mut().zip(&member.snapshots) {
                for (a, p) in acc.values_mut().iter_mut().zip(grid.values()) {
                    *a += p;
                }
            }
            sigma_runs.push(SigmaSeries::single(member.sigma, meta(spec.mode)));
            alt_runs.push(SigmaSeries::single(member.sigma_alt, meta(spec.mode.other())));
        }
        next = end;
    }

    let m = spec.ensemble as f64;
    for v in survival_sum.iter_mut() {
        *v /= m;
    }
    for grid in snapshot_sum.iter_mut() {
        for v in grid.values_mut() {
            *v /= m;
        }
    }
    Ok(EnsembleResult {
        coin: spec.coin,
        density: spec.density,
        sigma: ensemble_sigma(&sigma_runs)?,
        sigma_alt: ensemble_sigma(&alt_runs)?,
        survival: survival_sum,
        snapshots: snapshot_sum,
    })
}

/// A thread pool with `threads` workers, or one per core.
pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRef {
    pub time: usize,
    pub file: String,
}

/// Outputs and derived quantities for one `(coin, p)` pair. File names are
/// relative to the sweep's output directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub coin: CoinKind,
    pub density: f64,
    pub sigma_file: String,
    pub sigma_alt_file: String,
    pub survival_file: String,
    pub snapshots: Vec<SnapshotRef>,
    pub decoherence_time: Option<usize>,
    pub kww: Option<KwwFit>,
    /// Why no KWW fit was produced, when `kww` is absent.
    pub kww_note: Option<String>,
    /// Members with nonzero survival at the final step.
    pub final_survivors: usize,
    /// Fewest surviving members over all steps.
    pub min_survivors: usize,
    pub final_sigma: Option<f64>,
    pub final_survival: f64,
    pub duration_secs: f64,
}

impl SweepEntry {
    fn meta(&self, config: &SweepConfig, mode: SigmaMode) -> SeriesMeta {
        SeriesMeta {
            coin: Some(self.coin),
            density: self.density,
            ensemble_size: config.ensemble,
            seed: config.seed,
            mode,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: SweepConfig,
    /// Trap-free classical σ(t), same file format as the quantum series.
    pub classical_sigma_file: String,
    pub entries: Vec<SweepEntry>,
    pub duration_secs: f64,
}

impl RunSummary {
    pub fn out_dir(&self) -> &Path {
        &self.config.out_dir
    }

    pub fn entry(&self, coin: CoinKind, density: f64) -> Option<&SweepEntry> {
        self.entries.iter().find(|e| e.coin == coin && e.density == density)
    }

    pub fn read_sigma(&self, entry: &SweepEntry) -> Result<SigmaSeries> {
        read_series(&self.out_dir().join(&entry.sigma_file), entry.meta(&self.config, self.config.sigma_mode))
    }

    pub fn read_sigma_alt(&self, entry: &SweepEntry) -> Result<SigmaSeries> {
        let mode = self.config.sigma_mode.other();
        read_series(&self.out_dir().join(&entry.sigma_alt_file), entry.meta(&self.config, mode))
    }

    pub fn read_classical(&self) -> Result<SigmaSeries> {
        let meta = SeriesMeta {
            coin: None,
            density: 0.0,
            ensemble_size: 1,
            seed: 0,
            mode: SigmaMode::Raw,
        };
        read_series(&self.out_dir().join(&self.classical_sigma_file), meta)
    }

    pub fn read_survival(&self, entry: &SweepEntry) -> Result<Vec<f64>> {
        read_survival_csv(&self.out_dir().join(&entry.survival_file))
    }

    pub fn read_snapshot(&self, entry: &SweepEntry, time: usize) -> Result<Option<ProbabilityGrid>> {
        let Some(s) = entry.snapshots.iter().find(|s| s.time == time) else {
            return Ok(None);
        };
        let path = self.out_dir().join(&s.file);
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        ProbabilityGrid::read_csv(BufReader::new(file), self.config.steps + 1, time).map(Some)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w).map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_reader(BufReader::new(file))?)
    }
}

fn read_series(path: &Path, meta: SeriesMeta) -> Result<SigmaSeries> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    SigmaSeries::read_csv(BufReader::new(file), meta)
}

pub(crate) fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// `t,survival` rows for `t = 0..=T`.
pub fn write_survival_csv<W: Write>(survival: &[f64], mut out: W) -> std::io::Result<()> {
    writeln!(out, "t,survival")?;
    for (t, s) in survival.iter().enumerate() {
        writeln!(out, "{t},{}", crate::fmt17(*s))?;
    }
    Ok(())
}

pub fn read_survival_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 && line == "t,survival" || line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Parse {
            what: "survival csv",
            line: lineno + 1,
            detail: line.to_string(),
        };
        let (t, s) = line.split_once(',').ok_or_else(bad)?;
        if t.parse::<usize>().ok() != Some(out.len()) {
            return Err(bad());
        }
        out.push(s.parse::<f64>().map_err(|_| bad())?);
    }
    Ok(out)
}

/// Runs the full sweep described by `config` and writes its CSV files and
/// `summary.json` into `config.out_dir`.
pub fn run_sweep(config: &SweepConfig) -> Result<RunSummary> {
    config.validate()?;
    let started = Instant::now();
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let pool = thread_pool(config.threads)?;

    let classical_sigma_file = "sigma_classical.csv".to_string();
    let classical = crate::classical::classical_sigma(config.steps);
    write_file(&dir.join(&classical_sigma_file), |w| classical.write_csv(w))?;

    let mut entries = Vec::with_capacity(config.coins.len() * config.densities.len());
    for &coin in &config.coins {
        for &density in &config.densities {
            let t0 = Instant::now();
            let spec = EnsembleSpec {
                coin,
                density,
                steps: config.steps,
                ensemble: config.ensemble,
                seed: config.seed,
                mode: config.sigma_mode,
                snapshot_at: &config.snapshot_at,
            };
            let result = run_ensemble(&spec, &pool)?;
            let mut entry = write_ensemble(config, &result)?;
            entry.duration_secs = t0.elapsed().as_secs_f64();
            entries.push(entry);
        }
    }

    let summary = RunSummary {
        config: config.clone(),
        classical_sigma_file,
        entries,
        duration_secs: started.elapsed().as_secs_f64(),
    };
    summary.write_json(&dir.join("summary.json"))?;
    Ok(summary)
}

fn write_ensemble(config: &SweepConfig, result: &EnsembleResult) -> Result<SweepEntry> {
    let dir = &config.out_dir;
    let (coin, p) = (result.coin, result.density);

    let sigma_file = sigma_file_name(coin, p);
    write_file(&dir.join(&sigma_file), |w| result.sigma.write_csv(w))?;
    let sigma_alt_file = format!(
        "sigma_{coin}_{}_{}.csv",
        density_label(p),
        config.sigma_mode.other()
    );
    write_file(&dir.join(&sigma_alt_file), |w| result.sigma_alt.write_csv(w))?;
    let survival_file = survival_file_name(coin, p);
    write_file(&dir.join(&survival_file), |w| write_survival_csv(&result.survival, w))?;

    let mut snapshots = Vec::new();
    for grid in &result.snapshots {
        let file = snapshot_file_name(coin, p, grid.time());
        write_file(&dir.join(&file), |w| grid.write_csv(w))?;
        snapshots.push(SnapshotRef {
            time: grid.time(),
            file,
        });
    }

    let (kww, kww_note) = match kww_fit(&result.survival[1..]) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let survivors = result.sigma.survivors();
    Ok(SweepEntry {
        coin,
        density: p,
        sigma_file,
        sigma_alt_file,
        survival_file,
        snapshots,
        decoherence_time: decoherence_time(&result.sigma, DEFAULT_WINDOW).ok().flatten(),
        kww,
        kww_note,
        final_survivors: survivors.last().copied().unwrap_or(0),
        min_survivors: survivors.iter().copied().min().unwrap_or(0),
        final_sigma: result.sigma.at(config.steps),
        final_survival: *result.survival.last().unwrap_or(&1.0),
        duration_secs: 0.0,
    })
}
