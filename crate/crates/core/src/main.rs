use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use trapwalk::experiment::{run_sweep, SweepConfig};
use trapwalk::{emit_plot_data, CoinKind, SigmaMode};

/// Ensemble sweeps of 2D coined quantum walks with random absorbing traps.
///
/// Starts from the reference preset (all three coins, p ∈ {0, 0.01, 0.1,
/// 0.25, 0.5}, 100 steps, 250 trap configurations), or from a JSON config
/// file; any flag given on the command line overrides the file.
#[derive(Debug, Parser)]
#[command(name = "trapwalk", version)]
struct Cli {
    /// JSON file with SweepConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Coins to run, comma separated (hadamard, fourier, grover).
    #[arg(long, value_delimiter = ',')]
    coin: Option<Vec<CoinKind>>,

    /// Trap densities, comma separated.
    #[arg(long, value_delimiter = ',')]
    density: Option<Vec<f64>>,

    /// Walk length T.
    #[arg(long)]
    steps: Option<usize>,

    /// Trap configurations per (coin, density).
    #[arg(long)]
    ensemble: Option<usize>,

    /// Master seed for trap placement.
    #[arg(long)]
    seed: Option<u64>,

    /// conditional (renormalized by survival) or raw.
    #[arg(long)]
    sigma_mode: Option<SigmaMode>,

    /// Times at which ensemble-mean probability grids are saved.
    #[arg(long, value_delimiter = ',')]
    snapshot_at: Option<Vec<usize>>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,

    /// Also render SVG figures.
    #[arg(long)]
    emit_svg: bool,
}

impl Cli {
    fn into_config(self) -> trapwalk::Result<SweepConfig> {
        let mut config = match &self.config {
            Some(path) => SweepConfig::from_json_file(path)?,
            None => SweepConfig::reference_preset(),
        };
        if let Some(v) = self.coin {
            config.coins = v;
        }
        if let Some(v) = self.density {
            config.densities = v;
        }
        if let Some(v) = self.steps {
            config.steps = v;
            if self.snapshot_at.is_none() && self.config.is_none() {
                config.snapshot_at = vec![v];
            }
        }
        if let Some(v) = self.ensemble {
            config.ensemble = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.sigma_mode {
            config.sigma_mode = v;
        }
        if let Some(v) = self.snapshot_at {
            config.snapshot_at = v;
        }
        if let Some(v) = self.out {
            config.out_dir = v;
        }
        if self.threads.is_some() {
            config.threads = self.threads;
        }
        if self.emit_svg {
            config.emit_svg = true;
        }
        config.validate()?;
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.into_config().and_then(|config| {
        let summary = run_sweep(&config)?;
        emit_plot_data(&summary)?;
        Ok(summary)
    });
    match result {
        Ok(summary) => {
            for e in &summary.entries {
                let sigma = e.final_sigma.map_or("-".into(), |s| format!("{s:.4}"));
                let tau = e.decoherence_time.map_or("-".into(), |t| t.to_string());
                let kww = e
                    .kww
                    .map_or("-".into(), |k| format!("tau={:.3} beta={:.3}", k.tau, k.beta));
                println!(
                    "{:<8} p={:<6} sigma(T)={sigma:<10} S(T)={:.4e} tau_decoh={tau:<5} kww: {kww}",
                    e.coin, e.density, e.final_survival
                );
            }
            println!(
                "wrote {} in {:.1}s",
                summary.config.out_dir.display(),
                summary.duration_secs
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
