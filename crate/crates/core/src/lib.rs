//! Discrete-time coined quantum walks on a square lattice with randomly
//! placed, perfectly absorbing traps.
//!
//! The walker carries a four-state coin (`|j,k⟩`, `j, k ∈ {0, 1}`) and moves
//! one diagonal step `((-1)^j, (-1)^k)` per iteration. Trap sites annihilate
//! whatever amplitude lands on them. On top of the simulation engine sit an
//! exact classical baseline, ensemble statistics over frozen disorder, and a
//! sweep driver with CSV/JSON output.

pub mod classical;
pub mod coin;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod plot;
pub mod stats;
pub mod traps;

pub use classical::{classical_sigma, classical_step, ClassicalState};
pub use coin::{apply_coin_to_state, coin_matrix, initial_state, CoinKind, CoinMatrix, CoinState};
pub use engine::{measure, new_walker, run, run_with, survival_probability, ProbabilityGrid, WalkerState};
pub use error::{Error, Result};
pub use experiment::{run_sweep, RunSummary, SweepConfig};
pub use lattice::Lattice;
pub use plot::emit_plot_data;
pub use stats::{
    decoherence_time, ensemble_sigma, kww_fit, kww_generate, loglog_slope, sigma_of, KwwFit, SigmaMode,
    SigmaSeries,
};
pub use traps::{generate_traps, trap_count, TrapMask};

/// Formats a float with 17 significant digits, enough to round-trip any
/// `f64` exactly.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    #[test]
    fn fmt17_round_trips() {
        for x in [0.0, 1.0, 1.0 / 3.0, 2f64.sqrt(), 1e-300, 123456.789] {
            let s = super::fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(super::fmt17(0.25), "2.5000000000000000e-1");
    }
}
