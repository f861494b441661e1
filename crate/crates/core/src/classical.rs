//! Exact classical baseline: the probability of a walker taking one of the
//! four diagonal moves `(±1, ±1)` with probability 1/4 each, propagated by
//! convolution. Same geometry as the quantum shift, so `σ_cl(t) = √(2t)`.

use crate::engine::ProbabilityGrid;
use crate::error::{Error, Result};
use crate::stats::{sigma_of, SeriesMeta, SigmaMode, SigmaSeries};
use crate::traps::TrapMask;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalState {
    grid: ProbabilityGrid,
}

impl ClassicalState {
    /// Unit mass at the origin.
    pub fn new(half_width: usize) -> Self {
        ClassicalState {
            grid: ProbabilityGrid::point_mass(half_width),
        }
    }

    pub fn time(&self) -> usize {
        self.grid.time()
    }

    pub fn grid(&self) -> &ProbabilityGrid {
        &self.grid
    }

    pub fn into_grid(self) -> ProbabilityGrid {
        self.grid
    }
}

/// `P'(m,n) = ¼ Σ P(m ∓ 1, n ∓ 1)`, then zeroed on trap sites.
pub fn classical_step(state: &mut ClassicalState, traps: Option<&TrapMask>) -> Result<()> {
    let lat = state.grid.lattice();
    let l = lat.half_width();
    let t = state.grid.time();
    if t >= l {
        return Err(Error::Boundary { time: t, half_width: l });
    }
    if let Some(mask) = traps {
        if mask.half_width() != l {
            return Err(Error::DimensionMismatch {
                state: l,
                mask: mask.half_width(),
            });
        }
    }
    let r = t as i64;
    let old = state.grid.values();
    let mut next = vec![0.0; lat.len()];
    for m in -r..=r {
        for n in -r..=r {
            let p = old[lat.index(m, n)];
            if p == 0.0 {
                continue;
            }
            let q = 0.25 * p;
            for (dm, dn) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                next[lat.index(m + dm, n + dn)] += q;
            }
        }
    }
    if let Some(mask) = traps {
        for (v, &trapped) in next.iter_mut().zip(mask.as_slice()) {
            if trapped {
                *v = 0.0;
            }
        }
    }
    state.grid = ProbabilityGrid::new(l, next, t + 1);
    Ok(())
}

/// Trap-free classical `σ(t)` for `t = 1..=steps` from exact convolution.
pub fn classical_sigma(steps: usize) -> SigmaSeries {
    let mut state = ClassicalState::new(steps + 1);
    let mut sigma = Vec::with_capacity(steps);
    for _ in 0..steps {
        classical_step(&mut state, None).expect("lattice sized for steps");
        sigma.push(sigma_of(state.grid(), SigmaMode::Raw));
    }
    SigmaSeries::single(
        sigma,
        SeriesMeta {
            coin: None,
            density: 0.0,
            ensemble_size: 1,
            seed: 0,
            mode: SigmaMode::Raw,
        },
    )
}
