//! Walker state evolution: coin, conditional shift, trap absorption.
//!
//! The state is four complex grids, one per coin basis state, double-buffered
//! between steps. A coin component `|j,k⟩` is translated by
//! `((-1)^j, (-1)^k)`, so one step is a fixed-offset four-point stencil per
//! output component:
//!
//! ```text
//! A'[jk](m, n) = Σ_{j'k'} C[jk][j'k'] · A[j'k'](m - (-1)^j, n - (-1)^k)
//! ```
//!
//! after which every amplitude on a trap site is set to zero.
//!
//! At time `t` the support lies inside `max(|m|, |n|) ≤ t` and on sites with
//! `m ≡ n ≡ t (mod 2)`. Only that sublattice is stored: sample `(a, b)`,
//! `a, b ∈ [0, t]`, holds site `(2a − t, 2b − t)`. In these coordinates a
//! move of `+1` keeps the sample index moving by one and a move of `−1` keeps
//! it fixed, so each row of the stencil reads one contiguous source row.

use std::io::{BufRead, Write};

use num_complex::Complex64 as C64;

use crate::coin::{coin_matrix, initial_state, CoinKind, CoinMatrix, CoinState, COIN_DIM};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::stats::Moments;
use crate::traps::TrapMask;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Shift direction of coin component `c = 2j + k`.
#[inline]
pub fn shift_of(component: usize) -> (i64, i64) {
    let dm = if component & 0b10 == 0 { 1 } else { -1 };
    let dn = if component & 0b01 == 0 { 1 } else { -1 };
    (dm, dn)
}

fn identity() -> CoinMatrix {
    let mut e = [[ZERO; COIN_DIM]; COIN_DIM];
    for (i, row) in e.iter_mut().enumerate() {
        row[i] = ONE;
    }
    CoinMatrix::new(e)
}

/// Complex amplitudes `A(j, k, m, n)` at time `t`.
#[derive(Clone, Debug)]
pub struct WalkerState {
    lattice: Lattice,
    /// Row stride of the sublattice buffers, `L + 1`.
    stride: usize,
    front: [Vec<C64>; COIN_DIM],
    back: [Vec<C64>; COIN_DIM],
    time: usize,
}

impl WalkerState {
    /// A walker at the origin with coin state `coin` on a lattice of the given
    /// half-width, at `t = 0`.
    pub fn at_origin(half_width: usize, coin: CoinState) -> Self {
        let lattice = Lattice::new(half_width);
        let stride = half_width + 1;
        let grid = || vec![ZERO; stride * stride];
        let mut front = [grid(), grid(), grid(), grid()];
        for (c, amp) in coin.amplitudes().iter().enumerate() {
            front[c][0] = *amp;
        }
        WalkerState {
            lattice,
            stride,
            front,
            back: [grid(), grid(), grid(), grid()],
            time: 0,
        }
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn half_width(&self) -> usize {
        self.lattice.half_width()
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// Sublattice sample holding site `(m, n)`, if it can carry amplitude now.
    fn sample(&self, m: i64, n: i64) -> Option<usize> {
        let t = self.time as i64;
        let (a, b) = (m + t, n + t);
        if a < 0 || b < 0 || a % 2 != 0 || b % 2 != 0 || a > 2 * t || b > 2 * t {
            return None;
        }
        Some((a / 2) as usize * self.stride + (b / 2) as usize)
    }

    pub fn amplitude(&self, j: usize, k: usize, m: i64, n: i64) -> C64 {
        self.sample(m, n)
            .map_or(ZERO, |i| self.front[2 * j + k][i])
    }

    /// Coin component `2j + k` as a full lattice grid in lattice order.
    pub fn component(&self, c: usize) -> Vec<C64> {
        let mut out = vec![ZERO; self.lattice.len()];
        self.for_each_site(|m, n, i| out[self.lattice.index(m, n)] = self.front[c][i]);
        out
    }

    /// Visits every stored sample as `(m, n, sample index)` in lattice order.
    #[inline]
    fn for_each_site<F: FnMut(i64, i64, usize)>(&self, mut f: F) {
        let t = self.time;
        for a in 0..=t {
            let m = 2 * a as i64 - t as i64;
            for b in 0..=t {
                f(m, 2 * b as i64 - t as i64, a * self.stride + b);
            }
        }
    }

    /// `Σ |A|²`.
    pub fn norm_sqr(&self) -> f64 {
        let mut total = 0.0;
        self.for_each_site(|_, _, i| {
            total += self.front.iter().map(|g| g[i].norm_sqr()).sum::<f64>();
        });
        total
    }

    /// Probability moments over the occupied sublattice, without building a
    /// grid.
    pub fn moments(&self) -> Moments {
        let [a0, a1, a2, a3] = &self.front;
        let mut acc = Moments::default();
        self.for_each_site(|m, n, i| {
            let p = a0[i].norm_sqr() + a1[i].norm_sqr() + a2[i].norm_sqr() + a3[i].norm_sqr();
            acc.add(m, n, p);
        });
        acc
    }

    fn check_room(&self) -> Result<()> {
        if self.time >= self.lattice.half_width() {
            return Err(Error::Boundary {
                time: self.time,
                half_width: self.lattice.half_width(),
            });
        }
        Ok(())
    }

    fn check_mask(&self, traps: &TrapMask) -> Result<()> {
        if traps.half_width() != self.lattice.half_width() {
            return Err(Error::DimensionMismatch {
                state: self.lattice.half_width(),
                mask: traps.half_width(),
            });
        }
        Ok(())
    }

    /// Applies `I ⊗ C` at every site, leaving positions unchanged.
    pub fn apply_coin(&mut self, coin: &CoinMatrix) {
        let t = self.time;
        for a in 0..=t {
            for i in a * self.stride..=a * self.stride + t {
                let v = [self.front[0][i], self.front[1][i], self.front[2][i], self.front[3][i]];
                for (o, grid) in self.front.iter_mut().enumerate() {
                    grid[i] = (0..COIN_DIM).map(|c| coin.get(o, c) * v[c]).sum();
                }
            }
        }
    }

    /// Moves component `|j,k⟩` from `(m, n)` to `(m + (-1)^j, n + (-1)^k)`
    /// and advances the clock.
    pub fn apply_shift(&mut self) -> Result<()> {
        self.check_room()?;
        self.advance(&identity(), None);
        Ok(())
    }

    /// Zeroes every coin amplitude on trap sites.
    pub fn project_traps(&mut self, traps: &TrapMask) -> Result<()> {
        self.check_mask(traps)?;
        let flags = traps.as_slice();
        let lat = self.lattice;
        let mut hits = Vec::new();
        self.for_each_site(|m, n, i| {
            if flags[lat.index(m, n)] {
                hits.push(i);
            }
        });
        for i in hits {
            for grid in self.front.iter_mut() {
                grid[i] = ZERO;
            }
        }
        Ok(())
    }

    /// One walk iteration: coin, shift, then absorption on trap sites.
    pub fn step(&mut self, coin: &CoinMatrix, traps: &TrapMask) -> Result<()> {
        self.check_mask(traps)?;
        self.check_room()?;
        self.advance(coin, Some(traps));
        Ok(())
    }

    /// Fused coin + shift (+ trap projection) from `t` to `t + 1`.
    fn advance(&mut self, coin: &CoinMatrix, traps: Option<&TrapMask>) {
        let t = self.time;
        let next = t + 1;
        let stride = self.stride;
        let lat = self.lattice;
        let l = lat.half_width() as i64;
        let side = lat.side();

        for o in 0..COIN_DIM {
            let (dm, dn) = shift_of(o);
            // A move of +1 advances the sample index by one.
            let (da, db) = ((dm > 0) as usize, (dn > 0) as usize);
            let w = coin.entries()[o];
            let [a0, a1, a2, a3] = &self.front;
            let out = &mut self.back[o];
            for a_out in 0..=next {
                let dst = &mut out[a_out * stride..a_out * stride + next + 1];
                let Some(a_in) = a_out.checked_sub(da).filter(|&a| a <= t) else {
                    dst.fill(ZERO);
                    continue;
                };
                let src = a_in * stride..a_in * stride + t + 1;
                let (s0, s1, s2, s3) = (&a0[src.clone()], &a1[src.clone()], &a2[src.clone()], &a3[src]);
                let body = &mut dst[db..db + t + 1];
                for (b, d) in body.iter_mut().enumerate() {
                    *d = w[0] * s0[b] + w[1] * s1[b] + w[2] * s2[b] + w[3] * s3[b];
                }
                dst[if db == 0 { next } else { 0 }] = ZERO;

                if let Some(mask) = traps {
                    // Site (2a − next, 2b − next) of row a_out, stepping 2 in n.
                    let m = 2 * a_out as i64 - next as i64;
                    let first = ((m + l) as usize) * side + (l - next as i64) as usize;
                    let flags = &mask.as_slice()[first..];
                    for (b, d) in dst.iter_mut().enumerate() {
                        if flags[2 * b] {
                            *d = ZERO;
                        }
                    }
                }
            }
        }

        std::mem::swap(&mut self.front, &mut self.back);
        self.time = next;
    }
}

/// A fresh walker for `kind` on a lattice of half-width `L = steps + 1`,
/// one site wider than the light cone after `steps` iterations.
pub fn new_walker(kind: CoinKind, steps: usize) -> WalkerState {
    WalkerState::at_origin(steps + 1, initial_state(kind))
}

/// Site probabilities `P(m, n)` at a fixed time.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityGrid {
    lattice: Lattice,
    values: Vec<f64>,
    time: usize,
}

impl ProbabilityGrid {
    pub fn new(half_width: usize, values: Vec<f64>, time: usize) -> Self {
        let lattice = Lattice::new(half_width);
        assert_eq!(values.len(), lattice.len(), "grid size does not match lattice");
        ProbabilityGrid {
            lattice,
            values,
            time,
        }
    }

    pub fn zeros(half_width: usize, time: usize) -> Self {
        let lattice = Lattice::new(half_width);
        ProbabilityGrid::new(half_width, vec![0.0; lattice.len()], time)
    }

    /// Unit mass at the origin.
    pub fn point_mass(half_width: usize) -> Self {
        let mut g = ProbabilityGrid::zeros(half_width, 0);
        let o = g.lattice.origin();
        g.values[o] = 1.0;
        g
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn half_width(&self) -> usize {
        self.lattice.half_width()
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn set_time(&mut self, time: usize) {
        self.time = time;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, m: i64, n: i64) -> f64 {
        if self.lattice.contains(m, n) {
            self.values[self.lattice.index(m, n)]
        } else {
            0.0
        }
    }

    pub fn set(&mut self, m: i64, n: i64, p: f64) {
        let i = self.lattice.index(m, n);
        self.values[i] = p;
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `(m, n, P)` for every nonzero site, in lattice order.
    pub fn nonzero(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(i, &p)| {
                let (m, n) = self.lattice.coords(i);
                (m, n, p)
            })
    }

    /// Site of the largest probability; ties go to the first in lattice order.
    pub fn argmax(&self) -> (i64, i64, f64) {
        let (i, p) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &p)| if p > best.1 { (i, p) } else { best });
        let (m, n) = self.lattice.coords(i);
        (m, n, p)
    }

    /// `m,n,p` rows for nonzero sites, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "m,n,p")?;
        for (m, n, p) in self.nonzero() {
            writeln!(out, "{m},{n},{}", crate::fmt17(p))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R, half_width: usize, time: usize) -> Result<Self> {
        let mut grid = ProbabilityGrid::zeros(half_width, time);
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<probability grid>", e))?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line == "m,n,p") {
                continue;
            }
            let bad = || Error::Parse {
                what: "probability grid csv",
                line: lineno + 1,
                detail: line.to_string(),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(bad());
            }
            let m: i64 = f[0].trim().parse().map_err(|_| bad())?;
            let n: i64 = f[1].trim().parse().map_err(|_| bad())?;
            let p: f64 = f[2].trim().parse().map_err(|_| bad())?;
            if !grid.lattice.contains(m, n) {
                return Err(Error::SiteOutOfRange { m, n, half_width });
            }
            grid.set(m, n, p);
        }
        Ok(grid)
    }
}

/// `P(m, n) = Σ_{j,k} |A(j, k, m, n)|²`.
pub fn measure(state: &WalkerState) -> ProbabilityGrid {
    let lat = state.lattice;
    let mut values = vec![0.0; lat.len()];
    let [a0, a1, a2, a3] = &state.front;
    state.for_each_site(|m, n, i| {
        values[lat.index(m, n)] = a0[i].norm_sqr() + a1[i].norm_sqr() + a2[i].norm_sqr() + a3[i].norm_sqr();
    });
    ProbabilityGrid {
        lattice: lat,
        values,
        time: state.time,
    }
}

/// Unabsorbed probability `Σ P`.
pub fn survival_probability(grid: &ProbabilityGrid) -> f64 {
    grid.total()
}

/// Runs `steps` iterations, calling `observe` on the state at every
/// `t = 0..=steps`.
pub fn run_with<F>(kind: CoinKind, steps: usize, traps: &TrapMask, mut observe: F) -> Result<()>
where
    F: FnMut(&WalkerState),
{
    let coin = coin_matrix(kind);
    let mut state = WalkerState::at_origin(traps.half_width(), initial_state(kind));
    if steps > traps.half_width() {
        return Err(Error::Boundary {
            time: steps,
            half_width: traps.half_width(),
        });
    }
    observe(&state);
    for _ in 0..steps {
        state.step(&coin, traps)?;
        observe(&state);
    }
    Ok(())
}

/// Probability grids for `t = 0..=steps`. Holds every grid in memory; prefer
/// [`run_with`] for long runs.
pub fn run(kind: CoinKind, steps: usize, traps: &TrapMask) -> Result<Vec<ProbabilityGrid>> {
    let mut grids = Vec::with_capacity(steps + 1);
    run_with(kind, steps, traps, |s| grids.push(measure(s)))?;
    Ok(grids)
}
