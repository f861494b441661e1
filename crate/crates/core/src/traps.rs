//! Frozen random trap configurations.
//!
//! # Random stream layout
//!
//! Layout version 1, frozen: for ensemble member `r` under master seed `s` the
//! generator is `ChaCha8Rng::seed_from_u64(s)` switched to stream `r`
//! (`set_stream(r)`), starting at word position 0. Sites are visited in
//! row-major order over `[-L, L]²` (`m` outer, `n` inner); site `k` of that
//! order consumes the `k`-th `u64` of the stream, `u`, and is trapped when
//! `(u >> 11) · 2⁻⁵³ < p`. The origin consumes its draw like every other site
//! but is never trapped.
//!
//! A mask is therefore a pure function of `(L, p, s, r)` and does not depend
//! on generation order or on how members are scheduled across threads.

use std::io::{BufRead, Write};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Where a mask came from.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum MaskOrigin {
    Generated {
        density: f64,
        seed: u64,
        config_index: u64,
    },
    Imported,
}

/// Boolean grid of absorbing sites over `[-L, L]²`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrapMask {
    lattice: Lattice,
    trapped: Vec<bool>,
    origin: MaskOrigin,
}

impl TrapMask {
    /// A mask with no traps.
    pub fn empty(half_width: usize) -> Self {
        let lattice = Lattice::new(half_width);
        TrapMask {
            lattice,
            trapped: vec![false; lattice.len()],
            origin: MaskOrigin::Generated {
                density: 0.0,
                seed: 0,
                config_index: 0,
            },
        }
    }

    /// Builds a mask from explicit trap sites. The origin may not be listed.
    pub fn from_sites<I>(half_width: usize, sites: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        let lattice = Lattice::new(half_width);
        let mut trapped = vec![false; lattice.len()];
        for (m, n) in sites {
            if !lattice.contains(m, n) || (m, n) == (0, 0) {
                return Err(Error::SiteOutOfRange { m, n, half_width });
            }
            trapped[lattice.index(m, n)] = true;
        }
        Ok(TrapMask {
            lattice,
            trapped,
            origin: MaskOrigin::Imported,
        })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn half_width(&self) -> usize {
        self.lattice.half_width()
    }

    pub fn origin(&self) -> MaskOrigin {
        self.origin
    }

    /// Trap flags in lattice order.
    pub fn as_slice(&self) -> &[bool] {
        &self.trapped
    }

    pub fn is_trapped(&self, m: i64, n: i64) -> bool {
        self.lattice.contains(m, n) && self.trapped[self.lattice.index(m, n)]
    }

    pub fn is_empty(&self) -> bool {
        !self.trapped.iter().any(|&t| t)
    }

    /// Trapped sites as `(m, n)` in lattice order.
    pub fn sites(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.trapped
            .iter()
            .enumerate()
            .filter(|(_, &t)| t)
            .map(|(i, _)| self.lattice.coords(i))
    }

    /// Writes `m,n` rows, one per trapped site.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "m,n")?;
        for (m, n) in self.sites() {
            writeln!(out, "{m},{n}")?;
        }
        Ok(())
    }

    /// Reads the format produced by [`TrapMask::write_csv`].
    pub fn read_csv<R: BufRead>(input: R, half_width: usize) -> Result<Self> {
        let mut sites = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<trap mask>", e))?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line == "m,n") {
                continue;
            }
            let parse = |s: Option<&str>| -> Result<i64> {
                s.and_then(|v| v.trim().parse().ok()).ok_or_else(|| Error::Parse {
                    what: "trap mask csv",
                    line: lineno + 1,
                    detail: line.to_string(),
                })
            };
            let mut fields = line.split(',');
            let m = parse(fields.next())?;
            let n = parse(fields.next())?;
            sites.push((m, n));
        }
        TrapMask::from_sites(half_width, sites)
    }
}

/// Generates the trap mask of ensemble member `config_index`.
///
/// Every site except the origin is trapped independently with probability
/// `density`. See the module docs for the exact stream layout.
pub fn generate_traps(half_width: usize, density: f64, seed: u64, config_index: u64) -> Result<TrapMask> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidDensity(density));
    }
    let lattice = Lattice::new(half_width);
    let mut trapped = vec![false; lattice.len()];
    if density > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(config_index);
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        for t in trapped.iter_mut() {
            let u = (rng.next_u64() >> 11) as f64 * SCALE;
            *t = u < density;
        }
        trapped[lattice.origin()] = false;
    }
    Ok(TrapMask {
        lattice,
        trapped,
        origin: MaskOrigin::Generated {
            density,
            seed,
            config_index,
        },
    })
}

pub fn trap_count(mask: &TrapMask) -> usize {
    mask.trapped.iter().filter(|&&t| t).count()
}
