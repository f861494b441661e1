//! The three 4×4 coin unitaries and the initial coin states that pair with
//! them.
//!
//! Coin basis vectors are always ordered `(00, 01, 10, 11)`, i.e. the index of
//! `|j,k⟩` is `2j + k`. Row index of a [`CoinMatrix`] is the outgoing basis
//! state, column index the incoming one.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Dimension of the coin space.
pub const COIN_DIM: usize = 4;

/// Which coin drives the walk.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoinKind {
    Hadamard,
    Fourier,
    Grover,
}

impl CoinKind {
    pub const ALL: [CoinKind; 3] = [CoinKind::Hadamard, CoinKind::Fourier, CoinKind::Grover];

    /// Lowercase name used in file names, CLI flags and config files.
    pub fn name(self) -> &'static str {
        match self {
            CoinKind::Hadamard => "hadamard",
            CoinKind::Fourier => "fourier",
            CoinKind::Grover => "grover",
        }
    }
}

impl fmt::Display for CoinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoinKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hadamard" => Ok(CoinKind::Hadamard),
            "fourier" => Ok(CoinKind::Fourier),
            "grover" => Ok(CoinKind::Grover),
            _ => Err(Error::UnknownCoin(s.to_string())),
        }
    }
}

impl Serialize for CoinKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for CoinKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A 4×4 complex coin operator, `entries[row][col]`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CoinMatrix {
    entries: [[C64; COIN_DIM]; COIN_DIM],
}

impl CoinMatrix {
    pub fn new(entries: [[C64; COIN_DIM]; COIN_DIM]) -> Self {
        CoinMatrix { entries }
    }

    pub fn entries(&self) -> &[[C64; COIN_DIM]; COIN_DIM] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CoinMatrix {
        let mut out = [[C64::new(0.0, 0.0); COIN_DIM]; COIN_DIM];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.entries[c][r].conj();
            }
        }
        CoinMatrix::new(out)
    }

    pub fn matmul(&self, rhs: &CoinMatrix) -> CoinMatrix {
        let mut out = [[C64::new(0.0, 0.0); COIN_DIM]; COIN_DIM];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = (0..COIN_DIM)
                    .map(|k| self.entries[r][k] * rhs.entries[k][c])
                    .sum();
            }
        }
        CoinMatrix::new(out)
    }

    /// Largest elementwise deviation of `C·C†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.matmul(&self.adjoint());
        let mut worst = 0.0f64;
        for r in 0..COIN_DIM {
            for c in 0..COIN_DIM {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((prod.entries[r][c] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }
}

/// Four coin amplitudes in basis order `(00, 01, 10, 11)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CoinState {
    amplitudes: [C64; COIN_DIM],
}

impl CoinState {
    pub fn new(amplitudes: [C64; COIN_DIM]) -> Self {
        CoinState { amplitudes }
    }

    pub fn zero() -> Self {
        CoinState::new([C64::new(0.0, 0.0); COIN_DIM])
    }

    pub fn amplitudes(&self) -> &[C64; COIN_DIM] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn scaled(rows: [[C64; COIN_DIM]; COIN_DIM], factor: f64) -> CoinMatrix {
    let mut out = rows;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v *= factor;
        }
    }
    CoinMatrix::new(out)
}

/// The coin operator for `kind`.
pub fn coin_matrix(kind: CoinKind) -> CoinMatrix {
    let one = c(1.0, 0.0);
    let neg = c(-1.0, 0.0);
    let i = c(0.0, 1.0);
    let neg_i = c(0.0, -1.0);
    let rows = match kind {
        CoinKind::Hadamard => [
            [one, one, one, one],
            [one, neg, one, neg],
            [one, one, neg, neg],
            [one, neg, neg, one],
        ],
        CoinKind::Fourier => [
            [one, one, one, one],
            [one, i, neg, neg_i],
            [one, neg, one, neg],
            [one, neg_i, neg, i],
        ],
        CoinKind::Grover => [
            [neg, one, one, one],
            [one, neg, one, one],
            [one, one, neg, one],
            [one, one, one, neg],
        ],
    };
    scaled(rows, 0.5)
}

/// The initial coin state that gives maximal spreading from the origin for
/// `kind`. Global phases are exactly as conventionally printed.
pub fn initial_state(kind: CoinKind) -> CoinState {
    let half = 0.5;
    let amps = match kind {
        CoinKind::Hadamard => [c(half, 0.0), c(0.0, half), c(0.0, -half), c(half, 0.0)],
        CoinKind::Fourier => {
            // (1 - i)/√2, times the overall 1/2
            let w = c(1.0, -1.0) * (half / std::f64::consts::SQRT_2);
            [c(half, 0.0), w, c(half, 0.0), -w]
        }
        CoinKind::Grover => [c(half, 0.0), c(-half, 0.0), c(-half, 0.0), c(half, 0.0)],
    };
    CoinState::new(amps)
}

/// Matrix-vector product `matrix · state`.
pub fn apply_coin_to_state(matrix: &CoinMatrix, state: &CoinState) -> CoinState {
    let mut out = [C64::new(0.0, 0.0); COIN_DIM];
    for (r, v) in out.iter_mut().enumerate() {
        *v = (0..COIN_DIM)
            .map(|k| matrix.entries[r][k] * state.amplitudes[k])
            .sum();
    }
    CoinState::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() <= TOL
    }

    #[test]
    fn hadamard_rows() {
        let h = coin_matrix(CoinKind::Hadamard);
        let r0 = [1.0, 1.0, 1.0, 1.0];
        let r1 = [1.0, -1.0, 1.0, -1.0];
        for col in 0..4 {
            assert!(close(h.get(0, col), c(r0[col] / 2.0, 0.0)));
            assert!(close(h.get(1, col), c(r1[col] / 2.0, 0.0)));
        }
    }

    #[test]
    fn fourier_imaginary_entries() {
        let f = coin_matrix(CoinKind::Fourier);
        assert!(close(f.get(1, 1), c(0.0, 0.5)));
        assert!(close(f.get(1, 3), c(0.0, -0.5)));
        assert!(close(f.get(3, 1), c(0.0, -0.5)));
        assert!(close(f.get(2, 1), c(-0.5, 0.0)));
    }

    #[test]
    fn grover_diagonal() {
        let g = coin_matrix(CoinKind::Grover);
        for r in 0..4 {
            for col in 0..4 {
                let want = if r == col { -0.5 } else { 0.5 };
                assert!(close(g.get(r, col), c(want, 0.0)));
            }
        }
    }

    #[test]
    fn coins_unitary_with_half_magnitude_entries() {
        for kind in CoinKind::ALL {
            let m = coin_matrix(kind);
            assert!(m.is_unitary(TOL), "{kind} defect {}", m.unitarity_defect());
            for row in m.entries() {
                for v in row {
                    assert!((v.norm() - 0.5).abs() <= TOL);
                }
            }
        }
    }

    #[test]
    fn initial_states() {
        let h = initial_state(CoinKind::Hadamard);
        let want = [c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.5, 0.0)];
        for (a, b) in h.amplitudes().iter().zip(want) {
            assert!(close(*a, b));
        }
        let g = initial_state(CoinKind::Grover);
        let want = [c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)];
        for (a, b) in g.amplitudes().iter().zip(want) {
            assert!(close(*a, b));
        }
        let f = initial_state(CoinKind::Fourier);
        let w = c(1.0, -1.0) / (2.0 * 2f64.sqrt());
        assert!(close(f.amplitudes()[1], w));
        assert!(close(f.amplitudes()[3], -w));
        for kind in CoinKind::ALL {
            assert!((initial_state(kind).norm() - 1.0).abs() <= TOL);
        }
    }

    // Expected vectors below were multiplied out by hand.
    #[test]
    fn grover_on_its_initial_state() {
        let out = apply_coin_to_state(&coin_matrix(CoinKind::Grover), &initial_state(CoinKind::Grover));
        let want = [c(-0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)];
        for (a, b) in out.amplitudes().iter().zip(want) {
            assert!(close(*a, b), "{a} vs {b}");
        }
    }

    #[test]
    fn hadamard_on_its_initial_state() {
        let out =
            apply_coin_to_state(&coin_matrix(CoinKind::Hadamard), &initial_state(CoinKind::Hadamard));
        let want = [c(0.5, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.5, 0.0)];
        for (a, b) in out.amplitudes().iter().zip(want) {
            assert!(close(*a, b), "{a} vs {b}");
        }
    }

    #[test]
    fn zero_vector_stays_zero() {
        for kind in CoinKind::ALL {
            let out = apply_coin_to_state(&coin_matrix(kind), &CoinState::zero());
            assert_eq!(out.norm_sqr(), 0.0);
        }
    }

    #[test]
    fn maximal_spread_after_coin() {
        for kind in CoinKind::ALL {
            let out = apply_coin_to_state(&coin_matrix(kind), &initial_state(kind));
            for a in out.amplitudes() {
                assert!((a.norm_sqr() - 0.25).abs() <= TOL, "{kind}: {a}");
            }
        }
    }

    #[test]
    fn parse_is_case_insensitive() {
        assert_eq!("Hadamard".parse::<CoinKind>().unwrap(), CoinKind::Hadamard);
        assert_eq!("FOURIER".parse::<CoinKind>().unwrap(), CoinKind::Fourier);
        assert_eq!(" grover ".parse::<CoinKind>().unwrap(), CoinKind::Grover);
        assert!("pauli".parse::<CoinKind>().is_err());
        let k: CoinKind = serde_json::from_str("\"GrOvEr\"").unwrap();
        assert_eq!(k, CoinKind::Grover);
        assert_eq!(serde_json::to_string(&CoinKind::Fourier).unwrap(), "\"fourier\"");
    }

    fn unit_vector() -> impl Strategy<Value = CoinState> {
        prop::array::uniform8(-1.0f64..1.0)
            .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
            .prop_map(|v| {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                let a = |i: usize| c(v[2 * i] / norm, v[2 * i + 1] / norm);
                CoinState::new([a(0), a(1), a(2), a(3)])
            })
    }

    proptest! {
        #[test]
        fn coin_preserves_norm(v in unit_vector(), k in 0usize..3) {
            let kind = CoinKind::ALL[k];
            let out = apply_coin_to_state(&coin_matrix(kind), &v);
            prop_assert!((out.norm() - v.norm()).abs() <= TOL);
        }
    }
}
