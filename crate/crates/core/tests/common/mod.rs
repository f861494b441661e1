#![allow(dead_code)]

//! Test-only reference implementations, kept independent of the engine's
//! sublattice stencil.

use num_complex::Complex64 as C64;
use trapwalk::{coin_matrix, initial_state, CoinKind, TrapMask};

/// Dense one-step operator `(trap projector) · S · (I ⊗ C)` on
/// `4 · (2L + 1)²` basis states, index `c · sites + site` with sites in
/// row-major `(m, n)` order. Moves off the lattice are dropped.
pub fn dense_step_operator(kind: CoinKind, mask: &TrapMask) -> Vec<Vec<C64>> {
    let l = mask.half_width() as i64;
    let side = (2 * l + 1) as usize;
    let sites = side * side;
    let dim = 4 * sites;
    let site = |m: i64, n: i64| ((m + l) as usize) * side + (n + l) as usize;
    let coin = coin_matrix(kind);

    // I ⊗ C
    let mut coin_op = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    for s in 0..sites {
        for o in 0..4 {
            for c in 0..4 {
                coin_op[o * sites + s][c * sites + s] = coin.get(o, c);
            }
        }
    }
    // S|j,k⟩|m,n⟩ = |j,k⟩|m + (-1)^j, n + (-1)^k⟩, then projection.
    let mut shift_proj = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    for j in 0..2usize {
        for k in 0..2usize {
            let c = 2 * j + k;
            let (dm, dn) = ((-1i64).pow(j as u32), (-1i64).pow(k as u32));
            for m in -l..=l {
                for n in -l..=l {
                    let (m2, n2) = (m + dm, n + dn);
                    if m2.abs() > l || n2.abs() > l || mask.is_trapped(m2, n2) {
                        continue;
                    }
                    shift_proj[c * sites + site(m2, n2)][c * sites + site(m, n)] = C64::new(1.0, 0.0);
                }
            }
        }
    }
    matmul(&shift_proj, &coin_op)
}

pub fn matmul(a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = a.len();
    let mut out = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &[Vec<C64>], v: &[C64]) -> Vec<C64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Initial vector of `kind` at the origin in the dense basis.
pub fn dense_initial(kind: CoinKind, half_width: usize) -> Vec<C64> {
    let side = 2 * half_width + 1;
    let sites = side * side;
    let origin = half_width * side + half_width;
    let mut v = vec![C64::new(0.0, 0.0); 4 * sites];
    for (c, a) in initial_state(kind).amplitudes().iter().enumerate() {
        v[c * sites + origin] = *a;
    }
    v
}

/// `Uᵗ ψ(0)` with `U` raised to the power by repeated multiplication.
pub fn dense_evolve(kind: CoinKind, mask: &TrapMask, steps: usize) -> Vec<C64> {
    let u = dense_step_operator(kind, mask);
    let mut power = u.clone();
    for _ in 1..steps {
        power = matmul(&power, &u);
    }
    if steps == 0 {
        return dense_initial(kind, mask.half_width());
    }
    matvec(&power, &dense_initial(kind, mask.half_width()))
}

/// Prints the criterion line and fails the test when `pass` is false.
pub fn report(id: u32, name: &str, pass: bool, detail: impl AsRef<str>) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id:>2}: {name} | {}", detail.as_ref());
    assert!(pass, "criterion {id} ({name}) failed: {}", detail.as_ref());
}
