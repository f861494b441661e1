mod common;

use common::{dense_evolve, dense_step_operator, dense_initial, matvec};
use trapwalk::{coin_matrix, generate_traps, new_walker, CoinKind, TrapMask, WalkerState, initial_state};

const TOL: f64 = 1e-12;

fn max_deviation(state: &WalkerState, dense: &[num_complex::Complex64]) -> f64 {
    let l = state.half_width() as i64;
    let side = (2 * l + 1) as usize;
    let sites = side * side;
    let mut worst = 0.0f64;
    for c in 0..4 {
        for m in -l..=l {
            for n in -l..=l {
                let i = c * sites + ((m + l) as usize) * side + (n + l) as usize;
                let a = state.amplitude(c / 2, c % 2, m, n);
                worst = worst.max((a - dense[i]).norm());
            }
        }
    }
    worst
}

#[test]
fn engine_matches_dense_power_on_7x7() {
    for kind in CoinKind::ALL {
        for r in 0..10 {
            let mask = generate_traps(3, 0.25, 77, r).unwrap();
            let dense = dense_evolve(kind, &mask, 3);
            let mut state = WalkerState::at_origin(3, initial_state(kind));
            for _ in 0..3 {
                state.step(&coin_matrix(kind), &mask).unwrap();
            }
            let dev = max_deviation(&state, &dense);
            assert!(dev <= TOL, "{kind} mask {r}: {dev}");
        }
    }
}

#[test]
fn engine_matches_dense_step_by_step() {
    let mask = TrapMask::from_sites(4, [(1, 1), (-2, 0), (0, 2), (3, -1)]).unwrap();
    for kind in CoinKind::ALL {
        let u = dense_step_operator(kind, &mask);
        let mut dense = dense_initial(kind, 4);
        let mut state = WalkerState::at_origin(4, initial_state(kind));
        for _ in 0..4 {
            dense = matvec(&u, &dense);
            state.step(&coin_matrix(kind), &mask).unwrap();
            assert!(max_deviation(&state, &dense) <= TOL);
        }
    }
}

#[test]
fn one_step_examples_agree_with_oracle() {
    let free = TrapMask::empty(2);
    for kind in [CoinKind::Grover, CoinKind::Hadamard] {
        let dense = dense_evolve(kind, &free, 1);
        let sites = 25;
        for (m, n) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
            let s = ((m + 2) * 5 + (n + 2)) as usize;
            let p: f64 = (0..4).map(|c| dense[c * sites + s].norm_sqr()).sum();
            assert!((p - 0.25).abs() <= TOL, "{kind} ({m},{n}) oracle {p}");
        }
        let mut w = new_walker(kind, 1);
        w.step(&coin_matrix(kind), &free).unwrap();
        assert!(max_deviation(&w, &dense) <= TOL);
    }
}
