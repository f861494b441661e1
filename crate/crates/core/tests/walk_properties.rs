use proptest::prelude::*;
use trapwalk::stats::Moments;
use trapwalk::{
    classical_step, coin_matrix, generate_traps, initial_state, new_walker, ClassicalState, CoinKind, TrapMask,
    WalkerState,
};

fn coin_strategy() -> impl Strategy<Value = CoinKind> {
    prop::sample::select(CoinKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn free_walk_keeps_unit_norm(kind in coin_strategy(), steps in 1usize..=100) {
        let mut w = new_walker(kind, steps);
        let free = TrapMask::empty(w.half_width());
        let coin = coin_matrix(kind);
        for _ in 0..steps {
            w.step(&coin, &free).unwrap();
        }
        prop_assert!((w.norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn free_walk_is_centred(kind in coin_strategy(), steps in 1usize..=60) {
        let mut w = new_walker(kind, steps);
        let free = TrapMask::empty(w.half_width());
        let coin = coin_matrix(kind);
        for _ in 0..steps {
            w.step(&coin, &free).unwrap();
        }
        let (mm, mn) = w.moments().mean().unwrap();
        prop_assert!(mm.abs() <= 1e-10 && mn.abs() <= 1e-10, "mean ({mm}, {mn})");
    }

    #[test]
    fn amplitude_stays_inside_light_cone(
        kind in coin_strategy(),
        steps in 1usize..=30,
        density in 0.0f64..0.5,
        r in 0u64..1000,
    ) {
        let l = steps + 1;
        let mask = generate_traps(l, density, 5, r).unwrap();
        let mut w = WalkerState::at_origin(l, initial_state(kind));
        let coin = coin_matrix(kind);
        let mut last = 1.0;
        for t in 1..=steps {
            w.step(&coin, &mask).unwrap();
            let grid = trapwalk::measure(&w);
            for (m, n, p) in grid.nonzero() {
                prop_assert!(p >= 0.0);
                prop_assert!(m.unsigned_abs() as usize <= t && n.unsigned_abs() as usize <= t);
                prop_assert_eq!((m - t as i64).rem_euclid(2), 0);
                prop_assert_eq!((n - t as i64).rem_euclid(2), 0);
                prop_assert!(!mask.is_trapped(m, n));
            }
            let s = grid.total();
            prop_assert!(s <= last + 1e-12);
            last = s;
        }
    }

    #[test]
    fn state_moments_agree_with_measured_grid(kind in coin_strategy(), steps in 1usize..=25, r in 0u64..100) {
        let l = steps + 1;
        let mask = generate_traps(l, 0.1, 11, r).unwrap();
        let mut w = WalkerState::at_origin(l, initial_state(kind));
        for _ in 0..steps {
            w.step(&coin_matrix(kind), &mask).unwrap();
        }
        let a = w.moments();
        let b = Moments::of_grid(&trapwalk::measure(&w));
        prop_assert!((a.mass - b.mass).abs() <= 1e-12);
        prop_assert!((a.sum_r2 - b.sum_r2).abs() <= 1e-9);
    }

    #[test]
    fn classical_survival_monotone(steps in 1usize..=40, density in 0.0f64..0.6, r in 0u64..100) {
        let l = steps + 1;
        let mask = generate_traps(l, density, 2, r).unwrap();
        let mut s = ClassicalState::new(l);
        let mut last = 1.0;
        for _ in 0..steps {
            classical_step(&mut s, Some(&mask)).unwrap();
            let total = s.grid().total();
            prop_assert!(total <= last + 1e-15);
            last = total;
        }
    }
}

#[test]
fn mask_csv_replay_reproduces_walk() {
    let mask = generate_traps(21, 0.15, 3, 7).unwrap();
    let mut buf = Vec::new();
    mask.write_csv(&mut buf).unwrap();
    let back = TrapMask::read_csv(buf.as_slice(), 21).unwrap();
    let a = trapwalk::run(CoinKind::Fourier, 20, &mask).unwrap();
    let b = trapwalk::run(CoinKind::Fourier, 20, &back).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.values(), y.values());
    }
}
