use fracsica::fde::{abm_solve, mittag_leffler, FnField, MemoryPolicy, VectorField};
use fracsica::model::simulate;
use fracsica::{ModelParameters, SicaField, SolverConfig, State};
use proptest::prelude::*;

/// Classical RK4 on the autonomous field; returns the state at each multiple of `sample`.
fn rk4<F: VectorField<f64>>(
    field: &F,
    x0: &[f64],
    h: f64,
    t_end: f64,
    sample: f64,
) -> Vec<(f64, Vec<f64>)> {
    let n = (t_end / h).round() as usize;
    let every = (sample / h).round() as usize;
    let dim = x0.len();
    let mut x = x0.to_vec();
    let mut out = vec![(0.0, x.clone())];
    let (mut k1, mut k2, mut k3, mut k4) = (
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
    );
    let mut tmp = vec![0.0; dim];
    for step in 0..n {
        let t = step as f64 * h;
        field.eval(t, &x, &mut k1);
        for c in 0..dim {
            tmp[c] = x[c] + 0.5 * h * k1[c];
        }
        field.eval(t + 0.5 * h, &tmp, &mut k2);
        for c in 0..dim {
            tmp[c] = x[c] + 0.5 * h * k2[c];
        }
        field.eval(t + 0.5 * h, &tmp, &mut k3);
        for c in 0..dim {
            tmp[c] = x[c] + h * k3[c];
        }
        field.eval(t + h, &tmp, &mut k4);
        for c in 0..dim {
            x[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        if (step + 1) % every == 0 {
            out.push(((step + 1) as f64 * h, x.clone()));
        }
    }
    out
}

#[test]
fn unit_order_matches_rk4_on_smooth_fields() {
    // harmonic oscillator, linear and smooth
    let osc = FnField::new(2, |_t: f64, x: &[f64], out: &mut [f64]| {
        out[0] = x[1];
        out[1] = -x[0];
    });
    let h = 2f64.powi(-8);
    let traj = abm_solve(&osc, &[1.0, 0.0], &SolverConfig::new(1.0, h, 10.0)).unwrap();
    let oracle = rk4(&osc, &[1.0, 0.0], 1e-4, 10.0, 0.5);
    let mut worst: f64 = 0.0;
    for (t, x) in &oracle {
        let k = (t / h).round() as usize;
        for c in 0..2 {
            worst = worst.max((traj.state(k)[c] - x[c]).abs());
        }
    }
    assert!(worst <= 1e-4, "max deviation {worst}");

    let p = ModelParameters::reference(0.01);
    let field = SicaField::new(p);
    let x0 = [100.0, 1.0, 0.0, 0.0];
    let traj = abm_solve(&field, &x0, &SolverConfig::new(1.0, h, 10.0)).unwrap();
    let oracle = rk4(&field, &x0, 1e-4, 10.0, 0.5);
    let mut worst: f64 = 0.0;
    for (t, x) in &oracle {
        let k = (t / h).round() as usize;
        for c in 0..4 {
            worst = worst.max((traj.state(k)[c] - x[c]).abs());
        }
    }
    assert!(worst <= 1e-4, "SICA max deviation {worst}");
}

#[test]
fn scalar_decay_matches_mittag_leffler_over_interval() {
    let field = FnField::new(1, |_t: f64, x: &[f64], out: &mut [f64]| {
        out[0] = -2.0 * x[0]
    });
    let h = 2f64.powi(-9);
    for alpha in [0.5, 0.75, 0.9] {
        let traj = abm_solve(&field, &[1.0], &SolverConfig::new(alpha, h, 2.0)).unwrap();
        for k in (64..traj.len()).step_by(64) {
            let t = traj.times()[k];
            let exact = mittag_leffler(alpha, -2.0 * t.powf(alpha)).unwrap();
            assert!(
                (traj.state(k)[0] - exact).abs() < 5e-4,
                "alpha {alpha} t {t}"
            );
        }
    }
}

#[test]
fn reference_scenarios_stay_feasible_and_nonnegative() {
    for (beta, x0) in [
        (0.001, State::new(0.8, 0.1, 0.0, 0.0)),
        (0.01, State::new(100.0, 1.0, 0.0, 0.0)),
    ] {
        let p = ModelParameters::reference(beta);
        let bound = p.recruitment / p.natural_death;
        for alpha in [0.7, 1.0] {
            let traj = simulate(&p, &x0, &SolverConfig::new(alpha, 2f64.powi(-5), 100.0)).unwrap();
            assert!(traj.check_grid());
            for (_, x) in traj.iter() {
                let n: f64 = x.iter().sum();
                assert!(n <= bound + 1e-6);
                assert!(x.iter().all(|&v| v >= -1e-8));
            }
        }
    }
}

#[test]
fn truncated_window_bounds_cost_but_keeps_grid() {
    let p = ModelParameters::reference(0.01);
    let x0 = State::new(100.0, 1.0, 0.0, 0.0);
    let cfg = SolverConfig::new(0.8, 2f64.powi(-4), 50.0);
    let full = simulate(&p, &x0, &cfg).unwrap();
    let wide = simulate(
        &p,
        &x0,
        &cfg.with_memory(MemoryPolicy::Truncated { window: full.len() }),
    )
    .unwrap();
    assert_eq!(full, wide);
    let short = simulate(
        &p,
        &x0,
        &cfg.with_memory(MemoryPolicy::Truncated { window: 200 }),
    )
    .unwrap();
    assert!(short.check_grid());
    assert_eq!(short.len(), full.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn constant_preservation(alpha in 0.05..1.0f64, c in -1e3..1e3f64, h in 0.005..0.2f64) {
        let zero = FnField::new(2, |_t: f64, _x: &[f64], out: &mut [f64]| out.fill(0.0));
        let traj = abm_solve(&zero, &[c, -c], &SolverConfig::new(alpha, h, 2.0)).unwrap();
        for (_, x) in traj.iter() {
            prop_assert!((x[0] - c).abs() <= 1e-14 && (x[1] + c).abs() <= 1e-14);
        }
    }

    #[test]
    fn linearity_in_forcing(alpha in 0.1..1.0f64, c1 in -3.0..3.0f64, c2 in -3.0..3.0f64) {
        let f = |t: f64| t.cos() + 0.5;
        let g = |t: f64| t * t - 1.0;
        let cfg = SolverConfig::new(alpha, 0.01, 2.0);
        let solve = |a: f64, b: f64| {
            let field = FnField::new(1, move |t: f64, _x: &[f64], out: &mut [f64]| out[0] = a * f(t) + b * g(t));
            abm_solve(&field, &[0.0], &cfg).unwrap()
        };
        let (uf, ug, ufg) = (solve(1.0, 0.0), solve(0.0, 1.0), solve(c1, c2));
        for k in 0..ufg.len() {
            let combo = c1 * uf.state(k)[0] + c2 * ug.state(k)[0];
            let scale = c1.abs() * uf.state(k)[0].abs() + c2.abs() * ug.state(k)[0].abs();
            prop_assert!((ufg.state(k)[0] - combo).abs() <= 1e-12 * scale.max(1e-300) + 1e-15);
        }
    }

    #[test]
    fn memory_policies_agree_with_large_window(alpha in 0.2..1.0f64, extra in 0usize..20) {
        let field = FnField::new(1, |_t: f64, x: &[f64], out: &mut [f64]| out[0] = -x[0] + x[0].sin());
        let cfg = SolverConfig::new(alpha, 0.02, 1.0);
        let full = abm_solve(&field, &[0.7], &cfg).unwrap();
        let window = full.len() - 1 + extra;
        let trunc = abm_solve(&field, &[0.7], &cfg.with_memory(MemoryPolicy::Truncated { window })).unwrap();
        prop_assert_eq!(full, trunc);
    }
}
