use fracsica::equilibria::endemic_equilibrium;
use fracsica::lyapunov::{
    dfe_lyapunov_series, endemic_lyapunov_series, lyapunov_coefficients,
    lyapunov_coefficients_positive_form, monotonicity_audit,
};
use fracsica::model::simulate;
use fracsica::{AuditCriteria, ModelParameters, SolverConfig, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn coefficients_positive_over_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let p = ModelParameters {
            recruitment: rng.gen_range(0.5..5.0),
            natural_death: rng.gen_range(0.005..0.1),
            contact_rate: rng.gen_range(0.0..0.05),
            eta_c: rng.gen_range(0.0..1.0),
            eta_a: rng.gen_range(1.0..2.0),
            treat_i: rng.gen_range(0.0..2.0),
            default_i: rng.gen_range(0.0..1.0),
            treat_a: rng.gen_range(0.0..1.0),
            default_c: rng.gen_range(0.0..0.5),
            aids_death: rng.gen_range(0.0..2.0),
        };
        let k = lyapunov_coefficients(&p);
        let r = lyapunov_coefficients_positive_form(&p);
        assert!(k.c1 > 0.0 && k.c2 > 0.0 && k.c3 > 0.0, "{p:?}");
        assert!((k.c2 - r.c2).abs() <= 1e-12 * r.c2);
        assert!((k.c3 - r.c3).abs() <= 1e-12 * r.c3);
    }
}

#[test]
fn disease_free_lyapunov_decays_below_threshold() {
    let p = ModelParameters::reference(0.001);
    for alpha in [0.7, 0.9, 1.0] {
        let traj = simulate(
            &p,
            &State::new(0.8, 0.1, 0.0, 0.0),
            &SolverConfig::new(alpha, 2f64.powi(-5), 100.0),
        )
        .unwrap();
        let v = dfe_lyapunov_series(&p, &traj).unwrap();
        let report = monotonicity_audit(&v, &AuditCriteria::default()).unwrap();
        assert!(
            report.passed && report.decreased,
            "alpha {alpha}: {report:?}"
        );
    }
}

#[test]
fn endemic_lyapunov_decays_above_threshold() {
    let p = ModelParameters::reference(0.01);
    let star = endemic_equilibrium(&p).unwrap();
    for alpha in [0.7, 0.9, 1.0] {
        let traj = simulate(
            &p,
            &State::new(100.0, 1.0, 0.0, 0.0),
            &SolverConfig::new(alpha, 2f64.powi(-5), 100.0),
        )
        .unwrap();
        let (start, v) = endemic_lyapunov_series(&p, &star, &traj).unwrap();
        assert_eq!(start, 1, "C(0) = A(0) = 0 so the audit starts one step in");
        let report = monotonicity_audit(&v, &AuditCriteria::default()).unwrap();
        assert!(
            report.passed && report.decreased,
            "alpha {alpha}: {report:?}"
        );
    }
}
