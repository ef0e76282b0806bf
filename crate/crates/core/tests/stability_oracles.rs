use fracsica::equilibria::compute_r0;
use fracsica::model::rhs;
use fracsica::stability::{
    char_poly_discrepancy, classify_dfe, cubic_roots, dfe_char_poly, jacobian_at_dfe,
    StabilityRule, Verdict,
};
use fracsica::{CharPoly, Complex, ModelParameters, State};
use nalgebra::{Matrix3, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_params(rng: &mut ChaCha8Rng) -> ModelParameters {
    ModelParameters {
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
    }
}

fn eigenvalues4(j: &[[f64; 4]; 4]) -> Vec<Complex<f64>> {
    let m = Matrix4::from_fn(|r, c| j[r][c]);
    m.complex_eigenvalues()
        .iter()
        .map(|z| Complex::new(z.re, z.im))
        .collect()
}

fn companion_roots(c: &CharPoly) -> Vec<Complex<f64>> {
    let m = Matrix3::new(-c.b1, -c.b2, -c.b3, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    m.complex_eigenvalues()
        .iter()
        .map(|z| Complex::new(z.re, z.im))
        .collect()
}

#[test]
fn finite_difference_jacobian() {
    for beta in [0.001, 0.01] {
        let p = ModelParameters::reference(beta);
        let dfe = State::new(p.recruitment / p.natural_death, 0.0, 0.0, 0.0);
        let j = jacobian_at_dfe(&p);
        let h = 1e-6;
        for col in 0..4 {
            let mut plus = dfe.to_array();
            let mut minus = dfe.to_array();
            plus[col] += h;
            minus[col] -= h;
            let fp = rhs(&p, &State::from_slice(&plus));
            let fm = rhs(&p, &State::from_slice(&minus));
            for row in 0..4 {
                let fd = (fp[row] - fm[row]) / (2.0 * h);
                let tol = 1e-4 * j[row][col].abs().max(1e-6);
                assert!(
                    (fd - j[row][col]).abs() <= tol,
                    "({row},{col}) fd {fd} vs {}",
                    j[row][col]
                );
            }
        }
    }
}

#[test]
fn no_transmission_spectrum_is_real_negative() {
    let p = ModelParameters::reference(0.0);
    let eigs = eigenvalues4(&jacobian_at_dfe(&p));
    assert!(
        eigs.iter().all(|z| z.re < 0.0 && z.im.abs() < 1e-12),
        "{eigs:?}"
    );
}

#[test]
fn closed_form_coefficients_match_numeric_block() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let p = random_params(&mut rng);
        assert!(char_poly_discrepancy(&p) <= 1e-9);
    }
}

#[test]
fn reference_cubic_matches_companion_eigenvalues() {
    let c = dfe_char_poly(&ModelParameters::reference(0.001));
    let oracle = companion_roots(&c);
    for r in cubic_roots(&c) {
        let nearest = oracle
            .iter()
            .map(|o| (o - r).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-10 * r.norm().max(1.0), "root {r}");
    }
}

#[test]
fn cubic_roots_match_companion_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let c = CharPoly::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
        );
        let oracle = companion_roots(&c);
        for r in cubic_roots(&c) {
            let nearest = oracle
                .iter()
                .map(|o| (o - r).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(
                nearest < 1e-10 * r.norm().max(1.0),
                "{c:?}: root {r} vs {oracle:?}"
            );
        }
    }
}

#[test]
fn minus_mu_in_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let p = random_params(&mut rng);
        let eigs = eigenvalues4(&jacobian_at_dfe(&p));
        let target = Complex::new(-p.natural_death, 0.0);
        let nearest = eigs
            .iter()
            .map(|z| (z - target).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-9, "{p:?}");
    }
}

#[test]
fn cubic_roots_are_the_remaining_jacobian_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let p = random_params(&mut rng);
        let eigs = eigenvalues4(&jacobian_at_dfe(&p));
        for r in cubic_roots(&dfe_char_poly(&p)) {
            let nearest = eigs
                .iter()
                .map(|z| (z - r).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-8 * r.norm().max(1.0), "{p:?} root {r}");
        }
    }
}

#[test]
fn rules_agree_with_eigenvalue_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut decided = 0;
    for _ in 0..400 {
        let p = random_params(&mut rng);
        for alpha in [0.3, 0.5, 0.7, 0.9] {
            let report = classify_dfe(&p, alpha).unwrap();
            if report.applied_rule != StabilityRule::Inconclusive {
                decided += 1;
                assert!(report.rule_agrees, "{p:?} alpha {alpha}: {report:?}");
            }
            if report.verdict == Verdict::LocallyAsymptoticallyStable {
                assert!(compute_r0(&p) < 1.0);
                assert!(report.min_arg_margin > 0.0);
            }
        }
    }
    assert!(decided > 0);
}

#[test]
fn single_precision_classification() {
    let p = fracsica::model::ModelParameters::<f32>::reference(0.001);
    let report = classify_dfe(&p, 0.9_f32).unwrap();
    assert_eq!(report.verdict, Verdict::LocallyAsymptoticallyStable);
}
