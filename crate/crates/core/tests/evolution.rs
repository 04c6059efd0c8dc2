use num_complex::Complex64;

use cryptoherm::evolution::{generator, propagate_h};
use cryptoherm::linalg::{self, c, Matrix, Vector};
use cryptoherm::metric::hermitize;
use cryptoherm::models::FALSIFICATION_COUPLING;
use cryptoherm::models::{
    random_cryptohermitian_with, random_hermitian, random_spectrum, random_unit_vector, rng_from_seed, scenarios,
};
use cryptoherm::{
    biorthogonal_decompose, dyson_from_metric, evolution_operators, metric_from_spectral, propagate_naive,
    propagate_pair, ConstantDyson, DerivativeSource, DysonFamily, ExpPolyDyson, TabulatedDyson, TaylorHamiltonian,
    TimeGrid,
};

/// `exp(−iHt)` from the Hermitian eigendecomposition.
fn hermitian_propagator(h: &Matrix, t: f64) -> Matrix {
    let eig = linalg::hermitian_part(h).symmetric_eigen();
    let phases = Matrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -l * t)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

fn unit_grid() -> TimeGrid {
    TimeGrid::uniform(0.0, 1.0, 11).unwrap()
}

#[test]
fn u_right_matches_spectral_propagator() {
    let mut rng = rng_from_seed(3);
    let h = random_hermitian(&mut rng, 4);
    let ops = evolution_operators(
        &TaylorHamiltonian::constant(h.clone()).unwrap(),
        &ConstantDyson::identity(4),
        &unit_grid(),
        1e-3,
    )
    .unwrap();
    for (k, &t) in ops.times.iter().enumerate() {
        assert!(
            (&ops.u_right[k] - hermitian_propagator(&h, t)).norm() <= 1e-9,
            "t = {t}"
        );
    }
}

#[test]
fn constant_metric_evolution_matches_planted_similarity() {
    let mut rng = rng_from_seed(5);
    let spectrum = random_spectrum(&mut rng, 3);
    let h = random_cryptohermitian_with(&mut rng, &spectrum, 20.0).unwrap();
    let sys = biorthogonal_decompose(&h, 1e-10).unwrap();
    let theta = metric_from_spectral(&sys, &[1.0, 2.0, 0.5]).unwrap();
    let fam = ConstantDyson::new(dyson_from_metric(&theta).unwrap());
    let phi0 = random_unit_vector(&mut rng, 3);
    let model = TaylorHamiltonian::constant(h.clone()).unwrap();

    let traj = propagate_pair(&model, &fam, &phi0, None, &unit_grid(), 1e-3).unwrap();
    let naive = propagate_naive(&model, &fam, &phi0, &unit_grid(), 1e-3).unwrap();
    let v = sys.right_vectors();
    let v_inv = linalg::invert(v).unwrap();
    for (k, &t) in traj.times.iter().enumerate() {
        let phases = Matrix::from_diagonal(&Vector::from_iterator(
            3,
            sys.eigenvalues().iter().map(|e| (-Complex64::i() * e * t).exp()),
        ));
        let exact = v * phases * &v_inv * &phi0;
        assert!((&traj.phi[k] - &exact).norm() <= 1e-9);
        assert!((&traj.psi[k] - theta.apply(&exact)).norm() <= 1e-9 * theta.max_eig());
        assert!((&naive.phi[k] - &traj.phi[k]).norm() <= 1e-12);
    }
    assert!(traj.max_norm_drift <= 1e-10);
}

/// For the falsification model `ΩΦ` evolves under the constant diagonal
/// `h₀`, so `Φ(t) = (I − tG)·exp(−ih₀t)·φ₀`.
fn falsification_exact(t: f64, phi0: &Vector) -> Vector {
    let g = linalg::from_real_rows(&[&[0.0, FALSIFICATION_COUPLING], &[0.0, 0.0]]);
    let back = linalg::identity(2) - g * c(t, 0.0);
    let phase = Matrix::from_diagonal(&Vector::from_vec(vec![
        Complex64::from_polar(1.0, -t),
        Complex64::from_polar(1.0, t),
    ]));
    back * phase * phi0
}

fn falsification_error(step: f64) -> f64 {
    let s = scenarios().get("falsification").unwrap().build(0).unwrap();
    let traj = propagate_pair(&s.hamiltonian, s.dyson.as_ref(), &s.phi0, None, &s.grid, step).unwrap();
    traj.times
        .iter()
        .zip(&traj.phi)
        .map(|(&t, phi)| (phi - falsification_exact(t, &s.phi0)).norm())
        .fold(0.0, f64::max)
}

#[test]
fn covariant_pair_hits_closed_form() {
    assert!(falsification_error(1e-3) <= 1e-10);
}

#[test]
fn state_error_is_fourth_order() {
    let ratio = falsification_error(0.02) / falsification_error(0.01);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn naive_law_breaks_the_norm_when_the_metric_moves() {
    let reg = scenarios();
    let moving = reg.get("falsification").unwrap().build(0).unwrap();
    let naive = propagate_naive(
        &moving.hamiltonian,
        moving.dyson.as_ref(),
        &moving.phi0,
        &moving.grid,
        1e-3,
    )
    .unwrap();
    let pair = propagate_pair(
        &moving.hamiltonian,
        moving.dyson.as_ref(),
        &moving.phi0,
        None,
        &moving.grid,
        1e-3,
    )
    .unwrap();
    assert!(naive.max_norm_drift >= 1e-3);
    assert!(pair.max_norm_drift <= 1e-8);

    let fixed = reg.get("falsification-static").unwrap().build(0).unwrap();
    let naive = propagate_naive(&fixed.hamiltonian, fixed.dyson.as_ref(), &fixed.phi0, &fixed.grid, 1e-3).unwrap();
    assert!(naive.max_norm_drift <= 1e-12);
}

#[test]
fn lower_picture_is_unitary() {
    let s = scenarios().get("random-covariant").unwrap().build(4).unwrap();
    let fam = s.dyson.clone();
    let h = s.hamiltonian.clone();
    let start = fam.omega(0.0) * &s.phi0;
    let lower = propagate_h(move |t| hermitize(&h.evaluate(t), &fam.omega(t)), &start, &s.grid, 1e-3).unwrap();
    assert!(lower.max_norm_drift <= 1e-8);
    assert!(lower.max_hermiticity_residual <= 1e-10);
}

#[test]
fn tabulated_family_agrees_with_closed_form() {
    let s = scenarios().get("random-covariant").unwrap().build(2).unwrap();
    let exact = s.dyson.clone();
    let tab_src = exact.clone();
    let tab = TabulatedDyson::new(4, move |t| tab_src.omega(t));
    assert_eq!(tab.derivative_source(), DerivativeSource::FiniteDifference);
    for &t in s.grid.times() {
        let a = generator(&s.hamiltonian, exact.as_ref(), t).unwrap();
        let b = generator(&s.hamiltonian, &tab, t).unwrap();
        assert!((a - &b).norm() <= 1e-6 * b.norm(), "t = {t}");
    }
}

#[test]
fn exp_poly_generator_matches_difference_quotient() {
    let mut rng = rng_from_seed(9);
    let g = random_hermitian(&mut rng, 3) * c(0.0, 0.3);
    let fam = ExpPolyDyson::new(g, vec![0.1, -0.4, 0.7]).unwrap();
    for t in [0.0, 0.3, 0.9] {
        let d = 1e-5;
        let fd = (fam.omega(t + d) - fam.omega(t - d)) / c(2.0 * d, 0.0);
        assert!((fam.omega_dot(t) - fd).norm() <= 1e-8);
    }
}
