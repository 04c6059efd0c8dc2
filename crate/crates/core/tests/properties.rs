use proptest::prelude::*;
use rand::Rng;

use cryptoherm::linalg::{self, c, Matrix};
use cryptoherm::metric::{
    dyson_from_metric_with_gauge, expectation, hermitize, physical_inner, quasi_hermiticity_residual,
};
use cryptoherm::models::{
    random_complex, random_cryptohermitian_with, random_hermitian, random_spectrum, rng_from_seed, similar,
};
use cryptoherm::quasistationary::DEFAULT_TOL_QS;
use cryptoherm::{biorthogonal_decompose, dyson_from_metric, metric_from_spectral, qs_solve, MetricOperator, QsStatus};

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn planted(seed: u64, n: usize) -> (Matrix, Vec<f64>, Vec<f64>) {
    let mut rng = rng_from_seed(seed);
    let spectrum = random_spectrum(&mut rng, n);
    let h = random_cryptohermitian_with(&mut rng, &spectrum, 50.0).unwrap();
    let kappa = (0..n).map(|_| rng.gen_range(0.3..3.0)).collect();
    (h, spectrum, kappa)
}

fn random_gauge(seed: u64, n: usize) -> Matrix {
    let mut rng = rng_from_seed(seed ^ 0x5eed);
    random_complex(&mut rng, n, n).qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_is_biorthonormal_and_complete(seed in any::<u64>(), n in 2usize..7) {
        let (h, spectrum, _) = planted(seed, n);
        let sys = biorthogonal_decompose(&h, 1e-10).unwrap();
        prop_assert!(sys.biorthonormality_residual() <= 1e-10);
        prop_assert!(sys.completeness_residual() <= 1e-10);
        prop_assert!((sys.reconstruct() - &h).norm() <= 1e-10 * h.norm());
        for (z, p) in sys.eigenvalues().iter().zip(sorted(spectrum)) {
            prop_assert!((z - c(p, 0.0)).norm() <= 1e-8 * (n as f64));
        }
    }

    #[test]
    fn each_pair_solves_the_eigenproblems(seed in any::<u64>(), n in 2usize..6) {
        let (h, _, _) = planted(seed, n);
        let sys = biorthogonal_decompose(&h, 1e-10).unwrap();
        for j in 0..n {
            let e = sys.eigenvalues()[j];
            prop_assert!((&h * sys.right(j) - sys.right(j) * e).norm() <= 1e-10 * h.norm());
            prop_assert!((h.adjoint() * sys.left(j) - sys.left(j) * e.conj()).norm() <= 1e-9 * h.norm());
        }
    }

    #[test]
    fn principal_sqrt_of_gram_matrix(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = rng_from_seed(seed);
        let b = random_complex(&mut rng, n, n);
        let a = b.adjoint() * &b + linalg::identity(n) * c(0.1, 0.0);
        let s = linalg::principal_sqrt(&a).unwrap();
        prop_assert!(linalg::hermiticity_residual(&s) <= 1e-12);
        prop_assert!((&s * &s - &a).norm() <= 1e-11 * a.norm());
        prop_assert!(linalg::hermitian_eigenvalues(&s)[0] > 0.0);
    }

    #[test]
    fn inverse_residual(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = rng_from_seed(seed);
        let a = random_complex(&mut rng, n, n) + linalg::identity(n) * c(3.0, 0.0);
        let inv = linalg::invert(&a).unwrap();
        let bound = 1e-13 * linalg::condition_number(&a) * (n as f64);
        prop_assert!((&a * &inv - linalg::identity(n)).norm() <= bound);
    }

    #[test]
    fn metric_pipeline_is_isospectral(seed in any::<u64>(), n in 2usize..7) {
        let (h, spectrum, kappa) = planted(seed, n);
        let sys = biorthogonal_decompose(&h, 1e-10).unwrap();
        let theta = metric_from_spectral(&sys, &kappa).unwrap();
        prop_assert!(quasi_hermiticity_residual(&h, &theta) <= 1e-9);
        let omega = dyson_from_metric(&theta).unwrap();
        prop_assert!((omega.adjoint() * &omega - theta.matrix()).norm() <= 1e-10 * theta.matrix().norm());
        let small = hermitize(&h, &omega).unwrap();
        prop_assert!(linalg::hermiticity_residual(&small) <= 1e-8);
        let ev = linalg::hermitian_eigenvalues(&linalg::hermitian_part(&small));
        for (a, b) in ev.iter().zip(sorted(spectrum)) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn dyson_of_metric_is_idempotent(seed in any::<u64>(), n in 2usize..6) {
        let (h, _, kappa) = planted(seed, n);
        let sys = biorthogonal_decompose(&h, 1e-10).unwrap();
        let theta = metric_from_spectral(&sys, &kappa).unwrap();
        let omega = dyson_from_metric(&theta).unwrap();
        let again = MetricOperator::new(omega.adjoint() * &omega).unwrap();
        let omega2 = dyson_from_metric(&again).unwrap();
        prop_assert!((omega2 - &omega).norm() <= 1e-10 * omega.norm());
    }

    #[test]
    fn gauge_leaves_physics_unchanged(seed in any::<u64>(), n in 2usize..6) {
        let (h, _, kappa) = planted(seed, n);
        let sys = biorthogonal_decompose(&h, 1e-10).unwrap();
        let theta = metric_from_spectral(&sys, &kappa).unwrap();
        let u = random_gauge(seed, n);
        let omega = dyson_from_metric(&theta).unwrap();
        let omega_u = dyson_from_metric_with_gauge(&theta, &u).unwrap();
        prop_assert!((omega_u.adjoint() * &omega_u - theta.matrix()).norm() <= 1e-10 * theta.matrix().norm());
        let small = hermitize(&h, &omega).unwrap();
        let small_u = hermitize(&h, &omega_u).unwrap();
        prop_assert!((&u * &small * u.adjoint() - &small_u).norm() <= 1e-9 * small.norm());
        // an observable defined downstairs and pulled back through either gauge
        let mut rng = rng_from_seed(seed);
        let o = random_hermitian(&mut rng, n);
        let lam = linalg::invert(&omega).unwrap() * &o * &omega;
        let lam_u = linalg::invert(&omega_u).unwrap() * (&u * &o * u.adjoint()) * &omega_u;
        prop_assert!((lam - lam_u).norm() <= 1e-9 * o.norm() * theta.condition());
    }

    #[test]
    fn pseudo_hermitian_observables_have_real_expectations(seed in any::<u64>(), n in 2usize..6) {
        let (h, _, kappa) = planted(seed, n);
        let sys = biorthogonal_decompose(&h, 1e-10).unwrap();
        let theta = metric_from_spectral(&sys, &kappa).unwrap();
        let mut rng = rng_from_seed(seed.wrapping_add(1));
        let k = random_hermitian(&mut rng, n);
        let lambda = linalg::invert(theta.matrix()).unwrap() * k;
        let phi = random_complex(&mut rng, n, 1).column(0).into_owned();
        let psi = theta.apply(&phi);
        let value = expectation(&lambda, &phi, &psi).unwrap();
        prop_assert!(value.im.abs() <= 1e-10 * value.norm().max(1.0));
    }

    #[test]
    fn qs_weights_are_scale_invariant(seed in any::<u64>(), scale in 0.1f64..10.0) {
        let mut rng = rng_from_seed(seed);
        let s = linalg::invert(&(random_complex(&mut rng, 3, 3) + linalg::identity(3) * c(2.0, 0.0))).unwrap();
        let h0 = similar(&s, &random_spectrum(&mut rng, 3)).unwrap();
        let h1 = similar(&s, &random_spectrum(&mut rng, 3)).unwrap();
        let base = qs_solve(&h0, &h1, DEFAULT_TOL_QS).unwrap();
        let k = c(scale, 0.0);
        let scaled = qs_solve(&(&h0 * k), &(&h1 * k), DEFAULT_TOL_QS).unwrap();
        prop_assert_eq!(base.status, QsStatus::Compatible);
        prop_assert_eq!(scaled.status, base.status);
        for (a, b) in base.kappa.unwrap().iter().zip(scaled.kappa.unwrap()) {
            prop_assert!((a - b).abs() <= 1e-7 * a.abs());
        }

        // negative scaling reverses the eigenvalue order, so only the metric
        // up to an overall factor survives
        let flipped = qs_solve(&(&h0 * -k), &(&h1 * -k), DEFAULT_TOL_QS).unwrap();
        prop_assert_eq!(flipped.status, QsStatus::Compatible);
        let (a, b) = (base.metric.unwrap(), flipped.metric.unwrap());
        let ratio = a.matrix()[(0, 0)].re / b.matrix()[(0, 0)].re;
        prop_assert!((a.matrix() - b.matrix() * c(ratio, 0.0)).norm() <= 1e-7 * a.matrix().norm());
    }
}

#[test]
fn physical_norm_is_positive_on_many_vectors() {
    let (h, _, kappa) = planted(7, 5);
    let sys = biorthogonal_decompose(&h, 1e-10).unwrap();
    let theta = metric_from_spectral(&sys, &kappa).unwrap();
    let mut rng = rng_from_seed(8);
    for _ in 0..1000 {
        let v = random_complex(&mut rng, 5, 1).column(0).into_owned();
        let norm = physical_inner(&v, &v, &theta).unwrap();
        assert!(norm.re > 0.0);
        assert!(norm.im.abs() <= 1e-12 * norm.re);
        assert!(norm.re >= theta.min_eig() * v.norm_squared() * (1.0 - 1e-12));
    }
}
