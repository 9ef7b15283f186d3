use maslov_core::linalg::{self, RMat};
use maslov_core::partition::IndexOptions;
use maslov_core::path::{interpolate_samples, OperatorPath, Path};
use maslov_core::random;
use maslov_core::specflow::{
    crossing_form_sf, crossing_form_sf_with_derivative, endpoint_count_difference, local_flow_from_form,
    negative_count, operator_kernel, riesz, riesz_path, spectral_flow, spectral_flow_with,
};
use nalgebra::DVector;

fn diag(values: &[f64]) -> RMat {
    RMat::from_diagonal(&DVector::from_row_slice(values))
}

fn scalar(f: fn(f64) -> f64) -> OperatorPath {
    Path::from_fn(move |t| RMat::from_element(1, 1, f(t)))
}

#[test]
fn definition_examples() {
    assert_eq!(spectral_flow(&Path::constant(diag(&[1.0, -2.0, 0.0]))).unwrap(), 0);
    assert_eq!(spectral_flow(&scalar(|t| t - 0.5)).unwrap(), 1);
    assert_eq!(spectral_flow(&scalar(|t| t)).unwrap(), 0);
    assert_eq!(spectral_flow(&scalar(|t| t - 1.0)).unwrap(), 1);
    assert_eq!(spectral_flow(&scalar(|t| 0.5 - t)).unwrap(), -1);
}

#[test]
fn riesz_transform() {
    assert_eq!(riesz(&RMat::zeros(3, 3)).unwrap(), RMat::zeros(3, 3));
    let r = riesz(&diag(&[3.0, -4.0])).unwrap();
    let expected = diag(&[3.0 / 10f64.sqrt(), -4.0 / 17f64.sqrt()]);
    assert!(linalg::max_abs(&(r - expected)) < 1e-12);

    let mut rng = random::rng(1);
    for _ in 0..10 {
        let a = random::symmetric(&mut rng, 5) * 10.0;
        let r = riesz(&a).unwrap();
        assert!(linalg::norm2(&r) < 1.0);
        let mapped: Vec<f64> = linalg::symmetric_eigenvalues(&a).iter().map(|m| m / (1.0 + m * m).sqrt()).collect();
        for (x, y) in linalg::symmetric_eigenvalues(&r).iter().zip(&mapped) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn catenation_reparametrization_and_riesz_on_random_paths() {
    let mut rng = random::rng(2);
    for d in 1..=6 {
        for _ in 0..4 {
            let a = random::operator_path(&mut rng, d);
            let b = random::operator_path(&mut rng, d);
            let end = a.eval(1.0).unwrap();
            let start = b.eval(0.0).unwrap();
            let bridge = interpolate_samples(vec![(0.0, end), (1.0, start)]).unwrap();
            let b = bridge.catenate(&b);
            let sum = spectral_flow(&a).unwrap() + spectral_flow(&b).unwrap();
            assert_eq!(spectral_flow(&a.catenate(&b)).unwrap(), sum);
            let sf = spectral_flow(&a).unwrap();
            assert_eq!(spectral_flow(&a.reparametrize(|t| t.powi(3))).unwrap(), sf);
            assert_eq!(spectral_flow(&riesz_path(&a)).unwrap(), sf);
            assert_eq!(sf, endpoint_count_difference(&a).unwrap());
            let fine = spectral_flow_with(&a, &IndexOptions::default().with_max_step(1.0 / 256.0)).unwrap();
            assert_eq!(fine.index, sf);
        }
    }
}

#[test]
fn negative_counts() {
    assert_eq!(negative_count(&diag(&[-1.0, 0.0, 2.0, -3.0])), 2);
    let path = Path::from_fn(|t| diag(&[t - 0.5, 0.25 - t, -1.0]));
    let neg0 = negative_count(&path.eval(0.0).unwrap()) as i64;
    let neg1 = negative_count(&path.eval(1.0).unwrap()) as i64;
    assert_eq!(spectral_flow(&path).unwrap(), neg0 - neg1);
}

#[test]
fn crossing_form_examples() {
    let form = crossing_form_sf(&scalar(|t| t - 0.5), 0.5).unwrap();
    assert_eq!(form.signature(), (1, 0));
    assert_eq!(local_flow_from_form(&form, 0.5).unwrap(), 1);

    let path = Path::from_fn(|t| diag(&[t - 0.5, 0.5 - t]));
    let form = crossing_form_sf(&path, 0.5).unwrap();
    assert_eq!(form.signature(), (1, 1));
    let local = local_flow_from_form(&form, 0.5).unwrap();
    assert_eq!(local, 0);
    assert_eq!(spectral_flow(&path.restrict(0.4, 0.6)).unwrap(), local);

    assert!(crossing_form_sf(&scalar(|t| t + 1.0), 0.5).is_err());
    let flat = Path::constant(diag(&[0.0, 1.0]));
    assert!(!crossing_form_sf(&flat, 0.5).unwrap().regular);
}

#[test]
fn endpoint_crossings() {
    let start = Path::from_fn(|t| diag(&[t, -t, 2.0 * t]));
    let form = crossing_form_sf(&start, 0.0).unwrap();
    assert_eq!(form.signature(), (2, 1));
    assert_eq!(local_flow_from_form(&form, 0.0).unwrap(), -1);
    assert_eq!(spectral_flow(&start.restrict(0.0, 0.1)).unwrap(), -1);

    let end = Path::from_fn(|t| diag(&[t - 1.0, 1.0 - t]));
    let form = crossing_form_sf(&end, 1.0).unwrap();
    assert_eq!(local_flow_from_form(&form, 1.0).unwrap(), 1);
    assert_eq!(spectral_flow(&end.restrict(0.9, 1.0)).unwrap(), 1);
}

/// `A_D + C_t` with a fixed `A_D` having a two-dimensional kernel: the form
/// of the Riesz-transformed path equals `d/dt <x, C_t y>` on the kernel.
#[test]
fn perturbation_form_matches_the_riesz_form() {
    let mut rng = random::rng(9);
    for _ in 0..10 {
        let o = random::orthogonal(&mut rng, 4);
        let a_d = &o * diag(&[0.0, 0.0, 1.5, -2.0]) * o.transpose();
        let s = random::symmetric(&mut rng, 4);
        let a = a_d.clone();
        let sc = s.clone();
        let path: OperatorPath = Path::from_fn(move |t| &a + &sc * (t - 0.5));
        let derivative: OperatorPath = Path::constant(s.clone());

        let kernel = operator_kernel(&a_d);
        assert_eq!(kernel.ncols(), 2);
        let q0 = kernel.transpose() * &s * &kernel;
        let exact = crossing_form_sf_with_derivative(&path, &derivative, 0.5).unwrap();
        let riesz_form = crossing_form_sf(&riesz_path(&path), 0.5).unwrap();
        let q0_values = linalg::symmetric_eigenvalues(&q0);
        for ((x, y), z) in q0_values.iter().zip(&exact.eigenvalues).zip(&riesz_form.eigenvalues) {
            assert!((x - y).abs() < 1e-10);
            assert!((x - z).abs() < 1e-6);
        }
        assert_eq!(exact.signature(), riesz_form.signature());
    }
}

#[test]
fn local_contributions_add_up() {
    let path = Path::from_fn(|t| diag(&[t - 0.3, 0.7 - t, (t - 0.1) * (t - 0.9), 1.0]));
    let mut total = 0;
    for t_star in [0.1, 0.3, 0.7, 0.9] {
        total += local_flow_from_form(&crossing_form_sf(&path, t_star).unwrap(), t_star).unwrap();
    }
    assert_eq!(total, spectral_flow(&path).unwrap());
}
