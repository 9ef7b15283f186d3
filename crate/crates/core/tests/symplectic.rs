use maslov_core::error::Error;
use maslov_core::linalg::{self, c, CMat, RMat};
use maslov_core::random;
use maslov_core::souriau::souriau_of_unitary;
use maslov_core::symplectic::{
    graph_lagrangian, intersection_dim, is_lagrangian, lagrangian_from_unitary, reference_lagrangian, standard_space,
    unitary_of_lagrangian, ComplexUnitary, Lagrangian,
};
use nalgebra::DVector;

fn e(n: usize, k: usize) -> DVector<f64> {
    DVector::from_fn(2 * n, |i, _| if i == k { 1.0 } else { 0.0 })
}

fn columns(n: usize, ks: &[usize]) -> RMat {
    RMat::from_columns(&ks.iter().map(|k| e(n, *k)).collect::<Vec<_>>())
}

fn scalar(z: num_complex::Complex64) -> ComplexUnitary {
    ComplexUnitary::new(CMat::from_element(1, 1, z)).unwrap()
}

#[test]
fn standard_structures() {
    let s1 = standard_space(1).unwrap();
    assert_eq!(*s1.j(), RMat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    let s2 = standard_space(2).unwrap();
    assert_eq!(s2.j() * s2.j(), -RMat::identity(4, 4));
    let s3 = standard_space(3).unwrap();
    assert_eq!(s3.omega(&e(3, 0), &e(3, 3)), 1.0);
    assert_eq!(s3.omega(&e(3, 0), &e(3, 1)), 0.0);
    assert!(matches!(standard_space(0), Err(Error::Dimension(_))));
}

#[test]
fn lagrangian_membership() {
    let s1 = standard_space(1).unwrap();
    assert!(is_lagrangian(&s1, &columns(1, &[0])).unwrap());
    let s2 = standard_space(2).unwrap();
    assert!(is_lagrangian(&s2, &columns(2, &[0, 1])).unwrap());
    assert!(!is_lagrangian(&s2, &columns(2, &[0, 2])).unwrap());
    assert!(is_lagrangian(&s2, &RMat::zeros(4, 3)).is_err());
}

#[test]
fn intersection_dimensions() {
    let s = standard_space(2).unwrap();
    let std = reference_lagrangian(&s);
    assert_eq!(intersection_dim(&std, &std).unwrap(), 2);
    assert_eq!(intersection_dim(&std.perp(), &std).unwrap(), 0);
    let mixed = Lagrangian::from_frame(&s, columns(2, &[0, 3])).unwrap();
    assert_eq!(intersection_dim(&mixed, &std).unwrap(), 1);
    let other = standard_space(3).unwrap();
    assert!(matches!(
        intersection_dim(&std, &reference_lagrangian(&other)),
        Err(Error::SpaceMismatch)
    ));
}

#[test]
fn intersection_properties_on_random_pairs() {
    let mut rng = random::rng(21);
    for n in 1..=5 {
        let s = standard_space(n).unwrap();
        for _ in 0..10 {
            let mu = random::lagrangian(&mut rng, &s);
            let lambda = random::lagrangian(&mut rng, &s);
            assert_eq!(intersection_dim(&mu, &lambda).unwrap(), intersection_dim(&lambda, &mu).unwrap());
            assert_eq!(intersection_dim(&mu, &mu).unwrap(), n);
            assert_eq!(intersection_dim(&mu, &mu.perp()).unwrap(), 0);
        }
    }
}

#[test]
fn graphs() {
    let s = standard_space(1).unwrap();
    let std = reference_lagrangian(&s);
    assert!(graph_lagrangian(&std, &RMat::zeros(1, 1)).unwrap().same_subspace(&std));
    let g = graph_lagrangian(&std, &RMat::from_element(1, 1, 2.0)).unwrap();
    let expected = RMat::from_column_slice(2, 1, &[1.0, 2.0]) / 5f64.sqrt();
    assert!(linalg::subspace_sin_distance(g.frame(), &expected) < 1e-12);

    let s2 = standard_space(2).unwrap();
    let asymmetric = RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    assert!(matches!(
        graph_lagrangian(&reference_lagrangian(&s2), &asymmetric),
        Err(Error::NotSymmetric(_))
    ));
    let mut rng = random::rng(3);
    for _ in 0..20 {
        let mu = random::lagrangian(&mut rng, &s2);
        let phi = random::symmetric(&mut rng, 2);
        let g = graph_lagrangian(&mu, &phi).unwrap();
        assert!(is_lagrangian(&s2, g.frame()).unwrap());
    }
}

#[test]
fn rho_on_scalars() {
    let s = standard_space(1).unwrap();
    let std = reference_lagrangian(&s);
    let id = lagrangian_from_unitary(&std, &ComplexUnitary::identity(1)).unwrap();
    assert!(id.same_subspace(&std.perp()));
    let i = lagrangian_from_unitary(&std, &scalar(c(0.0, 1.0))).unwrap();
    assert!(i.same_subspace(&std));
    for theta in [0.3, 1.1, 2.5] {
        let line = lagrangian_from_unitary(&std, &scalar(num_complex::Complex64::from_polar(1.0, theta))).unwrap();
        let a = std::f64::consts::FRAC_PI_2 + theta;
        let expected = RMat::from_column_slice(2, 1, &[a.cos(), a.sin()]);
        assert!(linalg::subspace_sin_distance(line.frame(), &expected) < 1e-12);
    }
    let not_unitary = CMat::from_element(1, 1, c(2.0, 0.0));
    assert!(matches!(ComplexUnitary::new(not_unitary), Err(Error::NotUnitary(_))));
}

#[test]
fn unitary_lifts_round_trip() {
    let s = standard_space(2).unwrap();
    let std = reference_lagrangian(&s);
    let u = unitary_of_lagrangian(&std, &std.perp()).unwrap();
    assert!(lagrangian_from_unitary(&std, &u).unwrap().same_subspace(&std.perp()));

    let u = unitary_of_lagrangian(&std, &std).unwrap();
    let w = souriau_of_unitary(&std, &u).unwrap();
    assert!(linalg::max_abs_c(&(w.w.matrix() + CMat::identity(2, 2))) < 1e-12);

    let s3 = standard_space(3).unwrap();
    let lambda = reference_lagrangian(&s3);
    let mut rng = random::rng(8);
    for _ in 0..50 {
        let mu = random::lagrangian(&mut rng, &s3);
        let u = unitary_of_lagrangian(&lambda, &mu).unwrap();
        assert!(lagrangian_from_unitary(&lambda, &u).unwrap().distance(&mu) <= 1e-9);
    }
}
