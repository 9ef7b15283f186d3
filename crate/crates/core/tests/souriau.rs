use std::f64::consts::PI;

use maslov_core::linalg::{self, c, CMat, RMat};
use maslov_core::random;
use maslov_core::souriau::{complexify, phi_map, souriau_map, souriau_of_unitary, t_lambda, theta};
use maslov_core::symplectic::{
    intersection_dim, lagrangian_from_unitary, reference_lagrangian, standard_space, ComplexUnitary, Lagrangian,
};
use num_complex::Complex64;

fn scalar(z: Complex64) -> ComplexUnitary {
    ComplexUnitary::new(CMat::from_element(1, 1, z)).unwrap()
}

#[test]
fn theta_examples() {
    let s = standard_space(2).unwrap();
    let std = reference_lagrangian(&s);
    let id = ComplexUnitary::identity(2);
    assert_eq!(theta(&std, &id).unwrap().matrix(), id.matrix());

    let s1 = standard_space(1).unwrap();
    let z = Complex64::from_polar(1.0, 0.7);
    let t = theta(&reference_lagrangian(&s1), &scalar(z)).unwrap();
    assert!((t.matrix()[(0, 0)] - z).norm() < 1e-15);

    let mut rng = random::rng(4);
    for _ in 0..20 {
        let u = random::unitary(&mut rng, 3);
        let std3 = reference_lagrangian(&standard_space(3).unwrap());
        let twice = theta(&std3, &theta(&std3, &u).unwrap()).unwrap();
        assert!(linalg::max_abs_c(&(twice.matrix() - u.matrix())) < 1e-14);
        let expected = linalg::compose_complex(&u.x().transpose(), &u.y().transpose());
        assert!(linalg::max_abs_c(&(theta(&std3, &u).unwrap().matrix() - expected)) < 1e-14);
    }
}

#[test]
fn souriau_examples() {
    let s = standard_space(1).unwrap();
    let std = reference_lagrangian(&s);
    let w = souriau_map(&std, &std.perp()).unwrap();
    assert!((w.w.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    assert_eq!(w.kernel_dim(), 0);

    let w = souriau_map(&std, &std).unwrap();
    assert!((w.w.matrix()[(0, 0)] + c(1.0, 0.0)).norm() < 1e-12);
    assert_eq!(w.kernel_dim(), 1);

    for th in [0.2, 1.3, 2.9] {
        let line = lagrangian_from_unitary(&std, &scalar(Complex64::from_polar(1.0, th))).unwrap();
        let w = souriau_map(&std, &line).unwrap();
        assert!((w.w.matrix()[(0, 0)] - Complex64::from_polar(1.0, 2.0 * th)).norm() < 1e-12);
    }
}

#[test]
fn souriau_image_ignores_the_lift() {
    let s = standard_space(3).unwrap();
    let std = reference_lagrangian(&s);
    let mut rng = random::rng(12);
    for _ in 0..20 {
        let u = random::unitary(&mut rng, 3);
        let o = linalg::to_complex(&random::orthogonal(&mut rng, 3));
        let relifted = ComplexUnitary::new(u.matrix() * o).unwrap();
        let a = souriau_of_unitary(&std, &u).unwrap();
        let b = souriau_of_unitary(&std, &relifted).unwrap();
        assert!(linalg::max_abs_c(&(a.w.matrix() - b.w.matrix())) < 1e-9);
    }
}

#[test]
fn kernel_identity_with_prescribed_intersections() {
    let mut rng = random::rng(30);
    for n in 1..=4 {
        let s = standard_space(n).unwrap();
        let lambda = random::lagrangian(&mut rng, &s);
        for k in 0..=n {
            let mu = random::lagrangian_meeting(&mut rng, &lambda, k).unwrap();
            assert_eq!(intersection_dim(&mu, &lambda).unwrap(), k);
            assert_eq!(souriau_map(&lambda, &mu).unwrap().kernel_dim(), k);
        }
    }
}

#[test]
fn complexification_examples() {
    let s = standard_space(2).unwrap();
    let std = reference_lagrangian(&s);
    let t = t_lambda(&std);
    assert!(linalg::max_abs_c(&(complexify(&std).unwrap().t - &t)) < 1e-12);
    assert!(linalg::max_abs_c(&(complexify(&std.perp()).unwrap().t + &t)) < 1e-12);
    let mut rng = random::rng(2);
    for _ in 0..10 {
        let mu = random::lagrangian(&mut rng, &s);
        let g = complexify(&mu).unwrap();
        assert!(linalg::is_unitary(&g.t, 1e-10));
    }
}

#[test]
fn appendix_diagram_commutes() {
    let mut rng = random::rng(40);
    for n in 1..=4 {
        let s = standard_space(n).unwrap();
        let lambda = reference_lagrangian(&s);
        for _ in 0..25 {
            let mu = random::lagrangian(&mut rng, &s);
            let w = souriau_map(&lambda, &mu).unwrap();
            let phi = phi_map(&w.w, &lambda).unwrap();
            assert!(phi.distance(&complexify(&mu).unwrap()) <= 1e-9);
        }
    }
}

#[test]
fn phi_of_the_reference_and_its_complement() {
    let s = standard_space(1).unwrap();
    let std = reference_lagrangian(&s);
    for mu in [std.perp(), std.clone()] {
        let w = souriau_map(&std, &mu).unwrap();
        let graph = phi_map(&w.w, &std).unwrap();
        assert!(graph.distance(&complexify(&mu).unwrap()) < 1e-12);
    }
    let w = souriau_map(&std, &std).unwrap();
    assert!(linalg::max_abs_c(&(phi_map(&w.w, &std).unwrap().t - t_lambda(&std))) < 1e-12);

    let rotated = Lagrangian::from_span(&s, &RMat::from_column_slice(2, 1, &[(PI / 3.0).cos(), (PI / 3.0).sin()])).unwrap();
    let a = phi_map(&souriau_map(&std, &rotated).unwrap().w, &std).unwrap();
    let b = phi_map(&souriau_map(&std, &std).unwrap().w, &std).unwrap();
    assert!(a.distance(&b) > 0.1);
}
