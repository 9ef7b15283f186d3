use std::f64::consts::PI;
use std::sync::Arc;

use maslov_core::bvp::{
    cauchy_data_space, crossing_times, evans_determinant, kernel_dim_circle, maslov_side, spectral_flow_bvp,
    spectrum, split_boundary_conditions, transmission_lagrangian, two_parameter_family, verify_theorems, Family,
    GalerkinOracle, ModelProblem, Params, Piece, Profile, Side, VerifyConfig, GALERKIN_MODES,
};
use maslov_core::error::Error;
use maslov_core::linalg::{self, RMat};
use maslov_core::random;
use maslov_core::symplectic::{intersection_dim, is_lagrangian, reference_lagrangian};
use nalgebra::DVector;
use rand::Rng;

fn sigma() -> RMat {
    RMat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
}

fn plain(b: f64) -> ModelProblem {
    ModelProblem::bulk_shift(b, 0.0)
}

#[test]
fn transfer_matrices_match_closed_forms() {
    let t = plain(0.0).transfer_matrix(Side::Minus, Params::both(0.0), 0.0);
    assert!(linalg::max_abs(&(t - RMat::identity(2, 2))) < 1e-14);

    let t = plain(0.0).transfer_matrix(Side::Minus, Params::both(0.0), 1.0);
    assert!(linalg::max_abs(&(t + RMat::identity(2, 2))) < 1e-12);

    let t = plain(0.3).transfer_matrix(Side::Minus, Params::both(0.0), 0.0);
    let expected = RMat::from_diagonal(&DVector::from_vec(vec![(-0.3 * PI).exp(), (0.3 * PI).exp()]));
    assert!(linalg::max_abs(&(t - expected)) < 1e-12);
}

#[test]
fn cauchy_data_spaces_are_lagrangian_and_continuous() {
    let p = ModelProblem::default_demo();
    let mut rng = random::rng(11);
    for _ in 0..20 {
        let params = Params::new(rng.random(), rng.random());
        let lambda = rng.random_range(-3.0..3.0);
        for side in [Side::Minus, Side::Plus, Side::Circle] {
            let cauchy = cauchy_data_space(&p, side, params, lambda).unwrap();
            assert!(is_lagrangian(p.boundary().space(side), cauchy.frame()).unwrap());
        }
    }
    let minus = |t: f64| cauchy_data_space(&p, Side::Minus, Params::both(t), 0.0).unwrap();
    let mut previous = f64::INFINITY;
    for h in [1e-2, 1e-3, 1e-4, 1e-5] {
        let d = minus(0.4).distance(&minus(0.4 + h));
        assert!(d < previous);
        previous = d;
    }
    assert!(previous < 1e-4);
}

#[test]
fn free_arc_cauchy_data_is_the_diagonal() {
    let p = plain(0.0);
    let cauchy = cauchy_data_space(&p, Side::Minus, Params::both(0.0), 0.0).unwrap();
    let diagonal = reference_lagrangian(p.boundary().minus());
    assert!(cauchy.same_subspace(&diagonal));
}

#[test]
fn transmission_lagrangian_has_half_dimension() {
    let p = ModelProblem::default_demo();
    let delta = transmission_lagrangian(&p);
    assert_eq!(delta.frame().shape(), (8, 4));
    assert!(is_lagrangian(p.boundary().space(Side::Circle), delta.frame()).unwrap());
}

#[test]
fn kernel_identity_on_the_circle() {
    let cases = [ModelProblem::default_demo(), ModelProblem::bulk_shift(0.0, 3.0), ModelProblem::bulk_shift(0.7, 2.0)];
    for p in &cases {
        let arc = Arc::new(p.clone());
        let mut ts: Vec<f64> = (0..=32).map(|k| k as f64 / 32.0).collect();
        ts.extend(crossing_times(&Family::circle(&arc), 65).unwrap().into_iter().map(|c| c.0));
        let mut nontrivial = 0;
        for t in ts {
            let params = Params::both(t);
            let cauchy = cauchy_data_space(p, Side::Circle, params, 0.0).unwrap();
            let left = intersection_dim(&cauchy, p.boundary().delta()).unwrap();
            let right = kernel_dim_circle(p, params);
            assert_eq!(left, right, "t = {t}");
            nontrivial += right;
        }
        assert!(nontrivial > 0);
    }
}

/// `(lambda_1 - lambda_2) int <u, v>` against the boundary Green form for
/// solutions of `(A + C - lambda_k) w = 0` on both arcs.
#[test]
fn green_form_is_exact() {
    let p = ModelProblem::default_demo();
    let (nodes, weights) = linalg::gauss_legendre(16);
    let mut rng = random::rng(5);
    for side in [Side::Minus, Side::Plus] {
        let cuts = p.breakpoints(side);
        let (a, b) = (cuts[0], cuts[cuts.len() - 1]);
        for _ in 0..10 {
            let params = Params::new(rng.random(), rng.random());
            let (l1, l2) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let u0 = DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
            let v0 = DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
            let u = |l: f64, w0: &DVector<f64>, tau: f64| p.transfer_between(params, l, a, tau).unwrap() * w0;
            let mut integral = 0.0;
            for cell in cuts.windows(2) {
                let half = 0.5 * (cell[1] - cell[0]);
                for (x, w) in nodes.iter().zip(&weights) {
                    let tau = cell[0] + half * (1.0 + x);
                    integral += w * half * u(l1, &u0, tau).dot(&u(l2, &v0, tau));
                }
            }
            let green = |tau: f64| (p.sigma() * u(l1, &u0, tau)).dot(&u(l2, &v0, tau));
            let boundary = green(b) - green(a);
            assert!(((l1 - l2) * integral - boundary).abs() < 1e-8, "{} vs {boundary}", (l1 - l2) * integral);
        }
    }
}

#[test]
fn closed_circle_spectrum_is_the_integers() {
    let p = plain(0.0);
    let report = spectrum(&p, Side::Circle, p.boundary().delta(), Params::both(0.0), (-3.5, 3.5)).unwrap();
    assert_eq!(report.eigenvalues.len(), 7);
    for (k, e) in report.eigenvalues.iter().enumerate() {
        assert!((e.value - (k as f64 - 3.0)).abs() < 1e-8);
        assert_eq!(e.multiplicity, 2);
        assert_eq!(e.intersection_dim, 2);
        assert!(e.parity_consistent);
    }
}

#[test]
fn interval_spectrum_is_the_even_integers() {
    let p = plain(0.0);
    let diagonal = reference_lagrangian(p.boundary().minus());
    let report = spectrum(&p, Side::Minus, &diagonal, Params::both(0.0), (-4.5, 4.5)).unwrap();
    let values: Vec<f64> = report.eigenvalues.iter().map(|e| e.value).collect();
    assert_eq!(values.len(), 5);
    for (v, expected) in values.iter().zip([-4.0, -2.0, 0.0, 2.0, 4.0]) {
        assert!((v - expected).abs() < 1e-8);
    }
    assert!(report.eigenvalues.iter().all(|e| e.multiplicity == 2));
}

#[test]
fn empty_window_and_edge_collision() {
    let p = plain(0.0);
    let report = spectrum(&p, Side::Circle, p.boundary().delta(), Params::both(0.0), (0.2, 0.8)).unwrap();
    assert!(report.eigenvalues.is_empty());
    assert!(report.certification_margin > 0.0);
    let err = spectrum(&p, Side::Circle, p.boundary().delta(), Params::both(0.0), (-0.5, 1.0)).unwrap_err();
    assert!(matches!(err.root(), Error::WindowEdge(_)));
}

#[test]
fn evans_determinant_vanishes_at_eigenvalues() {
    let p = plain(0.0);
    let delta = p.boundary().delta();
    for k in -2..=2 {
        assert!(evans_determinant(&p, Side::Circle, delta, Params::both(0.0), k as f64).unwrap().abs() < 1e-10);
    }
    assert!(evans_determinant(&p, Side::Circle, delta, Params::both(0.0), 0.5).unwrap().abs() > 1e-3);
}

fn compare_with_galerkin(p: &ModelProblem, params: Params, window: (f64, f64), tol: f64) {
    let evans = spectrum(p, Side::Circle, p.boundary().delta(), params, window).unwrap().values();
    let galerkin = GalerkinOracle::new(p, GALERKIN_MODES).unwrap().eigenvalues_in(params, window);
    assert_eq!(evans.len(), galerkin.len(), "{evans:?} vs {galerkin:?}");
    for (e, g) in evans.iter().zip(&galerkin) {
        assert!((e - g).abs() < tol, "{e} vs {g}");
    }
}

#[test]
fn galerkin_agrees_with_evans() {
    compare_with_galerkin(&plain(0.0), Params::both(0.0), (-3.5, 3.5), 1e-6);
    compare_with_galerkin(&plain(0.3), Params::both(0.0), (-2.5, 2.5), 1e-6);
    let demo = ModelProblem::default_demo();
    compare_with_galerkin(&demo, Params::both(0.6), (-2.5, 2.5), 1e-5);
}

#[test]
fn spectral_flow_of_the_demo_family() {
    let demo = Arc::new(ModelProblem::default_demo());
    assert_eq!(spectral_flow_bvp(&Family::circle(&demo)).unwrap(), 2);
    assert_eq!(GalerkinOracle::new(&demo, GALERKIN_MODES).unwrap().spectral_flow(), 2);
    let reversed = Arc::new(demo.reversed());
    assert_eq!(spectral_flow_bvp(&Family::circle(&reversed)).unwrap(), -2);
    let constant = Arc::new(demo.unperturbed());
    assert_eq!(spectral_flow_bvp(&Family::circle(&constant)).unwrap(), 0);
    assert_eq!(maslov_side(&Family::circle(&constant)).unwrap(), 0);
}

#[test]
fn maslov_side_matches_tracking() {
    let demo = Arc::new(ModelProblem::default_demo());
    let split = split_boundary_conditions(&demo).unwrap();
    for family in [Family::circle(&demo), Family::minus_side(&demo, &split.l0), Family::plus_side(&demo, &split.l1)] {
        assert_eq!(maslov_side(&family).unwrap(), spectral_flow_bvp(&family).unwrap());
    }
}

#[test]
fn split_conditions() {
    let demo = ModelProblem::default_demo();
    let split = split_boundary_conditions(&demo).unwrap();
    assert!(is_lagrangian(demo.boundary().minus(), split.l0.frame()).unwrap());
    assert!(is_lagrangian(demo.boundary().plus(), split.l1.frame()).unwrap());
    assert!(split.warning.is_none());

    let free = plain(0.0);
    let split = split_boundary_conditions(&free).unwrap();
    assert!(split.l0.same_subspace(&reference_lagrangian(free.boundary().minus())));

    let b = RMat::from_diagonal(&DVector::from_vec(vec![0.3, -0.3]));
    let collar_piece = vec![Piece {
        start: 0.1,
        end: 1.0,
        matrix: RMat::identity(2, 2),
        profile: Profile::Linear { offset: 0.0, slope: 0.5 },
    }];
    let invertible = ModelProblem::new(sigma(), b, 2.0 * PI, PI, collar_piece.clone(), PI / 6.0, false).unwrap();
    assert!(split_boundary_conditions(&invertible).unwrap().warning.is_some());
    assert!(ModelProblem::new(sigma(), RMat::zeros(2, 2), 2.0 * PI, PI, collar_piece.clone(), PI / 6.0, true).is_err());
    let singular = ModelProblem::new(sigma(), RMat::zeros(2, 2), 2.0 * PI, PI, collar_piece, PI / 6.0, false).unwrap();
    assert!(split_boundary_conditions(&singular).is_err());
}

#[test]
fn two_parameter_family_mixes_the_arcs() {
    let demo = Arc::new(ModelProblem::default_demo());
    let start = two_parameter_family(&demo, 0.0, 0.0);
    let (s, t) = (0.3, 0.8);
    let mixed = two_parameter_family(&demo, s, t);
    let diagonal = two_parameter_family(&demo, s, s);
    for k in 0..200 {
        let tau = demo.length() * (k as f64 + 0.5) / 200.0;
        assert_eq!(start.coefficient(tau), demo.perturbation(Params::both(0.0), tau));
        let difference = mixed.coefficient(tau) - diagonal.coefficient(tau);
        if tau < demo.split() {
            assert_eq!(linalg::max_abs(&difference), 0.0);
        }
    }
    let window = (-4.5, 4.5);
    let mut previous = two_parameter_family(&demo, 0.0, 0.0).spectrum(window).unwrap().values();
    for k in 1..=20 {
        let h = k as f64 / 20.0;
        let current = two_parameter_family(&demo, 0.2 * h, 0.9 * h).spectrum(window).unwrap().values();
        for v in current.iter().filter(|v| v.abs() < 2.5) {
            let nearest = previous.iter().map(|w| (v - w).abs()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 0.3, "eigenvalue {v} jumped at step {k}");
        }
        previous = current;
    }
}

#[test]
fn demo_theorem_report() {
    let report = verify_theorems(&ModelProblem::default_demo(), &VerifyConfig::default()).unwrap();
    assert!(report.all_pass);
    assert_eq!(report.checks.len(), 4);
    assert_eq!(report.failure_mask(), 0);
    assert_eq!(report.circle_flow, 2);
    assert_eq!((report.first_leg_flow, report.second_leg_flow), (1, 1));
    assert_eq!((report.minus_side_flow, report.plus_side_flow), (1, 1));
    assert_eq!(report.galerkin_flow, Some(2));
    assert!(!report.checks[0].equalities.is_empty());
}

#[test]
fn constant_and_reversed_reports() {
    let config = VerifyConfig {
        galerkin_modes: 0,
        ..VerifyConfig::default()
    };
    let constant = verify_theorems(&ModelProblem::default_demo().unperturbed(), &config).unwrap();
    assert!(constant.all_pass);
    for check in &constant.checks {
        assert!(check.equalities.iter().all(|e| e.lhs == 0 && e.rhs == 0));
    }
    let reversed = verify_theorems(&ModelProblem::default_demo().reversed(), &config).unwrap();
    assert!(reversed.all_pass);
    assert_eq!(reversed.circle_flow, -2);
    assert_eq!((reversed.first_leg_flow, reversed.second_leg_flow), (-1, -1));
    assert_eq!((reversed.minus_side_flow, reversed.plus_side_flow), (-1, -1));
}
