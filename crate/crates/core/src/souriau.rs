//! The Souriau map `S_lambda(mu) = U theta_lambda(U)`, the conjugations
//! `tau_lambda` and `theta_lambda`, and the complexified picture in which
//! Lagrangians become graphs of unitary maps `E_+ -> E_-`.
//!
//! In `lambda`-coordinates `tau_lambda` is entrywise complex conjugation,
//! so `theta_lambda(U) = conj(U^*) = U^T`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::symplectic::{self, ComplexUnitary, Lagrangian, KERNEL_TOL};

/// Phases closer than this (radians) are grouped as one eigenvalue.
pub const PHASE_GROUP_TOL: f64 = 1e-8;

/// `theta_lambda(U) = tau_lambda U^* tau_lambda`.
pub fn theta(lambda: &Lagrangian, u: &ComplexUnitary) -> Result<ComplexUnitary> {
    check_dim(lambda, u)?;
    Ok(ComplexUnitary::new(u.matrix().transpose())?)
}

/// `tau_lambda`: complex conjugation of `lambda`-coordinates.
pub fn tau(z: &CMat) -> CMat {
    z.map(|w| w.conj())
}

fn check_dim(lambda: &Lagrangian, u: &ComplexUnitary) -> Result<()> {
    let n = lambda.space().half_dim();
    if u.dim() != n {
        return Err(Error::Shape(format!(
            "unitary must be {n}x{n} in these coordinates, got {}x{}",
            u.dim(),
            u.dim()
        )));
    }
    Ok(())
}

/// The image `W = S_lambda(mu)` together with its sorted eigenphases.
#[derive(Clone, Debug)]
pub struct SouriauImage {
    pub w: ComplexUnitary,
    pub lambda: Lagrangian,
    pub phases: Vec<f64>,
}

impl SouriauImage {
    fn from_w(lambda: &Lagrangian, w: CMat) -> Result<Self> {
        let w = ComplexUnitary::new(w)?;
        let phases = linalg::eigenphases(w.matrix());
        Ok(Self {
            w,
            lambda: lambda.clone(),
            phases,
        })
    }

    /// `dim Ker(W + Id)`, counted from the singular values of `W + Id`.
    pub fn kernel_dim(&self) -> usize {
        minus_one_multiplicity(self.w.matrix(), KERNEL_TOL)
    }

    /// Eigenphases grouped into `(phase, multiplicity)`.
    pub fn grouped_phases(&self) -> Vec<(f64, usize)> {
        let mut groups: Vec<(f64, usize)> = Vec::new();
        for &p in &self.phases {
            match groups.last_mut() {
                Some((q, k)) if (p - *q).abs() < PHASE_GROUP_TOL => *k += 1,
                _ => groups.push((p, 1)),
            }
        }
        // The two ends of (-pi, pi] are the same point of the circle.
        if groups.len() > 1 {
            let first = groups[0];
            let last = *groups.last().unwrap();
            if (first.0 + 2.0 * std::f64::consts::PI - last.0).abs() < PHASE_GROUP_TOL {
                groups.pop();
                groups[0] = (last.0, first.1 + last.1);
            }
        }
        groups
    }
}

/// Number of singular values of `W + Id` below `rel_tol` (the largest
/// possible singular value of `W + Id` is 2).
pub fn minus_one_multiplicity(w: &CMat, rel_tol: f64) -> usize {
    let n = w.nrows();
    let shifted = w + CMat::identity(n, n);
    shifted
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|s| **s < rel_tol * 2.0)
        .count()
}

/// `S_lambda(U) = U theta_lambda(U)` for a unitary in `lambda`-coordinates.
pub fn souriau_of_unitary(lambda: &Lagrangian, u: &ComplexUnitary) -> Result<SouriauImage> {
    check_dim(lambda, u)?;
    let m = u.matrix();
    SouriauImage::from_w(lambda, linalg::polar_unitary(&(m * m.transpose())))
}

/// `S_lambda(mu)`, lifting `mu` through [`symplectic::unitary_of_lagrangian`].
pub fn souriau_map(lambda: &Lagrangian, mu: &Lagrangian) -> Result<SouriauImage> {
    let u = symplectic::unitary_of_lagrangian(lambda, mu)?;
    souriau_of_unitary(lambda, &u)
}

/// Just the unitary matrix `S_lambda(mu)`, without the eigen-decomposition.
pub fn souriau_matrix(lambda: &Lagrangian, mu: &Lagrangian) -> Result<CMat> {
    let u = symplectic::unitary_of_lagrangian(lambda, mu)?;
    let m = u.matrix();
    Ok(m * m.transpose())
}

/// A complex Lagrangian of `C^{2n}` written as `{x + T x : x in E_+}` with
/// `T: E_+ -> E_-` unitary, in the bases of `E_+` and `E_-` fixed by the
/// space.
#[derive(Clone, Debug)]
pub struct ComplexLagrangianGraph {
    pub t: CMat,
}

impl ComplexLagrangianGraph {
    pub fn new(t: CMat) -> Result<Self> {
        let n = t.nrows();
        if !t.is_square() {
            return Err(Error::Shape(format!("graph unitary must be square, got {:?}", t.shape())));
        }
        let defect = linalg::max_abs_c(&(t.adjoint() * &t - CMat::identity(n, n)));
        if defect > symplectic::UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { t })
    }

    /// Distance between graph unitaries in operator norm.
    pub fn distance(&self, other: &ComplexLagrangianGraph) -> f64 {
        linalg::norm2_c(&(&self.t - &other.t))
    }

    /// Spanning vectors of the complex subspace in `C^{2n}`.
    pub fn span(&self, space: &symplectic::SymplecticSpace) -> CMat {
        space.e_plus() + space.e_minus() * &self.t
    }
}

/// The complexification `C(mu) = mu (x) C` as a graph over `E_+`.
pub fn complexify(mu: &Lagrangian) -> Result<ComplexLagrangianGraph> {
    let space = mu.space();
    let g = linalg::to_complex(mu.frame());
    let a = space.e_plus().adjoint() * &g;
    let b = space.e_minus().adjoint() * &g;
    let a_inv = a
        .try_inverse()
        .ok_or_else(|| Error::InvalidProblem("complexified Lagrangian meets E_-".into()))?;
    ComplexLagrangianGraph::new(b * a_inv)
}

/// `K: u -> u - i J u`, from `H_J` onto `E_+`, on real column vectors.
pub fn k_plus(space: &symplectic::SymplecticSpace, u: &linalg::RMat) -> CMat {
    linalg::compose_complex(u, &(-(space.j() * u)))
}

/// `k: u -> u + i J u`, from `H_J` onto `E_-`.
pub fn k_minus(space: &symplectic::SymplecticSpace, u: &linalg::RMat) -> CMat {
    linalg::compose_complex(u, &(space.j() * u))
}

/// `T_lambda = k tau_lambda K^{-1}`, the graph unitary of `lambda (x) C`.
pub fn t_lambda(lambda: &Lagrangian) -> CMat {
    let space = lambda.space();
    let e_plus = space.e_plus();
    let mut columns = Vec::with_capacity(e_plus.ncols());
    for k in 0..e_plus.ncols() {
        let x = e_plus.column(k).into_owned();
        let u = k_plus_inverse(&x);
        let z = tau(&symplectic::complex_coords(lambda, &u));
        let image = k_minus(space, &symplectic::real_vectors(lambda, &z));
        columns.push(DVector::from_iterator(
            e_plus.ncols(),
            (space.e_minus().adjoint() * image).iter().cloned(),
        ));
    }
    CMat::from_columns(&columns)
}

/// `K^{-1}(x) = Re x` for `x` in `E_+`.
fn k_plus_inverse(x: &DVector<Complex64>) -> linalg::RMat {
    linalg::RMat::from_iterator(x.len(), 1, x.iter().map(|z| z.re))
}

/// `Phi(W)`: the graph of `-k W tau_lambda K^{-1}: E_+ -> E_-`, evaluated
/// by composing the four maps on each basis vector of `E_+`.
pub fn phi_map(w: &ComplexUnitary, lambda: &Lagrangian) -> Result<ComplexLagrangianGraph> {
    check_dim(lambda, w)?;
    let space = lambda.space();
    let e_plus = space.e_plus();
    let n = e_plus.ncols();
    let mut columns = Vec::with_capacity(n);
    for k in 0..n {
        let x = e_plus.column(k).into_owned();
        let u = k_plus_inverse(&x);
        let z = tau(&symplectic::complex_coords(lambda, &u));
        let wz = w.matrix() * z;
        let image = -k_minus(space, &symplectic::real_vectors(lambda, &wz));
        columns.push(DVector::from_iterator(
            n,
            (space.e_minus().adjoint() * image).iter().cloned(),
        ));
    }
    ComplexLagrangianGraph::new(CMat::from_columns(&columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, RMat};
    use crate::symplectic::{lagrangian_from_unitary, reference_lagrangian, standard_space};
    use std::f64::consts::PI;

    fn scalar(z: Complex64) -> ComplexUnitary {
        ComplexUnitary::new(CMat::from_element(1, 1, z)).unwrap()
    }

    #[test]
    fn theta_is_transpose_and_involutive() {
        let space = standard_space(1).unwrap();
        let lambda = reference_lagrangian(&space);
        let u = scalar(Complex64::from_polar(1.0, 0.7));
        let t = theta(&lambda, &u).unwrap();
        assert!((t.matrix()[(0, 0)] - u.matrix()[(0, 0)]).norm() < 1e-15);
        let id = ComplexUnitary::identity(1);
        assert_eq!(theta(&lambda, &id).unwrap(), id);
    }

    #[test]
    fn souriau_of_reference_pair() {
        let space = standard_space(1).unwrap();
        let lambda = reference_lagrangian(&space);
        let perp = lambda.perp();
        let img = souriau_map(&lambda, &perp).unwrap();
        assert!((img.w.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(img.kernel_dim(), 0);
        let img = souriau_map(&lambda, &lambda).unwrap();
        assert!((img.w.matrix()[(0, 0)] + c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(img.kernel_dim(), 1);
    }

    #[test]
    fn souriau_of_rotated_line() {
        let space = standard_space(1).unwrap();
        let lambda = reference_lagrangian(&space);
        for &theta in &[0.3, 1.1, -2.0] {
            let mu = lagrangian_from_unitary(&lambda, &scalar(Complex64::from_polar(1.0, theta))).unwrap();
            let img = souriau_map(&lambda, &mu).unwrap();
            let expected = Complex64::from_polar(1.0, 2.0 * theta);
            assert!((img.w.matrix()[(0, 0)] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn complexify_reference_and_perp() {
        let space = standard_space(2).unwrap();
        let lambda = reference_lagrangian(&space);
        let t_ref = t_lambda(&lambda);
        let g = complexify(&lambda).unwrap();
        assert!(linalg::max_abs_c(&(&g.t - &t_ref)) < 1e-12);
        let g = complexify(&lambda.perp()).unwrap();
        assert!(linalg::max_abs_c(&(&g.t + &t_ref)) < 1e-12);
    }

    #[test]
    fn lemma_square_commutes() {
        // k tau_lambda = T_lambda K on real vectors.
        let space = standard_space(2).unwrap();
        let frame = RMat::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.0, -0.25]);
        let lambda = Lagrangian::from_span(&space, &frame).unwrap();
        let t = t_lambda(&lambda);
        let u = RMat::from_column_slice(4, 1, &[0.3, -1.0, 0.2, 0.8]);
        let lhs = k_minus(&space, &symplectic::real_vectors(&lambda, &tau(&symplectic::complex_coords(&lambda, &u))));
        let rhs = space.e_minus() * &t * (space.e_plus().adjoint() * k_plus(&space, &u));
        assert!(linalg::max_abs_c(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn phi_of_souriau_is_complexification_for_scalar_lines() {
        let space = standard_space(1).unwrap();
        let lambda = reference_lagrangian(&space);
        for &theta in &[0.0, PI / 2.0, 0.4, 2.5] {
            let mu = lagrangian_from_unitary(&lambda, &scalar(Complex64::from_polar(1.0, theta))).unwrap();
            let w = souriau_map(&lambda, &mu).unwrap().w;
            let lhs = phi_map(&w, &lambda).unwrap();
            let rhs = complexify(&mu).unwrap();
            assert!(lhs.distance(&rhs) < 1e-12, "theta = {theta}");
        }
    }

    #[test]
    fn grouped_phases_wrap_around() {
        let space = standard_space(2).unwrap();
        let lambda = reference_lagrangian(&space);
        let img = souriau_map(&lambda, &lambda).unwrap();
        let groups = img.grouped_phases();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].1, 2);
    }
}
