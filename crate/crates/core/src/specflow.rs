//! Spectral flow of paths of real symmetric matrices, the Riesz transform,
//! and the spectral-flow crossing form.
//!
//! Counting uses the half-open window `0 <= theta < eps`, so an eigenvalue
//! sitting at zero is counted; this deliberately differs from the closed
//! arc used by the Maslov index.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::maslov::{self, SymmetricForm};
use crate::partition::{self, Counter, IndexOptions, IndexReport, Window};
use crate::path::OperatorPath;

/// Eigenvalues below this (relative to `max(1, |A|)`) count as zero.
pub const EIGEN_ZERO_TOL: f64 = 1e-8;
/// Default upper bound for the window edge.
pub const EPSILON_CAP: f64 = 1.0;
/// Symmetry defect tolerated in sampled operators.
pub const SYMMETRY_TOL: f64 = 1e-10;

struct SymmetricCounter<'a> {
    path: &'a OperatorPath,
}

struct SymmetricState {
    a: RMat,
    values: Vec<f64>,
    zero: f64,
}

pub(crate) fn checked_symmetric(a: RMat) -> Result<RMat> {
    if !a.is_square() {
        return Err(Error::Shape(format!("operator must be square, got {:?}", a.shape())));
    }
    let defect = linalg::max_abs(&(&a - a.transpose()));
    if defect > SYMMETRY_TOL * a.amax().max(1.0) {
        return Err(Error::NotSymmetric(defect));
    }
    Ok(a)
}

impl Counter for SymmetricCounter<'_> {
    type State = SymmetricState;

    fn sample(&self, t: f64) -> Result<SymmetricState> {
        let a = checked_symmetric(self.path.eval(t)?)?;
        let values = linalg::symmetric_eigenvalues(&a);
        let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        Ok(SymmetricState {
            a,
            values,
            zero: EIGEN_ZERO_TOL * scale,
        })
    }

    fn motion(&self, a: &SymmetricState, b: &SymmetricState) -> f64 {
        linalg::norm2(&(&b.a - &a.a))
    }

    fn window(&self, s: &SymmetricState, cap: f64) -> Window {
        let eps = partition::widest_gap_midpoint(s.values.iter().cloned(), s.zero, cap);
        let clearance = s.values.iter().map(|v| (v - eps).abs()).fold(f64::INFINITY, f64::min);
        Window { eps, clearance }
    }

    fn count(&self, s: &SymmetricState, eps: f64) -> usize {
        s.values.iter().filter(|&&v| v.abs() < s.zero || (v >= 0.0 && v < eps)).count()
    }

    fn default_cap(&self) -> f64 {
        EPSILON_CAP
    }
}

/// `Sf({A_t})` by Phillips' partition definition.
pub fn spectral_flow(path: &OperatorPath) -> Result<i64> {
    Ok(spectral_flow_with(path, &IndexOptions::default())?.index)
}

pub fn spectral_flow_with(path: &OperatorPath, opts: &IndexOptions) -> Result<IndexReport> {
    partition::run(&SymmetricCounter { path }, opts)
}

/// Number of eigenvalues strictly below zero (eigenvalues within the zero
/// tolerance count as zero).
pub fn negative_count(a: &RMat) -> usize {
    let values = linalg::symmetric_eigenvalues(a);
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    values.iter().filter(|v| **v < -EIGEN_ZERO_TOL * scale).count()
}

/// `neg(A_0) - neg(A_1)`, which equals the spectral flow of any path
/// between the two matrices under the half-open convention.
pub fn endpoint_count_difference(path: &OperatorPath) -> Result<i64> {
    Ok(negative_count(&path.eval(0.0)?) as i64 - negative_count(&path.eval(1.0)?) as i64)
}

/// `R(A) = A (Id + A^2)^{-1/2}`.
pub fn riesz(a: &RMat) -> Result<RMat> {
    let a = checked_symmetric(a.clone())?;
    if a.is_empty() {
        return Ok(a);
    }
    let eig = linalg::symmetric_part(&a).symmetric_eigen();
    let mapped = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|m| m / (1.0 + m * m).sqrt()));
    let q = &eig.eigenvectors;
    Ok(linalg::symmetric_part(&(q * RMat::from_diagonal(&mapped) * q.transpose())))
}

pub fn riesz_path(path: &OperatorPath) -> OperatorPath {
    path.map(|a| riesz(&a))
}

/// `Q_Sf(x, y) = d/dt <x, A_t y>` on `Ker A_{t*}`, by finite differences.
pub fn crossing_form_sf(path: &OperatorPath, t_star: f64) -> Result<SymmetricForm> {
    let a_star = checked_symmetric(path.eval(t_star)?)?;
    let kernel = operator_kernel(&a_star);
    if kernel.ncols() == 0 {
        return Err(Error::InvalidProblem(format!("the operator at t = {t_star} is invertible")));
    }
    let a_dot = maslov::derivative_at(t_star, |t| Ok(path.eval(t)? - &a_star))?;
    form_on_kernel(&kernel, &a_dot)
}

/// The same form from an explicit derivative evaluator.
pub fn crossing_form_sf_with_derivative(path: &OperatorPath, derivative: &OperatorPath, t_star: f64) -> Result<SymmetricForm> {
    let a_star = checked_symmetric(path.eval(t_star)?)?;
    let kernel = operator_kernel(&a_star);
    if kernel.ncols() == 0 {
        return Err(Error::InvalidProblem(format!("the operator at t = {t_star} is invertible")));
    }
    form_on_kernel(&kernel, &derivative.eval(t_star)?)
}

fn form_on_kernel(kernel: &RMat, a_dot: &RMat) -> Result<SymmetricForm> {
    let q = kernel.transpose() * a_dot * kernel;
    Ok(SymmetricForm::from_real(kernel, &q, linalg::norm2(a_dot).max(linalg::max_abs(&q))))
}

/// Orthonormal kernel basis, eigenvalues below the zero tolerance included.
pub fn operator_kernel(a: &RMat) -> RMat {
    let eig = linalg::symmetric_part(a).symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let cols: Vec<DVector<f64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() < EIGEN_ZERO_TOL * scale)
        .map(|(k, _)| eig.eigenvectors.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        RMat::zeros(a.nrows(), 0)
    } else {
        RMat::from_columns(&cols)
    }
}

/// Local spectral flow over `|t - t*| <= delta` from the crossing form:
/// `sign Q` in the interior, `-q` at `t* = 0`, `+p` at `t* = 1`.
pub fn local_flow_from_form(form: &SymmetricForm, t_star: f64) -> Result<i64> {
    if !form.regular {
        return Err(Error::DegenerateCrossing {
            t: t_star,
            positive: form.positive,
            negative: form.negative,
            dim: form.dim(),
        });
    }
    Ok(if t_star <= 0.0 {
        -(form.negative as i64)
    } else if t_star >= 1.0 {
        form.positive as i64
    } else {
        form.sign()
    })
}
