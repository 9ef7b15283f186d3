//! The index `M` of unitary paths, the Maslov index `Mas` of Lagrangian
//! paths, both crossing forms, the local signature formula, and the
//! Hörmander index.
//!
//! `M` counts eigenvalues `e^{i(pi + theta)}` of `W(t)` in the closed arc
//! `0 <= theta <= eps`: an eigenvalue sitting exactly at `-1` is counted.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};
use crate::partition::{self, Counter, Window};
use crate::path::{LagrangianPath, Path, UnitaryPath};
use crate::souriau;
use crate::symplectic::{self, ComplexUnitary, Lagrangian, KERNEL_TOL};

pub use crate::partition::{CountChange, IndexOptions, IndexReport};

/// Eigenphases within this distance of `pi` count as sitting at `-1`.
pub const PHASE_ZERO_TOL: f64 = 1e-8;
/// Refuse the matrix logarithm this close (chordally) to `-1`.
pub const LOG_CUT_TOL: f64 = 1e-6;
/// First finite-difference step for crossing forms.
pub const FD_STEP: f64 = 1e-4;
/// Smallest finite-difference step tried before giving up.
pub const FD_MIN_STEP: f64 = 1e-7;
/// Relative threshold below which a crossing-form eigenvalue counts as zero.
pub const FORM_TOL: f64 = 1e-6;

/// `arg(-z)` in `(-pi, pi]`: the offset `theta` of `z = e^{i(pi + theta)}`.
pub fn offset_from_minus_one(z: Complex64) -> f64 {
    (-z).arg()
}

struct UnitaryCounter<F> {
    f: F,
}

struct UnitaryState {
    w: CMat,
    offsets: Vec<f64>,
}

impl<F: Fn(f64) -> Result<CMat>> Counter for UnitaryCounter<F> {
    type State = UnitaryState;

    fn sample(&self, t: f64) -> Result<UnitaryState> {
        let w = (self.f)(t)?;
        let (values, _) = linalg::normal_eigen(&w);
        let offsets = values.into_iter().map(offset_from_minus_one).collect();
        Ok(UnitaryState { w, offsets })
    }

    fn motion(&self, a: &UnitaryState, b: &UnitaryState) -> f64 {
        linalg::norm2_c(&(&b.w - &a.w))
    }

    fn window(&self, s: &UnitaryState, cap: f64) -> Window {
        let eps = partition::widest_gap_midpoint(s.offsets.iter().cloned(), PHASE_ZERO_TOL, cap);
        let clearance = s
            .offsets
            .iter()
            .map(|&theta| 2.0 * (0.5 * (theta - eps)).sin().abs())
            .fold(2.0, f64::min);
        Window { eps, clearance }
    }

    fn count(&self, s: &UnitaryState, eps: f64) -> usize {
        s.offsets
            .iter()
            .filter(|&&theta| theta.abs() < PHASE_ZERO_TOL || (theta >= 0.0 && theta <= eps))
            .count()
    }

    fn default_cap(&self) -> f64 {
        PI / 2.0
    }
}

/// `M` of a path of unitary matrices given by a raw evaluator.
pub fn index_of_matrices(f: impl Fn(f64) -> Result<CMat>, opts: &IndexOptions) -> Result<IndexReport> {
    partition::run(&UnitaryCounter { f }, opts)
}

/// `M({W(t)})`.
pub fn index_unitary_path(path: &UnitaryPath) -> Result<i64> {
    Ok(index_unitary_path_with(path, &IndexOptions::default())?.index)
}

pub fn index_unitary_path_with(path: &UnitaryPath, opts: &IndexOptions) -> Result<IndexReport> {
    index_of_matrices(|t| Ok(path.eval(t)?.into_matrix()), opts)
}

/// `Mas({mu(t)}, lambda) = M({S_lambda(mu(t))})`.
pub fn maslov_index(path: &LagrangianPath, lambda: &Lagrangian) -> Result<i64> {
    Ok(maslov_index_with(path, lambda, &IndexOptions::default())?.index)
}

pub fn maslov_index_with(path: &LagrangianPath, lambda: &Lagrangian, opts: &IndexOptions) -> Result<IndexReport> {
    index_of_matrices(|t| souriau::souriau_matrix(lambda, &path.eval(t)?), opts)
}

/// The Souriau image of a Lagrangian path as a unitary path.
pub fn souriau_path(path: &LagrangianPath, lambda: &Lagrangian) -> UnitaryPath {
    let lambda = lambda.clone();
    path.map(move |mu| Ok(souriau::souriau_map(&lambda, &mu)?.w))
}

/// A Hermitian form on a subspace of `C^n` (or a symmetric form on a real
/// subspace, stored with zero imaginary part).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymmetricForm {
    /// Orthonormal basis of the carrier subspace, as columns. Real carriers
    /// store their real coordinates in `carrier_re` and leave `carrier_im`
    /// zero.
    pub carrier_re: Vec<Vec<f64>>,
    pub carrier_im: Vec<Vec<f64>>,
    /// Eigenvalues of the form matrix, ascending.
    pub eigenvalues: Vec<f64>,
    pub positive: usize,
    pub negative: usize,
    pub regular: bool,
    #[serde(skip)]
    matrix: Option<CMat>,
}

impl SymmetricForm {
    /// Builds the form from its matrix on an orthonormal carrier. Eigenvalues
    /// below `FORM_TOL * scale` in modulus count as zero.
    pub fn new(carrier: &CMat, matrix: &CMat, scale: f64) -> Self {
        let h = linalg::hermitian_part(matrix);
        let mut eigenvalues: Vec<f64> = if h.is_empty() {
            Vec::new()
        } else {
            h.clone().symmetric_eigen().eigenvalues.iter().cloned().collect()
        };
        eigenvalues.sort_by(f64::total_cmp);
        let threshold = FORM_TOL * scale.max(f64::MIN_POSITIVE);
        let positive = eigenvalues.iter().filter(|v| **v > threshold).count();
        let negative = eigenvalues.iter().filter(|v| **v < -threshold).count();
        let to_rows = |m: RMat| (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect();
        Self {
            carrier_re: to_rows(linalg::real_part(carrier)),
            carrier_im: to_rows(linalg::imag_part(carrier)),
            regular: positive + negative == eigenvalues.len(),
            eigenvalues,
            positive,
            negative,
            matrix: Some(h),
        }
    }

    pub fn from_real(carrier: &RMat, matrix: &RMat, scale: f64) -> Self {
        Self::new(&linalg::to_complex(carrier), &linalg::to_complex(matrix), scale)
    }

    pub fn empty() -> Self {
        Self::new(&CMat::zeros(0, 0), &CMat::zeros(0, 0), 1.0)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.positive, self.negative)
    }

    /// `p - q`.
    pub fn sign(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }

    pub fn matrix(&self) -> Option<&CMat> {
        self.matrix.as_ref()
    }
}

/// Matrices that can be combined linearly with real coefficients.
pub(crate) trait Combine: Sized {
    /// `ca * a + cb * b`.
    fn combine(ca: f64, a: &Self, cb: f64, b: &Self) -> Self;
}

impl Combine for RMat {
    fn combine(ca: f64, a: &Self, cb: f64, b: &Self) -> Self {
        a * ca + b * cb
    }
}

impl Combine for CMat {
    fn combine(ca: f64, a: &Self, cb: f64, b: &Self) -> Self {
        a.scale(ca) + b.scale(cb)
    }
}

/// Finite-difference derivative at `t_star` of a matrix family vanishing at
/// `t_star`: central differences with one Richardson step in the interior,
/// second-order one-sided stencils at the ends. The step shrinks from
/// [`FD_STEP`] while the family reports [`Error::BranchCut`] or loses
/// transversality.
pub(crate) fn derivative_at<T: Combine>(t_star: f64, family: impl Fn(f64) -> Result<T>) -> Result<T> {
    let mut h = FD_STEP;
    loop {
        match derivative_with_step(t_star, h, &family) {
            Err(Error::BranchCut) | Err(Error::NotTransversal(_)) if h / 10.0 >= FD_MIN_STEP => h /= 10.0,
            other => return other,
        }
    }
}

fn derivative_with_step<T: Combine>(t_star: f64, h: f64, family: &impl Fn(f64) -> Result<T>) -> Result<T> {
    if t_star - 2.0 * h < 0.0 {
        // (-3 R(0) + 4 R(h) - R(2h)) / 2h with R(t_star) = 0.
        let r1 = family(t_star + h)?;
        let r2 = family(t_star + 2.0 * h)?;
        return Ok(T::combine(2.0 / h, &r1, -0.5 / h, &r2));
    }
    if t_star + 2.0 * h > 1.0 {
        let r1 = family(t_star - h)?;
        let r2 = family(t_star - 2.0 * h)?;
        return Ok(T::combine(-2.0 / h, &r1, 0.5 / h, &r2));
    }
    let central = |h: f64| -> Result<T> {
        let plus = family(t_star + h)?;
        let minus = family(t_star - h)?;
        Ok(T::combine(0.5 / h, &plus, -0.5 / h, &minus))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok(T::combine(4.0 / 3.0, &fine, -1.0 / 3.0, &coarse))
}

/// `Q~_M` on `Ker(W(t*) + Id)`: the derivative at `t*` of `<x, R(t) y>`
/// where `W(t) = W(t*) e^{i R(t)}`, `R(t*) = 0`.
pub fn crossing_form_unitary(path: &UnitaryPath, t_star: f64) -> Result<SymmetricForm> {
    let w_star = path.eval(t_star)?.into_matrix();
    let n = w_star.nrows();
    let kernel = linalg::null_space_c(&(&w_star + CMat::identity(n, n)), KERNEL_TOL);
    if kernel.ncols() == 0 {
        return Ok(SymmetricForm::empty());
    }
    let w_inv = w_star.adjoint();
    let r_dot = derivative_at(t_star, |t| {
        let w = path.eval(t)?.into_matrix();
        linalg::unitary_log(&(&w_inv * w), LOG_CUT_TOL)
    })?;
    let q = kernel.adjoint() * &r_dot * &kernel;
    Ok(SymmetricForm::new(&kernel, &q, linalg::norm2_c(&r_dot)))
}

/// `Q_M(x, y) = d/dt omega(x, phi(t) y)` on `mu(t*) ∩ lambda`, where
/// `mu(t)` is the graph of `phi(t): mu(t*) -> mu(t*)^perp`.
pub fn crossing_form_graph(path: &LagrangianPath, lambda: &Lagrangian, t_star: f64) -> Result<SymmetricForm> {
    let mu_star = path.eval(t_star)?;
    let basis = symplectic::intersection_basis(&mu_star, lambda, KERNEL_TOL)?;
    if basis.ncols() == 0 {
        return Ok(SymmetricForm::empty());
    }
    let coords = mu_star.frame().transpose() * &basis;
    let phi_dot = derivative_at(t_star, |t| {
        symplectic::graph_operator(&mu_star, &path.eval(t)?).map_err(|e| match e {
            Error::NotTransversal(_) => Error::NotTransversal(t),
            other => other,
        })
    })?;
    let q = coords.transpose() * &phi_dot * &coords;
    Ok(SymmetricForm::from_real(&basis, &q, linalg::norm2(&phi_dot)))
}

/// The local contribution of a regular crossing at `t*`: `sign Q~_M` in the
/// interior, `-q` at `t* = 0` and `+p` at `t* = 1`.
///
/// Fails if the crossing is degenerate, if `t*` is not a crossing, or if the
/// window `|t - t*| <= delta` visibly contains another crossing.
pub fn local_index_at_regular_crossing(
    path: &LagrangianPath,
    lambda: &Lagrangian,
    t_star: f64,
    delta: f64,
) -> Result<i64> {
    let wpath = souriau_path(path, lambda);
    local_index_unitary(&wpath, t_star, delta)
}

pub fn local_index_unitary(wpath: &UnitaryPath, t_star: f64, delta: f64) -> Result<i64> {
    let form = crossing_form_unitary(wpath, t_star)?;
    let k = form.dim();
    if k == 0 {
        return Err(Error::InvalidProblem(format!("t = {t_star} is not a crossing")));
    }
    if !form.regular {
        return Err(Error::DegenerateCrossing {
            t: t_star,
            positive: form.positive,
            negative: form.negative,
            dim: k,
        });
    }
    check_isolated(wpath, t_star, delta, &form)?;
    Ok(if t_star <= 0.0 {
        -(form.negative as i64)
    } else if t_star >= 1.0 {
        form.positive as i64
    } else {
        form.sign()
    })
}

/// On a grid of the window, exactly `p` of the eigenphases near `pi` must
/// sit above `pi` after `t*` and below before it (and vice versa for `q`),
/// and nothing else may enter the arc.
fn check_isolated(wpath: &UnitaryPath, t_star: f64, delta: f64, form: &SymmetricForm) -> Result<()> {
    let w_star = wpath.eval(t_star)?.into_matrix();
    let (values, _) = linalg::normal_eigen(&w_star);
    let far = values
        .iter()
        .map(|z| offset_from_minus_one(*z).abs())
        .filter(|theta| *theta > 1e-6)
        .fold(PI, f64::min);
    let arc = (0.5 * far).min(PI / 2.0);
    let (p, q) = form.signature();
    let lo = (t_star - delta).max(0.0);
    let hi = (t_star + delta).min(1.0);
    const GRID: usize = 32;
    for i in 0..=GRID {
        let s = lo + (hi - lo) * i as f64 / GRID as f64;
        if (s - t_star).abs() < 1e-12 {
            continue;
        }
        let (values, _) = linalg::normal_eigen(&wpath.eval(s)?.into_matrix());
        let offsets: Vec<f64> = values.iter().map(|z| offset_from_minus_one(*z)).collect();
        let above = offsets.iter().filter(|t| **t > 0.0 && **t <= arc).count();
        let below = offsets.iter().filter(|t| **t < 0.0 && **t >= -arc).count();
        let at = offsets.iter().filter(|t| **t == 0.0).count();
        let expected = if s > t_star { (p, q) } else { (q, p) };
        if at > 0 || (above, below) != expected {
            return Err(Error::CrossingNotIsolated(t_star));
        }
    }
    Ok(())
}

/// Any unitary `L` with `exp(i L) = u` (eigenvalues of `L` in `(-pi, pi]`).
fn unitary_angle(u: &CMat) -> CMat {
    let (values, q) = linalg::normal_eigen(u);
    let d = CMat::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|z| linalg::c(z.arg(), 0.0)),
    ));
    linalg::hermitian_part(&(&q * d * q.adjoint()))
}

/// The path `rho(U0 exp(i t L))` from `mu0` to `mu1`, where `U0`, `U1` are
/// the canonical lifts in the coordinates of the space's reference
/// Lagrangian and `exp(i L) = U0^{-1} U1`.
pub fn connecting_path(mu0: &Lagrangian, mu1: &Lagrangian) -> Result<LagrangianPath> {
    let base = symplectic::reference_lagrangian(mu0.space());
    let u0 = symplectic::unitary_of_lagrangian(&base, mu0)?.into_matrix();
    let u1 = symplectic::unitary_of_lagrangian(&base, mu1)?.into_matrix();
    let l = unitary_angle(&(u0.adjoint() * &u1));
    let end = mu1.clone();
    Ok(Path::new(move |t| {
        if t >= 1.0 {
            return Ok(end.clone());
        }
        let u = &u0 * (&l * linalg::c(0.0, t)).exp();
        let u = ComplexUnitary::new(linalg::polar_unitary(&u))?;
        symplectic::lagrangian_from_unitary(&base, &u)
    }))
}

/// `sigma(mu1, mu0; lambda, lambda')`, evaluated along [`connecting_path`].
pub fn hormander_index(mu0: &Lagrangian, mu1: &Lagrangian, lambda: &Lagrangian, lambda_prime: &Lagrangian) -> Result<i64> {
    hormander_index_along(&connecting_path(mu0, mu1)?, lambda, lambda_prime)
}

/// `Mas(path, lambda) - Mas(path, lambda')` for a caller-chosen path.
pub fn hormander_index_along(path: &LagrangianPath, lambda: &Lagrangian, lambda_prime: &Lagrangian) -> Result<i64> {
    Ok(maslov_index(path, lambda)? - maslov_index(path, lambda_prime)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingSummary {
    pub t: f64,
    pub dim: usize,
    pub positive: usize,
    pub negative: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{reference_lagrangian, standard_space};

    fn scalar_path(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> UnitaryPath {
        Path::from_fn(move |t| ComplexUnitary::new(CMat::from_element(1, 1, Complex64::from_polar(1.0, f(t)))).unwrap())
    }

    fn rotating_line() -> (LagrangianPath, Lagrangian) {
        let space = standard_space(1).unwrap();
        let lambda = reference_lagrangian(&space);
        let s = space.clone();
        let path = Path::new(move |t: f64| {
            let a = PI / 2.0 + t * PI;
            Lagrangian::from_span(&s, &RMat::from_column_slice(2, 1, &[a.cos(), a.sin()]))
        });
        (path, lambda)
    }

    #[test]
    fn unitary_index_examples() {
        assert_eq!(index_unitary_path(&scalar_path(|_| 0.3)).unwrap(), 0);
        assert_eq!(index_unitary_path(&scalar_path(|t| PI + t - 0.5)).unwrap(), 1);
        assert_eq!(index_unitary_path(&scalar_path(|t| PI - t + 0.5)).unwrap(), -1);
    }

    #[test]
    fn endpoint_crossings_follow_the_closed_arc() {
        // Starts at -1 and leaves upward: stays counted, contributes 0.
        assert_eq!(index_unitary_path(&scalar_path(|t| PI + t)).unwrap(), 0);
        // Starts at -1 and leaves downward: -1.
        assert_eq!(index_unitary_path(&scalar_path(|t| PI - t)).unwrap(), -1);
        // Arrives at -1 from below: +1.
        assert_eq!(index_unitary_path(&scalar_path(|t| PI + t - 1.0)).unwrap(), 1);
        // Arrives from above: 0.
        assert_eq!(index_unitary_path(&scalar_path(|t| PI + 1.0 - t)).unwrap(), 0);
    }

    #[test]
    fn rotating_line_has_index_one() {
        let (path, lambda) = rotating_line();
        assert_eq!(maslov_index(&path, &lambda).unwrap(), 1);
        let form = crossing_form_graph(&path, &lambda, 0.5).unwrap();
        assert_eq!(form.signature(), (1, 0));
        let form = crossing_form_unitary(&souriau_path(&path, &lambda), 0.5).unwrap();
        assert_eq!(form.signature(), (1, 0));
        let rev = path.reversed();
        assert_eq!(crossing_form_graph(&rev, &lambda, 0.5).unwrap().signature(), (0, 1));
        assert_eq!(local_index_at_regular_crossing(&path, &lambda, 0.5, 0.1).unwrap(), 1);
    }

    #[test]
    fn crossing_form_of_linear_phase() {
        let form = crossing_form_unitary(&scalar_path(|t| PI + t - 0.5), 0.5).unwrap();
        assert_eq!(form.signature(), (1, 0));
        assert!((form.eigenvalues[0] - 1.0).abs() < 1e-8);
        let constant = Path::constant(ComplexUnitary::new(CMat::from_element(1, 1, linalg::c(-1.0, 0.0))).unwrap());
        let form = crossing_form_unitary(&constant, 0.5).unwrap();
        assert!(!form.regular);
    }

    #[test]
    fn opposite_block_crossings() {
        let path: UnitaryPath = Path::from_fn(|t| {
            let d = DVector::from_vec(vec![
                Complex64::from_polar(1.0, PI + (t - 0.5)),
                Complex64::from_polar(1.0, PI - 2.0 * (t - 0.5)),
            ]);
            ComplexUnitary::new(CMat::from_diagonal(&d)).unwrap()
        });
        let form = crossing_form_unitary(&path, 0.5).unwrap();
        assert_eq!(form.signature(), (1, 1));
        assert_eq!(local_index_unitary(&path, 0.5, 0.1).unwrap(), 0);
        assert_eq!(index_unitary_path(&path).unwrap(), 0);
    }

    #[test]
    fn hormander_trivial_cases() {
        let space = standard_space(2).unwrap();
        let lambda = reference_lagrangian(&space);
        let mut rng = crate::random::rng(5);
        let mu0 = crate::random::lagrangian(&mut rng, &space);
        let mu1 = crate::random::lagrangian(&mut rng, &space);
        assert_eq!(hormander_index(&mu0, &mu1, &lambda, &lambda).unwrap(), 0);
        assert_eq!(hormander_index(&mu0, &mu0, &lambda, &lambda.perp()).unwrap(), 0);
    }
}
