//! Real symplectic linear algebra: spaces with a compatible complex
//! structure, Lagrangian frames, intersections, graphs, and the
//! correspondence between unitary operators and Lagrangian subspaces.
//!
//! A space is `R^{2n}` with the Euclidean inner product and an orthogonal
//! complex structure `J`; the symplectic form is `omega(x, y) = <J x, y>`.
//! Fixing a Lagrangian `lambda` with orthonormal frame `F` identifies
//! `(R^{2n}, J)` with `C^n` through the orthonormal real basis `[F, J F]`:
//! the complex coordinate `a + i b` stands for `F a + J F b`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};

/// Tolerance on `J^T = -J`, `J^T J = I` and `J^2 = -I`.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Tolerance on the isotropy defect `F^T J F`.
pub const ISOTROPY_TOL: f64 = 1e-10;
/// Frames within this distance of orthonormal are silently re-orthonormalized.
pub const ORTHONORMAL_SLACK: f64 = 1e-8;
/// Relative singular-value threshold for ranks and kernels.
pub const KERNEL_TOL: f64 = 1e-8;
/// Largest principal angle below which two subspaces are considered equal.
pub const SUBSPACE_TOL: f64 = 1e-9;
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone)]
pub struct SymplecticSpace {
    j: RMat,
    reference: RMat,
    e_plus: CMat,
    e_minus: CMat,
}

impl fmt::Debug for SymplecticSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymplecticSpace")
            .field("dim", &self.dim())
            .finish_non_exhaustive()
    }
}

impl PartialEq for SymplecticSpace {
    fn eq(&self, other: &Self) -> bool {
        self.j.shape() == other.j.shape() && linalg::max_abs(&(&self.j - &other.j)) <= STRUCTURE_TOL
    }
}

impl SymplecticSpace {
    /// The canonical `R^{2n}` with `J e_i = e_{n+i}`, `J e_{n+i} = -e_i` and
    /// reference Lagrangian `span{e_1, .., e_n}`.
    pub fn standard(n: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::Dimension("a symplectic space needs n >= 1".into()));
        }
        let mut j = RMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(n + i, i)] = 1.0;
            j[(i, n + i)] = -1.0;
        }
        let reference = RMat::identity(2 * n, n);
        Self::new(j, reference)
    }

    /// A space with an arbitrary compatible complex structure. `reference`
    /// must be the frame of some Lagrangian; it fixes the bases of the `±i`
    /// eigenspaces of `J` used by the complexification maps.
    pub fn new(j: RMat, reference: RMat) -> Result<Arc<Self>> {
        let (rows, cols) = j.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::Dimension(format!(
                "complex structure must be a non-empty even square matrix, got {rows}x{cols}"
            )));
        }
        let id = RMat::identity(rows, rows);
        let skew = linalg::max_abs(&(j.transpose() + &j));
        let orth = linalg::max_abs(&(j.transpose() * &j - &id));
        let square = linalg::max_abs(&(&j * &j + &id));
        let defect = skew.max(orth).max(square);
        if defect > STRUCTURE_TOL {
            return Err(Error::InvalidProblem(format!(
                "J is not an orthogonal complex structure (defect {defect:.3e})"
            )));
        }
        let n = rows / 2;
        if reference.shape() != (rows, n) {
            return Err(Error::Shape(format!(
                "reference frame must be {rows}x{n}, got {:?}",
                reference.shape()
            )));
        }
        let reference = linalg::orthonormalize(&reference, KERNEL_TOL)?;
        let iso = linalg::max_abs(&(reference.transpose() * &j * &reference));
        if iso > ISOTROPY_TOL {
            return Err(Error::NotLagrangian(iso));
        }
        let jf = &j * &reference;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e_plus = linalg::compose_complex(&(&reference * s), &(&jf * -s));
        let e_minus = linalg::compose_complex(&(&reference * s), &(&jf * s));
        Ok(Arc::new(Self {
            j,
            reference,
            e_plus,
            e_minus,
        }))
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    /// Dimension of a Lagrangian subspace.
    pub fn half_dim(&self) -> usize {
        self.j.nrows() / 2
    }

    pub fn j(&self) -> &RMat {
        &self.j
    }

    pub fn omega(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (&self.j * x).dot(y)
    }

    /// Frame of the reference Lagrangian (`lambda_std` for standard spaces).
    pub fn reference_frame(&self) -> &RMat {
        &self.reference
    }

    /// Orthonormal basis of `E_+ = {z : J z = i z}` in `C^{2n}`.
    pub fn e_plus(&self) -> &CMat {
        &self.e_plus
    }

    /// Orthonormal basis of `E_- = {z : J z = -i z}` in `C^{2n}`.
    pub fn e_minus(&self) -> &CMat {
        &self.e_minus
    }
}

/// Reference Lagrangian of a space.
pub fn reference_lagrangian(space: &Arc<SymplecticSpace>) -> Lagrangian {
    Lagrangian {
        space: space.clone(),
        frame: space.reference.clone(),
    }
}

/// `n` as in the standard model; kept for symmetry with the other operations.
pub fn standard_space(n: usize) -> Result<Arc<SymplecticSpace>> {
    SymplecticSpace::standard(n)
}

/// A Lagrangian subspace, stored as an orthonormal isotropic frame.
#[derive(Clone, Debug)]
pub struct Lagrangian {
    space: Arc<SymplecticSpace>,
    frame: RMat,
}

impl Lagrangian {
    /// Accepts a frame that is orthonormal up to [`ORTHONORMAL_SLACK`] and
    /// isotropic up to [`ISOTROPY_TOL`].
    pub fn from_frame(space: &Arc<SymplecticSpace>, frame: RMat) -> Result<Self> {
        let frame = checked_orthonormal(space, &frame)?;
        let iso = isotropy_defect(space, &frame);
        if iso > ISOTROPY_TOL {
            return Err(Error::NotLagrangian(iso));
        }
        Ok(Self {
            space: space.clone(),
            frame,
        })
    }

    /// Orthonormalizes an arbitrary full-rank `2n x n` spanning set first.
    pub fn from_span(space: &Arc<SymplecticSpace>, span: &RMat) -> Result<Self> {
        check_shape(space, span)?;
        let frame = linalg::orthonormalize(span, KERNEL_TOL)?;
        let iso = isotropy_defect(space, &frame);
        if iso > ISOTROPY_TOL {
            return Err(Error::NotLagrangian(iso));
        }
        Ok(Self {
            space: space.clone(),
            frame,
        })
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn frame(&self) -> &RMat {
        &self.frame
    }

    /// `J(mu)`, which equals the orthogonal complement `mu^perp`.
    pub fn perp(&self) -> Lagrangian {
        Lagrangian {
            space: self.space.clone(),
            frame: self.space.j() * &self.frame,
        }
    }

    /// Largest principal angle to another subspace of the same space.
    pub fn distance(&self, other: &Lagrangian) -> f64 {
        linalg::subspace_sin_distance(&self.frame, &other.frame).asin()
    }

    pub fn same_subspace(&self, other: &Lagrangian) -> bool {
        self.distance(other) <= SUBSPACE_TOL
    }

    /// Reinterprets the same frame in another space of equal dimension,
    /// e.g. a boundary space with the opposite symplectic form.
    pub fn reinterpret(&self, space: &Arc<SymplecticSpace>) -> Result<Lagrangian> {
        Lagrangian::from_frame(space, self.frame.clone())
    }
}

fn check_shape(space: &SymplecticSpace, frame: &RMat) -> Result<()> {
    let expected = (space.dim(), space.half_dim());
    if frame.shape() != expected {
        return Err(Error::Shape(format!(
            "Lagrangian frame must be {}x{}, got {}x{}",
            expected.0,
            expected.1,
            frame.nrows(),
            frame.ncols()
        )));
    }
    Ok(())
}

fn checked_orthonormal(space: &SymplecticSpace, frame: &RMat) -> Result<RMat> {
    check_shape(space, frame)?;
    let n = frame.ncols();
    let gram = frame.transpose() * frame;
    let defect = linalg::max_abs(&(gram - RMat::identity(n, n)));
    if defect > ORTHONORMAL_SLACK {
        // Distinguish a dependent frame from a merely non-orthonormal one.
        linalg::orthonormalize(frame, KERNEL_TOL)?;
        return Err(Error::NotOrthonormal(defect));
    }
    if defect > 0.0 {
        linalg::orthonormalize(frame, KERNEL_TOL)
    } else {
        Ok(frame.clone())
    }
}

fn isotropy_defect(space: &SymplecticSpace, frame: &RMat) -> f64 {
    linalg::max_abs(&(frame.transpose() * space.j() * frame))
}

/// Membership test for the Lagrangian Grassmannian.
pub fn is_lagrangian(space: &Arc<SymplecticSpace>, frame: &RMat) -> Result<bool> {
    let frame = checked_orthonormal(space, frame)?;
    Ok(isotropy_defect(space, &frame) <= ISOTROPY_TOL)
}

fn same_space(a: &Lagrangian, b: &Lagrangian) -> Result<()> {
    if Arc::ptr_eq(&a.space, &b.space) || *a.space == *b.space {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// `dim(mu ∩ lambda)`: the nullity of the stacked frame pair.
pub fn intersection_dim(mu: &Lagrangian, lambda: &Lagrangian) -> Result<usize> {
    intersection_dim_tol(mu, lambda, KERNEL_TOL)
}

pub fn intersection_dim_tol(mu: &Lagrangian, lambda: &Lagrangian, rel_tol: f64) -> Result<usize> {
    same_space(mu, lambda)?;
    let stacked = linalg::hstack(&mu.frame, &lambda.frame);
    let s = linalg::singular_values_asc(&stacked);
    let largest = s.last().copied().unwrap_or(0.0);
    Ok(s.iter().filter(|v| **v < rel_tol * largest).count())
}

/// Orthonormal basis of `mu ∩ lambda` (columns in the ambient space).
pub fn intersection_basis(mu: &Lagrangian, lambda: &Lagrangian, rel_tol: f64) -> Result<RMat> {
    same_space(mu, lambda)?;
    let stacked = linalg::hstack(&mu.frame, &(-&lambda.frame));
    let kernel = linalg::null_space(&stacked, rel_tol);
    if kernel.ncols() == 0 {
        return Ok(RMat::zeros(mu.space.dim(), 0));
    }
    let n = mu.frame.ncols();
    let coords = kernel.rows(0, n).into_owned();
    let vectors = &mu.frame * coords;
    linalg::orthonormalize(&vectors, KERNEL_TOL)
}

/// The graph `{x + phi(x) : x in mu}` of `phi: mu -> J(mu)`, where `phi` is
/// given as an `n x n` matrix in the frames of `mu` and `J(mu)`.
///
/// The graph is Lagrangian exactly when `omega(x, phi y)` is symmetric on
/// `mu`, which in these coordinates means `phi` is a symmetric matrix.
pub fn graph_lagrangian(mu: &Lagrangian, phi: &RMat) -> Result<Lagrangian> {
    let n = mu.frame.ncols();
    if phi.shape() != (n, n) {
        return Err(Error::Shape(format!(
            "graph operator must be {n}x{n}, got {:?}",
            phi.shape()
        )));
    }
    let asym = linalg::max_abs(&(phi - phi.transpose()));
    if asym > ISOTROPY_TOL * phi.amax().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let jf = mu.space.j() * &mu.frame;
    let span = &mu.frame + jf * phi;
    Lagrangian::from_span(&mu.space, &span)
}

/// Inverse of [`graph_lagrangian`]: the symmetric `phi` with
/// `nu = graph(phi)` over `mu`. Fails when `nu` meets `J(mu)`.
pub fn graph_operator(mu: &Lagrangian, nu: &Lagrangian) -> Result<RMat> {
    same_space(mu, nu)?;
    let jf = mu.space.j() * &mu.frame;
    let a = mu.frame.transpose() * &nu.frame;
    let b = jf.transpose() * &nu.frame;
    let s = linalg::singular_values_asc(&a);
    if s.first().copied().unwrap_or(1.0) < 1e-8 {
        return Err(Error::NotTransversal(f64::NAN));
    }
    let a_inv = a.try_inverse().ok_or(Error::NotTransversal(f64::NAN))?;
    Ok(b * a_inv)
}

/// A unitary operator on `(R^{2n}, J)` written as an `n x n` complex matrix
/// `X + i Y` in the coordinates of a fixed Lagrangian.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexUnitary(CMat);

impl ComplexUnitary {
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!("unitary must be square, got {:?}", m.shape())));
        }
        let n = m.nrows();
        let defect = linalg::max_abs_c(&(m.adjoint() * &m - CMat::identity(n, n)));
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMat::identity(n, n))
    }

    pub fn from_parts(x: &RMat, y: &RMat) -> Result<Self> {
        Self::new(linalg::compose_complex(x, y))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn x(&self) -> RMat {
        linalg::real_part(&self.0)
    }

    pub fn y(&self) -> RMat {
        linalg::imag_part(&self.0)
    }
}

/// Real `2n x 2n` matrix of a complex operator given in `lambda`-coordinates.
pub fn real_operator(lambda: &Lagrangian, m: &CMat) -> RMat {
    let f = &lambda.frame;
    let jf = lambda.space.j() * f;
    let x = linalg::real_part(m);
    let y = linalg::imag_part(m);
    // Column images: F e_k -> F X e_k + J F Y e_k, J F e_k -> -F Y e_k + J F X e_k.
    let basis = linalg::hstack(f, &jf);
    let n = f.ncols();
    let mut block = RMat::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&x);
    block.view_mut((0, n), (n, n)).copy_from(&(-&y));
    block.view_mut((n, 0), (n, n)).copy_from(&y);
    block.view_mut((n, n), (n, n)).copy_from(&x);
    &basis * block * basis.transpose()
}

/// Complex `n x n` matrix, in `lambda`-coordinates, of a real operator that
/// commutes with `J`.
pub fn complex_operator(lambda: &Lagrangian, t: &RMat) -> CMat {
    let f = &lambda.frame;
    let jf = lambda.space.j() * f;
    let re = f.transpose() * t * f;
    let im = jf.transpose() * t * f;
    linalg::compose_complex(&re, &im)
}

/// Complex coordinates `a + i b` of the real vector `F a + J F b`.
pub fn complex_coords(lambda: &Lagrangian, v: &RMat) -> CMat {
    let jf = lambda.space.j() * &lambda.frame;
    linalg::compose_complex(&(lambda.frame.transpose() * v), &(jf.transpose() * v))
}

/// Real vectors `F Re z + J F Im z` from complex coordinates.
pub fn real_vectors(lambda: &Lagrangian, z: &CMat) -> RMat {
    let jf = lambda.space.j() * &lambda.frame;
    &lambda.frame * linalg::real_part(z) + jf * linalg::imag_part(z)
}

/// `rho(U) = U(lambda^perp)`.
pub fn lagrangian_from_unitary(lambda: &Lagrangian, u: &ComplexUnitary) -> Result<Lagrangian> {
    let n = lambda.frame.ncols();
    if u.dim() != n {
        return Err(Error::Shape(format!(
            "unitary must be {n}x{n} for this space, got {}x{}",
            u.dim(),
            u.dim()
        )));
    }
    // U applied to J F e_k = i e_k in coordinates gives i U e_k = -Y e_k + i X e_k.
    let jf = lambda.space.j() * &lambda.frame;
    let span = jf * u.x() - &lambda.frame * u.y();
    Lagrangian::from_span(&lambda.space, &span)
}

/// A unitary lift `U` with `rho(U) = mu`, built column by column from the
/// frame of `mu` and polar-corrected to exact unitarity. Deterministic in
/// the stored frame.
pub fn unitary_of_lagrangian(lambda: &Lagrangian, mu: &Lagrangian) -> Result<ComplexUnitary> {
    same_space(lambda, mu)?;
    let jf = lambda.space.j() * &lambda.frame;
    let x = jf.transpose() * &mu.frame;
    let y = -(lambda.frame.transpose() * &mu.frame);
    let raw = linalg::compose_complex(&x, &y);
    ComplexUnitary::new(linalg::polar_unitary(&raw))
}

/// Serializable row-major matrix used by every JSON schema in the crate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<f64>>);

impl MatrixJson {
    pub fn from_matrix(m: &RMat) -> Self {
        Self(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect(),
        )
    }

    pub fn to_matrix(&self) -> Result<RMat> {
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, Vec::len);
        if self.0.iter().any(|r| r.len() != cols) {
            return Err(Error::Spec("ragged matrix rows".into()));
        }
        Ok(RMat::from_fn(rows, cols, |i, j| self.0[i][j]))
    }
}
