//! Dense linear-algebra helpers shared by every module.
//!
//! Everything here works on small dense matrices (dimension well under 100,
//! except the Galerkin oracle), so clarity wins over blocking or workspace
//! reuse.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn compose_complex(re: &RMat, im: &RMat) -> CMat {
    CMat::from_fn(re.nrows(), re.ncols(), |i, j| c(re[(i, j)], im[(i, j)]))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

/// Largest singular value.
pub fn norm2(m: &RMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

pub fn norm2_c(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Orthonormal basis of the column span via Householder QR, with the sign
/// of every column fixed so that the diagonal of R is non-negative.
///
/// Fails if the columns are numerically dependent (relative threshold
/// `rank_tol` on the diagonal of R).
pub fn orthonormalize(frame: &RMat, rank_tol: f64) -> Result<RMat> {
    let (rows, cols) = frame.shape();
    if cols == 0 {
        return Ok(RMat::zeros(rows, 0));
    }
    if cols > rows {
        return Err(Error::Shape(format!(
            "cannot orthonormalize {cols} columns in dimension {rows}"
        )));
    }
    let qr = frame.clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    let scale = (0..cols).map(|k| r[(k, k)].abs()).fold(0.0, f64::max);
    for k in 0..cols {
        let d = r[(k, k)];
        if d.abs() <= rank_tol * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::RankDeficient {
                rank: (0..cols)
                    .filter(|&j| r[(j, j)].abs() > rank_tol * scale)
                    .count(),
                expected: cols,
            });
        }
        if d < 0.0 {
            let mut col = q.column_mut(k);
            col.neg_mut();
        }
    }
    Ok(q)
}

pub fn orthonormalize_c(frame: &CMat, rank_tol: f64) -> Result<CMat> {
    let (rows, cols) = frame.shape();
    if cols == 0 {
        return Ok(CMat::zeros(rows, 0));
    }
    let qr = frame.clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    let scale = (0..cols).map(|k| r[(k, k)].norm()).fold(0.0, f64::max);
    for k in 0..cols {
        let d = r[(k, k)];
        if d.norm() <= rank_tol * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::RankDeficient {
                rank: k,
                expected: cols,
            });
        }
        let phase = d / d.norm();
        for z in q.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    Ok(q)
}

/// Orthonormal basis of the (numerical) null space: right singular vectors
/// whose singular value is below `rel_tol * max(1, largest)`.
pub fn null_space(m: &RMat, rel_tol: f64) -> RMat {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return RMat::zeros(0, 0);
    }
    // Pad to at least square so that SVD returns the full right basis.
    let padded = if rows < cols {
        let mut p = RMat::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let largest = svd.singular_values.max().max(1.0);
    let mut basis = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= rel_tol * largest {
            basis.push(v_t.row(k).transpose());
        }
    }
    if basis.is_empty() {
        RMat::zeros(cols, 0)
    } else {
        RMat::from_columns(&basis)
    }
}

pub fn null_space_c(m: &CMat, rel_tol: f64) -> CMat {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let largest = svd.singular_values.iter().cloned().fold(1.0, f64::max);
    let mut basis = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= rel_tol * largest {
            basis.push(v_t.row(k).adjoint());
        }
    }
    if basis.is_empty() {
        CMat::zeros(cols, 0)
    } else {
        CMat::from_columns(&basis)
    }
}

/// Singular values sorted ascending.
pub fn singular_values_asc(m: &RMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().cloned().collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Eigen-decomposition of a normal (in practice unitary) complex matrix via
/// the complex Schur form. Returns eigenvalues and a unitary matrix whose
/// columns are the corresponding eigenvectors.
pub fn normal_eigen(m: &CMat) -> (Vec<Complex64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    if let Some(schur) = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 200 * n) {
        let (q, t) = schur.unpack();
        let values = (0..n).map(|k| t[(k, k)]).collect();
        return (values, q);
    }
    normal_eigen_hermitian(m)
}

/// Diagonalizes a normal matrix through the Hermitian combination
/// `Re M + c Im M`, which shares its eigenvectors whenever `c` separates
/// the eigenvalues.
fn normal_eigen_hermitian(m: &CMat) -> (Vec<Complex64>, CMat) {
    let n = m.nrows();
    let re = (m + m.adjoint()).scale(0.5);
    let im = (m - m.adjoint()) * c(0.0, -0.5);
    let scale = max_abs_c(m).max(1.0);
    let mut best: Option<(f64, Vec<Complex64>, CMat)> = None;
    for weight in [0.618_033_988_7, -1.324_717_957_2, 2.718_281_828_5, -0.414_213_562_4] {
        let h = hermitian_part(&(&re + &im * c(weight, 0.0)));
        let q = h.symmetric_eigen().eigenvectors;
        let d = q.adjoint() * m * &q;
        let off = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .fold(0.0_f64, |acc, ij| acc.max(d[ij].norm()));
        let values = (0..n).map(|k| d[(k, k)]).collect();
        if off < 1e-12 * scale {
            return (values, q);
        }
        if best.as_ref().is_none_or(|b| off < b.0) {
            best = Some((off, values, q));
        }
    }
    let (_, values, q) = best.expect("at least one weight was tried");
    (values, q)
}

/// Arguments of the eigenvalues of a unitary matrix, in (-pi, pi], sorted.
pub fn eigenphases(u: &CMat) -> Vec<f64> {
    let (values, _) = normal_eigen(u);
    let mut phases: Vec<f64> = values.iter().map(|z| z.arg()).collect();
    phases.sort_by(f64::total_cmp);
    phases
}

/// Principal logarithm of a unitary matrix divided by `i`, i.e. the Hermitian
/// R with `u = exp(i R)` and spectrum in (-pi, pi). Refuses when an eigenvalue
/// lies within `cut_tol` (chordal distance) of -1.
pub fn unitary_log(u: &CMat, cut_tol: f64) -> Result<CMat> {
    let (values, q) = normal_eigen(u);
    let mut angles = Vec::with_capacity(values.len());
    for z in &values {
        if (z + 1.0).norm() < cut_tol {
            return Err(Error::BranchCut);
        }
        angles.push(z.arg());
    }
    let d = CMat::from_diagonal(&DVector::from_iterator(
        angles.len(),
        angles.iter().map(|a| c(*a, 0.0)),
    ));
    let r = &q * d * q.adjoint();
    Ok(hermitian_part(&r))
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn symmetric_part(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

/// The unitary factor of the polar decomposition, `m (m^* m)^{-1/2}`.
pub fn polar_unitary(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^H");
    u * v_t
}

pub fn is_unitary(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs_c(&(m.adjoint() * m - CMat::identity(m.nrows(), m.ncols()))) <= tol
}

/// Inertia of a Hermitian matrix: (positive, negative) eigenvalue counts,
/// where eigenvalues with modulus below `rel_tol * max(1, spectral radius)`
/// count as zero.
pub fn hermitian_inertia(m: &CMat, rel_tol: f64) -> (usize, usize) {
    if m.is_empty() {
        return (0, 0);
    }
    let eig = hermitian_part(m).symmetric_eigen();
    inertia_of(eig.eigenvalues.iter().cloned(), rel_tol)
}

pub fn symmetric_inertia(m: &RMat, rel_tol: f64) -> (usize, usize) {
    if m.is_empty() {
        return (0, 0);
    }
    let eig = symmetric_part(m).symmetric_eigen();
    inertia_of(eig.eigenvalues.iter().cloned(), rel_tol)
}

fn inertia_of(values: impl Iterator<Item = f64> + Clone, rel_tol: f64) -> (usize, usize) {
    let scale = values.clone().fold(1.0_f64, |a, v| a.max(v.abs()));
    let thresh = rel_tol * scale;
    let mut p = 0;
    let mut q = 0;
    for v in values {
        if v > thresh {
            p += 1;
        } else if v < -thresh {
            q += 1;
        }
    }
    (p, q)
}

/// Sorted eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &RMat) -> Vec<f64> {
    let mut v: Vec<f64> = symmetric_part(m).symmetric_eigenvalues().iter().cloned().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn expm(m: &RMat) -> RMat {
    m.clone().exp()
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Sine of the largest principal angle between the column spans of two
/// orthonormal frames of equal rank.
pub fn subspace_sin_distance(a: &RMat, b: &RMat) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    let residual = b - a * (a.transpose() * b);
    norm2(&residual).min(1.0)
}

pub fn subspace_sin_distance_c(a: &CMat, b: &CMat) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    let residual = b - a * (a.adjoint() * b);
    norm2_c(&residual).min(1.0)
}

pub fn block_diag(a: &RMat, b: &RMat) -> RMat {
    let mut m = RMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    m
}

pub fn block_diag_c(a: &CMat, b: &CMat) -> CMat {
    let mut m = CMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    m
}

pub fn hstack(a: &RMat, b: &RMat) -> RMat {
    let mut m = RMat::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    m
}

pub fn vstack(a: &RMat, b: &RMat) -> RMat {
    let mut m = RMat::zeros(a.nrows() + b.nrows(), a.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    m
}
