//! Seeded generators for Lagrangians, unitaries, symmetric matrices and
//! smooth paths. Everything is driven by a `ChaCha8Rng`, so a seed fixes
//! the whole corpus.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{self, CMat, RMat};
use crate::path::{LagrangianPath, OperatorPath, Path};
use crate::symplectic::{self, ComplexUnitary, Lagrangian, SymplecticSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> RMat {
    RMat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn symmetric(rng: &mut impl Rng, n: usize) -> RMat {
    linalg::symmetric_part(&gaussian(rng, n, n))
}

pub fn orthogonal(rng: &mut impl Rng, n: usize) -> RMat {
    linalg::orthonormalize(&gaussian(rng, n, n), 1e-12).expect("Gaussian matrices are full rank")
}

/// Haar-distributed unitary (QR of a complex Ginibre matrix, phases fixed).
pub fn unitary(rng: &mut impl Rng, n: usize) -> ComplexUnitary {
    let g = linalg::compose_complex(&gaussian(rng, n, n), &gaussian(rng, n, n));
    let q = linalg::orthonormalize_c(&g, 1e-12).expect("Ginibre matrices are full rank");
    ComplexUnitary::new(q).expect("QR factor is unitary")
}

/// `exp(i H)` for a random Hermitian `H` scaled by `scale`.
pub fn unitary_near_identity(rng: &mut impl Rng, n: usize, scale: f64) -> CMat {
    let re = symmetric(rng, n);
    let a = gaussian(rng, n, n);
    let im = (&a - a.transpose()) * 0.5;
    let h = linalg::compose_complex(&re, &im) * linalg::c(0.0, scale);
    h.exp()
}

pub fn lagrangian(rng: &mut impl Rng, space: &Arc<SymplecticSpace>) -> Lagrangian {
    let lambda = symplectic::reference_lagrangian(space);
    let u = unitary(rng, space.half_dim());
    symplectic::lagrangian_from_unitary(&lambda, &u).expect("rho maps unitaries to Lagrangians")
}

/// A Lagrangian meeting `lambda` in exactly `k` dimensions: keep `k`
/// directions of `lambda`, and over the rest take the graph of a
/// nondegenerate symmetric map into `J(lambda)`, then rotate by a random
/// orthogonal map of `lambda` (extended to a symplectic unitary).
pub fn lagrangian_meeting(rng: &mut impl Rng, lambda: &Lagrangian, k: usize) -> Result<Lagrangian> {
    let n = lambda.space().half_dim();
    assert!(k <= n);
    let mut phi = RMat::zeros(n, n);
    let rest = n - k;
    if rest > 0 {
        let q = orthogonal(rng, rest);
        let d: Vec<f64> = (0..rest)
            .map(|_| {
                let s: f64 = rng.random_range(0.3..3.0);
                if rng.random_bool(0.5) { s } else { -s }
            })
            .collect();
        let block = &q * RMat::from_diagonal(&nalgebra::DVector::from_vec(d)) * q.transpose();
        phi.view_mut((k, k), (rest, rest)).copy_from(&block);
    }
    let o = orthogonal(rng, n);
    let phi = &o * phi * o.transpose();
    symplectic::graph_lagrangian(lambda, &phi)
}

/// A random smooth loop-free path `t -> rho(U0 exp(i t H1 + i t^2 H2))`,
/// with `H1`, `H2` random Hermitian of the given size.
pub fn lagrangian_path(rng: &mut impl Rng, space: &Arc<SymplecticSpace>, speed: f64) -> LagrangianPath {
    let n = space.half_dim();
    let lambda = symplectic::reference_lagrangian(space);
    let u0 = unitary(rng, n).into_matrix();
    let h1 = hermitian(rng, n) * linalg::c(0.0, speed);
    let h2 = hermitian(rng, n) * linalg::c(0.0, speed * 0.5);
    Path::new(move |t| {
        let u = &u0 * (&h1 * linalg::c(t, 0.0) + &h2 * linalg::c(t * t, 0.0)).exp();
        let u = ComplexUnitary::new(linalg::polar_unitary(&u))?;
        symplectic::lagrangian_from_unitary(&lambda, &u)
    })
}

pub fn hermitian(rng: &mut impl Rng, n: usize) -> CMat {
    let re = symmetric(rng, n);
    let a = gaussian(rng, n, n);
    linalg::compose_complex(&re, &((&a - a.transpose()) * 0.5))
}

/// `t -> A0 + t A1 + sin(pi t) A2` with random symmetric coefficients.
pub fn operator_path(rng: &mut impl Rng, d: usize) -> OperatorPath {
    let a0 = symmetric(rng, d);
    let a1 = symmetric(rng, d) * 2.0;
    let a2 = symmetric(rng, d);
    Path::from_fn(move |t| &a0 + &a1 * t + &a2 * (std::f64::consts::PI * t).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{intersection_dim, reference_lagrangian, standard_space};

    #[test]
    fn prescribed_intersections() {
        let mut r = rng(7);
        for n in 1..=4 {
            let space = standard_space(n).unwrap();
            let lambda = reference_lagrangian(&space);
            for k in 0..=n {
                let mu = lagrangian_meeting(&mut r, &lambda, k).unwrap();
                assert_eq!(intersection_dim(&mu, &lambda).unwrap(), k);
            }
        }
    }

    #[test]
    fn seeds_reproduce() {
        let a = gaussian(&mut rng(3), 2, 2);
        let b = gaussian(&mut rng(3), 2, 2);
        assert_eq!(a, b);
    }
}
