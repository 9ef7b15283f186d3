//! The double space `H ⊞ H = H_omega ⊕ H_{-omega}`, its diagonal, box-plus
//! Lagrangians, the maps of the pair-reduction diagram, and the Maslov
//! index of a path of pairs.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat, I};
use crate::maslov;
use crate::path::{self, LagrangianPath, Path};
use crate::souriau;
use crate::symplectic::{self, ComplexUnitary, Lagrangian, SymplecticSpace};

/// `H ⊞ H` with `JJ = J ⊕ (-J)`; the reference Lagrangian of the double is
/// the box-plus of the base reference with itself.
#[derive(Clone, Debug)]
pub struct DoubleSpace {
    base: Arc<SymplecticSpace>,
    space: Arc<SymplecticSpace>,
}

impl DoubleSpace {
    pub fn base(&self) -> &Arc<SymplecticSpace> {
        &self.base
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    /// `Omega(x ⊞ y, u ⊞ v) = omega(x, u) - omega(y, v)` on stacked vectors.
    pub fn omega(&self, a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>) -> f64 {
        self.space.omega(a, b)
    }
}

pub fn double(space: &Arc<SymplecticSpace>) -> Result<DoubleSpace> {
    let j = linalg::block_diag(space.j(), &(-space.j()));
    let f = space.reference_frame();
    let reference = linalg::block_diag(f, f);
    Ok(DoubleSpace {
        base: space.clone(),
        space: SymplecticSpace::new(j, reference)?,
    })
}

/// `Delta = {x ⊞ x}`.
pub fn diagonal(double: &DoubleSpace) -> Lagrangian {
    let d = double.base.dim();
    let frame = linalg::vstack(&RMat::identity(d, d), &RMat::identity(d, d)) * std::f64::consts::FRAC_1_SQRT_2;
    Lagrangian::from_frame(&double.space, frame).expect("the diagonal is Lagrangian")
}

/// The diagonal with the frame `[B; B] / sqrt 2`, `B = [F, J F]` for the
/// frame `F` of `lambda`. Its coordinates split as `lambda ⊕ lambda^perp`,
/// which is the frame the diagram maps are written in.
pub fn diagonal_adapted(double: &DoubleSpace, lambda: &Lagrangian) -> Result<Lagrangian> {
    check_base(double, lambda)?;
    let f = lambda.frame();
    let b = linalg::hstack(f, &(double.base.j() * f));
    Lagrangian::from_frame(&double.space, linalg::vstack(&b, &b) * std::f64::consts::FRAC_1_SQRT_2)
}

fn check_base(double: &DoubleSpace, l: &Lagrangian) -> Result<()> {
    if **l.space() == *double.base {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// `mu ⊞ lambda` in the double space.
pub fn box_plus(double: &DoubleSpace, mu: &Lagrangian, lambda: &Lagrangian) -> Result<Lagrangian> {
    check_base(double, mu)?;
    check_base(double, lambda)?;
    Lagrangian::from_frame(&double.space, linalg::block_diag(mu.frame(), lambda.frame()))
}

/// `Mas({mu_t ⊞ lambda_t}, Delta)`, sampling both components at the same `t`.
pub fn maslov_pair(double: &DoubleSpace, mu: &LagrangianPath, lambda: &LagrangianPath) -> Result<i64> {
    maslov::maslov_index(&box_plus_path(double, mu, lambda), &diagonal(double))
}

pub fn box_plus_path(double: &DoubleSpace, mu: &LagrangianPath, lambda: &LagrangianPath) -> LagrangianPath {
    let d = double.clone();
    path::zip(mu, lambda).map(move |(m, l)| box_plus(&d, &m, &l))
}

/// The maps of the pair-reduction diagram for a fixed `lambda`, written in
/// the coordinates of `lambda` on `H_J` and of [`diagonal_adapted`] on the
/// double.
#[derive(Clone, Debug)]
pub struct DiagramMaps {
    pub double: DoubleSpace,
    pub lambda: Lagrangian,
    pub delta: Lagrangian,
    /// `A = JJ o phi` on `Delta`, with `graph(phi) = lambda^perp ⊞ lambda`.
    pub a: RMat,
    /// `V = (-i - A) / sqrt 2`.
    pub v: CMat,
}

pub fn diagram_maps(lambda: &Lagrangian) -> Result<DiagramMaps> {
    let double = double(lambda.space())?;
    let delta = diagonal_adapted(&double, lambda)?;
    let n = lambda.space().half_dim();
    // phi((x, y) ⊞ (x, y)) = (-x, y) ⊞ (x, -y) for x in lambda, y in
    // lambda^perp; applying JJ and reading off Delta-coordinates gives A.
    let phi_real = {
        let f = lambda.frame();
        let jf = lambda.space().j() * f;
        let p_lambda = f * f.transpose();
        let p_perp = &jf * jf.transpose();
        let top = -&p_lambda + &p_perp;
        let bottom = &p_lambda - &p_perp;
        let d = lambda.space().dim();
        let mut m = RMat::zeros(2 * d, 2 * d);
        // Acts on x ⊞ x: only the first block column is needed, but the map
        // is extended by zero on the anti-diagonal complement.
        m.view_mut((0, 0), (d, d)).copy_from(&(&top * 0.5));
        m.view_mut((0, d), (d, d)).copy_from(&(&top * 0.5));
        m.view_mut((d, 0), (d, d)).copy_from(&(&bottom * 0.5));
        m.view_mut((d, d), (d, d)).copy_from(&(&bottom * 0.5));
        m
    };
    let a_real = double.space.j() * phi_real;
    let a = delta.frame().transpose() * a_real * delta.frame();
    let v = (CMat::identity(2 * n, 2 * n) * (-I) - linalg::to_complex(&a)).scale(std::f64::consts::FRAC_1_SQRT_2);
    Ok(DiagramMaps {
        double,
        lambda: lambda.clone(),
        delta,
        a,
        v,
    })
}

impl DiagramMaps {
    /// `U ⊕ Id` on `H_J ⊕ H_{-J}`, in `Delta`-coordinates.
    pub fn extend(&self, u: &CMat) -> CMat {
        let real = symplectic::real_operator(&self.lambda, u);
        let d = self.lambda.space().dim();
        let full = linalg::block_diag(&real, &RMat::identity(d, d));
        symplectic::complex_operator(&self.delta, &full)
    }

    /// `a_lambda(U) = (U ⊕ Id) V`.
    pub fn a_map(&self, u: &ComplexUnitary) -> Result<ComplexUnitary> {
        ComplexUnitary::new(self.extend(u.matrix()) * &self.v)
    }

    /// `b_lambda(W) = i (W ⊕ Id)(A ⊗ Id)`.
    pub fn b_map(&self, w: &ComplexUnitary) -> Result<ComplexUnitary> {
        ComplexUnitary::new(self.extend(w.matrix()) * linalg::to_complex(&self.a) * I)
    }

    /// `P_lambda(mu) = mu ⊞ lambda`.
    pub fn p_map(&self, mu: &Lagrangian) -> Result<Lagrangian> {
        box_plus(&self.double, mu, &self.lambda)
    }

    /// `S_Delta(P_lambda(mu))` in the adapted `Delta`-coordinates.
    pub fn souriau_of_pair(&self, mu: &Lagrangian) -> Result<ComplexUnitary> {
        Ok(souriau::souriau_map(&self.delta, &self.p_map(mu)?)?.w)
    }

    /// Largest deviation among `V(Delta^perp) = lambda^perp ⊞ lambda`,
    /// `theta_Delta(V) = V` and `V^2 = i A`.
    pub fn identity_defects(&self) -> Result<[f64; 3]> {
        let v = ComplexUnitary::new(self.v.clone())?;
        let image = symplectic::lagrangian_from_unitary(&self.delta, &v)?;
        let target = box_plus(&self.double, &self.lambda.perp(), &self.lambda)?;
        let theta = souriau::theta(&self.delta, &v)?;
        let square = &self.v * &self.v - linalg::to_complex(&self.a) * I;
        Ok([
            image.distance(&target),
            linalg::max_abs_c(&(theta.matrix() - &self.v)),
            linalg::max_abs_c(&square),
        ])
    }
}

/// A path of pairs `(mu_t, lambda)` with `lambda` fixed, as a path in the
/// double.
pub fn pair_with_fixed(double: &DoubleSpace, mu: &LagrangianPath, lambda: &Lagrangian) -> LagrangianPath {
    box_plus_path(double, mu, &Path::constant(lambda.clone()))
}
