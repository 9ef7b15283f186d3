use std::sync::Arc;

use super::spectrum::{spectrum_with, SpectrumOptions};
use super::{ModelProblem, Params, Side};
use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::pairs::{self, DoubleSpace};
use crate::symplectic::{Lagrangian, SymplecticSpace, KERNEL_TOL};

/// Trace spaces of the split circle.
///
/// `beta^-` holds `(u(0), u(l))` with `J_- = diag(-sigma, sigma)`, so that
/// `omega((u_a, u_b), (v_a, v_b)) = <sigma u_b, v_b> - <sigma u_a, v_a>` is
/// Green's form of `[0, l]`. `beta^+` holds `(u(L), u(l))`, the traces at
/// the same two points of `Sigma`, and carries `J_+ = -J_-`. The total space
/// is `beta^- ⊕ beta^+`, which is the double of `beta^-`.
#[derive(Clone, Debug)]
pub struct BoundarySpaces {
    minus: Arc<SymplecticSpace>,
    plus: Arc<SymplecticSpace>,
    full: DoubleSpace,
    delta: Lagrangian,
}

impl BoundarySpaces {
    pub fn new(sigma: &RMat) -> Result<Self> {
        let m = sigma.nrows();
        let j_minus = linalg::block_diag(&(-sigma), sigma);
        let id = RMat::identity(m, m);
        let diagonal = linalg::vstack(&id, &id) * std::f64::consts::FRAC_1_SQRT_2;
        let minus = SymplecticSpace::new(j_minus.clone(), diagonal.clone())?;
        let plus = SymplecticSpace::new(-j_minus, diagonal)?;
        let full = pairs::double(&minus)?;
        let delta = pairs::diagonal(&full);
        Ok(Self {
            minus,
            plus,
            full,
            delta,
        })
    }

    pub fn minus(&self) -> &Arc<SymplecticSpace> {
        &self.minus
    }

    pub fn plus(&self) -> &Arc<SymplecticSpace> {
        &self.plus
    }

    pub fn full(&self) -> &DoubleSpace {
        &self.full
    }

    pub fn space(&self, side: Side) -> &Arc<SymplecticSpace> {
        match side {
            Side::Minus => &self.minus,
            Side::Plus => &self.plus,
            Side::Circle => self.full.space(),
        }
    }

    /// `delta = {(phi, phi)}`: matching traces from both sides.
    pub fn delta(&self) -> &Lagrangian {
        &self.delta
    }
}

/// `Lambda^side(params, lambda)`: boundary traces of solutions of
/// `(A + C - lambda) u = 0` on the arc. On the circle this is
/// `Lambda^- ⊞ Lambda^+` in `beta`.
pub fn cauchy_data_space(problem: &ModelProblem, side: Side, params: Params, lambda: f64) -> Result<Lagrangian> {
    let spaces = problem.boundary();
    let m = problem.fiber_dim();
    let id = RMat::identity(m, m);
    match side {
        Side::Minus => {
            let t = problem.transfer_matrix(Side::Minus, params, lambda);
            Lagrangian::from_span(spaces.minus(), &linalg::vstack(&id, &t))
        }
        Side::Plus => {
            let t = problem.transfer_matrix(Side::Plus, params, lambda);
            Lagrangian::from_span(spaces.plus(), &linalg::vstack(&t, &id))
        }
        Side::Circle => {
            let minus = cauchy_data_space(problem, Side::Minus, params, lambda)?;
            let plus = cauchy_data_space(problem, Side::Plus, params, lambda)?.reinterpret(spaces.minus())?;
            pairs::box_plus(spaces.full(), &minus, &plus)
        }
    }
}

pub fn transmission_lagrangian(problem: &ModelProblem) -> Lagrangian {
    problem.boundary().delta().clone()
}

/// Number of independent periodic solutions of `(A + C) u = 0` on the circle:
/// the nullity of `T(0 -> L) - Id`.
pub fn kernel_dim_circle(problem: &ModelProblem, params: Params) -> usize {
    let m = problem.fiber_dim();
    let t = problem.transfer_matrix(Side::Circle, params, 0.0);
    let s = linalg::singular_values_asc(&(t - RMat::identity(m, m)));
    let scale = linalg::norm2(&problem.transfer_matrix(Side::Circle, params, 0.0)).max(1.0);
    s.iter().filter(|v| **v < KERNEL_TOL * scale).count()
}

/// Boundary conditions of the split operators: `l0 = Lambda^+_0` read in
/// `beta^-` and `l1 = Lambda^-_1` read in `beta^+`.
#[derive(Clone, Debug)]
pub struct SplitConditions {
    pub l0: Lagrangian,
    pub l1: Lagrangian,
    /// Set when the problem is not of product form but `A + C_0` is
    /// invertible, so the conditions are still self-adjoint.
    pub warning: Option<String>,
}

/// Half-width of the window searched for a kernel of `A + C_0` when the
/// problem is not of product form.
pub const INVERTIBILITY_WINDOW: f64 = 1e-3;

pub fn split_boundary_conditions(problem: &ModelProblem) -> Result<SplitConditions> {
    let spaces = problem.boundary();
    let mut warning = None;
    if !problem.product_form() {
        let opts = SpectrumOptions {
            window: (-INVERTIBILITY_WINDOW, INVERTIBILITY_WINDOW),
            grid: 3,
            certify: false,
            ..SpectrumOptions::default()
        };
        let report = spectrum_with(problem, Side::Circle, spaces.delta(), Params::both(0.0), &opts);
        match report {
            Ok(r) if r.eigenvalues.is_empty() => {
                warning = Some(format!(
                    "problem is not of product form near the split points; A + C_0 has no spectrum in \
                     [-{INVERTIBILITY_WINDOW}, {INVERTIBILITY_WINDOW}], so the split conditions are still self-adjoint"
                ));
            }
            Ok(_) | Err(Error::WindowEdge(_)) => {
                return Err(Error::InvalidProblem(
                    "problem is not of product form and A + C_0 is not invertible".into(),
                ))
            }
            Err(e) => return Err(e),
        }
    }
    let l0 = cauchy_data_space(problem, Side::Plus, Params::both(0.0), 0.0)?.reinterpret(spaces.minus())?;
    let l1 = cauchy_data_space(problem, Side::Minus, Params::both(1.0), 0.0)?.reinterpret(spaces.plus())?;
    Ok(SplitConditions { l0, l1, warning })
}
