//! First-order systems `sigma (d/dtau + B) + C_t(tau)` on a circle of length
//! `L`, split at `{0, l}` into `M_- = [0, l]` and `M_+ = [l, L]`.
//!
//! The spectral problem `(A + C_t - lambda) u = 0` is the ODE
//! `u' = (-B + sigma (C_t - lambda)) u`, solved exactly by ordered
//! products of matrix exponentials over the pieces where `C_t` is constant.

mod boundary;
mod config;
mod flow;
mod galerkin;
mod spectrum;
mod theorems;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, RMat};

pub use boundary::{
    cauchy_data_space, kernel_dim_circle, split_boundary_conditions, transmission_lagrangian, BoundarySpaces,
    SplitConditions,
};
pub use config::{PerturbationSpec, ProblemConfig};
pub use flow::{
    crossing_times, kernel_form, maslov_side, spectral_flow_bvp, spectral_flow_bvp_with, Family, FlowOptions,
    FlowReport, ParamPath,
};
pub use galerkin::{GalerkinOracle, GALERKIN_MODES};
pub use spectrum::{evans_determinant, spectrum, spectrum_with, EigenvalueEntry, SpectrumOptions, SpectrumReport};
pub use theorems::{verify_theorems, TheoremCheck, TheoremReport, VerifyConfig};

/// Tolerance on the algebraic identities required of `sigma` and `B`.
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Which part of the circle an operator lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
    Circle,
}

/// Time dependence of one perturbation piece.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `offset + slope * t`.
    Linear { offset: f64, slope: f64 },
    /// `offset + amplitude * sin(pi * frequency * t + phase)`.
    Sine {
        offset: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl Profile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Profile::Linear { offset, slope } => offset + slope * t,
            Profile::Sine {
                offset,
                amplitude,
                frequency,
                phase,
            } => offset + amplitude * (PI * frequency * t + phase).sin(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Profile::Linear { slope, .. } => slope,
            Profile::Sine {
                amplitude,
                frequency,
                phase,
                ..
            } => amplitude * PI * frequency * (PI * frequency * t + phase).cos(),
        }
    }

    /// Bound on `|derivative|` over `[0, 1]`.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            Profile::Linear { slope, .. } => slope.abs(),
            Profile::Sine { amplitude, frequency, .. } => (amplitude * PI * frequency).abs(),
        }
    }

    /// The profile of `t -> C_{1 - t}`.
    pub fn reversed(&self) -> Profile {
        match *self {
            Profile::Linear { offset, slope } => Profile::Linear {
                offset: offset + slope,
                slope: -slope,
            },
            Profile::Sine {
                offset,
                amplitude,
                frequency,
                phase,
            } => Profile::Sine {
                offset,
                amplitude,
                frequency,
                phase: PI - PI * frequency - phase,
            },
        }
    }
}

/// `profile(t) * matrix` on `[start, end]`, a symmetric `m x m` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub matrix: RMat,
    pub profile: Profile,
}

/// Parameters of the two arcs: `C` is evaluated at `minus` on `M_-` and at
/// `plus` on `M_+`. `A + C_t` is `Params::both(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub minus: f64,
    pub plus: f64,
}

impl Params {
    pub fn both(t: f64) -> Self {
        Self { minus: t, plus: t }
    }

    pub fn new(minus: f64, plus: f64) -> Self {
        Self { minus, plus }
    }
}

/// A maximal interval of an arc on which `C_t` is constant in `tau`.
#[derive(Clone, Debug)]
struct Cell {
    start: f64,
    end: f64,
    pieces: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ModelProblem {
    m: usize,
    sigma: RMat,
    b: RMat,
    length: f64,
    split: f64,
    pieces: Vec<Piece>,
    collar: f64,
    product_form: bool,
    cells_minus: Vec<Cell>,
    cells_plus: Vec<Cell>,
    boundary: BoundarySpaces,
}

impl ModelProblem {
    /// Validates the product-form algebra (`sigma^T = -sigma`,
    /// `sigma^T sigma = Id`, `B^T = B`, `sigma B = -B sigma`), the
    /// perturbation pieces, and, when `product_form` is set, that every piece
    /// avoids the collar `collar` around both split points.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        sigma: RMat,
        b: RMat,
        length: f64,
        split: f64,
        pieces: Vec<Piece>,
        collar: f64,
        product_form: bool,
    ) -> Result<Self> {
        let m = sigma.nrows();
        if m == 0 || m % 2 != 0 || !sigma.is_square() {
            return Err(Error::InvalidProblem(format!(
                "sigma must be a square matrix of even size, got {:?}",
                sigma.shape()
            )));
        }
        if b.shape() != (m, m) {
            return Err(Error::InvalidProblem(format!("B must be {m}x{m}, got {:?}", b.shape())));
        }
        let id = RMat::identity(m, m);
        let checks = [
            ("sigma^T = -sigma", linalg::max_abs(&(sigma.transpose() + &sigma))),
            ("sigma^T sigma = Id", linalg::max_abs(&(sigma.transpose() * &sigma - &id))),
            ("B^T = B", linalg::max_abs(&(b.transpose() - &b))),
            ("sigma B = -B sigma", linalg::max_abs(&(&sigma * &b + &b * &sigma))),
        ];
        for (name, defect) in checks {
            if defect > ALGEBRA_TOL * b.amax().max(1.0) {
                return Err(Error::InvalidProblem(format!("{name} violated (defect {defect:.3e})")));
            }
        }
        if !(length.is_finite() && split.is_finite() && 0.0 < split && split < length) {
            return Err(Error::InvalidProblem(format!(
                "need 0 < split < length, got split {split}, length {length}"
            )));
        }
        if !(collar >= 0.0 && 2.0 * collar < split.min(length - split)) {
            return Err(Error::InvalidProblem(format!("collar {collar} does not fit the arcs")));
        }
        for (k, p) in pieces.iter().enumerate() {
            if p.matrix.shape() != (m, m) {
                return Err(Error::InvalidProblem(format!("piece {k}: matrix must be {m}x{m}")));
            }
            if linalg::max_abs(&(&p.matrix - p.matrix.transpose())) > ALGEBRA_TOL * p.matrix.amax().max(1.0) {
                return Err(Error::InvalidProblem(format!("piece {k}: matrix is not symmetric")));
            }
            let in_minus = 0.0 <= p.start && p.end <= split;
            let in_plus = split <= p.start && p.end <= length;
            if !(p.start < p.end && (in_minus || in_plus)) {
                return Err(Error::InvalidProblem(format!(
                    "piece {k}: [{}, {}] must be a nonempty interval inside one arc",
                    p.start, p.end
                )));
            }
            if product_form {
                let near = |x: f64| {
                    [0.0, split, length]
                        .iter()
                        .any(|&s| (x - s).abs() < collar - 1e-15)
                };
                let crosses = [0.0, split, length].iter().any(|&s| p.start < s + collar && s - collar < p.end);
                if near(p.start) || near(p.end) || crosses {
                    return Err(Error::InvalidProblem(format!(
                        "piece {k} enters the collar of width {collar} around the split points, so the \
                         family is not of product form there"
                    )));
                }
            }
        }
        let cells_minus = cells(&pieces, 0.0, split);
        let cells_plus = cells(&pieces, split, length);
        let boundary = BoundarySpaces::new(&sigma)?;
        Ok(Self {
            m,
            sigma,
            b,
            length,
            split,
            pieces,
            collar,
            product_form,
            cells_minus,
            cells_plus,
            boundary,
        })
    }

    /// `m = 2`, `sigma = [[0, -1], [1, 0]]`, `B = 0.3 diag(1, -1)`,
    /// `L = 2 pi`, split at `pi`, `C_t = 3 t chi Id` with `chi` the middle
    /// third of each arc.
    pub fn default_demo() -> Self {
        Self::bulk_shift(0.3, 3.0)
    }

    /// The demo geometry with `B = b diag(1, -1)` and `C_t = shift t chi Id`.
    pub fn bulk_shift(b: f64, shift: f64) -> Self {
        let pi = PI;
        let sigma = RMat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let bm = RMat::from_row_slice(2, 2, &[b, 0.0, 0.0, -b]);
        Self::new(sigma, bm, 2.0 * pi, pi, bulk_shift_pieces(2, 2.0 * pi, pi, shift), pi / 6.0, true)
            .expect("the demo family is valid")
    }

    pub fn fiber_dim(&self) -> usize {
        self.m
    }

    pub fn sigma(&self) -> &RMat {
        &self.sigma
    }

    pub fn b(&self) -> &RMat {
        &self.b
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn split(&self) -> f64 {
        self.split
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn collar(&self) -> f64 {
        self.collar
    }

    pub fn product_form(&self) -> bool {
        self.product_form
    }

    pub fn boundary(&self) -> &BoundarySpaces {
        &self.boundary
    }

    /// Same problem with `t -> C_{1-t}`.
    pub fn reversed(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                profile: p.profile.reversed(),
                ..p.clone()
            })
            .collect();
        Self::new(
            self.sigma.clone(),
            self.b.clone(),
            self.length,
            self.split,
            pieces,
            self.collar,
            self.product_form,
        )
        .expect("reversal keeps validity")
    }

    /// Same problem with `C = 0`.
    pub fn unperturbed(&self) -> Self {
        Self::new(
            self.sigma.clone(),
            self.b.clone(),
            self.length,
            self.split,
            Vec::new(),
            self.collar,
            self.product_form,
        )
        .expect("dropping the perturbation keeps validity")
    }

    fn arc_of(&self, tau: f64) -> Side {
        if tau < self.split {
            Side::Minus
        } else {
            Side::Plus
        }
    }

    fn param_for(&self, side: Side, params: Params) -> f64 {
        match side {
            Side::Minus => params.minus,
            _ => params.plus,
        }
    }

    /// `C(tau)` for the given arc parameters.
    pub fn perturbation(&self, params: Params, tau: f64) -> RMat {
        let t = self.param_for(self.arc_of(tau), params);
        let mut c = RMat::zeros(self.m, self.m);
        for p in &self.pieces {
            if p.start <= tau && tau < p.end {
                c += &p.matrix * p.profile.value(t);
            }
        }
        c
    }

    /// `d/dt C(tau)` on one arc.
    pub fn perturbation_rate(&self, side: Side, t: f64, tau: f64) -> RMat {
        let mut c = RMat::zeros(self.m, self.m);
        for p in &self.pieces {
            if p.start <= tau && tau < p.end && self.arc_of(p.start) == side {
                c += &p.matrix * p.profile.derivative(t);
            }
        }
        c
    }

    /// Upper bound on `sup_{t, tau in arc} |d/dt C|`.
    pub fn lipschitz(&self, side: Side) -> f64 {
        let cells: Vec<&Cell> = match side {
            Side::Minus => self.cells_minus.iter().collect(),
            Side::Plus => self.cells_plus.iter().collect(),
            Side::Circle => self.cells_minus.iter().chain(&self.cells_plus).collect(),
        };
        cells
            .iter()
            .map(|cell| {
                cell.pieces
                    .iter()
                    .map(|&k| self.pieces[k].profile.lipschitz() * linalg::norm2(&self.pieces[k].matrix))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// `-B + sigma (C - lambda)`, the generator of the transfer matrix.
    fn generator(&self, c: &RMat, lambda: f64) -> RMat {
        -&self.b + &self.sigma * (c - RMat::identity(self.m, self.m) * lambda)
    }

    /// Solution operator `u(end) = T u(start)` of the spectral ODE over the
    /// arc `side` (`Minus`: `[0, l]`, `Plus`: `[l, L]`, `Circle`: `[0, L]`).
    pub fn transfer_matrix(&self, side: Side, params: Params, lambda: f64) -> RMat {
        match side {
            Side::Minus => self.transfer_cells(&self.cells_minus, params.minus, lambda, None),
            Side::Plus => self.transfer_cells(&self.cells_plus, params.plus, lambda, None),
            Side::Circle => {
                self.transfer_matrix(Side::Plus, params, lambda) * self.transfer_matrix(Side::Minus, params, lambda)
            }
        }
    }

    /// Solution operator from `a` to `b` (`a <= b`, both in one arc).
    pub fn transfer_between(&self, params: Params, lambda: f64, a: f64, b: f64) -> Result<RMat> {
        if !(a <= b) {
            return Err(Error::InvalidProblem(format!("need a <= b, got [{a}, {b}]")));
        }
        let side = if b <= self.split {
            Side::Minus
        } else if a >= self.split && b <= self.length {
            Side::Plus
        } else {
            return Err(Error::InvalidProblem(format!("[{a}, {b}] is not inside one arc")));
        };
        let cells = if side == Side::Minus { &self.cells_minus } else { &self.cells_plus };
        Ok(self.transfer_cells(cells, self.param_for(side, params), lambda, Some((a, b))))
    }

    fn transfer_cells(&self, cells: &[Cell], t: f64, lambda: f64, range: Option<(f64, f64)>) -> RMat {
        let mut total = RMat::identity(self.m, self.m);
        for cell in cells {
            let (lo, hi) = match range {
                Some((a, b)) => (cell.start.max(a), cell.end.min(b)),
                None => (cell.start, cell.end),
            };
            if hi <= lo {
                continue;
            }
            let mut c = RMat::zeros(self.m, self.m);
            for &k in &cell.pieces {
                c += &self.pieces[k].matrix * self.pieces[k].profile.value(t);
            }
            let g = self.generator(&c, lambda) * (hi - lo);
            total = linalg::expm(&g) * total;
        }
        total
    }

    /// Breakpoints of `C` on an arc, including the arc ends.
    pub fn breakpoints(&self, side: Side) -> Vec<f64> {
        let cells = match side {
            Side::Minus => &self.cells_minus,
            _ => &self.cells_plus,
        };
        let mut pts: Vec<f64> = cells.iter().map(|c| c.start).collect();
        pts.push(cells.last().map(|c| c.end).unwrap_or(0.0));
        pts
    }
}

fn cells(pieces: &[Piece], a: f64, b: f64) -> Vec<Cell> {
    let mut cuts = vec![a, b];
    for p in pieces {
        for x in [p.start, p.end] {
            if a < x && x < b {
                cuts.push(x);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    cuts.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            Cell {
                start: w[0],
                end: w[1],
                pieces: pieces
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.start <= mid && mid < p.end)
                    .map(|(k, _)| k)
                    .collect(),
            }
        })
        .collect()
}

/// `shift * t * Id` on the middle third of each arc.
pub fn bulk_shift_pieces(m: usize, length: f64, split: f64, shift: f64) -> Vec<Piece> {
    let id = RMat::identity(m, m);
    let third = |a: f64, b: f64| (a + (b - a) / 3.0, a + 2.0 * (b - a) / 3.0);
    let (a1, b1) = third(0.0, split);
    let (a2, b2) = third(split, length);
    let profile = Profile::Linear { offset: 0.0, slope: shift };
    vec![
        Piece {
            start: a1,
            end: b1,
            matrix: id.clone(),
            profile,
        },
        Piece {
            start: a2,
            end: b2,
            matrix: id,
            profile,
        },
    ]
}

/// `A_{s,t}`: `A + C_s` on `M_-` and `A + C_t` on `M_+`.
#[derive(Clone, Debug)]
pub struct MixedOperator {
    problem: Arc<ModelProblem>,
    params: Params,
}

pub fn two_parameter_family(problem: &Arc<ModelProblem>, s: f64, t: f64) -> MixedOperator {
    MixedOperator {
        problem: problem.clone(),
        params: Params::new(s, t),
    }
}

impl MixedOperator {
    pub fn params(&self) -> Params {
        self.params
    }

    pub fn problem(&self) -> &Arc<ModelProblem> {
        &self.problem
    }

    /// The zeroth-order coefficient `C(tau)`.
    pub fn coefficient(&self, tau: f64) -> RMat {
        self.problem.perturbation(self.params, tau)
    }

    /// Spectrum on the closed circle.
    pub fn spectrum(&self, window: (f64, f64)) -> Result<SpectrumReport> {
        spectrum(&self.problem, Side::Circle, self.problem.boundary().delta(), self.params, window)
    }
}
