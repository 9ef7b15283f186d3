//! Spectral flow of boundary value problems by certified eigenvalue
//! tracking, and the Maslov index of the matching Cauchy data paths.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::boundary::cauchy_data_space;
use super::spectrum::{locate_roots, spectrum_with, SpectrumOptions, ZERO_SNAP};
use super::{ModelProblem, Params, Side};
use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::maslov::{self, SymmetricForm};
use crate::partition::{widest_gap_midpoint, CountChange};
use crate::path::{LagrangianPath, Path};
use crate::souriau;
use crate::symplectic::{self, Lagrangian, KERNEL_TOL};

/// How the arc parameters move with the family parameter `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamPath {
    /// `(t, t)`: the family `A + C_t`.
    Diagonal,
    /// `(t, plus)`.
    MinusMoves { plus: f64 },
    /// `(minus, t)`.
    PlusMoves { minus: f64 },
}

impl ParamPath {
    pub fn at(&self, t: f64) -> Params {
        match *self {
            ParamPath::Diagonal => Params::both(t),
            ParamPath::MinusMoves { plus } => Params::new(t, plus),
            ParamPath::PlusMoves { minus } => Params::new(minus, t),
        }
    }

    /// `(d minus / dt, d plus / dt)`.
    fn speeds(&self) -> (f64, f64) {
        match self {
            ParamPath::Diagonal => (1.0, 1.0),
            ParamPath::MinusMoves { .. } => (1.0, 0.0),
            ParamPath::PlusMoves { .. } => (0.0, 1.0),
        }
    }
}

/// A one-parameter family of self-adjoint operators `A + C` on `side`
/// with the fixed boundary condition `domain`, for `t` in `range`.
#[derive(Clone, Debug)]
pub struct Family {
    pub problem: Arc<ModelProblem>,
    pub side: Side,
    pub domain: Lagrangian,
    pub path: ParamPath,
    pub range: (f64, f64),
}

impl Family {
    /// `A + C_t` on the closed circle.
    pub fn circle(problem: &Arc<ModelProblem>) -> Self {
        Self::new(problem, Side::Circle, problem.boundary().delta().clone(), ParamPath::Diagonal)
    }

    /// `A_{s,0}`: `C_s` on `M_-`, `C_0` on `M_+`.
    pub fn first_leg(problem: &Arc<ModelProblem>) -> Self {
        Self::new(
            problem,
            Side::Circle,
            problem.boundary().delta().clone(),
            ParamPath::MinusMoves { plus: 0.0 },
        )
    }

    /// `A_{1,t}`: `C_1` on `M_-`, `C_t` on `M_+`.
    pub fn second_leg(problem: &Arc<ModelProblem>) -> Self {
        Self::new(
            problem,
            Side::Circle,
            problem.boundary().delta().clone(),
            ParamPath::PlusMoves { minus: 1.0 },
        )
    }

    /// `T^-_s`: `A + C_s` on `M_-` with traces in `l0`.
    pub fn minus_side(problem: &Arc<ModelProblem>, l0: &Lagrangian) -> Self {
        Self::new(problem, Side::Minus, l0.clone(), ParamPath::Diagonal)
    }

    /// `T^+_t`: `A + C_t` on `M_+` with traces in `l1`.
    pub fn plus_side(problem: &Arc<ModelProblem>, l1: &Lagrangian) -> Self {
        Self::new(problem, Side::Plus, l1.clone(), ParamPath::Diagonal)
    }

    pub fn new(problem: &Arc<ModelProblem>, side: Side, domain: Lagrangian, path: ParamPath) -> Self {
        Self {
            problem: problem.clone(),
            side,
            domain,
            path,
            range: (0.0, 1.0),
        }
    }

    pub fn restricted(&self, a: f64, b: f64) -> Self {
        Self {
            range: (a, b),
            ..self.clone()
        }
    }

    pub fn params(&self, t: f64) -> Params {
        self.path.at(t)
    }

    /// Bound on `|d/dt C|` as a multiplication operator on the family's arcs.
    pub fn lipschitz(&self) -> f64 {
        let (sm, sp) = self.path.speeds();
        match self.side {
            Side::Minus => sm * self.problem.lipschitz(Side::Minus),
            Side::Plus => sp * self.problem.lipschitz(Side::Plus),
            Side::Circle => (sm * self.problem.lipschitz(Side::Minus)).max(sp * self.problem.lipschitz(Side::Plus)),
        }
    }

    /// `t -> Lambda(params(t), 0)` over the unit interval mapped onto `range`.
    pub fn cauchy_path(&self) -> LagrangianPath {
        let family = self.clone();
        Path::new(move |s: f64| family.cauchy_at(family.t_of(s)))
    }

    fn t_of(&self, s: f64) -> f64 {
        self.range.0 + (self.range.1 - self.range.0) * s
    }

    fn cauchy_at(&self, t: f64) -> Result<Lagrangian> {
        cauchy_data_space(&self.problem, self.side, self.params(t), 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    /// Initial half-width of the spectral window tracked around zero.
    pub window: f64,
    /// Upper bound for the counting edge `eps`.
    pub epsilon_cap: f64,
    /// Largest step in `t`.
    pub max_step: f64,
    /// Grid of the spectral scans inside the window.
    pub grid: usize,
    /// Maximum number of spectra computed.
    pub budget: usize,
    /// Keep the tracked eigenvalues for a trace.
    pub trace: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            window: 2.0,
            epsilon_cap: 1.0,
            max_step: 1.0 / 16.0,
            grid: 201,
            budget: 4096,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub spectral_flow: i64,
    pub changes: Vec<CountChange>,
    pub steps: usize,
    /// `(t, eigenvalues in the window)` at every accepted grid point.
    pub trace: Vec<(f64, Vec<f64>)>,
}

/// `Sf` of the family by Phillips' definition with certified steps: for the
/// edge `eps` chosen at `t`, a step `h` with `Lip * h < clearance / 2`
/// cannot move any eigenvalue across `eps` (Weyl), so the count change over
/// the step is exact.
pub fn spectral_flow_bvp(family: &Family) -> Result<i64> {
    Ok(spectral_flow_bvp_with(family, &FlowOptions::default())?.spectral_flow)
}

pub fn spectral_flow_bvp_with(family: &Family, opts: &FlowOptions) -> Result<FlowReport> {
    let lip = family.lipschitz();
    let (t0, t1) = family.range;
    let mut tracker = Tracker {
        family,
        opts,
        half_width: opts.window,
        spectra: 0,
    };
    let mut t = t0;
    let mut values = tracker.values(t)?;
    let mut trace = Vec::new();
    if opts.trace {
        trace.push((t, values.clone()));
    }
    let mut total = 0;
    let mut changes = Vec::new();
    let mut steps = 0;
    while t < t1 {
        let eps = widest_gap_midpoint(values.iter().cloned(), ZERO_SNAP, opts.epsilon_cap);
        let clearance = values
            .iter()
            .map(|v| (v - eps).abs())
            .fold(tracker.half_width - eps, f64::min);
        let h = if lip == 0.0 {
            t1 - t
        } else {
            (0.5 * clearance / lip).min(opts.max_step)
        };
        if h < 1e-10 {
            return Err(Error::Discontinuous(t));
        }
        let next = if t + h >= t1 - 1e-14 { t1 } else { t + h };
        let next_values = tracker.values(next)?;
        let change = count(&next_values, eps) as i64 - count(&values, eps) as i64;
        if change != 0 {
            changes.push(CountChange { t0: t, t1: next, change });
        }
        total += change;
        steps += 1;
        t = next;
        values = next_values;
        if opts.trace {
            trace.push((t, values.clone()));
        }
    }
    Ok(FlowReport {
        spectral_flow: total,
        changes,
        steps,
        trace,
    })
}

fn count(values: &[f64], eps: f64) -> usize {
    values.iter().filter(|&&v| v.abs() < ZERO_SNAP || (v >= 0.0 && v < eps)).count()
}

struct Tracker<'a> {
    family: &'a Family,
    opts: &'a FlowOptions,
    half_width: f64,
    spectra: usize,
}

impl Tracker<'_> {
    /// Eigenvalues (with multiplicity) in the current window, widening the
    /// window when an edge hits the spectrum.
    fn values(&mut self, t: f64) -> Result<Vec<f64>> {
        for _ in 0..16 {
            self.spectra += 1;
            if self.spectra > self.opts.budget {
                return Err(Error::RefinementBudget(self.opts.budget));
            }
            let spec = SpectrumOptions {
                window: (-self.half_width, self.half_width),
                grid: self.opts.grid,
                root_tol: 1e-12,
                certify: false,
            };
            let f = self.family;
            match spectrum_with(&f.problem, f.side, &f.domain, f.params(t), &spec) {
                Ok(report) => return Ok(report.values()),
                Err(Error::WindowEdge(_)) => self.half_width *= 1.07,
                Err(e) => return Err(e),
            }
        }
        Err(Error::WindowEdge(self.half_width))
    }
}

/// `Mas({Lambda_t}, domain)` for the family's Cauchy data path.
pub fn maslov_side(family: &Family) -> Result<i64> {
    maslov::maslov_index(&family.cauchy_path(), &family.domain)
}

/// Parameters `t*` in the family's range where the operator has a kernel,
/// with the dimension of the kernel.
pub fn crossing_times(family: &Family, grid: usize) -> Result<Vec<(f64, usize)>> {
    let w = |t: f64| souriau::souriau_matrix(&family.domain, &family.cauchy_at(t)?);
    let (a, b) = family.range;
    let roots = locate_roots(&w, a, b, grid, 1e-12)?;
    Ok(roots.into_iter().map(|r| (r.x, r.count)).collect())
}

/// The crossing form of the family at `t*`: `Q(u, v) = <u, (d/dt C) v>` on
/// the kernel of the operator, by Gauss-Legendre quadrature over the
/// pieces. The carrier is the space of boundary traces of the kernel.
pub fn kernel_form(family: &Family, t_star: f64) -> Result<SymmetricForm> {
    let problem = &family.problem;
    let m = problem.fiber_dim();
    let params = family.params(t_star);
    let cauchy = family.cauchy_at(t_star)?;
    let traces = symplectic::intersection_basis(&cauchy, &family.domain, KERNEL_TOL)?;
    let k = traces.ncols();
    if k == 0 {
        return Err(Error::InvalidProblem(format!("the operator at t = {t_star} is invertible")));
    }
    let (sm, sp) = family.path.speeds();
    // (arc, first trace row of the initial value, start of the arc, speed)
    let arcs: Vec<(Side, usize, f64, f64)> = match family.side {
        Side::Minus => vec![(Side::Minus, 0, 0.0, sm)],
        Side::Plus => vec![(Side::Plus, m, problem.split(), sp)],
        Side::Circle => vec![(Side::Minus, 0, 0.0, sm), (Side::Plus, 3 * m, problem.split(), sp)],
    };
    let (nodes, weights) = linalg::gauss_legendre(16);
    let mut q = RMat::zeros(k, k);
    for (arc, row, start, speed) in arcs {
        if speed == 0.0 {
            continue;
        }
        let initial = traces.rows(row, m).into_owned();
        let t_arc = if arc == Side::Minus { params.minus } else { params.plus };
        let cuts = problem.breakpoints(arc);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let rate = problem.perturbation_rate(arc, t_arc, 0.5 * (a + b)) * speed;
            if rate.amax() == 0.0 {
                continue;
            }
            for (x, wt) in nodes.iter().zip(&weights) {
                let tau = 0.5 * (a + b) + 0.5 * (b - a) * x;
                let u = problem.transfer_between(params, 0.0, start, tau)? * &initial;
                q += (u.transpose() * &rate * &u) * (0.5 * (b - a) * wt);
            }
        }
    }
    let scale = linalg::max_abs(&q).max(f64::MIN_POSITIVE);
    Ok(SymmetricForm::from_real(&traces, &linalg::symmetric_part(&q), scale))
}
