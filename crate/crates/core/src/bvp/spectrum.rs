//! Eigenvalues of `A + C` under a Lagrangian boundary condition `l`.
//!
//! `lambda` is an eigenvalue exactly when the Cauchy data space at spectral
//! parameter `lambda` meets `l`, i.e. when `S_l(Lambda(lambda))` has `-1` as
//! an eigenvalue. The path `lambda -> Lambda(lambda)` is definite, so every
//! eigenphase passes `-1` in the same direction and the partition engine's
//! count over a `lambda`-cell is the number of eigenvalues in it.

use serde::{Deserialize, Serialize};

use super::boundary::cauchy_data_space;
use super::{ModelProblem, Params, Side};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::maslov::{self, offset_from_minus_one};
use crate::partition::IndexOptions;
use crate::souriau;
use crate::symplectic::{self, Lagrangian};

/// Eigenvalues closer than this to zero are reported as zero.
pub const ZERO_SNAP: f64 = 1e-9;
/// Brackets narrower than this (in the spectral parameter) stop splitting.
const SEPARATION: f64 = 1e-6;
/// A window edge whose eigenphase offset is below this is an eigenvalue.
const EDGE_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub window: (f64, f64),
    /// Number of uniform grid points across the window.
    pub grid: usize,
    /// Final bracket width of each root.
    pub root_tol: f64,
    /// Also evaluate the Evans determinant on the grid (certification
    /// margin and trace).
    pub certify: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            window: (-3.5, 3.5),
            grid: 2001,
            root_tol: 1e-12,
            certify: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueEntry {
    pub value: f64,
    pub multiplicity: usize,
    /// `dim(Lambda(value) ∩ l)` at the located root.
    pub intersection_dim: usize,
    /// The Evans determinant changes sign across the bracket exactly when
    /// the multiplicity is odd.
    pub parity_consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub window: (f64, f64),
    pub eigenvalues: Vec<EigenvalueEntry>,
    /// `(lambda, det)` on the grid; empty unless certification was requested.
    pub evans_trace: Vec<(f64, f64)>,
    /// Smallest `|det|` on grid points away from the roots.
    pub certification_margin: f64,
}

impl SpectrumReport {
    /// Eigenvalues repeated according to multiplicity.
    pub fn values(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .flat_map(|e| std::iter::repeat(e.value).take(e.multiplicity))
            .collect()
    }

    pub fn count(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }
}

/// `det[G(lambda) | F_l]` for the orthonormalized Cauchy data frame `G` and
/// the frame `F_l` of the boundary condition.
pub fn evans_determinant(
    problem: &ModelProblem,
    side: Side,
    domain: &Lagrangian,
    params: Params,
    lambda: f64,
) -> Result<f64> {
    let cauchy = cauchy_data_space(problem, side, params, lambda)?;
    Ok(linalg::hstack(cauchy.frame(), domain.frame()).determinant())
}

pub fn spectrum(problem: &ModelProblem, side: Side, domain: &Lagrangian, params: Params, window: (f64, f64)) -> Result<SpectrumReport> {
    spectrum_with(
        problem,
        side,
        domain,
        params,
        &SpectrumOptions {
            window,
            ..SpectrumOptions::default()
        },
    )
}

pub fn spectrum_with(
    problem: &ModelProblem,
    side: Side,
    domain: &Lagrangian,
    params: Params,
    opts: &SpectrumOptions,
) -> Result<SpectrumReport> {
    let space = problem.boundary().space(side);
    if **domain.space() != **space {
        return Err(Error::SpaceMismatch);
    }
    let (lo, hi) = opts.window;
    if !(lo < hi) || opts.grid < 2 {
        return Err(Error::InvalidProblem(format!(
            "window [{lo}, {hi}] with {} grid points is empty",
            opts.grid
        )));
    }
    let w = |lambda: f64| souriau::souriau_matrix(domain, &cauchy_data_space(problem, side, params, lambda)?);
    for edge in [lo, hi] {
        let offsets = offsets(&w(edge)?);
        if offsets.iter().any(|o| o.abs() < EDGE_TOL) {
            return Err(Error::WindowEdge(edge));
        }
    }
    let roots = locate_roots(&w, lo, hi, opts.grid, opts.root_tol)?;
    if let Some(first) = roots.first() {
        if roots.iter().any(|r| r.direction != first.direction) {
            return Err(Error::RootIsolation(first.x));
        }
    }
    let evans = |lambda: f64| evans_determinant(problem, side, domain, params, lambda);
    let mut eigenvalues = Vec::with_capacity(roots.len());
    for r in &roots {
        let at_root = cauchy_data_space(problem, side, params, r.x)?;
        let intersection_dim = symplectic::intersection_dim_tol(&at_root, domain, 1e-6)?;
        let (a, b) = r.bracket;
        let flips = evans(a)?.signum() != evans(b)?.signum();
        eigenvalues.push(EigenvalueEntry {
            value: if r.x.abs() < ZERO_SNAP { 0.0 } else { r.x },
            multiplicity: r.count,
            intersection_dim,
            parity_consistent: flips == (r.count % 2 == 1),
        });
    }
    let mut evans_trace = Vec::new();
    let mut certification_margin = f64::INFINITY;
    if opts.certify {
        let step = (hi - lo) / (opts.grid - 1) as f64;
        for k in 0..opts.grid {
            let lambda = lo + step * k as f64;
            let d = evans(lambda)?;
            evans_trace.push((lambda, d));
            if roots.iter().all(|r| (r.x - lambda).abs() > 2.0 * step) {
                certification_margin = certification_margin.min(d.abs());
            }
        }
    }
    Ok(SpectrumReport {
        window: opts.window,
        eigenvalues,
        evans_trace,
        certification_margin,
    })
}

fn offsets(w: &CMat) -> Vec<f64> {
    let (values, _) = linalg::normal_eigen(w);
    values.into_iter().map(offset_from_minus_one).collect()
}

/// A group of eigenphase crossings of `-1` located to `root_tol`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Root {
    pub x: f64,
    pub count: usize,
    /// Sign of the count change (+1: eigenphases cross `-1` counterclockwise).
    pub direction: i64,
    pub bracket: (f64, f64),
}

/// Crossings of `-1` by the eigenphases of the unitary family `w` on
/// `[lo, hi]`. Cells of the partition engine that change the count are
/// split by bisection until they are narrower than `SEPARATION`; each group
/// is then refined on the mean offset of its crossing eigenphases.
pub(crate) fn locate_roots(
    w: &dyn Fn(f64) -> Result<CMat>,
    lo: f64,
    hi: f64,
    grid: usize,
    root_tol: f64,
) -> Result<Vec<Root>> {
    let x = |s: f64| lo + (hi - lo) * s;
    let base = IndexOptions::default();
    let opts = IndexOptions {
        max_step: 1.0 / (grid.max(2) - 1) as f64,
        initial_step: 1.0 / (grid.max(2) - 1) as f64,
        ..base
    };
    let report = maslov::index_of_matrices(|s| w(x(s)), &opts)?;
    let sub = |a: f64, b: f64| -> Result<i64> {
        let opts = IndexOptions {
            max_step: 1.0,
            initial_step: 1.0,
            ..base
        };
        Ok(maslov::index_of_matrices(|s| w(x(a + (b - a) * s)), &opts)?.index)
    };
    let mut groups = Vec::new();
    for change in &report.changes {
        split(&sub, change.t0, change.t1, change.change, (hi - lo).abs(), &mut groups)?;
    }
    let mut roots = Vec::with_capacity(groups.len());
    for (a, b, c) in groups {
        let a = x(a).max(lo.min(hi)) - SEPARATION * 1e-2;
        let b = x(b) + SEPARATION * 1e-2;
        let (a, b) = (a.max(lo), b.min(hi));
        roots.push(refine(w, a, b, c, root_tol)?);
    }
    roots.sort_by(|p, q| p.x.total_cmp(&q.x));
    Ok(roots)
}

fn split(
    sub: &dyn Fn(f64, f64) -> Result<i64>,
    a: f64,
    b: f64,
    change: i64,
    scale: f64,
    out: &mut Vec<(f64, f64, i64)>,
) -> Result<()> {
    if change == 0 {
        return Ok(());
    }
    if (b - a) * scale < SEPARATION {
        out.push((a, b, change));
        return Ok(());
    }
    let mid = 0.5 * (a + b);
    let left = sub(a, mid)?;
    split(sub, a, mid, left, scale, out)?;
    split(sub, mid, b, change - left, scale, out)
}

/// Bisection on the mean offset of the `|c|` eigenphases closest to `-1`.
fn refine(w: &dyn Fn(f64) -> Result<CMat>, mut a: f64, mut b: f64, c: i64, root_tol: f64) -> Result<Root> {
    let k = c.unsigned_abs() as usize;
    let bracket = (a, b);
    let mean = |x: f64| -> Result<f64> {
        let mut o = offsets(&w(x)?);
        o.sort_by(|p, q| p.abs().total_cmp(&q.abs()));
        Ok(o.iter().take(k).sum::<f64>() / k as f64)
    };
    let mut fa = mean(a)?;
    let fb = mean(b)?;
    let done = |x: f64| Root {
        x,
        count: k,
        direction: c.signum(),
        bracket,
    };
    if fa == 0.0 {
        return Ok(done(a));
    }
    if fb == 0.0 {
        return Ok(done(b));
    }
    if fa.signum() == fb.signum() {
        // The crossing sits at a clamped end of the range.
        return Ok(done(if fa.abs() < fb.abs() { a } else { b }));
    }
    let mut iterations = 0;
    while b - a > root_tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = mean(mid)?;
        if fm == 0.0 {
            return Ok(done(mid));
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        iterations += 1;
        if iterations > 200 {
            return Err(Error::RootIsolation(mid));
        }
    }
    Ok(done(0.5 * (a + b)))
}
