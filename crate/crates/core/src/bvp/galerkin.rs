//! Galerkin discretization of `A + C` on the closed circle in the
//! trigonometric basis `1, cos(w_k tau), sin(w_k tau)`, `w_k = 2 pi k / L`.
//!
//! All matrix entries are exact: the derivative acts diagonally on the
//! basis, `sigma B` is constant, and the perturbation pieces are constant
//! on intervals, so their Gram matrices are closed-form trigonometric
//! integrals.

use super::{ModelProblem, Params, Side};
use crate::error::{Error, Result};
use crate::linalg::{self, RMat};

/// Number of scalar basis functions: the constant and 200 cosine/sine pairs.
pub const GALERKIN_MODES: usize = 401;

/// Eigenvalues of the discretization within this distance of zero are
/// treated as zero when counting negative eigenvalues.
pub const ZERO_BAND: f64 = 1e-4;

#[derive(Clone, Copy, Debug)]
enum Trig {
    Cos,
    Sin,
}

/// `amplitude * trig(freq * tau)`.
#[derive(Clone, Copy, Debug)]
struct Mode {
    trig: Trig,
    freq: f64,
    amplitude: f64,
}

/// `int_a^b trig(w tau) dtau`.
fn integral(trig: Trig, w: f64, a: f64, b: f64) -> f64 {
    match trig {
        Trig::Cos if w == 0.0 => b - a,
        Trig::Cos => ((w * b).sin() - (w * a).sin()) / w,
        Trig::Sin if w == 0.0 => 0.0,
        Trig::Sin => ((w * a).cos() - (w * b).cos()) / w,
    }
}

/// `int_a^b f g dtau` for two modes, via product-to-sum identities.
fn product_integral(f: Mode, g: Mode, a: f64, b: f64) -> f64 {
    let (p, q) = (f.freq, g.freq);
    let half = 0.5 * f.amplitude * g.amplitude;
    let value = match (f.trig, g.trig) {
        (Trig::Cos, Trig::Cos) => integral(Trig::Cos, p - q, a, b) + integral(Trig::Cos, p + q, a, b),
        (Trig::Sin, Trig::Sin) => integral(Trig::Cos, p - q, a, b) - integral(Trig::Cos, p + q, a, b),
        // sin(p) cos(q) = (sin(p + q) + sin(p - q)) / 2
        (Trig::Sin, Trig::Cos) => integral(Trig::Sin, p + q, a, b) + integral(Trig::Sin, p - q, a, b),
        (Trig::Cos, Trig::Sin) => integral(Trig::Sin, q + p, a, b) + integral(Trig::Sin, q - p, a, b),
    };
    half * value
}

#[derive(Clone, Debug)]
pub struct GalerkinOracle {
    problem: ModelProblem,
    modes: usize,
    /// `sigma d/dtau + sigma B` in the basis.
    base: RMat,
    /// `Gram(piece) ⊗ matrix` for every perturbation piece.
    pieces: Vec<RMat>,
}

impl GalerkinOracle {
    /// `modes` must be odd: the constant plus `(modes - 1) / 2` pairs.
    pub fn new(problem: &ModelProblem, modes: usize) -> Result<Self> {
        if modes % 2 == 0 {
            return Err(Error::InvalidProblem(format!("Galerkin mode count must be odd, got {modes}")));
        }
        let m = problem.fiber_dim();
        let l = problem.length();
        let basis: Vec<Mode> = (0..modes)
            .map(|f| {
                if f == 0 {
                    Mode {
                        trig: Trig::Cos,
                        freq: 0.0,
                        amplitude: (1.0 / l).sqrt(),
                    }
                } else {
                    let k = f.div_ceil(2);
                    Mode {
                        trig: if f % 2 == 1 { Trig::Cos } else { Trig::Sin },
                        freq: 2.0 * std::f64::consts::PI * k as f64 / l,
                        amplitude: (2.0 / l).sqrt(),
                    }
                }
            })
            .collect();
        let n = modes * m;
        let sigma = problem.sigma();
        let sigma_b = sigma * problem.b();
        let mut base = RMat::zeros(n, n);
        for f in 0..modes {
            base.view_mut((f * m, f * m), (m, m)).copy_from(&sigma_b);
        }
        for k in 1..=(modes - 1) / 2 {
            let w = basis[2 * k - 1].freq;
            let (c, s) = (2 * k - 1, 2 * k);
            // <cos, (sin)'> = w and <sin, (cos)'> = -w
            base.view_mut((c * m, s * m), (m, m)).copy_from(&(sigma * w));
            base.view_mut((s * m, c * m), (m, m)).copy_from(&(sigma * -w));
        }
        let pieces = problem
            .pieces()
            .iter()
            .map(|piece| {
                let mut gram = RMat::zeros(modes, modes);
                for f in 0..modes {
                    for g in f..modes {
                        let v = product_integral(basis[f], basis[g], piece.start, piece.end);
                        gram[(f, g)] = v;
                        gram[(g, f)] = v;
                    }
                }
                gram.kronecker(&piece.matrix)
            })
            .collect();
        Ok(Self {
            problem: problem.clone(),
            modes,
            base,
            pieces,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self, params: Params) -> RMat {
        let mut a = self.base.clone();
        for (piece, block) in self.problem.pieces().iter().zip(&self.pieces) {
            let side = if piece.start < self.problem.split() { Side::Minus } else { Side::Plus };
            let t = if side == Side::Minus { params.minus } else { params.plus };
            let c = piece.profile.value(t);
            if c != 0.0 {
                a += block * c;
            }
        }
        linalg::symmetric_part(&a)
    }

    /// Sorted eigenvalues of the discretization.
    pub fn eigenvalues(&self, params: Params) -> Vec<f64> {
        linalg::symmetric_eigenvalues(&self.matrix(params))
    }

    pub fn eigenvalues_in(&self, params: Params, window: (f64, f64)) -> Vec<f64> {
        self.eigenvalues(params)
            .into_iter()
            .filter(|v| window.0 <= *v && *v <= window.1)
            .collect()
    }

    pub fn negative_count(&self, params: Params) -> usize {
        self.eigenvalues(params).iter().filter(|v| **v < -ZERO_BAND).count()
    }

    /// `neg(A + C_0) - neg(A + C_1)` of the discretization.
    pub fn spectral_flow(&self) -> i64 {
        self.negative_count(Params::both(0.0)) as i64 - self.negative_count(Params::both(1.0)) as i64
    }
}
