//! Adaptive partition engine shared by the index `M` of unitary paths and
//! the spectral flow of self-adjoint paths.
//!
//! Both are sums over a partition `0 = t_0 < .. < t_N = 1` of
//! `k(t_j, eps_j) - k(t_{j-1}, eps_j)`, where `k(t, eps)` counts spectrum in
//! a window whose far edge `eps_j` must stay clear of the spectrum along the
//! whole segment. The engine picks `eps_j` at the left end of each segment
//! and accepts the segment only while the operator has moved by less than
//! half the clearance of that edge (Weyl / Bauer-Fike), checked at the
//! midpoint and the right end.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexOptions {
    /// Largest admissible segment length.
    pub max_step: f64,
    /// Segment length tried first.
    pub initial_step: f64,
    /// Below this segment length the path is declared discontinuous.
    pub min_step: f64,
    /// Upper bound for the window edge `eps_j`.
    pub epsilon_cap: f64,
    /// Maximum number of evaluator calls.
    pub budget: usize,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self {
            max_step: 0.25,
            initial_step: 1.0 / 64.0,
            min_step: 1e-12,
            epsilon_cap: f64::NAN,
            budget: 1 << 20,
        }
    }
}

impl IndexOptions {
    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self.initial_step = self.initial_step.min(h);
        self
    }

    pub fn with_epsilon_cap(mut self, cap: f64) -> Self {
        self.epsilon_cap = cap;
        self
    }
}

/// A segment of the partition on which the count changed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountChange {
    pub t0: f64,
    pub t1: f64,
    pub change: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub index: i64,
    pub changes: Vec<CountChange>,
    pub segments: usize,
    pub evaluations: usize,
}

pub(crate) struct Window {
    pub eps: f64,
    /// Distance from the edge `eps` to the spectrum, in the same units as
    /// [`Counter::motion`].
    pub clearance: f64,
}

pub(crate) trait Counter {
    type State;
    fn sample(&self, t: f64) -> Result<Self::State>;
    /// Upper bound on how far any spectral point can have moved between
    /// two samples.
    fn motion(&self, a: &Self::State, b: &Self::State) -> f64;
    fn window(&self, s: &Self::State, cap: f64) -> Window;
    fn count(&self, s: &Self::State, eps: f64) -> usize;
    fn default_cap(&self) -> f64;
}

/// Midpoint of the widest gap between consecutive points of
/// `{0} ∪ {p in points : tol < p < cap} ∪ {cap}`.
pub(crate) fn widest_gap_midpoint(points: impl Iterator<Item = f64>, tol: f64, cap: f64) -> f64 {
    let mut marks: Vec<f64> = std::iter::once(0.0)
        .chain(points.filter(|p| *p > tol && *p < cap))
        .chain(std::iter::once(cap))
        .collect();
    marks.sort_by(f64::total_cmp);
    let mut best = (0.0, cap / 2.0);
    for w in marks.windows(2) {
        let gap = w[1] - w[0];
        if gap > best.0 {
            best = (gap, 0.5 * (w[0] + w[1]));
        }
    }
    best.1
}

pub(crate) fn run<C: Counter>(counter: &C, opts: &IndexOptions) -> Result<IndexReport> {
    let cap = if opts.epsilon_cap.is_nan() {
        counter.default_cap()
    } else {
        opts.epsilon_cap.min(counter.default_cap())
    };
    let mut evaluations = 1;
    let mut a = 0.0;
    let mut state_a = counter.sample(0.0)?;
    let mut h = opts.initial_step.min(opts.max_step);
    let mut index = 0i64;
    let mut changes = Vec::new();
    let mut segments = 0;
    while a < 1.0 {
        let b = if a + h >= 1.0 - 1e-14 { 1.0 } else { a + h };
        let window = counter.window(&state_a, cap);
        let limit = 0.5 * window.clearance;
        evaluations += 2;
        if evaluations > opts.budget {
            return Err(Error::RefinementBudget(opts.budget));
        }
        let state_mid = counter.sample(0.5 * (a + b))?;
        let state_b = counter.sample(b)?;
        if counter.motion(&state_a, &state_mid) < limit && counter.motion(&state_a, &state_b) < limit {
            let change = counter.count(&state_b, window.eps) as i64 - counter.count(&state_a, window.eps) as i64;
            if change != 0 {
                changes.push(CountChange { t0: a, t1: b, change });
            }
            index += change;
            segments += 1;
            a = b;
            state_a = state_b;
            h = (2.0 * h).min(opts.max_step);
        } else {
            h *= 0.5;
            if h < opts.min_step {
                return Err(Error::Discontinuous(a));
            }
        }
    }
    Ok(IndexReport {
        index,
        changes,
        segments,
        evaluations,
    })
}
