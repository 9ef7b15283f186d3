//! Continuous paths on `[0, 1]`, given by an evaluator closure.
//!
//! A path never stores samples; index computations evaluate it wherever
//! their adaptive partition needs to. Evaluators must be reentrant.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::RMat;
use crate::symplectic::{ComplexUnitary, Lagrangian};

type Evaluator<P> = Arc<dyn Fn(f64) -> Result<P> + Send + Sync>;

pub struct Path<P> {
    f: Evaluator<P>,
}

pub type UnitaryPath = Path<ComplexUnitary>;
pub type LagrangianPath = Path<Lagrangian>;
/// A path of real symmetric matrices.
pub type OperatorPath = Path<RMat>;

impl<P> Clone for Path<P> {
    fn clone(&self) -> Self {
        Self { f: self.f.clone() }
    }
}

impl<P> fmt::Debug for Path<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Path(..)")
    }
}

impl<P: 'static> Path<P> {
    pub fn new(f: impl Fn(f64) -> Result<P> + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    /// A path whose evaluator cannot fail.
    pub fn from_fn(f: impl Fn(f64) -> P + Send + Sync + 'static) -> Self {
        Self::new(move |t| Ok(f(t)))
    }

    pub fn constant(p: P) -> Self
    where
        P: Clone + Send + Sync,
    {
        Self::from_fn(move |_| p.clone())
    }

    pub fn eval(&self, t: f64) -> Result<P> {
        if !(-1e-12..=1.0 + 1e-12).contains(&t) || t.is_nan() {
            return Err(Error::Spec(format!("path parameter {t} outside [0, 1]")));
        }
        (self.f)(t.clamp(0.0, 1.0))
    }

    /// Runs `self` on `[0, 1/2]` and `next` on `[1/2, 1]`.
    pub fn catenate(&self, next: &Path<P>) -> Path<P> {
        let a = self.f.clone();
        let b = next.f.clone();
        Path::new(move |t| if t <= 0.5 { a(2.0 * t) } else { b(2.0 * t - 1.0) })
    }

    pub fn reversed(&self) -> Path<P> {
        let f = self.f.clone();
        Path::new(move |t| f(1.0 - t))
    }

    /// `t -> self(g(t))`; `g` should map `[0, 1]` into itself.
    pub fn reparametrize(&self, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Path<P> {
        let f = self.f.clone();
        Path::new(move |t| f(g(t).clamp(0.0, 1.0)))
    }

    /// The piece over `[a, b]`, rescaled to `[0, 1]`.
    pub fn restrict(&self, a: f64, b: f64) -> Path<P> {
        let f = self.f.clone();
        Path::new(move |t| f((a + (b - a) * t).clamp(0.0, 1.0)))
    }

    pub fn map<Q: 'static>(&self, g: impl Fn(P) -> Result<Q> + Send + Sync + 'static) -> Path<Q> {
        let f = self.f.clone();
        Path::new(move |t| g(f(t)?))
    }
}

/// Pairs two paths sampled at the same parameter.
pub fn zip<P: 'static, Q: 'static>(a: &Path<P>, b: &Path<Q>) -> Path<(P, Q)> {
    let fa = a.f.clone();
    let fb = b.f.clone();
    Path::new(move |t| Ok((fa(t)?, fb(t)?)))
}

/// Piecewise-linear interpolation of a matrix-valued sample list.
/// Sample parameters must be strictly increasing and span `[0, 1]`.
pub fn interpolate_samples(samples: Vec<(f64, RMat)>) -> Result<OperatorPath> {
    validate_grid(samples.iter().map(|s| s.0))?;
    let shape = samples[0].1.shape();
    if samples.iter().any(|s| s.1.shape() != shape) {
        return Err(Error::Spec("samples have different shapes".into()));
    }
    let samples = Arc::new(samples);
    Ok(Path::from_fn(move |t| {
        let k = samples.partition_point(|s| s.0 <= t).clamp(1, samples.len() - 1);
        let (t0, m0) = &samples[k - 1];
        let (t1, m1) = &samples[k];
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        m0 * (1.0 - w) + m1 * w
    }))
}

pub(crate) fn validate_grid(ts: impl Iterator<Item = f64>) -> Result<()> {
    let ts: Vec<f64> = ts.collect();
    if ts.len() < 2 {
        return Err(Error::Spec("a sampled path needs at least two samples".into()));
    }
    if ts[0].abs() > 1e-12 || (ts[ts.len() - 1] - 1.0).abs() > 1e-12 {
        return Err(Error::Spec("sample parameters must start at 0 and end at 1".into()));
    }
    if ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Spec("sample parameters must be strictly increasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catenation_and_restriction() {
        let p = Path::from_fn(|t| t);
        let q = Path::from_fn(|t| 1.0 + t);
        let pq = p.catenate(&q);
        assert_eq!(pq.eval(0.25).unwrap(), 0.5);
        assert_eq!(pq.eval(0.75).unwrap(), 1.5);
        assert_eq!(p.restrict(0.5, 1.0).eval(0.5).unwrap(), 0.75);
        assert_eq!(p.reversed().eval(0.2).unwrap(), 0.8);
        assert!(p.eval(1.5).is_err());
    }

    #[test]
    fn sample_interpolation() {
        let path = interpolate_samples(vec![
            (0.0, RMat::from_element(1, 1, 0.0)),
            (0.5, RMat::from_element(1, 1, 1.0)),
            (1.0, RMat::from_element(1, 1, -1.0)),
        ])
        .unwrap();
        assert!((path.eval(0.25).unwrap()[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((path.eval(0.75).unwrap()[(0, 0)]).abs() < 1e-15);
        assert!((path.eval(1.0).unwrap()[(0, 0)] + 1.0).abs() < 1e-15);
        assert!(interpolate_samples(vec![(0.0, RMat::zeros(1, 1))]).is_err());
    }
}
