//! Serializable descriptions of Lagrangian and operator paths, shared by
//! the command-line front end and the browser demo.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::path::{self, LagrangianPath, OperatorPath, Path};
use crate::random;
use crate::symplectic::{
    lagrangian_from_unitary, reference_lagrangian, standard_space, unitary_of_lagrangian, ComplexUnitary, Lagrangian,
    MatrixJson, SymplecticSpace,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSample {
    pub t: f64,
    pub frame: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSample {
    pub t: f64,
    pub matrix: MatrixJson,
}

/// A path of Lagrangians in the standard space `R^{2n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LagrangianPathSpec {
    Constant {
        frame: MatrixJson,
    },
    /// The line at angle `start_angle + pi * half_turns * t` in the first
    /// plane, direct sum with the vertical Lagrangian in `extra_dims`
    /// further planes.
    RotatingLine {
        #[serde(default = "half_pi")]
        start_angle: f64,
        #[serde(default = "one")]
        half_turns: f64,
        #[serde(default)]
        extra_dims: usize,
    },
    /// Frames at increasing parameters from 0 to 1, joined by geodesics of
    /// their unitary lifts.
    Samples {
        samples: Vec<FrameSample>,
    },
    /// A smooth random path drawn from the run seed.
    Random {
        half_dim: usize,
        #[serde(default = "default_speed")]
        speed: f64,
    },
}

fn default_speed() -> f64 {
    3.0
}

fn half_pi() -> f64 {
    PI / 2.0
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedLagrangian {
    /// The horizontal Lagrangian `R^n x 0`.
    Reference,
    /// The vertical Lagrangian `0 x R^n`.
    Perp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LagrangianSpec {
    Named(NamedLagrangian),
    Frame(MatrixJson),
}

impl Default for LagrangianSpec {
    fn default() -> Self {
        LagrangianSpec::Named(NamedLagrangian::Reference)
    }
}

/// Input of a Maslov index computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaslovInput {
    pub path: LagrangianPathSpec,
    #[serde(default)]
    pub lambda: LagrangianSpec,
}

/// A path of real symmetric matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorPathSpec {
    Constant { matrix: MatrixJson },
    /// `(1 - t) start + t end`.
    Linear { start: MatrixJson, end: MatrixJson },
    /// Piecewise-linear interpolation of samples.
    Samples { samples: Vec<MatrixSample> },
    /// A smooth random path of `dim x dim` matrices drawn from the run seed.
    Random { dim: usize },
}

/// Input of a spectral flow computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralFlowInput {
    pub path: OperatorPathSpec,
}

fn frame_dim(frame: &RMat) -> Result<usize> {
    if frame.nrows() % 2 != 0 || frame.nrows() == 0 {
        return Err(Error::Spec(format!("a frame needs an even, positive number of rows, got {}", frame.nrows())));
    }
    Ok(frame.nrows() / 2)
}

impl LagrangianPathSpec {
    /// Half-dimension `n` of the ambient space.
    pub fn half_dim(&self) -> Result<usize> {
        match self {
            LagrangianPathSpec::Constant { frame } => frame_dim(&frame.to_matrix()?),
            LagrangianPathSpec::RotatingLine { extra_dims, .. } => Ok(1 + extra_dims),
            LagrangianPathSpec::Random { half_dim, .. } if *half_dim == 0 => {
                Err(Error::Spec("a random path needs half_dim >= 1".into()))
            }
            LagrangianPathSpec::Random { half_dim, .. } => Ok(*half_dim),
            LagrangianPathSpec::Samples { samples } => match samples.first() {
                Some(s) => frame_dim(&s.frame.to_matrix()?),
                None => Err(Error::Spec("a sampled path needs at least two samples".into())),
            },
        }
    }

    pub fn build(&self, space: &Arc<SymplecticSpace>, seed: u64) -> Result<LagrangianPath> {
        let n = space.half_dim();
        if self.half_dim()? != n {
            return Err(Error::Spec(format!("path lives in dimension {} but the space has half-dimension {n}", 2 * self.half_dim()?)));
        }
        match self {
            LagrangianPathSpec::Constant { frame } => {
                Ok(Path::constant(Lagrangian::from_span(space, &frame.to_matrix()?)?))
            }
            LagrangianPathSpec::RotatingLine {
                start_angle,
                half_turns,
                ..
            } => {
                let (a0, turns) = (*start_angle, *half_turns);
                let s = space.clone();
                Ok(Path::new(move |t| {
                    let a = a0 + PI * turns * t;
                    let mut span = RMat::zeros(2 * n, n);
                    span[(0, 0)] = a.cos();
                    span[(n, 0)] = a.sin();
                    for k in 1..n {
                        span[(n + k, k)] = 1.0;
                    }
                    Lagrangian::from_span(&s, &span)
                }))
            }
            LagrangianPathSpec::Random { speed, .. } => {
                Ok(random::lagrangian_path(&mut random::rng(seed), space, *speed))
            }
            LagrangianPathSpec::Samples { samples } => {
                path::validate_grid(samples.iter().map(|s| s.t))?;
                let reference = reference_lagrangian(space);
                let mut lifts = Vec::with_capacity(samples.len());
                for s in samples {
                    let mu = Lagrangian::from_span(space, &s.frame.to_matrix()?)?;
                    lifts.push((s.t, unitary_of_lagrangian(&reference, &mu)?.into_matrix()));
                }
                let mut logs = Vec::with_capacity(lifts.len() - 1);
                for w in lifts.windows(2) {
                    let step = w[0].1.adjoint() * &w[1].1;
                    let log = linalg::unitary_log(&step, 1e-6)
                        .map_err(|_| Error::Spec(format!("samples at t = {} and t = {} are too far apart to join", w[0].0, w[1].0)))?;
                    logs.push(log);
                }
                let lifts = Arc::new(lifts);
                let logs = Arc::new(logs);
                Ok(Path::new(move |t| {
                    let k = lifts.partition_point(|s| s.0 <= t).clamp(1, lifts.len() - 1);
                    let (t0, u0) = &lifts[k - 1];
                    let t1 = lifts[k].0;
                    let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
                    let step = (logs[k - 1].scale(w) * linalg::I).exp();
                    let u = ComplexUnitary::new(linalg::polar_unitary(&(u0 * step)))?;
                    lagrangian_from_unitary(&reference, &u)
                }))
            }
        }
    }
}

impl LagrangianSpec {
    pub fn build(&self, space: &Arc<SymplecticSpace>) -> Result<Lagrangian> {
        match self {
            LagrangianSpec::Named(NamedLagrangian::Reference) => Ok(reference_lagrangian(space)),
            LagrangianSpec::Named(NamedLagrangian::Perp) => Ok(reference_lagrangian(space).perp()),
            LagrangianSpec::Frame(frame) => {
                let frame = frame.to_matrix()?;
                if frame.nrows() != space.dim() {
                    return Err(Error::Spec(format!(
                        "reference frame has {} rows but the space has dimension {}",
                        frame.nrows(),
                        space.dim()
                    )));
                }
                Lagrangian::from_span(space, &frame)
            }
        }
    }
}

impl MaslovInput {
    pub fn build(&self, seed: u64) -> Result<(LagrangianPath, Lagrangian)> {
        let space = standard_space(self.path.half_dim()?)?;
        Ok((self.path.build(&space, seed)?, self.lambda.build(&space)?))
    }
}

fn symmetric(m: &MatrixJson) -> Result<RMat> {
    let a = m.to_matrix()?;
    if !a.is_square() {
        return Err(Error::Spec(format!("operator must be square, got {}x{}", a.nrows(), a.ncols())));
    }
    let defect = linalg::max_abs(&(&a - a.transpose()));
    if defect > crate::specflow::SYMMETRY_TOL * linalg::max_abs(&a).max(1.0) {
        return Err(Error::NotSymmetric(defect));
    }
    Ok(a)
}

impl OperatorPathSpec {
    pub fn build(&self, seed: u64) -> Result<OperatorPath> {
        match self {
            OperatorPathSpec::Random { dim: 0 } => Err(Error::Spec("a random path needs dim >= 1".into())),
            OperatorPathSpec::Random { dim } => Ok(random::operator_path(&mut random::rng(seed), *dim)),
            OperatorPathSpec::Constant { matrix } => Ok(Path::constant(symmetric(matrix)?)),
            OperatorPathSpec::Linear { start, end } => {
                let (a, b) = (symmetric(start)?, symmetric(end)?);
                if a.shape() != b.shape() {
                    return Err(Error::Spec("start and end have different shapes".into()));
                }
                Ok(Path::from_fn(move |t| &a * (1.0 - t) + &b * t))
            }
            OperatorPathSpec::Samples { samples } => path::interpolate_samples(
                samples
                    .iter()
                    .map(|s| Ok((s.t, symmetric(&s.matrix)?)))
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }
}

impl SpectralFlowInput {
    pub fn build(&self, seed: u64) -> Result<OperatorPath> {
        self.path.build(seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maslov::maslov_index;
    use crate::specflow::spectral_flow;

    #[test]
    fn rotating_line_from_json() {
        let input: MaslovInput = serde_json::from_str(r#"{"path": {"kind": "rotating_line"}}"#).unwrap();
        let (path, lambda) = input.build(0).unwrap();
        assert_eq!(maslov_index(&path, &lambda).unwrap(), 1);
        let input: MaslovInput = serde_json::from_str(r#"{"path": {"kind": "rotating_line", "extra_dims": 1}}"#).unwrap();
        let (path, lambda) = input.build(0).unwrap();
        assert_eq!(maslov_index(&path, &lambda).unwrap(), 1);
    }

    #[test]
    fn sampled_frames_reproduce_the_rotating_line() {
        let samples = (0..=4)
            .map(|k| {
                let t = k as f64 / 4.0;
                let a = PI / 2.0 + PI * t;
                FrameSample {
                    t,
                    frame: MatrixJson(vec![vec![a.cos()], vec![a.sin()]]),
                }
            })
            .collect();
        let input = MaslovInput {
            path: LagrangianPathSpec::Samples { samples },
            lambda: LagrangianSpec::default(),
        };
        let (path, lambda) = input.build(0).unwrap();
        assert_eq!(maslov_index(&path, &lambda).unwrap(), 1);
        let mid = path.eval(0.375).unwrap();
        let a = PI / 2.0 + PI * 0.375;
        let expected = RMat::from_column_slice(2, 1, &[a.cos(), a.sin()]);
        assert!(linalg::subspace_sin_distance(mid.frame(), &expected) < 1e-9);
    }

    #[test]
    fn operator_inputs() {
        let input: SpectralFlowInput =
            serde_json::from_str(r#"{"path": {"kind": "linear", "start": [[-0.5]], "end": [[0.5]]}}"#).unwrap();
        assert_eq!(spectral_flow(&input.build(0).unwrap()).unwrap(), 1);
        let bad: SpectralFlowInput =
            serde_json::from_str(r#"{"path": {"kind": "constant", "matrix": [[1, 2], [0, 1]]}}"#).unwrap();
        assert!(matches!(bad.build(0), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn random_paths_follow_the_seed() {
        let input: MaslovInput = serde_json::from_str(r#"{"path": {"kind": "random", "half_dim": 2}}"#).unwrap();
        let a = input.build(5).unwrap().0.eval(0.7).unwrap();
        let b = input.build(5).unwrap().0.eval(0.7).unwrap();
        let c = input.build(6).unwrap().0.eval(0.7).unwrap();
        assert_eq!(a.frame(), b.frame());
        assert!(a.distance(&c) > 1e-6);
        let zero: SpectralFlowInput = serde_json::from_str(r#"{"path": {"kind": "random", "dim": 0}}"#).unwrap();
        assert!(matches!(zero.build(1), Err(Error::Spec(_))));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<MaslovInput>(r#"{"path": {"kind": "rotating_line", "speed": 2}}"#).is_err());
    }
}
