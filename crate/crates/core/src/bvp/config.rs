use serde::{Deserialize, Serialize};

use super::{bulk_shift_pieces, ModelProblem, Piece, Profile};
use crate::error::{Error, Result};
use crate::symplectic::MatrixJson;

/// Serializable description of a [`ModelProblem`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub fiber_dim: usize,
    pub sigma: MatrixJson,
    pub b: MatrixJson,
    pub length: f64,
    pub split: f64,
    /// Width of the product-form collars; defaults to a sixth of the
    /// shorter arc.
    #[serde(default)]
    pub collar: Option<f64>,
    #[serde(default = "yes")]
    pub product_form: bool,
    pub perturbation: PerturbationSpec,
    /// Run the family backwards, `t -> C_{1-t}`.
    #[serde(default)]
    pub reversed: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PerturbationSpec {
    /// `C = 0`.
    Constant,
    /// `shift * t * Id` on the middle third of each arc.
    BulkShift { shift: f64 },
    /// Explicit pieces `profile(t) * matrix` on `[start, end]`.
    Pieces { pieces: Vec<PieceSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub start: f64,
    pub end: f64,
    pub matrix: MatrixJson,
    pub profile: Profile,
}

impl ProblemConfig {
    pub fn default_demo() -> Self {
        Self::bulk_shift(0.3, 3.0)
    }

    pub fn bulk_shift(b: f64, shift: f64) -> Self {
        let pi = std::f64::consts::PI;
        Self {
            fiber_dim: 2,
            sigma: MatrixJson(vec![vec![0.0, -1.0], vec![1.0, 0.0]]),
            b: MatrixJson(vec![vec![b, 0.0], vec![0.0, -b]]),
            length: 2.0 * pi,
            split: pi,
            collar: None,
            product_form: true,
            perturbation: if shift == 0.0 {
                PerturbationSpec::Constant
            } else {
                PerturbationSpec::BulkShift { shift }
            },
            reversed: false,
        }
    }

    pub fn build(&self) -> Result<ModelProblem> {
        let sigma = self.sigma.to_matrix()?;
        let b = self.b.to_matrix()?;
        let m = self.fiber_dim;
        if sigma.shape() != (m, m) || b.shape() != (m, m) {
            return Err(Error::Spec(format!(
                "fiber_dim is {m} but sigma is {:?} and b is {:?}",
                sigma.shape(),
                b.shape()
            )));
        }
        let shorter = self.split.min(self.length - self.split);
        let collar = self.collar.unwrap_or(shorter / 6.0);
        let pieces = match &self.perturbation {
            PerturbationSpec::Constant => Vec::new(),
            PerturbationSpec::BulkShift { shift } => bulk_shift_pieces(m, self.length, self.split, *shift),
            PerturbationSpec::Pieces { pieces } => pieces
                .iter()
                .map(|p| {
                    Ok(Piece {
                        start: p.start,
                        end: p.end,
                        matrix: p.matrix.to_matrix()?,
                        profile: p.profile,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let problem = ModelProblem::new(sigma, b, self.length, self.split, pieces, collar, self.product_form)?;
        Ok(if self.reversed { problem.reversed() } else { problem })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::Params;

    #[test]
    fn demo_config_builds_the_demo() {
        let p = ProblemConfig::default_demo().build().unwrap();
        let q = ModelProblem::default_demo();
        assert_eq!(p.pieces(), q.pieces());
        assert_eq!(p.b(), q.b());
        assert_eq!(p.collar(), q.collar());
    }

    #[test]
    fn json_round_trip() {
        let cfg = ProblemConfig {
            perturbation: PerturbationSpec::Pieces {
                pieces: vec![PieceSpec {
                    start: 1.0,
                    end: 2.0,
                    matrix: MatrixJson(vec![vec![1.0, 0.5], vec![0.5, -1.0]]),
                    profile: Profile::Sine {
                        offset: 0.0,
                        amplitude: 2.0,
                        frequency: 1.0,
                        phase: 0.0,
                    },
                }],
            },
            ..ProblemConfig::default_demo()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ProblemConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let p = back.build().unwrap();
        let c = p.perturbation(Params::both(0.5), 1.5);
        assert!((c[(0, 1)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_fiber_dimension_is_a_spec_error() {
        let cfg = ProblemConfig {
            fiber_dim: 4,
            ..ProblemConfig::default_demo()
        };
        assert!(matches!(cfg.build(), Err(Error::Spec(_))));
    }
}
