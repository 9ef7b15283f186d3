//! The four index identities for a model problem, each side computed by an
//! independent pathway.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::boundary::split_boundary_conditions;
use super::flow::{crossing_times, kernel_form, maslov_side, spectral_flow_bvp_with, Family, FlowOptions};
use super::galerkin::GalerkinOracle;
use super::ModelProblem;
use crate::error::Result;
use crate::maslov;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub flow: FlowOptions,
    /// Galerkin modes for the independent check of the circle flow; 0 skips it.
    pub galerkin_modes: usize,
    /// Grid used to locate crossings of the circle family.
    pub crossing_grid: usize,
    /// Largest half-width of the window around a crossing.
    pub local_half_width: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            flow: FlowOptions::default(),
            galerkin_modes: super::GALERKIN_MODES,
            crossing_grid: 65,
            local_half_width: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equality {
    pub label: String,
    pub lhs: i64,
    pub rhs: i64,
    pub lhs_method: String,
    pub rhs_method: String,
    pub holds: bool,
}

impl Equality {
    fn new(label: &str, lhs: i64, lhs_method: &str, rhs: i64, rhs_method: &str) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            lhs_method: lhs_method.into(),
            rhs_method: rhs_method.into(),
            holds: lhs == rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub theorem: String,
    pub statement: String,
    pub equalities: Vec<Equality>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TheoremCheck {
    fn new(theorem: &str, statement: &str, equalities: Vec<Equality>, note: Option<String>) -> Self {
        Self {
            theorem: theorem.into(),
            statement: statement.into(),
            pass: equalities.iter().all(|e| e.holds),
            equalities,
            note,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub checks: Vec<TheoremCheck>,
    pub all_pass: bool,
    /// The flows that enter several identities.
    pub circle_flow: i64,
    pub first_leg_flow: i64,
    pub second_leg_flow: i64,
    pub minus_side_flow: i64,
    pub plus_side_flow: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub galerkin_flow: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl TheoremReport {
    /// Bit `k` is set when the `k`-th check failed (local, general,
    /// pre-splitting, main splitting).
    pub fn failure_mask(&self) -> u8 {
        self.checks
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.pass)
            .fold(0, |mask, (k, _)| mask | (1 << k))
    }
}

const TRACKING: &str = "eigenvalue tracking";
const MASLOV: &str = "Maslov index of Cauchy data";

pub fn verify_theorems(problem: &ModelProblem, config: &VerifyConfig) -> Result<TheoremReport> {
    let problem = Arc::new(problem.clone());
    let flow = |family: &Family, stage: &str| -> Result<i64> {
        Ok(spectral_flow_bvp_with(family, &config.flow)
            .map_err(|e| e.in_stage(stage))?
            .spectral_flow)
    };
    let mas = |family: &Family, stage: &str| maslov_side(family).map_err(|e| e.in_stage(stage));

    let split = split_boundary_conditions(&problem).map_err(|e| e.in_stage("split boundary conditions"))?;
    let circle = Family::circle(&problem);
    let first = Family::first_leg(&problem);
    let second = Family::second_leg(&problem);
    let minus = Family::minus_side(&problem, &split.l0);
    let plus = Family::plus_side(&problem, &split.l1);

    let sf_circle = flow(&circle, "spectral flow of A + C_t")?;
    let sf_first = flow(&first, "spectral flow of A_{s,0}")?;
    let sf_second = flow(&second, "spectral flow of A_{1,t}")?;
    let sf_minus = flow(&minus, "spectral flow of T^-")?;
    let sf_plus = flow(&plus, "spectral flow of T^+")?;

    let local = local_check(&circle, config).map_err(|e| e.in_stage("local formula"))?;

    let general = TheoremCheck::new(
        "general_formula",
        "Sf{A_D + C_t} = Mas({gamma(S_t)}, gamma(D))",
        vec![
            Equality::new(
                "circle against delta",
                sf_circle,
                TRACKING,
                mas(&circle, "Maslov index on the circle")?,
                MASLOV,
            ),
            Equality::new(
                "M_- against l0",
                sf_minus,
                TRACKING,
                mas(&minus, "Maslov index on M_-")?,
                MASLOV,
            ),
            Equality::new(
                "M_+ against l1",
                sf_plus,
                TRACKING,
                mas(&plus, "Maslov index on M_+")?,
                MASLOV,
            ),
        ],
        None,
    );

    let pre = TheoremCheck::new(
        "pre_splitting",
        "Sf{A + C_t} = Sf{A_{s,0}} + Sf{A_{1,t}}",
        vec![Equality::new(
            "circle flow against the two legs",
            sf_circle,
            TRACKING,
            sf_first + sf_second,
            TRACKING,
        )],
        None,
    );

    let mut main_equalities = vec![Equality::new(
        "circle flow against the split operators",
        sf_circle,
        TRACKING,
        sf_minus + sf_plus,
        TRACKING,
    )];
    let galerkin_flow = if config.galerkin_modes > 0 {
        let oracle = GalerkinOracle::new(&problem, config.galerkin_modes).map_err(|e| e.in_stage("Galerkin oracle"))?;
        let g = oracle.spectral_flow();
        main_equalities.push(Equality::new(
            "circle flow against the Galerkin discretization",
            sf_circle,
            TRACKING,
            g,
            "Galerkin negative-eigenvalue count",
        ));
        Some(g)
    } else {
        None
    };
    let main = TheoremCheck::new(
        "main_splitting",
        "Sf{A + C_t} = Sf{T^-_t} + Sf{T^+_t}",
        main_equalities,
        None,
    );

    let checks = vec![local, general, pre, main];
    Ok(TheoremReport {
        all_pass: checks.iter().all(|c| c.pass),
        checks,
        circle_flow: sf_circle,
        first_leg_flow: sf_first,
        second_leg_flow: sf_second,
        minus_side_flow: sf_minus,
        plus_side_flow: sf_plus,
        galerkin_flow,
        warning: split.warning,
    })
}

/// At the first interior crossing of the circle family: windowed `Sf`,
/// windowed `Mas`, `sign Q_Sf` and `sign Q_M` must agree.
fn local_check(circle: &Family, config: &VerifyConfig) -> Result<TheoremCheck> {
    const THEOREM: &str = "local_formula";
    const STATEMENT: &str = "Sf({A_D + C_t}, |t - t*| <= d) = Mas({lambda_t}, |t - t*| <= d) = sign Q";
    let crossings = crossing_times(circle, config.crossing_grid)?;
    let interior: Vec<f64> = crossings
        .iter()
        .map(|c| c.0)
        .filter(|t| *t > 1e-6 && *t < 1.0 - 1e-6)
        .collect();
    let Some(&t_star) = interior.first() else {
        return Ok(TheoremCheck::new(
            THEOREM,
            STATEMENT,
            Vec::new(),
            Some("no interior crossing".into()),
        ));
    };
    let mut half = config.local_half_width.min(t_star).min(1.0 - t_star);
    for c in &crossings {
        if (c.0 - t_star).abs() > 1e-9 {
            half = half.min(0.5 * (c.0 - t_star).abs());
        }
    }
    let q_sf = kernel_form(circle, t_star)?;
    let path = circle.cauchy_path();
    let q_m = maslov::crossing_form_graph(&path, &circle.domain, t_star)?;
    if !q_sf.regular || !q_m.regular {
        return Ok(TheoremCheck::new(
            THEOREM,
            STATEMENT,
            Vec::new(),
            Some(format!("no regular crossing (t* = {t_star:.6})")),
        ));
    }
    let window = circle.restricted(t_star - half, t_star + half);
    let sf = spectral_flow_bvp_with(&window, &config.flow)?.spectral_flow;
    let mas = maslov_side(&window)?;
    let equalities = vec![
        Equality::new("windowed Sf against windowed Mas", sf, TRACKING, mas, MASLOV),
        Equality::new("windowed Sf against sign Q_Sf", sf, TRACKING, q_sf.sign(), "kernel crossing form"),
        Equality::new(
            "sign Q_Sf against sign Q_M",
            q_sf.sign(),
            "kernel crossing form",
            q_m.sign(),
            "boundary crossing form",
        ),
    ];
    Ok(TheoremCheck::new(
        THEOREM,
        STATEMENT,
        equalities,
        Some(format!("t* = {t_star:.9}, window half-width {half:.3e}")),
    ))
}
