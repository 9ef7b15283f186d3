//! Three interactive operations for the browser page in `www/`:
//!
//! * [`eigenphase_trace`]: eigenphases of `S_lambda(mu_t)` along a Lagrangian
//!   path, with its Maslov index.
//! * [`bvp_trace`]: eigenvalues of `A + C_t` on the circle tracked through
//!   the family, with the spectral flow.
//! * [`evans_curve`]: the Evans determinant of one operator over a spectral
//!   window, with the located eigenvalues.
//!
//! Each takes and returns JSON text. The `wasm_*` wrappers are the
//! JavaScript entry points.

use std::sync::Arc;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use maslov_core::bvp::{
    spectral_flow_bvp_with, spectrum_with, split_boundary_conditions, Family, FlowOptions, ModelProblem, Params,
    ProblemConfig, Side, SpectrumOptions,
};
use maslov_core::input::MaslovInput;
use maslov_core::maslov::maslov_index;
use maslov_core::souriau::souriau_map;

#[derive(Serialize)]
struct PhaseTrace {
    maslov_index: i64,
    t: Vec<f64>,
    phases: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct EigenvalueTrace {
    spectral_flow: i64,
    t: Vec<f64>,
    eigenvalues: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct EvansCurve {
    lambda: Vec<f64>,
    det: Vec<f64>,
    eigenvalues: Vec<f64>,
    multiplicities: Vec<usize>,
}

fn to_json(value: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn problem(config: &str) -> Result<ModelProblem, String> {
    let config = if config.trim().is_empty() {
        ProblemConfig::default_demo()
    } else {
        serde_json::from_str(config).map_err(|e| format!("invalid problem config: {e}"))?
    };
    config.build().map_err(|e| e.to_string())
}

/// `input` is a Maslov input document (`{"path": ..., "lambda": ...}`).
pub fn eigenphase_trace(input: &str, seed: u32, grid: u32) -> Result<String, String> {
    let input: MaslovInput = serde_json::from_str(input).map_err(|e| format!("invalid path: {e}"))?;
    let (path, lambda) = input.build(seed as u64).map_err(|e| e.to_string())?;
    let n = grid.max(2) as usize;
    let mut trace = PhaseTrace {
        maslov_index: maslov_index(&path, &lambda).map_err(|e| e.to_string())?,
        t: Vec::with_capacity(n),
        phases: Vec::with_capacity(n),
    };
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        let mu = path.eval(t).map_err(|e| e.to_string())?;
        let image = souriau_map(&lambda, &mu).map_err(|e| e.to_string())?;
        trace.t.push(t);
        trace.phases.push(image.phases);
    }
    to_json(&trace)
}

/// `config` is a problem config; an empty string selects the demo problem.
pub fn bvp_trace(config: &str, half_width: f64) -> Result<String, String> {
    let problem = Arc::new(problem(config)?);
    let opts = FlowOptions {
        window: half_width,
        trace: true,
        ..FlowOptions::default()
    };
    let report = spectral_flow_bvp_with(&Family::circle(&problem), &opts).map_err(|e| e.to_string())?;
    let (t, eigenvalues) = report.trace.into_iter().unzip();
    to_json(&EigenvalueTrace {
        spectral_flow: report.spectral_flow,
        t,
        eigenvalues,
    })
}

/// `side` is `circle`, `minus` or `plus`; the two arcs carry the split
/// boundary conditions.
pub fn evans_curve(config: &str, side: &str, t: f64, lo: f64, hi: f64, grid: u32) -> Result<String, String> {
    let problem = problem(config)?;
    let side = match side {
        "circle" => Side::Circle,
        "minus" => Side::Minus,
        "plus" => Side::Plus,
        other => return Err(format!("unknown side {other:?}")),
    };
    let domain = match side {
        Side::Circle => problem.boundary().delta().clone(),
        _ => {
            let split = split_boundary_conditions(&problem).map_err(|e| e.to_string())?;
            if side == Side::Minus {
                split.l0
            } else {
                split.l1
            }
        }
    };
    let opts = SpectrumOptions {
        window: (lo, hi),
        grid: grid.max(2) as usize,
        ..SpectrumOptions::default()
    };
    let report = spectrum_with(&problem, side, &domain, Params::both(t), &opts).map_err(|e| e.to_string())?;
    let (lambda, det) = report.evans_trace.iter().cloned().unzip();
    to_json(&EvansCurve {
        lambda,
        det,
        eigenvalues: report.eigenvalues.iter().map(|e| e.value).collect(),
        multiplicities: report.eigenvalues.iter().map(|e| e.multiplicity).collect(),
    })
}

#[wasm_bindgen(js_name = eigenphaseTrace)]
pub fn wasm_eigenphase_trace(input: &str, seed: u32, grid: u32) -> Result<String, JsValue> {
    eigenphase_trace(input, seed, grid).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = bvpTrace)]
pub fn wasm_bvp_trace(config: &str, half_width: f64) -> Result<String, JsValue> {
    bvp_trace(config, half_width).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = evansCurve)]
pub fn wasm_evans_curve(config: &str, side: &str, t: f64, lo: f64, hi: f64, grid: u32) -> Result<String, JsValue> {
    evans_curve(config, side, t, lo, hi, grid).map_err(|e| JsValue::from_str(&e))
}
