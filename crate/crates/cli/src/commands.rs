use std::fs;
use std::path::Path as FsPath;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use maslov_core::bvp::{
    cauchy_data_space, spectral_flow_bvp_with, spectrum_with, split_boundary_conditions, verify_theorems, Family,
    FlowOptions, ModelProblem, Params, ProblemConfig, Side, SpectrumOptions, VerifyConfig,
};
use maslov_core::error::Error;
use maslov_core::input::{MaslovInput, SpectralFlowInput};
use maslov_core::linalg::{self, RMat};
use maslov_core::maslov::maslov_index_with;
use maslov_core::partition::{CountChange, IndexOptions};
use maslov_core::specflow::spectral_flow_with;
use maslov_core::symplectic::{intersection_dim_tol, Lagrangian};

use crate::defaults;
use crate::output::Sink;

/// Settings shared by all commands after flag parsing.
pub struct Run {
    pub input: Option<std::path::PathBuf>,
    pub sink: Sink,
    pub seed: u64,
    pub window: Option<(f64, f64)>,
    pub grid: Option<usize>,
    pub trace: bool,
    pub tol_kernel: f64,
    pub tol_subspace: f64,
}

fn read_input<T: DeserializeOwned>(path: &FsPath) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    if is_toml {
        toml::from_str(&text).with_context(|| format!("{} is not a valid config", path.display()))
    } else {
        serde_json::from_str(&text).with_context(|| format!("{} is not a valid config", path.display()))
    }
}

fn required_input<T: DeserializeOwned>(run: &Run, command: &str) -> Result<T> {
    match &run.input {
        Some(path) => read_input(path),
        None => bail!("`{command}` needs --input"),
    }
}

fn problem_from(run: &Run) -> Result<ModelProblem> {
    let config = match &run.input {
        Some(path) => read_input(path)?,
        None => ProblemConfig::default_demo(),
    };
    Ok(config.build()?)
}

fn symmetric_half_width(run: &Run, command: &str) -> Result<Option<f64>> {
    match run.window {
        None => Ok(None),
        Some((lo, hi)) if lo == -hi && hi > 0.0 => Ok(Some(hi)),
        Some(_) => bail!("`{command}` takes a single positive --window half-width"),
    }
}

fn index_options(run: &Run, command: &str) -> Result<IndexOptions> {
    let opts = IndexOptions::default();
    Ok(match symmetric_half_width(run, command)? {
        Some(w) => opts.with_epsilon_cap(w),
        None => opts,
    })
}

/// Minimizes `f` over `[a, b]`: a uniform scan followed by golden-section
/// search in the bracket around the best sample.
fn locate_minimum(f: impl Fn(f64) -> Result<f64>, a: f64, b: f64, grid: usize) -> Result<f64> {
    let n = grid.max(3);
    let xs: Vec<f64> = (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect();
    let mut best = (0, f64::INFINITY);
    for (k, x) in xs.iter().enumerate() {
        let v = f(*x)?;
        if v < best.1 {
            best = (k, v);
        }
    }
    let (mut lo, mut hi) = (xs[best.0.saturating_sub(1)], xs[(best.0 + 1).min(n - 1)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > 1e-13 * (1.0 + lo.abs()) {
        if f1 <= f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    let candidates = [(xs[best.0], best.1), (mid, f(mid)?)];
    Ok(if candidates[1].1 <= candidates[0].1 { candidates[1].0 } else { candidates[0].0 })
}

fn crossing_json(change: &CountChange, t: f64, dim: usize) -> Value {
    json!({"t": t, "dim": dim, "change": change.change, "segment": [change.t0, change.t1]})
}

pub fn maslov(run: &Run) -> Result<i32> {
    let input: MaslovInput = required_input(run, "maslov")?;
    let (path, lambda) = input.build(run.seed)?;
    let opts = index_options(run, "maslov")?;
    let report = maslov_index_with(&path, &lambda, &opts).map_err(|e| e.in_stage("maslov index"))?;
    let grid = run.grid.unwrap_or(defaults::CROSSING_GRID);
    let gap = |t: f64| -> Result<f64> {
        let mu = path.eval(t)?;
        Ok(linalg::singular_values_asc(&linalg::hstack(mu.frame(), lambda.frame()))[0])
    };
    let mut crossings = Vec::new();
    for change in &report.changes {
        let t = locate_minimum(gap, change.t0, change.t1, grid).context("crossing location")?;
        let dim = intersection_dim_tol(&path.eval(t)?, &lambda, run.tol_subspace)?;
        crossings.push(crossing_json(change, t, dim));
    }
    run.sink.json(
        "maslov",
        json!({
            "command": "maslov",
            "seed": run.seed,
            "maslov_index": report.index,
            "crossings": crossings,
            "segments": report.segments,
            "evaluations": report.evaluations,
        }),
    )?;
    Ok(0)
}

fn kernel_dim(a: &RMat, tol: f64) -> usize {
    let scale = linalg::norm2(a).max(1.0);
    linalg::symmetric_eigenvalues(a).iter().filter(|v| v.abs() < tol * scale).count()
}

pub fn sf(run: &Run) -> Result<i32> {
    let input: SpectralFlowInput = required_input(run, "sf")?;
    let path = input.build(run.seed)?;
    let opts = index_options(run, "sf")?;
    let report = spectral_flow_with(&path, &opts).map_err(|e| e.in_stage("spectral flow"))?;
    let grid = run.grid.unwrap_or(defaults::SF_TRACE_GRID);
    let smallest = |t: f64| -> Result<f64> {
        let a = path.eval(t)?;
        Ok(linalg::symmetric_eigenvalues(&a).iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min))
    };
    let mut crossings = Vec::new();
    for change in &report.changes {
        let t = locate_minimum(smallest, change.t0, change.t1, grid).context("crossing location")?;
        let dim = kernel_dim(&path.eval(t)?, run.tol_kernel);
        crossings.push(crossing_json(change, t, dim));
    }
    if run.trace {
        let n = grid.max(2);
        let mut rows = Vec::with_capacity(n);
        let mut dim = 0;
        for k in 0..n {
            let t = k as f64 / (n - 1) as f64;
            let values = linalg::symmetric_eigenvalues(&path.eval(t)?);
            dim = values.len();
            rows.push(std::iter::once(Some(t)).chain(values.into_iter().map(Some)).collect());
        }
        run.sink.csv("sf", &trace_header("t", "lambda", dim), &rows)?;
    }
    run.sink.json(
        "sf",
        json!({
            "command": "sf",
            "seed": run.seed,
            "spectral_flow": report.index,
            "crossings": crossings,
            "segments": report.segments,
            "evaluations": report.evaluations,
        }),
    )?;
    Ok(0)
}

fn trace_header(first: &str, prefix: &str, count: usize) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain((1..=count).map(|k| format!("{prefix}_{k}")))
        .collect()
}

pub fn verify(run: &Run) -> Result<i32> {
    let problem = problem_from(run)?;
    let mut flow = FlowOptions::default();
    if let Some(w) = symmetric_half_width(run, "verify")? {
        flow.window = w;
    }
    flow.grid = run.grid.unwrap_or(defaults::VERIFY_GRID);
    let config = VerifyConfig {
        flow,
        ..VerifyConfig::default()
    };
    let report = verify_theorems(&problem, &config)?;
    if run.trace {
        let family = Family::circle(&Arc::new(problem.clone()));
        let traced = spectral_flow_bvp_with(&family, &FlowOptions { trace: true, ..flow })
            .map_err(|e| e.in_stage("eigenvalue trace"))?;
        let width = traced.trace.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        let rows: Vec<Vec<Option<f64>>> = traced
            .trace
            .iter()
            .map(|(t, values)| {
                let mut row = vec![Some(*t)];
                row.extend(values.iter().map(|v| Some(*v)));
                row.resize(width + 1, None);
                row
            })
            .collect();
        run.sink.csv("verify", &trace_header("t", "lambda", width), &rows)?;
    }
    let mask = report.failure_mask();
    let mut value = serde_json::to_value(&report)?;
    if let Value::Object(map) = &mut value {
        map.insert("command".into(), json!("verify"));
        map.insert("seed".into(), json!(run.seed));
        map.insert("failure_mask".into(), json!(mask));
    }
    run.sink.json("verify", value)?;
    Ok(if mask == 0 { 0 } else { defaults::VERIFY_FAILURE_BASE + mask as i32 })
}

pub fn spectrum(run: &Run, side: Side, t: f64) -> Result<i32> {
    let problem = problem_from(run)?;
    let domain: Lagrangian = match side {
        Side::Circle => problem.boundary().delta().clone(),
        Side::Minus | Side::Plus => {
            let split = split_boundary_conditions(&problem).map_err(|e| e.in_stage("split boundary conditions"))?;
            if side == Side::Minus {
                split.l0
            } else {
                split.l1
            }
        }
    };
    let opts = SpectrumOptions {
        window: run.window.unwrap_or(defaults::SPECTRUM_WINDOW),
        grid: run.grid.unwrap_or(defaults::SPECTRUM_GRID),
        ..SpectrumOptions::default()
    };
    let params = Params::both(t);
    let report = spectrum_with(&problem, side, &domain, params, &opts).map_err(|e| e.in_stage("spectrum"))?;
    let mut eigenvalues = Vec::new();
    for entry in &report.eigenvalues {
        let cauchy = cauchy_data_space(&problem, side, params, entry.value)?;
        let dim = intersection_dim_tol(&cauchy, &domain, run.tol_subspace)?;
        eigenvalues.push(json!({
            "value": entry.value,
            "multiplicity": entry.multiplicity,
            "intersection_dim": dim,
            "parity_consistent": entry.parity_consistent,
        }));
    }
    if run.trace {
        let rows: Vec<Vec<Option<f64>>> = report.evans_trace.iter().map(|(l, d)| vec![Some(*l), Some(*d)]).collect();
        run.sink.csv("spectrum", &["lambda".into(), "evans".into()], &rows)?;
    }
    run.sink.json(
        "spectrum",
        json!({
            "command": "spectrum",
            "seed": run.seed,
            "side": side,
            "t": t,
            "window": [report.window.0, report.window.1],
            "count": report.count(),
            "eigenvalues": eigenvalues,
            "certification_margin": report.certification_margin,
        }),
    )?;
    Ok(0)
}

/// Exit code for a failed run: 3 for numerical failures of the core,
/// 2 for everything else (bad flags, unreadable or invalid configs).
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let core = err.chain().find_map(|e| e.downcast_ref::<Error>());
    match core.map(Error::root) {
        Some(
            Error::BranchCut
            | Error::NotTransversal(_)
            | Error::DegenerateCrossing { .. }
            | Error::CrossingNotIsolated(_)
            | Error::RefinementBudget(_)
            | Error::Discontinuous(_)
            | Error::WindowEdge(_)
            | Error::RootIsolation(_),
        ) => 3,
        _ => 2,
    }
}
