//! Every numerical default used by the front end, in one place. Each entry
//! can be overridden by the flag named in `flag`.

pub struct Default {
    pub key: &'static str,
    pub value: f64,
    pub flag: &'static str,
    pub commands: &'static str,
    pub meaning: &'static str,
}

pub const SEED: u64 = 0;

/// Points sampled inside each partition segment that changed the count
/// before the golden-section search for the crossing.
pub const CROSSING_GRID: usize = 65;

/// Rows of the `sf` eigenvalue trace.
pub const SF_TRACE_GRID: usize = 101;

/// Relative singular-value threshold for `dim(mu ∩ lambda)`.
pub const TOL_SUBSPACE: f64 = maslov_core::symplectic::SUBSPACE_TOL;

/// Relative threshold below which an eigenvalue counts as zero.
pub const TOL_KERNEL: f64 = maslov_core::specflow::EIGEN_ZERO_TOL;

pub const SPECTRUM_WINDOW: (f64, f64) = (-3.5, 3.5);
pub const SPECTRUM_GRID: usize = 2001;

/// Half-width of the window tracked around zero by `verify`.
pub const VERIFY_WINDOW: f64 = 2.0;
pub const VERIFY_GRID: usize = 201;

/// Offset added to the failure bitmask of `verify`.
pub const VERIFY_FAILURE_BASE: i32 = 16;

pub const TABLE: &[Default] = &[
    Default {
        key: "seed",
        value: SEED as f64,
        flag: "--seed",
        commands: "all",
        meaning: "seed of random path kinds",
    },
    Default {
        key: "crossing_grid",
        value: CROSSING_GRID as f64,
        flag: "--grid",
        commands: "maslov",
        meaning: "samples per changed segment when locating a crossing",
    },
    Default {
        key: "sf_grid",
        value: SF_TRACE_GRID as f64,
        flag: "--grid",
        commands: "sf",
        meaning: "rows of the eigenvalue trace and samples per changed segment",
    },
    Default {
        key: "tol_subspace",
        value: TOL_SUBSPACE,
        flag: "--tol-subspace",
        commands: "maslov, spectrum",
        meaning: "relative singular-value cutoff for intersection dimensions",
    },
    Default {
        key: "tol_kernel",
        value: TOL_KERNEL,
        flag: "--tol-kernel",
        commands: "sf",
        meaning: "relative cutoff for zero eigenvalues at a crossing",
    },
    Default {
        key: "spectrum_window",
        value: 3.5,
        flag: "--window",
        commands: "spectrum",
        meaning: "spectral window [-3.5, 3.5]",
    },
    Default {
        key: "spectrum_grid",
        value: SPECTRUM_GRID as f64,
        flag: "--grid",
        commands: "spectrum",
        meaning: "Evans determinant scan points across the window",
    },
    Default {
        key: "verify_window",
        value: VERIFY_WINDOW,
        flag: "--window",
        commands: "verify",
        meaning: "initial half-width of the tracked spectral window",
    },
    Default {
        key: "verify_grid",
        value: VERIFY_GRID as f64,
        flag: "--grid",
        commands: "verify",
        meaning: "scan points of each spectrum during tracking",
    },
];
