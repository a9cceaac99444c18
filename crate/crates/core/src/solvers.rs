//! Independent reference solvers for the same dynamics: a fixed-step RK4
//! integrator of the master equation, and a matrix-exponential propagator
//! for the vectorized (doubled-space) Liouvillian.

use crate::channel::ChannelParams;
use crate::expm::matrix_exponential;
use crate::fock::{annihilation_matrix, number_operator, DensityMatrix, Truncation};
use crate::linalg::{identity, ComplexMatrix, ComplexVector};
use crate::{Error, Result};
use ndarray::linalg::kron;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Instant;

/// RK4 stays well inside its stability region when
/// `h (2γN + |χ|N²)` is below this bound.
pub const RK4_STABILITY_BOUND: f64 = 0.1;

/// RK4 output is re-Hermitized / trace-renormalized only when its measured
/// drift exceeds this gate; the drift is reported either way.
pub const RK4_DRIFT_GATE: f64 = 1e-12;

/// Dense `N² x N²` propagation is refused above this dimension by default.
pub const LIOUVILLE_DIM_LIMIT: usize = 32;

/// Fixed-step integrator setup; the step size is `t / steps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegratorConfig {
    steps: usize,
}

impl IntegratorConfig {
    pub fn new(steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidParams("integrator needs at least 1 step".into()));
        }
        Ok(Self { steps })
    }

    /// Steps for a run of duration `t` at a fixed per-unit-time density.
    pub fn for_duration(t: f64, steps_per_unit_time: u64) -> Self {
        let steps = (t * steps_per_unit_time as f64).ceil() as usize;
        Self { steps: steps.max(1) }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// Action of the master-equation generator on an arbitrary matrix:
/// `-iχ[(a†a)², m] + γ(2 a m a† - a†a m - m a†a)`.
///
/// Both `(a†a)²` and `a†a` are diagonal and `a` has a single band, so the
/// result is formed elementwise:
/// `out_{mn} = -iχ(m²-n²) x_{mn} + γ(2 sqrt((m+1)(n+1)) x_{m+1,n+1} - (m+n) x_{mn})`.
pub fn lindblad_generator_action(x: &ComplexMatrix, params: ChannelParams) -> ComplexMatrix {
    let dim = x.nrows();
    let chi = params.chi();
    let gamma = params.gamma();
    let mut out = ComplexMatrix::zeros((dim, dim));
    for m in 0..dim {
        for n in 0..dim {
            let kerr = -chi * ((m * m) as i64 - (n * n) as i64) as f64;
            let mut value = Complex64::new(0.0, kerr) * x[[m, n]]
                - gamma * (m + n) as f64 * x[[m, n]];
            if m + 1 < dim && n + 1 < dim {
                let gain = 2.0 * gamma * (((m + 1) * (n + 1)) as f64).sqrt();
                value += gain * x[[m + 1, n + 1]];
            }
            out[[m, n]] = value;
        }
    }
    out
}

/// Right-hand side of the master equation at a state; the result is a
/// tangent, not a density matrix.
pub fn lindblad_rhs(rho: &DensityMatrix, params: ChannelParams) -> ComplexMatrix {
    lindblad_generator_action(rho.matrix(), params)
}

/// Drift diagnostics of an RK4 run, measured before any correction.
#[derive(Debug, Clone, Copy)]
pub struct Rk4Report {
    pub trace_drift: f64,
    pub hermiticity_drift: f64,
    /// Whether the drift gate forced a `(ρ+ρ†)/2` + renormalization pass.
    pub corrected: bool,
}

/// Classical fixed-step RK4 on the matrix master equation over `[0, t]`.
pub fn rk4_evolve(
    rho0: &DensityMatrix,
    params: ChannelParams,
    cfg: IntegratorConfig,
) -> Result<DensityMatrix> {
    rk4_evolve_with_report(rho0, params, cfg).map(|(rho, _)| rho)
}

/// [`rk4_evolve`] plus the measured trace/Hermiticity drift.
pub fn rk4_evolve_with_report(
    rho0: &DensityMatrix,
    params: ChannelParams,
    cfg: IntegratorConfig,
) -> Result<(DensityMatrix, Rk4Report)> {
    let t = params.t();
    if t == 0.0 {
        let report = Rk4Report {
            trace_drift: 0.0,
            hermiticity_drift: 0.0,
            corrected: false,
        };
        return Ok((rho0.clone(), report));
    }

    let dim = rho0.dim();
    let rate = 2.0 * params.gamma() * dim as f64
        + params.chi().abs() * (dim * dim) as f64;
    let h = t / cfg.steps() as f64;
    if h * rate >= RK4_STABILITY_BOUND {
        let required = (t * rate / RK4_STABILITY_BOUND).floor() as usize + 1;
        return Err(Error::Rk4Unstable {
            steps: cfg.steps(),
            required,
        });
    }

    let mut rho = rho0.matrix().clone();
    let half = Complex64::new(0.5 * h, 0.0);
    let sixth = Complex64::new(h / 6.0, 0.0);
    for _ in 0..cfg.steps() {
        let k1 = lindblad_generator_action(&rho, params);
        let k2 = lindblad_generator_action(&(&rho + &(&k1 * half)), params);
        let k3 = lindblad_generator_action(&(&rho + &(&k2 * half)), params);
        let k4 = lindblad_generator_action(&(&rho + &(&k3 * Complex64::new(h, 0.0))), params);
        rho = &rho + &((k1 + &k2 * 2.0 + &k3 * 2.0 + k4) * sixth);
    }

    let hermiticity_drift = crate::linalg::hermiticity_defect(&rho);
    let trace: Complex64 = rho.diag().sum();
    let trace_drift = (trace - Complex64::new(1.0, 0.0)).norm();
    let corrected = hermiticity_drift > RK4_DRIFT_GATE || trace_drift > RK4_DRIFT_GATE;
    if corrected {
        let n = rho.nrows();
        let mut sym = ComplexMatrix::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                sym[[i, j]] = 0.5 * (rho[[i, j]] + rho[[j, i]].conj());
            }
        }
        let tr: Complex64 = sym.diag().sum();
        rho = sym.mapv(|z| z / tr.re);
    }
    let report = Rk4Report {
        trace_drift,
        hermiticity_drift,
        corrected,
    };
    Ok((DensityMatrix::from_matrix_unchecked(rho0.trunc(), rho), report))
}

/// The `N² x N²` generator of the vectorized master equation.
///
/// Vectorization is row-major (`ρ_{mn}` at flat index `m·N + n`), so
/// left-multiplication maps as `A ↦ A⊗I` and right-multiplication as
/// `B ↦ I⊗Bᵀ`, giving
/// `L = -iχ(n̂²⊗I - I⊗n̂²) + γ(2 a⊗conj(a) - n̂⊗I - I⊗n̂)`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    trunc: Truncation,
    matrix: ComplexMatrix,
    params: ChannelParams,
}

impl Liouvillian {
    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Couplings the generator was built from; its `t` plays no role here.
    pub fn params(&self) -> ChannelParams {
        self.params
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        self.matrix.dot(v)
    }
}

/// Row-major flattening `vec(ρ)[m·N + n] = ρ_{mn}`.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_iter(m.iter().copied())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &ComplexVector, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_shape_vec((dim, dim), v.to_vec())
        .expect("vector length must be dim^2")
}

pub fn build_liouvillian(trunc: Truncation, params: ChannelParams) -> Liouvillian {
    let a = annihilation_matrix(trunc);
    let num = number_operator(trunc);
    let num_sq = num.dot(&num);
    let eye = identity(trunc.dim());

    let minus_i_chi = Complex64::new(0.0, -params.chi());
    let kerr = (kron(&num_sq, &eye) - kron(&eye, &num_sq)).mapv(|z| z * minus_i_chi);
    // a is real in the Fock basis, so conj(a) = a; the conjugation is kept
    // to state the vectorization rule in full.
    let a_conj = a.mapv(|z| z.conj());
    let damping = (kron(&a, &a_conj).mapv(|z| 2.0 * z)
        - kron(&num, &eye)
        - kron(&eye, &num))
    .mapv(|z| z * params.gamma());

    Liouvillian {
        trunc,
        matrix: kerr + damping,
        params,
    }
}

/// Propagate by `reshape(exp(L t) · vec(ρ₀))`.
///
/// Dense `N² x N²` work; refuses dimensions above
/// [`LIOUVILLE_DIM_LIMIT`] — use [`rk4_evolve`] there instead.
pub fn evolve_liouvillian(rho0: &DensityMatrix, params: ChannelParams) -> Result<DensityMatrix> {
    evolve_liouvillian_with_limit(rho0, params, LIOUVILLE_DIM_LIMIT)
}

pub fn evolve_liouvillian_with_limit(
    rho0: &DensityMatrix,
    params: ChannelParams,
    dim_limit: usize,
) -> Result<DensityMatrix> {
    let dim = rho0.dim();
    if dim > dim_limit {
        return Err(Error::LiouvilleDimTooLarge {
            dim,
            limit: dim_limit,
        });
    }
    let generator = build_liouvillian(rho0.trunc(), params);
    let lt = generator.matrix() * Complex64::new(params.t(), 0.0);
    let propagator = matrix_exponential(&lt);
    let evolved = propagator.dot(&vectorize(rho0.matrix()));
    Ok(DensityMatrix::from_matrix_unchecked(
        rho0.trunc(),
        unvectorize(&evolved, dim),
    ))
}

/// The three interchangeable evolution routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Kraus,
    Rk4,
    Liouville,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::Kraus, SolverKind::Rk4, SolverKind::Liouville];

    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Kraus => "kraus",
            SolverKind::Rk4 => "rk4",
            SolverKind::Liouville => "liouville",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One solver's output in a comparison run.
#[derive(Debug, Clone)]
pub struct SolverRun {
    pub solver: SolverKind,
    pub rho: DensityMatrix,
    /// `|Tr ρ - 1|` of the raw output.
    pub trace_drift: f64,
    pub wall_seconds: f64,
}

/// A solver that failed, with its identity attached.
#[derive(Debug)]
pub struct SolverFailure {
    pub solver: SolverKind,
    pub error: Error,
}

/// Max elementwise deviation between two solvers' outputs.
#[derive(Debug, Clone, Copy)]
pub struct PairDeviation {
    pub a: SolverKind,
    pub b: SolverKind,
    pub max_abs: f64,
}

/// Outcome of running several solvers on the same problem.
#[derive(Debug)]
pub struct ComparisonReport {
    pub runs: Vec<SolverRun>,
    pub failures: Vec<SolverFailure>,
    pub pairwise: Vec<PairDeviation>,
}

impl ComparisonReport {
    /// Largest pairwise deviation, if at least two solvers succeeded.
    pub fn max_deviation(&self) -> Option<f64> {
        self.pairwise
            .iter()
            .map(|p| p.max_abs)
            .fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.max(x))))
    }

    /// True when every solver ran and every pair agrees within `threshold`.
    pub fn within(&self, threshold: f64) -> bool {
        self.failures.is_empty() && self.pairwise.iter().all(|p| p.max_abs <= threshold)
    }
}

pub fn run_solver(
    solver: SolverKind,
    rho0: &DensityMatrix,
    params: ChannelParams,
    cfg: IntegratorConfig,
) -> Result<DensityMatrix> {
    match solver {
        SolverKind::Kraus => Ok(crate::channel::evolve_kraus(rho0, params)),
        SolverKind::Rk4 => rk4_evolve(rho0, params, cfg),
        SolverKind::Liouville => evolve_liouvillian(rho0, params),
    }
}

/// Run a selected set of solvers and tabulate pairwise deviations, trace
/// drift, and wall time. Failures are collected rather than aborting the
/// surviving comparisons.
pub fn compare_selected(
    rho0: &DensityMatrix,
    params: ChannelParams,
    cfg: IntegratorConfig,
    solvers: &[SolverKind],
) -> ComparisonReport {
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for &solver in solvers {
        let start = Instant::now();
        match run_solver(solver, rho0, params, cfg) {
            Ok(rho) => {
                let wall_seconds = start.elapsed().as_secs_f64();
                let trace_drift = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
                runs.push(SolverRun {
                    solver,
                    rho,
                    trace_drift,
                    wall_seconds,
                });
            }
            Err(error) => failures.push(SolverFailure { solver, error }),
        }
    }
    let mut pairwise = Vec::new();
    for i in 0..runs.len() {
        for j in (i + 1)..runs.len() {
            pairwise.push(PairDeviation {
                a: runs[i].solver,
                b: runs[j].solver,
                max_abs: crate::linalg::max_abs_diff(runs[i].rho.matrix(), runs[j].rho.matrix()),
            });
        }
    }
    ComparisonReport {
        runs,
        failures,
        pairwise,
    }
}

/// Run all three solvers on the same problem.
pub fn solver_compare(
    rho0: &DensityMatrix,
    params: ChannelParams,
    cfg: IntegratorConfig,
) -> ComparisonReport {
    compare_selected(rho0, params, cfg, &SolverKind::ALL)
}
