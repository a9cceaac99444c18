//! Truncated Fock-space primitives: ladder operators, standard initial
//! states, and the validated density-matrix type everything downstream
//! consumes.

use crate::eigen::hermitian_eigenvalues;
use crate::linalg::{hermiticity_defect, ln_factorial, ComplexMatrix, ComplexVector};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Elementwise Hermiticity tolerance enforced at density-matrix construction.
pub const DENSITY_HERMITICITY_TOL: f64 = 1e-12;
/// Trace-deviation tolerance enforced at density-matrix construction.
pub const DENSITY_TRACE_TOL: f64 = 1e-12;
/// Eigenvalues may dip this far below zero before construction fails.
pub const DENSITY_MIN_EIG_TOL: f64 = 1e-10;
/// Tail mass beyond the truncation that flags a state preparation.
pub const TAIL_MASS_WARN: f64 = 1e-6;

/// Fock-space cutoff: levels `0..N-1` are retained, every matrix is `N x N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Truncation {
    dim: usize,
}

impl Truncation {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::TruncationTooSmall(dim));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Annihilation operator `a`: entry `(n-1, n) = sqrt(n)`.
///
/// The top coupling (which would map `|N-1> -> |N>`) is dropped, so `a†a`
/// stays exact on the retained subspace.
pub fn annihilation_matrix(trunc: Truncation) -> ComplexMatrix {
    let n = trunc.dim();
    let mut a = ComplexMatrix::zeros((n, n));
    for k in 1..n {
        a[[k - 1, k]] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    a
}

/// Creation operator `a†`, the adjoint of [`annihilation_matrix`].
pub fn creation_matrix(trunc: Truncation) -> ComplexMatrix {
    let n = trunc.dim();
    let mut a_dag = ComplexMatrix::zeros((n, n));
    for k in 1..n {
        a_dag[[k, k - 1]] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    a_dag
}

/// Number operator `a†a = diag(0, 1, ..., N-1)`, built exactly.
pub fn number_operator(trunc: Truncation) -> ComplexMatrix {
    let n = trunc.dim();
    let mut num = ComplexMatrix::zeros((n, n));
    for k in 0..n {
        num[[k, k]] = Complex64::new(k as f64, 0.0);
    }
    num
}

/// Standard initial states of the cavity field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StateSpec {
    Fock {
        n: usize,
    },
    Coherent {
        alpha: Complex64,
    },
    Thermal {
        #[serde(rename = "mean_n")]
        mean_occupation: f64,
    },
    Cat {
        alpha: Complex64,
        phase: f64,
    },
}

impl StateSpec {
    /// Thermal states are the only mixed variant.
    pub fn is_pure(&self) -> bool {
        !matches!(self, StateSpec::Thermal { .. })
    }

    pub fn describe(&self) -> String {
        match self {
            StateSpec::Fock { n } => format!("fock(n={n})"),
            StateSpec::Coherent { alpha } => format!("coherent(alpha={alpha})"),
            StateSpec::Thermal { mean_occupation } => format!("thermal(mean_n={mean_occupation})"),
            StateSpec::Cat { alpha, phase } => format!("cat(alpha={alpha}, phase={phase})"),
        }
    }
}

/// A state prepared under truncation, with the probability mass that was cut
/// off beyond level `N-1` (before renormalization).
#[derive(Debug, Clone)]
pub struct PreparedState {
    pub rho: DensityMatrix,
    pub tail_mass: f64,
    pub tail_warning: bool,
}

/// Unnormalized truncated coherent amplitudes `c_n = e^{-|α|²/2} αⁿ/√(n!)`.
///
/// Built by the recurrence `c_{n+1} = c_n α/√(n+1)`, which is stable for any
/// `α` and never touches a raw factorial.
pub fn coherent_amplitudes(alpha: Complex64, dim: usize) -> ComplexVector {
    let mut amps = ComplexVector::zeros(dim);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        amps[n] = c;
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    amps
}

/// Normalized truncated state vector for a pure [`StateSpec`] variant,
/// together with the tail mass lost to truncation.
///
/// Errors on `Thermal` (mixed) and on out-of-range Fock levels.
pub fn pure_state_vector(spec: StateSpec, trunc: Truncation) -> Result<(ComplexVector, f64)> {
    let dim = trunc.dim();
    match spec {
        StateSpec::Fock { n } => {
            if n >= dim {
                return Err(Error::FockLevelOutOfRange { level: n, dim });
            }
            let mut v = ComplexVector::zeros(dim);
            v[n] = Complex64::new(1.0, 0.0);
            Ok((v, 0.0))
        }
        StateSpec::Coherent { alpha } => {
            if !alpha.re.is_finite() || !alpha.im.is_finite() {
                return Err(Error::InvalidState("coherent alpha must be finite".into()));
            }
            let mut v = coherent_amplitudes(alpha, dim);
            let mass: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if mass <= 0.0 {
                return Err(Error::InvalidState(
                    "coherent state has no support inside the truncation".into(),
                ));
            }
            let tail = (1.0 - mass).max(0.0);
            v.mapv_inplace(|z| z / mass.sqrt());
            Ok((v, tail))
        }
        StateSpec::Cat { alpha, phase } => {
            if !alpha.re.is_finite() || !alpha.im.is_finite() || !phase.is_finite() {
                return Err(Error::InvalidState("cat parameters must be finite".into()));
            }
            let plus = coherent_amplitudes(alpha, dim);
            let minus = coherent_amplitudes(-alpha, dim);
            let rel = Complex64::from_polar(1.0, phase);
            let mut v: ComplexVector = &plus + &(minus.mapv(|z| rel * z));
            let mass: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            // <α|-α> = e^{-2|α|²}, so the untruncated squared norm is
            // 2(1 + cos(phase) e^{-2|α|²}).
            let full = 2.0 * (1.0 + phase.cos() * (-2.0 * alpha.norm_sqr()).exp());
            if mass <= 1e-300 || full <= 1e-300 {
                return Err(Error::InvalidState(
                    "cat superposition cancels to the zero vector".into(),
                ));
            }
            let tail = (1.0 - mass / full).max(0.0);
            v.mapv_inplace(|z| z / mass.sqrt());
            Ok((v, tail))
        }
        StateSpec::Thermal { .. } => Err(Error::MixedReference(spec.describe())),
    }
}

/// Build the density matrix of a [`StateSpec`], renormalized to unit trace
/// after truncation. Tail mass above [`TAIL_MASS_WARN`] sets the warning
/// flag in the result.
pub fn make_state(spec: StateSpec, trunc: Truncation) -> Result<PreparedState> {
    let dim = trunc.dim();
    let (matrix, tail_mass) = match spec {
        StateSpec::Thermal { mean_occupation } => {
            if !mean_occupation.is_finite() || mean_occupation < 0.0 {
                return Err(Error::InvalidState(format!(
                    "thermal mean occupation must be finite and >= 0, got {mean_occupation}"
                )));
            }
            let ratio = mean_occupation / (1.0 + mean_occupation);
            let weights: Vec<f64> = (0..dim).map(|n| ratio.powi(n as i32)).collect();
            let total: f64 = weights.iter().sum();
            let mut m = ComplexMatrix::zeros((dim, dim));
            for (n, w) in weights.iter().enumerate() {
                m[[n, n]] = Complex64::new(w / total, 0.0);
            }
            (m, ratio.powi(dim as i32))
        }
        _ => {
            let (v, tail) = pure_state_vector(spec, trunc)?;
            let mut m = ComplexMatrix::zeros((dim, dim));
            for i in 0..dim {
                for j in 0..dim {
                    m[[i, j]] = v[i] * v[j].conj();
                }
            }
            (m, tail)
        }
    };
    Ok(PreparedState {
        rho: DensityMatrix::new(trunc, matrix)?,
        tail_mass,
        tail_warning: tail_mass > TAIL_MASS_WARN,
    })
}

/// Complex `N x N` Hermitian, unit-trace, positive-semidefinite state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    trunc: Truncation,
    elements: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate and wrap a matrix: Hermitian within 1e-12 elementwise, trace
    /// within 1e-12 of one, smallest eigenvalue above -1e-10.
    pub fn new(trunc: Truncation, elements: ComplexMatrix) -> Result<Self> {
        let n = trunc.dim();
        if elements.nrows() != n || elements.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: elements.nrows().max(elements.ncols()),
            });
        }
        let defect = hermiticity_defect(&elements);
        if defect > DENSITY_HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "hermiticity defect {defect:.3e} exceeds {DENSITY_HERMITICITY_TOL:.1e}"
            )));
        }
        let tr: Complex64 = elements.diag().sum();
        let drift = (tr - Complex64::new(1.0, 0.0)).norm();
        if drift > DENSITY_TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {tr} deviates from 1 by {drift:.3e}"
            )));
        }
        let min_eig = hermitian_eigenvalues(&elements)?
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -DENSITY_MIN_EIG_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "minimum eigenvalue {min_eig:.3e} below -{DENSITY_MIN_EIG_TOL:.1e}"
            )));
        }
        Ok(Self { trunc, elements })
    }

    /// Wrap without validating. For solver outputs whose tolerances are
    /// looser than the constructor's and are asserted by the test suite.
    pub fn from_matrix_unchecked(trunc: Truncation, elements: ComplexMatrix) -> Self {
        debug_assert_eq!(elements.nrows(), trunc.dim());
        debug_assert_eq!(elements.ncols(), trunc.dim());
        Self { trunc, elements }
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn dim(&self) -> usize {
        self.trunc.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.elements
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.elements
    }

    pub fn element(&self, m: usize, n: usize) -> Complex64 {
        self.elements[[m, n]]
    }

    pub fn trace(&self) -> Complex64 {
        self.elements.diag().sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.elements)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigenvalues(&self.elements)?
            .first()
            .copied()
            .unwrap_or(0.0))
    }
}

/// Convenience for tests and the FFI layer: weights are normalized, each
/// component prepared through [`make_state`].
pub fn mixture(components: &[(f64, StateSpec)], trunc: Truncation) -> Result<DensityMatrix> {
    if components.is_empty() {
        return Err(Error::InvalidState("mixture needs at least one component".into()));
    }
    let total: f64 = components.iter().map(|(w, _)| *w).sum();
    if !total.is_finite() || total <= 0.0 || components.iter().any(|(w, _)| *w < 0.0) {
        return Err(Error::InvalidState(
            "mixture weights must be non-negative with positive sum".into(),
        ));
    }
    let dim = trunc.dim();
    let mut acc = ComplexMatrix::zeros((dim, dim));
    for (w, spec) in components {
        let prepared = make_state(*spec, trunc)?;
        acc = acc + prepared.rho.matrix() * Complex64::new(w / total, 0.0);
    }
    DensityMatrix::new(trunc, acc)
}

/// Poisson photon-number weights of a coherent state, summed directly; the
/// independent check for the coherent-state preparation path.
pub fn poisson_weights(mean: f64, dim: usize) -> Vec<f64> {
    if mean == 0.0 {
        let mut w = vec![0.0; dim];
        w[0] = 1.0;
        return w;
    }
    (0..dim)
        .map(|n| (-mean + (n as f64) * mean.ln() - ln_factorial(n)).exp())
        .collect()
}
