//! C ABI for the dissipative Kerr-cavity simulator.
//!
//! States are opaque handles created and freed by this library; every
//! fallible call returns a [`KerrsimStatus`] and writes results through out
//! pointers. The header `include/kerrsim.h` is generated by cbindgen at
//! build time.

use kerrsim::channel::{
    completeness_residual, evolve_kraus, lambda_coefficient, ChannelParams,
};
use kerrsim::fock::{make_state, DensityMatrix, StateSpec, Truncation};
use kerrsim::observables::{
    fidelity_pure, mean_photon_number, purity, trace_distance,
};
use kerrsim::solvers::{evolve_liouvillian, rk4_evolve, IntegratorConfig};
use kerrsim::Error;
use num_complex::Complex64;
use std::os::raw::c_char;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KerrsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    /// The requested RK4 step violates the stability guard.
    StabilityGuard = 4,
    /// The dense Liouvillian propagator refused a dimension this large.
    MemoryGuard = 5,
    InternalError = 6,
}

/// Opaque density-matrix handle.
pub struct KerrsimState {
    inner: DensityMatrix,
}

fn status_of(error: &Error) -> KerrsimStatus {
    match error {
        Error::Rk4Unstable { .. } => KerrsimStatus::StabilityGuard,
        Error::LiouvilleDimTooLarge { .. } => KerrsimStatus::MemoryGuard,
        Error::DimensionMismatch { .. } => KerrsimStatus::DimensionMismatch,
        Error::TruncationTooSmall(_)
        | Error::FockLevelOutOfRange { .. }
        | Error::InvalidState(_)
        | Error::InvalidParams(_)
        | Error::MixedReference(_)
        | Error::KrausIndexOutOfRange { .. } => KerrsimStatus::InvalidArgument,
        _ => KerrsimStatus::InternalError,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn kerrsim_status_message(status: KerrsimStatus) -> *const c_char {
    let text: &'static [u8] = match status {
        KerrsimStatus::Ok => b"ok\0",
        KerrsimStatus::NullPointer => b"null pointer argument\0",
        KerrsimStatus::InvalidArgument => b"invalid argument\0",
        KerrsimStatus::DimensionMismatch => b"dimension mismatch\0",
        KerrsimStatus::StabilityGuard => b"rk4 step violates the stability guard\0",
        KerrsimStatus::MemoryGuard => b"dimension exceeds the dense-propagator limit\0",
        KerrsimStatus::InternalError => b"internal error\0",
    };
    text.as_ptr() as *const c_char
}

/// Library version as a NUL-terminated string.
#[no_mangle]
pub extern "C" fn kerrsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn emit_state(
    state: Result<DensityMatrix, Error>,
    out: *mut *mut KerrsimState,
) -> KerrsimStatus {
    if out.is_null() {
        return KerrsimStatus::NullPointer;
    }
    match state {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(KerrsimState { inner }));
            KerrsimStatus::Ok
        }
        Err(e) => {
            *out = std::ptr::null_mut();
            status_of(&e)
        }
    }
}

unsafe fn prepare(
    dim: u32,
    spec: StateSpec,
    out: *mut *mut KerrsimState,
) -> KerrsimStatus {
    let built = Truncation::new(dim as usize).and_then(|t| make_state(spec, t).map(|p| p.rho));
    emit_state(built, out)
}

/// Create the Fock state `|n><n|` in an `dim`-level truncation.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_state_fock(
    dim: u32,
    n: u32,
    out: *mut *mut KerrsimState,
) -> KerrsimStatus {
    prepare(dim, StateSpec::Fock { n: n as usize }, out)
}

/// Create a truncated, renormalized coherent state.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_state_coherent(
    dim: u32,
    alpha_re: f64,
    alpha_im: f64,
    out: *mut *mut KerrsimState,
) -> KerrsimStatus {
    prepare(
        dim,
        StateSpec::Coherent {
            alpha: Complex64::new(alpha_re, alpha_im),
        },
        out,
    )
}

/// Create a thermal state with the given mean occupation.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_state_thermal(
    dim: u32,
    mean_n: f64,
    out: *mut *mut KerrsimState,
) -> KerrsimStatus {
    prepare(
        dim,
        StateSpec::Thermal {
            mean_occupation: mean_n,
        },
        out,
    )
}

/// Create a cat state `|α> + e^{iφ}|-α>` (normalized after truncation).
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_state_cat(
    dim: u32,
    alpha_re: f64,
    alpha_im: f64,
    phase: f64,
    out: *mut *mut KerrsimState,
) -> KerrsimStatus {
    prepare(
        dim,
        StateSpec::Cat {
            alpha: Complex64::new(alpha_re, alpha_im),
            phase,
        },
        out,
    )
}

/// Deep-copy a state handle.
///
/// # Safety
/// `state` must be a live handle from this library; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_state_clone(
    state: *const KerrsimState,
    out: *mut *mut KerrsimState,
) -> KerrsimStatus {
    if state.is_null() {
        return KerrsimStatus::NullPointer;
    }
    emit_state(Ok((*state).inner.clone()), out)
}

/// Release a state handle. Passing NULL is a no-op.
///
/// # Safety
/// `state` must be a pointer previously returned by this library and not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_state_free(state: *mut KerrsimState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of retained Fock levels, or 0 for NULL.
///
/// # Safety
/// `state` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_state_dim(state: *const KerrsimState) -> u32 {
    if state.is_null() {
        0
    } else {
        (*state).inner.dim() as u32
    }
}

/// Read one matrix element `ρ_{mn}`.
///
/// # Safety
/// `state` must be a live handle; `re`/`im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_state_element(
    state: *const KerrsimState,
    m: u32,
    n: u32,
    re: *mut f64,
    im: *mut f64,
) -> KerrsimStatus {
    if state.is_null() || re.is_null() || im.is_null() {
        return KerrsimStatus::NullPointer;
    }
    let inner = &(*state).inner;
    if m as usize >= inner.dim() || n as usize >= inner.dim() {
        return KerrsimStatus::InvalidArgument;
    }
    let z = inner.element(m as usize, n as usize);
    *re = z.re;
    *im = z.im;
    KerrsimStatus::Ok
}

unsafe fn evolve_common(
    state: *const KerrsimState,
    chi: f64,
    gamma: f64,
    t: f64,
    out: *mut *mut KerrsimState,
    run: impl FnOnce(&DensityMatrix, ChannelParams) -> Result<DensityMatrix, Error>,
) -> KerrsimStatus {
    if state.is_null() {
        return KerrsimStatus::NullPointer;
    }
    let result = ChannelParams::new(chi, gamma, t).and_then(|p| run(&(*state).inner, p));
    emit_state(result, out)
}

/// Evolve through the closed-form operator-sum channel.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_evolve_kraus(
    state: *const KerrsimState,
    chi: f64,
    gamma: f64,
    t: f64,
    out: *mut *mut KerrsimState,
) -> KerrsimStatus {
    evolve_common(state, chi, gamma, t, out, |rho, p| Ok(evolve_kraus(rho, p)))
}

/// Evolve by fixed-step RK4 integration of the master equation.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_evolve_rk4(
    state: *const KerrsimState,
    chi: f64,
    gamma: f64,
    t: f64,
    steps: u64,
    out: *mut *mut KerrsimState,
) -> KerrsimStatus {
    evolve_common(state, chi, gamma, t, out, |rho, p| {
        let cfg = IntegratorConfig::new(steps as usize)?;
        rk4_evolve(rho, p, cfg)
    })
}

/// Evolve by exponentiating the vectorized Liouvillian.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_evolve_liouville(
    state: *const KerrsimState,
    chi: f64,
    gamma: f64,
    t: f64,
    out: *mut *mut KerrsimState,
) -> KerrsimStatus {
    evolve_common(state, chi, gamma, t, out, evolve_liouvillian)
}

unsafe fn scalar_out(
    state: *const KerrsimState,
    out: *mut f64,
    eval: impl FnOnce(&DensityMatrix) -> Result<f64, Error>,
) -> KerrsimStatus {
    if state.is_null() || out.is_null() {
        return KerrsimStatus::NullPointer;
    }
    match eval(&(*state).inner) {
        Ok(v) => {
            *out = v;
            KerrsimStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// `Tr ρ²`.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_purity(
    state: *const KerrsimState,
    out: *mut f64,
) -> KerrsimStatus {
    scalar_out(state, out, |rho| Ok(purity(rho)))
}

/// `Tr(n̂ ρ)`.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_mean_photon_number(
    state: *const KerrsimState,
    out: *mut f64,
) -> KerrsimStatus {
    scalar_out(state, out, |rho| Ok(mean_photon_number(rho)))
}

/// Smallest eigenvalue of ρ.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_min_eigenvalue(
    state: *const KerrsimState,
    out: *mut f64,
) -> KerrsimStatus {
    scalar_out(state, out, |rho| rho.min_eigenvalue())
}

/// Overlap `<n|ρ|n>` with a Fock state.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_fidelity_fock(
    state: *const KerrsimState,
    n: u32,
    out: *mut f64,
) -> KerrsimStatus {
    scalar_out(state, out, |rho| {
        fidelity_pure(rho, StateSpec::Fock { n: n as usize })
    })
}

/// Complex trace of ρ.
///
/// # Safety
/// `state` must be a live handle; `re`/`im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_trace(
    state: *const KerrsimState,
    re: *mut f64,
    im: *mut f64,
) -> KerrsimStatus {
    if state.is_null() || re.is_null() || im.is_null() {
        return KerrsimStatus::NullPointer;
    }
    let tr = (*state).inner.trace();
    *re = tr.re;
    *im = tr.im;
    KerrsimStatus::Ok
}

/// Trace distance between two states of equal dimension.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_trace_distance(
    a: *const KerrsimState,
    b: *const KerrsimState,
    out: *mut f64,
) -> KerrsimStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        return KerrsimStatus::NullPointer;
    }
    match trace_distance(&(*a).inner, &(*b).inner) {
        Ok(v) => {
            *out = v;
            KerrsimStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// The dissipation coefficient `Λ_{m,n}` at the given couplings and time.
///
/// # Safety
/// `re`/`im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_lambda_coefficient(
    m: u32,
    n: u32,
    chi: f64,
    gamma: f64,
    t: f64,
    re: *mut f64,
    im: *mut f64,
) -> KerrsimStatus {
    if re.is_null() || im.is_null() {
        return KerrsimStatus::NullPointer;
    }
    match ChannelParams::new(chi, gamma, t) {
        Ok(p) => {
            let v = lambda_coefficient(m as usize, n as usize, p);
            *re = v.re;
            *im = v.im;
            KerrsimStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Deviation of the generalized-Kraus completeness sum from the identity.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kerrsim_completeness_residual(
    dim: u32,
    chi: f64,
    gamma: f64,
    t: f64,
    out: *mut f64,
) -> KerrsimStatus {
    if out.is_null() {
        return KerrsimStatus::NullPointer;
    }
    let result = Truncation::new(dim as usize)
        .and_then(|trunc| ChannelParams::new(chi, gamma, t).map(|p| (trunc, p)));
    match result {
        Ok((trunc, p)) => {
            *out = completeness_residual(trunc, p);
            KerrsimStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}
