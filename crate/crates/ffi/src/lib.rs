//! C ABI for `mzbath`.
//!
//! Objects are opaque heap handles created by `*_new` and released by the
//! matching `*_free`. Every fallible call returns an [`MzStatus`]; on failure
//! the message is kept per thread and can be read with
//! [`mz_last_error_message`]. Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use mzbath::bath::{self, BathParameters};
use mzbath::interferometer::{self, InterferometerConfig};
use mzbath::qmath::{self, DensityMatrix};
use mzbath::{thermo, Error};
use num_complex::Complex64;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MzStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Domain = 3,
    Quadrature = 4,
    StepSize = 5,
    Trace = 6,
    Positivity = 7,
    Support = 8,
    CrossCheck = 9,
    Io = 10,
    Panic = 11,
}

impl From<&Error> for MzStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Config { .. } => MzStatus::Config,
            Error::Domain(_) => MzStatus::Domain,
            Error::Quadrature(_) => MzStatus::Quadrature,
            Error::StepSize { .. } => MzStatus::StepSize,
            Error::Trace { .. } => MzStatus::Trace,
            Error::Positivity { .. } => MzStatus::Positivity,
            Error::Support(_) => MzStatus::Support,
            Error::CrossCheck(_) => MzStatus::CrossCheck,
            Error::Io(_) => MzStatus::Io,
        }
    }
}

/// Opaque 2×2 density matrix.
pub struct MzDensityMatrix(DensityMatrix);

/// Opaque bath parameter set.
pub struct MzBath(BathParameters);

/// Opaque interferometer configuration.
pub struct MzInterferometer(InterferometerConfig);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MzStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            MzStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            MzStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            MzStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write<T>(p: *mut T, v: T, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(v);
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or
/// 0 when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn mz_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Build a density matrix from row-major real and imaginary parts.
///
/// # Safety
/// `re` and `im` must point to 4 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mz_density_matrix_new(
    re: *const f64,
    im: *const f64,
    out: *mut *mut MzDensityMatrix,
) -> MzStatus {
    guard(|| {
        let re = slice(re, 4, "re")?;
        let im = slice(im, 4, "im")?;
        let m = [
            [Complex64::new(re[0], im[0]), Complex64::new(re[1], im[1])],
            [Complex64::new(re[2], im[2]), Complex64::new(re[3], im[3])],
        ];
        let dm = DensityMatrix::new(m)?;
        write(out, Box::into_raw(Box::new(MzDensityMatrix(dm))), "out")
    })
}

/// # Safety
/// `dm` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mz_density_matrix_free(dm: *mut MzDensityMatrix) {
    if !dm.is_null() {
        drop(Box::from_raw(dm));
    }
}

/// Row-major elements into `re[4]` and `im[4]`.
///
/// # Safety
/// `dm` must be a live handle; `re`, `im` must be writable for 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn mz_density_matrix_elements(
    dm: *const MzDensityMatrix,
    re: *mut f64,
    im: *mut f64,
) -> MzStatus {
    guard(|| {
        let m = deref(dm, "dm")?.0.elements();
        let re = slice_mut(re, 4, "re")?;
        let im = slice_mut(im, 4, "im")?;
        for (k, z) in m.iter().flatten().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Von Neumann entropy in bits.
///
/// # Safety
/// `dm` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mz_von_neumann_entropy(dm: *const MzDensityMatrix, out: *mut f64) -> MzStatus {
    guard(|| write(out, qmath::von_neumann_entropy(&deref(dm, "dm")?.0), "out"))
}

/// Distillable coherence S(Ξ[ρ]) − S(ρ) in bits.
///
/// # Safety
/// `dm` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mz_distillable_coherence(dm: *const MzDensityMatrix, out: *mut f64) -> MzStatus {
    guard(|| write(out, qmath::distillable_coherence(&deref(dm, "dm")?.0), "out"))
}

/// Mixedness 1 − Tr ρ².
///
/// # Safety
/// `dm` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mz_mixedness(dm: *const MzDensityMatrix, out: *mut f64) -> MzStatus {
    guard(|| write(out, qmath::mixedness(&deref(dm, "dm")?.0), "out"))
}

/// Relative entropy S(ρ‖σ) in bits; `MZ_STATUS_SUPPORT` when undefined.
///
/// # Safety
/// `rho`, `sigma` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mz_relative_entropy(
    rho: *const MzDensityMatrix,
    sigma: *const MzDensityMatrix,
    out: *mut f64,
) -> MzStatus {
    guard(|| {
        let v = qmath::relative_entropy(&deref(rho, "rho")?.0, &deref(sigma, "sigma")?.0)?;
        write(out, v, "out")
    })
}

/// Bath with temperature in K and cutoff, system frequency in s⁻¹.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mz_bath_new(
    temperature: f64,
    cutoff: f64,
    coupling: f64,
    system_frequency: f64,
    out: *mut *mut MzBath,
) -> MzStatus {
    guard(|| {
        let b = BathParameters::new(temperature, cutoff, coupling, system_frequency)?;
        write(out, Box::into_raw(Box::new(MzBath(b))), "out")
    })
}

/// # Safety
/// `b` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mz_bath_free(b: *mut MzBath) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Markov rate Γ and mean occupation n̄.
///
/// # Safety
/// `b` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn mz_bath_markov(b: *const MzBath, rate: *mut f64, occupation: *mut f64) -> MzStatus {
    guard(|| {
        let m = bath::markov_parameters(&deref(b, "bath")?.0);
        write(rate, m.rate, "rate")?;
        write(occupation, m.occupation, "occupation")
    })
}

/// J(ω).
///
/// # Safety
/// `b` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mz_spectral_density(b: *const MzBath, omega: f64, out: *mut f64) -> MzStatus {
    guard(|| write(out, bath::spectral_density(omega, &deref(b, "bath")?.0)?, "out"))
}

/// Noise kernel κ(τ).
///
/// # Safety
/// `b` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mz_noise_kernel(b: *const MzBath, tau: f64, out: *mut f64) -> MzStatus {
    guard(|| write(out, bath::noise_kernel(tau, &deref(b, "bath")?.0)?, "out"))
}

/// Dissipation kernel μ(τ).
///
/// # Safety
/// `b` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mz_dissipation_kernel(b: *const MzBath, tau: f64, out: *mut f64) -> MzStatus {
    guard(|| write(out, bath::dissipation_kernel(tau, &deref(b, "bath")?.0)?, "out"))
}

/// Δ(t), γ(t) on a strictly increasing grid of `len` times.
///
/// # Safety
/// `times` readable and `delta`, `gamma` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mz_transient_coefficients(
    b: *const MzBath,
    times: *const f64,
    len: usize,
    delta: *mut f64,
    gamma: *mut f64,
) -> MzStatus {
    guard(|| {
        let tc = bath::transient_coefficients(&deref(b, "bath")?.0, slice(times, len, "times")?)?;
        slice_mut(delta, len, "delta")?.copy_from_slice(&tc.delta);
        slice_mut(gamma, len, "gamma")?.copy_from_slice(&tc.gamma);
        Ok(())
    })
}

/// Interferometer at phase φ with default pointer geometry for `bath`.
///
/// # Safety
/// `b` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mz_interferometer_new(
    phase: f64,
    b: *const MzBath,
    out: *mut *mut MzInterferometer,
) -> MzStatus {
    guard(|| {
        let b = &deref(b, "bath")?.0;
        let cfg = InterferometerConfig::with_defaults(phase, b.system_frequency, bath::markov_parameters(b));
        cfg.validate()?;
        write(out, Box::into_raw(Box::new(MzInterferometer(cfg))), "out")
    })
}

/// # Safety
/// `cfg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mz_interferometer_free(cfg: *mut MzInterferometer) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// State after BS2 at time `t`; free the result with `mz_density_matrix_free`.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mz_pipeline_state(
    cfg: *const MzInterferometer,
    t: f64,
    out: *mut *mut MzDensityMatrix,
) -> MzStatus {
    guard(|| {
        let rho = interferometer::pipeline_state(&deref(cfg, "cfg")?.0, t)?;
        write(out, Box::into_raw(Box::new(MzDensityMatrix(rho))), "out")
    })
}

/// Click probabilities of detectors D1 and D2 at time `t`.
///
/// # Safety
/// `cfg` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn mz_detector_probabilities(
    cfg: *const MzInterferometer,
    t: f64,
    d1: *mut f64,
    d2: *mut f64,
) -> MzStatus {
    guard(|| {
        let rho = interferometer::pipeline_state(&deref(cfg, "cfg")?.0, t)?;
        let (p1, p2) = interferometer::detector_probabilities(&rho);
        write(d1, p1, "d1")?;
        write(d2, p2, "d2")
    })
}

/// Fringe visibility at time `t`.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mz_fringe_visibility(cfg: *const MzInterferometer, t: f64, out: *mut f64) -> MzStatus {
    guard(|| write(out, interferometer::fringe_visibility(&deref(cfg, "cfg")?.0, t), "out"))
}

/// Pr(P) at `len` momenta.
///
/// # Safety
/// `p` readable and `density` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mz_momentum_distribution(
    cfg: *const MzInterferometer,
    t: f64,
    p: *const f64,
    len: usize,
    density: *mut f64,
) -> MzStatus {
    guard(|| {
        let s = interferometer::momentum_distribution(&deref(cfg, "cfg")?.0, t, slice(p, len, "p")?)?;
        slice_mut(density, len, "density")?.copy_from_slice(&s.density);
        Ok(())
    })
}

/// Closed-form entropy S(η, n̄) in bits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mz_entropy_closed_form(eta: f64, occupation: f64, out: *mut f64) -> MzStatus {
    guard(|| write(out, thermo::entropy_closed_form(eta, occupation)?, "out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes_cover_library_errors() {
        assert_eq!(MzStatus::from(&Error::Domain("x".into())), MzStatus::Domain);
        assert_eq!(MzStatus::from(&Error::Support("x".into())), MzStatus::Support);
        assert_eq!(MzStatus::Ok as i32, 0);
    }

    #[test]
    fn null_output_is_reported() {
        let s = unsafe { mz_entropy_closed_form(0.5, 1.0, std::ptr::null_mut()) };
        assert_eq!(s, MzStatus::NullPointer);
        let n = unsafe { mz_last_error_message(std::ptr::null_mut(), 0) };
        assert!(n > 0);
    }
}
