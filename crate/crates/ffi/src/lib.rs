//! C ABI over the `ldgm` encoder.
//!
//! Codes are passed around as opaque `LdgmCode*` handles created by
//! `ldgm_code_generate*` or `ldgm_code_load` and released with
//! `ldgm_code_free`. Every fallible call returns an `LdgmStatus`; on failure
//! `ldgm_last_error_message` describes the most recent error on the calling
//! thread. Bit buffers are `uint8_t` arrays holding 0 or 1 per entry.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ldgm::mrf::gamma_for_rate;
use ldgm::{bench, code, CleanupRule, DecimationPolicy, DegreeDistribution, Error, MpParams, Weights};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdgmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    Io = 4,
    Parse = 5,
    Infeasible = 6,
    Contradiction = 7,
    Panic = 8,
}

/// Opaque code handle.
pub struct LdgmCode(code::LdgmCode);

/// Encoder settings. `gamma` set to NaN selects the rate-based default.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdgmEncodeParams {
    pub w_sou: f64,
    pub w_info: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub bias_threshold: f64,
    pub max_fix_fraction: f64,
    pub min_fix_count: usize,
    /// Nonzero sets leftover free bits to 0 instead of their argmax.
    pub zero_fill: u8,
    /// Nonzero reinitializes messages every round.
    pub reinit: u8,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LdgmEncodeResult {
    pub distortion: f64,
    pub rounds: usize,
    pub total_iterations: usize,
    pub residual_free: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> LdgmStatus {
    match e {
        Error::LengthMismatch { .. } => LdgmStatus::LengthMismatch,
        Error::Io { .. } => LdgmStatus::Io,
        Error::Parse { .. } | Error::Malformed(_) => LdgmStatus::Parse,
        Error::Infeasible(_) | Error::InvalidDistribution(_) => LdgmStatus::Infeasible,
        Error::Contradiction(_) => LdgmStatus::Contradiction,
        _ => LdgmStatus::InvalidArgument,
    }
}

struct Fail(LdgmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(LdgmStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LdgmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LdgmStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LdgmStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a>(h: *const LdgmCode) -> Result<&'a code::LdgmCode, Fail> {
    h.as_ref().map(|c| &c.0).ok_or_else(|| null("code handle"))
}

unsafe fn path_arg(p: *const c_char) -> Result<String, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Fail(LdgmStatus::InvalidArgument, "path is not UTF-8".into()))
}

fn expect_len(expected: usize, actual: usize) -> Result<(), Fail> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual }.into())
    }
}

unsafe fn store(out: *mut *mut LdgmCode, c: code::LdgmCode) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(LdgmCode(c)));
    Ok(())
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ldgm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Default encoder settings for a code of the given rate.
#[no_mangle]
pub extern "C" fn ldgm_default_encode_params(rate: f64) -> LdgmEncodeParams {
    let mp = MpParams::default();
    let policy = DecimationPolicy::default();
    LdgmEncodeParams {
        w_sou: Weights::DEFAULT_W_SOU,
        w_info: Weights::DEFAULT_W_INFO,
        gamma: gamma_for_rate(rate),
        alpha: mp.alpha,
        tol: mp.tol,
        max_iters: mp.max_iters,
        bias_threshold: policy.bias_threshold,
        max_fix_fraction: policy.max_fix_fraction,
        min_fix_count: policy.min_fix_count,
        zero_fill: 0,
        reinit: 0,
        seed: 0,
    }
}

/// Samples a code with `n` source bits at `rate` from the given degree
/// classes (`*_degrees[k]` occurs with fraction `*_fractions[k]`).
///
/// # Safety
/// Array arguments must point to at least the stated number of elements and
/// `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ldgm_code_generate(
    n: usize,
    rate: f64,
    info_degrees: *const usize,
    info_fractions: *const f64,
    info_len: usize,
    check_degrees: *const usize,
    check_fractions: *const f64,
    check_len: usize,
    seed: u64,
    out: *mut *mut LdgmCode,
) -> LdgmStatus {
    guard(|| {
        let pairs = |d: &[usize], f: &[f64]| d.iter().copied().zip(f.iter().copied()).collect::<Vec<_>>();
        let info = pairs(
            slice(info_degrees, info_len, "info_degrees")?,
            slice(info_fractions, info_len, "info_fractions")?,
        );
        let check = pairs(
            slice(check_degrees, check_len, "check_degrees")?,
            slice(check_fractions, check_len, "check_fractions")?,
        );
        let dist = DegreeDistribution::new(info, check)?;
        store(out, code::generate_code(n, rate, &dist, seed)?)
    })
}

/// Samples a code from the built-in degree distribution for `rate`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldgm_code_generate_default(
    n: usize,
    rate: f64,
    seed: u64,
    out: *mut *mut LdgmCode,
) -> LdgmStatus {
    guard(|| {
        let dist = bench::default_distribution(rate)?;
        store(out, code::generate_code(n, rate, &dist, seed)?)
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ldgm_code_load(path: *const c_char, out: *mut *mut LdgmCode) -> LdgmStatus {
    guard(|| {
        let p = path_arg(path)?;
        store(out, code::load_code(p)?)
    })
}

/// # Safety
/// `code` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ldgm_code_save(code: *const LdgmCode, path: *const c_char) -> LdgmStatus {
    guard(|| {
        let c = handle(code)?;
        let p = path_arg(path)?;
        code::save_code(c, p)?;
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `code` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ldgm_code_free(code: *mut LdgmCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Number of source bits, 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldgm_code_n(code: *const LdgmCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.n())
}

/// Number of information bits, 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ldgm_code_m(code: *const LdgmCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.m())
}

/// Writes the reconstruction `A x` (length n) to `y_out`.
///
/// # Safety
/// `x` must hold `x_len` bytes and `y_out` must have room for `y_len`.
#[no_mangle]
pub unsafe extern "C" fn ldgm_decode(
    code: *const LdgmCode,
    x: *const u8,
    x_len: usize,
    y_out: *mut u8,
    y_len: usize,
) -> LdgmStatus {
    guard(|| {
        let c = handle(code)?;
        expect_len(c.m(), x_len)?;
        expect_len(c.n(), y_len)?;
        let y = code::decode(c, slice(x, x_len, "x")?)?;
        slice_mut(y_out, y_len, "y_out")?.copy_from_slice(&y);
        Ok(())
    })
}

/// Encodes the source `y` (length n) into `x_out` (length m). `params` may
/// be null for the defaults of the code's rate; `result` may be null.
///
/// # Safety
/// Buffers must hold the stated lengths; non-null pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ldgm_encode(
    code: *const LdgmCode,
    y: *const u8,
    y_len: usize,
    params: *const LdgmEncodeParams,
    x_out: *mut u8,
    x_len: usize,
    result: *mut LdgmEncodeResult,
) -> LdgmStatus {
    guard(|| {
        let c = handle(code)?;
        expect_len(c.n(), y_len)?;
        expect_len(c.m(), x_len)?;
        let p = params.as_ref().copied().unwrap_or_else(|| ldgm_default_encode_params(c.rate()));
        let gamma = if p.gamma.is_nan() { gamma_for_rate(c.rate()) } else { p.gamma };
        let w = Weights::new(p.w_sou, p.w_info, gamma)?;
        let mp = MpParams {
            alpha: p.alpha,
            tol: p.tol,
            max_iters: p.max_iters,
        };
        let policy = DecimationPolicy {
            bias_threshold: p.bias_threshold,
            max_fix_fraction: p.max_fix_fraction,
            min_fix_count: p.min_fix_count,
            cleanup_rule: if p.zero_fill != 0 {
                CleanupRule::ZeroFill
            } else {
                CleanupRule::ArgmaxMu
            },
            warm_start: p.reinit == 0,
            stop_bias: None,
        };
        let (x, stats) = ldgm::encode(c, slice(y, y_len, "y")?, &w, &mp, &policy, p.seed)?;
        slice_mut(x_out, x_len, "x_out")?.copy_from_slice(&x);
        if let Some(r) = result.as_mut() {
            *r = LdgmEncodeResult {
                distortion: stats.distortion,
                rounds: stats.rounds,
                total_iterations: stats.total_iterations,
                residual_free: stats.residual_free,
            };
        }
        Ok(())
    })
}

/// Fraction of positions where `a` and `b` differ.
///
/// # Safety
/// `a` and `b` must hold `len` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldgm_distortion(a: *const u8, b: *const u8, len: usize, out: *mut f64) -> LdgmStatus {
    guard(|| {
        let d = ldgm::distortion(slice(a, len, "a")?, slice(b, len, "b")?)?;
        *out.as_mut().ok_or_else(|| null("out"))? = d;
        Ok(())
    })
}

/// Shannon distortion bound at `rate` for a fair binary source.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldgm_shannon_distortion(rate: f64, out: *mut f64) -> LdgmStatus {
    guard(|| {
        let d = bench::shannon_distortion(rate)?;
        *out.as_mut().ok_or_else(|| null("out"))? = d;
        Ok(())
    })
}
