//! C ABI over `ci_count`.
//!
//! Every fallible call returns a [`CiStatus`]; on failure the message is
//! available from [`ci_last_error_message`] on the same thread. Handles are
//! opaque and released with their `_free` function. Strings returned by the
//! library are released with [`ci_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ci_count::asymptotics::{self, EvalMode};
use ci_count::{
    census, classify, walsh_transform, BooleanFunction, CensusOptions, CensusTable, Error,
    WalshSpectrum,
};

/// Result of a call. `CI_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CiStatus {
    CiOk = 0,
    CiNullPointer = 1,
    CiInvalidUtf8 = 2,
    CiRangeError = 3,
    CiCapacityError = 4,
    CiShapeError = 5,
    CiDuplicateRow = 6,
    CiBudgetExceeded = 7,
    CiDomainError = 8,
    CiStructureError = 9,
    CiParseError = 10,
    CiIoError = 11,
    CiPanic = 12,
}

impl From<&Error> for CiStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Range(_) => CiStatus::CiRangeError,
            Error::Capacity(_) => CiStatus::CiCapacityError,
            Error::Shape(_) => CiStatus::CiShapeError,
            Error::DuplicateRow(_) => CiStatus::CiDuplicateRow,
            Error::BudgetExceeded(_) => CiStatus::CiBudgetExceeded,
            Error::Domain(_) => CiStatus::CiDomainError,
            Error::Structure(_) => CiStatus::CiStructureError,
            Error::Parse(_) => CiStatus::CiParseError,
            Error::Io(_) => CiStatus::CiIoError,
        }
    }
}

/// Spectral summary of one function.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CiProfile {
    pub weight: u64,
    pub ci_order: u32,
    pub q_at_order: u64,
    /// `-1` unless the function is balanced.
    pub resilient_order: i32,
}

/// Opaque boolean function.
pub struct CiBoolFn(BooleanFunction);

/// Opaque Walsh spectrum.
pub struct CiSpectrum(WalshSpectrum);

/// Opaque census table.
pub struct CiCensus(CensusTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, recording failures and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (CiStatus, String)>) -> CiStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CiStatus::CiOk,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside ci_count".into());
            CiStatus::CiPanic
        }
    }
}

fn lib<T>(r: ci_count::Result<T>) -> Result<T, (CiStatus, String)> {
    r.map_err(|e| (CiStatus::from(&e), e.to_string()))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), (CiStatus, String)> {
    if p.is_null() {
        Err((CiStatus::CiNullPointer, format!("{what} is NULL")))
    } else {
        Ok(())
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ci_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ci_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ci_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a truth table given as `2^n` bits (index 0 first) or as hex.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ci_boolfn_parse(
    n: u32,
    text: *const c_char,
    out: *mut *mut CiBoolFn,
) -> CiStatus {
    guard(|| {
        non_null(text, "text")?;
        non_null(out, "out")?;
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| (CiStatus::CiInvalidUtf8, e.to_string()))?;
        let f = lib(BooleanFunction::parse(n, s))?;
        *out = Box::into_raw(Box::new(CiBoolFn(f)));
        Ok(())
    })
}

/// Builds a function from `2^n` bytes, nonzero meaning 1.
///
/// # Safety
/// `values` must point to `len` readable bytes and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn ci_boolfn_from_values(
    n: u32,
    values: *const u8,
    len: usize,
    out: *mut *mut CiBoolFn,
) -> CiStatus {
    guard(|| {
        non_null(values, "values")?;
        non_null(out, "out")?;
        if n == 0 || n > 24 || len != 1usize << n {
            return Err((
                CiStatus::CiShapeError,
                format!("expected 2^{n} values, got {len}"),
            ));
        }
        let v = std::slice::from_raw_parts(values, len);
        let f = lib(BooleanFunction::from_fn(n, |y| v[y as usize] != 0))?;
        *out = Box::into_raw(Box::new(CiBoolFn(f)));
        Ok(())
    })
}

/// # Safety
/// `f` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ci_boolfn_free(f: *mut CiBoolFn) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ci_boolfn_weight(f: *const CiBoolFn, out: *mut u64) -> CiStatus {
    guard(|| {
        non_null(f, "f")?;
        non_null(out, "out")?;
        *out = (*f).0.weight();
        Ok(())
    })
}

/// # Safety
/// `f` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ci_boolfn_classify(f: *const CiBoolFn, out: *mut CiProfile) -> CiStatus {
    guard(|| {
        non_null(f, "f")?;
        non_null(out, "out")?;
        let p = classify(&(*f).0);
        *out = CiProfile {
            weight: p.weight,
            ci_order: p.ci_order,
            q_at_order: p.q_at_order,
            resilient_order: p.resilient_order,
        };
        Ok(())
    })
}

/// Hex rendering of the truth table; release with [`ci_string_free`].
///
/// # Safety
/// `f` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ci_boolfn_to_hex(f: *const CiBoolFn, out: *mut *mut c_char) -> CiStatus {
    guard(|| {
        non_null(f, "f")?;
        non_null(out, "out")?;
        *out = CString::new((*f).0.to_hex_string())
            .expect("hex has no NUL")
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `f` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ci_boolfn_walsh(
    f: *const CiBoolFn,
    out: *mut *mut CiSpectrum,
) -> CiStatus {
    guard(|| {
        non_null(f, "f")?;
        non_null(out, "out")?;
        *out = Box::into_raw(Box::new(CiSpectrum(walsh_transform(&(*f).0))));
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ci_spectrum_free(s: *mut CiSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of coefficients, `2^n`; 0 for NULL.
///
/// # Safety
/// `s` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn ci_spectrum_len(s: *const CiSpectrum) -> usize {
    if s.is_null() {
        0
    } else {
        (*s).0.coeffs().len()
    }
}

/// Copies up to `cap` coefficients into `buf`; writes the full length to
/// `written`.
///
/// # Safety
/// `s` and `written` must be valid and `buf` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn ci_spectrum_copy(
    s: *const CiSpectrum,
    buf: *mut i64,
    cap: usize,
    written: *mut usize,
) -> CiStatus {
    guard(|| {
        non_null(s, "s")?;
        non_null(written, "written")?;
        let coeffs = (*s).0.coeffs();
        *written = coeffs.len();
        if cap < coeffs.len() {
            return Err((
                CiStatus::CiShapeError,
                format!("buffer holds {cap}, need {}", coeffs.len()),
            ));
        }
        non_null(buf, "buf")?;
        ptr::copy_nonoverlapping(coeffs.as_ptr(), buf, coeffs.len());
        Ok(())
    })
}

/// Exact census `q ↦ N(n,k,q)` with `workers` threads.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ci_census(
    n: u32,
    k: u32,
    workers: u32,
    out: *mut *mut CiCensus,
) -> CiStatus {
    guard(|| {
        non_null(out, "out")?;
        let table = lib(census(n, k, &CensusOptions::with_workers(workers as usize)))?;
        *out = Box::into_raw(Box::new(CiCensus(table)));
        Ok(())
    })
}

/// # Safety
/// `c` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ci_census_free(c: *mut CiCensus) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// `N(n,k,q)`; 0 for `q` outside the table.
///
/// # Safety
/// `c` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ci_census_count(c: *const CiCensus, q: u64, out: *mut u64) -> CiStatus {
    guard(|| {
        non_null(c, "c")?;
        non_null(out, "out")?;
        *out = (*c).0.count(q);
        Ok(())
    })
}

/// Sum over all `q`.
///
/// # Safety
/// `c` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ci_census_total(c: *const CiCensus, out: *mut u64) -> CiStatus {
    guard(|| {
        non_null(c, "c")?;
        non_null(out, "out")?;
        *out = (*c).0.total;
        Ok(())
    })
}

/// CSV with header `n,k,q,weight,count`; release with [`ci_string_free`].
///
/// # Safety
/// `c` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ci_census_to_csv(c: *const CiCensus, out: *mut *mut c_char) -> CiStatus {
    guard(|| {
        non_null(c, "c")?;
        non_null(out, "out")?;
        *out = CString::new((*c).0.to_csv())
            .expect("csv has no NUL")
            .into_raw();
        Ok(())
    })
}

/// Closed forms available through [`ci_estimate_log2`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CiMethod {
    CiMethodMain = 0,
    CiMethodResilient = 1,
    CiMethodNk = 2,
    CiMethodDenisov = 3,
    CiMethodK1Exact = 4,
    CiMethodK1LogSpace = 5,
    CiMethodSmallQ = 6,
}

impl TryFrom<u32> for CiMethod {
    type Error = (CiStatus, String);

    fn try_from(v: u32) -> Result<Self, Self::Error> {
        Ok(match v {
            0 => CiMethod::CiMethodMain,
            1 => CiMethod::CiMethodResilient,
            2 => CiMethod::CiMethodNk,
            3 => CiMethod::CiMethodDenisov,
            4 => CiMethod::CiMethodK1Exact,
            5 => CiMethod::CiMethodK1LogSpace,
            6 => CiMethod::CiMethodSmallQ,
            _ => return Err((CiStatus::CiRangeError, format!("unknown method {v}"))),
        })
    }
}

/// `log2` of the estimate selected by `method`, one of the [`CiMethod`]
/// values. `q` is ignored by the methods that do not take it; `valid`
/// (optional) receives the admissibility flag.
///
/// # Safety
/// `out` must be valid; `valid` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ci_estimate_log2(
    method: u32,
    n: u32,
    k: u32,
    q: u64,
    out: *mut f64,
    valid: *mut bool,
) -> CiStatus {
    guard(|| {
        non_null(out, "out")?;
        let e = lib(match CiMethod::try_from(method)? {
            CiMethod::CiMethodMain => {
                asymptotics::params(n, k, q).and_then(|p| asymptotics::estimate_main(&p))
            }
            CiMethod::CiMethodResilient => asymptotics::estimate_resilient(n, k),
            CiMethod::CiMethodNk => asymptotics::estimate_nk(n, k),
            CiMethod::CiMethodDenisov => asymptotics::estimate_denisov(n, k),
            CiMethod::CiMethodK1Exact => asymptotics::estimate_k1_exact_form(n, q, EvalMode::Exact),
            CiMethod::CiMethodK1LogSpace => {
                asymptotics::estimate_k1_exact_form(n, q, EvalMode::LogSpace)
            }
            CiMethod::CiMethodSmallQ => asymptotics::estimate_small_q(n, q),
        })?;
        *out = e.log2_value;
        if !valid.is_null() {
            *valid = e.valid;
        }
        Ok(())
    })
}

/// Number of Hadamard matrices of the given order; orders above 4 need
/// `allow_large`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ci_hadamard_count(
    order: u32,
    allow_large: bool,
    out: *mut u64,
) -> CiStatus {
    guard(|| {
        non_null(out, "out")?;
        let h = lib(ci_count::hadamard::count_hadamard(
            order as usize,
            allow_large,
        ))?;
        *out = u64::try_from(h).map_err(|_| {
            (
                CiStatus::CiCapacityError,
                format!("H_{order} exceeds 64 bits"),
            )
        })?;
        Ok(())
    })
}
