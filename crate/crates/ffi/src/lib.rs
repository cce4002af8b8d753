//! C ABI for `pdo-core`.
//!
//! Every function returns a [`PdoStatus`]. Results come back through out
//! pointers. Objects are opaque handles released with their `_free`
//! function. Big integers cross the boundary as NUL-terminated decimal
//! strings written into caller buffers; on [`PdoStatus::BufferTooSmall`]
//! the required length (without the NUL) is still stored in `out_len`.
//! The message for the most recent failure on the calling thread is
//! available from [`pdo_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use pdo_core::congruence::{self, CongruenceSpec, Window};
use pdo_core::{etaq, padic, xipoly, Error, XiPoly};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    NotInvertible = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Table of PDO(0), ..., PDO(len - 1).
pub struct PdoTable {
    inner: etaq::PdoTable,
}

/// Polynomial in xi with big integer coefficients.
pub struct PdoPoly {
    inner: XiPoly,
}

/// Outcome of [`pdo_verify`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PdoVerifyResult {
    pub passed: bool,
    pub checked_count: u64,
    /// Meaningful only when `passed` is false.
    pub counterexample_n: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

struct Failure(PdoStatus, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let status = match err {
            Error::NotInvertible(_) => PdoStatus::NotInvertible,
            Error::OracleRange { .. }
            | Error::TableTooShort { .. }
            | Error::UncoveredZFamily { .. }
            | Error::IndexOutOfRange { .. } => PdoStatus::OutOfRange,
            Error::MalformedSpec { .. } | Error::InvalidArgument(_) => PdoStatus::InvalidArgument,
        };
        Failure(status, err.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PdoStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PdoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PdoStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            PdoStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copies `s` plus a NUL into `buf` when it fits; always reports the length.
unsafe fn write_str(
    s: &str,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> Result<(), Failure> {
    *out(out_len, "out_len")? = s.len();
    if cap < s.len() + 1 {
        return Err(Failure(
            PdoStatus::BufferTooSmall,
            format!("buffer holds {cap} bytes, {} needed", s.len() + 1),
        ));
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn pdo_status_str(status: PdoStatus) -> *const c_char {
    let s: &'static CStr = match status {
        PdoStatus::Ok => c"ok",
        PdoStatus::NullPointer => c"null pointer",
        PdoStatus::InvalidArgument => c"invalid argument",
        PdoStatus::OutOfRange => c"out of range",
        PdoStatus::NotInvertible => c"not invertible",
        PdoStatus::BufferTooSmall => c"buffer too small",
        PdoStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// Message of the last failed call on this thread (empty if none).
///
/// # Safety
/// `buf` must point to `cap` writable bytes; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pdo_last_error_message(
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> PdoStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match catch_unwind(AssertUnwindSafe(|| write_str(&msg, buf, cap, out_len))) {
        Ok(Ok(())) => PdoStatus::Ok,
        Ok(Err(Failure(status, _))) => status,
        Err(_) => PdoStatus::Panic,
    }
}

/// Builds PDO(0), ..., PDO(order - 1).
///
/// # Safety
/// `out_table` must be a valid pointer; the handle it receives must be released
/// with [`pdo_table_free`].
#[no_mangle]
pub unsafe extern "C" fn pdo_table_new(order: usize, out_table: *mut *mut PdoTable) -> PdoStatus {
    guard(|| {
        let slot = out(out_table, "out_table")?;
        if order == 0 {
            return Err(Failure(
                PdoStatus::InvalidArgument,
                "order must be >= 1".into(),
            ));
        }
        let table = Box::new(PdoTable {
            inner: etaq::pdo_series(order),
        });
        *slot = Box::into_raw(table);
        Ok(())
    })
}

/// # Safety
/// `table` must be null or a handle from [`pdo_table_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pdo_table_free(table: *mut PdoTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// # Safety
/// `table` must be a live handle; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pdo_table_len(table: *const PdoTable, out_len: *mut usize) -> PdoStatus {
    guard(|| {
        *out(out_len, "out_len")? = handle(table, "table")?.inner.len();
        Ok(())
    })
}

fn table_value(table: &PdoTable, n: usize) -> Result<&BigInt, Failure> {
    table.inner.get(n).ok_or_else(|| {
        Failure(
            PdoStatus::OutOfRange,
            format!("n = {n} beyond table length {}", table.inner.len()),
        )
    })
}

/// PDO(n) as a decimal string.
///
/// # Safety
/// `table` must be a live handle, `buf` must point to `cap` writable bytes
/// and `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pdo_table_value_str(
    table: *const PdoTable,
    n: usize,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> PdoStatus {
    guard(|| {
        let v = table_value(handle(table, "table")?, n)?;
        write_str(&v.to_string(), buf, cap, out_len)
    })
}

/// PDO(n) when it fits in 64 bits, otherwise `OutOfRange`.
///
/// # Safety
/// `table` must be a live handle; `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pdo_table_value_u64(
    table: *const PdoTable,
    n: usize,
    out_value: *mut u64,
) -> PdoStatus {
    guard(|| {
        let slot = out(out_value, "out_value")?;
        let v = table_value(handle(table, "table")?, n)?;
        *slot = v
            .to_u64()
            .ok_or_else(|| Failure(PdoStatus::OutOfRange, format!("PDO({n}) exceeds 64 bits")))?;
        Ok(())
    })
}

/// Checks `PDO(lhs_stride n + lhs_offset) == PDO(rhs_stride n) (mod modulus)`
/// for `start <= n < end`. `rhs_stride = 0` compares with 0 instead.
///
/// # Safety
/// `table` must be a live handle; `out_result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pdo_verify(
    table: *const PdoTable,
    lhs_stride: u64,
    lhs_offset: u64,
    rhs_stride: u64,
    modulus: u64,
    start: u64,
    end: u64,
    out_result: *mut PdoVerifyResult,
) -> PdoStatus {
    guard(|| {
        let slot = out(out_result, "out_result")?;
        let table = handle(table, "table")?;
        let window = Window::new(start, end);
        let mut spec = if rhs_stride == 0 {
            CongruenceSpec::vanishing(lhs_stride, lhs_offset, modulus, window)?
        } else {
            CongruenceSpec::internal(lhs_stride, rhs_stride, modulus, window)?
        };
        spec.lhs_offset = lhs_offset;
        let report = congruence::verify(&spec, &table.inner)?;
        *slot = PdoVerifyResult {
            passed: report.passed(),
            checked_count: report.checked_count,
            counterexample_n: report.counterexample.map_or(0, |c| c.n),
        };
        Ok(())
    })
}

/// Least xi-degree of `Phi_k`.
///
/// # Safety
/// `out_tau` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pdo_tau(k: u32, out_tau: *mut u64) -> PdoStatus {
    guard(|| {
        *out(out_tau, "out_tau")? = padic::tau(k)?;
        Ok(())
    })
}

unsafe fn emit_poly(p: Result<XiPoly, Error>, out_poly: *mut *mut PdoPoly) -> Result<(), Failure> {
    let slot = out(out_poly, "out_poly")?;
    *slot = Box::into_raw(Box::new(PdoPoly { inner: p? }));
    Ok(())
}

/// # Safety
/// `out_poly` must be valid; release the handle with [`pdo_poly_free`].
#[no_mangle]
pub unsafe extern "C" fn pdo_poly_zeta(i: u32, j: u32, out_poly: *mut *mut PdoPoly) -> PdoStatus {
    guard(|| {
        if i > 64 || j > 64 {
            return Err(Failure(
                PdoStatus::OutOfRange,
                "zeta indices above 64".into(),
            ));
        }
        emit_poly(Ok(xipoly::zeta(i, j)), out_poly)
    })
}

/// # Safety
/// As [`pdo_poly_zeta`].
#[no_mangle]
pub unsafe extern "C" fn pdo_poly_lambda(k: u32, out_poly: *mut *mut PdoPoly) -> PdoStatus {
    guard(|| emit_poly(xipoly::lambda_poly(k), out_poly))
}

/// # Safety
/// As [`pdo_poly_zeta`].
#[no_mangle]
pub unsafe extern "C" fn pdo_poly_phi(k: u32, out_poly: *mut *mut PdoPoly) -> PdoStatus {
    guard(|| emit_poly(xipoly::phi_poly(k), out_poly))
}

/// # Safety
/// As [`pdo_poly_zeta`].
#[no_mangle]
pub unsafe extern "C" fn pdo_poly_gamma6(out_poly: *mut *mut PdoPoly) -> PdoStatus {
    guard(|| emit_poly(Ok(xipoly::gamma6_poly()), out_poly))
}

/// # Safety
/// `poly` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pdo_poly_free(poly: *mut PdoPoly) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// Number of nonzero terms.
///
/// # Safety
/// `poly` must be a live handle; `out_count` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pdo_poly_term_count(
    poly: *const PdoPoly,
    out_count: *mut usize,
) -> PdoStatus {
    guard(|| {
        *out(out_count, "out_count")? = handle(poly, "poly")?.inner.term_count();
        Ok(())
    })
}

/// Top degree; `OutOfRange` for the zero polynomial.
///
/// # Safety
/// `poly` must be a live handle; `out_degree` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pdo_poly_degree(poly: *const PdoPoly, out_degree: *mut u32) -> PdoStatus {
    guard(|| {
        let slot = out(out_degree, "out_degree")?;
        *slot = handle(poly, "poly")?.inner.degree().ok_or_else(|| {
            Failure(
                PdoStatus::OutOfRange,
                "zero polynomial has no degree".into(),
            )
        })?;
        Ok(())
    })
}

/// The `index`-th nonzero term in ascending degree.
///
/// # Safety
/// `poly` must be a live handle, `out_degree` and `out_len` valid, and
/// `buf` must point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pdo_poly_term(
    poly: *const PdoPoly,
    index: usize,
    out_degree: *mut u32,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> PdoStatus {
    guard(|| {
        let p = &handle(poly, "poly")?.inner;
        let (deg, c) = p.terms().nth(index).ok_or_else(|| {
            Failure(
                PdoStatus::OutOfRange,
                format!("term {index} of {}", p.term_count()),
            )
        })?;
        *out(out_degree, "out_degree")? = deg;
        write_str(&c.to_string(), buf, cap, out_len)
    })
}

/// Coefficient of `xi^degree` (possibly "0").
///
/// # Safety
/// As [`pdo_poly_term`].
#[no_mangle]
pub unsafe extern "C" fn pdo_poly_coeff_str(
    poly: *const PdoPoly,
    degree: u32,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> PdoStatus {
    guard(|| {
        let c = handle(poly, "poly")?.inner.coeff(degree);
        write_str(&c.to_string(), buf, cap, out_len)
    })
}
