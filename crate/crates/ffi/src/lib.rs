//! C interface to `macpolar`.
//!
//! Channels live behind the opaque `MpMac` handle. Every fallible call
//! returns an `MpStatus`; on failure a description is available from
//! `mp_last_error` on the same thread until the next failing call.
//! Strings returned by the library are released with `mp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use macpolar::compat;
use macpolar::io::ChannelFile;
use macpolar::polarize::{self, SynthesisOptions};
use macpolar::report;
use macpolar::{Error, Mac, SignSequence, Tolerances, UserSet};

/// Opaque channel handle.
pub struct MpMac(Mac);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidChannel = 4,
    InvalidArgument = 5,
    Io = 6,
    Internal = 7,
}

/// Numerical thresholds; pass `NULL` wherever accepted to use the defaults
/// (1e-9, 1e-7, 1e-6).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MpTolerances {
    pub zero: f64,
    pub ratio: f64,
    pub oracle: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> MpStatus {
    match e {
        Error::Parse(_) => MpStatus::Parse,
        Error::InvalidChannel(_) | Error::NonFinite(_) | Error::InvalidGroup(_) => {
            MpStatus::InvalidChannel
        }
        Error::Io(_) => MpStatus::Io,
        _ => MpStatus::InvalidArgument,
    }
}

struct Failure(MpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Outcome) -> MpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            MpStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(MpStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(MpStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn mac_arg<'a>(p: *const MpMac) -> Result<&'a Mac, Failure> {
    p.as_ref().map(|m| &m.0).ok_or_else(|| null("channel"))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Outcome {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn tolerances(p: *const MpTolerances) -> Result<Tolerances, Failure> {
    let Some(t) = p.as_ref() else {
        return Ok(Tolerances::default());
    };
    if ![t.zero, t.ratio, t.oracle].iter().all(|v| v.is_finite() && *v > 0.0) {
        return Err(Failure(MpStatus::InvalidArgument, format!("tolerances must be positive: {t:?}")));
    }
    Ok(Tolerances { zero: t.zero, ratio: t.ratio, oracle: t.oracle })
}

fn proper_subset(mac: &Mac, mask: u32) -> Result<UserSet, Failure> {
    let set = UserSet::from_mask(mask);
    let full = UserSet::full(mac.users());
    if set.is_empty() || !set.is_subset_of(full) || set == full {
        return Err(Failure(
            MpStatus::InvalidArgument,
            format!("mask {mask:#b} is not a proper nonempty user set of a {}-user channel", mac.users()),
        ));
    }
    Ok(set)
}

fn boxed(mac: Mac) -> *mut MpMac {
    Box::into_raw(Box::new(MpMac(mac)))
}

/// Message of the last failed call on this thread, or `NULL`. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a channel from JSON text in the channel-file format.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mp_mac_from_json(json: *const c_char, out: *mut *mut MpMac) -> MpStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let mac = ChannelFile::from_json(text)?.to_mac()?;
        write(out, boxed(mac), "out")
    })
}

/// Loads a channel file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mp_mac_load(path: *const c_char, out: *mut *mut MpMac) -> MpStatus {
    guard(|| {
        let mac = macpolar::io::load(str_arg(path, "path")?)?;
        write(out, boxed(mac), "out")
    })
}

/// Releases a handle. `NULL` is ignored.
///
/// # Safety
/// `mac` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mp_mac_free(mac: *mut MpMac) {
    if !mac.is_null() {
        drop(Box::from_raw(mac));
    }
}

/// # Safety
/// `mac` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mp_mac_num_users(mac: *const MpMac, out: *mut usize) -> MpStatus {
    guard(|| write(out, mac_arg(mac)?.users(), "out"))
}

/// # Safety
/// `mac` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mp_mac_output_size(mac: *const MpMac, out: *mut usize) -> MpStatus {
    guard(|| write(out, mac_arg(mac)?.output_size(), "out"))
}

/// `I_S(W)` in bits for the user set with bitmask `mask` (bit 0 is user 1).
///
/// # Safety
/// `mac` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mp_mac_mutual_info(mac: *const MpMac, mask: u32, out: *mut f64) -> MpStatus {
    guard(|| {
        let v = mac_arg(mac)?.mutual_info(UserSet::from_mask(mask))?;
        write(out, v, "out")
    })
}

/// Synthesizes `W^s` for a sign sequence such as `"-+"`, merging
/// equivalent outputs when `merge` is set. Depth is capped at 3.
///
/// # Safety
/// `mac`, `out` must be valid pointers and `seq` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mp_mac_synthesize(
    mac: *const MpMac,
    seq: *const c_char,
    merge: bool,
    out: *mut *mut MpMac,
) -> MpStatus {
    guard(|| {
        let w = mac_arg(mac)?;
        let seq: SignSequence = str_arg(seq, "seq")?.parse()?;
        let opts = if merge { SynthesisOptions::default() } else { SynthesisOptions::unmerged() };
        let synthesized = polarize::synthesize(w, &seq, &opts)?;
        write(out, boxed(synthesized), "out")
    })
}

/// Whether polarization preserves `I_S` for one proper user set.
///
/// # Safety
/// `mac` and `compatible` must be valid pointers; `tol` may be `NULL`.
#[no_mangle]
pub unsafe extern "C" fn mp_check_subset(
    mac: *const MpMac,
    mask: u32,
    tol: *const MpTolerances,
    compatible: *mut bool,
) -> MpStatus {
    guard(|| {
        let w = mac_arg(mac)?;
        let set = proper_subset(w, mask)?;
        let check = compat::check_subset(w, set, &tolerances(tol)?)?;
        write(compatible, check.report.is_compatible(), "compatible")
    })
}

/// Whether polarization preserves the whole capacity region.
///
/// # Safety
/// `mac` and `preserved` must be valid pointers; `tol` may be `NULL`.
#[no_mangle]
pub unsafe extern "C" fn mp_check_region(
    mac: *const MpMac,
    tol: *const MpTolerances,
    preserved: *mut bool,
) -> MpStatus {
    guard(|| {
        let region = compat::check_region(mac_arg(mac)?, &tolerances(tol)?)?;
        write(preserved, region.preserved(), "preserved")
    })
}

/// Full check report as JSON, for one proper user set or for every proper
/// set when `mask` is 0. Release the result with `mp_string_free`.
///
/// # Safety
/// `mac` and `out` must be valid pointers; `tol` may be `NULL`.
#[no_mangle]
pub unsafe extern "C" fn mp_check_report_json(
    mac: *const MpMac,
    mask: u32,
    tol: *const MpTolerances,
    out: *mut *mut c_char,
) -> MpStatus {
    guard(|| {
        let w = mac_arg(mac)?;
        let set = if mask == 0 { None } else { Some(proper_subset(w, mask)?) };
        let summary = report::check(w, set, &tolerances(tol)?)?;
        let json = serde_json::to_string(&summary)
            .map_err(|e| Failure(MpStatus::Internal, e.to_string()))?;
        let s = CString::new(json).map_err(|e| Failure(MpStatus::Internal, e.to_string()))?;
        write(out, s.into_raw(), "out")
    })
}

/// Releases a string returned by this library. `NULL` is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
