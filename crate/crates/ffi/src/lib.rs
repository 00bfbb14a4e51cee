//! C ABI over the verification library.
//!
//! Sets are passed as opaque handles. Every function returns an [`LpccStatus`]; on
//! failure the message is available from [`lpcc_last_error`] until the next call on the
//! same thread. Strings returned through out-parameters are owned by the caller and
//! must be released with [`lpcc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lpcc::activation::{classify, verify_activation, ClassifyConfig};
use lpcc::cli::render;
use lpcc::measure::LocalPvm;
use lpcc::opsolve::{rank1_op_directions, SolverConfig};
use lpcc::protocol::{lpcc_search, SearchConfig};
use lpcc::states::{build_named_set, NamedSet, Orthogonality, Partition, StateSet};
use lpcc::theorems::{theorem, CheckStatus};

/// Opaque set of labelled states.
pub struct LpccStateSet(StateSet);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpccStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    Computation = 5,
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(LpccStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn fail<T>(status: LpccStatus, msg: impl std::fmt::Display) -> FfiResult<T> {
    Err(Failure(status, msg.to_string()))
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> LpccStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LpccStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LpccStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(LpccStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p).to_str().or_else(|_| fail(LpccStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn set_arg<'a>(p: *const LpccStateSet) -> FfiResult<&'a StateSet> {
    p.as_ref().map(|s| &s.0).ok_or(Failure(LpccStatus::NullPointer, "set is null".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return fail(LpccStatus::NullPointer, "output pointer is null");
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    let c = CString::new(s).or_else(|_| fail(LpccStatus::Computation, "output contains a NUL byte"))?;
    write_out(out, c.into_raw())
}

fn solver(exact_only: bool) -> SolverConfig {
    if exact_only {
        SolverConfig::exact()
    } else {
        SolverConfig::default()
    }
}

fn partition(src: Option<&str>, s: &StateSet) -> FfiResult<Partition> {
    match src {
        Some(p) => Partition::parse(p, s.spec()).or_else(|e| fail(LpccStatus::Parse, e)),
        None => Ok(Partition::finest(s.spec().parties())),
    }
}

/// Message of the last failed call on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn lpcc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lpcc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a named set. `m` is the family parameter for S1m / S2m; pass 0 otherwise.
///
/// # Safety
/// `name` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpcc_stateset_named(name: *const c_char, m: usize, out: *mut *mut LpccStateSet) -> LpccStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let n: NamedSet = name.parse().or_else(|e| fail(LpccStatus::InvalidArgument, e))?;
        let s = build_named_set(n, (m > 0).then_some(m)).or_else(|e| fail(LpccStatus::InvalidArgument, e))?;
        write_out(out, Box::into_raw(Box::new(LpccStateSet(s))))
    })
}

/// Parses a set from its JSON form.
///
/// # Safety
/// `json` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpcc_stateset_from_json(json: *const c_char, out: *mut *mut LpccStateSet) -> LpccStatus {
    guard(|| {
        let src = str_arg(json, "json")?;
        let s = StateSet::from_json(src).or_else(|e| fail(LpccStatus::Parse, e))?;
        write_out(out, Box::into_raw(Box::new(LpccStateSet(s))))
    })
}

/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpcc_stateset_to_json(set: *const LpccStateSet, out: *mut *mut c_char) -> LpccStatus {
    guard(|| write_string(out, set_arg(set)?.to_json()))
}

/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpcc_stateset_len(set: *const LpccStateSet, out: *mut usize) -> LpccStatus {
    guard(|| write_out(out, set_arg(set)?.len()))
}

/// Releases a set handle. Null is ignored.
///
/// # Safety
/// `set` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lpcc_stateset_free(set: *mut LpccStateSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Writes whether the states are mutually orthogonal.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpcc_check_orthogonality(set: *const LpccStateSet, out: *mut bool) -> LpccStatus {
    guard(|| {
        let s = set_arg(set)?;
        write_out(out, matches!(s.check_mutual_orthogonality(), Orthogonality::Ok))
    })
}

/// Rank-1 orthogonality-preserving directions of `group` (e.g. "C"), as JSON.
///
/// # Safety
/// Pointers must be valid; `out` receives a string to free with [`lpcc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lpcc_solve_rank1_json(
    set: *const LpccStateSet,
    group: *const c_char,
    exact_only: bool,
    out: *mut *mut c_char,
) -> LpccStatus {
    guard(|| {
        let s = set_arg(set)?;
        let g = s.spec().parse_group(str_arg(group, "group")?).or_else(|e| fail(LpccStatus::Parse, e))?;
        let r = rank1_op_directions(s, &g, &solver(exact_only));
        write_string(out, render::solution(&r, s.spec()).to_string())
    })
}

/// Bounded protocol search. `partition` may be null for the finest partition.
///
/// # Safety
/// Pointers must be valid; `out` receives a string to free with [`lpcc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lpcc_protocol_search_json(
    set: *const LpccStateSet,
    partition: *const c_char,
    depth: usize,
    out: *mut *mut c_char,
) -> LpccStatus {
    guard(|| {
        let s = set_arg(set)?;
        let p = self::partition(opt_str_arg(partition, "partition")?, s)?;
        let v = lpcc_search(s, &p, &SearchConfig { depth, solver: SolverConfig::exact() });
        write_string(out, render::verdict(&v, s.spec()).to_string())
    })
}

/// Verifies a first-round measurement. `pvm` uses the ket grammar ("0,1;2");
/// `partition` may be null for the finest partition.
///
/// # Safety
/// Pointers must be valid; `out` receives a string to free with [`lpcc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lpcc_verify_activation_json(
    set: *const LpccStateSet,
    group: *const c_char,
    pvm: *const c_char,
    partition: *const c_char,
    out: *mut *mut c_char,
) -> LpccStatus {
    guard(|| {
        let s = set_arg(set)?;
        let lp = LocalPvm::parse(s.spec(), str_arg(group, "group")?, str_arg(pvm, "pvm")?)
            .or_else(|e| fail(LpccStatus::Parse, e))?;
        let p = self::partition(opt_str_arg(partition, "partition")?, s)?;
        let r = verify_activation(s, &lp, &p, &SolverConfig::exact()).or_else(|e| fail(LpccStatus::Computation, e))?;
        write_string(out, render::activation(&r, s.spec()).to_string())
    })
}

/// Locality classification. `joint` is an optional party pair such as "B,C".
///
/// # Safety
/// Pointers must be valid; `out` receives a string to free with [`lpcc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lpcc_classify_json(set: *const LpccStateSet, joint: *const c_char, out: *mut *mut c_char) -> LpccStatus {
    guard(|| {
        let s = set_arg(set)?;
        let mut config = ClassifyConfig { solver: SolverConfig::exact(), ..Default::default() };
        if let Some(j) = opt_str_arg(joint, "joint")? {
            let g = s.spec().parse_group(j).or_else(|e| fail(LpccStatus::Parse, e))?;
            if g.len() != 2 {
                return fail(LpccStatus::InvalidArgument, "joint expects two parties");
            }
            config.joint_pairs.push((g[0], g[1]));
        }
        write_string(out, render::locality(&classify(s, &config), s.spec()).to_string())
    })
}

/// Replays bundled theorem `n` (1-5). `status` receives 0 pass, 1 fail, 2 unknown;
/// `report` (nullable) receives the JSON report.
///
/// # Safety
/// `status` must be writable; `report` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lpcc_theorem(n: u32, status: *mut i32, report: *mut *mut c_char) -> LpccStatus {
    guard(|| {
        let Some(r) = theorem(n, &SolverConfig::exact()) else {
            return fail(LpccStatus::InvalidArgument, format!("no theorem {n}"));
        };
        let code = match r.status() {
            CheckStatus::Pass => 0,
            CheckStatus::Fail => 1,
            CheckStatus::Unknown => 2,
        };
        write_out(status, code)?;
        if !report.is_null() {
            let json = serde_json::to_string(&r).or_else(|e| fail(LpccStatus::Computation, e))?;
            write_string(report, json)?;
        }
        Ok(())
    })
}
