//! C ABI for embedding a Disco REPL session.
//!
//! A session is an opaque handle created with [`disco_session_new`] and
//! released with [`disco_session_free`]. Calls that produce text hand back
//! a heap string the caller owns and frees with [`disco_string_free`].
//! Every fallible call returns a [`DiscoStatus`]; on failure a message is
//! available from [`disco_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;
use std::time::Duration;

use disco::oeis::{HttpFetcher, OfflineFetcher, SequenceFetcher};
use disco::repl::{OutputBlock, ReplState};

/// Opaque REPL session.
pub struct DiscoSession {
    state: ReplState,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscoStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Loading finished but a definition failed to check or a test failed.
    /// The output string still holds the report.
    LoadFailed = 3,
    /// The output contained an interior NUL byte.
    InvalidOutput = 4,
    /// The interpreter panicked; the session should be freed.
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: DiscoStatus, msg: &str) -> DiscoStatus {
    set_error(msg);
    status
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, DiscoStatus> {
    if p.is_null() {
        return Err(fail(DiscoStatus::NullArgument, &format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(DiscoStatus::InvalidUtf8, &format!("{what} is not valid UTF-8")))
}

unsafe fn write_out(out: *mut *mut c_char, text: String) -> DiscoStatus {
    match CString::new(text) {
        Ok(c) => {
            *out = c.into_raw();
            DiscoStatus::Ok
        }
        Err(_) => fail(DiscoStatus::InvalidOutput, "output contains a NUL byte"),
    }
}

fn blocks_text(blocks: &[OutputBlock]) -> String {
    blocks
        .iter()
        .map(|b| b.text.as_str())
        .collect::<Vec<_>>()
        .join("\n")
}

fn guarded(f: impl FnOnce() -> DiscoStatus) -> DiscoStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(DiscoStatus::Panic, "interpreter panicked"))
}

/// Create a session. With `offline` set, OEIS lookups never touch the
/// network. Never returns null.
#[no_mangle]
pub extern "C" fn disco_session_new(offline: bool) -> *mut DiscoSession {
    let fetcher: Arc<dyn SequenceFetcher> = if offline {
        Arc::new(OfflineFetcher)
    } else {
        Arc::new(HttpFetcher::new(Duration::from_secs(5)))
    };
    Box::into_raw(Box::new(DiscoSession {
        state: ReplState::new(fetcher),
    }))
}

/// # Safety
/// `session` must come from [`disco_session_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn disco_session_free(session: *mut DiscoSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Seed for randomized property testing.
///
/// # Safety
/// `session` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn disco_session_set_seed(session: *mut DiscoSession, seed: u64) -> DiscoStatus {
    match session.as_mut() {
        Some(s) => {
            s.state.config.seed = seed;
            DiscoStatus::Ok
        }
        None => fail(DiscoStatus::NullArgument, "session is null"),
    }
}

/// Switch between unicode (the default) and ASCII output.
///
/// # Safety
/// `session` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn disco_session_set_ascii(session: *mut DiscoSession, ascii: bool) -> DiscoStatus {
    match session.as_mut() {
        Some(s) => {
            s.state.unicode = !ascii;
            DiscoStatus::Ok
        }
        None => fail(DiscoStatus::NullArgument, "session is null"),
    }
}

/// Run one REPL line. `*out` receives the output blocks' text joined by
/// newlines (empty for no output). Disco-level errors are output, not a
/// failing status.
///
/// # Safety
/// `session` must be a live handle, `line` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn disco_session_exec(
    session: *mut DiscoSession,
    line: *const c_char,
    out: *mut *mut c_char,
) -> DiscoStatus {
    exec_with(session, line, out, blocks_text)
}

/// Like [`disco_session_exec`], but `*out` is a JSON array of
/// `{kind, text, docURL?}` blocks.
///
/// # Safety
/// As for [`disco_session_exec`].
#[no_mangle]
pub unsafe extern "C" fn disco_session_exec_json(
    session: *mut DiscoSession,
    line: *const c_char,
    out: *mut *mut c_char,
) -> DiscoStatus {
    exec_with(session, line, out, |b| {
        serde_json::to_string(b).expect("blocks serialize")
    })
}

unsafe fn exec_with(
    session: *mut DiscoSession,
    line: *const c_char,
    out: *mut *mut c_char,
    render: impl FnOnce(&[OutputBlock]) -> String,
) -> DiscoStatus {
    guarded(|| {
        let (Some(s), false) = (session.as_mut(), out.is_null()) else {
            return fail(DiscoStatus::NullArgument, "session or out is null");
        };
        let line = match read_str(line, "line") {
            Ok(l) => l,
            Err(st) => return st,
        };
        let blocks = s.state.exec(line);
        write_out(out, render(&blocks))
    })
}

/// Load one source file's contents under `name`, replacing previously
/// loaded definitions, and run its tests. `*out` receives the load report.
///
/// # Safety
/// `session` must be a live handle, `name` and `contents` NUL-terminated
/// strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn disco_session_load(
    session: *mut DiscoSession,
    name: *const c_char,
    contents: *const c_char,
    out: *mut *mut c_char,
) -> DiscoStatus {
    guarded(|| {
        let (Some(s), false) = (session.as_mut(), out.is_null()) else {
            return fail(DiscoStatus::NullArgument, "session or out is null");
        };
        let (name, contents) = match (read_str(name, "name"), read_str(contents, "contents")) {
            (Ok(n), Ok(c)) => (n, c),
            (Err(st), _) | (_, Err(st)) => return st,
        };
        let report = s.state.load_sources(&[(name.to_string(), contents.to_string())]);
        let status = write_out(out, blocks_text(&report.blocks));
        if status == DiscoStatus::Ok && !report.ok {
            return fail(DiscoStatus::LoadFailed, "load failed; see the report");
        }
        status
    })
}

/// Release a string returned through an `out` parameter.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn disco_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread, or null. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn disco_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn disco_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
