//! C ABI over `fo2`.
//!
//! Objects are opaque handles released with their `_free` function. Every
//! fallible call returns an [`Fo2Status`]; on failure the message is
//! available from [`fo2_last_error`] on the same thread until the next call.
//! Strings returned through `char **` belong to the caller and are released
//! with [`fo2_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fo2::automata::{parse_dfa_file, parse_regex, regex_to_min_dfa, Alphabet, Dfa};
use fo2::cli::{self, LoadedInput, Method};
use fo2::monoid::{parse_monoid_file, FiniteMonoid, TransitionMonoid, DEFAULT_SIZE_CAP};
use fo2::rankers::Ranker;
use fo2::varieties::{self, Fo2Level};
use fo2::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fo2Status {
    Ok = 0,
    /// Null pointer, bad UTF-8 or an out-of-range argument.
    InvalidArgument = 1,
    /// Malformed regex, automaton, monoid table or ranker.
    Parse = 2,
    /// The two decision routes disagree, or a theory check failed.
    Inconsistency = 3,
    /// A size, work or level bound was exceeded.
    Budget = 4,
    /// A panic was caught at the boundary.
    Internal = 5,
}

/// Minimal complete DFA.
pub struct Fo2Dfa {
    dfa: Dfa,
}

/// Finite monoid, with its generators when built from an automaton.
pub struct Fo2Monoid {
    monoid: FiniteMonoid,
    dfa_states: Option<usize>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> Fo2Status {
    match e {
        Error::Syntax { .. }
        | Error::UnknownSymbol(_)
        | Error::EmptyAlphabet
        | Error::Format { .. }
        | Error::DuplicateTransition { .. }
        | Error::NotAssociative { .. }
        | Error::BadIdentity(_) => Fo2Status::Parse,
        Error::Inconsistency(_) | Error::NotCongruence { .. } => Fo2Status::Inconsistency,
        Error::MonoidTooLarge { .. }
        | Error::IdentityCheckTooLarge { .. }
        | Error::BudgetExceeded { .. }
        | Error::LevelBoundExceeded { .. } => Fo2Status::Budget,
        _ => Fo2Status::InvalidArgument,
    }
}

struct Failure(Fo2Status, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn invalid(msg: &str) -> Failure {
    Failure(Fo2Status::InvalidArgument, msg.to_string())
}

/// Runs `f` behind the boundary: clears the last error, records failures
/// and turns panics into [`Fo2Status::Internal`].
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> Fo2Status {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Fo2Status::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            Fo2Status::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(&format!("{what} is not valid UTF-8")))
}

unsafe fn opt_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| invalid("output pointer is null"))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| invalid(&format!("{what} handle is null")))
}

fn parse_alphabet(s: &str) -> Result<Alphabet, Error> {
    if s.chars().any(char::is_whitespace) {
        Alphabet::new(s.split_whitespace())
    } else {
        Alphabet::from_chars(s)
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn fo2_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fo2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Minimal DFA of a regular expression. `alphabet` may be null (letters
/// used) or a string such as `"ab"`.
///
/// # Safety
/// String arguments must be null-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fo2_dfa_from_regex(
    regex: *const c_char,
    alphabet: *const c_char,
    out_dfa: *mut *mut Fo2Dfa,
) -> Fo2Status {
    guard(|| {
        let slot = out(out_dfa)?;
        let alphabet = opt_text(alphabet, "alphabet")?.map(parse_alphabet).transpose()?;
        let re = parse_regex(text(regex, "regex")?, alphabet.as_ref())?;
        *slot = Box::into_raw(Box::new(Fo2Dfa {
            dfa: regex_to_min_dfa(&re),
        }));
        Ok(())
    })
}

/// Parses a DFA description and minimizes it.
///
/// # Safety
/// As [`fo2_dfa_from_regex`].
#[no_mangle]
pub unsafe extern "C" fn fo2_dfa_from_text(description: *const c_char, out_dfa: *mut *mut Fo2Dfa) -> Fo2Status {
    guard(|| {
        let slot = out(out_dfa)?;
        let dfa = parse_dfa_file(text(description, "description")?)?.minimize();
        *slot = Box::into_raw(Box::new(Fo2Dfa { dfa }));
        Ok(())
    })
}

/// Number of states, 0 for a null handle.
///
/// # Safety
/// `dfa` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fo2_dfa_num_states(dfa: *const Fo2Dfa) -> usize {
    dfa.as_ref().map_or(0, |d| d.dfa.num_states())
}

/// # Safety
/// `dfa` must be a live handle; `word` null-terminated; `accepted` writable.
#[no_mangle]
pub unsafe extern "C" fn fo2_dfa_accepts(dfa: *const Fo2Dfa, word: *const c_char, accepted: *mut bool) -> Fo2Status {
    guard(|| {
        let slot = out(accepted)?;
        *slot = handle(dfa, "dfa")?.dfa.accepts_str(text(word, "word")?)?;
        Ok(())
    })
}

/// # Safety
/// `dfa` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn fo2_dfa_free(dfa: *mut Fo2Dfa) {
    if !dfa.is_null() {
        drop(Box::from_raw(dfa));
    }
}

/// Syntactic monoid of the automaton's language.
///
/// # Safety
/// `dfa` must be a live handle; `out_monoid` writable.
#[no_mangle]
pub unsafe extern "C" fn fo2_monoid_from_dfa(dfa: *const Fo2Dfa, out_monoid: *mut *mut Fo2Monoid) -> Fo2Status {
    guard(|| {
        let slot = out(out_monoid)?;
        let dfa = &handle(dfa, "dfa")?.dfa;
        let tm = TransitionMonoid::build(dfa, DEFAULT_SIZE_CAP)?;
        *slot = Box::into_raw(Box::new(Fo2Monoid {
            monoid: tm.monoid,
            dfa_states: Some(dfa.num_states()),
        }));
        Ok(())
    })
}

/// Parses a monoid multiplication table.
///
/// # Safety
/// `table` null-terminated; `out_monoid` writable.
#[no_mangle]
pub unsafe extern "C" fn fo2_monoid_from_text(table: *const c_char, out_monoid: *mut *mut Fo2Monoid) -> Fo2Status {
    guard(|| {
        let slot = out(out_monoid)?;
        let monoid = parse_monoid_file(text(table, "table")?)?;
        *slot = Box::into_raw(Box::new(Fo2Monoid {
            monoid,
            dfa_states: None,
        }));
        Ok(())
    })
}

/// Number of elements, 0 for a null handle.
///
/// # Safety
/// `monoid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fo2_monoid_size(monoid: *const Fo2Monoid) -> usize {
    monoid.as_ref().map_or(0, |m| m.monoid.size())
}

/// Least level `m` with the monoid in `R_{m+1}` and `L_{m+1}`, searching up
/// to `max_m`. Writes -1 when the monoid is outside DA; a level above
/// `max_m` is [`Fo2Status::Budget`].
///
/// # Safety
/// `monoid` must be a live handle; `level` writable.
#[no_mangle]
pub unsafe extern "C" fn fo2_monoid_level(monoid: *const Fo2Monoid, max_m: usize, level: *mut i32) -> Fo2Status {
    guard(|| {
        let slot = out(level)?;
        *slot = match varieties::fo2_level(&handle(monoid, "monoid")?.monoid, max_m)? {
            Fo2Level::NotFo2 => -1,
            Fo2Level::Level(m) => i32::try_from(m).map_err(|_| invalid("level out of range"))?,
            Fo2Level::Exceeded(bound) => return Err(Error::LevelBoundExceeded { bound }.into()),
        };
        Ok(())
    })
}

/// Membership in `R_m`.
///
/// # Safety
/// `monoid` must be a live handle; `member` writable.
#[no_mangle]
pub unsafe extern "C" fn fo2_monoid_in_rm(monoid: *const Fo2Monoid, m: usize, member: *mut bool) -> Fo2Status {
    guard(|| {
        let slot = out(member)?;
        *slot = varieties::in_rm(&handle(monoid, "monoid")?.monoid, m)?;
        Ok(())
    })
}

/// Membership in `L_m`.
///
/// # Safety
/// As [`fo2_monoid_in_rm`].
#[no_mangle]
pub unsafe extern "C" fn fo2_monoid_in_lm(monoid: *const Fo2Monoid, m: usize, member: *mut bool) -> Fo2Status {
    guard(|| {
        let slot = out(member)?;
        *slot = varieties::in_lm(&handle(monoid, "monoid")?.monoid, m)?;
        Ok(())
    })
}

/// Full analysis with both routes as a JSON document, as printed by
/// `fo2 analyze --json`.
///
/// # Safety
/// `monoid` must be a live handle; `json` writable. Free the result with
/// [`fo2_string_free`].
#[no_mangle]
pub unsafe extern "C" fn fo2_monoid_analyze_json(
    monoid: *const Fo2Monoid,
    max_m: usize,
    json: *mut *mut c_char,
) -> Fo2Status {
    guard(|| {
        let slot = out(json)?;
        let m = handle(monoid, "monoid")?;
        let input = LoadedInput {
            description: "ffi".into(),
            dfa_states: m.dfa_states,
            monoid: m.monoid.clone(),
        };
        let report = cli::analyze(&input, max_m, Method::Both)?;
        let s = serde_json::to_string(&report).map_err(|e| Failure(Fo2Status::Internal, e.to_string()))?;
        *slot = into_c_string(s);
        Ok(())
    })
}

/// # Safety
/// `monoid` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn fo2_monoid_free(monoid: *mut Fo2Monoid) {
    if !monoid.is_null() {
        drop(Box::from_raw(monoid));
    }
}

/// Evaluates a ranker such as `"Xa Yb Xc"` on a word over the symbols
/// occurring in both. `position` receives the 1-based position or 0 when
/// undefined.
///
/// # Safety
/// Strings null-terminated; `position` and `condensed` writable.
#[no_mangle]
pub unsafe extern "C" fn fo2_ranker_eval(
    word: *const c_char,
    ranker: *const c_char,
    position: *mut usize,
    condensed: *mut bool,
) -> Fo2Status {
    guard(|| {
        let (pos_slot, cond_slot) = (out(position)?, out(condensed)?);
        let report = cli::evaluate_ranker(text(word, "word")?, text(ranker, "ranker")?, None)?;
        *pos_slot = report.position.unwrap_or(0);
        *cond_slot = report.condensed;
        Ok(())
    })
}

/// Parses a ranker against `alphabet` and reports its depth and block count.
///
/// # Safety
/// Strings null-terminated; `depth` and `blocks` writable.
#[no_mangle]
pub unsafe extern "C" fn fo2_ranker_shape(
    ranker: *const c_char,
    alphabet: *const c_char,
    depth: *mut usize,
    blocks: *mut usize,
) -> Fo2Status {
    guard(|| {
        let (d, b) = (out(depth)?, out(blocks)?);
        let alphabet = parse_alphabet(text(alphabet, "alphabet")?)?;
        let r = Ranker::parse(text(ranker, "ranker")?, &alphabet)?;
        *d = r.depth();
        *b = r.blocks();
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn last_error() -> String {
        let p = fo2_last_error();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
    }

    #[test]
    fn regex_to_level() {
        unsafe {
            let mut dfa = ptr::null_mut();
            assert_eq!(
                fo2_dfa_from_regex(c("a(a|b)*").as_ptr(), ptr::null(), &mut dfa),
                Fo2Status::Ok
            );
            assert_eq!(fo2_dfa_num_states(dfa), 3);
            let mut acc = false;
            assert_eq!(fo2_dfa_accepts(dfa, c("abb").as_ptr(), &mut acc), Fo2Status::Ok);
            assert!(acc);
            let mut m = ptr::null_mut();
            assert_eq!(fo2_monoid_from_dfa(dfa, &mut m), Fo2Status::Ok);
            assert_eq!(fo2_monoid_size(m), 3);
            let mut level = 0;
            assert_eq!(fo2_monoid_level(m, 6, &mut level), Fo2Status::Ok);
            assert_eq!(level, 2);
            assert_eq!(fo2_monoid_level(m, 1, &mut level), Fo2Status::Budget);
            let (mut r2, mut l2) = (false, true);
            assert_eq!(fo2_monoid_in_rm(m, 2, &mut r2), Fo2Status::Ok);
            assert_eq!(fo2_monoid_in_lm(m, 2, &mut l2), Fo2Status::Ok);
            assert!(r2 && !l2);
            fo2_monoid_free(m);
            fo2_dfa_free(dfa);
        }
    }

    #[test]
    fn outside_da() {
        unsafe {
            let mut dfa = ptr::null_mut();
            assert_eq!(
                fo2_dfa_from_regex(c("(ab)*").as_ptr(), c("ab").as_ptr(), &mut dfa),
                Fo2Status::Ok
            );
            let mut m = ptr::null_mut();
            assert_eq!(fo2_monoid_from_dfa(dfa, &mut m), Fo2Status::Ok);
            let mut level = 0;
            assert_eq!(fo2_monoid_level(m, 6, &mut level), Fo2Status::Ok);
            assert_eq!(level, -1);
            fo2_monoid_free(m);
            fo2_dfa_free(dfa);
        }
    }

    #[test]
    fn analyze_json() {
        unsafe {
            let mut m = ptr::null_mut();
            let table = c("size: 2\nidentity: 0\ngen a 1\ntable\n0 1\n1 1\n");
            assert_eq!(fo2_monoid_from_text(table.as_ptr(), &mut m), Fo2Status::Ok);
            let mut json = ptr::null_mut();
            assert_eq!(fo2_monoid_analyze_json(m, 6, &mut json), Fo2Status::Ok);
            let s = CStr::from_ptr(json).to_str().unwrap().to_string();
            fo2_string_free(json);
            fo2_monoid_free(m);
            assert!(s.contains("\"fo2_level\":1"), "{s}");
            assert!(s.contains("\"agreement\":true"), "{s}");
        }
    }

    #[test]
    fn rankers() {
        unsafe {
            let (mut pos, mut cond) = (9, false);
            let r = c("Xa Yb Xc");
            assert_eq!(
                fo2_ranker_eval(c("bca").as_ptr(), r.as_ptr(), &mut pos, &mut cond),
                Fo2Status::Ok
            );
            assert_eq!((pos, cond), (2, true));
            assert_eq!(
                fo2_ranker_eval(c("bac").as_ptr(), r.as_ptr(), &mut pos, &mut cond),
                Fo2Status::Ok
            );
            assert_eq!((pos, cond), (3, false));
            assert_eq!(
                fo2_ranker_eval(c("bcba").as_ptr(), r.as_ptr(), &mut pos, &mut cond),
                Fo2Status::Ok
            );
            assert_eq!(pos, 0);
            let (mut d, mut b) = (0, 0);
            assert_eq!(
                fo2_ranker_shape(r.as_ptr(), c("abc").as_ptr(), &mut d, &mut b),
                Fo2Status::Ok
            );
            assert_eq!((d, b), (3, 3));
        }
    }

    #[test]
    fn errors_are_reported() {
        unsafe {
            let mut dfa = ptr::null_mut();
            assert_eq!(
                fo2_dfa_from_regex(c("(a").as_ptr(), ptr::null(), &mut dfa),
                Fo2Status::Parse
            );
            assert!(dfa.is_null());
            assert!(!last_error().is_empty());
            assert_eq!(
                fo2_dfa_from_regex(ptr::null(), ptr::null(), &mut dfa),
                Fo2Status::InvalidArgument
            );
            assert!(last_error().contains("null"));
            assert_eq!(
                fo2_dfa_from_regex(c("a").as_ptr(), ptr::null(), ptr::null_mut()),
                Fo2Status::InvalidArgument
            );
            let mut m = ptr::null_mut();
            let bad = c("size: 2\nidentity: 0\n0 1\n1 1\n");
            assert_eq!(fo2_monoid_from_text(bad.as_ptr(), &mut m), Fo2Status::Parse);
            let mut level = 0;
            assert_eq!(fo2_monoid_level(ptr::null(), 6, &mut level), Fo2Status::InvalidArgument);
            let (mut pos, mut cond) = (0, false);
            assert_eq!(
                fo2_ranker_eval(c("ab").as_ptr(), c("Za").as_ptr(), &mut pos, &mut cond),
                Fo2Status::Parse
            );
            assert_eq!(fo2_dfa_num_states(ptr::null()), 0);
            fo2_dfa_free(ptr::null_mut());
            fo2_string_free(ptr::null_mut());
            // a successful call clears the message
            assert_eq!(
                fo2_ranker_eval(c("ab").as_ptr(), c("Xa").as_ptr(), &mut pos, &mut cond),
                Fo2Status::Ok
            );
            assert!(fo2_last_error().is_null());
        }
    }
}
