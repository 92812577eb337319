//! C ABI for `circle-subgroups`.
//!
//! Chains are opaque handles. Every fallible call returns a [`CsStatus`] and
//! writes its result through an out-pointer; strings handed back to the
//! caller are NUL-terminated UTF-8 (mostly JSON) and must be released with
//! [`cs_string_free`]. The message of the last error on the calling thread is
//! available from [`cs_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use circle_subgroups::density::{block_counts, decide_statistical_t_d, upper_density, IndexSet};
use circle_subgroups::membership::{decide_t_u, ChainLike, CirclePoint, DecideConfig};
use circle_subgroups::{seminorm, ArithChain, DerivedSeq, Error, IntSequence, Rational, SeqDescriptor};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseRational = 3,
    InvalidDescriptor = 4,
    NotDivisibilityChain = 5,
    ChainExhausted = 6,
    OutOfHorizon = 7,
    IndexOverflow = 8,
    ImpreciseInput = 9,
    InvalidEpsilon = 10,
    UnboundedRatios = 11,
    HorizonExhausted = 12,
    DenominatorTooLarge = 13,
    Hypothesis = 14,
    Panic = 15,
}

impl From<&Error> for CsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::ParseRational(_) => CsStatus::ParseRational,
            Error::InvalidDescriptor(_) => CsStatus::InvalidDescriptor,
            Error::NotDivisibilityChain { .. } => CsStatus::NotDivisibilityChain,
            Error::ChainExhausted { .. } => CsStatus::ChainExhausted,
            Error::OutOfHorizon { .. } => CsStatus::OutOfHorizon,
            Error::IndexOverflow { .. } => CsStatus::IndexOverflow,
            Error::ImpreciseInput { .. } => CsStatus::ImpreciseInput,
            Error::InvalidEpsilon(_) => CsStatus::InvalidEpsilon,
            Error::UnboundedRatiosAtHorizon { .. } => CsStatus::UnboundedRatios,
            Error::HorizonExhausted { .. } => CsStatus::HorizonExhausted,
            Error::DenominatorTooLarge(_) => CsStatus::DenominatorTooLarge,
            Error::Hypothesis(_) => CsStatus::Hypothesis,
        }
    }
}

/// Opaque divisibility chain.
pub struct CsChain {
    chain: ArithChain,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Fail(CsStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_error(e.to_string());
        Fail(CsStatus::from(&e))
    }
}

fn null(what: &str) -> Fail {
    set_error(format!("{what} is null"));
    Fail(CsStatus::NullPointer)
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsStatus::Ok,
        Ok(Err(Fail(status))) => status,
        Err(_) => {
            set_error("internal panic".into());
            CsStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        Fail(CsStatus::InvalidUtf8)
    })
}

unsafe fn parse<T: std::str::FromStr<Err = Error>>(p: *const c_char, what: &str) -> Result<T, Fail> {
    Ok(read_str(p, what)?.parse()?)
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = CString::new(s).expect("no interior NUL in library output").into_raw();
    Ok(())
}

unsafe fn write_json(out: *mut *mut c_char, v: impl serde::Serialize) -> Result<(), Fail> {
    write_string(out, serde_json::to_string(&v).expect("serializable"))
}

unsafe fn chain_ref<'a>(chain: *const CsChain) -> Result<&'a CsChain, Fail> {
    chain.as_ref().ok_or_else(|| null("chain"))
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn cs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a chain from a descriptor such as `factorial`, `geometric:2` or
/// `ratios:2,3:repeat`, materializing `count` terms.
///
/// # Safety
/// `descriptor` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_chain_new(descriptor: *const c_char, count: usize, out: *mut *mut CsChain) -> CsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let desc: SeqDescriptor = parse(descriptor, "descriptor")?;
        let chain = ArithChain::build(desc, count.max(1))?;
        *out = Box::into_raw(Box::new(CsChain { chain }));
        Ok(())
    })
}

/// Releases a chain. NULL is ignored.
///
/// # Safety
/// `chain` must come from [`cs_chain_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_chain_free(chain: *mut CsChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Number of materialized terms.
///
/// # Safety
/// `chain` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn cs_chain_len(chain: *const CsChain) -> usize {
    chain.as_ref().map_or(0, |c| c.chain.len())
}

/// Writes `a_n` (1-based) in decimal, extending the chain if needed.
///
/// # Safety
/// `chain` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_chain_term(chain: *mut CsChain, n: usize, out: *mut *mut c_char) -> CsStatus {
    guard(|| {
        let c = chain.as_mut().ok_or_else(|| null("chain"))?;
        if n == 0 {
            return Err(Error::OutOfHorizon { index: 0, horizon: c.chain.len() as u64 }.into());
        }
        if c.chain.len() < n {
            c.chain.extend_to(n)?;
        }
        write_string(out, c.chain.a(n).to_string())
    })
}

/// `‖x‖` as `"p/q"`.
///
/// # Safety
/// `x` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_seminorm(x: *const c_char, out: *mut *mut c_char) -> CsStatus {
    guard(|| {
        let x: Rational = parse(x, "x")?;
        write_string(out, seminorm(&x).to_string())
    })
}

/// Decides membership of `x` for the chain (or its derived sequence when
/// `derived` is nonzero) and writes the verdict JSON.
///
/// # Safety
/// `chain` must be a live handle; `x` a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_member(chain: *const CsChain, x: *const c_char, derived: i32, out: *mut *mut c_char) -> CsStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let x: CirclePoint = parse(x, "x")?;
        let cfg = DecideConfig::default();
        let verdict = if derived != 0 {
            let d = DerivedSeq::new(c.chain.clone(), 1)?;
            decide_t_u(ChainLike::Derived(&d), &x, &cfg)?
        } else {
            decide_t_u(ChainLike::Chain(&c.chain), &x, &cfg)?
        };
        write_json(out, verdict)
    })
}

/// Statistical membership for the derived sequence; writes the verdict JSON.
///
/// # Safety
/// `chain` must be a live handle; `x` a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_smember(chain: *const CsChain, x: *const c_char, extra_blocks: usize, out: *mut *mut c_char) -> CsStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let x: CirclePoint = parse(x, "x")?;
        write_json(out, decide_statistical_t_d(&c.chain, &x, extra_blocks)?)
    })
}

/// Exact per-block counts of `‖d_n x‖ >= eps` and `!= 0`, as a JSON array.
///
/// # Safety
/// `chain` must be a live handle; `x`, `eps` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_block_counts(
    chain: *const CsChain,
    x: *const c_char,
    eps: *const c_char,
    blocks: usize,
    out: *mut *mut c_char,
) -> CsStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let x: CirclePoint = parse(x, "x")?;
        let eps: Rational = parse(eps, "eps")?;
        write_json(out, block_counts(&c.chain, &x, &eps, blocks)?)
    })
}

/// Largest partial density of an index set (`every:2`, `geometric:3/2`, ...)
/// over `[tail_start, horizon]`, as JSON.
///
/// # Safety
/// `set` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_upper_density(set: *const c_char, horizon: u64, tail_start: u64, out: *mut *mut c_char) -> CsStatus {
    guard(|| {
        let set: IndexSet = parse(set, "set")?;
        write_json(out, upper_density(&set, horizon, tail_start)?)
    })
}

/// Horizon of the derived sequence over `blocks` blocks.
///
/// # Safety
/// `chain` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_derived_horizon(chain: *const CsChain, blocks: usize, out: *mut u64) -> CsStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = DerivedSeq::new(c.chain.clone(), blocks)?.horizon();
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
