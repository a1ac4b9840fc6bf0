//! C ABI over `topoprint`.
//!
//! Objects are opaque handles created by `*_new`/`*_load`/`*_compute`-style
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`TopoStatus`]; on failure a message is available from
//! [`topo_last_error`] on the same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use topoprint::spectral::StftConfig;
use topoprint::{CompareParams, Decision, Error, Fingerprint, FingerprintConfig, MatchResult, Waveform};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Decode = 4,
    TrackTooShort = 5,
    BadFingerprint = 6,
    Incompatible = 7,
    OutOfRange = 8,
    Panic = 9,
}

/// Audio samples plus sample rate.
pub struct TopoWaveform(Waveform);

pub struct TopoFingerprint(Fingerprint);

/// Outcome of comparing two fingerprints.
pub struct TopoMatch(MatchResult);

/// Fingerprinting parameters; obtain defaults from
/// [`topo_fingerprint_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TopoFingerprintConfig {
    /// Window length in seconds.
    pub window_seconds: f64,
    /// Fraction of overlap between consecutive windows, in [0, 1).
    pub overlap: f64,
    /// Samples per Betti curve.
    pub betti_resolution: usize,
    /// STFT window length in samples.
    pub window_size: usize,
    pub hop: usize,
    pub n_mels: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TopoCompareParams {
    /// Weight of the dimension-0 distance, in [0, 1].
    pub lambda: f64,
    /// Neighbourhood-median radius.
    pub smooth_k: usize,
    /// Decision threshold on the error.
    pub kappa: f64,
}

struct Failure(TopoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidArgument(_) | Error::EmptyInput(_) => TopoStatus::InvalidArgument,
            Error::Io { .. } => TopoStatus::Io,
            Error::Decode { .. } | Error::UnsupportedFormat { .. } => TopoStatus::Decode,
            Error::TrackTooShort { .. } => TopoStatus::TrackTooShort,
            Error::VersionMismatch { .. } | Error::Malformed(_) | Error::Checksum { .. } => TopoStatus::BadFingerprint,
            Error::Incompatible(_) => TopoStatus::Incompatible,
        };
        Failure(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TopoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TopoStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            TopoStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(TopoStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(TopoStatus::InvalidArgument, "path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or NULL. The string stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn topo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn topo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Reads a PCM WAV file, mixing stereo down to mono.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn topo_waveform_load_wav(path: *const c_char, out: *mut *mut TopoWaveform) -> TopoStatus {
    guard(|| {
        let path = path_arg(path)?;
        put(out, TopoWaveform(topoprint::load_wav(path)?))
    })
}

/// Copies `len` samples (nominally in [-1, 1]) into a new waveform.
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn topo_waveform_from_samples(
    samples: *const f64,
    len: usize,
    sample_rate: u32,
    out: *mut *mut TopoWaveform,
) -> TopoStatus {
    guard(|| {
        let data = if len == 0 {
            Vec::new()
        } else if samples.is_null() {
            return Err(null("samples"));
        } else {
            std::slice::from_raw_parts(samples, len).to_vec()
        };
        put(out, TopoWaveform(Waveform::new(data, sample_rate)?))
    })
}

/// Number of samples, or 0 for NULL.
///
/// # Safety
/// `w` must be NULL or a live waveform handle.
#[no_mangle]
pub unsafe extern "C" fn topo_waveform_len(w: *const TopoWaveform) -> usize {
    w.as_ref().map_or(0, |w| w.0.len())
}

/// # Safety
/// `w` must be NULL or a live waveform handle.
#[no_mangle]
pub unsafe extern "C" fn topo_waveform_sample_rate(w: *const TopoWaveform) -> u32 {
    w.as_ref().map_or(0, |w| w.0.sample_rate())
}

/// # Safety
/// `w` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn topo_waveform_free(w: *mut TopoWaveform) {
    free(w)
}

#[no_mangle]
pub extern "C" fn topo_fingerprint_config_default() -> TopoFingerprintConfig {
    let d = FingerprintConfig::default();
    TopoFingerprintConfig {
        window_seconds: d.window_seconds,
        overlap: d.overlap,
        betti_resolution: d.betti_resolution,
        window_size: d.stft.window_size,
        hop: d.stft.hop,
        n_mels: d.stft.n_mels,
    }
}

fn fingerprint_config(c: &TopoFingerprintConfig) -> FingerprintConfig {
    let d = FingerprintConfig::default();
    FingerprintConfig {
        window_seconds: c.window_seconds,
        overlap: c.overlap,
        betti_resolution: c.betti_resolution,
        stft: StftConfig { window_size: c.window_size, hop: c.hop, n_mels: c.n_mels, ..d.stft },
        ..d
    }
}

/// Fingerprints a waveform. `config` may be NULL for the defaults.
///
/// # Safety
/// `w` must be a live waveform handle, `config` NULL or readable, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn topo_fingerprint_compute(
    w: *const TopoWaveform,
    config: *const TopoFingerprintConfig,
    out: *mut *mut TopoFingerprint,
) -> TopoStatus {
    guard(|| {
        let w = deref(w, "waveform")?;
        let cfg = config.as_ref().map_or_else(FingerprintConfig::default, fingerprint_config);
        put(out, TopoFingerprint(topoprint::fingerprint_track(&w.0, &cfg)?))
    })
}

/// Reads a fingerprint JSON file, verifying version and checksum.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn topo_fingerprint_read(path: *const c_char, out: *mut *mut TopoFingerprint) -> TopoStatus {
    guard(|| {
        let path = path_arg(path)?;
        put(out, TopoFingerprint(topoprint::read_fingerprint(path)?))
    })
}

/// # Safety
/// `fp` must be a live fingerprint handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn topo_fingerprint_write(fp: *const TopoFingerprint, path: *const c_char) -> TopoStatus {
    guard(|| {
        let fp = deref(fp, "fingerprint")?;
        let path = path_arg(path)?;
        Ok(topoprint::write_fingerprint(&fp.0, path)?)
    })
}

/// Number of windows, or 0 for NULL.
///
/// # Safety
/// `fp` must be NULL or a live fingerprint handle.
#[no_mangle]
pub unsafe extern "C" fn topo_fingerprint_len(fp: *const TopoFingerprint) -> usize {
    fp.as_ref().map_or(0, |fp| fp.0.len())
}

/// Samples per Betti curve, or 0 for NULL.
///
/// # Safety
/// `fp` must be NULL or a live fingerprint handle.
#[no_mangle]
pub unsafe extern "C" fn topo_fingerprint_resolution(fp: *const TopoFingerprint) -> usize {
    fp.as_ref().map_or(0, |fp| fp.0.config.betti_resolution)
}

/// Window midpoint in seconds of entry `index`.
///
/// # Safety
/// `fp` must be a live fingerprint handle; `t` writable.
#[no_mangle]
pub unsafe extern "C" fn topo_fingerprint_time(fp: *const TopoFingerprint, index: usize, t: *mut f64) -> TopoStatus {
    guard(|| {
        let fp = deref(fp, "fingerprint")?;
        let entry = fp.0.entries.get(index).ok_or_else(|| out_of_range(index, fp.0.len()))?;
        if t.is_null() {
            return Err(null("t"));
        }
        *t = entry.t;
        Ok(())
    })
}

fn out_of_range(index: usize, len: usize) -> Failure {
    Failure(TopoStatus::OutOfRange, format!("index {index} out of range for {len} entries"))
}

/// Copies the Betti curve of dimension `dim` (0 or 1) of entry `index` into
/// `buf`, which must hold at least `topo_fingerprint_resolution` values.
///
/// # Safety
/// `fp` must be a live fingerprint handle; `buf` must have room for `cap`
/// values.
#[no_mangle]
pub unsafe extern "C" fn topo_fingerprint_curve(
    fp: *const TopoFingerprint,
    index: usize,
    dim: u32,
    buf: *mut u32,
    cap: usize,
) -> TopoStatus {
    guard(|| {
        let fp = deref(fp, "fingerprint")?;
        let entry = fp.0.entries.get(index).ok_or_else(|| out_of_range(index, fp.0.len()))?;
        let curve = match dim {
            0 => &entry.beta0,
            1 => &entry.beta1,
            _ => return Err(Failure(TopoStatus::InvalidArgument, format!("dimension {dim} is not 0 or 1"))),
        };
        if buf.is_null() {
            return Err(null("buf"));
        }
        if cap < curve.samples.len() {
            return Err(Failure(
                TopoStatus::OutOfRange,
                format!("buffer holds {cap} values, curve has {}", curve.samples.len()),
            ));
        }
        ptr::copy_nonoverlapping(curve.samples.as_ptr(), buf, curve.samples.len());
        Ok(())
    })
}

/// # Safety
/// `fp` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn topo_fingerprint_free(fp: *mut TopoFingerprint) {
    free(fp)
}

#[no_mangle]
pub extern "C" fn topo_compare_params_default() -> TopoCompareParams {
    let d = CompareParams::default();
    TopoCompareParams { lambda: d.lambda, smooth_k: d.smooth_k, kappa: d.kappa }
}

/// Compares two fingerprints. `params` may be NULL for the defaults.
///
/// # Safety
/// `a` and `b` must be live fingerprint handles, `params` NULL or readable,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn topo_compare(
    a: *const TopoFingerprint,
    b: *const TopoFingerprint,
    params: *const TopoCompareParams,
    out: *mut *mut TopoMatch,
) -> TopoStatus {
    guard(|| {
        let a = deref(a, "first fingerprint")?;
        let b = deref(b, "second fingerprint")?;
        let params = params.as_ref().map_or_else(CompareParams::default, |p| CompareParams {
            lambda: p.lambda,
            smooth_k: p.smooth_k,
            kappa: p.kappa,
        });
        put(out, TopoMatch(topoprint::compare(&a.0, &b.0, &params)?))
    })
}

/// Error `1 - rho`, or NaN for NULL.
///
/// # Safety
/// `m` must be NULL or a live match handle.
#[no_mangle]
pub unsafe extern "C" fn topo_match_error(m: *const TopoMatch) -> f64 {
    m.as_ref().map_or(f64::NAN, |m| m.0.error)
}

/// # Safety
/// `m` must be NULL or a live match handle.
#[no_mangle]
pub unsafe extern "C" fn topo_match_rho(m: *const TopoMatch) -> f64 {
    m.as_ref().map_or(f64::NAN, |m| m.0.rho)
}

/// 1 if the pair is judged a match, 0 otherwise (including NULL).
///
/// # Safety
/// `m` must be NULL or a live match handle.
#[no_mangle]
pub unsafe extern "C" fn topo_match_is_positive(m: *const TopoMatch) -> i32 {
    m.as_ref().map_or(0, |m| (m.0.decision == Decision::Positive) as i32)
}

/// # Safety
/// `m` must be NULL or a live match handle.
#[no_mangle]
pub unsafe extern "C" fn topo_match_pair_count(m: *const TopoMatch) -> usize {
    m.as_ref().map_or(0, |m| m.0.pairs.len())
}

/// Copies the matched window times: `t_a[i]`, `t_b[i]` and the smoothed
/// `t_b_smoothed[i]`. Any of the output arrays may be NULL to skip it.
///
/// # Safety
/// `m` must be a live match handle; non-NULL arrays must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn topo_match_pairs(
    m: *const TopoMatch,
    t_a: *mut f64,
    t_b: *mut f64,
    t_b_smoothed: *mut f64,
    cap: usize,
) -> TopoStatus {
    guard(|| {
        let m = deref(m, "match")?;
        let n = m.0.pairs.len();
        if cap < n {
            return Err(Failure(TopoStatus::OutOfRange, format!("arrays hold {cap} values, match has {n} pairs")));
        }
        for (i, (p, s)) in m.0.pairs.iter().zip(&m.0.smoothed).enumerate() {
            if !t_a.is_null() {
                *t_a.add(i) = p.0;
            }
            if !t_b.is_null() {
                *t_b.add(i) = p.1;
            }
            if !t_b_smoothed.is_null() {
                *t_b_smoothed.add(i) = s.1;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `m` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn topo_match_free(m: *mut TopoMatch) {
    free(m)
}
