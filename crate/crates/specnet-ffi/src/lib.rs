//! C ABI over the specnet library: opaque handles, status codes, and a
//! thread-local error message.
//!
//! Conventions:
//! - Handles (`SnGraph`, `SnSpectrum`) are created by `sn_*` constructors
//!   and released with the matching `sn_*_free`; they are never shared
//!   mutably, so one handle may be read from several threads.
//! - Fallible calls return [`SnStatus`] and write results through out
//!   pointers, which are left untouched on failure.
//! - After a non-`Ok` status, [`sn_last_error_message`] returns a
//!   NUL-terminated description valid until the next failing call on the
//!   same thread.
//!
//! The `include/specnet.h` header is generated from this file by cbindgen
//! at build time.
//!
//! Safety: every function is `unsafe` under one shared contract — handle
//! and out-pointer arguments must be NULL or valid, buffers must match the
//! stated lengths, and handles must not be used after `sn_*_free`. NULL is
//! always detected and reported; anything else cannot be.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use specnet::error::Error;
use specnet::generators::{
    assign_weights, gen_ba_cut, gen_er, generate_connected, rng_from_seed, GenConfig, Model,
    WeightDistribution, WeightKind,
};
use specnet::graph::{read_edge_list_path, WeightedGraph};
use specnet::spectral::{decompose, EigenHistogram, RadiusMode, SpectralDecomposition};
use specnet::walk::{
    arrival_times, default_t_max, m_tilde, mc_first_arrival, mean_first_arrival,
};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnStatus {
    Ok = 0,
    /// A required pointer argument was NULL or a buffer had the wrong length.
    NullArgument = 1,
    /// Rejected configuration (sizes, probabilities, ranges).
    InvalidConfig = 2,
    /// Malformed input data (edge lists, ids, weights).
    InvalidData = 3,
    /// The graph is not connected where connectivity is required.
    Disconnected = 4,
    /// Numerical failure (no convergence, degenerate spectrum, censoring).
    Numeric = 5,
    /// File I/O failure.
    Io = 6,
    /// A panic was caught at the boundary.
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnModel {
    Er = 0,
    Ba = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnWeightKind {
    Constant = 0,
    Uniform = 1,
    Exponential = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnRadiusMode {
    Low = 0,
    High = 1,
    Mean = 2,
    Max = 3,
}

/// Degree summary of a graph.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SnDegreeStats {
    pub k_min: usize,
    pub k_ave: f64,
    pub d_min: f64,
    pub d_ave: f64,
    /// k_min^2 / k_ave.
    pub ratio: f64,
}

/// Opaque undirected weighted graph handle.
pub struct SnGraph(WeightedGraph);

/// Opaque eigendecomposition handle (normalized Laplacian spectrum).
pub struct SnSpectrum(SpectralDecomposition);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> SnStatus {
    match err {
        Error::Config(_) => SnStatus::InvalidConfig,
        Error::Io(_) => SnStatus::Io,
        Error::Disconnected { .. } => SnStatus::Disconnected,
        Error::Trial { source, .. } => status_of(source),
        Error::NoConvergence(_)
        | Error::DegenerateSpectrum(_)
        | Error::RadiusOutOfRange(_)
        | Error::ZeroBinProbability { .. }
        | Error::QuadratureFailed(_)
        | Error::CensoredEstimate { .. }
        | Error::GenerationFailed { .. }
        | Error::NotSymmetric { .. } => SnStatus::Numeric,
        _ => SnStatus::InvalidData,
    }
}

fn fail(err: Error) -> SnStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

/// Runs the body with panics converted to `SnStatus::Panic`.
fn guarded(body: impl FnOnce() -> SnStatus) -> SnStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            SnStatus::Panic
        }
    }
}

macro_rules! nonnull {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => {
                set_error(concat!(stringify!($ptr), " is NULL"));
                return SnStatus::NullArgument;
            }
        }
    };
}

fn write_handle<T>(out: *mut *mut T, value: T) -> SnStatus {
    if out.is_null() {
        set_error("out pointer is NULL");
        return SnStatus::NullArgument;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    SnStatus::Ok
}

fn write_f64(out: *mut f64, value: f64) -> SnStatus {
    if out.is_null() {
        set_error("out pointer is NULL");
        return SnStatus::NullArgument;
    }
    unsafe { *out = value };
    SnStatus::Ok
}

impl From<SnModel> for Model {
    fn from(m: SnModel) -> Self {
        match m {
            SnModel::Er => Model::Er,
            SnModel::Ba => Model::Ba,
        }
    }
}

impl From<SnWeightKind> for WeightKind {
    fn from(k: SnWeightKind) -> Self {
        match k {
            SnWeightKind::Constant => WeightKind::Constant,
            SnWeightKind::Uniform => WeightKind::Uniform,
            SnWeightKind::Exponential => WeightKind::Exponential,
        }
    }
}

impl From<SnRadiusMode> for RadiusMode {
    fn from(m: SnRadiusMode) -> Self {
        match m {
            SnRadiusMode::Low => RadiusMode::Low,
            SnRadiusMode::High => RadiusMode::High,
            SnRadiusMode::Mean => RadiusMode::Mean,
            SnRadiusMode::Max => RadiusMode::Max,
        }
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failure on this thread (empty string if none).
#[no_mangle]
pub unsafe extern "C" fn sn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// One ER draw with unit weights: every pair linked with probability
/// k_ave/(n-1).
#[no_mangle]
pub unsafe extern "C" fn sn_graph_gen_er(
    n: usize,
    k_ave: f64,
    seed: u64,
    out: *mut *mut SnGraph,
) -> SnStatus {
    guarded(|| match gen_er(n, k_ave, &mut rng_from_seed(seed)) {
        Ok(g) => write_handle(out, SnGraph(g)),
        Err(e) => fail(e),
    })
}

/// One cut-BA draw with unit weights: preferential attachment, then each
/// link deleted independently with probability q.
#[no_mangle]
pub unsafe extern "C" fn sn_graph_gen_ba_cut(
    n: usize,
    k_ave: f64,
    q: f64,
    seed: u64,
    out: *mut *mut SnGraph,
) -> SnStatus {
    guarded(|| match gen_ba_cut(n, k_ave, q, &mut rng_from_seed(seed)) {
        Ok(g) => write_handle(out, SnGraph(g)),
        Err(e) => fail(e),
    })
}

/// Full generation pipeline: redraw until connected (up to `max_attempts`,
/// 0 for the default budget), then assign random weights. Writes the number
/// of rejected draws to `rejections_out` when non-NULL.
#[no_mangle]
pub unsafe extern "C" fn sn_graph_gen_connected(
    model: SnModel,
    n: usize,
    k_ave: f64,
    q: f64,
    weights: SnWeightKind,
    w_mean: f64,
    seed: u64,
    max_attempts: usize,
    rejections_out: *mut usize,
    out: *mut *mut SnGraph,
) -> SnStatus {
    guarded(|| {
        let cfg = GenConfig {
            model: model.into(),
            n,
            k_ave,
            q,
            seed,
        };
        let dist = match WeightDistribution::new(weights.into(), w_mean) {
            Ok(d) => d,
            Err(e) => return fail(e),
        };
        let budget = if max_attempts == 0 {
            specnet::generators::DEFAULT_MAX_ATTEMPTS
        } else {
            max_attempts
        };
        match generate_connected(&cfg, &dist, budget) {
            Ok((g, rejections)) => {
                if !rejections_out.is_null() {
                    unsafe { *rejections_out = rejections };
                }
                write_handle(out, SnGraph(g))
            }
            Err(e) => fail(e),
        }
    })
}

/// New graph with the same topology and fresh random weights. The input
/// must have unit weights.
#[no_mangle]
pub unsafe extern "C" fn sn_graph_assign_weights(
    graph: *const SnGraph,
    weights: SnWeightKind,
    w_mean: f64,
    seed: u64,
    out: *mut *mut SnGraph,
) -> SnStatus {
    guarded(|| {
        let g = nonnull!(graph);
        let dist = match WeightDistribution::new(weights.into(), w_mean) {
            Ok(d) => d,
            Err(e) => return fail(e),
        };
        match assign_weights(&g.0, &dist, &mut rng_from_seed(seed)) {
            Ok(w) => write_handle(out, SnGraph(w)),
            Err(e) => fail(e),
        }
    })
}

fn path_from(ptr: *const c_char) -> Result<&'static Path, SnStatus> {
    if ptr.is_null() {
        set_error("path is NULL");
        return Err(SnStatus::NullArgument);
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => {
            set_error("path is not valid UTF-8");
            Err(SnStatus::InvalidData)
        }
    }
}

/// Reads an `i j w` edge list (optional `n <count>` header).
#[no_mangle]
pub unsafe extern "C" fn sn_graph_read_edge_list(
    path: *const c_char,
    out: *mut *mut SnGraph,
) -> SnStatus {
    guarded(|| {
        let path = match path_from(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match read_edge_list_path(path) {
            Ok(g) => write_handle(out, SnGraph(g)),
            Err(e) => fail(e),
        }
    })
}

/// Writes the graph in the same edge-list format (exact round trip).
#[no_mangle]
pub unsafe extern "C" fn sn_graph_write_edge_list(
    graph: *const SnGraph,
    path: *const c_char,
) -> SnStatus {
    guarded(|| {
        let g = nonnull!(graph);
        let path = match path_from(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match g.0.write_edge_list_path(path) {
            Ok(()) => SnStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Releases a graph handle (NULL is a no-op).
#[no_mangle]
pub unsafe extern "C" fn sn_graph_free(graph: *mut SnGraph) {
    if !graph.is_null() {
        drop(unsafe { Box::from_raw(graph) });
    }
}

/// Node count (0 for NULL).
#[no_mangle]
pub unsafe extern "C" fn sn_graph_node_count(graph: *const SnGraph) -> usize {
    unsafe { graph.as_ref() }.map_or(0, |g| g.0.node_count())
}

/// Undirected edge count (0 for NULL).
#[no_mangle]
pub unsafe extern "C" fn sn_graph_edge_count(graph: *const SnGraph) -> usize {
    unsafe { graph.as_ref() }.map_or(0, |g| g.0.edge_count())
}

/// vol(G) = sum of weighted degrees (0 for NULL).
#[no_mangle]
pub unsafe extern "C" fn sn_graph_volume(graph: *const SnGraph) -> f64 {
    unsafe { graph.as_ref() }.map_or(0.0, |g| g.0.volume())
}

/// True iff one component spans all nodes (false for NULL).
#[no_mangle]
pub unsafe extern "C" fn sn_graph_is_connected(graph: *const SnGraph) -> bool {
    unsafe { graph.as_ref() }.is_some_and(|g| g.0.is_connected())
}

/// Degree summary.
#[no_mangle]
pub unsafe extern "C" fn sn_graph_degree_stats(
    graph: *const SnGraph,
    out: *mut SnDegreeStats,
) -> SnStatus {
    guarded(|| {
        let g = nonnull!(graph);
        if out.is_null() {
            set_error("out pointer is NULL");
            return SnStatus::NullArgument;
        }
        let s = g.0.degree_stats();
        unsafe {
            *out = SnDegreeStats {
                k_min: s.k_min,
                k_ave: s.k_ave,
                d_min: s.d_min,
                d_ave: s.d_ave,
                ratio: s.ratio,
            };
        }
        SnStatus::Ok
    })
}

/// Full eigendecomposition of the normalized Laplacian. Every node needs
/// positive degree.
#[no_mangle]
pub unsafe extern "C" fn sn_spectrum_compute(
    graph: *const SnGraph,
    out: *mut *mut SnSpectrum,
) -> SnStatus {
    guarded(|| {
        let g = nonnull!(graph);
        match decompose(&g.0) {
            Ok(dec) => write_handle(out, SnSpectrum(dec)),
            Err(e) => fail(e),
        }
    })
}

/// Releases a spectrum handle (NULL is a no-op).
#[no_mangle]
pub unsafe extern "C" fn sn_spectrum_free(spectrum: *mut SnSpectrum) {
    if !spectrum.is_null() {
        drop(unsafe { Box::from_raw(spectrum) });
    }
}

/// Matrix dimension of the decomposition (0 for NULL).
#[no_mangle]
pub unsafe extern "C" fn sn_spectrum_node_count(spectrum: *const SnSpectrum) -> usize {
    unsafe { spectrum.as_ref() }.map_or(0, |s| s.0.n())
}

/// Copies the ascending eigenvalues into `buf` (length must equal the node
/// count).
#[no_mangle]
pub unsafe extern "C" fn sn_spectrum_eigenvalues(
    spectrum: *const SnSpectrum,
    buf: *mut f64,
    len: usize,
) -> SnStatus {
    guarded(|| {
        let s = nonnull!(spectrum);
        if buf.is_null() {
            set_error("buf is NULL");
            return SnStatus::NullArgument;
        }
        if len != s.0.n() {
            set_error("buffer length does not match the node count");
            return SnStatus::NullArgument;
        }
        let dst = unsafe { std::slice::from_raw_parts_mut(buf, len) };
        dst.copy_from_slice(&s.0.lambdas);
        SnStatus::Ok
    })
}

/// Second-smallest eigenvalue (the spectral gap).
#[no_mangle]
pub unsafe extern "C" fn sn_spectrum_lambda2(spectrum: *const SnSpectrum, out: *mut f64) -> SnStatus {
    guarded(|| {
        let s = nonnull!(spectrum);
        if s.0.n() < 2 {
            set_error("spectrum has fewer than 2 eigenvalues");
            return SnStatus::InvalidData;
        }
        write_f64(out, s.0.lambda2())
    })
}

/// Largest eigenvalue.
#[no_mangle]
pub unsafe extern "C" fn sn_spectrum_lambda_max(spectrum: *const SnSpectrum, out: *mut f64) -> SnStatus {
    guarded(|| {
        let s = nonnull!(spectrum);
        write_f64(out, s.0.lambda_max())
    })
}

/// Semicircle radius read off the spectrum with the given mode.
#[no_mangle]
pub unsafe extern "C" fn sn_spectrum_radius(
    spectrum: *const SnSpectrum,
    mode: SnRadiusMode,
    out: *mut f64,
) -> SnStatus {
    guarded(|| {
        let s = nonnull!(spectrum);
        match s.0.fit_radius(mode.into()) {
            Ok(fit) => write_f64(out, fit.r),
            Err(e) => fail(e),
        }
    })
}

/// Mean relative deviation between the n_h-bin eigenvalue histogram and the
/// fitted semicircle.
#[no_mangle]
pub unsafe extern "C" fn sn_spectrum_fit_error(
    spectrum: *const SnSpectrum,
    n_h: usize,
    mode: SnRadiusMode,
    out: *mut f64,
) -> SnStatus {
    guarded(|| {
        let s = nonnull!(spectrum);
        let hist = match EigenHistogram::from_decomposition(&s.0, n_h) {
            Ok(h) => h,
            Err(e) => return fail(e),
        };
        let fit = match s.0.fit_radius(mode.into()) {
            Ok(f) => f,
            Err(e) => return fail(e),
        };
        match hist.semicircle_relative_error(&fit) {
            Ok(eps) => write_f64(out, eps),
            Err(e) => fail(e),
        }
    })
}

/// Expected first-arrival time under the stationary target distribution:
/// the sum of inverse nonzero eigenvalues.
#[no_mangle]
pub unsafe extern "C" fn sn_spectrum_mean_first_arrival(
    spectrum: *const SnSpectrum,
    out: *mut f64,
) -> SnStatus {
    guarded(|| {
        let s = nonnull!(spectrum);
        match mean_first_arrival(&s.0) {
            Ok(m) => write_f64(out, m),
            Err(e) => fail(e),
        }
    })
}

/// Expected first-arrival times from `source` to every node; `buf` length
/// must equal the node count. The graph must be the one the spectrum was
/// computed from.
#[no_mangle]
pub unsafe extern "C" fn sn_spectrum_arrival_times(
    spectrum: *const SnSpectrum,
    graph: *const SnGraph,
    source: usize,
    buf: *mut f64,
    len: usize,
) -> SnStatus {
    guarded(|| {
        let s = nonnull!(spectrum);
        let g = nonnull!(graph);
        if buf.is_null() {
            set_error("buf is NULL");
            return SnStatus::NullArgument;
        }
        if len != g.0.node_count() || s.0.n() != g.0.node_count() {
            set_error("graph, spectrum and buffer sizes do not match");
            return SnStatus::NullArgument;
        }
        match arrival_times(&s.0, &g.0, source) {
            Ok(f) => {
                unsafe { std::slice::from_raw_parts_mut(buf, len) }.copy_from_slice(&f);
                SnStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Closed-form semicircle approximation of the mean first-arrival time.
#[no_mangle]
pub unsafe extern "C" fn sn_m_tilde(n: usize, r: f64, out: *mut f64) -> SnStatus {
    guarded(|| match m_tilde(n, r) {
        Ok(v) => write_f64(out, v),
        Err(e) => fail(e),
    })
}

/// Monte Carlo first-arrival estimates from `source`: per-node means into
/// `mean_buf` and, when non-NULL, standard errors into `stderr_buf`. Pass
/// t_max = 0 for the default step cap.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn sn_mc_first_arrival(
    graph: *const SnGraph,
    source: usize,
    runs: usize,
    t_max: usize,
    seed: u64,
    mean_buf: *mut f64,
    stderr_buf: *mut f64,
    len: usize,
) -> SnStatus {
    guarded(|| {
        let g = nonnull!(graph);
        if mean_buf.is_null() {
            set_error("mean_buf is NULL");
            return SnStatus::NullArgument;
        }
        if len != g.0.node_count() {
            set_error("buffer length does not match the node count");
            return SnStatus::NullArgument;
        }
        let t_max = if t_max == 0 {
            default_t_max(g.0.node_count())
        } else {
            t_max
        };
        match mc_first_arrival(&g.0, source, runs, t_max, seed) {
            Ok(est) => {
                unsafe { std::slice::from_raw_parts_mut(mean_buf, len) }
                    .copy_from_slice(&est.mean);
                if !stderr_buf.is_null() {
                    unsafe { std::slice::from_raw_parts_mut(stderr_buf, len) }
                        .copy_from_slice(&est.stderr);
                }
                SnStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
