//! C ABI for the iascan library.
//!
//! Conventions:
//!
//! - Every constructor takes an `out` parameter and returns an [`IaStatus`];
//!   `IA_STATUS_OK` means `*out` now owns a heap object that must be
//!   released with the matching `ia_*_free` function.
//! - Handles are opaque; readers take `const` pointers and never mutate.
//! - On any non-OK status, [`ia_last_error_message`] returns a
//!   NUL-terminated description valid until the next failing call on the
//!   same thread.
//! - All indices are 1-based (sectors `1..=N`, slots `1..`), matching the
//!   CSV artifacts of the `iascan` CLI.

use std::cell::RefCell;
use std::ffi::CString;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use iascan::analytic;
use iascan::dist::{self, ArrivalPmf, SectorPmf};
use iascan::sim::{self, ArrivalSpec, DiscoveryHistogram, EntranceSpec, SimConfig, StrategyKind};
use iascan::strategies::{self, ScanSequence};
use iascan::Error;

/// Result code of every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    HorizonExceeded = 3,
    /// A support sector is never scanned at or after a reachable entry
    /// slot, so an exact evaluation cannot complete.
    Coverage = 4,
    Panic = 5,
}

/// Scanning policy selector for [`ia_run_experiment`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IaStrategy {
    Ea = 0,
    Mlri = 1,
    Smbi = 2,
}

impl From<IaStrategy> for StrategyKind {
    fn from(s: IaStrategy) -> Self {
        match s {
            IaStrategy::Ea => StrategyKind::Ea,
            IaStrategy::Mlri => StrategyKind::Mlri,
            IaStrategy::Smbi => StrategyKind::Smbi,
        }
    }
}

/// Probability mass over sectors `1..=N`.
pub struct IaSectorPmf(SectorPmf);

/// Probability mass over entry slots `1, 2, ...`, truncated at a tail
/// tolerance.
pub struct IaArrivalPmf(ArrivalPmf);

/// A precomputed illumination schedule.
pub struct IaScanSequence(ScanSequence);

/// Empirical discovery-time histogram from a Monte-Carlo experiment.
pub struct IaHistogram(DiscoveryHistogram);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> IaStatus {
    match err {
        Error::HorizonExceeded { .. } => IaStatus::HorizonExceeded,
        Error::Coverage { .. } => IaStatus::Coverage,
        _ => IaStatus::InvalidArgument,
    }
}

/// Runs `f`, boxing its success into `out`. Panics are downgraded to
/// [`IaStatus::Panic`] so they never unwind across the C boundary.
fn construct<T>(out: *mut *mut T, f: impl FnOnce() -> Result<T, Error>) -> IaStatus {
    if out.is_null() {
        set_last_error("output pointer is null");
        return IaStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(value)) => {
            unsafe { *out = Box::into_raw(Box::new(value)) };
            IaStatus::Ok
        }
        Ok(Err(err)) => {
            set_last_error(&err.to_string());
            status_of(&err)
        }
        Err(_) => {
            set_last_error("internal panic");
            IaStatus::Panic
        }
    }
}

fn compute(f: impl FnOnce() -> Result<f64, Error>, out: *mut f64) -> IaStatus {
    if out.is_null() {
        set_last_error("output pointer is null");
        return IaStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(value)) => {
            unsafe { *out = value };
            IaStatus::Ok
        }
        Ok(Err(err)) => {
            set_last_error(&err.to_string());
            status_of(&err)
        }
        Err(_) => {
            set_last_error("internal panic");
            IaStatus::Panic
        }
    }
}

/// Message describing the most recent failure on this thread; empty until
/// a call fails. The pointer stays valid until the next failing call on
/// the same thread.
#[no_mangle]
pub extern "C" fn ia_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

// ---------------------------------------------------------------------------
// Sector PMFs
// ---------------------------------------------------------------------------

/// Symmetric triangular entrance PMF with even base width `width_l`,
/// centered at sector `ceil(N/2)`.
#[no_mangle]
pub extern "C" fn ia_sector_pmf_triangular(
    n_sectors: usize,
    width_l: u64,
    out: *mut *mut IaSectorPmf,
) -> IaStatus {
    construct(out, || {
        dist::triangular_pmf(n_sectors, width_l).map(IaSectorPmf)
    })
}

/// Uniform entrance PMF, `p_i = 1/N`.
#[no_mangle]
pub extern "C" fn ia_sector_pmf_uniform(
    n_sectors: usize,
    out: *mut *mut IaSectorPmf,
) -> IaStatus {
    construct(out, || dist::uniform_pmf(n_sectors).map(IaSectorPmf))
}

/// Entrance PMF from `len` non-negative weights, normalized to sum to 1.
///
/// # Safety
/// `weights` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn ia_sector_pmf_custom(
    weights: *const f64,
    len: usize,
    out: *mut *mut IaSectorPmf,
) -> IaStatus {
    if weights.is_null() && len > 0 {
        set_last_error("weights pointer is null");
        return IaStatus::NullPointer;
    }
    let weights = unsafe { std::slice::from_raw_parts(weights, len) };
    construct(out, || dist::custom_pmf(weights).map(IaSectorPmf))
}

/// # Safety
/// `pmf` must be a live handle from an `ia_sector_pmf_*` constructor (or
/// null, in which case this is a no-op). The handle is dead afterwards.
#[no_mangle]
pub unsafe extern "C" fn ia_sector_pmf_free(pmf: *mut IaSectorPmf) {
    if !pmf.is_null() {
        drop(unsafe { Box::from_raw(pmf) });
    }
}

/// Number of sectors; 0 for a null handle.
///
/// # Safety
/// `pmf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ia_sector_pmf_len(pmf: *const IaSectorPmf) -> usize {
    match unsafe { pmf.as_ref() } {
        Some(p) => p.0.n_sectors(),
        None => 0,
    }
}

/// Copies the per-sector probabilities into `buf` (`len` must be at least
/// the sector count).
///
/// # Safety
/// `pmf` must be a live handle and `buf` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn ia_sector_pmf_probs(
    pmf: *const IaSectorPmf,
    buf: *mut f64,
    len: usize,
) -> IaStatus {
    let Some(p) = (unsafe { pmf.as_ref() }) else {
        set_last_error("pmf handle is null");
        return IaStatus::NullPointer;
    };
    if buf.is_null() {
        set_last_error("buffer pointer is null");
        return IaStatus::NullPointer;
    }
    let probs = p.0.probs();
    if len < probs.len() {
        set_last_error("buffer too small for sector probabilities");
        return IaStatus::InvalidArgument;
    }
    unsafe { std::slice::from_raw_parts_mut(buf, probs.len()) }.copy_from_slice(probs);
    IaStatus::Ok
}

// ---------------------------------------------------------------------------
// Arrival PMFs
// ---------------------------------------------------------------------------

/// Geometric entry-slot PMF with rate `mu`, truncated where the tail mass
/// drops below `tail_tolerance`.
#[no_mangle]
pub extern "C" fn ia_arrival_pmf_geometric(
    mu: f64,
    tail_tolerance: f64,
    out: *mut *mut IaArrivalPmf,
) -> IaStatus {
    construct(out, || {
        dist::geometric_arrival(mu, tail_tolerance).map(IaArrivalPmf)
    })
}

/// # Safety
/// `arrival` must be null or a live handle; it is dead afterwards.
#[no_mangle]
pub unsafe extern "C" fn ia_arrival_pmf_free(arrival: *mut IaArrivalPmf) {
    if !arrival.is_null() {
        drop(unsafe { Box::from_raw(arrival) });
    }
}

/// Number of explicitly materialized entry slots; 0 for a null handle.
///
/// # Safety
/// `arrival` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ia_arrival_pmf_truncation_horizon(
    arrival: *const IaArrivalPmf,
) -> usize {
    match unsafe { arrival.as_ref() } {
        Some(a) => a.0.truncation_horizon(),
        None => 0,
    }
}

/// `w_t` for the 1-based entry `slot`; NaN for a null handle or slot 0.
///
/// # Safety
/// `arrival` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ia_arrival_pmf_mass(
    arrival: *const IaArrivalPmf,
    slot: usize,
) -> f64 {
    match unsafe { arrival.as_ref() } {
        Some(a) if slot >= 1 => a.0.mass(slot),
        _ => f64::NAN,
    }
}

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

/// MLRI's reference illumination PMF, `q = p`.
///
/// # Safety
/// `entrance` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ia_mlri_optimal_q(
    entrance: *const IaSectorPmf,
    out: *mut *mut IaSectorPmf,
) -> IaStatus {
    let Some(p) = (unsafe { entrance.as_ref() }) else {
        set_last_error("entrance handle is null");
        return IaStatus::NullPointer;
    };
    construct(out, || Ok(IaSectorPmf(strategies::mlri_optimal_q(&p.0))))
}

/// EA schedule repeating `permutation` (a permutation of `1..=n_sectors`)
/// cyclically for `horizon` slots.
///
/// # Safety
/// `permutation` must point to `len` readable size_t values.
#[no_mangle]
pub unsafe extern "C" fn ia_ea_sequence(
    n_sectors: usize,
    permutation: *const usize,
    len: usize,
    horizon: usize,
    out: *mut *mut IaScanSequence,
) -> IaStatus {
    if permutation.is_null() && len > 0 {
        set_last_error("permutation pointer is null");
        return IaStatus::NullPointer;
    }
    let perm = unsafe { std::slice::from_raw_parts(permutation, len) };
    construct(out, || {
        strategies::ea_sequence(n_sectors, perm, horizon).map(IaScanSequence)
    })
}

/// Deterministic SMBI schedule of length `horizon` for the given entrance
/// and arrival statistics.
///
/// # Safety
/// `entrance` and `arrival` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn ia_smbi_sequence(
    entrance: *const IaSectorPmf,
    arrival: *const IaArrivalPmf,
    horizon: usize,
    out: *mut *mut IaScanSequence,
) -> IaStatus {
    let (Some(p), Some(w)) = (unsafe { entrance.as_ref() }, unsafe { arrival.as_ref() })
    else {
        set_last_error("entrance or arrival handle is null");
        return IaStatus::NullPointer;
    };
    construct(out, || {
        strategies::smbi_sequence(&p.0, &w.0, horizon).map(IaScanSequence)
    })
}

/// # Safety
/// `sequence` must be null or a live handle; it is dead afterwards.
#[no_mangle]
pub unsafe extern "C" fn ia_scan_sequence_free(sequence: *mut IaScanSequence) {
    if !sequence.is_null() {
        drop(unsafe { Box::from_raw(sequence) });
    }
}

/// Materialized schedule length; 0 for a null handle.
///
/// # Safety
/// `sequence` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ia_scan_sequence_len(sequence: *const IaScanSequence) -> usize {
    match unsafe { sequence.as_ref() } {
        Some(s) => s.0.len(),
        None => 0,
    }
}

/// Sector scanned in the 1-based `slot`. Periodic schedules extend past
/// their materialized length; aperiodic ones report `HorizonExceeded`.
///
/// # Safety
/// `sequence` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ia_scan_sequence_sector_at(
    sequence: *const IaScanSequence,
    slot: usize,
    out: *mut usize,
) -> IaStatus {
    let Some(s) = (unsafe { sequence.as_ref() }) else {
        set_last_error("sequence handle is null");
        return IaStatus::NullPointer;
    };
    if out.is_null() {
        set_last_error("output pointer is null");
        return IaStatus::NullPointer;
    }
    if slot == 0 {
        set_last_error("slots are 1-based");
        return IaStatus::InvalidArgument;
    }
    match catch_unwind(AssertUnwindSafe(|| s.0.sector_at(slot))) {
        Ok(Ok(sector)) => {
            unsafe { *out = sector };
            IaStatus::Ok
        }
        Ok(Err(err)) => {
            set_last_error(&err.to_string());
            status_of(&err)
        }
        Err(_) => {
            set_last_error("internal panic");
            IaStatus::Panic
        }
    }
}

// ---------------------------------------------------------------------------
// Analytic evaluators
// ---------------------------------------------------------------------------

/// MLRI average discovery time at `q = p`: the sum of `1 - p_i` over the
/// support of the entrance PMF.
///
/// # Safety
/// `entrance` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ia_mlri_mean_discovery(
    entrance: *const IaSectorPmf,
    out: *mut f64,
) -> IaStatus {
    let Some(p) = (unsafe { entrance.as_ref() }) else {
        set_last_error("entrance handle is null");
        return IaStatus::NullPointer;
    };
    compute(|| Ok(analytic::mlri_mean_discovery(&p.0)), out)
}

/// EA average discovery time under a uniform entry phase: `(N - 1) / 2`.
#[no_mangle]
pub extern "C" fn ia_ea_mean_discovery(n_sectors: usize, out: *mut f64) -> IaStatus {
    compute(
        || {
            if n_sectors == 0 {
                return Err(Error::InvalidConfig("need at least one sector".into()));
            }
            Ok(analytic::ea_mean_discovery(n_sectors))
        },
        out,
    )
}

/// Exact average discovery time of a deterministic schedule under the
/// given entrance and arrival statistics.
///
/// # Safety
/// All handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ia_deterministic_mean_discovery(
    sequence: *const IaScanSequence,
    entrance: *const IaSectorPmf,
    arrival: *const IaArrivalPmf,
    out: *mut f64,
) -> IaStatus {
    let (Some(s), Some(p), Some(w)) = (
        unsafe { sequence.as_ref() },
        unsafe { entrance.as_ref() },
        unsafe { arrival.as_ref() },
    ) else {
        set_last_error("sequence, entrance or arrival handle is null");
        return IaStatus::NullPointer;
    };
    compute(
        || analytic::deterministic_mean_discovery(&s.0, &p.0, &w.0),
        out,
    )
}

// ---------------------------------------------------------------------------
// Monte-Carlo engine
// ---------------------------------------------------------------------------

/// Runs `trials` seeded Monte-Carlo trials of `strategy` against the given
/// entrance PMF and a geometric arrival with rate `mu`. Identical inputs
/// produce bit-identical histograms.
///
/// # Safety
/// `entrance` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ia_run_experiment(
    entrance: *const IaSectorPmf,
    mu: f64,
    tail_tolerance: f64,
    strategy: IaStrategy,
    trials: u64,
    seed: u64,
    horizon: usize,
    out: *mut *mut IaHistogram,
) -> IaStatus {
    let Some(p) = (unsafe { entrance.as_ref() }) else {
        set_last_error("entrance handle is null");
        return IaStatus::NullPointer;
    };
    construct(out, || {
        let config = SimConfig {
            n_sectors: p.0.n_sectors(),
            entrance: EntranceSpec::Custom {
                weights: p.0.probs().to_vec(),
            },
            arrival: ArrivalSpec { mu, tail_tolerance },
            strategy: strategy.into(),
            trials,
            seed,
            horizon,
        };
        sim::run_experiment(&config).map(IaHistogram)
    })
}

/// # Safety
/// `histogram` must be null or a live handle; it is dead afterwards.
#[no_mangle]
pub unsafe extern "C" fn ia_histogram_free(histogram: *mut IaHistogram) {
    if !histogram.is_null() {
        drop(unsafe { Box::from_raw(histogram) });
    }
}

/// # Safety
/// `histogram` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ia_histogram_trials(histogram: *const IaHistogram) -> u64 {
    match unsafe { histogram.as_ref() } {
        Some(h) => h.0.trials(),
        None => 0,
    }
}

/// Trials not discovered within the horizon.
///
/// # Safety
/// `histogram` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ia_histogram_censored(histogram: *const IaHistogram) -> u64 {
    match unsafe { histogram.as_ref() } {
        Some(h) => h.0.censored(),
        None => 0,
    }
}

/// Mean discovery time of the discovered trials; NaN for a null handle.
///
/// # Safety
/// `histogram` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ia_histogram_mean(histogram: *const IaHistogram) -> f64 {
    match unsafe { histogram.as_ref() } {
        Some(h) => h.0.mean(),
        None => f64::NAN,
    }
}

/// Unbiased sample variance of the discovered trials; NaN for null.
///
/// # Safety
/// `histogram` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ia_histogram_variance(histogram: *const IaHistogram) -> f64 {
    match unsafe { histogram.as_ref() } {
        Some(h) => h.0.variance(),
        None => f64::NAN,
    }
}

/// Standard error of the mean; NaN for null.
///
/// # Safety
/// `histogram` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ia_histogram_standard_error(histogram: *const IaHistogram) -> f64 {
    match unsafe { histogram.as_ref() } {
        Some(h) => h.0.standard_error(),
        None => f64::NAN,
    }
}

/// Number of histogram bins (discovery times `0..len`).
///
/// # Safety
/// `histogram` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ia_histogram_counts_len(histogram: *const IaHistogram) -> usize {
    match unsafe { histogram.as_ref() } {
        Some(h) => h.0.counts().len(),
        None => 0,
    }
}

/// Copies the per-`tau` trial counts into `buf` (`len` must be at least
/// `ia_histogram_counts_len`).
///
/// # Safety
/// `histogram` must be a live handle and `buf` must point to `len`
/// writable uint64 values.
#[no_mangle]
pub unsafe extern "C" fn ia_histogram_counts(
    histogram: *const IaHistogram,
    buf: *mut u64,
    len: usize,
) -> IaStatus {
    let Some(h) = (unsafe { histogram.as_ref() }) else {
        set_last_error("histogram handle is null");
        return IaStatus::NullPointer;
    };
    if buf.is_null() {
        set_last_error("buffer pointer is null");
        return IaStatus::NullPointer;
    }
    let counts = h.0.counts();
    if len < counts.len() {
        set_last_error("buffer too small for histogram counts");
        return IaStatus::InvalidArgument;
    }
    unsafe { std::slice::from_raw_parts_mut(buf, counts.len()) }.copy_from_slice(counts);
    IaStatus::Ok
}
