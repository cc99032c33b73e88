#ifndef IASCAN_H
#define IASCAN_H

/* Generated by cbindgen from the iascan-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible entry point.
typedef enum IaStatus {
  IA_STATUS_OK = 0,
  IA_STATUS_NULL_POINTER = 1,
  IA_STATUS_INVALID_ARGUMENT = 2,
  IA_STATUS_HORIZON_EXCEEDED = 3,
  // A support sector is never scanned at or after a reachable entry
  // slot, so an exact evaluation cannot complete.
  IA_STATUS_COVERAGE = 4,
  IA_STATUS_PANIC = 5,
} IaStatus;

// Scanning policy selector for [`ia_run_experiment`].
typedef enum IaStrategy {
  IA_STRATEGY_EA = 0,
  IA_STRATEGY_MLRI = 1,
  IA_STRATEGY_SMBI = 2,
} IaStrategy;

// Probability mass over entry slots `1, 2, ...`, truncated at a tail
// tolerance.
typedef struct IaArrivalPmf IaArrivalPmf;

// Empirical discovery-time histogram from a Monte-Carlo experiment.
typedef struct IaHistogram IaHistogram;

// A precomputed illumination schedule.
typedef struct IaScanSequence IaScanSequence;

// Probability mass over sectors `1..=N`.
typedef struct IaSectorPmf IaSectorPmf;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread; empty until
// a call fails. The pointer stays valid until the next failing call on
// the same thread.
const char *ia_last_error_message(void);

// Symmetric triangular entrance PMF with even base width `width_l`,
// centered at sector `ceil(N/2)`.
enum IaStatus ia_sector_pmf_triangular(size_t n_sectors,
                                       uint64_t width_l,
                                       struct IaSectorPmf **out);

// Uniform entrance PMF, `p_i = 1/N`.
enum IaStatus ia_sector_pmf_uniform(size_t n_sectors, struct IaSectorPmf **out);

// Entrance PMF from `len` non-negative weights, normalized to sum to 1.
//
// # Safety
// `weights` must point to `len` readable doubles.
enum IaStatus ia_sector_pmf_custom(const double *weights, size_t len, struct IaSectorPmf **out);

// # Safety
// `pmf` must be a live handle from an `ia_sector_pmf_*` constructor (or
// null, in which case this is a no-op). The handle is dead afterwards.
void ia_sector_pmf_free(struct IaSectorPmf *pmf);

// Number of sectors; 0 for a null handle.
//
// # Safety
// `pmf` must be null or a live handle.
size_t ia_sector_pmf_len(const struct IaSectorPmf *pmf);

// Copies the per-sector probabilities into `buf` (`len` must be at least
// the sector count).
//
// # Safety
// `pmf` must be a live handle and `buf` must point to `len` writable
// doubles.
enum IaStatus ia_sector_pmf_probs(const struct IaSectorPmf *pmf, double *buf, size_t len);

// Geometric entry-slot PMF with rate `mu`, truncated where the tail mass
// drops below `tail_tolerance`.
enum IaStatus ia_arrival_pmf_geometric(double mu, double tail_tolerance, struct IaArrivalPmf **out);

// # Safety
// `arrival` must be null or a live handle; it is dead afterwards.
void ia_arrival_pmf_free(struct IaArrivalPmf *arrival);

// Number of explicitly materialized entry slots; 0 for a null handle.
//
// # Safety
// `arrival` must be null or a live handle.
size_t ia_arrival_pmf_truncation_horizon(const struct IaArrivalPmf *arrival);

// `w_t` for the 1-based entry `slot`; NaN for a null handle or slot 0.
//
// # Safety
// `arrival` must be null or a live handle.
double ia_arrival_pmf_mass(const struct IaArrivalPmf *arrival, size_t slot);

// MLRI's reference illumination PMF, `q = p`.
//
// # Safety
// `entrance` must be a live handle.
enum IaStatus ia_mlri_optimal_q(const struct IaSectorPmf *entrance, struct IaSectorPmf **out);

// EA schedule repeating `permutation` (a permutation of `1..=n_sectors`)
// cyclically for `horizon` slots.
//
// # Safety
// `permutation` must point to `len` readable size_t values.
enum IaStatus ia_ea_sequence(size_t n_sectors,
                             const size_t *permutation,
                             size_t len,
                             size_t horizon,
                             struct IaScanSequence **out);

// Deterministic SMBI schedule of length `horizon` for the given entrance
// and arrival statistics.
//
// # Safety
// `entrance` and `arrival` must be live handles.
enum IaStatus ia_smbi_sequence(const struct IaSectorPmf *entrance,
                               const struct IaArrivalPmf *arrival,
                               size_t horizon,
                               struct IaScanSequence **out);

// # Safety
// `sequence` must be null or a live handle; it is dead afterwards.
void ia_scan_sequence_free(struct IaScanSequence *sequence);

// Materialized schedule length; 0 for a null handle.
//
// # Safety
// `sequence` must be null or a live handle.
size_t ia_scan_sequence_len(const struct IaScanSequence *sequence);

// Sector scanned in the 1-based `slot`. Periodic schedules extend past
// their materialized length; aperiodic ones report `HorizonExceeded`.
//
// # Safety
// `sequence` must be a live handle and `out` must be writable.
enum IaStatus ia_scan_sequence_sector_at(const struct IaScanSequence *sequence,
                                         size_t slot,
                                         size_t *out);

// MLRI average discovery time at `q = p`: the sum of `1 - p_i` over the
// support of the entrance PMF.
//
// # Safety
// `entrance` must be a live handle and `out` writable.
enum IaStatus ia_mlri_mean_discovery(const struct IaSectorPmf *entrance, double *out);

// EA average discovery time under a uniform entry phase: `(N - 1) / 2`.
enum IaStatus ia_ea_mean_discovery(size_t n_sectors, double *out);

// Exact average discovery time of a deterministic schedule under the
// given entrance and arrival statistics.
//
// # Safety
// All handles must be live and `out` writable.
enum IaStatus ia_deterministic_mean_discovery(const struct IaScanSequence *sequence,
                                              const struct IaSectorPmf *entrance,
                                              const struct IaArrivalPmf *arrival,
                                              double *out);

// Runs `trials` seeded Monte-Carlo trials of `strategy` against the given
// entrance PMF and a geometric arrival with rate `mu`. Identical inputs
// produce bit-identical histograms.
//
// # Safety
// `entrance` must be a live handle and `out` writable.
enum IaStatus ia_run_experiment(const struct IaSectorPmf *entrance,
                                double mu,
                                double tail_tolerance,
                                enum IaStrategy strategy,
                                uint64_t trials,
                                uint64_t seed,
                                size_t horizon,
                                struct IaHistogram **out);

// # Safety
// `histogram` must be null or a live handle; it is dead afterwards.
void ia_histogram_free(struct IaHistogram *histogram);

// # Safety
// `histogram` must be null or a live handle.
uint64_t ia_histogram_trials(const struct IaHistogram *histogram);

// Trials not discovered within the horizon.
//
// # Safety
// `histogram` must be null or a live handle.
uint64_t ia_histogram_censored(const struct IaHistogram *histogram);

// Mean discovery time of the discovered trials; NaN for a null handle.
//
// # Safety
// `histogram` must be null or a live handle.
double ia_histogram_mean(const struct IaHistogram *histogram);

// Unbiased sample variance of the discovered trials; NaN for null.
//
// # Safety
// `histogram` must be null or a live handle.
double ia_histogram_variance(const struct IaHistogram *histogram);

// Standard error of the mean; NaN for null.
//
// # Safety
// `histogram` must be null or a live handle.
double ia_histogram_standard_error(const struct IaHistogram *histogram);

// Number of histogram bins (discovery times `0..len`).
//
// # Safety
// `histogram` must be null or a live handle.
size_t ia_histogram_counts_len(const struct IaHistogram *histogram);

// Copies the per-`tau` trial counts into `buf` (`len` must be at least
// `ia_histogram_counts_len`).
//
// # Safety
// `histogram` must be a live handle and `buf` must point to `len`
// writable uint64 values.
enum IaStatus ia_histogram_counts(const struct IaHistogram *histogram, uint64_t *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IASCAN_H */
