#ifndef TOPOPRINT_H
#define TOPOPRINT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum TopoStatus {
  TOPO_STATUS_OK = 0,
  TOPO_STATUS_NULL_POINTER = 1,
  TOPO_STATUS_INVALID_ARGUMENT = 2,
  TOPO_STATUS_IO = 3,
  TOPO_STATUS_DECODE = 4,
  TOPO_STATUS_TRACK_TOO_SHORT = 5,
  TOPO_STATUS_BAD_FINGERPRINT = 6,
  TOPO_STATUS_INCOMPATIBLE = 7,
  TOPO_STATUS_OUT_OF_RANGE = 8,
  TOPO_STATUS_PANIC = 9,
} TopoStatus;

typedef struct TopoFingerprint TopoFingerprint;

// Outcome of comparing two fingerprints.
typedef struct TopoMatch TopoMatch;

// Audio samples plus sample rate.
typedef struct TopoWaveform TopoWaveform;

// Fingerprinting parameters; obtain defaults from
// [`topo_fingerprint_config_default`].
typedef struct TopoFingerprintConfig {
  // Window length in seconds.
  double window_seconds;
  // Fraction of overlap between consecutive windows, in [0, 1).
  double overlap;
  // Samples per Betti curve.
  size_t betti_resolution;
  // STFT window length in samples.
  size_t window_size;
  size_t hop;
  size_t n_mels;
} TopoFingerprintConfig;

typedef struct TopoCompareParams {
  // Weight of the dimension-0 distance, in [0, 1].
  double lambda;
  // Neighbourhood-median radius.
  size_t smooth_k;
  // Decision threshold on the error.
  double kappa;
} TopoCompareParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The string stays
// valid until the next failing call on the same thread.
const char *topo_last_error(void);

// Library version as a static NUL-terminated string.
const char *topo_version(void);

// Reads a PCM WAV file, mixing stereo down to mono.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum TopoStatus topo_waveform_load_wav(const char *path, struct TopoWaveform **out);

// Copies `len` samples (nominally in [-1, 1]) into a new waveform.
//
// # Safety
// `samples` must point to `len` readable doubles; `out` must be writable.
enum TopoStatus topo_waveform_from_samples(const double *samples,
                                           size_t len,
                                           uint32_t sample_rate,
                                           struct TopoWaveform **out);

// Number of samples, or 0 for NULL.
//
// # Safety
// `w` must be NULL or a live waveform handle.
size_t topo_waveform_len(const struct TopoWaveform *w);

// # Safety
// `w` must be NULL or a live waveform handle.
uint32_t topo_waveform_sample_rate(const struct TopoWaveform *w);

// # Safety
// `w` must be NULL or a handle not yet freed.
void topo_waveform_free(struct TopoWaveform *w);

struct TopoFingerprintConfig topo_fingerprint_config_default(void);

// Fingerprints a waveform. `config` may be NULL for the defaults.
//
// # Safety
// `w` must be a live waveform handle, `config` NULL or readable, `out`
// writable.
enum TopoStatus topo_fingerprint_compute(const struct TopoWaveform *w,
                                         const struct TopoFingerprintConfig *config,
                                         struct TopoFingerprint **out);

// Reads a fingerprint JSON file, verifying version and checksum.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum TopoStatus topo_fingerprint_read(const char *path, struct TopoFingerprint **out);

// # Safety
// `fp` must be a live fingerprint handle; `path` a NUL-terminated string.
enum TopoStatus topo_fingerprint_write(const struct TopoFingerprint *fp, const char *path);

// Number of windows, or 0 for NULL.
//
// # Safety
// `fp` must be NULL or a live fingerprint handle.
size_t topo_fingerprint_len(const struct TopoFingerprint *fp);

// Samples per Betti curve, or 0 for NULL.
//
// # Safety
// `fp` must be NULL or a live fingerprint handle.
size_t topo_fingerprint_resolution(const struct TopoFingerprint *fp);

// Window midpoint in seconds of entry `index`.
//
// # Safety
// `fp` must be a live fingerprint handle; `t` writable.
enum TopoStatus topo_fingerprint_time(const struct TopoFingerprint *fp, size_t index, double *t);

// Copies the Betti curve of dimension `dim` (0 or 1) of entry `index` into
// `buf`, which must hold at least `topo_fingerprint_resolution` values.
//
// # Safety
// `fp` must be a live fingerprint handle; `buf` must have room for `cap`
// values.
enum TopoStatus topo_fingerprint_curve(const struct TopoFingerprint *fp,
                                       size_t index,
                                       uint32_t dim,
                                       uint32_t *buf,
                                       size_t cap);

// # Safety
// `fp` must be NULL or a handle not yet freed.
void topo_fingerprint_free(struct TopoFingerprint *fp);

struct TopoCompareParams topo_compare_params_default(void);

// Compares two fingerprints. `params` may be NULL for the defaults.
//
// # Safety
// `a` and `b` must be live fingerprint handles, `params` NULL or readable,
// `out` writable.
enum TopoStatus topo_compare(const struct TopoFingerprint *a,
                             const struct TopoFingerprint *b,
                             const struct TopoCompareParams *params,
                             struct TopoMatch **out);

// Error `1 - rho`, or NaN for NULL.
//
// # Safety
// `m` must be NULL or a live match handle.
double topo_match_error(const struct TopoMatch *m);

// # Safety
// `m` must be NULL or a live match handle.
double topo_match_rho(const struct TopoMatch *m);

// 1 if the pair is judged a match, 0 otherwise (including NULL).
//
// # Safety
// `m` must be NULL or a live match handle.
int32_t topo_match_is_positive(const struct TopoMatch *m);

// # Safety
// `m` must be NULL or a live match handle.
size_t topo_match_pair_count(const struct TopoMatch *m);

// Copies the matched window times: `t_a[i]`, `t_b[i]` and the smoothed
// `t_b_smoothed[i]`. Any of the output arrays may be NULL to skip it.
//
// # Safety
// `m` must be a live match handle; non-NULL arrays must hold `cap` doubles.
enum TopoStatus topo_match_pairs(const struct TopoMatch *m,
                                 double *t_a,
                                 double *t_b,
                                 double *t_b_smoothed,
                                 size_t cap);

// # Safety
// `m` must be NULL or a handle not yet freed.
void topo_match_free(struct TopoMatch *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOPOPRINT_H */
