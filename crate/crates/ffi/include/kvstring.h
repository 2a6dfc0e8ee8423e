#ifndef KVSTRING_H
#define KVSTRING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result codes. Zero is success.
typedef enum KvsStatus {
  KVS_STATUS_OK = 0,
  KVS_STATUS_NULL_POINTER = 1,
  KVS_STATUS_INVALID_UTF8 = 2,
  KVS_STATUS_OUT_OF_RANGE = 3,
  KVS_STATUS_HYPOTHESIS_VIOLATED = 4,
  KVS_STATUS_INFEASIBLE = 5,
  KVS_STATUS_NUMERICAL = 6,
  KVS_STATUS_CONFIG = 7,
  KVS_STATUS_NOT_RUN = 8,
  KVS_STATUS_INDEX_OUT_OF_BOUNDS = 9,
  KVS_STATUS_BUFFER_TOO_SMALL = 10,
  KVS_STATUS_PANIC = 11,
  KVS_STATUS_INTERNAL = 12,
} KvsStatus;

// Opaque simulation handle.
typedef struct KvsSimulation KvsSimulation;

// Dimensionless parameters, validated on every call.
typedef struct KvsParams {
  double v;
  double b;
  double delta;
  double eta;
} KvsParams;

typedef struct KvsEnergySample {
  double t;
  double e;
  double v;
  double sup_y;
} KvsEnergySample;

typedef struct KvsDecayCheck {
  double lambda_bound;
  double lambda_measured;
  double max_violation;
  // 1 on pass, 0 on fail.
  int32_t pass;
} KvsDecayCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next failing call on the same thread.
const char *kvs_last_error(void);

// Library version as a static NUL-terminated string.
const char *kvs_version(void);

double kvs_critical_speed(void);

// # Safety
// `params` must point to a `KvsParams`.
enum KvsStatus kvs_params_validate(const struct KvsParams *params);

// # Safety
// `params` must point to a `KvsParams`; `out` must be writable.
enum KvsStatus kvs_compute_k(const struct KvsParams *params, double *out);

// # Safety
// `params` must point to a `KvsParams`; `out` must be writable.
enum KvsStatus kvs_decay_rate(const struct KvsParams *params, double *out);

// # Safety
// `params` must point to a `KvsParams`; `out` must be writable.
enum KvsStatus kvs_optimize_epsilon(const struct KvsParams *params, double *out);

// # Safety
// `params` must point to a `KvsParams`; `out` must be writable.
enum KvsStatus kvs_bibo_bound(const struct KvsParams *params,
                              double epsilon,
                              double forcing_norm,
                              double *out);

// Builds a simulation from a TOML or JSON config (same schema as the
// command-line tool; a run manifest is accepted too).
//
// # Safety
// `config` must be a NUL-terminated string; `out` must be writable.
enum KvsStatus kvs_simulation_new(const char *config, struct KvsSimulation **out);

// Integrates to `t_end`. Running again replaces the previous trajectory.
//
// # Safety
// `sim` must come from `kvs_simulation_new` and not be freed.
enum KvsStatus kvs_simulation_run(struct KvsSimulation *sim);

// # Safety
// `sim` must be a live handle; `out` must be writable.
enum KvsStatus kvs_simulation_sample_count(const struct KvsSimulation *sim, size_t *out);

// # Safety
// `sim` must be a live handle; `out` must be writable.
enum KvsStatus kvs_simulation_energy_sample(const struct KvsSimulation *sim,
                                            size_t index,
                                            struct KvsEnergySample *out);

// Number of grid nodes, `n + 1`.
//
// # Safety
// `sim` must be a live handle; `out` must be writable.
enum KvsStatus kvs_simulation_node_count(const struct KvsSimulation *sim, size_t *out);

// Copies the final displacement into `buf`, which must hold at least
// `kvs_simulation_node_count` values.
//
// # Safety
// `sim` must be a live handle; `buf` must be writable for `len` doubles.
enum KvsStatus kvs_simulation_final_displacement(const struct KvsSimulation *sim,
                                                 double *buf,
                                                 size_t len);

// Checks the recorded series against `V(0) exp(-lambda t)` with relative
// slack `tol`.
//
// # Safety
// `sim` must be a live handle; `out` must be writable.
enum KvsStatus kvs_simulation_check_decay(const struct KvsSimulation *sim,
                                          double tol,
                                          struct KvsDecayCheck *out);

// Releases a handle. Null is a no-op.
//
// # Safety
// `sim` must come from `kvs_simulation_new` and not be freed twice.
void kvs_simulation_free(struct KvsSimulation *sim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KVSTRING_H */
