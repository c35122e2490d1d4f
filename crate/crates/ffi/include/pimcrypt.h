#ifndef PIMCRYPT_H
#define PIMCRYPT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PimStatus {
  PIM_STATUS_OK = 0,
  PIM_STATUS_NULL_POINTER = 1,
  PIM_STATUS_INVALID_ARGUMENT = 2,
  PIM_STATUS_ALIGNMENT = 3,
  PIM_STATUS_CAPACITY = 4,
  PIM_STATUS_CONFIG = 5,
  PIM_STATUS_BUFFER_TOO_SMALL = 6,
  PIM_STATUS_PANIC = 7,
} PimStatus;

typedef enum PimStrategy {
  PIM_STRATEGY_SYNC = 0,
  PIM_STRATEGY_ASYNC_RANK_TRANSFER = 1,
  PIM_STRATEGY_ASYNC_RANK_EXECUTION = 2,
} PimStrategy;

/**
 * Machine profile, kernel costs and host profile.
 */
typedef struct PimConfig PimConfig;

/**
 * Output and priced timeline of a finished job.
 */
typedef struct PimJob PimJob;

typedef struct PimTopology {
  uint32_t ranks;
  uint32_t dpus_per_rank;
  uint32_t tasklets;
} PimTopology;

typedef struct PimPhaseTimes {
  double prepare;
  double cpu_to_dpu;
  double kernel;
  double dpu_to_cpu;
  double makespan;
} PimPhaseTimes;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *pim_last_error_message(void);

struct PimConfig *pim_config_new_default(void);

/**
 * Parses a JSON config document into a new handle.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum PimStatus pim_config_from_json(const char *json, struct PimConfig **out);

/**
 * # Safety
 * `config` must come from this library and not be used afterwards.
 */
void pim_config_free(struct PimConfig *config);

/**
 * Encrypts `len` bytes in ECB mode on the host. `out` receives `len` bytes.
 *
 * # Safety
 * `key` points to 16 bytes, `input` and `out` to `len` bytes.
 */
enum PimStatus pim_aes128_encrypt(const uint8_t *key,
                                  const uint8_t *input,
                                  size_t len,
                                  uint8_t *out);

/**
 * # Safety
 * `message` points to `len` bytes and `digest` to 32 writable bytes.
 */
enum PimStatus pim_sha256(const uint8_t *message, size_t len, uint8_t *digest);

/**
 * Runs a distributed encryption job. A null `config` uses the defaults.
 *
 * # Safety
 * `key` points to 16 bytes, `input` to `len` bytes, `out` is writable.
 */
enum PimStatus pim_run_aes(const struct PimConfig *config,
                           struct PimTopology topology,
                           enum PimStrategy strategy,
                           const uint8_t *key,
                           const uint8_t *input,
                           size_t len,
                           struct PimJob **out);

/**
 * Runs a distributed hashing job over `count` messages.
 *
 * # Safety
 * `messages` and `lengths` point to `count` entries each; every message
 * pointer covers its length.
 */
enum PimStatus pim_run_sha(const struct PimConfig *config,
                           struct PimTopology topology,
                           enum PimStrategy strategy,
                           const uint8_t *const *messages,
                           const size_t *lengths,
                           size_t count,
                           struct PimJob **out);

/**
 * Ciphertext length, or 32 bytes per digest.
 *
 * # Safety
 * `job` must be a live handle or null.
 */
size_t pim_job_output_len(const struct PimJob *job);

/**
 * # Safety
 * `job` must be a live handle; `out` points to `capacity` writable bytes.
 */
enum PimStatus pim_job_copy_output(const struct PimJob *job, uint8_t *out, size_t capacity);

/**
 * # Safety
 * `job` must be a live handle and `out` writable.
 */
enum PimStatus pim_job_phase_times(const struct PimJob *job, struct PimPhaseTimes *out);

/**
 * # Safety
 * `job` must come from this library and not be used afterwards.
 */
void pim_job_free(struct PimJob *job);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PIMCRYPT_H */
