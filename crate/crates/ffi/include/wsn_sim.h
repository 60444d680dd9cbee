#ifndef WSN_SIM_H
#define WSN_SIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WsnStatus {
  WSN_STATUS_OK = 0,
  WSN_STATUS_NULL_POINTER = 1,
  WSN_STATUS_INVALID_ARGUMENT = 2,
  WSN_STATUS_INVALID_CONFIG = 3,
  WSN_STATUS_IO = 4,
  /**
   * The simulation has no alive nodes left or reached its round cap.
   */
  WSN_STATUS_FINISHED = 5,
  WSN_STATUS_OUT_OF_RANGE = 6,
  WSN_STATUS_PANIC = 7,
} WsnStatus;

typedef enum WsnStrategy {
  WSN_STRATEGY_DIRECT = 0,
  WSN_STRATEGY_MTE = 1,
  WSN_STRATEGY_DIFFUSION = 2,
} WsnStrategy;

typedef enum WsnFormat {
  WSN_FORMAT_CSV = 0,
  WSN_FORMAT_JSON = 1,
} WsnFormat;

/**
 * Opaque simulation handle.
 */
typedef struct WsnSimulation WsnSimulation;

/**
 * Radio constants; see `wsn_radio_params_default`.
 */
typedef struct WsnRadioParams {
  double e_tx_elec;
  double e_rx_elec;
  double eps_amp;
  double path_loss_exponent;
  double idle_power;
  double round_period;
  double link_bandwidth;
  uint64_t packet_bits;
  uint64_t ctrl_bits;
  double initial_energy;
} WsnRadioParams;

/**
 * Counters for one round.
 */
typedef struct WsnRoundStats {
  uint64_t round;
  uint64_t originated;
  uint64_t delivered;
  uint64_t lost;
  uint64_t exceptions;
  uint64_t alive_after;
} WsnRoundStats;

/**
 * Lifetime metrics. Rounds are 0 and `utility_pct` is NaN until known.
 */
typedef struct WsnLifetime {
  uint64_t first_death_round;
  uint64_t last_death_round;
  double utility_pct;
  uint64_t rounds_run;
  bool truncated;
  uint64_t delivered;
  uint64_t lost;
  uint64_t exceptions;
  double energy_used_uj;
} WsnLifetime;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * NUL-terminated library version; static storage.
 */
const char *wsn_version(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated and
 * always NUL-terminated when `len > 0`). Returns the full message length
 * excluding the terminator.
 *
 * # Safety
 * `buf` must be NULL or point to `len` writable bytes.
 */
size_t wsn_last_error(char *buf, size_t len);

struct WsnRadioParams wsn_radio_params_default(void);

/**
 * Energy (µJ) to transmit `bits` over `distance` meters.
 *
 * # Safety
 * `params` and `out` must be valid pointers.
 */
enum WsnStatus wsn_tx_energy(const struct WsnRadioParams *params,
                             uint64_t bits,
                             double distance,
                             double *out);

/**
 * Energy (µJ) to receive `bits`.
 *
 * # Safety
 * `params` and `out` must be valid pointers.
 */
enum WsnStatus wsn_rx_energy(const struct WsnRadioParams *params, uint64_t bits, double *out);

/**
 * Idle drain (µJ) over `seconds`.
 *
 * # Safety
 * `params` and `out` must be valid pointers.
 */
enum WsnStatus wsn_idle_energy(const struct WsnRadioParams *params, double seconds, double *out);

/**
 * # Safety
 * `params` must be a valid pointer.
 */
uint64_t wsn_max_packets_per_round(const struct WsnRadioParams *params);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum WsnStatus wsn_utility_pct(uint64_t first, uint64_t last, double *out);

/**
 * Creates a simulation from `key=value` configuration text (NULL for all
 * defaults). On success `*out` owns a handle to release with
 * `wsn_simulation_free`.
 *
 * # Safety
 * `config` must be NULL or a NUL-terminated string; `out` must be valid.
 */
enum WsnStatus wsn_simulation_new(const char *config, struct WsnSimulation **out);

/**
 * Overrides the routing strategy of configuration text and creates a
 * simulation; a convenience for bindings that sweep strategies.
 *
 * # Safety
 * As for `wsn_simulation_new`.
 */
enum WsnStatus wsn_simulation_new_with(const char *config,
                                       enum WsnStrategy strategy,
                                       uint64_t seed,
                                       struct WsnSimulation **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `sim` must be NULL or a handle from `wsn_simulation_new*` not yet freed.
 */
void wsn_simulation_free(struct WsnSimulation *sim);

/**
 * Runs one round. Returns `WSN_STATUS_FINISHED` without doing anything once
 * every node is dead or the round cap is reached.
 *
 * # Safety
 * `sim` must be a live handle; `stats` may be NULL.
 */
enum WsnStatus wsn_simulation_step(struct WsnSimulation *sim, struct WsnRoundStats *stats);

/**
 * Runs the remaining rounds and fills `lifetime`.
 *
 * # Safety
 * `sim` must be a live handle; `lifetime` may be NULL.
 */
enum WsnStatus wsn_simulation_run(struct WsnSimulation *sim, struct WsnLifetime *lifetime);

/**
 * Lifetime metrics as of the last completed round.
 *
 * # Safety
 * `sim` must be a live handle and `out` valid.
 */
enum WsnStatus wsn_simulation_lifetime(const struct WsnSimulation *sim, struct WsnLifetime *out);

/**
 * # Safety
 * `sim` must be NULL or a live handle.
 */
size_t wsn_simulation_node_count(const struct WsnSimulation *sim);

/**
 * # Safety
 * `sim` must be NULL or a live handle.
 */
size_t wsn_simulation_alive_count(const struct WsnSimulation *sim);

/**
 * Remaining energy (µJ) of node `node`.
 *
 * # Safety
 * `sim` must be a live handle and `out` valid.
 */
enum WsnStatus wsn_simulation_node_energy(const struct WsnSimulation *sim,
                                          size_t node,
                                          double *out);

/**
 * Position (m) of node `node`.
 *
 * # Safety
 * `sim` must be a live handle; `x` and `y` valid.
 */
enum WsnStatus wsn_simulation_node_position(const struct WsnSimulation *sim,
                                            size_t node,
                                            double *x,
                                            double *y);

/**
 * Copies up to `cap` alive counts (entry `i` is round `i + 1`) into `buf`
 * and returns the total number of completed rounds. Pass `cap = 0` to query
 * the length.
 *
 * # Safety
 * `sim` must be a live handle; `buf` must hold `cap` elements.
 */
size_t wsn_simulation_alive_curve(const struct WsnSimulation *sim, uint32_t *buf, size_t cap);

/**
 * Writes summary, alive curve, energy trace and manifest into `out_dir`.
 *
 * # Safety
 * `sim` must be a live handle and `out_dir` a NUL-terminated path.
 */
enum WsnStatus wsn_simulation_write_outputs(const struct WsnSimulation *sim,
                                            const char *out_dir,
                                            enum WsnFormat format);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WSN_SIM_H */
