#ifndef DTNSIM_H
#define DTNSIM_H

#include <stddef.h>
#include <stdint.h>

typedef enum DtnStatus {
  DTN_STATUS_OK = 0,
  DTN_STATUS_NULL_ARGUMENT = 1,
  DTN_STATUS_INVALID_UTF8 = 2,
  DTN_STATUS_CONFIG = 3,
  DTN_STATUS_OUT_OF_RANGE = 4,
  DTN_STATUS_ENGINE = 5,
  DTN_STATUS_IO = 6,
  DTN_STATUS_INVALID_ARGUMENT = 7,
  DTN_STATUS_PANIC = 8,
} DtnStatus;

typedef enum DtnEventKind {
  DTN_EVENT_KIND_CREATE = 0,
  DTN_EVENT_KIND_SEND_START = 1,
  DTN_EVENT_KIND_RECEIVED = 2,
  DTN_EVENT_KIND_ABORTED = 3,
  DTN_EVENT_KIND_DROP_BUFFER = 4,
  DTN_EVENT_KIND_DROP_TTL = 5,
  DTN_EVENT_KIND_DROP_CUSTODY = 6,
  DTN_EVENT_KIND_REJECT_TOO_LARGE = 7,
} DtnEventKind;

// Results of one finished run.
typedef struct DtnRun DtnRun;

// Parsed configuration, expanded into one entry per sweep combination.
typedef struct DtnScenario DtnScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *dtnsim_version(void);

// Message of the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *dtnsim_last_error(void);

// Parses configuration text. Relative map paths resolve against the
// current directory.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum DtnStatus dtnsim_scenario_parse(const char *text, struct DtnScenario **out);

// Number of runs the scenario expands to, or 0 for NULL.
//
// # Safety
// `scenario` must be NULL or a live handle.
size_t dtnsim_scenario_len(const struct DtnScenario *scenario);

// Overrides the seed of run `index`.
//
// # Safety
// `scenario` must be NULL or a live handle.
enum DtnStatus dtnsim_scenario_set_seed(struct DtnScenario *scenario, size_t index, uint64_t seed);

// # Safety
// `scenario` must be NULL or a handle not yet freed.
void dtnsim_scenario_free(struct DtnScenario *scenario);

// Runs entry `index` of the scenario to completion.
//
// # Safety
// `scenario` must be a live handle and `out` a valid pointer.
enum DtnStatus dtnsim_run(const struct DtnScenario *scenario, size_t index, struct DtnRun **out);

// # Safety
// `run` must be NULL or a handle not yet freed.
void dtnsim_run_free(struct DtnRun *run);

// Total number of event records, or 0 for NULL.
//
// # Safety
// `run` must be NULL or a live handle.
size_t dtnsim_run_record_count(const struct DtnRun *run);

// Number of records of one kind, or 0 for NULL.
//
// # Safety
// `run` must be NULL or a live handle.
size_t dtnsim_run_count(const struct DtnRun *run, enum DtnEventKind kind);

// Highest sampled mean buffer occupancy in percent, or NaN for NULL.
//
// # Safety
// `run` must be NULL or a live handle.
double dtnsim_run_max_occupancy(const struct DtnRun *run);

// Borrows the event log text. The bytes are not NUL-terminated and live as
// long as the run handle.
//
// # Safety
// `run` must be a live handle; `data` and `len` valid pointers.
enum DtnStatus dtnsim_run_event_log(const struct DtnRun *run, const uint8_t **data, size_t *len);

// Writes the event log, occupancy report and manifest into `dir`.
//
// # Safety
// `run` must be a live handle and `dir` a NUL-terminated string.
enum DtnStatus dtnsim_run_write(const struct DtnRun *run, const char *dir);

// Exponential moving average of `values` into `out`, both `len` long.
// `alpha` must lie in (0, 1].
//
// # Safety
// `values` and `out` must point to `len` doubles each, or may be NULL when
// `len` is 0.
enum DtnStatus dtnsim_ema(const double *values, size_t len, double alpha, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DTNSIM_H */
