/* C interface for the qsdc-sim scenario runner. */

#ifndef QSDC_SIM_H
#define QSDC_SIM_H

/* Generated by cbindgen from qsdc-sim-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Report serialization formats.
typedef enum QsdcFormat {
  QSDC_FORMAT_JSON = 0,
  QSDC_FORMAT_CSV = 1,
} QsdcFormat;

// Result of every fallible call.
typedef enum QsdcStatus {
  QSDC_STATUS_OK = 0,
  QSDC_STATUS_NULL_POINTER = 1,
  QSDC_STATUS_INVALID_UTF8 = 2,
  QSDC_STATUS_INVALID_SCENARIO = 3,
  QSDC_STATUS_INVALID_FORMAT = 4,
  QSDC_STATUS_RUN_FAILED = 5,
} QsdcStatus;

// Opaque report handle.
typedef struct QsdcReport QsdcReport;

// Opaque scenario handle.
typedef struct QsdcScenario QsdcScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *qsdc_sim_status_name(enum QsdcStatus status);

// Create a built-in scenario by name ("honest-w", "oca-xi", ...).
//
// # Safety
// `name` must be a valid NUL-terminated string and `out` a valid pointer.
enum QsdcStatus qsdc_sim_scenario_builtin(const char *name,
                                          uint64_t trials,
                                          uint64_t master_seed,
                                          struct QsdcScenario **out);

// Create a scenario from its JSON description (the same object that
// appears under `"scenario"` in emitted reports).
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` a valid pointer.
enum QsdcStatus qsdc_sim_scenario_from_json(const char *json, struct QsdcScenario **out);

// Replace the scenario's message with fixed bits, e.g. "010110".
//
// # Safety
// `scenario` must come from a constructor of this library; `bits` must be
// a valid NUL-terminated string.
enum QsdcStatus qsdc_sim_scenario_set_message(struct QsdcScenario *scenario, const char *bits);

// Replace the scenario's message with fresh random bits per trial.
//
// # Safety
// `scenario` must come from a constructor of this library.
enum QsdcStatus qsdc_sim_scenario_set_random_message(struct QsdcScenario *scenario, size_t length);

// Set the detecting-mode fraction (must be strictly between 0 and 1).
//
// # Safety
// `scenario` must come from a constructor of this library.
enum QsdcStatus qsdc_sim_scenario_set_check_fraction(struct QsdcScenario *scenario,
                                                     double fraction);

// Override the triples per trial; 0 restores the derived default.
//
// # Safety
// `scenario` must come from a constructor of this library.
enum QsdcStatus qsdc_sim_scenario_set_sequence_length(struct QsdcScenario *scenario, size_t length);

// Serialize the scenario to JSON (release with `qsdc_sim_string_free`).
//
// # Safety
// `scenario` must come from a constructor of this library; `out` must be
// a valid pointer.
enum QsdcStatus qsdc_sim_scenario_to_json(const struct QsdcScenario *scenario, char **out);

// Release a scenario handle.
//
// # Safety
// `scenario` must come from a constructor of this library or be null.
void qsdc_sim_scenario_free(struct QsdcScenario *scenario);

// Run every trial of the scenario and hand back a report handle.
//
// # Safety
// `scenario` must come from a constructor of this library; `out` must be
// a valid pointer.
enum QsdcStatus qsdc_sim_run(const struct QsdcScenario *scenario, struct QsdcReport **out);

// Serialize a report (release the string with `qsdc_sim_string_free`).
// JSON is canonical and byte-stable for a fixed scenario and seed.
//
// # Safety
// `report` must come from `qsdc_sim_run`; `out` must be a valid pointer.
enum QsdcStatus qsdc_sim_report_emit(const struct QsdcReport *report,
                                     enum QsdcFormat format,
                                     char **out);

// Release a report handle.
//
// # Safety
// `report` must come from `qsdc_sim_run` or be null.
void qsdc_sim_report_free(struct QsdcReport *report);

// Release a string returned by this library.
//
// # Safety
// `s` must have been returned by this library or be null.
void qsdc_sim_string_free(char *s);

// Run the engine invariant suite; returns the number of failed checks
// (0 means everything holds at the 1e-12 tolerance).
uint32_t qsdc_sim_self_test(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSDC_SIM_H */
