/* C interface to the homogenization laboratory.
 *
 * Every entry point returns a status code; on failure homog_last_error()
 * carries a message for the calling thread.  Experiment runs are opaque
 * handles owning their result text; pointers returned by accessors stay
 * valid until homog_run_free.
 *
 * A run that completes with failing criteria, or that aborts inside a
 * module, is still a successful API call: the outcome is read back through
 * homog_run_ok / homog_run_pass / homog_run_exit_code.
 */
#ifndef HOMOG_H
#define HOMOG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum homog_status {
  HOMOG_OK = 0,
  HOMOG_ERR_INVALID = 1, /* malformed config or bad arguments */
  HOMOG_ERR_RUNTIME = 2, /* module failure outside a run record */
  HOMOG_ERR_IO = 3       /* file could not be read or written */
} homog_status;

const char* homog_version(void);

/* message of the last failing call on this thread; empty, never NULL */
const char* homog_last_error(void);

typedef struct homog_run homog_run;

/* Parse a config and execute the experiment it describes.  `overrides`
 * may be NULL or a JSON object merged over the experiment block, e.g.
 * "{\"kind\":\"cell\",\"jobs\":4,\"seed\":7}".
 */
homog_status homog_run_text(const char* config_json, const char* overrides,
                            homog_run** out);
homog_status homog_run_file(const char* config_path, const char* overrides,
                            homog_run** out);

/* Re-read a sweep CSV and refit every error metric against eps; the result
 * behaves like a run (CSV echo plus a report with the fits).
 */
homog_status homog_refit_text(const char* csv_text, homog_run** out);
homog_status homog_refit_file(const char* csv_path, homog_run** out);

void homog_run_free(homog_run* run);

int homog_run_ok(const homog_run* run);   /* 0 when a module error aborted it */
int homog_run_pass(const homog_run* run); /* 1 when every criterion passed */
int homog_run_exit_code(const homog_run* run); /* 0 pass, 2 criteria, 3 error */

const char* homog_run_error(const homog_run* run); /* empty when ok */
const char* homog_run_csv(const homog_run* run);
const char* homog_run_report_json(const homog_run* run);

/* Write the CSV and report under out_dir (created if missing) using the
 * names from the config; the CSV path lands in csv_path (cap bytes).
 */
homog_status homog_run_write(const homog_run* run, const char* out_dir,
                             char* csv_path, size_t cap);

/* Slope of log err against log eps with the shared floor / outlier rules.
 * has_slope = 0 with floor_limited = 1 marks a series at the error floor.
 * half_width is the 95 percent confidence half width (0 when undefined).
 */
homog_status homog_fit_rate(const double* eps, const double* err, long n,
                            double* slope, double* half_width, int* has_slope,
                            int* floor_limited);

#ifdef __cplusplus
}
#endif

#endif /* HOMOG_H */
