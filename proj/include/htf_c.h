#ifndef HTF_C_H
#define HTF_C_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum htf_status {
    HTF_OK = 0,
    HTF_ERR_DOMAIN = 1,
    HTF_ERR_RESOLUTION = 2,
    HTF_ERR_GRID_MISMATCH = 3,
    HTF_ERR_PRECONDITION = 4,
    HTF_ERR_COVERAGE = 5,
    HTF_ERR_IO = 6,
    HTF_ERR_USAGE = 7,
    HTF_ERR_REFUSED = 8,
    HTF_ERR_INTERNAL = 9
} htf_status;

typedef struct htf_signal htf_signal;
typedef struct htf_report htf_report;

typedef struct htf_config {
    uint64_t seed;
    int log_n; /* grid size N = 2^log_n */
    int trials;
    int chi_exp;
    double epsilon;
} htf_config;

/* Message of the last failed call on this thread; empty after a success. */
const char* htf_last_error(void);
const char* htf_status_name(htf_status s);
void htf_free_string(char* s);

void htf_config_default(htf_config* c);
/* 0 or negative means one worker */
void htf_set_threads(int n);
/* "dft" corrupts the forward transform, "" or "none" clears it */
htf_status htf_set_fault(const char* name);

/* Signals: samples are interleaved (re, im), N values for axes = 1, N*N row-major for axes = 2. */
htf_status htf_signal_create(int n, int axes, const double* interleaved, htf_signal** out);
htf_status htf_signal_read(const char* path, htf_signal** out);
/* format: "csv" or "binary" */
htf_status htf_signal_write(const htf_signal* s, const char* path, const char* format);
int htf_signal_size(const htf_signal* s);
int htf_signal_axes(const htf_signal* s);
size_t htf_signal_count(const htf_signal* s);
htf_status htf_signal_copy(const htf_signal* s, double* interleaved, size_t count);
void htf_signal_free(htf_signal* s);

size_t htf_suite_count(void);
const char* htf_suite_name(size_t i);

/* Runs the suites (all when only is NULL or empty; otherwise a comma-separated list).
   With init = 0 a missing baseline entry is HTF_ERR_IO; with init = 1 the entry is written. */
htf_status htf_verify(const htf_config* c, const char* baseline_path, int init, const char* only, htf_report** out);
int htf_report_exit_code(const htf_report* r);
int htf_report_suite_count(const htf_report* r);
int htf_report_failures(const htf_report* r);
int htf_report_drift_failures(const htf_report* r);
/* format: "csv" or "json" */
htf_status htf_report_render(const htf_report* r, const char* format, char** text);
void htf_report_free(htf_report* r);

/* kind: bht, d, tr or chain; verdict is one of in, out, outside-coverage, admissible, fail@j */
htf_status htf_range(const char* kind, const char* const* args, int nargs, char** verdict);
size_t htf_range_golden_count(void);
int htf_range_golden_mismatches(void);

/* ops: comma-separated operator names (NULL for all); exponents: "p:q:s" cells separated by commas.
   max_slope (optional) receives the largest log-log slope over the cells. */
htf_status htf_scan_norm(const char* ops, const char* exponents, const int* log_ladder, int ladder_len, int trials, uint64_t seed,
                         const char* format, char** text, double* max_slope);
const char* htf_scan_operators(void);

/* Stopping-time decomposition of the canonical tile family against a 0/1 mask. When mask is NULL
   a random mask of the given density is drawn from seed. ok receives 1 when every invariant holds. */
htf_status htf_decompose(const htf_signal* mask, int log_n, double density, uint64_t seed, int chi_exp, char** json, int* ok);

/* kind: 1d, 2d or mixed; cells: reciprocal exponent lists separated by ';', entries by ','. CSV output. */
htf_status htf_leibniz(const char* kind, const char* alpha, const char* beta, const char* cells, int log_n, int trials, uint64_t seed,
                       char** csv);

#ifdef __cplusplus
}
#endif

#endif
