/* C interface to the ordstat library.
 *
 * All objects are opaque handles created by *_create / *_from_* functions
 * and released with the matching *_destroy. Every fallible call returns an
 * ordstat_status; on failure ordstat_last_error() describes the problem
 * (per thread, valid until the next call on that thread). Indices into
 * bins, variables and micro-bins are 1-based, as in the C++ interface.
 */
#ifndef ORDSTAT_ORDSTAT_H
#define ORDSTAT_ORDSTAT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ORDSTAT_API __declspec(dllexport)
#else
#define ORDSTAT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ordstat_status {
    ORDSTAT_OK = 0,
    ORDSTAT_ERR_VALIDATION = 1,           /* malformed c or x */
    ORDSTAT_ERR_RANGE = 2,                /* index outside 1..n, d > n, n < 1 */
    ORDSTAT_ERR_INPUT = 3,                /* bad argument, shape mismatch, null pointer */
    ORDSTAT_ERR_INVALID_DISTRIBUTION = 4, /* bad distribution parameters or CDF */
    ORDSTAT_ERR_INVALID_CONDITIONAL = 5,  /* conditional row not a distribution */
    ORDSTAT_ERR_RESOURCE = 6,             /* table or enumeration over its cap */
    ORDSTAT_ERR_NUMERICAL = 7,
    ORDSTAT_ERR_INTERNAL = 8
} ordstat_status;

typedef struct ordstat_query ordstat_query;
typedef struct ordstat_dist ordstat_dist;
typedef struct ordstat_matrix ordstat_matrix;
typedef struct ordstat_chain ordstat_chain;
typedef struct ordstat_schedule ordstat_schedule;
typedef struct ordstat_micro ordstat_micro;

ORDSTAT_API const char* ordstat_version(void);
ORDSTAT_API const char* ordstat_last_error(void);
ORDSTAT_API const char* ordstat_status_name(ordstat_status status);

/* ---- query ------------------------------------------------------------ */

/* c must be strictly increasing in 1..n; x is rewritten to its suffix-min
 * envelope, which leaves the probability unchanged. */
ORDSTAT_API ordstat_status ordstat_query_create(int64_t n, const int64_t* c, const double* x, size_t d,
                                                ordstat_query** out);
ORDSTAT_API void ordstat_query_destroy(ordstat_query* query);
ORDSTAT_API int64_t ordstat_query_n(const ordstat_query* query);
ORDSTAT_API size_t ordstat_query_d(const ordstat_query* query);
/* Copies c and the canonical x (each of length d); either may be NULL. */
ORDSTAT_API ordstat_status ordstat_query_get(const ordstat_query* query, int64_t* c, double* x);
/* delta_j = c_j - c_{j-1}, length d. */
ORDSTAT_API ordstat_status ordstat_query_deltas(const ordstat_query* query, int64_t* out);

/* ---- distributions ---------------------------------------------------- */

ORDSTAT_API ordstat_status ordstat_dist_uniform(double a, double b, ordstat_dist** out);
ORDSTAT_API ordstat_status ordstat_dist_gaussian(double mean, double sigma, ordstat_dist** out);
ORDSTAT_API ordstat_status ordstat_dist_exponential(double rate, ordstat_dist** out);
ORDSTAT_API ordstat_status ordstat_dist_atoms(const double* points, const double* masses, size_t count,
                                              ordstat_dist** out);
ORDSTAT_API ordstat_status ordstat_dist_empirical(const double* samples, size_t count, ordstat_dist** out);
ORDSTAT_API void ordstat_dist_destroy(ordstat_dist* dist);
ORDSTAT_API ordstat_status ordstat_dist_cdf(const ordstat_dist* dist, double t, double* out);

/* ---- bin-probability matrix ------------------------------------------ */

/* Row-major rows x cols values; rows within 1e-12 of summing to 1 are
 * renormalised, anything further off is rejected. */
ORDSTAT_API ordstat_status ordstat_matrix_create(size_t rows, size_t cols, const double* values,
                                                 ordstat_matrix** out);
/* p_{i,j} = F_i(x_j) - F_i(x_{j-1}); count is 1 (shared) or n. */
ORDSTAT_API ordstat_status ordstat_matrix_from_distributions(const ordstat_query* query,
                                                             const ordstat_dist* const* dists, size_t count,
                                                             ordstat_matrix** out);
ORDSTAT_API void ordstat_matrix_destroy(ordstat_matrix* matrix);
ORDSTAT_API size_t ordstat_matrix_rows(const ordstat_matrix* matrix);
ORDSTAT_API size_t ordstat_matrix_cols(const ordstat_matrix* matrix);
ORDSTAT_API ordstat_status ordstat_matrix_get(const ordstat_matrix* matrix, double* out);

/* ---- independent solvers --------------------------------------------- */

typedef struct ordstat_spill_options {
    int prune;                /* skip states that can no longer reach acceptance */
    int precompute_sums;      /* tabulate run sums once per step */
    unsigned threads;         /* 0 or 1 = serial */
    size_t max_table_entries; /* 0 = default (1e8) */
} ordstat_spill_options;

ORDSTAT_API ordstat_spill_options ordstat_spill_default_options(void);

/* options may be NULL for the defaults. */
ORDSTAT_API ordstat_status ordstat_solve_spill(const ordstat_query* query, const ordstat_matrix* p,
                                               const ordstat_spill_options* options, double* out);
ORDSTAT_API ordstat_status ordstat_solve_boncelet(const ordstat_query* query, const ordstat_matrix* p,
                                                  size_t max_table_entries, unsigned threads, double* out);
ORDSTAT_API ordstat_status ordstat_solve_brute(const ordstat_query* query, const ordstat_matrix* p,
                                               double* out);

typedef struct ordstat_mc_result {
    double estimate;
    double stderr_value;
    uint64_t hits;
    uint64_t trials;
} ordstat_mc_result;

ORDSTAT_API ordstat_status ordstat_monte_carlo_independent(const ordstat_query* query,
                                                           const ordstat_dist* const* dists, size_t count,
                                                           uint64_t trials, uint64_t seed, unsigned threads,
                                                           ordstat_mc_result* out);

/* ---- dependent variables --------------------------------------------- */

/* Undirected edges (edge_u[k], edge_v[k]) on vertices 1..n. */
ORDSTAT_API ordstat_status ordstat_schedule_create(size_t n, const size_t* edge_u, const size_t* edge_v,
                                                   size_t edge_count, ordstat_schedule** out);
ORDSTAT_API void ordstat_schedule_destroy(ordstat_schedule* schedule);
ORDSTAT_API size_t ordstat_schedule_max_boundary(const ordstat_schedule* schedule);

ORDSTAT_API ordstat_status ordstat_micro_coarse(const ordstat_query* query, ordstat_micro** out);
ORDSTAT_API ordstat_status ordstat_micro_uniform(const ordstat_query* query, size_t H, double outer_lo,
                                                 double outer_hi, ordstat_micro** out);
ORDSTAT_API ordstat_status ordstat_micro_from_support(const ordstat_query* query, const double* support,
                                                      size_t count, ordstat_micro** out);
ORDSTAT_API void ordstat_micro_destroy(ordstat_micro* micro);
/* (d+1) * H */
ORDSTAT_API size_t ordstat_micro_count(const ordstat_micro* micro);
ORDSTAT_API size_t ordstat_micro_granularity(const ordstat_micro* micro);

/* Fills out[0..out_len) with the distribution of X_i over the flattened
 * micro-bins (index (bin-1)*H + (micro-1)) given the micro-bin locations of
 * its lower neighbours, listed in increasing variable order. Returns 0 on
 * success. */
typedef int (*ordstat_conditional_fn)(void* user, size_t i, const uint32_t* neighbor_bins,
                                      const uint32_t* neighbor_micros, size_t neighbor_count, double* out,
                                      size_t out_len);

typedef struct ordstat_dependent_options {
    int prune;
    unsigned threads;
    size_t max_table_entries; /* 0 = default (1e8) */
} ordstat_dependent_options;

ORDSTAT_API ordstat_dependent_options ordstat_dependent_default_options(void);

ORDSTAT_API ordstat_status ordstat_solve_dependent(const ordstat_query* query, const ordstat_micro* micro,
                                                   const ordstat_schedule* schedule,
                                                   ordstat_conditional_fn conditional, void* user,
                                                   const ordstat_dependent_options* options, double* out);

/* ---- Markov chains ---------------------------------------------------- */

/* X_0 = initial, X_{i+1} = X_i + offsets[k] with probability probs[k].
 * With has_truncation the support is [lo, hi] and moves stop at its edges;
 * otherwise it is the range reachable in n steps. */
ORDSTAT_API ordstat_status ordstat_chain_from_steps(const int64_t* offsets, const double* probs, size_t count,
                                                    int64_t initial, size_t n, int has_truncation, int64_t lo,
                                                    int64_t hi, ordstat_chain** out);
/* rows: (upper-lower+1)^2 row-major; first: distribution of X_1. */
ORDSTAT_API ordstat_status ordstat_chain_from_matrix(int64_t lower, int64_t upper, const double* rows,
                                                     const double* first, ordstat_chain** out);
ORDSTAT_API void ordstat_chain_destroy(ordstat_chain* chain);
ORDSTAT_API ordstat_status ordstat_chain_support(const ordstat_chain* chain, int64_t* lower, int64_t* upper);

ORDSTAT_API ordstat_status ordstat_solve_chain(const ordstat_chain* chain, const ordstat_query* query,
                                               const ordstat_dependent_options* options, double* out);
ORDSTAT_API ordstat_status ordstat_enumerate_paths(const ordstat_chain* chain, const ordstat_query* query,
                                                   double max_paths, double* out);
ORDSTAT_API ordstat_status ordstat_monte_carlo_chain(const ordstat_chain* chain, const ordstat_query* query,
                                                     uint64_t trials, uint64_t seed, unsigned threads,
                                                     ordstat_mc_result* out);

#ifdef __cplusplus
}
#endif

#endif /* ORDSTAT_ORDSTAT_H */
