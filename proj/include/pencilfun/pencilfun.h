/* C interface to the pencilfun library: A f(A^{-1} B) for symmetric
 * positive definite A and symmetric B, its condition number, and the
 * accuracy / timing harness.
 *
 * All objects are opaque handles released with the matching *_free call.
 * Every fallible call returns a pf_status; on failure the message and the
 * index it refers to (pivot, eigenvalue, line number, ...) are available
 * from pf_last_error() / pf_last_error_index() on the same thread.
 * Matrices are n x n, column-major. */
#ifndef PENCILFUN_PENCILFUN_H
#define PENCILFUN_PENCILFUN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PF_API __declspec(dllexport)
#else
#define PF_API __attribute__((visibility("default")))
#endif

typedef enum pf_status {
  PF_OK = 0,
  PF_NOT_POSITIVE_DEFINITE = 1,
  PF_NO_CONVERGENCE = 2,
  PF_SINGULAR_FACTOR = 3,
  PF_DOMAIN_ERROR = 4,
  PF_UNKNOWN_FUNCTION = 5,
  PF_BAD_PARAMETER = 6,
  PF_SIZE_CAP_EXCEEDED = 7,
  PF_PARSE_ERROR = 8,
  PF_SHAPE_ERROR = 9,
  PF_IO_ERROR = 10,
  PF_OVERFLOW = 11,
  PF_INTERNAL_ERROR = 100
} pf_status;

typedef struct pf_matrix pf_matrix;     /* symmetric matrix */
typedef struct pf_function pf_function; /* scalar function specification */
typedef struct pf_result pf_result;     /* output of one algorithm run */
typedef struct pf_records pf_records;   /* experiment records */

/* ---- errors ---------------------------------------------------------- */

PF_API const char* pf_last_error(void);
PF_API long pf_last_error_index(void);
PF_API const char* pf_status_name(pf_status status);
/* Nonzero for numerical failures (not positive definite, no convergence,
 * singular factor, domain error, overflow) as opposed to bad input. */
PF_API int pf_status_is_numerical(pf_status status);

/* ---- matrices -------------------------------------------------------- */

/* Copies n*n column-major values; they must be exactly symmetric
 * (PF_SHAPE_ERROR otherwise). */
PF_API pf_status pf_matrix_from_array(size_t n, const double* values, pf_matrix** out);
PF_API pf_status pf_matrix_identity(size_t n, pf_matrix** out);
PF_API size_t pf_matrix_dim(const pf_matrix* m);
PF_API double pf_matrix_get(const pf_matrix* m, size_t i, size_t j);
/* Writes n*n column-major values. */
PF_API void pf_matrix_copy_to(const pf_matrix* m, double* values);
/* Matrix Market array files; "-" writes to standard output. */
PF_API pf_status pf_matrix_read(const char* path, pf_matrix** out);
PF_API pf_status pf_matrix_write(const pf_matrix* m, const char* path);
PF_API void pf_matrix_free(pf_matrix* m);

/* Q diag(1, v, ..., v^{n-1}) Q^T, v = cnd^{-1/(n-1)}, Q orthogonal from
 * uniform random data, drawn from the stream seeded with `seed`. */
PF_API pf_status pf_gen_spd(size_t n, double cnd, uint64_t seed, pf_matrix** out);
/* The A, B pair the harness uses for one trial (stream seed ^ trial). */
PF_API pf_status pf_gen_pair(size_t n, double cond_a, double cond_b, uint64_t seed, uint64_t trial,
                             pf_matrix** a, pf_matrix** b);

/* ---- functions ------------------------------------------------------- */

/* "log", "sqrt", "exp", "identity", "constant_one", "harm_mean",
 * "power:t=0.3", "arith_mean:t=0.25", "power_mean:p=2,t=0.5", "dual(log)". */
PF_API pf_status pf_function_parse(const char* text, pf_function** out);
/* Canonical name; valid while the handle lives. */
PF_API const char* pf_function_name(const pf_function* f);
PF_API pf_status pf_function_dual(const pf_function* f, pf_function** out);
PF_API pf_status pf_function_eval(const pf_function* f, double x, double* value);
PF_API pf_status pf_function_divided_difference(const pf_function* f, double x, double y, double* value);
PF_API void pf_function_free(pf_function* f);

/* ---- computing A f(A^{-1} B) ----------------------------------------- */

/* algorithm: "naive", "sqrt_schur" (alg1), "chol_schur" (alg2),
 * "chol_schur_pd" (alg3). variant: NULL or "default", "standard", "fast",
 * "fast_solve", "fast_product". */
PF_API pf_status pf_compute(const pf_matrix* a, const pf_matrix* b, const pf_function* f, const char* algorithm,
                            const char* variant, pf_result** out);
/* Owned by the result. */
PF_API const pf_matrix* pf_result_matrix(const pf_result* r);
PF_API double pf_result_wall_time(const pf_result* r);
/* Leading-order flop count from the cost table of the kernels used. */
PF_API double pf_result_flops(const pf_result* r);
/* Operations actually executed by the loops. */
PF_API uint64_t pf_result_flops_exact(const pf_result* r);
PF_API const char* pf_result_algorithm(const pf_result* r);
PF_API const char* pf_result_variant(const pf_result* r);
PF_API size_t pf_result_warning_count(const pf_result* r);
PF_API const char* pf_result_warning(const pf_result* r, size_t i);
PF_API void pf_result_free(pf_result* r);

/* ||computed - phi||_F / ||phi||_F against the double-double reference. */
PF_API pf_status pf_reference_error(const pf_matrix* a, const pf_matrix* b, const pf_function* f,
                                    const pf_matrix* computed, double* rel_err);

/* ---- conditioning ---------------------------------------------------- */

typedef struct pf_condition_report {
  double cond_phi; /* +inf when phi(A, B) = 0 */
  double dphi_norm;
  double phi_norm;
  double bound_lemma3;
  double bound_eq14;
  double mu_a;
  double mu_b;
  double psi_ra;
} pf_condition_report;

/* size_cap 0 selects the default (32). */
PF_API pf_status pf_cond(const pf_matrix* a, const pf_matrix* b, const pf_function* f, size_t size_cap,
                         pf_condition_report* out);

/* ---- experiments ----------------------------------------------------- */

typedef struct pf_record {
  size_t n;
  double cond_a;
  double cond_b;
  const char* function;
  const char* algorithm;
  const char* variant;
  size_t trials;
  size_t failures;
  double mean_rel_err;
  double median_time_s;
  double flops;
  double u_cond_phi;
} pf_record;

/* algorithms: NULL for all four, or a comma list such as
 * "naive,alg1,alg2:standard,alg3". */
PF_API pf_status pf_accuracy_preset(const char* preset, const char* algorithms, size_t trials, uint64_t seed,
                                    pf_records** out);
/* Cells are (cond_a[k], cond_b[k]) for k < nconds, for every size. */
PF_API pf_status pf_accuracy(const size_t* sizes, size_t nsizes, const double* cond_a, const double* cond_b,
                             size_t nconds, const pf_function* f, const char* algorithms, size_t trials,
                             uint64_t seed, int with_cond, pf_records** out);
PF_API pf_status pf_bench(const size_t* sizes, size_t nsizes, double cond_a, double cond_b, const pf_function* f,
                          const char* algorithms, size_t trials, uint64_t seed, pf_records** out);
PF_API size_t pf_records_count(const pf_records* r);
/* String members stay valid while the handle lives. */
PF_API pf_status pf_records_get(const pf_records* r, size_t i, pf_record* out);
/* path NULL or "-" writes to standard output. */
PF_API pf_status pf_records_write_csv(const pf_records* r, const char* path);
PF_API void pf_records_free(pf_records* r);

#ifdef __cplusplus
}
#endif

#endif /* PENCILFUN_PENCILFUN_H */
