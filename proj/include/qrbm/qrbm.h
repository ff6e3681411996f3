/* C interface to the qrbm library.
 *
 * Every fallible call returns a qrbm_status. On failure the message is
 * available from qrbm_last_error() on the same thread until the next call.
 * Objects are opaque and owned by the caller once returned; release them
 * with the matching *_free function. Binary matrices (responses, Q,
 * attributes) are passed as qrbm_matrix holding 0.0/1.0.
 */
#ifndef QRBM_H
#define QRBM_H

#include <stddef.h>
#include <stdint.h>

#if defined(QRBM_BUILDING_LIBRARY)
#define QRBM_API __attribute__((visibility("default")))
#else
#define QRBM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qrbm_status {
    QRBM_OK = 0,
    QRBM_ERR_INTERNAL = 1,
    QRBM_ERR_INVALID_ARGUMENT = 2,
    QRBM_ERR_SIZE_LIMIT = 3,
    QRBM_ERR_IO = 4,
    QRBM_ERR_PARSE = 5,
    QRBM_ERR_CONFIG = 6,
    QRBM_ERR_UNDEFINED_RATE = 7,
    QRBM_ERR_NUMERIC = 8
} qrbm_status;

QRBM_API const char* qrbm_version(void);
QRBM_API const char* qrbm_status_name(qrbm_status status);
/* Message of the last failed call on this thread; "" if none. */
QRBM_API const char* qrbm_last_error(void);

/* ---- matrices ---------------------------------------------------------- */

typedef struct qrbm_matrix qrbm_matrix;

/* `row_major` may be NULL for a zero matrix. */
QRBM_API qrbm_status qrbm_matrix_create(size_t rows, size_t cols, const double* row_major,
                                        qrbm_matrix** out);
QRBM_API void qrbm_matrix_free(qrbm_matrix* m);
QRBM_API size_t qrbm_matrix_rows(const qrbm_matrix* m);
QRBM_API size_t qrbm_matrix_cols(const qrbm_matrix* m);
QRBM_API qrbm_status qrbm_matrix_get(const qrbm_matrix* m, size_t row, size_t col, double* out);
/* Copies rows*cols values; `capacity` is the length of `row_major`. */
QRBM_API qrbm_status qrbm_matrix_copy(const qrbm_matrix* m, double* row_major, size_t capacity);
QRBM_API qrbm_status qrbm_matrix_read(const char* path, qrbm_matrix** out);
QRBM_API qrbm_status qrbm_matrix_write(const qrbm_matrix* m, const char* path);

/* ---- models ------------------------------------------------------------ */

typedef struct qrbm_model qrbm_model;

/* W is J x K; b and c are column (or row) vectors of length J and K. */
QRBM_API qrbm_status qrbm_model_create(const qrbm_matrix* W, const qrbm_matrix* b,
                                       const qrbm_matrix* c, qrbm_model** out);
QRBM_API void qrbm_model_free(qrbm_model* model);
QRBM_API size_t qrbm_model_items(const qrbm_model* model);
QRBM_API size_t qrbm_model_attributes(const qrbm_model* model);
QRBM_API qrbm_status qrbm_model_weights(const qrbm_model* model, qrbm_matrix** out);
QRBM_API qrbm_status qrbm_model_visible_bias(const qrbm_model* model, qrbm_matrix** out);
QRBM_API qrbm_status qrbm_model_hidden_bias(const qrbm_model* model, qrbm_matrix** out);
/* Exact; fails with QRBM_ERR_SIZE_LIMIT above 24 units in total. */
QRBM_API qrbm_status qrbm_model_log_partition(const qrbm_model* model, double* out);
QRBM_API qrbm_status qrbm_model_marginal_loglik(const qrbm_model* model,
                                                const qrbm_matrix* responses, double* out);
/* Flips hidden units whose weight column sums below zero. */
QRBM_API qrbm_status qrbm_model_orient(const qrbm_model* model, qrbm_model** out);

/* ---- simulation -------------------------------------------------------- */

/* `simulation_json` uses the "simulation" section of the config format. */
QRBM_API qrbm_status qrbm_simulate(const char* simulation_json, uint64_t seed,
                                   qrbm_matrix** q_out, qrbm_matrix** a_out,
                                   qrbm_matrix** r_out);

/* ---- training ---------------------------------------------------------- */

typedef enum qrbm_lr_schedule {
    QRBM_LR_PER_EPOCH = 0,
    QRBM_LR_PER_ITERATION = 1
} qrbm_lr_schedule;

typedef struct qrbm_train_options {
    size_t n_attributes;
    double lambda;
    double gamma0;
    size_t batch_size;
    size_t n_epochs;
    qrbm_lr_schedule lr_schedule;
    int normalize_w_update;
    uint64_t seed;
    const qrbm_matrix* warm_start_q; /* optional J x K binary */
} qrbm_train_options;

QRBM_API void qrbm_train_options_init(qrbm_train_options* options);

/* `trace_out` (optional) receives the per-epoch mean batch error, n_epochs x 1. */
QRBM_API qrbm_status qrbm_train(const qrbm_matrix* responses, const qrbm_train_options* options,
                                qrbm_model** model_out, qrbm_matrix** trace_out);

typedef struct qrbm_cv_options {
    size_t folds;
    const double* lambda_grid;
    size_t n_lambda;
    const double* gamma0_grid;
    size_t n_gamma0;
    size_t validation_epochs; /* 0: same as trainer.n_epochs */
    size_t threads;
    uint64_t seed;
    qrbm_train_options trainer;
} qrbm_cv_options;

/* Grids are left NULL; qrbm_cv_select then uses the built-in defaults. */
QRBM_API void qrbm_cv_options_init(qrbm_cv_options* options);

typedef struct qrbm_cv_summary {
    double lambda_star;
    double gamma0_star;
    size_t fold_star;
    double val_error;
} qrbm_cv_summary;

/* `model_out` receives the debiased parameters of the selected run. */
QRBM_API qrbm_status qrbm_cv_select(const qrbm_matrix* responses, const qrbm_cv_options* options,
                                    qrbm_matrix** q_out, qrbm_model** model_out,
                                    qrbm_cv_summary* summary_out);

/* ---- evaluation -------------------------------------------------------- */

QRBM_API qrbm_status qrbm_extract_q(const qrbm_matrix* W, double tol, qrbm_matrix** out);

typedef struct qrbm_error_report {
    double oe;
    double otp;
    double otn;
} qrbm_error_report;

/* `permutation` (optional, length K) receives the matched estimate column
 * for each reference column. */
QRBM_API qrbm_status qrbm_q_errors(const qrbm_matrix* q_hat, const qrbm_matrix* q_true,
                                   int match_columns, qrbm_error_report* out, int* permutation,
                                   size_t permutation_len);

QRBM_API qrbm_status qrbm_classify(const qrbm_model* model, const qrbm_matrix* responses,
                                   double threshold, qrbm_matrix** out);

/* Writes K per-attribute agreement rates into `out`. */
QRBM_API qrbm_status qrbm_acc(const qrbm_matrix* a_hat, const qrbm_matrix* a_true, double* out,
                              size_t out_len);

/* ---- experiment runner ------------------------------------------------- */

/* Runs the command described by a JSON config file and writes its artifacts
 * into `out_dir`. `seed_override` may be NULL; `threads` 0 keeps the
 * config's value. */
QRBM_API qrbm_status qrbm_run_config(const char* config_path, const char* out_dir,
                                     const uint64_t* seed_override, size_t threads);

#ifdef __cplusplus
}
#endif

#endif
