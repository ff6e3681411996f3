#include "qrbm/qrbm.h"

#include <new>
#include <string>

#include "qrbm/attribute_classify.hpp"
#include "qrbm/cd_trainer.hpp"
#include "qrbm/cross_validation.hpp"
#include "qrbm/errors.hpp"
#include "qrbm/evaluation.hpp"
#include "qrbm/experiment.hpp"
#include "qrbm/matrix_io.hpp"
#include "qrbm/rbm_core.hpp"

struct qrbm_matrix {
    qrbm::Matrix m;
};

struct qrbm_model {
    qrbm::RbmParams p;
};

namespace {

thread_local std::string g_last_error;

qrbm_status fail(qrbm_status s, const char* what)
{
    g_last_error = what;
    return s;
}

template <typename F>
qrbm_status guarded(F&& body)
{
    g_last_error.clear();
    try {
        body();
        return QRBM_OK;
    } catch (const qrbm::InvalidArgument& e) {
        return fail(QRBM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const qrbm::SizeLimitError& e) {
        return fail(QRBM_ERR_SIZE_LIMIT, e.what());
    } catch (const qrbm::UndefinedRateError& e) {
        return fail(QRBM_ERR_UNDEFINED_RATE, e.what());
    } catch (const qrbm::NumericError& e) {
        return fail(QRBM_ERR_NUMERIC, e.what());
    } catch (const qrbm::IoError& e) {
        return fail(QRBM_ERR_IO, e.what());
    } catch (const qrbm::ParseError& e) {
        return fail(QRBM_ERR_PARSE, e.what());
    } catch (const qrbm::ConfigError& e) {
        return fail(QRBM_ERR_CONFIG, e.what());
    } catch (const std::bad_alloc&) {
        return fail(QRBM_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(QRBM_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(QRBM_ERR_INTERNAL, "unknown error");
    }
}

void need(const void* p, const char* name)
{
    if (p == nullptr)
        throw qrbm::InvalidArgument(std::string(name) + " is NULL");
}

qrbm_matrix* wrap(qrbm::Matrix m)
{
    return new qrbm_matrix{std::move(m)};
}

qrbm_model* wrap(qrbm::RbmParams p)
{
    return new qrbm_model{std::move(p)};
}

qrbm::BinaryMatrix binary(const qrbm_matrix* m, const char* name)
{
    need(m, name);
    if (!qrbm::is_binary(m->m))
        throw qrbm::InvalidArgument(std::string(name) + " has entries other than 0 and 1");
    return m->m.cast<std::uint8_t>();
}

qrbm::Vector as_vector(const qrbm_matrix* m, const char* name)
{
    need(m, name);
    if (m->m.cols() == 1)
        return m->m.col(0);
    if (m->m.rows() == 1)
        return m->m.row(0).transpose();
    throw qrbm::InvalidArgument(std::string(name) + " must be a vector");
}

qrbm::TrainerConfig trainer_config(const qrbm_train_options& o)
{
    qrbm::TrainerConfig t;
    t.n_attributes = o.n_attributes;
    t.lambda = o.lambda;
    t.gamma0 = o.gamma0;
    t.batch_size = o.batch_size;
    t.n_epochs = o.n_epochs;
    switch (o.lr_schedule) {
    case QRBM_LR_PER_EPOCH: t.lr_schedule = qrbm::LrSchedule::per_epoch; break;
    case QRBM_LR_PER_ITERATION: t.lr_schedule = qrbm::LrSchedule::per_iteration; break;
    default: throw qrbm::InvalidArgument("unknown learning-rate schedule");
    }
    t.normalize_w_update = o.normalize_w_update != 0;
    t.seed = o.seed;
    if (o.warm_start_q)
        t.init = qrbm::WarmStartInit{binary(o.warm_start_q, "warm_start_q")};
    return t;
}

} // namespace

extern "C" {

const char* qrbm_version(void)
{
    return "0.1.0";
}

const char* qrbm_status_name(qrbm_status status)
{
    switch (status) {
    case QRBM_OK: return "ok";
    case QRBM_ERR_INTERNAL: return "internal error";
    case QRBM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case QRBM_ERR_SIZE_LIMIT: return "size limit exceeded";
    case QRBM_ERR_IO: return "i/o error";
    case QRBM_ERR_PARSE: return "parse error";
    case QRBM_ERR_CONFIG: return "configuration error";
    case QRBM_ERR_UNDEFINED_RATE: return "undefined rate";
    case QRBM_ERR_NUMERIC: return "numeric error";
    }
    return "unknown status";
}

const char* qrbm_last_error(void)
{
    return g_last_error.c_str();
}

qrbm_status qrbm_matrix_create(size_t rows, size_t cols, const double* row_major,
                               qrbm_matrix** out)
{
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        qrbm::Matrix m = qrbm::Matrix::Zero(static_cast<Eigen::Index>(rows),
                                            static_cast<Eigen::Index>(cols));
        if (row_major)
            for (size_t i = 0; i < rows; ++i)
                for (size_t j = 0; j < cols; ++j)
                    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        row_major[i * cols + j];
        *out = wrap(std::move(m));
    });
}

void qrbm_matrix_free(qrbm_matrix* m)
{
    delete m;
}

size_t qrbm_matrix_rows(const qrbm_matrix* m)
{
    return m ? static_cast<size_t>(m->m.rows()) : 0;
}

size_t qrbm_matrix_cols(const qrbm_matrix* m)
{
    return m ? static_cast<size_t>(m->m.cols()) : 0;
}

qrbm_status qrbm_matrix_get(const qrbm_matrix* m, size_t row, size_t col, double* out)
{
    return guarded([&] {
        need(m, "matrix");
        need(out, "out");
        if (row >= static_cast<size_t>(m->m.rows()) || col >= static_cast<size_t>(m->m.cols()))
            throw qrbm::InvalidArgument("index out of range");
        *out = m->m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    });
}

qrbm_status qrbm_matrix_copy(const qrbm_matrix* m, double* row_major, size_t capacity)
{
    return guarded([&] {
        need(m, "matrix");
        need(row_major, "row_major");
        const auto rows = static_cast<size_t>(m->m.rows());
        const auto cols = static_cast<size_t>(m->m.cols());
        if (capacity < rows * cols)
            throw qrbm::InvalidArgument("buffer holds " + std::to_string(capacity) +
                                        " values, need " + std::to_string(rows * cols));
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j)
                row_major[i * cols + j] =
                    m->m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    });
}

qrbm_status qrbm_matrix_read(const char* path, qrbm_matrix** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        *out = wrap(qrbm::read_matrix(path));
    });
}

qrbm_status qrbm_matrix_write(const qrbm_matrix* m, const char* path)
{
    return guarded([&] {
        need(m, "matrix");
        need(path, "path");
        qrbm::write_matrix(m->m, path);
    });
}

qrbm_status qrbm_model_create(const qrbm_matrix* W, const qrbm_matrix* b, const qrbm_matrix* c,
                              qrbm_model** out)
{
    return guarded([&] {
        need(W, "W");
        need(out, "out");
        *out = nullptr;
        *out = wrap(qrbm::RbmParams(W->m, as_vector(b, "b"), as_vector(c, "c")));
    });
}

void qrbm_model_free(qrbm_model* model)
{
    delete model;
}

size_t qrbm_model_items(const qrbm_model* model)
{
    return model ? model->p.J() : 0;
}

size_t qrbm_model_attributes(const qrbm_model* model)
{
    return model ? model->p.K() : 0;
}

qrbm_status qrbm_model_weights(const qrbm_model* model, qrbm_matrix** out)
{
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        *out = wrap(model->p.W);
    });
}

qrbm_status qrbm_model_visible_bias(const qrbm_model* model, qrbm_matrix** out)
{
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        *out = wrap(qrbm::Matrix(model->p.b));
    });
}

qrbm_status qrbm_model_hidden_bias(const qrbm_model* model, qrbm_matrix** out)
{
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        *out = wrap(qrbm::Matrix(model->p.c));
    });
}

qrbm_status qrbm_model_log_partition(const qrbm_model* model, double* out)
{
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        *out = qrbm::log_partition_function(model->p);
    });
}

qrbm_status qrbm_model_marginal_loglik(const qrbm_model* model, const qrbm_matrix* responses,
                                       double* out)
{
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        *out = qrbm::marginal_loglik(model->p, binary(responses, "responses"));
    });
}

qrbm_status qrbm_model_orient(const qrbm_model* model, qrbm_model** out)
{
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        *out = nullptr;
        *out = wrap(qrbm::orient_hidden_units(model->p));
    });
}

qrbm_status qrbm_simulate(const char* simulation_json, uint64_t seed, qrbm_matrix** q_out,
                          qrbm_matrix** a_out, qrbm_matrix** r_out)
{
    return guarded([&] {
        need(simulation_json, "simulation_json");
        need(q_out, "q_out");
        need(a_out, "a_out");
        need(r_out, "r_out");
        *q_out = *a_out = *r_out = nullptr;
        const auto d = qrbm::simulate(qrbm::parse_simulation_config(simulation_json), seed);
        *q_out = wrap(d.Q.cast<double>());
        *a_out = wrap(d.A.cast<double>());
        *r_out = wrap(d.R.cast<double>());
    });
}

void qrbm_train_options_init(qrbm_train_options* options)
{
    if (!options)
        return;
    const qrbm::TrainerConfig d;
    options->n_attributes = 0;
    options->lambda = d.lambda;
    options->gamma0 = d.gamma0;
    options->batch_size = d.batch_size;
    options->n_epochs = d.n_epochs;
    options->lr_schedule = QRBM_LR_PER_EPOCH;
    options->normalize_w_update = d.normalize_w_update ? 1 : 0;
    options->seed = 0;
    options->warm_start_q = nullptr;
}

qrbm_status qrbm_train(const qrbm_matrix* responses, const qrbm_train_options* options,
                       qrbm_model** model_out, qrbm_matrix** trace_out)
{
    return guarded([&] {
        need(options, "options");
        need(model_out, "model_out");
        *model_out = nullptr;
        if (trace_out)
            *trace_out = nullptr;
        auto res = qrbm::train(binary(responses, "responses"), trainer_config(*options));
        qrbm::Matrix trace(static_cast<Eigen::Index>(res.error_trace.size()), 1);
        for (size_t e = 0; e < res.error_trace.size(); ++e)
            trace(static_cast<Eigen::Index>(e), 0) = res.error_trace[e];
        *model_out = wrap(std::move(res.params));
        if (trace_out)
            *trace_out = wrap(std::move(trace));
    });
}

void qrbm_cv_options_init(qrbm_cv_options* options)
{
    if (!options)
        return;
    options->folds = 5;
    options->lambda_grid = nullptr;
    options->n_lambda = 0;
    options->gamma0_grid = nullptr;
    options->n_gamma0 = 0;
    options->validation_epochs = 0;
    options->threads = 1;
    options->seed = 0;
    qrbm_train_options_init(&options->trainer);
}

qrbm_status qrbm_cv_select(const qrbm_matrix* responses, const qrbm_cv_options* options,
                           qrbm_matrix** q_out, qrbm_model** model_out,
                           qrbm_cv_summary* summary_out)
{
    return guarded([&] {
        need(options, "options");
        if (q_out)
            *q_out = nullptr;
        if (model_out)
            *model_out = nullptr;
        qrbm::CvConfig cv;
        cv.folds = options->folds;
        cv.lambda_grid = options->lambda_grid
                             ? std::vector<double>(options->lambda_grid,
                                                   options->lambda_grid + options->n_lambda)
                             : qrbm::default_lambda_grid();
        cv.gamma0_grid = options->gamma0_grid
                             ? std::vector<double>(options->gamma0_grid,
                                                   options->gamma0_grid + options->n_gamma0)
                             : qrbm::default_gamma0_grid();
        if (options->validation_epochs > 0)
            cv.validation_epochs = options->validation_epochs;
        cv.threads = options->threads;
        cv.seed = options->seed;
        cv.trainer = trainer_config(options->trainer);
        auto res = qrbm::cv_select(binary(responses, "responses"), cv);
        if (summary_out)
            *summary_out = {res.lambda_star, res.gamma0_star, res.fold_star, res.val_error};
        if (q_out)
            *q_out = wrap(res.q.cast<double>());
        if (model_out)
            *model_out = wrap(std::move(res.debiased));
    });
}

qrbm_status qrbm_extract_q(const qrbm_matrix* W, double tol, qrbm_matrix** out)
{
    return guarded([&] {
        need(W, "W");
        need(out, "out");
        *out = nullptr;
        *out = wrap(qrbm::extract_q(W->m, tol).cast<double>());
    });
}

qrbm_status qrbm_q_errors(const qrbm_matrix* q_hat, const qrbm_matrix* q_true, int match_columns,
                          qrbm_error_report* out, int* permutation, size_t permutation_len)
{
    return guarded([&] {
        need(out, "out");
        const auto r =
            qrbm::q_errors(binary(q_hat, "q_hat"), binary(q_true, "q_true"), match_columns != 0);
        if (permutation) {
            if (permutation_len < r.permutation.size())
                throw qrbm::InvalidArgument("permutation buffer too short");
            for (size_t k = 0; k < r.permutation.size(); ++k)
                permutation[k] = r.permutation[k];
        }
        *out = {r.oe, r.otp, r.otn};
    });
}

qrbm_status qrbm_classify(const qrbm_model* model, const qrbm_matrix* responses, double threshold,
                          qrbm_matrix** out)
{
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        *out = nullptr;
        *out = wrap(qrbm::classify_attributes(model->p, binary(responses, "responses"), threshold)
                        .cast<double>());
    });
}

qrbm_status qrbm_acc(const qrbm_matrix* a_hat, const qrbm_matrix* a_true, double* out,
                     size_t out_len)
{
    return guarded([&] {
        need(out, "out");
        const qrbm::Vector v = qrbm::acc(binary(a_hat, "a_hat"), binary(a_true, "a_true"));
        if (out_len < static_cast<size_t>(v.size()))
            throw qrbm::InvalidArgument("output buffer too short");
        for (Eigen::Index k = 0; k < v.size(); ++k)
            out[k] = v[k];
    });
}

qrbm_status qrbm_run_config(const char* config_path, const char* out_dir,
                            const uint64_t* seed_override, size_t threads)
{
    return guarded([&] {
        need(config_path, "config_path");
        need(out_dir, "out_dir");
        auto config = qrbm::load_config(config_path);
        if (seed_override)
            config.seed = *seed_override;
        if (threads > 0)
            config.threads = threads;
        qrbm::run_experiment(config, out_dir);
    });
}

} // extern "C"
