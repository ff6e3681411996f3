#include "qrbm/cross_validation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "qrbm/errors.hpp"
#include "qrbm/evaluation.hpp"

namespace qrbm {

void CvConfig::validate(std::size_t n_rows) const
{
    if (folds < 2)
        throw InvalidArgument("cross-validation needs at least 2 folds");
    if (n_rows < folds)
        throw InvalidArgument("cannot split " + std::to_string(n_rows) + " rows into " +
                              std::to_string(folds) + " folds");
    if (lambda_grid.empty() || gamma0_grid.empty())
        throw InvalidArgument("lambda and gamma0 grids must be non-empty");
    for (double l : lambda_grid)
        if (!(l >= 0.0))
            throw InvalidArgument("lambda grid values must be >= 0");
    for (double g : gamma0_grid)
        if (!(g > 0.0))
            throw InvalidArgument("gamma0 grid values must be > 0");
    if (validation_epochs && *validation_epochs == 0)
        throw InvalidArgument("validation_epochs must be positive");
}

std::vector<FoldSplit> split_folds(std::size_t n_rows, std::size_t M, Rng& rng)
{
    if (M == 0 || n_rows < M)
        throw InvalidArgument("cannot split " + std::to_string(n_rows) + " rows into " +
                              std::to_string(M) + " folds");
    std::vector<Eigen::Index> order(n_rows);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    for (std::size_t i = n_rows; i > 1; --i) {
        auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
        std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }

    // First (n mod M) partitions get one extra row.
    std::vector<std::size_t> bounds(M + 1, 0);
    for (std::size_t f = 0; f < M; ++f)
        bounds[f + 1] = bounds[f] + n_rows / M + (f < n_rows % M ? 1 : 0);

    std::vector<FoldSplit> splits(M);
    for (std::size_t f = 0; f < M; ++f) {
        for (std::size_t i = 0; i < n_rows; ++i) {
            if (i >= bounds[f] && i < bounds[f + 1])
                splits[f].validation.push_back(order[i]);
            else
                splits[f].train.push_back(order[i]);
        }
        std::sort(splits[f].validation.begin(), splits[f].validation.end());
        std::sort(splits[f].train.begin(), splits[f].train.end());
    }
    return splits;
}

ResponseMatrix select_rows(const ResponseMatrix& data, const std::vector<Eigen::Index>& rows)
{
    ResponseMatrix out(static_cast<Eigen::Index>(rows.size()), data.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = data.row(rows[i]);
    return out;
}

namespace {

TrainerConfig unpenalized(const TrainerConfig& base, std::size_t n_rows)
{
    TrainerConfig c = base;
    c.lambda = 0.0;
    c.init = DefaultInit{};
    c.batch_size = std::min(base.batch_size, n_rows);
    return c;
}

} // namespace

RbmParams debias(const RbmParams& w_hat, const ResponseMatrix& train,
                 const TrainerConfig& trainer, Rng& rng)
{
    w_hat.validate();
    TrainerState state(w_hat);
    state.trainable = (w_hat.W.array() != 0.0).cast<std::uint8_t>();
    TrainerConfig config = unpenalized(trainer, static_cast<std::size_t>(train.rows()));
    config.n_attributes = w_hat.K();
    return run_epochs(std::move(state), train, config, rng).state.params;
}

double validation_error(const RbmParams& w_checked, const ResponseMatrix& validation,
                        const TrainerConfig& trainer, std::size_t epochs, Rng& rng)
{
    w_checked.validate();
    TrainerState state(w_checked);
    state.trainable.setZero();
    TrainerConfig config = unpenalized(trainer, static_cast<std::size_t>(validation.rows()));
    config.n_attributes = w_checked.K();
    config.n_epochs = epochs;
    const auto run = run_epochs(std::move(state), validation, config, rng);
    return run.error_trace.back();
}

namespace {

struct RunOutcome {
    CvRecord record;
    RbmParams penalized;
    RbmParams debiased;
};

// Strict preference used for the argmin, including the documented tie-break.
bool better(const CvRecord& a, const CvRecord& b)
{
    if (a.val_error != b.val_error)
        return a.val_error < b.val_error;
    if (a.lambda != b.lambda)
        return a.lambda > b.lambda;
    if (a.gamma0 != b.gamma0)
        return a.gamma0 < b.gamma0;
    return a.fold < b.fold;
}

} // namespace

CvResult cv_select(const ResponseMatrix& data, const CvConfig& cv)
{
    const auto n_rows = static_cast<std::size_t>(data.rows());
    cv.validate(n_rows);
    const std::size_t n_lambda = cv.lambda_grid.size();
    const std::size_t n_gamma = cv.gamma0_grid.size();
    const std::size_t M = cv.folds;
    const std::size_t epochs = cv.validation_epochs.value_or(cv.trainer.n_epochs);

    // Each grid point gets its own partition into folds.
    std::vector<std::vector<FoldSplit>> splits(n_lambda * n_gamma);
    for (std::size_t li = 0; li < n_lambda; ++li)
        for (std::size_t gi = 0; gi < n_gamma; ++gi) {
            Rng rng = make_rng(cv.seed, {0, li, gi});
            splits[li * n_gamma + gi] = split_folds(n_rows, M, rng);
        }

    const std::size_t n_tasks = n_lambda * n_gamma * M;
    std::vector<std::optional<RunOutcome>> outcomes(n_tasks);

    auto run_task = [&](std::size_t task) {
        const std::size_t f = task % M;
        const std::size_t gi = (task / M) % n_gamma;
        const std::size_t li = task / (M * n_gamma);
        const FoldSplit& split = splits[li * n_gamma + gi][f];

        Rng rng = make_rng(cv.seed, {1, li, gi, f});
        const ResponseMatrix train_rows = select_rows(data, split.train);
        const ResponseMatrix valid_rows = select_rows(data, split.validation);

        TrainerConfig config = cv.trainer;
        config.lambda = cv.lambda_grid[li];
        config.gamma0 = cv.gamma0_grid[gi];
        config.batch_size = std::min(config.batch_size, split.train.size());

        RunOutcome out;
        out.penalized = train(train_rows, config, rng).params;
        out.debiased = debias(out.penalized, train_rows, config, rng);
        out.record.lambda = config.lambda;
        out.record.gamma0 = config.gamma0;
        out.record.lambda_index = li;
        out.record.gamma0_index = gi;
        out.record.fold = f;
        out.record.val_error = validation_error(out.debiased, valid_rows, config, epochs, rng);
        out.record.sparsity = static_cast<double>((out.penalized.W.array() == 0.0).count()) /
                              static_cast<double>(out.penalized.W.size());
        outcomes[task] = std::move(out);
    };

    const std::size_t n_threads = std::clamp<std::size_t>(cv.threads, 1, n_tasks);
    if (n_threads == 1) {
        for (std::size_t t = 0; t < n_tasks; ++t)
            run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < n_threads; ++w) {
            workers.emplace_back([&] {
                for (std::size_t t = next++; t < n_tasks; t = next++) {
                    try {
                        run_task(t);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& w : workers)
            w.join();
        if (failure)
            std::rethrow_exception(failure);
    }

    CvResult result;
    std::size_t best = 0;
    for (std::size_t t = 0; t < n_tasks; ++t) {
        result.records.push_back(outcomes[t]->record);
        if (t > 0 && better(outcomes[t]->record, outcomes[best]->record))
            best = t;
    }
    RunOutcome& win = *outcomes[best];
    result.q = extract_q(win.penalized.W);
    result.lambda_star = win.record.lambda;
    result.gamma0_star = win.record.gamma0;
    result.fold_star = win.record.fold;
    result.val_error = win.record.val_error;
    result.penalized = std::move(win.penalized);
    result.debiased = std::move(win.debiased);
    return result;
}

} // namespace qrbm
