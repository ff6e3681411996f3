#include "qrbm/cd_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qrbm/errors.hpp"

namespace qrbm {

void TrainerConfig::validate(std::size_t n_rows) const
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw InvalidArgument("lambda must be a finite value >= 0");
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0))
        throw InvalidArgument("gamma0 must be a finite value > 0");
    if (batch_size == 0)
        throw InvalidArgument("batch_size must be positive");
    if (n_epochs == 0)
        throw InvalidArgument("n_epochs must be positive");
    if (n_attributes == 0)
        throw InvalidArgument("n_attributes must be positive");
    if (const auto* warm = std::get_if<WarmStartInit>(&init);
        warm && static_cast<std::size_t>(warm->q.cols()) != n_attributes)
        throw InvalidArgument("warm-start Q has " + std::to_string(warm->q.cols()) +
                              " columns, expected " + std::to_string(n_attributes));
    if (n_rows < batch_size)
        throw InvalidArgument("batch_size " + std::to_string(batch_size) +
                              " exceeds the number of rows " + std::to_string(n_rows));
}

TrainerState::TrainerState(RbmParams p)
    : params(std::move(p)),
      applied(Matrix::Zero(params.W.rows(), params.W.cols())),
      pending(Matrix::Zero(params.W.rows(), params.W.cols())),
      trainable(BinaryMatrix::Ones(params.W.rows(), params.W.cols()))
{
}

RbmParams init_params(std::size_t J, std::size_t K, const InitScheme& scheme, Rng& rng)
{
    if (J == 0 || K == 0)
        throw InvalidArgument("init_params needs J >= 1 and K >= 1");
    RbmParams p(J, K);

    std::normal_distribution<double> weight_dist(0.0, 0.1);
    for (Eigen::Index k = 0; k < p.W.cols(); ++k)
        for (Eigen::Index j = 0; j < p.W.rows(); ++j)
            p.W(j, k) = weight_dist(rng);

    // U(-5, 0), open at both ends.
    for (Eigen::Index j = 0; j < p.b.size(); ++j) {
        double x;
        do {
            x = -5.0 * uniform01(rng);
        } while (x == 0.0);
        p.b[j] = x;
    }

    if (const auto* warm = std::get_if<WarmStartInit>(&scheme)) {
        if (static_cast<std::size_t>(warm->q.rows()) != J ||
            static_cast<std::size_t>(warm->q.cols()) != K)
            throw InvalidArgument("warm-start Q is " + std::to_string(warm->q.rows()) + "x" +
                                  std::to_string(warm->q.cols()) + ", model is " +
                                  std::to_string(J) + "x" + std::to_string(K));
        p.W = warm->q.cast<double>();
    }
    return p;
}

double learning_rate(std::uint64_t t, double gamma0)
{
    return gamma0 / (static_cast<double>(t) + 1.0);
}

double apply_cumulative_l1(double w_prime, double u, double applied)
{
    if (w_prime > 0.0)
        return std::max(0.0, w_prime - (u + applied));
    return std::min(0.0, w_prime + (u - applied));
}

namespace {

void step_in_place(TrainerState& s, const Matrix& R0, const TrainerConfig& config, Rng& rng)
{
    const auto n_b = static_cast<double>(R0.rows());
    const double gamma = learning_rate(
        config.lr_schedule == LrSchedule::per_epoch ? s.epoch : s.t, config.gamma0);
    RbmParams& p = s.params;

    // All conditionals use the parameters from before this step.
    const Matrix P0 = hidden_probs(p, R0);
    const Matrix A0 = sample_bernoulli(P0, rng);
    const Matrix R1 = sample_bernoulli(visible_probs(p, A0), rng);
    const Matrix P1 = hidden_probs(p, R1);

    s.u += config.lambda * gamma;

    Matrix step = R0.transpose() * P0 - R1.transpose() * P1;
    if (config.normalize_w_update)
        step /= n_b;

    // Penalty applied at step t-1 enters the ledger at step t, from t = 2 on.
    if (s.t >= 2)
        s.applied += s.pending;

    for (Eigen::Index k = 0; k < p.W.cols(); ++k) {
        for (Eigen::Index j = 0; j < p.W.rows(); ++j) {
            if (!s.trainable(j, k)) {
                s.pending(j, k) = 0.0;
                continue;
            }
            const double w_prime = p.W(j, k) + gamma * step(j, k);
            const double w = apply_cumulative_l1(w_prime, s.u, s.applied(j, k));
            s.pending(j, k) = w - w_prime;
            p.W(j, k) = w;
        }
    }

    p.b += gamma * (R0.colwise().sum() - R1.colwise().sum()).transpose() / n_b;
    p.c += gamma * (P0.colwise().sum() - P1.colwise().sum()).transpose() / n_b;

    s.last_sq_error = (R1 - R0).squaredNorm();
    s.last_rows = static_cast<std::size_t>(R0.rows());
    ++s.t;
}

} // namespace

TrainerState cd1_step(TrainerState state, const ResponseMatrix& batch,
                      const TrainerConfig& config, Rng& rng)
{
    if (batch.rows() == 0)
        throw InvalidArgument("cd1_step needs a non-empty batch");
    if (static_cast<std::size_t>(batch.cols()) != state.params.J())
        throw InvalidArgument("batch has " + std::to_string(batch.cols()) +
                              " columns, model has " + std::to_string(state.params.J()) +
                              " items");
    step_in_place(state, batch.cast<double>(), config, rng);
    return state;
}

std::vector<std::vector<Eigen::Index>> partition_batches(std::size_t n_rows,
                                                         std::size_t batch_size, Rng& rng)
{
    if (batch_size == 0)
        throw InvalidArgument("batch_size must be positive");
    std::vector<Eigen::Index> order(n_rows);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // Fisher-Yates with the engine's own bits.
    for (std::size_t i = n_rows; i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
        std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }
    std::vector<std::vector<Eigen::Index>> batches;
    for (std::size_t start = 0; start < n_rows; start += batch_size) {
        const std::size_t end = std::min(n_rows, start + batch_size);
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
}

RunResult run_epochs(TrainerState state, const ResponseMatrix& data,
                     const TrainerConfig& config, Rng& rng)
{
    config.validate(static_cast<std::size_t>(data.rows()));
    if (static_cast<std::size_t>(data.cols()) != state.params.J())
        throw InvalidArgument("data has " + std::to_string(data.cols()) + " items, model has " +
                              std::to_string(state.params.J()));

    std::vector<Matrix> batches;
    for (const auto& rows : partition_batches(static_cast<std::size_t>(data.rows()),
                                              config.batch_size, rng)) {
        Matrix m(static_cast<Eigen::Index>(rows.size()), data.cols());
        for (std::size_t i = 0; i < rows.size(); ++i)
            m.row(static_cast<Eigen::Index>(i)) = data.row(rows[i]).cast<double>();
        batches.push_back(std::move(m));
    }

    RunResult out;
    out.error_trace.reserve(config.n_epochs);
    const auto n_rows = static_cast<double>(data.rows());
    for (std::size_t e = 0; e < config.n_epochs; ++e) {
        double sq = 0.0;
        for (const auto& batch : batches) {
            step_in_place(state, batch, config, rng);
            sq += state.last_sq_error;
        }
        out.error_trace.push_back(sq / n_rows);
        ++state.epoch;
    }
    out.state = std::move(state);
    return out;
}

TrainResult train(const ResponseMatrix& data, const TrainerConfig& config, Rng& rng)
{
    config.validate(static_cast<std::size_t>(data.rows()));
    if (data.cols() == 0)
        throw InvalidArgument("response matrix has no items");
    TrainerState state(init_params(static_cast<std::size_t>(data.cols()), config.n_attributes,
                                   config.init, rng));
    auto run = run_epochs(std::move(state), data, config, rng);
    return {std::move(run.state.params), std::move(run.error_trace)};
}

TrainResult train(const ResponseMatrix& data, const TrainerConfig& config)
{
    Rng rng = make_rng(config.seed);
    return train(data, config, rng);
}

} // namespace qrbm
