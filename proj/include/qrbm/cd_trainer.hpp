#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "qrbm/rbm_core.hpp"

namespace qrbm {

/// W ~ N(0, 0.1^2), b ~ U(-5, 0), c = 0.
struct DefaultInit {};

/// W starts at a (partially) known Q-matrix; biases as in DefaultInit.
struct WarmStartInit {
    QMatrix q;
};

using InitScheme = std::variant<DefaultInit, WarmStartInit>;

/// What the `t` in gamma0 / (t + 1) counts.
enum class LrSchedule {
    per_epoch,     // completed epochs; constant within an epoch
    per_iteration, // completed CD-1 steps
};

struct TrainerConfig {
    std::size_t n_attributes = 0; // K, the number of hidden units
    double lambda = 0.0;        // L1 coefficient
    double gamma0 = 1.0;        // base learning rate
    std::size_t batch_size = 50;
    std::size_t n_epochs = 300;
    InitScheme init = DefaultInit{};
    std::uint64_t seed = 0;
    LrSchedule lr_schedule = LrSchedule::per_epoch;
    // Divide the weight increment by the batch size, like the bias updates.
    bool normalize_w_update = true;

    /// Throws InvalidArgument. `n_rows` is the size of the data to be trained on.
    void validate(std::size_t n_rows) const;
};

/// Parameters plus the cumulative-penalty ledger of the clipped L1 scheme.
struct TrainerState {
    RbmParams params;
    double u = 0.0;       // total penalty available to every weight so far
    Matrix applied;       // J x K, penalty each weight has actually received
    Matrix pending;       // J x K, w - w' of the previous step, folded in one step late
    BinaryMatrix trainable; // J x K, 0 freezes the weight entirely
    std::uint64_t t = 0;     // CD-1 steps taken
    std::uint64_t epoch = 0; // epochs completed by run_epochs
    // Reconstruction diagnostics of the most recent step.
    double last_sq_error = 0.0; // sum over rows and items of (R1 - R0)^2
    std::size_t last_rows = 0;

    TrainerState() = default;
    explicit TrainerState(RbmParams p);
};

RbmParams init_params(std::size_t J, std::size_t K, const InitScheme& scheme, Rng& rng);

/// gamma0 / (t + 1)
double learning_rate(std::uint64_t t, double gamma0);

/// Clip an intermediate weight against the cumulative penalty.
///   w' > 0:  max(0, w' - (u + applied))
///   w' <= 0: min(0, w' + (u - applied))
double apply_cumulative_l1(double w_prime, double u, double applied);

/// One penalized CD-1 iteration on `batch` (rows are subjects).
TrainerState cd1_step(TrainerState state, const ResponseMatrix& batch,
                      const TrainerConfig& config, Rng& rng);

struct TrainResult {
    RbmParams params;
    std::vector<double> error_trace; // mean batch error per epoch
};

/// Fixed random partition of row indices into batches of `batch_size`; the
/// last batch keeps the remainder.
std::vector<std::vector<Eigen::Index>> partition_batches(std::size_t n_rows,
                                                         std::size_t batch_size, Rng& rng);

/// Runs `config.n_epochs` epochs of cd1_step over a fixed batch partition,
/// starting from `state`. Returns the final state and per-epoch errors.
struct RunResult {
    TrainerState state;
    std::vector<double> error_trace;
};
RunResult run_epochs(TrainerState state, const ResponseMatrix& data,
                     const TrainerConfig& config, Rng& rng);

TrainResult train(const ResponseMatrix& data, const TrainerConfig& config, Rng& rng);

/// Seeds the stream from `config.seed`.
TrainResult train(const ResponseMatrix& data, const TrainerConfig& config);

} // namespace qrbm
