#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qrbm/cd_trainer.hpp"

namespace qrbm {

struct CvConfig {
    std::size_t folds = 5;
    std::vector<double> lambda_grid;
    std::vector<double> gamma0_grid;
    // lambda and gamma0 of the template are overridden per grid point; its
    // seed is ignored in favour of `seed`.
    TrainerConfig trainer;
    // Epochs for the bias-only adaptation on the validation fold. Defaults to
    // trainer.n_epochs.
    std::optional<std::size_t> validation_epochs;
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    void validate(std::size_t n_rows) const;
};

struct FoldSplit {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> validation;
};

/// M near-equal disjoint validation partitions over shuffled rows.
std::vector<FoldSplit> split_folds(std::size_t n_rows, std::size_t M, Rng& rng);

ResponseMatrix select_rows(const ResponseMatrix& data, const std::vector<Eigen::Index>& rows);

/// Unpenalized retraining from `w_hat` that only updates weights which are
/// nonzero in `w_hat`; biases move freely. Learning-rate schedule restarts at t = 0.
RbmParams debias(const RbmParams& w_hat, const ResponseMatrix& train,
                 const TrainerConfig& trainer, Rng& rng);

/// W frozen at `w_checked`; biases adapt on `validation` for `epochs` epochs.
/// Returns the mean batch error of the final epoch.
double validation_error(const RbmParams& w_checked, const ResponseMatrix& validation,
                        const TrainerConfig& trainer, std::size_t epochs, Rng& rng);

struct CvRecord {
    double lambda = 0.0;
    double gamma0 = 0.0;
    std::size_t lambda_index = 0;
    std::size_t gamma0_index = 0;
    std::size_t fold = 0;
    double val_error = 0.0;
    double sparsity = 0.0; // fraction of exactly-zero weights in the penalized fit
};

struct CvResult {
    QMatrix q;
    double lambda_star = 0.0;
    double gamma0_star = 0.0;
    std::size_t fold_star = 0;
    double val_error = 0.0;
    RbmParams penalized; // selected run, before debiasing
    RbmParams debiased;  // selected run, after debiasing
    std::vector<CvRecord> records; // grid order: lambda, gamma0, fold
};

/// Runs train -> debias -> validation_error for every (lambda, gamma0, fold)
/// and keeps the single run with the smallest validation error. Ties prefer
/// the larger lambda, then the smaller gamma0, then the lower fold index.
CvResult cv_select(const ResponseMatrix& data, const CvConfig& cv);

} // namespace qrbm
