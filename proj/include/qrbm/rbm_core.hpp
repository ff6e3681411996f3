#pragma once

#include <cstddef>

#include "qrbm/types.hpp"

namespace qrbm {

/// Binary-binary RBM with J visible (item) units and K hidden (attribute)
/// units. Energy is E(r, a) = -b'r - c'a - r'Wa.
struct RbmParams {
    Matrix W; // J x K
    Vector b; // J, visible biases
    Vector c; // K, hidden biases

    RbmParams() = default;
    RbmParams(std::size_t J, std::size_t K);
    RbmParams(Matrix weights, Vector visible_bias, Vector hidden_bias);

    std::size_t J() const { return static_cast<std::size_t>(W.rows()); }
    std::size_t K() const { return static_cast<std::size_t>(W.cols()); }

    /// Throws InvalidArgument on inconsistent shapes or non-finite entries.
    void validate() const;

    bool operator==(const RbmParams&) const = default;
};

/// Gradient of the total marginal log-likelihood, same layout as RbmParams.
struct LoglikGradient {
    Matrix W;
    Vector b;
    Vector c;
};

/// Largest J + K for which exact enumeration is allowed.
inline constexpr std::size_t kEnumerationLimit = 24;

double sigmoid(double x);
double softplus(double x); // log(1 + e^x), overflow-safe

double energy(const RbmParams& params, const BinaryVector& r, const BinaryVector& a);

/// P(R_j = 1 | a) for every item j.
Vector cond_prob_visible(const RbmParams& params, const BinaryVector& a);
/// P(alpha_k = 1 | r) for every attribute k.
Vector cond_prob_hidden(const RbmParams& params, const BinaryVector& r);

/// Batched conditionals: rows are subjects. `visible` is N x J, result N x K.
Matrix hidden_probs(const RbmParams& params, const Matrix& visible);
/// `hidden` is N x K, result N x J.
Matrix visible_probs(const RbmParams& params, const Matrix& hidden);

BinaryVector sample_hidden(const RbmParams& params, const BinaryVector& r, Rng& rng);
BinaryVector sample_visible(const RbmParams& params, const BinaryVector& a, Rng& rng);

/// Independent Bernoulli draw per entry. Returned as 0.0/1.0 doubles.
Matrix sample_bernoulli(const Matrix& probs, Rng& rng);

/// Uniform draw on [0, 1) with 53 bits taken straight from the engine, so a
/// given seed gives the same stream on every standard library.
double uniform01(Rng& rng);

// Exact small-instance quantities. All throw SizeLimitError when
// J + K > kEnumerationLimit.
double log_partition_function(const RbmParams& params);
double partition_function(const RbmParams& params);
double joint_prob(const RbmParams& params, const BinaryVector& r, const BinaryVector& a);
double marginal_loglik(const RbmParams& params, const ResponseMatrix& data);
LoglikGradient exact_loglik_gradient(const RbmParams& params, const ResponseMatrix& data);

/// Relabels hidden unit k as its complement: W_k -> -W_k, c_k -> -c_k,
/// b -> b + W_k. The joint distribution of (R, 1 - a_k) is unchanged.
RbmParams flip_hidden_unit(const RbmParams& params, std::size_t k);

/// Flips every hidden unit whose weight column sums to a negative value, so
/// that a_k = 1 raises response probabilities on balance.
RbmParams orient_hidden_units(const RbmParams& params);

} // namespace qrbm
