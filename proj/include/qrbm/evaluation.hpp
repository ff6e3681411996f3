#pragma once

#include <span>
#include <vector>

#include "qrbm/types.hpp"

namespace qrbm {

struct ErrorReport {
    double oe = 0.0;  // overall entry-wise error rate
    double otp = 0.0; // fraction of true 1s estimated as 0
    double otn = 0.0; // fraction of true 0s estimated as 1
    // permutation[k] = column of the estimate aligned with true column k.
    std::vector<int> permutation;
    double mean_batch_error = 0.0;
};

/// q_jk = 1 iff |w_jk| > tol.
QMatrix extract_q(const Matrix& W, double tol = 0.0);

/// Column alignment of `q_hat` to `q_true` minimizing the summed Hamming
/// distance between matched columns. result[k] is the column of q_hat
/// matched to column k of q_true.
std::vector<int> hungarian_match(const BinaryMatrix& q_hat, const BinaryMatrix& q_true);

/// Total Hamming cost of a column alignment.
long matching_cost(const BinaryMatrix& q_hat, const BinaryMatrix& q_true,
                   std::span<const int> permutation);

/// Reorders columns: out.col(k) = m.col(permutation[k]).
BinaryMatrix permute_columns(const BinaryMatrix& m, std::span<const int> permutation);

/// OE/OTP/OTN after optional Hungarian alignment. Throws UndefinedRateError if
/// q_true has no 1s (OTP undefined) or no 0s (OTN undefined).
ErrorReport q_errors(const QMatrix& q_hat, const QMatrix& q_true, bool match_columns = true);

/// (1 / total rows) * sum over batches, rows and items of (R1 - R0)^2.
double mean_batch_error(std::span<const Matrix> reconstructed, std::span<const Matrix> observed);

/// Least-squares coefficients (intercept, beta_1..beta_K) of `response` on
/// [1, A]. Throws NumericError on a rank-deficient design.
Vector ols_regression(const Vector& response, const AttributeMatrix& A);

/// DINA regression slopes for independent attributes with prevalences `p`:
/// beta_k = (1 - s - g) * prod_{i != k, i < K*} p_i for k < K*, else 0.
/// Returns K = p.size() slopes (no intercept).
Vector closed_form_beta_dina(double g, double s, const Vector& p, std::size_t k_star);

} // namespace qrbm
