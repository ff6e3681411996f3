#include "qrbm/evaluation.hpp"

#include <cmath>
#include <string>

#include "qrbm/errors.hpp"
#include "qrbm/hungarian.hpp"

namespace qrbm {

QMatrix extract_q(const Matrix& W, double tol)
{
    if (!(tol >= 0.0))
        throw InvalidArgument("extraction tolerance must be >= 0");
    return (W.array().abs() > tol).cast<std::uint8_t>();
}

namespace {

void require_same_shape(const BinaryMatrix& a, const BinaryMatrix& b, const char* what)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidArgument(std::string(what) + ": shapes differ (" + std::to_string(a.rows()) +
                              "x" + std::to_string(a.cols()) + " vs " +
                              std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
}

long column_distance(const BinaryMatrix& a, Eigen::Index ca, const BinaryMatrix& b,
                     Eigen::Index cb)
{
    return static_cast<long>((a.col(ca).array() != b.col(cb).array()).count());
}

} // namespace

std::vector<int> hungarian_match(const BinaryMatrix& q_hat, const BinaryMatrix& q_true)
{
    require_same_shape(q_hat, q_true, "hungarian_match");
    const auto K = q_true.cols();
    // Rows index true columns, columns index estimated columns.
    Matrix cost(K, K);
    for (Eigen::Index t = 0; t < K; ++t)
        for (Eigen::Index e = 0; e < K; ++e)
            cost(t, e) = static_cast<double>(column_distance(q_hat, e, q_true, t));
    return solve_assignment(cost);
}

long matching_cost(const BinaryMatrix& q_hat, const BinaryMatrix& q_true,
                   std::span<const int> permutation)
{
    require_same_shape(q_hat, q_true, "matching_cost");
    long total = 0;
    for (Eigen::Index k = 0; k < q_true.cols(); ++k)
        total += column_distance(q_hat, permutation[static_cast<std::size_t>(k)], q_true, k);
    return total;
}

BinaryMatrix permute_columns(const BinaryMatrix& m, std::span<const int> permutation)
{
    if (static_cast<Eigen::Index>(permutation.size()) != m.cols())
        throw InvalidArgument("permutation length does not match the column count");
    BinaryMatrix out(m.rows(), m.cols());
    for (Eigen::Index k = 0; k < m.cols(); ++k)
        out.col(k) = m.col(permutation[static_cast<std::size_t>(k)]);
    return out;
}

ErrorReport q_errors(const QMatrix& q_hat, const QMatrix& q_true, bool match_columns)
{
    require_same_shape(q_hat, q_true, "q_errors");
    const auto total = static_cast<double>(q_true.size());
    const auto ones = static_cast<double>((q_true.array() != 0).count());
    const double zeros = total - ones;
    if (ones == 0.0)
        throw UndefinedRateError("OTP is undefined: the reference Q-matrix has no 1 entries");
    if (zeros == 0.0)
        throw UndefinedRateError("OTN is undefined: the reference Q-matrix has no 0 entries");

    ErrorReport r;
    if (match_columns) {
        r.permutation = hungarian_match(q_hat, q_true);
    } else {
        r.permutation.resize(static_cast<std::size_t>(q_true.cols()));
        for (std::size_t k = 0; k < r.permutation.size(); ++k)
            r.permutation[k] = static_cast<int>(k);
    }
    const BinaryMatrix aligned = permute_columns(q_hat, r.permutation);

    const auto est = aligned.array() != 0;
    const auto tru = q_true.array() != 0;
    const auto missed = static_cast<double>((!est && tru).count());
    const auto spurious = static_cast<double>((est && !tru).count());
    r.oe = (missed + spurious) / total;
    r.otp = missed / ones;
    r.otn = spurious / zeros;
    return r;
}

double mean_batch_error(std::span<const Matrix> reconstructed, std::span<const Matrix> observed)
{
    if (reconstructed.size() != observed.size())
        throw InvalidArgument("mean_batch_error: batch counts differ");
    double sq = 0.0;
    Eigen::Index rows = 0;
    for (std::size_t b = 0; b < observed.size(); ++b) {
        if (reconstructed[b].rows() != observed[b].rows() ||
            reconstructed[b].cols() != observed[b].cols())
            throw InvalidArgument("mean_batch_error: batch " + std::to_string(b) +
                                  " shapes differ");
        sq += (reconstructed[b] - observed[b]).squaredNorm();
        rows += observed[b].rows();
    }
    if (rows == 0)
        throw InvalidArgument("mean_batch_error: no rows");
    return sq / static_cast<double>(rows);
}

Vector ols_regression(const Vector& response, const AttributeMatrix& A)
{
    if (response.size() != A.rows())
        throw InvalidArgument("ols_regression: response has " + std::to_string(response.size()) +
                              " rows, design has " + std::to_string(A.rows()));
    Matrix X(A.rows(), A.cols() + 1);
    X.col(0).setOnes();
    X.rightCols(A.cols()) = A.cast<double>();

    Eigen::ColPivHouseholderQR<Matrix> qr(X);
    if (qr.rank() < X.cols())
        throw NumericError("ols_regression: design matrix [1, A] is rank deficient (rank " +
                           std::to_string(qr.rank()) + " of " + std::to_string(X.cols()) + ")");
    return qr.solve(response);
}

Vector closed_form_beta_dina(double g, double s, const Vector& p, std::size_t k_star)
{
    if (!(g > 0.0 && g < 1.0 - s && 1.0 - s < 1.0))
        throw InvalidArgument("closed_form_beta_dina needs 0 < g < 1 - s < 1");
    if (k_star == 0 || static_cast<Eigen::Index>(k_star) > p.size())
        throw InvalidArgument("closed_form_beta_dina needs 1 <= K* <= K");
    if (!((p.array() > 0.0) && (p.array() < 1.0)).all())
        throw InvalidArgument("closed_form_beta_dina needs prevalences in (0, 1)");

    const auto ks = static_cast<Eigen::Index>(k_star);
    Vector beta = Vector::Zero(p.size());
    for (Eigen::Index k = 0; k < ks; ++k) {
        double prod = 1.0;
        for (Eigen::Index i = 0; i < ks; ++i)
            if (i != k)
                prod *= p[i];
        beta[k] = (1.0 - s - g) * prod;
    }
    return beta;
}

} // namespace qrbm
