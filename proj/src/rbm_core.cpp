#include "qrbm/rbm_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qrbm/errors.hpp"

namespace qrbm {

Rng make_rng(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path)
{
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * path.size());
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(master_seed);
    for (auto p : path)
        push(p);
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

bool is_binary(const Matrix& m)
{
    return ((m.array() == 0.0) || (m.array() == 1.0)).all();
}

BinaryMatrix to_binary(const Matrix& m)
{
    if (!is_binary(m))
        throw InvalidArgument("matrix has entries other than 0 and 1");
    return m.cast<std::uint8_t>();
}

RbmParams::RbmParams(std::size_t J, std::size_t K)
    : W(Matrix::Zero(static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(K))),
      b(Vector::Zero(static_cast<Eigen::Index>(J))),
      c(Vector::Zero(static_cast<Eigen::Index>(K)))
{
}

RbmParams::RbmParams(Matrix weights, Vector visible_bias, Vector hidden_bias)
    : W(std::move(weights)), b(std::move(visible_bias)), c(std::move(hidden_bias))
{
    validate();
}

void RbmParams::validate() const
{
    if (W.rows() != b.size() || W.cols() != c.size())
        throw InvalidArgument("RBM parameter shapes disagree: W is " + std::to_string(W.rows()) +
                              "x" + std::to_string(W.cols()) + ", b has " +
                              std::to_string(b.size()) + ", c has " + std::to_string(c.size()));
    if (W.rows() == 0 || W.cols() == 0)
        throw InvalidArgument("RBM needs at least one visible and one hidden unit");
    if (!W.allFinite() || !b.allFinite() || !c.allFinite())
        throw InvalidArgument("RBM parameters contain NaN or Inf");
}

double sigmoid(double x)
{
    if (x >= 0.0)
        return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x)
{
    if (x > 0.0)
        return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

void require_visible(const RbmParams& p, Eigen::Index n)
{
    if (n != p.W.rows())
        throw InvalidArgument("visible vector has length " + std::to_string(n) + ", expected " +
                              std::to_string(p.W.rows()));
}

void require_hidden(const RbmParams& p, Eigen::Index n)
{
    if (n != p.W.cols())
        throw InvalidArgument("hidden vector has length " + std::to_string(n) + ", expected " +
                              std::to_string(p.W.cols()));
}

void require_enumerable(const RbmParams& p)
{
    if (p.J() + p.K() > kEnumerationLimit)
        throw SizeLimitError("exact enumeration needs J + K <= " +
                             std::to_string(kEnumerationLimit) + ", got " +
                             std::to_string(p.J() + p.K()));
}

Vector bits_of(std::uint64_t mask, Eigen::Index n)
{
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = static_cast<double>((mask >> i) & 1u);
    return v;
}

// log of the unnormalized visible marginal: b'r + sum_k softplus(c_k + (W'r)_k).
double log_free_weight(const RbmParams& p, const Vector& r)
{
    const Vector act = p.c + p.W.transpose() * r;
    double s = p.b.dot(r);
    for (Eigen::Index k = 0; k < act.size(); ++k)
        s += softplus(act[k]);
    return s;
}

} // namespace

double energy(const RbmParams& params, const BinaryVector& r, const BinaryVector& a)
{
    require_visible(params, r.size());
    require_hidden(params, a.size());
    const Vector rv = r.cast<double>();
    const Vector av = a.cast<double>();
    return -params.b.dot(rv) - params.c.dot(av) - rv.dot(params.W * av);
}

Vector cond_prob_visible(const RbmParams& params, const BinaryVector& a)
{
    require_hidden(params, a.size());
    const Vector act = params.b + params.W * a.cast<double>();
    return act.unaryExpr([](double x) { return sigmoid(x); });
}

Vector cond_prob_hidden(const RbmParams& params, const BinaryVector& r)
{
    require_visible(params, r.size());
    const Vector act = params.c + params.W.transpose() * r.cast<double>();
    return act.unaryExpr([](double x) { return sigmoid(x); });
}

Matrix hidden_probs(const RbmParams& params, const Matrix& visible)
{
    require_visible(params, visible.cols());
    Matrix act = visible * params.W;
    act.rowwise() += params.c.transpose();
    return act.unaryExpr([](double x) { return sigmoid(x); });
}

Matrix visible_probs(const RbmParams& params, const Matrix& hidden)
{
    require_hidden(params, hidden.cols());
    Matrix act = hidden * params.W.transpose();
    act.rowwise() += params.b.transpose();
    return act.unaryExpr([](double x) { return sigmoid(x); });
}

Matrix sample_bernoulli(const Matrix& probs, Rng& rng)
{
    Matrix out(probs.rows(), probs.cols());
    // Row-major draw order so a subject's draws are contiguous in the stream.
    for (Eigen::Index i = 0; i < probs.rows(); ++i)
        for (Eigen::Index j = 0; j < probs.cols(); ++j)
            out(i, j) = uniform01(rng) < probs(i, j) ? 1.0 : 0.0;
    return out;
}

BinaryVector sample_hidden(const RbmParams& params, const BinaryVector& r, Rng& rng)
{
    const Vector p = cond_prob_hidden(params, r);
    BinaryVector out(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k)
        out[k] = uniform01(rng) < p[k] ? 1 : 0;
    return out;
}

BinaryVector sample_visible(const RbmParams& params, const BinaryVector& a, Rng& rng)
{
    const Vector p = cond_prob_visible(params, a);
    BinaryVector out(p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j)
        out[j] = uniform01(rng) < p[j] ? 1 : 0;
    return out;
}

double log_partition_function(const RbmParams& params)
{
    params.validate();
    require_enumerable(params);
    const auto J = static_cast<Eigen::Index>(params.J());
    const std::uint64_t n_visible = std::uint64_t{1} << J;

    // Hidden units are summed out analytically; log-sum-exp over visible states.
    double max_term = -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::uint64_t m = 0; m < n_visible; ++m) {
        const double t = log_free_weight(params, bits_of(m, J));
        if (t > max_term) {
            acc = acc * std::exp(max_term - t) + 1.0;
            max_term = t;
        } else {
            acc += std::exp(t - max_term);
        }
    }
    return max_term + std::log(acc);
}

double partition_function(const RbmParams& params)
{
    return std::exp(log_partition_function(params));
}

double joint_prob(const RbmParams& params, const BinaryVector& r, const BinaryVector& a)
{
    const double e = energy(params, r, a);
    return std::exp(-e - log_partition_function(params));
}

double marginal_loglik(const RbmParams& params, const ResponseMatrix& data)
{
    params.validate();
    require_visible(params, data.cols());
    const double log_z = log_partition_function(params);
    double total = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        total += log_free_weight(params, data.row(i).transpose().cast<double>()) - log_z;
    return total;
}

LoglikGradient exact_loglik_gradient(const RbmParams& params, const ResponseMatrix& data)
{
    params.validate();
    require_visible(params, data.cols());
    const double log_z = log_partition_function(params);
    const auto J = static_cast<Eigen::Index>(params.J());
    const auto K = static_cast<Eigen::Index>(params.K());

    // Positive phase: sum over observations of E[-dE/dtheta | R_i].
    const Matrix R = data.cast<double>();
    const Matrix P = hidden_probs(params, R);
    LoglikGradient g{R.transpose() * P, R.colwise().sum().transpose(),
                     P.colwise().sum().transpose()};

    // Negative phase: model expectation, enumerated over visible states.
    Matrix model_W = Matrix::Zero(J, K);
    Vector model_b = Vector::Zero(J);
    Vector model_c = Vector::Zero(K);
    const std::uint64_t n_visible = std::uint64_t{1} << J;
    for (std::uint64_t m = 0; m < n_visible; ++m) {
        const Vector r = bits_of(m, J);
        const double pr = std::exp(log_free_weight(params, r) - log_z);
        const Vector ph = (params.c + params.W.transpose() * r).unaryExpr([](double x) {
            return sigmoid(x);
        });
        model_W.noalias() += pr * r * ph.transpose();
        model_b += pr * r;
        model_c += pr * ph;
    }
    const double n = static_cast<double>(data.rows());
    g.W -= n * model_W;
    g.b -= n * model_b;
    g.c -= n * model_c;
    return g;
}

RbmParams flip_hidden_unit(const RbmParams& params, std::size_t k)
{
    params.validate();
    if (k >= params.K())
        throw InvalidArgument("hidden unit " + std::to_string(k) + " out of range");
    RbmParams out = params;
    const auto col = static_cast<Eigen::Index>(k);
    out.b += params.W.col(col);
    out.W.col(col) = -params.W.col(col);
    out.c[col] = -params.c[col];
    return out;
}

RbmParams orient_hidden_units(const RbmParams& params)
{
    RbmParams out = params;
    for (std::size_t k = 0; k < params.K(); ++k)
        if (params.W.col(static_cast<Eigen::Index>(k)).sum() < 0.0)
            out = flip_hidden_unit(out, k);
    return out;
}

} // namespace qrbm
