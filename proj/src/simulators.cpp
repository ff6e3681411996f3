#include "qrbm/simulators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "qrbm/errors.hpp"
#include "qrbm/rbm_core.hpp"

namespace qrbm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_gs(double g, double s, const char* name)
{
    if (!(g > 0.0 && g < 1.0 - s && 1.0 - s < 1.0))
        throw InvalidArgument(std::string(name) + " needs 0 < g < 1 - s < 1, got g=" +
                              std::to_string(g) + " s=" + std::to_string(s));
}

void check_delta(double delta0, double p, const char* name)
{
    if (!(delta0 > 0.0 && delta0 < p && p < 1.0))
        throw InvalidArgument(std::string(name) + " needs 0 < delta0 < p < 1, got delta0=" +
                              std::to_string(delta0) + " p=" + std::to_string(p));
}

double binomial(std::size_t n, std::size_t k)
{
    if (k > n)
        return 0.0;
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

} // namespace

void validate(const CdmSpec& spec)
{
    std::visit(overloaded{
                   [](const Dina& m) { check_gs(m.g, m.s, "DINA"); },
                   [](const Dino& m) { check_gs(m.g, m.s, "DINO"); },
                   [](const Acdm& m) { check_delta(m.delta0, m.p, "ACDM"); },
                   [](const Gdina& m) { check_delta(m.delta0, m.p, "GDINA"); },
                   [](const Mixture& m) {
                       if (m.components.empty())
                           throw InvalidArgument("mixture has no components");
                       double total = 0.0;
                       for (const auto& c : m.components) {
                           if (std::holds_alternative<Mixture>(c.model))
                               throw InvalidArgument("nested mixtures are not supported");
                           if (!(c.weight > 0.0))
                               throw InvalidArgument("mixture weights must be positive");
                           validate(c.model);
                           total += c.weight;
                       }
                       if (std::abs(total - 1.0) > 1e-9)
                           throw InvalidArgument("mixture weights sum to " +
                                                 std::to_string(total) + ", expected 1");
                   },
               },
               spec);
}

QMatrix build_structured_q(std::size_t K)
{
    if (K < 2)
        throw InvalidArgument("structured Q design needs K >= 2");
    const auto k = static_cast<Eigen::Index>(K);
    QMatrix q = QMatrix::Zero(3 * k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        q(i, i) = 1;

        q(k + i, i) = 1;
        if (i + 1 < k)
            q(k + i, i + 1) = 1;

        q(2 * k + i, i) = 1;
        if (i > 0)
            q(2 * k + i, i - 1) = 1;
        if (i + 1 < k)
            q(2 * k + i, i + 1) = 1;
    }
    return q;
}

QMatrix build_random_q(std::size_t K, Rng& rng)
{
    if (K < 3)
        throw InvalidArgument("random Q design needs K >= 3");
    const double c1 = binomial(K, 1), c2 = binomial(K, 2), c3 = binomial(K, 3);
    const double m = c1 + c2 + c3;
    const auto k = static_cast<Eigen::Index>(K);
    QMatrix q = QMatrix::Zero(3 * k, k);
    std::vector<Eigen::Index> pool(K);
    for (Eigen::Index j = 0; j < q.rows(); ++j) {
        const double u = uniform01(rng) * m;
        const std::size_t n = u < c1 ? 1 : (u < c1 + c2 ? 2 : 3);
        // Partial Fisher-Yates: first n slots are a uniform draw without replacement.
        std::iota(pool.begin(), pool.end(), Eigen::Index{0});
        for (std::size_t i = 0; i < n; ++i) {
            const auto span = K - i;
            auto pick = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(span));
            if (pick >= K)
                pick = K - 1;
            std::swap(pool[i], pool[pick]);
            q(j, pool[i]) = 1;
        }
    }
    return q;
}

std::vector<double> attribute_thresholds(std::size_t K)
{
    if (K == 0)
        throw InvalidArgument("need at least one attribute");
    if (K == 1)
        return {0.0};
    std::vector<double> t(K);
    for (std::size_t k = 0; k < K; ++k)
        t[k] = -0.5 + static_cast<double>(k) / static_cast<double>(K - 1);
    return t;
}

AttributeMatrix sample_attributes(const AttributeSimConfig& config, Rng& rng)
{
    if (config.N == 0 || config.K == 0)
        throw InvalidArgument("attribute simulation needs N >= 1 and K >= 1");
    if (!(config.rho >= 0.0 && config.rho < 1.0))
        throw InvalidArgument("rho must lie in [0, 1)");

    const auto thresholds = attribute_thresholds(config.K);
    const double shared = std::sqrt(config.rho);
    const double own = std::sqrt(1.0 - config.rho);
    std::normal_distribution<double> normal(0.0, 1.0);

    AttributeMatrix a(static_cast<Eigen::Index>(config.N), static_cast<Eigen::Index>(config.K));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double common = normal(rng);
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            const double z = shared * common + own * normal(rng);
            a(i, k) = z > thresholds[static_cast<std::size_t>(k)] ? 1 : 0;
        }
    }
    return a;
}

GdinaCoefficients gdina_deltas(std::size_t k_star, double delta0, double p)
{
    if (k_star == 0 || k_star > 3)
        throw InvalidArgument("GDINA coefficients are defined for 1 to 3 required attributes, got " +
                              std::to_string(k_star));
    GdinaCoefficients out;
    out.k_star = k_star;
    out.intercept = delta0;
    const std::size_t n_subsets = (std::size_t{1} << k_star) - 1;
    const double share = (p - delta0) / static_cast<double>(n_subsets);
    // Order: mains, then pairs, then the triple.
    for (std::size_t order = 1; order <= k_star; ++order) {
        for (std::size_t mask = 1; mask <= n_subsets; ++mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) != order)
                continue;
            GdinaTerm term;
            for (std::size_t i = 0; i < k_star; ++i)
                if (mask & (std::size_t{1} << i))
                    term.attributes.push_back(i);
            term.delta = share;
            out.terms.push_back(std::move(term));
        }
    }
    return out;
}

double item_response_prob(const CdmSpec& spec, const BinaryVector& q_row,
                          const BinaryVector& alpha)
{
    if (q_row.size() != alpha.size())
        throw InvalidArgument("q row has " + std::to_string(q_row.size()) +
                              " attributes, alpha has " + std::to_string(alpha.size()));
    validate(spec);

    std::vector<bool> required_mastered;
    for (Eigen::Index k = 0; k < q_row.size(); ++k)
        if (q_row[k])
            required_mastered.push_back(alpha[k] != 0);
    if (required_mastered.empty())
        throw InvalidArgument("item requires no attribute");
    const auto k_star = required_mastered.size();
    const auto n_mastered = static_cast<std::size_t>(
        std::count(required_mastered.begin(), required_mastered.end(), true));

    const double prob = std::visit(
        overloaded{
            [&](const Dina& m) { return n_mastered == k_star ? 1.0 - m.s : m.g; },
            [&](const Dino& m) { return n_mastered > 0 ? 1.0 - m.s : m.g; },
            [&](const Acdm& m) {
                return m.delta0 + (m.p - m.delta0) * static_cast<double>(n_mastered) /
                                      static_cast<double>(k_star);
            },
            [&](const Gdina& m) {
                const auto table = gdina_deltas(k_star, m.delta0, m.p);
                double acc = table.intercept;
                for (const auto& term : table.terms) {
                    bool active = true;
                    for (auto i : term.attributes)
                        active = active && required_mastered[i];
                    if (active)
                        acc += term.delta;
                }
                return acc;
            },
            [](const Mixture&) -> double {
                throw InvalidArgument("resolve a mixture to a per-item model first");
            },
        },
        spec);

    if (!(prob > 0.0 && prob < 1.0))
        throw InvalidArgument("response probability " + std::to_string(prob) +
                              " is outside (0, 1)");
    return prob;
}

std::vector<CdmSpec> assign_item_models(const CdmSpec& spec, std::size_t J, Rng& rng)
{
    validate(spec);
    const auto* mix = std::get_if<Mixture>(&spec);
    if (!mix)
        return std::vector<CdmSpec>(J, spec);
    std::vector<CdmSpec> out;
    out.reserve(J);
    for (std::size_t j = 0; j < J; ++j) {
        const double u = uniform01(rng);
        double cum = 0.0;
        std::size_t pick = mix->components.size() - 1;
        for (std::size_t c = 0; c < mix->components.size(); ++c) {
            cum += mix->components[c].weight;
            if (u < cum) {
                pick = c;
                break;
            }
        }
        out.push_back(mix->components[pick].model);
    }
    return out;
}

ResponseMatrix simulate_responses(const QMatrix& Q, const AttributeMatrix& A,
                                  const CdmSpec& spec, Rng& rng)
{
    if (Q.cols() != A.cols())
        throw InvalidArgument("Q has " + std::to_string(Q.cols()) + " attributes, A has " +
                              std::to_string(A.cols()));
    const auto models = assign_item_models(spec, static_cast<std::size_t>(Q.rows()), rng);

    Matrix prob(A.rows(), Q.rows());
    for (Eigen::Index j = 0; j < Q.rows(); ++j) {
        const BinaryVector q = Q.row(j).transpose();
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            prob(i, j) = item_response_prob(models[static_cast<std::size_t>(j)], q,
                                            A.row(i).transpose());
    }
    return sample_bernoulli(prob, rng).cast<std::uint8_t>();
}

SimulatedData simulate(const SimulationConfig& config, std::uint64_t seed)
{
    validate(config.model);
    SimulatedData out;
    Rng q_rng = make_rng(seed, {0});
    out.Q = config.q_design == QDesign::structured ? build_structured_q(config.K)
                                                   : build_random_q(config.K, q_rng);
    Rng a_rng = make_rng(seed, {1});
    out.A = sample_attributes({config.N, config.K, config.rho, seed}, a_rng);
    Rng r_rng = make_rng(seed, {2});
    out.R = simulate_responses(out.Q, out.A, config.model, r_rng);
    return out;
}

} // namespace qrbm
