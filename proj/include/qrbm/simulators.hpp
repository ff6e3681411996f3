#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "qrbm/types.hpp"

namespace qrbm {

/// Deterministic-input noisy-AND: 1 - s if every required attribute is
/// mastered, g otherwise.
struct Dina {
    double g = 0.1;
    double s = 0.1;
};

/// Deterministic-input noisy-OR: 1 - s if any required attribute is mastered.
struct Dino {
    double g = 0.1;
    double s = 0.1;
};

/// Additive model (identity link): each required attribute contributes
/// (p - delta0) / K*.
struct Acdm {
    double delta0 = 0.1;
    double p = 0.9;
};

/// Saturated model (identity link): every main effect and interaction among
/// the required attributes contributes (p - delta0) / (2^K* - 1). K* <= 3.
struct Gdina {
    double delta0 = 0.1;
    double p = 0.9;
};

struct MixtureComponent;

/// Each item draws its response model once from the weighted components.
struct Mixture {
    std::vector<MixtureComponent> components;
};

using CdmSpec = std::variant<Dina, Acdm, Gdina, Dino, Mixture>;

struct MixtureComponent {
    CdmSpec model;
    double weight = 0.0;
};

/// Throws InvalidArgument when parameters leave their valid ranges.
void validate(const CdmSpec& spec);

struct AttributeSimConfig {
    std::size_t N = 0;
    std::size_t K = 0;
    double rho = 0.0;
    std::uint64_t seed = 0;
};

/// [I_K; Q1; Q2] with Q1 = I + superdiagonal, Q2 = tridiagonal band.
QMatrix build_structured_q(std::size_t K);

/// 3K rows; each row requires n in {1, 2, 3} distinct attributes with
/// P(n) proportional to C(K, n).
QMatrix build_random_q(std::size_t K, Rng& rng);

/// Attribute k (0-based) has threshold -0.5 + k / (K - 1).
std::vector<double> attribute_thresholds(std::size_t K);

/// Equicorrelated Gaussian scores cut at the attribute thresholds.
AttributeMatrix sample_attributes(const AttributeSimConfig& config, Rng& rng);

/// Sparse coefficient table for the saturated model on K* required attributes.
struct GdinaTerm {
    std::vector<std::size_t> attributes; // positions within the required set
    double delta = 0.0;
};
struct GdinaCoefficients {
    std::size_t k_star = 0;
    double intercept = 0.0;
    std::vector<GdinaTerm> terms;
};
GdinaCoefficients gdina_deltas(std::size_t k_star, double delta0, double p);

/// P(R = 1 | alpha) for one item. Mixture specs must be resolved to a
/// component first; passing one throws InvalidArgument.
double item_response_prob(const CdmSpec& spec, const BinaryVector& q_row,
                          const BinaryVector& alpha);

/// Per-item models actually used for `J` items (mixture draws resolved).
std::vector<CdmSpec> assign_item_models(const CdmSpec& spec, std::size_t J, Rng& rng);

ResponseMatrix simulate_responses(const QMatrix& Q, const AttributeMatrix& A,
                                  const CdmSpec& spec, Rng& rng);

enum class QDesign { structured, random };

/// One complete simulated scenario.
struct SimulationConfig {
    std::size_t N = 2000;
    std::size_t K = 5;
    double rho = 0.0;
    QDesign q_design = QDesign::structured;
    CdmSpec model = Dina{};
};

struct SimulatedData {
    QMatrix Q;
    AttributeMatrix A;
    ResponseMatrix R;
};

/// Q, A and R draw from independent streams (seed, 0), (seed, 1), (seed, 2).
SimulatedData simulate(const SimulationConfig& config, std::uint64_t seed);

} // namespace qrbm
