#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace qrbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Binary data is stored as 0/1 bytes.
using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using BinaryVector = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;

using QMatrix = BinaryMatrix;         // J x K item-by-attribute requirements
using ResponseMatrix = BinaryMatrix;  // N x J observed responses
using AttributeMatrix = BinaryMatrix; // N x K latent attribute patterns

// One random stream per caller. Never shared across threads.
using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path = {});

bool is_binary(const Matrix& m);
BinaryMatrix to_binary(const Matrix& m);  // throws InvalidArgument on non-0/1 cells

} // namespace qrbm
