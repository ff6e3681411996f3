#pragma once

#include <vector>

#include "qrbm/types.hpp"

namespace qrbm {

/// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
/// row/column potentials, O(n^3)). Returns `assignment` with
/// assignment[row] = column.
std::vector<int> solve_assignment(const Matrix& cost);

} // namespace qrbm
