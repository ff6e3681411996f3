#include "qrbm/hungarian.hpp"

#include <limits>

#include "qrbm/errors.hpp"

namespace qrbm {

std::vector<int> solve_assignment(const Matrix& cost)
{
    if (cost.rows() != cost.cols())
        throw InvalidArgument("assignment cost matrix must be square");
    if (!cost.allFinite())
        throw InvalidArgument("assignment cost matrix has non-finite entries");
    const int n = static_cast<int>(cost.rows());
    if (n == 0)
        return {};

    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based arrays; index 0 is the virtual start column.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match_col(n + 1, 0); // row matched to column j
    std::vector<int> way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match_col[0] = i;
        int j0 = 0;
        std::vector<double> min_v(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match_col[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j])
                    continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < min_v[j]) {
                    min_v[j] = cur;
                    way[j] = j0;
                }
                if (min_v[j] < delta) {
                    delta = min_v[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_v[j] -= delta;
                }
            }
            j0 = j1;
        } while (match_col[j0] != 0);
        // Unwind the augmenting path.
        do {
            const int j1 = way[j0];
            match_col[j0] = match_col[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= n; ++j)
        assignment[match_col[j] - 1] = j - 1;
    return assignment;
}

} // namespace qrbm
