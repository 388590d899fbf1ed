#pragma once

#include <vector>

namespace jumpwass {

enum class LpStatus { Optimal, IterationLimit, Unbounded };

struct LpResult {
    LpStatus status;
    double objective;
    std::vector<double> x;
};

// Maximize c'x subject to A x <= b, x >= 0, with b >= 0 (slack basis is the
// feasible start). Dense tableau, Dantzig pricing with Bland fallback under
// stalling. A is row-major with n_cols = c.size().
LpResult solve_lp_max(const std::vector<double>& c, const std::vector<double>& A,
                      const std::vector<double>& b, int max_iter = 0);

}  // namespace jumpwass
