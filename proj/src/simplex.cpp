#include "simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace jumpwass {

LpResult solve_lp_max(const std::vector<double>& c, const std::vector<double>& A,
                      const std::vector<double>& b, int max_iter) {
    const int n = static_cast<int>(c.size());
    const int m = static_cast<int>(b.size());
    if (A.size() != static_cast<size_t>(n) * m) throw std::invalid_argument("lp: bad A shape");
    for (double bi : b)
        if (bi < 0.0) throw std::invalid_argument("lp: requires b >= 0");

    // Tableau: m rows of [A | I | b], objective row holds -c (maximization).
    const int width = n + m + 1;
    std::vector<double> T(static_cast<size_t>(m + 1) * width, 0.0);
    auto at = [&](int r, int col) -> double& { return T[static_cast<size_t>(r) * width + col]; };
    for (int r = 0; r < m; ++r) {
        for (int j = 0; j < n; ++j) at(r, j) = A[static_cast<size_t>(r) * n + j];
        at(r, n + r) = 1.0;
        at(r, width - 1) = b[r];
    }
    for (int j = 0; j < n; ++j) at(m, j) = -c[j];

    std::vector<int> basis(m);
    for (int r = 0; r < m; ++r) basis[r] = n + r;

    double scale = 1.0;
    for (double cj : c) scale = std::max(scale, std::abs(cj));
    const double eps = 1e-11 * scale;
    if (max_iter <= 0) max_iter = 200 * (m + n) + 5000;

    int stall = 0;
    double last_obj = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        const bool bland = stall > 2 * (m + n);
        // entering column
        int pivot_col = -1;
        double best = -eps;
        for (int j = 0; j < n + m; ++j) {
            const double red = at(m, j);
            if (red < -eps) {
                if (bland) {
                    pivot_col = j;
                    break;
                }
                if (red < best) {
                    best = red;
                    pivot_col = j;
                }
            }
        }
        if (pivot_col < 0) {
            LpResult res;
            res.status = LpStatus::Optimal;
            res.objective = at(m, width - 1);
            res.x.assign(n, 0.0);
            for (int r = 0; r < m; ++r)
                if (basis[r] < n) res.x[basis[r]] = at(r, width - 1);
            return res;
        }
        // ratio test
        int pivot_row = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int r = 0; r < m; ++r) {
            const double a = at(r, pivot_col);
            if (a > 1e-12) {
                const double ratio = at(r, width - 1) / a;
                if (ratio < best_ratio - 1e-14 ||
                    (ratio < best_ratio + 1e-14 && (pivot_row < 0 || basis[r] < basis[pivot_row]))) {
                    best_ratio = ratio;
                    pivot_row = r;
                }
            }
        }
        if (pivot_row < 0) return {LpStatus::Unbounded, 0.0, {}};

        // pivot
        const double p = at(pivot_row, pivot_col);
        for (int j = 0; j < width; ++j) at(pivot_row, j) /= p;
        for (int r = 0; r <= m; ++r) {
            if (r == pivot_row) continue;
            const double f = at(r, pivot_col);
            if (f == 0.0) continue;
            double* row = &T[static_cast<size_t>(r) * width];
            const double* prow = &T[static_cast<size_t>(pivot_row) * width];
            for (int j = 0; j < width; ++j) row[j] -= f * prow[j];
            row[pivot_col] = 0.0;
        }
        basis[pivot_row] = pivot_col;

        const double obj = at(m, width - 1);
        if (obj > last_obj + eps) {
            stall = 0;
            last_obj = obj;
        } else {
            ++stall;
        }
    }
    return {LpStatus::IterationLimit, 0.0, {}};
}

}  // namespace jumpwass
