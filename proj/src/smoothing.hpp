#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "distance.hpp"

namespace jumpwass {

// C_n = integral of |phi^(n-1)|, n = 1..3, computed by quadrature with
// sign-change splitting located numerically.
double gaussian_cn(int n);

// Gaussian smoothing h_alpha(x) = E[h(x + sqrt(alpha) Z)] of a Lipschitz
// base function, with derivatives via integration by parts against
// phi^(n). Quadrature: composite Gauss-Legendre on [-9, 9], pieces split
// at the base function's transformed kinks.
class SmoothedFunction {
public:
    SmoothedFunction(TestFunctionPtr base, double alpha);

    double eval(double x) const;
    // n in {1, 2, 3}: (-1)^n alpha^(-n/2) * integral h(x + y sqrt(alpha)) phi^(n)(y) dy
    double deriv(int n, double x) const;

    double alpha() const { return alpha_; }
    const TestFunction& base() const { return *base_; }

private:
    double integrate_weighted(int n, double x) const;

    TestFunctionPtr base_;
    double alpha_;
    double sqrt_alpha_;
    std::vector<double> kinks_;
    // fixed unit panels with precomputed nodes and phi^(n) values
    std::vector<double> nodes_;                   // y positions, panel-major
    std::vector<std::array<double, 4>> phi_;      // phi^(n) at nodes
    std::vector<double> wts_;
};

struct SmoothingBoundRow {
    std::string function;
    double alpha;
    double max_deviation;
    double deviation_bound;   // sqrt(2 alpha / pi)
    double norm[3];           // ||h_alpha^(n)||_inf on grid, n = 1..3
    double norm_bound[3];     // alpha^{-(n-1)/2} C_n
    bool pass;
};

struct SmoothingBoundReport {
    std::vector<SmoothingBoundRow> rows;
    bool all_pass;
    nlohmann::json to_json() const;
};

// Checks the deviation and derivative-norm bounds for every (h, alpha)
// pair on the grid [-10, 10] with the given step; slack tolerance 1e-6.
SmoothingBoundReport verify_smoothing_bounds(const std::vector<TestFunctionPtr>& catalog,
                              const std::vector<double>& alphas, double grid_step = 1e-3,
                              int threads = 1);

}  // namespace jumpwass
