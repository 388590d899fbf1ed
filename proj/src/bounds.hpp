#pragma once

#include <vector>

#include <json.hpp>

#include "distance.hpp"
#include "flow.hpp"
#include "simulate.hpp"

namespace jumpwass {

// Minimize G(a) = D0 sqrt(a) + D1 + D2/sqrt(a) + D3/a over a > 0, all D > 0.
struct CardanProblem {
    double d0, d1, d2, d3;
};

struct CardanResult {
    double alpha_star;
    double min_value;      // G(alpha_star)
    double bound_min3b;    // explicit closed-form upper bound on the minimum
    char case_tag;         // 'a': D2^3 <= 27 D0 D3^2 (single root), 'b': otherwise
};

double cardan_g(const CardanProblem& p, double alpha);
CardanResult cardan_minimize(const CardanProblem& p);

// Golden-section minimum of G for degenerate problems (some D = 0),
// bracket [1e-12, 1e12] in alpha.
double golden_minimize_g(double d0, double d1, double d2, double d3);

// Monte Carlo estimates of the expected characteristic gaps.
struct ThetaReport {
    double theta_u = 0.0, theta_sigma = 0.0, theta_nu = 0.0;
    double se_u = 0.0, se_sigma = 0.0, se_nu = 0.0;
    int n_paths = 0;
    int fm_failed_nodes = 0;
    double total() const { return theta_u + theta_sigma + theta_nu; }
    nlohmann::json to_json() const;
};

ThetaReport theta_from_run(const CoupledRunResult& run);

// Order-3 smooth Wasserstein bound: C * Theta with
// C = max(sqrt(A2), (A1+A2)/2, (A1 + B1/3 + A2 + B2 + B3/3)/2).
double smooth_w3_constant(const ConstantSet& c);
double smooth_w3_rhs(const ThetaReport& th, const ConstantSet& c);

// Explicit Wasserstein bound F(theta_u, theta_sigma, theta_nu): assembles
// the smoothing trade-off coefficients and applies the closed-form
// minimum bound; degenerate coefficients fall back to direct minimization.
double f_evaluate(double theta_u, double theta_sigma, double theta_nu, const ConstantSet& c);

// Aggregate-Theta variant of the Wasserstein bound.
double wasserstein_aggregate_rhs(const ThetaReport& th, const ConstantSet& c);

// Three-term characteristic bound dominating the FM distance between the
// tilted image measures at state x.
double jump_characteristic_bound(const JumpMap& gX, const JumpMap& gXstar, const DiscreteMeasure& nu,
                    const DiscreteMeasure& nuStar, double t, double x);

// Integro-differential generator applied to f at (t, x); the jump integral
// runs over the discretized compensator.
double generator_apply(const ProcessSpec& spec, const TestFunction& f, double t, double x,
                       double eps, int n_nodes);

struct GapCheckResult {
    double lhs = 0.0, lhs_se = 0.0;
    double rhs = 0.0, rhs_se = 0.0;
    double gap = 0.0;
    double combined_se = 0.0;
    bool pass = false;
    bool inconclusive = false;
    nlohmann::json to_json() const;
};

// Two independent estimates of E[h(X*_T)] - E[h(X_T)]: directly, and via
// the expected generator-gap integral along X. Requires specXstar with
// x-affine coefficients (the flow is then affine and the inner Monte Carlo
// is shared across outer paths).
GapCheckResult generator_gap_check(const ProcessSpec& specX, const ProcessSpec& specXstar,
                                   const TestFunction& h, const GridConfig& grid, int n_outer,
                                   int n_inner, int rhs_nodes = 64, int threads = 1);

}  // namespace jumpwass
