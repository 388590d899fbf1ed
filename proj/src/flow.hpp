#pragma once

#include <vector>

#include <json.hpp>

#include "distance.hpp"
#include "simulate.hpp"

namespace jumpwass {

// Flow-moment constants feeding the bound formulas. A/B values are Monte
// Carlo estimates of sup-over-start-grid moments, multiplied by the safety
// factor; C1..C3 are Gaussian-density integrals by quadrature.
struct ConstantSet {
    double A1 = 0.0, A2 = 0.0, B1 = 0.0, B2 = 0.0, B3 = 0.0;
    double C1 = 1.0, C2 = 0.0, C3 = 0.0;
    double se_A1 = 0.0, se_A2 = 0.0, se_B1 = 0.0, se_B2 = 0.0, se_B3 = 0.0;
    double safety = 1.5;
    int n_paths = 0;
    std::vector<double> start_points;
    uint64_t seed = 0;
    double horizon = 0.0;
    int n_steps = 0;
    double epsilon = 0.0;
    bool warning_high_se = false;
    // diagnostics at the start point maximizing E sup|y1 y2| (Holder check)
    double mean_sup_y1_sq = 0.0;
    double mean_sup_y2_sq = 0.0;

    nlohmann::json to_json() const;
    static ConstantSet from_json(const nlohmann::json& j);
};

struct VariationPathStats {
    double terminal_x = 0.0;
    VariationTrack track;
    bool aborted = false;
};

// Pathwise first/second/third variations of x -> X*_{0,T}(x), one entry
// per (start point, path). Shares the Euler driving noise with the base
// path; y1 starts at 1, y2/y3 at 0.
std::vector<std::vector<VariationPathStats>> variation_paths(
    const ProcessSpec& spec, const GridConfig& grid, const std::vector<double>& start_points,
    int n_paths, int threads = 1);

std::vector<double> default_start_grid(double x0, int points = 9);

ConstantSet estimate_constants(const ProcessSpec& spec, const GridConfig& grid,
                               const std::vector<double>& start_points, int n_paths,
                               double safety = 1.5, int threads = 1);

struct VstarDerivatives {
    double d1 = 0.0, d1_se = 0.0;  // E[h'(X*) y1]
    double d2 = 0.0, d2_se = 0.0;  // E[h'(X*) y2 + h''(X*) y1^2]
    int aborted = 0;
};

// Monte Carlo estimates of the first two x-derivatives of
// v*(t, x) = E[h(X*_{t,T}(x))], by pathwise differentiation of the flow.
VstarDerivatives vstar_derivatives_mc(const ProcessSpec& spec, const TestFunction& h, double t,
                                      double x, int n_paths, const GridConfig& grid,
                                      uint64_t stream_salt = 0xF0);

}  // namespace jumpwass
