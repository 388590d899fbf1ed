#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "measure.hpp"

namespace jumpwass {

// Drift/diffusion coefficient from the closed form catalog; analytic in x
// with derivatives to order 3.
//   constant:    a(t)
//   linear:      a(t) x
//   affine:      a(t) + b(t) x
//   affine_bump: a(t) + b(t) x + amp exp(-(x-center)^2 / (2 width^2))
struct Coefficient {
    enum class Form { Constant, Linear, Affine, AffineBump };
    Form form = Form::Constant;
    TimeFn a{};
    TimeFn b{};
    double amp = 0.0;
    double center = 0.0;
    double width = 1.0;

    double value(double t, double x) const;
    double dx(double t, double x, int order) const;  // order 1..3
    bool affine_in_x() const { return form != Form::AffineBump; }
    bool depends_on_x() const;
    bool operator==(const Coefficient&) const = default;
};

// Jump size map g(t, x, y) = factor(t, x) * y; every catalog form is
// affine in the mark, which keeps compensator integrals closed-form.
//   additive_mark: kappa(t) y
//   proportional:  eta(t) x y
//   affine_mark:   (a(t) + b(t) x) y
struct JumpMap {
    enum class Form { AdditiveMark, Proportional, AffineMark };
    Form form = Form::AdditiveMark;
    TimeFn a{};  // kappa / eta / a
    TimeFn b{};

    double factor(double t, double x) const;
    double factor_dx(double t, int order) const;  // d^k/dx^k of the factor (x-free)
    double value(double t, double x, double y) const { return factor(t, x) * y; }
    double dx(double t, double /*x*/, double y, int order) const {
        return factor_dx(t, order) * y;
    }
    bool depends_on_x() const;
    bool affine_in_x() const { return true; }
    bool operator==(const JumpMap&) const = default;
};

nlohmann::json coefficient_to_json(const Coefficient& c);
Coefficient coefficient_from_json(const nlohmann::json& j);
nlohmann::json jump_map_to_json(const JumpMap& g);
JumpMap jump_map_from_json(const nlohmann::json& j);

// One process of the coupled pair: dX = u dt + sigma dB + compensated jumps.
struct ProcessSpec {
    Coefficient drift;
    Coefficient sigma;
    JumpMap jump;
    LevyMeasureSpec levy;
    double x0 = 1.0;

    bool affine_in_x() const {
        return drift.affine_in_x() && sigma.affine_in_x() && jump.affine_in_x();
    }
    void validate(double horizon) const;
};

nlohmann::json process_to_json(const ProcessSpec& s);
ProcessSpec process_from_json(const nlohmann::json& j);

struct GridConfig {
    double horizon = 1.0;
    int n_steps = 400;
    double epsilon = 1e-3;   // small-jump cutoff for infinite-activity measures
    int n_paths = 100000;
    uint64_t seed = 1;
    int n_nodes = 160;       // quadrature nodes for density-type measures
    int theta_paths = 20000; // paths used for the characteristic integrals
    int fm_nodes = 64;       // time-grid subsample for the FM integrand

    double dt() const { return horizon / n_steps; }
    void validate() const;
    nlohmann::json to_json() const;
    static GridConfig from_json(const nlohmann::json& j);
};

}  // namespace jumpwass
