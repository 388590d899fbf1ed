#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace jumpwass {

// Scalar parameter of time: c0 + c1*t. Parses from a JSON number or [c0, c1].
struct TimeFn {
    double c0 = 0.0;
    double c1 = 0.0;
    double operator()(double t) const { return c0 + c1 * t; }
    bool constant() const { return c1 == 0.0; }
    bool operator==(const TimeFn&) const = default;
};

TimeFn time_fn_from_json(const nlohmann::json& j);
nlohmann::json time_fn_to_json(const TimeFn& f);

struct PointMassLevy {
    TimeFn rate;      // a(t) >= 0 per unit time
    double location;  // c
};

struct GammaLevy {
    TimeFn shape_rate;  // alpha(t) > 0; density 1_{(0,inf)}(y) e^{-alpha(t) y} / y
};

struct FiniteDiscreteLevy {
    std::vector<std::pair<double, double>> atoms;  // (location, rate >= 0)
};

struct TruncatedDensityLevy {
    std::function<double(double, double)> density;  // (t, y) -> >= 0
    double cutoff;                                  // epsilon > 0, support excludes (-cutoff, cutoff)
    double y_min;                                   // analytic support bounds
    double y_max;
    std::string label = "custom";
};

struct LevyMeasureSpec {
    std::variant<PointMassLevy, GammaLevy, FiniteDiscreteLevy, TruncatedDensityLevy> v;

    bool structurally_equal(const LevyMeasureSpec& other) const;
    // Rates nonnegative, gamma shape_rate positive, finite second moment on [0, T].
    void validate(double horizon) const;
};

nlohmann::json levy_to_json(const LevyMeasureSpec& spec);
LevyMeasureSpec levy_from_json(const nlohmann::json& j);

struct Atom {
    double location;
    double weight;
};

// Finite measure on R as sorted atoms. Canonical form merges duplicate
// locations (1e-12 relative tolerance) and drops zero weights.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    explicit DiscreteMeasure(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    double total_mass() const;
    bool empty() const { return atoms_.empty(); }
    size_t size() const { return atoms_.size(); }

    nlohmann::json to_json() const;
    static DiscreteMeasure from_json(const nlohmann::json& j);

private:
    std::vector<Atom> atoms_;
};

bool locations_equal(double a, double b);

// Node layout for quadrature discretization of density-type measures.
// Gamma measures use log-spaced panels on [eps, y_max]; a shared layout
// keeps atom locations common across a coupled pair.
struct DiscretizationLayout {
    double eps;
    double y_max;
    int n_panels;
    int nodes_per_panel;
    bool log_spaced = true;
};

DiscretizationLayout gamma_layout(double alpha_min, double eps, int n_nodes);

DiscreteMeasure discretize(const LevyMeasureSpec& spec, double t, double eps, int n_nodes);
DiscreteMeasure discretize_on_layout(const LevyMeasureSpec& spec, double t,
                                     const DiscretizationLayout& layout);
// |mass(n) - mass(2n)|: convergence estimate for the quadrature mass.
double discretize_mass_error(const LevyMeasureSpec& spec, double t, double eps, int n_nodes);

// y^2-tilting: (y, w) -> (y, y^2 w); atoms at 0 vanish.
DiscreteMeasure tilt_square(const DiscreteMeasure& m);

// Image measure under y -> map(y); collisions merge, result re-sorted.
DiscreteMeasure pushforward(const DiscreteMeasure& m, const std::function<double(double)>& map);

// Total variation distance on discrete support (atom-wise Hahn-Jordan).
double tv_distance(const DiscreteMeasure& a, const DiscreteMeasure& b);

// |log(beta/alpha)|: total variation of the difference of two gamma Levy
// measures via Frullani's identity.
double frullani_tv(double alpha, double beta);

}  // namespace jumpwass
