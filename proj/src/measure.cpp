#include "measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quad.hpp"

namespace jumpwass {

TimeFn time_fn_from_json(const nlohmann::json& j) {
    TimeFn f;
    if (j.is_number()) {
        f.c0 = j.get<double>();
    } else if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        f.c0 = j[0].get<double>();
        f.c1 = j[1].get<double>();
    } else {
        throw std::invalid_argument("time function must be a number or [c0, c1]");
    }
    return f;
}

nlohmann::json time_fn_to_json(const TimeFn& f) {
    if (f.constant()) return f.c0;
    return nlohmann::json::array({f.c0, f.c1});
}

bool LevyMeasureSpec::structurally_equal(const LevyMeasureSpec& other) const {
    if (v.index() != other.v.index()) return false;
    if (const auto* p = std::get_if<PointMassLevy>(&v)) {
        const auto& q = std::get<PointMassLevy>(other.v);
        return p->rate.c0 == q.rate.c0 && p->rate.c1 == q.rate.c1 && p->location == q.location;
    }
    if (const auto* g = std::get_if<GammaLevy>(&v)) {
        const auto& q = std::get<GammaLevy>(other.v);
        return g->shape_rate.c0 == q.shape_rate.c0 && g->shape_rate.c1 == q.shape_rate.c1;
    }
    if (const auto* f = std::get_if<FiniteDiscreteLevy>(&v)) {
        const auto& q = std::get<FiniteDiscreteLevy>(other.v);
        return f->atoms == q.atoms;
    }
    return false;  // function-valued densities are never assumed equal
}

void LevyMeasureSpec::validate(double horizon) const {
    const int n_check = 17;
    if (const auto* p = std::get_if<PointMassLevy>(&v)) {
        for (int i = 0; i <= n_check; ++i) {
            const double t = horizon * i / n_check;
            if (!(p->rate(t) >= 0.0))
                throw std::invalid_argument("point_mass rate must be >= 0 on [0, T]");
        }
    } else if (const auto* g = std::get_if<GammaLevy>(&v)) {
        for (int i = 0; i <= n_check; ++i) {
            const double t = horizon * i / n_check;
            if (!(g->shape_rate(t) > 0.0))
                throw std::invalid_argument("gamma shape_rate must be > 0 on [0, T]");
        }
        // second moment = 1/alpha^2 < infinity; nothing further to check
    } else if (const auto* f = std::get_if<FiniteDiscreteLevy>(&v)) {
        for (const auto& [loc, w] : f->atoms) {
            if (!std::isfinite(loc) || !(w >= 0.0))
                throw std::invalid_argument("finite_discrete atoms need finite locations, weights >= 0");
        }
    } else if (const auto* d = std::get_if<TruncatedDensityLevy>(&v)) {
        if (!(d->cutoff > 0.0)) throw std::invalid_argument("truncated density cutoff must be > 0");
        if (!(d->y_max > d->y_min)) throw std::invalid_argument("truncated density: empty support");
        for (int i = 0; i <= n_check; ++i) {
            const double t = horizon * i / n_check;
            const double m2 = integrate_adaptive(
                [&](double y) {
                    const double val = d->density(t, y);
                    if (!(val >= 0.0)) throw std::invalid_argument("density must be >= 0");
                    return y * y * val;
                },
                d->y_min, d->y_max, 1e-9);
            if (!std::isfinite(m2)) throw std::invalid_argument("density has no finite second moment");
        }
    }
}

nlohmann::json levy_to_json(const LevyMeasureSpec& spec) {
    nlohmann::json j;
    if (const auto* p = std::get_if<PointMassLevy>(&spec.v)) {
        j["variant"] = "point_mass";
        j["rate"] = time_fn_to_json(p->rate);
        j["location"] = p->location;
    } else if (const auto* g = std::get_if<GammaLevy>(&spec.v)) {
        j["variant"] = "gamma";
        j["shape_rate"] = time_fn_to_json(g->shape_rate);
    } else if (const auto* f = std::get_if<FiniteDiscreteLevy>(&spec.v)) {
        j["variant"] = "finite_discrete";
        auto arr = nlohmann::json::array();
        for (const auto& [loc, w] : f->atoms) arr.push_back({loc, w});
        j["atoms"] = arr;
    } else {
        const auto& d = std::get<TruncatedDensityLevy>(spec.v);
        j["variant"] = "truncated_density";
        j["label"] = d.label;
        j["cutoff"] = d.cutoff;
    }
    return j;
}

LevyMeasureSpec levy_from_json(const nlohmann::json& j) {
    const std::string variant = j.at("variant").get<std::string>();
    static const std::vector<std::string> known_pm = {"variant", "rate", "location"};
    static const std::vector<std::string> known_g = {"variant", "shape_rate"};
    static const std::vector<std::string> known_fd = {"variant", "atoms"};
    auto reject_unknown = [&](const std::vector<std::string>& known) {
        for (auto it = j.begin(); it != j.end(); ++it)
            if (std::find(known.begin(), known.end(), it.key()) == known.end())
                throw std::invalid_argument("unknown field in levy spec: " + it.key());
    };
    if (variant == "point_mass") {
        reject_unknown(known_pm);
        return {PointMassLevy{time_fn_from_json(j.at("rate")), j.at("location").get<double>()}};
    }
    if (variant == "gamma") {
        reject_unknown(known_g);
        return {GammaLevy{time_fn_from_json(j.at("shape_rate"))}};
    }
    if (variant == "finite_discrete") {
        reject_unknown(known_fd);
        FiniteDiscreteLevy f;
        for (const auto& a : j.at("atoms"))
            f.atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        return {std::move(f)};
    }
    throw std::invalid_argument("unknown levy variant: " + variant);
}

bool locations_equal(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const auto& a : atoms_) {
        if (!std::isfinite(a.location) || !std::isfinite(a.weight))
            throw std::invalid_argument("DiscreteMeasure: non-finite atom");
        if (a.weight < 0.0) throw std::invalid_argument("DiscreteMeasure: negative weight");
    }
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& x, const Atom& y) { return x.location < y.location; });
    std::vector<Atom> merged;
    merged.reserve(atoms_.size());
    for (const auto& a : atoms_) {
        if (!merged.empty() && locations_equal(merged.back().location, a.location))
            merged.back().weight += a.weight;
        else
            merged.push_back(a);
    }
    std::erase_if(merged, [](const Atom& a) { return a.weight == 0.0; });
    atoms_ = std::move(merged);
}

double DiscreteMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
}

nlohmann::json DiscreteMeasure::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& a : atoms_) arr.push_back({a.location, a.weight});
    return arr;
}

DiscreteMeasure DiscreteMeasure::from_json(const nlohmann::json& j) {
    std::vector<Atom> atoms;
    for (const auto& e : j) atoms.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    return DiscreteMeasure(std::move(atoms));
}

DiscretizationLayout gamma_layout(double alpha_min, double eps, int n_nodes) {
    if (!(eps > 0.0)) throw std::invalid_argument("gamma discretization needs eps > 0");
    if (n_nodes < 2) throw std::invalid_argument("discretize needs n_nodes >= 2");
    if (!(alpha_min > 0.0)) throw std::invalid_argument("gamma_layout: alpha_min <= 0");
    DiscretizationLayout lay;
    lay.eps = eps;
    lay.y_max = std::max(eps * 8.0, 48.0 / alpha_min);
    lay.nodes_per_panel = 8;
    lay.n_panels = std::max(1, n_nodes / lay.nodes_per_panel);
    lay.log_spaced = true;
    return lay;
}

namespace {

DiscreteMeasure discretize_density(const std::function<double(double)>& density,
                                   const DiscretizationLayout& lay) {
    const GaussRule& rule = gauss_legendre(lay.nodes_per_panel);
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<size_t>(lay.n_panels) * lay.nodes_per_panel);
    const double lo = lay.log_spaced ? std::log(lay.eps) : lay.eps;
    const double hi = lay.log_spaced ? std::log(lay.y_max) : lay.y_max;
    for (int p = 0; p < lay.n_panels; ++p) {
        const double a = lo + (hi - lo) * p / lay.n_panels;
        const double b = lo + (hi - lo) * (p + 1) / lay.n_panels;
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 0; i < lay.nodes_per_panel; ++i) {
            const double z = c + h * rule.nodes[i];
            const double y = lay.log_spaced ? std::exp(z) : z;
            const double jac = lay.log_spaced ? y : 1.0;
            const double f = density(y);
            if (!std::isfinite(f) || f < 0.0)
                throw std::runtime_error("discretize: density not finite/nonnegative on support");
            atoms.push_back({y, rule.weights[i] * h * jac * f});
        }
    }
    return DiscreteMeasure(std::move(atoms));
}

}  // namespace

DiscreteMeasure discretize_on_layout(const LevyMeasureSpec& spec, double t,
                                     const DiscretizationLayout& layout) {
    if (const auto* p = std::get_if<PointMassLevy>(&spec.v)) {
        const double a = p->rate(t);
        if (a < 0.0) throw std::invalid_argument("point_mass rate < 0");
        return DiscreteMeasure({{p->location, a}});
    }
    if (const auto* f = std::get_if<FiniteDiscreteLevy>(&spec.v)) {
        std::vector<Atom> atoms;
        for (const auto& [loc, w] : f->atoms) atoms.push_back({loc, w});
        return DiscreteMeasure(std::move(atoms));
    }
    if (const auto* g = std::get_if<GammaLevy>(&spec.v)) {
        const double alpha = g->shape_rate(t);
        if (!(alpha > 0.0)) throw std::invalid_argument("gamma shape_rate <= 0");
        if (!(layout.eps > 0.0)) throw std::invalid_argument("gamma discretization needs eps > 0");
        return discretize_density([alpha](double y) { return std::exp(-alpha * y) / y; }, layout);
    }
    const auto& d = std::get<TruncatedDensityLevy>(spec.v);
    DiscretizationLayout lay = layout;
    lay.log_spaced = false;
    lay.eps = std::max(d.cutoff, d.y_min);
    lay.y_max = d.y_max;
    DiscreteMeasure pos =
        lay.y_max > lay.eps
            ? discretize_density([&](double y) { return d.density(t, y); }, lay)
            : DiscreteMeasure{};
    if (d.y_min < -d.cutoff) {
        DiscretizationLayout neg = lay;
        neg.eps = d.y_min;
        neg.y_max = -d.cutoff;
        DiscreteMeasure m = discretize_density([&](double y) { return d.density(t, y); }, neg);
        std::vector<Atom> all = m.atoms();
        all.insert(all.end(), pos.atoms().begin(), pos.atoms().end());
        return DiscreteMeasure(std::move(all));
    }
    return pos;
}

DiscreteMeasure discretize(const LevyMeasureSpec& spec, double t, double eps, int n_nodes) {
    if (n_nodes < 2) throw std::invalid_argument("discretize needs n_nodes >= 2");
    if (const auto* g = std::get_if<GammaLevy>(&spec.v)) {
        if (!(eps > 0.0)) throw std::invalid_argument("gamma discretization needs eps > 0");
        double alpha_min = g->shape_rate(0.0);
        // layout covers the instantaneous alpha; callers wanting a shared
        // layout across t or across a coupled pair build it explicitly
        return discretize_on_layout(spec, t, gamma_layout(std::min(alpha_min, g->shape_rate(t)), eps, n_nodes));
    }
    DiscretizationLayout lay{eps, 0.0, std::max(1, n_nodes / 8), 8, false};
    return discretize_on_layout(spec, t, lay);
}

double discretize_mass_error(const LevyMeasureSpec& spec, double t, double eps, int n_nodes) {
    const double m1 = discretize(spec, t, eps, n_nodes).total_mass();
    const double m2 = discretize(spec, t, eps, 2 * n_nodes).total_mass();
    return std::abs(m1 - m2);
}

DiscreteMeasure tilt_square(const DiscreteMeasure& m) {
    std::vector<Atom> atoms;
    atoms.reserve(m.size());
    for (const auto& a : m.atoms()) {
        const double w = a.location * a.location * a.weight;
        if (w != 0.0) atoms.push_back({a.location, w});
    }
    return DiscreteMeasure(std::move(atoms));
}

DiscreteMeasure pushforward(const DiscreteMeasure& m, const std::function<double(double)>& map) {
    std::vector<Atom> atoms;
    atoms.reserve(m.size());
    for (const auto& a : m.atoms()) {
        const double y = map(a.location);
        if (!std::isfinite(y)) throw std::runtime_error("pushforward: map returned non-finite value");
        atoms.push_back({y, a.weight});
    }
    return DiscreteMeasure(std::move(atoms));
}

double tv_distance(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    double s = 0.0;
    size_t i = 0, j = 0;
    const auto& A = a.atoms();
    const auto& B = b.atoms();
    while (i < A.size() || j < B.size()) {
        if (j >= B.size() || (i < A.size() && A[i].location < B[j].location &&
                              !locations_equal(A[i].location, B[j].location))) {
            s += A[i++].weight;
        } else if (i >= A.size() || (B[j].location < A[i].location &&
                                     !locations_equal(A[i].location, B[j].location))) {
            s += B[j++].weight;
        } else {
            s += std::abs(A[i].weight - B[j].weight);
            ++i;
            ++j;
        }
    }
    return s;
}

double frullani_tv(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("frullani_tv: parameters must be positive");
    return std::abs(std::log(beta / alpha));
}

}  // namespace jumpwass
