#include "coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jumpwass {

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known,
                    const char* what) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok) throw std::invalid_argument(std::string("unknown field in ") + what + ": " + it.key());
    }
}

}  // namespace

double Coefficient::value(double t, double x) const {
    switch (form) {
        case Form::Constant: return a(t);
        case Form::Linear: return a(t) * x;
        case Form::Affine: return a(t) + b(t) * x;
        case Form::AffineBump: {
            const double z = (x - center) / width;
            return a(t) + b(t) * x + amp * std::exp(-0.5 * z * z);
        }
    }
    return 0.0;
}

double Coefficient::dx(double t, double x, int order) const {
    if (order < 1 || order > 3) throw std::invalid_argument("Coefficient::dx: order 1..3");
    switch (form) {
        case Form::Constant: return 0.0;
        case Form::Linear: return order == 1 ? a(t) : 0.0;
        case Form::Affine: return order == 1 ? b(t) : 0.0;
        case Form::AffineBump: {
            const double z = (x - center) / width;
            const double g = amp * std::exp(-0.5 * z * z);
            const double w = width;
            double bump;
            if (order == 1)
                bump = -z / w * g;
            else if (order == 2)
                bump = (z * z - 1.0) / (w * w) * g;
            else
                bump = (3.0 * z - z * z * z) / (w * w * w) * g;
            return (order == 1 ? b(t) : 0.0) + bump;
        }
    }
    return 0.0;
}

bool Coefficient::depends_on_x() const {
    switch (form) {
        case Form::Constant: return false;
        case Form::Linear: return !(a.c0 == 0.0 && a.c1 == 0.0);
        case Form::Affine: return !(b.c0 == 0.0 && b.c1 == 0.0);
        case Form::AffineBump: return true;
    }
    return false;
}

double JumpMap::factor(double t, double x) const {
    switch (form) {
        case Form::AdditiveMark: return a(t);
        case Form::Proportional: return a(t) * x;
        case Form::AffineMark: return a(t) + b(t) * x;
    }
    return 0.0;
}

double JumpMap::factor_dx(double t, int order) const {
    if (order < 1 || order > 3) throw std::invalid_argument("JumpMap::factor_dx: order 1..3");
    if (order > 1) return 0.0;
    switch (form) {
        case Form::AdditiveMark: return 0.0;
        case Form::Proportional: return a(t);
        case Form::AffineMark: return b(t);
    }
    return 0.0;
}

bool JumpMap::depends_on_x() const {
    switch (form) {
        case Form::AdditiveMark: return false;
        case Form::Proportional: return !(a.c0 == 0.0 && a.c1 == 0.0);
        case Form::AffineMark: return !(b.c0 == 0.0 && b.c1 == 0.0);
    }
    return false;
}

nlohmann::json coefficient_to_json(const Coefficient& c) {
    nlohmann::json j;
    switch (c.form) {
        case Coefficient::Form::Constant:
            j["form"] = "constant";
            j["a"] = time_fn_to_json(c.a);
            break;
        case Coefficient::Form::Linear:
            j["form"] = "linear";
            j["a"] = time_fn_to_json(c.a);
            break;
        case Coefficient::Form::Affine:
            j["form"] = "affine";
            j["a"] = time_fn_to_json(c.a);
            j["b"] = time_fn_to_json(c.b);
            break;
        case Coefficient::Form::AffineBump:
            j["form"] = "affine_bump";
            j["a"] = time_fn_to_json(c.a);
            j["b"] = time_fn_to_json(c.b);
            j["amp"] = c.amp;
            j["center"] = c.center;
            j["width"] = c.width;
            break;
    }
    return j;
}

Coefficient coefficient_from_json(const nlohmann::json& j) {
    Coefficient c;
    const std::string form = j.at("form").get<std::string>();
    if (form == "constant") {
        reject_unknown(j, {"form", "a"}, "coefficient");
        c.form = Coefficient::Form::Constant;
        c.a = time_fn_from_json(j.at("a"));
    } else if (form == "linear") {
        reject_unknown(j, {"form", "a"}, "coefficient");
        c.form = Coefficient::Form::Linear;
        c.a = time_fn_from_json(j.at("a"));
    } else if (form == "affine") {
        reject_unknown(j, {"form", "a", "b"}, "coefficient");
        c.form = Coefficient::Form::Affine;
        c.a = time_fn_from_json(j.at("a"));
        c.b = time_fn_from_json(j.at("b"));
    } else if (form == "affine_bump") {
        reject_unknown(j, {"form", "a", "b", "amp", "center", "width"}, "coefficient");
        c.form = Coefficient::Form::AffineBump;
        c.a = time_fn_from_json(j.at("a"));
        c.b = time_fn_from_json(j.at("b"));
        c.amp = j.at("amp").get<double>();
        c.center = j.at("center").get<double>();
        c.width = j.at("width").get<double>();
        if (!(c.width > 0.0)) throw std::invalid_argument("affine_bump width must be > 0");
    } else {
        throw std::invalid_argument("unknown coefficient form: " + form);
    }
    return c;
}

nlohmann::json jump_map_to_json(const JumpMap& g) {
    nlohmann::json j;
    switch (g.form) {
        case JumpMap::Form::AdditiveMark:
            j["form"] = "additive_mark";
            j["kappa"] = time_fn_to_json(g.a);
            break;
        case JumpMap::Form::Proportional:
            j["form"] = "proportional";
            j["eta"] = time_fn_to_json(g.a);
            break;
        case JumpMap::Form::AffineMark:
            j["form"] = "affine_mark";
            j["a"] = time_fn_to_json(g.a);
            j["b"] = time_fn_to_json(g.b);
            break;
    }
    return j;
}

JumpMap jump_map_from_json(const nlohmann::json& j) {
    JumpMap g;
    const std::string form = j.at("form").get<std::string>();
    if (form == "additive_mark") {
        reject_unknown(j, {"form", "kappa"}, "jump_map");
        g.form = JumpMap::Form::AdditiveMark;
        g.a = time_fn_from_json(j.at("kappa"));
    } else if (form == "proportional") {
        reject_unknown(j, {"form", "eta"}, "jump_map");
        g.form = JumpMap::Form::Proportional;
        g.a = time_fn_from_json(j.at("eta"));
    } else if (form == "affine_mark") {
        reject_unknown(j, {"form", "a", "b"}, "jump_map");
        g.form = JumpMap::Form::AffineMark;
        g.a = time_fn_from_json(j.at("a"));
        g.b = time_fn_from_json(j.at("b"));
    } else {
        throw std::invalid_argument("unknown jump_map form: " + form);
    }
    return g;
}

void ProcessSpec::validate(double horizon) const {
    levy.validate(horizon);
    // Lipschitz spot check on a grid; catalog forms are smooth so finite
    // differences only guard against absurd parameters.
    for (int k = 0; k <= 8; ++k) {
        const double t = horizon * k / 8;
        for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            const double du = drift.dx(t, x, 1);
            const double ds = sigma.dx(t, x, 1);
            if (!std::isfinite(du) || !std::isfinite(ds) || std::abs(du) > 1e6 ||
                std::abs(ds) > 1e6)
                throw std::invalid_argument("coefficient Lipschitz spot-check failed");
        }
    }
    if (!std::isfinite(x0)) throw std::invalid_argument("x0 must be finite");
}

nlohmann::json process_to_json(const ProcessSpec& s) {
    nlohmann::json j;
    j["drift"] = coefficient_to_json(s.drift);
    j["sigma"] = coefficient_to_json(s.sigma);
    j["jump_map"] = jump_map_to_json(s.jump);
    j["levy"] = levy_to_json(s.levy);
    return j;
}

ProcessSpec process_from_json(const nlohmann::json& j) {
    reject_unknown(j, {"drift", "sigma", "jump_map", "levy"}, "process spec");
    ProcessSpec s;
    s.drift = coefficient_from_json(j.at("drift"));
    s.sigma = coefficient_from_json(j.at("sigma"));
    s.jump = jump_map_from_json(j.at("jump_map"));
    s.levy = levy_from_json(j.at("levy"));
    return s;
}

void GridConfig::validate() const {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (n_nodes < 2) throw std::invalid_argument("n_nodes must be >= 2");
    if (theta_paths < 1) throw std::invalid_argument("theta_paths must be >= 1");
    if (fm_nodes < 1 || fm_nodes > n_steps)
        throw std::invalid_argument("fm_nodes must be in [1, n_steps]");
}

nlohmann::json GridConfig::to_json() const {
    return {{"horizon", horizon}, {"n_steps", n_steps},     {"epsilon", epsilon},
            {"n_paths", n_paths}, {"seed", seed},           {"n_nodes", n_nodes},
            {"theta_paths", theta_paths}, {"fm_nodes", fm_nodes}};
}

GridConfig GridConfig::from_json(const nlohmann::json& j) {
    reject_unknown(j,
                   {"horizon", "n_steps", "epsilon", "n_paths", "seed", "n_nodes", "theta_paths",
                    "fm_nodes"},
                   "grid config");
    GridConfig g;
    g.horizon = j.at("horizon").get<double>();
    g.n_steps = j.at("n_steps").get<int>();
    if (j.contains("epsilon")) g.epsilon = j.at("epsilon").get<double>();
    g.n_paths = j.at("n_paths").get<int>();
    g.seed = j.at("seed").get<uint64_t>();
    if (j.contains("n_nodes")) g.n_nodes = j.at("n_nodes").get<int>();
    if (j.contains("theta_paths")) g.theta_paths = j.at("theta_paths").get<int>();
    if (j.contains("fm_nodes")) g.fm_nodes = j.at("fm_nodes").get<int>();
    g.validate();
    return g;
}

}  // namespace jumpwass
