#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace jumpwass {

std::vector<double> Scenario::start_grid() const {
    double lo = constants.start_lo, hi = constants.start_hi;
    if (!constants.explicit_grid) {
        lo = x0 / 2.0;
        hi = 2.0 * x0;
        if (std::abs(x0) < 1e-9) {
            lo = -1.0;
            hi = 1.0;
        }
        if (lo > hi) std::swap(lo, hi);
    }
    std::vector<double> g;
    const int n = constants.start_points;
    for (int i = 0; i < n; ++i) g.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return g;
}

nlohmann::json Scenario::to_json() const {
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["name"] = name;
    j["x0"] = x0;
    j["grid"] = grid.to_json();
    j["specX"] = process_to_json(specX);
    j["specXstar"] = process_to_json(specXstar);
    nlohmann::json c;
    c["n_paths"] = constants.n_paths;
    c["safety"] = constants.safety;
    c["start_points"] = constants.start_points;
    if (constants.explicit_grid) {
        c["start_lo"] = constants.start_lo;
        c["start_hi"] = constants.start_hi;
    }
    j["constants"] = c;
    j["theta_condition_k"] = theta_condition_k;
    return j;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {"schema_version", "name",      "x0",
                                                   "grid",           "specX",     "specXstar",
                                                   "constants",      "theta_condition_k"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw std::invalid_argument("unknown scenario field: " + it.key());
    Scenario s;
    s.schema_version = j.at("schema_version").get<int>();
    if (s.schema_version != 1) throw std::invalid_argument("unsupported schema_version");
    s.name = j.at("name").get<std::string>();
    s.x0 = j.at("x0").get<double>();
    s.grid = GridConfig::from_json(j.at("grid"));
    s.specX = process_from_json(j.at("specX"));
    s.specXstar = process_from_json(j.at("specXstar"));
    s.specX.x0 = s.x0;
    s.specXstar.x0 = s.x0;
    if (j.contains("constants")) {
        const auto& c = j.at("constants");
        static const std::vector<std::string> known_c = {"n_paths", "safety", "start_points",
                                                         "start_lo", "start_hi"};
        for (auto it = c.begin(); it != c.end(); ++it)
            if (std::find(known_c.begin(), known_c.end(), it.key()) == known_c.end())
                throw std::invalid_argument("unknown constants field: " + it.key());
        if (c.contains("n_paths")) s.constants.n_paths = c.at("n_paths").get<int>();
        if (c.contains("safety")) s.constants.safety = c.at("safety").get<double>();
        if (c.contains("start_points")) s.constants.start_points = c.at("start_points").get<int>();
        if (c.contains("start_lo") != c.contains("start_hi"))
            throw std::invalid_argument("start_lo and start_hi must come together");
        if (c.contains("start_lo")) {
            s.constants.start_lo = c.at("start_lo").get<double>();
            s.constants.start_hi = c.at("start_hi").get<double>();
            s.constants.explicit_grid = true;
        }
        if (s.constants.n_paths < 2) throw std::invalid_argument("constants.n_paths must be >= 2");
        if (s.constants.start_points < 1)
            throw std::invalid_argument("constants.start_points must be >= 1");
        if (!(s.constants.safety >= 1.0))
            throw std::invalid_argument("constants.safety must be >= 1");
    }
    if (j.contains("theta_condition_k"))
        s.theta_condition_k = j.at("theta_condition_k").get<double>();
    s.specX.validate(s.grid.horizon);
    s.specXstar.validate(s.grid.horizon);
    return s;
}

Scenario Scenario::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("scenario parse error in " + path + ": " + e.what());
    }
    try {
        return from_json(j);
    } catch (const std::exception& e) {
        throw std::runtime_error("invalid scenario " + path + ": " + e.what());
    }
}

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t Scenario::hash() const { return fnv1a64(to_json().dump()); }

nlohmann::json with_override(const nlohmann::json& doc, const std::string& dotted_path,
                             double value) {
    nlohmann::json out = doc;
    nlohmann::json* cur = &out;
    std::stringstream ss(dotted_path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw std::invalid_argument("empty sweep parameter path");
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!cur->is_object() || !cur->contains(parts[i]))
            throw std::invalid_argument("sweep parameter path not found: " + dotted_path);
        cur = &(*cur)[parts[i]];
    }
    const std::string& leaf = parts.back();
    if (!cur->is_object() || !cur->contains(leaf))
        throw std::invalid_argument("sweep parameter path not found: " + dotted_path);
    nlohmann::json& target = (*cur)[leaf];
    if (target.is_number()) {
        target = value;
    } else if (target.is_array() && target.size() == 2 && target[0].is_number()) {
        target[0] = value;  // time function [c0, c1]: sweep moves c0
    } else {
        throw std::invalid_argument("sweep parameter is not numeric: " + dotted_path);
    }
    return out;
}

}  // namespace jumpwass
