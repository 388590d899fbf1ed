#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "coeffs.hpp"

namespace jumpwass {

struct ConstantsBudget {
    int n_paths = 10000;
    int start_points = 9;
    double start_lo = 0.0, start_hi = 0.0;  // derived from x0 unless explicit
    bool explicit_grid = false;
    double safety = 1.5;
};

// Scenario file: named coefficient forms for the coupled pair plus budgets.
// Parsing is strict; unknown fields are rejected at every level.
struct Scenario {
    int schema_version = 1;
    std::string name;
    double x0 = 1.0;
    ProcessSpec specX, specXstar;
    GridConfig grid;
    ConstantsBudget constants;
    double theta_condition_k = 10.0;

    std::vector<double> start_grid() const;
    nlohmann::json to_json() const;
    static Scenario from_json(const nlohmann::json& j);
    static Scenario load_file(const std::string& path);
    uint64_t hash() const;  // FNV-1a over the canonical serialization
};

// Replace an existing numeric leaf addressed by a dotted path (for
// parameter sweeps); throws if the path does not lead to a number.
nlohmann::json with_override(const nlohmann::json& doc, const std::string& dotted_path,
                             double value);

uint64_t fnv1a64(const std::string& s);

}  // namespace jumpwass
