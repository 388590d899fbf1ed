#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bounds.hpp"
#include "scenario.hpp"

namespace jumpwass {

inline constexpr const char* kVersion = "0.1.0";

struct Verdict {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double lhs_noise = 0.0;  // 4-sigma margin used to call a violation "verified"
    bool pass = false;
    bool inconclusive = false;  // lhs > rhs but within noise
};

struct DistanceSection {
    double w1 = 0.0;
    double w1_se_proxy = 0.0;  // se of mean |X - X*| over coupled pairs
    double dw3_lower = 0.0;
    double dw3_lower_se = 0.0;  // se of the maximizing member's mean gap
    int n_samples = 0;
};

struct BoundReport {
    std::string scenario_name;
    uint64_t scenario_hash = 0;
    uint64_t seed = 0;
    std::string version = kVersion;
    nlohmann::json grid;       // full grid config echoed into the artifact
    double sweep_value = 0.0;  // set by run_sweep
    ThetaReport theta;
    ConstantSet constants;
    double rhs_smooth_w3 = 0.0;
    double rhs_wasserstein_aggregate = 0.0;
    double rhs_wasserstein_f = 0.0;
    double characteristic_bound_aggregate = 0.0;
    double characteristic_bound_se = 0.0;
    DistanceSection distances;
    std::vector<Verdict> verdicts;
    int aborted_paths = 0;
    double theta_condition_k = 10.0;
    bool theta_within_k = true;
    bool all_ok = false;             // every verdict passes or is inconclusive
    bool verified_violation = false;

    nlohmann::json to_json() const;
    static std::string csv_header();
    std::string csv_row() const;
};

const TestFunctionDictionary& shared_dictionary();

BoundReport run_verify(const Scenario& sc, int threads);
ConstantSet run_constants(const Scenario& sc, int threads);  // honors JUMPWASS_CACHE_DIR

struct SweepResult {
    std::string parameter;
    std::vector<BoundReport> rows;
    std::string to_csv() const;
};
SweepResult run_sweep(const Scenario& sc, const std::string& parameter,
                      const std::vector<double>& values, int threads);

struct DistancesResult {
    DistanceSection distances;
    std::vector<double> terminal_x, terminal_xstar;
    int aborted = 0;
    nlohmann::json to_json(const Scenario& sc) const;
};
DistancesResult run_distances(const Scenario& sc, int threads);

// io helpers
void write_text_file(const std::string& path, const std::string& content);
void write_samples_csv(const std::string& path, const std::vector<double>& x,
                       const std::vector<double>& xstar);
// versioned binary layout: magic "JWBIN001", u32 version, u32 n_columns,
// u64 n_rows, row-major little-endian doubles
void write_samples_binary(const std::string& path, const std::vector<double>& x,
                          const std::vector<double>& xstar);
void write_char_records_csv(const std::string& path, int path_id,
                            const std::vector<CharRecord>& records);

}  // namespace jumpwass
