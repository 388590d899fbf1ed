#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "pipeline.hpp"
#include "quad.hpp"

using namespace jumpwass;

namespace {

const char* kScenarioJson = R"({
  "schema_version": 1,
  "name": "test_identical",
  "x0": 1.0,
  "grid": {"horizon": 1.0, "n_steps": 50, "epsilon": 0.001, "n_paths": 2000,
           "seed": 12345, "n_nodes": 64, "theta_paths": 500, "fm_nodes": 10},
  "specX": {
    "drift": {"form": "linear", "a": 0.05},
    "sigma": {"form": "linear", "a": 0.2},
    "jump_map": {"form": "proportional", "eta": 0.1},
    "levy": {"variant": "point_mass", "rate": 1.0, "location": 1.0}
  },
  "specXstar": {
    "drift": {"form": "linear", "a": 0.05},
    "sigma": {"form": "linear", "a": 0.2},
    "jump_map": {"form": "proportional", "eta": 0.1},
    "levy": {"variant": "point_mass", "rate": 1.0, "location": 1.0}
  },
  "constants": {"n_paths": 500, "safety": 1.5, "start_points": 5}
})";

}  // namespace

TEST_SUITE_BEGIN("scenario_pipeline");

TEST_CASE("scenario parses, round-trips, and rejects unknown fields") {
    const auto j = nlohmann::json::parse(kScenarioJson);
    const Scenario sc = Scenario::from_json(j);
    CHECK(sc.name == "test_identical");
    CHECK(sc.grid.n_paths == 2000);
    CHECK(sc.specX.drift.form == Coefficient::Form::Linear);
    // round trip: serialize then parse gives the same canonical form
    const auto j2 = sc.to_json();
    const Scenario sc2 = Scenario::from_json(j2);
    CHECK(sc2.to_json() == j2);
    CHECK(sc2.hash() == sc.hash());

    auto bad = j;
    bad["surprise"] = 1;
    CHECK_THROWS(Scenario::from_json(bad));
    auto bad2 = j;
    bad2["specX"]["drift"]["form"] = "cubic";
    CHECK_THROWS(Scenario::from_json(bad2));
    auto bad3 = j;
    bad3["grid"]["n_steps"] = 0;
    CHECK_THROWS(Scenario::from_json(bad3));
}

TEST_CASE("identical-spec scenario verifies with near-zero lhs") {
    const Scenario sc = Scenario::from_json(nlohmann::json::parse(kScenarioJson));
    const BoundReport rep = run_verify(sc, 2);
    CHECK(rep.all_ok);
    CHECK(!rep.verified_violation);
    CHECK(rep.distances.w1 < 1e-12);
    CHECK(rep.distances.dw3_lower < 1e-12);
    CHECK(rep.theta.theta_u == 0.0);
    CHECK(rep.theta.theta_sigma == 0.0);
    CHECK(rep.theta.theta_nu == 0.0);
    CHECK(rep.rhs_wasserstein_f == 0.0);
    for (const auto& v : rep.verdicts) CHECK(v.pass);
    // report serializes with scenario hash, seed and version embedded
    const auto j = rep.to_json();
    CHECK(j.at("scenario_hash").get<uint64_t>() == sc.hash());
    CHECK(j.at("seed").get<uint64_t>() == 12345);
    CHECK(j.at("tool_version").get<std::string>() == std::string(kVersion));
    CHECK(BoundReport::csv_header().rfind("scenario,", 0) == 0);
    CHECK(!rep.csv_row().empty());
}

TEST_CASE("drift-gap scenario: bound holds and reruns are bit-identical") {
    auto j = nlohmann::json::parse(kScenarioJson);
    j["name"] = "test_drift_gap";
    j["specXstar"]["drift"]["a"] = 0.10;
    j["grid"]["n_paths"] = 5000;
    j["grid"]["theta_paths"] = 1000;
    const Scenario sc = Scenario::from_json(j);
    const BoundReport r1 = run_verify(sc, 2);
    const BoundReport r2 = run_verify(sc, 1);
    CHECK(r1.all_ok);
    CHECK(r1.theta.theta_u > 0.0);
    CHECK(r1.distances.w1 > 0.0);
    CHECK(r1.distances.w1 <= r1.rhs_wasserstein_f);
    CHECK(!r1.constants.warning_high_se);
    CHECK(std::isfinite(r1.constants.A2));
    CHECK(std::isfinite(r1.constants.B3));
    // the grid config is echoed into the artifact
    CHECK(r1.to_json().at("grid").at("n_steps").get<int>() == 50);
    // byte-identical reports across thread counts
    CHECK(r1.to_json().dump() == r2.to_json().dump());
    CHECK(r1.csv_row() == r2.csv_row());
}

TEST_CASE("constants cache produces byte-identical output") {
    const std::string dir = "/tmp/jw_cache_test";
    std::filesystem::remove_all(dir);
    setenv("JUMPWASS_CACHE_DIR", dir.c_str(), 1);
    const Scenario sc = Scenario::from_json(nlohmann::json::parse(kScenarioJson));
    const ConstantSet c1 = run_constants(sc, 2);
    const ConstantSet c2 = run_constants(sc, 1);  // cache hit
    CHECK(c1.to_json().dump() == c2.to_json().dump());
    unsetenv("JUMPWASS_CACHE_DIR");
    int entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
    CHECK(entries == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep moves theta monotonically to zero as the gap closes") {
    auto j = nlohmann::json::parse(kScenarioJson);
    j["name"] = "test_sweep";
    j["grid"]["n_paths"] = 1500;
    j["grid"]["theta_paths"] = 400;
    const Scenario sc = Scenario::from_json(j);
    SweepResult res = run_sweep(sc, "specXstar.jump_map.eta", {0.16, 0.13, 0.1}, 2);
    REQUIRE(res.rows.size() == 3);
    CHECK(res.rows[0].theta.theta_nu >= res.rows[1].theta.theta_nu - 1e-9);
    CHECK(res.rows[1].theta.theta_nu >= res.rows[2].theta.theta_nu - 1e-9);
    CHECK(res.rows[2].theta.theta_nu == 0.0);  // eta matches: identical tilted measures
    const std::string csv = res.to_csv();
    CHECK(csv.find("parameter,") == 0);
    CHECK(csv.find("specXstar.jump_map.eta") != std::string::npos);
    CHECK_THROWS(run_sweep(sc, "specXstar.nonsense.field", {1.0}, 1));
}

TEST_CASE("simulated sigma-gap sweep exposes the square-root exponent") {
    auto j = nlohmann::json::parse(kScenarioJson);
    j["name"] = "test_sigma_sweep";
    j["grid"]["n_paths"] = 4000;
    j["grid"]["theta_paths"] = 1000;
    j["grid"]["n_steps"] = 100;
    j["constants"] = {{"n_paths", 2000}, {"safety", 1.5}, {"start_points", 5}};
    const Scenario sc = Scenario::from_json(j);
    SweepResult res =
        run_sweep(sc, "specXstar.sigma.a", {0.52, 0.36, 0.26, 0.245, 0.22, 0.21}, 2);
    std::vector<double> lx, ly;
    for (const auto& r : res.rows) {
        REQUIRE(r.theta.theta_sigma > 0.0);
        lx.push_back(std::log(r.theta.theta_sigma));
        ly.push_back(std::log(r.rhs_wasserstein_f));
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(lx.size());
    for (size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope > 0.35);
    CHECK(slope < 0.65);
}

TEST_CASE("distances run writes samples and summary") {
    auto j = nlohmann::json::parse(kScenarioJson);
    j["name"] = "test_distances";
    j["specXstar"]["sigma"]["a"] = 0.25;
    const Scenario sc = Scenario::from_json(j);
    DistancesResult res = run_distances(sc, 2);
    CHECK(res.distances.n_samples == 2000);
    CHECK(res.distances.w1 > 0.0);
    const std::string dir = "/tmp/jw_dist_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    write_samples_csv(dir + "/samples.csv", res.terminal_x, res.terminal_xstar);
    write_samples_binary(dir + "/samples.bin", res.terminal_x, res.terminal_xstar);
    std::ifstream csv(dir + "/samples.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "path_id,X_T,Xstar_T");
    std::ifstream bin(dir + "/samples.bin", std::ios::binary);
    char magic[8];
    bin.read(magic, 8);
    CHECK(std::string(magic, 8) == "JWBIN001");
    uint32_t ver = 0, cols = 0;
    uint64_t rows = 0;
    bin.read(reinterpret_cast<char*>(&ver), 4);
    bin.read(reinterpret_cast<char*>(&cols), 4);
    bin.read(reinterpret_cast<char*>(&rows), 8);
    CHECK(ver == 1);
    CHECK(cols == 2);
    CHECK(rows == res.terminal_x.size());
    double first = 0.0;
    bin.read(reinterpret_cast<char*>(&first), 8);
    CHECK(first == res.terminal_x[0]);
    std::filesystem::remove_all(dir);
}

TEST_CASE("gamma scenario theta_nu matches the analytic tilted-mass gap") {
    // additive unit marks: the tilted image measures are y e^{-y} dy and
    // y e^{-2y} dy above eps; their difference is positive everywhere, so
    // d_FM equals the mass gap and theta_nu = T * gap exactly
    auto j = nlohmann::json::parse(kScenarioJson);
    j["name"] = "test_gamma_theta";
    j["grid"]["n_paths"] = 200;
    j["grid"]["theta_paths"] = 50;
    j["grid"]["n_nodes"] = 256;
    for (const char* k : {"specX", "specXstar"}) {
        j[k]["drift"] = {{"form", "constant"}, {"a", 0.0}};
        j[k]["sigma"] = {{"form", "constant"}, {"a", 0.2}};
        j[k]["jump_map"] = {{"form", "additive_mark"}, {"kappa", 1.0}};
    }
    j["specX"]["levy"] = {{"variant", "gamma"}, {"shape_rate", 1.0}};
    j["specXstar"]["levy"] = {{"variant", "gamma"}, {"shape_rate", 2.0}};
    const Scenario sc = Scenario::from_json(j);
    const BoundReport rep = run_verify(sc, 2);
    const double eps = 0.001;
    auto m1 = [&](double alpha) {
        return integrate_adaptive([alpha](double y) { return y * std::exp(-alpha * y); }, eps,
                                  60.0, 1e-12);
    };
    const double expect = m1(1.0) - m1(2.0);  // horizon T = 1
    CHECK(rep.theta.theta_nu == doctest::Approx(expect).epsilon(1e-4));
    CHECK(rep.theta.se_nu < 1e-12);  // state-free integrand is deterministic
    CHECK(rep.all_ok);
}

TEST_CASE("characteristic records stream to csv") {
    const Scenario sc = Scenario::from_json(nlohmann::json::parse(kScenarioJson));
    CoupledRunResult run = simulate_coupled(sc.specX, sc.specXstar, sc.grid, 1, 1);
    REQUIRE(run.recorded.size() == 1);
    auto records = characteristics_along_path(sc.specX, sc.specXstar, sc.grid, run.recorded[0]);
    CHECK(records.size() == 10);
    const std::string path = "/tmp/jw_char_test.csv";
    write_char_records_csv(path, 0, records);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "path_id,t,X,Xstar,du,dsig2,dfm");
    std::filesystem::remove(path);
}

TEST_SUITE_END();
