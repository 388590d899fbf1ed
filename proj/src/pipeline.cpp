#include "pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

namespace jumpwass {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::pair<double, double> mean_se_of(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    if (n == 0) return {0.0, 0.0};
    double s = 0.0;
    for (double x : v) s += x;
    const double mean = s / n;
    double q = 0.0;
    for (double x : v) q += (x - mean) * (x - mean);
    return {mean, n > 1 ? std::sqrt(q / (static_cast<double>(n) * (n - 1))) : 0.0};
}

}  // namespace

const TestFunctionDictionary& shared_dictionary() {
    static const TestFunctionDictionary dict = TestFunctionDictionary::default16();
    return dict;
}

nlohmann::json BoundReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["tool_version"] = version;
    j["scenario"] = scenario_name;
    j["scenario_hash"] = scenario_hash;
    j["seed"] = seed;
    j["grid"] = grid;
    j["theta"] = theta.to_json();
    j["constants"] = constants.to_json();
    j["rhs"] = {{"smooth_w3", rhs_smooth_w3},
                {"wasserstein_aggregate", rhs_wasserstein_aggregate},
                {"wasserstein_f", rhs_wasserstein_f},
                {"characteristic_bound_aggregate", characteristic_bound_aggregate},
                {"characteristic_bound_aggregate_se", characteristic_bound_se}};
    j["lhs"] = {{"w1", distances.w1},
                {"w1_se_proxy", distances.w1_se_proxy},
                {"dw3_lower", distances.dw3_lower},
                {"dw3_lower_se", distances.dw3_lower_se},
                {"n_samples", distances.n_samples}};
    auto arr = nlohmann::json::array();
    for (const auto& v : verdicts)
        arr.push_back({{"name", v.name},
                       {"lhs", v.lhs},
                       {"rhs", v.rhs},
                       {"lhs_noise", v.lhs_noise},
                       {"pass", v.pass},
                       {"inconclusive", v.inconclusive}});
    j["verdicts"] = arr;
    j["aborted_paths"] = aborted_paths;
    j["theta_condition"] = {{"k", theta_condition_k}, {"within", theta_within_k}};
    j["verification_basis"] =
        "inequalities checked against Monte Carlo-estimated flow constants, not certified bounds";
    j["all_ok"] = all_ok;
    j["verified_violation"] = verified_violation;
    return j;
}

std::string BoundReport::csv_header() {
    return "scenario,hash,seed,sweep_value,theta_u,theta_sigma,theta_nu,Theta,se_u,se_sigma,"
           "se_nu,A1,A2,B1,B2,B3,C1,C2,C3,rhs_smooth_w3,rhs_wasserstein_aggregate,"
           "rhs_wasserstein_f,characteristic_bound_aggregate,w1,dw3_lower,verdict_smooth_w3,"
           "verdict_wasserstein_aggregate,verdict_wasserstein_f,verdict_characteristic,"
           "aborted,fm_failed,all_ok";
}

std::string BoundReport::csv_row() const {
    auto verdict_str = [&](const std::string& name) -> std::string {
        for (const auto& v : verdicts)
            if (v.name == name) return v.pass ? "pass" : (v.inconclusive ? "inconclusive" : "fail");
        return "n/a";
    };
    std::ostringstream os;
    os << scenario_name << ',' << scenario_hash << ',' << seed << ',' << fmt(sweep_value) << ','
       << fmt(theta.theta_u) << ',' << fmt(theta.theta_sigma) << ',' << fmt(theta.theta_nu) << ','
       << fmt(theta.total()) << ',' << fmt(theta.se_u) << ',' << fmt(theta.se_sigma) << ','
       << fmt(theta.se_nu) << ',' << fmt(constants.A1) << ',' << fmt(constants.A2) << ','
       << fmt(constants.B1) << ',' << fmt(constants.B2) << ',' << fmt(constants.B3) << ','
       << fmt(constants.C1) << ',' << fmt(constants.C2) << ',' << fmt(constants.C3) << ','
       << fmt(rhs_smooth_w3) << ',' << fmt(rhs_wasserstein_aggregate) << ',' << fmt(rhs_wasserstein_f) << ','
       << fmt(characteristic_bound_aggregate) << ',' << fmt(distances.w1) << ',' << fmt(distances.dw3_lower)
       << ',' << verdict_str("smooth_w3") << ',' << verdict_str("wasserstein_aggregate") << ','
       << verdict_str("wasserstein_f") << ',' << verdict_str("characteristic_bound") << ','
       << aborted_paths << ',' << theta.fm_failed_nodes << ',' << (all_ok ? 1 : 0);
    return os.str();
}

namespace {

DistanceSection compute_distances(const CoupledRunResult& run) {
    DistanceSection d;
    d.n_samples = static_cast<int>(run.terminal_x.size());
    if (d.n_samples == 0) return d;
    SampleSet a(run.terminal_x), b(run.terminal_xstar);
    d.w1 = w1_empirical(a, b);
    std::vector<double> absdiff(run.terminal_x.size());
    for (size_t i = 0; i < absdiff.size(); ++i)
        absdiff[i] = std::abs(run.terminal_x[i] - run.terminal_xstar[i]);
    d.w1_se_proxy = mean_se_of(absdiff).second;

    const auto& dict = shared_dictionary();
    double best = -1.0;
    for (const auto& h : dict.members()) {
        std::vector<double> diffs(run.terminal_x.size());
        for (size_t i = 0; i < diffs.size(); ++i)
            diffs[i] = h->eval(run.terminal_xstar[i]) - h->eval(run.terminal_x[i]);
        auto [m, se] = mean_se_of(diffs);
        if (std::abs(m) > best) {
            best = std::abs(m);
            d.dw3_lower = std::abs(m);
            d.dw3_lower_se = se;
        }
    }
    return d;
}

std::string constants_cache_path(const Scenario& sc) {
    const char* dir = std::getenv("JUMPWASS_CACHE_DIR");
    if (!dir || !*dir) return {};
    nlohmann::json key;
    key["specXstar"] = process_to_json(sc.specXstar);
    key["x0"] = sc.x0;
    key["horizon"] = sc.grid.horizon;
    key["n_steps"] = sc.grid.n_steps;
    key["epsilon"] = sc.grid.epsilon;
    key["n_nodes"] = sc.grid.n_nodes;
    key["seed"] = sc.grid.seed;
    key["n_paths"] = sc.constants.n_paths;
    key["start_grid"] = sc.start_grid();
    key["safety"] = sc.constants.safety;
    char name[64];
    std::snprintf(name, sizeof(name), "constants_%016llx.json",
                  static_cast<unsigned long long>(fnv1a64(key.dump())));
    return std::string(dir) + "/" + name;
}

}  // namespace

ConstantSet run_constants(const Scenario& sc, int threads) {
    const std::string cache = constants_cache_path(sc);
    if (!cache.empty()) {
        std::ifstream in(cache);
        if (in) {
            try {
                return ConstantSet::from_json(nlohmann::json::parse(in));
            } catch (const std::exception&) {
                // stale or corrupt cache entry: recompute
            }
        }
    }
    ConstantSet c = estimate_constants(sc.specXstar, sc.grid, sc.start_grid(),
                                       sc.constants.n_paths, sc.constants.safety, threads);
    if (!cache.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(std::filesystem::path(cache).parent_path(), ec);
        std::ofstream out(cache);
        if (out) out << c.to_json().dump(2) << "\n";
    }
    return c;
}

BoundReport run_verify(const Scenario& sc, int threads) {
    BoundReport rep;
    rep.scenario_name = sc.name;
    rep.scenario_hash = sc.hash();
    rep.seed = sc.grid.seed;
    rep.grid = sc.grid.to_json();
    rep.theta_condition_k = sc.theta_condition_k;

    CoupledRunResult run = simulate_coupled(sc.specX, sc.specXstar, sc.grid, threads);
    rep.aborted_paths = run.aborted;
    rep.theta = theta_from_run(run);
    auto [cb, cb_se] = mean_se_of(run.int_char_bound);
    rep.characteristic_bound_aggregate = cb;
    rep.characteristic_bound_se = cb_se;
    rep.distances = compute_distances(run);
    rep.constants = run_constants(sc, threads);

    rep.rhs_smooth_w3 = smooth_w3_rhs(rep.theta, rep.constants);
    rep.rhs_wasserstein_aggregate = wasserstein_aggregate_rhs(rep.theta, rep.constants);
    rep.rhs_wasserstein_f =
        f_evaluate(rep.theta.theta_u, rep.theta.theta_sigma, rep.theta.theta_nu, rep.constants);
    rep.theta_within_k = rep.theta.total() <= sc.theta_condition_k;

    auto add_verdict = [&](const std::string& name, double lhs, double rhs, double noise) {
        Verdict v;
        v.name = name;
        v.lhs = lhs;
        v.rhs = rhs;
        v.lhs_noise = noise;
        v.pass = lhs <= rhs;
        v.inconclusive = !v.pass && lhs <= rhs + noise;
        rep.verdicts.push_back(v);
    };
    add_verdict("smooth_w3", rep.distances.dw3_lower, rep.rhs_smooth_w3,
                4.0 * rep.distances.dw3_lower_se);
    add_verdict("wasserstein_aggregate", rep.distances.w1, rep.rhs_wasserstein_aggregate,
                4.0 * rep.distances.w1_se_proxy);
    add_verdict("wasserstein_f", rep.distances.w1, rep.rhs_wasserstein_f,
                4.0 * rep.distances.w1_se_proxy);
    add_verdict("characteristic_bound", rep.theta.theta_nu, rep.characteristic_bound_aggregate,
                4.0 * (rep.theta.se_nu + rep.characteristic_bound_se));

    rep.all_ok = true;
    rep.verified_violation = false;
    for (const auto& v : rep.verdicts) {
        if (!v.pass && !v.inconclusive) rep.verified_violation = true;
        rep.all_ok = rep.all_ok && (v.pass || v.inconclusive);
    }
    return rep;
}

SweepResult run_sweep(const Scenario& sc, const std::string& parameter,
                      const std::vector<double>& values, int threads) {
    SweepResult out;
    out.parameter = parameter;
    const nlohmann::json base = sc.to_json();
    for (double v : values) {
        Scenario s = Scenario::from_json(with_override(base, parameter, v));
        BoundReport rep = run_verify(s, threads);
        rep.sweep_value = v;
        out.rows.push_back(std::move(rep));
    }
    return out;
}

std::string SweepResult::to_csv() const {
    std::ostringstream os;
    os << "parameter," << BoundReport::csv_header() << "\n";
    for (const auto& r : rows) os << parameter << "," << r.csv_row() << "\n";
    return os.str();
}

nlohmann::json DistancesResult::to_json(const Scenario& sc) const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["tool_version"] = kVersion;
    j["scenario"] = sc.name;
    j["scenario_hash"] = sc.hash();
    j["seed"] = sc.grid.seed;
    j["grid"] = sc.grid.to_json();
    j["w1"] = distances.w1;
    j["dw3_lower"] = distances.dw3_lower;
    j["n_samples"] = distances.n_samples;
    j["aborted"] = aborted;
    return j;
}

DistancesResult run_distances(const Scenario& sc, int threads) {
    DistancesResult out;
    CoupledRunResult run = simulate_coupled(sc.specX, sc.specXstar, sc.grid, threads, 0, false);
    out.distances = compute_distances(run);
    out.terminal_x = std::move(run.terminal_x);
    out.terminal_xstar = std::move(run.terminal_xstar);
    out.aborted = run.aborted;
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

void write_samples_csv(const std::string& path, const std::vector<double>& x,
                       const std::vector<double>& xstar) {
    std::ostringstream os;
    os << "path_id,X_T,Xstar_T\n";
    for (size_t i = 0; i < x.size(); ++i)
        os << i << ',' << fmt(x[i]) << ',' << fmt(xstar[i]) << "\n";
    write_text_file(path, os.str());
}

void write_samples_binary(const std::string& path, const std::vector<double>& x,
                          const std::vector<double>& xstar) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    const char magic[8] = {'J', 'W', 'B', 'I', 'N', '0', '0', '1'};
    out.write(magic, 8);
    const uint32_t version = 1, n_cols = 2;
    const uint64_t n_rows = x.size();
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&n_cols), 4);
    out.write(reinterpret_cast<const char*>(&n_rows), 8);
    for (size_t i = 0; i < x.size(); ++i) {
        out.write(reinterpret_cast<const char*>(&x[i]), 8);
        out.write(reinterpret_cast<const char*>(&xstar[i]), 8);
    }
}

void write_char_records_csv(const std::string& path, int path_id,
                            const std::vector<CharRecord>& records) {
    std::ostringstream os;
    os << "path_id,t,X,Xstar,du,dsig2,dfm\n";
    for (const auto& r : records)
        os << path_id << ',' << fmt(r.t) << ',' << fmt(r.x) << ',' << fmt(r.xstar) << ','
           << fmt(r.du) << ',' << fmt(r.dsig2) << ',' << fmt(r.dfm) << "\n";
    write_text_file(path, os.str());
}

}  // namespace jumpwass
