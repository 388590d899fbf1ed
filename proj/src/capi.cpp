#include "jumpwass/jumpwass.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include "pipeline.hpp"
#include "smoothing.hpp"

using namespace jumpwass;

namespace {

thread_local std::string g_last_error;

jw_status fail(jw_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

jw_status classify(const std::exception& e) {
    const std::string what = e.what();
    if (dynamic_cast<const std::invalid_argument*>(&e))
        return fail(JW_ERR_INVALID_ARGUMENT, what);
    if (what.find("parse") != std::string::npos || what.find("scenario") != std::string::npos)
        return fail(JW_ERR_PARSE, what);
    if (what.find("cannot open") != std::string::npos ||
        what.find("cannot write") != std::string::npos)
        return fail(JW_ERR_IO, what);
    return fail(JW_ERR_NUMERIC, what);
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct jw_scenario {
    Scenario sc;
};
struct jw_report {
    BoundReport rep;
    DistancesResult dist;   // populated by jw_run_distances
    bool distances_only = false;
    Scenario sc;
    std::vector<double> term_x, term_xs;
};
struct jw_constants {
    ConstantSet c;
};

extern "C" {

const char* jw_version(void) { return kVersion; }
const char* jw_last_error(void) { return g_last_error.c_str(); }
void jw_string_free(char* s) { std::free(s); }

jw_status jw_scenario_parse(const char* json_text, jw_scenario** out) {
    if (!json_text || !out) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    try {
        auto j = nlohmann::json::parse(json_text);
        auto* s = new jw_scenario{Scenario::from_json(j)};
        *out = s;
        return JW_OK;
    } catch (const nlohmann::json::parse_error& e) {
        return fail(JW_ERR_PARSE, e.what());
    } catch (const std::exception& e) {
        return classify(e);
    }
}

jw_status jw_scenario_load(const char* path, jw_scenario** out) {
    if (!path || !out) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    try {
        *out = new jw_scenario{Scenario::load_file(path)};
        return JW_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

void jw_scenario_free(jw_scenario* s) { delete s; }

jw_status jw_scenario_to_json(const jw_scenario* s, char** out) {
    if (!s || !out) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    *out = dup_string(s->sc.to_json().dump(2));
    return *out ? JW_OK : fail(JW_ERR_INTERNAL, "allocation failed");
}

jw_status jw_scenario_set_seed(jw_scenario* s, uint64_t seed) {
    if (!s) return fail(JW_ERR_INVALID_ARGUMENT, "null scenario");
    s->sc.grid.seed = seed;
    return JW_OK;
}

jw_status jw_scenario_set_paths(jw_scenario* s, int n_paths) {
    if (!s || n_paths < 1) return fail(JW_ERR_INVALID_ARGUMENT, "n_paths must be >= 1");
    s->sc.grid.n_paths = n_paths;
    if (s->sc.grid.theta_paths > n_paths) s->sc.grid.theta_paths = n_paths;
    return JW_OK;
}

jw_status jw_scenario_set_steps(jw_scenario* s, int n_steps) {
    if (!s || n_steps < 1) return fail(JW_ERR_INVALID_ARGUMENT, "n_steps must be >= 1");
    s->sc.grid.n_steps = n_steps;
    if (s->sc.grid.fm_nodes > n_steps) s->sc.grid.fm_nodes = n_steps;
    return JW_OK;
}

jw_status jw_run_verify(const jw_scenario* s, int threads, jw_report** out) {
    if (!s || !out) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    try {
        auto* r = new jw_report;
        r->sc = s->sc;
        r->rep = run_verify(s->sc, threads);
        *out = r;
        return JW_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

jw_status jw_run_distances(const jw_scenario* s, int threads, jw_report** out) {
    if (!s || !out) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    try {
        auto* r = new jw_report;
        r->sc = s->sc;
        r->distances_only = true;
        r->dist = run_distances(s->sc, threads);
        r->rep.scenario_name = s->sc.name;
        r->rep.scenario_hash = s->sc.hash();
        r->rep.seed = s->sc.grid.seed;
        r->rep.distances = r->dist.distances;
        r->rep.aborted_paths = r->dist.aborted;
        r->term_x = r->dist.terminal_x;
        r->term_xs = r->dist.terminal_xstar;
        *out = r;
        return JW_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

jw_status jw_run_constants(const jw_scenario* s, int threads, jw_constants** out) {
    if (!s || !out) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    try {
        *out = new jw_constants{run_constants(s->sc, threads)};
        return JW_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

jw_status jw_run_sweep_csv(const jw_scenario* s, const char* parameter, const double* values,
                           size_t n_values, int threads, const char* csv_out_path) {
    if (!s || !parameter || !values || !csv_out_path || n_values == 0)
        return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    try {
        SweepResult res = run_sweep(s->sc, parameter,
                                    std::vector<double>(values, values + n_values), threads);
        write_text_file(csv_out_path, res.to_csv());
        return JW_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

void jw_report_free(jw_report* r) { delete r; }

jw_status jw_report_to_json(const jw_report* r, char** out) {
    if (!r || !out) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    const nlohmann::json j =
        r->distances_only ? r->dist.to_json(r->sc) : r->rep.to_json();
    *out = dup_string(j.dump(2));
    return *out ? JW_OK : fail(JW_ERR_INTERNAL, "allocation failed");
}

jw_status jw_report_to_csv(const jw_report* r, char** out) {
    if (!r || !out) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    *out = dup_string(BoundReport::csv_header() + "\n" + r->rep.csv_row() + "\n");
    return *out ? JW_OK : fail(JW_ERR_INTERNAL, "allocation failed");
}

jw_status jw_report_all_ok(const jw_report* r, int* out) {
    if (!r || !out) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    *out = r->distances_only ? 1 : (r->rep.all_ok ? 1 : 0);
    return JW_OK;
}

jw_status jw_report_get(const jw_report* r, const char* field, double* out) {
    if (!r || !field || !out) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    const std::string f = field;
    const BoundReport& rep = r->rep;
    if (f == "w1") *out = rep.distances.w1;
    else if (f == "dw3_lower") *out = rep.distances.dw3_lower;
    else if (f == "theta_u") *out = rep.theta.theta_u;
    else if (f == "theta_sigma") *out = rep.theta.theta_sigma;
    else if (f == "theta_nu") *out = rep.theta.theta_nu;
    else if (f == "rhs_smooth_w3") *out = rep.rhs_smooth_w3;
    else if (f == "rhs_wasserstein_f") *out = rep.rhs_wasserstein_f;
    else if (f == "rhs_wasserstein_aggregate") *out = rep.rhs_wasserstein_aggregate;
    else if (f == "characteristic_bound_aggregate") *out = rep.characteristic_bound_aggregate;
    else if (f == "aborted") *out = rep.aborted_paths;
    else return fail(JW_ERR_INVALID_ARGUMENT, "unknown report field: " + f);
    return JW_OK;
}

jw_status jw_report_write(const jw_report* r, const char* dir, const char* format) {
    if (!r || !dir || !format) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    const std::string fmt = format;
    if (fmt != "json" && fmt != "csv")
        return fail(JW_ERR_INVALID_ARGUMENT, "format must be json or csv");
    try {
        std::filesystem::create_directories(dir);
        const std::string base = std::string(dir) + "/" + r->rep.scenario_name;
        if (r->distances_only) {
            write_text_file(base + "_distances.json", r->dist.to_json(r->sc).dump(2) + "\n");
            write_samples_csv(base + "_samples.csv", r->term_x, r->term_xs);
            return JW_OK;
        }
        if (fmt == "json")
            write_text_file(base + "_report.json", r->rep.to_json().dump(2) + "\n");
        write_text_file(base + "_report.csv",
                        BoundReport::csv_header() + "\n" + r->rep.csv_row() + "\n");
        return JW_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

jw_status jw_report_write_samples_binary(const jw_report* r, const char* path) {
    if (!r || !path) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    if (!r->distances_only)
        return fail(JW_ERR_UNSUPPORTED, "binary samples are produced by distances runs");
    try {
        write_samples_binary(path, r->term_x, r->term_xs);
        return JW_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

void jw_constants_free(jw_constants* c) { delete c; }

jw_status jw_constants_to_json(const jw_constants* c, char** out) {
    if (!c || !out) return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    *out = dup_string(c->c.to_json().dump(2));
    return *out ? JW_OK : fail(JW_ERR_INTERNAL, "allocation failed");
}

jw_status jw_frullani_tv(double alpha, double beta, double* out) {
    if (!out) return fail(JW_ERR_INVALID_ARGUMENT, "null out");
    try {
        *out = frullani_tv(alpha, beta);
        return JW_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

jw_status jw_cardan_minimize(double d0, double d1, double d2, double d3, double* alpha_star,
                             double* min_value, double* bound) {
    try {
        const CardanResult res = cardan_minimize({d0, d1, d2, d3});
        if (alpha_star) *alpha_star = res.alpha_star;
        if (min_value) *min_value = res.min_value;
        if (bound) *bound = res.bound_min3b;
        return JW_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

jw_status jw_f_evaluate(double theta_u, double theta_sigma, double theta_nu, double a1, double a2,
                        double b1, double b2, double b3, double* out) {
    if (!out) return fail(JW_ERR_INVALID_ARGUMENT, "null out");
    try {
        ConstantSet c;
        c.A1 = a1;
        c.A2 = a2;
        c.B1 = b1;
        c.B2 = b2;
        c.B3 = b3;
        c.C1 = gaussian_cn(1);
        c.C2 = gaussian_cn(2);
        c.C3 = gaussian_cn(3);
        *out = f_evaluate(theta_u, theta_sigma, theta_nu, c);
        return JW_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

jw_status jw_fm_discrete(const double* loc_a, const double* w_a, size_t n_a, const double* loc_b,
                         const double* w_b, size_t n_b, double* out) {
    if (!out || (n_a && (!loc_a || !w_a)) || (n_b && (!loc_b || !w_b)))
        return fail(JW_ERR_INVALID_ARGUMENT, "null argument");
    try {
        std::vector<Atom> atoms_a, atoms_b;
        for (size_t i = 0; i < n_a; ++i) atoms_a.push_back({loc_a[i], w_a[i]});
        for (size_t i = 0; i < n_b; ++i) atoms_b.push_back({loc_b[i], w_b[i]});
        *out = fm_discrete(DiscreteMeasure(std::move(atoms_a)), DiscreteMeasure(std::move(atoms_b)));
        return JW_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

jw_status jw_w1_samples(const double* a, size_t n_a, const double* b, size_t n_b, double* out) {
    if (!out || !a || !b || n_a == 0 || n_b == 0)
        return fail(JW_ERR_INVALID_ARGUMENT, "null or empty samples");
    try {
        *out = w1_empirical(SampleSet(std::vector<double>(a, a + n_a)),
                            SampleSet(std::vector<double>(b, b + n_b)));
        return JW_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

}  // extern "C"
