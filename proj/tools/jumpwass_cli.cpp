// Batch front-end over the jumpwass C API: loads a scenario file, runs the
// requested stage, and writes machine-readable reports.
//
// Exit codes: 0 success (verify: all verdicts pass or inconclusive),
// 1 verified bound violation, 2 usage/parse error, 3 runtime failure.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jumpwass/jumpwass.h"

namespace {

struct CommonOpts {
    std::string scenario;
    std::string out_dir = ".";
    std::string format = "json";
    uint64_t seed = 0;
    bool seed_set = false;
    int paths = 0;
    int steps = 0;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--scenario", o.scenario, "scenario JSON file")->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--format", o.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", o.seed, "override scenario seed")
        ->each([&](const std::string&) { o.seed_set = true; });
    cmd->add_option("--paths", o.paths, "override n_paths");
    cmd->add_option("--steps", o.steps, "override n_steps");
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
}

int die(const char* stage, int code) {
    std::fprintf(stderr, "jumpwass %s failed: %s\n", stage, jw_last_error());
    return code;
}

jw_scenario* load(const CommonOpts& o, int* err) {
    jw_scenario* sc = nullptr;
    if (jw_scenario_load(o.scenario.c_str(), &sc) != JW_OK) {
        *err = die("scenario load", 2);
        return nullptr;
    }
    if (o.seed_set) jw_scenario_set_seed(sc, o.seed);
    if (o.paths > 0 && jw_scenario_set_paths(sc, o.paths) != JW_OK) {
        *err = die("override", 2);
        jw_scenario_free(sc);
        return nullptr;
    }
    if (o.steps > 0 && jw_scenario_set_steps(sc, o.steps) != JW_OK) {
        *err = die("override", 2);
        jw_scenario_free(sc);
        return nullptr;
    }
    return sc;
}

int threads_of(const CommonOpts& o) { return o.threads; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jump-diffusion distance-bound verification"};
    app.require_subcommand(1);

    CommonOpts vo, co, so, dopt;
    auto* verify = app.add_subcommand("verify", "simulate, evaluate bounds, check verdicts");
    add_common(verify, vo);

    auto* constants = app.add_subcommand("constants", "estimate flow-moment constants");
    add_common(constants, co);

    auto* sweep = app.add_subcommand("sweep", "verify across values of one scenario parameter");
    add_common(sweep, so);
    std::string sweep_param;
    std::vector<double> sweep_values;
    sweep->add_option("--parameter", sweep_param, "dotted scenario field, e.g. specXstar.sigma.a")
        ->required();
    sweep->add_option("--values", sweep_values, "parameter values")->required()->expected(-1);

    auto* distances = app.add_subcommand("distances", "simulate and report empirical distances");
    add_common(distances, dopt);
    bool binary_samples = false;
    distances->add_flag("--binary-samples", binary_samples,
                        "also write terminal samples in the versioned binary layout");

    CLI11_PARSE(app, argc, argv);

    std::printf("jumpwass %s\n", jw_version());

    if (verify->parsed()) {
        int err = 0;
        jw_scenario* sc = load(vo, &err);
        if (!sc) return err;
        jw_report* rep = nullptr;
        if (jw_run_verify(sc, threads_of(vo), &rep) != JW_OK) {
            jw_scenario_free(sc);
            return die("verify", 3);
        }
        if (jw_report_write(rep, vo.out_dir.c_str(), vo.format.c_str()) != JW_OK) {
            jw_report_free(rep);
            jw_scenario_free(sc);
            return die("report write", 3);
        }
        char* json = nullptr;
        if (jw_report_to_json(rep, &json) == JW_OK) {
            std::printf("%s\n", json);
            jw_string_free(json);
        }
        int ok = 0;
        jw_report_all_ok(rep, &ok);
        jw_report_free(rep);
        jw_scenario_free(sc);
        return ok ? 0 : 1;
    }

    if (constants->parsed()) {
        int err = 0;
        jw_scenario* sc = load(co, &err);
        if (!sc) return err;
        jw_constants* cs = nullptr;
        if (jw_run_constants(sc, threads_of(co), &cs) != JW_OK) {
            jw_scenario_free(sc);
            return die("constants", 3);
        }
        char* json = nullptr;
        jw_constants_to_json(cs, &json);
        std::printf("%s\n", json);
        std::string path = co.out_dir + "/constants.json";
        FILE* f = std::fopen(path.c_str(), "wb");
        if (f) {
            std::fputs(json, f);
            std::fputc('\n', f);
            std::fclose(f);
        }
        jw_string_free(json);
        jw_constants_free(cs);
        jw_scenario_free(sc);
        return 0;
    }

    if (sweep->parsed()) {
        int err = 0;
        jw_scenario* sc = load(so, &err);
        if (!sc) return err;
        const std::string csv = so.out_dir + "/sweep.csv";
        if (jw_run_sweep_csv(sc, sweep_param.c_str(), sweep_values.data(), sweep_values.size(),
                             threads_of(so), csv.c_str()) != JW_OK) {
            jw_scenario_free(sc);
            return die("sweep", 3);
        }
        std::printf("sweep written to %s\n", csv.c_str());
        jw_scenario_free(sc);
        return 0;
    }

    if (distances->parsed()) {
        int err = 0;
        jw_scenario* sc = load(dopt, &err);
        if (!sc) return err;
        jw_report* rep = nullptr;
        if (jw_run_distances(sc, threads_of(dopt), &rep) != JW_OK) {
            jw_scenario_free(sc);
            return die("distances", 3);
        }
        if (jw_report_write(rep, dopt.out_dir.c_str(), dopt.format.c_str()) != JW_OK) {
            jw_report_free(rep);
            jw_scenario_free(sc);
            return die("report write", 3);
        }
        if (binary_samples) {
            const std::string bin = dopt.out_dir + "/samples.bin";
            if (jw_report_write_samples_binary(rep, bin.c_str()) != JW_OK) {
                jw_report_free(rep);
                jw_scenario_free(sc);
                return die("binary samples", 3);
            }
        }
        char* json = nullptr;
        if (jw_report_to_json(rep, &json) == JW_OK) {
            std::printf("%s\n", json);
            jw_string_free(json);
        }
        jw_report_free(rep);
        jw_scenario_free(sc);
        return 0;
    }
    return 2;
}
