// Batch front end over the driftflux C API.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "driftflux.h"

namespace {

int fail_usage(const std::string& msg) {
    std::cerr << "dfx: " << msg << "\n";
    return 2;
}

struct BufferGuard {
    dfx_buffer* buf = nullptr;
    ~BufferGuard() { dfx_buffer_free(buf); }
    std::string str() const { return buf ? std::string(dfx_buffer_data(buf), dfx_buffer_size(buf)) : ""; }
};

struct ScenarioGuard {
    dfx_scenario* sc = nullptr;
    ~ScenarioGuard() { dfx_scenario_free(sc); }
};

int write_output(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) return fail_usage("cannot open output file '" + path + "'");
    out << text;
    return 0;
}

int load(const std::string& scenario_path, long long seed, int threads, ScenarioGuard& guard) {
    if (scenario_path.empty()) return fail_usage("--scenario is required");
    if (dfx_scenario_load(scenario_path.c_str(), &guard.sc) != DFX_OK)
        return fail_usage(dfx_last_error());
    if (seed >= 0 && dfx_scenario_set_seed(guard.sc, static_cast<unsigned long long>(seed)) != DFX_OK)
        return fail_usage(dfx_last_error());
    if (dfx_scenario_set_threads(guard.sc, threads) != DFX_OK) return fail_usage(dfx_last_error());
    return -1;  // loaded
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driftflux exact solutions, upwind solver and symmetry verification"};
    app.set_version_flag("--version", std::string(dfx_version()));
    app.require_subcommand(1);
    app.fallthrough();

    std::string scenario_path, out_path, report_path, suite = "";
    long long seed = -1;
    int threads = 1;
    app.add_option("--scenario", scenario_path, "scenario JSON file");
    app.add_option("--out", out_path, "output file ('-' for stdout)");
    app.add_option("--seed", seed, "override the scenario seed");
    app.add_option("--threads", threads, "worker threads for grid sampling")->default_val(1);

    auto* cmd_generate = app.add_subcommand("generate", "sample the exact solution to CSV");
    auto* cmd_simulate = app.add_subcommand("simulate", "run the upwind solver against the exact solution");
    int cells = 0;
    double cfl = 0.0, t_end = 0.0;
    int snapshots = -1;
    cmd_simulate->add_option("--cells", cells, "override cell count");
    cmd_simulate->add_option("--cfl", cfl, "override CFL number");
    cmd_simulate->add_option("--t-end", t_end, "override end time");
    cmd_simulate->add_option("--snapshots", snapshots, "number of snapshots in the CSV");
    auto* cmd_verify = app.add_subcommand("verify", "run a verification suite");
    cmd_verify->add_option("--suite", suite,
                           "residual|orbit|flow|gensym|conservation|omega-chain|hamiltonian|all");
    cmd_verify->add_option("--report", report_path, "report JSON output file");
    auto* cmd_compare = app.add_subcommand("compare", "grid-refinement convergence study");
    auto* cmd_algebra = app.add_subcommand("algebra", "symmetry algebra report");
    std::vector<std::string> canonicalize;
    int aut_samples = 100, jacobi_samples = 1000, canon_random = 200;
    cmd_algebra->add_option("--canonicalize", canonicalize,
                            "vectors to canonicalize, e.g. \"D+3Pt+2Px\"");
    cmd_algebra->add_option("--aut-samples", aut_samples, "random automorphism samples");
    cmd_algebra->add_option("--jacobi-samples", jacobi_samples, "random Jacobi triples");
    cmd_algebra->add_option("--canonicalize-random", canon_random, "random canonicalization replays");

    CLI11_PARSE(app, argc, argv);

    if (cmd_generate->parsed()) {
        ScenarioGuard sc;
        if (int rc = load(scenario_path, seed, threads, sc); rc >= 0) return rc;
        BufferGuard csv;
        if (dfx_generate(sc.sc, &csv.buf) != DFX_OK) return fail_usage(dfx_last_error());
        return write_output(csv.str(), out_path);
    }

    if (cmd_simulate->parsed()) {
        ScenarioGuard sc;
        if (int rc = load(scenario_path, seed, threads, sc); rc >= 0) return rc;
        const double t_end_override = cmd_simulate->count("--t-end") ? t_end : std::nan("");
        if (dfx_scenario_override_solver(sc.sc, cells, cfl, t_end_override, snapshots) != DFX_OK)
            return fail_usage(dfx_last_error());
        BufferGuard csv, table;
        if (dfx_simulate(sc.sc, &csv.buf, &table.buf) != DFX_OK) return fail_usage(dfx_last_error());
        std::cout << table.str();
        return write_output(csv.str(), out_path.empty() ? "-" : out_path);
    }

    if (cmd_verify->parsed()) {
        ScenarioGuard sc;
        if (int rc = load(scenario_path, seed, threads, sc); rc >= 0) return rc;
        BufferGuard report;
        const dfx_status st = dfx_verify(sc.sc, suite.empty() ? nullptr : suite.c_str(), &report.buf);
        if (st == DFX_ERROR) return fail_usage(dfx_last_error());
        const std::string text = report.str();
        if (int rc = write_output(text, report_path.empty() ? out_path : report_path); rc != 0)
            return rc;
        return st == DFX_OK ? 0 : 1;
    }

    if (cmd_compare->parsed()) {
        ScenarioGuard sc;
        if (int rc = load(scenario_path, seed, threads, sc); rc >= 0) return rc;
        BufferGuard table;
        if (dfx_compare(sc.sc, &table.buf) != DFX_OK) return fail_usage(dfx_last_error());
        return write_output(table.str(), out_path);
    }

    if (cmd_algebra->parsed()) {
        std::string request = "{\"seed\":" + std::to_string(seed >= 0 ? seed : 1) +
                              ",\"aut_samples\":" + std::to_string(aut_samples) +
                              ",\"jacobi_samples\":" + std::to_string(jacobi_samples) +
                              ",\"canonicalize_random\":" + std::to_string(canon_random);
        if (!canonicalize.empty()) {
            request += ",\"canonicalize\":[";
            for (size_t i = 0; i < canonicalize.size(); ++i) {
                if (i) request += ",";
                request += "\"" + canonicalize[i] + "\"";
            }
            request += "]";
        }
        request += "}";
        BufferGuard report;
        const dfx_status st = dfx_algebra(request.c_str(), &report.buf);
        if (st == DFX_ERROR) return fail_usage(dfx_last_error());
        if (int rc = write_output(report.str(), out_path); rc != 0) return rc;
        return st == DFX_OK ? 0 : 1;
    }

    return fail_usage("no subcommand given");
}
