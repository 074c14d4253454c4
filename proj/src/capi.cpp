#include "driftflux.h"

#include <cstring>
#include <string>

#include "driftflux/scenario.hpp"
#include "json.hpp"

struct dfx_scenario {
    dfx::Scenario sc;
};

struct dfx_buffer {
    std::string text;
};

namespace {

thread_local std::string g_last_error;

dfx_status set_error(const std::string& msg) {
    g_last_error = msg;
    return DFX_ERROR;
}

dfx_buffer* make_buffer(std::string text) { return new dfx_buffer{std::move(text)}; }

template <typename Fn>
dfx_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const std::exception& e) {
        return set_error(e.what());
    } catch (...) {
        return set_error("unknown error");
    }
}

}  // namespace

extern "C" {

const char* dfx_version(void) { return dfx::dfx_version_string(); }

const char* dfx_last_error(void) { return g_last_error.c_str(); }

dfx_status dfx_scenario_parse(const char* json_text, dfx_scenario** out) {
    if (!json_text || !out) return set_error("dfx_scenario_parse: null argument");
    *out = nullptr;
    return guarded([&]() {
        auto* sc = new dfx_scenario{dfx::parse_scenario(json_text)};
        *out = sc;
        return DFX_OK;
    });
}

dfx_status dfx_scenario_load(const char* path, dfx_scenario** out) {
    if (!path || !out) return set_error("dfx_scenario_load: null argument");
    *out = nullptr;
    return guarded([&]() {
        auto* sc = new dfx_scenario{dfx::load_scenario(path)};
        *out = sc;
        return DFX_OK;
    });
}

void dfx_scenario_free(dfx_scenario* sc) { delete sc; }

dfx_status dfx_scenario_set_seed(dfx_scenario* sc, unsigned long long seed) {
    if (!sc) return set_error("dfx_scenario_set_seed: null scenario");
    sc->sc.seed = seed;
    return DFX_OK;
}

dfx_status dfx_scenario_set_threads(dfx_scenario* sc, int threads) {
    if (!sc) return set_error("dfx_scenario_set_threads: null scenario");
    if (threads < 1) return set_error("dfx_scenario_set_threads: threads must be >= 1");
    sc->sc.threads = threads;
    return DFX_OK;
}

dfx_status dfx_scenario_override_solver(dfx_scenario* sc, int cells, double cfl, double t_end,
                                        int snapshots) {
    if (!sc) return set_error("dfx_scenario_override_solver: null scenario");
    if (cells > 0) sc->sc.solver.cells = cells;
    if (cfl > 0.0) sc->sc.solver.cfl = cfl;
    if (t_end == t_end) sc->sc.solver.t_end = t_end; /* skip NaN */
    if (snapshots >= 0) sc->sc.solver.snapshots = snapshots;
    return DFX_OK;
}

const char* dfx_buffer_data(const dfx_buffer* buf) { return buf ? buf->text.c_str() : ""; }

size_t dfx_buffer_size(const dfx_buffer* buf) { return buf ? buf->text.size() : 0; }

void dfx_buffer_free(dfx_buffer* buf) { delete buf; }

dfx_status dfx_generate(const dfx_scenario* sc, dfx_buffer** csv_out) {
    if (!sc || !csv_out) return set_error("dfx_generate: null argument");
    *csv_out = nullptr;
    return guarded([&]() {
        *csv_out = make_buffer(dfx::run_generate(sc->sc));
        return DFX_OK;
    });
}

dfx_status dfx_simulate(const dfx_scenario* sc, dfx_buffer** csv_out, dfx_buffer** table_out) {
    if (!sc || !csv_out || !table_out) return set_error("dfx_simulate: null argument");
    *csv_out = nullptr;
    *table_out = nullptr;
    return guarded([&]() {
        dfx::SimulateOutput out = dfx::run_simulate(sc->sc);
        *csv_out = make_buffer(std::move(out.csv));
        *table_out = make_buffer(std::move(out.table));
        return DFX_OK;
    });
}

dfx_status dfx_verify(const dfx_scenario* sc, const char* suite, dfx_buffer** report_out) {
    if (!sc || !report_out) return set_error("dfx_verify: null argument");
    *report_out = nullptr;
    return guarded([&]() {
        const dfx::Report rep = dfx::run_verify(sc->sc, suite ? suite : "");
        *report_out = make_buffer(rep.to_json());
        return rep.overall_pass ? DFX_OK : DFX_CHECK_FAILED;
    });
}

dfx_status dfx_compare(const dfx_scenario* sc, dfx_buffer** table_out) {
    if (!sc || !table_out) return set_error("dfx_compare: null argument");
    *table_out = nullptr;
    return guarded([&]() {
        *table_out = make_buffer(dfx::run_compare(sc->sc));
        return DFX_OK;
    });
}

dfx_status dfx_algebra(const char* request_json, dfx_buffer** report_out) {
    if (!report_out) return set_error("dfx_algebra: null output");
    *report_out = nullptr;
    return guarded([&]() {
        const std::string report = dfx::run_algebra(request_json ? request_json : "{}");
        *report_out = make_buffer(report);
        const auto parsed = nlohmann::json::parse(report);
        return parsed.value("overall_pass", false) ? DFX_OK : DFX_CHECK_FAILED;
    });
}

}  // extern "C"
