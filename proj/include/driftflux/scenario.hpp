#ifndef DRIFTFLUX_SCENARIO_HPP
#define DRIFTFLUX_SCENARIO_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftflux/exact_solutions.hpp"
#include "driftflux/verification.hpp"

namespace dfx {

// Malformed scenario input; the message names the offending key.
struct scenario_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Scenario {
    std::string name;
    uint64_t seed = 1;
    int threads = 1;
    std::shared_ptr<const ExactSolution> solution;
    GridSpec grid;
    struct Solver {
        int cells = 128;
        double cfl = 0.9;
        double t_end = 0.0;
        std::string boundary = "exact-inflow";
        int snapshots = 0;
    } solver;
    struct Verify {
        std::string suite = "all";
        double fd_h = 1e-5;
    } verify;
    double tol_residual_analytic = 1e-8;
    double tol_residual_fd = 1e-5;
    std::string canonical_json;  // normalized scenario text used for hashing
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool is_order = false;  // threshold is a lower bound on a fitted order
    bool pass = false;
    std::string note;
};

struct Report {
    std::string tool = "dfx";
    std::string version;
    std::string scenario_name;
    std::string scenario_hash;
    std::string suite;
    std::vector<Check> checks;
    bool overall_pass = true;
    std::string to_json() const;
};

std::string format_double(double v);  // round-trip-exact, 17 significant digits

// Commands (the CLI and the C API route through these).
std::string run_generate(const Scenario& sc);  // CSV: t,x,u,v,w,r1,r2,r3
struct SimulateOutput {
    std::string csv;    // final (and optional snapshot) grid states
    std::string table;  // L1-error summary vs the exact solution
};
SimulateOutput run_simulate(const Scenario& sc);
Report run_verify(const Scenario& sc, const std::string& suite);
std::string run_compare(const Scenario& sc);  // CSV convergence table
std::string run_algebra(const std::string& request_json);

const char* dfx_version_string();

}  // namespace dfx

#endif
