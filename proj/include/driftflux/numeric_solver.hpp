#ifndef DRIFTFLUX_NUMERIC_SOLVER_HPP
#define DRIFTFLUX_NUMERIC_SOLVER_HPP

#include <stdexcept>
#include <vector>

#include "driftflux/exact_solutions.hpp"
#include "driftflux/model.hpp"

namespace dfx {

struct blow_up_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Uniform 1D grid of cell-centered Riemann states; cell i sits at
// x0 + (i + 1/2) dx.
struct GridField {
    double x0 = 0.0;
    double dx = 0.0;
    std::vector<RiemannState> cells;
    double time = 0.0;

    double center(int i) const { return x0 + (i + 0.5) * dx; }
    int size() const { return static_cast<int>(cells.size()); }
};

struct SolverConfig {
    enum class Boundary { Periodic, ExactInflow };
    double cfl = 0.9;  // in (0, 1]
    Boundary boundary = Boundary::Periodic;
    const ExactSolution* inflow = nullptr;  // required for ExactInflow
    double t_end = 0.0;
    bool check_max_principle = true;
};

GridField init_from_exact(const ExactSolution& sol, double t0, double x0, double x1, int cells);

// One upwind step; dt = cfl*dx/max|V| capped at dt_cap. Throws blow_up_error
// on non-finite states and std::logic_error when the discrete maximum
// principle fails while checking is enabled.
GridField step(const GridField& f, const SolverConfig& cfg, double dt_cap = 1e300);

// Marches to cfg.t_end, the final partial step landing on it exactly.
// Evenly spaced snapshots (including the final state) are appended when
// snapshots > 0.
GridField solve(GridField f, const SolverConfig& cfg, std::vector<GridField>* snaps = nullptr,
                int snapshots = 0);

// Cell-centered L1 norms dx * sum |cell - exact| per component, at f.time.
Vec3 l1_error(const GridField& f, const ExactSolution& sol);

// Discrete integral of the hydrodynamic density e^{r1-r2} r3.
double integral_density_dhc(const GridField& f);

}  // namespace dfx

#endif
