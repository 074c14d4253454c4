#include "driftflux/numeric_solver.hpp"

#include <algorithm>
#include <cmath>

namespace dfx {

GridField init_from_exact(const ExactSolution& sol, double t0, double x0, double x1, int cells) {
    if (cells < 4) throw std::invalid_argument("init_from_exact: need at least 4 cells");
    GridField f;
    f.x0 = x0;
    f.dx = (x1 - x0) / cells;
    f.time = t0;
    f.cells.resize(static_cast<size_t>(cells));
    for (int i = 0; i < cells; ++i) f.cells[static_cast<size_t>(i)] = sol.eval_riemann(t0, f.center(i));
    return f;
}

namespace {

RiemannState ghost(const GridField& f, const SolverConfig& cfg, int i) {
    const int n = f.size();
    if (cfg.boundary == SolverConfig::Boundary::Periodic) {
        int k = ((i % n) + n) % n;
        return f.cells[static_cast<size_t>(k)];
    }
    if (!cfg.inflow) throw std::invalid_argument("solver: exact-inflow boundary needs a solution");
    return cfg.inflow->eval_riemann(f.time, f.center(i));
}

double comp(const RiemannState& r, int k) { return k == 0 ? r.r1 : (k == 1 ? r.r2 : r.r3); }
double& comp(RiemannState& r, int k) { return k == 0 ? r.r1 : (k == 1 ? r.r2 : r.r3); }

}  // namespace

GridField step(const GridField& f, const SolverConfig& cfg, double dt_cap) {
    if (f.size() < 4) throw std::invalid_argument("step: need at least 4 cells");
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw std::invalid_argument("step: cfl must be in (0,1]");

    double vmax = 0.0;
    for (const auto& c : f.cells) {
        const Vec3 V = char_speeds(c.r1, c.r2);
        for (double v : V) vmax = std::max(vmax, std::abs(v));
    }
    if (!std::isfinite(vmax)) throw blow_up_error("step: non-finite characteristic speed");
    if (vmax == 0.0) vmax = 1.0;
    const double dt = std::min(cfg.cfl * f.dx / vmax, dt_cap);

    GridField out = f;
    out.time = f.time + dt;
    const int n = f.size();
    const RiemannState left = ghost(f, cfg, -1);
    const RiemannState right = ghost(f, cfg, n);
    for (int i = 0; i < n; ++i) {
        const RiemannState& c = f.cells[static_cast<size_t>(i)];
        const RiemannState& lm = (i == 0) ? left : f.cells[static_cast<size_t>(i - 1)];
        const RiemannState& rp = (i == n - 1) ? right : f.cells[static_cast<size_t>(i + 1)];
        const Vec3 V = char_speeds(c.r1, c.r2);
        RiemannState& nc = out.cells[static_cast<size_t>(i)];
        for (int k = 0; k < 3; ++k) {
            const double nu = V[static_cast<size_t>(k)] * dt / f.dx;
            double val;
            if (nu >= 0.0) val = comp(c, k) - nu * (comp(c, k) - comp(lm, k));
            else val = comp(c, k) - nu * (comp(rp, k) - comp(c, k));
            if (!std::isfinite(val)) throw blow_up_error("step: non-finite state produced");
            if (cfg.check_max_principle) {
                const double lo = std::min({comp(lm, k), comp(c, k), comp(rp, k)});
                const double hi = std::max({comp(lm, k), comp(c, k), comp(rp, k)});
                const double slack = 1e-12 * (1.0 + std::abs(hi) + std::abs(lo));
                if (val < lo - slack || val > hi + slack)
                    throw std::logic_error("step: discrete maximum principle violated");
            }
            comp(nc, k) = val;
        }
    }
    return out;
}

GridField solve(GridField f, const SolverConfig& cfg, std::vector<GridField>* snaps, int snapshots) {
    if (cfg.t_end < f.time) throw std::invalid_argument("solve: t_end before initial time");
    const double t_begin = f.time;
    const double horizon = cfg.t_end - t_begin;
    int next_snap = 1;
    if (snaps && snapshots > 0) snaps->push_back(f);
    while (f.time < cfg.t_end - 1e-14 * (1.0 + std::abs(cfg.t_end))) {
        f = step(f, cfg, cfg.t_end - f.time);
        if (snaps && snapshots > 0) {
            while (next_snap <= snapshots &&
                   f.time >= t_begin + horizon * next_snap / snapshots - 1e-12) {
                snaps->push_back(f);
                ++next_snap;
            }
        }
    }
    f.time = cfg.t_end;
    return f;
}

Vec3 l1_error(const GridField& f, const ExactSolution& sol) {
    Vec3 err{0, 0, 0};
    for (int i = 0; i < f.size(); ++i) {
        const RiemannState ex = sol.eval_riemann(f.time, f.center(i));
        const RiemannState& c = f.cells[static_cast<size_t>(i)];
        err[0] += std::abs(c.r1 - ex.r1);
        err[1] += std::abs(c.r2 - ex.r2);
        err[2] += std::abs(c.r3 - ex.r3);
    }
    for (double& e : err) e *= f.dx;
    return err;
}

double integral_density_dhc(const GridField& f) {
    double s = 0.0;
    for (const auto& c : f.cells) s += std::exp(c.r1 - c.r2) * c.r3;
    return s * f.dx;
}

}  // namespace dfx
