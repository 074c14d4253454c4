#include <cmath>
#include <limits>

#include "doctest.h"
#include "driftflux/numeric_solver.hpp"
#include "driftflux/verification.hpp"

using namespace dfx;

namespace {

ExactSolution quad_regular() {
    TelegraphFn f;
    f.add_quad(1.0);
    return ExactSolution(RegularSolution(f, MonotoneFn::identity(), {}, {0.6, -1.0}));
}

ExactSolution translating_bump(double u0) {
    return ExactSolution(UltraSingularSolution(u0, 0.3, MonotoneFn::tanh()));
}

}  // namespace

TEST_CASE("constant fields are fixed points of the upwind step") {
    GridField f;
    f.x0 = -1.0;
    f.dx = 2.0 / 64;
    f.cells.assign(64, RiemannState{0.4, -0.2, 1.7});
    SolverConfig cfg;
    cfg.boundary = SolverConfig::Boundary::Periodic;
    const GridField g = step(f, cfg);
    for (const auto& c : g.cells) {
        CHECK(c.r1 == 0.4);
        CHECK(c.r2 == -0.2);
        CHECK(c.r3 == 1.7);
    }
    CHECK(g.time > f.time);
}

TEST_CASE("cfl cap honored and zero-length evolution is identity") {
    GridField f = init_from_exact(translating_bump(1.0), 0.0, -1.0, 1.0, 64);
    SolverConfig cfg;
    cfg.cfl = 0.8;
    cfg.boundary = SolverConfig::Boundary::Periodic;
    const GridField one = step(f, cfg);
    double vmax = 0.0;
    for (const auto& c : f.cells)
        for (double v : char_speeds(c.r1, c.r2)) vmax = std::max(vmax, std::abs(v));
    CHECK(one.time - f.time == doctest::Approx(0.8 * f.dx / vmax));

    cfg.t_end = f.time;
    const GridField same = solve(f, cfg);
    for (int i = 0; i < f.size(); ++i)
        CHECK(same.cells[static_cast<size_t>(i)].r3 == f.cells[static_cast<size_t>(i)].r3);
}

TEST_CASE("bump translates at speed r1+r2 and converges in L1") {
    // constant (r1, r2), bump in r3: exact solution w = W(x - u t)
    const double u0 = 1.0;
    const ExactSolution sol = translating_bump(u0);
    std::vector<double> dxs, errs;
    for (int cells : {64, 128, 256}) {
        GridField f = init_from_exact(sol, 0.0, -1.0, 1.0, cells);
        SolverConfig cfg;
        cfg.cfl = 0.9;
        cfg.boundary = SolverConfig::Boundary::ExactInflow;
        cfg.inflow = &sol;
        cfg.t_end = 0.4;
        const GridField g = solve(f, cfg);
        const Vec3 err = l1_error(g, sol);
        CHECK(err[0] < 1e-12);  // r1, r2 stay exactly constant
        CHECK(err[1] < 1e-12);
        dxs.push_back(g.dx);
        errs.push_back(err[2]);
    }
    CHECK(errs[2] < errs[0]);
    const double order = fit_order(dxs, errs);
    CHECK(order > 0.5);  // smooth advection at first order
}

TEST_CASE("upwind converges on the regular solution at first order") {
    const ExactSolution sol = quad_regular();
    std::vector<double> dxs;
    std::array<std::vector<double>, 3> errs;
    for (int cells : {128, 256, 512}) {
        GridField f = init_from_exact(sol, 1.0, -1.0, 1.0, cells);
        SolverConfig cfg;
        cfg.cfl = 0.9;
        cfg.boundary = SolverConfig::Boundary::ExactInflow;
        cfg.inflow = &sol;
        cfg.t_end = 1.5;
        const GridField g = solve(f, cfg);
        CHECK(g.time == 1.5);
        const Vec3 err = l1_error(g, sol);
        dxs.push_back(g.dx);
        for (int k = 0; k < 3; ++k) errs[static_cast<size_t>(k)].push_back(err[static_cast<size_t>(k)]);
    }
    for (int k = 0; k < 3; ++k) {
        const double order = fit_order(dxs, errs[static_cast<size_t>(k)]);
        CHECK(order > 0.8);
        CHECK(order < 1.2);
    }
}

TEST_CASE("discrete conservation drift of the DHC integral is O(dx)") {
    // periodic smooth profile, genuinely varying speeds
    auto make_field = [](int cells) {
        GridField f;
        f.x0 = -1.0;
        f.dx = 2.0 / cells;
        f.time = 0.0;
        f.cells.resize(static_cast<size_t>(cells));
        for (int i = 0; i < cells; ++i) {
            const double x = f.center(i);
            f.cells[static_cast<size_t>(i)] = {0.2 * std::sin(M_PI * x), -0.1 * std::cos(M_PI * x),
                                               1.0 + 0.5 * std::sin(M_PI * x)};
        }
        return f;
    };
    SolverConfig cfg;
    cfg.cfl = 0.9;
    cfg.boundary = SolverConfig::Boundary::Periodic;
    cfg.t_end = 0.5;
    std::vector<double> drifts;
    for (int cells : {64, 128, 256}) {
        GridField f = make_field(cells);
        const double before = integral_density_dhc(f);
        const GridField g = solve(f, cfg);
        drifts.push_back(std::abs(integral_density_dhc(g) - before) / cfg.t_end);
    }
    CHECK(drifts[1] < drifts[0]);
    CHECK(drifts[2] < drifts[1]);
    CHECK(drifts[0] / drifts[2] > 2.0);  // at least first-order decay over 4x refinement
}

TEST_CASE("max principle holds per component per step") {
    GridField f = init_from_exact(quad_regular(), 1.0, -1.0, 1.0, 64);
    SolverConfig cfg;
    cfg.cfl = 1.0;
    cfg.boundary = SolverConfig::Boundary::ExactInflow;
    const ExactSolution sol = quad_regular();
    cfg.inflow = &sol;
    cfg.check_max_principle = true;
    GridField g = f;
    for (int s = 0; s < 20; ++s) g = step(g, cfg);  // throws std::logic_error on violation
    CHECK(g.time > f.time);
}

TEST_CASE("identical fields have zero L1 error and errors are symmetric in magnitude") {
    const ExactSolution sol = translating_bump(0.5);
    GridField f = init_from_exact(sol, 0.0, -1.0, 1.0, 64);
    const Vec3 e = l1_error(f, sol);
    for (double v : e) CHECK(v < 1e-14);

    // shifted constant-gradient field: L1 error equals |shift| * domain length
    GridField lin;
    lin.x0 = 0.0;
    lin.dx = 1.0 / 64;
    lin.time = 0.0;
    lin.cells.resize(64);
    for (int i = 0; i < 64; ++i) lin.cells[static_cast<size_t>(i)] = {0.0, 0.0, lin.center(i)};
    GridField shifted = lin;
    for (auto& c : shifted.cells) c.r3 += 0.25;
    double sum = 0.0;
    for (int i = 0; i < 64; ++i)
        sum += std::abs(shifted.cells[static_cast<size_t>(i)].r3 -
                        lin.cells[static_cast<size_t>(i)].r3);
    CHECK(sum * lin.dx == doctest::Approx(0.25 * 1.0));
}

TEST_CASE("solver guards") {
    GridField f;
    f.x0 = 0;
    f.dx = 0.1;
    f.cells.assign(8, RiemannState{});
    SolverConfig cfg;
    cfg.cfl = 1.5;
    CHECK_THROWS_AS(step(f, cfg), std::invalid_argument);
    cfg.cfl = 0.9;
    f.cells[3].r1 = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(step(f, cfg), blow_up_error);
}
