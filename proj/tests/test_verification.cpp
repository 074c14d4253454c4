#include <cmath>
#include <random>

#include "doctest.h"
#include "driftflux/verification.hpp"

using namespace dfx;

namespace {

ExactSolution quad_regular(MonotoneFn W = MonotoneFn::identity()) {
    TelegraphFn f;
    f.add_quad(1.0);
    return ExactSolution(RegularSolution(f, W, {}, {0.6, -1.0}));
}

ExactSolution singular_solution() {
    return ExactSolution(
        SingularSolution(+1, 0.3, ThetaFn::polynomial({0.0, 0.0, 0.25}), MonotoneFn::exp()));
}

const Window kWin{1.1, 1.9, -0.8, 0.8};

}  // namespace

TEST_CASE("orbit transform: identity, reflection, galilean examples") {
    const Sampler base = make_sampler(quad_regular());
    {
        const Sampler same = orbit_transform(base, GroupParams{});
        const UVWState a = base.state(1.5, 0.2);
        const UVWState b = same.state(1.5, 0.2);
        CHECK(a.u == doctest::Approx(b.u));
        CHECK(a.v == doctest::Approx(b.v));
        CHECK(a.w == doctest::Approx(b.w));
    }
    {
        GroupParams refl;
        refl.T1 = -1.0;  // (t,x) -> (-t,-x)
        const Sampler tr = orbit_transform(base, refl);
        CHECK(max_fd_residual(tr, {-1.9, -1.1, -0.8, 0.8}, 5, 1e-5) < 1e-6);
    }
    {
        // Galilean boost of the ultra-singular profile: u = 1, w = W(x - t)
        const Sampler ultra = make_sampler(ExactSolution(
            UltraSingularSolution(0.0, 0.0, MonotoneFn::identity())));
        GroupParams g;
        g.U0 = 1.0;
        const Sampler tr = orbit_transform(ultra, g);
        const UVWState s = tr.state(2.0, 0.7);
        CHECK(s.u == doctest::Approx(1.0));
        CHECK(s.w == doctest::Approx(0.7 - 2.0));
    }
}

TEST_CASE("orbit transform preserves residuals for random group elements") {
    const Sampler base = make_sampler(quad_regular(MonotoneFn::tanh()));
    std::mt19937_64 rng(55);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 10; ++i) {
        GroupParams g;
        g.T1 = (u01() < 0.5 ? -1 : 1) * (0.5 + 1.5 * u01());
        g.T0 = -0.5 + u01();
        g.X0 = -0.5 + u01();
        g.U0 = -0.5 + u01();
        g.V0 = -0.5 + u01();
        g.Wmap = MonotoneFn::affine(0.5 + u01(), -0.5 + u01());
        const Sampler tr = orbit_transform(base, g);
        for (int k = 0; k < 10; ++k) {
            const double t = kWin.t0 + (kWin.t1 - kWin.t0) * u01();
            const double x = kWin.x0 + (kWin.x1 - kWin.x0) * u01();
            const double tt = g.T1 * t + g.T0;
            const double xx = g.T1 * x + g.T1 * g.U0 * t + g.X0;
            const Vec3 r = fd_residual(tr, tt, xx, 1e-5);
            for (double v : r) CHECK(std::abs(v) < 1e-5);
            // analytic jets transform exactly
            const Vec3 ra = residual_uvw(tr.jet(tt, xx).to_jet_point());
            for (double v : ra) CHECK(std::abs(v) < 1e-10);
        }
    }
}

TEST_CASE("orbit transform satisfies the group law") {
    const Sampler base = make_sampler(quad_regular());
    GroupParams g1;
    g1.T1 = 1.5;
    g1.T0 = 0.2;
    g1.X0 = -0.3;
    g1.U0 = 0.4;
    g1.V0 = 0.1;
    g1.Wmap = MonotoneFn::affine(2.0, -0.5);
    GroupParams g2;
    g2.T1 = -0.8;
    g2.T0 = -0.1;
    g2.X0 = 0.6;
    g2.U0 = -0.2;
    g2.V0 = 0.3;
    g2.Wmap = MonotoneFn::affine(0.5, 0.25);
    const Sampler two = orbit_transform(orbit_transform(base, g1), g2);
    const Sampler one = orbit_transform(base, compose(g2, g1));
    std::mt19937_64 rng(56);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 30; ++i) {
        const double t = kWin.t0 + (kWin.t1 - kWin.t0) * u01();
        const double x = kWin.x0 + (kWin.x1 - kWin.x0) * u01();
        const double t1 = g1.T1 * t + g1.T0;
        const double x1 = g1.T1 * x + g1.T1 * g1.U0 * t + g1.X0;
        const double tt = g2.T1 * t1 + g2.T0;
        const double xx = g2.T1 * x1 + g2.T1 * g2.U0 * t1 + g2.X0;
        const UVWState a = two.state(tt, xx);
        const UVWState b = one.state(tt, xx);
        CHECK(std::abs(a.u - b.u) < 1e-10);
        CHECK(std::abs(a.v - b.v) < 1e-10);
        CHECK(std::abs(a.w - b.w) < 1e-10);
    }
}

TEST_CASE("flow order: single generators are exactly invariant") {
    const Sampler base = make_sampler(quad_regular());
    const std::vector<double> eps{1e-2, 3e-3, 1e-3, 3e-4};
    for (const auto& q : {FlowGenerator{1, 0, 0, 0, 0, {}},      // D
                          FlowGenerator{0, 1, 0, 0, 0, {}},      // G
                          FlowGenerator{0, 0, 1, 0, 0, {}},      // Pt
                          FlowGenerator{0, 0, 0, 1, 0, {}},      // Px
                          FlowGenerator{0, 0, 0, 0, 1, {}},      // Pv
                          FlowGenerator{0, 0, 0, 0, 0, {0, 1}}}  // W(w)
    ) {
        const FlowOrderResult r = flow_order_test(base, q, eps, kWin, 8);
        CHECK(r.exact_invariant);
    }
}

TEST_CASE("flow order: mixing D and G exposes the second-order Euler defect") {
    const std::vector<double> eps{1e-2, 3e-3, 1e-3, 3e-4};
    {
        const Sampler base = make_sampler(quad_regular());
        const FlowGenerator q{1, 1, 0, 0, 1, {0, 1}};  // D + G + Pv + W(w)
        const FlowOrderResult r = flow_order_test(base, q, eps, kWin, 8);
        CHECK_FALSE(r.exact_invariant);
        CHECK_FALSE(r.inconclusive);
        CHECK(r.exponent == doctest::Approx(2.0).epsilon(0.1));
    }
    {
        const Sampler base = make_sampler(singular_solution());
        const FlowGenerator q{1, 0.7, 0, 0, 0, {}};  // D + 0.7 G
        const FlowOrderResult r = flow_order_test(base, q, eps, kWin, 8);
        CHECK(r.exponent == doctest::Approx(2.0).epsilon(0.1));
    }
}

TEST_CASE("subsystem boost flow perturbation has a second-order defect") {
    // the genuinely nonlinear symmetry of the two-equation subsystem
    const std::vector<double> eps{1e-2, 3e-3, 1e-3, 3e-4};
    const Sampler base = make_sampler(quad_regular());
    const FlowOrderResult r = subsystem_boost_flow_order(base, eps, kWin, 8);
    CHECK_FALSE(r.exact_invariant);
    CHECK(r.exponent == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("gensym determining residual vanishes for the family") {
    std::mt19937_64 rng(57);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto rnd = [&](double a, double b) { return a + (b - a) * u01(); };
    TelegraphFn f;
    f.add_exp_mode(0.4, +1, 1.0);
    f.add_quad(0.3);
    const BiPoly w0 = BiPoly::w0(), w1 = BiPoly::w1();

    std::vector<GenSymCharacteristic> family;
    family.push_back(GenSymCharacteristic::D_check());
    family.push_back(GenSymCharacteristic::G1_check());
    family.push_back(GenSymCharacteristic::G2_check());
    family.push_back(GenSymCharacteristic::P_check(to_riemann_form(f)));
    family.push_back(GenSymCharacteristic::W_check(w0 * w1 + 0.5 * (w1 * w1)));
    family.push_back(GenSymCharacteristic::W_check(w0));  // point symmetry W(omega0)
    family.push_back(GenSymCharacteristic::W_check(w1));  // genuine generalized symmetry

    for (const auto& c : family) {
        for (int s = 0; s < 1000; ++s) {
            JetPoint j;
            j.t = rnd(-1, 1);
            j.x = rnd(-1, 1);
            j.value = {rnd(-0.8, 0.8), rnd(-0.8, 0.8), rnd(-0.8, 0.8)};
            j.dx = {rnd(-1, 1), rnd(-1, 1), rnd(-1, 1)};
            const Vec3 r = gensym_determining_residual(c, j);
            for (double v : r) CHECK(std::abs(v) < 1e-10);
        }
    }

    // a non-symmetry characteristic leaves a visible residual
    GenSymCharacteristic not_sym;
    not_sym.omega = BiPoly::constant(1.0);
    not_sym.gamma = 0.0;
    JetPoint j;
    j.value = {0.2, -0.1, 0.4};
    j.dx = {0.5, 0.2, -0.7};
    not_sym.zeta1 = 0.3;  // zeta1 without the matching transport terms
    bool nonzero = false;
    // zeta1 alone is a symmetry (G2-type direction); break it with gamma-less x-dependence
    GenSymCharacteristic broken;
    broken.phi = to_riemann_form(f);
    broken.gamma = 0.0;
    broken.zeta1 = 0.0;
    broken.zeta2 = 0.0;
    // use Phi that does NOT solve the equation: swap to adjoint form
    broken.phi = adjoint_form(f);
    const Vec3 r = gensym_determining_residual(broken, j);
    for (double v : r) nonzero = nonzero || std::abs(v) > 1e-6;
    CHECK(nonzero);
    (void)not_sym;
}

TEST_CASE("gensym characteristics perturb solutions into solutions at first order") {
    // independent oracle for the determining machinery: push the solution
    // graph by eps * eta and measure the PDE residual of the perturbed field
    // by finite differences; a symmetry leaves an O(eps^2) defect only
    const ExactSolution sol = quad_regular(MonotoneFn::tanh());
    auto riemann_field = [&](const GenSymCharacteristic& c, double e, double t, double x) {
        const JetPoint j = jet_uvw_to_riemann(sol.jet(t, x).to_jet_point());
        const Vec3 eta = c.eval(j);
        return RiemannState{j.value[0] + e * eta[0], j.value[1] + e * eta[1],
                            j.value[2] + e * eta[2]};
    };
    auto max_res = [&](const GenSymCharacteristic& c, double e) {
        const double h = 1e-4;
        double worst = 0.0;
        for (double t : {1.2, 1.5, 1.8})
            for (double x : {-0.5, 0.0, 0.5}) {
                const RiemannState mid = riemann_field(c, e, t, x);
                const RiemannState tp = riemann_field(c, e, t + h, x);
                const RiemannState tm = riemann_field(c, e, t - h, x);
                const RiemannState xp = riemann_field(c, e, t, x + h);
                const RiemannState xm = riemann_field(c, e, t, x - h);
                JetPoint j;
                j.value = {mid.r1, mid.r2, mid.r3};
                j.dt = {(tp.r1 - tm.r1) / (2 * h), (tp.r2 - tm.r2) / (2 * h),
                        (tp.r3 - tm.r3) / (2 * h)};
                j.dx = {(xp.r1 - xm.r1) / (2 * h), (xp.r2 - xm.r2) / (2 * h),
                        (xp.r3 - xm.r3) / (2 * h)};
                const Vec3 r = residual_riemann(j);
                for (double v : r) worst = std::max(worst, std::abs(v));
            }
        return worst;
    };

    TelegraphFn f;
    f.add_exp_mode(0.4, +1, 1.0);
    const std::vector<double> eps{3e-2, 1e-2, 3e-3};
    {
        // the third equation is linear in r3 and omega^1 is advected exactly,
        // so W(omega^1) perturbations stay solutions to every order: the
        // measured residual never rises above the FD floor
        const auto c = GenSymCharacteristic::W_check(BiPoly::w1());
        for (double e : eps) CHECK(max_res(c, e) < 1e-6);
    }
    {
        // P(Phi) moves r1 and r2, where the system is quasilinear: O(eps^2)
        const auto c = GenSymCharacteristic::P_check(to_riemann_form(f));
        std::vector<double> res;
        for (double e : eps) res.push_back(max_res(c, e));
        CHECK(fit_order(eps, res) == doctest::Approx(2.0).epsilon(0.15));
    }
    {
        // negative control: Phi solving the adjoint equation instead leaves a
        // first-order defect
        const auto c = GenSymCharacteristic::P_check(adjoint_form(f));
        std::vector<double> res;
        for (double e : eps) res.push_back(max_res(c, e));
        CHECK(fit_order(eps, res) == doctest::Approx(1.0).epsilon(0.15));
    }
}

TEST_CASE("hamiltonian gradient matches finite differences of the density") {
    auto density = [](const RiemannState& r) {
        const double S = r.r1 + r.r2, D = r.r1 - r.r2;
        return -0.25 * std::exp(D) * (S * S + 2.0 * D);
    };
    std::mt19937_64 rng(91);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const RiemannState r{-1 + 2 * u01(), -1 + 2 * u01(), -1 + 2 * u01()};
        const double g1 = (density({r.r1 + h, r.r2, r.r3}) - density({r.r1 - h, r.r2, r.r3})) / (2 * h);
        const double g2 = (density({r.r1, r.r2 + h, r.r3}) - density({r.r1, r.r2 - h, r.r3})) / (2 * h);
        const double S = r.r1 + r.r2, D = r.r1 - r.r2, E = std::exp(D);
        const double Q = S * S + 2.0 * D;
        CHECK(g1 == doctest::Approx(-0.25 * E * (Q + 2 * S + 2)).epsilon(1e-6));
        CHECK(g2 == doctest::Approx(-0.25 * E * (-Q + 2 * S - 2)).epsilon(1e-6));
    }
}

TEST_CASE("gensym evolutionary fields evaluate as stated") {
    // W(omega1) coincides with P(e^{r2-r1})
    TelegraphFn e;
    e.add_exp_mode(0.0, -1, 1.0);  // e^{-v} -> e^{r2-r1}
    const auto P = GenSymCharacteristic::P_check(to_riemann_form(e));
    const auto W = GenSymCharacteristic::W_check(BiPoly::w1());
    JetPoint j;
    j.t = 0.3;
    j.x = -0.7;
    j.value = {0.4, -0.2, 0.9};
    j.dx = {0.3, -0.6, 0.8};
    const Vec3 a = P.eval(j);
    const Vec3 b = W.eval(j);
    for (int k = 0; k < 3; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
}

TEST_CASE("gensym commutator table matches the stated relations") {
    for (const auto& chk : gensym_commutator_table(123, 60)) {
        INFO(chk.name);
        CHECK(chk.max_err < 1e-8);
    }
}

TEST_CASE("conserved currents have vanishing divergence on exact solutions") {
    const ExactSolution sol = quad_regular(MonotoneFn::tanh());
    TelegraphFn pf;
    pf.add_exp_mode(0.4, +1, 1.0);
    const RiemannTelegraph psi = adjoint_form(pf);

    std::vector<ConservedCurrent> currents;
    currents.push_back(ConservedCurrent::general_zeroth({1.0, 0.0, 0.5}, psi));
    currents.push_back(ConservedCurrent::non_translation());
    currents.push_back(ConservedCurrent::dhc());
    currents.push_back(ConservedCurrent::ehc(psi));
    currents.push_back(ConservedCurrent::c0());
    currents.push_back(ConservedCurrent::c1(BiPoly::w0() * BiPoly::w1()));

    for (const auto& cur : currents) {
        INFO(cur.name());
        std::vector<double> hs{4e-3, 2e-3, 1e-3}, divs;
        for (double h : hs)
            divs.push_back(conservation_check(cur, sol, kWin, 5, h).max_divergence);
        const double order = fit_order(hs, divs);
        CHECK(order > 1.0);
        CHECK(divs.back() < 1e-4);
    }

    // DHC on the identity-W quad solution: pointwise divergence small at h = 1e-4
    const ExactSolution plain = quad_regular();
    const double div =
        conservation_check(ConservedCurrent::dhc(), plain, kWin, 5, 1e-4).max_divergence;
    CHECK(div < 1e-6);
}

TEST_CASE("C0 on vanishing r1_x raises a domain error") {
    const ExactSolution ultra(UltraSingularSolution(0.3, 0.0, MonotoneFn::tanh()));
    const JetPoint j = jet_uvw_to_riemann(ultra.jet(1.0, 0.2).to_jet_point());
    CHECK_THROWS_AS(ConservedCurrent::c0().density(j), std::domain_error);
}

TEST_CASE("characteristic pairing holds exactly at random states") {
    TelegraphFn pf;
    pf.add_exp_mode(0.4, +1, 1.0);
    pf.add_quad(-0.6);
    const RiemannTelegraph psi = adjoint_form(pf);
    {
        const PairingResult r = characteristic_pairing_check(ConservedCurrent::dhc(), 7, 200);
        CHECK(r.max_grad_err < 1e-12);
        CHECK(r.max_pair_err < 1e-10);
    }
    {
        const PairingResult r =
            characteristic_pairing_check(ConservedCurrent::ehc(psi), 7, 200);
        CHECK(r.max_pair_err < 1e-10);
    }
    {
        const PairingResult r = characteristic_pairing_check(
            ConservedCurrent::general_zeroth({1.0}, std::nullopt), 7, 200);
        CHECK(r.max_grad_err < 1e-12);
        CHECK(r.max_pair_err < 1e-10);
    }
    // EHC with constant Psi is the zero current
    TelegraphFn cf;
    cf.add_const(3.0);
    const ConservedCurrent zero = ConservedCurrent::ehc(adjoint_form(cf));
    JetPoint j;
    j.value = {0.3, -0.2, 0.8};
    CHECK(zero.density(j) == doctest::Approx(0.0));
    CHECK(zero.flux(j) == doctest::Approx(0.0));
}

TEST_CASE("omega chain advects at V3") {
    const ExactSolution sol = quad_regular(MonotoneFn::tanh());
    // iota = 0: the residual is the third equation itself
    CHECK(omega_chain(sol, 0, kWin, 6, 1e-4).max_residual < 1e-6);
    // iota = 1, 2: refinement study
    for (int iota : {1, 2}) {
        std::vector<double> hs{8e-3, 4e-3, 2e-3}, res;
        for (double h : hs) res.push_back(omega_chain(sol, iota, kWin, 6, h).max_residual);
        const double order = fit_order(hs, res);
        INFO("iota=" << iota);
        CHECK(order > 1.0);
    }
    // linear r3 collapses the chain: omega^2 = 0 up to nested-FD roundoff
    // (noise scales like eps/h^3 for the double-nested differences)
    const ExactSolution flat(UltraSingularSolution(0.4, 0.0, MonotoneFn::affine(1.0, 2.0)));
    CHECK(omega_chain(flat, 2, kWin, 6, 1e-3).max_residual < 1e-6);
}

TEST_CASE("hamiltonian representation residual") {
    const ExactSolution sol = quad_regular(MonotoneFn::tanh());
    // constant state: residual exactly zero
    const ExactSolution flat(UltraSingularSolution(0.2, 0.1, MonotoneFn::affine(1.0, 0.0)));

    for (double lambda : {0.0, 1.0, -2.0}) {
        std::vector<double> hs{4e-3, 2e-3, 1e-3}, res;
        for (double h : hs) {
            double mx = 0.0;
            for (double t : {1.2, 1.5, 1.8})
                for (double x : {-0.5, 0.0, 0.5}) {
                    const Vec3 r = hamiltonian_residual(sol, lambda, t, x, h);
                    for (double v : r) mx = std::max(mx, std::abs(v));
                }
            res.push_back(mx);
        }
        INFO("lambda=" << lambda);
        CHECK(fit_order(hs, res) > 1.0);
    }

    // lambda multiplies only terms that cancel against the r3 equation: the
    // residual is identical across lambda values
    const Vec3 r0 = hamiltonian_residual(sol, 0.0, 1.5, 0.2, 1e-3);
    const Vec3 r1 = hamiltonian_residual(sol, 1.0, 1.5, 0.2, 1e-3);
    for (int k = 0; k < 3; ++k) CHECK(r0[k] == doctest::Approx(r1[k]).epsilon(1e-12));

    // constant state: w has a gradient but u, v are flat; residual stays 0
    const Vec3 rc = hamiltonian_residual(flat, 1.0, 1.0, 0.3, 1e-3);
    CHECK(std::abs(rc[0]) < 1e-12);
    CHECK(std::abs(rc[1]) < 1e-12);
    CHECK(std::abs(rc[2]) < 1e-10);
}

TEST_CASE("fd sampler and make_sampler agree") {
    const ExactSolution sol = quad_regular();
    const Sampler a = make_sampler(sol);
    const Sampler fd = make_fd_sampler(a.state, 1e-5);
    const UVWJet ja = a.jet(1.4, 0.2);
    const UVWJet jf = fd.jet(1.4, 0.2);
    CHECK(ja.ut == doctest::Approx(jf.ut).epsilon(1e-6));
    CHECK(ja.vx == doctest::Approx(jf.vx).epsilon(1e-6));
}
