#include <cmath>
#include <random>

#include "doctest.h"
#include "driftflux/telegraph.hpp"

using namespace dfx;

namespace {

double telegraph_residual(const TelegraphFn& f, double u, double v) {
    const Deriv2 d = f.eval(u, v);
    return d.f22 + d.f2 - d.f11;
}

TelegraphFn rich_superposition() {
    TelegraphFn f;
    f.add_quad(0.7);
    f.add_const(-0.3);
    f.add_lin_u(1.1);
    f.add_exp_v(0.4);
    f.add_exp_mode(0.5, +1, 0.6);
    f.add_exp_mode(0.3, -1, -0.2);
    f.add_damped_mode(0.4, +1, 0.3, 0.5);
    return f;
}

}  // namespace

TEST_CASE("dispersion relation") {
    CHECK(dispersion_mu(0.0, +1) == doctest::Approx(0.0));
    CHECK(dispersion_mu(0.0, -1) == doctest::Approx(-1.0));
    CHECK(dispersion_mu(std::sqrt(2.0), +1) == doctest::Approx(1.0));
    CHECK(dispersion_mu(std::sqrt(2.0), -1) == doctest::Approx(-2.0));
}

TEST_CASE("mode constraints are enforced at construction") {
    TelegraphFn f;
    CHECK_THROWS_AS(f.add_exp_mode(1.0, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(f.add_damped_mode(0.7, +1, 0.0), std::invalid_argument);
    CHECK_NOTHROW(f.add_exp_mode(std::sqrt(2.0), 1.0));
    CHECK_NOTHROW(f.add_damped_mode(0.5, -0.5, 0.1));
}

TEST_CASE("stated evaluation examples") {
    TelegraphFn quad;
    quad.add_quad(1.0);
    const Deriv2 d = quad.eval(1.0, 0.0);
    CHECK(d.f == doctest::Approx(1.0));
    CHECK(d.f1 == doctest::Approx(2.0));
    CHECK(d.f2 == doctest::Approx(2.0));
    CHECK(d.f11 == doctest::Approx(2.0));
    CHECK(d.f12 == doctest::Approx(0.0));
    CHECK(d.f22 == doctest::Approx(0.0));

    TelegraphFn c;
    c.add_const(1.0);
    const Deriv2 dc = c.eval(0.3, -0.8);
    CHECK(dc.f == 1.0);
    CHECK(dc.f1 == 0.0);
    CHECK(dc.f2 == 0.0);

    TelegraphFn e;
    e.add_exp_mode(std::sqrt(2.0), 1.0);
    const Deriv2 de = e.eval(0.0, 0.0);
    CHECK(de.f == doctest::Approx(1.0));
    CHECK(de.f1 == doctest::Approx(std::sqrt(2.0)));
    CHECK(de.f2 == doctest::Approx(1.0));
    CHECK(de.f11 == doctest::Approx(2.0));
    CHECK(de.f12 == doctest::Approx(std::sqrt(2.0)));
    CHECK(de.f22 == doctest::Approx(1.0));
}

TEST_CASE("every superposition solves the telegraph equation") {
    const TelegraphFn f = rich_superposition();
    std::mt19937_64 rng(21);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 1000; ++i) {
        const double u = -3.0 + 6.0 * u01();
        const double v = -3.0 + 6.0 * u01();
        CHECK(std::abs(telegraph_residual(f, u, v)) < 1e-12 * (1.0 + std::abs(f.eval(u, v).f)));
    }
}

TEST_CASE("analytic partials match central differences") {
    const TelegraphFn f = rich_superposition();
    const double h = 1e-5;
    std::mt19937_64 rng(22);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 50; ++i) {
        const double u = -2.0 + 4.0 * u01();
        const double v = -2.0 + 4.0 * u01();
        const Deriv2 d = f.eval(u, v);
        const double fu = (f.eval(u + h, v).f - f.eval(u - h, v).f) / (2 * h);
        const double fv = (f.eval(u, v + h).f - f.eval(u, v - h).f) / (2 * h);
        const double fuu = (f.eval(u + h, v).f - 2 * d.f + f.eval(u - h, v).f) / (h * h);
        const double fuv =
            (f.eval(u + h, v + h).f - f.eval(u + h, v - h).f - f.eval(u - h, v + h).f +
             f.eval(u - h, v - h).f) /
            (4 * h * h);
        CHECK(d.f1 == doctest::Approx(fu).epsilon(1e-6));
        CHECK(d.f2 == doctest::Approx(fv).epsilon(1e-6));
        CHECK(d.f11 == doctest::Approx(fuu).epsilon(1e-4));
        CHECK(d.f12 == doctest::Approx(fuv).epsilon(1e-4));
    }
}

TEST_CASE("derivative calculus stays in the catalog") {
    const TelegraphFn f = rich_superposition();
    const TelegraphFn fu = f.d_du();
    const TelegraphFn fv = f.d_dv();
    const double h = 1e-6;
    for (double u : {-1.0, 0.2, 1.3})
        for (double v : {-0.7, 0.5}) {
            CHECK(fu.eval(u, v).f == doctest::Approx(f.eval(u, v).f1).epsilon(1e-10));
            CHECK(fv.eval(u, v).f == doctest::Approx(f.eval(u, v).f2).epsilon(1e-10));
            CHECK(fu.eval(u, v).f ==
                  doctest::Approx((f.eval(u + h, v).f - f.eval(u - h, v).f) / (2 * h)).epsilon(1e-4));
        }
}

TEST_CASE("riemann form solves 2*Phi12 = Phi1 - Phi2") {
    TelegraphFn quad;
    quad.add_quad(1.0);
    const RiemannTelegraph rf = to_riemann_form(quad);
    // Quad -> (r1+r2)^2 + 2(r1-r2)
    const Deriv2 d = rf.eval(0.7, -0.4);
    const double r1 = 0.7, r2 = -0.4;
    CHECK(d.f == doctest::Approx((r1 + r2) * (r1 + r2) + 2 * (r1 - r2)));
    CHECK(std::abs(2 * d.f12 - d.f1 + d.f2) < 1e-13);

    const RiemannTelegraph re = to_riemann_form(rich_superposition());
    std::mt19937_64 rng(23);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 500; ++i) {
        const double a = -1.5 + 3.0 * u01(), b = -1.5 + 3.0 * u01();
        const Deriv2 e = re.eval(a, b);
        CHECK(std::abs(2 * e.f12 - e.f1 + e.f2) < 1e-12 * (1 + std::abs(e.f)));
    }
}

TEST_CASE("adjoint form solves 2*Psi12 = Psi2 - Psi1") {
    TelegraphFn quad;
    quad.add_quad(1.0);
    const RiemannTelegraph ad = adjoint_form(quad);
    const double r1 = 0.6, r2 = 0.1;
    const Deriv2 d = ad.eval(r1, r2);
    CHECK(d.f == doctest::Approx((r1 + r2) * (r1 + r2) - 2 * (r1 - r2)));
    CHECK(std::abs(2 * d.f12 - d.f2 + d.f1) < 1e-13);

    // symmetric Phi gives Psi == Phi
    TelegraphFn c;
    c.add_const(2.5);
    CHECK(adjoint_form(c).eval(0.4, -0.9).f == doctest::Approx(to_riemann_form(c).eval(0.4, -0.9).f));

    const RiemannTelegraph ade = adjoint_form(rich_superposition());
    std::mt19937_64 rng(24);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 500; ++i) {
        const double a = -1.5 + 3.0 * u01(), b = -1.5 + 3.0 * u01();
        const Deriv2 e = ade.eval(a, b);
        CHECK(std::abs(2 * e.f12 - e.f2 + e.f1) < 1e-12 * (1 + std::abs(e.f)));
    }
}

TEST_CASE("klein-gordon reduction of telegraph modes") {
    // p~ = e^{v/2} Phi satisfies p~_uu - p~_vv + p~/4 = 0
    const TelegraphFn f = rich_superposition();
    const double h = 1e-4;
    auto ptilde = [&](double u, double v) { return std::exp(v / 2.0) * f.eval(u, v).f; };
    std::mt19937_64 rng(25);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 50; ++i) {
        const double u = -1.5 + 3.0 * u01(), v = -1.5 + 3.0 * u01();
        const double puu = (ptilde(u + h, v) - 2 * ptilde(u, v) + ptilde(u - h, v)) / (h * h);
        const double pvv = (ptilde(u, v + h) - 2 * ptilde(u, v) + ptilde(u, v - h)) / (h * h);
        CHECK(std::abs(puu - pvv + ptilde(u, v) / 4.0) < 1e-10 * (1 + std::abs(ptilde(u, v))) + 1e-6);
    }
}

TEST_CASE("theta handles") {
    const ThetaFn p = ThetaFn::polynomial({1.0, -2.0, 0.5});
    CHECK(p.value(2.0) == doctest::Approx(1.0 - 4.0 + 2.0));
    CHECK(p.d1(2.0) == doctest::Approx(-2.0 + 2.0 * 0.5 * 2.0));
    CHECK(p.d2(2.0) == doctest::Approx(1.0));
    const ThetaFn e = ThetaFn::exponential(0.5, 2.0);
    CHECK(e.value(1.0) == doctest::Approx(2.0 * std::exp(0.5)));
    CHECK(e.d1(1.0) == doctest::Approx(std::exp(0.5)));
}

TEST_CASE("monotone handles invert") {
    std::mt19937_64 rng(26);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const MonotoneFn fns[] = {MonotoneFn::identity(), MonotoneFn::affine(-2.0, 0.3),
                              MonotoneFn::exp(), MonotoneFn::tanh(), MonotoneFn::cubic(1.0, 0.5),
                              MonotoneFn::compose(MonotoneFn::affine(2.0, 1.0), MonotoneFn::tanh())};
    for (const auto& f : fns) {
        for (int i = 0; i < 200; ++i) {
            const double s = -2.0 + 4.0 * u01();
            CHECK(std::abs(f.inverse(f(s)) - s) < 1e-10 * (1 + std::abs(s)));
            const double h = 1e-6;
            CHECK(f.deriv(s) == doctest::Approx((f(s + h) - f(s - h)) / (2 * h)).epsilon(1e-5));
        }
    }
    CHECK_THROWS_AS(MonotoneFn::exp().inverse(-1.0), std::domain_error);
    CHECK_THROWS_AS(MonotoneFn::tanh().inverse(1.5), std::domain_error);
    CHECK_THROWS_AS(MonotoneFn::affine(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(MonotoneFn::cubic(-1.0, 0.0), std::invalid_argument);
}
