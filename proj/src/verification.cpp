#include "driftflux/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dfx {

namespace {

double urand(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
double urand(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * urand(rng); }

}  // namespace

Sampler make_sampler(const ExactSolution& sol) {
    auto holder = std::make_shared<ExactSolution>(sol);
    Sampler s;
    s.state = [holder](double t, double x) { return holder->eval_uvw(t, x); };
    s.jet = [holder](double t, double x) { return holder->jet(t, x); };
    return s;
}

Sampler make_fd_sampler(std::function<UVWState(double, double)> state, double h) {
    Sampler s;
    s.state = state;
    s.jet = [state, h](double t, double x) {
        UVWJet out;
        out.t = t;
        out.x = x;
        out.s = state(t, x);
        const UVWState tp = state(t + h, x), tm = state(t - h, x);
        const UVWState xp = state(t, x + h), xm = state(t, x - h);
        out.ut = (tp.u - tm.u) / (2 * h);
        out.vt = (tp.v - tm.v) / (2 * h);
        out.wt = (tp.w - tm.w) / (2 * h);
        out.ux = (xp.u - xm.u) / (2 * h);
        out.vx = (xp.v - xm.v) / (2 * h);
        out.wx = (xp.w - xm.w) / (2 * h);
        return out;
    };
    return s;
}

Vec3 fd_residual(const Sampler& s, double t, double x, double h) {
    return residual_uvw(make_fd_sampler(s.state, h).jet(t, x).to_jet_point());
}

double max_fd_residual(const Sampler& s, const Window& win, int n, double h) {
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double t = win.t0 + (win.t1 - win.t0) * (i + 0.5) / n;
            const double x = win.x0 + (win.x1 - win.x0) * (j + 0.5) / n;
            const Vec3 r = fd_residual(s, t, x, h);
            for (double v : r) m = std::max(m, std::abs(v));
        }
    return m;
}

double max_jet_residual(const Sampler& s, const Window& win, int n) {
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double t = win.t0 + (win.t1 - win.t0) * (i + 0.5) / n;
            const double x = win.x0 + (win.x1 - win.x0) * (j + 0.5) / n;
            const Vec3 r = residual_uvw(s.jet(t, x).to_jet_point());
            for (double v : r) m = std::max(m, std::abs(v));
        }
    return m;
}

GroupParams compose(const GroupParams& second, const GroupParams& first) {
    GroupParams g;
    g.T1 = second.T1 * first.T1;
    g.T0 = second.T1 * first.T0 + second.T0;
    g.U0 = first.U0 + second.U0;
    g.X0 = second.T1 * first.X0 + second.T1 * second.U0 * first.T0 + second.X0;
    g.V0 = first.V0 + second.V0;
    g.Wmap = MonotoneFn::compose(second.Wmap, first.Wmap);
    return g;
}

Sampler orbit_transform(const Sampler& base, const GroupParams& g) {
    if (g.T1 == 0.0) throw std::invalid_argument("orbit_transform: T1 must be nonzero");
    Sampler out;
    auto pullback = [g](double tt, double xx) {
        const double t = (tt - g.T0) / g.T1;
        const double x = (xx - g.X0 - g.U0 * (tt - g.T0)) / g.T1;
        return std::array<double, 2>{t, x};
    };
    out.state = [base, g, pullback](double tt, double xx) {
        const auto p = pullback(tt, xx);
        const UVWState s = base.state(p[0], p[1]);
        return UVWState{s.u + g.U0, s.v + g.V0, g.Wmap(s.w)};
    };
    out.jet = [base, g, pullback](double tt, double xx) {
        const auto p = pullback(tt, xx);
        const UVWJet j = base.jet(p[0], p[1]);
        const double dt_dtt = 1.0 / g.T1;
        const double dx_dtt = -g.U0 / g.T1;
        const double dx_dxx = 1.0 / g.T1;
        UVWJet o;
        o.t = tt;
        o.x = xx;
        o.s = {j.s.u + g.U0, j.s.v + g.V0, g.Wmap(j.s.w)};
        o.ut = j.ut * dt_dtt + j.ux * dx_dtt;
        o.vt = j.vt * dt_dtt + j.vx * dx_dtt;
        o.ux = j.ux * dx_dxx;
        o.vx = j.vx * dx_dxx;
        const double dW = g.Wmap.deriv(j.s.w);
        o.wt = dW * (j.wt * dt_dtt + j.wx * dx_dtt);
        o.wx = dW * (j.wx * dx_dxx);
        return o;
    };
    return out;
}

// ---- flow order test ---------------------------------------------------------

double FlowGenerator::omega_eval(double w) const {
    double r = 0.0;
    for (size_t k = omega.size(); k-- > 0;) r = r * w + omega[k];
    return r;
}

double FlowGenerator::omega_deriv(double w) const {
    double r = 0.0;
    for (size_t k = omega.size(); k-- > 1;) r = r * w + static_cast<double>(k) * omega[k];
    return r;
}

namespace {

// One Euler step of length eps along the generator's flow, applied to the
// solution graph; base map inverted exactly (it is affine in (t, x)).
Sampler euler_step_sampler(const Sampler& base, const FlowGenerator& q, double eps) {
    Sampler out;
    auto pullback = [q, eps](double tt, double xx) {
        const double denom = 1.0 + eps * q.cD;
        const double t = (tt - eps * q.cPt) / denom;
        const double x = (xx - eps * (q.cG * t + q.cPx)) / denom;
        return std::array<double, 2>{t, x};
    };
    out.state = [base, q, eps, pullback](double tt, double xx) {
        const auto p = pullback(tt, xx);
        const UVWState s = base.state(p[0], p[1]);
        return UVWState{s.u + eps * q.cG, s.v + eps * q.cPv, s.w + eps * q.omega_eval(s.w)};
    };
    out.jet = [base, q, eps, pullback](double tt, double xx) {
        const auto p = pullback(tt, xx);
        const UVWJet j = base.jet(p[0], p[1]);
        const double denom = 1.0 + eps * q.cD;
        const double dt_dtt = 1.0 / denom;
        const double dx_dtt = -eps * q.cG * dt_dtt / denom;
        const double dx_dxx = 1.0 / denom;
        UVWJet o;
        o.t = tt;
        o.x = xx;
        o.s = {j.s.u + eps * q.cG, j.s.v + eps * q.cPv, j.s.w + eps * q.omega_eval(j.s.w)};
        o.ut = j.ut * dt_dtt + j.ux * dx_dtt;
        o.vt = j.vt * dt_dtt + j.vx * dx_dtt;
        o.ux = j.ux * dx_dxx;
        o.vx = j.vx * dx_dxx;
        const double dw = 1.0 + eps * q.omega_deriv(j.s.w);
        o.wt = dw * (j.wt * dt_dtt + j.wx * dx_dtt);
        o.wx = dw * (j.wx * dx_dxx);
        return o;
    };
    return out;
}

}  // namespace

double fit_order(std::span<const double> h, std::span<const double> err) {
    const size_t n = h.size();
    double mh = 0, me = 0;
    for (size_t i = 0; i < n; ++i) {
        mh += std::log(h[i]);
        me += std::log(err[i]);
    }
    mh /= static_cast<double>(n);
    me /= static_cast<double>(n);
    double num = 0, den = 0;
    for (size_t i = 0; i < n; ++i) {
        num += (std::log(h[i]) - mh) * (std::log(err[i]) - me);
        den += (std::log(h[i]) - mh) * (std::log(h[i]) - mh);
    }
    return num / den;
}

FlowOrderResult subsystem_boost_flow_order(const Sampler& base, std::span<const double> eps,
                                           const Window& win, int n) {
    // jet-space Euler step along the first prolongation of
    // (x/2 - tu) d_t + t(v - u^2/2 + 1/2) d_x + v d_u + u d_v,
    // measured on the residuals of the (u,v) subsystem only
    FlowOrderResult res;
    for (double e : eps) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const double t = win.t0 + (win.t1 - win.t0) * (i + 0.5) / n;
                const double x = win.x0 + (win.x1 - win.x0) * (k + 0.5) / n;
                const UVWJet j = base.jet(t, x);
                const double u = j.s.u, v = j.s.v;
                // residuals are autonomous, so the (t,x)-components of the
                // step never enter
                const double eta_t =
                    j.vt + (u + t * j.ut) * j.ut -
                    (v - 0.5 * u * u + 0.5 + t * (j.vt - u * j.ut)) * j.ux;
                const double eta_x = j.vx - (0.5 - t * j.ux) * j.ut - t * (j.vx - u * j.ux) * j.ux;
                const double the_t =
                    j.ut + (u + t * j.ut) * j.vt -
                    (v - 0.5 * u * u + 0.5 + t * (j.vt - u * j.ut)) * j.vx;
                const double the_x = j.ux - (0.5 - t * j.ux) * j.vt - t * (j.vx - u * j.ux) * j.vx;
                // v itself never enters the residuals, only its derivatives
                const double uu = u + e * v;
                const double ut = j.ut + e * eta_t;
                const double ux = j.ux + e * eta_x;
                const double vt = j.vt + e * the_t;
                const double vx = j.vx + e * the_x;
                const double r1 = ut + uu * ux + vx;
                const double r2 = vt + uu * vx + ux;
                worst = std::max({worst, std::abs(r1), std::abs(r2)});
            }
        res.eps.push_back(e);
        res.max_residual.push_back(worst);
    }
    res.exact_invariant = std::all_of(res.max_residual.begin(), res.max_residual.end(),
                                      [](double r) { return r <= 1e-11; });
    if (res.exact_invariant) {
        res.exponent = std::numeric_limits<double>::infinity();
        return res;
    }
    res.exponent = fit_order(res.eps, res.max_residual);
    return res;
}

FlowOrderResult flow_order_test(const Sampler& base, const FlowGenerator& q,
                                std::span<const double> eps, const Window& win, int n,
                                double noise_floor) {
    FlowOrderResult res;
    for (double e : eps) {
        const Sampler pert = euler_step_sampler(base, q, e);
        res.eps.push_back(e);
        res.max_residual.push_back(max_jet_residual(pert, win, n));
    }
    res.exact_invariant = std::all_of(res.max_residual.begin(), res.max_residual.end(),
                                      [&](double r) { return r <= noise_floor; });
    if (res.exact_invariant) {
        res.exponent = std::numeric_limits<double>::infinity();
        return res;
    }
    if (std::any_of(res.max_residual.begin(), res.max_residual.end(),
                    [&](double r) { return r <= noise_floor; })) {
        res.inconclusive = true;
        return res;
    }
    res.exponent = fit_order(res.eps, res.max_residual);
    return res;
}

// ---- BiPoly -------------------------------------------------------------------

BiPoly BiPoly::w0() { return BiPoly({{0.0}, {1.0}}); }
BiPoly BiPoly::w1() { return BiPoly({{0.0, 1.0}}); }

bool BiPoly::is_zero() const {
    for (const auto& row : c_)
        for (double v : row)
            if (v != 0.0) return false;
    return true;
}

double BiPoly::eval(double w0v, double w1v) const {
    double r = 0.0;
    for (size_t i = 0; i < c_.size(); ++i) {
        double rowv = 0.0;
        for (size_t j = c_[i].size(); j-- > 0;) rowv = rowv * w1v + c_[i][j];
        r += rowv * std::pow(w0v, static_cast<double>(i));
    }
    return r;
}

BiPoly BiPoly::d_w0() const {
    if (c_.size() <= 1) return BiPoly();
    std::vector<std::vector<double>> out(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) {
        out[i - 1] = c_[i];
        for (double& v : out[i - 1]) v *= static_cast<double>(i);
    }
    return BiPoly(std::move(out));
}

BiPoly BiPoly::d_w1() const {
    std::vector<std::vector<double>> out(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].size() <= 1) continue;
        out[i].resize(c_[i].size() - 1);
        for (size_t j = 1; j < c_[i].size(); ++j)
            out[i][j - 1] = static_cast<double>(j) * c_[i][j];
    }
    return BiPoly(std::move(out));
}

BiPoly BiPoly::times_w1_d_w1() const {
    std::vector<std::vector<double>> out(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) {
        out[i].assign(c_[i].size(), 0.0);
        for (size_t j = 1; j < c_[i].size(); ++j)
            out[i][j] = static_cast<double>(j) * c_[i][j];
    }
    return BiPoly(std::move(out));
}

BiPoly operator*(double s, const BiPoly& p) {
    auto c = p.c_;
    for (auto& row : c)
        for (double& v : row) v *= s;
    return BiPoly(std::move(c));
}

BiPoly operator+(const BiPoly& a, const BiPoly& b) {
    std::vector<std::vector<double>> c(std::max(a.c_.size(), b.c_.size()));
    for (size_t i = 0; i < c.size(); ++i) {
        const size_t na = i < a.c_.size() ? a.c_[i].size() : 0;
        const size_t nb = i < b.c_.size() ? b.c_[i].size() : 0;
        c[i].assign(std::max(na, nb), 0.0);
        for (size_t j = 0; j < na; ++j) c[i][j] += a.c_[i][j];
        for (size_t j = 0; j < nb; ++j) c[i][j] += b.c_[i][j];
    }
    return BiPoly(std::move(c));
}

BiPoly operator-(const BiPoly& a, const BiPoly& b) { return a + (-1.0) * b; }

BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    if (a.c_.empty() || b.c_.empty()) return BiPoly();
    size_t na1 = 0, nb1 = 0;
    for (const auto& r : a.c_) na1 = std::max(na1, r.size());
    for (const auto& r : b.c_) nb1 = std::max(nb1, r.size());
    if (na1 == 0 || nb1 == 0) return BiPoly();
    std::vector<std::vector<double>> c(a.c_.size() + b.c_.size() - 1,
                                       std::vector<double>(na1 + nb1 - 1, 0.0));
    for (size_t i = 0; i < a.c_.size(); ++i)
        for (size_t j = 0; j < a.c_[i].size(); ++j) {
            if (a.c_[i][j] == 0.0) continue;
            for (size_t k = 0; k < b.c_.size(); ++k)
                for (size_t l = 0; l < b.c_[k].size(); ++l)
                    c[i + k][j + l] += a.c_[i][j] * b.c_[k][l];
        }
    return BiPoly(std::move(c));
}

// ---- generalized symmetries ------------------------------------------------------

GenSymCharacteristic GenSymCharacteristic::D_check() {
    GenSymCharacteristic c;
    c.gamma = 1.0;
    return c;
}
GenSymCharacteristic GenSymCharacteristic::G1_check() {
    GenSymCharacteristic c;
    c.zeta1 = -1.0;
    return c;
}
GenSymCharacteristic GenSymCharacteristic::G2_check() {
    GenSymCharacteristic c;
    c.zeta1 = 1.0;
    c.zeta2 = -1.0;
    return c;
}
GenSymCharacteristic GenSymCharacteristic::P_check(RiemannTelegraph phi) {
    GenSymCharacteristic c;
    c.phi = std::move(phi);
    return c;
}
GenSymCharacteristic GenSymCharacteristic::W_check(BiPoly omega) {
    GenSymCharacteristic c;
    c.omega = std::move(omega);
    return c;
}

namespace {

struct CharPartials {
    Vec3 eta{0, 0, 0};
    Vec3 dt{0, 0, 0}, dx{0, 0, 0};
    Vec3 dr[3]{};   // dr[j][k] = d eta^k / d r^{j+1}
    Vec3 drx[3]{};  // drx[j][k] = d eta^k / d r^{j+1}_x
};

CharPartials char_partials(const GenSymCharacteristic& c, const JetPoint& j) {
    CharPartials out;
    const double r1 = j.value[0], r2 = j.value[1], r3 = j.value[2];
    const Vec3 rx = j.dx;
    const Vec3 V = char_speeds(r1, r2);
    const double Z = c.zeta1 + c.zeta2;

    Deriv2 p{};  // Phi and partials; zero when absent
    if (c.phi) p = c.phi->eval(r1, r2);

    // A^k and its partials
    Vec3 A, A_t, A_r1, A_r2;
    const double zterm = c.gamma * j.x - Z * j.t;
    A[0] = zterm - c.gamma * j.t * V[0] + p.f + p.f1;
    A[1] = zterm - c.gamma * j.t * V[1] + p.f - p.f2;
    A[2] = zterm - c.gamma * j.t * V[2] + p.f;
    for (int k = 0; k < 3; ++k) A_t[k] = -c.gamma * V[k] - Z;
    A_r1 = {-c.gamma * j.t + p.f1 + p.f11, -c.gamma * j.t + p.f1 - p.f12, -c.gamma * j.t + p.f1};
    A_r2 = {-c.gamma * j.t + p.f2 + p.f12, -c.gamma * j.t + p.f2 - p.f22, -c.gamma * j.t + p.f2};

    const double w0 = r3;
    const double E = std::exp(r2 - r1);
    const double w1 = E * rx[2];
    const double Om = c.omega.eval(w0, w1);
    const double Om0 = c.omega.d_w0().eval(w0, w1);
    const double Om1 = c.omega.d_w1().eval(w0, w1);

    out.eta = {A[0] * rx[0] + c.zeta1, A[1] * rx[1] + c.zeta2, A[2] * rx[2] + Om};
    out.dt = {A_t[0] * rx[0], A_t[1] * rx[1], A_t[2] * rx[2]};
    out.dx = {c.gamma * rx[0], c.gamma * rx[1], c.gamma * rx[2]};

    // d/dr1
    out.dr[0] = {A_r1[0] * rx[0], A_r1[1] * rx[1], A_r1[2] * rx[2] - Om1 * w1};
    // d/dr2
    out.dr[1] = {A_r2[0] * rx[0], A_r2[1] * rx[1], A_r2[2] * rx[2] + Om1 * w1};
    // d/dr3
    out.dr[2] = {0, 0, Om0};
    // d/dr1_x, d/dr2_x, d/dr3_x
    out.drx[0] = {A[0], 0, 0};
    out.drx[1] = {0, A[1], 0};
    out.drx[2] = {0, 0, A[2] + Om1 * E};
    return out;
}

}  // namespace

Vec3 GenSymCharacteristic::eval(const JetPoint& j) const { return char_partials(*this, j).eta; }

Vec3 gensym_determining_residual(const GenSymCharacteristic& c, const JetPoint& j) {
    const CharPartials p = char_partials(c, j);
    const Vec3 V = char_speeds(j.value[0], j.value[1]);
    const Vec3 rx = j.dx;
    Vec3 R;
    for (int k = 0; k < 3; ++k) {
        double r = p.dt[k] + V[k] * p.dx[k];
        for (int jj = 0; jj < 3; ++jj) r += (V[k] - V[jj]) * p.dr[jj][k] * rx[jj];
        r -= p.drx[k][k] * (rx[0] + rx[1]) * rx[k];
        r += (p.eta[0] + p.eta[1]) * rx[k];
        R[k] = r;
    }
    return R;
}

Vec3 gensym_bracket(const GenSymCharacteristic& a, const GenSymCharacteristic& b,
                    const JetPoint& j) {
    if (!j.dxx) throw std::invalid_argument("gensym_bracket: jet must carry second derivatives");
    const CharPartials pa = char_partials(a, j);
    const CharPartials pb = char_partials(b, j);
    const Vec3 rx = j.dx;
    const Vec3 rxx = *j.dxx;
    Vec3 DxA, DxB;
    for (int k = 0; k < 3; ++k) {
        double da = pa.dx[k], db = pb.dx[k];
        for (int i = 0; i < 3; ++i) {
            da += pa.dr[i][k] * rx[i] + pa.drx[i][k] * rxx[i];
            db += pb.dr[i][k] * rx[i] + pb.drx[i][k] * rxx[i];
        }
        DxA[k] = da;
        DxB[k] = db;
    }
    Vec3 out;
    for (int k = 0; k < 3; ++k) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) {
            s += pa.eta[i] * pb.dr[i][k] + DxA[i] * pb.drx[i][k];
            s -= pb.eta[i] * pa.dr[i][k] + DxB[i] * pa.drx[i][k];
        }
        out[k] = s;
    }
    return out;
}

std::vector<CommCheck> gensym_commutator_table(uint64_t seed, int njets) {
    std::mt19937_64 rng(seed);
    auto random_jet = [&]() {
        JetPoint j;
        j.t = urand(rng, -1, 1);
        j.x = urand(rng, -1, 1);
        j.value = {urand(rng, -0.8, 0.8), urand(rng, -0.8, 0.8), urand(rng, -0.8, 0.8)};
        j.dx = {urand(rng, -1, 1), urand(rng, -1, 1), urand(rng, -1, 1)};
        j.dt = {0, 0, 0};
        j.dxx = Vec3{urand(rng, -1, 1), urand(rng, -1, 1), urand(rng, -1, 1)};
        return j;
    };

    TelegraphFn f;
    f.add_exp_mode(0.4, +1, 1.0);
    const RiemannTelegraph Phi = to_riemann_form(f);
    const RiemannTelegraph Phi1 = to_riemann_form(f.d_du() + f.d_dv());
    const RiemannTelegraph Phi1m2 = to_riemann_form(f.d_dv().scaled(2.0));

    const BiPoly w0 = BiPoly::w0(), w1 = BiPoly::w1();
    const BiPoly Om = w0 * w1 + 0.5 * (w1 * w1);
    const BiPoly Om2 = w0 * w0 + 0.25 * (w0 * w1);

    const auto D = GenSymCharacteristic::D_check();
    const auto G1 = GenSymCharacteristic::G1_check();
    const auto G2 = GenSymCharacteristic::G2_check();
    const auto P = GenSymCharacteristic::P_check(Phi);
    const auto WOm = GenSymCharacteristic::W_check(Om);
    const auto WOm2 = GenSymCharacteristic::W_check(Om2);

    struct Rel {
        std::string name;
        GenSymCharacteristic lhs1, lhs2;
        GenSymCharacteristic rhs;  // expected [lhs1, lhs2]
    };
    auto Wexp = [&](const BiPoly& o) { return GenSymCharacteristic::W_check(o); };
    const BiPoly zero;
    std::vector<Rel> rels;
    rels.push_back({"[D,P(Phi)] = P(Phi)", D, P, P});
    rels.push_back({"[G1,P(Phi)] = P(-Phi_1)",
                    G1, P, GenSymCharacteristic::P_check(Phi1.scaled(-1.0))});
    rels.push_back({"[G2,P(Phi)] = P(Phi_1-Phi_2)", G2, P,
                    GenSymCharacteristic::P_check(Phi1m2)});
    rels.push_back({"[D,W(Om)] = W(w1 dOm/dw1)", D, WOm, Wexp(Om.times_w1_d_w1())});
    rels.push_back({"[G1,W(Om)] = W(w1 dOm/dw1)", G1, WOm, Wexp(Om.times_w1_d_w1())});
    rels.push_back({"[G2,W(Om)] = -2 W(w1 dOm/dw1)", G2, WOm, Wexp((-2.0) * Om.times_w1_d_w1())});
    {
        const BiPoly rhs = Om.d_w0() * (Om2.times_w1_d_w1() - Om2) -
                           Om2.d_w0() * (Om.times_w1_d_w1() - Om);
        rels.push_back({"[W(Om),W(Om2)]", WOm, WOm2, Wexp(rhs)});
    }
    rels.push_back({"[D,G1] = 0", D, G1, Wexp(zero)});
    rels.push_back({"[D,G2] = 0", D, G2, Wexp(zero)});
    rels.push_back({"[G1,G2] = 0", G1, G2, Wexp(zero)});
    rels.push_back({"[P(Phi),P(Phi_1)] = 0", P, GenSymCharacteristic::P_check(Phi1), Wexp(zero)});
    rels.push_back({"[P(e^{r2-r1}), W(w1)] = 0",
                    GenSymCharacteristic::P_check(to_riemann_form(
                        TelegraphFn{}.add_exp_mode(0.0, -1, 1.0))),
                    Wexp(w1), Wexp(zero)});

    std::vector<CommCheck> out;
    for (const auto& rel : rels) {
        CommCheck chk{rel.name, 0.0};
        for (int s = 0; s < njets; ++s) {
            const JetPoint j = random_jet();
            const Vec3 lhs = gensym_bracket(rel.lhs1, rel.lhs2, j);
            const Vec3 rhs = rel.rhs.eval(j);
            for (int k = 0; k < 3; ++k) chk.max_err = std::max(chk.max_err, std::abs(lhs[k] - rhs[k]));
        }
        out.push_back(std::move(chk));
    }
    return out;
}

// ---- conserved currents -----------------------------------------------------------

ConservedCurrent ConservedCurrent::general_zeroth(std::vector<double> omega_r3,
                                                  std::optional<RiemannTelegraph> psi_adjoint) {
    ConservedCurrent c;
    c.kind_ = Kind::GeneralZeroth;
    c.omega_r3_ = std::move(omega_r3);
    c.psi_ = std::move(psi_adjoint);
    return c;
}

ConservedCurrent ConservedCurrent::non_translation() {
    ConservedCurrent c;
    c.kind_ = Kind::NonTranslation;
    return c;
}

ConservedCurrent ConservedCurrent::dhc() {
    ConservedCurrent c;
    c.kind_ = Kind::DHC;
    c.omega_r3_ = {0.0, 1.0};
    return c;
}

ConservedCurrent ConservedCurrent::ehc(RiemannTelegraph psi_adjoint) {
    ConservedCurrent c;
    c.kind_ = Kind::EHC;
    c.psi_ = std::move(psi_adjoint);
    return c;
}

ConservedCurrent ConservedCurrent::c0() {
    ConservedCurrent c;
    c.kind_ = Kind::C0;
    return c;
}

ConservedCurrent ConservedCurrent::c1(BiPoly omega) {
    ConservedCurrent c;
    c.kind_ = Kind::C1;
    c.omega1_ = std::move(omega);
    return c;
}

std::string ConservedCurrent::name() const {
    switch (kind_) {
        case Kind::GeneralZeroth: return "general-zeroth";
        case Kind::NonTranslation: return "non-translation";
        case Kind::DHC: return "DHC";
        case Kind::EHC: return "EHC";
        case Kind::C0: return "C0";
        case Kind::C1: return "C1";
    }
    return "?";
}

bool ConservedCurrent::hydrodynamic() const {
    return kind_ == Kind::GeneralZeroth || kind_ == Kind::DHC || kind_ == Kind::EHC;
}

namespace {
double poly_eval(const std::vector<double>& c, double s) {
    double r = 0.0;
    for (size_t k = c.size(); k-- > 0;) r = r * s + c[k];
    return r;
}
double poly_deriv(const std::vector<double>& c, double s) {
    double r = 0.0;
    for (size_t k = c.size(); k-- > 1;) r = r * s + static_cast<double>(k) * c[k];
    return r;
}
}  // namespace

double ConservedCurrent::density(const JetPoint& j) const {
    const double r1 = j.value[0], r2 = j.value[1], r3 = j.value[2];
    const double E = std::exp(r1 - r2);
    switch (kind_) {
        case Kind::GeneralZeroth:
        case Kind::DHC:
        case Kind::EHC: {
            double rho = E * poly_eval(omega_r3_, r3);
            if (psi_) {
                const Deriv2 p = psi_->eval(r1, r2);
                rho += p.f1 - p.f2;
            }
            return rho;
        }
        case Kind::NonTranslation: {
            const double V3 = r1 + r2;
            return E * (j.x - V3 * j.t);
        }
        case Kind::C0: {
            if (std::abs(j.dx[0]) < 1e-12 || std::abs(j.dx[1]) < 1e-12)
                throw std::domain_error("C0 density: r1_x or r2_x vanishes");
            return E * (1.0 / j.dx[0] - 1.0 / j.dx[1]);
        }
        case Kind::C1: {
            const double w1 = std::exp(r2 - r1) * j.dx[2];
            return E * omega1_.eval(r3, w1);
        }
    }
    return 0.0;
}

double ConservedCurrent::flux(const JetPoint& j) const {
    const double r1 = j.value[0], r2 = j.value[1], r3 = j.value[2];
    const double E = std::exp(r1 - r2);
    const Vec3 V = char_speeds(r1, r2);
    switch (kind_) {
        case Kind::GeneralZeroth:
        case Kind::DHC:
        case Kind::EHC: {
            double sig = V[2] * E * poly_eval(omega_r3_, r3);
            if (psi_) {
                const Deriv2 p = psi_->eval(r1, r2);
                sig += V[0] * p.f1 - V[1] * p.f2;
            }
            return sig;
        }
        case Kind::NonTranslation: {
            const double y = j.x - V[2] * j.t;
            return E * (V[2] * y - j.t);
        }
        case Kind::C0: {
            if (std::abs(j.dx[0]) < 1e-12 || std::abs(j.dx[1]) < 1e-12)
                throw std::domain_error("C0 flux: r1_x or r2_x vanishes");
            return E * (V[0] / j.dx[0] - V[1] / j.dx[1]);
        }
        case Kind::C1: {
            const double w1 = std::exp(r2 - r1) * j.dx[2];
            return V[2] * E * omega1_.eval(r3, w1);
        }
    }
    return 0.0;
}

Vec3 ConservedCurrent::density_grad(const RiemannState& r) const {
    if (!hydrodynamic()) throw std::logic_error("density_grad: hydrodynamic currents only");
    const double E = std::exp(r.r1 - r.r2);
    const double Om = poly_eval(omega_r3_, r.r3);
    const double dOm = poly_deriv(omega_r3_, r.r3);
    Deriv2 p{};
    if (psi_) p = psi_->eval(r.r1, r.r2);
    return {E * Om + p.f11 - p.f12, -E * Om + p.f12 - p.f22, E * dOm};
}

Vec3 ConservedCurrent::flux_grad(const RiemannState& r) const {
    if (!hydrodynamic()) throw std::logic_error("flux_grad: hydrodynamic currents only");
    const double E = std::exp(r.r1 - r.r2);
    const Vec3 V = char_speeds(r.r1, r.r2);
    const double Om = poly_eval(omega_r3_, r.r3);
    const double dOm = poly_deriv(omega_r3_, r.r3);
    Deriv2 p{};
    if (psi_) p = psi_->eval(r.r1, r.r2);
    // third derivatives of Psi never enter: sigma depends on Psi_1, Psi_2 only
    const double s1 = E * Om + V[2] * E * Om + p.f1 - p.f2 + V[0] * p.f11 - V[1] * p.f12;
    const double s2 = E * Om - V[2] * E * Om + p.f1 - p.f2 + V[0] * p.f12 - V[1] * p.f22;
    const double s3 = V[2] * E * dOm;
    return {s1, s2, s3};
}

Vec3 ConservedCurrent::characteristic(const RiemannState& r) const {
    if (!hydrodynamic()) throw std::logic_error("characteristic: hydrodynamic currents only");
    const double E = std::exp(r.r1 - r.r2);
    const double Om = poly_eval(omega_r3_, r.r3);
    const double dOm = poly_deriv(omega_r3_, r.r3);
    Deriv2 p{};
    if (psi_) p = psi_->eval(r.r1, r.r2);
    return {E * Om + p.f11 - p.f12, -E * Om + p.f12 - p.f22, E * dOm};
}

ConservationCheckResult conservation_check(const ConservedCurrent& cur, const ExactSolution& sol,
                                           const Window& win, int n, double h) {
    ConservationCheckResult out;
    auto jet_at = [&](double t, double x) { return sol.jet(t, x).to_jet_point(); };
    auto riemann_jet = [&](double t, double x) {
        JetPoint j = jet_at(t, x);
        return jet_uvw_to_riemann(j);
    };
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double t = win.t0 + (win.t1 - win.t0) * (i + 0.5) / n;
            const double x = win.x0 + (win.x1 - win.x0) * (k + 0.5) / n;
            const double dtrho =
                (cur.density(riemann_jet(t + h, x)) - cur.density(riemann_jet(t - h, x))) / (2 * h);
            const double dxsig =
                (cur.flux(riemann_jet(t, x + h)) - cur.flux(riemann_jet(t, x - h))) / (2 * h);
            out.max_divergence = std::max(out.max_divergence, std::abs(dtrho + dxsig));
        }
    }
    // trapezoid-rule drift at the window midline
    const double tm = 0.5 * (win.t0 + win.t1);
    const int nq = std::max(64, std::min(4096, static_cast<int>((win.x1 - win.x0) / h)));
    auto integral = [&](double t) {
        double s = 0.0;
        const double dx = (win.x1 - win.x0) / nq;
        for (int k = 0; k <= nq; ++k) {
            const double x = win.x0 + dx * k;
            const double val = cur.density(riemann_jet(t, x));
            s += (k == 0 || k == nq) ? 0.5 * val : val;
        }
        return s * dx;
    };
    const double dIdt = (integral(tm + h) - integral(tm - h)) / (2 * h);
    const double flux_out =
        cur.flux(riemann_jet(tm, win.x1)) - cur.flux(riemann_jet(tm, win.x0));
    out.integral_drift = std::abs(dIdt + flux_out);
    return out;
}

PairingResult characteristic_pairing_check(const ConservedCurrent& cur, uint64_t seed,
                                           int nstates) {
    PairingResult out;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < nstates; ++i) {
        const RiemannState r{urand(rng, -1, 1), urand(rng, -1, 1), urand(rng, 0.2, 2.0)};
        const Vec3 grad = cur.density_grad(r);
        const Vec3 ch = cur.characteristic(r);
        const Vec3 fg = cur.flux_grad(r);
        const Vec3 V = char_speeds(r.r1, r.r2);
        for (int k = 0; k < 3; ++k) {
            out.max_grad_err = std::max(out.max_grad_err, std::abs(grad[k] - ch[k]));
            out.max_pair_err = std::max(out.max_pair_err, std::abs(fg[k] - V[k] * grad[k]));
        }
    }
    return out;
}

// ---- omega chain ---------------------------------------------------------------------

namespace {

double omega_iota_value(const ExactSolution& sol, int iota, double t, double x, double h) {
    if (iota == 0) return sol.eval_riemann(t, x).r3;
    const RiemannState r = sol.eval_riemann(t, x);
    const double dprev = (omega_iota_value(sol, iota - 1, t, x + h, h) -
                          omega_iota_value(sol, iota - 1, t, x - h, h)) /
                         (2 * h);
    return std::exp(r.r2 - r.r1) * dprev;
}

}  // namespace

OmegaChainResult omega_chain(const ExactSolution& sol, int iota, const Window& win, int n,
                             double h) {
    if (iota < 0 || iota > 3) throw std::invalid_argument("omega_chain: iota must be in [0,3]");
    OmegaChainResult out;
    out.iota = iota;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double t = win.t0 + (win.t1 - win.t0) * (i + 0.5) / n;
            const double x = win.x0 + (win.x1 - win.x0) * (k + 0.5) / n;
            const double wt = (omega_iota_value(sol, iota, t + h, x, h) -
                               omega_iota_value(sol, iota, t - h, x, h)) /
                              (2 * h);
            const double wx = (omega_iota_value(sol, iota, t, x + h, h) -
                               omega_iota_value(sol, iota, t, x - h, h)) /
                              (2 * h);
            const RiemannState r = sol.eval_riemann(t, x);
            const double resid = wt + (r.r1 + r.r2) * wx;
            out.max_residual = std::max(out.max_residual, std::abs(resid));
        }
    }
    return out;
}

// ---- Hamiltonian representation --------------------------------------------------------

namespace {

Vec3 hamiltonian_gradient(const RiemannState& r) {
    const double E = std::exp(r.r1 - r.r2);
    const double S = r.r1 + r.r2, D = r.r1 - r.r2;
    const double Q = S * S + 2.0 * D;
    return {-0.25 * E * (Q + 2.0 * S + 2.0), -0.25 * E * (-Q + 2.0 * S - 2.0), 0.0};
}

}  // namespace

Vec3 hamiltonian_residual(const ExactSolution& sol, double lambda, double t, double x, double h) {
    const JetPoint rj = jet_uvw_to_riemann(sol.jet(t, x).to_jet_point());
    const RiemannState r{rj.value[0], rj.value[1], rj.value[2]};
    const Vec3 rx = rj.dx;
    const Vec3 rt = rj.dt;

    const Vec3 gp = hamiltonian_gradient(sol.eval_riemann(t, x + h));
    const Vec3 gm = hamiltonian_gradient(sol.eval_riemann(t, x - h));
    const Vec3 g = hamiltonian_gradient(r);
    Vec3 Dxg;
    for (int k = 0; k < 3; ++k) Dxg[k] = (gp[k] - gm[k]) / (2 * h);

    const double Ep = std::exp(r.r2 - r.r1);
    Vec3 P;
    const double row12 = 0.5 * Ep * ((rx[1] - rx[0]) * g[0] + (rx[0] - rx[1]) * g[1] - 2.0 * rx[2] * g[2]);
    P[0] = Ep * Dxg[0] + row12;
    P[1] = -Ep * Dxg[1] + row12;
    P[2] = lambda * Ep * Ep * Dxg[2] +
           0.5 * Ep * (2.0 * rx[2] * g[0] + 2.0 * rx[2] * g[1] -
                       2.0 * lambda * Ep * (rx[0] - rx[1]) * g[2]);

    return {P[0] - rt[0], P[1] - rt[1], P[2] - rt[2]};
}

}  // namespace dfx
