#include "driftflux/exact_solutions.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace dfx {

namespace {

struct Mat2 {
    double a11, a12, a21, a22;
    double det() const { return a11 * a22 - a12 * a21; }
    std::array<double, 2> solve(double b1, double b2) const {
        const double d = det();
        return {(b1 * a22 - b2 * a12) / d, (a11 * b2 - a21 * b1) / d};
    }
};

double norm2(double a, double b) { return std::sqrt(a * a + b * b); }

}  // namespace

JetPoint UVWJet::to_jet_point() const {
    JetPoint j;
    j.t = t;
    j.x = x;
    j.value = {s.u, s.v, s.w};
    j.dt = {ut, vt, wt};
    j.dx = {ux, vx, wx};
    return j;
}

// ---- RegularSolution --------------------------------------------------------

RegularSolution::RegularSolution(TelegraphFn phi, MonotoneFn W, NewtonConfig cfg,
                                 std::array<double, 2> guess, std::array<double, 4> validity)
    : phi_(std::move(phi)), W_(W), cfg_(cfg), guess_(guess), validity_(validity) {
    if (phi_.empty()) throw std::invalid_argument("RegularSolution: empty telegraph function");
}

std::array<double, 2> RegularSolution::forward(double u, double v) const {
    const Deriv2 d = phi_.eval(u, v);
    return {d.f1, u * d.f1 - d.f2 - d.f};
}

std::array<double, 2> RegularSolution::invert(double t, double x,
                                              std::array<double, 2> guess) const {
    double u = guess[0], v = guess[1];
    for (int it = 0; it < cfg_.max_iter; ++it) {
        const Deriv2 d = phi_.eval(u, v);
        const double f1 = d.f1 - t;
        const double f2 = u * d.f1 - d.f2 - d.f - x;
        const double res = norm2(f1, f2);
        if (res < cfg_.tol) {
            if (std::abs(d.f11 * d.f11 - d.f12 * d.f12) < cfg_.degeneracy_tol)
                throw degenerate_family("eval_regular: Phi_uu^2 - Phi_uv^2 vanishes at the solution");
            return {u, v};
        }
        const Mat2 J{d.f11, d.f12, u * d.f11 - d.f12, u * d.f12 - d.f22 - d.f2};
        if (std::abs(J.det()) < cfg_.degeneracy_tol)
            throw degenerate_family("eval_regular: degenerate hodograph Jacobian");
        const auto step = J.solve(f1, f2);
        // backtracking on the residual norm
        double lambda = 1.0;
        double un = u, vn = v;
        for (int bt = 0; bt < 40; ++bt) {
            un = u - lambda * step[0];
            vn = v - lambda * step[1];
            const Deriv2 dn = phi_.eval(un, vn);
            const double g1 = dn.f1 - t;
            const double g2 = un * dn.f1 - dn.f2 - dn.f - x;
            if (norm2(g1, g2) < res || res < 1e-14) break;
            lambda *= 0.5;
        }
        u = un;
        v = vn;
    }
    std::ostringstream os;
    os << "eval_regular: Newton did not converge at (t,x)=(" << t << "," << x << ")";
    throw no_convergence(os.str());
}

std::array<double, 2> RegularSolution::invert_multistart(double t, double x) const {
    bool all_degenerate = true;
    auto attempt = [&](std::array<double, 2> g) -> std::optional<std::array<double, 2>> {
        try {
            return invert(t, x, g);
        } catch (const degenerate_family&) {
        } catch (const no_convergence&) {
            all_degenerate = false;
        }
        return std::nullopt;
    };
    if (auto r = attempt(guess_)) return *r;
    const int n = 6;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const double u0 = validity_[0] + (validity_[1] - validity_[0]) * i / n;
            const double v0 = validity_[2] + (validity_[3] - validity_[2]) * j / n;
            if (auto r = attempt({u0, v0})) return *r;
        }
    }
    std::ostringstream os;
    os << " for (t,x)=(" << t << "," << x << ")";
    if (all_degenerate)
        throw degenerate_family("eval_regular: hodograph map degenerate across the validity window" +
                                os.str());
    throw no_convergence("eval_regular: no solution found in the validity window" + os.str());
}

UVWState RegularSolution::eval(double t, double x) const {
    const auto uv = invert_multistart(t, x);
    const Deriv2 d = phi_.eval(uv[0], uv[1]);
    return {uv[0], uv[1], W_(std::exp(uv[1]) * d.f2)};
}

UVWState RegularSolution::eval(double t, double x, std::array<double, 2> guess) const {
    const auto uv = invert(t, x, guess);
    const Deriv2 d = phi_.eval(uv[0], uv[1]);
    return {uv[0], uv[1], W_(std::exp(uv[1]) * d.f2)};
}

UVWJet RegularSolution::jet(double t, double x) const { return jet(t, x, invert_multistart(t, x)); }

UVWJet RegularSolution::jet(double t, double x, std::array<double, 2> guess) const {
    const auto uv = invert(t, x, guess);
    const double u = uv[0], v = uv[1];
    const Deriv2 d = phi_.eval(u, v);
    const Mat2 J{d.f11, d.f12, u * d.f11 - d.f12, u * d.f12 - d.f22 - d.f2};
    // implicit differentiation of t = Phi_u, x = u Phi_u - Phi_v - Phi
    const auto dudt = J.solve(1.0, 0.0);
    const auto dudx = J.solve(0.0, 1.0);
    UVWJet out;
    out.t = t;
    out.x = x;
    out.ut = dudt[0];
    out.vt = dudt[1];
    out.ux = dudx[0];
    out.vx = dudx[1];
    const double ev = std::exp(v);
    const double arg = ev * d.f2;
    const double dW = W_.deriv(arg);
    const double darg_t = ev * (d.f2 * out.vt + d.f12 * out.ut + d.f22 * out.vt);
    const double darg_x = ev * (d.f2 * out.vx + d.f12 * out.ux + d.f22 * out.vx);
    out.wt = dW * darg_t;
    out.wx = dW * darg_x;
    out.s = {u, v, W_(arg)};
    return out;
}

// ---- SingularSolution -------------------------------------------------------

SingularSolution::SingularSolution(int eps, double c, ThetaFn theta, MonotoneFn W,
                                   std::array<double, 2> u_bracket, NewtonConfig cfg)
    : eps_(eps >= 0 ? 1 : -1), c_(c), theta_(std::move(theta)), W_(W), bracket_(u_bracket), cfg_(cfg) {}

double SingularSolution::solve_u(double t, double x, bool* multiple_roots) const {
    const double e = static_cast<double>(eps_);
    auto g = [&](double u) { return x - (u + e) * t - std::exp(-e * u) * theta_.d1(u); };
    auto dg = [&](double u) {
        return -t - std::exp(-e * u) * (theta_.d2(u) - e * theta_.d1(u));
    };
    // scan for exact zeros and sign changes
    const int n = 128;
    std::vector<double> exact_roots;
    std::vector<std::array<double, 2>> brackets;
    double prev_u = bracket_[0];
    double prev_g = g(prev_u);
    if (prev_g == 0.0) exact_roots.push_back(prev_u);
    for (int i = 1; i <= n; ++i) {
        const double ui = bracket_[0] + (bracket_[1] - bracket_[0]) * i / n;
        const double gi = g(ui);
        if (gi == 0.0) exact_roots.push_back(ui);
        else if (prev_g != 0.0 && prev_g * gi < 0.0) brackets.push_back({prev_u, ui});
        prev_u = ui;
        prev_g = gi;
    }
    if (multiple_roots) *multiple_roots = exact_roots.size() + brackets.size() > 1;
    if (exact_roots.empty() && brackets.empty()) {
        std::ostringstream os;
        os << "eval_singular: no root of the hodograph relation in [" << bracket_[0] << ","
           << bracket_[1] << "] at (t,x)=(" << t << "," << x << ")";
        throw std::domain_error(os.str());
    }
    // candidate nearest to the bracket midpoint
    const double mid = 0.5 * (bracket_[0] + bracket_[1]);
    double best_pos = 0.0;
    double best_dist = std::numeric_limits<double>::infinity();
    bool best_is_exact = false;
    std::array<double, 2> best_bracket{};
    for (double r : exact_roots)
        if (std::abs(r - mid) < best_dist) {
            best_dist = std::abs(r - mid);
            best_pos = r;
            best_is_exact = true;
        }
    for (const auto& b : brackets) {
        const double c = 0.5 * (b[0] + b[1]);
        if (std::abs(c - mid) < best_dist) {
            best_dist = std::abs(c - mid);
            best_bracket = b;
            best_is_exact = false;
        }
    }
    if (best_is_exact) return best_pos;

    double lo = best_bracket[0], hi = best_bracket[1];
    if (g(lo) > 0.0) std::swap(lo, hi);
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double gu = g(u);
        if (std::abs(gu) < cfg_.tol * (1.0 + std::abs(x) + std::abs(t))) return u;
        if (gu < 0.0) lo = u;
        else hi = u;
        const double d = dg(u);
        double next = (d != 0.0) ? u - gu / d : 0.5 * (lo + hi);
        const double a = std::min(lo, hi), b2 = std::max(lo, hi);
        if (!(next > a && next < b2)) next = 0.5 * (lo + hi);
        if (std::abs(next - u) < 1e-16 * (1.0 + std::abs(u))) return next;
        u = next;
    }
    throw no_convergence("eval_singular: root refinement did not converge");
}

UVWState SingularSolution::eval(double t, double x, bool* multiple_roots) const {
    const double u = solve_u(t, x, multiple_roots);
    const double e = static_cast<double>(eps_);
    const double I = std::exp(e * u) * t + e * theta_.d1(u) - theta_.value(u);
    return {u, e * u + c_, W_(I)};
}

UVWJet SingularSolution::jet(double t, double x) const {
    const double u = solve_u(t, x, nullptr);
    const double e = static_cast<double>(eps_);
    const double th1 = theta_.d1(u), th2 = theta_.d2(u);
    const double gu = -t - std::exp(-e * u) * (th2 - e * th1);
    if (std::abs(gu) < cfg_.degeneracy_tol)
        throw degenerate_family("eval_singular: du-derivative of the root equation vanishes");
    UVWJet out;
    out.t = t;
    out.x = x;
    // g(u,t,x) = x - (u+eps) t - e^{-eps u} Theta_u = 0
    out.ut = (u + e) / gu;
    out.ux = -1.0 / gu;
    out.vt = e * out.ut;
    out.vx = e * out.ux;
    const double I = std::exp(e * u) * t + e * th1 - theta_.value(u);
    const double dI_du = e * std::exp(e * u) * t + e * th2 - th1;
    const double dW = W_.deriv(I);
    out.wt = dW * (dI_du * out.ut + std::exp(e * u));
    out.wx = dW * (dI_du * out.ux);
    out.s = {u, e * u + c_, W_(I)};
    return out;
}

// ---- UltraSingularSolution ----------------------------------------------------

UVWState UltraSingularSolution::eval(double t, double x) const {
    return {u0_, v0_, W_(x - u0_ * t)};
}

UVWJet UltraSingularSolution::jet(double t, double x) const {
    UVWJet out;
    out.t = t;
    out.x = x;
    const double arg = x - u0_ * t;
    const double dW = W_.deriv(arg);
    out.wt = -u0_ * dW;
    out.wx = dW;
    out.s = {u0_, v0_, W_(arg)};
    return out;
}

// ---- GenHodographSolution -----------------------------------------------------

GenHodographSolution::GenHodographSolution(RiemannTelegraph phi, std::optional<MonotoneFn> F,
                                           double r3_const, NewtonConfig cfg,
                                           std::array<double, 2> guess)
    : phi_(std::move(phi)), F_(std::move(F)), r3_const_(r3_const), cfg_(cfg), guess_(guess) {}

std::array<double, 2> GenHodographSolution::invert(double t, double x,
                                                   std::array<double, 2> guess) const {
    double r1 = guess[0], r2 = guess[1];
    for (int it = 0; it < cfg_.max_iter; ++it) {
        const Deriv2 d = phi_.eval(r1, r2);
        if (std::abs(d.f11 + d.f12) < cfg_.degeneracy_tol)
            throw degenerate_family("eval_genhodograph: Phi_11 + Phi_12 vanishes");
        const Vec3 V = char_speeds(r1, r2);
        const double A = x - V[0] * t - d.f - d.f1;
        const double B = x - V[1] * t - d.f + d.f2;
        const double res = norm2(A, B);
        if (res < cfg_.tol) return {r1, r2};
        const Mat2 J{-t - d.f1 - d.f11, -t - d.f2 - d.f12,
                     -t - d.f1 + d.f12, -t - d.f2 + d.f22};
        if (std::abs(J.det()) < cfg_.degeneracy_tol)
            throw degenerate_family("eval_genhodograph: degenerate Jacobian");
        const auto step = J.solve(A, B);
        double lambda = 1.0;
        double r1n = r1, r2n = r2;
        for (int bt = 0; bt < 40; ++bt) {
            r1n = r1 - lambda * step[0];
            r2n = r2 - lambda * step[1];
            const Deriv2 dn = phi_.eval(r1n, r2n);
            const Vec3 Vn = char_speeds(r1n, r2n);
            const double An = x - Vn[0] * t - dn.f - dn.f1;
            const double Bn = x - Vn[1] * t - dn.f + dn.f2;
            if (norm2(An, Bn) < res || res < 1e-14) break;
            lambda *= 0.5;
        }
        r1 = r1n;
        r2 = r2n;
    }
    std::ostringstream os;
    os << "eval_genhodograph: Newton did not converge at (t,x)=(" << t << "," << x << ")";
    throw no_convergence(os.str());
}

RiemannState GenHodographSolution::eval_riemann(double t, double x,
                                                std::array<double, 2> guess) const {
    const auto rr = invert(t, x, guess);
    const Deriv2 d = phi_.eval(rr[0], rr[1]);
    double r3 = r3_const_;
    if (F_) {
        const double g = (x - (rr[0] + rr[1]) * t - d.f) * std::exp(rr[0] - rr[1]);
        r3 = F_->inverse(g);
    }
    return {rr[0], rr[1], r3};
}

RiemannState GenHodographSolution::eval_riemann(double t, double x) const {
    return eval_riemann(t, x, guess_);
}

UVWState GenHodographSolution::eval(double t, double x) const {
    return from_riemann(eval_riemann(t, x));
}

UVWJet GenHodographSolution::jet(double t, double x) const { return jet(t, x, guess_); }

UVWJet GenHodographSolution::jet(double t, double x, std::array<double, 2> guess) const {
    const auto rr = invert(t, x, guess);
    const double r1 = rr[0], r2 = rr[1];
    const Deriv2 d = phi_.eval(r1, r2);
    const Vec3 V = char_speeds(r1, r2);
    const Mat2 J{-t - d.f1 - d.f11, -t - d.f2 - d.f12,
                 -t - d.f1 + d.f12, -t - d.f2 + d.f22};
    // A(r,t,x) = 0, B(r,t,x) = 0 with A_t = -V1, B_t = -V2, A_x = B_x = 1
    const auto drdt = J.solve(-V[0], -V[1]);
    const auto drdx = J.solve(1.0, 1.0);
    const double r1t = -drdt[0], r2t = -drdt[1];
    const double r1x = -drdx[0], r2x = -drdx[1];

    double r3 = r3_const_, r3t = 0.0, r3x = 0.0;
    if (F_) {
        const double E = std::exp(r1 - r2);
        const double core = x - (r1 + r2) * t - d.f;
        const double g = core * E;
        r3 = F_->inverse(g);
        const double dF = F_->deriv(r3);
        const double dcore_t = -(r1 + r2) - t * (r1t + r2t) - d.f1 * r1t - d.f2 * r2t;
        const double dcore_x = 1.0 - t * (r1x + r2x) - d.f1 * r1x - d.f2 * r2x;
        const double gt = dcore_t * E + core * E * (r1t - r2t);
        const double gx = dcore_x * E + core * E * (r1x - r2x);
        r3t = gt / dF;
        r3x = gx / dF;
    }

    UVWJet out;
    out.t = t;
    out.x = x;
    out.s = from_riemann({r1, r2, r3});
    out.ut = r1t + r2t;
    out.vt = r1t - r2t;
    out.ux = r1x + r2x;
    out.vx = r1x - r2x;
    out.wt = r3t;
    out.wx = r3x;
    return out;
}

// ---- ReductionSolution ---------------------------------------------------------

namespace {

// Antiderivative pieces for rational integrands with quadratic denominator
// q(s) = s^2 + a s - (b+1).
struct QuadDenominator {
    double a, bp1;  // q = s^2 + a s - bp1
    double q(double s) const { return s * s + a * s - bp1; }
    double disc() const { return a * a + 4.0 * bp1; }
    // antiderivative of 1/q
    double L(double s) const {
        const double D = disc();
        if (D > 1e-14) {
            const double r = std::sqrt(D);
            return std::log(std::abs((2.0 * s + a - r) / (2.0 * s + a + r))) / r;
        }
        if (D < -1e-14) {
            const double r = std::sqrt(-D);
            return 2.0 / r * std::atan((2.0 * s + a) / r);
        }
        return -2.0 / (2.0 * s + a);
    }
    // antiderivative of (alpha s + beta)/q
    double lin_over_q(double alpha, double beta, double s) const {
        return 0.5 * alpha * std::log(std::abs(q(s))) + (beta - 0.5 * alpha * a) * L(s);
    }
};

}  // namespace

ReductionSolution::ReductionSolution(Family fam, Params p, std::optional<MonotoneFn> psi_handle,
                                     std::array<double, 2> phi_bracket, NewtonConfig cfg)
    : fam_(fam), p_(p), psi_(std::move(psi_handle)), bracket_(phi_bracket), cfg_(cfg) {
    switch (fam_) {
        case Family::R1A:
        case Family::PI5A: {
            const double res = p_.mu * p_.mu + p_.a * p_.mu - p_.b - 1.0;
            if (std::abs(res) > 1e-10)
                throw std::invalid_argument("reduction 1A/PI5A: mu must solve mu^2 + a mu - b - 1 = 0");
            phi_is_const_ = true;
            phi_const_ = p_.mu;
            if (fam_ == Family::R1A && std::abs(p_.mu) < 1e-14) {
                if (p_.delta1 != 0.0)
                    throw std::invalid_argument("reduction 1A: mu = 0 forces delta1 = 0");
                if (!psi_) throw std::invalid_argument("reduction 1A: mu = 0 requires a free psi handle");
            }
            if (fam_ == Family::PI5A && !psi_)
                throw std::invalid_argument("reduction PI5A requires a free psi handle");
            break;
        }
        case Family::R1B:
        case Family::PI5B:
            if (bracket_[0] >= bracket_[1])
                throw std::invalid_argument("reduction 1B/PI5B: phi bracket required");
            if (fam_ == Family::PI5B && !psi_)
                throw std::invalid_argument("reduction PI5B requires a free psi handle");
            if ((fam_ == Family::PI5B || p_.delta1 != 0.0) && std::abs(p_.b + 1.0) < 1e-12)
                throw std::domain_error("reduction 1B/PI5B: psi integral undefined at b = -1");
            break;
        case Family::R2A:
            if (bracket_[0] > bracket_[1])
                throw std::invalid_argument("reduction 2A: invalid phi bracket");
            if (bracket_[0] == bracket_[1]) {
                // singular branch phi = const; consistency requires phi = b
                phi_is_const_ = true;
                phi_const_ = bracket_[0];
                if (std::abs(phi_const_ - p_.b) > 1e-12)
                    throw std::invalid_argument("reduction 2A: constant branch requires phi = b");
            }
            break;
        case Family::R2B:
            break;
        case Family::R3:
            if (p_.delta2 == 0.0) {
                // phi is a constant root of phi^3/3 - phi = c1
                if (bracket_[0] >= bracket_[1])
                    throw std::invalid_argument("reduction 3: bracket for the constant root required");
                double lo = bracket_[0], hi = bracket_[1];
                auto h = [&](double s) { return s * s * s / 3.0 - s - p_.c1; };
                if (h(lo) * h(hi) > 0.0)
                    throw std::domain_error("reduction 3: no constant root in bracket");
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (h(lo) * h(mid) <= 0.0) hi = mid;
                    else lo = mid;
                }
                phi_is_const_ = true;
                phi_const_ = 0.5 * (lo + hi);
                if (std::abs(phi_const_) < 1e-12) {
                    if (p_.delta1 != 0.0)
                        throw std::invalid_argument("reduction 3: phi = 0 forces delta1 = 0");
                    if (!psi_) throw std::invalid_argument("reduction 3: phi = 0 requires a free psi handle");
                }
            } else if (bracket_[0] >= bracket_[1]) {
                throw std::invalid_argument("reduction 3: phi bracket required when delta2 != 0");
            }
            break;
    }
}

double ReductionSolution::omega_of_phi(double phi) const {
    switch (fam_) {
        case Family::R1B:
        case Family::PI5B: {
            const QuadDenominator qd{p_.a, p_.b + 1.0};
            return -phi + qd.lin_over_q(p_.a, -p_.b, phi);
        }
        case Family::R2A:
            return -0.5 * phi * phi - p_.b * phi -
                   (p_.b * p_.b - 1.0) * std::log(std::abs(phi - p_.b));
        case Family::R3:
            return (phi * phi * phi / 3.0 - phi - p_.c1) / p_.delta2;
        default:
            throw std::logic_error("omega_of_phi: not a parametric family");
    }
}

double ReductionSolution::domega_dphi(double phi) const {
    switch (fam_) {
        case Family::R1B:
        case Family::PI5B: {
            const QuadDenominator qd{p_.a, p_.b + 1.0};
            return (1.0 - phi * phi) / qd.q(phi);
        }
        case Family::R2A:
            return (1.0 - phi * phi) / (phi - p_.b);
        case Family::R3:
            return (phi * phi - 1.0) / p_.delta2;
        default:
            throw std::logic_error("domega_dphi: not a parametric family");
    }
}

double ReductionSolution::chi_of_phi(double phi) const {
    switch (fam_) {
        case Family::R1B:
        case Family::PI5B: {
            const QuadDenominator qd{p_.a, p_.b + 1.0};
            return qd.lin_over_q(p_.b, -p_.a, phi) + p_.c2;
        }
        case Family::R2A:
            return p_.b * phi + (p_.b * p_.b - 1.0) * std::log(std::abs(phi - p_.b)) + p_.c2;
        case Family::R3:
            return -0.5 * phi * phi + p_.c2;
        default:
            throw std::logic_error("chi_of_phi: not a parametric family");
    }
}

double ReductionSolution::psihat_of_phi(double phi) const {
    // antiderivative of (1 - phi^2)/(phi q(phi)), q = phi^2 + a phi - (b+1)
    const QuadDenominator qd{p_.a, p_.b + 1.0};
    const double A = -1.0 / (p_.b + 1.0);  // 1/q(0)
    return A * std::log(std::abs(phi)) + qd.lin_over_q(-1.0 - A, -A * p_.a, phi);
}

double ReductionSolution::psi_of_phi(double phi) const {
    switch (fam_) {
        case Family::R1B:
            if (p_.delta1 == 0.0) return p_.c3;
            return -p_.delta1 * psihat_of_phi(phi) + p_.c3;
        case Family::R2A:
            if (std::abs(p_.b) < 1e-14) return p_.delta1 * (phi + 1.0 / phi) + p_.c3;
            return p_.delta1 * (phi + std::log(std::abs(phi)) / p_.b +
                                (p_.b * p_.b - 1.0) / p_.b * std::log(std::abs(phi - p_.b))) +
                   p_.c3;
        case Family::R3:
            return p_.delta1 / p_.delta2 * (std::log(std::abs(phi)) - 0.5 * phi * phi) + p_.c3;
        default:
            throw std::logic_error("psi_of_phi: not a parametric family");
    }
}

double ReductionSolution::solve_phi(double omega) const {
    double lo = bracket_[0], hi = bracket_[1];
    const double slo = domega_dphi(lo), shi = domega_dphi(hi);
    if (slo * shi <= 0.0)
        throw std::domain_error("reduction: d omega/d phi changes sign on the bracket (branch jump)");
    double flo = omega_of_phi(lo) - omega, fhi = omega_of_phi(hi) - omega;
    if (flo * fhi > 0.0)
        throw std::domain_error("reduction: omega value not attained on the phi bracket");
    if (flo > 0.0) {
        std::swap(lo, hi);
        std::swap(flo, fhi);
    }
    double phi = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = omega_of_phi(phi) - omega;
        if (std::abs(f) < cfg_.tol * (1.0 + std::abs(omega))) return phi;
        if (f < 0.0) lo = phi;
        else hi = phi;
        const double d = domega_dphi(phi);
        double next = (d != 0.0) ? phi - f / d : 0.5 * (lo + hi);
        const double lo2 = std::min(lo, hi), hi2 = std::max(lo, hi);
        if (!(next > lo2 && next < hi2)) next = 0.5 * (lo + hi);
        if (std::abs(next - phi) < 1e-16 * (1.0 + std::abs(phi))) return next;
        phi = next;
    }
    throw no_convergence("reduction: phi inversion did not converge");
}

UVWState ReductionSolution::eval(double t, double x) const { return jet(t, x).s; }

UVWJet ReductionSolution::jet(double t, double x) const {
    UVWJet out;
    out.t = t;
    out.x = x;
    switch (fam_) {
        case Family::R1A:
        case Family::PI5A: {
            if (t <= 0.0) throw std::domain_error("reduction 1A/PI5A: restricted to t > 0");
            const double lt = std::log(t);
            const double omega = x / t - p_.a * lt;
            const double mu = p_.mu;
            const double u = mu + x / t + p_.a;
            const double v = -(p_.a + mu) * omega + p_.c2 + p_.b * lt;
            const double omega_t = -x / (t * t) - p_.a / t;
            out.ut = -x / (t * t);
            out.ux = 1.0 / t;
            out.vt = -(p_.a + mu) * omega_t + p_.b / t;
            out.vx = -(p_.a + mu) / t;
            double w, wt, wx;
            if (fam_ == Family::PI5A) {
                const double varpi = x / t - (p_.a + mu) * lt;
                const double dpsi = psi_->deriv(varpi);
                w = (*psi_)(varpi);
                wt = dpsi * (-x / (t * t) - (p_.a + mu) / t);
                wx = dpsi / t;
            } else if (std::abs(mu) < 1e-14) {
                const double dpsi = psi_->deriv(omega);
                w = (*psi_)(omega);
                wt = dpsi * omega_t;
                wx = dpsi / t;
            } else {
                w = -p_.delta1 * omega / mu + p_.c3 + p_.delta1 * lt;
                wt = -p_.delta1 * omega_t / mu + p_.delta1 / t;
                wx = -p_.delta1 / (mu * t);
            }
            out.s = {u, v, w};
            out.wt = wt;
            out.wx = wx;
            return out;
        }
        case Family::R1B:
        case Family::PI5B: {
            if (t <= 0.0) throw std::domain_error("reduction 1B/PI5B: restricted to t > 0");
            const double lt = std::log(t);
            const double omega = x / t - p_.a * lt;
            const double phi = solve_phi(omega - p_.c1);
            const double dphi = 1.0 / domega_dphi(phi);  // d phi / d omega
            const double chi_p = (p_.b * phi - p_.a) / (1.0 - phi * phi);  // d chi / d omega
            const double omega_t = -x / (t * t) - p_.a / t;
            const double omega_x = 1.0 / t;
            const double u = phi + x / t + p_.a;
            const double v = chi_of_phi(phi) + p_.b * lt;
            out.ut = dphi * omega_t - x / (t * t);
            out.ux = dphi * omega_x + 1.0 / t;
            out.vt = chi_p * omega_t + p_.b / t;
            out.vx = chi_p * omega_x;
            double w, wt, wx;
            if (fam_ == Family::PI5B) {
                const double varpi = lt - psihat_of_phi(phi);
                // d varpi = dt/t - (1/phi) d omega
                const double vp_t = 1.0 / t - omega_t / phi;
                const double vp_x = -omega_x / phi;
                const double dpsi = psi_->deriv(varpi);
                w = (*psi_)(varpi);
                wt = dpsi * vp_t;
                wx = dpsi * vp_x;
            } else {
                const double psi_p = -p_.delta1 / phi;  // d psi / d omega
                w = psi_of_phi(phi) + p_.delta1 * lt;
                wt = psi_p * omega_t + p_.delta1 / t;
                wx = psi_p * omega_x;
            }
            out.s = {u, v, w};
            out.wt = wt;
            out.wx = wx;
            return out;
        }
        case Family::R2A: {
            const double omega = x - 0.5 * t * t;
            double phi, dphi, chi, chi_p, psi, psi_p;
            if (phi_is_const_) {
                phi = phi_const_;
                dphi = 0.0;
                chi = -omega + p_.c2;
                chi_p = -1.0;
                // phi psi' + delta1 = 0
                psi_p = (std::abs(phi) > 1e-14) ? -p_.delta1 / phi : 0.0;
                if (std::abs(phi) < 1e-14 && p_.delta1 != 0.0)
                    throw std::domain_error("reduction 2A: constant phi = 0 incompatible with delta1 != 0");
                psi = psi_p * omega + p_.c3;
            } else {
                phi = solve_phi(omega - p_.c1);
                dphi = (phi - p_.b) / (1.0 - phi * phi);
                chi = chi_of_phi(phi);
                chi_p = -1.0 - phi * dphi;  // chi' = -1 - phi phi'
                psi = psi_of_phi(phi);
                psi_p = -p_.delta1 / phi;
            }
            out.s = {phi + t, chi + p_.b * t, psi + p_.delta1 * t};
            out.ut = dphi * (-t) + 1.0;
            out.ux = dphi;
            out.vt = chi_p * (-t) + p_.b;
            out.vx = chi_p;
            out.wt = psi_p * (-t) + p_.delta1;
            out.wx = psi_p;
            return out;
        }
        case Family::R2B: {
            if (t <= 0.0) throw std::domain_error("reduction 2B: restricted to t > 0");
            const double lt = std::log(t);
            const double phi = p_.c1 / t - p_.b;
            const double chi = (p_.b * p_.b - 1.0) * lt + p_.c1 * p_.b / t + p_.c2;
            // direct integration of omega psi' + delta1 phi = 0 carries delta1
            // on the c1/omega term as well
            const double psi = p_.delta1 * (p_.b * lt + p_.c1 / t) + p_.c3;
            out.s = {phi + x / t, chi + p_.b * x / t, psi + p_.delta1 * x / t};
            out.ut = -p_.c1 / (t * t) - x / (t * t);
            out.ux = 1.0 / t;
            out.vt = (p_.b * p_.b - 1.0) / t - p_.c1 * p_.b / (t * t) - p_.b * x / (t * t);
            out.vx = p_.b / t;
            out.wt = p_.delta1 * (p_.b / t - p_.c1 / (t * t) - x / (t * t));
            out.wx = p_.delta1 / t;
            return out;
        }
        case Family::R3: {
            const double omega = x;
            double phi, dphi;
            if (phi_is_const_) {
                phi = phi_const_;
                dphi = 0.0;
            } else {
                phi = solve_phi(omega);
                dphi = p_.delta2 / (phi * phi - 1.0);
            }
            double v, vx, w, wx;
            if (phi_is_const_) {
                v = p_.c2;
                vx = 0.0;
                if (std::abs(phi) < 1e-12) {
                    w = (*psi_)(x);
                    wx = psi_->deriv(x);
                } else {
                    w = -(p_.delta1 / phi) * omega + p_.c3;
                    wx = -p_.delta1 / phi;
                }
            } else {
                v = chi_of_phi(phi);
                vx = -phi * dphi;
                w = psi_of_phi(phi);
                wx = -p_.delta1 / phi;
            }
            out.s = {phi, v + p_.delta2 * t, w + p_.delta1 * t};
            out.ut = 0.0;
            out.ux = dphi;
            out.vt = p_.delta2;
            out.vx = vx;
            out.wt = p_.delta1;
            out.wx = wx;
            return out;
        }
    }
    throw std::logic_error("ReductionSolution::jet: unreachable");
}

// ---- ExactSolution --------------------------------------------------------------

UVWState ExactSolution::eval_uvw(double t, double x) const {
    return std::visit([&](const auto& s) -> UVWState { return s.eval(t, x); }, v_);
}

RiemannState ExactSolution::eval_riemann(double t, double x) const {
    if (const auto* g = std::get_if<GenHodographSolution>(&v_)) return g->eval_riemann(t, x);
    return to_riemann(eval_uvw(t, x));
}

UVWJet ExactSolution::jet(double t, double x) const {
    return std::visit([&](const auto& s) { return s.jet(t, x); }, v_);
}

UVWJet ExactSolution::jet_fd(double t, double x, double h) const {
    UVWJet out;
    out.t = t;
    out.x = x;
    out.s = eval_uvw(t, x);
    const UVWState tp = eval_uvw(t + h, x), tm = eval_uvw(t - h, x);
    const UVWState xp = eval_uvw(t, x + h), xm = eval_uvw(t, x - h);
    out.ut = (tp.u - tm.u) / (2 * h);
    out.vt = (tp.v - tm.v) / (2 * h);
    out.wt = (tp.w - tm.w) / (2 * h);
    out.ux = (xp.u - xm.u) / (2 * h);
    out.vx = (xp.v - xm.v) / (2 * h);
    out.wx = (xp.w - xm.w) / (2 * h);
    return out;
}

std::string ExactSolution::family_name() const {
    struct Namer {
        std::string operator()(const RegularSolution&) const { return "regular"; }
        std::string operator()(const SingularSolution&) const { return "singular"; }
        std::string operator()(const UltraSingularSolution&) const { return "ultra-singular"; }
        std::string operator()(const GenHodographSolution&) const { return "generalized-hodograph"; }
        std::string operator()(const ReductionSolution&) const { return "reduction"; }
    };
    return std::visit(Namer{}, v_);
}

// ---- sample_to_grid --------------------------------------------------------------

grid_sample_error::grid_sample_error(int it_, int ix_, const std::string& what_)
    : std::runtime_error("sample_to_grid: cell (" + std::to_string(it_) + "," +
                         std::to_string(ix_) + "): " + what_),
      it(it_),
      ix(ix_) {}

namespace {

// Jet with guess continuation for the Newton-based families.
UVWJet jet_with_guess(const ExactSolution& sol, double t, double x,
                      const std::optional<std::array<double, 2>>& guess) {
    if (guess) {
        if (const auto* r = sol.get_if<RegularSolution>()) return r->jet(t, x, *guess);
        if (const auto* g = sol.get_if<GenHodographSolution>()) return g->jet(t, x, *guess);
    }
    return sol.jet(t, x);
}

std::optional<std::array<double, 2>> continuation_coords(const ExactSolution& sol, const UVWJet& j) {
    if (sol.get_if<RegularSolution>()) return std::array<double, 2>{j.s.u, j.s.v};
    if (sol.get_if<GenHodographSolution>()) {
        const RiemannState r = to_riemann(j.s);
        return std::array<double, 2>{r.r1, r.r2};
    }
    return std::nullopt;
}

}  // namespace

SampledField sample_to_grid(const ExactSolution& sol, const GridSpec& spec, int threads) {
    if (spec.nt < 1 || spec.nx < 1) throw std::invalid_argument("sample_to_grid: empty grid");
    SampledField out;
    out.spec = spec;
    out.cells.resize(static_cast<size_t>(spec.nt) * static_cast<size_t>(spec.nx));
    auto tcoord = [&](int it) {
        return spec.nt == 1 ? spec.t0 : spec.t0 + (spec.t1 - spec.t0) * it / (spec.nt - 1);
    };
    auto xcoord = [&](int ix) {
        return spec.nx == 1 ? spec.x0 : spec.x0 + (spec.x1 - spec.x0) * ix / (spec.nx - 1);
    };

    // first column, walked sequentially for continuation
    std::vector<std::optional<std::array<double, 2>>> row_guess(static_cast<size_t>(spec.nt));
    std::optional<std::array<double, 2>> guess;
    for (int it = 0; it < spec.nt; ++it) {
        try {
            const UVWJet j = jet_with_guess(sol, tcoord(it), xcoord(0), guess);
            out.cells[static_cast<size_t>(it) * static_cast<size_t>(spec.nx)] = j;
            guess = continuation_coords(sol, j);
            row_guess[static_cast<size_t>(it)] = guess;
        } catch (const std::exception& e) {
            throw grid_sample_error(it, 0, e.what());
        }
    }

    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto run_rows = [&](int begin, int stride) {
        for (int it = begin; it < spec.nt; it += stride) {
            auto g = row_guess[static_cast<size_t>(it)];
            for (int ix = 1; ix < spec.nx; ++ix) {
                try {
                    const UVWJet j = jet_with_guess(sol, tcoord(it), xcoord(ix), g);
                    out.cells[static_cast<size_t>(it) * static_cast<size_t>(spec.nx) +
                              static_cast<size_t>(ix)] = j;
                    g = continuation_coords(sol, j);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error)
                        first_error = std::make_exception_ptr(grid_sample_error(it, ix, e.what()));
                    return;
                }
            }
        }
    };

    threads = std::max(1, threads);
    if (threads == 1 || spec.nt == 1) {
        run_rows(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < threads; ++k) pool.emplace_back(run_rows, k, threads);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

}  // namespace dfx
