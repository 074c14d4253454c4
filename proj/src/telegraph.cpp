#include "driftflux/telegraph.hpp"

#include <cmath>
#include <stdexcept>

namespace dfx {

double dispersion_mu(double lambda, int branch) {
    const double root = std::sqrt(1.0 + 4.0 * lambda * lambda);
    return 0.5 * (-1.0 + (branch >= 0 ? root : -root));
}

TelegraphFn& TelegraphFn::add_const(double coef) {
    terms_.push_back({Mode::Const, coef, 0, 0, 0, 0});
    return *this;
}
TelegraphFn& TelegraphFn::add_lin_u(double coef) {
    terms_.push_back({Mode::LinU, coef, 0, 0, 0, 0});
    return *this;
}
TelegraphFn& TelegraphFn::add_exp_v(double coef) {
    terms_.push_back({Mode::ExpV, coef, 0, 0, 0, 0});
    return *this;
}
TelegraphFn& TelegraphFn::add_quad(double coef) {
    terms_.push_back({Mode::Quad, coef, 0, 0, 0, 0});
    return *this;
}

TelegraphFn& TelegraphFn::add_exp_mode(double lambda, double mu, double coef) {
    if (std::abs(mu * mu + mu - lambda * lambda) > 1e-14 * (1.0 + lambda * lambda + mu * mu))
        throw std::invalid_argument("TelegraphFn: (lambda, mu) violates mu^2 + mu = lambda^2");
    terms_.push_back({Mode::ExpMode, coef, lambda, mu, 0, 0});
    return *this;
}
TelegraphFn& TelegraphFn::add_exp_mode(double lambda, int branch, double coef) {
    return add_exp_mode(lambda, dispersion_mu(lambda, branch), coef);
}

TelegraphFn& TelegraphFn::add_damped_mode(double k, double mu, double phi0, double coef) {
    if (std::abs(k) > 0.5)
        throw std::invalid_argument("TelegraphFn: damped mode needs |k| <= 1/2 for real mu");
    if (std::abs(mu * mu + mu + k * k) > 1e-14 * (1.0 + k * k + mu * mu))
        throw std::invalid_argument("TelegraphFn: (k, mu) violates mu^2 + mu + k^2 = 0");
    terms_.push_back({Mode::DampedMode, coef, 0, mu, k, phi0});
    return *this;
}
TelegraphFn& TelegraphFn::add_damped_mode(double k, int branch, double phi0, double coef) {
    if (std::abs(k) > 0.5)
        throw std::invalid_argument("TelegraphFn: damped mode needs |k| <= 1/2 for real mu");
    const double root = std::sqrt(1.0 - 4.0 * k * k);
    const double mu = 0.5 * (-1.0 + (branch >= 0 ? root : -root));
    terms_.push_back({Mode::DampedMode, coef, 0, mu, k, phi0});
    return *this;
}

Deriv2 TelegraphFn::eval(double u, double v) const {
    Deriv2 d;
    for (const Term& t : terms_) {
        const double c = t.coef;
        switch (t.mode) {
            case Mode::Const:
                d.f += c;
                break;
            case Mode::LinU:
                d.f += c * u;
                d.f1 += c;
                break;
            case Mode::ExpV: {
                const double e = c * std::exp(-v);
                d.f += e;
                d.f2 += -e;
                d.f22 += e;
                break;
            }
            case Mode::Quad:
                d.f += c * (u * u + 2.0 * v);
                d.f1 += c * 2.0 * u;
                d.f2 += c * 2.0;
                d.f11 += c * 2.0;
                break;
            case Mode::ExpMode: {
                const double e = c * std::exp(t.lambda * u + t.mu * v);
                d.f += e;
                d.f1 += t.lambda * e;
                d.f2 += t.mu * e;
                d.f11 += t.lambda * t.lambda * e;
                d.f12 += t.lambda * t.mu * e;
                d.f22 += t.mu * t.mu * e;
                break;
            }
            case Mode::DampedMode: {
                const double ev = c * std::exp(t.mu * v);
                const double cs = std::cos(t.k * u + t.phi0);
                const double sn = std::sin(t.k * u + t.phi0);
                d.f += ev * cs;
                d.f1 += -t.k * ev * sn;
                d.f2 += t.mu * ev * cs;
                d.f11 += -t.k * t.k * ev * cs;
                d.f12 += -t.k * t.mu * ev * sn;
                d.f22 += t.mu * t.mu * ev * cs;
                break;
            }
        }
    }
    return d;
}

TelegraphFn TelegraphFn::d_du() const {
    TelegraphFn out;
    for (const Term& t : terms_) {
        switch (t.mode) {
            case Mode::Const:
            case Mode::ExpV:
                break;
            case Mode::LinU:
                out.add_const(t.coef);
                break;
            case Mode::Quad:
                out.add_lin_u(2.0 * t.coef);
                break;
            case Mode::ExpMode:
                out.terms_.push_back({Mode::ExpMode, t.coef * t.lambda, t.lambda, t.mu, 0, 0});
                break;
            case Mode::DampedMode:
                // d/du cos(ku+p) = k cos(ku + p + pi/2)
                out.terms_.push_back({Mode::DampedMode, t.coef * t.k, 0, t.mu, t.k,
                                      t.phi0 + M_PI / 2.0});
                break;
        }
    }
    return out;
}

TelegraphFn TelegraphFn::d_dv() const {
    TelegraphFn out;
    for (const Term& t : terms_) {
        switch (t.mode) {
            case Mode::Const:
            case Mode::LinU:
                break;
            case Mode::ExpV:
                out.add_exp_v(-t.coef);
                break;
            case Mode::Quad:
                out.add_const(2.0 * t.coef);
                break;
            case Mode::ExpMode:
                out.terms_.push_back({Mode::ExpMode, t.coef * t.mu, t.lambda, t.mu, 0, 0});
                break;
            case Mode::DampedMode:
                out.terms_.push_back({Mode::DampedMode, t.coef * t.mu, 0, t.mu, t.k, t.phi0});
                break;
        }
    }
    return out;
}

TelegraphFn TelegraphFn::scaled(double c) const {
    TelegraphFn out = *this;
    for (Term& t : out.terms_) t.coef *= c;
    return out;
}

TelegraphFn TelegraphFn::operator+(const TelegraphFn& o) const {
    TelegraphFn out = *this;
    out.terms_.insert(out.terms_.end(), o.terms_.begin(), o.terms_.end());
    return out;
}

Deriv2 RiemannTelegraph::eval(double r1, double r2) const {
    const double a = swapped_ ? r2 : r1;
    const double b = swapped_ ? r1 : r2;
    const Deriv2 p = phi_.eval(a + b, a - b);
    Deriv2 d;
    d.f = p.f;
    // chain rule for u = a+b, v = a-b
    const double fa = p.f1 + p.f2;
    const double fb = p.f1 - p.f2;
    const double faa = p.f11 + 2.0 * p.f12 + p.f22;
    const double fab = p.f11 - p.f22;
    const double fbb = p.f11 - 2.0 * p.f12 + p.f22;
    if (!swapped_) {
        d.f1 = fa; d.f2 = fb;
        d.f11 = faa; d.f12 = fab; d.f22 = fbb;
    } else {
        d.f1 = fb; d.f2 = fa;
        d.f11 = fbb; d.f12 = fab; d.f22 = faa;
    }
    return d;
}

RiemannTelegraph to_riemann_form(const TelegraphFn& f) { return {f, false}; }
RiemannTelegraph adjoint_form(const TelegraphFn& f) { return {f, true}; }

ThetaFn ThetaFn::zero() { return polynomial({}); }

ThetaFn ThetaFn::polynomial(std::vector<double> coeffs) {
    ThetaFn t;
    t.is_poly_ = true;
    t.coeffs_ = std::move(coeffs);
    return t;
}

ThetaFn ThetaFn::exponential(double alpha, double coef) {
    ThetaFn t;
    t.is_poly_ = false;
    t.alpha_ = alpha;
    t.coef_ = coef;
    return t;
}

double ThetaFn::value(double u) const {
    if (!is_poly_) return coef_ * std::exp(alpha_ * u);
    double r = 0;
    for (size_t k = coeffs_.size(); k-- > 0;) r = r * u + coeffs_[k];
    return r;
}

double ThetaFn::d1(double u) const {
    if (!is_poly_) return coef_ * alpha_ * std::exp(alpha_ * u);
    double r = 0;
    for (size_t k = coeffs_.size(); k-- > 1;) r = r * u + static_cast<double>(k) * coeffs_[k];
    return r;
}

double ThetaFn::d2(double u) const {
    if (!is_poly_) return coef_ * alpha_ * alpha_ * std::exp(alpha_ * u);
    double r = 0;
    for (size_t k = coeffs_.size(); k-- > 2;)
        r = r * u + static_cast<double>(k) * static_cast<double>(k - 1) * coeffs_[k];
    return r;
}

MonotoneFn MonotoneFn::identity() { return MonotoneFn(); }

MonotoneFn MonotoneFn::affine(double alpha, double beta) {
    if (alpha == 0.0) throw std::invalid_argument("MonotoneFn::affine: alpha must be nonzero");
    MonotoneFn m;
    m.kind_ = "affine";
    m.p0_ = alpha;
    m.p1_ = beta;
    return m;
}

MonotoneFn MonotoneFn::exp() {
    MonotoneFn m;
    m.kind_ = "exp";
    return m;
}

MonotoneFn MonotoneFn::tanh() {
    MonotoneFn m;
    m.kind_ = "tanh";
    return m;
}

MonotoneFn MonotoneFn::cubic(double a3, double a1) {
    if (!(a3 > 0.0) || a1 < 0.0)
        throw std::invalid_argument("MonotoneFn::cubic: need a3 > 0, a1 >= 0");
    MonotoneFn m;
    m.kind_ = "cubic";
    m.p0_ = a3;
    m.p1_ = a1;
    return m;
}

MonotoneFn MonotoneFn::compose(MonotoneFn outer, MonotoneFn inner) {
    MonotoneFn m;
    m.kind_ = "compose";
    m.outer_ = std::make_shared<const MonotoneFn>(std::move(outer));
    m.inner_ = std::make_shared<const MonotoneFn>(std::move(inner));
    return m;
}

double MonotoneFn::operator()(double s) const {
    if (kind_ == "identity") return s;
    if (kind_ == "affine") return p0_ * s + p1_;
    if (kind_ == "exp") return std::exp(s);
    if (kind_ == "tanh") return std::tanh(s);
    if (kind_ == "compose") return (*outer_)((*inner_)(s));
    return p0_ * s * s * s + p1_ * s;  // cubic
}

double MonotoneFn::deriv(double s) const {
    if (kind_ == "identity") return 1.0;
    if (kind_ == "affine") return p0_;
    if (kind_ == "exp") return std::exp(s);
    if (kind_ == "tanh") {
        const double t = std::tanh(s);
        return 1.0 - t * t;
    }
    if (kind_ == "compose") return outer_->deriv((*inner_)(s)) * inner_->deriv(s);
    return 3.0 * p0_ * s * s + p1_;
}

double MonotoneFn::inverse(double y) const {
    if (kind_ == "identity") return y;
    if (kind_ == "affine") return (y - p1_) / p0_;
    if (kind_ == "compose") return inner_->inverse(outer_->inverse(y));
    if (kind_ == "exp") {
        if (!(y > 0.0)) throw std::domain_error("MonotoneFn: exp inverse needs y > 0");
        return std::log(y);
    }
    if (kind_ == "tanh") {
        if (!(y > -1.0 && y < 1.0)) throw std::domain_error("MonotoneFn: tanh inverse needs |y| < 1");
        return std::atanh(y);
    }
    // cubic: strictly increasing, Newton with a bracketing fallback
    double lo = -1.0, hi = 1.0;
    while ((*this)(lo) > y) lo *= 2.0;
    while ((*this)(hi) < y) hi *= 2.0;
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const double f = (*this)(s)-y;
        if (f > 0.0) hi = s;
        else lo = s;
        const double dp = deriv(s);
        double next = (dp > 0.0) ? s - f / dp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) < 1e-15 * (1.0 + std::abs(s))) return next;
        s = next;
    }
    return s;
}

}  // namespace dfx
