#ifndef DRIFTFLUX_TELEGRAPH_HPP
#define DRIFTFLUX_TELEGRAPH_HPP

#include <memory>
#include <string>
#include <vector>

namespace dfx {

// Value and partial derivatives through order 2 of a bivariate function.
struct Deriv2 {
    double f = 0, f1 = 0, f2 = 0, f11 = 0, f12 = 0, f22 = 0;
};

// mu branches of mu^2 + mu = lambda^2 (exponential ansatz exp(lambda*u + mu*v)).
double dispersion_mu(double lambda, int branch);

// Finite superposition of closed-form solutions of the telegraph equation
//   Phi_vv + Phi_v = Phi_uu,
// evaluable with analytic partials through order 2. The mode catalog is
// closed: Const 1, LinU u, ExpV e^{-v}, Quad u^2 + 2v,
// ExpMode e^{lambda u + mu v} with mu^2 + mu = lambda^2, and
// DampedMode e^{mu v} cos(k u + phi0) with mu^2 + mu + k^2 = 0, k <= 1/2.
class TelegraphFn {
public:
    enum class Mode { Const, LinU, ExpV, Quad, ExpMode, DampedMode };

    struct Term {
        Mode mode = Mode::Const;
        double coef = 1.0;
        double lambda = 0.0;  // ExpMode
        double mu = 0.0;      // ExpMode / DampedMode
        double k = 0.0;       // DampedMode
        double phi0 = 0.0;    // DampedMode
    };

    TelegraphFn() = default;

    TelegraphFn& add_const(double coef);
    TelegraphFn& add_lin_u(double coef);
    TelegraphFn& add_exp_v(double coef);
    TelegraphFn& add_quad(double coef);
    // Throws std::invalid_argument when (lambda, mu) violates mu^2+mu=lambda^2.
    TelegraphFn& add_exp_mode(double lambda, double mu, double coef = 1.0);
    TelegraphFn& add_exp_mode(double lambda, int branch, double coef = 1.0);
    // Throws when k > 1/2 or mu^2+mu+k^2 != 0.
    TelegraphFn& add_damped_mode(double k, double mu, double phi0, double coef = 1.0);
    TelegraphFn& add_damped_mode(double k, int branch, double phi0, double coef = 1.0);

    bool empty() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

    // (Phi, Phi_u, Phi_v, Phi_uu, Phi_uv, Phi_vv)
    Deriv2 eval(double u, double v) const;

    // d/du and d/dv stay inside the catalog.
    TelegraphFn d_du() const;
    TelegraphFn d_dv() const;
    TelegraphFn scaled(double c) const;
    TelegraphFn operator+(const TelegraphFn& o) const;

private:
    std::vector<Term> terms_;
};

// Phi-hat(r1,r2) := Phi(r1+r2, r1-r2) solves 2*Phi12 = Phi1 - Phi2; the
// argument swap Phi-hat(r2,r1) solves the adjoint 2*Psi12 = Psi2 - Psi1.
class RiemannTelegraph {
public:
    RiemannTelegraph() = default;
    RiemannTelegraph(TelegraphFn phi, bool swapped) : phi_(std::move(phi)), swapped_(swapped) {}

    Deriv2 eval(double r1, double r2) const;
    bool swapped() const { return swapped_; }
    const TelegraphFn& base() const { return phi_; }
    RiemannTelegraph scaled(double c) const { return {phi_.scaled(c), swapped_}; }

private:
    TelegraphFn phi_;
    bool swapped_ = false;
};

RiemannTelegraph to_riemann_form(const TelegraphFn& f);
RiemannTelegraph adjoint_form(const TelegraphFn& f);

// Theta(u) handle for the singular family: polynomial or coef*e^{alpha u},
// with derivatives through order 2.
class ThetaFn {
public:
    static ThetaFn zero();
    static ThetaFn polynomial(std::vector<double> coeffs);
    static ThetaFn exponential(double alpha, double coef = 1.0);

    double value(double u) const;
    double d1(double u) const;
    double d2(double u) const;

private:
    bool is_poly_ = true;
    std::vector<double> coeffs_{};
    double alpha_ = 0.0, coef_ = 0.0;
};

// Strictly monotone scalar map with derivative and inverse; covers the W and
// F parameter functions of the solution families. tags: identity, affine,
// exp, tanh, odd cubic a3 s^3 + a1 s with a3 > 0, a1 >= 0, and composition.
class MonotoneFn {
public:
    static MonotoneFn identity();
    static MonotoneFn affine(double alpha, double beta);  // alpha != 0
    static MonotoneFn exp();
    static MonotoneFn tanh();
    static MonotoneFn cubic(double a3, double a1);
    static MonotoneFn compose(MonotoneFn outer, MonotoneFn inner);

    double operator()(double s) const;
    double deriv(double s) const;
    double inverse(double y) const;  // throws std::domain_error outside the range

    const std::string& kind() const { return kind_; }

private:
    std::string kind_ = "identity";
    double p0_ = 0.0, p1_ = 0.0;
    std::shared_ptr<const MonotoneFn> outer_, inner_;
};

}  // namespace dfx

#endif
