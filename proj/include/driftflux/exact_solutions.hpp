#ifndef DRIFTFLUX_EXACT_SOLUTIONS_HPP
#define DRIFTFLUX_EXACT_SOLUTIONS_HPP

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "driftflux/model.hpp"
#include "driftflux/telegraph.hpp"

namespace dfx {

struct no_convergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct degenerate_family : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NewtonConfig {
    double tol = 1e-12;
    int max_iter = 50;
    double degeneracy_tol = 1e-10;
};

// First-order jet of a solution in the (u,v,w) chart.
struct UVWJet {
    double t = 0, x = 0;
    UVWState s;
    double ut = 0, ux = 0, vt = 0, vx = 0, wt = 0, wx = 0;
    JetPoint to_jet_point() const;
};

// Regular family: t = Phi_u, x = u Phi_u - Phi_v - Phi, w = W(e^v Phi_v),
// inverted by a damped 2D Newton iteration in (u, v).
class RegularSolution {
public:
    RegularSolution(TelegraphFn phi, MonotoneFn W, NewtonConfig cfg = {},
                    std::array<double, 2> guess = {0.0, 0.0},
                    std::array<double, 4> validity = {-4.0, 4.0, -4.0, 4.0});

    UVWState eval(double t, double x) const;
    UVWState eval(double t, double x, std::array<double, 2> guess) const;
    UVWJet jet(double t, double x) const;
    UVWJet jet(double t, double x, std::array<double, 2> guess) const;
    // Solves the hodograph system for (u, v) only.
    std::array<double, 2> invert(double t, double x, std::array<double, 2> guess) const;
    // Image of (t, x) = (Phi_u, u Phi_u - Phi_v - Phi) at hodograph point (u, v).
    std::array<double, 2> forward(double u, double v) const;

    const TelegraphFn& phi() const { return phi_; }
    const MonotoneFn& W() const { return W_; }

private:
    std::array<double, 2> invert_multistart(double t, double x) const;
    TelegraphFn phi_;
    MonotoneFn W_;
    NewtonConfig cfg_;
    std::array<double, 2> guess_;
    std::array<double, 4> validity_;  // u_lo, u_hi, v_lo, v_hi
};

// Singular family: x - (u+eps) t = e^{-eps u} Theta_u, v = eps u + c,
// w = W(e^{eps u} t + eps Theta_u - Theta); scalar safeguarded Newton in u.
class SingularSolution {
public:
    SingularSolution(int eps, double c, ThetaFn theta, MonotoneFn W,
                     std::array<double, 2> u_bracket = {-6.0, 6.0}, NewtonConfig cfg = {});

    UVWState eval(double t, double x, bool* multiple_roots = nullptr) const;
    UVWJet jet(double t, double x) const;

private:
    double solve_u(double t, double x, bool* multiple_roots) const;
    int eps_;
    double c_;
    ThetaFn theta_;
    MonotoneFn W_;
    std::array<double, 2> bracket_;
    NewtonConfig cfg_;
};

// Ultra-singular family: constant (u, v), w = W(x - u t).
class UltraSingularSolution {
public:
    UltraSingularSolution(double u0, double v0, MonotoneFn W) : u0_(u0), v0_(v0), W_(W) {}
    UVWState eval(double t, double x) const;
    UVWJet jet(double t, double x) const;

private:
    double u0_, v0_;
    MonotoneFn W_;
};

// Generalized-hodograph representation in Riemann invariants:
//   x - V1 t = Phi + Phi_1,  x - V2 t = Phi - Phi_2,
//   x - V3 t = Phi + F(r3) e^{r2-r1},
// with Phi solving 2 Phi_12 = Phi_1 - Phi_2 and Phi_11 + Phi_12 != 0.
// When F is absent, r3 is the stated constant.
class GenHodographSolution {
public:
    GenHodographSolution(RiemannTelegraph phi, std::optional<MonotoneFn> F, double r3_const = 0.0,
                         NewtonConfig cfg = {}, std::array<double, 2> guess = {0.0, 0.0});

    RiemannState eval_riemann(double t, double x) const;
    RiemannState eval_riemann(double t, double x, std::array<double, 2> guess) const;
    UVWState eval(double t, double x) const;
    UVWJet jet(double t, double x) const;
    UVWJet jet(double t, double x, std::array<double, 2> guess) const;

private:
    std::array<double, 2> invert(double t, double x, std::array<double, 2> guess) const;
    RiemannTelegraph phi_;
    std::optional<MonotoneFn> F_;
    double r3_const_;
    NewtonConfig cfg_;
    std::array<double, 2> guess_;
};

// Lie-reduction families (one-dimensional subalgebras 1-3 plus the two
// partially invariant constructions). Parametric cases invert the omega(phi)
// relation by safeguarded root-finding on a caller-supplied phi bracket.
class ReductionSolution {
public:
    enum class Family { R1A, R1B, R2A, R2B, R3, PI5A, PI5B };
    struct Params {
        double a = 0, b = 0;
        double delta1 = 0, delta2 = 0;
        double mu = 0;
        double c1 = 0, c2 = 0, c3 = 0;
    };

    ReductionSolution(Family fam, Params p, std::optional<MonotoneFn> psi_handle = {},
                      std::array<double, 2> phi_bracket = {0.0, 0.0}, NewtonConfig cfg = {});

    UVWState eval(double t, double x) const;
    UVWJet jet(double t, double x) const;
    Family family() const { return fam_; }

private:
    double solve_phi(double omega) const;  // parametric inversion on the bracket
    double omega_of_phi(double phi) const;
    double domega_dphi(double phi) const;
    double chi_of_phi(double phi) const;
    double psi_of_phi(double phi) const;
    double psihat_of_phi(double phi) const;  // 1B/PI5B auxiliary integral

    Family fam_;
    Params p_;
    std::optional<MonotoneFn> psi_;
    std::array<double, 2> bracket_;
    NewtonConfig cfg_;
    double phi_const_ = 0.0;  // resolved constant phi for R1A / R3 (delta2 = 0) / R2A singular
    bool phi_is_const_ = false;
};

class ExactSolution {
public:
    ExactSolution(RegularSolution s) : v_(std::move(s)) {}
    ExactSolution(SingularSolution s) : v_(std::move(s)) {}
    ExactSolution(UltraSingularSolution s) : v_(std::move(s)) {}
    ExactSolution(GenHodographSolution s) : v_(std::move(s)) {}
    ExactSolution(ReductionSolution s) : v_(std::move(s)) {}

    UVWState eval_uvw(double t, double x) const;
    RiemannState eval_riemann(double t, double x) const;
    UVWJet jet(double t, double x) const;                    // analytic first derivatives
    UVWJet jet_fd(double t, double x, double h) const;       // central differences on eval_uvw
    std::string family_name() const;

    template <typename T>
    const T* get_if() const {
        return std::get_if<T>(&v_);
    }

private:
    std::variant<RegularSolution, SingularSolution, UltraSingularSolution, GenHodographSolution,
                 ReductionSolution>
        v_;
};

struct GridSpec {
    double t0 = 0, t1 = 1, x0 = -1, x1 = 1;
    int nt = 16, nx = 16;
};

struct SampledField {
    GridSpec spec;
    std::vector<UVWJet> cells;  // row-major, nt rows of nx
    const UVWJet& at(int it, int ix) const {
        return cells[static_cast<size_t>(it) * static_cast<size_t>(spec.nx) + static_cast<size_t>(ix)];
    }
};

struct grid_sample_error : std::runtime_error {
    grid_sample_error(int it_, int ix_, const std::string& what_);
    int it, ix;
};

// Samples a solution over the grid with guess continuation: the first column
// is walked sequentially, every row then continues from its left neighbor.
// Rows are distributed over threads.
SampledField sample_to_grid(const ExactSolution& sol, const GridSpec& spec, int threads = 1);

}  // namespace dfx

#endif
