#ifndef DRIFTFLUX_MODEL_HPP
#define DRIFTFLUX_MODEL_HPP

#include <array>
#include <optional>

namespace dfx {

using Vec3 = std::array<double, 3>;

// The three coordinate charts for the isothermal no-slip drift flux system
// (sound speed rescaled to a = 1 throughout).

struct PhysState {
    double rho1 = 1.0;  // > 0
    double rho2 = 1.0;  // > 0
    double u = 0.0;
};

// v = ln(rho1 + rho2), w = rho1/rho2. States with w <= 0 are admitted (the
// W-reparameterization symmetry leaves the w-line unconstrained); only the
// map back to densities enforces physicality.
struct UVWState {
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
};

// Riemann invariants r1 = (u+v)/2, r2 = (u-v)/2, r3 = w.
struct RiemannState {
    double r1 = 0.0;
    double r2 = 0.0;
    double r3 = 0.0;
};

// Free first-order jet at one space-time point. Components of value/dx/dt are
// (u,v,w) or (r1,r2,r3) depending on the chart the jet is used in; dxx is
// optional second x-derivatives for checks that need them.
struct JetPoint {
    double t = 0.0;
    double x = 0.0;
    Vec3 value{0, 0, 0};
    Vec3 dx{0, 0, 0};
    Vec3 dt{0, 0, 0};
    std::optional<Vec3> dxx;
};

UVWState to_uvw(const PhysState& p);            // throws std::domain_error on rho <= 0
PhysState from_uvw(const UVWState& s);          // throws std::domain_error at the w = -1 chart singularity
RiemannState to_riemann(const UVWState& s);
UVWState from_riemann(const RiemannState& r);

// Characteristic speeds V1 = r1+r2+1, V2 = r1+r2-1, V3 = r1+r2.
Vec3 char_speeds(double r1, double r2);

// Pointwise residuals of the two system forms; zero iff the jet satisfies the
// system at that point.
Vec3 residual_uvw(const JetPoint& jet_uvw);
Vec3 residual_riemann(const JetPoint& jet_riemann);

// Chart maps on jets (linear in values and derivatives).
JetPoint jet_uvw_to_riemann(const JetPoint& jet_uvw);
JetPoint jet_riemann_to_uvw(const JetPoint& jet_riemann);

}  // namespace dfx

#endif
