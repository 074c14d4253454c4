#include "driftflux/model.hpp"

#include <cmath>
#include <stdexcept>

namespace dfx {

UVWState to_uvw(const PhysState& p) {
    if (!(p.rho1 > 0.0) || !(p.rho2 > 0.0))
        throw std::domain_error("to_uvw: densities must be positive");
    return {p.u, std::log(p.rho1 + p.rho2), p.rho1 / p.rho2};
}

PhysState from_uvw(const UVWState& s) {
    if (s.w == -1.0) throw std::domain_error("from_uvw: singular chart at w = -1");
    const double ev = std::exp(s.v);
    return {s.w * ev / (s.w + 1.0), ev / (s.w + 1.0), s.u};
}

RiemannState to_riemann(const UVWState& s) {
    return {0.5 * (s.u + s.v), 0.5 * (s.u - s.v), s.w};
}

UVWState from_riemann(const RiemannState& r) {
    return {r.r1 + r.r2, r.r1 - r.r2, r.r3};
}

Vec3 char_speeds(double r1, double r2) {
    const double s = r1 + r2;
    return {s + 1.0, s - 1.0, s};
}

Vec3 residual_uvw(const JetPoint& j) {
    const double u = j.value[0];
    return {j.dt[0] + u * j.dx[0] + j.dx[1],
            j.dt[1] + u * j.dx[1] + j.dx[0],
            j.dt[2] + u * j.dx[2]};
}

Vec3 residual_riemann(const JetPoint& j) {
    const Vec3 V = char_speeds(j.value[0], j.value[1]);
    return {j.dt[0] + V[0] * j.dx[0],
            j.dt[1] + V[1] * j.dx[1],
            j.dt[2] + V[2] * j.dx[2]};
}

namespace {
Vec3 uvw_to_riemann_linear(const Vec3& q) {
    return {0.5 * (q[0] + q[1]), 0.5 * (q[0] - q[1]), q[2]};
}
Vec3 riemann_to_uvw_linear(const Vec3& q) {
    return {q[0] + q[1], q[0] - q[1], q[2]};
}
}  // namespace

JetPoint jet_uvw_to_riemann(const JetPoint& j) {
    JetPoint out = j;
    out.value = uvw_to_riemann_linear(j.value);
    out.dx = uvw_to_riemann_linear(j.dx);
    out.dt = uvw_to_riemann_linear(j.dt);
    if (j.dxx) out.dxx = uvw_to_riemann_linear(*j.dxx);
    return out;
}

JetPoint jet_riemann_to_uvw(const JetPoint& j) {
    JetPoint out = j;
    out.value = riemann_to_uvw_linear(j.value);
    out.dx = riemann_to_uvw_linear(j.dx);
    out.dt = riemann_to_uvw_linear(j.dt);
    if (j.dxx) out.dxx = riemann_to_uvw_linear(*j.dxx);
    return out;
}

}  // namespace dfx
