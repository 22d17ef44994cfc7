#include "kfplab/phase_point.hpp"

#include <cmath>
#include <stdexcept>

namespace kfplab {

namespace detail {

double norm2(const std::vector<double>& u) {
    double s = 0.0;
    for (double ui : u) s += ui * ui;
    return std::sqrt(s);
}

void require_same_dim(const PhasePoint& a, const PhasePoint& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("phase point dimension mismatch");
}

}  // namespace detail

PhasePoint::PhasePoint(double t_, std::vector<double> x_, std::vector<double> v_)
    : t(t_), x(std::move(x_)), v(std::move(v_)) {
    if (x.size() != v.size())
        throw std::invalid_argument("position/velocity dimension mismatch");
}

PhasePoint::PhasePoint(double t_, double x_, double v_) : t(t_), x{x_}, v{v_} {}

PhasePoint PhasePoint::origin(std::size_t d) {
    return PhasePoint(0.0, std::vector<double>(d, 0.0), std::vector<double>(d, 0.0));
}

bool PhasePoint::is_origin(double tol) const {
    if (std::abs(t) > tol) return false;
    for (double c : x)
        if (std::abs(c) > tol) return false;
    for (double c : v)
        if (std::abs(c) > tol) return false;
    return true;
}

PhasePoint compose(const PhasePoint& z0, const PhasePoint& z) {
    detail::require_same_dim(z0, z);
    PhasePoint out = z;
    out.t = z.t + z0.t;
    for (std::size_t i = 0; i < z.dim(); ++i) {
        out.x[i] = z.x[i] + z0.x[i] + z.t * z0.v[i];
        out.v[i] = z.v[i] + z0.v[i];
    }
    return out;
}

PhasePoint inverse(const PhasePoint& z) {
    PhasePoint out = z;
    out.t = -z.t;
    for (std::size_t i = 0; i < z.dim(); ++i) {
        out.x[i] = -z.x[i] + z.t * z.v[i];
        out.v[i] = -z.v[i];
    }
    return out;
}

PhasePoint kinetic_scale(const PhasePoint& z, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("kinetic_scale requires r > 0");
    PhasePoint out = z;
    out.t = r * r * z.t;
    for (std::size_t i = 0; i < z.dim(); ++i) {
        out.x[i] = r * r * r * z.x[i];
        out.v[i] = r * z.v[i];
    }
    return out;
}

double gauge(const PhasePoint& z) {
    const double gt = std::sqrt(std::abs(z.t));
    const double gx = std::cbrt(detail::norm2(z.x));
    const double gv = detail::norm2(z.v);
    return std::max(gt, std::max(gx, gv));
}

KineticCylinder::KineticCylinder(PhasePoint c, double r) : center(std::move(c)), radius(r) {
    if (!(r > 0.0)) throw std::invalid_argument("cylinder radius must be positive");
}

bool cylinder_contains(const KineticCylinder& c, const PhasePoint& z) {
    detail::require_same_dim(c.center, z);
    const double r = c.radius;
    const double dt = z.t - c.center.t;
    if (!(dt > -r * r && dt <= 0.0)) return false;
    std::vector<double> dx(z.dim());
    for (std::size_t i = 0; i < z.dim(); ++i)
        dx[i] = z.x[i] - c.center.x[i] - dt * c.center.v[i];
    if (!(detail::norm2(dx) < r * r * r)) return false;
    std::vector<double> dv(z.dim());
    for (std::size_t i = 0; i < z.dim(); ++i) dv[i] = z.v[i] - c.center.v[i];
    return detail::norm2(dv) < r;
}

bool cylinder_contains_group_form(const KineticCylinder& c, const PhasePoint& z) {
    // w = S_{1/r}(z0^{-1} o z) must lie in (-1,0] x B1 x B1
    const PhasePoint w = kinetic_scale(compose(inverse(c.center), z), 1.0 / c.radius);
    if (!(w.t > -1.0 && w.t <= 0.0)) return false;
    if (!(detail::norm2(w.x) < 1.0)) return false;
    return detail::norm2(w.v) < 1.0;
}

unsigned kinetic_degree(const MultiIndex& m) {
    unsigned sx = 0, sv = 0;
    for (unsigned k : m.l_x) sx += k;
    for (unsigned k : m.l_v) sv += k;
    return 2 * m.l_t + 3 * sx + sv;
}

}  // namespace kfplab
