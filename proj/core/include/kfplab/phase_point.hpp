#pragma once

#include <cstddef>
#include <vector>

namespace kfplab {

/// A point z = (t, x, v) in R x R^d x R^d carrying the Galilean group
/// structure of the kinetic equation.
struct PhasePoint {
    double t = 0.0;
    std::vector<double> x;  // position, size d
    std::vector<double> v;  // velocity, size d

    PhasePoint() = default;
    PhasePoint(double t_, std::vector<double> x_, std::vector<double> v_);
    /// Convenience d=1 constructor.
    PhasePoint(double t_, double x_, double v_);

    std::size_t dim() const { return x.size(); }
    static PhasePoint origin(std::size_t d);
    bool is_origin(double tol = 0.0) const;
};

/// Group operation z0 o z = (t + t0, x + x0 + t*v0, v + v0).
PhasePoint compose(const PhasePoint& z0, const PhasePoint& z);

/// Group inverse z^{-1} = (-t, -x + t v, -v).
PhasePoint inverse(const PhasePoint& z);

/// Kinetic scaling S_r(z) = (r^2 t, r^3 x, r v), r > 0.
PhasePoint kinetic_scale(const PhasePoint& z, double r);

/// Kinetic gauge ||z|| = max{|t|^{1/2}, |x|^{1/3}, |v|}.
double gauge(const PhasePoint& z);

/// Kinetic cylinder Q_r(z0), right-closed in time:
///   t0 - r^2 < t <= t0,  |x - x0 - (t - t0) v0| < r^3,  |v - v0| < r.
struct KineticCylinder {
    PhasePoint center;
    double radius = 1.0;

    KineticCylinder(PhasePoint c, double r);
};

/// Membership by the explicit inequalities above.
bool cylinder_contains(const KineticCylinder& c, const PhasePoint& z);

/// Membership by the group form {z0 o S_r(w) : w in (-1,0] x B1 x B1};
/// equals cylinder_contains up to round-off. Used as a cross-check.
bool cylinder_contains_group_form(const KineticCylinder& c, const PhasePoint& z);

/// Multi-index (l_t, l_x, l_v) of a kinetic monomial t^{l_t} x^{l_x} v^{l_v}.
struct MultiIndex {
    unsigned l_t = 0;
    std::vector<unsigned> l_x;
    std::vector<unsigned> l_v;
};

/// Kinetic degree 2 l_t + 3 |l_x| + |l_v|.
unsigned kinetic_degree(const MultiIndex& m);

namespace detail {
double norm2(const std::vector<double>& u);
void require_same_dim(const PhasePoint& a, const PhasePoint& b);
}  // namespace detail

}  // namespace kfplab
