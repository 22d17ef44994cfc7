#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "kfplab/phase_point.hpp"

namespace kfplab {

/// Result of a log-log power-law fit.
struct HolderFit {
    double exponent = 0.0;   // least-squares slope of log w against log r
    double r_squared = 0.0;  // coefficient of determination
    int dropped = 0;         // non-positive oscillations removed before fitting
};

/// Ordinary least squares of log w against log r over (radius, oscillation)
/// pairs. Radii must be positive and distinct; pairs with w <= 0 are dropped
/// (counted in the result). Throws std::invalid_argument with fewer than
/// three usable samples.
HolderFit fit_holder_exponent(const std::vector<std::pair<double, double>>& samples);

/// Plain least-squares line y = a + b x; returns (intercept, slope, r^2).
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

/// Oscillation (max - min) of f over the kinetic cylinder Q_r(z0), optionally
/// restricted to the half space {x_d <= 0}, estimated by dense uniform
/// sampling in the group form of the cylinder.
double oscillation_over_cylinder(const std::function<double(const PhasePoint&)>& f,
                                 const PhasePoint& center, double r,
                                 std::size_t n_samples = 100000,
                                 std::uint64_t seed = 0,
                                 bool restrict_half_space = true);

}  // namespace kfplab
