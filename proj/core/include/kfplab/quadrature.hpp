#pragma once

#include <functional>

namespace kfplab {

/// Adaptive Simpson integration of f over [a, b] to the given relative
/// tolerance (with an absolute floor for integrals near zero).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, double abs_floor = 1e-300, int max_depth = 60);

}  // namespace kfplab
