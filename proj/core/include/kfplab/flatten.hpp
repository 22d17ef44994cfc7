#pragma once

#include <functional>
#include <vector>

#include "kfplab/phase_point.hpp"

namespace kfplab {

using Matrix = std::vector<std::vector<double>>;  // row-major, d x d
using Vector = std::vector<double>;

/// C^{1,1} boundary graph x_d = P(x') with a validity radius around the
/// chart origin. Gradient and Hessian may be supplied analytically; when
/// absent they are formed by central differences with step 1e-5.
struct GraphDomain {
    std::function<double(const Vector&)> profile;                 // P : R^{d-1} -> R
    std::function<Vector(const Vector&)> gradient;                // optional
    std::function<Matrix(const Vector&)> hessian;                 // optional
    double validity_radius = 1.0;

    Vector grad(const Vector& xp) const;
    Matrix hess(const Vector& xp) const;
};

struct FlattenResult {
    PhasePoint z_hat;   // (t, P(x), P'(x) v)
    Matrix A_hat;       // P' A P'^T
    Vector B_hat;       // P' B - v (x) v : D^2 P
    Matrix P_prime;     // Jacobian of the flattening map, unit lower-triangular
    double chart_constant = 1.0;  // C >= 1 with eig(A_hat) in [lambda/C, C*Lambda]
};

/// Flattening transform of the coefficients at a phase point. The point's
/// position must lie within the chart's validity radius.
FlattenResult flatten_coefficients(const GraphDomain& dom, const Matrix& A,
                                   const Vector& B, const PhasePoint& z);

/// Eigenvalue range of a symmetric matrix (used to verify ellipticity bounds).
std::pair<double, double> symmetric_eig_range(const Matrix& A);

double det_lower_triangular(const Matrix& M);

}  // namespace kfplab
