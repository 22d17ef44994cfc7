#pragma once

#include <functional>
#include <string>

#include "kfplab/flatten.hpp"
#include "kfplab/phase_point.hpp"

namespace kfplab {

/// Coefficients of the operator  L = d_t + v.grad_x - A : D_v^2 - B.grad_v  (- S).
/// Matrix-valued evaluators serve any dimension; the scalar (t, x, v)
/// evaluators are the d = 1 fast path used by the solver and certifier.
struct CoefficientField {
    std::function<Matrix(const PhasePoint&)> A;
    std::function<Vector(const PhasePoint&)> B;
    std::function<double(const PhasePoint&)> S;

    std::function<double(double, double, double)> A1;  // d=1: A(t,x,v)
    std::function<double(double, double, double)> B1;
    std::function<double(double, double, double)> S1;

    double lambda = 1.0;
    double Lambda = 1.0;
    std::string name = "constant";
    bool tx_independent = false;  // A, B, S depend on v only (enables cached solves)

    /// eig(A(z)) within [lambda, Lambda] and |B(z)| <= Lambda (1 + |v|^2).
    bool ellipticity_ok(const PhasePoint& z, double tol = 1e-9) const;
};

/// Registry: "constant" (A = 1, B = 0), "velocity-affine" (A = 1,
/// B = 0.2 - 0.5 v), or a user table file with rows "v  A(v)  B(v)"
/// (linear interpolation, constant extrapolation). The source term is
/// attached separately.
CoefficientField make_coefficients(const std::string& name,
                                   const std::string& table_path = "");

/// Attach a source: "zero", "one", or "const:<value>".
void set_source(CoefficientField& cf, const std::string& source_spec);

}  // namespace kfplab
