#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kfplab {

/// Raised when Tricomi parameters leave the supported envelope (integer b),
/// as opposed to a plain domain error on the argument.
struct unsupported_parameters : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Gamma function on the reals excluding the poles {0, -1, -2, ...}.
double gamma_fn(double x);

/// Tricomi confluent hypergeometric function U(a, b, x) for real non-integer
/// b and x >= 0. Evaluation: Kummer splitting series for small x, Laplace
/// integral representation at mid range (via the three-term recurrence in a
/// when a <= 0), large-x asymptotic series beyond.
double tricomi_u(double a, double b, double x);

/// Profile of the stationary half-space solution:
///   Upsilon(tau) = U(-1/6, 2/3, tau)            for tau >= 0,
///   Upsilon(tau) = (e^tau / 6) U(5/6, 2/3, -tau) for tau <= 0.
/// Continuous and strictly positive on R.
double upsilon(double tau);

/// Stationary solution psi(x_d, v_d) = (-x_d)^{1/6} Upsilon(-v_d^3 / (9 x_d))
/// on {x_d <= 0}. At x_d = 0 the continuous limit is used: 0 for v_d <= 0 and
/// 9^{-1/6} sqrt(v_d) for v_d > 0.
double psi_exact(double x_d, double v_d);

/// Asymptotic regions of psi near the grazing point, inside the unit box.
enum class PsiRegion { R0, Rplus, Rminus, outside };

const char* to_string(PsiRegion r);

/// Region tag for (x_d, v_d) with weight constant c_star in (0,1).
/// On shared boundaries the tie-break order is R0 > Rplus > Rminus; points of
/// the unit box past the Rminus layer (v_d < 0, |x_d| >= |c_star v_d|^3)
/// classify with the power-law zone R0.
PsiRegion classify_region(double x_d, double v_d, double c_star);

struct CstarCalibration {
    double c_star = 0.5;
    double ratio_r0 = 0.0;      // C/c on R0
    double ratio_rplus = 0.0;   // C/c on R+
    double ratio_rminus = 0.0;  // C/c on R-
    bool passed = false;
};

/// Picks the largest c* in {2^-1, 2^-2, ...} whose sampled comparability
/// ratios satisfy C/c <= 10 on all three regions. The R- weight uses the
/// verified asymptotic |x| |v|^{-5/2} exp(v^3/(9x) ...) rather than the bare
/// sqrt(|v|) exponential, which is not comparable near x = 0.
CstarCalibration calibrate_c_star(std::size_t samples_per_region = 10000,
                                  std::uint64_t seed = 2024);

}  // namespace kfplab
