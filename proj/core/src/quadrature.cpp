#include "kfplab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace kfplab {

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b, double fa,
             double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_floor, int max_depth) {
    if (a == b) return 0.0;
    if (!(a < b)) return -integrate(f, b, a, rel_tol, abs_floor, max_depth);
    const double fa = f(a), fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = simpson(fa, fm, fb, b - a);
    const double tol = std::max(std::abs(whole) * rel_tol, abs_floor);
    const double out = adapt(f, a, b, fa, fm, fb, whole, tol, max_depth);
    if (std::isnan(out)) throw std::runtime_error("integrate: NaN encountered");
    return out;
}

}  // namespace kfplab
