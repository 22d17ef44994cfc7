#include "kfplab/holder.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kfplab/rng.hpp"

namespace kfplab {

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("fit_line needs >= 2 points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return out;
}

HolderFit fit_holder_exponent(const std::vector<std::pair<double, double>>& samples) {
    std::vector<double> lx, ly;
    int dropped = 0;
    for (const auto& [r, w] : samples) {
        if (!(r > 0.0)) throw std::invalid_argument("fit_holder_exponent: radius must be positive");
        if (!(w > 0.0)) {
            ++dropped;
            continue;
        }
        lx.push_back(std::log(r));
        ly.push_back(std::log(w));
    }
    for (std::size_t i = 0; i < lx.size(); ++i)
        for (std::size_t j = i + 1; j < lx.size(); ++j)
            if (lx[i] == lx[j])
                throw std::invalid_argument("fit_holder_exponent: radii must be distinct");
    if (lx.size() < 3)
        throw std::invalid_argument("fit_holder_exponent: fewer than 3 usable samples");
    const LineFit lf = fit_line(lx, ly);
    return HolderFit{lf.slope, lf.r_squared, dropped};
}

double oscillation_over_cylinder(const std::function<double(const PhasePoint&)>& f,
                                 const PhasePoint& center, double r,
                                 std::size_t n_samples, std::uint64_t seed,
                                 bool restrict_half_space) {
    const std::size_t d = center.dim();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t accepted = 0;
    PhasePoint w = PhasePoint::origin(d);
    for (std::size_t i = 0; i < n_samples; ++i) {
        // w in (-1,0] x B1 x B1, by rejection in the box for the balls
        w.t = -rng::uniform01(seed, i, 0, 0);
        double nx = 0, nv = 0;
        for (std::size_t k = 0; k < d; ++k) {
            w.x[k] = rng::uniform(seed, -1.0, 1.0, i, 1, k);
            w.v[k] = rng::uniform(seed, -1.0, 1.0, i, 2, k);
            nx += w.x[k] * w.x[k];
            nv += w.v[k] * w.v[k];
        }
        if (nx >= 1.0 || nv >= 1.0) continue;
        const PhasePoint z = compose(center, kinetic_scale(w, r));
        if (restrict_half_space && z.x[d - 1] > 0.0) continue;
        const double val = f(z);
        if (std::isnan(val)) continue;
        lo = std::min(lo, val);
        hi = std::max(hi, val);
        ++accepted;
    }
    if (accepted == 0) throw std::runtime_error("oscillation_over_cylinder: no admissible samples");
    return hi - lo;
}

}  // namespace kfplab
