#include "kfplab/barriers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kfplab/quadrature.hpp"
#include "kfplab/special_functions.hpp"

namespace kfplab {

namespace {
constexpr double kRelSlack = 4e-12;

bool geq(double lhs, double rhs) {  // lhs >= rhs up to relative slack
    return lhs >= rhs - kRelSlack * std::max(std::abs(lhs), std::abs(rhs));
}

[[noreturn]] void window_error(const char* ineq, double lhs, double rhs) {
    std::ostringstream os;
    os << "select_params: admissibility window violated: " << ineq << " (" << lhs << " > " << rhs
       << ")";
    throw std::invalid_argument(os.str());
}
}  // namespace

const char* to_string(BarrierMode m) {
    switch (m) {
        case BarrierMode::incoming_gradient: return "incoming_gradient";
        case BarrierMode::exponential: return "exponential";
        default: return "grazing";
    }
}

BarrierMode barrier_mode_from_string(const std::string& s) {
    if (s == "incoming_gradient") return BarrierMode::incoming_gradient;
    if (s == "exponential") return BarrierMode::exponential;
    if (s == "grazing") return BarrierMode::grazing;
    throw std::invalid_argument("unknown barrier mode: " + s);
}

double default_theta0(BarrierMode mode) {
    return mode == BarrierMode::grazing ? 1.0 / 32.0 : 1.0 / 1024.0;
}

BarrierParams select_params(BarrierMode mode, double r_tilde, double v_tilde_d,
                            double v0_weight, double theta0, bool enforce_window) {
    if (!(r_tilde > 0.0)) throw std::invalid_argument("select_params: r_tilde must be positive");
    if (!(v_tilde_d < 0.0))
        throw std::invalid_argument("select_params: v_tilde_d must be negative (incoming)");
    if (!(v0_weight >= 1.0)) throw std::invalid_argument("select_params: v0 weight must be >= 1");
    if (theta0 < 0.0) theta0 = default_theta0(mode);
    const double theta_cap = mode == BarrierMode::grazing ? 1.0 / 32.0 : 1.0 / 16.0;
    if (!(theta0 > 0.0 && theta0 <= theta_cap))
        throw std::invalid_argument("select_params: theta0 out of range");

    const double avd = std::abs(v_tilde_d);
    const double w2 = v0_weight * v0_weight;
    // Windows use the largest admissible smallness constant 1/16; the
    // per-instance theta0 is kept for the grazing recipe and for reports.
    const double theta_win = 1.0 / 16.0;
    if (enforce_window) {
        switch (mode) {
            case BarrierMode::incoming_gradient: {
                const double lhs = std::cbrt(r_tilde);
                const double rhs = theta_win * std::min(avd, 1.0 / w2);
                if (!geq(rhs, lhs)) window_error("r^(1/3) <= (1/16) min{|vd|, <v0>^-2}", lhs, rhs);
                break;
            }
            case BarrierMode::exponential: {
                const double rhs = theta_win * std::min(avd * avd * avd, 1.0 / (w2 * w2 * w2));
                if (!geq(rhs, r_tilde)) window_error("r <= (1/16) min{|vd|^3, <v0>^-6}", r_tilde, rhs);
                break;
            }
            case BarrierMode::grazing: {
                const double rhs = std::min(avd * avd * avd, 1.0 / (w2 * w2 * w2));
                if (!geq(rhs, r_tilde)) window_error("r <= min{|vd|^3, <v0>^-6}", r_tilde, rhs);
                break;
            }
        }
    }

    BarrierParams p;
    p.mode = mode;
    p.r_tilde = r_tilde;
    p.v_tilde_d = v_tilde_d;
    p.v0_weight = v0_weight;
    p.theta0 = theta0;
    const double r23 = std::cbrt(r_tilde * r_tilde);
    switch (mode) {
        case BarrierMode::incoming_gradient:
            p.kappa = 1.0;
            p.a = 1.0 / r23;
            p.b = 1.0 / 16.0;
            p.c = r23 / 4.0;
            p.h = 1.0 / 36.0;
            break;
        case BarrierMode::exponential:
            p.kappa = 1.0 / 64.0;
            p.a = avd * avd / r_tilde;
            p.b = avd;
            p.c = 64.0 * r_tilde;
            p.h = 1.0 / 36.0;
            break;
        case BarrierMode::grazing:
            p.kappa = std::sqrt(theta0) / 256.0;
            p.a = 1.0 / r23;
            p.b = theta0;
            p.c = 2.0 * theta0 * r23;
            p.h = theta0;
            break;
    }
    return p;
}

ConstraintVerdict check_constraints(const BarrierParams& p) {
    ConstraintVerdict v;
    const double avd = std::abs(p.v_tilde_d);
    const double sac = std::sqrt(p.a * p.c);
    v.abc_root = geq(sac, 8.0 * p.b);
    v.abc_ratio = geq(p.a, 4.0 * p.c);
    v.abc_scale = geq(p.v0_weight, std::sqrt(p.a / p.c) * p.r_tilde);
    v.vr = geq(avd, 2.0 * p.b * p.r_tilde / p.c);
    v.vrs = geq(avd, 8.0 * std::sqrt(p.a / p.c) * p.r_tilde);
    const bool abc = v.abc_root && v.abc_ratio && v.abc_scale;
    const bool coercive = p.mode == BarrierMode::grazing ? v.vr : v.vrs;
    v.required_ok = abc && coercive;
    if (!v.abc_root) v.violated = "sqrt(ac) >= 8b";
    else if (!v.abc_ratio) v.violated = "a >= 4c";
    else if (!v.abc_scale) v.violated = "sqrt(a/c) r <= <v0>";
    else if (!coercive) v.violated = p.mode == BarrierMode::grazing ? "|vd| >= 2br/c" : "|vd| >= 8 sqrt(a/c) r";
    return v;
}

AnchorPoint anchor_point(const BarrierParams& p) {
    const double ac = p.a * p.c;
    if (!(ac > p.b * p.b)) throw std::invalid_argument("anchor_point: requires ac > b^2");
    AnchorPoint anc;
    anc.xi_d = std::sqrt(ac) * p.r_tilde / std::sqrt(ac - p.b * p.b);
    anc.eta_d = p.v_tilde_d + p.b / p.c * anc.xi_d;
    anc.rho0 = std::sqrt(p.a) * p.r_tilde;
    return anc;
}

namespace {
double rho2_impl(const BarrierParams& p, const AnchorPoint& anc, double x_shift_d,
                 const std::vector<double>& x, const std::vector<double>& v) {
    if (x.size() != v.size() || x.empty())
        throw std::invalid_argument("rho: dimension mismatch");
    const std::size_t d = x.size();
    const double X = x[d - 1] - x_shift_d - anc.xi_d;
    const double V = v[d - 1] - anc.eta_d;
    double perp = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i)
        perp += p.a * p.kappa * p.kappa * x[i] * x[i] + p.c * v[i] * v[i];
    return perp + p.a * X * X - 2.0 * p.b * X * V + p.c * V * V;
}
}  // namespace

double rho(const BarrierParams& p, const AnchorPoint& anc, const std::vector<double>& x,
           const std::vector<double>& v) {
    const double q = rho2_impl(p, anc, 0.0, x, v);
    if (q < 0.0) throw std::domain_error("rho: negative radicand (constraints violated)");
    return std::sqrt(q);
}

double rho_t(const BarrierParams& p, const AnchorPoint& anc, double t,
             const std::vector<double>& x, const std::vector<double>& v) {
    const double q = rho2_impl(p, anc, p.h * p.v_tilde_d * t, x, v);
    if (q < 0.0) throw std::domain_error("rho_t: negative radicand (constraints violated)");
    return std::sqrt(q);
}

bool region_P_membership(const BarrierParams& p, const AnchorPoint& anc, double t,
                         const std::vector<double>& x, const std::vector<double>& v) {
    if (t > 0.0) return false;
    if (x.back() > 0.0) return false;
    const double r = rho_t(p, anc, t, x, v);
    return r >= anc.rho0 && r <= 3.0 * anc.rho0;
}

QuasiDistanceFrame quasi_distance_frame(const BarrierParams& p, const AnchorPoint& anc,
                                        double t, const std::vector<double>& x,
                                        const std::vector<double>& v) {
    const std::size_t d = x.size();
    QuasiDistanceFrame f;
    f.dx.assign(d, 0.0);
    f.dv.assign(d, 0.0);
    const double X = x[d - 1] - p.h * p.v_tilde_d * t - anc.xi_d;
    const double V = v[d - 1] - anc.eta_d;
    f.rho2 = p.a * X * X - 2.0 * p.b * X * V + p.c * V * V;
    for (std::size_t i = 0; i + 1 < d; ++i) {
        f.rho2 += p.a * p.kappa * p.kappa * x[i] * x[i] + p.c * v[i] * v[i];
        f.dx[i] = 2.0 * p.a * p.kappa * p.kappa * x[i];
        f.dv[i] = 2.0 * p.c * v[i];
    }
    const double aXbV = p.a * X - p.b * V;
    f.dt = -2.0 * p.h * p.v_tilde_d * aXbV;
    f.dx[d - 1] = 2.0 * aXbV;
    f.dv[d - 1] = 2.0 * (p.c * V - p.b * X);
    f.dvv_diag = 2.0 * p.c;
    return f;
}

double ExpBarrierState::value(double tau) const {
    if (tau < 0.0) throw std::domain_error("ExpBarrierState::value: tau must be >= 0");
    if (tau == tau0) return 0.0;
    const double Th = Theta;
    return integrate([Th](double s) { return s <= 0.0 ? 0.0 : std::exp(-Th / s); }, tau0, tau,
                     1e-13) /
           norm;
}

double ExpBarrierState::value_table(double tau) const {
    const auto phi_raw = [this](double s) {
        const double hi = 9.0 * tau0;
        if (s <= 0.0) return 0.0;
        if (s >= hi) return lookup.back();
        const double u = s / hi * static_cast<double>(lookup.size() - 1);
        const auto i = static_cast<std::size_t>(u);
        const double w = u - static_cast<double>(i);
        return lookup[i] * (1.0 - w) + lookup[std::min(i + 1, lookup.size() - 1)] * w;
    };
    return (phi_raw(tau) - phi_raw(tau0)) / norm;
}

double ExpBarrierState::d1(double tau) const { return std::exp(-Theta / tau) / norm; }

double ExpBarrierState::d2(double tau) const {
    return Theta / (tau * tau) * std::exp(-Theta / tau) / norm;
}

ExpBarrierState phi_ode_barrier(double Theta, double tau0, std::size_t table_size) {
    if (!(Theta > 0.0) || !(tau0 > 0.0))
        throw std::invalid_argument("phi_ode_barrier: Theta and tau0 must be positive");
    ExpBarrierState st;
    st.Theta = Theta;
    st.tau0 = tau0;
    st.norm = integrate([Theta](double s) { return s <= 0.0 ? 0.0 : std::exp(-Theta / s); }, tau0,
                        9.0 * tau0, 1e-13);
    if (!(st.norm > 0.0)) throw std::runtime_error("phi_ode_barrier: degenerate normalization");
    // cumulative composite Simpson on [0, 9 tau0]
    st.lookup.assign(table_size + 1, 0.0);
    const double hi = 9.0 * tau0;
    const double dh = hi / static_cast<double>(table_size);
    const auto f = [Theta](double s) { return s <= 0.0 ? 0.0 : std::exp(-Theta / s); };
    double acc = 0.0;
    for (std::size_t i = 0; i < table_size; ++i) {
        const double a = dh * static_cast<double>(i);
        const double b = a + dh;
        acc += dh / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
        st.lookup[i + 1] = acc;
    }
    return st;
}

double varphi_power(double rho0, double m, double rho_val) {
    if (!(rho0 > 0.0) || !(m >= 1.0))
        throw std::invalid_argument("varphi_power: requires rho0 > 0, m >= 1");
    if (rho_val < rho0 * (1.0 - 1e-12))
        throw std::domain_error("varphi_power: rho below rho0");
    const double s = std::max(rho_val / rho0, 1.0);
    const double sm = std::exp(-m * std::log(s));        // s^-m
    const double tm = std::exp(-m * std::log(3.0));      // 3^-m
    return (1.0 - sm) / (1.0 - tm);
}

double PowerBarrier::value(double r) const { return varphi_power(rho0, m, r); }

double PowerBarrier::d1(double r) const {
    const double s = std::max(r / rho0, 1.0);
    const double tm = std::exp(-m * std::log(3.0));
    return m / rho0 * std::exp(-(m + 1.0) * std::log(s)) / (1.0 - tm);
}

double PowerBarrier::d2(double r) const { return -(m + 1.0) / r * d1(r); }

double grazing_Psi(double t, double x_d, double v_d) {
    return psi_exact(x_d, v_d) - 2.0 * v_d - v_d * v_d - t;
}

}  // namespace kfplab
