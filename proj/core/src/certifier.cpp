#include "kfplab/certifier.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "kfplab/rng.hpp"

namespace kfplab {

namespace {
constexpr std::size_t kStarvationCap = 10000000;  // proposals without a hit

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}
}  // namespace

StencilConfig default_stencil(double v_extent) {
    StencilConfig st;
    st.dv = 1e-4 * v_extent;
    st.dx = st.dv * st.dv * st.dv;
    st.dt = st.dv * st.dv;
    return st;
}

double apply_L_fd(const CoefficientField& coeff,
                  const std::function<double(const PhasePoint&)>& f, const PhasePoint& z,
                  const StencilConfig& st) {
    const std::size_t d = z.dim();
    PhasePoint w = z;

    // backward difference in t (one-sided: the final slice t = 0 stays usable)
    const double f0 = f(z);
    w.t = z.t - st.dt;
    const double ft = f(w);
    w.t = z.t;
    double out = (f0 - ft) / st.dt;

    // v . grad_x by central differences
    for (std::size_t i = 0; i < d; ++i) {
        if (z.v[i] == 0.0) continue;
        w.x[i] = z.x[i] + st.dx;
        const double fp = f(w);
        w.x[i] = z.x[i] - st.dx;
        const double fm = f(w);
        w.x[i] = z.x[i];
        out += z.v[i] * (fp - fm) / (2.0 * st.dx);
    }

    const Matrix A = coeff.A(z);
    const Vector B = coeff.B(z);

    // -A : D_v^2 and -B . grad_v, central
    for (std::size_t i = 0; i < d; ++i) {
        w.v[i] = z.v[i] + st.dv;
        const double fp = f(w);
        w.v[i] = z.v[i] - st.dv;
        const double fm = f(w);
        w.v[i] = z.v[i];
        out -= A[i][i] * (fp - 2.0 * f0 + fm) / (st.dv * st.dv);
        out -= B[i] * (fp - fm) / (2.0 * st.dv);
        for (std::size_t j = i + 1; j < d; ++j) {
            w.v[i] = z.v[i] + st.dv; w.v[j] = z.v[j] + st.dv;
            const double fpp = f(w);
            w.v[j] = z.v[j] - st.dv;
            const double fpm = f(w);
            w.v[i] = z.v[i] - st.dv;
            const double fmm = f(w);
            w.v[j] = z.v[j] + st.dv;
            const double fmp = f(w);
            w.v[i] = z.v[i]; w.v[j] = z.v[j];
            out -= 2.0 * A[i][j] * (fpp - fpm - fmp + fmm) / (4.0 * st.dv * st.dv);
        }
    }
    return out;
}

nlohmann::json CertificateReport::to_json() const {
    nlohmann::json j;
    j["lemma"] = lemma;
    j["params"] = {{"mode", to_string(params.mode)}, {"r_tilde", params.r_tilde},
                   {"kappa", params.kappa},          {"a", params.a},
                   {"b", params.b},                  {"c", params.c},
                   {"h", params.h},                  {"v_tilde_d", params.v_tilde_d},
                   {"v0_weight", params.v0_weight}};
    j["anchor"] = {{"xi_d", anchor.xi_d}, {"eta_d", anchor.eta_d}, {"rho0", anchor.rho0}};
    j["seed"] = seed;
    j["samples"] = samples;
    j["violations"] = violations;
    j["min_margin"] = min_margin;
    j["theta0_used"] = theta0_used;
    j["wall_ms"] = wall_ms;
    j["window_ok"] = window_ok;
    j["gate_ok"] = gate_ok;
    j["fd_max_rel_diff"] = fd_max_rel_diff;
    if (!note.empty()) j["note"] = note;
    return j;
}

CertificateReport certify_region(
    const CoefficientField& coeff, const std::function<double(const PhasePoint&)>& barrier,
    const std::function<bool(std::uint64_t, PhasePoint&)>& sampler,
    const std::function<double(const PhasePoint&)>& bound, std::size_t n_samples,
    std::uint64_t seed, const StencilConfig& st) {
    const auto t0 = Clock::now();
    CertificateReport rep;
    rep.lemma = "generic";
    rep.seed = seed;
    PhasePoint z(0.0, 0.0, 0.0);
    rep.min_margin = std::numeric_limits<double>::infinity();
    std::uint64_t proposal = 0;
    std::size_t accepted = 0;
    while (accepted < n_samples) {
        if (proposal >= kStarvationCap && accepted == 0)
            throw std::runtime_error("certify_region: sampler starvation");
        const bool ok = sampler(proposal++, z);
        if (!ok) continue;
        const double margin = apply_L_fd(coeff, barrier, z, st) - bound(z);
        rep.min_margin = std::min(rep.min_margin, margin);
        if (margin < 0.0) ++rep.violations;
        ++accepted;
    }
    rep.samples = accepted;
    rep.wall_ms = ms_since(t0);
    return rep;
}

namespace {

struct LemmaSetup {
    BarrierParams p;
    AnchorPoint anc;
    double t_window = 0.0;   // certified region: t in (-t_window, 0]
    double x_lo = 0.0;       // shifted x-coordinate sample range (see samplers)
    double v_half = 0.0;     // |V_d| half-extent
};

LemmaSetup make_setup(BarrierMode mode, const std::string& lemma, double rt, double vd,
                      const CertifyOptions& opts, CertificateReport& rep) {
    LemmaSetup s;
    bool window_ok = true;
    try {
        s.p = select_params(mode, rt, vd, opts.v0_weight, opts.theta0, true);
    } catch (const std::invalid_argument&) {
        window_ok = false;
        s.p = select_params(mode, rt, vd, opts.v0_weight, opts.theta0, false);
    }
    rep.window_ok = window_ok;
    rep.lemma = lemma;
    rep.params = s.p;
    rep.theta0_used = s.p.theta0;
    const auto verdict = check_constraints(s.p);
    rep.gate_ok = verdict.required_ok;
    if (!verdict.required_ok || !window_ok) {
        if (!opts.allow_gate_override) {
            throw constraint_gate_error("certify: constraint gate rejected " + lemma + ": " +
                                        (verdict.required_ok ? "admissibility window" :
                                                               verdict.violated));
        }
        rep.note = "gate overridden: " +
                   (verdict.required_ok ? std::string("admissibility window") : verdict.violated);
    }
    s.anc = anchor_point(s.p);
    rep.anchor = s.anc;
    s.v_half = std::sqrt(12.0 * s.p.a / s.p.c) * rt * 1.1;
    if (lemma == "phase-prop") {
        s.t_window = 10.0 * std::cbrt(rt * rt);
    } else if (lemma == "barrier-ss") {
        s.t_window = 10.0 * rt / std::abs(vd);
    } else if (lemma == "barrier-g") {
        s.t_window = 10.0 / s.p.theta0 * std::cbrt(rt * rt);
    }
    s.x_lo = -4.0 * rt * 1.1;
    return s;
}

/// P_T sampler in sheared coordinates: (t, X^t, V) uniform boxes, accepted on
/// the shell and on x_d <= 0. The shear x_d -> X^t has unit Jacobian, so this
/// is uniform rejection sampling of the bounding box implied by the range
/// bounds, inflated by 10%.
bool sample_PT(const LemmaSetup& s, std::uint64_t seed, std::uint64_t i, bool time_shifted,
               double& t, double& x, double& v) {
    const auto& p = s.p;
    t = s.t_window > 0.0 ? -s.t_window * rng::uniform01(seed, i, 0) : 0.0;
    const double Xl = time_shifted ? rng::uniform(seed, s.x_lo, -0.9 * p.r_tilde, i, 1)
                                   : rng::uniform(seed, s.x_lo, -s.anc.xi_d, i, 1);
    const double V = rng::uniform(seed, -s.v_half, s.v_half, i, 2);
    const double shift = time_shifted ? p.h * p.v_tilde_d * t : 0.0;
    x = Xl + shift + s.anc.xi_d;
    if (x > 0.0) return false;
    v = V + s.anc.eta_d;
    const double q = p.a * Xl * Xl - 2.0 * p.b * Xl * V + p.c * V * V;
    const double r0s = s.anc.rho0 * s.anc.rho0;
    return q >= r0s && q <= 9.0 * r0s;
}

struct MarginAccumulator {
    double min_margin = std::numeric_limits<double>::infinity();
    std::size_t violations = 0;
    void add(double m) {
        min_margin = std::min(min_margin, m);
        if (m < 0.0) ++violations;
    }
};

/// d=1 operator value for F = Phi(rho_t^2) given Phi', Phi'' at rho_t^2,
/// constant coefficients A (scalar), B = 0.
double L_quadratic_barrier(const BarrierParams& p, const AnchorPoint& anc, double t, double x,
                           double v, double d1, double d2, double A) {
    const double X = x - p.h * p.v_tilde_d * t - anc.xi_d;
    const double V = v - anc.eta_d;
    const double aXbV = p.a * X - p.b * V;
    const double qv = 2.0 * (p.c * V - p.b * X);
    const double qt = -2.0 * p.h * p.v_tilde_d * aXbV;
    const double qx = 2.0 * aXbV;
    return d1 * (qt + v * qx) - A * (d2 * qv * qv + d1 * 2.0 * p.c);
}

void run_fd_crosscheck(const CoefficientField& coeff,
                       const std::function<double(const PhasePoint&)>& barrier,
                       const PhasePoint& z, double analytic, const StencilConfig& st,
                       double scale, CertificateReport& rep) {
    const double fd = apply_L_fd(coeff, barrier, z, st);
    const double rel = std::abs(fd - analytic) / std::max(std::abs(analytic), scale * 1e-9);
    rep.fd_max_rel_diff = std::max(rep.fd_max_rel_diff, rel);
}

}  // namespace

CertificateReport certify_lemma(const std::string& lemma, double rt, double vd,
                                const CertifyOptions& opts) {
    const auto t0 = Clock::now();
    CertificateReport rep;
    rep.seed = opts.seed;

    const CoefficientField coeff = make_coefficients("constant");
    const double A = 1.0;

    if (lemma == "phase-prop" || lemma == "barrier-ss") {
        const BarrierMode mode = lemma == "phase-prop" ? BarrierMode::incoming_gradient
                                                       : BarrierMode::exponential;
        LemmaSetup s = make_setup(mode, lemma, rt, vd, opts, rep);
        const double rho0sq = s.anc.rho0 * s.anc.rho0;
        const double bound = lemma == "phase-prop" ? std::abs(vd) / (8.0 * rt) : 0.0;

        // profiles
        ExpBarrierState exp_state;
        double Theta = 0.0;
        if (lemma == "barrier-ss") {
            const double C0 = 1e-3;  // reported feasible constant, Theta = C0 |vd|^5
            Theta = C0 * std::pow(std::abs(vd), 5.0);
            exp_state = phi_ode_barrier(Theta, rho0sq);
        }
        const auto d1 = [&](double tau) {
            return lemma == "phase-prop" ? 1.0 / rho0sq : exp_state.d1(tau);
        };
        const auto d2 = [&](double tau) {
            return lemma == "phase-prop" ? 0.0 : exp_state.d2(tau);
        };

        MarginAccumulator acc;
        std::uint64_t proposal = 0;
        std::size_t accepted = 0, checked = 0;
        const StencilConfig st = default_stencil(2.0 * s.v_half);
        // quadrature-backed Phi values need a larger step for stable second
        // differences in the cross-check
        StencilConfig st_fd = st;
        if (lemma == "barrier-ss") {
            st_fd.dv = 1e-3 * 2.0 * s.v_half;
            st_fd.dx = st_fd.dv * st_fd.dv * st_fd.dv;
            st_fd.dt = st_fd.dv * st_fd.dv;
        }
        while (accepted < opts.n_samples) {
            if (proposal >= kStarvationCap && accepted == 0)
                throw std::runtime_error("certify_lemma: sampler starvation");
            double t, x, v;
            if (!sample_PT(s, opts.seed, proposal++, true, t, x, v)) continue;
            const double X = x - s.p.h * s.p.v_tilde_d * t - s.anc.xi_d;
            const double V = v - s.anc.eta_d;
            const double tau = s.p.a * X * X - 2.0 * s.p.b * X * V + s.p.c * V * V;
            const double L = L_quadratic_barrier(s.p, s.anc, t, x, v, d1(tau), d2(tau), A);
            acc.add(L - bound);
            if (checked < opts.fd_check_samples) {
                const auto barrier_fn = [&](const PhasePoint& z) {
                    const double Xz = z.x[0] - s.p.h * s.p.v_tilde_d * z.t - s.anc.xi_d;
                    const double Vz = z.v[0] - s.anc.eta_d;
                    const double tz = s.p.a * Xz * Xz - 2.0 * s.p.b * Xz * Vz + s.p.c * Vz * Vz;
                    return lemma == "phase-prop" ? tz / rho0sq - 1.0 : exp_state.value(tz);
                };
                run_fd_crosscheck(coeff, barrier_fn, PhasePoint(t, x, v), L, st_fd, bound + 1.0,
                                  rep);
                ++checked;
            }
            ++accepted;
        }
        rep.samples = accepted;
        rep.violations = acc.violations;
        rep.min_margin = acc.min_margin;
        rep.wall_ms = ms_since(t0);
        return rep;
    }

    if (lemma == "barrier-g") {
        LemmaSetup s = make_setup(BarrierMode::grazing, lemma, rt, vd, opts, rep);
        const double m = 5.0 / (opts.lambda * s.p.theta0 * s.p.theta0);
        const PowerBarrier phi{s.anc.rho0, m};
        MarginAccumulator acc;
        std::uint64_t proposal = 0;
        std::size_t accepted = 0, checked = 0;
        while (accepted < opts.n_samples) {
            if (proposal >= kStarvationCap && accepted == 0)
                throw std::runtime_error("certify_lemma: sampler starvation");
            double t, x, v;
            if (!sample_PT(s, opts.seed, proposal++, false, t, x, v)) continue;
            const double X = x - s.anc.xi_d;
            const double V = v - s.anc.eta_d;
            const double q = s.p.a * X * X - 2.0 * s.p.b * X * V + s.p.c * V * V;
            const double r = std::sqrt(q);
            const double w = r - s.p.h * t;
            // ratio form: L(varphi(rho - h t)) / varphi'(w) >= 1/48; varphi' > 0,
            // so the sign of the margin matches the displayed inequality while
            // avoiding the underflow of varphi' at large m.
            const double qv = 2.0 * (s.p.c * V - s.p.b * X);
            const double aXbV = s.p.a * X - s.p.b * V;
            const double ratio = -s.p.h + v * aXbV / r +
                                 A * qv * qv * ((m + 1.0) / (4.0 * w * r * r) +
                                                1.0 / (4.0 * r * r * r)) -
                                 A * s.p.c / r;
            acc.add(ratio - 1.0 / 48.0);
            // cross-check where varphi' is representable; steps sized to the
            // barrier's curvature scale w/m
            if (checked < opts.fd_check_samples && (m + 1.0) * std::log(w / s.anc.rho0) < 300.0) {
                // steps sized so the barrier varies by O(0.03) per step: the
                // radial scale is w/m through the gradient, sqrt(w rho / (m c))
                // through the curvature of rho in v
                const double drho = 0.03 * w / m;
                const double dv_grad = drho / std::max(std::abs(qv) / (2.0 * r), 1e-300);
                const double dv_curv = std::sqrt(2.0 * drho * r / s.p.c);
                StencilConfig st;
                st.dv = std::min(dv_grad, dv_curv);
                st.dx = drho / std::max(std::abs(aXbV) / r, 1e-300);
                st.dt = drho / s.p.h;
                const auto barrier_fn = [&](const PhasePoint& z) {
                    const double Xz = z.x[0] - s.anc.xi_d;
                    const double Vz = z.v[0] - s.anc.eta_d;
                    const double rz = std::sqrt(s.p.a * Xz * Xz - 2.0 * s.p.b * Xz * Vz +
                                                s.p.c * Vz * Vz);
                    return phi.value(rz - s.p.h * z.t);
                };
                const double Lphi = ratio * phi.d1(w);
                run_fd_crosscheck(coeff, barrier_fn, PhasePoint(t, x, v), Lphi, st,
                                  phi.d1(w), rep);
                ++checked;
            }
            ++accepted;
        }
        rep.samples = accepted;
        rep.violations = acc.violations;
        rep.min_margin = acc.min_margin;
        rep.wall_ms = ms_since(t0);
        return rep;
    }

    if (lemma == "hypodist") {
        // range and coercivity bounds over sampled P, exponential recipe
        LemmaSetup s = make_setup(BarrierMode::exponential, lemma, rt, vd, opts, rep);
        MarginAccumulator acc;
        std::uint64_t proposal = 0;
        std::size_t accepted = 0;
        const double avd = std::abs(vd);
        const double co_scale = s.p.a * rt * avd;
        while (accepted < opts.n_samples) {
            if (proposal >= kStarvationCap && accepted == 0)
                throw std::runtime_error("certify_lemma: sampler starvation");
            double t, x, v;
            if (!sample_PT(s, opts.seed, proposal++, false, t, x, v)) continue;
            const double X = x - s.anc.xi_d;
            const double V = v - s.anc.eta_d;
            // normalized margins: ranges against r, coercivity against a r |vd|
            acc.add((std::abs(X) - rt * (1.0 - 1e-9)) / rt);
            acc.add((4.0 * rt - std::abs(X)) / rt);
            acc.add((std::sqrt(12.0 * s.p.a / s.p.c) * rt - std::abs(V)) /
                    (std::sqrt(12.0 * s.p.a / s.p.c) * rt));
            acc.add((std::abs(v) - avd / 2.0) / avd);
            acc.add((v * (s.p.a * X - s.p.b * V) - co_scale / 4.0) / co_scale);
            ++accepted;
        }
        rep.samples = accepted;
        rep.violations = acc.violations;
        rep.min_margin = acc.min_margin;
        rep.wall_ms = ms_since(t0);
        return rep;
    }

    throw std::invalid_argument("certify_lemma: unknown lemma " + lemma);
}

}  // namespace kfplab
