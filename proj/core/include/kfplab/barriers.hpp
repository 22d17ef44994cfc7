#pragma once

#include <string>
#include <vector>

#include "kfplab/phase_point.hpp"

namespace kfplab {

enum class BarrierMode { incoming_gradient, exponential, grazing };

const char* to_string(BarrierMode m);
BarrierMode barrier_mode_from_string(const std::string& s);

/// Parameter tuple of the quasi-distance barriers. theta0 is the smallness
/// constant of the recipes (it enters the grazing recipe directly; for the
/// other modes it is carried for reporting and the admissibility search).
struct BarrierParams {
    BarrierMode mode = BarrierMode::incoming_gradient;
    double r_tilde = 0.0;
    double kappa = 1.0;
    double a = 0.0, b = 0.0, c = 0.0;
    double h = 0.0;
    double v_tilde_d = -1.0;   // incoming: < 0
    double v0_weight = 1.0;    // <v_0> >= 1
    double theta0 = 1.0 / 1024.0;
};

/// Recipes:
///   incoming_gradient: kappa=1,            a=r^{-2/3},     b=1/16,  c=r^{2/3}/4,      h=1/36
///   exponential:       kappa=1/64,         a=|vd|^2/r,     b=|vd|,  c=64 r,           h=1/36
///   grazing:           kappa=sqrt(th0)/256, a=r^{-2/3},    b=th0,   c=2 th0 r^{2/3},  h=th0
/// Admissibility windows (checked with the largest admissible smallness
/// constant 1/16; pass enforce_window=false to construct out-of-window
/// parameters deliberately):
///   incoming_gradient: r^{1/3} <= (1/16) min{|vd|, <v0>^-2}
///   exponential:       r       <= (1/16) min{|vd|^3, <v0>^-6}
///   grazing:           r       <=        min{|vd|^3, <v0>^-6}
BarrierParams select_params(BarrierMode mode, double r_tilde, double v_tilde_d,
                            double v0_weight = 1.0, double theta0 = -1.0,
                            bool enforce_window = true);

/// Default theta0 per mode: 1/1024 (incoming_gradient, exponential), 1/32 (grazing).
double default_theta0(BarrierMode mode);

struct ConstraintVerdict {
    bool abc_root = false;    // sqrt(ac) >= 8b
    bool abc_ratio = false;   // a >= 4c
    bool abc_scale = false;   // sqrt(a/c) r <= <v0>
    bool vr = false;          // |vd| >= 2 b r / c
    bool vrs = false;         // |vd| >= 8 sqrt(a/c) r
    bool required_ok = false; // abc plus vr (grazing) or vrs (other modes)
    std::string violated;     // first violated required inequality, if any
};

/// Per-inequality check with relative slack 4e-12 (the recipes meet several
/// of these with exact equality).
ConstraintVerdict check_constraints(const BarrierParams& p);

struct AnchorPoint {
    double xi_d = 0.0;   // > 0, outside the half space
    double eta_d = 0.0;
    double rho0 = 0.0;   // sqrt(a) r
};

/// Anchor (xi, eta) with b xi_d = c (eta_d - vd) and xi_d = sqrt(ac) r / sqrt(ac - b^2).
AnchorPoint anchor_point(const BarrierParams& p);

/// Quasi-distance rho(x, v): sqrt(a|k x'|^2 + c|v'|^2 + a X^2 - 2 b X V + c V^2)
/// with X = x_d - xi_d, V = v_d - eta_d. Throws on a negative radicand
/// (constraint violation).
double rho(const BarrierParams& p, const AnchorPoint& anc, const std::vector<double>& x,
           const std::vector<double>& v);

/// Time-shifted version: x_d is replaced by x_d - h vd t.
double rho_t(const BarrierParams& p, const AnchorPoint& anc, double t,
             const std::vector<double>& x, const std::vector<double>& v);

/// Membership in P_T = {rho0 <= rho_t <= 3 rho0, x_d <= 0, t <= 0}.
bool region_P_membership(const BarrierParams& p, const AnchorPoint& anc, double t,
                         const std::vector<double>& x, const std::vector<double>& v);

/// rho_t^2 together with the pieces needed to apply the operator analytically.
struct QuasiDistanceFrame {
    double rho2 = 0.0;     // rho_t^2
    double dt = 0.0;       // d/dt rho_t^2
    std::vector<double> dx;  // grad_x rho_t^2
    std::vector<double> dv;  // grad_v rho_t^2
    double dvv_diag = 0.0;   // D_v^2 rho_t^2 = dvv_diag * I
};
QuasiDistanceFrame quasi_distance_frame(const BarrierParams& p, const AnchorPoint& anc,
                                        double t, const std::vector<double>& x,
                                        const std::vector<double>& v);

/// Exponential barrier profile: phi'(tau) = exp(-Theta/tau), normalized so
/// Phi(tau0) = 0 and Phi(9 tau0) = 1. Derivatives are analytic; values come
/// from adaptive quadrature (a cumulative table on [0, 9 tau0] is kept for
/// monotone interpolation).
struct ExpBarrierState {
    double Theta = 1.0;
    double tau0 = 1.0;
    double norm = 1.0;                // phi(9 tau0) - phi(tau0)
    std::vector<double> lookup;       // cumulative phi on [0, 9 tau0]

    double value(double tau) const;       // Phi(tau), exact quadrature
    double value_table(double tau) const; // Phi(tau), table interpolation
    double d1(double tau) const;          // Phi'
    double d2(double tau) const;          // Phi''
};
ExpBarrierState phi_ode_barrier(double Theta, double tau0, std::size_t table_size = 4096);

/// Power barrier varphi(rho) = (rho^-m - rho0^-m) / ((3 rho0)^-m - rho0^-m),
/// evaluated in ratio form so large m does not overflow.
double varphi_power(double rho0, double m, double rho_val);

struct PowerBarrier {
    double rho0 = 1.0;
    double m = 1.0;
    double value(double r) const;  // varphi
    double d1(double r) const;     // varphi'  (>= 0)
    double d2(double r) const;     // varphi'' (= -(m+1) varphi' / r)
};

/// Grazing barrier Psi(t, x_d, v_d) = psi(x_d, v_d) - 2 v_d - v_d^2 - t.
double grazing_Psi(double t, double x_d, double v_d);

}  // namespace kfplab
