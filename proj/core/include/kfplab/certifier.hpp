#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "kfplab/barriers.hpp"
#include "kfplab/coefficient_field.hpp"
#include "kfplab/phase_point.hpp"

#include <nlohmann/json_fwd.hpp>

namespace kfplab {

/// Finite-difference stencil: backward in t, central in x and v.
struct StencilConfig {
    double dt = 1e-8;
    double dx = 1e-12;
    double dv = 1e-4;
};

/// Kinetically scaled default steps: dv = 1e-4 * v_extent, dx = dv^3, dt = dv^2.
StencilConfig default_stencil(double v_extent);

/// L f(z) = [d_t + v.grad_x - A:D_v^2 - B.grad_v] f at z by finite differences.
double apply_L_fd(const CoefficientField& coeff,
                  const std::function<double(const PhasePoint&)>& f, const PhasePoint& z,
                  const StencilConfig& st);

/// Thrown when the constraint gate rejects a certification request.
struct constraint_gate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CertificateReport {
    std::string lemma;
    BarrierParams params;
    AnchorPoint anchor;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double min_margin = 0.0;       // min over samples of lhs - rhs
    double theta0_used = 0.0;
    double wall_ms = 0.0;
    bool window_ok = true;         // admissibility window of the recipe
    bool gate_ok = true;           // required constraint set
    double fd_max_rel_diff = 0.0;  // analytic vs finite-difference cross-check
    std::string note;

    nlohmann::json to_json() const;
};

struct CertifyOptions {
    std::size_t n_samples = 100000;
    std::uint64_t seed = 1;
    double v0_weight = 1.0;
    double theta0 = -1.0;          // < 0: per-mode default
    bool allow_gate_override = false;
    std::size_t fd_check_samples = 48;
    double lambda = 1.0;           // ellipticity floor used by the grazing exponent m
};

/// Generic sampling certificate: draws points from the sampler (proposal ->
/// in-region flag), evaluates L(barrier) - bound at every accepted point by
/// finite differences, and reports the minimum margin and violation count.
CertificateReport certify_region(
    const CoefficientField& coeff, const std::function<double(const PhasePoint&)>& barrier,
    const std::function<bool(std::uint64_t, PhasePoint&)>& sampler,
    const std::function<double(const PhasePoint&)>& bound, std::size_t n_samples,
    std::uint64_t seed, const StencilConfig& st);

/// Lemma-specific certificates (d = 1, A = I, B = 0), analytic derivatives
/// with a finite-difference cross-check on a sample subset:
///   phase-prop:  L(Phi o rho_t^2) >= (1/8) |vd| / r         (linear Phi)
///   barrier-ss:  L(Phi o rho_t^2) >= 0                      (Phi from phi_ode_barrier)
///   barrier-g:   L(varphi(rho - h t)) >= (1/48) varphi'     (certified as a ratio)
///   hypodist:    range and coercivity bounds on sampled P
CertificateReport certify_lemma(const std::string& lemma, double r_tilde, double v_tilde_d,
                                const CertifyOptions& opts = {});

}  // namespace kfplab
