#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kfplab/coefficient_field.hpp"
#include "kfplab/phase_point.hpp"

namespace kfplab {

/// Uniform node grid on [-X, 0] x [-V, V] x [T0, 0]. x = 0 is a grid node and
/// n_v must be even so that v = 0 is a node (exact incoming/outgoing split).
struct HalfSpaceGrid {
    double X = 1.0;
    double V = 2.0;
    double T0 = -1.0;
    std::size_t n_x = 128;  // cells in x (nodes: n_x + 1)
    std::size_t n_v = 128;  // cells in v
    std::size_t n_t = 1000; // time steps

    double dx() const { return X / static_cast<double>(n_x); }
    double dv() const { return 2.0 * V / static_cast<double>(n_v); }
    double dt() const { return -T0 / static_cast<double>(n_t); }
    double x(std::size_t i) const { return -X + dx() * static_cast<double>(i); }
    double v(std::size_t j) const { return -V + dv() * static_cast<double>(j); }
    double t(std::size_t k) const { return T0 + dt() * static_cast<double>(k); }

    void validate() const;  // CFL and parity
};

/// Data on the kinetic boundary of the truncated half-space domain. The left
/// map (x = -X, v > 0) is a truncation artifact; when absent the scheme uses
/// a zero-gradient ghost there.
struct BoundaryData {
    std::function<double(double t, double v)> inflow;              // x = 0, v < 0
    std::function<double(double x, double v)> initial;             // t = T0
    std::function<double(double t, double x, double v)> truncation;  // |v| = V
    std::function<double(double t, double v)> left;                // x = -X, v > 0 (optional)
};

/// Named boundary families: "zero", "one", "psi" (the grazing barrier
/// Psi(t,x,v) on every face), "bump" (interior initial bump, zero elsewhere),
/// "custom:<path>" (t-independent inflow profile in v from a two-column file).
BoundaryData make_boundary_data(const std::string& name, const HalfSpaceGrid& grid);

struct SolutionField {
    HalfSpaceGrid grid;
    std::vector<double> final_slice;        // (n_x+1)*(n_v+1), x-major
    std::vector<double> stored;             // stored slices, t-major
    std::vector<double> stored_times;
    std::size_t store_every = 0;            // 0: only initial and final stored
    std::string scheme = "imex-upwind-tridiagonal";
    std::uint64_t coefficient_hash = 0;
    double field_min = 0.0, field_max = 0.0;  // over the march
    double data_min = 0.0, data_max = 0.0;    // over all boundary/initial data used

    double at(std::size_t i, std::size_t j) const;   // final slice
    double sample(double x, double v) const;          // final slice, bilinear
    /// Nearest stored slice in t, bilinear in (x, v).
    double sample_stored(double t, double x, double v) const;
};

/// Called after every completed step with (step index, time, slice).
using StepObserver = std::function<void(std::size_t, double, const std::vector<double>&)>;

/// IMEX march: explicit first-order upwind transport (outgoing nodes at x = 0
/// use the one-sided interior stencil; no condition is imposed there),
/// implicit centered diffusion with upwinded drift per x-column, inflow
/// imposed strongly at x = 0, v < 0. Coefficients independent of (t, x) get a
/// single cached factorization per column type.
SolutionField solve_grid(const HalfSpaceGrid& grid, const CoefficientField& coeff,
                         const BoundaryData& bdata, std::size_t store_every = 0,
                         const StepObserver& observer = nullptr);

/// Final-time trace along x at fixed incoming velocity (nearest-node snap).
struct BoundaryProfile {
    double v_used = 0.0;
    bool snapped = false;
    std::vector<std::pair<double, double>> points;  // (x, f(0, x, v_used))
};
BoundaryProfile boundary_profile(const SolutionField& sol, double v_query);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate of f at query points via time-reversed characteristics
///   dX = -V dtau,  dV = +B dtau + sqrt(2A) dW,
/// stopped at the inflow boundary (X crossing 0 with V < 0), the initial time,
/// or the velocity truncation, accumulating the source along the path.
std::vector<McEstimate> solve_mc(const std::vector<PhasePoint>& points,
                                 const CoefficientField& coeff, const HalfSpaceGrid& grid,
                                 const BoundaryData& bdata, std::size_t n_particles,
                                 std::uint64_t seed, double dt_mc);

/// Binary field dump: magic "KFPF", u32 version, u64 counts, node coordinates,
/// then stored slices t-major / x-major / v-minor as 64-bit floats.
void write_field_dump(const SolutionField& sol, const std::string& path);
void write_trace_csv(const BoundaryProfile& prof, const std::string& path);

/// Plain-text key = value configuration (# comments).
struct KeyValueConfig {
    std::vector<std::pair<std::string, std::string>> items;

    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text);
    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_num(const std::string& key, double fallback) const;
};

/// Grid/coefficients/boundary assembled from a config (keys: nx, nv, nt, X, V,
/// T0, coeff, coeff_table, boundary, source, store_every).
struct SolveSetup {
    HalfSpaceGrid grid;
    CoefficientField coeff;
    BoundaryData bdata;
    std::size_t store_every = 0;
};
SolveSetup make_solve_setup(const KeyValueConfig& cfg);

}  // namespace kfplab
