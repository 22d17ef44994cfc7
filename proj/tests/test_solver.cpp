#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "kfplab/barriers.hpp"
#include "kfplab/solver.hpp"

using namespace kfplab;

namespace {

HalfSpaceGrid small_grid(std::size_t nx = 64, std::size_t nv = 64, double T0 = -0.25) {
    HalfSpaceGrid g;
    g.X = 0.5;
    g.V = 1.5;
    g.T0 = T0;
    g.n_x = nx;
    g.n_v = nv;
    const double dt_cap = 0.9 * g.dx() / g.V;
    g.n_t = static_cast<std::size_t>(std::ceil(-g.T0 / dt_cap));
    return g;
}

double linf_error_vs_psi_barrier(const SolutionField& sol, double corner_gauge) {
    // compare against the manufactured field away from the grazing corner
    const auto& g = sol.grid;
    double err = 0.0;
    for (std::size_t i = 0; i <= g.n_x; ++i) {
        for (std::size_t j = 0; j <= g.n_v; ++j) {
            const double x = g.x(i), v = g.v(j);
            const double gauge = std::max(std::cbrt(std::abs(x)), std::abs(v));
            if (gauge < corner_gauge) continue;
            err = std::max(err, std::abs(sol.at(i, j) - grazing_Psi(0.0, x, v)));
        }
    }
    return err;
}

}  // namespace

TEST_CASE("grid validation") {
    HalfSpaceGrid g = small_grid();
    CHECK_NOTHROW(g.validate());
    g.n_v = 63;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = small_grid();
    g.n_t = 3;  // CFL broken
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("constants are exact discrete solutions") {
    const HalfSpaceGrid g = small_grid();
    CoefficientField cf = make_coefficients("constant");
    const SolutionField sol = solve_grid(g, cf, make_boundary_data("one", g));
    for (std::size_t i = 0; i <= g.n_x; ++i)
        for (std::size_t j = 0; j <= g.n_v; ++j)
            CHECK(sol.at(i, j) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sol.field_max <= 1.0 + 1e-12);
    CHECK(sol.field_min >= 1.0 - 1e-12);
}

TEST_CASE("discrete maximum principle with zero source") {
    const HalfSpaceGrid g = small_grid();
    CoefficientField cf = make_coefficients("velocity-affine");
    const SolutionField sol = solve_grid(g, cf, make_boundary_data("bump", g));
    CHECK(sol.field_max <= sol.data_max + 1e-12);
    CHECK(sol.field_min >= sol.data_min - 1e-12);
    CHECK(sol.data_max == doctest::Approx(1.0));  // bump peak
    CHECK(sol.data_min == 0.0);
}

TEST_CASE("source bound: |f| <= (0 - T0) sup|S| with zero data") {
    HalfSpaceGrid g = small_grid(48, 48, -0.3);
    CoefficientField cf = make_coefficients("constant");
    set_source(cf, "const:0.75");
    const SolutionField sol = solve_grid(g, cf, make_boundary_data("zero", g));
    CHECK(sol.field_max <= 0.3 * 0.75 + 1e-12);
    CHECK(sol.field_min >= -1e-12);
}

TEST_CASE("manufactured solution: error halves under refinement") {
    CoefficientField cf = make_coefficients("constant");
    set_source(cf, "one");  // L0 Psi = 1

    HalfSpaceGrid g1 = small_grid(48, 48, -0.25);
    const double e1 = linf_error_vs_psi_barrier(
        solve_grid(g1, cf, make_boundary_data("psi", g1)), 0.3);
    HalfSpaceGrid g2 = small_grid(96, 96, -0.25);
    const double e2 = linf_error_vs_psi_barrier(
        solve_grid(g2, cf, make_boundary_data("psi", g2)), 0.3);
    CHECK(e1 > 0.0);
    CHECK(e1 / e2 >= 1.7);
}

TEST_CASE("boundary profile: trace of constants, snapping") {
    const HalfSpaceGrid g = small_grid();
    CoefficientField cf = make_coefficients("constant");
    const SolutionField sol = solve_grid(g, cf, make_boundary_data("one", g));
    const BoundaryProfile prof = boundary_profile(sol, -0.5 + 0.3 * g.dv());
    CHECK(prof.snapped);
    CHECK(prof.points.size() == g.n_x + 1);
    for (const auto& [x, f] : prof.points) CHECK(f == doctest::Approx(1.0).epsilon(1e-12));

    SolutionField empty;
    CHECK_THROWS_AS(boundary_profile(empty, -0.5), std::invalid_argument);
}

TEST_CASE("monte carlo: constants and zero data") {
    const HalfSpaceGrid g = small_grid(32, 32);
    CoefficientField cf = make_coefficients("constant");
    const std::vector<PhasePoint> pts{PhasePoint(0.0, -0.2, 0.3),
                                      PhasePoint(-0.05, -0.3, -0.4)};
    const auto ones =
        solve_mc(pts, cf, g, make_boundary_data("one", g), 400, 5, 1e-3);
    for (const auto& e : ones) {
        CHECK(e.mean == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e.std_error == doctest::Approx(0.0));
    }
    const auto zeros =
        solve_mc(pts, cf, g, make_boundary_data("zero", g), 400, 5, 1e-3);
    for (const auto& e : zeros) CHECK(e.mean == 0.0);

    CHECK_THROWS_AS(solve_mc(pts, cf, g, make_boundary_data("one", g), 0, 5, 1e-3),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_mc(pts, cf, g, make_boundary_data("one", g), 10, 5, 0.0),
                    std::invalid_argument);
}

TEST_CASE("monte carlo: reproducible from the seed, varies across seeds") {
    const HalfSpaceGrid g = small_grid(32, 32);
    CoefficientField cf = make_coefficients("constant");
    set_source(cf, "one");
    const std::vector<PhasePoint> pts{PhasePoint(0.0, -0.2, -0.1)};
    const BoundaryData bd = make_boundary_data("zero", g);
    const auto a = solve_mc(pts, cf, g, bd, 500, 77, 1e-3);
    const auto b = solve_mc(pts, cf, g, bd, 500, 77, 1e-3);
    CHECK(a[0].mean == b[0].mean);
    const auto c = solve_mc(pts, cf, g, bd, 500, 78, 1e-3);
    CHECK(a[0].mean != c[0].mean);
}

TEST_CASE("grid and monte carlo agree on the manufactured problem") {
    CoefficientField cf = make_coefficients("constant");
    set_source(cf, "one");
    HalfSpaceGrid g = small_grid(96, 96, -0.2);
    const BoundaryData bd = make_boundary_data("psi", g);
    const SolutionField sol = solve_grid(g, cf, bd);

    const std::vector<PhasePoint> pts{
        PhasePoint(0.0, -0.25, 0.6),  PhasePoint(0.0, -0.1, -0.5),
        PhasePoint(0.0, -0.35, 0.1),  PhasePoint(0.0, -0.2, -0.9),
        PhasePoint(0.0, -0.05, 0.8)};
    const auto mc = solve_mc(pts, cf, g, bd, 4000, 2024, 2e-5);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const double grid_val = sol.sample(pts[k].x[0], pts[k].v[0]);
        const double tol = 3.0 * mc[k].std_error + 0.02;
        CHECK(std::abs(grid_val - mc[k].mean) <= tol);
    }
}

TEST_CASE("field dump and trace files") {
    const HalfSpaceGrid g = small_grid(16, 16);
    CoefficientField cf = make_coefficients("constant");
    const SolutionField sol = solve_grid(g, cf, make_boundary_data("one", g), 50);
    const std::string dir = "test_dump_out";
    std::filesystem::create_directories(dir);
    write_field_dump(sol, dir + "/field.bin");

    std::ifstream in(dir + "/field.bin", std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "KFPF");
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), 4);
    CHECK(version == 1);
    std::uint64_t nt = 0, nx = 0, nv = 0;
    in.read(reinterpret_cast<char*>(&nt), 8);
    in.read(reinterpret_cast<char*>(&nx), 8);
    in.read(reinterpret_cast<char*>(&nv), 8);
    CHECK(nx == g.n_x + 1);
    CHECK(nv == g.n_v + 1);
    CHECK(nt == sol.stored_times.size());
    // first time value
    double t0 = 0.0;
    in.read(reinterpret_cast<char*>(&t0), 8);
    CHECK(t0 == doctest::Approx(g.T0));

    const BoundaryProfile prof = boundary_profile(sol, -0.75);
    write_trace_csv(prof, dir + "/trace.csv");
    std::ifstream csv(dir + "/trace.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x,f");
    std::filesystem::remove_all(dir);
}

TEST_CASE("key-value config parsing and solve setup") {
    const KeyValueConfig cfg = KeyValueConfig::parse_string(
        "nx = 32\nnv = 32 # comment\nX=0.5\nV = 1.0\nT0 = -0.1\nnt = 200\n"
        "coeff = velocity-affine\nboundary = zero\nsource = const:0.5\n");
    CHECK(cfg.get_num("nx", 0) == 32);
    CHECK(cfg.get("coeff", "") == "velocity-affine");
    CHECK(cfg.get_num("missing", 7.0) == 7.0);
    const SolveSetup setup = make_solve_setup(cfg);
    CHECK(setup.grid.n_x == 32);
    CHECK(setup.coeff.name == "velocity-affine");
    CHECK(setup.coeff.S1(0, 0, 0) == doctest::Approx(0.5));
}

TEST_CASE("velocity-affine drift pushes the grid and mc solutions together") {
    // cross-check of the drift sign convention between the two solvers
    CoefficientField cf = make_coefficients("velocity-affine");
    HalfSpaceGrid g = small_grid(96, 96, -0.2);
    const BoundaryData bd = make_boundary_data("psi", g);
    set_source(cf, "one");
    const SolutionField sol = solve_grid(g, cf, bd);
    const std::vector<PhasePoint> pts{PhasePoint(0.0, -0.25, 0.4),
                                      PhasePoint(0.0, -0.15, -0.6)};
    const auto mc = solve_mc(pts, cf, g, bd, 4000, 31, 2e-5);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const double tol = 3.0 * mc[k].std_error + 0.02;
        CHECK(std::abs(sol.sample(pts[k].x[0], pts[k].v[0]) - mc[k].mean) <= tol);
    }
}
