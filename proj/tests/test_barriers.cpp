#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "kfplab/barriers.hpp"
#include "kfplab/quadrature.hpp"
#include "kfplab/special_functions.hpp"

using namespace kfplab;

TEST_CASE("select_params: recipe values") {
    const BarrierParams ig = select_params(BarrierMode::incoming_gradient, 1e-6, -0.5);
    CHECK(ig.kappa == 1.0);
    CHECK(ig.a == doctest::Approx(1e4).epsilon(1e-12));
    CHECK(ig.b == doctest::Approx(0.0625));
    CHECK(ig.c == doctest::Approx(2.5e-5).epsilon(1e-12));
    CHECK(ig.h == doctest::Approx(1.0 / 36));

    const BarrierParams ex = select_params(BarrierMode::exponential, 1e-4, -0.5);
    CHECK(ex.kappa == doctest::Approx(1.0 / 64));
    CHECK(ex.a == doctest::Approx(2500.0).epsilon(1e-12));
    CHECK(ex.b == doctest::Approx(0.5));
    CHECK(ex.c == doctest::Approx(6.4e-3).epsilon(1e-12));

    const BarrierParams gr = select_params(BarrierMode::grazing, 1e-6, -0.05, 1.0, 1.0 / 32);
    CHECK(gr.b == doctest::Approx(0.03125));
    CHECK(gr.c == doctest::Approx(6.25e-6).epsilon(1e-9));
    CHECK(gr.kappa == doctest::Approx(std::sqrt(1.0 / 32) / 256).epsilon(1e-12));
    CHECK(gr.h == doctest::Approx(1.0 / 32));
}

TEST_CASE("select_params: admissibility windows") {
    // incoming_gradient at r = 1e-4 needs theta0 beyond 1/16 for any |vd| <= 1
    CHECK_THROWS_AS(select_params(BarrierMode::incoming_gradient, 1e-4, -0.6),
                    std::invalid_argument);
    CHECK_NOTHROW(select_params(BarrierMode::incoming_gradient, 1e-6, -0.3));
    CHECK_NOTHROW(select_params(BarrierMode::exponential, 1e-4, -0.3));
    CHECK_THROWS_AS(select_params(BarrierMode::exponential, 1e-2, -0.3),
                    std::invalid_argument);
    CHECK_NOTHROW(select_params(BarrierMode::grazing, 1e-4, -0.3));
    CHECK_THROWS_AS(select_params(BarrierMode::grazing, 0.5, -0.3), std::invalid_argument);
    // out-of-window construction is available for the certifier override
    CHECK_NOTHROW(select_params(BarrierMode::incoming_gradient, 1e-4, -0.6, 1.0, -1.0, false));
    CHECK_THROWS_AS(select_params(BarrierMode::exponential, 1e-4, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(select_params(BarrierMode::exponential, -1e-4, -0.5),
                    std::invalid_argument);
}

TEST_CASE("check_constraints: recipes satisfy their required sets") {
    const BarrierParams ig = select_params(BarrierMode::incoming_gradient, 1e-6, -0.3);
    const ConstraintVerdict vig = check_constraints(ig);
    CHECK(vig.abc_root);  // equality case
    CHECK(vig.abc_ratio);
    CHECK(vig.abc_scale);
    CHECK(vig.vrs);
    CHECK(vig.required_ok);

    const BarrierParams ex = select_params(BarrierMode::exponential, 1e-4, -0.5);
    const ConstraintVerdict vex = check_constraints(ex);
    CHECK(vex.vrs);  // equality case
    CHECK(vex.required_ok);

    // grazing with vd = -r^{1/3}: (vr) holds with equality
    const double rt = 1e-6;
    const BarrierParams gr = select_params(BarrierMode::grazing, rt, -std::cbrt(rt));
    const ConstraintVerdict vgr = check_constraints(gr);
    CHECK(vgr.vr);
    CHECK(vgr.required_ok);

    BarrierParams bad;
    bad.a = 1.0; bad.b = 1.0; bad.c = 1.0; bad.r_tilde = 0.1; bad.v_tilde_d = -1.0;
    CHECK_FALSE(check_constraints(bad).abc_root);  // sqrt(ac) < 8b
}

TEST_CASE("anchor point: closed form and recipe ranges") {
    BarrierParams p = select_params(BarrierMode::incoming_gradient, 1.0, -0.5, 1.0, -1.0, false);
    const AnchorPoint anc = anchor_point(p);
    CHECK(anc.xi_d == doctest::Approx(8.0 / std::sqrt(63.0)).epsilon(1e-12));
    CHECK(anc.xi_d == doctest::Approx(1.00790526135793927).epsilon(1e-12));
    // b xi = c (eta - vd) exactly
    CHECK(p.b * anc.xi_d ==
          doctest::Approx(p.c * (anc.eta_d - p.v_tilde_d)).epsilon(1e-12));

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> ur(-7.0, -3.0);
    for (int i = 0; i < 1000; ++i) {
        const double rt = std::pow(10.0, ur(gen));
        for (const BarrierMode m :
             {BarrierMode::incoming_gradient, BarrierMode::exponential, BarrierMode::grazing}) {
            const BarrierParams q = select_params(m, rt, -0.9, 1.0, -1.0, false);
            const AnchorPoint a = anchor_point(q);
            CHECK(a.xi_d >= q.r_tilde * (1 - 1e-12));
            CHECK(a.xi_d <= 4.0 / 3.0 * q.r_tilde * (1 + 1e-12));
        }
    }

    // exponential recipe: |eta_d| >= (9/20)|vd| under (vr)
    const BarrierParams ex = select_params(BarrierMode::exponential, 1e-4, -0.5);
    const AnchorPoint aex = anchor_point(ex);
    CHECK(std::abs(aex.eta_d) >= 0.45 * 0.5);

    BarrierParams bad;
    bad.a = 1.0; bad.b = 2.0; bad.c = 1.0; bad.r_tilde = 1.0; bad.v_tilde_d = -1.0;
    CHECK_THROWS_AS(anchor_point(bad), std::invalid_argument);
}

TEST_CASE("rho: base point value and empty interior ball") {
    const BarrierParams p = select_params(BarrierMode::exponential, 1e-4, -0.5);
    const AnchorPoint anc = anchor_point(p);
    // rho at the base point equals sqrt(a) r
    const double r0 = rho(p, anc, {0.0}, {p.v_tilde_d});
    CHECK(r0 == doctest::Approx(std::sqrt(p.a) * p.r_tilde).epsilon(1e-12));
    CHECK(r0 == doctest::Approx(anc.rho0).epsilon(1e-12));

    // {rho < rho0} does not meet the half space: sampled minimum over O
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> ux(-1.0, 0.0), uv(-1.0, 1.0);
    double min_rho = 1e300;
    for (int i = 0; i < 1000000; ++i) {
        const double x = 8.0 * p.r_tilde * ux(gen);
        const double v = p.v_tilde_d + 1.5 * uv(gen);
        min_rho = std::min(min_rho, rho(p, anc, {x}, {v}));
    }
    CHECK(min_rho >= anc.rho0 * (1 - 1e-6));
}

TEST_CASE("rho: hand value in plain coordinates") {
    BarrierParams p;
    p.a = 4.0; p.b = 0.0; p.c = 1.0; p.kappa = 1.0; p.r_tilde = 1.0; p.v_tilde_d = -1.0;
    AnchorPoint anc;
    anc.xi_d = 1.0; anc.eta_d = 0.0; anc.rho0 = 2.0;
    CHECK(rho(p, anc, {0.5}, {0.5}) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));
}

TEST_CASE("rho_t: shift identity and t = 0 reduction") {
    const BarrierParams p = select_params(BarrierMode::exponential, 1e-5, -0.4);
    const AnchorPoint anc = anchor_point(p);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = 1e-4 * u(gen), v = -0.4 + 0.3 * u(gen), t = -1e-4 * (u(gen) + 1);
        CHECK(rho_t(p, anc, 0.0, {x}, {v}) == doctest::Approx(rho(p, anc, {x}, {v})));
        const double shifted = x - p.h * p.v_tilde_d * t;
        CHECK(rho_t(p, anc, t, {x}, {v}) ==
              doctest::Approx(rho(p, anc, {shifted}, {v})).epsilon(1e-12));
    }
    // h = 0 removes the time dependence
    BarrierParams q = p;
    q.h = 0.0;
    CHECK(rho_t(q, anc, -5.0, {1e-5}, {-0.4}) ==
          doctest::Approx(rho(q, anc, {1e-5}, {-0.4})).epsilon(1e-13));
}

TEST_CASE("region membership") {
    const BarrierParams p = select_params(BarrierMode::exponential, 1e-5, -0.4);
    const AnchorPoint anc = anchor_point(p);
    CHECK(region_P_membership(p, anc, 0.0, {0.0}, {p.v_tilde_d}));  // base point, rho = rho0
    CHECK_FALSE(region_P_membership(p, anc, 0.0, {1e-6}, {p.v_tilde_d}));  // x_d > 0
    CHECK_FALSE(region_P_membership(p, anc, 1e-3, {0.0}, {p.v_tilde_d})); // t > 0

    // grazing recipe: the origin lies in {rho0 <= rho <= 2 rho0}
    const double rt = 1e-6;
    const BarrierParams gr = select_params(BarrierMode::grazing, rt, -std::cbrt(rt));
    const AnchorPoint ag = anchor_point(gr);
    const double r_origin = rho(gr, ag, {0.0}, {0.0});
    CHECK(r_origin >= ag.rho0 * (1 - 1e-12));
    CHECK(r_origin <= 2.0 * ag.rho0 * (1 + 1e-12));
}

TEST_CASE("exponential barrier profile: normalization, ODE, convexity") {
    for (const auto& [Theta, tau0] : std::vector<std::pair<double, double>>{
             {1.0, 0.01}, {10.0, 0.1}, {5.0, 1.0}}) {
        const ExpBarrierState st = phi_ode_barrier(Theta, tau0);
        CHECK(st.value(tau0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(st.value(9.0 * tau0) == doctest::Approx(1.0).epsilon(1e-12));
        // residual tau^2 Phi'' - Theta Phi' vanishes identically (analytic forms)
        for (int i = 0; i <= 32; ++i) {
            const double tau = tau0 + (9.0 * tau0 - tau0) * i / 32.0;
            const double res = tau * tau * st.d2(tau) - Theta * st.d1(tau);
            CHECK(std::abs(res) <= 1e-10 * Theta * st.d1(tau) + 1e-300);
            CHECK(st.d2(tau) >= 0.0);
        }
        // decay bound at 4 tau0
        const double bound = (1.0 + Theta / tau0) * std::exp(-Theta / (8.0 * tau0));
        CHECK(st.value(4.0 * tau0) <= bound);
        // monotone lookup table
        for (std::size_t i = 1; i < st.lookup.size(); ++i)
            CHECK(st.lookup[i] >= st.lookup[i - 1]);
        // table agrees with quadrature
        CHECK(st.value_table(4.0 * tau0) ==
              doctest::Approx(st.value(4.0 * tau0)).epsilon(1e-5));
    }
    // frozen quadrature references
    CHECK(phi_ode_barrier(1.0, 0.01).value(0.04) ==
          doctest::Approx(1.9898840679e-7).epsilon(1e-5));
    CHECK(phi_ode_barrier(5.0, 1.0).value(4.0) ==
          doctest::Approx(0.154383156775).epsilon(1e-9));
    CHECK_THROWS_AS(phi_ode_barrier(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(phi_ode_barrier(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("power barrier: endpoints, hand value, monotonicity") {
    CHECK(varphi_power(1.0, 2.0, 1.0) == doctest::Approx(0.0));
    CHECK(varphi_power(1.0, 2.0, 3.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(varphi_power(1.0, 2.0, 2.0) == doctest::Approx(27.0 / 32.0).epsilon(1e-12));
    CHECK_THROWS_AS(varphi_power(1.0, 2.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(varphi_power(1.0, 0.5, 2.0), std::invalid_argument);

    for (const double m : {1.0, 5.0, 160.0}) {
        double prev = -1.0;
        for (int i = 0; i <= 1000; ++i) {
            const double r = 1.0 + 2.0 * i / 1000.0;
            const double val = varphi_power(1.0, m, r);
            CHECK(val >= prev);
            prev = val;
        }
    }
    // derivative consistency at large m (ratio form must not underflow at rho0)
    const PowerBarrier pb{1e-4, 5120.0};
    CHECK(pb.value(1e-4) == doctest::Approx(0.0));
    CHECK(pb.d1(1e-4) > 0.0);
    CHECK(pb.d2(1e-4) < 0.0);
    const double h = 1e-9;
    const double fd = (pb.value(1e-4 + h) - pb.value(1e-4)) / h;
    CHECK(fd == doctest::Approx(pb.d1(1e-4 + 0.5 * h)).epsilon(1e-3));
}

TEST_CASE("grazing barrier Psi") {
    // nonnegative on the incoming part of the boundary
    for (int i = 0; i <= 100; ++i) {
        const double v = -1.0 + i / 100.0;  // v in [-1, 0]
        CHECK(grazing_Psi(0.0, 0.0, v) >= 0.0);
    }
    CHECK(grazing_Psi(0.0, 0.0, 0.0) == 0.0);
    // Psi <= C ||z||^{1/2} near the origin: report-style bound with a fixed C
    for (int i = 1; i <= 50; ++i) {
        const double r = 0.2 * i / 50.0;
        const double g = std::max({std::sqrt(r * r), r, r});  // gauge of (r^2 ,-r^3, r)
        const double val = grazing_Psi(-r * r, -r * r * r, r);
        CHECK(val <= 6.0 * std::sqrt(g));
    }
}

TEST_CASE("range and coercivity bounds on sampled P: zero violations") {
    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const double rt : {1e-4, 1e-6}) {
        const double vd = -0.5;
        const BarrierParams p = select_params(BarrierMode::exponential, rt, vd);
        const AnchorPoint anc = anchor_point(p);
        const double vhalf = std::sqrt(12.0 * p.a / p.c) * rt;
        std::size_t hits = 0, violations = 0;
        for (int i = 0; i < 8000000 && hits < 1000000; ++i) {
            const double x = -(4.4 * rt) * u(gen);
            const double v = anc.eta_d + vhalf * 1.1 * (2.0 * u(gen) - 1.0);
            const double X = x - anc.xi_d, V = v - anc.eta_d;
            const double q = p.a * X * X - 2.0 * p.b * X * V + p.c * V * V;
            if (q < anc.rho0 * anc.rho0 || q > 9.0 * anc.rho0 * anc.rho0) continue;
            ++hits;
            const double coercive_floor = p.a * rt * std::abs(vd) / 4.0;
            if (std::abs(X) < rt * (1 - 1e-9)) ++violations;
            if (std::max(p.kappa * 0.0, std::abs(X)) > 4.0 * rt) ++violations;
            if (std::abs(V) > vhalf) ++violations;
            if (std::abs(v) < std::abs(vd) / 2.0) ++violations;           // (vrs)
            if (v * (p.a * X - p.b * V) < coercive_floor) ++violations;   // (vrs)
            if (anc.eta_d * (p.a * X - p.b * V) < coercive_floor) ++violations;  // (vr)
        }
        CHECK(hits >= 100000);
        CHECK(violations == 0);
    }
}
