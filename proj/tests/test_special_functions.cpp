#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "kfplab/special_functions.hpp"

using namespace kfplab;

namespace {

// 50-digit arbitrary-precision references, computed once and frozen.
constexpr double kGamma13 = 2.6789385347077476336556929409746776441286893779573;
constexpr double kGamma16 = 5.5663160017802352042500968952077261113987991148729;
constexpr double kUpsilon0 = 0.4812767607607907637945602759145631436405126150982;

// U(-1/6, 2/3, x) references
const struct { double x, u; } kUminus[] = {
    {0.25, 0.83964906709354701578}, {0.5, 0.92263185433421266436},
    {1.0, 1.0208671373347342397},   {2.0, 1.1355701243957917436},
    {5.0, 1.3143526735904059708},   {10.0, 1.4716999988164591219},
    {15.0, 1.5732390217757119174},  {22.0, 1.6759987143108298287},
    {30.0, 1.7643411858486690526},  {50.0, 1.9204393235205689004},
};

// U(5/6, 2/3, x) references
const struct { double x, u; } kUplus[] = {
    {0.25, 1.1003859161147550359},  {0.5, 0.84119165629288595015},
    {1.0, 0.60527382164512914483},  {2.0, 0.4093171204680021771},
    {5.0, 0.2238526776990127435},   {10.0, 0.13472668055443973774},
    {15.0, 0.098664303918359482106}, {22.0, 0.072993667836207348139},
    {30.0, 0.056968560826925856295}, {50.0, 0.037669240524277850747},
};

double fd2(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

double fd1(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("gamma: factorials, sqrt(pi), poles") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(gamma_fn(1.0 / 3.0) == doctest::Approx(kGamma13).epsilon(1e-13));
    CHECK(gamma_fn(1.0 / 6.0) == doctest::Approx(kGamma16).epsilon(1e-13));
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-3.0), std::domain_error);
}

TEST_CASE("gamma recurrence on random arguments") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-10.0, 30.0);
    int checked = 0;
    while (checked < 1000) {
        const double x = u(gen);
        if (x <= 0.0 && std::abs(x - std::round(x)) < 1e-3) continue;
        if (std::abs(x) < 1e-3 || std::abs(x + 1.0) < 1e-3) continue;
        const double lhs = gamma_fn(x + 1.0);
        const double rhs = x * gamma_fn(x);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), std::abs(rhs)));
        ++checked;
    }
}

TEST_CASE("tricomi U at 0 and against frozen references") {
    CHECK(tricomi_u(-1.0 / 6, 2.0 / 3, 0.0) ==
          doctest::Approx(kGamma13 / kGamma16).epsilon(1e-13));
    for (const auto& [x, u] : kUminus)
        CHECK(tricomi_u(-1.0 / 6, 2.0 / 3, x) == doctest::Approx(u).epsilon(1e-9));
    for (const auto& [x, u] : kUplus)
        CHECK(tricomi_u(5.0 / 6, 2.0 / 3, x) == doctest::Approx(u).epsilon(1e-9));
    // x beyond the asymptotic switch
    CHECK(tricomi_u(-1.0 / 6, 2.0 / 3, 5.0e4) ==
          doctest::Approx(std::pow(5.0e4, 1.0 / 6.0)).epsilon(1e-3));
}

TEST_CASE("tricomi U error signalling") {
    CHECK_THROWS_AS(tricomi_u(0.5, 1.0, 1.0), unsupported_parameters);
    CHECK_THROWS_AS(tricomi_u(-2.0, 2.0 / 3, 1.0), unsupported_parameters);
    CHECK_THROWS_AS(tricomi_u(0.5, 2.0 / 3, -1.0), std::domain_error);
    CHECK_THROWS_AS(tricomi_u(0.5, 5.0 / 3, 0.0), std::domain_error);
    CHECK(tricomi_u(0.0, 2.0 / 3, 3.0) == 1.0);
}

TEST_CASE("tricomi U satisfies Kummer's equation (finite differences)") {
    const double a = -1.0 / 6, b = 2.0 / 3;
    for (const double x : {0.5, 2.0, 10.0}) {
        const auto f = [&](double s) { return tricomi_u(a, b, s); };
        const double h = 1e-4 * std::max(1.0, x);
        const double res = x * fd2(f, x, h) + (b - x) * fd1(f, x, h) - a * f(x);
        CHECK(std::abs(res) <= 1e-6);
    }
}

TEST_CASE("tricomi U large-x asymptotic normalization") {
    // U(-1/6, 2/3, x) x^{-1/6} -> 1, within 2% by x = 50
    const double r = tricomi_u(-1.0 / 6, 2.0 / 3, 50.0) * std::pow(50.0, -1.0 / 6.0);
    CHECK(std::abs(r - 1.0) < 0.02);
}

TEST_CASE("upsilon: value at 0 from both branches") {
    CHECK(upsilon(0.0) == doctest::Approx(kUpsilon0).epsilon(1e-12));
    // the tau^{1/3} branch decays slowly: probing the two-sided limit to 1e-8
    // needs tau below ~(1e-8)^3
    const double right = tricomi_u(-1.0 / 6, 2.0 / 3, 1e-30);
    const double left = std::exp(-1e-30) / 6.0 * tricomi_u(5.0 / 6, 2.0 / 3, 1e-30);
    CHECK(std::abs(right - left) <= 1e-8);
    CHECK(std::abs(upsilon(0.0) - kGamma13 / kGamma16) <= 1e-12);
}

TEST_CASE("upsilon: two-branch consistency at 0") {
    // Upsilon carries a tau^{1/3} branch at 0 (a vertical tangent shared by
    // both sides); the one-sided difference quotients must agree.
    const double h = 1e-12;
    const double dp = (upsilon(h) - upsilon(0.0)) / h;
    const double dm = (upsilon(0.0) - upsilon(-h)) / h;
    CHECK(std::abs(dp - dm) <= 1e-6 * std::max(std::abs(dp), std::abs(dm)));
}

TEST_CASE("upsilon: defining ODE residual at sample points") {
    for (const double tau : {-5.0, -1.0, 1.0, 5.0}) {
        const double h = 1e-4;
        const double res = tau * fd2(upsilon, tau, h) +
                           (2.0 / 3.0 - tau) * fd1(upsilon, tau, h) + upsilon(tau) / 6.0;
        CHECK(std::abs(res) <= 1e-6);
    }
}

TEST_CASE("upsilon: positivity on [-40, 40]") {
    for (int i = 0; i <= 400; ++i) {
        const double tau = -40.0 + 0.2 * i;
        CHECK(upsilon(tau) > 0.0);
    }
    // frozen spot values
    CHECK(upsilon(-1.0) == doctest::Approx(0.037111299210418893226).epsilon(1e-9));
    CHECK(upsilon(5.0) == doctest::Approx(1.3143526735904059708).epsilon(1e-9));
    CHECK(upsilon(-20.0) == doctest::Approx(2.7042596903615895597e-11).epsilon(1e-8));
}

TEST_CASE("psi: boundary values and limits") {
    for (const double v : {-1.0, -0.5, -0.1, 0.0}) CHECK(psi_exact(0.0, v) == 0.0);
    CHECK(psi_exact(-1e-8, 1.0) ==
          doctest::Approx(std::pow(9.0, -1.0 / 6.0)).epsilon(1e-3));
    CHECK(psi_exact(-0.5, 0.25) == doctest::Approx(0.50934951608294922272).epsilon(1e-9));
    CHECK(psi_exact(-0.5, -0.5) == doctest::Approx(0.27044784758078670909).epsilon(1e-9));
    CHECK(psi_exact(-1.0, 1.0) == doctest::Approx(0.76000500611638426049).epsilon(1e-9));
    CHECK_THROWS_AS(psi_exact(0.1, 0.0), std::domain_error);
}

TEST_CASE("psi: nonnegative on the unit box") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        const double x = -u(gen), v = 2.0 * u(gen) - 1.0;
        CHECK(psi_exact(x, v) >= 0.0);
    }
}

TEST_CASE("psi: transport-diffusion identity v d_x psi = d_v^2 psi") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> ux(0.05, 1.0), uv(-1.0, 1.0);
    const double h = 1e-4;
    for (int i = 0; i < 1000; ++i) {
        const double x = -ux(gen), v = uv(gen);
        const auto fx = [&](double s) { return psi_exact(s, v); };
        const auto fv = [&](double s) { return psi_exact(x, s); };
        const double lhs = v * fd1(fx, x, h);
        const double rhs = fd2(fv, v, h);
        CHECK(std::abs(lhs - rhs) <= 1e-5);
    }
}

TEST_CASE("region classification") {
    CHECK(classify_region(-0.5, 0.0, 0.5) == PsiRegion::R0);
    CHECK(classify_region(-1e-6, 0.5, 0.5) == PsiRegion::Rplus);   // (0.25)^3 >= 1e-6
    CHECK(classify_region(-1e-3, -0.9, 0.5) == PsiRegion::Rminus); // 0.091125 >= 1e-3
    CHECK(classify_region(-0.5, 0.2, 0.5) == PsiRegion::R0);       // (0.1)^3 << 0.5
    CHECK(classify_region(0.5, 0.0, 0.5) == PsiRegion::outside);
    CHECK(classify_region(-0.5, 1.5, 0.5) == PsiRegion::outside);
    // ties resolve upward to R0
    CHECK(classify_region(-0.125, 1.0, 0.5) == PsiRegion::R0);  // (0.5)^3 = 0.125 = -x
    CHECK_THROWS_AS(classify_region(-0.5, 0.0, 1.5), std::invalid_argument);
}

TEST_CASE("comparability calibration picks c* with ratio <= 10") {
    const CstarCalibration cal = calibrate_c_star(10000, 99);
    CHECK(cal.passed);
    CHECK(cal.c_star == doctest::Approx(0.5));
    CHECK(cal.ratio_r0 <= 10.0);
    CHECK(cal.ratio_rplus <= 10.0);
    CHECK(cal.ratio_rminus <= 10.0);
}
