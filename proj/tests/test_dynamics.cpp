#include <catch_amalgamated.hpp>

#include <random>

#include "thc/bifurcation.hpp"
#include "thc/dynamics.hpp"
#include "thc/integrator.hpp"
#include "thc/presets.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace thc;

namespace {

ModelParams random_model(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> b(0.005, 0.05), l(1.0, 8.0), th(0.0, 40.0), P(0.0, 10.0);
    return ModelParams{b(rng), l(rng), P(rng), th(rng)};
}

}  // namespace

TEST_CASE("full nondimensional right-hand side") {
    SECTION("on the critical manifold at a reduced equilibrium") {
        // y is stationary; x drifts only through the exchange term, which is O(1/alpha) of the relaxation
        const double mu2 = 6.2, y = 0.3;
        const double exchange = 1.0 + mu2 * (1.0 - y) * (1.0 - y);
        const NondimParams nd{100.0, mu2, y * exchange};
        const StateND d = rhs_full_nondim({1.0, y}, nd);
        CHECK_THAT(d.y, WithinAbs(0.0, 1e-14));
        CHECK_THAT(d.x, WithinRel(-exchange, 1e-15));
    }
    SECTION("no exchange, no forcing") {
        const NondimParams nd{100.0, 0.0, 0.0};
        CHECK(rhs_full_nondim({1.0, 0.7}, nd).y == -0.7);
    }
}

TEST_CASE("full dimensional right-hand side") {
    const ModelParams mp = presets::calibrated_model();
    const double alpha = presets::kReferenceAlpha;

    SECTION("quasi-equilibrium") {
        const double dS = equilibria(mp).dS(0);
        const StateDim d = rhs_full_dim({mp.theta, dS}, mp, alpha);
        CHECK_THAT(d.dS, WithinAbs(0.0, 1e-12));
        // relative to the relaxation rate alpha * theta the temperature drift is O(1/alpha)
        CHECK(std::abs(d.dT) / (alpha * mp.theta) < 10.0 / alpha);
    }
    SECTION("slaving: second component equals the reduced model on dT = theta") {
        for (double dS : {-1.0, 0.0, 0.5, 2.0, 3.3, 7.0}) {
            CHECK(rhs_full_dim({mp.theta, dS}, mp, alpha).dS == rhs_reduced(dS, mp));
        }
    }
    SECTION("rescaling to the nondimensional system") {
        // dT = theta x, dS = theta y / lambda
        const NondimParams nd = to_nondimensional(mp, alpha);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-2.0, 3.0);
        for (int i = 0; i < 100; ++i) {
            const StateND s{u(rng), u(rng)};
            const StateND a = rhs_full_nondim(s, nd);
            const StateDim b = rhs_full_dim({mp.theta * s.x, mp.theta * s.y / mp.lambda}, mp, alpha);
            CHECK_THAT(b.dT, WithinRel(mp.theta * a.x, 1e-12) || WithinAbs(mp.theta * a.x, 1e-12));
            CHECK_THAT(b.dS, WithinRel(mp.theta / mp.lambda * a.y, 1e-12) || WithinAbs(mp.theta / mp.lambda * a.y, 1e-12));
        }
    }
}

TEST_CASE("right-hand side matches the flow map of an integrator") {
    // d/dt of phi_t(x) at t = 0, by central differences of a fixed-step RK4 run in both directions
    const NondimParams nd{50.0, 6.2, 1.1};
    const std::array<double, 2> x0{0.9, 0.4};
    auto f = [&](double, const std::array<double, 2>& v) {
        const StateND d = rhs_full_nondim({v[0], v[1]}, nd);
        return std::array<double, 2>{d.x, d.y};
    };
    const double h = 1e-5;
    const auto fwd = oracle::rk4<2>(f, x0, 0.0, h, 20);
    const auto bwd = oracle::rk4<2>(f, x0, 0.0, -h, 20);
    const StateND d = rhs_full_nondim({x0[0], x0[1]}, nd);
    CHECK_THAT((fwd[0] - bwd[0]) / (2 * h), WithinRel(d.x, 1e-6));
    CHECK_THAT((fwd[1] - bwd[1]) / (2 * h), WithinRel(d.y, 1e-6));
}

TEST_CASE("reduced models") {
    const ModelParams mp = presets::calibrated_model();
    CHECK(rhs_reduced(0.0, mp) == mp.P);
    CHECK(rhs_reduced_nondim(1.0, NondimParams{1.0, 3.0, 1.0}) == 0.0);
    CHECK(rhs_reduced_nondim(0.0, NondimParams{1.0, 3.0, 0.0}) == 0.0);

    SECTION("three zeros at the reference point") {
        const auto roots = oracle::reduced_roots(mp);
        CHECK(roots.size() == 3);
        for (double r : roots) CHECK_THAT(rhs_reduced(r, mp), WithinAbs(0.0, 1e-12));
    }

    SECTION("zero count of the nondimensional model for mu2 = 6.2") {
        // mu2 = 6.2 puts the bistable p-window inside roughly (0.96, 1.14)
        auto zeros = [](double p) {
            const NondimParams nd{1.0, 6.2, p};
            return oracle::scan_roots([&](double y) { return rhs_reduced_nondim(y, nd); }, 0.0, 2.0, 20001).size();
        };
        CHECK(zeros(1.05) == 3);
        CHECK(zeros(1.5) == 1);
        CHECK(zeros(0.5) == 1);
    }
}

TEST_CASE("Tschirnhaus shift") {
    CHECK(tschirnhaus_shift(ModelParams{1.0, 2.0, 0.0, 0.0}) == 0.0);
    CHECK(tschirnhaus_shift(ModelParams{1.0, 2.0, 0.0, 3.0}) == 1.0);
    CHECK_THROWS_AS(tschirnhaus_shift(ModelParams{1.0, 0.0, 0.0, 3.0}), InvalidParameter);

    SECTION("shifted polynomial has no quadratic term and the stated coefficients") {
        std::mt19937_64 rng(11);
        for (int i = 0; i < 100; ++i) {
            const ModelParams mp = random_model(rng);
            const double k = tschirnhaus_shift(mp);
            const auto c = oracle::cubic_coefficients([&](double s) { return rhs_reduced(s + k, mp); });
            const DepressedCubic dc = depressed_coeffs(mp);
            const double scale = 1.0 + std::abs(c[0]) + std::abs(c[1]) + std::abs(c[3]) + mp.beta * mp.lambda * mp.theta;
            CHECK_THAT(c[2], WithinAbs(0.0, 1e-11 * scale));
            CHECK_THAT(c[0], WithinAbs(dc.h, 1e-11 * scale));
            CHECK_THAT(c[1], WithinAbs(dc.r, 1e-11 * scale));
            CHECK_THAT(c[3], WithinAbs(-dc.c3, 1e-11 * scale));
        }
    }
}

TEST_CASE("depressed coefficients") {
    const DepressedCubic dc = depressed_coeffs(ModelParams{3.0, 1.0, 0.0, 0.0});
    CHECK(dc.r == -1.0);
    CHECK(dc.h == 0.0);
    CHECK(dc.c3 == 3.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double beta = u(rng), lambda = u(rng);
        const double th = std::sqrt(3.0 / beta);
        const double P = 8.0 / (3.0 * lambda * std::sqrt(3.0 * beta));
        const DepressedCubic at = depressed_coeffs(ModelParams{beta, lambda, P, th});
        CHECK_THAT(at.r, WithinAbs(0.0, 1e-12));
        CHECK_THAT(at.h, WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("depressed right-hand side") {
    const DepressedCubic dc{1.0, 0.0, 1.0};
    CHECK(rhs_depressed(1.0, dc) == 0.0);
    CHECK(rhs_depressed(0.0, DepressedCubic{2.0, 0.7, 1.0}) == 0.7);
    CHECK(rhs_depressed_slope(0.5, DepressedCubic{2.0, 0.7, 4.0}) == 2.0 - 3.0 * 4.0 * 0.25);
}

TEST_CASE("shift equivalence on a grid") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 100; ++i) {
        const ModelParams mp = random_model(rng);
        const DepressedCubic dc = depressed_coeffs(mp);
        const double k = tschirnhaus_shift(mp);
        double worst = 0.0;
        for (int j = 0; j < 1000; ++j) {
            const double s = -5.0 + 10.0 * j / 999.0;
            const double ref = rhs_reduced(s + k, mp);
            worst = std::max(worst, std::abs(rhs_depressed(s, dc) - ref) / (1.0 + std::abs(ref)));
        }
        CHECK(worst <= 1e-12);
    }
}
