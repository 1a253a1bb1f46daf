#include <catch_amalgamated.hpp>

#include <random>

#include "thc/bifurcation.hpp"
#include "thc/presets.hpp"
#include "thc/simulate.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace thc;

namespace {

const ModelParams kCal = presets::calibrated_model();
const NondimParams kND = to_nondimensional(kCal, presets::kReferenceAlpha);

}  // namespace

TEST_CASE("equilibrium persists") {
    const EquilibriumSet eq = equilibria(kCal);
    const double root = eq.dS(0);
    const std::vector<double> ic{root};
    const Trajectory tr = integrate(ModelTag::reduced, ic, kCal, kND, 20.0);
    for (std::size_t i = 0; i < tr.size(); ++i) CHECK_THAT(tr.state(i), WithinAbs(root, 1e-6));

    // The full model's own equilibrium sits slightly off dT = theta. Eliminating dT with the
    // temperature equation, dT = alpha theta / (alpha + P / dS), leaves one equation in dS.
    const double alpha = kND.alpha;
    auto temp = [&](double s) { return alpha * kCal.theta / (alpha + kCal.P / s); };
    auto g = [&](double s) {
        const double d = temp(s) - kCal.lambda * s;
        return kCal.P - s * (1.0 + kCal.beta * d * d);
    };
    const auto full_roots = oracle::scan_roots(g, 0.5, 1.5, 1001);
    REQUIRE(full_roots.size() == 1);
    const double s_eq = full_roots[0];
    const std::vector<double> ic2{temp(s_eq), s_eq};
    const Trajectory full = integrate(ModelTag::full_dim, ic2, kCal, kND, 1.0);
    for (std::size_t i = 0; i < full.size(); ++i) {
        CHECK_THAT(full.state(i, 0), WithinAbs(temp(s_eq), 1e-6));
        CHECK_THAT(full.state(i, 1), WithinAbs(s_eq, 1e-6));
    }
    CHECK(std::abs(s_eq - root) < 0.01);
}

TEST_CASE("trajectory invariants") {
    const std::vector<double> ic{0.5};
    const Trajectory tr = integrate(ModelTag::reduced, ic, kCal, kND, 10.0, IntegrateOptions{{}, 101});
    REQUIRE(tr.size() == 101);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == 10.0);
    for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
    for (double s : tr.states) CHECK(std::isfinite(s));
    CHECK(tr.state(0) == 0.5);
}

TEST_CASE("basins") {
    const EquilibriumSet eq = equilibria(kCal);
    const double lo = eq.dS(0), mid = eq.dS(1), hi = eq.dS(2);

    SECTION("either side of the unstable root") {
        CHECK_THAT(settle_reduced(mid - 1e-3, kCal, 100.0), WithinAbs(lo, 1e-6));
        CHECK_THAT(settle_reduced(mid + 1e-3, kCal, 100.0), WithinAbs(hi, 1e-6));
    }
    SECTION("every sampled start lands on a stable root") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(-2.0, 8.0);
        for (int i = 0; i < 100; ++i) {
            const double x0 = u(rng);
            const double end = settle_reduced(x0, kCal, 100.0);
            const double expected = x0 < mid ? lo : hi;
            CHECK_THAT(end, WithinAbs(expected, 1e-6));
        }
    }
}

TEST_CASE("depressed trajectories are shifted reduced trajectories") {
    const double k = tschirnhaus_shift(kCal);
    const std::vector<double> a{2.0}, b{2.0 - k};
    const Trajectory r = integrate(ModelTag::reduced, a, kCal, kND, 5.0);
    const Trajectory d = integrate(ModelTag::depressed, b, kCal, kND, 5.0);
    // samples come from cubic Hermite interpolation, which is looser than the step tolerance
    for (std::size_t i = 0; i < r.size(); ++i) CHECK_THAT(d.state(i) + k, WithinAbs(r.state(i), 1e-5));
    CHECK_THAT(d.final_state() + k, WithinAbs(r.final_state(), 1e-7));
}

TEST_CASE("nondimensional full model tracks the dimensional one") {
    const std::vector<double> dim{kCal.theta * 0.9, 2.0};
    const std::vector<double> nd{0.9, kCal.lambda * 2.0 / kCal.theta};
    IntegrateOptions opt;
    opt.samples = 11;
    const Trajectory a = integrate(ModelTag::full_dim, dim, kCal, kND, 1.0, opt);
    const Trajectory b = integrate(ModelTag::full_nondim, nd, kCal, kND, 1.0, opt);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK_THAT(a.state(i, 0), WithinRel(kCal.theta * b.state(i, 0), 1e-6));
        CHECK_THAT(a.state(i, 1), WithinRel(kCal.theta / kCal.lambda * b.state(i, 1), 1e-6));
    }
}

TEST_CASE("integrate argument checks") {
    const std::vector<double> one{1.0}, two{1.0, 1.0};
    CHECK_THROWS_AS(integrate(ModelTag::reduced, two, kCal, kND, 1.0), InvalidArgument);
    CHECK_THROWS_AS(integrate(ModelTag::full_dim, one, kCal, kND, 1.0), InvalidArgument);
    CHECK_THROWS_AS(integrate(ModelTag::reduced, one, kCal, kND, 0.0), InvalidArgument);
}

TEST_CASE("timescale separation") {
    const EquilibriumSet eq = equilibria(kCal);
    const NondimParams nd = kND;
    const StateND ic{1.2, kCal.lambda * (eq.dS(1) - 0.5) / kCal.theta};

    SECTION("x deviation scales like 1/alpha") {
        const TimescaleReport a = timescale_check(3200.0, nd, ic, 2.0);
        const TimescaleReport b = timescale_check(6400.0, nd, ic, 2.0);
        CHECK(a.max_x_deviation <= 10.0 / 3200.0);
        CHECK_THAT(a.max_x_deviation / b.max_x_deviation, WithinAbs(2.0, 0.3));
    }
    SECTION("full and reduced y converge as alpha grows") {
        double prev = INFINITY;
        for (double alpha : {1e2, 1e3, 1e4}) {
            const TimescaleReport r = timescale_check(alpha, nd, ic, 2.0);
            CHECK(r.max_y_discrepancy < prev);
            prev = r.max_y_discrepancy;
        }
    }
    SECTION("start on the slow manifold at equilibrium") {
        const double y = kCal.lambda * eq.dS(0) / kCal.theta;
        // x = 1 is not invariant for finite alpha: x settles at alpha / (alpha + exchange)
        const double exchange = 1.0 + nd.mu2 * (1.0 - y) * (1.0 - y);
        const TimescaleReport r = timescale_check(1000.0, nd, StateND{1.0, y}, 1.0);
        CHECK_THAT(r.max_x_deviation, WithinRel(exchange / (1000.0 + exchange), 0.05));
        CHECK(r.max_y_discrepancy <= 10.0 / 1000.0);
    }
    CHECK_THROWS_AS(timescale_check(0.0, nd, ic, 1.0), InvalidParameter);
}

TEST_CASE("hysteresis sweep") {
    const auto w = bistability_window_theta(4.98, kCal);
    REQUIRE(w);
    const double start = equilibria(with_param(kCal, SweepParam::theta, 17.0)).dS(0);
    const SweepRecord rec = sweep_round_trip(SweepParam::theta, 17.0, 24.0, 500, kCal, start);
    REQUIRE(rec.jump_events.size() == 2);
    const double step = 7.0 / 499.0;
    std::vector<double> at{rec.jump_events[0].param, rec.jump_events[1].param};
    CHECK(at[0] != at[1]);
    // slow relaxation next to a fold can delay the jump by one more step
    CHECK(std::abs(at[0] - w->hi) <= 2.0 * step);
    CHECK(std::abs(at[1] - w->lo) <= 2.0 * step);
    CHECK(rec.jump_events[0].to < rec.jump_events[0].from);  // high salinity state collapses first
    CHECK(rec.jump_events[1].to > rec.jump_events[1].from);
    std::size_t flagged = 0;
    for (bool b : rec.jump) flagged += b;
    CHECK(flagged == 2);

    SECTION("ramp that avoids the folds is reversible and jump free") {
        const double s0 = equilibria(with_param(kCal, SweepParam::theta, 19.5)).dS(2);
        const SweepRecord r = sweep_round_trip(SweepParam::theta, 19.5, 21.5, 200, kCal, s0);
        CHECK(r.jump_events.empty());
        CHECK_THAT(r.states.back(), WithinAbs(r.states.front(), 1e-6));
    }
    SECTION("monostable ramp") {
        const SweepRecord r = sweep_quasistatic(SweepParam::P, 0.5, 2.0, 100, kCal, 0.5);
        CHECK(r.jump_events.empty());
    }
    SECTION("jump locations converge with resolution") {
        auto upper_error = [&](std::size_t n) {
            const SweepRecord r = sweep_quasistatic(SweepParam::theta, 17.0, 24.0, n, kCal, start);
            REQUIRE(r.jump_events.size() == 1);
            return std::abs(r.jump_events[0].param - w->hi);
        };
        // the fold lies just under 22.8; both resolutions overshoot it by less than one step
        const double coarse = upper_error(100), fine = upper_error(1000);
        CHECK(fine < coarse);
    }
    CHECK_THROWS_AS(sweep_quasistatic(SweepParam::theta, 17.0, 17.0, 10, kCal, start), InvalidArgument);
    CHECK_THROWS_AS(sweep_quasistatic(SweepParam::theta, 17.0, 18.0, 1, kCal, start), InvalidArgument);
}

TEST_CASE("pulse forcing") {
    const EquilibriumSet eq = equilibria(kCal);
    const double low = eq.dS(0);

    SECTION("zero amplitude") {
        const PulseResult r = simulate_pulse(PulseForcing{4.98, 0.0, 1.0, 5.0}, kCal, low, 30.0);
        CHECK_FALSE(r.tipped);
        CHECK_FALSE(r.monostable);
    }
    SECTION("large sustained pulse tips") {
        const PulseResult r = simulate_pulse(PulseForcing{4.98, 2.0, 1.0, 20.0}, kCal, low, 80.0);
        CHECK(r.tipped);
    }
    SECTION("short pulse does not tip") {
        const PulseResult r = simulate_pulse(PulseForcing{4.98, 2.0, 1.0, 1.05}, kCal, low, 80.0);
        CHECK_FALSE(r.tipped);
    }
    SECTION("amplitude threshold by bisection is bracketed") {
        auto tips = [&](double a) { return simulate_pulse(PulseForcing{4.98, a, 1.0, 11.0}, kCal, low, 80.0).tipped; };
        double a = 0.0, b = 4.0;
        REQUIRE_FALSE(tips(a));
        REQUIRE(tips(b));
        for (int i = 0; i < 20; ++i) {
            const double m = 0.5 * (a + b);
            (tips(m) ? b : a) = m;
        }
        // a sustained pulse must at least push P past the upper fold of the P-window
        const auto wP = bistability_window_P(kCal.theta, kCal);
        REQUIRE(wP);
        CHECK(b >= wP->hi - 4.98 - 1e-3);
    }
    SECTION("monostable base never reports tipping") {
        const ModelParams mono = with_param(kCal, SweepParam::P, 5.89);
        const PulseResult r = simulate_pulse(PulseForcing{5.89, -3.0, 1.0, 20.0}, mono, 1.0, 60.0);
        CHECK(r.monostable);
        CHECK_FALSE(r.tipped);
    }
    CHECK_THROWS_AS(simulate_pulse(PulseForcing{4.98, 1.0, 5.0, 1.0}, kCal, low, 30.0), InvalidArgument);
}
