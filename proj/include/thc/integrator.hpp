#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "thc/error.hpp"

// Dormand-Prince 5(4) with proportional step control and cubic Hermite dense output.

namespace thc {

template <std::size_t N>
using Vec = std::array<double, N>;

struct StepControl {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_init = 0.0;  // 0 selects automatically
    double h_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 20'000'000;
};

struct IntegrationStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

template <std::size_t N>
struct DenseSolution {
    std::vector<double> times;
    std::vector<Vec<N>> states;
    Vec<N> final_state{};
    IntegrationStats stats;
};

namespace detail {

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
    Vec<N> out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    }
    return out;
}

template <std::size_t N>
Vec<N> hermite(double t0, const Vec<N>& y0, const Vec<N>& f0, double t1, const Vec<N>& y1, const Vec<N>& f1,
               double t) {
    const double h = t1 - t0;
    const double u = (t - t0) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u, h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    Vec<N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    return out;
}

template <std::size_t N>
bool all_finite(const Vec<N>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace detail

/**
 * Integrates y' = f(t, y) from t0 to t1 and reports y at each of
 * `sample_times` (sorted, inside [t0, t1]).
 *
 * Throws IntegrationFailure when the step size underflows, the step budget
 * runs out, or the solution stops being finite.
 */
template <std::size_t N, class Rhs>
DenseSolution<N> dopri5(Rhs&& f, double t0, Vec<N> y, double t1, std::span<const double> sample_times,
                        const StepControl& ctl = {}) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (!(t1 > t0)) throw InvalidArgument("integration interval must have t1 > t0");
    if (!detail::all_finite(y)) throw InvalidArgument("initial state must be finite");

    DenseSolution<N> sol;
    std::size_t next_sample = 0;
    auto emit_until = [&](double ta, const Vec<N>& ya, const Vec<N>& fa, double tb, const Vec<N>& yb,
                          const Vec<N>& fb) {
        while (next_sample < sample_times.size() && sample_times[next_sample] <= tb) {
            const double ts = sample_times[next_sample];
            sol.times.push_back(ts);
            sol.states.push_back(ts <= ta ? ya : (ts >= tb ? yb : detail::hermite(ta, ya, fa, tb, yb, fb, ts)));
            ++next_sample;
        }
    };

    auto eval = [&](double t, const Vec<N>& v) {
        ++sol.stats.evaluations;
        return f(t, v);
    };

    double t = t0;
    Vec<N> k1 = eval(t, y);

    auto weighted_norm = [&](const Vec<N>& v, const Vec<N>& ya, const Vec<N>& yb) {
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = ctl.atol + ctl.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            acc += (v[i] / sc) * (v[i] / sc);
        }
        return std::sqrt(acc / static_cast<double>(N));
    };

    double h = ctl.h_init;
    if (!(h > 0.0)) {
        const double d0 = weighted_norm(y, y, y);
        const double d1 = weighted_norm(k1, y, y);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    }
    h = std::min({h, ctl.h_max, t1 - t0});

    emit_until(t, y, k1, t, y, k1);

    bool last_rejected = false;
    while (t < t1) {
        if (sol.stats.accepted + sol.stats.rejected >= ctl.max_steps) {
            throw IntegrationFailure("step budget exhausted before reaching t_end");
        }
        const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h < h_floor) {
            throw IntegrationFailure(
                "step size underflow; the system is too stiff for the explicit integrator, use the reduced model");
        }
        if (t + h > t1 || t1 - (t + h) < h_floor) h = t1 - t;

        const Vec<N> k2 = eval(t + c2 * h, detail::axpy<N>(y, h, {{a21, &k1}}));
        const Vec<N> k3 = eval(t + c3 * h, detail::axpy<N>(y, h, {{a31, &k1}, {a32, &k2}}));
        const Vec<N> k4 = eval(t + c4 * h, detail::axpy<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec<N> k5 = eval(t + c5 * h, detail::axpy<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec<N> k6 =
            eval(t + h, detail::axpy<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const Vec<N> y_new = detail::axpy<N>(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const Vec<N> k7 = eval(t + h, y_new);

        Vec<N> err_vec;
        for (std::size_t i = 0; i < N; ++i) {
            err_vec[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        }
        const double err = (detail::all_finite(y_new) && detail::all_finite(k7))
                               ? weighted_norm(err_vec, y, y_new)
                               : std::numeric_limits<double>::infinity();

        if (err <= 1.0) {
            const double t_new = (h == t1 - t) ? t1 : t + h;
            emit_until(t, y, k1, t_new, y_new, k7);
            t = t_new;
            y = y_new;
            k1 = k7;
            ++sol.stats.accepted;
            double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (last_rejected) fac = std::min(fac, 1.0);
            h = std::min(h * fac, ctl.h_max);
            last_rejected = false;
        } else {
            ++sol.stats.rejected;
            const double fac = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0) : 0.25;
            h *= fac;
            last_rejected = true;
        }
    }
    sol.final_state = y;
    return sol;
}

}  // namespace thc
