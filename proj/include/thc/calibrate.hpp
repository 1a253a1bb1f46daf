#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "thc/bifurcation.hpp"
#include "thc/error.hpp"
#include "thc/params.hpp"

namespace thc {

struct CalibrationOptions {
    std::size_t max_iterations = 100;
    double tol = 1e-9;  // degC, on both window endpoints
};

struct CalibrationResult {
    double beta = 0.0;
    double lambda = 0.0;
    double residual = 0.0;  // max endpoint error, degC
    std::size_t iterations = 0;
};

namespace detail {

struct WindowResidual {
    bool valid = false;
    std::array<double, 2> r{};
    double norm() const { return valid ? std::hypot(r[0], r[1]) : std::numeric_limits<double>::infinity(); }
};

inline WindowResidual window_residual(double log_beta, double log_lambda, double lo, double hi, double P,
                                      std::size_t samples) {
    ModelParams mp{std::exp(log_beta), std::exp(log_lambda), P, lo};
    WindowResidual res;
    if (!std::isfinite(mp.beta) || !std::isfinite(mp.lambda)) return res;
    WindowOptions opt;
    opt.samples = samples;
    opt.tol = 1e-13;
    opt.search = Interval{0.0, std::max(4.0 * std::sqrt(3.0 / mp.beta), 2.0 * hi)};
    const auto w = bistability_window_theta(P, mp, opt);
    if (!w || w->lo <= opt.search->lo || w->hi >= opt.search->hi) return res;
    res.valid = true;
    res.r = {w->lo - lo, w->hi - hi};
    return res;
}

}  // namespace detail

/**
 * Finds (beta, lambda) whose bistability window in theta at forcing P is
 * exactly (window_lo, window_hi).
 *
 * Damped Newton in (log beta, log lambda) on the endpoint residual, with a
 * central-difference Jacobian, seeded by the best point of a log-spaced grid.
 */
inline CalibrationResult calibrate(double window_lo, double window_hi, double P, const CalibrationOptions& opt = {}) {
    if (!std::isfinite(window_lo) || !std::isfinite(window_hi) || !std::isfinite(P)) {
        throw InvalidArgument("calibration window and forcing must be finite");
    }
    if (!(window_lo > 0.0) || !(window_hi > window_lo)) {
        throw InvalidArgument("calibration window must satisfy 0 < lo < hi");
    }

    constexpr std::size_t kSeedSamples = 800;
    constexpr std::size_t kSolveSamples = 2000;

    // Seed scan: beta in [1e-5, 10], lambda in [1e-2, 1e3].
    std::array<double, 2> z{};
    double best = std::numeric_limits<double>::infinity();
    constexpr int kGrid = 48;
    for (int i = 0; i < kGrid; ++i) {
        const double lb = std::log(1e-5) + (std::log(10.0) - std::log(1e-5)) * i / (kGrid - 1);
        if (std::sqrt(3.0 / std::exp(lb)) >= window_lo) continue;  // cusp must sit below the window
        for (int j = 0; j < kGrid; ++j) {
            const double ll = std::log(1e-2) + (std::log(1e3) - std::log(1e-2)) * j / (kGrid - 1);
            const double n = detail::window_residual(lb, ll, window_lo, window_hi, P, kSeedSamples).norm();
            if (n < best) {
                best = n;
                z = {lb, ll};
            }
        }
    }
    if (!std::isfinite(best)) {
        throw CalibrationFailure("no seed parameters produce a bistability window", best);
    }

    auto eval = [&](const std::array<double, 2>& at) {
        return detail::window_residual(at[0], at[1], window_lo, window_hi, P, kSolveSamples);
    };

    detail::WindowResidual cur = eval(z);
    CalibrationResult result;
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        result.iterations = it;
        if (cur.valid && std::max(std::abs(cur.r[0]), std::abs(cur.r[1])) <= opt.tol) break;

        constexpr double h = 1e-6;
        double J[2][2];
        bool jac_ok = true;
        for (int k = 0; k < 2; ++k) {
            auto zp = z, zm = z;
            zp[k] += h;
            zm[k] -= h;
            const auto rp = eval(zp), rm = eval(zm);
            if (!rp.valid || !rm.valid) {
                jac_ok = false;
                break;
            }
            J[0][k] = (rp.r[0] - rm.r[0]) / (2.0 * h);
            J[1][k] = (rp.r[1] - rm.r[1]) / (2.0 * h);
        }
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (!jac_ok || det == 0.0 || !std::isfinite(det)) break;
        const std::array<double, 2> step{-(J[1][1] * cur.r[0] - J[0][1] * cur.r[1]) / det,
                                         -(-J[1][0] * cur.r[0] + J[0][0] * cur.r[1]) / det};

        bool accepted = false;
        for (double t = 1.0; t > 1e-4; t *= 0.5) {
            const std::array<double, 2> trial{z[0] + t * step[0], z[1] + t * step[1]};
            const auto r = eval(trial);
            if (r.norm() < cur.norm()) {
                z = trial;
                cur = r;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }

    result.beta = std::exp(z[0]);
    result.lambda = std::exp(z[1]);
    result.residual = cur.valid ? std::max(std::abs(cur.r[0]), std::abs(cur.r[1]))
                                : std::numeric_limits<double>::infinity();
    if (!(result.residual <= std::max(opt.tol, 1e-6))) {
        throw CalibrationFailure("calibration did not converge", result.residual);
    }
    if (!(std::sqrt(3.0 / result.beta) < window_lo)) {
        throw CalibrationFailure("calibrated cusp does not lie below the window", result.residual);
    }
    return result;
}

}  // namespace thc
