#pragma once

#include "thc/params.hpp"

namespace thc::presets {

// Bistability window in theta at the reference forcing, degC.
inline constexpr double kWindowLo = 18.6;
inline constexpr double kWindowHi = 22.8;

// Named forcings, psu.
inline constexpr double kForcingCessi = 4.98;          // bistable at theta = 20
inline constexpr double kForcingThetaLandscape = 4.89; // used for the theta landscape figure
inline constexpr double kForcingMonostable = 5.89;     // single well at theta = 20

inline constexpr double kThetaCessi = 20.0;
inline constexpr double kThetaMonostable = 17.0;

// calibrate(kWindowLo, kWindowHi, kForcingCessi); checked by the test suite.
inline constexpr double kCalibratedBeta = 0.015611575616701148;
inline constexpr double kCalibratedLambda = 4.4270977280062205;

inline constexpr double kDiffusionYears = 219.0;
inline constexpr double kRelaxationDays = 25.0;
inline constexpr double kReferenceAlpha = kDiffusionYears * kDaysPerYear / kRelaxationDays;

inline ModelParams calibrated_model() {
    return ModelParams{kCalibratedBeta, kCalibratedLambda, kForcingCessi, kThetaCessi};
}

/**
 * Dimensional constants consistent with calibrated_model(): t_d, t_r, S0 and
 * Fbar are Cessi's estimates; alpha_S, H and q are chosen so that
 * derive_dimensional() lands on the calibrated (beta, lambda, P).
 */
inline PhysicalParams reference_physical() {
    PhysicalParams p;
    p.alpha_T = 2e-4;
    p.alpha_S = kCalibratedLambda * p.alpha_T;
    p.t_d = kDiffusionYears;
    p.t_r = kRelaxationDays;
    p.S0 = 35.0;
    p.Fbar = 2.3;
    p.H = p.S0 * p.t_d * p.Fbar / kForcingCessi;
    p.volume = 1e15;
    p.q = kCalibratedBeta * p.volume / (p.t_d * p.alpha_T * p.alpha_T);
    p.theta = kThetaCessi;
    return p;
}

}  // namespace thc::presets
