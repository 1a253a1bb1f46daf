#pragma once

#include "thc/params.hpp"

// Right-hand sides of the box model at its three levels of reduction. Time is
// the diffusive time t' throughout; no unit conversion happens in here.

namespace thc {

/// Nondimensional state: x = dT / theta, y = alpha_S dS / (alpha_T theta).
struct StateND {
    double x = 0.0;
    double y = 0.0;
};

struct StateDim {
    double dT = 0.0;  // degC
    double dS = 0.0;  // psu
};

/// Coefficients of ds/dt' = h + r s - c3 s^3.
struct DepressedCubic {
    double r = 0.0;
    double h = 0.0;
    double c3 = 0.0;
};

inline StateND rhs_full_nondim(const StateND& s, const NondimParams& nd) {
    const double d = s.x - s.y;
    const double exchange = 1.0 + nd.mu2 * d * d;
    return {-nd.alpha * (s.x - 1.0) - s.x * exchange, nd.p - s.y * exchange};
}

inline StateDim rhs_full_dim(const StateDim& s, const ModelParams& mp, double alpha) {
    const double d = s.dT - mp.lambda * s.dS;
    const double exchange = 1.0 + mp.beta * d * d;
    return {-alpha * (s.dT - mp.theta) - s.dT * exchange, mp.P - s.dS * exchange};
}

/// Salinity dynamics on the critical manifold dT = theta.
inline double rhs_reduced(double dS, const ModelParams& mp) {
    const double d = mp.theta - mp.lambda * dS;
    return mp.P - dS * (1.0 + mp.beta * d * d);
}

inline double rhs_reduced_nondim(double y, const NondimParams& nd) {
    const double d = 1.0 - y;
    return nd.p - y * (1.0 + nd.mu2 * d * d);
}

/// Offset k with dS = s + k removing the quadratic term of rhs_reduced.
inline double tschirnhaus_shift(const ModelParams& mp) {
    if (!(mp.lambda > 0.0) || !std::isfinite(mp.lambda)) {
        throw InvalidParameter("lambda must be strictly positive");
    }
    return 2.0 * mp.theta / (3.0 * mp.lambda);
}

inline DepressedCubic depressed_coeffs(const ModelParams& mp) {
    const double th = mp.theta;
    DepressedCubic dc;
    dc.r = mp.beta * th * th / 3.0 - 1.0;
    dc.h = mp.P - 2.0 * th / (3.0 * mp.lambda) - 2.0 * mp.beta * th * th * th / (27.0 * mp.lambda);
    dc.c3 = mp.beta * mp.lambda * mp.lambda;
    return dc;
}

inline double rhs_depressed(double s, const DepressedCubic& dc) {
    return dc.h + dc.r * s - dc.c3 * s * s * s;
}

/// d/ds of rhs_depressed; negative at stable equilibria.
inline double rhs_depressed_slope(double s, const DepressedCubic& dc) {
    return dc.r - 3.0 * dc.c3 * s * s;
}

}  // namespace thc
