#pragma once

#include <cmath>
#include <string>

#include "thc/error.hpp"

namespace thc {

inline constexpr double kDaysPerYear = 365.25;

/**
 * Dimensional constants of the two-box model.
 *
 * Units: t_d in years, t_r in days, H in m, Fbar in m/yr, volume in m^3 and
 * q in m^3/yr per squared density unit, so that q * t_d / volume is
 * dimensionless. alpha_T is per degC, alpha_S per psu, S0 in psu, theta in degC.
 */
struct PhysicalParams {
    double alpha_T = 0.0;
    double alpha_S = 0.0;
    double q = 0.0;
    double volume = 0.0;
    double t_d = 0.0;
    double t_r = 0.0;
    double H = 0.0;
    double S0 = 0.0;
    double Fbar = 0.0;
    double theta = 0.0;
};

/// Cessi's nondimensional triple: timescale ratio, diffusive/advective ratio, scaled flux.
struct NondimParams {
    double alpha = 0.0;
    double mu2 = 0.0;
    double p = 0.0;
};

/// Parameters of the dimensional reduced model dS/dt' = P - S (1 + beta (theta - lambda S)^2).
struct ModelParams {
    double beta = 0.0;    // per degC^2
    double lambda = 0.0;  // degC per psu
    double P = 0.0;       // psu per t'
    double theta = 0.0;   // degC
};

namespace detail {

inline void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw InvalidParameter(std::string(name) + " must be finite");
    }
}

inline void require_positive(double v, const char* name) {
    require_finite(v, name);
    if (!(v > 0.0)) {
        throw InvalidParameter(std::string(name) + " must be strictly positive");
    }
}

}  // namespace detail

// q = 0 (no advective exchange) is admitted; every other field must be > 0.
inline void validate(const PhysicalParams& p) {
    detail::require_positive(p.alpha_T, "alpha_T");
    detail::require_positive(p.alpha_S, "alpha_S");
    detail::require_finite(p.q, "q");
    if (p.q < 0.0) throw InvalidParameter("q must be non-negative");
    detail::require_positive(p.volume, "volume");
    detail::require_positive(p.t_d, "t_d");
    detail::require_positive(p.t_r, "t_r");
    detail::require_positive(p.H, "H");
    detail::require_positive(p.S0, "S0");
    detail::require_positive(p.Fbar, "Fbar");
    detail::require_positive(p.theta, "theta");
}

inline void validate(const NondimParams& nd) {
    detail::require_positive(nd.alpha, "alpha");
    detail::require_finite(nd.mu2, "mu2");
    if (nd.mu2 < 0.0) throw InvalidParameter("mu2 must be non-negative");
    detail::require_finite(nd.p, "p");
}

inline void validate(const ModelParams& mp) {
    detail::require_positive(mp.beta, "beta");
    detail::require_positive(mp.lambda, "lambda");
    detail::require_finite(mp.P, "P");
    detail::require_finite(mp.theta, "theta");
}

inline NondimParams derive_nondimensional(const PhysicalParams& phys) {
    validate(phys);
    const double thermal = phys.alpha_T * phys.theta;
    NondimParams nd;
    nd.alpha = phys.t_d * kDaysPerYear / phys.t_r;
    nd.mu2 = phys.q * phys.t_d * thermal * thermal / phys.volume;
    nd.p = phys.alpha_S * phys.S0 * phys.t_d * phys.Fbar / (thermal * phys.H);
    return nd;
}

inline ModelParams derive_dimensional(const PhysicalParams& phys) {
    validate(phys);
    ModelParams mp;
    mp.beta = phys.q * phys.t_d * phys.alpha_T * phys.alpha_T / phys.volume;
    mp.lambda = phys.alpha_S / phys.alpha_T;
    mp.P = phys.S0 * phys.t_d * phys.Fbar / phys.H;
    mp.theta = phys.theta;
    return mp;
}

/// mu2 = beta theta^2 and p = lambda P / theta. Requires theta != 0.
inline NondimParams to_nondimensional(const ModelParams& mp, double alpha) {
    if (mp.theta == 0.0) throw InvalidParameter("theta must be nonzero to nondimensionalize");
    return NondimParams{alpha, mp.beta * mp.theta * mp.theta, mp.lambda * mp.P / mp.theta};
}

}  // namespace thc
