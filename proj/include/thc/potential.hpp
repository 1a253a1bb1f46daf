#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "thc/bifurcation.hpp"
#include "thc/dynamics.hpp"
#include "thc/params.hpp"

namespace thc {

// The forcing enters as -p y so that dy/dt' = -V'(y) holds exactly.
inline double potential_nondim(double y, const NondimParams& nd) {
    const double y2 = y * y;
    return 0.5 * y2 + nd.mu2 * (0.5 * y2 - (2.0 / 3.0) * y2 * y + 0.25 * y2 * y2) - nd.p * y;
}

/// Antiderivative of -rhs_reduced in dS.
inline double potential_dim(double dS, const ModelParams& mp) {
    const double s2 = dS * dS;
    const double th = mp.theta, l = mp.lambda;
    return -mp.P * dS + 0.5 * s2 +
           mp.beta * (0.5 * th * th * s2 - (2.0 * l * th / 3.0) * s2 * dS + 0.25 * l * l * s2 * s2);
}

/// Second derivative of potential_dim, i.e. -d rhs_reduced / d dS.
inline double potential_dim_curvature(double dS, const ModelParams& mp) {
    return -reduced_derivatives(dS, mp.theta, mp.P, mp).f_S;
}

struct Extremum {
    double location = 0.0;
    double value = 0.0;  // depth for minima, height for maxima
};

struct Barrier {
    std::size_t from_min = 0;   // index into minima
    std::size_t over_max = 0;   // index into maxima
    double height = 0.0;        // V(max) - V(min) >= 0
};

struct ExtremaReport {
    std::vector<Extremum> minima;
    std::vector<Extremum> maxima;
    std::vector<Extremum> inflections;  // degenerate equilibria (folds, cusp)
    std::vector<Barrier> barriers;

    double global_min() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& e : minima) m = std::min(m, e.value);
        for (const auto& e : inflections) m = std::min(m, e.value);
        return m;
    }
};

namespace detail {

template <class V>
ExtremaReport extrema_from(const EquilibriumSet& eq, V&& potential) {
    ExtremaReport rep;
    struct Tagged {
        double x;
        Stability st;
    };
    std::vector<Tagged> pts;
    for (std::size_t i = 0; i < eq.distinct(); ++i) pts.push_back({eq.dS(i), eq.roots[i].stability});
    std::sort(pts.begin(), pts.end(), [](const Tagged& a, const Tagged& b) { return a.x < b.x; });

    std::vector<std::pair<char, std::size_t>> order;  // ('m' | 'M', index) left to right
    for (const auto& t : pts) {
        const Extremum e{t.x, potential(t.x)};
        if (t.st == Stability::stable) {
            order.emplace_back('m', rep.minima.size());
            rep.minima.push_back(e);
        } else if (t.st == Stability::unstable) {
            order.emplace_back('M', rep.maxima.size());
            rep.maxima.push_back(e);
        } else {
            order.emplace_back('i', rep.inflections.size());
            rep.inflections.push_back(e);
        }
    }
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (order[k].first != 'm') continue;
        for (std::size_t nb : {k - 1, k + 1}) {
            if (nb >= order.size() || order[nb].first != 'M') continue;
            const double hmax = rep.maxima[order[nb].second].value;
            const double hmin = rep.minima[order[k].second].value;
            rep.barriers.push_back({order[k].second, order[nb].second, std::max(0.0, hmax - hmin)});
        }
    }
    return rep;
}

}  // namespace detail

/// Extrema of V(dS): minima at stable equilibria, maxima at unstable ones.
inline ExtremaReport extrema(const ModelParams& mp) {
    const EquilibriumSet eq = equilibria(mp);
    return detail::extrema_from(eq, [&](double x) { return potential_dim(x, mp); });
}

/**
 * Extrema of V(y). The nondimensional cubic is the dimensional one with
 * beta = mu2, lambda = theta = 1, P = p; mu2 = 0 leaves the single minimum y = p.
 */
inline ExtremaReport extrema(const NondimParams& nd) {
    validate(nd);
    auto V = [&](double y) { return potential_nondim(y, nd); };
    if (nd.mu2 == 0.0) {
        ExtremaReport rep;
        rep.minima.push_back({nd.p, V(nd.p)});
        return rep;
    }
    const ModelParams equivalent{nd.mu2, 1.0, nd.p, 1.0};
    return detail::extrema_from(equilibria(equivalent), V);
}

// ---------------------------------------------------------------------------
// Landscape surfaces

enum class LandscapeAxis { theta, P };

inline const char* to_string(LandscapeAxis a) { return a == LandscapeAxis::theta ? "theta" : "P"; }

enum class BranchFlag { none, stable, unstable };

inline const char* to_string(BranchFlag f) {
    switch (f) {
        case BranchFlag::none: return "none";
        case BranchFlag::stable: return "stable";
        case BranchFlag::unstable: return "unstable";
    }
    return "none";
}

/**
 * V(dS, param) on a regular grid, each param column gauged so that its
 * global minimum is 0. `flags` marks the coordinate node nearest to each
 * equilibrium of that column.
 */
struct Landscape {
    LandscapeAxis axis = LandscapeAxis::theta;
    std::vector<double> coords;
    std::vector<double> params;
    std::vector<double> values;      // values[iparam * coords.size() + icoord]
    std::vector<BranchFlag> flags;   // same layout
    BranchDiagram branches;

    double value(std::size_t icoord, std::size_t iparam) const { return values[iparam * coords.size() + icoord]; }
    BranchFlag flag(std::size_t icoord, std::size_t iparam) const { return flags[iparam * coords.size() + icoord]; }
};

inline Landscape landscape_grid(LandscapeAxis axis, const Interval& coord_range, const Interval& param_range,
                                std::size_t n_coord, std::size_t n_param, const ModelParams& base) {
    validate(base);
    detail::require_range(coord_range, n_coord, "coordinate");
    detail::require_range(param_range, n_param, "parameter");

    const SweepParam which = axis == LandscapeAxis::theta ? SweepParam::theta : SweepParam::P;
    Landscape L;
    L.axis = axis;
    L.coords = linspace(coord_range, n_coord);
    L.params = linspace(param_range, n_param);
    L.values.resize(n_coord * n_param);
    L.flags.assign(n_coord * n_param, BranchFlag::none);
    L.branches = equilibrium_branch(which, param_range, base, n_param);

    const double dx = L.coords[1] - L.coords[0];
    for (std::size_t j = 0; j < n_param; ++j) {
        const ModelParams mp = with_param(base, which, L.params[j]);
        const double gauge = extrema(mp).global_min();
        for (std::size_t i = 0; i < n_coord; ++i) {
            L.values[j * n_coord + i] = potential_dim(L.coords[i], mp) - gauge;
        }
    }
    for (const Branch& b : L.branches.branches) {
        for (const BranchPoint& pt : b.points) {
            if (pt.dS < coord_range.lo - 0.5 * dx || pt.dS > coord_range.hi + 0.5 * dx) continue;
            const auto j = static_cast<std::size_t>(
                std::lround((pt.param - param_range.lo) / (param_range.hi - param_range.lo) * (n_param - 1)));
            const auto i = static_cast<std::size_t>(std::clamp<long>(std::lround((pt.dS - coord_range.lo) / dx), 0,
                                                                     static_cast<long>(n_coord - 1)));
            L.flags[j * n_coord + i] = pt.stability == Stability::stable ? BranchFlag::stable : BranchFlag::unstable;
        }
    }
    return L;
}

}  // namespace thc
