#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thc/dynamics.hpp"
#include "thc/error.hpp"
#include "thc/params.hpp"

namespace thc {

enum class Stability { stable, unstable, degenerate };

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::degenerate: return "degenerate";
    }
    return "unknown";
}

struct Equilibrium {
    double s = 0.0;  // shifted coordinate
    int multiplicity = 1;
    Stability stability = Stability::stable;
};

/// Real equilibria of the depressed cubic, sorted ascending in s.
struct EquilibriumSet {
    std::vector<Equilibrium> roots;
    double theta = std::numeric_limits<double>::quiet_NaN();
    double P = std::numeric_limits<double>::quiet_NaN();
    double shift = 0.0;  // dS = s + shift
    double delta = 0.0;
    bool degenerate = false;

    std::size_t distinct() const { return roots.size(); }
    double dS(std::size_t i) const { return roots[i].s + shift; }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    bool contains(double v) const { return v > lo && v < hi; }
};

// ---------------------------------------------------------------------------
// Discriminant

/// Discriminant of the monic form s^3 - (r/c3) s - h/c3; positive iff three distinct real roots.
inline double discriminant(const DepressedCubic& dc) {
    const double a = dc.r / dc.c3;
    const double b = dc.h / dc.c3;
    return 4.0 * a * a * a - 27.0 * b * b;
}

/// Scale used to decide when a discriminant counts as zero.
inline double discriminant_scale(const DepressedCubic& dc) {
    const double a = dc.r / dc.c3;
    const double b = dc.h / dc.c3;
    return std::max({1.0, std::abs(a * a * a), b * b});
}

inline bool is_degenerate(const DepressedCubic& dc, double delta) {
    return std::abs(delta) <= 1e-12 * discriminant_scale(dc);
}

inline double discriminant(double theta, double P, const ModelParams& mp) {
    ModelParams at = mp;
    at.theta = theta;
    at.P = P;
    return discriminant(depressed_coeffs(at));
}

/// Partial derivatives (d/dtheta, d/dP) of discriminant(theta, P, mp).
inline std::pair<double, double> discriminant_gradient(double theta, double P, const ModelParams& mp) {
    ModelParams at = mp;
    at.theta = theta;
    at.P = P;
    const DepressedCubic dc = depressed_coeffs(at);
    const double c = dc.c3;
    const double r_theta = 2.0 * mp.beta * theta / 3.0;
    const double h_theta = -2.0 / (3.0 * mp.lambda) - 2.0 * mp.beta * theta * theta / (9.0 * mp.lambda);
    const double a = dc.r / c;
    const double b = dc.h / c;
    return {12.0 * a * a * r_theta / c - 54.0 * b * h_theta / c, -54.0 * b / c};
}

// ---------------------------------------------------------------------------
// Roots

namespace detail {

inline double polish_root(double s, const DepressedCubic& dc) {
    for (int it = 0; it < 3; ++it) {
        const double f = rhs_depressed(s, dc);
        const double df = rhs_depressed_slope(s, dc);
        if (f == 0.0 || df == 0.0) break;
        const double next = s - f / df;
        if (!(std::abs(rhs_depressed(next, dc)) < std::abs(f))) break;
        s = next;
    }
    return s;
}

inline Stability classify(double s, int multiplicity, const DepressedCubic& dc) {
    if (multiplicity > 1) return Stability::degenerate;
    const double slope = rhs_depressed_slope(s, dc);
    if (slope < 0.0) return Stability::stable;
    if (slope > 0.0) return Stability::unstable;
    return Stability::degenerate;
}

}  // namespace detail

/**
 * Real roots of h + r s - c3 s^3 = 0 by the trigonometric / hyperbolic
 * closed forms for depressed cubics, each simple root polished by at most
 * three Newton steps. A discriminant within the degeneracy tolerance is
 * reported as a double (or triple) root.
 */
inline EquilibriumSet solve_cubic(const DepressedCubic& dc) {
    if (!(dc.c3 > 0.0)) throw InvalidParameter("cubic coefficient c3 must be positive");

    // Monic form s^3 + A s + B = 0.
    const double A = -dc.r / dc.c3;
    const double B = -dc.h / dc.c3;

    EquilibriumSet out;
    out.delta = discriminant(dc);
    out.degenerate = is_degenerate(dc, out.delta);

    auto push = [&](double s, int mult) {
        if (mult == 1) s = detail::polish_root(s, dc);
        out.roots.push_back({s, mult, detail::classify(s, mult, dc)});
    };

    if (out.degenerate) {
        if (A < 0.0 && B != 0.0) {
            push(3.0 * B / A, 1);
            push(-3.0 * B / (2.0 * A), 2);
        } else {
            push(std::cbrt(-B), 3);
        }
    } else if (out.delta > 0.0) {
        // Three distinct roots; A < 0 here.
        const double m = 2.0 * std::sqrt(-A / 3.0);
        const double arg = std::clamp(3.0 * B / (A * m), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            push(m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0), 1);
        }
    } else {
        double s;
        if (A < 0.0) {
            const double arg = std::max(1.0, -3.0 * std::abs(B) / (2.0 * A) * std::sqrt(-3.0 / A));
            s = -2.0 * std::copysign(1.0, B) * std::sqrt(-A / 3.0) * std::cosh(std::acosh(arg) / 3.0);
        } else if (A > 0.0) {
            s = -2.0 * std::sqrt(A / 3.0) * std::sinh(std::asinh(3.0 * B / (2.0 * A) * std::sqrt(3.0 / A)) / 3.0);
        } else {
            s = std::cbrt(-B);
        }
        push(s, 1);
    }

    std::sort(out.roots.begin(), out.roots.end(),
              [](const Equilibrium& a, const Equilibrium& b) { return a.s < b.s; });
    return out;
}

/// Equilibria of the reduced model at mp, with theta, P and the shift filled in.
inline EquilibriumSet equilibria(const ModelParams& mp) {
    validate(mp);
    EquilibriumSet eq = solve_cubic(depressed_coeffs(mp));
    eq.theta = mp.theta;
    eq.P = mp.P;
    eq.shift = tschirnhaus_shift(mp);
    return eq;
}

// ---------------------------------------------------------------------------
// Discriminant grid and its zero contour

struct ParamPoint {
    double theta = 0.0;
    double P = 0.0;
};

struct DiscriminantGrid {
    std::vector<double> thetas;
    std::vector<double> Ps;
    std::vector<double> delta;  // row-major: delta[iP * thetas.size() + itheta]
    std::vector<ParamPoint> contour;

    double at(std::size_t itheta, std::size_t iP) const { return delta[iP * thetas.size() + itheta]; }
    double cell_theta() const { return thetas[1] - thetas[0]; }
    double cell_P() const { return Ps[1] - Ps[0]; }
};

inline std::vector<double> linspace(const Interval& range, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = (i + 1 == n) ? range.hi
                            : range.lo + (range.hi - range.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

namespace detail {

inline void require_range(const Interval& r, std::size_t n, const char* what) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.hi > r.lo)) {
        throw InvalidArgument(std::string(what) + " range must satisfy lo < hi");
    }
    if (n < 2) throw InvalidArgument(std::string(what) + " needs at least 2 samples");
}

}  // namespace detail

namespace detail {

/// Zero of g on [a, b] given a sign change, by Newton steps that fall back to bisection
/// whenever they leave the current bracket. Starts from linear interpolation.
template <class G, class DG>
double refine_on_edge(G&& g, DG&& dg, double a, double b, double ga, double gb) {
    double x = a + (b - a) * ga / (ga - gb);
    for (int it = 0; it < 60; ++it) {
        const double gx = g(x);
        if (gx == 0.0) return x;
        if ((gx > 0.0) == (ga > 0.0)) {
            a = x;
            ga = gx;
        } else {
            b = x;
        }
        const double d = dg(x);
        double next = d != 0.0 ? x - gx / d : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
            return next;
        }
        x = next;
    }
    return x;
}

}  // namespace detail

/**
 * Evaluates the discriminant on a regular (theta, P) grid and extracts its
 * zero level set by marching squares: one point per sign-changing grid edge,
 * placed by linear interpolation and then Newton-corrected along the edge.
 * Near the cusp the zero can sit far from the interpolated guess, so Newton
 * is safeguarded by the edge bracket.
 */
inline DiscriminantGrid discriminant_grid(const Interval& theta_range, const Interval& P_range, std::size_t n_theta,
                                          std::size_t n_P, const ModelParams& mp) {
    validate(mp);
    detail::require_range(theta_range, n_theta, "theta");
    detail::require_range(P_range, n_P, "P");

    DiscriminantGrid g;
    g.thetas = linspace(theta_range, n_theta);
    g.Ps = linspace(P_range, n_P);
    g.delta.resize(n_theta * n_P);
    for (std::size_t j = 0; j < n_P; ++j) {
        for (std::size_t i = 0; i < n_theta; ++i) {
            g.delta[j * n_theta + i] = discriminant(g.thetas[i], g.Ps[j], mp);
        }
    }

    auto crossing = [](double a, double b) { return (a > 0.0) != (b > 0.0); };

    for (std::size_t j = 0; j < n_P; ++j) {
        const double P = g.Ps[j];
        for (std::size_t i = 0; i < n_theta; ++i) {
            const double th = g.thetas[i];
            const double d0 = g.at(i, j);
            if (i + 1 < n_theta && crossing(d0, g.at(i + 1, j))) {
                const double z = detail::refine_on_edge([&](double x) { return discriminant(x, P, mp); },
                                                        [&](double x) { return discriminant_gradient(x, P, mp).first; },
                                                        th, g.thetas[i + 1], d0, g.at(i + 1, j));
                g.contour.push_back({z, P});
            }
            if (j + 1 < n_P && crossing(d0, g.at(i, j + 1))) {
                const double z = detail::refine_on_edge([&](double x) { return discriminant(th, x, mp); },
                                                        [&](double x) { return discriminant_gradient(th, x, mp).second; },
                                                        P, g.Ps[j + 1], d0, g.at(i, j + 1));
                g.contour.push_back({th, z});
            }
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Folds and cusp

/// f = dS/dt' of the reduced model and its first three S-derivatives.
struct ReducedDerivatives {
    double f = 0.0;
    double f_S = 0.0;
    double f_SS = 0.0;
    double f_SSS = 0.0;
};

inline ReducedDerivatives reduced_derivatives(double S, double theta, double P, const ModelParams& mp) {
    const double b = mp.beta, l = mp.lambda;
    ReducedDerivatives d;
    d.f = P - S * (1.0 + b * (theta - l * S) * (theta - l * S));
    d.f_S = -b * theta * theta + 4.0 * b * l * S * theta - (1.0 + 3.0 * b * l * l * S * S);
    d.f_SS = 4.0 * b * l * theta - 6.0 * b * l * l * S;
    d.f_SSS = -6.0 * b * l * l;
    return d;
}

/// Temperatures theta_c at which S is a fold (f_S = 0): 2 lambda S -+ sqrt((lambda S)^2 - 1/beta).
inline std::vector<double> fold_thetas_at_state(double S, const ModelParams& mp) {
    validate(mp);
    const double u = mp.lambda * S;
    const double inner = u * u - 1.0 / mp.beta;
    const double tol = 1e-14 * std::max(u * u, 1.0 / mp.beta);
    if (inner < -tol) return {};
    if (std::abs(inner) <= tol) return {2.0 * u};
    const double w = std::sqrt(inner);
    return {2.0 * u - w, 2.0 * u + w};
}

struct FoldPoint {
    double s_star = 0.0;   // shifted state at the fold
    double dS = 0.0;       // same state, unshifted
    double theta_c = 0.0;
    double P_c = 0.0;
};

enum class FoldRoot { minus, plus };

/// Fold through state S on the chosen root of the fold quadratic; P_c makes S an equilibrium.
inline std::optional<FoldPoint> fold_point_at_state(double S, FoldRoot root, const ModelParams& mp) {
    const std::vector<double> th = fold_thetas_at_state(S, mp);
    if (th.empty()) return std::nullopt;
    const double theta_c = (root == FoldRoot::minus || th.size() == 1) ? th.front() : th.back();
    const double d = theta_c - mp.lambda * S;
    FoldPoint fp;
    fp.dS = S;
    fp.theta_c = theta_c;
    fp.P_c = S * (1.0 + mp.beta * d * d);
    fp.s_star = S - 2.0 * theta_c / (3.0 * mp.lambda);
    return fp;
}

struct CuspPoint {
    double theta_cusp = 0.0;
    double P_cusp = 0.0;
    double S_c = 0.0;  // unshifted
};

/// Closed-form cusp, checked against f = f_S = f_SS = 0 and f_SSS = -6 beta lambda^2.
inline CuspPoint cusp_point(const ModelParams& mp) {
    validate(mp);
    const double root3b = std::sqrt(3.0 * mp.beta);
    CuspPoint c;
    c.theta_cusp = std::sqrt(3.0 / mp.beta);
    c.P_cusp = 8.0 / (3.0 * mp.lambda * root3b);
    c.S_c = 2.0 / (mp.lambda * root3b);

    const ReducedDerivatives d = reduced_derivatives(c.S_c, c.theta_cusp, c.P_cusp, mp);
    const double c3 = mp.beta * mp.lambda * mp.lambda;
    const double tol = 1e-9;
    if (std::abs(d.f) > tol * (1.0 + c.P_cusp) || std::abs(d.f_S) > tol ||
        std::abs(d.f_SS) > tol * (1.0 + 6.0 * c3 * c.S_c) || !(d.f_SSS < 0.0) ||
        std::abs(d.f_SSS + 6.0 * c3) > tol * c3) {
        throw InternalConsistencyError("cusp closed form fails its defining residuals");
    }
    return c;
}

/**
 * The two fold curves in (theta, P), both starting at the cusp.
 *
 * `lower` follows the minus root of the fold quadratic for S >= S_c; it is
 * the fold with the smaller P at fixed theta. `upper` follows the minus root
 * from S_c down to S_min = 1 / (lambda sqrt(beta)) and continues on the plus
 * root back up. Only S > 0 is traced (negative S gives theta_c < 0).
 */
struct FoldCurves {
    std::vector<FoldPoint> lower;
    std::vector<FoldPoint> upper;
};

inline FoldCurves trace_fold_curves(const ModelParams& mp, const Interval& s_range, std::size_t n) {
    validate(mp);
    if (n < 2) throw InvalidArgument("fold tracing needs at least 2 samples");
    const double s_min = 1.0 / (mp.lambda * std::sqrt(mp.beta));
    const double s_c = cusp_point(mp).S_c;
    const double lo = std::max(s_range.lo, s_min);
    const double hi = s_range.hi;

    FoldCurves curves;
    if (!(hi > lo)) return curves;

    auto sample = [&](double a, double b, FoldRoot root, std::vector<FoldPoint>& into) {
        if (!(b > a)) return;
        for (double S : linspace({a, b}, n)) {
            if (auto fp = fold_point_at_state(S, root, mp)) into.push_back(*fp);
        }
    };

    sample(std::max(lo, s_c), hi, FoldRoot::minus, curves.lower);

    std::vector<FoldPoint> minus_part;
    sample(lo, std::min(hi, s_c), FoldRoot::minus, minus_part);
    std::reverse(minus_part.begin(), minus_part.end());
    curves.upper = std::move(minus_part);
    std::vector<FoldPoint> plus_part;
    sample(lo, hi, FoldRoot::plus, plus_part);
    if (!curves.upper.empty() && !plus_part.empty() && plus_part.front().dS == curves.upper.back().dS) {
        plus_part.erase(plus_part.begin());
    }
    curves.upper.insert(curves.upper.end(), plus_part.begin(), plus_part.end());
    return curves;
}

// ---------------------------------------------------------------------------
// Bistability windows

struct WindowOptions {
    std::optional<Interval> search;  // default [0, 4 theta_cusp] or [0, 4 P_cusp]
    std::size_t samples = 4000;
    double tol = 1e-8;
};

namespace detail {

template <class F>
double bisect_sign_change(F&& f, double neg, double pos, double tol) {
    for (int it = 0; it < 200 && std::abs(pos - neg) > tol; ++it) {
        const double mid = 0.5 * (neg + pos);
        if (f(mid) > 0.0) {
            pos = mid;
        } else {
            neg = mid;
        }
    }
    return 0.5 * (neg + pos);
}

/// Widest interval within `search` on which f > 0, bracketed on a uniform scan.
template <class F>
std::optional<Interval> positive_window(F&& f, const Interval& search, std::size_t samples, double tol) {
    detail::require_range(search, samples, "search");
    const std::vector<double> xs = linspace(search, samples);
    std::vector<double> vals(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) vals[i] = f(xs[i]);

    std::optional<Interval> best;
    std::size_t i = 0;
    while (i < xs.size()) {
        if (!(vals[i] > 0.0)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < xs.size() && vals[j + 1] > 0.0) ++j;
        Interval w;
        w.lo = (i == 0) ? xs[0] : bisect_sign_change(f, xs[i - 1], xs[i], tol);
        w.hi = (j + 1 == xs.size()) ? xs.back() : bisect_sign_change(f, xs[j + 1], xs[j], tol);
        if (!best || w.width() > best->width()) best = w;
        i = j + 1;
    }
    return best;
}

}  // namespace detail

inline std::optional<Interval> bistability_window_theta(double P, const ModelParams& mp, const WindowOptions& opt = {}) {
    validate(mp);
    const Interval search = opt.search.value_or(Interval{0.0, 4.0 * cusp_point(mp).theta_cusp});
    return detail::positive_window([&](double th) { return discriminant(th, P, mp); }, search, opt.samples, opt.tol);
}

inline std::optional<Interval> bistability_window_P(double theta, const ModelParams& mp, const WindowOptions& opt = {}) {
    validate(mp);
    const Interval search = opt.search.value_or(Interval{0.0, 4.0 * cusp_point(mp).P_cusp});
    return detail::positive_window([&](double P) { return discriminant(theta, P, mp); }, search, opt.samples,
                                   opt.tol);
}

// ---------------------------------------------------------------------------
// Natural-parameter continuation of equilibrium branches

enum class SweepParam { theta, P };

inline const char* to_string(SweepParam p) { return p == SweepParam::theta ? "theta" : "P"; }

inline ModelParams with_param(ModelParams mp, SweepParam which, double value) {
    (which == SweepParam::theta ? mp.theta : mp.P) = value;
    return mp;
}

struct BranchPoint {
    double param = 0.0;
    double dS = 0.0;
    double s = 0.0;
    Stability stability = Stability::stable;
};

struct Branch {
    int id = 0;
    std::vector<BranchPoint> points;
};

struct FoldMarker {
    double param = 0.0;
    double dS = 0.0;  // location of the double root
};

struct BranchDiagram {
    SweepParam param = SweepParam::P;
    std::vector<double> values;
    std::vector<Branch> branches;
    std::vector<FoldMarker> folds;
};

/**
 * Continues equilibria of the reduced model across `range` with the other
 * parameter fixed to the value in `mp`. Roots are paired to the previous step
 * by nearest dS, ties going to the pairing that keeps the stability label.
 * Where the root count changes, the fold is refined by bisection on the sign
 * of the discriminant.
 */
inline BranchDiagram equilibrium_branch(SweepParam which, const Interval& range, const ModelParams& mp,
                                        std::size_t n) {
    validate(mp);
    detail::require_range(range, n, "sweep");

    BranchDiagram out;
    out.param = which;
    out.values = linspace(range, n);

    struct Active {
        std::size_t branch;
        double dS;
        Stability stability;
    };
    std::vector<Active> active;
    std::size_t prev_count = 0;

    auto delta_at = [&](double v) { return discriminant(depressed_coeffs(with_param(mp, which, v))); };

    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double v = out.values[i];
        const EquilibriumSet eq = equilibria(with_param(mp, which, v));

        if (i > 0 && eq.distinct() != prev_count && (eq.distinct() == 3 || prev_count == 3)) {
            const double a = out.values[i - 1];
            const double fold = (delta_at(a) > 0.0) ? detail::bisect_sign_change(delta_at, v, a, 1e-12 * (1.0 + std::abs(v)))
                                                    : detail::bisect_sign_change(delta_at, a, v, 1e-12 * (1.0 + std::abs(v)));
            const ModelParams at = with_param(mp, which, fold);
            const DepressedCubic dc = depressed_coeffs(at);
            const double s_double = (dc.r != 0.0) ? -1.5 * dc.h / dc.r : 0.0;
            out.folds.push_back({fold, s_double + tschirnhaus_shift(at)});
        }

        std::vector<Active> next;
        std::vector<bool> root_used(eq.distinct(), false);
        std::vector<bool> prev_used(active.size(), false);

        struct Pair {
            double dist;
            bool mismatch;
            std::size_t prev, root;
        };
        std::vector<Pair> pairs;
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t r = 0; r < eq.distinct(); ++r) {
                pairs.push_back({std::abs(active[a].dS - eq.dS(r)), active[a].stability != eq.roots[r].stability, a, r});
            }
        }
        std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
            if (x.dist != y.dist) return x.dist < y.dist;
            if (x.mismatch != y.mismatch) return !x.mismatch;
            return x.prev < y.prev;
        });

        std::vector<std::size_t> assignment(eq.distinct(), 0);
        for (const Pair& p : pairs) {
            if (prev_used[p.prev] || root_used[p.root]) continue;
            prev_used[p.prev] = root_used[p.root] = true;
            assignment[p.root] = active[p.prev].branch;
        }
        for (std::size_t r = 0; r < eq.distinct(); ++r) {
            if (!root_used[r]) {
                assignment[r] = out.branches.size();
                out.branches.push_back(Branch{static_cast<int>(out.branches.size()), {}});
            }
            const Equilibrium& e = eq.roots[r];
            out.branches[assignment[r]].points.push_back({v, eq.dS(r), e.s, e.stability});
            next.push_back({assignment[r], eq.dS(r), e.stability});
        }
        active = std::move(next);
        prev_count = eq.distinct();
    }
    return out;
}

}  // namespace thc
