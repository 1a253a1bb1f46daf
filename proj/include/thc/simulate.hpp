#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "thc/bifurcation.hpp"
#include "thc/dynamics.hpp"
#include "thc/error.hpp"
#include "thc/integrator.hpp"
#include "thc/params.hpp"

namespace thc {

enum class ModelTag { full_nondim, full_dim, reduced, depressed };

inline const char* to_string(ModelTag m) {
    switch (m) {
        case ModelTag::full_nondim: return "full_nondim";
        case ModelTag::full_dim: return "full_dim";
        case ModelTag::reduced: return "reduced";
        case ModelTag::depressed: return "depressed";
    }
    return "unknown";
}

inline std::size_t state_dim(ModelTag m) {
    return (m == ModelTag::full_nondim || m == ModelTag::full_dim) ? 2 : 1;
}

/// Sampled solution. States are stored row-major, `dim` values per sample.
struct Trajectory {
    ModelTag model = ModelTag::reduced;
    std::size_t dim = 1;
    std::vector<double> times;
    std::vector<double> states;
    IntegrationStats stats;

    std::size_t size() const { return times.size(); }
    double state(std::size_t i, std::size_t component = 0) const { return states[i * dim + component]; }
    double final_state(std::size_t component = 0) const { return states[(size() - 1) * dim + component]; }
};

struct IntegrateOptions {
    StepControl control;
    std::size_t samples = 1001;  // uniform in [0, t_end], endpoints included
};

namespace detail {

template <std::size_t N>
void append(Trajectory& tr, const DenseSolution<N>& sol, bool skip_first) {
    for (std::size_t i = skip_first ? 1 : 0; i < sol.times.size(); ++i) {
        tr.times.push_back(sol.times[i]);
        for (std::size_t k = 0; k < N; ++k) tr.states.push_back(sol.states[i][k]);
    }
    tr.stats.accepted += sol.stats.accepted;
    tr.stats.rejected += sol.stats.rejected;
    tr.stats.evaluations += sol.stats.evaluations;
}

inline std::vector<double> sample_grid(double t_end, std::size_t samples) {
    if (samples < 2) throw InvalidArgument("need at least 2 output samples");
    return linspace({0.0, t_end}, samples);
}

inline void require_t_end(double t_end) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be positive and finite");
}

}  // namespace detail

/**
 * Integrates one of the model levels from t' = 0 to t_end.
 *
 * full_nondim reads (x, y) and uses nd; full_dim reads (dT, dS) and uses mp
 * with nd.alpha as the timescale ratio; reduced reads dS and depressed reads
 * s, both using mp.
 */
inline Trajectory integrate(ModelTag model, std::span<const double> initial, const ModelParams& mp,
                            const NondimParams& nd, double t_end, const IntegrateOptions& opt = {}) {
    detail::require_t_end(t_end);
    if (initial.size() != state_dim(model)) {
        throw InvalidArgument(std::string("model ") + to_string(model) + " expects " +
                              std::to_string(state_dim(model)) + " initial values");
    }
    const std::vector<double> samples = detail::sample_grid(t_end, opt.samples);
    Trajectory tr;
    tr.model = model;
    tr.dim = state_dim(model);

    switch (model) {
        case ModelTag::full_nondim: {
            validate(nd);
            auto f = [&](double, const Vec<2>& v) {
                const StateND d = rhs_full_nondim({v[0], v[1]}, nd);
                return Vec<2>{d.x, d.y};
            };
            detail::append(tr, dopri5<2>(f, 0.0, Vec<2>{initial[0], initial[1]}, t_end, samples, opt.control), false);
            break;
        }
        case ModelTag::full_dim: {
            validate(mp);
            validate(nd);
            auto f = [&](double, const Vec<2>& v) {
                const StateDim d = rhs_full_dim({v[0], v[1]}, mp, nd.alpha);
                return Vec<2>{d.dT, d.dS};
            };
            detail::append(tr, dopri5<2>(f, 0.0, Vec<2>{initial[0], initial[1]}, t_end, samples, opt.control), false);
            break;
        }
        case ModelTag::reduced: {
            validate(mp);
            auto f = [&](double, const Vec<1>& v) { return Vec<1>{rhs_reduced(v[0], mp)}; };
            detail::append(tr, dopri5<1>(f, 0.0, Vec<1>{initial[0]}, t_end, samples, opt.control), false);
            break;
        }
        case ModelTag::depressed: {
            validate(mp);
            const DepressedCubic dc = depressed_coeffs(mp);
            auto f = [&](double, const Vec<1>& v) { return Vec<1>{rhs_depressed(v[0], dc)}; };
            detail::append(tr, dopri5<1>(f, 0.0, Vec<1>{initial[0]}, t_end, samples, opt.control), false);
            break;
        }
    }
    return tr;
}

/// Final dS after integrating the reduced model for `duration`.
inline double settle_reduced(double dS, const ModelParams& mp, double duration, const StepControl& ctl = {}) {
    auto f = [&](double, const Vec<1>& v) { return Vec<1>{rhs_reduced(v[0], mp)}; };
    return dopri5<1>(f, 0.0, Vec<1>{dS}, duration, {}, ctl).final_state[0];
}

// ---------------------------------------------------------------------------
// Fast-slow diagnostics

struct TimescaleReport {
    double transient_end = 0.0;     // 10 / alpha
    double max_x_deviation = 0.0;   // sup |x - 1| after the transient
    double max_y_discrepancy = 0.0; // sup |y_full - y_reduced| after the transient
};

/**
 * Runs the full nondimensional model with timescale ratio `alpha` next to
 * the reduced model started from the same y, and measures how far the fast
 * variable sits from its critical manifold x = 1 once t' > 10 / alpha.
 */
inline TimescaleReport timescale_check(double alpha, NondimParams nd, const StateND& initial, double t_end,
                                       const IntegrateOptions& opt = {}) {
    if (!(alpha > 0.0)) throw InvalidParameter("alpha must be strictly positive");
    nd.alpha = alpha;
    validate(nd);
    TimescaleReport rep;
    rep.transient_end = 10.0 / alpha;
    if (!(t_end > rep.transient_end)) throw InvalidArgument("t_end must exceed the transient 10 / alpha");

    const std::vector<double> samples = detail::sample_grid(t_end, opt.samples);
    auto full = [&](double, const Vec<2>& v) {
        const StateND d = rhs_full_nondim({v[0], v[1]}, nd);
        return Vec<2>{d.x, d.y};
    };
    auto reduced = [&](double, const Vec<1>& v) { return Vec<1>{rhs_reduced_nondim(v[0], nd)}; };
    const auto a = dopri5<2>(full, 0.0, Vec<2>{initial.x, initial.y}, t_end, samples, opt.control);
    const auto b = dopri5<1>(reduced, 0.0, Vec<1>{initial.y}, t_end, samples, opt.control);

    for (std::size_t i = 0; i < a.times.size(); ++i) {
        if (a.times[i] < rep.transient_end) continue;
        rep.max_x_deviation = std::max(rep.max_x_deviation, std::abs(a.states[i][0] - 1.0));
        rep.max_y_discrepancy = std::max(rep.max_y_discrepancy, std::abs(a.states[i][1] - b.states[i][0]));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Quasi-static sweeps

struct JumpEvent {
    double param = 0.0;
    double from = 0.0;
    double to = 0.0;
};

struct SweepRecord {
    SweepParam param = SweepParam::theta;
    std::vector<double> param_values;
    std::vector<double> states;  // settled dS after each step
    std::vector<bool> jump;      // jump[i]: step i carries a jump event
    std::vector<JumpEvent> jump_events;
    double threshold = 0.0;
};

struct SweepOptions {
    double settle_time = 50.0;
    double jump_factor = 10.0;  // multiples of the median step-to-step drift
    StepControl control;
};

/**
 * Step-and-settle sweep of the reduced model over an explicit list of
 * parameter values. At each value the model is integrated for settle_time
 * starting from the previous settled state.
 */
inline SweepRecord sweep_path(SweepParam which, std::span<const double> values, const ModelParams& mp,
                              double initial_dS, const SweepOptions& opt = {}) {
    validate(mp);
    if (values.size() < 2) throw InvalidArgument("a sweep needs at least 2 parameter values");
    if (!(opt.settle_time > 0.0)) throw InvalidArgument("settle_time must be positive");
    if (!std::isfinite(initial_dS)) throw InvalidArgument("initial state must be finite");

    SweepRecord rec;
    rec.param = which;
    rec.param_values.assign(values.begin(), values.end());
    double state = initial_dS;
    for (double v : values) {
        state = settle_reduced(state, with_param(mp, which, v), opt.settle_time, opt.control);
        rec.states.push_back(state);
    }

    std::vector<double> drift;
    for (std::size_t i = 1; i < rec.states.size(); ++i) drift.push_back(std::abs(rec.states[i] - rec.states[i - 1]));
    std::vector<double> sorted = drift;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    double scale = 0.0;
    for (double s : rec.states) scale = std::max(scale, std::abs(s));
    rec.threshold = std::max(opt.jump_factor * median, 1e-9 * (1.0 + scale));

    // A run of consecutive over-threshold steps (steepening approach to a fold
    // followed by the transition) is one event, placed at its largest step.
    rec.jump.assign(rec.states.size(), false);
    std::size_t i = 1;
    while (i < rec.states.size()) {
        if (!(drift[i - 1] > rec.threshold)) {
            ++i;
            continue;
        }
        std::size_t j = i, peak = i;
        while (j + 1 < rec.states.size() && drift[j] > rec.threshold) {
            ++j;
            if (drift[j - 1] > drift[peak - 1]) peak = j;
        }
        rec.jump[peak] = true;
        rec.jump_events.push_back({rec.param_values[peak], rec.states[i - 1], rec.states[j]});
        i = j + 1;
    }
    return rec;
}

inline SweepRecord sweep_quasistatic(SweepParam which, double from, double to, std::size_t n_steps,
                                     const ModelParams& mp, double initial_dS, const SweepOptions& opt = {}) {
    if (n_steps < 2) throw InvalidArgument("n_steps must be at least 2");
    if (!std::isfinite(from) || !std::isfinite(to) || from == to) throw InvalidArgument("sweep endpoints must differ");
    std::vector<double> values(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i) {
        values[i] = (i + 1 == n_steps) ? to : from + (to - from) * static_cast<double>(i) / (n_steps - 1);
    }
    return sweep_path(which, values, mp, initial_dS, opt);
}

/// Out from `from` to `to` and back, n_steps values per leg; the turning value appears once.
inline SweepRecord sweep_round_trip(SweepParam which, double from, double to, std::size_t n_steps,
                                    const ModelParams& mp, double initial_dS, const SweepOptions& opt = {}) {
    if (n_steps < 2) throw InvalidArgument("n_steps must be at least 2");
    if (!std::isfinite(from) || !std::isfinite(to) || from == to) throw InvalidArgument("sweep endpoints must differ");
    std::vector<double> values;
    for (std::size_t i = 0; i < n_steps; ++i) {
        values.push_back((i + 1 == n_steps) ? to : from + (to - from) * static_cast<double>(i) / (n_steps - 1));
    }
    for (std::size_t i = n_steps - 1; i-- > 0;) values.push_back(values[i]);
    return sweep_path(which, values, mp, initial_dS, opt);
}

// ---------------------------------------------------------------------------
// Pulse forcing

struct PulseForcing {
    double base_P = 0.0;
    double amplitude = 0.0;
    double t_on = 0.0;
    double t_off = 0.0;

    double at(double t) const { return (t >= t_on && t < t_off) ? base_P + amplitude : base_P; }
};

struct PulseResult {
    Trajectory trajectory;
    bool tipped = false;
    bool monostable = false;  // base parameters have a single equilibrium; tipped is forced false
    double separatrix = 0.0;  // unstable dS at the base parameters (when bistable)
};

/**
 * Reduced model under P(t) = base_P + amplitude on [t_on, t_off). Tipping
 * means the final state lies on the other side of the unstable equilibrium
 * of the base parameters than the initial state.
 */
inline PulseResult simulate_pulse(const PulseForcing& pulse, const ModelParams& mp, double initial_dS, double t_end,
                                  const IntegrateOptions& opt = {}) {
    if (!std::isfinite(pulse.base_P) || !std::isfinite(pulse.amplitude) || !std::isfinite(pulse.t_on) ||
        !std::isfinite(pulse.t_off) || !(pulse.t_on < pulse.t_off)) {
        throw InvalidArgument("pulse needs finite values with t_on < t_off");
    }
    detail::require_t_end(t_end);
    ModelParams base = mp;
    base.P = pulse.base_P;
    validate(base);

    const std::vector<double> samples = detail::sample_grid(t_end, opt.samples);
    PulseResult res;
    res.trajectory.model = ModelTag::reduced;
    res.trajectory.dim = 1;

    std::vector<double> cuts{0.0};
    for (double c : {pulse.t_on, pulse.t_off}) {
        if (c > 0.0 && c < t_end) cuts.push_back(c);
    }
    cuts.push_back(t_end);

    Vec<1> y{initial_dS};
    for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
        const double a = cuts[seg], b = cuts[seg + 1];
        ModelParams m = base;
        m.P = pulse.at(0.5 * (a + b));
        auto f = [&](double, const Vec<1>& v) { return Vec<1>{rhs_reduced(v[0], m)}; };
        std::vector<double> local;
        for (double t : samples) {
            if ((seg == 0 ? t >= a : t > a) && t <= b) local.push_back(t);
        }
        const auto sol = dopri5<1>(f, a, y, b, local, opt.control);
        detail::append(res.trajectory, sol, false);
        y = sol.final_state;
    }

    const EquilibriumSet eq = equilibria(base);
    if (eq.distinct() != 3) {
        res.monostable = true;
        res.tipped = false;
        return res;
    }
    res.separatrix = eq.dS(1);
    const bool start_above = initial_dS > res.separatrix;
    const bool end_above = res.trajectory.final_state() > res.separatrix;
    res.tipped = start_above != end_above;
    return res;
}

}  // namespace thc
