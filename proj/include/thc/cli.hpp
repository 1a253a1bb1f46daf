#pragma once

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "thc/bifurcation.hpp"
#include "thc/calibrate.hpp"
#include "thc/config.hpp"
#include "thc/error.hpp"
#include "thc/format.hpp"
#include "thc/potential.hpp"
#include "thc/presets.hpp"
#include "thc/simulate.hpp"

namespace thc::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3, kEmpty = 4 };

class UsageError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Argument parsing helpers

inline double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError(what + ": '" + s + "' is not a number");
    }
    if (used != s.size()) throw UsageError(what + ": '" + s + "' is not a number");
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

/// "a:b" with a < b.
inline Interval parse_range(const std::string& s, const std::string& what) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) throw UsageError(what + ": expected a:b, got '" + s + "'");
    const Interval r{parse_number(parts[0], what), parse_number(parts[1], what)};
    if (!(r.hi > r.lo)) throw UsageError(what + ": range must satisfy a < b");
    return r;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& what) {
    std::vector<double> v;
    for (const auto& p : split(s, ',')) v.push_back(parse_number(p, what));
    return v;
}

/// "NxM" (also accepts the multiplication sign).
inline std::pair<std::size_t, std::size_t> parse_grid(std::string s) {
    const std::string times = "\xC3\x97";
    if (auto pos = s.find(times); pos != std::string::npos) s.replace(pos, times.size(), "x");
    const auto parts = split(s, 'x');
    if (parts.size() != 2) throw UsageError("--grid: expected NxM, got '" + s + "'");
    const double a = parse_number(parts[0], "--grid"), b = parse_number(parts[1], "--grid");
    if (a < 2 || b < 2 || a != std::floor(a) || b != std::floor(b)) {
        throw UsageError("--grid: both sizes must be integers >= 2");
    }
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

// ---------------------------------------------------------------------------
// Output handling

/// Writes to --out when given (plus a run manifest next to it), else to the caller's stream.
class Outputs {
public:
    Outputs(std::string command, std::optional<std::string> path, std::ostream& fallback)
        : command_(std::move(command)), path_(std::move(path)), fallback_(fallback) {}

    std::ostream& main() {
        if (!path_) return fallback_;
        if (!file_) file_ = open(*path_);
        return *file_;
    }

    /// Secondary output; only written when a path is known.
    std::ostream* extra(const std::optional<std::string>& path) {
        if (!path) return nullptr;
        extras_.push_back(open(*path));
        return extras_.back().get();
    }

    void finish(const ResolvedParams& params, const nlohmann::json& details) {
        if (file_) file_->flush();
        for (auto& e : extras_) e->flush();
        if (!path_) return;
        nlohmann::json manifest;
        manifest["command"] = command_;
        manifest["config_path"] = params.source;
        manifest["resolved_params"] = to_json(params);
        manifest["output_paths"] = written_;
        manifest["tool_version"] = kToolVersion;
        if (!details.is_null()) manifest["details"] = details;
        std::ofstream m(*path_ + ".manifest.json");
        m << manifest.dump(2) << '\n';
    }

private:
    std::unique_ptr<std::ofstream> open(const std::string& p) {
        auto f = std::make_unique<std::ofstream>(p, std::ios::binary);
        if (!*f) throw UsageError("cannot open output file " + p);
        written_.push_back(p);
        return f;
    }

    std::string command_;
    std::optional<std::string> path_;
    std::ostream& fallback_;
    std::unique_ptr<std::ofstream> file_;
    std::vector<std::unique_ptr<std::ofstream>> extras_;
    std::vector<std::string> written_;
};

inline void write_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

inline nlohmann::json to_json(const EquilibriumSet& eq) {
    nlohmann::json roots = nlohmann::json::array();
    for (std::size_t i = 0; i < eq.distinct(); ++i) {
        roots.push_back({{"s", eq.roots[i].s},
                         {"dS", eq.dS(i)},
                         {"multiplicity", eq.roots[i].multiplicity},
                         {"stability", to_string(eq.roots[i].stability)}});
    }
    return {{"theta", eq.theta}, {"P", eq.P},   {"shift", eq.shift}, {"delta", eq.delta},
            {"degenerate", eq.degenerate},       {"roots", roots}};
}

/// Lowest stable equilibrium dS, used as the default initial state.
inline double default_initial_dS(const ModelParams& mp) {
    const EquilibriumSet eq = equilibria(mp);
    for (std::size_t i = 0; i < eq.distinct(); ++i) {
        if (eq.roots[i].stability == Stability::stable) return eq.dS(i);
    }
    return eq.dS(0);
}

// ---------------------------------------------------------------------------

/**
 * Entry point of the `thc` tool. Returns the process exit code:
 * 0 success, 2 usage error, 3 numerical failure, 4 empty result.
 */
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bifurcation analysis of the reduced thermohaline box model", "thc"};
    app.set_version_flag("--version", std::string("thc ") + kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_path;
    std::optional<std::string> out_path;
    std::string forcing_preset;
    ParamOverrides ov;
    app.add_option("--config", config_path, "JSON config (default: $THC_CONFIG, else built-in calibration)");
    app.add_option("--out", out_path, "Output file (default: stdout); a .manifest.json is written next to it");
    app.add_option("--beta", ov.beta, "Override beta (per degC^2)");
    app.add_option("--lambda", ov.lambda, "Override lambda (degC per psu)");
    app.add_option("--p,--P", ov.P, "Override freshwater forcing P (psu)");
    app.add_option("--theta", ov.theta, "Override equilibrium temperature difference theta (degC)");
    app.add_option("--alpha", ov.alpha, "Override the timescale ratio t_d / t_r");
    app.add_option("--forcing-preset", forcing_preset, "Named forcing: cessi (4.98), theta-landscape (4.89), monostable (5.89)")
        ->check(CLI::IsMember({"cessi", "theta-landscape", "monostable"}));

    std::function<int(const ResolvedParams&)> action;
    std::string command;

    // equilibria -------------------------------------------------------------
    auto* c_eq = app.add_subcommand("equilibria", "Equilibria and their stability at (theta, P)");
    c_eq->callback([&] {
        command = "equilibria";
        action = [&](const ResolvedParams& rp) {
            Outputs o(command, out_path, out);
            write_json(o.main(), to_json(equilibria(rp.model)));
            o.finish(rp, nullptr);
            return kOk;
        };
    });

    // discriminant -----------------------------------------------------------
    std::string d_theta, d_P, d_grid = "200x200";
    std::optional<std::string> d_contour;
    auto* c_disc = app.add_subcommand("discriminant", "Discriminant grid over (theta, P) and its zero contour");
    c_disc->add_option("--theta-range", d_theta, "theta range a:b (default 0:4*theta_cusp)");
    c_disc->add_option("--p-range", d_P, "P range a:b (default 0:4*P_cusp)");
    c_disc->add_option("--grid", d_grid, "Grid size NxM (theta x P)");
    c_disc->add_option("--contour-out", d_contour, "Contour CSV (default: <out stem>_contour.csv when --out is set)");
    c_disc->callback([&] {
        command = "discriminant";
        action = [&](const ResolvedParams& rp) {
            const CuspPoint cp = cusp_point(rp.model);
            const Interval tr = d_theta.empty() ? Interval{0.0, 4.0 * cp.theta_cusp} : parse_range(d_theta, "--theta-range");
            const Interval pr = d_P.empty() ? Interval{0.0, 4.0 * cp.P_cusp} : parse_range(d_P, "--p-range");
            const auto [nt, np] = parse_grid(d_grid);
            const DiscriminantGrid g = discriminant_grid(tr, pr, nt, np, rp.model);

            Outputs o(command, out_path, out);
            {
                CsvWriter csv(o.main(), {"theta", "P", "delta"});
                for (std::size_t j = 0; j < g.Ps.size(); ++j) {
                    for (std::size_t i = 0; i < g.thetas.size(); ++i) {
                        csv.field(g.thetas[i]).field(g.Ps[j]).field(g.at(i, j)).end_row();
                    }
                }
            }
            std::optional<std::string> cpath = d_contour;
            if (!cpath && out_path) {
                const auto dot = out_path->rfind('.');
                cpath = (dot == std::string::npos ? *out_path : out_path->substr(0, dot)) + "_contour.csv";
            }
            if (std::ostream* cs = o.extra(cpath)) {
                CsvWriter csv(*cs, {"theta", "P"});
                for (const auto& p : g.contour) csv.field(p.theta).field(p.P).end_row();
            }
            o.finish(rp, {{"contour_points", g.contour.size()}});
            return kOk;
        };
    });

    // folds ------------------------------------------------------------------
    std::string f_range;
    std::size_t f_n = 400;
    auto* c_folds = app.add_subcommand("folds", "Fold (saddle-node) curves parametrized by the state");
    c_folds->add_option("--s-range", f_range, "Unshifted dS range a:b (default S_min:4*S_c)");
    c_folds->add_option("--n", f_n, "Samples per curve segment")->check(CLI::Range(2, 10'000'000));
    c_folds->callback([&] {
        command = "folds";
        action = [&](const ResolvedParams& rp) {
            const CuspPoint cp = cusp_point(rp.model);
            const double s_min = 1.0 / (rp.model.lambda * std::sqrt(rp.model.beta));
            const Interval r = f_range.empty() ? Interval{s_min, 4.0 * cp.S_c} : parse_range(f_range, "--s-range");
            const FoldCurves fc = trace_fold_curves(rp.model, r, f_n);
            Outputs o(command, out_path, out);
            {
                CsvWriter csv(o.main(), {"branch", "s_star", "theta_c", "P_c"});
                for (const auto& p : fc.lower) csv.field("lower").field(p.s_star).field(p.theta_c).field(p.P_c).end_row();
                for (const auto& p : fc.upper) csv.field("upper").field(p.s_star).field(p.theta_c).field(p.P_c).end_row();
            }
            o.finish(rp, {{"lower_points", fc.lower.size()}, {"upper_points", fc.upper.size()}});
            return (fc.lower.empty() && fc.upper.empty()) ? kEmpty : kOk;
        };
    });

    // cusp -------------------------------------------------------------------
    auto* c_cusp = app.add_subcommand("cusp", "Cusp point in (theta, P)");
    c_cusp->callback([&] {
        command = "cusp";
        action = [&](const ResolvedParams& rp) {
            const CuspPoint cp = cusp_point(rp.model);
            Outputs o(command, out_path, out);
            write_json(o.main(), {{"theta_cusp", cp.theta_cusp}, {"P_cusp", cp.P_cusp}, {"S_c", cp.S_c}});
            o.finish(rp, nullptr);
            return kOk;
        };
    });

    // window -----------------------------------------------------------------
    std::string w_fix, w_search;
    std::size_t w_samples = 4000;
    auto* c_win = app.add_subcommand("window", "Bistability window in theta (fixed P) or in P (fixed theta)");
    c_win->add_option("--fix", w_fix, "theta=V or p=V (default: p fixed at the configured P)");
    c_win->add_option("--search", w_search, "Search range a:b (default 0:4*theta_cusp or 0:4*P_cusp)");
    c_win->add_option("--samples", w_samples, "Scan samples")->check(CLI::Range(2, 100'000'000));
    c_win->callback([&] {
        command = "window";
        action = [&](const ResolvedParams& rp) {
            std::string key = "p";
            double value = rp.model.P;
            if (!w_fix.empty()) {
                const auto parts = split(w_fix, '=');
                if (parts.size() != 2 || (parts[0] != "theta" && parts[0] != "p" && parts[0] != "P")) {
                    throw UsageError("--fix: expected theta=V or p=V");
                }
                key = parts[0] == "theta" ? "theta" : "p";
                value = parse_number(parts[1], "--fix");
            }
            WindowOptions opt;
            opt.samples = w_samples;
            if (!w_search.empty()) opt.search = parse_range(w_search, "--search");
            const auto w = key == "p" ? bistability_window_theta(value, rp.model, opt)
                                      : bistability_window_P(value, rp.model, opt);
            nlohmann::json j;
            j["fixed"] = key == "p" ? "P" : "theta";
            j["value"] = value;
            j["window"] = w ? nlohmann::json::array({w->lo, w->hi}) : nlohmann::json(nullptr);
            Outputs o(command, out_path, out);
            write_json(o.main(), j);
            o.finish(rp, nullptr);
            return w ? kOk : kEmpty;
        };
    });

    // potential --------------------------------------------------------------
    std::string p_range;
    std::size_t p_n = 401;
    bool p_nondim = false;
    auto* c_pot = app.add_subcommand("potential", "Potential V along the state at fixed (theta, P)");
    c_pot->add_option("--y-range,--coord-range", p_range, "Coordinate range a:b");
    c_pot->add_option("--n", p_n, "Samples")->check(CLI::Range(2, 100'000'000));
    c_pot->add_flag("--nondim", p_nondim, "Use the nondimensional potential V(y) with (mu2, p) from the bridge");
    c_pot->callback([&] {
        command = "potential";
        action = [&](const ResolvedParams& rp) {
            const Interval r = !p_range.empty() ? parse_range(p_range, "--y-range")
                               : p_nondim      ? Interval{-0.5, 2.0}
                                               : Interval{0.0, 3.0 * cusp_point(rp.model).S_c};
            const auto xs = linspace(r, p_n);
            const double gauge = p_nondim ? extrema(rp.nondim).global_min() : extrema(rp.model).global_min();
            Outputs o(command, out_path, out);
            {
                CsvWriter csv(o.main(), {"coord", "V"});
                for (double x : xs) {
                    const double v = p_nondim ? potential_nondim(x, rp.nondim) : potential_dim(x, rp.model);
                    csv.field(x).field(v - gauge).end_row();
                }
            }
            o.finish(rp, {{"coordinate", p_nondim ? "y" : "dS"}, {"gauge", gauge}});
            return kOk;
        };
    });

    // landscape --------------------------------------------------------------
    std::string l_axis = "theta", l_param, l_coord;
    std::size_t l_nc = 201, l_np = 201;
    auto* c_land = app.add_subcommand("landscape", "Potential surface over (dS, theta) or (dS, P) with equilibrium branches");
    c_land->add_option("--axis", l_axis, "Swept parameter")->check(CLI::IsMember({"theta", "p", "P"}));
    c_land->add_option("--param-range", l_param, "Parameter range a:b");
    c_land->add_option("--coord-range", l_coord, "dS range a:b");
    c_land->add_option("--n-coord", l_nc, "Coordinate samples")->check(CLI::Range(2, 100'000'000));
    c_land->add_option("--n-param", l_np, "Parameter samples")->check(CLI::Range(2, 100'000'000));
    c_land->callback([&] {
        command = "landscape";
        action = [&](const ResolvedParams& rp) {
            const CuspPoint cp = cusp_point(rp.model);
            const LandscapeAxis axis = l_axis == "theta" ? LandscapeAxis::theta : LandscapeAxis::P;
            const Interval pr = !l_param.empty()             ? parse_range(l_param, "--param-range")
                                : axis == LandscapeAxis::theta ? Interval{0.5 * cp.theta_cusp, 2.5 * cp.theta_cusp}
                                                               : Interval{0.0, 3.0 * cp.P_cusp};
            const Interval cr = l_coord.empty() ? Interval{0.0, 3.0 * cp.S_c} : parse_range(l_coord, "--coord-range");
            const Landscape L = landscape_grid(axis, cr, pr, l_nc, l_np, rp.model);
            Outputs o(command, out_path, out);
            {
                CsvWriter csv(o.main(), {"coord", "param", "V", "branch_flag"});
                for (std::size_t j = 0; j < L.params.size(); ++j) {
                    for (std::size_t i = 0; i < L.coords.size(); ++i) {
                        csv.field(L.coords[i]).field(L.params[j]).field(L.value(i, j)).field(to_string(L.flag(i, j))).end_row();
                    }
                }
            }
            nlohmann::json folds = nlohmann::json::array();
            for (const auto& f : L.branches.folds) folds.push_back({{"param", f.param}, {"dS", f.dS}});
            o.finish(rp, {{"axis", to_string(axis)}, {"folds", folds}});
            return kOk;
        };
    });

    // simulate ---------------------------------------------------------------
    std::string s_model = "reduced", s_ic, s_pulse;
    double s_tend = 50.0;
    std::size_t s_samples = 1001;
    double s_rtol = 1e-8, s_atol = 1e-10;
    auto* c_sim = app.add_subcommand("simulate", "Integrate one of the model levels");
    c_sim->add_option("--model", s_model, "full_nondim | full_dim | reduced | depressed")
        ->check(CLI::IsMember({"full_nondim", "full_dim", "reduced", "depressed"}));
    c_sim->add_option("--ic", s_ic, "Initial state a[,b] (default: lowest stable equilibrium)");
    c_sim->add_option("--t-end", s_tend, "Final diffusive time t'");
    c_sim->add_option("--samples", s_samples, "Output samples")->check(CLI::Range(2, 100'000'000));
    c_sim->add_option("--pulse", s_pulse, "amplitude,t_on,t_off added to P (reduced model only)");
    c_sim->add_option("--rtol", s_rtol, "Relative tolerance");
    c_sim->add_option("--atol", s_atol, "Absolute tolerance");
    c_sim->callback([&] {
        command = "simulate";
        action = [&](const ResolvedParams& rp) {
            const ModelTag tag = s_model == "full_nondim" ? ModelTag::full_nondim
                                 : s_model == "full_dim"  ? ModelTag::full_dim
                                 : s_model == "depressed" ? ModelTag::depressed
                                                          : ModelTag::reduced;
            std::vector<double> ic;
            if (!s_ic.empty()) {
                ic = parse_list(s_ic, "--ic");
            } else {
                const double dS = default_initial_dS(rp.model);
                switch (tag) {
                    case ModelTag::full_nondim: ic = {1.0, rp.model.lambda * dS / rp.model.theta}; break;
                    case ModelTag::full_dim: ic = {rp.model.theta, dS}; break;
                    case ModelTag::reduced: ic = {dS}; break;
                    case ModelTag::depressed: ic = {dS - tschirnhaus_shift(rp.model)}; break;
                }
            }
            if (ic.size() != state_dim(tag)) throw UsageError("--ic: wrong number of values for this model");
            IntegrateOptions opt;
            opt.samples = s_samples;
            opt.control.rtol = s_rtol;
            opt.control.atol = s_atol;

            Trajectory tr;
            nlohmann::json details = {{"model", to_string(tag)}, {"initial_state", ic}, {"t_end", s_tend}};
            if (!s_pulse.empty()) {
                if (tag != ModelTag::reduced) throw UsageError("--pulse applies to the reduced model only");
                const auto v = parse_list(s_pulse, "--pulse");
                if (v.size() != 3) throw UsageError("--pulse: expected amplitude,t_on,t_off");
                const PulseForcing pulse{rp.model.P, v[0], v[1], v[2]};
                PulseResult pr = simulate_pulse(pulse, rp.model, ic[0], s_tend, opt);
                tr = std::move(pr.trajectory);
                details["pulse"] = {{"amplitude", v[0]}, {"t_on", v[1]}, {"t_off", v[2]}};
                details["tipped"] = pr.tipped;
                details["monostable"] = pr.monostable;
                if (pr.monostable) err << "warning: base parameters are monostable; tipped is reported as false\n";
            } else {
                tr = integrate(tag, ic, rp.model, rp.nondim, s_tend, opt);
            }
            Outputs o(command, out_path, out);
            {
                std::ostream& os = o.main();
                if (tr.dim == 2) {
                    CsvWriter csv(os, {"t", "state1", "state2"});
                    for (std::size_t i = 0; i < tr.size(); ++i) csv.field(tr.times[i]).field(tr.state(i, 0)).field(tr.state(i, 1)).end_row();
                } else {
                    CsvWriter csv(os, {"t", "state1"});
                    for (std::size_t i = 0; i < tr.size(); ++i) csv.field(tr.times[i]).field(tr.state(i, 0)).end_row();
                }
            }
            o.finish(rp, details);
            return kOk;
        };
    });

    // sweep ------------------------------------------------------------------
    std::string w_param = "theta";
    double w_from = 0.0, w_to = 0.0, w_settle = 50.0, w_jump = 10.0;
    std::size_t w_steps = 500;
    bool w_round = false;
    std::optional<double> w_ic;
    auto* c_sweep = app.add_subcommand("sweep", "Quasi-static step-and-settle parameter ramp");
    c_sweep->add_option("--param", w_param, "Ramped parameter")->check(CLI::IsMember({"theta", "p", "P"}));
    c_sweep->add_option("--from", w_from, "Start value")->required();
    c_sweep->add_option("--to", w_to, "End value")->required();
    c_sweep->add_option("--steps", w_steps, "Ramp values per leg")->check(CLI::Range(2, 100'000'000));
    c_sweep->add_option("--settle", w_settle, "Settle time per step (t' units)");
    c_sweep->add_option("--jump-factor", w_jump, "Jump threshold in multiples of the median step drift");
    c_sweep->add_flag("--round-trip", w_round, "Ramp back to --from after reaching --to");
    c_sweep->add_option("--ic", w_ic, "Initial dS (default: lowest stable equilibrium at --from)");
    c_sweep->callback([&] {
        command = "sweep";
        action = [&](const ResolvedParams& rp) {
            const SweepParam which = w_param == "theta" ? SweepParam::theta : SweepParam::P;
            if (w_from == w_to) throw UsageError("--from and --to must differ");
            SweepOptions opt;
            opt.settle_time = w_settle;
            opt.jump_factor = w_jump;
            const double ic = w_ic.value_or(default_initial_dS(with_param(rp.model, which, w_from)));
            const SweepRecord rec = w_round ? sweep_round_trip(which, w_from, w_to, w_steps, rp.model, ic, opt)
                                            : sweep_quasistatic(which, w_from, w_to, w_steps, rp.model, ic, opt);
            Outputs o(command, out_path, out);
            {
                CsvWriter csv(o.main(), {"param", "settled_state", "jump"});
                for (std::size_t i = 0; i < rec.states.size(); ++i) {
                    csv.field(rec.param_values[i]).field(rec.states[i]).field(rec.jump[i] ? 1 : 0).end_row();
                }
            }
            nlohmann::json jumps = nlohmann::json::array();
            for (const auto& j : rec.jump_events) jumps.push_back({{"param", j.param}, {"from", j.from}, {"to", j.to}});
            o.finish(rp, {{"param", to_string(which)}, {"threshold", rec.threshold}, {"jump_events", jumps}});
            return kOk;
        };
    });

    // calibrate --------------------------------------------------------------
    std::string c_window = "18.6,22.8";
    std::optional<std::string> c_write;
    auto* c_cal = app.add_subcommand("calibrate", "Fit (beta, lambda) to a bistability window in theta");
    c_cal->add_option("--window", c_window, "lo,hi in degC");
    c_cal->add_option("--write-config", c_write, "Also write a config file holding the calibrated model");
    c_cal->callback([&] {
        command = "calibrate";
        action = [&](const ResolvedParams& rp) {
            const auto w = parse_list(c_window, "--window");
            if (w.size() != 2) throw UsageError("--window: expected lo,hi");
            const double P = ov.P.value_or(rp.model.P);
            const CalibrationResult c = calibrate(w[0], w[1], P);
            const nlohmann::json j = {{"beta", c.beta}, {"lambda", c.lambda},    {"P", P},
                                      {"window", w},    {"residual", c.residual}, {"iterations", c.iterations}};
            Outputs o(command, out_path, out);
            write_json(o.main(), j);
            if (std::ostream* cfg = o.extra(c_write)) {
                const ModelParams mp{c.beta, c.lambda, P, rp.model.theta};
                write_json(*cfg, {{"model", to_json(mp)}, {"alpha", rp.nondim.alpha}});
            }
            o.finish(rp, nullptr);
            return kOk;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        ResolvedParams rp = load_config(config_path);
        if (!forcing_preset.empty() && !ov.P) {
            rp.model.P = forcing_preset == "cessi"             ? presets::kForcingCessi
                         : forcing_preset == "theta-landscape" ? presets::kForcingThetaLandscape
                                                               : presets::kForcingMonostable;
        }
        apply_overrides(rp, ov);
        return action(rp);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const CalibrationFailure& e) {
        err << "calibration failed: " << e.what() << '\n';
        return kNumerical;
    } catch (const IntegrationFailure& e) {
        err << "integration failed: " << e.what() << '\n';
        return kNumerical;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}

}  // namespace thc::cli
