#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"
#include "thc/error.hpp"
#include "thc/params.hpp"
#include "thc/presets.hpp"

// JSON run configuration:
//
//   {
//     "physical": { "alpha_T": ..., "alpha_S": ..., "q": ..., "volume": ..., "t_d": ..., "t_r": ...,
//                   "H": ..., "S0": ..., "Fbar": ..., "theta": ... },
//     "model":    { "beta": ..., "lambda": ..., "P": ..., "theta": ... },
//     "alpha": ...
//   }
//
// Either block may be omitted. Fields of "model" override those derived from
// "physical". "alpha" overrides the timescale ratio derived from "physical".

namespace thc {

struct ResolvedParams {
    ModelParams model;
    NondimParams nondim;
    std::optional<PhysicalParams> physical;
    std::string source = "builtin";  // config path, or "builtin"
};

struct ParamOverrides {
    std::optional<double> beta;
    std::optional<double> lambda;
    std::optional<double> P;
    std::optional<double> theta;
    std::optional<double> alpha;
};

namespace detail {

inline double number_field(const nlohmann::json& block, const char* key, const char* where) {
    const auto it = block.find(key);
    if (it == block.end()) throw InvalidArgument(std::string(where) + "." + key + " is missing");
    if (!it->is_number()) throw InvalidArgument(std::string(where) + "." + key + " must be a number");
    return it->get<double>();
}

inline void reject_unknown(const nlohmann::json& block, const std::set<std::string>& known, const char* where) {
    if (!block.is_object()) throw InvalidArgument(std::string(where) + " must be an object");
    for (const auto& [key, _] : block.items()) {
        if (!known.count(key)) throw InvalidArgument(std::string("unknown key ") + where + "." + key);
    }
}

inline void refresh_nondim(ResolvedParams& r) { r.nondim = to_nondimensional(r.model, r.nondim.alpha); }

}  // namespace detail

inline ResolvedParams builtin_params() {
    ResolvedParams r;
    r.model = presets::calibrated_model();
    r.nondim.alpha = presets::kReferenceAlpha;
    detail::refresh_nondim(r);
    return r;
}

inline ResolvedParams resolve_config(const nlohmann::json& cfg, std::string source = "inline") {
    detail::reject_unknown(cfg, {"physical", "model", "alpha"}, "config");

    ResolvedParams r;
    r.source = std::move(source);
    r.nondim.alpha = presets::kReferenceAlpha;
    bool have_model = false;

    if (cfg.contains("physical")) {
        const auto& b = cfg.at("physical");
        detail::reject_unknown(b, {"alpha_T", "alpha_S", "q", "volume", "t_d", "t_r", "H", "S0", "Fbar", "theta"},
                               "physical");
        PhysicalParams p;
        p.alpha_T = detail::number_field(b, "alpha_T", "physical");
        p.alpha_S = detail::number_field(b, "alpha_S", "physical");
        p.q = detail::number_field(b, "q", "physical");
        p.volume = detail::number_field(b, "volume", "physical");
        p.t_d = detail::number_field(b, "t_d", "physical");
        p.t_r = detail::number_field(b, "t_r", "physical");
        p.H = detail::number_field(b, "H", "physical");
        p.S0 = detail::number_field(b, "S0", "physical");
        p.Fbar = detail::number_field(b, "Fbar", "physical");
        p.theta = detail::number_field(b, "theta", "physical");
        r.model = derive_dimensional(p);
        r.nondim.alpha = derive_nondimensional(p).alpha;
        r.physical = p;
        have_model = true;
    }

    if (cfg.contains("model")) {
        const auto& b = cfg.at("model");
        detail::reject_unknown(b, {"beta", "lambda", "P", "theta"}, "model");
        for (const char* key : {"beta", "lambda", "P", "theta"}) {
            if (b.contains(key)) {
                const double v = detail::number_field(b, key, "model");
                const std::string k = key;
                (k == "beta" ? r.model.beta : k == "lambda" ? r.model.lambda : k == "P" ? r.model.P : r.model.theta) = v;
            } else if (!have_model) {
                throw InvalidArgument(std::string("model.") + key + " is missing and no physical block is given");
            }
        }
        have_model = true;
    }

    if (!have_model) {
        const ResolvedParams d = builtin_params();
        r.model = d.model;
    }
    if (cfg.contains("alpha")) {
        if (!cfg.at("alpha").is_number()) throw InvalidArgument("config.alpha must be a number");
        r.nondim.alpha = cfg.at("alpha").get<double>();
    }
    validate(r.model);
    detail::refresh_nondim(r);
    validate(r.nondim);
    return r;
}

inline ResolvedParams load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file " + path);
    nlohmann::json cfg;
    try {
        in >> cfg;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("config " + path + " is not valid JSON: " + e.what());
    }
    return resolve_config(cfg, path);
}

/// Explicit path, else $THC_CONFIG, else the built-in calibrated parameters.
inline ResolvedParams load_config(const std::optional<std::string>& path) {
    if (path && !path->empty()) return load_config_file(*path);
    if (const char* env = std::getenv("THC_CONFIG"); env && *env) return load_config_file(env);
    return builtin_params();
}

inline void apply_overrides(ResolvedParams& r, const ParamOverrides& o) {
    if (o.beta) r.model.beta = *o.beta;
    if (o.lambda) r.model.lambda = *o.lambda;
    if (o.P) r.model.P = *o.P;
    if (o.theta) r.model.theta = *o.theta;
    if (o.alpha) r.nondim.alpha = *o.alpha;
    validate(r.model);
    detail::refresh_nondim(r);
    validate(r.nondim);
}

inline nlohmann::json to_json(const ModelParams& mp) {
    return {{"beta", mp.beta}, {"lambda", mp.lambda}, {"P", mp.P}, {"theta", mp.theta}};
}

inline nlohmann::json to_json(const PhysicalParams& p) {
    return {{"alpha_T", p.alpha_T}, {"alpha_S", p.alpha_S}, {"q", p.q},   {"volume", p.volume},
            {"t_d", p.t_d},         {"t_r", p.t_r},         {"H", p.H},   {"S0", p.S0},
            {"Fbar", p.Fbar},       {"theta", p.theta}};
}

inline nlohmann::json to_json(const ResolvedParams& r) {
    nlohmann::json j = to_json(r.model);
    j["alpha"] = r.nondim.alpha;
    j["mu2"] = r.nondim.mu2;
    j["p"] = r.nondim.p;
    return j;
}

}  // namespace thc
