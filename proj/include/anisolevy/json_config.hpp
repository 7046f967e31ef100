#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "coefficients.hpp"
#include "common.hpp"
#include "experiments.hpp"
#include "levy_models.hpp"
#include "sampling.hpp"
#include "sde.hpp"

namespace anisolevy {
namespace cfg {

using nlohmann::json;

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& what) {
    require(j.is_object(), errc::config, what + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        require(known, errc::config, what + ": unknown key '" + item.key() + "'");
    }
}

template <typename T>
T req(const json& j, const char* key, const std::string& what) {
    require(j.contains(key), errc::config, what + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(errc::config, what + ": bad value for '" + key + "': " + e.what());
    }
}

template <typename T>
T opt(const json& j, const char* key, T def, const std::string& what) {
    if (!j.contains(key)) return def;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(errc::config, what + ": bad value for '" + key + "': " + e.what());
    }
}

inline json parse_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(errc::config, what + ": " + e.what());
    }
}

}  // namespace cfg

inline coefficient_spec parse_coefficient(const cfg::json& j) {
    const std::string what = "coefficient";
    const std::string family = cfg::req<std::string>(j, "family", what);
    if (family == "constant") {
        cfg::reject_unknown(j, {"family", "value"}, what);
        return coefficient_spec::constant(cfg::req<double>(j, "value", what));
    }
    if (family == "affine_clamped") {
        cfg::reject_unknown(j, {"family", "offset", "slope", "clamp", "arg"}, what);
        return coefficient_spec::affine_clamped(
            cfg::req<double>(j, "offset", what), cfg::req<double>(j, "slope", what),
            cfg::req<double>(j, "clamp", what), cfg::opt<std::size_t>(j, "arg", 0, what));
    }
    if (family == "holder_bump") {
        cfg::reject_unknown(j, {"family", "base", "amplitude", "exponent", "center", "arg"},
                            what);
        return coefficient_spec::holder_bump(
            cfg::req<double>(j, "base", what), cfg::req<double>(j, "amplitude", what),
            cfg::req<double>(j, "exponent", what), cfg::opt<double>(j, "center", 0.0, what),
            cfg::opt<std::size_t>(j, "arg", 0, what));
    }
    if (family == "smooth_bounded") {
        cfg::reject_unknown(j, {"family", "offset", "amplitude", "center", "arg"}, what);
        return coefficient_spec::smooth_bounded(
            cfg::req<double>(j, "offset", what), cfg::req<double>(j, "amplitude", what),
            cfg::opt<double>(j, "center", 0.0, what), cfg::opt<std::size_t>(j, "arg", 0, what));
    }
    fail(errc::config, what + ": unknown family '" + family + "'");
}

inline levy_model parse_model(const cfg::json& j) {
    const std::string what = "model";
    const std::string kind = cfg::req<std::string>(j, "kind", what);
    if (kind == "isotropic_stable") {
        cfg::reject_unknown(j, {"kind", "alpha", "dim"}, what);
        return levy_model::isotropic(cfg::req<double>(j, "alpha", what),
                                     cfg::req<std::size_t>(j, "dim", what));
    }
    if (kind == "component_stable") {
        cfg::reject_unknown(j, {"kind", "alphas"}, what);
        return levy_model::component(cfg::req<std::vector<double>>(j, "alphas", what));
    }
    if (kind == "block_stable") {
        cfg::reject_unknown(j, {"kind", "blocks", "alphas"}, what);
        return levy_model::block(
            cfg::req<std::vector<std::vector<std::size_t>>>(j, "blocks", what),
            cfg::req<std::vector<double>>(j, "alphas", what));
    }
    if (kind == "tempered_one_sided") {
        cfg::reject_unknown(j, {"kind", "axes"}, what);
        require(j.contains("axes") && j.at("axes").is_array(), errc::config,
                what + ": tempered kind needs an 'axes' array");
        std::vector<tempered_component> comps;
        for (const auto& ax : j.at("axes")) {
            cfg::reject_unknown(
                ax, {"c_plus", "alpha_plus", "c_minus", "alpha_minus", "atoms"}, what);
            tempered_component tc;
            tc.c_plus = cfg::opt<double>(ax, "c_plus", 0.0, what);
            tc.alpha_plus = cfg::opt<double>(ax, "alpha_plus", 0.5, what);
            tc.c_minus = cfg::opt<double>(ax, "c_minus", 0.0, what);
            tc.alpha_minus = cfg::opt<double>(ax, "alpha_minus", 0.5, what);
            if (ax.contains("atoms")) {
                for (const auto& atom : ax.at("atoms")) {
                    cfg::reject_unknown(atom, {"z", "w"}, what);
                    tc.atoms.push_back(
                        {cfg::req<double>(atom, "z", what), cfg::req<double>(atom, "w", what)});
                }
            }
            comps.push_back(std::move(tc));
        }
        return levy_model::one_sided(std::move(comps));
    }
    if (kind == "discrete_measure") {
        cfg::reject_unknown(j, {"kind", "alphas"}, what);
        return levy_model::discrete(cfg::req<std::vector<double>>(j, "alphas", what));
    }
    if (kind == "subordinate_bm") {
        cfg::reject_unknown(j, {"kind", "alphas", "betas"}, what);
        return levy_model::subordinate(cfg::req<std::vector<double>>(j, "alphas", what),
                                       cfg::req<std::vector<double>>(j, "betas", what));
    }
    fail(errc::config, what + ": unknown kind '" + kind + "'");
}

inline matrix_field parse_matrix_field(const cfg::json& j) {
    const std::string what = "diffusion";
    cfg::reject_unknown(j, {"structure", "entries"}, what);
    matrix_field mf;
    const std::string structure = cfg::opt<std::string>(j, "structure", "diagonal", what);
    if (structure == "diagonal")
        mf.structure = matrix_structure::diagonal;
    else if (structure == "full")
        mf.structure = matrix_structure::full;
    else
        fail(errc::config, what + ": unknown structure '" + structure + "'");
    require(j.contains("entries") && j.at("entries").is_array(), errc::config,
            what + ": needs an 'entries' array");
    for (const auto& e : j.at("entries")) mf.entries.push_back(parse_coefficient(e));
    return mf;
}

inline sde_problem parse_problem(const cfg::json& j) {
    const std::string what = "problem";
    cfg::reject_unknown(j, {"noise", "x0", "drift", "diffusion"}, what);
    require(j.contains("noise"), errc::config, what + ": missing 'noise'");
    sde_problem p;
    p.noise = parse_model(j.at("noise"));
    p.x0 = cfg::opt<std::vector<double>>(j, "x0", std::vector<double>(p.noise.dim, 0.0), what);
    if (j.contains("drift")) {
        for (const auto& b : j.at("drift")) p.drift.push_back(parse_coefficient(b));
    } else {
        p.drift.assign(p.noise.dim, coefficient_spec::constant(0.0));
    }
    if (j.contains("diffusion")) {
        p.diffusion = parse_matrix_field(j.at("diffusion"));
    } else {
        p.diffusion.structure = matrix_structure::diagonal;
        p.diffusion.entries.assign(p.noise.dim, coefficient_spec::constant(1.0));
    }
    p.validate();
    return p;
}

inline increment_plan parse_increment_plan(const cfg::json& j) {
    const std::string what = "plan";
    cfg::reject_unknown(j, {"cutoff", "gaussian", "discrete_truncation", "record_jumps"}, what);
    increment_plan plan;
    plan.cutoff = cfg::opt<double>(j, "cutoff", plan.cutoff, what);
    const std::string g = cfg::opt<std::string>(j, "gaussian", "auto", what);
    if (g == "auto")
        plan.gaussian = surrogate_mode::automatic;
    else if (g == "on")
        plan.gaussian = surrogate_mode::on;
    else if (g == "off")
        plan.gaussian = surrogate_mode::off;
    else
        fail(errc::config, what + ": gaussian must be auto/on/off, got '" + g + "'");
    plan.discrete_truncation =
        cfg::opt<std::size_t>(j, "discrete_truncation", plan.discrete_truncation, what);
    plan.record_jumps = cfg::opt<bool>(j, "record_jumps", plan.record_jumps, what);
    return plan;
}

inline scheme_regime parse_regime(const std::string& s) {
    if (s == "ge1") return scheme_regime::ge1;
    if (s == "lt1") return scheme_regime::lt1;
    if (s == "diagonal") return scheme_regime::diagonal;
    fail(errc::config, "regime must be ge1/lt1/diagonal, got '" + s + "'");
}

}  // namespace anisolevy
