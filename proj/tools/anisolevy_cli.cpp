// Command-line front end: condition checking, simulation, and the scaling /
// rate / regularity experiments, with CSV + JSON + SVG outputs.

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "anisolevy/experiments.hpp"
#include "anisolevy/io.hpp"
#include "anisolevy/json_config.hpp"
#include "anisolevy/parallel.hpp"

using namespace anisolevy;

namespace {

struct global_opts {
    std::uint64_t seed = 1;
    std::size_t workers = 0;  // 0 -> ANISOLEVY_WORKERS or hardware
    std::string out = "out";
};

cfg::json load_config(const std::string& path) {
    if (path.empty()) return cfg::json::object();
    return cfg::parse_text(read_file(path), "config " + path);
}

std::string out_path(const global_opts& g, const std::string& name) {
    return g.out + "/" + name;
}

void write_report_files(const global_opts& g, const std::string& stem,
                        const experiment_report& rep,
                        const nlohmann::json& extra = nlohmann::json::object()) {
    write_file_atomic(out_path(g, stem + ".csv"), report_to_csv(rep));
    nlohmann::json j = report_to_json(rep);
    if (extra.is_object())
        for (const auto& item : extra.items()) j[item.key()] = item.value();
    write_file_atomic(out_path(g, stem + ".json"), j.dump(2) + "\n");
}

int verdict_exit(const experiment_report& rep) {
    std::printf("%s: %s (%s)\n", rep.id.c_str(), rep.pass ? "PASS" : "FAIL",
                rep.verdict.c_str());
    return rep.pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

struct check_cli {
    std::string config;
    std::string preset;  // z1, z2, z2-diagonal, elliptic, elliptic-diagonal
    std::string mode;
    std::vector<double> alphas;
    double alpha = 0.0;
    double gamma = 0.0, delta = 0.0, beta = -1.0, chi = -1.0;
    std::vector<double> gammas, deltas, betas, chis;
    bool zero_drift = false;
    bool derive = false;
    double eta = 0.0;
    std::vector<double> cs;
    double kappa = 0.0;  // override for derive-lambda; 0 = use the computed rate
};

int run_check(const global_opts& g, check_cli o, const cfg::json& j) {
    cfg::reject_unknown(j,
                        {"preset", "mode", "alphas", "alpha", "gamma", "delta", "beta", "chi",
                         "gammas", "deltas", "betas", "chis", "zero_drift", "derive_lambda",
                         "eta", "c", "kappa"},
                        "check config");
    const std::string what = "check config";
    if (o.preset.empty()) o.preset = cfg::opt<std::string>(j, "preset", "", what);
    if (o.mode.empty()) o.mode = cfg::opt<std::string>(j, "mode", "general", what);
    if (o.alphas.empty()) o.alphas = cfg::opt<std::vector<double>>(j, "alphas", {}, what);
    if (o.alpha <= 0.0) o.alpha = cfg::opt<double>(j, "alpha", 0.0, what);
    if (o.gamma <= 0.0) o.gamma = cfg::opt<double>(j, "gamma", 0.0, what);
    if (o.delta <= 0.0) o.delta = cfg::opt<double>(j, "delta", 0.0, what);
    if (o.beta < 0.0) o.beta = cfg::opt<double>(j, "beta", -1.0, what);
    if (o.chi < 0.0) o.chi = cfg::opt<double>(j, "chi", -1.0, what);
    if (o.gammas.empty()) o.gammas = cfg::opt<std::vector<double>>(j, "gammas", {}, what);
    if (o.deltas.empty()) o.deltas = cfg::opt<std::vector<double>>(j, "deltas", {}, what);
    if (o.betas.empty()) o.betas = cfg::opt<std::vector<double>>(j, "betas", {}, what);
    if (o.chis.empty()) o.chis = cfg::opt<std::vector<double>>(j, "chis", {}, what);
    if (!o.zero_drift) o.zero_drift = cfg::opt<bool>(j, "zero_drift", false, what);
    if (!o.derive) o.derive = cfg::opt<bool>(j, "derive_lambda", false, what);
    if (o.eta <= 0.0) o.eta = cfg::opt<double>(j, "eta", 0.0, what);
    if (o.cs.empty()) o.cs = cfg::opt<std::vector<double>>(j, "c", {}, what);
    if (o.kappa <= 0.0) o.kappa = cfg::opt<double>(j, "kappa", 0.0, what);
    condition_report rep;
    if (o.preset == "z1") {
        rep = check_preset_z1(o.alpha, o.beta, o.chi);
    } else if (o.preset == "z2") {
        rep = check_preset_z2(o.alphas, o.beta, o.chi);
    } else if (o.preset == "z2-diagonal") {
        rep = check_preset_z2_diagonal(o.alphas, o.betas, o.chis);
    } else if (o.preset == "elliptic") {
        rep = check_corollary_elliptic(o.alphas, o.chi);
    } else if (o.preset == "elliptic-diagonal") {
        rep = check_corollary_elliptic_diagonal(o.alphas, o.chis);
    } else if (o.preset.empty() && o.mode == "general") {
        rep = check_general(o.alphas, o.gamma, o.delta, o.beta, o.chi, o.zero_drift);
    } else if (o.preset.empty() && o.mode == "diagonal") {
        rep = check_diagonal(o.alphas, o.gammas, o.deltas, o.betas, o.chis, o.zero_drift);
    } else {
        fail(errc::config, "check: unknown preset/mode combination");
    }

    nlohmann::json out;
    out["conditions"] = condition_report_to_json(rep);

    // one-step rate implied by the envelope exponents
    if (o.preset.empty() && o.mode == "general") {
        out["kappa"] = o.gamma >= 1.0 ? kappa_ge1(o.gamma, o.delta, o.beta, o.chi)
                                      : kappa_lt1(o.gamma, o.beta, o.chi);
    } else if (o.preset.empty() && o.mode == "diagonal") {
        double rho = 1.0;
        const double dmin = *std::min_element(o.deltas.begin(), o.deltas.end());
        for (std::size_t k = 0; k < o.alphas.size(); ++k)
            rho = std::min(rho, std::min(o.betas[k], o.chis[k]));
        nlohmann::json ks = nlohmann::json::array();
        double kmin = 1e300;
        for (std::size_t k = 0; k < o.alphas.size(); ++k) {
            const double kk = kappa_diagonal(k, o.gammas, dmin, o.betas[k], o.chis[k], rho);
            ks.push_back(kk);
            kmin = std::min(kmin, kk);
        }
        out["kappa_components"] = ks;
        out["kappa"] = kmin;
    }

    bool plan_ok = true;
    if (o.derive) {
        require(o.preset.empty() && o.mode == "general", errc::config,
                "check: --derive-lambda needs the plain general mode");
        const anisotropy an = compute_anisotropy(o.alphas);
        const double kap = o.kappa > 0.0 ? o.kappa
                           : o.gamma >= 1.0
                               ? kappa_ge1(o.gamma, o.delta, o.beta, o.chi)
                               : kappa_lt1(o.gamma, o.beta, o.chi);
        const regularity_plan plan =
            derive_lambda(an.a, o.alphas, {kap}, o.chi, o.delta, o.gamma, o.eta, o.cs);
        out["plan"] = plan_to_json(plan);
        plan_ok = plan.feasible;
    }

    write_file_atomic(out_path(g, "check.json"), out.dump(2) + "\n");
    const bool pass = rep.satisfied && plan_ok;
    std::printf("check[%s]: %s\n", rep.rule.c_str(), pass ? "PASS" : "FAIL");
    for (const auto& iq : rep.inequalities)
        std::printf("  %-60s lhs=%.6g rhs=%.6g %s\n", iq.name.c_str(), iq.lhs, iq.rhs,
                    iq.satisfied ? "ok" : "VIOLATED");
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct simulate_cli {
    std::string config;
    double alpha = 0.0;  // quick isotropic form
    std::size_t dim = 1;
    double t = 0.0;
    std::size_t n = 0;
    double base_step = 0.0;
    double cutoff = 0.0;
    bool csv = false;
};

int run_simulate(const global_opts& g, simulate_cli o, const cfg::json& j) {
    cfg::reject_unknown(j, {"problem", "model", "plan", "t", "n", "base_step"},
                        "simulate config");
    const std::string what = "simulate config";
    if (o.t <= 0.0) o.t = cfg::opt<double>(j, "t", 1.0, what);
    if (o.n == 0) o.n = cfg::opt<std::size_t>(j, "n", 1000, what);
    if (o.base_step <= 0.0) o.base_step = cfg::opt<double>(j, "base_step", 0x1p-12, what);
    sde_problem p;
    if (j.contains("problem")) {
        p = parse_problem(j.at("problem"));
    } else if (j.contains("model")) {
        p.noise = parse_model(j.at("model"));
        p.x0.assign(p.noise.dim, 0.0);
        p.drift.assign(p.noise.dim, coefficient_spec::constant(0.0));
        p.diffusion.structure = matrix_structure::diagonal;
        p.diffusion.entries.assign(p.noise.dim, coefficient_spec::constant(1.0));
    } else {
        require(o.alpha > 0.0, errc::config,
                "simulate: need --alpha (isotropic) or a config with 'model'/'problem'");
        p.noise = levy_model::isotropic(o.alpha, o.dim);
        p.x0.assign(o.dim, 0.0);
        p.drift.assign(o.dim, coefficient_spec::constant(0.0));
        p.diffusion.structure = matrix_structure::diagonal;
        p.diffusion.entries.assign(o.dim, coefficient_spec::constant(1.0));
    }
    p.validate();

    increment_plan plan;
    if (j.contains("plan")) plan = parse_increment_plan(j.at("plan"));
    if (o.cutoff > 0.0) plan.cutoff = o.cutoff;
    const increment_sampler smp(p.noise, plan);

    const std::size_t d = p.dim();
    const bool direct = detail::constant_coefficients(p);
    std::vector<double> points(o.n * d);
    const std::size_t batch = 1024;
    const std::size_t n_batches = (o.n + batch - 1) / batch;
    parallel_batches(n_batches, resolve_workers(g.workers), [&](std::size_t b) {
        std::vector<double> b0(d), sz;
        for (std::size_t r = b * batch; r < std::min(o.n, (b + 1) * batch); ++r) {
            rng_stream rng(g.seed, r);
            double* row = &points[r * d];
            if (direct) {
                const std::vector<double> z = smp.sample(o.t, rng);
                p.drift_eval(p.x0, b0);
                p.diffusion.apply(p.x0, z, sz);
                for (std::size_t i = 0; i < d; ++i) row[i] = p.x0[i] + o.t * b0[i] + sz[i];
            } else {
                const std::vector<double> x = simulate_endpoint(p, smp, o.t, rng, o.base_step);
                std::copy(x.begin(), x.end(), row);
            }
        }
    });

    write_samples(out_path(g, "samples.bin"), d, points);
    if (o.csv) {
        std::vector<std::string> cols;
        for (std::size_t i = 0; i < d; ++i) cols.push_back("x" + std::to_string(i));
        std::vector<std::vector<double>> rows(o.n, std::vector<double>(d));
        for (std::size_t r = 0; r < o.n; ++r)
            for (std::size_t i = 0; i < d; ++i) rows[r][i] = points[r * d + i];
        write_file_atomic(out_path(g, "samples.csv"), to_csv(cols, rows));
    }
    std::printf("simulate: wrote %zu endpoints (d=%zu) to %s\n", o.n, d,
                out_path(g, "samples.bin").c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// a1-scan
// ---------------------------------------------------------------------------

struct a1_cli {
    std::string config;
    double alpha = 0.0;
    std::vector<double> times;
    std::vector<double> shifts;
    double window_mult = 0.0;
    double tol = 0.0;
};

int run_a1(const global_opts& g, const a1_cli& o, const cfg::json& j) {
    cfg::reject_unknown(j, {"alpha", "times", "shifts", "window_mult", "rel_tol"}, "a1 config");
    a1_options opt;
    double alpha = cfg::opt<double>(j, "alpha", 1.0, "a1 config");
    opt.times = cfg::opt<std::vector<double>>(j, "times", opt.times, "a1 config");
    opt.shifts = cfg::opt<std::vector<double>>(j, "shifts", opt.shifts, "a1 config");
    opt.window_mult = cfg::opt<double>(j, "window_mult", opt.window_mult, "a1 config");
    opt.rel_tol = cfg::opt<double>(j, "rel_tol", opt.rel_tol, "a1 config");
    if (o.alpha > 0.0) alpha = o.alpha;
    if (!o.times.empty()) opt.times = o.times;
    if (!o.shifts.empty()) opt.shifts = o.shifts;
    if (o.window_mult > 0.0) opt.window_mult = o.window_mult;
    if (o.tol > 0.0) opt.rel_tol = o.tol;

    const experiment_report rep = a1_scaling_experiment(alpha, opt);
    write_report_files(g, "a1_scan", rep);

    // one curve per shift: scaled difference quotient against t
    std::vector<plot_series> series;
    for (double h : opt.shifts) {
        plot_series s;
        s.name = "h=" + fmt_double(h);
        for (const auto& row : rep.rows)
            if (row[1] == h) {
                s.xs.push_back(row[0]);
                s.ys.push_back(row[2]);
            }
        series.push_back(std::move(s));
    }
    write_file_atomic(out_path(g, "a1_scan.svg"),
                      loglog_svg("shift-difference scaling", "t", "scaled L1 difference",
                                 series, 0.0, true));
    return verdict_exit(rep);
}

// ---------------------------------------------------------------------------
// rate
// ---------------------------------------------------------------------------

struct rate_cli {
    std::string config;
    std::string regime;
    double t = 0.0, eta = 0.0, gamma = 0.0, delta = 0.0, beta = -1.0, chi = -1.0;
    std::vector<double> epsilons, gammas;
    std::size_t replicas = 0, batch = 0;
    double base_step = 0.0, window_step = 0.0, cutoff = 0.0, slope_tol = 0.0;
    std::string gaussian;
};

int run_rate(const global_opts& g, const rate_cli& o, const cfg::json& j) {
    cfg::reject_unknown(j,
                        {"problem", "regime", "t_final", "epsilons", "eta", "gamma", "delta",
                         "beta", "chi", "gammas", "replicas", "batch", "base_step",
                         "window_step", "plan", "slope_tol"},
                        "rate config");
    require(j.contains("problem"), errc::config, "rate: config must define 'problem'");
    const sde_problem p = parse_problem(j.at("problem"));

    rate_options opt;
    opt.seed = g.seed;
    opt.workers = resolve_workers(g.workers);
    const std::string what = "rate config";
    opt.regime = parse_regime(cfg::opt<std::string>(j, "regime", "ge1", what));
    opt.t_final = cfg::opt<double>(j, "t_final", opt.t_final, what);
    opt.epsilons = cfg::opt<std::vector<double>>(j, "epsilons", opt.epsilons, what);
    opt.eta = cfg::opt<double>(j, "eta", opt.eta, what);
    opt.gamma = cfg::opt<double>(j, "gamma", opt.gamma, what);
    opt.delta = cfg::opt<double>(j, "delta", opt.delta, what);
    opt.beta = cfg::opt<double>(j, "beta", opt.beta, what);
    opt.chi = cfg::opt<double>(j, "chi", opt.chi, what);
    opt.gammas = cfg::opt<std::vector<double>>(j, "gammas", opt.gammas, what);
    opt.replicas = cfg::opt<std::size_t>(j, "replicas", opt.replicas, what);
    opt.batch = cfg::opt<std::size_t>(j, "batch", opt.batch, what);
    opt.base_step = cfg::opt<double>(j, "base_step", opt.base_step, what);
    opt.window_step = cfg::opt<double>(j, "window_step", opt.window_step, what);
    opt.slope_tol = cfg::opt<double>(j, "slope_tol", opt.slope_tol, what);
    if (j.contains("plan")) opt.plan = parse_increment_plan(j.at("plan"));

    if (!o.regime.empty()) opt.regime = parse_regime(o.regime);
    if (o.t > 0.0) opt.t_final = o.t;
    if (!o.epsilons.empty()) opt.epsilons = o.epsilons;
    if (o.eta > 0.0) opt.eta = o.eta;
    if (o.gamma > 0.0) opt.gamma = o.gamma;
    if (o.delta > 0.0) opt.delta = o.delta;
    if (o.beta >= 0.0) opt.beta = o.beta;
    if (o.chi >= 0.0) opt.chi = o.chi;
    if (!o.gammas.empty()) opt.gammas = o.gammas;
    if (o.replicas > 0) opt.replicas = o.replicas;
    if (o.batch > 0) opt.batch = o.batch;
    if (o.base_step > 0.0) opt.base_step = o.base_step;
    if (o.window_step > 0.0) opt.window_step = o.window_step;
    if (o.cutoff > 0.0) opt.plan.cutoff = o.cutoff;
    if (o.slope_tol > 0.0) opt.slope_tol = o.slope_tol;
    if (o.gaussian == "on") opt.plan.gaussian = surrogate_mode::on;
    if (o.gaussian == "off") opt.plan.gaussian = surrogate_mode::off;
    if (o.gaussian == "auto") opt.plan.gaussian = surrogate_mode::automatic;

    const rate_result res = one_step_rate_experiment(p, opt);
    nlohmann::json extra;
    extra["conditions"] = condition_report_to_json(res.conditions);
    write_report_files(g, "rate", res.report, extra);

    plot_series s;
    s.name = "mean |X - X_eps|^eta";
    for (const auto& row : res.report.rows) {
        s.xs.push_back(row[0]);
        s.ys.push_back(row[1]);
    }
    write_file_atomic(out_path(g, "rate.svg"),
                      loglog_svg("one-step error vs window width", "eps", "mean error moment",
                                 {s}, res.target, true));
    std::printf("rate: slope=%.4f target=%.4f (kappa=%.4f, eta=%.3f)\n", res.slope, res.target,
                res.kappa, opt.eta);
    return verdict_exit(res.report);
}

// ---------------------------------------------------------------------------
// besov
// ---------------------------------------------------------------------------

struct besov_cli {
    std::string config;
    double lambda = 0.0;
    std::vector<double> times;
    std::size_t samples_per_unit = 0;
    double radius_mult = 0.0, window_mult = 0.0;
    bool exact_reference = false;
};

int run_besov(const global_opts& g, const besov_cli& o, const cfg::json& j) {
    cfg::reject_unknown(j,
                        {"problem", "lambda", "times", "samples_per_unit", "radius_mult",
                         "window_mult", "max_leakage", "batch", "growth_bound_mult",
                         "exact_reference", "base_step"},
                        "besov config");
    require(j.contains("problem"), errc::config, "besov: config must define 'problem'");
    const sde_problem p = parse_problem(j.at("problem"));

    besov_options opt;
    opt.seed = g.seed;
    opt.workers = resolve_workers(g.workers);
    const std::string what = "besov config";
    opt.lambda = cfg::opt<double>(j, "lambda", opt.lambda, what);
    opt.times = cfg::opt<std::vector<double>>(j, "times", opt.times, what);
    opt.samples_per_unit =
        cfg::opt<std::size_t>(j, "samples_per_unit", opt.samples_per_unit, what);
    opt.radius_mult = cfg::opt<double>(j, "radius_mult", opt.radius_mult, what);
    opt.window_mult = cfg::opt<double>(j, "window_mult", opt.window_mult, what);
    opt.max_leakage = cfg::opt<double>(j, "max_leakage", opt.max_leakage, what);
    opt.batch = cfg::opt<std::size_t>(j, "batch", opt.batch, what);
    opt.growth_bound_mult =
        cfg::opt<double>(j, "growth_bound_mult", opt.growth_bound_mult, what);
    opt.exact_reference = cfg::opt<bool>(j, "exact_reference", opt.exact_reference, what);
    opt.base_step = cfg::opt<double>(j, "base_step", opt.base_step, what);

    if (o.lambda > 0.0) opt.lambda = o.lambda;
    if (!o.times.empty()) opt.times = o.times;
    if (o.samples_per_unit > 0) opt.samples_per_unit = o.samples_per_unit;
    if (o.radius_mult > 0.0) opt.radius_mult = o.radius_mult;
    if (o.window_mult > 0.0) opt.window_mult = o.window_mult;
    if (o.exact_reference) opt.exact_reference = true;

    const besov_result res = besov_growth_experiment(p, opt);
    write_report_files(g, "besov", res.report);

    plot_series s;
    s.name = "besov norm";
    for (const auto& row : res.report.rows) {
        s.xs.push_back(row[0]);
        s.ys.push_back(row[2]);
    }
    write_file_atomic(out_path(g, "besov.svg"),
                      loglog_svg("occupation norm growth", "t", "norm", {s},
                                 -res.fitted_exponent, true));
    std::printf("besov: exponent=%.4f bound=%.4f\n", res.fitted_exponent, res.bound);
    return verdict_exit(res.report);
}

// ---------------------------------------------------------------------------
// moments
// ---------------------------------------------------------------------------

struct moments_cli {
    std::string config;
    double alpha = 0.0;
    std::size_t dim = 1;
    double eta = 0.0, gamma = 0.0, tol = 0.0, cutoff = 0.0;
    std::vector<double> dts;
    std::size_t replicas = 0;
};

int run_moments(const global_opts& g, const moments_cli& o, const cfg::json& j) {
    cfg::reject_unknown(
        j, {"model", "eta", "dts", "gamma", "replicas", "batch", "plan", "slope_tol"},
        "moments config");
    levy_model m;
    if (j.contains("model")) {
        m = parse_model(j.at("model"));
    } else {
        require(o.alpha > 0.0, errc::config,
                "moments: need --alpha (isotropic) or a config with 'model'");
        m = levy_model::isotropic(o.alpha, o.dim);
    }

    moment_options opt;
    opt.seed = g.seed;
    opt.workers = resolve_workers(g.workers);
    const std::string what = "moments config";
    opt.eta = cfg::opt<double>(j, "eta", opt.eta, what);
    opt.dts = cfg::opt<std::vector<double>>(j, "dts", opt.dts, what);
    opt.gamma = cfg::opt<double>(j, "gamma", opt.gamma, what);
    opt.replicas = cfg::opt<std::size_t>(j, "replicas", opt.replicas, what);
    opt.batch = cfg::opt<std::size_t>(j, "batch", opt.batch, what);
    opt.slope_tol = cfg::opt<double>(j, "slope_tol", opt.slope_tol, what);
    if (j.contains("plan")) opt.plan = parse_increment_plan(j.at("plan"));

    if (o.eta > 0.0) opt.eta = o.eta;
    if (!o.dts.empty()) opt.dts = o.dts;
    if (o.gamma > 0.0) opt.gamma = o.gamma;
    if (o.replicas > 0) opt.replicas = o.replicas;
    if (o.tol > 0.0) opt.slope_tol = o.tol;
    if (o.cutoff > 0.0) opt.plan.cutoff = o.cutoff;

    const experiment_report rep = moment_bound_experiment(m, opt);
    write_report_files(g, "moments", rep);

    plot_series s;
    s.name = "E|Z(dt)|^eta";
    for (const auto& row : rep.rows) {
        s.xs.push_back(row[0]);
        s.ys.push_back(row[1]);
    }
    write_file_atomic(out_path(g, "moments.svg"),
                      loglog_svg("increment moment scaling", "dt", "mean moment", {s},
                                 rep.fitted.at("target"), true));
    return verdict_exit(rep);
}

// ---------------------------------------------------------------------------
// density
// ---------------------------------------------------------------------------

struct density_cli {
    std::string config;
    double alpha = 0.0;
    double t = 0.0;
    double half_width = 0.0, step = 0.0, alias_tol = 0.0, mass_target = 0.0,
           mass_threshold = 0.0;
    std::size_t max_nodes = 0;
    bool csv = false;
};

int run_density(const global_opts& g, const density_cli& o, const cfg::json& j) {
    cfg::reject_unknown(j,
                        {"alpha", "t", "half_width", "step", "alias_tol", "mass_target",
                         "mass_error_threshold", "max_nodes"},
                        "density config");
    const std::string what = "density config";
    double alpha = cfg::opt<double>(j, "alpha", 1.5, what);
    double t = cfg::opt<double>(j, "t", 1.0, what);
    stable_density_options opt;
    opt.half_width = cfg::opt<double>(j, "half_width", opt.half_width, what);
    opt.step = cfg::opt<double>(j, "step", opt.step, what);
    opt.alias_tol = cfg::opt<double>(j, "alias_tol", opt.alias_tol, what);
    opt.mass_target = cfg::opt<double>(j, "mass_target", opt.mass_target, what);
    opt.mass_error_threshold =
        cfg::opt<double>(j, "mass_error_threshold", opt.mass_error_threshold, what);
    opt.max_nodes = cfg::opt<std::size_t>(j, "max_nodes", opt.max_nodes, what);

    if (o.alpha > 0.0) alpha = o.alpha;
    if (o.t > 0.0) t = o.t;
    if (o.half_width > 0.0) opt.half_width = o.half_width;
    if (o.step > 0.0) opt.step = o.step;
    if (o.alias_tol > 0.0) opt.alias_tol = o.alias_tol;
    if (o.mass_target > 0.0) opt.mass_target = o.mass_target;
    if (o.mass_threshold > 0.0) opt.mass_error_threshold = o.mass_threshold;
    if (o.max_nodes > 0) opt.max_nodes = o.max_nodes;

    const grid_density f = stable_density_1d(alpha, t, opt);
    write_grid(out_path(g, "density.bin"), f);
    if (o.csv) {
        std::vector<std::vector<double>> rows;
        rows.reserve(f.values.size());
        for (std::size_t i = 0; i < f.values.size(); ++i)
            rows.push_back({f.grid.coord(0, i), f.values[i]});
        write_file_atomic(out_path(g, "density.csv"), to_csv({"x", "density"}, rows));
    }
    std::printf("density: %zu nodes, mass %.9f, deficit %.3g, alias bound %.3g\n",
                f.values.size(), f.mass(), f.meta.at("mass_deficit"),
                f.meta.at("alias_bound"));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and verification toolkit for SDEs driven by anisotropic "
                 "jump noise"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(version_string));

    global_opts g;
    app.add_option("--seed", g.seed, "base RNG seed")->capture_default_str();
    app.add_option("--workers", g.workers,
                   "worker threads (0 = ANISOLEVY_WORKERS env or hardware)")
        ->capture_default_str();
    app.add_option("--out", g.out, "output directory")->capture_default_str();

    check_cli ck;
    CLI::App* c_check = app.add_subcommand("check", "verify theorem conditions");
    c_check->add_option("--config", ck.config, "JSON config file");
    c_check->add_option("--preset", ck.preset,
                        "z1, z2, z2-diagonal, elliptic, elliptic-diagonal");
    c_check->add_option("--mode", ck.mode, "general or diagonal (default general)");
    c_check->add_option("--alphas", ck.alphas, "stability indices")->delimiter(',');
    c_check->add_option("--alpha", ck.alpha, "single stability index (z1)");
    c_check->add_option("--gamma", ck.gamma, "small-jump moment index");
    c_check->add_option("--delta", ck.delta, "big-jump moment index");
    c_check->add_option("--beta", ck.beta, "drift Hoelder exponent");
    c_check->add_option("--chi", ck.chi, "diffusion Hoelder exponent");
    c_check->add_option("--gammas", ck.gammas, "per-component gamma")->delimiter(',');
    c_check->add_option("--deltas", ck.deltas, "per-component delta")->delimiter(',');
    c_check->add_option("--betas", ck.betas, "per-component beta")->delimiter(',');
    c_check->add_option("--chis", ck.chis, "per-component chi")->delimiter(',');
    c_check->add_flag("--zero-drift", ck.zero_drift, "treat the drift as identically zero");
    c_check->add_flag("--derive-lambda", ck.derive, "also derive the regularity exponent");
    c_check->add_option("--eta", ck.eta, "window exponent for --derive-lambda (0 = auto)");
    c_check->add_option("--cs", ck.cs, "moment split for --derive-lambda (empty = auto)")
        ->delimiter(',');
    c_check->add_option("--kappa", ck.kappa,
                        "rate exponent for --derive-lambda (0 = computed)");

    simulate_cli sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "sample SDE endpoints");
    c_sim->add_option("--config", sim.config, "JSON config with 'problem' or 'model'");
    c_sim->add_option("--alpha", sim.alpha, "isotropic stability index (quick form)");
    c_sim->add_option("--dim", sim.dim, "dimension (quick form, default 1)");
    c_sim->add_option("--t", sim.t, "time horizon (default 1)");
    c_sim->add_option("--n", sim.n, "number of endpoints (default 1000)");
    c_sim->add_option("--base-step", sim.base_step, "Euler step (default 2^-12)");
    c_sim->add_option("--cutoff", sim.cutoff, "jump truncation radius");
    c_sim->add_flag("--csv", sim.csv, "also write samples.csv");

    a1_cli a1;
    CLI::App* c_a1 = app.add_subcommand("a1-scan", "shift-difference scaling of the density");
    c_a1->add_option("--config", a1.config, "JSON config file");
    c_a1->add_option("--alpha", a1.alpha, "stability index (default 1)");
    c_a1->add_option("--times", a1.times, "density times")->delimiter(',');
    c_a1->add_option("--shifts", a1.shifts, "shift sizes h")->delimiter(',');
    c_a1->add_option("--window-mult", a1.window_mult, "window half-width in scale units");
    c_a1->add_option("--tol", a1.tol, "relative tolerance on the plateau");

    rate_cli rt;
    CLI::App* c_rate = app.add_subcommand("rate", "one-step strong convergence rate");
    c_rate->add_option("--config", rt.config, "JSON config with 'problem'")->required();
    c_rate->add_option("--regime", rt.regime, "ge1, lt1, or diagonal");
    c_rate->add_option("--t", rt.t, "time horizon");
    c_rate->add_option("--epsilons", rt.epsilons, "window widths")->delimiter(',');
    c_rate->add_option("--eta", rt.eta, "error moment order");
    c_rate->add_option("--gamma", rt.gamma, "small-jump moment index");
    c_rate->add_option("--delta", rt.delta, "big-jump moment index");
    c_rate->add_option("--beta", rt.beta, "drift Hoelder exponent override");
    c_rate->add_option("--chi", rt.chi, "diffusion Hoelder exponent override");
    c_rate->add_option("--gammas", rt.gammas, "per-component gamma (diagonal)")
        ->delimiter(',');
    c_rate->add_option("--replicas", rt.replicas, "Monte Carlo replicas");
    c_rate->add_option("--batch", rt.batch, "replicas per batch");
    c_rate->add_option("--base-step", rt.base_step, "coarse fine-path step");
    c_rate->add_option("--window-step", rt.window_step, "fine step inside the window");
    c_rate->add_option("--cutoff", rt.cutoff, "jump truncation radius");
    c_rate->add_option("--gaussian", rt.gaussian, "small-jump surrogate: auto/on/off");
    c_rate->add_option("--slope-tol", rt.slope_tol, "slope tolerance");

    besov_cli bs;
    CLI::App* c_besov = app.add_subcommand("besov", "occupation norm growth in time");
    c_besov->add_option("--config", bs.config, "JSON config with 'problem'")->required();
    c_besov->add_option("--lambda", bs.lambda, "norm smoothness exponent");
    c_besov->add_option("--times", bs.times, "observation times")->delimiter(',');
    c_besov->add_option("--samples-per-unit", bs.samples_per_unit, "samples at t = 1");
    c_besov->add_option("--radius-mult", bs.radius_mult, "mollifier radius multiple");
    c_besov->add_option("--window-mult", bs.window_mult, "grid half-width multiple");
    c_besov->add_flag("--exact-reference", bs.exact_reference,
                      "add exact product-density reference column");

    moments_cli mo;
    CLI::App* c_mom = app.add_subcommand("moments", "increment moment scaling");
    c_mom->add_option("--config", mo.config, "JSON config with 'model'");
    c_mom->add_option("--alpha", mo.alpha, "isotropic stability index (quick form)");
    c_mom->add_option("--dim", mo.dim, "dimension (quick form)")->capture_default_str();
    c_mom->add_option("--eta", mo.eta, "moment order");
    c_mom->add_option("--dts", mo.dts, "time steps")->delimiter(',');
    c_mom->add_option("--gamma", mo.gamma, "scaling index (0 = from model)");
    c_mom->add_option("--replicas", mo.replicas, "Monte Carlo replicas");
    c_mom->add_option("--tol", mo.tol, "two-sided slope tolerance");
    c_mom->add_option("--cutoff", mo.cutoff, "jump truncation radius");

    density_cli de;
    CLI::App* c_den = app.add_subcommand("density", "stable density by Fourier inversion");
    c_den->add_option("--config", de.config, "JSON config file");
    c_den->add_option("--alpha", de.alpha, "stability index (default 1.5)");
    c_den->add_option("--t", de.t, "time (default 1)");
    c_den->add_option("--half-width", de.half_width, "output half-width (0 = auto)");
    c_den->add_option("--step", de.step, "output grid step (0 = auto)");
    c_den->add_option("--alias-tol", de.alias_tol, "pointwise aliasing tolerance");
    c_den->add_option("--mass-target", de.mass_target, "auto-window tail mass target");
    c_den->add_option("--mass-threshold", de.mass_threshold, "hard mass deficit threshold");
    c_den->add_option("--max-nodes", de.max_nodes, "transform node budget");
    c_den->add_flag("--csv", de.csv, "also write density.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_check->parsed()) return run_check(g, ck, load_config(ck.config));
        if (c_sim->parsed()) return run_simulate(g, sim, load_config(sim.config));
        if (c_a1->parsed()) return run_a1(g, a1, load_config(a1.config));
        if (c_rate->parsed()) return run_rate(g, rt, load_config(rt.config));
        if (c_besov->parsed()) return run_besov(g, bs, load_config(bs.config));
        if (c_mom->parsed()) return run_moments(g, mo, load_config(mo.config));
        if (c_den->parsed()) return run_density(g, de, load_config(de.config));
        std::fprintf(stderr, "no subcommand selected\n");
        return 2;
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
