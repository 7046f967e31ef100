// Acceptance gate: one pass/fail line per criterion, tolerances pinned below,
// nonzero exit when anything fails. Each criterion also carries a wall-clock
// budget that is part of the verdict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "anisolevy/coefficients.hpp"
#include "anisolevy/experiments.hpp"
#include "anisolevy/grid.hpp"
#include "anisolevy/hypotheses.hpp"
#include "anisolevy/io.hpp"
#include "anisolevy/levy_models.hpp"
#include "anisolevy/rng.hpp"
#include "anisolevy/sampling.hpp"
#include "anisolevy/sde.hpp"
#include "anisolevy/stable_density.hpp"

using namespace anisolevy;

namespace {

constexpr double pi_const = 3.14159265358979323846;

struct verdict {
    bool ok = false;
    std::string detail;
};

// Two-axis problem with Lipschitz clamped-affine drift and Holder-0.9 bump
// diffusion; with (gamma, delta) = (1.6, 1.4) the ge1 rate is kappa = 1.171875.
sde_problem worked_ge1_problem() {
    sde_problem p;
    p.noise = levy_model::component({1.5, 1.5});
    p.x0 = {0.2, -0.3};
    p.drift = {coefficient_spec::affine_clamped(0.5, -0.25, 2.0, 0),
               coefficient_spec::affine_clamped(0.5, -0.25, 2.0, 1)};
    p.diffusion.structure = matrix_structure::diagonal;
    p.diffusion.entries = {coefficient_spec::holder_bump(1.0, 0.5, 0.9, 0.0, 0),
                           coefficient_spec::holder_bump(1.0, 0.5, 0.9, 0.0, 1)};
    return p;
}

// Planar driver with independent stable axes (1.0, 1.5), zero drift and unit
// diagonal diffusion: the endpoint law factors, so the Besov experiment can
// carry an exact reference column.
sde_problem product_stable_problem() {
    sde_problem p;
    p.noise = levy_model::component({1.0, 1.5});
    p.x0 = {0.0, 0.0};
    p.drift = {coefficient_spec::constant(0.0), coefficient_spec::constant(0.0)};
    p.diffusion.structure = matrix_structure::diagonal;
    p.diffusion.entries = {coefficient_spec::constant(1.0), coefficient_spec::constant(1.0)};
    return p;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// --- AC1: closed-form constants, exact to 1e-12 ---------------------------

verdict ac1_constants() {
    constexpr double tol = 1e-12;
    double worst = 0.0;
    auto dev = [&worst](double got, double want) {
        worst = std::max(worst, std::abs(got - want));
    };

    const anisotropy an = compute_anisotropy({0.5, 1.5});
    dev(an.alpha_bar, 0.75);
    dev(an.a[0], 1.5);
    dev(an.a[1], 0.5);

    dev(kappa_ge1(2.0, 1.0, 1.0, 0.5), 0.75);
    dev(kappa_lt1(0.5, 1.0, 0.5), 2.0);

    // single axis, a = 1, alpha = 1.2, kappa = 1, chi = delta = 1/2,
    // gamma = 3/2, eta = 0.05, c = 1.07: the coupling term wins, lambda = 0.0035
    const regularity_plan plan = derive_lambda({1.0}, {1.2}, {1.0}, 0.5, 0.5, 1.5, 0.05, {1.07});
    dev(plan.lambda, 0.0035);

    verdict v;
    v.ok = plan.feasible && worst <= tol;
    v.detail = "anisotropy/kappa_ge1/kappa_lt1/lambda worst dev " + fmt(worst) + " <= 1e-12";
    return v;
}

// --- AC2: single-axis preset agrees with its closed-form region -----------

verdict ac2_preset_region() {
    std::size_t cells = 0, disagreements = 0;
    for (double alpha : {0.7, 0.9, 1.3}) {
        for (int i = 0; i < 100; ++i) {
            for (int j = 0; j < 100; ++j) {
                const double beta = static_cast<double>(i) / 99.0;
                const double chi = 0.01 + 0.99 * static_cast<double>(j) / 99.0;
                const bool want = alpha >= 1.0 || alpha + std::min(beta, chi) > 1.0 + 1e-12;
                ++cells;
                if (check_preset_z1(alpha, beta, chi).satisfied != want) ++disagreements;
            }
        }
    }
    verdict v;
    v.ok = disagreements == 0;
    v.detail = std::to_string(disagreements) + " disagreements in " + std::to_string(cells) +
               " (beta, chi) cells at alpha in {0.7, 0.9, 1.3}";
    return v;
}

// --- AC3: alpha = 1 shift-scaling plateau hits 2/pi ------------------------

verdict ac3_a1_plateau() {
    constexpr double rel_tol = 0.05;
    a1_options opt;  // times {0.5, 0.2, 0.1, 0.05}, shift 1e-3
    opt.rel_tol = rel_tol;
    const experiment_report rep = a1_scaling_experiment(1.0, opt);
    const double plateau = rep.fitted.at("plateau");
    const double theory = 2.0 / pi_const;
    const double rel = std::abs(plateau / theory - 1.0);

    verdict v;
    v.ok = rep.pass && rel <= rel_tol;
    v.detail = "plateau " + fmt(plateau) + " vs 2/pi " + fmt(theory) + ", rel dev " + fmt(rel) +
               " <= 0.05";
    return v;
}

// --- AC4: sampler fractional-moment slopes --------------------------------

verdict ac4_moment_slopes() {
    constexpr double tol = 0.05;
    double worst = 0.0;
    bool all_pass = true;
    for (double alpha : {0.6, 1.0, 1.5}) {
        moment_options opt;
        opt.eta = alpha / 2.0;  // target slope eta / alpha = 1/2 on every axis
        opt.replicas = 100000;
        opt.seed = 7;
        opt.slope_tol = tol;
        const experiment_report rep =
            moment_bound_experiment(levy_model::component({alpha}), opt);
        worst = std::max(worst, std::abs(rep.fitted.at("slope") - 0.5));
        all_pass = all_pass && rep.pass;
    }
    verdict v;
    v.ok = all_pass && worst <= tol;
    v.detail = "worst |slope - 1/2| = " + fmt(worst) +
               " <= 0.05 over alpha in {0.6, 1.0, 1.5}, 1e5 replicas each";
    return v;
}

// --- AC5: ge1 one-step rate on the worked problem -------------------------

verdict ac5_ge1_rate() {
    constexpr double slope_tol = 0.1;
    rate_options opt;
    opt.regime = scheme_regime::ge1;
    opt.gamma = 1.6;
    opt.delta = 1.4;
    opt.eta = 0.5;
    opt.epsilons = dyadic_sequence(-4, -10);
    opt.replicas = 100000;
    opt.batch = 256;
    opt.seed = 1;
    opt.base_step = 0x1p-10;
    opt.slope_tol = slope_tol;

    const rate_result rr = one_step_rate_experiment(worked_ge1_problem(), opt);
    const bool kappa_ok = std::abs(rr.kappa - 1.171875) <= 1e-12;

    verdict v;
    v.ok = kappa_ok && rr.conditions.satisfied && rr.report.pass &&
           rr.slope >= rr.target - slope_tol;
    v.detail = "slope " + fmt(rr.slope) + " >= " + fmt(rr.target - slope_tol) + " (kappa " +
               fmt(rr.kappa) + ", conditions " + (rr.conditions.satisfied ? "ok" : "VIOLATED") +
               ")";
    return v;
}

// --- AC6: small-jump one-sided driver in the lt1 regime --------------------

verdict ac6_lt1_rate() {
    constexpr double slope_tol = 0.1;
    sde_problem p;
    // one-sided power jumps on (0,1], alpha+ = 0.4; Lipschitz drift (beta = 1)
    // and a Holder-1/2 diffusion bump give beta ^ chi = 0.5
    p.noise = levy_model::one_sided({tempered_component{1.0, 0.4, 0.0, 0.5, {}}});
    p.x0 = {0.1};
    p.drift = {coefficient_spec::affine_clamped(0.2, -0.5, 1.5, 0)};
    p.diffusion.structure = matrix_structure::diagonal;
    p.diffusion.entries = {coefficient_spec::holder_bump(1.0, 0.5, 0.5, 0.0, 0)};

    rate_options opt;
    opt.regime = scheme_regime::lt1;
    opt.gamma = 0.5;
    opt.delta = 0.5;
    opt.eta = 0.25;
    opt.epsilons = dyadic_sequence(-5, -10);
    opt.replicas = 20000;
    opt.batch = 256;
    opt.seed = 2;
    opt.plan.cutoff = 4e-6;
    opt.plan.gaussian = surrogate_mode::off;
    opt.slope_tol = slope_tol;

    const rate_result rr = one_step_rate_experiment(p, opt);
    const bool kappa_ok = std::abs(rr.kappa - 2.0) <= 1e-12;

    verdict v;
    v.ok = kappa_ok && rr.report.pass && rr.slope >= opt.eta * 2.0 - slope_tol;
    v.detail = "slope " + fmt(rr.slope) + " >= " + fmt(opt.eta * 2.0 - slope_tol) +
               " (kappa " + fmt(rr.kappa) + " from kappa_lt1)";
    return v;
}

// --- AC7: Besov growth with an exact product reference ---------------------

verdict ac7_besov_growth() {
    constexpr double norm_rel_tol = 0.10;
    besov_options opt;
    opt.times = dyadic_sequence(0, -6);
    std::reverse(opt.times.begin(), opt.times.end());
    opt.times.push_back(2.0);
    opt.lambda = 0.5;
    opt.samples_per_unit = 1000000;
    opt.seed = 3;
    opt.exact_reference = true;

    const besov_result res = besov_growth_experiment(product_stable_problem(), opt);
    const bool bound_ok = res.fitted_exponent <= res.bound;

    // empirical directional norms against the exact product density, per time
    double worst_rel = 0.0;
    for (const auto& row : res.report.rows) {
        const double norm = row[2], exact = row[5];
        worst_rel = std::max(worst_rel, std::abs(norm - exact) / exact);
    }

    verdict v;
    v.ok = bound_ok && worst_rel <= norm_rel_tol;
    v.detail = "exponent " + fmt(res.fitted_exponent) + " <= " + fmt(res.bound) +
               ", worst norm dev " + fmt(worst_rel) + " <= 0.1";
    return v;
}

// --- AC8: density oracles ---------------------------------------------------

verdict ac8_density_oracles() {
    constexpr double pointwise_tol = 1e-6;
    constexpr double l1_tol = 0.05;

    const double tc = 0.7;
    const grid_density cau = stable_density_1d(1.0, tc);
    double worst_cauchy = 0.0;
    for (std::size_t j = 0; j < cau.values.size(); ++j) {
        const double x = cau.grid.coord(0, j);
        const double exact = tc / (pi_const * (tc * tc + x * x));
        worst_cauchy = std::max(worst_cauchy, std::abs(cau.values[j] - exact));
    }

    const double tg = 0.4;
    const grid_density gau = stable_density_1d(2.0, tg);
    double worst_gauss = 0.0;
    for (std::size_t j = 0; j < gau.values.size(); ++j) {
        const double x = gau.grid.coord(0, j);
        const double exact = std::exp(-x * x / (4.0 * tg)) / std::sqrt(4.0 * pi_const * tg);
        worst_gauss = std::max(worst_gauss, std::abs(gau.values[j] - exact));
    }

    // mollified million-sample Cauchy ensemble against the exact density on a
    // +-15 window (about 4 percent of the mass sits outside, on both sides of
    // the comparison)
    stable_density_options dopt;
    dopt.half_width = 15.0;
    dopt.step = 0.05;
    dopt.mass_error_threshold = 0.1;
    const grid_density exact = stable_density_1d(1.0, 1.0, dopt);

    mollify_accumulator acc(0.1, {1.0}, exact.grid);
    rng_stream rng(8, 0);
    const std::size_t n = 1000000;
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = stable_symmetric_std(rng, 1.0);
        acc.deposit(&x, w);
    }
    const grid_density emp = acc.finish(0.1);
    double l1 = 0.0;
    for (std::size_t j = 0; j < emp.values.size(); ++j)
        l1 += std::abs(emp.values[j] - exact.values[j]);
    l1 *= exact.grid.cell_volume();

    verdict v;
    v.ok = worst_cauchy <= pointwise_tol && worst_gauss <= pointwise_tol && l1 <= l1_tol;
    v.detail = "cauchy dev " + fmt(worst_cauchy) + ", gauss dev " + fmt(worst_gauss) +
               " <= 1e-6; mollified L1 " + fmt(l1) + " <= 0.05";
    return v;
}

// --- AC9: worker-count determinism ------------------------------------------

verdict ac9_determinism() {
    std::size_t compared = 0, mismatches = 0;

    auto check_same = [&](const std::vector<std::string>& csvs) {
        for (std::size_t i = 1; i < csvs.size(); ++i) {
            ++compared;
            if (csvs[i] != csvs[0]) ++mismatches;
        }
    };

    {
        std::vector<std::string> csvs;
        for (std::size_t workers : {1u, 2u, 3u}) {
            rate_options opt;
            opt.regime = scheme_regime::ge1;
            opt.gamma = 1.6;
            opt.delta = 1.4;
            opt.eta = 0.5;
            opt.epsilons = dyadic_sequence(-4, -7);
            opt.replicas = 1500;
            opt.batch = 64;
            opt.seed = 5;
            opt.base_step = 0x1p-8;
            opt.window_step = 0x1p-11;
            opt.workers = workers;
            csvs.push_back(report_to_csv(one_step_rate_experiment(worked_ge1_problem(), opt).report));
        }
        check_same(csvs);
    }
    {
        std::vector<std::string> csvs;
        for (std::size_t workers : {1u, 2u, 3u}) {
            moment_options opt;
            opt.eta = 0.5;
            opt.dts = dyadic_sequence(-3, -6);
            opt.replicas = 20000;
            opt.batch = 512;
            opt.seed = 6;
            opt.workers = workers;
            csvs.push_back(report_to_csv(moment_bound_experiment(levy_model::component({1.2}), opt)));
        }
        check_same(csvs);
    }
    {
        std::vector<std::string> csvs;
        for (std::size_t workers : {1u, 2u, 3u}) {
            besov_options opt;
            opt.times = {0.5, 1.0};
            opt.samples_per_unit = 20000;
            opt.batch = 4096;
            opt.seed = 7;
            opt.workers = workers;
            csvs.push_back(report_to_csv(besov_growth_experiment(product_stable_problem(), opt).report));
        }
        check_same(csvs);
    }

    verdict v;
    v.ok = mismatches == 0;
    v.detail = std::to_string(mismatches) + " mismatches in " + std::to_string(compared) +
               " CSV comparisons (rate/moments/besov, workers 1 vs 2 vs 3)";
    return v;
}

}  // namespace

int main() {
    struct criterion {
        const char* label;
        verdict (*run)();
        double budget_s;
    };
    const criterion criteria[] = {
        {"closed-form constants", ac1_constants, 1.0},
        {"single-axis preset region", ac2_preset_region, 1.0},
        {"alpha=1 shift-scaling plateau", ac3_a1_plateau, 30.0},
        {"sampler moment slopes", ac4_moment_slopes, 60.0},
        {"ge1 one-step rate", ac5_ge1_rate, 300.0},
        {"lt1 small-jump rate", ac6_lt1_rate, 300.0},
        {"besov growth vs exact reference", ac7_besov_growth, 600.0},
        {"density oracles", ac8_density_oracles, 120.0},
        {"worker-count determinism", ac9_determinism, 60.0},
    };

    int failures = 0;
    int index = 0;
    for (const criterion& c : criteria) {
        ++index;
        verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.ok = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = v.ok && secs <= c.budget_s;
        if (!ok) ++failures;
        std::printf("[%s] AC%d %s: %s  [%.2fs / %.0fs budget]\n", ok ? "PASS" : "FAIL", index,
                    c.label, v.detail.c_str(), secs, c.budget_s);
        std::fflush(stdout);
    }

    std::printf("acceptance: %d/9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
