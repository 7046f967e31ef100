#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "common.hpp"

namespace anisolevy {

// One strict inequality lhs > rhs, recorded with its margin. "Satisfied"
// requires the margin to clear `strict_margin`, so boundary cases fail
// deterministically instead of depending on rounding.
struct inequality {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
    double margin = 0.0;
};

struct condition_report {
    std::string rule;
    std::map<std::string, double> params;
    std::vector<inequality> inequalities;
    bool satisfied = true;
    std::string note;

    void add(const std::string& name, double lhs, double rhs) {
        inequality iq;
        iq.name = name;
        iq.lhs = lhs;
        iq.rhs = rhs;
        iq.margin = lhs - rhs;
        iq.satisfied = iq.margin > strict_margin;
        satisfied = satisfied && iq.satisfied;
        inequalities.push_back(iq);
    }

    // non-strict bookkeeping entry (regime memberships and the like)
    void add_fact(const std::string& name, double lhs, double rhs, bool ok) {
        inequality iq;
        iq.name = name;
        iq.lhs = lhs;
        iq.rhs = rhs;
        iq.margin = lhs - rhs;
        iq.satisfied = ok;
        satisfied = satisfied && ok;
        inequalities.push_back(iq);
    }
};

namespace detail {

inline void check_exponent_domains(double gamma, double delta, double beta, double chi) {
    require(gamma > 0.0 && gamma <= 2.0, errc::invalid_argument,
            "gamma must lie in (0,2], got " + fmt_double(gamma));
    require(delta > 0.0 && delta <= gamma, errc::invalid_argument,
            "delta must lie in (0, gamma], got " + fmt_double(delta));
    require(beta >= 0.0 && beta <= 1.0, errc::invalid_argument,
            "beta must lie in [0,1], got " + fmt_double(beta));
    require(chi > 0.0 && chi <= 1.0, errc::invalid_argument,
            "chi must lie in (0,1], got " + fmt_double(chi));
}

inline double min_of(const std::vector<double>& v) {
    require(!v.empty(), errc::invalid_argument, "empty exponent vector");
    return *std::min_element(v.begin(), v.end());
}

inline double max_of(const std::vector<double>& v) {
    require(!v.empty(), errc::invalid_argument, "empty exponent vector");
    return *std::max_element(v.begin(), v.end());
}

inline void check_alphas(const std::vector<double>& alphas) {
    require(!alphas.empty(), errc::invalid_argument, "empty stability index vector");
    for (double a : alphas)
        require(a > 0.0 && a < 2.0, errc::invalid_argument,
                "stability indices must lie in (0,2)");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// One-step convergence rates kappa.
// ---------------------------------------------------------------------------

// gamma in [1,2] regime.
inline double kappa_ge1(double gamma, double delta, double beta, double chi) {
    detail::check_exponent_domains(gamma, delta, beta, chi);
    require(gamma >= 1.0, errc::regime, "kappa_ge1: needs gamma in [1,2]");
    return std::min(1.0 + std::min(beta, delta) / gamma,
                    (1.0 + std::min(chi, delta / gamma)) / gamma);
}

// gamma in (0,1) regime.
inline double kappa_lt1(double gamma, double beta, double chi) {
    require(gamma > 0.0 && gamma < 1.0, errc::regime, "kappa_lt1: needs gamma in (0,1)");
    require(beta >= 0.0 && beta <= 1.0 && chi > 0.0 && chi <= 1.0, errc::invalid_argument,
            "kappa_lt1: bad regularity exponents");
    const double bc = std::min(beta, chi);
    require(bc < 1.0, errc::regime, "kappa_lt1: beta^chi = 1 degenerates the flow step");
    return std::min({1.0 + bc / gamma, 1.0 / gamma + chi, 1.0 / (1.0 - bc)});
}

// Component-wise regimes: component k with gamma_k in [1,2] follows the
// global-envelope rate (gamma = max gammas, delta = min deltas); a component
// with gamma_k in (0,1) follows its own, capped by the shared flow step
// exponent 1/(1-rho), rho = min_j beta_j^chi_j.
inline double kappa_diagonal(std::size_t k, const std::vector<double>& gammas, double delta_min,
                             double beta_k, double chi_k, double rho) {
    require(k < gammas.size(), errc::invalid_argument, "kappa_diagonal: component out of range");
    const double gamma_max = detail::max_of(gammas);
    require(gamma_max <= 2.0, errc::invalid_argument, "kappa_diagonal: gamma must be <= 2");
    require(rho >= 0.0 && rho <= 1.0, errc::invalid_argument, "kappa_diagonal: bad rho");
    const double gk = gammas[k];
    if (gk >= 1.0) {
        detail::check_exponent_domains(gamma_max, delta_min, beta_k, chi_k);
        return std::min(1.0 + std::min(beta_k, delta_min) / gamma_max,
                        (1.0 + std::min(chi_k, delta_min / gamma_max)) / gamma_max);
    }
    require(rho < 1.0, errc::regime, "kappa_diagonal: rho = 1 degenerates the flow step");
    return std::min({1.0 + std::min(beta_k, chi_k) / gk, 1.0 / gk + chi_k, 1.0 / (1.0 - rho)});
}

// ---------------------------------------------------------------------------
// Theorem condition sets.
// ---------------------------------------------------------------------------

// Shared-envelope hypotheses: noise with finite gamma-moment inside and
// delta-moment outside the unit ball, drift beta-Hoelder (bounded), diffusion
// chi-Hoelder (bounded, nondegenerate). `zero_drift` treats b = 0 as the
// Lipschitz map with constant zero (beta = 1).
inline condition_report check_general(const std::vector<double>& alphas, double gamma,
                                      double delta, double beta, double chi,
                                      bool zero_drift = false) {
    detail::check_alphas(alphas);
    detail::check_exponent_domains(gamma, delta, beta, chi);
    if (zero_drift) beta = 1.0;
    const double amin = detail::min_of(alphas);

    condition_report rep;
    rep.rule = gamma >= 1.0 ? "general_ge1" : "general_lt1";
    rep.params = {{"alpha_min", amin}, {"gamma", gamma}, {"delta", delta},
                  {"beta", beta},      {"chi", chi}};
    if (zero_drift) rep.note = "zero drift: beta taken as 1";

    if (gamma >= 1.0) {
        rep.add("alpha_min (1 + (beta^delta)/gamma) > 1",
                amin * (1.0 + std::min(beta, delta) / gamma), 1.0);
        rep.add("(alpha_min/gamma)(1 + chi^(delta/gamma)) > 1",
                amin / gamma * (1.0 + std::min(chi, delta / gamma)), 1.0);
    } else {
        const double bc = std::min(beta, chi);
        rep.add("alpha_min (1 + (beta^chi)/gamma) > 1", amin * (1.0 + bc / gamma), 1.0);
        rep.add("alpha_min (1/gamma + chi) > 1", amin * (1.0 / gamma + chi), 1.0);
        rep.add("alpha_min + beta^chi > 1", amin + bc, 1.0);
    }
    return rep;
}

// Component-wise hypotheses: per-component moment indices gamma_k (inside) and
// delta_k (outside), per-component coefficient regularity (beta_k, chi_k).
inline condition_report check_diagonal(const std::vector<double>& alphas,
                                       const std::vector<double>& gammas,
                                       const std::vector<double>& deltas,
                                       const std::vector<double>& betas,
                                       const std::vector<double>& chis,
                                       bool zero_drift = false) {
    detail::check_alphas(alphas);
    const std::size_t d = alphas.size();
    require(gammas.size() == d && deltas.size() == d && betas.size() == d && chis.size() == d,
            errc::invalid_argument, "check_diagonal: exponent vectors must match dimension");
    std::vector<double> beta_eff = betas;
    if (zero_drift) std::fill(beta_eff.begin(), beta_eff.end(), 1.0);
    for (std::size_t k = 0; k < d; ++k)
        detail::check_exponent_domains(gammas[k], deltas[k], beta_eff[k], chis[k]);

    const double amin = detail::min_of(alphas);
    const double gamma_max = detail::max_of(gammas);
    const double delta_min = detail::min_of(deltas);
    bool any_lt1 = false;
    double rho = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
        rho = std::min(rho, std::min(beta_eff[k], chis[k]));
        any_lt1 = any_lt1 || gammas[k] < 1.0;
    }

    condition_report rep;
    rep.rule = "diagonal";
    rep.params = {{"alpha_min", amin},
                  {"gamma_max", gamma_max},
                  {"delta_min", delta_min},
                  {"rho", rho}};
    if (zero_drift) rep.note = "zero drift: beta taken as 1";

    for (std::size_t k = 0; k < d; ++k) {
        const std::string kk = "[" + std::to_string(k) + "] ";
        if (gammas[k] >= 1.0) {
            rep.add(kk + "alpha_min (1 + (beta_k^delta_min)/gamma_max) > 1",
                    amin * (1.0 + std::min(beta_eff[k], delta_min) / gamma_max), 1.0);
            rep.add(kk + "(alpha_min/gamma_max)(1 + chi_k^(delta_min/gamma_max)) > 1",
                    amin / gamma_max * (1.0 + std::min(chis[k], delta_min / gamma_max)), 1.0);
        } else {
            const double bc = std::min(beta_eff[k], chis[k]);
            rep.add(kk + "alpha_min (1 + (beta_k^chi_k)/gamma_k) > 1",
                    amin * (1.0 + bc / gammas[k]), 1.0);
            rep.add(kk + "alpha_min (1/gamma_k + chi_k) > 1",
                    amin * (1.0 / gammas[k] + chis[k]), 1.0);
        }
    }
    if (any_lt1)
        rep.add("alpha_min + min_j beta_j^chi_j > 1", amin + rho, 1.0);
    return rep;
}

// ---------------------------------------------------------------------------
// Noise-specialized reductions.
// ---------------------------------------------------------------------------

// 1-d symmetric stable driver: unconditional for alpha in [1,2); for alpha < 1
// the whole condition set reduces to alpha + beta^chi > 1.
inline condition_report check_preset_z1(double alpha, double beta, double chi) {
    require(alpha > 0.0 && alpha < 2.0, errc::invalid_argument, "alpha must lie in (0,2)");
    require(beta >= 0.0 && beta <= 1.0 && chi > 0.0 && chi <= 1.0, errc::invalid_argument,
            "bad regularity exponents");
    condition_report rep;
    rep.rule = "preset_z1";
    rep.params = {{"alpha", alpha}, {"beta", beta}, {"chi", chi}};
    if (alpha >= 1.0) {
        rep.add_fact("alpha in [1,2): no further condition", alpha, 1.0, true);
        return rep;
    }
    rep.add("alpha + beta^chi > 1", alpha + std::min(beta, chi), 1.0);
    return rep;
}

// Independent symmetric stable axes, shared coefficient regularity. The
// envelope moment pair is pinned at (gamma, delta) = (alpha_max, alpha_min-):
// for alpha_max >= 1 this lands in the first regime, otherwise the second
// (whose third inequality is implied by the others and drops out).
inline condition_report check_preset_z2(const std::vector<double>& alphas, double beta,
                                        double chi) {
    detail::check_alphas(alphas);
    require(beta >= 0.0 && beta <= 1.0 && chi > 0.0 && chi <= 1.0, errc::invalid_argument,
            "bad regularity exponents");
    const double amin = detail::min_of(alphas);
    const double amax = detail::max_of(alphas);
    const double r = amin / amax;

    condition_report rep;
    rep.rule = "preset_z2";
    rep.params = {{"alpha_min", amin}, {"alpha_max", amax}, {"beta", beta}, {"chi", chi}};
    if (amax >= 1.0) {
        rep.add("alpha_min + (alpha_min/alpha_max)(beta^alpha_min) > 1",
                amin + r * std::min(beta, amin), 1.0);
        rep.add("(alpha_min/alpha_max)(1 + chi^(alpha_min/alpha_max)) > 1",
                r * (1.0 + std::min(chi, r)), 1.0);
    } else {
        rep.add("alpha_min/alpha_max + alpha_min chi > 1", r + amin * chi, 1.0);
        rep.add("alpha_min + (alpha_min/alpha_max)(beta^chi) > 1",
                amin + r * std::min(beta, chi), 1.0);
    }
    return rep;
}

// Same driver with diagonal coefficients: components with alpha_k in [1,2)
// impose nothing; components with alpha_k < 1 need the shared floor and their
// own corrected-drift condition.
inline condition_report check_preset_z2_diagonal(const std::vector<double>& alphas,
                                                 const std::vector<double>& betas,
                                                 const std::vector<double>& chis) {
    detail::check_alphas(alphas);
    const std::size_t d = alphas.size();
    require(betas.size() == d && chis.size() == d, errc::invalid_argument,
            "exponent vectors must match dimension");
    const double amin = detail::min_of(alphas);
    const double amax = detail::max_of(alphas);
    double rho = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
        require(betas[k] >= 0.0 && betas[k] <= 1.0 && chis[k] > 0.0 && chis[k] <= 1.0,
                errc::invalid_argument, "bad regularity exponents");
        rho = std::min(rho, std::min(betas[k], chis[k]));
    }

    condition_report rep;
    rep.rule = "preset_z2_diagonal";
    rep.params = {{"alpha_min", amin}, {"alpha_max", amax}, {"rho", rho}};
    bool any_lt1 = false;
    for (std::size_t k = 0; k < d; ++k) {
        const std::string kk = "[" + std::to_string(k) + "] ";
        if (alphas[k] >= 1.0) {
            rep.add_fact(kk + "alpha_k in [1,2): no further condition", alphas[k], 1.0, true);
            continue;
        }
        any_lt1 = true;
        rep.add(kk + "alpha_k + (alpha_k/alpha_max)(beta_k^chi_k) > 1",
                alphas[k] + alphas[k] / amax * std::min(betas[k], chis[k]), 1.0);
    }
    if (any_lt1)
        rep.add("alpha_min + min_j beta_j^chi_j > 1", amin + rho, 1.0);
    return rep;
}

// Zero-drift elliptic corollaries: sweep the admissible moment pairs
// (gamma, delta) and report the best-margin instantiation of the general
// conditions with beta = 1. delta stays below alpha_min (big-jump moment
// finiteness for stable-type tails) and at most gamma.
namespace detail {

inline condition_report best_over_moment_pairs(
    const std::vector<double>& alphas,
    const std::function<condition_report(double, double)>& instantiate) {
    const double amin = min_of(alphas);
    const double amax = max_of(alphas);
    condition_report best;
    double best_margin = -1e300;
    bool first = true;
    auto consider = [&](double gamma, double delta) {
        if (delta <= 0.0 || delta > gamma) return;
        condition_report rep = instantiate(gamma, delta);
        double margin = 1e300;
        for (const auto& iq : rep.inequalities) margin = std::min(margin, iq.margin);
        if (first || margin > best_margin) {
            best = std::move(rep);
            best_margin = margin;
            first = false;
        }
    };
    for (int i = 0; i <= 64; ++i) {
        const double delta =
            amin * (1.0 - std::ldexp(1.0, -2 - i / 8)) * (static_cast<double>(i % 8) + 1.0) / 8.0;
        if (delta <= 0.0) continue;
        for (int j = 0; j <= 32; ++j) {
            const double gamma_hi = 1.0 + static_cast<double>(j) / 32.0;  // [1, 2]
            consider(gamma_hi, std::min(delta, gamma_hi));
            if (amax < 1.0) {
                const double gamma_lo =
                    amax + (1.0 - amax) * (static_cast<double>(j) + 0.5) / 33.0;  // (amax, 1)
                consider(gamma_lo, std::min(delta, gamma_lo));
            }
        }
    }
    require(!first, errc::infeasible, "no admissible moment pair found");
    return best;
}

}  // namespace detail

inline condition_report check_corollary_elliptic(const std::vector<double>& alphas, double chi) {
    detail::check_alphas(alphas);
    require(chi > 0.0 && chi <= 1.0, errc::invalid_argument, "chi must lie in (0,1]");
    condition_report rep = detail::best_over_moment_pairs(
        alphas, [&](double gamma, double delta) {
            return check_general(alphas, gamma, delta, 1.0, chi, true);
        });
    rep.rule = "corollary_elliptic";
    rep.note = "zero drift, elliptic sigma; moment pair chosen by best margin";
    return rep;
}

inline condition_report check_corollary_elliptic_diagonal(const std::vector<double>& alphas,
                                                          const std::vector<double>& chis) {
    detail::check_alphas(alphas);
    require(chis.size() == alphas.size(), errc::invalid_argument,
            "chi vector must match dimension");
    const std::size_t d = alphas.size();
    condition_report rep = detail::best_over_moment_pairs(
        alphas, [&](double gamma, double delta) {
            return check_diagonal(alphas, std::vector<double>(d, gamma),
                                  std::vector<double>(d, delta), std::vector<double>(d, 1.0),
                                  chis, true);
        });
    rep.rule = "corollary_elliptic_diagonal";
    rep.note = "zero drift, elliptic diagonal sigma; moment pair chosen by best margin";
    return rep;
}

// ---------------------------------------------------------------------------
// Regularity exponent for the occupation-type norms.
// ---------------------------------------------------------------------------

struct regularity_plan {
    bool feasible = false;
    double eta = 0.0;
    std::vector<double> c;
    double lambda = 0.0;
    double b_cap = 0.0;  // B = max_j a_j / kappa_j
    std::vector<double> flow_terms;     // c_i a_i (chi^delta) / max(1, gamma)
    std::vector<double> window_terms;   // a_i - eta - a_i c_i / alpha_i
    std::vector<double> coupling_terms; // eta (c_i a_i kappa_j / a_j - 1), row-major i x j
    std::string note;
};

// lambda = min over the three families above; eta and c may be supplied
// explicitly, otherwise eta = eta_max / 2 and each c_i sits mid-interval.
inline regularity_plan derive_lambda(const std::vector<double>& a,
                                     const std::vector<double>& alphas,
                                     std::vector<double> kappas, double chi, double delta,
                                     double gamma, double eta = 0.0,
                                     std::vector<double> c = {}) {
    const std::size_t d = a.size();
    require(d >= 1 && alphas.size() == d, errc::invalid_argument,
            "derive_lambda: dimension mismatch");
    detail::check_alphas(alphas);
    double asum = 0.0;
    for (double ai : a) {
        require(ai > 0.0, errc::invalid_argument, "derive_lambda: anisotropy must be positive");
        asum += ai;
    }
    require(std::abs(asum - static_cast<double>(d)) < 1e-9, errc::invalid_argument,
            "derive_lambda: anisotropy must sum to the dimension");
    if (kappas.size() == 1 && d > 1) kappas.assign(d, kappas[0]);
    require(kappas.size() == d, errc::invalid_argument, "derive_lambda: kappa count mismatch");
    require(chi > 0.0 && chi <= 1.0 && delta > 0.0 && gamma > 0.0 && gamma <= 2.0,
            errc::invalid_argument, "derive_lambda: bad exponents");

    regularity_plan plan;
    for (std::size_t j = 0; j < d; ++j) {
        if (kappas[j] * alphas[j] <= 1.0 + strict_margin) {
            plan.note = "infeasible: kappa_j alpha_j <= 1 at j = " + std::to_string(j);
            fail(errc::infeasible, "derive_lambda: " + plan.note);
        }
    }
    double b_cap = 0.0;
    for (std::size_t j = 0; j < d; ++j) b_cap = std::max(b_cap, a[j] / kappas[j]);
    plan.b_cap = b_cap;

    if (eta <= 0.0) {
        double eta_max = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            eta_max = std::min(eta_max, a[i] * std::min(1.0, delta));
            eta_max = std::min(eta_max, a[i] - b_cap / alphas[i]);
        }
        require(eta_max > 0.0, errc::infeasible, "derive_lambda: no admissible eta");
        eta = 0.5 * eta_max;
    }
    require(eta > 0.0 && eta < 1.0, errc::invalid_argument,
            "derive_lambda: eta must lie in (0,1)");

    if (c.empty()) {
        c.resize(d);
        for (std::size_t i = 0; i < d; ++i) {
            const double lo = b_cap / a[i];
            const double hi = alphas[i] * (1.0 - eta / a[i]);
            require(lo < hi, errc::infeasible,
                    "derive_lambda: empty window for c at axis " + std::to_string(i));
            c[i] = 0.5 * (lo + hi);
        }
    }
    require(c.size() == d, errc::invalid_argument, "derive_lambda: c count mismatch");
    for (double ci : c)
        require(ci > 0.0 && finite(ci), errc::invalid_argument,
                "derive_lambda: c entries must be positive");

    plan.eta = eta;
    plan.c = c;
    const double cd = std::min(chi, delta);
    const double g1 = std::max(1.0, gamma);
    double lambda = 1e300;
    plan.flow_terms.resize(d);
    plan.window_terms.resize(d);
    plan.coupling_terms.resize(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        plan.flow_terms[i] = c[i] * a[i] * cd / g1;
        plan.window_terms[i] = a[i] - eta - a[i] * c[i] / alphas[i];
        lambda = std::min(lambda, plan.flow_terms[i]);
        lambda = std::min(lambda, plan.window_terms[i]);
        for (std::size_t j = 0; j < d; ++j) {
            plan.coupling_terms[i * d + j] = eta * (c[i] * a[i] * kappas[j] / a[j] - 1.0);
            lambda = std::min(lambda, plan.coupling_terms[i * d + j]);
        }
    }
    plan.lambda = lambda;
    plan.feasible = lambda > 0.0;
    if (!plan.feasible && plan.note.empty())
        plan.note = "supplied (eta, c) give a nonpositive exponent";
    return plan;
}

}  // namespace anisolevy
