#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "coefficients.hpp"
#include "common.hpp"
#include "levy_models.hpp"
#include "rng.hpp"
#include "sampling.hpp"

namespace anisolevy {

enum class matrix_structure { diagonal, full };

// sigma: R^d -> R^{d x d} built from coefficient specs (d entries on the
// diagonal, or d*d row-major).
struct matrix_field {
    matrix_structure structure = matrix_structure::diagonal;
    std::vector<coefficient_spec> entries;

    void validate(std::size_t d) const {
        const std::size_t expect = structure == matrix_structure::diagonal ? d : d * d;
        require(entries.size() == expect, errc::invalid_argument,
                "matrix_field: expected " + std::to_string(expect) + " entries");
        for (const auto& e : entries) e.validate();
    }

    // full d x d matrix, row-major
    std::vector<double> eval(const std::vector<double>& x) const {
        const std::size_t d = x.size();
        std::vector<double> m(d * d, 0.0);
        if (structure == matrix_structure::diagonal) {
            for (std::size_t i = 0; i < d; ++i) m[i * d + i] = entries[i].eval(x);
        } else {
            for (std::size_t i = 0; i < d * d; ++i) m[i] = entries[i].eval(x);
        }
        return m;
    }

    void apply(const std::vector<double>& x, const std::vector<double>& v,
               std::vector<double>& out) const {
        const std::size_t d = x.size();
        out.assign(d, 0.0);
        if (structure == matrix_structure::diagonal) {
            for (std::size_t i = 0; i < d; ++i) out[i] = entries[i].eval(x) * v[i];
        } else {
            for (std::size_t i = 0; i < d; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) acc += entries[i * d + j].eval(x) * v[j];
                out[i] = acc;
            }
        }
    }

    double min_holder_exponent() const {
        double e = 1.0;
        for (const auto& c : entries) e = std::min(e, c.holder_exponent());
        return e;
    }
};

struct sde_problem {
    levy_model noise;
    std::vector<double> x0;
    std::vector<coefficient_spec> drift;  // one component per axis
    matrix_field diffusion;

    std::size_t dim() const { return noise.dim; }

    void validate() const {
        noise.validate();
        require(x0.size() == noise.dim, errc::invalid_argument,
                "sde_problem: x0 dimension mismatch");
        require(drift.size() == noise.dim, errc::invalid_argument,
                "sde_problem: drift needs one component per axis");
        for (const auto& b : drift) b.validate();
        diffusion.validate(noise.dim);
    }

    void drift_eval(const std::vector<double>& x, std::vector<double>& out) const {
        out.resize(drift.size());
        for (std::size_t i = 0; i < drift.size(); ++i) out[i] = drift[i].eval(x);
    }

    // declared regularity of the coefficients
    double declared_beta() const {
        double e = 1.0;
        for (const auto& b : drift) e = std::min(e, b.holder_exponent());
        return e;
    }
    double declared_chi() const { return diffusion.min_holder_exponent(); }
};

// b~(x) = b(x) - sigma(x) A restricted to the rows in `row_mask` (rows whose
// component runs in the gamma < 1 regime). `a` is the small-jump compensator
// actually in effect: the analytic int_{|z|<=1} z nu(dz) when increments are
// exact, or its above-cutoff truncation when they come from a truncated
// sampler.
inline std::vector<double> corrected_drift(const sde_problem& p, const std::vector<double>& x,
                                           const std::vector<double>& a,
                                           const std::vector<bool>& row_mask) {
    const std::size_t d = p.dim();
    require(a.size() == d && row_mask.size() == d && x.size() == d, errc::invalid_argument,
            "corrected_drift: dimension mismatch");
    std::vector<double> b;
    p.drift_eval(x, b);
    std::vector<double> sa;
    p.diffusion.apply(x, a, sa);
    for (std::size_t i = 0; i < d; ++i)
        if (row_mask[i]) b[i] -= sa[i];
    return b;
}

inline std::vector<double> corrected_drift(const sde_problem& p, const std::vector<double>& x,
                                           const std::vector<double>& a) {
    return corrected_drift(p, x, a, std::vector<bool>(p.dim(), true));
}

struct euler_options {
    double base_step = 0x1p-12;  // fine-grid step per unit time
    increment_plan plan;
};

// Euler-Maruyama endpoint on an equal-step grid.
inline std::vector<double> simulate_endpoint(const sde_problem& p, const increment_sampler& smp,
                                             double t, rng_stream& rng,
                                             double base_step = 0x1p-12) {
    p.validate();
    require(t > 0.0 && finite(t), errc::invalid_argument, "simulate_endpoint: t must be > 0");
    require(base_step > 0.0, errc::invalid_argument, "simulate_endpoint: bad step");
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(t / base_step)));
    const double h = t / static_cast<double>(n);
    std::vector<double> x = p.x0, b, sdz;
    for (std::size_t m = 0; m < n; ++m) {
        const std::vector<double> dz = smp.sample(h, rng);
        p.drift_eval(x, b);
        p.diffusion.apply(x, dz, sdz);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += b[i] * h + sdz[i];
    }
    return x;
}

// Fine path that additionally records, for a list of window widths eps
// (sorted descending), the state at time t - eps and the noise increment of Z
// over (t - eps, t]. The same realized increments feed the fine path and the
// window data, which is what couples the one-step approximations to the
// surrogate endpoint in the rate experiments.
struct window_path {
    std::vector<double> endpoint;     // X(t)
    std::vector<double> state_at;     // row-major: n_eps x d, state at t - eps_j
    std::vector<double> noise_after;  // row-major: n_eps x d, Z(t) - Z(t - eps_j)
};

inline window_path simulate_with_window(const sde_problem& p, const increment_sampler& smp,
                                        double t, const std::vector<double>& eps,
                                        rng_stream& rng, double base_step = 0x1p-12,
                                        double window_step = 0.0) {
    p.validate();
    require(!eps.empty(), errc::invalid_argument, "simulate_with_window: empty eps list");
    for (std::size_t j = 0; j + 1 < eps.size(); ++j)
        require(eps[j] > eps[j + 1], errc::invalid_argument,
                "simulate_with_window: eps must be strictly decreasing");
    require(eps.front() < t && eps.back() > 0.0, errc::invalid_argument,
            "simulate_with_window: eps must lie in (0, t)");

    const double eps_max = eps.front();
    const double h2 = window_step > 0.0 ? window_step
                                        : std::min(base_step, eps.back() / 64.0);

    // time grid: coarse until t - eps_max, then fine; every t - eps_j is a node
    std::vector<double> times;
    const double t_win = t - eps_max;
    const auto n1 = static_cast<std::size_t>(std::max(1.0, std::ceil(t_win / base_step)));
    for (std::size_t m = 0; m < n1; ++m)
        times.push_back(t_win * static_cast<double>(m) / static_cast<double>(n1));
    const auto n2 = static_cast<std::size_t>(std::max(1.0, std::ceil(eps_max / h2)));
    for (std::size_t m = 0; m <= n2; ++m)
        times.push_back(t_win + eps_max * static_cast<double>(m) / static_cast<double>(n2));
    for (double e : eps) times.push_back(t - e);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double x, double y) { return std::abs(x - y) < 1e-15; }),
                times.end());

    const std::size_t d = p.dim();
    window_path out;
    out.state_at.assign(eps.size() * d, 0.0);
    out.noise_after.assign(eps.size() * d, 0.0);
    std::vector<double> cum_noise(d, 0.0);           // running sum of dz from t - eps_max
    std::vector<double> cum_at(eps.size() * d, 0.0);
    std::vector<char> seen(eps.size(), 0);

    auto mark = [&](double now, const std::vector<double>& x) {
        for (std::size_t j = 0; j < eps.size(); ++j) {
            if (seen[j]) continue;
            if (std::abs(now - (t - eps[j])) < 1e-13 * std::max(1.0, t)) {
                seen[j] = 1;
                std::copy(x.begin(), x.end(), out.state_at.begin() + j * d);
                std::copy(cum_noise.begin(), cum_noise.end(), cum_at.begin() + j * d);
            }
        }
    };

    std::vector<double> x = p.x0, b, sdz;
    mark(times.front(), x);
    for (std::size_t m = 0; m + 1 < times.size(); ++m) {
        const double dt = times[m + 1] - times[m];
        const std::vector<double> dz = smp.sample(dt, rng);
        if (times[m] >= t_win - 1e-15)
            for (std::size_t i = 0; i < d; ++i) cum_noise[i] += dz[i];
        p.drift_eval(x, b);
        p.diffusion.apply(x, dz, sdz);
        for (std::size_t i = 0; i < d; ++i) x[i] += b[i] * dt + sdz[i];
        mark(times[m + 1], x);
    }
    for (std::size_t j = 0; j < eps.size(); ++j) {
        require(seen[j] != 0, errc::numeric, "simulate_with_window: window node missed");
        for (std::size_t i = 0; i < d; ++i)
            out.noise_after[j * d + i] = cum_noise[i] - cum_at[j * d + i];
    }
    out.endpoint = std::move(x);
    return out;
}

// ---------------------------------------------------------------------------
// One-step approximations of X(t) from the state at t - eps.
// ---------------------------------------------------------------------------

// gamma in [1,2] regime: frozen Euler step.
inline std::vector<double> one_step_ge1(const sde_problem& p, const std::vector<double>& state,
                                        double eps, const std::vector<double>& dz) {
    const std::size_t d = p.dim();
    require(state.size() == d && dz.size() == d && eps > 0.0, errc::invalid_argument,
            "one_step_ge1: bad arguments");
    std::vector<double> b, sdz;
    p.drift_eval(state, b);
    p.diffusion.apply(state, dz, sdz);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = state[i] + b[i] * eps + sdz[i];
    return x;
}

namespace detail {

// Piecewise-frozen flow of dW/ds = b~(W) over [0, eps] with step
// tau = eps^{1/(1-rho)} (single step if tau >= eps), plus a trailing partial
// step. b~ depends on the current W only.
template <typename Drift>
std::vector<double> frozen_flow(std::vector<double> w, double eps, double rho, Drift&& btilde) {
    require(rho >= 0.0 && rho < 1.0, errc::regime, "frozen_flow: rho must lie in [0,1)");
    const double tau = std::pow(eps, 1.0 / (1.0 - rho));
    std::vector<double> b;
    if (tau >= eps) {
        btilde(w, b);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += b[i] * eps;
        return w;
    }
    const auto n_full = static_cast<std::size_t>(std::floor(eps / tau));
    double done = 0.0;
    for (std::size_t m = 0; m < n_full; ++m) {
        btilde(w, b);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += b[i] * tau;
        done += tau;
    }
    const double rest = eps - done;
    if (rest > 0.0) {
        btilde(w, b);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += b[i] * rest;
    }
    return w;
}

}  // namespace detail

// gamma in (0,1) regime: drift-corrected ODE flow, then the compensator is
// restored at the frozen state and the window noise is added:
//   W flows b~ = b - sigma A with step tau = eps^{1/(1 - beta^chi)},
//   U = W(eps) + eps sigma(state) A,  X = U + sigma(state) dz.
inline std::vector<double> one_step_lt1(const sde_problem& p, const std::vector<double>& state,
                                        double eps, const std::vector<double>& dz,
                                        const std::vector<double>& a, double beta_chi) {
    const std::size_t d = p.dim();
    require(state.size() == d && dz.size() == d && a.size() == d && eps > 0.0,
            errc::invalid_argument, "one_step_lt1: bad arguments");
    std::vector<double> w = detail::frozen_flow(
        state, eps, beta_chi,
        [&](const std::vector<double>& x, std::vector<double>& out) {
            out = corrected_drift(p, x, a);
        });
    std::vector<double> sa, sdz;
    p.diffusion.apply(state, a, sa);
    p.diffusion.apply(state, dz, sdz);
    for (std::size_t i = 0; i < d; ++i) w[i] += eps * sa[i] + sdz[i];
    return w;
}

// Component-wise regimes: rows with gamma_j < 1 flow the corrected drift and
// get the compensator restored; rows with gamma_j in [1,2] flow the plain
// drift. One shared flow with step tau = eps^{1/(1-rho)}, rho = min beta_j^chi_j.
inline std::vector<double> one_step_diagonal(const sde_problem& p,
                                             const std::vector<double>& state, double eps,
                                             const std::vector<double>& dz,
                                             const std::vector<double>& a,
                                             const std::vector<double>& gammas, double rho) {
    const std::size_t d = p.dim();
    require(state.size() == d && dz.size() == d && a.size() == d && gammas.size() == d &&
                eps > 0.0,
            errc::invalid_argument, "one_step_diagonal: bad arguments");
    std::vector<bool> mask(d);
    for (std::size_t i = 0; i < d; ++i) mask[i] = gammas[i] < 1.0;
    std::vector<double> w = detail::frozen_flow(
        state, eps, rho,
        [&](const std::vector<double>& x, std::vector<double>& out) {
            out = corrected_drift(p, x, a, mask);
        });
    std::vector<double> sa, sdz;
    p.diffusion.apply(state, a, sa);
    p.diffusion.apply(state, dz, sdz);
    for (std::size_t i = 0; i < d; ++i) {
        if (mask[i]) w[i] += eps * sa[i];
        w[i] += sdz[i];
    }
    return w;
}

}  // namespace anisolevy
