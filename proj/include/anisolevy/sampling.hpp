#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "common.hpp"
#include "levy_models.hpp"
#include "rng.hpp"

namespace anisolevy {

// Chambers-Mallows-Stuck, symmetric case: characteristic function exp(-|xi|^alpha).
inline double stable_symmetric_std(rng_stream& rng, double alpha) {
    require(alpha > 0.0 && alpha <= 2.0, errc::invalid_argument,
            "stable_symmetric_std: alpha must be in (0,2]");
    const double v = pi * (rng.uniform_pos() - 0.5);
    const double w = rng.exponential();
    if (alpha == 1.0) return std::tan(v);
    const double av = alpha * v;
    return std::sin(av) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos(v - av) / w, (1.0 - alpha) / alpha);
}

// Kanter's representation of the one-sided stable law with Laplace transform
// exp(-lambda^alpha), alpha in (0,1).
inline double stable_one_sided_std(rng_stream& rng, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, errc::invalid_argument,
            "stable_one_sided_std: alpha must be in (0,1)");
    const double theta = pi * rng.uniform_pos();
    const double w = rng.exponential();
    const double a = std::pow(std::sin(alpha * theta), alpha) *
                     std::pow(std::sin((1.0 - alpha) * theta), 1.0 - alpha) / std::sin(theta);
    return std::pow(a, 1.0 / alpha) * std::pow(w, -(1.0 - alpha) / alpha);
}

// Walker/Vose alias table for O(1) discrete sampling.
class alias_table {
public:
    alias_table() = default;

    explicit alias_table(const std::vector<double>& weights) {
        const std::size_t n = weights.size();
        require(n > 0, errc::invalid_argument, "alias_table: empty weights");
        double total = 0.0;
        for (double w : weights) {
            require(w >= 0.0 && finite(w), errc::invalid_argument, "alias_table: bad weight");
            total += w;
        }
        require(total > 0.0, errc::invalid_argument, "alias_table: zero total weight");
        prob_.assign(n, 0.0);
        alias_.assign(n, 0);
        std::vector<double> scaled(n);
        std::vector<std::size_t> small, large;
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = weights[i] * static_cast<double>(n) / total;
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }
        while (!small.empty() && !large.empty()) {
            const std::size_t s = small.back(), l = large.back();
            small.pop_back();
            large.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        for (std::size_t i : large) prob_[i] = 1.0;
        for (std::size_t i : small) prob_[i] = 1.0;
    }

    std::size_t size() const { return prob_.size(); }

    std::size_t sample(rng_stream& rng) const {
        const double u = rng.uniform01() * static_cast<double>(prob_.size());
        std::size_t i = static_cast<std::size_t>(u);
        if (i >= prob_.size()) i = prob_.size() - 1;
        return (u - static_cast<double>(i)) < prob_[i] ? i : alias_[i];
    }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

enum class surrogate_mode { automatic, on, off };

struct increment_plan {
    double cutoff = 1e-4;                    // truncation radius for power tails
    surrogate_mode gaussian = surrogate_mode::automatic;
    std::size_t discrete_truncation = 10000; // atoms kept per axis, discrete kind
    bool record_jumps = false;
};

struct jump_record {
    std::size_t axis = 0;
    double z = 0.0;  // signed jump
};

// One increment of Z over a time step. Stable kinds (isotropic, component,
// block) are sampled exactly: 1-d marginals by CMS, multi-d isotropic blocks
// by Brownian subordination sqrt(2 T) N(0, I) with T one-sided (alpha/2)-stable.
// Compactly supported kinds (one-sided power + atoms, discrete) are sampled as
// compound Poisson above the plan cutoff, recentred by the compensator the
// truncation actually keeps, with an optional centred Gaussian standing in for
// the discarded compensated small jumps (automatic: on when its per-axis
// unit-rate variance exceeds 1e-8).
class increment_sampler {
public:
    increment_sampler(levy_model model, increment_plan plan = {})
        : model_(std::move(model)), plan_(plan) {
        model_.validate();
        require(plan_.cutoff > 0.0 && plan_.cutoff < 1.0, errc::invalid_argument,
                "increment_plan: cutoff must be in (0,1)");
        require(plan_.discrete_truncation >= 8, errc::invalid_argument,
                "increment_plan: discrete truncation too small");
        const std::size_t d = model_.dim;
        compensator_rate_.assign(d, 0.0);
        surrogate_var_rate_.assign(d, 0.0);
        gaussian_on_.assign(d, false);

        switch (model_.kind) {
            case levy_kind::isotropic_stable:
            case levy_kind::component_stable:
            case levy_kind::block_stable:
                exact_ = true;
                cutoff_used_ = 0.0;
                break;
            case levy_kind::tempered_one_sided: {
                exact_ = false;
                cutoff_used_ = plan_.cutoff;
                compensator_rate_ = small_jump_mean_above(model_, plan_.cutoff);
                const auto var_below = small_jump_variance_below(model_, plan_.cutoff);
                axes_.resize(d);
                for (std::size_t k = 0; k < d; ++k) {
                    const auto& c = model_.tempered[k];
                    auto& ax = axes_[k];
                    std::vector<double> weights;
                    auto add_side = [&](double coeff, double alpha, double sign) {
                        if (coeff <= 0.0) return;
                        const double cpa = std::pow(plan_.cutoff, -alpha);
                        const double rate = coeff * (cpa - 1.0) / alpha;
                        if (rate <= 0.0) return;
                        ax.cats.push_back({category::power, alpha, cpa, sign * 1.0, 0.0});
                        weights.push_back(rate);
                    };
                    add_side(c.c_plus, c.alpha_plus, +1.0);
                    add_side(c.c_minus, c.alpha_minus, -1.0);
                    for (const auto& at : c.atoms) {
                        if (std::abs(at.z) <= plan_.cutoff) continue;
                        ax.cats.push_back({category::atom, 0.0, 0.0, 0.0, at.z});
                        weights.push_back(at.w);
                    }
                    ax.rate = 0.0;
                    for (double wr : weights) ax.rate += wr;
                    if (ax.rate > 0.0) ax.pick = alias_table(weights);
                    decide_surrogate(k, var_below[k]);
                }
                break;
            }
            case levy_kind::discrete_measure: {
                exact_ = false;
                cutoff_used_ = 0.0;  // truncation is by atom count, not radius
                axes_.resize(d);
                for (std::size_t k = 0; k < d; ++k) {
                    const double alpha = model_.alphas[k];
                    const std::size_t n_keep = plan_.discrete_truncation;
                    std::vector<double> weights(n_keep);
                    double comp = 0.0;
                    for (std::size_t n = 1; n <= n_keep; ++n) {
                        const double nf = static_cast<double>(n);
                        weights[n - 1] = std::pow(nf, alpha - 1.0);
                        comp += std::pow(nf, alpha - 2.0);
                    }
                    auto& ax = axes_[k];
                    ax.cats.push_back({category::table, 0.0, 0.0, 0.0, 0.0});
                    ax.rate = 0.0;
                    for (double wr : weights) ax.rate += wr;
                    ax.pick = alias_table(weights);
                    ax.table_is_atom_index = true;
                    compensator_rate_[k] = comp;
                    decide_surrogate(
                        k, detail::tail_power_sum(3.0 - alpha, n_keep + 1));
                }
                break;
            }
            case levy_kind::subordinate_bm:
                fail(errc::regime, "increment_sampler: subordinate kind is analysis-only");
        }
    }

    const levy_model& model() const { return model_; }
    std::size_t dim() const { return model_.dim; }
    bool exact() const { return exact_; }
    double cutoff_used() const { return cutoff_used_; }
    const std::vector<double>& compensator_rate() const { return compensator_rate_; }
    const std::vector<double>& surrogate_variance_rate() const { return surrogate_var_rate_; }
    bool gaussian_active(std::size_t axis) const { return gaussian_on_.at(axis); }

    double total_jump_rate() const {
        double r = 0.0;
        for (const auto& ax : axes_) r += ax.rate;
        return r;
    }

    std::vector<double> sample(double dt, rng_stream& rng,
                               std::vector<jump_record>* jumps = nullptr) const {
        require(dt > 0.0 && finite(dt), errc::invalid_argument, "sample: dt must be > 0");
        std::vector<double> z(model_.dim, 0.0);
        if (exact_) {
            sample_exact(dt, rng, z);
            return z;
        }
        for (std::size_t k = 0; k < model_.dim; ++k) {
            const auto& ax = axes_[k];
            double acc = -dt * compensator_rate_[k];
            if (ax.rate > 0.0) {
                const std::uint64_t n_jumps = rng.poisson(ax.rate * dt);
                for (std::uint64_t j = 0; j < n_jumps; ++j) {
                    const double jump = sample_jump(ax, rng);
                    acc += jump;
                    if (plan_.record_jumps && jumps != nullptr) jumps->push_back({k, jump});
                }
            }
            if (gaussian_on_[k])
                acc += std::sqrt(surrogate_var_rate_[k] * dt) * rng.normal();
            z[k] = acc;
        }
        return z;
    }

private:
    enum class category { power, atom, table };

    struct cat_data {
        category type;
        double alpha;    // power: tail index
        double cut_pow;  // power: cutoff^{-alpha}
        double sign;     // power: +1 / -1 side
        double z;        // atom: jump value
    };

    struct axis_data {
        double rate = 0.0;
        alias_table pick;
        std::vector<cat_data> cats;
        bool table_is_atom_index = false;  // discrete kind: alias index n-1 <-> jump 1/n
    };

    void decide_surrogate(std::size_t axis, double var_rate) {
        surrogate_var_rate_[axis] = var_rate;
        switch (plan_.gaussian) {
            case surrogate_mode::on: gaussian_on_[axis] = var_rate > 0.0; break;
            case surrogate_mode::off: gaussian_on_[axis] = false; break;
            case surrogate_mode::automatic: gaussian_on_[axis] = var_rate > 1e-8; break;
        }
    }

    double sample_jump(const axis_data& ax, rng_stream& rng) const {
        if (ax.table_is_atom_index)
            return 1.0 / static_cast<double>(ax.pick.sample(rng) + 1);
        const auto& cat = ax.cats[ax.pick.sample(rng)];
        if (cat.type == category::atom) return cat.z;
        // inverse CDF of z^{-1-alpha} on [cutoff, 1]
        const double u = rng.uniform_pos();
        const double zpow = cat.cut_pow - u * (cat.cut_pow - 1.0);
        return cat.sign * std::pow(zpow, -1.0 / cat.alpha);
    }

    void sample_exact(double dt, rng_stream& rng, std::vector<double>& z) const {
        switch (model_.kind) {
            case levy_kind::component_stable:
                for (std::size_t k = 0; k < model_.dim; ++k)
                    z[k] = std::pow(dt, 1.0 / model_.alphas[k]) *
                           stable_symmetric_std(rng, model_.alphas[k]);
                return;
            case levy_kind::isotropic_stable: {
                const double alpha = model_.alphas[0];
                const double scale = std::pow(dt, 1.0 / alpha);
                if (model_.dim == 1) {
                    z[0] = scale * stable_symmetric_std(rng, alpha);
                } else {
                    const double t_sub = stable_one_sided_std(rng, 0.5 * alpha);
                    const double s = scale * std::sqrt(2.0 * t_sub);
                    for (std::size_t k = 0; k < model_.dim; ++k) z[k] = s * rng.normal();
                }
                return;
            }
            case levy_kind::block_stable:
                for (std::size_t j = 0; j < model_.blocks.size(); ++j) {
                    const double alpha = model_.alphas[j];
                    const double scale = std::pow(dt, 1.0 / alpha);
                    const auto& axes = model_.blocks[j];
                    if (axes.size() == 1) {
                        z[axes[0]] = scale * stable_symmetric_std(rng, alpha);
                    } else {
                        const double t_sub = stable_one_sided_std(rng, 0.5 * alpha);
                        const double s = scale * std::sqrt(2.0 * t_sub);
                        for (std::size_t ax : axes) z[ax] = s * rng.normal();
                    }
                }
                return;
            default:
                fail(errc::invalid_argument, "sample_exact: not an exact kind");
        }
    }

    levy_model model_;
    increment_plan plan_;
    bool exact_ = false;
    double cutoff_used_ = 0.0;
    std::vector<axis_data> axes_;
    std::vector<double> compensator_rate_;
    std::vector<double> surrogate_var_rate_;
    std::vector<bool> gaussian_on_;
};

// Convenience one-shot form.
inline std::vector<double> sample_increment(const levy_model& m, double dt, rng_stream& rng,
                                            const increment_plan& plan = {},
                                            std::vector<jump_record>* jumps = nullptr) {
    return increment_sampler(m, plan).sample(dt, rng, jumps);
}

}  // namespace anisolevy
