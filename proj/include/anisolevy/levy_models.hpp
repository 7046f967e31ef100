#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "common.hpp"
#include "numeric.hpp"

namespace anisolevy {

using cdouble = std::complex<double>;

// ---------------------------------------------------------------------------
// Model catalog. Every kind describes a Levy measure nu on R^d; the symbol is
//   Psi(xi) = int (1 + 1_{|z|<=1} i xi.z - e^{i xi.z}) nu(dz),
// so E exp(i xi.Z(t)) = exp(-t Psi(xi)).
// ---------------------------------------------------------------------------

enum class levy_kind {
    isotropic_stable,   // nu = C(d,alpha) |z|^{-d-alpha} dz, symbol |xi|^alpha
    component_stable,   // independent 1-d symmetric stable axes, sum |xi_k|^{alpha_k}
    block_stable,       // isotropic stable on coordinate blocks, sum |xi_I_j|^{alpha_j}
    tempered_one_sided, // per axis: c+ r^{-1-a+} on (0,1], c- |r|^{-1-a-} on [-1,0), finite atoms
    discrete_measure,   // per axis: sum_n n^{alpha-1} delta_{1/n}
    subordinate_bm      // per axis: psi_k(xi_k^2/2), psi_k(l) = l^{a_k/2} log(1+l)^{b_k/2}
};

struct one_sided_atom {
    double z = 0.0;  // jump size, 0 < |z| <= 1
    double w = 0.0;  // mass
};

struct tempered_component {
    double c_plus = 0.0;
    double alpha_plus = 0.5;
    double c_minus = 0.0;
    double alpha_minus = 0.5;
    std::vector<one_sided_atom> atoms;

    double total_power_mass() const { return c_plus + c_minus; }
};

struct levy_model {
    levy_kind kind = levy_kind::isotropic_stable;
    std::size_t dim = 1;
    std::vector<double> alphas;                     // stability indices (see kinds)
    std::vector<std::vector<std::size_t>> blocks;   // block_stable only
    std::vector<tempered_component> tempered;       // tempered_one_sided only
    std::vector<double> betas;                      // subordinate_bm log exponents

    static levy_model isotropic(double alpha, std::size_t d) {
        levy_model m;
        m.kind = levy_kind::isotropic_stable;
        m.dim = d;
        m.alphas = {alpha};
        m.validate();
        return m;
    }

    static levy_model component(std::vector<double> alphas_) {
        levy_model m;
        m.kind = levy_kind::component_stable;
        m.dim = alphas_.size();
        m.alphas = std::move(alphas_);
        m.validate();
        return m;
    }

    static levy_model block(std::vector<std::vector<std::size_t>> blocks_,
                            std::vector<double> alphas_) {
        levy_model m;
        m.kind = levy_kind::block_stable;
        m.blocks = std::move(blocks_);
        m.alphas = std::move(alphas_);
        m.dim = 0;
        for (const auto& b : m.blocks) m.dim += b.size();
        m.validate();
        return m;
    }

    static levy_model one_sided(std::vector<tempered_component> comps) {
        levy_model m;
        m.kind = levy_kind::tempered_one_sided;
        m.dim = comps.size();
        m.tempered = std::move(comps);
        m.validate();
        return m;
    }

    static levy_model discrete(std::vector<double> alphas_) {
        levy_model m;
        m.kind = levy_kind::discrete_measure;
        m.dim = alphas_.size();
        m.alphas = std::move(alphas_);
        m.validate();
        return m;
    }

    static levy_model subordinate(std::vector<double> alphas_, std::vector<double> betas_) {
        levy_model m;
        m.kind = levy_kind::subordinate_bm;
        m.dim = alphas_.size();
        m.alphas = std::move(alphas_);
        m.betas = std::move(betas_);
        m.validate();
        return m;
    }

    void validate() const {
        require(dim >= 1, errc::invalid_argument, "model dimension must be >= 1");
        auto check_alpha = [](double a) {
            require(a > 0.0 && a < 2.0, errc::invalid_argument,
                    "stability index must lie in (0,2), got " + fmt_double(a));
        };
        switch (kind) {
            case levy_kind::isotropic_stable:
                require(alphas.size() == 1, errc::invalid_argument,
                        "isotropic model takes a single index");
                check_alpha(alphas[0]);
                break;
            case levy_kind::component_stable:
                require(alphas.size() == dim, errc::invalid_argument,
                        "component model needs one index per axis");
                for (double a : alphas) check_alpha(a);
                break;
            case levy_kind::block_stable: {
                require(!blocks.empty() && alphas.size() == blocks.size(), errc::invalid_argument,
                        "block model needs one index per block");
                std::vector<char> seen(dim, 0);
                for (const auto& b : blocks) {
                    require(!b.empty(), errc::invalid_argument, "empty coordinate block");
                    for (std::size_t ax : b) {
                        require(ax < dim && !seen[ax], errc::invalid_argument,
                                "blocks must partition the axes");
                        seen[ax] = 1;
                    }
                }
                for (std::size_t i = 0; i < dim; ++i)
                    require(seen[i], errc::invalid_argument, "blocks must cover every axis");
                for (double a : alphas) check_alpha(a);
                break;
            }
            case levy_kind::tempered_one_sided:
                require(tempered.size() == dim, errc::invalid_argument,
                        "one component descriptor per axis required");
                for (const auto& c : tempered) {
                    require(c.c_plus >= 0.0 && c.c_minus >= 0.0, errc::invalid_argument,
                            "power coefficients must be >= 0");
                    if (c.c_plus > 0.0) check_alpha(c.alpha_plus);
                    if (c.c_minus > 0.0) check_alpha(c.alpha_minus);
                    double total = c.total_power_mass();
                    for (const auto& at : c.atoms) {
                        require(at.w > 0.0, errc::invalid_argument, "atom mass must be > 0");
                        require(at.z != 0.0 && std::abs(at.z) <= 1.0, errc::invalid_argument,
                                "atoms must satisfy 0 < |z| <= 1");
                        total += at.w;
                    }
                    require(total > 0.0, errc::invalid_argument,
                            "each axis needs a nonzero measure");
                }
                break;
            case levy_kind::discrete_measure:
                require(alphas.size() == dim, errc::invalid_argument,
                        "discrete model needs one index per axis");
                for (double a : alphas) check_alpha(a);
                break;
            case levy_kind::subordinate_bm:
                require(alphas.size() == dim && betas.size() == dim, errc::invalid_argument,
                        "subordinate model needs (alpha, beta) per axis");
                for (std::size_t k = 0; k < dim; ++k) {
                    check_alpha(alphas[k]);
                    require(alphas[k] + betas[k] > 0.0, errc::invalid_argument,
                            "need alpha_k + beta_k > 0 for a well-defined exponent");
                }
                break;
        }
    }
};

// ---------------------------------------------------------------------------
// Normalization constants.
// ---------------------------------------------------------------------------

// Surface area of the unit sphere S^{d-1}.
inline double sphere_surface(std::size_t d) {
    require(d >= 1, errc::invalid_argument, "sphere_surface: d >= 1");
    return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
}

// int_{S^{q-1}} |omega_1|^p dsigma(omega), the angular factor in per-axis
// moments of isotropic measures.
inline double angular_moment(double p, std::size_t q) {
    require(q >= 1 && p >= 0.0, errc::invalid_argument, "angular_moment: bad arguments");
    if (q == 1) return 2.0;  // S^0 = two points
    return 2.0 * std::pow(pi, 0.5 * (q - 1)) * std::tgamma(0.5 * (p + 1.0)) /
           std::tgamma(0.5 * (p + q));
}

// Density coefficient of the 1-d symmetric stable measure with symbol
// |xi|^alpha: nu(dz) = stable_coeff_1d(alpha) |z|^{-1-alpha} dz. The
// reflection-formula form is smooth through alpha = 1 (value 1/pi there).
inline double stable_coeff_1d(double alpha) {
    require(alpha > 0.0 && alpha < 2.0, errc::invalid_argument, "alpha must be in (0,2)");
    return std::tgamma(1.0 + alpha) * std::sin(0.5 * pi * alpha) / pi;
}

// Coefficient C(d, alpha) with nu = C |z|^{-d-alpha} dz giving symbol |xi|^alpha.
inline double isotropic_stable_coeff(std::size_t d, double alpha) {
    require(d >= 1, errc::invalid_argument, "dimension must be >= 1");
    require(alpha > 0.0 && alpha < 2.0, errc::invalid_argument, "alpha must be in (0,2)");
    return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma(0.5 * (alpha + d)) /
           (std::pow(pi, 0.5 * d) * std::tgamma(1.0 - 0.5 * alpha));
}

// ---------------------------------------------------------------------------
// Symbol evaluation.
// ---------------------------------------------------------------------------

namespace detail {

// h(x) = 1 + ix - e^{ix}, computed by series for small |x| to avoid
// cancellation (h(x) ~ x^2/2 - i x^3/6 near zero).
inline cdouble compensated_phase(double x) {
    if (std::abs(x) < 0.5) {
        const cdouble ix(0.0, x);
        cdouble term = ix * ix / 2.0;  // (ix)^2/2!
        cdouble sum = term;
        for (int k = 3; k <= 16; ++k) {
            term *= ix / static_cast<double>(k);
            sum += term;
            if (std::abs(term) < 1e-19 * (1.0 + std::abs(sum))) break;
        }
        return -sum;
    }
    return cdouble(1.0 - std::cos(x), x - std::sin(x));
}

// Truncated oscillatory tail J(x) = int_x^infty e^{iw} w^{-1-alpha} dw by
// repeated integration by parts; accurate for x >~ 100.
inline cdouble ibp_oscillatory_tail(double x, double alpha) {
    const cdouble i(0.0, 1.0);
    const cdouble eix = std::exp(i * x);
    cdouble sum = 0.0;
    cdouble pref = 1.0;
    double power = -1.0 - alpha;
    for (int k = 1; k <= 5; ++k) {
        sum += pref * i * eix * std::pow(x, power);
        pref *= -i * (static_cast<double>(k) + alpha);
        pref /= x;
        power -= 1.0;
    }
    return sum;
}

}  // namespace detail

// g_alpha(u) = int_0^1 (1 + iuz - e^{iuz}) z^{-1-alpha} dz, the per-axis symbol
// of a unit-coefficient one-sided power measure on (0,1].
//
// Strategy: the singular head [0, eps] with eps = min(1, 1/|u|) is summed as a
// power series (uniformly convergent since |u| eps <= 1); the remainder is
// regular and integrated by composite Gauss-Legendre panels sized to the
// oscillation. Beyond |u| = 1000 the full-line integral -Gamma(-alpha)(-iu)^alpha
// plus explicit [1, infinity) corrections is cheaper and accurate, except near
// the Gamma pole at alpha = 1 where the series/panel path is kept (the exact
// alpha = 1 case has its own expansion).
inline cdouble one_sided_symbol(double alpha, double u) {
    require(alpha > 0.0 && alpha < 2.0, errc::invalid_argument,
            "one_sided_symbol: alpha must be in (0,2)");
    if (u == 0.0) return 0.0;
    if (u < 0.0) return std::conj(one_sided_symbol(alpha, -u));

    const bool near_pole = alpha > 0.95 && alpha < 1.05 && alpha != 1.0;
    if (u <= 1000.0 || near_pole) {
        const double eps = std::min(1.0, 1.0 / u);
        // head: -sum_{k>=2} (iu)^k eps^{k-alpha} / (k! (k-alpha))
        const cdouble iu(0.0, u);
        cdouble term = iu * iu / 2.0;  // (iu)^2 / 2!
        double epow = std::pow(eps, 2.0 - alpha);
        cdouble head = term * epow / (2.0 - alpha);
        for (int k = 3; k <= 40; ++k) {
            term *= iu / static_cast<double>(k);
            epow *= eps;
            const cdouble add = term * epow / (static_cast<double>(k) - alpha);
            head += add;
            if (std::abs(add) < 1e-19 * (1.0 + std::abs(head))) break;
        }
        cdouble g = -head;
        if (eps < 1.0) {
            const int panels = std::max(8, static_cast<int>(std::ceil(u * (1.0 - eps) / 4.0)));
            g += panel_gl16(
                [&](double z) {
                    return detail::compensated_phase(u * z) * std::pow(z, -1.0 - alpha);
                },
                eps, 1.0, panels);
        }
        return g;
    }

    if (alpha == 1.0) {
        // Exact expansion of the alpha = 1 endpoint for large u.
        constexpr double euler_gamma = 0.57721566490153286;
        const double re = 0.5 * pi * u - 1.0 - std::sin(u) / u + 2.0 * std::cos(u) / (u * u);
        const double im = u * (std::log(u) + euler_gamma - 1.0) + std::cos(u) / u +
                          2.0 * std::sin(u) / (u * u);
        return cdouble(re, im);
    }

    const cdouble full = -std::tgamma(-alpha) * std::pow(u, alpha) *
                         std::exp(cdouble(0.0, -0.5 * pi * alpha));
    const cdouble tail = detail::ibp_oscillatory_tail(u, alpha);
    if (alpha < 1.0) return full + cdouble(0.0, u / (1.0 - alpha)) - 1.0 / alpha + tail;
    return full - 1.0 / alpha - cdouble(0.0, u / (alpha - 1.0)) + tail;
}

// Per-axis symbol of the discrete measure sum_n n^{alpha-1} delta_{1/n}:
// Psi(u) = sum_n n^{alpha-1} (1 + iu/n - e^{iu/n}). Direct summation out to
// n ~ 8u, Euler-Maclaurin beyond. Arguments needing more than 2^26 terms are
// rejected as a numeric error.
inline cdouble discrete_symbol(double alpha, double u) {
    require(alpha > 0.0 && alpha < 2.0, errc::invalid_argument,
            "discrete_symbol: alpha must be in (0,2)");
    if (u == 0.0) return 0.0;
    if (u < 0.0) return std::conj(discrete_symbol(alpha, -u));

    const double n_needed = std::max(100.0, std::ceil(8.0 * u));
    require(n_needed <= static_cast<double>(std::size_t(1) << 26), errc::numeric,
            "discrete_symbol: argument " + fmt_double(u) + " exceeds the series budget");
    const std::size_t n_terms = static_cast<std::size_t>(n_needed);
    cdouble sum = 0.0;
    for (std::size_t n = 1; n <= n_terms; ++n) {
        const double nf = static_cast<double>(n);
        sum += std::pow(nf, alpha - 1.0) * detail::compensated_phase(u / nf);
    }
    // Euler-Maclaurin tail: sum_{n>N} f(n) = int_N^inf f - f(N)/2 - f'(N)/12 + ...
    // with f(s) = s^{alpha-1} h(u/s); substituting w = u/s turns the integral
    // into u^alpha int_0^{x0} h(w) w^{-1-alpha} dw, x0 = u/N <= 1/8, which the
    // power series of h sums in a handful of terms.
    const double nd = static_cast<double>(n_terms);
    const double x0 = u / nd;
    const cdouble iunit(0.0, 1.0);
    cdouble ipow = iunit * iunit;
    double factorial = 2.0;
    double xpow = std::pow(x0, 2.0 - alpha);
    cdouble integral = ipow * xpow / (factorial * (2.0 - alpha));
    for (int k = 3; k <= 34; ++k) {
        ipow *= iunit;
        factorial *= static_cast<double>(k);
        xpow *= x0;
        const cdouble add = ipow * xpow / (factorial * (static_cast<double>(k) - alpha));
        integral += add;
        if (std::abs(add) < 1e-19 * (1.0 + std::abs(integral))) break;
    }
    const cdouble f_n = std::pow(nd, alpha - 1.0) * detail::compensated_phase(x0);
    // h'(x) = i(1 - e^{ix}) = i(2 sin^2(x/2) - i sin x)
    const cdouble h_prime = iunit * cdouble(2.0 * sq(std::sin(0.5 * x0)), -std::sin(x0));
    const cdouble fp_n = (alpha - 1.0) * std::pow(nd, alpha - 2.0) *
                             detail::compensated_phase(x0) -
                         u * std::pow(nd, alpha - 3.0) * h_prime;
    return sum - std::pow(u, alpha) * integral - 0.5 * f_n - fp_n / 12.0;
}

// Laplace exponent of the subordinate-BM kind.
inline double subordinate_bernstein(double alpha, double beta, double lambda) {
    if (lambda <= 0.0) return 0.0;
    return std::pow(lambda, 0.5 * alpha) * std::pow(std::log1p(lambda), 0.5 * beta);
}

inline cdouble symbol(const levy_model& m, const std::vector<double>& xi) {
    m.validate();
    require(xi.size() == m.dim, errc::invalid_argument, "symbol: dimension mismatch");
    switch (m.kind) {
        case levy_kind::isotropic_stable: {
            double s2 = 0.0;
            for (double x : xi) s2 += sq(x);
            return std::pow(s2, 0.5 * m.alphas[0]);
        }
        case levy_kind::component_stable: {
            double acc = 0.0;
            for (std::size_t k = 0; k < m.dim; ++k)
                acc += std::pow(std::abs(xi[k]), m.alphas[k]);
            return acc;
        }
        case levy_kind::block_stable: {
            double acc = 0.0;
            for (std::size_t j = 0; j < m.blocks.size(); ++j) {
                double s2 = 0.0;
                for (std::size_t ax : m.blocks[j]) s2 += sq(xi[ax]);
                acc += std::pow(s2, 0.5 * m.alphas[j]);
            }
            return acc;
        }
        case levy_kind::tempered_one_sided: {
            cdouble acc = 0.0;
            for (std::size_t k = 0; k < m.dim; ++k) {
                const auto& c = m.tempered[k];
                if (c.c_plus > 0.0) acc += c.c_plus * one_sided_symbol(c.alpha_plus, xi[k]);
                if (c.c_minus > 0.0)
                    acc += c.c_minus * std::conj(one_sided_symbol(c.alpha_minus, xi[k]));
                for (const auto& at : c.atoms)
                    acc += at.w * detail::compensated_phase(xi[k] * at.z);
            }
            return acc;
        }
        case levy_kind::discrete_measure: {
            cdouble acc = 0.0;
            for (std::size_t k = 0; k < m.dim; ++k) acc += discrete_symbol(m.alphas[k], xi[k]);
            return acc;
        }
        case levy_kind::subordinate_bm: {
            double acc = 0.0;
            for (std::size_t k = 0; k < m.dim; ++k)
                acc += subordinate_bernstein(m.alphas[k], m.betas[k], 0.5 * sq(xi[k]));
            return acc;
        }
    }
    fail(errc::invalid_argument, "symbol: unknown kind");
}

// ---------------------------------------------------------------------------
// Anisotropy.
// ---------------------------------------------------------------------------

struct anisotropy {
    double alpha_bar = 0.0;      // harmonic-type mean: 1/abar = (1/d) sum 1/alpha_i
    std::vector<double> a;       // a_i = abar / alpha_i, sum a_i = d
};

inline anisotropy compute_anisotropy(const std::vector<double>& axis_alphas) {
    require(!axis_alphas.empty(), errc::invalid_argument, "compute_anisotropy: empty input");
    double inv_sum = 0.0;
    for (double al : axis_alphas) {
        require(al > 0.0 && al < 2.0, errc::invalid_argument,
                "compute_anisotropy: indices must lie in (0,2)");
        inv_sum += 1.0 / al;
    }
    anisotropy out;
    out.alpha_bar = static_cast<double>(axis_alphas.size()) / inv_sum;
    out.a.resize(axis_alphas.size());
    for (std::size_t i = 0; i < axis_alphas.size(); ++i)
        out.a[i] = out.alpha_bar / axis_alphas[i];
    return out;
}

// Stability index per axis (block axes inherit the block index; one-sided
// power components report the heaviest active side).
inline std::vector<double> axis_stability_indices(const levy_model& m) {
    m.validate();
    std::vector<double> out(m.dim, 0.0);
    switch (m.kind) {
        case levy_kind::isotropic_stable:
            std::fill(out.begin(), out.end(), m.alphas[0]);
            break;
        case levy_kind::component_stable:
        case levy_kind::discrete_measure:
        case levy_kind::subordinate_bm:
            out = m.alphas;
            break;
        case levy_kind::block_stable:
            for (std::size_t j = 0; j < m.blocks.size(); ++j)
                for (std::size_t ax : m.blocks[j]) out[ax] = m.alphas[j];
            break;
        case levy_kind::tempered_one_sided:
            for (std::size_t k = 0; k < m.dim; ++k) {
                const auto& c = m.tempered[k];
                double idx = 0.0;
                if (c.c_plus > 0.0) idx = std::max(idx, c.alpha_plus);
                if (c.c_minus > 0.0) idx = std::max(idx, c.alpha_minus);
                require(idx > 0.0, errc::regime,
                        "axis " + std::to_string(k) +
                            " carries only finite mass; no stability index");
                out[k] = idx;
            }
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Moment integrals.
// ---------------------------------------------------------------------------

namespace detail {

// sum_{n >= m} n^{-s} for s > 1 (Euler-Maclaurin beyond a direct head).
inline double tail_power_sum(double s, std::size_t m) {
    require(s > 1.0, errc::regime, "tail_power_sum: divergent exponent");
    double acc = 0.0;
    std::size_t n = m;
    while (n < m + 16) {
        acc += std::pow(static_cast<double>(n), -s);
        ++n;
    }
    const double nd = static_cast<double>(n);
    acc += std::pow(nd, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(nd, -s) +
           s * std::pow(nd, -s - 1.0) / 12.0;
    return acc;
}

}  // namespace detail

// int_{|z|<=1} |z|^gamma nu(dz); requires gamma above every active stability
// index (otherwise the integral diverges and a regime error is raised).
inline double small_jump_moment(const levy_model& m, double gamma) {
    m.validate();
    require(gamma > 0.0, errc::invalid_argument, "small_jump_moment: gamma must be > 0");
    auto check = [&](double alpha) {
        require(gamma > alpha, errc::regime,
                "small_jump_moment: diverges, needs gamma > " + fmt_double(alpha));
    };
    switch (m.kind) {
        case levy_kind::isotropic_stable:
            check(m.alphas[0]);
            return isotropic_stable_coeff(m.dim, m.alphas[0]) * sphere_surface(m.dim) /
                   (gamma - m.alphas[0]);
        case levy_kind::component_stable: {
            double acc = 0.0;
            for (double al : m.alphas) {
                check(al);
                acc += 2.0 * stable_coeff_1d(al) / (gamma - al);
            }
            return acc;
        }
        case levy_kind::block_stable: {
            double acc = 0.0;
            for (std::size_t j = 0; j < m.blocks.size(); ++j) {
                check(m.alphas[j]);
                const std::size_t q = m.blocks[j].size();
                acc += isotropic_stable_coeff(q, m.alphas[j]) * sphere_surface(q) /
                       (gamma - m.alphas[j]);
            }
            return acc;
        }
        case levy_kind::tempered_one_sided: {
            double acc = 0.0;
            for (const auto& c : m.tempered) {
                if (c.c_plus > 0.0) {
                    check(c.alpha_plus);
                    acc += c.c_plus / (gamma - c.alpha_plus);
                }
                if (c.c_minus > 0.0) {
                    check(c.alpha_minus);
                    acc += c.c_minus / (gamma - c.alpha_minus);
                }
                for (const auto& at : c.atoms) acc += at.w * std::pow(std::abs(at.z), gamma);
            }
            return acc;
        }
        case levy_kind::discrete_measure: {
            double acc = 0.0;
            for (double al : m.alphas) {
                check(al);
                acc += std::riemann_zeta(gamma + 1.0 - al);
            }
            return acc;
        }
        case levy_kind::subordinate_bm:
            fail(errc::regime, "small_jump_moment: subordinate kind is analysis-only");
    }
    fail(errc::invalid_argument, "small_jump_moment: unknown kind");
}

// int_{|z|>1} |z|^delta nu(dz); requires delta below every active stability
// index. Kinds supported on [-1,1] have no big jumps at all.
inline double big_jump_moment(const levy_model& m, double delta) {
    m.validate();
    require(delta > 0.0, errc::invalid_argument, "big_jump_moment: delta must be > 0");
    auto check = [&](double alpha) {
        require(delta < alpha, errc::regime,
                "big_jump_moment: diverges, needs delta < " + fmt_double(alpha));
    };
    switch (m.kind) {
        case levy_kind::isotropic_stable:
            check(m.alphas[0]);
            return isotropic_stable_coeff(m.dim, m.alphas[0]) * sphere_surface(m.dim) /
                   (m.alphas[0] - delta);
        case levy_kind::component_stable: {
            double acc = 0.0;
            for (double al : m.alphas) {
                check(al);
                acc += 2.0 * stable_coeff_1d(al) / (al - delta);
            }
            return acc;
        }
        case levy_kind::block_stable: {
            double acc = 0.0;
            for (std::size_t j = 0; j < m.blocks.size(); ++j) {
                check(m.alphas[j]);
                const std::size_t q = m.blocks[j].size();
                acc += isotropic_stable_coeff(q, m.alphas[j]) * sphere_surface(q) /
                       (m.alphas[j] - delta);
            }
            return acc;
        }
        case levy_kind::tempered_one_sided:
        case levy_kind::discrete_measure:
            return 0.0;  // supported inside the unit ball
        case levy_kind::subordinate_bm:
            fail(errc::regime, "big_jump_moment: subordinate kind is analysis-only");
    }
    fail(errc::invalid_argument, "big_jump_moment: unknown kind");
}

// Per-axis small moment int_{|z|<=1} |z_k|^gamma nu(dz) (diagonal hypotheses).
inline double small_jump_moment_axis(const levy_model& m, std::size_t axis, double gamma) {
    m.validate();
    require(axis < m.dim, errc::invalid_argument, "axis out of range");
    require(gamma > 0.0, errc::invalid_argument, "gamma must be > 0");
    switch (m.kind) {
        case levy_kind::isotropic_stable: {
            const double al = m.alphas[0];
            require(gamma > al, errc::regime, "diverges, needs gamma > " + fmt_double(al));
            return isotropic_stable_coeff(m.dim, al) * angular_moment(gamma, m.dim) /
                   (gamma - al);
        }
        case levy_kind::component_stable: {
            const double al = m.alphas[axis];
            require(gamma > al, errc::regime, "diverges, needs gamma > " + fmt_double(al));
            return 2.0 * stable_coeff_1d(al) / (gamma - al);
        }
        case levy_kind::block_stable: {
            for (std::size_t j = 0; j < m.blocks.size(); ++j) {
                const auto& b = m.blocks[j];
                if (std::find(b.begin(), b.end(), axis) == b.end()) continue;
                const double al = m.alphas[j];
                require(gamma > al, errc::regime, "diverges, needs gamma > " + fmt_double(al));
                return isotropic_stable_coeff(b.size(), al) * angular_moment(gamma, b.size()) /
                       (gamma - al);
            }
            fail(errc::invalid_argument, "axis not covered by any block");
        }
        case levy_kind::tempered_one_sided: {
            const auto& c = m.tempered[axis];
            double acc = 0.0;
            if (c.c_plus > 0.0) {
                require(gamma > c.alpha_plus, errc::regime, "diverges on the plus side");
                acc += c.c_plus / (gamma - c.alpha_plus);
            }
            if (c.c_minus > 0.0) {
                require(gamma > c.alpha_minus, errc::regime, "diverges on the minus side");
                acc += c.c_minus / (gamma - c.alpha_minus);
            }
            for (const auto& at : c.atoms) acc += at.w * std::pow(std::abs(at.z), gamma);
            return acc;
        }
        case levy_kind::discrete_measure: {
            const double al = m.alphas[axis];
            require(gamma > al, errc::regime, "diverges, needs gamma > " + fmt_double(al));
            return std::riemann_zeta(gamma + 1.0 - al);
        }
        case levy_kind::subordinate_bm:
            fail(errc::regime, "subordinate kind is analysis-only");
    }
    fail(errc::invalid_argument, "unknown kind");
}

// ---------------------------------------------------------------------------
// Small-jump analytics used by the compensated samplers and schemes.
// ---------------------------------------------------------------------------

// A_k = int_{|z|<=1} z_k nu(dz). Symmetric kinds give zero; one-sided power
// tails need their index below 1.
inline std::vector<double> small_jump_mean(const levy_model& m) {
    m.validate();
    std::vector<double> a(m.dim, 0.0);
    switch (m.kind) {
        case levy_kind::isotropic_stable:
        case levy_kind::component_stable:
        case levy_kind::block_stable:
        case levy_kind::subordinate_bm:
            return a;
        case levy_kind::tempered_one_sided:
            for (std::size_t k = 0; k < m.dim; ++k) {
                const auto& c = m.tempered[k];
                if (c.c_plus > 0.0) {
                    require(c.alpha_plus < 1.0, errc::regime,
                            "small_jump_mean: diverges for alpha_plus >= 1");
                    a[k] += c.c_plus / (1.0 - c.alpha_plus);
                }
                if (c.c_minus > 0.0) {
                    require(c.alpha_minus < 1.0, errc::regime,
                            "small_jump_mean: diverges for alpha_minus >= 1");
                    a[k] -= c.c_minus / (1.0 - c.alpha_minus);
                }
                for (const auto& at : c.atoms) a[k] += at.w * at.z;
            }
            return a;
        case levy_kind::discrete_measure:
            for (std::size_t k = 0; k < m.dim; ++k) {
                require(m.alphas[k] < 1.0, errc::regime,
                        "small_jump_mean: diverges for alpha >= 1");
                a[k] = std::riemann_zeta(2.0 - m.alphas[k]);
            }
            return a;
    }
    fail(errc::invalid_argument, "unknown kind");
}

// A_k restricted to cutoff < |z| <= 1 (finite for every index; this is the
// compensator a truncated sampler actually realizes).
inline std::vector<double> small_jump_mean_above(const levy_model& m, double cutoff) {
    m.validate();
    require(cutoff > 0.0 && cutoff < 1.0, errc::invalid_argument,
            "small_jump_mean_above: cutoff must be in (0,1)");
    std::vector<double> a(m.dim, 0.0);
    auto one_side = [&](double alpha) {
        if (alpha == 1.0) return std::log(1.0 / cutoff);
        return (1.0 - std::pow(cutoff, 1.0 - alpha)) / (1.0 - alpha);
    };
    switch (m.kind) {
        case levy_kind::isotropic_stable:
        case levy_kind::component_stable:
        case levy_kind::block_stable:
        case levy_kind::subordinate_bm:
            return a;
        case levy_kind::tempered_one_sided:
            for (std::size_t k = 0; k < m.dim; ++k) {
                const auto& c = m.tempered[k];
                if (c.c_plus > 0.0) a[k] += c.c_plus * one_side(c.alpha_plus);
                if (c.c_minus > 0.0) a[k] -= c.c_minus * one_side(c.alpha_minus);
                for (const auto& at : c.atoms)
                    if (std::abs(at.z) > cutoff) a[k] += at.w * at.z;
            }
            return a;
        case levy_kind::discrete_measure:
            for (std::size_t k = 0; k < m.dim; ++k) {
                // jumps 1/n with 1/n > cutoff
                const auto n_max = static_cast<std::size_t>(std::ceil(1.0 / cutoff)) - 1;
                double acc = 0.0;
                for (std::size_t n = 1; n <= n_max; ++n)
                    acc += std::pow(static_cast<double>(n), m.alphas[k] - 2.0);
                a[k] = acc;
            }
            return a;
    }
    fail(errc::invalid_argument, "unknown kind");
}

// Per-axis variance of the discarded part, int_{|z|<=cutoff} z_k^2 nu(dz).
inline std::vector<double> small_jump_variance_below(const levy_model& m, double cutoff) {
    m.validate();
    require(cutoff > 0.0 && cutoff <= 1.0, errc::invalid_argument,
            "small_jump_variance_below: cutoff must be in (0,1]");
    std::vector<double> v(m.dim, 0.0);
    switch (m.kind) {
        case levy_kind::isotropic_stable: {
            const double al = m.alphas[0];
            const double total = isotropic_stable_coeff(m.dim, al) * sphere_surface(m.dim) *
                                 std::pow(cutoff, 2.0 - al) / (2.0 - al);
            std::fill(v.begin(), v.end(), total / static_cast<double>(m.dim));
            return v;
        }
        case levy_kind::component_stable:
            for (std::size_t k = 0; k < m.dim; ++k)
                v[k] = 2.0 * stable_coeff_1d(m.alphas[k]) *
                       std::pow(cutoff, 2.0 - m.alphas[k]) / (2.0 - m.alphas[k]);
            return v;
        case levy_kind::block_stable:
            for (std::size_t j = 0; j < m.blocks.size(); ++j) {
                const std::size_t q = m.blocks[j].size();
                const double al = m.alphas[j];
                const double total = isotropic_stable_coeff(q, al) * sphere_surface(q) *
                                     std::pow(cutoff, 2.0 - al) / (2.0 - al);
                for (std::size_t ax : m.blocks[j]) v[ax] = total / static_cast<double>(q);
            }
            return v;
        case levy_kind::tempered_one_sided:
            for (std::size_t k = 0; k < m.dim; ++k) {
                const auto& c = m.tempered[k];
                if (c.c_plus > 0.0)
                    v[k] += c.c_plus * std::pow(cutoff, 2.0 - c.alpha_plus) / (2.0 - c.alpha_plus);
                if (c.c_minus > 0.0)
                    v[k] +=
                        c.c_minus * std::pow(cutoff, 2.0 - c.alpha_minus) / (2.0 - c.alpha_minus);
                for (const auto& at : c.atoms)
                    if (std::abs(at.z) <= cutoff) v[k] += at.w * sq(at.z);
            }
            return v;
        case levy_kind::discrete_measure:
            for (std::size_t k = 0; k < m.dim; ++k) {
                // jumps 1/n with 1/n <= cutoff, i.e. n >= 1/cutoff
                const auto n_min =
                    static_cast<std::size_t>(std::max(1.0, std::ceil(1.0 / cutoff)));
                v[k] = detail::tail_power_sum(3.0 - m.alphas[k], n_min);
            }
            return v;
        case levy_kind::subordinate_bm:
            fail(errc::regime, "small_jump_variance_below: subordinate kind is analysis-only");
    }
    fail(errc::invalid_argument, "unknown kind");
}

// ---------------------------------------------------------------------------
// Smoothing scale: delta(eta) = sup_{|xi| <= eta} Re Psi(xi) and its inverse
// Xi(t) = delta^{-1}(1/t).
// ---------------------------------------------------------------------------

namespace detail {

// Maximize sum_j x_j^{p_j} with p_j in (0,1), x_j >= 0, sum x_j = budget.
// Concave separable problem; the KKT system x_j = (p_j/mu)^{1/(1-p_j)} is
// solved by bisection on the multiplier.
inline double concave_allocation_max(const std::vector<double>& p, double budget) {
    if (p.size() == 1) return std::pow(budget, p[0]);
    auto total_x = [&](double log_mu) {
        double s = 0.0;
        for (double pj : p) s += std::exp((std::log(pj) - log_mu) / (1.0 - pj));
        return s;
    };
    double lo = -700.0, hi = 700.0;  // log mu; total_x is decreasing in mu
    require(total_x(lo) >= budget && total_x(hi) <= budget, errc::numeric,
            "allocation multiplier not bracketed");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (total_x(mid) > budget ? lo : hi) = mid;
    }
    const double log_mu = 0.5 * (lo + hi);
    double val = 0.0;
    for (double pj : p) val += std::pow(std::exp((std::log(pj) - log_mu) / (1.0 - pj)), pj);
    return val;
}

// sup over [0, eta] of an eventually-growing but possibly rippled function:
// geometric/linear scan plus golden-section refinement of the best bracket.
template <typename F>
double scan_sup(F&& f, double eta) {
    const int n = 512;
    double best = f(eta), best_u = eta;
    for (int i = 0; i < n; ++i) {
        const double u = eta * (static_cast<double>(i) + 0.5) / n;
        const double v = f(u);
        if (v > best) {
            best = v;
            best_u = u;
        }
    }
    double lo = std::max(0.0, best_u - eta / n), hi = std::min(eta, best_u + eta / n);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = f(d);
        } else {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = f(c);
        }
    }
    return std::max(best, std::max(fc, fd));
}

}  // namespace detail

inline double smoothing_delta(const levy_model& m, double eta) {
    m.validate();
    require(eta > 0.0 && finite(eta), errc::invalid_argument, "smoothing_delta: eta must be > 0");
    switch (m.kind) {
        case levy_kind::isotropic_stable:
            return std::pow(eta, m.alphas[0]);
        case levy_kind::component_stable: {
            // maximize sum |xi_k|^{alpha_k} over the sphere: x_k = xi_k^2
            std::vector<double> p(m.dim);
            for (std::size_t k = 0; k < m.dim; ++k) p[k] = 0.5 * m.alphas[k];
            return detail::concave_allocation_max(p, sq(eta));
        }
        case levy_kind::block_stable: {
            std::vector<double> p(m.blocks.size());
            for (std::size_t j = 0; j < m.blocks.size(); ++j) p[j] = 0.5 * m.alphas[j];
            return detail::concave_allocation_max(p, sq(eta));
        }
        case levy_kind::subordinate_bm: {
            // each axis term is increasing in xi_k^2; allocate the budget by
            // golden scan for d = 1, otherwise coordinate-exchange refinement.
            if (m.dim == 1)
                return subordinate_bernstein(m.alphas[0], m.betas[0], 0.5 * sq(eta));
            // start from equal split, improve by pairwise transfers
            std::vector<double> s(m.dim, sq(eta) / static_cast<double>(m.dim));
            auto value = [&](const std::vector<double>& share) {
                double acc = 0.0;
                for (std::size_t k = 0; k < m.dim; ++k)
                    acc += subordinate_bernstein(m.alphas[k], m.betas[k], 0.5 * share[k]);
                return acc;
            };
            double cur = value(s);
            for (int sweep = 0; sweep < 200; ++sweep) {
                bool improved = false;
                for (std::size_t i = 0; i < m.dim; ++i)
                    for (std::size_t j = 0; j < m.dim; ++j) {
                        if (i == j) continue;
                        for (double frac : {0.5, 0.25, 0.1, 0.02}) {
                            const double move = frac * s[i];
                            if (move <= 0.0) continue;
                            std::vector<double> cand = s;
                            cand[i] -= move;
                            cand[j] += move;
                            const double v = value(cand);
                            if (v > cur * (1.0 + 1e-12)) {
                                s = std::move(cand);
                                cur = v;
                                improved = true;
                            }
                        }
                    }
                if (!improved) break;
            }
            return cur;
        }
        case levy_kind::tempered_one_sided:
        case levy_kind::discrete_measure: {
            // separable in the axes with each per-axis Re term maximized over
            // |xi_k| <= r_k; Re is dominated-increasing so for d = 1 a scan
            // suffices, and multi-d mass concentrates on the best single axis
            // vs the equal split, both of which are checked.
            auto axis_sup = [&](std::size_t k, double r) {
                if (r <= 0.0) return 0.0;
                return detail::scan_sup(
                    [&](double u) {
                        std::vector<double> xi(m.dim, 0.0);
                        xi[k] = u;
                        return symbol(m, xi).real();
                    },
                    r);
            };
            if (m.dim == 1) return axis_sup(0, eta);
            double best = 0.0;
            for (std::size_t k = 0; k < m.dim; ++k) best = std::max(best, axis_sup(k, eta));
            double equal = 0.0;
            const double r = eta / std::sqrt(static_cast<double>(m.dim));
            for (std::size_t k = 0; k < m.dim; ++k) equal += axis_sup(k, r);
            return std::max(best, equal);
        }
    }
    fail(errc::invalid_argument, "unknown kind");
}

// Xi(t) = inf { eta : delta(eta) >= 1/t }, by geometric bracketing + bisection.
inline double smoothing_scale_xi(const levy_model& m, double t) {
    require(t > 0.0 && finite(t), errc::invalid_argument, "smoothing_scale_xi: t must be > 0");
    const double target = 1.0 / t;
    double lo = 1e-12, hi = 1e-12;
    require(smoothing_delta(m, lo) <= target, errc::numeric,
            "smoothing_scale_xi: scale below search floor 1e-12");
    for (;;) {
        hi *= 4.0;
        if (smoothing_delta(m, hi) >= target) break;
        if (hi > 1e12)
            fail(errc::numeric,
                 "smoothing_scale_xi: search unbounded, sup of the symbol stays below " +
                     fmt_double(target) + " out to 1e12 (finite-mass measure?)");
    }
    return bisect_increasing([&](double eta) { return smoothing_delta(m, eta); }, hi / 4.0, hi,
                             target, 1e-6);
}

}  // namespace anisolevy
