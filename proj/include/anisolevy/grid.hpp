#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "common.hpp"
#include "numeric.hpp"

namespace anisolevy {

// Uniform rectangular lattice. Node k along an axis sits at origin + k*step and
// represents the cell [x_k - step/2, x_k + step/2); integrals are Riemann sums
// over nodes times the cell volume.
struct grid_spec {
    std::vector<double> origin;
    std::vector<double> step;
    std::vector<std::size_t> shape;

    std::size_t rank() const { return shape.size(); }

    std::size_t node_count() const {
        std::size_t n = 1;
        for (auto s : shape) n *= s;
        return n;
    }

    double cell_volume() const {
        double v = 1.0;
        for (auto s : step) v *= s;
        return v;
    }

    double coord(std::size_t axis, std::size_t index) const {
        return origin[axis] + static_cast<double>(index) * step[axis];
    }

    void validate() const {
        require(!shape.empty() && origin.size() == shape.size() && step.size() == shape.size(),
                errc::invalid_argument, "grid_spec: inconsistent axis counts");
        for (std::size_t i = 0; i < shape.size(); ++i) {
            require(shape[i] >= 2, errc::invalid_argument, "grid_spec: axis needs >= 2 nodes");
            require(step[i] > 0.0 && finite(step[i]) && finite(origin[i]), errc::invalid_argument,
                    "grid_spec: bad origin/step");
        }
    }
};

struct grid_density {
    grid_spec grid;
    std::vector<double> values;
    std::map<std::string, double> meta;  // diagnostics: mass_deficit, alias_bound, ...

    double mass() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * grid.cell_volume();
    }
};

// Weighted point measure sum_j w_j * delta_{x_j}; points are row-major n x d.
struct weighted_ensemble {
    std::size_t dim = 0;
    std::vector<double> points;
    std::vector<double> weights;

    std::size_t size() const { return dim == 0 ? 0 : points.size() / dim; }

    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

inline void check_anisotropy_vector(const std::vector<double>& a) {
    require(!a.empty(), errc::invalid_argument, "anisotropy vector is empty");
    double sum = 0.0;
    for (double ai : a) {
        require(ai > 0.0 && finite(ai), errc::invalid_argument, "anisotropy entries must be > 0");
        sum += ai;
    }
    require(std::abs(sum - static_cast<double>(a.size())) < 1e-9, errc::invalid_argument,
            "anisotropy entries must sum to the dimension, got " + fmt_double(sum));
}

// Anisotropic quasi-norm |x|_a = max_i |x_i|^{1/a_i}.
inline double aniso_norm(const std::vector<double>& x, const std::vector<double>& a) {
    require(x.size() == a.size(), errc::invalid_argument, "aniso_norm: dimension mismatch");
    check_anisotropy_vector(a);
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        m = std::max(m, std::pow(std::abs(x[i]), 1.0 / a[i]));
    return m;
}

// Mollification of a weighted point measure with the anisotropic box kernel
// phi_r(x) = (2r)^{-d} prod_i 1{|x_i| < r^{a_i}}; since sum_i a_i = d the kernel
// has unit mass. Each point deposits its cell-averaged kernel, so on-grid mass
// is exact up to boundary leakage, which is checked against `max_leakage`.
// The accumulator form streams points one at a time so large ensembles never
// need to be materialized.
class mollify_accumulator {
  public:
    mollify_accumulator(double r, const std::vector<double>& a, const grid_spec& grid)
        : grid_(grid), a_(a) {
        grid_.validate();
        check_anisotropy_vector(a_);
        const std::size_t d = grid_.rank();
        require(a_.size() == d, errc::invalid_argument, "mollify: dimension mismatch");
        require(r > 0.0 && finite(r), errc::invalid_argument, "mollify: radius must be > 0");
        values_.assign(grid_.node_count(), 0.0);
        half_.resize(d);
        kernel_scale_ = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            half_[i] = std::pow(r, a_[i]);
            kernel_scale_ /= 2.0 * r;
        }
        strides_.assign(d, 1);
        for (std::size_t i = d; i-- > 1;) strides_[i - 1] = strides_[i] * grid_.shape[i];
        first_.resize(d);
        last_.resize(d);
        axis_overlap_.resize(d);
    }

    void deposit(const double* y, double w) {
        const std::size_t d = grid_.rank();
        total_weight_ += w;
        for (std::size_t i = 0; i < d; ++i) {
            const double lo = y[i] - half_[i], hi = y[i] + half_[i];
            // nodes whose cells can intersect [lo, hi)
            long long f =
                static_cast<long long>(std::floor((lo - grid_.origin[i]) / grid_.step[i] + 0.5));
            long long l =
                static_cast<long long>(std::floor((hi - grid_.origin[i]) / grid_.step[i] + 0.5));
            f = std::max(f, 0LL);
            l = std::min(l, static_cast<long long>(grid_.shape[i]) - 1);
            if (f > l) return;
            first_[i] = f;
            last_[i] = l;
            auto& ov = axis_overlap_[i];
            ov.clear();
            for (long long k = f; k <= l; ++k) {
                const double c = grid_.coord(i, static_cast<std::size_t>(k));
                const double olo = std::max(lo, c - 0.5 * grid_.step[i]);
                const double ohi = std::min(hi, c + 0.5 * grid_.step[i]);
                ov.push_back(std::max(0.0, ohi - olo));
            }
        }

        // odometer over the covered box
        std::vector<long long> idx(first_);
        for (;;) {
            double contrib = w * kernel_scale_;
            std::size_t flat = 0;
            for (std::size_t i = 0; i < d; ++i) {
                contrib *=
                    axis_overlap_[i][static_cast<std::size_t>(idx[i] - first_[i])] / grid_.step[i];
                flat += static_cast<std::size_t>(idx[i]) * strides_[i];
            }
            values_[flat] += contrib;
            std::size_t ax = d;
            while (ax-- > 0) {
                if (++idx[ax] <= last_[ax]) break;
                idx[ax] = first_[ax];
                if (ax == 0) return;
            }
        }
    }

    void deposit(const std::vector<double>& y, double w) {
        require(y.size() == grid_.rank(), errc::invalid_argument, "mollify: dimension mismatch");
        deposit(y.data(), w);
    }

    double deposited_weight() const { return total_weight_; }

    // Normalizes diagnostics and hands over the density. Leakage is the mass
    // that fell off the grid, relative to the total deposited weight.
    grid_density finish(double max_leakage = 0.02) {
        grid_density out;
        out.grid = grid_;
        out.values = std::move(values_);
        values_.clear();
        double captured = 0.0;
        for (double v : out.values) captured += v;
        captured *= out.grid.cell_volume();
        const double leakage =
            total_weight_ > 0.0 ? std::max(0.0, (total_weight_ - captured) / total_weight_) : 0.0;
        out.meta["leakage"] = leakage;
        if (leakage > max_leakage)
            fail(errc::truncation, "mollify: grid too small, leakage " + fmt_double(leakage) +
                                       " exceeds tolerance " + fmt_double(max_leakage));
        return out;
    }

  private:
    grid_spec grid_;
    std::vector<double> a_, half_;
    double kernel_scale_ = 0.0;
    double total_weight_ = 0.0;
    std::vector<std::size_t> strides_;
    std::vector<double> values_;
    // per-deposit scratch
    std::vector<long long> first_, last_;
    std::vector<std::vector<double>> axis_overlap_;
};

inline grid_density mollify(const weighted_ensemble& mu, double r, const std::vector<double>& a,
                            const grid_spec& grid, double max_leakage = 0.02) {
    require(mu.dim == grid.rank(), errc::invalid_argument, "mollify: dimension mismatch");
    require(mu.weights.size() == mu.size(), errc::invalid_argument,
            "mollify: weight count mismatch");
    mollify_accumulator acc(r, a, grid);
    const std::size_t n = mu.size();
    for (std::size_t j = 0; j < n; ++j) acc.deposit(&mu.points[j * mu.dim], mu.weights[j]);
    return acc.finish(max_leakage);
}

namespace detail {

// Applies fn(value, shifted_value) over all nodes, where the shifted value is
// f(x + h e_axis) by linear interpolation along the axis (zero outside the grid).
template <typename Fn>
void for_each_shifted(const grid_density& f, std::size_t axis, double h, Fn&& fn) {
    const auto& g = f.grid;
    const std::size_t d = g.rank();
    require(axis < d, errc::invalid_argument, "shift axis out of range");
    const double s = h / g.step[axis];
    const double fl = std::floor(s);
    const long long i0 = static_cast<long long>(fl);
    const double frac = s - fl;
    const long long len = static_cast<long long>(g.shape[axis]);

    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= g.shape[i];
    for (std::size_t i = axis + 1; i < d; ++i) inner *= g.shape[i];

    const double* v = f.values.data();
    for (std::size_t o = 0; o < outer; ++o) {
        const std::size_t base = o * static_cast<std::size_t>(len) * inner;
        for (long long t = 0; t < len; ++t) {
            const long long t1 = t + i0, t2 = t + i0 + 1;
            const bool ok1 = t1 >= 0 && t1 < len, ok2 = t2 >= 0 && t2 < len;
            const std::size_t row = base + static_cast<std::size_t>(t) * inner;
            const std::size_t row1 = base + static_cast<std::size_t>(ok1 ? t1 : 0) * inner;
            const std::size_t row2 = base + static_cast<std::size_t>(ok2 ? t2 : 0) * inner;
            const double w1 = ok1 ? 1.0 - frac : 0.0;
            const double w2 = ok2 ? frac : 0.0;
            for (std::size_t i = 0; i < inner; ++i)
                fn(v[row + i], w1 * v[row1 + i] + w2 * v[row2 + i]);
        }
    }
}

}  // namespace detail

// L1 norm of the one-direction finite difference, int |f(x + h e_axis) - f(x)| dx.
inline double l1_shift_difference(const grid_density& f, std::size_t axis, double h) {
    double acc = 0.0;
    detail::for_each_shifted(f, axis, h, [&](double v, double vs) { acc += std::abs(vs - v); });
    return acc * f.grid.cell_volume();
}

inline double sup_shift_difference(const grid_density& f, std::size_t axis, double h) {
    double acc = 0.0;
    detail::for_each_shifted(f, axis, h,
                             [&](double v, double vs) { acc = std::max(acc, std::abs(vs - v)); });
    return acc;
}

inline std::vector<double> default_shift_grid() {
    std::vector<double> h;
    for (int k = 20; k >= 0; --k) h.push_back(-std::ldexp(1.0, -k));
    for (int k = 0; k <= 20; ++k) h.push_back(std::ldexp(1.0, -k));
    return h;
}

struct directional_norm_result {
    double total = 0.0;
    double base = 0.0;                 // L1 mass (Besov) or sup norm (Hoelder-Zygmund)
    std::vector<double> axis_terms;    // sup_h |h|^{-lambda/a_k} * difference norm
    std::vector<double> argmax_shift;  // h achieving each axis supremum
};

// Anisotropic Besov-type seminorm built from one-direction L1 differences:
//   ||f||_L1 + sum_k sup_h |h|^{-lambda/a_k} ||f(. + h e_k) - f||_L1,
// with the supremum taken over the supplied shift grid in [-1, 1]. Requires
// lambda/a_k in (0, 1) for every axis.
inline directional_norm_result besov_norm(const grid_density& f, const std::vector<double>& a,
                                          double lambda,
                                          const std::vector<double>& shifts = default_shift_grid()) {
    f.grid.validate();
    check_anisotropy_vector(a);
    const std::size_t d = f.grid.rank();
    require(a.size() == d, errc::invalid_argument, "besov_norm: dimension mismatch");
    require(!shifts.empty(), errc::invalid_argument, "besov_norm: empty shift grid");
    for (std::size_t k = 0; k < d; ++k) {
        const double ratio = lambda / a[k];
        require(ratio > 0.0 && ratio < 1.0, errc::regime,
                "besov_norm: lambda/a_k must lie in (0,1), axis " + std::to_string(k) + " has " +
                    fmt_double(ratio));
    }

    directional_norm_result res;
    double l1 = 0.0;
    for (double v : f.values) l1 += std::abs(v);
    res.base = l1 * f.grid.cell_volume();
    res.total = res.base;
    res.axis_terms.assign(d, 0.0);
    res.argmax_shift.assign(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        for (double h : shifts) {
            require(h != 0.0 && std::abs(h) <= 1.0, errc::invalid_argument,
                    "besov_norm: shifts must be nonzero and in [-1,1]");
            const double term =
                std::pow(std::abs(h), -lambda / a[k]) * l1_shift_difference(f, k, h);
            if (term > res.axis_terms[k]) {
                res.axis_terms[k] = term;
                res.argmax_shift[k] = h;
            }
        }
        res.total += res.axis_terms[k];
    }
    return res;
}

// Sup-norm analogue (Hoelder-Zygmund scale): ||f||_sup + directional terms.
inline directional_norm_result holder_zygmund_norm(
    const grid_density& f, const std::vector<double>& a, double eta,
    const std::vector<double>& shifts = default_shift_grid()) {
    f.grid.validate();
    check_anisotropy_vector(a);
    const std::size_t d = f.grid.rank();
    require(a.size() == d, errc::invalid_argument, "holder_zygmund_norm: dimension mismatch");
    for (std::size_t k = 0; k < d; ++k) {
        const double ratio = eta / a[k];
        require(ratio > 0.0 && ratio < 1.0, errc::regime,
                "holder_zygmund_norm: eta/a_k must lie in (0,1), axis " + std::to_string(k) +
                    " has " + fmt_double(ratio));
    }

    directional_norm_result res;
    double sup = 0.0;
    for (double v : f.values) sup = std::max(sup, std::abs(v));
    res.base = sup;
    res.total = sup;
    res.axis_terms.assign(d, 0.0);
    res.argmax_shift.assign(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        for (double h : shifts) {
            require(h != 0.0 && std::abs(h) <= 1.0, errc::invalid_argument,
                    "holder_zygmund_norm: shifts must be nonzero and in [-1,1]");
            const double term = std::pow(std::abs(h), -eta / a[k]) * sup_shift_difference(f, k, h);
            if (term > res.axis_terms[k]) {
                res.axis_terms[k] = term;
                res.argmax_shift[k] = h;
            }
        }
        res.total += res.axis_terms[k];
    }
    return res;
}

// Rasterize a callable onto a grid (used to feed the norm routines with
// analytic test functions).
inline grid_density rasterize(const std::function<double(const std::vector<double>&)>& f,
                              const grid_spec& grid) {
    grid.validate();
    grid_density out;
    out.grid = grid;
    out.values.assign(grid.node_count(), 0.0);
    const std::size_t d = grid.rank();
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d);
    for (std::size_t flat = 0; flat < out.values.size(); ++flat) {
        for (std::size_t i = 0; i < d; ++i) x[i] = grid.coord(i, idx[i]);
        out.values[flat] = f(x);
        for (std::size_t i = d; i-- > 0;) {
            if (++idx[i] < grid.shape[i]) break;
            idx[i] = 0;
        }
    }
    return out;
}

// Tensor product of densities on disjoint coordinate blocks (outer product of
// values); axes concatenate in argument order.
inline grid_density product_density(const std::vector<const grid_density*>& factors) {
    require(!factors.empty(), errc::invalid_argument, "product_density: no factors");
    grid_density out;
    out.values = {1.0};
    for (const auto* f : factors) {
        require(f != nullptr, errc::invalid_argument, "product_density: null factor");
        f->grid.validate();
        out.grid.origin.insert(out.grid.origin.end(), f->grid.origin.begin(), f->grid.origin.end());
        out.grid.step.insert(out.grid.step.end(), f->grid.step.begin(), f->grid.step.end());
        out.grid.shape.insert(out.grid.shape.end(), f->grid.shape.begin(), f->grid.shape.end());
        std::vector<double> next(out.values.size() * f->values.size());
        std::size_t pos = 0;
        for (double left : out.values)
            for (double right : f->values) next[pos++] = left * right;
        out.values = std::move(next);
    }
    return out;
}

// Endpoint ensemble weighted by 1/|sigma(x)^{-1}|_op, i.e. the smallest
// singular value of sigma(x); singular matrices contribute weight zero.
inline weighted_ensemble weighted_endpoint_measure(
    const std::function<std::vector<double>(const std::vector<double>&)>& sigma_eval,
    const std::vector<double>& endpoints, std::size_t dim) {
    require(dim > 0 && endpoints.size() % dim == 0, errc::invalid_argument,
            "weighted_endpoint_measure: bad endpoint array");
    weighted_ensemble mu;
    mu.dim = dim;
    mu.points = endpoints;
    const std::size_t n = endpoints.size() / dim;
    mu.weights.resize(n);
    std::vector<double> x(dim);
    for (std::size_t j = 0; j < n; ++j) {
        std::copy_n(&endpoints[j * dim], dim, x.begin());
        const std::vector<double> s = sigma_eval(x);
        require(s.size() == dim * dim, errc::invalid_argument,
                "weighted_endpoint_measure: sigma evaluation must return a d x d matrix");
        mu.weights[j] = min_singular_value(s, dim);
    }
    return mu;
}

}  // namespace anisolevy
