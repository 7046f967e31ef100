#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "common.hpp"

namespace anisolevy {

// 16-point Gauss-Legendre rule on [-1, 1] (nodes/weights to full double precision).
inline constexpr std::array<double, 8> gl16_nodes = {
    0.0950125098376374402, 0.2816035507792589132, 0.4580167776572273863, 0.6178762444026437484,
    0.7554044083550030339, 0.8656312023878317439, 0.9445750230732325761, 0.9894009349916499326};
inline constexpr std::array<double, 8> gl16_weights = {
    0.1894506104550684963, 0.1826034150449235889, 0.1691565193950025382, 0.1495959888165767320,
    0.1246289712555338720, 0.0951585116824927848, 0.0622535239386478929, 0.0271524594117540949};

template <typename F>
auto gl16(F&& f, double a, double b) -> decltype(f(0.0)) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    decltype(f(0.0)) acc{};
    for (int i = 0; i < 8; ++i)
        acc += gl16_weights[i] * (f(c + h * gl16_nodes[i]) + f(c - h * gl16_nodes[i]));
    return h * acc;
}

// Composite 16-point rule over `panels` equal subintervals of [a, b].
template <typename F>
auto panel_gl16(F&& f, double a, double b, int panels) -> decltype(f(0.0)) {
    decltype(f(0.0)) acc{};
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) acc += gl16(f, a + p * h, a + (p + 1) * h);
    return acc;
}

namespace detail {

template <typename F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb, double whole,
                            double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) fail(errc::numeric, "adaptive quadrature: recursion depth exhausted");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with a Richardson acceptance test. Tolerance is
// max(abs_tol, rel_tol * |coarse estimate|).
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol = 1e-10, double rel_tol = 1e-8,
                        int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
// Good to ~1e-14 relative; intended for d <= 8.
inline std::vector<double> sym_eigenvalues(std::vector<double> a, std::size_t n) {
    require(a.size() == n * n, errc::invalid_argument, "sym_eigenvalues: bad matrix size");
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += sq(at(i, j));
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(at(p, q)) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = sgn(theta) == 0
                                     ? 1.0
                                     : sgn(theta) / (std::abs(theta) + std::sqrt(1.0 + sq(theta)));
                const double c = 1.0 / std::sqrt(1.0 + sq(t)), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Smallest singular value of a (row-major) n x n matrix, via Jacobi on A^T A.
inline double min_singular_value(const std::vector<double>& m, std::size_t n) {
    require(m.size() == n * n, errc::invalid_argument, "min_singular_value: bad matrix size");
    std::vector<double> ata(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += m[k * n + i] * m[k * n + j];
            ata[i * n + j] = s;
        }
    const double lmin = sym_eigenvalues(std::move(ata), n).front();
    return lmin <= 0.0 ? 0.0 : std::sqrt(lmin);
}

// Bisection on a monotone increasing function; brackets must satisfy f(lo) <= target <= f(hi).
template <typename F>
double bisect_increasing(F&& f, double lo, double hi, double target, double rel_tol = 1e-9,
                         int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    require(flo <= target && target <= fhi, errc::numeric, "bisection: target not bracketed");
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((hi - lo) <= rel_tol * std::max(1e-300, std::abs(mid))) return mid;
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace anisolevy
