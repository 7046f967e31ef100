#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace anisolevy {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr char version_string[] = "anisolevy 0.1.0";

// Strictness margin for the theorem inequalities: "lhs > rhs" is accepted
// only when lhs - rhs exceeds this, so boundary cases fail deterministically.
inline constexpr double strict_margin = 1e-12;

enum class errc {
    invalid_argument,  // bad parameter value or shape
    regime,            // parameters outside the regime an operation supports
    numeric,           // quadrature / root-finding / FFT accuracy failure
    truncation,        // grid or series window provably too small
    infeasible,        // no admissible choice exists (e.g. exponent derivation)
    config,            // malformed or contradictory configuration input
    io                 // filesystem failure
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
    if (!ok) fail(code, what);
}

inline double sq(double x) { return x * x; }

inline int sgn(double x) { return (x > 0.0) - (x < 0.0); }

inline bool finite(double x) { return std::isfinite(x); }

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_vec(const std::vector<double>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += fmt_double(v[i]);
    }
    return s + ")";
}

}  // namespace anisolevy
