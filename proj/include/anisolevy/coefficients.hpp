#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "common.hpp"

namespace anisolevy {

// Coefficient maps R^d -> R from small families with *declared* regularity:
// each instance knows a Hoelder exponent in (0,1], a Hoelder constant, and a
// uniform bound, so hypothesis checks can consume the declaration instead of
// estimating smoothness numerically.
enum class coefficient_family {
    constant,        // value
    affine_clamped,  // clamp(offset + slope * x_arg, [-clamp_at, clamp_at]), Lipschitz
    holder_bump,     // base + amplitude * (1 - |x_arg - center|)_+^exponent
    smooth_bounded   // offset + amplitude * sin(x_arg - center), smooth and bounded
};

struct coefficient_spec {
    coefficient_family family = coefficient_family::constant;
    std::size_t arg = 0;  // coordinate the map reads
    double value = 0.0;
    double offset = 0.0;
    double slope = 0.0;
    double clamp_at = 0.0;
    double base = 0.0;
    double amplitude = 0.0;
    double center = 0.0;
    double exponent = 1.0;

    static coefficient_spec constant(double v) {
        coefficient_spec s;
        s.family = coefficient_family::constant;
        s.value = v;
        return s;
    }

    static coefficient_spec affine_clamped(double offset, double slope, double clamp_at,
                                           std::size_t arg = 0) {
        coefficient_spec s;
        s.family = coefficient_family::affine_clamped;
        s.offset = offset;
        s.slope = slope;
        s.clamp_at = clamp_at;
        s.arg = arg;
        s.validate();
        return s;
    }

    static coefficient_spec holder_bump(double base, double amplitude, double exponent,
                                        double center = 0.0, std::size_t arg = 0) {
        coefficient_spec s;
        s.family = coefficient_family::holder_bump;
        s.base = base;
        s.amplitude = amplitude;
        s.exponent = exponent;
        s.center = center;
        s.arg = arg;
        s.validate();
        return s;
    }

    static coefficient_spec smooth_bounded(double offset, double amplitude, double center = 0.0,
                                           std::size_t arg = 0) {
        coefficient_spec s;
        s.family = coefficient_family::smooth_bounded;
        s.offset = offset;
        s.amplitude = amplitude;
        s.center = center;
        s.arg = arg;
        return s;
    }

    void validate() const {
        switch (family) {
            case coefficient_family::constant:
                break;
            case coefficient_family::affine_clamped:
                require(clamp_at > 0.0, errc::invalid_argument,
                        "affine_clamped: clamp bound must be > 0");
                break;
            case coefficient_family::holder_bump:
                require(exponent > 0.0 && exponent <= 1.0, errc::invalid_argument,
                        "holder_bump: exponent must lie in (0,1]");
                break;
            case coefficient_family::smooth_bounded:
                break;
        }
    }

    double eval(const std::vector<double>& x) const {
        switch (family) {
            case coefficient_family::constant:
                return value;
            case coefficient_family::affine_clamped: {
                require(arg < x.size(), errc::invalid_argument, "coefficient arg out of range");
                return std::clamp(offset + slope * x[arg], -clamp_at, clamp_at);
            }
            case coefficient_family::holder_bump: {
                require(arg < x.size(), errc::invalid_argument, "coefficient arg out of range");
                const double u = std::max(0.0, 1.0 - std::abs(x[arg] - center));
                return base + amplitude * std::pow(u, exponent);
            }
            case coefficient_family::smooth_bounded: {
                require(arg < x.size(), errc::invalid_argument, "coefficient arg out of range");
                return offset + amplitude * std::sin(x[arg] - center);
            }
        }
        fail(errc::invalid_argument, "unknown coefficient family");
    }

    double holder_exponent() const {
        switch (family) {
            case coefficient_family::constant: return 1.0;
            case coefficient_family::affine_clamped: return 1.0;
            case coefficient_family::holder_bump: return exponent;
            case coefficient_family::smooth_bounded: return 1.0;
        }
        fail(errc::invalid_argument, "unknown coefficient family");
    }

    double holder_constant() const {
        switch (family) {
            case coefficient_family::constant: return 0.0;
            case coefficient_family::affine_clamped: return std::abs(slope);
            case coefficient_family::holder_bump: return std::abs(amplitude);
            case coefficient_family::smooth_bounded: return std::abs(amplitude);
        }
        fail(errc::invalid_argument, "unknown coefficient family");
    }

    double bound() const {
        switch (family) {
            case coefficient_family::constant: return std::abs(value);
            case coefficient_family::affine_clamped: return clamp_at;
            case coefficient_family::holder_bump: return std::abs(base) + std::abs(amplitude);
            case coefficient_family::smooth_bounded:
                return std::abs(offset) + std::abs(amplitude);
        }
        fail(errc::invalid_argument, "unknown coefficient family");
    }
};

}  // namespace anisolevy
