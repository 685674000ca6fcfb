/**
 * @brief Curvature-tagged trigonometry.
 *
 * Cos_k, Sin_k and Tan_k interpolate between the circular functions (k > 0),
 * the Euclidean limit (k = 0, Cos = 1, Sin = x) and the hyperbolic functions
 * (k < 0). Every formula in the rest of the library is written once in terms
 * of these and holds for all three geometries.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "ckepler/errors.hpp"

namespace ckepler {

enum class Regime { spherical, flat, hyperbolic };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::spherical: return "spherical";
        case Regime::flat: return "flat";
        case Regime::hyperbolic: return "hyperbolic";
    }
    return "?";
}

/// Signed Gaussian curvature of the surface, units 1/length^2.
class Curvature {
public:
    constexpr Curvature() = default;
    explicit Curvature(double kappa) : kappa_(kappa) {
        if (!std::isfinite(kappa)) throw DomainError("curvature must be finite");
    }

    constexpr double value() const noexcept { return kappa_; }
    /// sqrt(|kappa|), the inverse curvature radius.
    double root() const noexcept { return std::sqrt(std::abs(kappa_)); }

    constexpr Regime regime() const noexcept {
        return kappa_ > 0 ? Regime::spherical : kappa_ < 0 ? Regime::hyperbolic : Regime::flat;
    }

    /// Upper end of the geodesic polar radius: pi/sqrt(kappa) on the sphere, +inf otherwise.
    double radial_limit() const noexcept {
        return kappa_ > 0 ? std::numbers::pi / root() : std::numeric_limits<double>::infinity();
    }

    friend constexpr bool operator==(Curvature, Curvature) = default;

private:
    double kappa_ = 0.0;
};

namespace detail {

// Below this value of |kappa| x^2 the functions are evaluated by series so the
// flat limit is reproduced exactly instead of through a 1/sqrt|kappa| rescale.
inline constexpr double series_threshold = 1e-8;

inline void require_finite(double x, const char* fn) {
    if (!std::isfinite(x)) throw DomainError(std::string(fn) + ": non-finite argument");
}

inline bool use_series(double kappa, double x) {
    return std::abs(kappa) * x * x < series_threshold;
}

// |cos| below this is treated as an exact zero of Cos_k on the sphere.
inline bool cos_vanishes(double c, double angle) {
    return std::abs(c) <= 0.5 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(angle));
}

}  // namespace detail

inline double cos_k(Curvature kappa, double x) {
    detail::require_finite(x, "cos_k");
    const double kv = kappa.value();
    if (kv == 0.0) return 1.0;
    if (detail::use_series(kv, x)) {
        const double q = kv * x * x;
        return 1.0 - q / 2.0 + q * q / 24.0;
    }
    const double s = kappa.root();
    return kv > 0 ? std::cos(s * x) : std::cosh(s * x);
}

inline double sin_k(Curvature kappa, double x) {
    detail::require_finite(x, "sin_k");
    const double kv = kappa.value();
    if (kv == 0.0) return x;
    if (detail::use_series(kv, x)) {
        const double q = kv * x * x;
        return x * (1.0 - q / 6.0 + q * q / 120.0);
    }
    const double s = kappa.root();
    return kv > 0 ? std::sin(s * x) / s : std::sinh(s * x) / s;
}

/// Sin_k / Cos_k. Throws PoleError where Cos_k vanishes (sphere only).
inline double tan_k(Curvature kappa, double x) {
    detail::require_finite(x, "tan_k");
    const double kv = kappa.value();
    if (kv > 0 && !detail::use_series(kv, x)) {
        const double s = kappa.root();
        const double c = std::cos(s * x);
        const double sn = std::sin(s * x);
        if (detail::cos_vanishes(c, s * x)) {
            const int sign = (std::signbit(c) == std::signbit(sn)) ? +1 : -1;
            throw PoleError("tan_k: pole of the curvature tangent", sign);
        }
        return sn / (s * c);
    }
    if (kv < 0 && !detail::use_series(kv, x)) return std::tanh(kappa.root() * x) / kappa.root();
    return sin_k(kappa, x) / cos_k(kappa, x);
}

/// u_k = Cos_k / Sin_k, the reciprocal radial variable of the orbit equation.
/// Regular (and exactly zero) at the equator x = pi/(2 sqrt(kappa)).
inline double cot_k(Curvature kappa, double x) {
    detail::require_finite(x, "cot_k");
    if (x == 0.0) throw SingularityError("cot_k: singular at x = 0");
    const double kv = kappa.value();
    if (kv > 0 && !detail::use_series(kv, x)) {
        const double s = kappa.root();
        const double c = std::cos(s * x);
        const double sn = std::sin(s * x);
        if (detail::cos_vanishes(c, s * x)) return 0.0;
        if (sn == 0.0) throw SingularityError("cot_k: singular at the antipode");
        return s * c / sn;
    }
    if (kv < 0 && !detail::use_series(kv, x)) return kappa.root() / std::tanh(kappa.root() * x);
    return cos_k(kappa, x) / sin_k(kappa, x);
}

/// Principal inverse of Tan_k. On the hyperbolic plane |y| must stay below 1/sqrt(-kappa).
inline double atan_k(Curvature kappa, double y) {
    detail::require_finite(y, "atan_k");
    const double kv = kappa.value();
    if (kv == 0.0) return y;
    const double s = kappa.root();
    if (kv < 0 && std::abs(s * y) >= 1.0)
        throw DomainError("atan_k: value beyond hyperbolic saturation 1/sqrt(-kappa)");
    if (detail::use_series(kv, y)) {
        const double q = kv * y * y;
        return y * (1.0 - q / 3.0 + q * q / 5.0);
    }
    return kv > 0 ? std::atan(s * y) / s : std::atanh(s * y) / s;
}

/// Principal inverse of Sin_k.
inline double asin_k(Curvature kappa, double y) {
    detail::require_finite(y, "asin_k");
    const double kv = kappa.value();
    if (kv == 0.0) return y;
    if (detail::use_series(kv, y)) {
        const double q = kv * y * y;
        return y * (1.0 + q / 6.0 + 3.0 * q * q / 40.0);
    }
    const double s = kappa.root();
    if (kv > 0) {
        const double z = s * y;
        if (std::abs(z) > 1.0) {
            if (std::abs(z) > 1.0 + 1e-12) throw DomainError("asin_k: argument beyond 1/sqrt(kappa)");
            return std::copysign(std::numbers::pi / 2.0, z) / s;
        }
        return std::asin(z) / s;
    }
    return std::asinh(s * y) / s;
}

/// Geodesic radius r in [0, radial_limit) with cot_k(r) = u. On the sphere the
/// branch is continuous through u = 0 (the equator) into the far hemisphere.
/// Empty when no point of the surface has that value of u.
inline std::optional<double> acot_k(Curvature kappa, double u) {
    detail::require_finite(u, "acot_k");
    const double kv = kappa.value();
    if (kv > 0) {
        if (u > 0 && detail::use_series(kv, 1.0 / u)) return atan_k(kappa, 1.0 / u);
        const double s = kappa.root();
        return std::atan2(s, u) / s;
    }
    if (u <= 0) return std::nullopt;
    if (kv < 0 && u <= kappa.root()) return std::nullopt;
    return atan_k(kappa, 1.0 / u);
}

}  // namespace ckepler
