/**
 * @brief Geodesic polar coordinates on the constant-curvature surfaces.
 *
 * Points are (r, phi) with r the geodesic distance from the origin. Chart
 * maps send them to the ambient models (sphere of radius 1/sqrt(kappa),
 * upper sheet of the hyperboloid, or the plane z = 0) and to the unit
 * Poincare disk.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ckepler/errors.hpp"
#include "ckepler/kappa_trig.hpp"

namespace ckepler {

struct PolarPoint {
    double r = 0.0;
    double phi = 0.0;
};

struct AmbientPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct DiskPoint {
    double x = 0.0;
    double y = 0.0;
};

/// Reduce an angle to [0, 2 pi).
inline double reduce_angle(double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::fmod(phi, two_pi);
    if (a < 0) a += two_pi;
    return a >= two_pi ? 0.0 : a;
}

/// Throws DomainError unless 0 <= r < radial_limit(kappa).
inline void require_radius(Curvature kappa, double r) {
    if (!std::isfinite(r) || r < 0.0) throw DomainError("radius must be finite and non-negative");
    if (kappa.value() > 0 && r >= kappa.radial_limit())
        throw DomainError("radius beyond the antipode of the origin");
}

inline void require_point(Curvature kappa, const PolarPoint& p) {
    require_radius(kappa, p.r);
    if (!std::isfinite(p.phi)) throw DomainError("angle must be finite");
}

/// g_phiphi = Sin_k(r)^2.
inline double metric_coefficient(Curvature kappa, double r) {
    require_radius(kappa, r);
    const double s = sin_k(kappa, r);
    return s * s;
}

/// Law of cosines in curvature kappa, evaluated in its half-angle form
///   Sin_k(d/2)^2 = Sin_k((r1-r2)/2)^2 + Sin_k(r1) Sin_k(r2) sin^2((phi1-phi2)/2)
/// which stays accurate for nearby points.
inline double geodesic_distance(Curvature kappa, const PolarPoint& p1, const PolarPoint& p2) {
    require_point(kappa, p1);
    require_point(kappa, p2);
    const double half_dr = sin_k(kappa, 0.5 * (p1.r - p2.r));
    const double half_dphi = std::sin(0.5 * (p1.phi - p2.phi));
    const double h2 = half_dr * half_dr + sin_k(kappa, p1.r) * sin_k(kappa, p2.r) * half_dphi * half_dphi;
    return 2.0 * asin_k(kappa, std::sqrt(std::max(0.0, h2)));
}

inline AmbientPoint to_ambient(Curvature kappa, const PolarPoint& p) {
    require_point(kappa, p);
    const double s = sin_k(kappa, p.r);
    if (kappa.value() == 0.0) return {p.r * std::cos(p.phi), p.r * std::sin(p.phi), 0.0};
    return {s * std::cos(p.phi), s * std::sin(p.phi), cos_k(kappa, p.r) / kappa.root()};
}

inline PolarPoint from_ambient(Curvature kappa, const AmbientPoint& a) {
    const double rho = std::hypot(a.x, a.y);
    const double phi = rho == 0.0 ? 0.0 : reduce_angle(std::atan2(a.y, a.x));
    const double kv = kappa.value();
    if (kv == 0.0) return {rho, phi};
    const double c = kappa.root();
    if (kv > 0) return {std::atan2(rho, a.z) / c, phi};
    return {std::asinh(c * rho) / c, phi};
}

/// Residual of the embedding equation: |x^2+y^2+z^2 - 1/kappa| on the sphere,
/// |z^2-x^2-y^2 - 1/(-kappa)| on the hyperboloid (and z > 0), |z| on the plane.
inline double embedding_residual(Curvature kappa, const AmbientPoint& a) {
    const double kv = kappa.value();
    if (kv == 0.0) return std::abs(a.z);
    if (kv > 0) return std::abs(a.x * a.x + a.y * a.y + a.z * a.z - 1.0 / kv);
    if (a.z <= 0) return std::numeric_limits<double>::infinity();
    return std::abs(a.z * a.z - a.x * a.x - a.y * a.y - 1.0 / (-kv));
}

/// Conformal Poincare disk of the hyperbolic plane, normalized to the unit disk
/// for every kappa < 0: radius tanh(sqrt(-kappa) r / 2), angle preserved.
inline DiskPoint to_poincare_disk(Curvature kappa, const PolarPoint& p) {
    if (kappa.value() >= 0) throw DomainError("Poincare disk chart requires kappa < 0");
    require_point(kappa, p);
    const double rho = std::tanh(0.5 * kappa.root() * p.r);
    return {rho * std::cos(p.phi), rho * std::sin(p.phi)};
}

}  // namespace ckepler
