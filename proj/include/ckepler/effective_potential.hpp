/**
 * @brief The reduced radial problem: W_k(r) = -k/Tan_k(r) + J^2 / (2 Sin_k(r)^2).
 *
 * Critical point, turning points, landmark energies and the qualitative
 * classification of Kepler orbits for all three signs of the curvature.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ckepler/errors.hpp"
#include "ckepler/geometry.hpp"
#include "ckepler/kappa_trig.hpp"

namespace ckepler {

/// Relative width of the band treated as lying exactly on a class boundary.
inline constexpr double boundary_band = 1e-10;

inline double w_eff(Curvature kappa, double k, double j, double r) {
    require_radius(kappa, r);
    if (r == 0.0) throw SingularityError("w_eff: centrifugal barrier diverges at r = 0");
    const double u = cot_k(kappa, r);
    const double s = sin_k(kappa, r);
    return -k * u + 0.5 * j * j / (s * s);
}

/// dW/dr = k/Sin^2 - J^2 Cos/Sin^3.
inline double w_eff_derivative(Curvature kappa, double k, double j, double r) {
    require_radius(kappa, r);
    if (r == 0.0) throw SingularityError("w_eff_derivative: singular at r = 0");
    const double s = sin_k(kappa, r);
    const double u = cot_k(kappa, r);
    return (k - j * j * u) / (s * s);
}

/// Energy of the circular orbit with angular momentum j: (kappa J^2 - k^2/J^2)/2.
inline double circular_energy(Curvature kappa, double k, double j) {
    return 0.5 * (kappa.value() * j * j - k * k / (j * j));
}

/// Limit of W at r -> infinity on the hyperbolic plane, -k sqrt(-kappa).
inline std::optional<double> energy_at_infinity(Curvature kappa, double k) {
    if (kappa.value() >= 0) return std::nullopt;
    return -k * kappa.root();
}

/// Angular momentum above which the hyperbolic well disappears, J^2 = k / sqrt(-kappa).
inline std::optional<double> j_infinity(Curvature kappa, double k) {
    if (kappa.value() >= 0) return std::nullopt;
    return std::sqrt(k / kappa.root());
}

/// e_k = sqrt(1 + 2 J^2 E_P / k^2), E_P = E - kappa J^2 / 2. Clamped at 0 for
/// round-off below the circular energy.
inline double eccentricity(Curvature kappa, double k, double j, double e) {
    const double e_p = e - 0.5 * kappa.value() * j * j;
    const double one_plus_z = 1.0 + 2.0 * j * j * e_p / (k * k);
    return std::sqrt(std::max(0.0, one_plus_z));
}

struct CriticalPoint {
    double radius = 0.0;
    double value = 0.0;
};

enum class NoMinimumReason { none, zero_angular_momentum, beyond_saturation };

struct CriticalPointResult {
    std::optional<CriticalPoint> point;
    NoMinimumReason reason = NoMinimumReason::none;

    explicit operator bool() const { return point.has_value(); }
};

/// Minimum of W: Tan_k(r) = J^2/k, W = (kappa J^2 - k^2/J^2)/2. On the hyperbolic
/// plane it exists only while sqrt(-kappa) J^2 / k < 1.
inline CriticalPointResult critical_point(Curvature kappa, double k, double j) {
    if (j == 0.0) return {std::nullopt, NoMinimumReason::zero_angular_momentum};
    const double d = j * j / k;
    if (kappa.value() < 0 && kappa.root() * d >= 1.0) return {std::nullopt, NoMinimumReason::beyond_saturation};
    return {CriticalPoint{atan_k(kappa, d), circular_energy(kappa, k, j)}, NoMinimumReason::none};
}

struct TurningPoint {
    double radius = 0.0;
    int multiplicity = 1;
};

namespace detail {

// Bisection down to adjacent doubles on a bracket where g changes sign.
template <class G>
double bisect_root(const G& g, double a, double b) {
    double ga = g(a);
    for (int it = 0; it < 2000; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double gm = g(m);
        if (gm == 0.0) return m;
        if ((gm < 0) == (ga < 0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return std::abs(g(a)) <= std::abs(g(b)) ? a : b;
}

// Nodes on [a, b], geometrically clustered toward both ends.
inline std::vector<double> scan_grid(double a, double b, int n) {
    std::vector<double> nodes;
    nodes.reserve(static_cast<std::size_t>(n));
    const double len = b - a;
    const int half = n / 2;
    const double floor_frac = 1e-12;
    for (int i = 0; i < half; ++i) {
        const double f = std::pow(floor_frac, 1.0 - double(i) / half) * 0.5;
        nodes.push_back(a + f * len);
    }
    for (int i = half - 1; i >= 0; --i) {
        const double f = std::pow(floor_frac, 1.0 - double(i) / half) * 0.5;
        nodes.push_back(b - f * len);
    }
    nodes.front() = a;
    nodes.back() = b;
    std::sort(nodes.begin(), nodes.end());
    return nodes;
}

template <class G>
std::optional<double> scan_and_bisect(const G& g, double a, double b, int nodes) {
    const auto grid = scan_grid(a, b, nodes);
    double prev = grid.front();
    double gp = g(prev);
    if (gp == 0.0) return prev;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double x = grid[i];
        if (x <= prev) continue;
        const double gx = g(x);
        if (gx == 0.0) return x;
        if ((gx < 0) != (gp < 0)) return bisect_root(g, prev, x);
        prev = x;
        gp = gx;
    }
    return std::nullopt;
}

}  // namespace detail

/**
 * All radii in the valid range where W_k(r) = e, sorted. A tangency with the
 * potential minimum is reported once with multiplicity 2. Roots at infinity
 * (e equal to the asymptotic value of W) are not reported.
 */
inline std::vector<TurningPoint> turning_points(Curvature kappa, double k, double j, double e) {
    if (!std::isfinite(k) || !std::isfinite(j) || !std::isfinite(e))
        throw DomainError("turning_points: non-finite input");
    auto g = [&](double r) { return w_eff(kappa, k, j, r) - e; };
    const double tol = 1e-11 * std::max(1.0, std::abs(e));
    const double limit = kappa.radial_limit();
    const int nodes = 256;

    const double length_scale = j != 0.0 ? std::max(j * j / k, 1e-300) : (kappa.value() != 0 ? 1.0 / kappa.root() : 1.0);
    double r_lo = kappa.value() > 0 ? std::min(1e-3 * length_scale, 0.25 * limit) : 1e-3 * length_scale;
    // Inner end: W - e is positive (J != 0) or negative (J = 0) close enough to r = 0.
    for (int it = 0; it < 2000; ++it) {
        const double gv = g(r_lo);
        if ((j != 0.0 && gv > 0) || (j == 0.0 && gv < 0)) break;
        r_lo *= 0.5;
    }

    double r_hi;
    if (kappa.value() > 0) {
        double gap = 0.25 * limit;
        r_hi = limit - gap;
        for (int it = 0; it < 2000 && g(r_hi) <= 0; ++it) {
            gap *= 0.5;
            r_hi = limit - gap;
        }
    } else {
        const double w_inf = kappa.value() < 0 ? -k * kappa.root() : 0.0;
        r_hi = std::max(4.0 * r_lo, 4.0 * length_scale);
        if (const auto cp = critical_point(kappa, k, j); cp.point) r_hi = std::max(r_hi, 2.0 * cp.point->radius);
        for (int it = 0; it < 1100; ++it) {
            const double gv = g(r_hi);
            if (e < w_inf ? gv > 0 : gv < 0) break;
            r_hi *= 2.0;
            if (!std::isfinite(r_hi)) break;
        }
        if (!std::isfinite(r_hi)) r_hi = std::numeric_limits<double>::max();
    }

    std::vector<TurningPoint> roots;
    const CriticalPointResult cp = critical_point(kappa, k, j);
    if (cp.point && cp.point->radius > r_lo && cp.point->radius < r_hi) {
        const double rc = cp.point->radius;
        const double gc = g(rc);
        if (std::abs(gc) <= tol) return {TurningPoint{rc, 2}};
        if (gc > 0) return {};
        if (auto r1 = detail::scan_and_bisect(g, r_lo, rc, nodes)) roots.push_back({*r1, 1});
        if (auto r2 = detail::scan_and_bisect(g, rc, r_hi, nodes)) roots.push_back({*r2, 1});
    } else if (auto r1 = detail::scan_and_bisect(g, r_lo, r_hi, nodes)) {
        roots.push_back({*r1, 1});
    }
    return roots;
}

/// Qualitative summary of W_k for fixed (kappa, k, J).
struct PotentialProfile {
    std::optional<double> critical_radius;
    std::optional<double> critical_value;
    std::vector<double> zero_crossings;
    std::optional<double> e_cir;
    std::optional<double> e_infinity;
    std::optional<double> j_infinity;
};

inline PotentialProfile potential_profile(Curvature kappa, double k, double j) {
    PotentialProfile p;
    const CriticalPointResult cp = critical_point(kappa, k, j);
    if (cp.point) {
        p.critical_radius = cp.point->radius;
        p.critical_value = cp.point->value;
        p.e_cir = cp.point->value;
    }
    for (const auto& tp : turning_points(kappa, k, j, 0.0))
        for (int m = 0; m < tp.multiplicity; ++m) p.zero_crossings.push_back(tp.radius);
    p.e_infinity = energy_at_infinity(kappa, k);
    p.j_infinity = ckepler::j_infinity(kappa, k);
    return p;
}

enum class OrbitLabel {
    circle,
    spherical_ellipse_sub,
    spherical_ellipse_equatorial,
    spherical_ellipse_super,
    hyp_circle,
    hyp_ellipse,
    hyp_horoellipse,
    hyp_open,
    flat_ellipse,
    flat_parabola,
    flat_hyperbola,
    radial_collision,
};

inline const char* to_string(OrbitLabel l) {
    switch (l) {
        case OrbitLabel::circle: return "circle";
        case OrbitLabel::spherical_ellipse_sub: return "spherical_ellipse_sub";
        case OrbitLabel::spherical_ellipse_equatorial: return "spherical_ellipse_equatorial";
        case OrbitLabel::spherical_ellipse_super: return "spherical_ellipse_super";
        case OrbitLabel::hyp_circle: return "hyp_circle";
        case OrbitLabel::hyp_ellipse: return "hyp_ellipse";
        case OrbitLabel::hyp_horoellipse: return "hyp_horoellipse";
        case OrbitLabel::hyp_open: return "hyp_open";
        case OrbitLabel::flat_ellipse: return "flat_ellipse";
        case OrbitLabel::flat_parabola: return "flat_parabola";
        case OrbitLabel::flat_hyperbola: return "flat_hyperbola";
        case OrbitLabel::radial_collision: return "radial_collision";
    }
    return "?";
}

inline std::optional<OrbitLabel> orbit_label_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(OrbitLabel::radial_collision); ++i) {
        const auto l = static_cast<OrbitLabel>(i);
        if (s == to_string(l)) return l;
    }
    return std::nullopt;
}

/// Closed (periodic) orbits.
inline bool is_bounded(OrbitLabel l) {
    switch (l) {
        case OrbitLabel::circle:
        case OrbitLabel::spherical_ellipse_sub:
        case OrbitLabel::spherical_ellipse_equatorial:
        case OrbitLabel::spherical_ellipse_super:
        case OrbitLabel::hyp_circle:
        case OrbitLabel::hyp_ellipse:
        case OrbitLabel::flat_ellipse:
            return true;
        default:
            return false;
    }
}

struct OrbitClass {
    OrbitLabel label = OrbitLabel::circle;
    bool bounded = true;
};

namespace detail {
inline bool on_boundary(double value, double threshold) {
    return std::abs(value - threshold) <= boundary_band * std::max(1.0, std::abs(threshold));
}
}  // namespace detail

/**
 * Classify the Kepler orbit with energy e and angular momentum j from the
 * landmark energies alone. Throws InfeasibleError when no radius has
 * W_k(r) <= e.
 */
inline OrbitClass classify_orbit(Curvature kappa, double k, double j, double e) {
    if (!(k > 0) || !std::isfinite(j) || !std::isfinite(e)) throw DomainError("classify_orbit: invalid input");
    auto make = [](OrbitLabel l) { return OrbitClass{l, is_bounded(l)}; };

    // Without a centrifugal barrier every energy is attainable and the motion ends at r = 0.
    if (j == 0.0) return make(OrbitLabel::radial_collision);

    const CriticalPointResult cp = critical_point(kappa, k, j);
    if (cp.point) {
        const double e_cir = cp.point->value;
        if (detail::on_boundary(e, e_cir))
            return make(kappa.value() < 0 ? OrbitLabel::hyp_circle : OrbitLabel::circle);
        if (e < e_cir) throw InfeasibleError("energy below the minimum of the effective potential");
    } else {
        // Hyperbolic plane with J >= J_infinity: W decreases monotonically to -k sqrt(-kappa).
        const double e_inf = -k * kappa.root();
        if (e <= e_inf && !detail::on_boundary(e, e_inf))
            throw InfeasibleError("energy below the asymptote of a monotone effective potential");
        return make(OrbitLabel::hyp_open);
    }

    switch (kappa.regime()) {
        case Regime::spherical: {
            const double ecc = eccentricity(kappa, k, j, e);
            if (detail::on_boundary(ecc, 1.0)) return make(OrbitLabel::spherical_ellipse_equatorial);
            return make(ecc < 1.0 ? OrbitLabel::spherical_ellipse_sub : OrbitLabel::spherical_ellipse_super);
        }
        case Regime::flat:
            if (detail::on_boundary(e, 0.0)) return make(OrbitLabel::flat_parabola);
            return make(e < 0 ? OrbitLabel::flat_ellipse : OrbitLabel::flat_hyperbola);
        case Regime::hyperbolic: {
            const double e_inf = -k * kappa.root();
            if (detail::on_boundary(e, e_inf)) return make(OrbitLabel::hyp_horoellipse);
            return make(e < e_inf ? OrbitLabel::hyp_ellipse : OrbitLabel::hyp_open);
        }
    }
    return make(OrbitLabel::circle);
}

}  // namespace ckepler
