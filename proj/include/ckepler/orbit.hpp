/**
 * @brief Closed-form Kepler orbits in curvature kappa.
 *
 * With u = Cos_k(r)/Sin_k(r) the orbit is u(phi) = (k/J^2)(1 + e cos(phi - phi0))
 * for every kappa, with e = sqrt(1 + 2 J^2 E_P / k^2). The time along the orbit
 * comes from quadratures of the radial energy equation.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ckepler/dynamics.hpp"
#include "ckepler/effective_potential.hpp"
#include "ckepler/errors.hpp"
#include "ckepler/kappa_trig.hpp"
#include "ckepler/ode.hpp"

namespace ckepler {

/// Orbit with J != 0 in conserved and geometric form.
struct OrbitConstants {
    ConservedSet conserved;
    double k = 1.0;
    double d = 0.0;     ///< J^2 / k
    double ecc = 0.0;   ///< e_k
    double phi0 = 0.0;  ///< periastron angle
    double z = 0.0;     ///< 2 J^2 E_P / k^2

    // Coefficients of R(u) = alpha + beta u + gamma u^2 under the orbit quadrature.
    double alpha() const { return 2.0 * conserved.e_p / (conserved.j * conserved.j); }
    double beta() const { return 2.0 * k / (conserved.j * conserved.j); }
    static constexpr double gamma() { return -1.0; }

    /// u at periastron, (1 + e)/D.
    double u_periastron() const { return (1.0 + ecc) / d; }
    /// (1 - e)/D: u at apoastron for bounded orbits, the unphysical root of R otherwise.
    double u_apoastron() const { return (1.0 - ecc) / d; }
};

class RadialOrbitError : public DomainError {
public:
    using DomainError::DomainError;
};

/**
 * Conserved quantities and orbit geometry from an initial state. The
 * periastron angle comes from the Runge-Lenz components,
 * e k (cos phi0, sin phi0) = (I3, -I4), which keeps the sign of v_r.
 */
inline OrbitConstants orbit_constants(const PhaseState& x, const KeplerParams& params) {
    const ConservedSet cs = conserved_set(x, params);
    if (cs.j == 0.0) throw RadialOrbitError("orbit_constants: J = 0 is a radial orbit");
    OrbitConstants oc;
    oc.conserved = cs;
    oc.k = params.k;
    oc.d = cs.j * cs.j / params.k;
    oc.z = 2.0 * cs.j * cs.j * cs.e_p / (params.k * params.k);
    const double one_plus_z = 1.0 + oc.z;
    if (one_plus_z < -1e-9) throw NumericalError("orbit_constants: 1 + z < 0 for an attainable state");
    oc.ecc = std::sqrt(std::max(0.0, one_plus_z));
    oc.phi0 = oc.ecc < 1e-12 ? 0.0 : std::atan2(-cs.i4, cs.i3);
    return oc;
}

/// u_k(phi) on the closed-form orbit.
inline double orbit_u(const OrbitConstants& oc, double phi) {
    return (1.0 + oc.ecc * std::cos(phi - oc.phi0)) / oc.d;
}

/// Physical r solving Tan_k(r) = D / (1 + e cos(phi - phi0)); empty in the
/// angular sectors an open orbit never reaches.
inline std::optional<double> orbit_radius(const OrbitConstants& oc, Curvature kappa, double phi) {
    return acot_k(kappa, orbit_u(oc, phi));
}

/// d^2u/dphi^2 + u - k/J^2 for the closed form, differentiated exactly.
inline double binet_residual(const OrbitConstants& oc, Curvature, double phi) {
    const double u = orbit_u(oc, phi);
    const double u_pp = -oc.ecc * std::cos(phi - oc.phi0) / oc.d;
    return u_pp + u - 1.0 / oc.d;
}

namespace detail {

inline double physical_u_floor(Curvature kappa) {
    switch (kappa.regime()) {
        case Regime::spherical: return -std::numeric_limits<double>::infinity();
        case Regime::flat: return 0.0;
        case Regime::hyperbolic: return kappa.root();
    }
    return 0.0;
}

}  // namespace detail

/**
 * Time to move between u_start and u_end along one monotone radial leg:
 *   t = | int du / ((u^2 + kappa) sqrt(2 (E_P + k u - J^2 u^2 / 2))) |.
 * The inverse square-root singularities at the turning values are removed by
 * u = u_apo + s^2 on the lower half and u = u_per - s^2 on the upper half.
 */
inline double time_from_u(const OrbitConstants& oc, Curvature kappa, double u_start, double u_end) {
    if (!std::isfinite(u_start) || !std::isfinite(u_end)) throw DomainError("time_from_u: non-finite bound");
    double a = std::min(u_start, u_end);
    double b = std::max(u_start, u_end);
    if (a == b) return 0.0;

    const double u_lo = oc.u_apoastron();
    const double u_hi = oc.u_periastron();
    const double slack = 1e-12 * std::max(1.0, std::abs(u_hi));
    if (a < u_lo - slack || b > u_hi + slack)
        throw DomainError("time_from_u: interval crosses a region forbidden by the energy");
    if (a <= detail::physical_u_floor(kappa))
        throw DomainError("time_from_u: interval reaches beyond the physical range of u");
    a = std::max(a, u_lo);
    b = std::min(b, u_hi);

    const double kv = kappa.value();
    const double jabs = std::abs(oc.conserved.j);
    using Integrator = boost::math::quadrature::gauss_kronrod<double, 31>;
    constexpr unsigned max_depth = 20;
    constexpr double rel_tol = 1e-13;

    const double mid = 0.5 * (a + b);
    // Lower half: u = u_lo + s^2, (u - u_lo) = s^2.
    auto lower = [&](double s) {
        const double u = u_lo + s * s;
        const double up = std::max(u_hi - u, 0.0);
        return 2.0 / ((u * u + kv) * jabs * std::sqrt(up));
    };
    // Upper half: u = u_hi - s^2, (u_hi - u) = s^2.
    auto upper = [&](double s) {
        const double u = u_hi - s * s;
        const double lo = std::max(u - u_lo, 0.0);
        return 2.0 / ((u * u + kv) * jabs * std::sqrt(lo));
    };
    const double t_lower =
        Integrator::integrate(lower, std::sqrt(a - u_lo), std::sqrt(std::max(mid - u_lo, 0.0)), max_depth, rel_tol);
    const double t_upper =
        Integrator::integrate(upper, std::sqrt(std::max(u_hi - b, 0.0)), std::sqrt(u_hi - mid), max_depth, rel_tol);
    const double t = t_lower + t_upper;
    if (!std::isfinite(t)) throw NumericalError("time_from_u: quadrature did not converge");
    return t;
}

/// Periastron-to-periastron time of a bounded orbit; empty for open orbits.
inline std::optional<double> radial_period(const OrbitConstants& oc, Curvature kappa) {
    if (oc.u_apoastron() <= detail::physical_u_floor(kappa)) return std::nullopt;
    return 2.0 * time_from_u(oc, kappa, oc.u_apoastron(), oc.u_periastron());
}

/**
 * Angles phi(t) on the closed-form orbit starting at phi_start when t = 0,
 * from d phi / dt = J (u(phi)^2 + kappa) = J / Sin_k(r)^2. t_grid must be
 * sorted and non-negative.
 */
inline std::vector<double> phi_from_time(const OrbitConstants& oc, Curvature kappa, double phi_start,
                                         const std::vector<double>& t_grid, double tol = 1e-12) {
    std::vector<double> out;
    if (t_grid.empty()) return out;
    if (!std::is_sorted(t_grid.begin(), t_grid.end()) || t_grid.front() < 0.0)
        throw std::out_of_range("phi_from_time: time grid must be sorted and start at t >= 0");
    const double t_last = t_grid.back();
    out.reserve(t_grid.size());
    if (t_last == 0.0) {
        out.assign(t_grid.size(), phi_start);
        return out;
    }
    const double kv = kappa.value();
    const double j = oc.conserved.j;
    auto rhs = [&](double, const ode::Vec<1>& y) {
        const double u = orbit_u(oc, y[0]);
        return ode::Vec<1>{j * (u * u + kv)};
    };
    ode::Options opt;
    opt.tol = tol;
    const auto sol = ode::integrate<1>(rhs, 0.0, ode::Vec<1>{phi_start}, t_last, opt);
    if (sol.termination != ode::Termination::completed)
        throw NumericalError("phi_from_time: angular quadrature failed");
    for (double t : t_grid) out.push_back(t == 0.0 ? phi_start : sol.at(t)[0]);
    return out;
}

/// State at periastron for the orbit with energy e and angular momentum j.
inline PhaseState periastron_state(const KeplerParams& params, double j, double e, double phi0) {
    if (j == 0.0) throw RadialOrbitError("periastron_state: J = 0 has no periastron");
    const Curvature kappa = params.kappa;
    const CriticalPointResult cp = critical_point(kappa, params.k, j);
    if (cp.point && e < cp.point->value && !detail::on_boundary(e, cp.point->value))
        throw InfeasibleError("energy below the circular-orbit energy");
    const double ecc = eccentricity(kappa, params.k, j, e);
    const double d = j * j / params.k;
    const auto r = acot_k(kappa, (1.0 + ecc) / d);
    if (!r || *r <= 0.0) throw InfeasibleError("no periastron for these constants");
    const double s = sin_k(kappa, *r);
    return {*r, phi0, 0.0, j / (s * s)};
}

}  // namespace ckepler
