/**
 * @brief Motion in a potential on the surface of curvature kappa.
 *
 * State is (r, phi, v_r, v_phi) in geodesic polar coordinates with the
 * Lagrangian L = (v_r^2 + Sin_k(r)^2 v_phi^2)/2 - U(r, phi). The Kepler
 * potential is U = -k / Tan_k(r), always evaluated as -k u with
 * u = Cos_k/Sin_k so the equator of the sphere is not a pole.
 */
#pragma once

#include <cmath>
#include <concepts>

#include "ckepler/errors.hpp"
#include "ckepler/geometry.hpp"
#include "ckepler/kappa_trig.hpp"

namespace ckepler {

struct PhaseState {
    double r = 0.0;
    double phi = 0.0;
    double v_r = 0.0;
    double v_phi = 0.0;
};

/// Time derivative of a PhaseState.
struct PhaseRate {
    double dr = 0.0;
    double dphi = 0.0;
    double dv_r = 0.0;
    double dv_phi = 0.0;
};

/// Kepler problem parameters. k > 0 is attractive.
struct KeplerParams {
    Curvature kappa;
    double k = 1.0;

    KeplerParams() = default;
    KeplerParams(Curvature kappa_, double k_) : kappa(kappa_), k(k_) {
        if (!std::isfinite(k_) || k_ <= 0) throw DomainError("coupling k must be positive");
    }
};

/// Curvature versions of the linear momenta and the angular momentum.
struct Momenta {
    double p1 = 0.0;
    double p2 = 0.0;
    double j = 0.0;
};

struct ConservedSet {
    double e = 0.0;    ///< total energy
    double j = 0.0;    ///< angular momentum
    double e_p = 0.0;  ///< partial energy e - kappa j^2 / 2
    double i3 = 0.0;   ///< Runge-Lenz components
    double i4 = 0.0;
};

struct PotentialGradient {
    double d_r = 0.0;
    double d_phi = 0.0;
};

template <class P>
concept Potential = requires(const P& p, Curvature kappa, double r, double phi) {
    { p.value(kappa, r, phi) } -> std::convertible_to<double>;
    { p.gradient(kappa, r, phi) } -> std::same_as<PotentialGradient>;
};

inline void require_regular_radius(Curvature kappa, double r) {
    require_radius(kappa, r);
    if (r == 0.0) throw SingularityError("force center r = 0");
}

/// -k / Tan_k(r); dU/dr = k / Sin_k(r)^2.
struct KeplerPotential {
    double k = 1.0;

    double value(Curvature kappa, double r, double = 0.0) const {
        require_regular_radius(kappa, r);
        return -k * cot_k(kappa, r);
    }
    PotentialGradient gradient(Curvature kappa, double r, double = 0.0) const {
        require_regular_radius(kappa, r);
        const double s = sin_k(kappa, r);
        return {k / (s * s), 0.0};
    }
};

/// Radial part F(r) of a separable potential.
template <class F>
concept RadialTerm = requires(const F& f, Curvature kappa, double r) {
    { f.value(kappa, r) } -> std::convertible_to<double>;
    { f.derivative(kappa, r) } -> std::convertible_to<double>;
};

/// Angular part G(phi) of a separable potential.
template <class G>
concept AngularTerm = requires(const G& g, double phi) {
    { g.value(phi) } -> std::convertible_to<double>;
    { g.derivative(phi) } -> std::convertible_to<double>;
};

struct KeplerRadial {
    double k = 1.0;
    double value(Curvature kappa, double r) const { return -k * cot_k(kappa, r); }
    double derivative(Curvature kappa, double r) const {
        const double s = sin_k(kappa, r);
        return k / (s * s);
    }
};

/// G(phi) = g cos^2(phi).
struct CosineSquaredAngular {
    double g = 0.0;
    double value(double phi) const { return g * std::cos(phi) * std::cos(phi); }
    double derivative(double phi) const { return -g * std::sin(2.0 * phi); }
};

struct NoAngular {
    double value(double) const { return 0.0; }
    double derivative(double) const { return 0.0; }
};

/// U = F(r) + G(phi) / Sin_k(r)^2, Hamilton-Jacobi separable in polar coordinates.
template <RadialTerm F, AngularTerm G>
struct SeparablePotential {
    F radial;
    G angular;

    double value(Curvature kappa, double r, double phi) const {
        require_regular_radius(kappa, r);
        const double s = sin_k(kappa, r);
        return radial.value(kappa, r) + angular.value(phi) / (s * s);
    }
    PotentialGradient gradient(Curvature kappa, double r, double phi) const {
        require_regular_radius(kappa, r);
        const double s = sin_k(kappa, r);
        const double s2 = s * s;
        const double u = cot_k(kappa, r);
        return {radial.derivative(kappa, r) - 2.0 * angular.value(phi) * u / s2,
                angular.derivative(phi) / s2};
    }
};

template <RadialTerm F, AngularTerm G>
SeparablePotential(F, G) -> SeparablePotential<F, G>;

inline double kepler_potential(const KeplerParams& params, double r) {
    return KeplerPotential{params.k}.value(params.kappa, r);
}

/// 4 pi Sin_k(r)^2 dU/dr: the flux of the Kepler force through a sphere of
/// radius r in the three-dimensional space of the same curvature. Equals 4 pi k.
inline double gauss_law_flux(const KeplerParams& params, double r) {
    const double s = sin_k(params.kappa, r);
    return 4.0 * std::numbers::pi * s * s * KeplerPotential{params.k}.gradient(params.kappa, r).d_r;
}

/// Euler-Lagrange equations for a general potential U(r, phi).
template <Potential P>
PhaseRate eom_rhs(const PhaseState& x, Curvature kappa, const P& potential) {
    require_regular_radius(kappa, x.r);
    const double s = sin_k(kappa, x.r);
    const double c = cos_k(kappa, x.r);
    const double u = cot_k(kappa, x.r);
    const PotentialGradient g = potential.gradient(kappa, x.r, x.phi);
    return {x.v_r, x.v_phi, s * c * x.v_phi * x.v_phi - g.d_r,
            -2.0 * u * x.v_r * x.v_phi - g.d_phi / (s * s)};
}

inline PhaseRate eom_rhs(const PhaseState& x, const KeplerParams& params) {
    return eom_rhs(x, params.kappa, KeplerPotential{params.k});
}

inline Momenta momenta(Curvature kappa, const PhaseState& x) {
    require_radius(kappa, x.r);
    const double s = sin_k(kappa, x.r);
    const double c = cos_k(kappa, x.r);
    const double cp = std::cos(x.phi);
    const double sp = std::sin(x.phi);
    return {cp * x.v_r - c * s * sp * x.v_phi, sp * x.v_r + c * s * cp * x.v_phi, s * s * x.v_phi};
}

inline double kinetic_energy(Curvature kappa, const PhaseState& x) {
    const double s = sin_k(kappa, x.r);
    return 0.5 * (x.v_r * x.v_r + s * s * x.v_phi * x.v_phi);
}

template <Potential P>
double energy(Curvature kappa, const PhaseState& x, const P& potential) {
    return kinetic_energy(kappa, x) + potential.value(kappa, x.r, x.phi);
}

inline double energy(const PhaseState& x, const KeplerParams& params) {
    return energy(params.kappa, x, KeplerPotential{params.k});
}

struct RungeLenz {
    double i3 = 0.0;
    double i4 = 0.0;
};

inline RungeLenz runge_lenz(Curvature kappa, const PhaseState& x, const KeplerParams& params) {
    const Momenta m = momenta(kappa, x);
    return {m.p2 * m.j - params.k * std::cos(x.phi), m.p1 * m.j + params.k * std::sin(x.phi)};
}

inline ConservedSet conserved_set(const PhaseState& x, const KeplerParams& params) {
    const double e = energy(x, params);
    const Momenta m = momenta(params.kappa, x);
    const RungeLenz rl = runge_lenz(params.kappa, x, params);
    return {e, m.j, e - 0.5 * params.kappa.value() * m.j * m.j, rl.i3, rl.i4};
}

/// Components of a vector field in the (d/dr, d/dphi) basis.
struct TangentVector {
    double r = 0.0;
    double phi = 0.0;
};

struct KillingFields {
    TangentVector y1;
    TangentVector y2;
    TangentVector yj;
};

/// Generators of the isometry group: two "translations" and the rotation.
inline KillingFields killing_fields(Curvature kappa, const PolarPoint& p) {
    require_point(kappa, p);
    if (p.r == 0.0) throw SingularityError("killing_fields: polar chart is singular at r = 0");
    const double u = cot_k(kappa, p.r);
    const double cp = std::cos(p.phi);
    const double sp = std::sin(p.phi);
    return {{cp, -u * sp}, {sp, u * cp}, {0.0, 1.0}};
}

struct SeparableIntegrals {
    double i1 = 0.0;
    double i2 = 0.0;
};

/// I1 = P1^2 + P2^2 + 2F + 2G/Tan_k^2 and I2 = J^2 + 2G; 2E = I1 + kappa I2.
template <RadialTerm F, AngularTerm G>
SeparableIntegrals separable_integrals(Curvature kappa, const PhaseState& x, const F& f, const G& g) {
    require_regular_radius(kappa, x.r);
    const Momenta m = momenta(kappa, x);
    const double u = cot_k(kappa, x.r);
    const double gv = g.value(x.phi);
    return {m.p1 * m.p1 + m.p2 * m.p2 + 2.0 * f.value(kappa, x.r) + 2.0 * gv * u * u,
            m.j * m.j + 2.0 * gv};
}

}  // namespace ckepler
