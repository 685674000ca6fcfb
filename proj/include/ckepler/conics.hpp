/**
 * @brief Conics with a focus at the origin on the constant-curvature surfaces.
 *
 * Every conic of the family has polar equation Tan_k(r) = D / (1 + e cos phi).
 * On the hyperbolic plane D is written either through a semilatus rectum p
 * (Tan_k(p) = D, possible while D < 1/sqrt(-kappa)), through the
 * complementary distance p~ (1/((-kappa) Tan_k(p~)) = D, for D > 1/sqrt(-kappa)),
 * or is the separatrix D = 1/sqrt(-kappa). The type of the conic (ellipse,
 * parabola, hyperbola and their limiting and particular cases) depends on e
 * and on D together.
 */
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ckepler/effective_potential.hpp"
#include "ckepler/errors.hpp"
#include "ckepler/geometry.hpp"
#include "ckepler/kappa_trig.hpp"

namespace ckepler {

enum class ConicFamily { latus, colatus, separatrix };

inline const char* to_string(ConicFamily f) {
    switch (f) {
        case ConicFamily::latus: return "latus";
        case ConicFamily::colatus: return "colatus";
        case ConicFamily::separatrix: return "separatrix";
    }
    return "?";
}

enum class ConicType { circle, ellipse, horoellipse, parabola, equiparabola, horohyperbola, hyperbola, line_pair };

inline const char* to_string(ConicType t) {
    switch (t) {
        case ConicType::circle: return "circle";
        case ConicType::ellipse: return "ellipse";
        case ConicType::horoellipse: return "horoellipse";
        case ConicType::parabola: return "parabola";
        case ConicType::equiparabola: return "equiparabola";
        case ConicType::horohyperbola: return "horohyperbola";
        case ConicType::hyperbola: return "hyperbola";
        case ConicType::line_pair: return "line_pair";
    }
    return "?";
}

/// Sphere-only convention: not crossing, touching or crossing the equator of the focus.
enum class SphericalConvention { not_applicable, ellipse_like, parabola_like, hyperbola_like };

inline const char* to_string(SphericalConvention c) {
    switch (c) {
        case SphericalConvention::not_applicable: return "not_applicable";
        case SphericalConvention::ellipse_like: return "ellipse_like";
        case SphericalConvention::parabola_like: return "parabola_like";
        case SphericalConvention::hyperbola_like: return "hyperbola_like";
    }
    return "?";
}

struct ConicSpec {
    ConicFamily family = ConicFamily::latus;
    double parameter = 0.0;  ///< p (latus) or p~ (colatus); unused for the separatrix
    double ecc = 0.0;
    Curvature kappa;

    /// The D of Tan_k(r) = D / (1 + e cos phi).
    double d() const {
        switch (family) {
            case ConicFamily::latus: return tan_k(kappa, parameter);
            case ConicFamily::colatus: return 1.0 / (-kappa.value() * tan_k(kappa, parameter));
            case ConicFamily::separatrix: return 1.0 / kappa.root();
        }
        return 0.0;
    }
};

struct ConicClassification {
    ConicType type = ConicType::circle;
    SphericalConvention spherical = SphericalConvention::not_applicable;
};

/**
 * Conic with focal parameter d and eccentricity ecc. On the hyperbolic plane
 * the periastron must exist, d / (1 + ecc) < 1/sqrt(-kappa).
 */
inline ConicSpec conic_from_dynamics(Curvature kappa, double d, double ecc) {
    if (!(d > 0) || !std::isfinite(d)) throw DomainError("conic_from_dynamics: d must be positive");
    if (!(ecc >= 0) || !std::isfinite(ecc)) throw DomainError("conic_from_dynamics: eccentricity must be >= 0");
    ConicSpec spec;
    spec.kappa = kappa;
    spec.ecc = ecc;
    if (kappa.value() >= 0) {
        spec.family = ConicFamily::latus;
        spec.parameter = atan_k(kappa, d);
        return spec;
    }
    const double c = kappa.root();
    if (!(c * d / (1.0 + ecc) < 1.0)) throw InfeasibleError("conic_from_dynamics: periastron beyond infinity");
    const double sd = c * d;
    if (std::abs(sd - 1.0) <= boundary_band) {
        spec.family = ConicFamily::separatrix;
        spec.parameter = std::numeric_limits<double>::infinity();
    } else if (sd < 1.0) {
        spec.family = ConicFamily::latus;
        spec.parameter = atan_k(kappa, d);
    } else {
        spec.family = ConicFamily::colatus;
        spec.parameter = atan_k(kappa, 1.0 / (-kappa.value() * d));
    }
    return spec;
}

/// Upper eccentricity of hyperbolic ellipses, 1 - sqrt(-kappa) D (negative on the colatus side).
inline double horoellipse_ecc(Curvature kappa, double d) { return 1.0 - kappa.root() * d; }
/// Lower eccentricity of hyperbolic hyperbolas, 1 + sqrt(-kappa) D.
inline double horohyperbola_ecc(Curvature kappa, double d) { return 1.0 + kappa.root() * d; }

/**
 * Type of the conic from the eccentricity intervals. Thresholds are matched
 * within a relative band of boundary_band.
 */
inline ConicClassification classify_conic(const ConicSpec& spec) {
    const double e = spec.ecc;
    ConicClassification out;
    if (std::isinf(e)) {
        out.type = ConicType::line_pair;
        return out;
    }
    auto near = [](double a, double b) { return detail::on_boundary(a, b); };
    const bool zero = e <= boundary_band;

    switch (spec.kappa.regime()) {
        case Regime::spherical:
            out.type = zero ? ConicType::circle : ConicType::ellipse;
            out.spherical = near(e, 1.0) ? SphericalConvention::parabola_like
                            : e < 1.0    ? SphericalConvention::ellipse_like
                                         : SphericalConvention::hyperbola_like;
            return out;
        case Regime::flat:
            out.type = zero ? ConicType::circle
                       : near(e, 1.0) ? ConicType::parabola
                       : e < 1.0      ? ConicType::ellipse
                                      : ConicType::hyperbola;
            return out;
        case Regime::hyperbolic: break;
    }

    // sqrt(-kappa) Tan_k(p) for the latus family, 1/(sqrt(-kappa) Tan_k(p~)) for the
    // colatus family and 1 on the separatrix: all equal sqrt(-kappa) D.
    const double sd = spec.family == ConicFamily::separatrix ? 1.0 : spec.kappa.root() * spec.d();
    const double lower = 1.0 - sd;
    const double upper = 1.0 + sd;
    if (spec.family == ConicFamily::latus && zero) out.type = ConicType::circle;
    else if (spec.family == ConicFamily::latus && near(e, lower)) out.type = ConicType::horoellipse;
    else if (spec.family == ConicFamily::latus && e < lower) out.type = ConicType::ellipse;
    else if (near(e, upper)) out.type = ConicType::horohyperbola;
    else if (e < upper) out.type = ConicType::parabola;
    else out.type = ConicType::hyperbola;
    return out;
}

/**
 * Eccentricity of the zero-focal-separation parabola: 1/Cos_k(p) in the latus
 * family and Cos_k(p~) in the colatus family. Undefined on the separatrix,
 * where the two families have different limits.
 */
inline double equiparabola_ecc(const ConicSpec& spec) {
    switch (spec.family) {
        case ConicFamily::latus: return 1.0 / cos_k(spec.kappa, spec.parameter);
        case ConicFamily::colatus: return cos_k(spec.kappa, spec.parameter);
        case ConicFamily::separatrix: break;
    }
    throw DomainError("equiparabola_ecc: no finite equiparabola on the separatrix");
}

/// Two foci: origin and `second`, half-separation f, half sum (or difference) of distances a.
struct TwoFoci {
    double f = 0.0;
    double a = 0.0;
    PolarPoint second;
};

/// Focus at the origin and a focal line perpendicular to the axis at signed
/// distance 2 varphi from it, half sum of distances alpha.
struct FocusLine {
    double varphi = 0.0;
    double alpha = 0.0;
    double axis = 0.0;  ///< direction of the axis from the focus
};

struct FocalElements {
    enum class Kind { two_foci, focus_line } kind = Kind::two_foci;
    TwoFoci foci;
    FocusLine line;

    static FocalElements from(TwoFoci t) {
        FocalElements fe;
        fe.kind = Kind::two_foci;
        fe.foci = t;
        return fe;
    }
    static FocalElements from(FocusLine l) {
        FocalElements fe;
        fe.kind = Kind::focus_line;
        fe.line = l;
        return fe;
    }
};

/// Sin_k(2f)/Sin_k(2a) for two foci, Cos_k(2 varphi)/Cos_k(2 alpha) for a focus and a line.
inline double ecc_from_focal(Curvature kappa, const FocalElements& fe) {
    if (fe.kind == FocalElements::Kind::two_foci) {
        const double den = sin_k(kappa, 2.0 * fe.foci.a);
        if (den == 0.0) throw DomainError("ecc_from_focal: Sin_k(2a) vanishes");
        return sin_k(kappa, 2.0 * fe.foci.f) / den;
    }
    const double den = cos_k(kappa, 2.0 * fe.line.alpha);
    if (den == 0.0) throw DomainError("ecc_from_focal: Cos_k(2 alpha) vanishes");
    return cos_k(kappa, 2.0 * fe.line.varphi) / den;
}

/**
 * Foci of the conic through the vertices at r_per (direction phi0) and r_apo
 * (direction phi0 + pi). A negative r_apo places the second vertex on the
 * periastron ray at distance |r_apo| (far branch of a hyperbola); the foci are
 * then separated by |r_apo| + r_per and the distance difference is constant.
 */
inline TwoFoci focal_from_vertices(Curvature kappa, double r_per, double r_apo, double phi0 = 0.0) {
    if (!std::isfinite(r_apo)) throw DomainError("focal_from_vertices: unbounded orbit has no second vertex");
    if (!(r_per > 0)) throw DomainError("focal_from_vertices: periastron must be positive");
    if (r_apo >= 0) {
        if (r_apo < r_per) throw DomainError("focal_from_vertices: r_apo < r_per");
        require_radius(kappa, r_apo);
        const double f = 0.5 * (r_apo - r_per);
        return {f, 0.5 * (r_per + r_apo), PolarPoint{2.0 * f, reduce_angle(phi0 + std::numbers::pi)}};
    }
    const double far = -r_apo;
    if (far <= r_per) throw DomainError("focal_from_vertices: far vertex must lie beyond the periastron");
    require_radius(kappa, far + r_per);
    return {0.5 * (far + r_per), 0.5 * (far - r_per), PolarPoint{far + r_per, reduce_angle(phi0)}};
}

enum class FocalSign { sum, difference };

/// Signed geodesic distance from p to the line perpendicular to direction `axis`
/// at distance `offset` from the origin (positive beyond the line).
inline double distance_to_line(Curvature kappa, const PolarPoint& p, double axis, double offset) {
    const double v = sin_k(kappa, p.r) * cos_k(kappa, offset) * std::cos(p.phi - axis) -
                     cos_k(kappa, p.r) * sin_k(kappa, offset);
    return asin_k(kappa, v);
}

/**
 * Largest deviation from the metric definition over the samples:
 * |d1 + d2 - 2a| (sum) or |d2 - d1 - 2a| (difference) with d1 the distance to
 * the origin focus. For a focus line, d2 is the signed distance to the line.
 */
inline double verify_conic_definition(Curvature kappa, const std::vector<PolarPoint>& samples,
                                      const FocalElements& fe, FocalSign sign) {
    if (samples.size() < 8) throw DomainError("verify_conic_definition: need at least 8 samples");
    double worst = 0.0;
    for (const auto& p : samples) {
        const double d1 = p.r;
        double d2, target;
        if (fe.kind == FocalElements::Kind::two_foci) {
            d2 = geodesic_distance(kappa, p, fe.foci.second);
            target = 2.0 * fe.foci.a;
        } else {
            d2 = distance_to_line(kappa, p, fe.line.axis, 2.0 * fe.line.varphi);
            target = 2.0 * fe.line.alpha;
        }
        const double value = sign == FocalSign::sum ? d1 + d2 : d2 - d1;
        worst = std::max(worst, std::abs(value - target));
    }
    return worst;
}

/**
 * Landmarks of the family of conics sharing a periastron distance r_per,
 * in terms of Tan_k(p):
 *   Tan(r_per) < ellipses < 2T/(1 + cT) < parabolas < 2T/(1 - cT) < hyperbolas,
 * with T = Tan_k(r_per), c = sqrt(-kappa); and for the colatus family
 * hyperbolas below (1 - cT)/(-2 kappa T) < parabolas in Tan_k(p~).
 */
struct PeriastronLandmarks {
    double tan_r_per = 0.0;
    double tan_p_horoellipse = 0.0;
    double tan_p_horohyperbola = 0.0;
    /// Colatus boundary (hyperbolic plane only).
    std::optional<double> tan_ptilde_horohyperbola;
    /// Largest Tan_k(p) of the latus family (1/sqrt(-kappa)), infinite otherwise.
    double tan_p_limit = std::numeric_limits<double>::infinity();

    /// Relative width of the parabola band, (horohyperbola - horoellipse) / (2 Tan r_per).
    double parabola_band_relative() const {
        return (tan_p_horohyperbola - tan_p_horoellipse) / (2.0 * tan_r_per);
    }
};

inline PeriastronLandmarks periastron_family(Curvature kappa, double r_per) {
    require_radius(kappa, r_per);
    if (r_per == 0.0) throw DomainError("periastron_family: r_per must be positive");
    PeriastronLandmarks lm;
    lm.tan_r_per = tan_k(kappa, r_per);
    const double t = lm.tan_r_per;
    if (kappa.value() >= 0) {
        lm.tan_p_horoellipse = 2.0 * t;
        lm.tan_p_horohyperbola = 2.0 * t;
        return lm;
    }
    const double c = kappa.root();
    const double ct = c * t;
    if (ct >= 1.0) throw DomainError("periastron_family: Tan_k(r_per) beyond saturation");
    lm.tan_p_horoellipse = 2.0 * t / (1.0 + ct);
    lm.tan_p_horohyperbola = 2.0 * t / (1.0 - ct);
    lm.tan_ptilde_horohyperbola = (1.0 - ct) / (-2.0 * kappa.value() * t);
    lm.tan_p_limit = 1.0 / c;
    return lm;
}

/// Physical points of Tan_k(r) = D/(1 + e cos phi) (axis along phi = 0) for the
/// given angles; angles without a point on the surface are skipped.
inline std::vector<PolarPoint> sample_conic(const ConicSpec& spec, const std::vector<double>& phi_grid) {
    const double d = spec.d();
    std::vector<PolarPoint> out;
    out.reserve(phi_grid.size());
    for (double phi : phi_grid) {
        const double u = (1.0 + spec.ecc * std::cos(phi)) / d;
        if (auto r = acot_k(spec.kappa, u); r && *r > 0.0) out.push_back({*r, phi});
    }
    return out;
}

}  // namespace ckepler
