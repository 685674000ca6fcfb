// Command implementations behind the ckepler CLI. Each command returns its
// data as plain structs; writers turn them into CSV or JSON.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "app/config.hpp"
#include "ckepler/ckepler.hpp"

namespace ckepler::app {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_infeasible = 3, exit_numerical = 4 };

/// Shortest text that reads back to the same double (17 significant digits).
inline std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv_row(std::ostream& out, const std::vector<double>& values, const std::string& tail = {}) {
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << fmt17(values[i]);
    if (!tail.empty()) out << (values.empty() ? "" : ",") << tail;
    out << '\n';
}

inline void write_csv_header(std::ostream& out, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << '\n';
}

// ---------------------------------------------------------------------------
// Charts

inline std::vector<std::string> chart_columns(Chart chart) {
    switch (chart) {
        case Chart::polar: return {"x", "y"};
        case Chart::ambient: return {"X", "Y", "Z"};
        case Chart::poincare_disk: return {"disk_x", "disk_y"};
    }
    return {};
}

/// polar: azimuthal-equidistant picture (r cos phi, r sin phi); ambient: the
/// sphere or hyperboloid embedding; poincare_disk: unit-disk model (kappa < 0).
inline std::vector<double> chart_values(Curvature kappa, Chart chart, const PolarPoint& p) {
    switch (chart) {
        case Chart::polar: return {p.r * std::cos(p.phi), p.r * std::sin(p.phi)};
        case Chart::ambient: {
            const AmbientPoint a = to_ambient(kappa, p);
            return {a.x, a.y, a.z};
        }
        case Chart::poincare_disk: {
            const DiskPoint d = to_poincare_disk(kappa, p);
            return {d.x, d.y};
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// simulate

struct DriftReport {
    double e = 0.0, j = 0.0, i3 = 0.0, i4 = 0.0;
};

struct SimulationResult {
    std::vector<std::string> columns;  ///< numeric columns; an "event" column follows
    std::vector<std::vector<double>> rows;
    TrajectoryEvent event = TrajectoryEvent::none;
    DriftReport drift;
    std::size_t steps = 0;
    std::size_t rejected = 0;
    PhaseState initial;
};

/// Initial state of a run. (E, J, phi0) starts at the periastron; with J = 0 it
/// starts at rest where the potential equals E.
inline PhaseState initial_state(const RunConfig& c) {
    if (c.state) return {c.state->r, c.state->phi, c.state->v_r, c.state->v_phi};
    const KeplerParams params(Curvature(c.kappa), c.k);
    const auto& o = *c.orbit;
    if (o.j != 0.0) return periastron_state(params, o.j, o.energy, o.phi0);
    const auto r = acot_k(params.kappa, -o.energy / c.k);
    if (!r || *r <= 0.0) throw InfeasibleError("no radius where the potential equals the energy");
    return {*r, o.phi0, 0.0, 0.0};
}

inline SimulationResult simulate(const RunConfig& c) {
    const KeplerParams params(Curvature(c.kappa), c.k);
    SimulationResult res;
    res.initial = initial_state(c);
    const PhaseState x0 = res.initial;
    require_point(params.kappa, {x0.r, x0.phi});

    const Trajectory tr = integrate(x0, params, c.t_end, c.tol);
    res.event = tr.event();
    res.steps = tr.size() - 1;
    res.rejected = tr.rejected_steps();

    res.columns = {"t", "r", "phi", "v_r", "v_phi", "E", "J", "I3", "I4"};
    for (const auto& name : chart_columns(c.chart)) res.columns.push_back(name);

    const ConservedSet c0 = conserved_set(x0, params);
    const double e_scale = std::max(std::abs(c0.e), kinetic_energy(params.kappa, x0) + std::abs(kepler_potential(params, x0.r)));
    const double ecc = std::sqrt(std::max(0.0, 1.0 + 2.0 * c0.j * c0.j * c0.e_p / (c.k * c.k)));
    const double rl_scale = c.k * std::max(1.0, ecc);

    auto emit = [&](double t, const PhaseState& x) {
        const ConservedSet cs = conserved_set(x, params);
        std::vector<double> row{t, x.r, x.phi, x.v_r, x.v_phi, cs.e, cs.j, cs.i3, cs.i4};
        for (double v : chart_values(params.kappa, c.chart, {x.r, x.phi})) row.push_back(v);
        res.rows.push_back(std::move(row));
        res.drift.e = std::max(res.drift.e, std::abs(cs.e - c0.e) / e_scale);
        if (c0.j != 0.0) res.drift.j = std::max(res.drift.j, std::abs(cs.j - c0.j) / std::abs(c0.j));
        res.drift.i3 = std::max(res.drift.i3, std::abs(cs.i3 - c0.i3) / rl_scale);
        res.drift.i4 = std::max(res.drift.i4, std::abs(cs.i4 - c0.i4) / rl_scale);
    };

    if (c.samples == 0) {
        for (std::size_t i = 0; i < tr.size(); ++i) emit(tr.time(i), tr.state(i));
    } else {
        const double t0 = tr.t_begin(), t1 = tr.t_end();
        for (int i = 0; i < c.samples; ++i) {
            const double t = i + 1 == c.samples ? t1 : t0 + (t1 - t0) * i / (c.samples - 1);
            emit(t, tr.at(t));
        }
    }
    return res;
}

inline nlohmann::json drift_json(const SimulationResult& r) {
    return {{"max_relative_drift", {{"E", r.drift.e}, {"J", r.drift.j}, {"I3", r.drift.i3}, {"I4", r.drift.i4}}},
            {"event", to_string(r.event)},
            {"steps", r.steps},
            {"rejected_steps", r.rejected}};
}

/// Rows carry event "none"; a run that ends early gets one more row repeating
/// the last state with the event name.
inline void write_simulation(std::ostream& out, const SimulationResult& r, OutputFormat format) {
    if (format == OutputFormat::csv) {
        auto header = r.columns;
        header.push_back("event");
        write_csv_header(out, header);
        for (const auto& row : r.rows) write_csv_row(out, row, "none");
        if (r.event != TrajectoryEvent::none && !r.rows.empty()) write_csv_row(out, r.rows.back(), to_string(r.event));
        return;
    }
    nlohmann::json j;
    j["columns"] = r.columns;
    j["rows"] = r.rows;
    j["event"] = to_string(r.event);
    j["report"] = drift_json(r);
    out << j.dump(1) << '\n';
}

inline int exit_code_for(TrajectoryEvent e) { return e == TrajectoryEvent::none ? exit_ok : exit_numerical; }

// ---------------------------------------------------------------------------
// classify

struct ClassifyRecord {
    double kappa = 0.0, k = 1.0, j = 0.0, energy = 0.0;
    std::string orbit_class;
    bool bounded = false;
    double eccentricity = 0.0;
    double d = 0.0;
    double e_p = 0.0;
    // Conic of the orbit; absent for radial (J = 0) motion.
    std::optional<std::string> conic_family, conic_type, spherical_convention;
    std::optional<double> conic_parameter;
    // Landmarks.
    std::optional<double> e_cir, e_infinity, j_infinity;
    std::optional<double> horoellipse_ecc, horohyperbola_ecc, equiparabola_ecc;

    friend bool operator==(const ClassifyRecord&, const ClassifyRecord&) = default;
};

inline ClassifyRecord classify(double kappa_v, double k, double j, double e) {
    if (!(k > 0)) throw ConfigError("k must be positive");
    const Curvature kappa(kappa_v);
    ClassifyRecord rec;
    rec.kappa = kappa_v;
    rec.k = k;
    rec.j = j;
    rec.energy = e;
    const OrbitClass cls = classify_orbit(kappa, k, j, e);
    rec.orbit_class = to_string(cls.label);
    rec.bounded = cls.bounded;
    rec.eccentricity = eccentricity(kappa, k, j, e);
    rec.d = j * j / k;
    rec.e_p = e - 0.5 * kappa_v * j * j;
    if (const auto cp = critical_point(kappa, k, j)) rec.e_cir = cp.point->value;
    rec.e_infinity = energy_at_infinity(kappa, k);
    rec.j_infinity = ckepler::j_infinity(kappa, k);
    if (j != 0.0) {
        const ConicSpec spec = conic_from_dynamics(kappa, rec.d, rec.eccentricity);
        const ConicClassification cc = classify_conic(spec);
        rec.conic_family = to_string(spec.family);
        rec.conic_type = to_string(cc.type);
        if (cc.spherical != SphericalConvention::not_applicable) rec.spherical_convention = to_string(cc.spherical);
        if (spec.family != ConicFamily::separatrix) {
            rec.conic_parameter = spec.parameter;
            rec.equiparabola_ecc = equiparabola_ecc(spec);
        }
        if (kappa_v < 0) {
            rec.horoellipse_ecc = horoellipse_ecc(kappa, rec.d);
            rec.horohyperbola_ecc = horohyperbola_ecc(kappa, rec.d);
        }
    }
    return rec;
}

namespace detail {
inline nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }
inline nlohmann::json opt(const std::optional<std::string>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
template <class T>
std::optional<T> get_opt(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}
}  // namespace detail

inline nlohmann::json to_json(const ClassifyRecord& r) {
    using detail::opt;
    nlohmann::json conic = nullptr;
    if (r.conic_family)
        conic = {{"family", *r.conic_family},
                 {"type", opt(r.conic_type)},
                 {"parameter", opt(r.conic_parameter)},
                 {"spherical_convention", opt(r.spherical_convention)}};
    return {{"schema", config_schema},
            {"input", {{"kappa", r.kappa}, {"k", r.k}, {"j", r.j}, {"energy", r.energy}}},
            {"orbit_class", r.orbit_class},
            {"bounded", r.bounded},
            {"eccentricity", r.eccentricity},
            {"d", r.d},
            {"e_p", r.e_p},
            {"conic", conic},
            {"landmarks", {{"e_cir", opt(r.e_cir)}, {"e_infinity", opt(r.e_infinity)}, {"j_infinity", opt(r.j_infinity)}}},
            {"thresholds",
             {{"horoellipse_ecc", opt(r.horoellipse_ecc)},
              {"horohyperbola_ecc", opt(r.horohyperbola_ecc)},
              {"equiparabola_ecc", opt(r.equiparabola_ecc)}}}};
}

inline ClassifyRecord classify_record_from_json(const nlohmann::json& j) {
    using detail::get_opt;
    ClassifyRecord r;
    const auto& in = j.at("input");
    r.kappa = in.at("kappa").get<double>();
    r.k = in.at("k").get<double>();
    r.j = in.at("j").get<double>();
    r.energy = in.at("energy").get<double>();
    r.orbit_class = j.at("orbit_class").get<std::string>();
    r.bounded = j.at("bounded").get<bool>();
    r.eccentricity = j.at("eccentricity").get<double>();
    r.d = j.at("d").get<double>();
    r.e_p = j.at("e_p").get<double>();
    if (!j.at("conic").is_null()) {
        const auto& c = j.at("conic");
        r.conic_family = c.at("family").get<std::string>();
        r.conic_type = get_opt<std::string>(c, "type");
        r.conic_parameter = get_opt<double>(c, "parameter");
        r.spherical_convention = get_opt<std::string>(c, "spherical_convention");
    }
    const auto& l = j.at("landmarks");
    r.e_cir = get_opt<double>(l, "e_cir");
    r.e_infinity = get_opt<double>(l, "e_infinity");
    r.j_infinity = get_opt<double>(l, "j_infinity");
    const auto& t = j.at("thresholds");
    r.horoellipse_ecc = get_opt<double>(t, "horoellipse_ecc");
    r.horohyperbola_ecc = get_opt<double>(t, "horohyperbola_ecc");
    r.equiparabola_ecc = get_opt<double>(t, "equiparabola_ecc");
    return r;
}

/// JSON text whose numbers read back bit-identically.
inline std::string dump_json(const nlohmann::json& j) { return j.dump(2); }

// ---------------------------------------------------------------------------
// potential-scan

struct ScanResult {
    double kappa = 0.0, k = 1.0, j = 0.0;
    PotentialProfile profile;
    std::vector<double> r, w;
};

/// w_eff on `samples` equally spaced radii in [r_min, r_max], split over
/// `threads` workers; each worker fills a fixed index range.
inline ScanResult potential_scan(double kappa_v, double k, double j, double r_min, double r_max, int samples,
                                 unsigned threads) {
    const Curvature kappa(kappa_v);
    if (!(k > 0)) throw ConfigError("k must be positive");
    if (samples < 2) throw ConfigError("samples must be at least 2");
    if (!(r_min > 0) || !(r_max > r_min)) throw ConfigError("need 0 < r_min < r_max");
    if (r_max >= kappa.radial_limit()) throw ConfigError("r_max must stay below the antipode pi/sqrt(kappa)");
    ScanResult res{kappa_v, k, j, potential_profile(kappa, k, j), {}, {}};
    const auto n = static_cast<std::size_t>(samples);
    res.r.resize(n);
    res.w.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        res.r[i] = i + 1 == n ? r_max : r_min + (r_max - r_min) * static_cast<double>(i) / static_cast<double>(n - 1);

    threads = std::clamp(threads, 1u, 64u);
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&res, kappa, k, j, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) res.w[i] = w_eff(kappa, k, j, res.r[i]);
        });
    }
    for (auto& th : pool) th.join();
    return res;
}

inline void write_scan(std::ostream& out, const ScanResult& s) {
    auto line = [&](const char* key, const std::optional<double>& v) {
        out << "# " << key << '=' << (v ? fmt17(*v) : std::string("none")) << '\n';
    };
    out << "# kappa=" << fmt17(s.kappa) << " k=" << fmt17(s.k) << " j=" << fmt17(s.j) << '\n';
    line("critical_radius", s.profile.critical_radius);
    line("critical_value", s.profile.critical_value);
    line("e_cir", s.profile.e_cir);
    line("e_infinity", s.profile.e_infinity);
    line("j_infinity", s.profile.j_infinity);
    out << "# zero_crossings=";
    for (std::size_t i = 0; i < s.profile.zero_crossings.size(); ++i)
        out << (i ? ";" : "") << fmt17(s.profile.zero_crossings[i]);
    out << '\n';
    write_csv_header(out, {"r", "W"});
    for (std::size_t i = 0; i < s.r.size(); ++i) write_csv_row(out, {s.r[i], s.w[i]});
}

// ---------------------------------------------------------------------------
// conic

struct ConicSample {
    int id = 0;
    ConicSpec spec;
    ConicType type = ConicType::circle;
    std::vector<PolarPoint> points;
};

struct ConicOutput {
    double kappa = 0.0;
    std::optional<PeriastronLandmarks> landmarks;
    double r_per = 0.0;
    std::vector<ConicSample> conics;
};

inline std::vector<double> phi_grid(int steps) {
    if (steps < 8) throw ConfigError("phi-steps must be at least 8");
    std::vector<double> g(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) g[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * i / steps;
    return g;
}

inline ConicSample make_sample(int id, const ConicSpec& spec, const std::vector<double>& grid) {
    return {id, spec, classify_conic(spec).type, sample_conic(spec, grid)};
}

inline ConicOutput single_conic(const ConicSpec& spec, int phi_steps) {
    ConicOutput out;
    out.kappa = spec.kappa.value();
    out.conics.push_back(make_sample(0, spec, phi_grid(phi_steps)));
    return out;
}

/// Representative members of the family of conics with periastron r_per: one
/// per class of the landmark chain, plus interior members of each open band.
inline ConicOutput periastron_conics(double kappa_v, double r_per, int phi_steps) {
    const Curvature kappa(kappa_v);
    ConicOutput out;
    out.kappa = kappa_v;
    out.r_per = r_per;
    const PeriastronLandmarks lm = periastron_family(kappa, r_per);
    out.landmarks = lm;
    const double t = lm.tan_r_per;
    // Tan(r_per) = D/(1 + e) fixes e = D/t - 1 along the family.
    std::vector<double> ecc;
    if (kappa_v < 0) {
        const double e_he = lm.tan_p_horoellipse / t - 1.0;
        const double e_hh = lm.tan_p_horohyperbola / t - 1.0;
        ecc = {0.0, 0.5 * e_he, e_he, 0.5 * (e_he + e_hh), e_hh, e_hh + 0.5, e_hh + 2.0};
    } else {
        ecc = {0.0, 0.5, 1.0, 1.5, 3.0};
    }
    const auto grid = phi_grid(phi_steps);
    int id = 0;
    for (double e : ecc) out.conics.push_back(make_sample(id++, conic_from_dynamics(kappa, t * (1.0 + e), e), grid));
    return out;
}

inline void write_conics(std::ostream& out, const ConicOutput& c, Chart chart) {
    const Curvature kappa(c.kappa);
    if (c.landmarks) {
        const auto& lm = *c.landmarks;
        out << "# r_per=" << fmt17(c.r_per) << '\n';
        out << "# tan_r_per=" << fmt17(lm.tan_r_per) << '\n';
        out << "# tan_p_horoellipse=" << fmt17(lm.tan_p_horoellipse) << '\n';
        out << "# tan_p_horohyperbola=" << fmt17(lm.tan_p_horohyperbola) << '\n';
        out << "# tan_ptilde_horohyperbola="
            << (lm.tan_ptilde_horohyperbola ? fmt17(*lm.tan_ptilde_horohyperbola) : std::string("none")) << '\n';
        out << "# tan_p_limit=" << fmt17(lm.tan_p_limit) << '\n';
    }
    std::vector<std::string> header{"conic_id", "ecc", "d", "phi", "r"};
    for (const auto& name : chart_columns(chart)) header.push_back(name);
    header.push_back("family");
    header.push_back("type");
    write_csv_header(out, header);
    for (const auto& s : c.conics) {
        const std::string tail = std::string(to_string(s.spec.family)) + "," + to_string(s.type);
        for (const auto& p : s.points) {
            std::vector<double> row{static_cast<double>(s.id), s.spec.ecc, s.spec.d(), p.phi, p.r};
            for (double v : chart_values(kappa, chart, p)) row.push_back(v);
            write_csv_row(out, row, tail);
        }
    }
}

// ---------------------------------------------------------------------------
// trig-check

struct TrigCheck {
    std::uint64_t seed = 42;
    int samples = 0;
    double pythagorean = 0.0;
    double double_angle_cos = 0.0;
    double double_angle_sin = 0.0;
    double tolerance = 1e-13;
    bool pass() const { return std::max({pythagorean, double_angle_cos, double_angle_sin}) <= tolerance; }
};

/// Random (kappa, x) with kappa in [-4, 4] and |x| up to 0.9 pi/sqrt|kappa| (capped at 10).
inline TrigCheck trig_check(int samples, std::uint64_t seed) {
    if (samples < 1) throw ConfigError("samples must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> kd(-4.0, 4.0), unit(-1.0, 1.0);
    TrigCheck tc{seed, samples};
    for (int i = 0; i < samples; ++i) {
        const double kv = kd(rng);
        const Curvature kappa(kv);
        const double range = kv == 0.0 ? 10.0 : std::min(10.0, std::numbers::pi / std::sqrt(std::abs(kv)));
        const double x = 0.9 * range * unit(rng);
        const double c = cos_k(kappa, x), s = sin_k(kappa, x);
        const double scale = std::max(1.0, c * c + std::abs(kv) * s * s);
        tc.pythagorean = std::max(tc.pythagorean, std::abs(c * c + kv * s * s - 1.0) / scale);
        tc.double_angle_cos = std::max(tc.double_angle_cos, std::abs(cos_k(kappa, 2 * x) - (c * c - kv * s * s)) / scale);
        tc.double_angle_sin = std::max(tc.double_angle_sin,
                                       std::abs(sin_k(kappa, 2 * x) - 2 * s * c) / std::max(1.0, std::abs(2 * s * c)));
    }
    return tc;
}

inline nlohmann::json to_json(const TrigCheck& t) {
    return {{"seed", t.seed},
            {"samples", t.samples},
            {"max_residual",
             {{"pythagorean", t.pythagorean}, {"double_angle_cos", t.double_angle_cos}, {"double_angle_sin", t.double_angle_sin}}},
            {"tolerance", t.tolerance},
            {"pass", t.pass()}};
}

}  // namespace ckepler::app
